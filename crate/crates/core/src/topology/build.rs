use std::fmt;
use std::str::FromStr;

use super::model::*;
use crate::dataplane::{host_ip, MacAddr};
use crate::error::TopologyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyKind {
    Linear,
    Star,
    BinaryTree,
    FatTree,
    SpineLeaf,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 5] = [
        TopologyKind::Linear,
        TopologyKind::Star,
        TopologyKind::BinaryTree,
        TopologyKind::FatTree,
        TopologyKind::SpineLeaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Linear => "linear",
            TopologyKind::Star => "star",
            TopologyKind::BinaryTree => "binary-tree",
            TopologyKind::FatTree => "fat-tree",
            TopologyKind::SpineLeaf => "spine-leaf",
        }
    }

    /// Kinds whose switch graph contains cycles in general.
    pub fn is_looped(self) -> bool {
        matches!(self, TopologyKind::FatTree | TopologyKind::SpineLeaf)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "bus" => Ok(TopologyKind::Linear),
            "star" | "single" => Ok(TopologyKind::Star),
            "binary-tree" | "binarytree" | "tree" => Ok(TopologyKind::BinaryTree),
            "fat-tree" | "fattree" => Ok(TopologyKind::FatTree),
            "spine-leaf" | "spineleaf" | "leaf-spine" => Ok(TopologyKind::SpineLeaf),
            other => Err(format!(
                "unknown topology kind '{other}' (expected linear, star, binary-tree, fat-tree or spine-leaf)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologySpec {
    Linear { n_hosts: u32 },
    Star { n_hosts: u32 },
    /// `n_hosts` must be a power of two; the tree has `n_hosts - 1` switches.
    BinaryTree { n_hosts: u32 },
    /// k-ary fat tree with `k` clusters (pods); `k` even.
    FatTree { k: u32 },
    SpineLeaf {
        spines: u32,
        leaves: u32,
        hosts_per_leaf: u32,
    },
}

/// Node and link totals a spec must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub hosts: usize,
    pub switches: usize,
    pub switch_links: usize,
}

impl Census {
    pub fn links(&self) -> usize {
        self.hosts + self.switch_links
    }
}

impl TopologySpec {
    pub fn kind(&self) -> TopologyKind {
        match self {
            TopologySpec::Linear { .. } => TopologyKind::Linear,
            TopologySpec::Star { .. } => TopologyKind::Star,
            TopologySpec::BinaryTree { .. } => TopologyKind::BinaryTree,
            TopologySpec::FatTree { .. } => TopologyKind::FatTree,
            TopologySpec::SpineLeaf { .. } => TopologyKind::SpineLeaf,
        }
    }

    /// Spine-leaf sized like the k-ary fat tree: one spine per core switch,
    /// one leaf per edge switch, `k/2` hosts per leaf.
    pub fn spine_leaf_matching_fat_tree(k: u32) -> Self {
        TopologySpec::SpineLeaf {
            spines: k * k / 4,
            leaves: k * k / 2,
            hosts_per_leaf: k / 2,
        }
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        match *self {
            TopologySpec::Linear { n_hosts } if n_hosts == 0 => {
                Err(TopologyError::NoHosts { kind: "linear" })
            }
            TopologySpec::Star { n_hosts } if n_hosts == 0 => {
                Err(TopologyError::NoHosts { kind: "star" })
            }
            TopologySpec::BinaryTree { n_hosts } if n_hosts < 2 || !n_hosts.is_power_of_two() => {
                Err(TopologyError::BinaryTreeHosts(n_hosts))
            }
            TopologySpec::FatTree { k } if k < 2 || k % 2 != 0 => Err(TopologyError::FatTreeK(k)),
            TopologySpec::SpineLeaf {
                spines,
                leaves,
                hosts_per_leaf,
            } if spines == 0 || leaves == 0 || hosts_per_leaf == 0 => {
                Err(TopologyError::SpineLeafCounts)
            }
            _ => Ok(()),
        }
    }

    /// Closed-form node and link counts.
    pub fn census(&self) -> Census {
        let c = |h: u32, s: u32, l: u32| Census {
            hosts: h as usize,
            switches: s as usize,
            switch_links: l as usize,
        };
        match *self {
            TopologySpec::Linear { n_hosts } => c(n_hosts, n_hosts, n_hosts.saturating_sub(1)),
            TopologySpec::Star { n_hosts } => c(n_hosts, 1, 0),
            TopologySpec::BinaryTree { n_hosts } => c(n_hosts, n_hosts - 1, n_hosts.saturating_sub(2)),
            TopologySpec::FatTree { k } => c(k * k * k / 4, 5 * k * k / 4, k * k * k / 2),
            TopologySpec::SpineLeaf {
                spines,
                leaves,
                hosts_per_leaf,
            } => c(leaves * hosts_per_leaf, spines + leaves, spines * leaves),
        }
    }

    /// Compact label such as `fat-tree(k=4)`.
    pub fn label(&self) -> String {
        match *self {
            TopologySpec::Linear { n_hosts } => format!("linear({n_hosts})"),
            TopologySpec::Star { n_hosts } => format!("star({n_hosts})"),
            TopologySpec::BinaryTree { n_hosts } => format!("binary-tree({n_hosts})"),
            TopologySpec::FatTree { k } => format!("fat-tree(k={k})"),
            TopologySpec::SpineLeaf {
                spines,
                leaves,
                hosts_per_leaf,
            } => format!("spine-leaf({spines},{leaves},{hosts_per_leaf})"),
        }
    }
}

struct Builder {
    hosts: Vec<HostNode>,
    switches: Vec<SwitchNode>,
    links: Vec<LinkSpec>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            hosts: Vec::new(),
            switches: Vec::new(),
            links: Vec::new(),
        }
    }

    fn add_switches(&mut self, n: u32) -> Vec<SwitchId> {
        (0..n)
            .map(|_| {
                let id = SwitchId(self.switches.len() as u32 + 1);
                self.switches.push(SwitchNode {
                    id,
                    ports: Vec::new(),
                });
                id
            })
            .collect()
    }

    fn next_port(&self, s: SwitchId) -> PortNo {
        PortNo(self.switches[s.0 as usize - 1].ports.len() as u32 + 1)
    }

    fn attach_host(&mut self, s: SwitchId) -> HostId {
        let id = HostId(self.hosts.len() as u32 + 1);
        let link = LinkId(self.links.len());
        let host_end = Endpoint {
            node: NodeId::Host(id),
            port: PortNo(0),
        };
        let switch_end = Endpoint {
            node: NodeId::Switch(s),
            port: self.next_port(s),
        };
        self.switches[s.0 as usize - 1].ports.push(Port {
            no: switch_end.port,
            link,
            peer: host_end,
        });
        self.links.push(LinkSpec {
            id: link,
            a: host_end,
            b: switch_end,
            params: LinkParams::default(),
        });
        self.hosts.push(HostNode {
            id,
            mac: MacAddr::for_host(id.0),
            ip: host_ip(id.0),
            link,
            attached_to: switch_end,
        });
        id
    }

    fn connect(&mut self, x: SwitchId, y: SwitchId) {
        let link = LinkId(self.links.len());
        let a = Endpoint {
            node: NodeId::Switch(x),
            port: self.next_port(x),
        };
        let b = Endpoint {
            node: NodeId::Switch(y),
            port: self.next_port(y),
        };
        self.switches[x.0 as usize - 1].ports.push(Port {
            no: a.port,
            link,
            peer: b,
        });
        self.switches[y.0 as usize - 1].ports.push(Port {
            no: b.port,
            link,
            peer: a,
        });
        self.links.push(LinkSpec {
            id: link,
            a,
            b,
            params: LinkParams::default(),
        });
    }

    fn finish(self, spec: TopologySpec) -> NetworkModel {
        NetworkModel {
            spec,
            hosts: self.hosts,
            switches: self.switches,
            links: self.links,
        }
    }
}

/// Builds the network for `spec` with default link parameters.
///
/// Switch ports are numbered host-facing first, then switch-facing in link
/// construction order.
pub fn build(spec: &TopologySpec) -> Result<NetworkModel, TopologyError> {
    spec.validate()?;
    let mut b = Builder::new();
    match *spec {
        TopologySpec::Linear { n_hosts } => {
            let sw = b.add_switches(n_hosts);
            for &s in &sw {
                b.attach_host(s);
            }
            for pair in sw.windows(2) {
                b.connect(pair[0], pair[1]);
            }
        }
        TopologySpec::Star { n_hosts } => {
            let s = b.add_switches(1)[0];
            for _ in 0..n_hosts {
                b.attach_host(s);
            }
        }
        TopologySpec::BinaryTree { n_hosts } => {
            // Heap layout: s1 is the root, children of si are s(2i) and s(2i+1),
            // leaves are s(n/2)..s(n-1).
            let sw = b.add_switches(n_hosts - 1);
            let first_leaf = n_hosts / 2;
            for leaf in first_leaf..n_hosts {
                b.attach_host(sw[leaf as usize - 1]);
                b.attach_host(sw[leaf as usize - 1]);
            }
            for parent in 1..first_leaf {
                b.connect(SwitchId(parent), SwitchId(2 * parent));
                b.connect(SwitchId(parent), SwitchId(2 * parent + 1));
            }
        }
        TopologySpec::FatTree { k } => {
            let half = k / 2;
            let cores = b.add_switches(half * half);
            let aggs: Vec<Vec<SwitchId>> = (0..k).map(|_| b.add_switches(half)).collect();
            let edges: Vec<Vec<SwitchId>> = (0..k).map(|_| b.add_switches(half)).collect();
            for pod in &edges {
                for &edge in pod {
                    for _ in 0..half {
                        b.attach_host(edge);
                    }
                }
            }
            for pod in 0..k as usize {
                for &edge in &edges[pod] {
                    for &agg in &aggs[pod] {
                        b.connect(edge, agg);
                    }
                }
            }
            // core c uplinks to aggregation switch c / (k/2) of every pod
            for pod_aggs in &aggs {
                for (c, &core) in cores.iter().enumerate() {
                    b.connect(pod_aggs[c / half as usize], core);
                }
            }
        }
        TopologySpec::SpineLeaf {
            spines,
            leaves,
            hosts_per_leaf,
        } => {
            let spine_ids = b.add_switches(spines);
            let leaf_ids = b.add_switches(leaves);
            for &leaf in &leaf_ids {
                for _ in 0..hosts_per_leaf {
                    b.attach_host(leaf);
                }
            }
            for &leaf in &leaf_ids {
                for &spine in &spine_ids {
                    b.connect(spine, leaf);
                }
            }
        }
    }
    Ok(b.finish(*spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_census(spec: TopologySpec) {
        let net = build(&spec).unwrap();
        let expect = spec.census();
        assert_eq!(net.host_count(), expect.hosts, "{spec:?}");
        assert_eq!(net.switch_count(), expect.switches, "{spec:?}");
        assert_eq!(net.switch_link_count(), expect.switch_links, "{spec:?}");
        assert!(net.is_connected(), "{spec:?}");
    }

    #[test]
    fn linear_16() {
        let net = build(&TopologySpec::Linear { n_hosts: 16 }).unwrap();
        assert_eq!((net.host_count(), net.switch_count()), (16, 16));
        assert_eq!(net.switch_link_count(), 15);
        // hi sits on si
        for h in &net.hosts {
            assert_eq!(h.attached_to.node, NodeId::Switch(SwitchId(h.id.0)));
        }
    }

    #[test]
    fn fat_tree_4() {
        let net = build(&TopologySpec::FatTree { k: 4 }).unwrap();
        assert_eq!((net.host_count(), net.switch_count()), (16, 20));
        assert_eq!(net.switch_link_count(), 32);
        assert_eq!(net.links.len(), 48);
        // every switch in a k=4 fat tree has exactly k ports
        for s in &net.switches {
            assert_eq!(s.ports.len(), 4, "{}", s.id);
        }
    }

    #[test]
    fn fat_tree_2() {
        let net = build(&TopologySpec::FatTree { k: 2 }).unwrap();
        assert_eq!((net.host_count(), net.switch_count()), (2, 5));
    }

    #[test]
    fn spine_leaf_fig5() {
        let net = build(&TopologySpec::SpineLeaf {
            spines: 2,
            leaves: 3,
            hosts_per_leaf: 2,
        })
        .unwrap();
        assert_eq!((net.host_count(), net.switch_count()), (6, 5));
        assert_eq!(net.switch_link_count(), 6);
    }

    #[test]
    fn binary_tree_8() {
        let net = build(&TopologySpec::BinaryTree { n_hosts: 8 }).unwrap();
        assert_eq!((net.host_count(), net.switch_count()), (8, 7));
        // leaves carry exactly two hosts, inner switches none
        for s in &net.switches {
            let hosts = s.host_ports().count();
            assert_eq!(hosts, if s.id.0 >= 4 { 2 } else { 0 });
        }
    }

    #[test]
    fn census_formulas_hold() {
        for n in [1, 2, 3, 4, 8, 16, 32, 64, 128] {
            check_census(TopologySpec::Linear { n_hosts: n });
            check_census(TopologySpec::Star { n_hosts: n });
        }
        for n in [2, 4, 8, 16, 32, 64, 128] {
            check_census(TopologySpec::BinaryTree { n_hosts: n });
        }
        for k in [2, 4, 6, 8] {
            check_census(TopologySpec::FatTree { k });
            check_census(TopologySpec::spine_leaf_matching_fat_tree(k));
        }
        for (s, l, h) in [(1, 1, 1), (2, 3, 2), (4, 8, 2), (3, 5, 7)] {
            check_census(TopologySpec::SpineLeaf {
                spines: s,
                leaves: l,
                hosts_per_leaf: h,
            });
        }
    }

    #[test]
    fn invalid_specs_name_the_rule() {
        assert_eq!(
            build(&TopologySpec::FatTree { k: 3 }).unwrap_err(),
            TopologyError::FatTreeK(3)
        );
        assert_eq!(
            build(&TopologySpec::BinaryTree { n_hosts: 6 }).unwrap_err(),
            TopologyError::BinaryTreeHosts(6)
        );
        assert!(build(&TopologySpec::Linear { n_hosts: 0 }).is_err());
        assert!(build(&TopologySpec::SpineLeaf {
            spines: 0,
            leaves: 1,
            hosts_per_leaf: 1
        })
        .is_err());
        let msg = TopologyError::FatTreeK(3).to_string();
        assert!(msg.contains("even"), "{msg}");
    }

    #[test]
    fn host_ports_numbered_first() {
        for spec in [
            TopologySpec::FatTree { k: 4 },
            TopologySpec::SpineLeaf {
                spines: 2,
                leaves: 3,
                hosts_per_leaf: 2,
            },
            TopologySpec::Linear { n_hosts: 5 },
        ] {
            let net = build(&spec).unwrap();
            for s in &net.switches {
                let first_switch_port = s.ports.iter().position(|p| matches!(p.peer.node, NodeId::Switch(_)));
                if let Some(i) = first_switch_port {
                    assert!(s.ports[i..].iter().all(|p| matches!(p.peer.node, NodeId::Switch(_))));
                }
                for (i, p) in s.ports.iter().enumerate() {
                    assert_eq!(p.no, PortNo(i as u32 + 1));
                }
            }
        }
    }

    #[test]
    fn kind_parsing() {
        for k in TopologyKind::ALL {
            assert_eq!(k.name().parse::<TopologyKind>().unwrap(), k);
        }
        assert!("ring".parse::<TopologyKind>().is_err());
    }
}
