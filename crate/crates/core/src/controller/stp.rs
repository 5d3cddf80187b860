use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::learning::{LearningSwitch, MacTable};
use super::{Action, ControllerApp};
use crate::control::{ControlMessage, OutPayload, OutputAction, PacketIn, PacketOut};
use crate::dataplane::{Frame, PortState};
use crate::error::ConfigError;
use crate::sim::SimTime;
use crate::topology::{PortNo, SwitchEdge, SwitchId};

/// Switch adjacency as learned from discovery probes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkDiscovery {
    ports: BTreeMap<SwitchId, Vec<PortNo>>,
    edges: BTreeSet<SwitchEdge>,
}

impl LinkDiscovery {
    pub fn record_features(&mut self, sw: SwitchId, ports: &[PortNo]) {
        self.ports.insert(sw, ports.to_vec());
    }

    pub fn record_probe(&mut self, at: SwitchId, in_port: PortNo, origin: SwitchId, origin_port: PortNo) {
        let edge = if origin < at {
            SwitchEdge {
                a: origin,
                a_port: origin_port,
                b: at,
                b_port: in_port,
            }
        } else {
            SwitchEdge {
                a: at,
                a_port: in_port,
                b: origin,
                b_port: origin_port,
            }
        };
        self.edges.insert(edge);
    }

    pub fn switches(&self) -> Vec<SwitchId> {
        self.ports.keys().copied().collect()
    }

    pub fn edges(&self) -> &BTreeSet<SwitchEdge> {
        &self.edges
    }

    /// Ports on which no probe was seen in either direction.
    pub fn host_facing_ports(&self, sw: SwitchId) -> Vec<PortNo> {
        let linked: BTreeSet<PortNo> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == sw {
                    Some(e.a_port)
                } else if e.b == sw {
                    Some(e.b_port)
                } else {
                    None
                }
            })
            .collect();
        self.ports
            .get(&sw)
            .map(|ps| ps.iter().copied().filter(|p| !linked.contains(p)).collect())
            .unwrap_or_default()
    }
}

/// Port roles forming a loop-free active topology.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub root: SwitchId,
    /// Roles of switch-to-switch ports. Host-facing ports are always Forwarding.
    pub roles: BTreeMap<(SwitchId, PortNo), PortState>,
    pub tree_edges: BTreeSet<SwitchEdge>,
    pub converged_at: Option<SimTime>,
}

impl SpanningTree {
    pub fn role(&self, sw: SwitchId, port: PortNo) -> PortState {
        self.roles
            .get(&(sw, port))
            .copied()
            .unwrap_or(PortState::Forwarding)
    }

    pub fn blocked_ports(&self) -> impl Iterator<Item = (SwitchId, PortNo)> + '_ {
        self.roles
            .iter()
            .filter(|(_, st)| **st == PortState::Blocked)
            .map(|(k, _)| *k)
    }
}

/// Central spanning tree: the lowest switch id is root, and every other switch
/// keeps the link to its lowest-id neighbor one hop closer to the root
/// (lowest local port on ties). Every other switch-to-switch port is Blocked.
pub fn stp_compute(
    switches: &[SwitchId],
    edges: &BTreeSet<SwitchEdge>,
) -> Result<SpanningTree, ConfigError> {
    let root = *switches
        .iter()
        .min()
        .ok_or(ConfigError::DisconnectedSwitchGraph)?;

    // switch -> [(neighbor, local port, edge)]
    let mut adj: BTreeMap<SwitchId, Vec<(SwitchId, PortNo, SwitchEdge)>> =
        switches.iter().map(|&s| (s, Vec::new())).collect();
    for e in edges {
        adj.entry(e.a).or_default().push((e.b, e.a_port, *e));
        adj.entry(e.b).or_default().push((e.a, e.b_port, *e));
    }

    let mut depth: BTreeMap<SwitchId, u32> = BTreeMap::from([(root, 0)]);
    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        let d = depth[&s];
        for &(n, _, _) in &adj[&s] {
            if !depth.contains_key(&n) {
                depth.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    if depth.len() != adj.len() {
        return Err(ConfigError::DisconnectedSwitchGraph);
    }

    let mut tree_edges = BTreeSet::new();
    for (&s, neighbors) in &adj {
        if s == root {
            continue;
        }
        let parent_depth = depth[&s] - 1;
        let (_, _, edge) = neighbors
            .iter()
            .filter(|(n, _, _)| depth[n] == parent_depth)
            .min_by_key(|(n, port, _)| (*n, *port))
            .expect("non-root switch in a connected graph has a parent");
        tree_edges.insert(*edge);
    }

    let mut roles = BTreeMap::new();
    for e in edges {
        let state = if tree_edges.contains(e) {
            PortState::Forwarding
        } else {
            PortState::Blocked
        };
        roles.insert((e.a, e.a_port), state);
        roles.insert((e.b, e.b_port), state);
    }

    Ok(SpanningTree {
        root,
        roles,
        tree_edges,
        converged_at: None,
    })
}

const DISCOVERY_TIMER: u64 = 1;

/// Learning switch that first discovers the switch graph, computes a spanning
/// tree, and blocks every port off the tree.
#[derive(Debug, Clone)]
pub struct StpLearningSwitch {
    learning: LearningSwitch,
    discovery: LinkDiscovery,
    tree: Option<SpanningTree>,
    error: Option<ConfigError>,
    discovery_wait_ms: f64,
    control_latency_ms: f64,
    timer_armed: bool,
}

impl StpLearningSwitch {
    /// `discovery_wait_ms` is how long after the first switch connects the
    /// controller waits for probes before computing the tree.
    pub fn new(discovery_wait_ms: f64, control_latency_ms: f64) -> Self {
        StpLearningSwitch {
            learning: LearningSwitch::new(),
            discovery: LinkDiscovery::default(),
            tree: None,
            error: None,
            discovery_wait_ms,
            control_latency_ms,
            timer_armed: false,
        }
    }

    pub fn error(&self) -> Option<&ConfigError> {
        self.error.as_ref()
    }
}

impl ControllerApp for StpLearningSwitch {
    fn name(&self) -> &'static str {
        "l2-stp"
    }

    fn on_switch_features(&mut self, _now: SimTime, sw: SwitchId, ports: &[PortNo]) -> Vec<Action> {
        self.discovery.record_features(sw, ports);
        let mut out: Vec<Action> = ports
            .iter()
            .map(|&p| {
                Action::Send(ControlMessage::PacketOut(PacketOut {
                    switch_id: sw,
                    payload: OutPayload::Frame(Frame::probe(sw, p)),
                    action: OutputAction::Output(p),
                }))
            })
            .collect();
        if !self.timer_armed {
            self.timer_armed = true;
            out.push(Action::Timer {
                delay_ms: self.discovery_wait_ms,
                token: DISCOVERY_TIMER,
            });
        }
        out
    }

    fn on_discovery_probe(
        &mut self,
        _now: SimTime,
        sw: SwitchId,
        in_port: PortNo,
        origin: SwitchId,
        origin_port: PortNo,
    ) -> Vec<Action> {
        self.discovery.record_probe(sw, in_port, origin, origin_port);
        Vec::new()
    }

    fn on_timer(&mut self, now: SimTime, token: u64) -> Vec<Action> {
        if token != DISCOVERY_TIMER || self.tree.is_some() {
            return Vec::new();
        }
        match stp_compute(&self.discovery.switches(), self.discovery.edges()) {
            Ok(mut tree) => {
                tree.converged_at = Some(now + self.control_latency_ms);
                let msgs = tree
                    .roles
                    .iter()
                    .map(|(&(sw, port), &state)| {
                        Action::Send(ControlMessage::PortMod {
                            switch_id: sw,
                            port,
                            state,
                        })
                    })
                    .collect();
                self.tree = Some(tree);
                msgs
            }
            Err(e) => {
                self.error = Some(e);
                Vec::new()
            }
        }
    }

    fn on_packet_in(&mut self, now: SimTime, pkt: &PacketIn) -> Vec<Action> {
        if let Some(tree) = &self.tree {
            if tree.role(pkt.switch_id, pkt.in_port) == PortState::Blocked {
                return Vec::new();
            }
        }
        self.learning
            .decide(now, pkt)
            .into_iter()
            .map(Action::Send)
            .collect()
    }

    fn mac_table(&self) -> &MacTable {
        self.learning.mac_table()
    }

    fn spanning_tree(&self) -> Option<&SpanningTree> {
        self.tree.as_ref()
    }

    fn discovery(&self) -> Option<&LinkDiscovery> {
        Some(&self.discovery)
    }

    fn config_error(&self) -> Option<&ConfigError> {
        self.error.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build, TopologySpec};

    fn tree_for(spec: TopologySpec) -> (SpanningTree, BTreeSet<SwitchEdge>) {
        let net = build(&spec).unwrap();
        let ids: Vec<SwitchId> = net.switches.iter().map(|s| s.id).collect();
        let edges = net.switch_edges();
        (stp_compute(&ids, &edges).unwrap(), edges)
    }

    #[test]
    fn linear_is_its_own_tree() {
        let (t, edges) = tree_for(TopologySpec::Linear { n_hosts: 16 });
        assert_eq!(t.tree_edges.len(), 15);
        assert_eq!(t.tree_edges, edges);
        assert_eq!(t.blocked_ports().count(), 0);
    }

    #[test]
    fn fat_tree_4_blocks_13_links() {
        let (t, edges) = tree_for(TopologySpec::FatTree { k: 4 });
        assert_eq!(edges.len(), 32);
        assert_eq!(t.tree_edges.len(), 19);
        assert_eq!(t.blocked_ports().count(), 2 * 13);
        assert_eq!(t.root, SwitchId(1));
    }

    #[test]
    fn spine_leaf_fig5() {
        let (t, _) = tree_for(TopologySpec::SpineLeaf {
            spines: 2,
            leaves: 3,
            hosts_per_leaf: 2,
        });
        assert_eq!(t.tree_edges.len(), 4);
        assert_eq!(t.blocked_ports().count(), 4);
        // root spine keeps every leaf; the second spine hangs off the lowest leaf
        let s2: Vec<_> = t.tree_edges.iter().filter(|e| e.a == SwitchId(2)).collect();
        assert_eq!(s2.len(), 1);
        assert_eq!(s2[0].b, SwitchId(3));
    }

    #[test]
    fn disconnected_graph_is_config_error() {
        let ids = [SwitchId(1), SwitchId(2)];
        assert_eq!(
            stp_compute(&ids, &BTreeSet::new()).unwrap_err(),
            ConfigError::DisconnectedSwitchGraph
        );
    }

    #[test]
    fn single_switch() {
        let (t, _) = tree_for(TopologySpec::Star { n_hosts: 5 });
        assert!(t.tree_edges.is_empty());
        assert_eq!(t.root, SwitchId(1));
    }

    #[test]
    fn discovery_identifies_host_ports() {
        let mut d = LinkDiscovery::default();
        d.record_features(SwitchId(1), &[PortNo(1), PortNo(2)]);
        d.record_features(SwitchId(2), &[PortNo(1), PortNo(2)]);
        d.record_probe(SwitchId(2), PortNo(2), SwitchId(1), PortNo(2));
        d.record_probe(SwitchId(1), PortNo(2), SwitchId(2), PortNo(2));
        assert_eq!(d.edges().len(), 1);
        assert_eq!(d.host_facing_ports(SwitchId(1)), vec![PortNo(1)]);
    }
}
