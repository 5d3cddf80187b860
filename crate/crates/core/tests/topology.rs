use std::collections::{BTreeMap, VecDeque};

use sdnbench::topology::{build, HostId, NetworkModel, NodeId, TopologySpec};

fn shortest_path_count(net: &NetworkModel, from: NodeId, to: NodeId) -> (u32, u64) {
    let mut dist: BTreeMap<NodeId, u32> = BTreeMap::from([(from, 0)]);
    let mut ways: BTreeMap<NodeId, u64> = BTreeMap::from([(from, 1)]);
    let mut q = VecDeque::from([from]);
    while let Some(n) = q.pop_front() {
        let d = dist[&n];
        let w = ways[&n];
        for (_, m) in net.neighbors(n) {
            match dist.get(&m) {
                None => {
                    dist.insert(m, d + 1);
                    ways.insert(m, w);
                    q.push_back(m);
                }
                Some(&dm) if dm == d + 1 => *ways.get_mut(&m).unwrap() += w,
                _ => {}
            }
        }
    }
    (dist[&to], ways[&to])
}

#[test]
fn fat_tree_path_diversity() {
    for k in [2u32, 4] {
        let net = build(&TopologySpec::FatTree { k }).unwrap();
        let per_pod = k * k / 4;
        let a = NodeId::Host(HostId(1));
        let b = NodeId::Host(HostId(per_pod + 1));
        let (hops, paths) = shortest_path_count(&net, a, b);
        assert_eq!(hops, 6);
        assert!(paths >= ((k / 2) * (k / 2)) as u64, "k={k}: {paths}");
    }
}

#[test]
fn every_sweep_topology_is_connected_with_expected_counts() {
    let mut specs = Vec::new();
    for n in [2u32, 4, 8, 16, 32, 64, 128] {
        specs.push(TopologySpec::Linear { n_hosts: n });
        specs.push(TopologySpec::Star { n_hosts: n });
        specs.push(TopologySpec::BinaryTree { n_hosts: n });
    }
    for k in [2u32, 4, 8] {
        specs.push(TopologySpec::FatTree { k });
        specs.push(TopologySpec::spine_leaf_matching_fat_tree(k));
    }
    for spec in specs {
        let net = build(&spec).unwrap();
        assert!(net.is_connected(), "{spec:?}");
        let c = spec.census();
        assert_eq!(net.host_count(), c.hosts, "{spec:?}");
        assert_eq!(net.switch_count(), c.switches, "{spec:?}");
        assert_eq!(net.switch_link_count(), c.switch_links, "{spec:?}");
        assert_eq!(net.links.len(), c.hosts + c.switch_links, "{spec:?}");
        if let TopologySpec::FatTree { k } = spec {
            assert_eq!(c.hosts as u32, k * k * k / 4);
            assert_eq!(c.switches as u32, 5 * k * k / 4);
            assert_eq!(c.switch_links as u32, k * k * k / 2);
        }
        if let TopologySpec::SpineLeaf { spines, leaves, .. } = spec {
            assert_eq!(c.switch_links as u32, spines * leaves);
        }
    }
}

#[test]
fn matched_spine_leaf_has_fat_tree_host_count() {
    for k in [2u32, 4, 8] {
        let ft = TopologySpec::FatTree { k }.census();
        let sl = TopologySpec::spine_leaf_matching_fat_tree(k).census();
        assert_eq!(ft.hosts, sl.hosts);
    }
}
