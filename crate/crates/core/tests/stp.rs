mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::sim;
use sdnbench::dataplane::{host_ip, PortState};
use sdnbench::topology::{HostId, NodeId, SwitchId, TopologySpec};
use sdnbench::ControllerKind;

fn looped_specs() -> Vec<TopologySpec> {
    vec![
        TopologySpec::FatTree { k: 2 },
        TopologySpec::FatTree { k: 4 },
        TopologySpec::SpineLeaf {
            spines: 2,
            leaves: 3,
            hosts_per_leaf: 2,
        },
    ]
}

/// Connected + acyclic + |S|-1 edges, checked by union-find from scratch.
fn is_spanning_tree(switches: &[SwitchId], edges: &[(SwitchId, SwitchId)]) -> bool {
    let mut parent: BTreeMap<SwitchId, SwitchId> = switches.iter().map(|&s| (s, s)).collect();
    fn find(p: &mut BTreeMap<SwitchId, SwitchId>, x: SwitchId) -> SwitchId {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent.insert(ra, rb);
    }
    let roots: BTreeSet<_> = switches.iter().map(|&s| find(&mut parent, s)).collect();
    roots.len() == 1 && edges.len() + 1 == switches.len()
}

#[test]
fn forwarding_edges_form_a_spanning_tree() {
    for spec in looped_specs() {
        let mut s = sim(spec, ControllerKind::L2Stp);
        s.settle().unwrap();
        let model = s.model();
        let dp = s.dataplane();
        // read port states from the switches themselves, not the controller's view
        let forwarding: Vec<(SwitchId, SwitchId)> = model
            .switch_edges()
            .iter()
            .filter(|e| {
                let a = dp.switch(e.a).port_state(e.a_port) == Some(PortState::Forwarding);
                let b = dp.switch(e.b).port_state(e.b_port) == Some(PortState::Forwarding);
                assert_eq!(a, b, "{spec:?}: edge ends disagree");
                a
            })
            .map(|e| (e.a, e.b))
            .collect();
        let ids: Vec<SwitchId> = model.switches.iter().map(|s| s.id).collect();
        assert!(is_spanning_tree(&ids, &forwarding), "{spec:?}");
        for sw in &model.switches {
            for p in sw.host_ports() {
                assert_eq!(dp.switch(sw.id).port_state(p.no), Some(PortState::Forwarding));
            }
        }
        let tree = s.spanning_tree().unwrap();
        assert!(tree.converged_at.unwrap().as_ms() < s.config().stp_settle_ms);
    }
}

#[test]
fn all_pairs_ping_after_convergence() {
    for spec in looped_specs() {
        let mut s = sim(spec, ControllerKind::L2Stp);
        let n = s.model().host_count() as u32;
        for a in 1..=n {
            for b in 1..=n {
                if a != b {
                    let r = s.ping(HostId(a), HostId(b)).unwrap();
                    assert!(r.first_rtt_ms.is_some(), "{spec:?} h{a}->h{b}");
                    assert_eq!(r.losses(), 0, "{spec:?} h{a}->h{b}");
                }
            }
        }
        assert!(s.storm().is_none());
    }
}

#[test]
fn one_broadcast_reaches_every_host_once() {
    for spec in looped_specs() {
        let mut s = sim(spec, ControllerKind::L2Stp);
        s.settle().unwrap();
        let before = s.broadcast_rx().to_vec();
        s.inject_arp_request(HostId(1), "10.0.0.250".parse().unwrap());
        s.run_for(2000.0);
        let got: Vec<u64> = s.broadcast_rx().iter().zip(&before).map(|(a, b)| a - b).collect();
        assert_eq!(got[0], 0, "{spec:?}: echoed back to sender");
        assert!(got[1..].iter().all(|&c| c == 1), "{spec:?}: {got:?}");
    }
}

#[test]
fn plain_learning_switch_storms_on_the_same_frame() {
    let cfg = sdnbench::SimConfig::default();
    let mut s = common::sim_with(TopologySpec::FatTree { k: 4 }, cfg);
    s.inject_arp_request(HostId(1), host_ip(16));
    s.run_for(1000.0);
    assert!(s.storm().is_some());
}

#[test]
fn mac_table_follows_tree_path() {
    let mut s = sim(TopologySpec::FatTree { k: 4 }, ControllerKind::L2Stp);
    s.ping(HostId(1), HostId(16)).unwrap();
    let model = s.model().clone();
    let tree = s.spanning_tree().unwrap().clone();
    // BFS over forwarding edges from h1's switch gives the unique tree port toward h1
    let h1 = model.host(HostId(1));
    let NodeId::Switch(home) = h1.attached_to.node else { unreachable!() };
    let mut toward: BTreeMap<SwitchId, sdnbench::topology::PortNo> = BTreeMap::new();
    toward.insert(home, h1.attached_to.port);
    let mut frontier = vec![home];
    while let Some(cur) = frontier.pop() {
        for p in model.switch(cur).switch_ports() {
            if tree.role(cur, p.no) != PortState::Forwarding {
                continue;
            }
            let NodeId::Switch(next) = p.peer.node else { continue };
            if let std::collections::btree_map::Entry::Vacant(e) = toward.entry(next) {
                e.insert(p.peer.port);
                frontier.push(next);
            }
        }
    }
    let mac = h1.mac;
    for (sw, port) in toward {
        assert_eq!(s.controller().mac_table().lookup(sw, mac), Some(port), "{sw}");
    }
}

#[test]
fn disconnected_switch_graph_is_rejected() {
    use sdnbench::controller::stp_compute;
    let ids = [SwitchId(1), SwitchId(2), SwitchId(3)];
    assert!(stp_compute(&ids, &BTreeSet::new()).is_err());
}

#[test]
fn settle_shorter_than_convergence_is_config_error() {
    let cfg = sdnbench::SimConfig {
        controller: ControllerKind::L2Stp,
        control_latency_ms: 300.0,
        ..Default::default()
    };
    let model = sdnbench::build(&TopologySpec::FatTree { k: 4 }).unwrap();
    assert!(sdnbench::Simulation::new(model, cfg).is_err());
}
