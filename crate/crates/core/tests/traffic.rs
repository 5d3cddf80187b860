mod common;

use common::{close, ser_ms, sim, sim_with, steady_rtt_ms};
use sdnbench::topology::{HostId, LinkParams, TopologySpec};
use sdnbench::traffic::{throughput_of, Status};
use sdnbench::{ControllerKind, SimConfig, TrafficConfig};

#[test]
fn star2_rtt_matches_closed_form() {
    // two links, one switch; the first echo also waits one PacketIn round trip
    let steady = steady_rtt_ms(2, 1, 1.0, 100.0, 0.05);
    let first = steady + 2.0 * 10.0;
    assert!((steady - 4.12048).abs() < 1e-9);
    let mut s = sim(TopologySpec::Star { n_hosts: 2 }, ControllerKind::L2);
    let r = s.ping(HostId(1), HostId(2)).unwrap();
    assert!(close(r.first_rtt_ms.unwrap(), first, 1e-9));
    assert_eq!(r.replies.len(), 10);
    for x in r.rtts() {
        assert!(close(x, steady, 1e-9));
    }
    assert_eq!(r.integrity_errors, 0);
}

#[test]
fn linear_first_echo_pays_one_round_trip_per_switch() {
    for n in [2u32, 4, 16] {
        let mut s = sim(TopologySpec::Linear { n_hosts: n }, ControllerKind::L2);
        let r = s.ping(HostId(1), HostId(n)).unwrap();
        let steady = steady_rtt_ms(n + 1, n, 1.0, 100.0, 0.05);
        assert!(close(r.mean_rtt_ms().unwrap(), steady, 1e-9), "n={n}");
        assert!(close(r.first_rtt_ms.unwrap(), steady + n as f64 * 20.0, 1e-9), "n={n}");
    }
}

#[test]
fn second_ping_is_warm() {
    let mut s = sim(TopologySpec::Linear { n_hosts: 8 }, ControllerKind::L2);
    let a = s.ping(HostId(1), HostId(8)).unwrap();
    let b = s.ping(HostId(1), HostId(8)).unwrap();
    assert!(a.first_rtt_ms.unwrap() > b.first_rtt_ms.unwrap());
    assert!(close(b.first_rtt_ms.unwrap(), b.mean_rtt_ms().unwrap(), 1e-9));
    assert_eq!(b.arp_resolved_at, Some(b.started_at));
}

#[test]
fn window_throughput_oracle() {
    // data out: 2 x 1500 B link hops + proc; ack back: 2 x 64 B hops + proc
    let rtt_path = 2.0 * (ser_ms(1500.0, 100.0) + 1.0) + 2.0 * (ser_ms(64.0, 100.0) + 1.0) + 2.0 * 0.05;
    for w in [8u32, 64] {
        let expected = f64::min(100.0, w as f64 * 12_000.0 / (rtt_path * 1e3));
        let cfg = SimConfig {
            traffic: TrafficConfig {
                window: w,
                ..Default::default()
            },
            ..Default::default()
        };
        let mut s = sim_with(TopologySpec::Star { n_hosts: 2 }, cfg);
        let r = s.bandwidth_test(HostId(1), HostId(2), 5.0).unwrap();
        assert_eq!(r.status, Status::Ok);
        assert!(close(r.bandwidth_mbps, expected, 0.10), "W={w}: {} vs {expected}", r.bandwidth_mbps);
    }
}

#[test]
fn report_fields_agree() {
    let mut s = sim(TopologySpec::Linear { n_hosts: 4 }, ControllerKind::L2);
    let rs = s.bandwidth_series(HostId(1), HostId(4), &[1.0, 2.0, 5.0]).unwrap();
    let mut last = 0;
    for r in rs {
        let d = r.interval.1 - r.interval.0;
        assert_eq!(r.bandwidth_mbps, throughput_of(r.transfer_bytes, d).unwrap());
        assert!(r.transfer_bytes >= last);
        assert_eq!(r.transfer_bytes % 1500, 0);
        last = r.transfer_bytes;
    }
}

#[test]
fn bandwidth_shrinks_with_hops() {
    let mut prev = f64::INFINITY;
    for n in [2u32, 4, 8, 16] {
        let mut s = sim(TopologySpec::Linear { n_hosts: n }, ControllerKind::L2);
        let r = s.bandwidth_test(HostId(1), HostId(n), 10.0).unwrap();
        assert!(r.bandwidth_mbps <= prev, "n={n}");
        prev = r.bandwidth_mbps;
    }
}

#[test]
fn first_contact_exceeds_steady_by_two_latencies() {
    for spec in [
        TopologySpec::Star { n_hosts: 8 },
        TopologySpec::BinaryTree { n_hosts: 8 },
        TopologySpec::Linear { n_hosts: 32 },
    ] {
        let mut s = sim(spec, ControllerKind::L2);
        let last = HostId(s.model().host_count() as u32);
        let r = s.ping(HostId(1), last).unwrap();
        let first = r.first_rtt_ms.unwrap();
        assert!(first > r.max_rtt_ms().unwrap());
        assert!(first - r.mean_rtt_ms().unwrap() >= 2.0 * 10.0);
    }
}

#[test]
fn lossy_links_lose_echoes_but_keep_counting() {
    let cfg = SimConfig {
        link: LinkParams {
            loss_rate: 0.2,
            ..Default::default()
        },
        seed: 11,
        ..Default::default()
    };
    let mut s = sim_with(TopologySpec::Linear { n_hosts: 4 }, cfg);
    let r = s.ping(HostId(1), HostId(4)).unwrap();
    assert_eq!(r.rtts().len() + r.losses(), 10);
    assert!(r.rtts().iter().all(|x| *x > 0.0));
    assert!(s.dataplane().counters.conserved());
    assert!(s.dataplane().counters.dropped_loss > 0);
}

#[test]
fn total_loss_is_no_route() {
    let cfg = SimConfig {
        link: LinkParams {
            loss_rate: 1.0,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut s = sim_with(TopologySpec::Star { n_hosts: 2 }, cfg);
    let r = s.ping(HostId(1), HostId(2)).unwrap();
    assert!(r.no_route());
    assert_eq!(r.first_rtt_ms, None);
    assert_eq!(r.losses(), 10);
    let b = s.bandwidth_test(HostId(1), HostId(2), 5.0).unwrap();
    assert_eq!((b.status, b.transfer_bytes), (Status::NoRoute, 0));
}
