#![allow(dead_code)]

use sdnbench::topology::{build, TopologySpec};
use sdnbench::{ControllerKind, SimConfig, Simulation};

pub fn sim(spec: TopologySpec, controller: ControllerKind) -> Simulation {
    sim_with(spec, SimConfig {
        controller,
        ..SimConfig::default()
    })
}

pub fn sim_with(spec: TopologySpec, cfg: SimConfig) -> Simulation {
    Simulation::new(build(&spec).unwrap(), cfg).unwrap()
}

/// Serialization time in ms of `bytes` on a `mbps` link.
pub fn ser_ms(bytes: f64, mbps: f64) -> f64 {
    bytes * 8.0 / (mbps * 1e3)
}

/// Steady-state RTT of a 64 B echo over `links` links and `switches` switches
/// with warm flow tables: each direction pays every link's serialization and
/// propagation once plus one processing delay per switch.
pub fn steady_rtt_ms(links: u32, switches: u32, delay_ms: f64, mbps: f64, proc_ms: f64) -> f64 {
    2.0 * (links as f64 * (ser_ms(64.0, mbps) + delay_ms) + switches as f64 * proc_ms)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}
