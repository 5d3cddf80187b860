//! Deterministic packet-level simulator of a reactive SDN (one controller,
//! OpenFlow-like switches, hosts, shaped links) and a benchmark harness for
//! bandwidth and RTT experiments across linear, star, binary-tree, fat-tree
//! and spine-leaf topologies.

pub mod control;
pub mod controller;
pub mod dataplane;
pub mod error;
pub mod harness;
pub mod sim;
pub mod simulation;
pub mod topology;
pub mod traffic;

pub use controller::ControllerKind;
pub use error::{ConfigError, Error, Result, SimError, StormDetected, TopologyError};
pub use simulation::{SimConfig, Simulation};
pub use topology::{build, TopologyKind, TopologySpec};
pub use traffic::{BandwidthReport, PingReport, Status, TrafficConfig};
