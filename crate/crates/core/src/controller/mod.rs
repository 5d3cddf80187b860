//! Controller programs. The controller runs in-process with zero compute
//! time; apps react to channel messages and return directives.

mod learning;
mod stp;

use std::fmt;
use std::str::FromStr;

pub use learning::{Learned, LearningSwitch, MacTable};
pub use stp::{stp_compute, LinkDiscovery, SpanningTree, StpLearningSwitch};

use crate::control::{ControlMessage, PacketIn};
use crate::error::ConfigError;
use crate::sim::SimTime;
use crate::topology::{PortNo, SwitchId};

/// Something a controller app asks the runtime to do.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Send(ControlMessage),
    Timer { delay_ms: f64, token: u64 },
}

pub trait ControllerApp: Send {
    fn name(&self) -> &'static str;

    fn on_switch_features(&mut self, _now: SimTime, _sw: SwitchId, _ports: &[PortNo]) -> Vec<Action> {
        Vec::new()
    }

    fn on_packet_in(&mut self, now: SimTime, pkt: &PacketIn) -> Vec<Action>;

    fn on_discovery_probe(
        &mut self,
        _now: SimTime,
        _sw: SwitchId,
        _in_port: PortNo,
        _origin: SwitchId,
        _origin_port: PortNo,
    ) -> Vec<Action> {
        Vec::new()
    }

    fn on_timer(&mut self, _now: SimTime, _token: u64) -> Vec<Action> {
        Vec::new()
    }

    fn mac_table(&self) -> &MacTable;

    fn spanning_tree(&self) -> Option<&SpanningTree> {
        None
    }

    /// Switch adjacency learned from probes, for apps that run discovery.
    fn discovery(&self) -> Option<&LinkDiscovery> {
        None
    }

    /// Set when the app hit a configuration problem it cannot recover from.
    fn config_error(&self) -> Option<&ConfigError> {
        None
    }
}

/// Controller program selector (`l2` | `l2-stp`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControllerKind {
    L2,
    L2Stp,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::L2 => "l2",
            ControllerKind::L2Stp => "l2-stp",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l2" => Ok(ControllerKind::L2),
            "l2-stp" | "stp" => Ok(ControllerKind::L2Stp),
            other => Err(format!("unknown controller app '{other}' (expected l2 or l2-stp)")),
        }
    }
}
