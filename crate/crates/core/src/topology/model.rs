use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::net::Ipv4Addr;

use super::TopologySpec;
use crate::dataplane::MacAddr;
use crate::error::ConfigError;

/// 1-based host index; host `HostId(i)` is named `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HostId(pub u32);

/// 1-based switch index; doubles as the bridge id for spanning tree election.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwitchId(pub u32);

/// Port number on a node. Switch ports start at 1; a host's only port is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortNo(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    Host(HostId),
    Switch(SwitchId),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Host(h) => h.fmt(f),
            NodeId::Switch(s) => s.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub node: NodeId,
    pub port: PortNo,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-eth{}", self.node, self.port.0)
    }
}

/// Traffic-control parameters of a full-duplex link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Megabits per second, 1 Mbps = 10^6 bit/s.
    pub bandwidth_mbps: f64,
    /// One-way propagation delay.
    pub delay_ms: f64,
    pub loss_rate: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            bandwidth_mbps: 100.0,
            delay_ms: 1.0,
            loss_rate: 0.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.bandwidth_mbps > 0.0 && self.bandwidth_mbps.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "link bandwidth must be > 0 Mbps, got {}",
                self.bandwidth_mbps
            )));
        }
        if !(self.delay_ms >= 0.0 && self.delay_ms.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "link delay must be >= 0 ms, got {}",
                self.delay_ms
            )));
        }
        if !(0.0..=1.0).contains(&self.loss_rate) {
            return Err(ConfigError::Invalid(format!(
                "link loss rate must be in [0, 1], got {}",
                self.loss_rate
            )));
        }
        Ok(())
    }

    /// Time to clock `bytes` onto the wire, in ms.
    pub fn serialization_ms(&self, bytes: u32) -> f64 {
        bytes as f64 * 8.0 / (self.bandwidth_mbps * 1e3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub id: LinkId,
    pub a: Endpoint,
    pub b: Endpoint,
    pub params: LinkParams,
}

impl LinkSpec {
    pub fn is_switch_link(&self) -> bool {
        matches!(
            (self.a.node, self.b.node),
            (NodeId::Switch(_), NodeId::Switch(_))
        )
    }

    /// The far side of the link as seen from `from`.
    pub fn other(&self, from: NodeId) -> Endpoint {
        if self.a.node == from {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub no: PortNo,
    pub link: LinkId,
    pub peer: Endpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HostNode {
    pub id: HostId,
    pub mac: MacAddr,
    pub ip: Ipv4Addr,
    pub link: LinkId,
    /// Switch port this host is plugged into.
    pub attached_to: Endpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchNode {
    pub id: SwitchId,
    pub ports: Vec<Port>,
}

impl SwitchNode {
    pub fn port(&self, no: PortNo) -> Option<&Port> {
        self.ports.get((no.0 as usize).checked_sub(1)?)
    }

    pub fn host_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports
            .iter()
            .filter(|p| matches!(p.peer.node, NodeId::Host(_)))
    }

    pub fn switch_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports
            .iter()
            .filter(|p| matches!(p.peer.node, NodeId::Switch(_)))
    }
}

/// One switch-to-switch adjacency, oriented so that `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwitchEdge {
    pub a: SwitchId,
    pub a_port: PortNo,
    pub b: SwitchId,
    pub b_port: PortNo,
}

/// A built network: hosts `h1..hN`, switches `s1..sM`, and the links between them.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    pub spec: TopologySpec,
    pub hosts: Vec<HostNode>,
    pub switches: Vec<SwitchNode>,
    pub links: Vec<LinkSpec>,
}

impl NetworkModel {
    pub fn host(&self, id: HostId) -> &HostNode {
        &self.hosts[id.0 as usize - 1]
    }

    pub fn switch(&self, id: SwitchId) -> &SwitchNode {
        &self.switches[id.0 as usize - 1]
    }

    pub fn link(&self, id: LinkId) -> &LinkSpec {
        &self.links[id.0]
    }

    pub fn host_count(&self) -> usize {
        self.hosts.len()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn first_host(&self) -> HostId {
        HostId(1)
    }

    pub fn last_host(&self) -> HostId {
        HostId(self.hosts.len() as u32)
    }

    pub fn switch_link_count(&self) -> usize {
        self.links.iter().filter(|l| l.is_switch_link()).count()
    }

    pub fn host_by_ip(&self, ip: Ipv4Addr) -> Option<&HostNode> {
        self.hosts.iter().find(|h| h.ip == ip)
    }

    /// Replaces the traffic-control parameters of every link.
    pub fn with_link_params(mut self, params: LinkParams) -> Self {
        for l in &mut self.links {
            l.params = params;
        }
        self
    }

    /// Switch-to-switch edges as built, each reported once with `a < b`.
    pub fn switch_edges(&self) -> BTreeSet<SwitchEdge> {
        self.links
            .iter()
            .filter_map(|l| match (l.a.node, l.b.node) {
                (NodeId::Switch(x), NodeId::Switch(y)) => Some(if x < y {
                    SwitchEdge {
                        a: x,
                        a_port: l.a.port,
                        b: y,
                        b_port: l.b.port,
                    }
                } else {
                    SwitchEdge {
                        a: y,
                        a_port: l.b.port,
                        b: x,
                        b_port: l.a.port,
                    }
                }),
                _ => None,
            })
            .collect()
    }

    /// Neighbors of a node with the local port used to reach each.
    pub fn neighbors(&self, node: NodeId) -> Vec<(PortNo, NodeId)> {
        match node {
            NodeId::Host(h) => {
                let host = self.host(h);
                vec![(PortNo(0), host.attached_to.node)]
            }
            NodeId::Switch(s) => self
                .switch(s)
                .ports
                .iter()
                .map(|p| (p.no, p.peer.node))
                .collect(),
        }
    }

    /// Breadth-first reachability over every node.
    pub fn is_connected(&self) -> bool {
        let total = self.hosts.len() + self.switches.len();
        if total == 0 {
            return true;
        }
        let start = match self.switches.first() {
            Some(s) => NodeId::Switch(s.id),
            None => NodeId::Host(self.hosts[0].id),
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for (_, peer) in self.neighbors(n) {
                if seen.insert(peer) {
                    queue.push_back(peer);
                }
            }
        }
        seen.len() == total
    }
}
