//! Simulated hosts, switches and links.
//!
//! Frames move store-and-forward: a frame occupies its link direction for
//! `size*8/(bandwidth*10^3)` ms behind earlier frames, propagates for the
//! link delay, and spends a fixed processing delay inside each switch.

mod addr;
mod frame;
mod host;
mod link;
mod switch;

pub use addr::{host_ip, MacAddr};
pub use frame::{Frame, FrameKind, CONTROL_FRAME_BYTES, DEFAULT_MTU};
pub use host::{HostState, Reaction, Upcall};
pub use link::{Direction, LinkState, Transmission};
pub use switch::{
    BufferRef, Buffered, FlowEntry, PortInfo, PortState, SwitchState, Verdict, DEFAULT_BUFFER_CAP,
};

use crate::error::StormDetected;
use crate::sim::{SeededRng, SimTime};
use crate::topology::{Endpoint, HostId, LinkId, NetworkModel, NodeId, SwitchId};

pub const DEFAULT_PROC_DELAY_MS: f64 = 0.05;

/// Frame accounting. `transmitted` counts every frame put on a link; each such
/// frame ends up delivered, dropped for one reason, or is still in flight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub transmitted: u64,
    pub delivered: u64,
    pub dropped_loss: u64,
    pub dropped_buffer: u64,
    pub dropped_blocked: u64,
    pub in_flight: u64,
    /// Subset of `in_flight` that left a switch through a flood.
    pub flooded_in_flight: u64,
    pub peak_flooded_in_flight: u64,
}

impl Counters {
    pub fn conserved(&self) -> bool {
        self.delivered + self.dropped_loss + self.dropped_buffer + self.dropped_blocked + self.in_flight
            == self.transmitted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataplaneConfig {
    pub proc_delay_ms: f64,
    pub buffer_cap: usize,
    /// Storm threshold on flooded frames in flight; `None` means
    /// `10 * (hosts + switches)`.
    pub storm_cap: Option<u64>,
}

impl Default for DataplaneConfig {
    fn default() -> Self {
        DataplaneConfig {
            proc_delay_ms: DEFAULT_PROC_DELAY_MS,
            buffer_cap: DEFAULT_BUFFER_CAP,
            storm_cap: None,
        }
    }
}

/// A frame on its way to an endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InFlight {
    pub frame: Frame,
    pub to: Endpoint,
    pub flooded: bool,
}

/// Mutable runtime state for every node and link of one network.
#[derive(Debug, Clone)]
pub struct Dataplane {
    pub hosts: Vec<HostState>,
    pub switches: Vec<SwitchState>,
    pub links: Vec<LinkState>,
    pub counters: Counters,
    proc_delay_ms: f64,
    storm_cap: u64,
    port_links: Vec<Vec<LinkId>>,
    host_links: Vec<LinkId>,
}

impl Dataplane {
    pub fn new(model: &NetworkModel, cfg: &DataplaneConfig) -> Self {
        let storm_cap = cfg
            .storm_cap
            .unwrap_or(10 * (model.host_count() + model.switch_count()) as u64);
        Dataplane {
            hosts: model.hosts.iter().map(HostState::new).collect(),
            switches: model
                .switches
                .iter()
                .map(|s| SwitchState::new(s, cfg.buffer_cap))
                .collect(),
            links: model.links.iter().cloned().map(LinkState::new).collect(),
            counters: Counters::default(),
            proc_delay_ms: cfg.proc_delay_ms,
            storm_cap,
            port_links: model
                .switches
                .iter()
                .map(|s| s.ports.iter().map(|p| p.link).collect())
                .collect(),
            host_links: model.hosts.iter().map(|h| h.link).collect(),
        }
    }

    pub fn storm_cap(&self) -> u64 {
        self.storm_cap
    }

    pub fn proc_delay_ms(&self) -> f64 {
        self.proc_delay_ms
    }

    pub fn host(&self, id: HostId) -> &HostState {
        &self.hosts[id.0 as usize - 1]
    }

    pub fn host_mut(&mut self, id: HostId) -> &mut HostState {
        &mut self.hosts[id.0 as usize - 1]
    }

    pub fn switch(&self, id: SwitchId) -> &SwitchState {
        &self.switches[id.0 as usize - 1]
    }

    pub fn switch_mut(&mut self, id: SwitchId) -> &mut SwitchState {
        &mut self.switches[id.0 as usize - 1]
    }

    fn link_at(&self, from: Endpoint) -> LinkId {
        match from.node {
            NodeId::Host(h) => self.host_links[h.0 as usize - 1],
            NodeId::Switch(s) => self.port_links[s.0 as usize - 1][from.port.0 as usize - 1],
        }
    }

    /// Puts `frame` on the link behind `from`. Returns the in-flight frame and
    /// the time its far end finishes receiving it (including switch processing),
    /// or `None` if the link lost it.
    pub fn transmit(
        &mut self,
        now: SimTime,
        from: Endpoint,
        frame: Frame,
        flooded: bool,
        rng: &mut SeededRng,
    ) -> Option<(InFlight, SimTime)> {
        debug_assert!(frame.size_bytes > 0);
        let id = self.link_at(from);
        let link = &mut self.links[id.0];
        let dir = link.direction_from(from.node);
        self.counters.transmitted += 1;
        // discovery probes stand in for a reliable topology service
        let lossy = !frame.is_probe();
        match link.transmit(now, dir, frame.size_bytes, lossy, rng) {
            Transmission::Lost => {
                self.counters.dropped_loss += 1;
                None
            }
            Transmission::Delivered { to, arrives_at } => {
                self.counters.in_flight += 1;
                if flooded {
                    let c = &mut self.counters;
                    c.flooded_in_flight += 1;
                    c.peak_flooded_in_flight = c.peak_flooded_in_flight.max(c.flooded_in_flight);
                }
                let ready = match to.node {
                    NodeId::Switch(_) => arrives_at + self.proc_delay_ms,
                    NodeId::Host(_) => arrives_at,
                };
                Some((InFlight { frame, to, flooded }, ready))
            }
        }
    }

    /// Removes a frame from flight accounting when it reaches its endpoint.
    pub fn land(&mut self, f: &InFlight) {
        self.counters.in_flight -= 1;
        if f.flooded {
            self.counters.flooded_in_flight -= 1;
        }
    }

    /// Flags a broadcast storm once flooded frames in flight exceed the cap.
    pub fn detect_storm(&self, now: SimTime) -> Result<(), StormDetected> {
        if self.counters.flooded_in_flight > self.storm_cap {
            Err(StormDetected {
                at: now,
                in_flight: self.counters.flooded_in_flight,
                cap: self.storm_cap,
            })
        } else {
            Ok(())
        }
    }
}
