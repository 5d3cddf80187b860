use std::collections::{BTreeMap, HashMap};

use super::{Frame, MacAddr};
use crate::sim::SimTime;
use crate::topology::{NodeId, PortNo, SwitchId, SwitchNode};

pub const DEFAULT_BUFFER_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortState {
    Forwarding,
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowEntry {
    pub match_dst_mac: MacAddr,
    pub out_port: PortNo,
    pub installed_at: SimTime,
}

/// Identifies a frame parked in a switch's pending buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BufferRef(pub u64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Buffered {
    pub frame: Frame,
    pub in_port: PortNo,
    pub flooded: bool,
}

/// What the switch does with a frame after its processing delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Flow-table hit.
    Forward(PortNo),
    /// Table miss: the frame was buffered and a PacketIn must be sent.
    PacketIn(BufferRef),
    /// Discovery probe; report to the controller, never forward.
    Probe,
    DropBlocked,
    DropBufferFull,
}

#[derive(Debug, Clone)]
pub struct PortInfo {
    pub no: PortNo,
    pub to_switch: bool,
    pub state: PortState,
}

#[derive(Debug, Clone)]
pub struct SwitchState {
    pub id: SwitchId,
    pub ports: Vec<PortInfo>,
    flow_table: HashMap<MacAddr, FlowEntry>,
    pending: BTreeMap<BufferRef, Buffered>,
    buffer_cap: usize,
    next_ref: u64,
}

impl SwitchState {
    pub fn new(node: &SwitchNode, buffer_cap: usize) -> Self {
        SwitchState {
            id: node.id,
            ports: node
                .ports
                .iter()
                .map(|p| PortInfo {
                    no: p.no,
                    to_switch: matches!(p.peer.node, NodeId::Switch(_)),
                    state: PortState::Forwarding,
                })
                .collect(),
            flow_table: HashMap::new(),
            pending: BTreeMap::new(),
            buffer_cap,
            next_ref: 0,
        }
    }

    fn port_info(&self, no: PortNo) -> Option<&PortInfo> {
        self.ports.get((no.0 as usize).checked_sub(1)?)
    }

    pub fn port_state(&self, no: PortNo) -> Option<PortState> {
        self.port_info(no).map(|p| p.state)
    }

    pub fn set_port_state(&mut self, no: PortNo, state: PortState) -> bool {
        match (no.0 as usize)
            .checked_sub(1)
            .and_then(|i| self.ports.get_mut(i))
        {
            Some(p) => {
                p.state = state;
                true
            }
            None => false,
        }
    }

    pub fn lookup(&self, dst: MacAddr) -> Option<&FlowEntry> {
        self.flow_table.get(&dst)
    }

    pub fn flow_count(&self) -> usize {
        self.flow_table.len()
    }

    /// Inserts or replaces the entry for `entry.match_dst_mac`.
    pub fn install(&mut self, entry: FlowEntry) -> bool {
        if self.port_info(entry.out_port).is_none() {
            return false;
        }
        self.flow_table.insert(entry.match_dst_mac, entry);
        true
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn buffer_cap(&self) -> usize {
        self.buffer_cap
    }

    pub fn take_buffered(&mut self, r: BufferRef) -> Option<Buffered> {
        self.pending.remove(&r)
    }

    /// Table lookup for a frame that arrived on `in_port`.
    pub fn classify(&mut self, in_port: PortNo, frame: &Frame, flooded: bool) -> Verdict {
        if frame.is_probe() {
            return Verdict::Probe;
        }
        if self.port_state(in_port) != Some(PortState::Forwarding) {
            return Verdict::DropBlocked;
        }
        if !frame.is_broadcast() {
            if let Some(e) = self.flow_table.get(&frame.dst_mac) {
                return Verdict::Forward(e.out_port);
            }
        }
        if self.pending.len() >= self.buffer_cap {
            return Verdict::DropBufferFull;
        }
        let r = BufferRef(self.next_ref);
        self.next_ref += 1;
        self.pending.insert(
            r,
            Buffered {
                frame: *frame,
                in_port,
                flooded,
            },
        );
        Verdict::PacketIn(r)
    }

    /// Ports a flooded frame is copied to: every Forwarding port except `exclude`.
    pub fn flood_ports(&self, exclude: PortNo) -> Vec<PortNo> {
        self.ports
            .iter()
            .filter(|p| p.no != exclude && p.state == PortState::Forwarding)
            .map(|p| p.no)
            .collect()
    }

    /// Whether an output action on `port` may actually transmit.
    pub fn can_output(&self, port: PortNo, in_port: PortNo) -> bool {
        port != in_port && self.port_state(port) == Some(PortState::Forwarding)
    }
}
