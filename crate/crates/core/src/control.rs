//! Message fabric between the switches and the single controller.
//!
//! Every message is delivered exactly once, `latency_ms` after it was sent.
//! Constant latency plus the engine's equal-time FIFO rule keeps each
//! switch's messages in send order in both directions; `Envelope` sequence
//! numbers let the receiver verify that.

use crate::dataplane::{BufferRef, FlowEntry, Frame, PortState};
use crate::topology::{PortNo, SwitchId};

pub const DEFAULT_CONTROL_LATENCY_MS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketIn {
    pub switch_id: SwitchId,
    pub in_port: PortNo,
    pub frame: Frame,
    pub buffer_ref: BufferRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputAction {
    Output(PortNo),
    Flood,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutPayload {
    /// Release a frame parked in the switch's pending buffer.
    Buffered(BufferRef),
    /// Emit a controller-built frame; used for discovery probes.
    Frame(Frame),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketOut {
    pub switch_id: SwitchId,
    pub payload: OutPayload,
    pub action: OutputAction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlMessage {
    PacketIn(PacketIn),
    PacketOut(PacketOut),
    /// `entry.installed_at` is overwritten with the time the switch applies it.
    FlowMod { switch_id: SwitchId, entry: FlowEntry },
    PortMod { switch_id: SwitchId, port: PortNo, state: PortState },
    SwitchFeatures { switch_id: SwitchId, ports: Vec<PortNo> },
    /// A probe sent by `origin` out of `origin_port` arrived at
    /// `switch_id` on `in_port`.
    DiscoveryProbe {
        switch_id: SwitchId,
        in_port: PortNo,
        origin: SwitchId,
        origin_port: PortNo,
    },
}

impl ControlMessage {
    pub fn switch_id(&self) -> SwitchId {
        match self {
            ControlMessage::PacketIn(p) => p.switch_id,
            ControlMessage::PacketOut(p) => p.switch_id,
            ControlMessage::FlowMod { switch_id, .. }
            | ControlMessage::PortMod { switch_id, .. }
            | ControlMessage::SwitchFeatures { switch_id, .. }
            | ControlMessage::DiscoveryProbe { switch_id, .. } => *switch_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Toward {
    Controller,
    Switch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub toward: Toward,
    pub seq: u64,
    pub msg: ControlMessage,
}

/// Message counts seen by the channel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChannelStats {
    pub packet_in: u64,
    pub packet_out: u64,
    pub flow_mod: u64,
    pub port_mod: u64,
    pub features: u64,
    pub probes: u64,
    pub stale_packet_out: u64,
    pub delivered: u64,
    pub out_of_order: u64,
}

#[derive(Debug, Clone)]
pub struct ControlChannel {
    latency_ms: f64,
    stats: ChannelStats,
    packet_in_by_switch: Vec<u64>,
    // [switch][direction] next sequence number to send / expect
    sent: Vec<[u64; 2]>,
    expected: Vec<[u64; 2]>,
}

fn dir_index(t: Toward) -> usize {
    match t {
        Toward::Controller => 0,
        Toward::Switch => 1,
    }
}

impl ControlChannel {
    pub fn new(switches: usize, latency_ms: f64) -> Self {
        ControlChannel {
            latency_ms,
            stats: ChannelStats::default(),
            packet_in_by_switch: vec![0; switches],
            sent: vec![[0; 2]; switches],
            expected: vec![[0; 2]; switches],
        }
    }

    pub fn latency_ms(&self) -> f64 {
        self.latency_ms
    }

    pub fn stats(&self) -> ChannelStats {
        self.stats
    }

    pub fn packet_ins(&self, s: SwitchId) -> u64 {
        self.packet_in_by_switch[s.0 as usize - 1]
    }

    pub fn packet_ins_by_switch(&self) -> &[u64] {
        &self.packet_in_by_switch
    }

    pub fn note_stale_packet_out(&mut self) {
        self.stats.stale_packet_out += 1;
    }

    /// Stamps `msg` for delivery; the caller schedules it `latency_ms` from now.
    pub fn send(&mut self, toward: Toward, msg: ControlMessage) -> Envelope {
        let sw = msg.switch_id().0 as usize - 1;
        match &msg {
            ControlMessage::PacketIn(_) => {
                self.stats.packet_in += 1;
                self.packet_in_by_switch[sw] += 1;
            }
            ControlMessage::PacketOut(_) => self.stats.packet_out += 1,
            ControlMessage::FlowMod { .. } => self.stats.flow_mod += 1,
            ControlMessage::PortMod { .. } => self.stats.port_mod += 1,
            ControlMessage::SwitchFeatures { .. } => self.stats.features += 1,
            ControlMessage::DiscoveryProbe { .. } => self.stats.probes += 1,
        }
        let d = dir_index(toward);
        let seq = self.sent[sw][d];
        self.sent[sw][d] += 1;
        Envelope { toward, seq, msg }
    }

    /// Records delivery and checks per-switch ordering.
    pub fn receive(&mut self, env: &Envelope) {
        let sw = env.msg.switch_id().0 as usize - 1;
        let d = dir_index(env.toward);
        if env.seq != self.expected[sw][d] {
            self.stats.out_of_order += 1;
        }
        self.expected[sw][d] = env.seq + 1;
        self.stats.delivered += 1;
    }

    /// Messages sent but not yet delivered.
    pub fn in_transit(&self) -> u64 {
        self.sent
            .iter()
            .zip(&self.expected)
            .map(|(s, e)| (s[0] - e[0]) + (s[1] - e[1]))
            .sum()
    }
}
