use std::collections::HashMap;

use super::{Action, ControllerApp};
use crate::control::{ControlMessage, OutPayload, OutputAction, PacketIn, PacketOut};
use crate::dataplane::{FlowEntry, MacAddr};
use crate::sim::SimTime;
use crate::topology::{PortNo, SwitchId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Learned {
    pub port: PortNo,
    pub learned_at: SimTime,
}

/// Per-switch MAC-to-port map kept by the controller. Last writer wins.
#[derive(Debug, Clone, Default)]
pub struct MacTable {
    tables: HashMap<SwitchId, HashMap<MacAddr, Learned>>,
}

impl MacTable {
    pub fn learn(&mut self, sw: SwitchId, mac: MacAddr, port: PortNo, now: SimTime) {
        self.tables.entry(sw).or_default().insert(
            mac,
            Learned {
                port,
                learned_at: now,
            },
        );
    }

    pub fn lookup(&self, sw: SwitchId, mac: MacAddr) -> Option<PortNo> {
        self.get(sw, mac).map(|l| l.port)
    }

    pub fn get(&self, sw: SwitchId, mac: MacAddr) -> Option<Learned> {
        self.tables.get(&sw)?.get(&mac).copied()
    }

    pub fn len(&self, sw: SwitchId) -> usize {
        self.tables.get(&sw).map_or(0, |t| t.len())
    }

    pub fn is_empty(&self) -> bool {
        self.tables.values().all(|t| t.is_empty())
    }
}

/// Reactive L2 learning switch: learn the source port from every PacketIn,
/// install a flow and forward when the destination is known, flood otherwise.
#[derive(Debug, Clone, Default)]
pub struct LearningSwitch {
    table: MacTable,
}

impl LearningSwitch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Control directives for one PacketIn.
    pub fn decide(&mut self, now: SimTime, pkt: &PacketIn) -> Vec<ControlMessage> {
        let sw = pkt.switch_id;
        let frame = &pkt.frame;
        self.table.learn(sw, frame.src_mac, pkt.in_port, now);

        let flood = || {
            vec![ControlMessage::PacketOut(PacketOut {
                switch_id: sw,
                payload: OutPayload::Buffered(pkt.buffer_ref),
                action: OutputAction::Flood,
            })]
        };
        if frame.dst_mac.is_broadcast() {
            return flood();
        }
        match self.table.lookup(sw, frame.dst_mac) {
            Some(port) => vec![
                ControlMessage::FlowMod {
                    switch_id: sw,
                    entry: FlowEntry {
                        match_dst_mac: frame.dst_mac,
                        out_port: port,
                        installed_at: now,
                    },
                },
                ControlMessage::PacketOut(PacketOut {
                    switch_id: sw,
                    payload: OutPayload::Buffered(pkt.buffer_ref),
                    action: OutputAction::Output(port),
                }),
            ],
            None => flood(),
        }
    }
}

impl ControllerApp for LearningSwitch {
    fn name(&self) -> &'static str {
        "l2"
    }

    fn on_packet_in(&mut self, now: SimTime, pkt: &PacketIn) -> Vec<Action> {
        self.decide(now, pkt).into_iter().map(Action::Send).collect()
    }

    fn mac_table(&self) -> &MacTable {
        &self.table
    }
}
