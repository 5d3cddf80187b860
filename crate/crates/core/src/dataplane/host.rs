use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use super::{Frame, FrameKind, MacAddr};
use crate::sim::SimTime;
use crate::topology::{HostId, HostNode};

/// Something the host hands up to the traffic application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upcall {
    ArpLearned { ip: Ipv4Addr, mac: MacAddr },
    EchoReply { from: MacAddr, seq: u32, send_time: SimTime },
    Data { from: MacAddr, stream_id: u32, packet_seq: u64, bytes: u32 },
    Ack { stream_id: u32, packet_seq: u64 },
}

/// Host protocol reaction to one received frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Reaction {
    pub reply: Option<Frame>,
    pub upcall: Option<Upcall>,
}

#[derive(Debug, Clone)]
pub struct HostState {
    pub id: HostId,
    pub mac: MacAddr,
    pub ip: Ipv4Addr,
    arp_cache: BTreeMap<Ipv4Addr, MacAddr>,
}

impl HostState {
    pub fn new(node: &HostNode) -> Self {
        HostState {
            id: node.id,
            mac: node.mac,
            ip: node.ip,
            arp_cache: BTreeMap::new(),
        }
    }

    pub fn resolve(&self, ip: Ipv4Addr) -> Option<MacAddr> {
        self.arp_cache.get(&ip).copied()
    }

    pub fn arp_cache_len(&self) -> usize {
        self.arp_cache.len()
    }

    fn learn(&mut self, ip: Ipv4Addr, mac: MacAddr) -> Upcall {
        self.arp_cache.insert(ip, mac);
        Upcall::ArpLearned { ip, mac }
    }

    /// ARP, ICMP echo, and stream handling for a frame that reached this host.
    /// Frames addressed to some other unicast MAC are filtered.
    pub fn handle(&mut self, frame: &Frame) -> Reaction {
        if frame.dst_mac != self.mac && !frame.is_broadcast() {
            return Reaction::default();
        }
        match frame.kind {
            FrameKind::ArpRequest {
                sender_ip,
                target_ip,
            } => {
                if target_ip != self.ip {
                    return Reaction::default();
                }
                let upcall = self.learn(sender_ip, frame.src_mac);
                Reaction {
                    reply: Some(Frame::arp_reply(self.mac, frame.src_mac, self.ip)),
                    upcall: Some(upcall),
                }
            }
            FrameKind::ArpReply { sender_ip } => Reaction {
                reply: None,
                upcall: Some(self.learn(sender_ip, frame.src_mac)),
            },
            FrameKind::IcmpEchoRequest { seq, send_time } => Reaction {
                reply: Some(Frame::echo_reply(self.mac, frame.src_mac, seq, send_time)),
                upcall: None,
            },
            FrameKind::IcmpEchoReply { seq, send_time } => Reaction {
                reply: None,
                upcall: Some(Upcall::EchoReply {
                    from: frame.src_mac,
                    seq,
                    send_time,
                }),
            },
            FrameKind::Data {
                stream_id,
                packet_seq,
            } => Reaction {
                reply: None,
                upcall: Some(Upcall::Data {
                    from: frame.src_mac,
                    stream_id,
                    packet_seq,
                    bytes: frame.size_bytes,
                }),
            },
            FrameKind::Ack {
                stream_id,
                packet_seq,
            } => Reaction {
                reply: None,
                upcall: Some(Upcall::Ack {
                    stream_id,
                    packet_seq,
                }),
            },
            FrameKind::Probe { .. } => Reaction::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataplane::host_ip;
    use crate::topology::{build, TopologySpec};

    fn hosts() -> Vec<HostState> {
        let net = build(&TopologySpec::Star { n_hosts: 3 }).unwrap();
        net.hosts.iter().map(HostState::new).collect()
    }

    #[test]
    fn target_answers_arp() {
        let mut hs = hosts();
        let req = Frame::arp_request(hs[0].mac, host_ip(1), host_ip(2));
        let r = hs[1].handle(&req);
        let reply = r.reply.unwrap();
        assert_eq!(reply.dst_mac, hs[0].mac);
        assert_eq!(reply.kind, FrameKind::ArpReply { sender_ip: host_ip(2) });
        // the target learns the asker on the way
        assert_eq!(hs[1].resolve(host_ip(1)), Some(hs[0].mac));
    }

    #[test]
    fn bystander_ignores_arp() {
        let mut hs = hosts();
        let req = Frame::arp_request(hs[0].mac, host_ip(1), host_ip(2));
        assert_eq!(hs[2].handle(&req), Reaction::default());
        assert_eq!(hs[2].arp_cache_len(), 0);
    }

    #[test]
    fn echo_preserves_seq_and_timestamp() {
        let mut hs = hosts();
        let t0 = SimTime::from_ms(12.5);
        let req = Frame::echo_request(hs[0].mac, hs[1].mac, 1, t0);
        let reply = hs[1].handle(&req).reply.unwrap();
        assert_eq!(reply.kind, FrameKind::IcmpEchoReply { seq: 1, send_time: t0 });
        assert_eq!(reply.dst_mac, hs[0].mac);
    }

    #[test]
    fn foreign_unicast_filtered() {
        let mut hs = hosts();
        let req = Frame::echo_request(hs[0].mac, hs[1].mac, 1, SimTime::ZERO);
        assert_eq!(hs[2].handle(&req), Reaction::default());
    }

    #[test]
    fn reply_fills_cache() {
        let mut hs = hosts();
        let rep = Frame::arp_reply(hs[1].mac, hs[0].mac, host_ip(2));
        let r = hs[0].handle(&rep);
        assert_eq!(
            r.upcall,
            Some(Upcall::ArpLearned {
                ip: host_ip(2),
                mac: hs[1].mac
            })
        );
        assert_eq!(hs[0].resolve(host_ip(2)), Some(hs[1].mac));
    }
}
