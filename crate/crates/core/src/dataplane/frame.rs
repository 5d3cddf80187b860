use std::net::Ipv4Addr;

use super::MacAddr;
use crate::sim::SimTime;
use crate::topology::{PortNo, SwitchId};

/// Size of ARP, ICMP, ack and discovery frames.
pub const CONTROL_FRAME_BYTES: u32 = 64;
/// Default data frame size.
pub const DEFAULT_MTU: u32 = 1500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameKind {
    ArpRequest { sender_ip: Ipv4Addr, target_ip: Ipv4Addr },
    ArpReply { sender_ip: Ipv4Addr },
    IcmpEchoRequest { seq: u32, send_time: SimTime },
    IcmpEchoReply { seq: u32, send_time: SimTime },
    Data { stream_id: u32, packet_seq: u64 },
    /// Per-frame acknowledgment returned by a bandwidth-test server.
    Ack { stream_id: u32, packet_seq: u64 },
    /// Link discovery probe emitted on controller request. Crosses blocked ports.
    Probe { origin: SwitchId, origin_port: PortNo },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub src_mac: MacAddr,
    pub dst_mac: MacAddr,
    pub kind: FrameKind,
    pub size_bytes: u32,
}

impl Frame {
    pub fn arp_request(src: MacAddr, sender_ip: Ipv4Addr, target_ip: Ipv4Addr) -> Self {
        Frame {
            src_mac: src,
            dst_mac: MacAddr::BROADCAST,
            kind: FrameKind::ArpRequest { sender_ip, target_ip },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn arp_reply(src: MacAddr, dst: MacAddr, sender_ip: Ipv4Addr) -> Self {
        Frame {
            src_mac: src,
            dst_mac: dst,
            kind: FrameKind::ArpReply { sender_ip },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn echo_request(src: MacAddr, dst: MacAddr, seq: u32, send_time: SimTime) -> Self {
        Frame {
            src_mac: src,
            dst_mac: dst,
            kind: FrameKind::IcmpEchoRequest { seq, send_time },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn echo_reply(src: MacAddr, dst: MacAddr, seq: u32, send_time: SimTime) -> Self {
        Frame {
            src_mac: src,
            dst_mac: dst,
            kind: FrameKind::IcmpEchoReply { seq, send_time },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn data(src: MacAddr, dst: MacAddr, stream_id: u32, packet_seq: u64, mtu: u32) -> Self {
        Frame {
            src_mac: src,
            dst_mac: dst,
            kind: FrameKind::Data {
                stream_id,
                packet_seq,
            },
            size_bytes: mtu,
        }
    }

    pub fn ack(src: MacAddr, dst: MacAddr, stream_id: u32, packet_seq: u64) -> Self {
        Frame {
            src_mac: src,
            dst_mac: dst,
            kind: FrameKind::Ack {
                stream_id,
                packet_seq,
            },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn probe(origin: SwitchId, origin_port: PortNo) -> Self {
        Frame {
            src_mac: MacAddr::new(0),
            dst_mac: MacAddr::BROADCAST,
            kind: FrameKind::Probe {
                origin,
                origin_port,
            },
            size_bytes: CONTROL_FRAME_BYTES,
        }
    }

    pub fn is_broadcast(&self) -> bool {
        self.dst_mac.is_broadcast()
    }

    pub fn is_probe(&self) -> bool {
        matches!(self.kind, FrameKind::Probe { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataplane::host_ip;

    #[test]
    fn sizes_fixed_per_kind() {
        let a = MacAddr::for_host(1);
        let b = MacAddr::for_host(2);
        assert_eq!(Frame::arp_request(a, host_ip(1), host_ip(2)).size_bytes, 64);
        assert_eq!(Frame::arp_reply(b, a, host_ip(2)).size_bytes, 64);
        assert_eq!(Frame::echo_request(a, b, 0, SimTime::ZERO).size_bytes, 64);
        assert_eq!(Frame::data(a, b, 1, 0, DEFAULT_MTU).size_bytes, 1500);
        assert!(Frame::arp_request(a, host_ip(1), host_ip(2)).is_broadcast());
    }
}
