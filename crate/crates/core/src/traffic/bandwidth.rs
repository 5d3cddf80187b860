use std::net::Ipv4Addr;

use super::{throughput_of, AppCtx, ArpOutcome, ArpResolver, Status, TrafficConfig, TAG_MASK, TAG_RTO};
use crate::dataplane::{Frame, MacAddr, Upcall};
use crate::sim::SimTime;
use crate::topology::HostId;

const STREAM_ID: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthReport {
    /// Seconds since traffic start.
    pub interval: (f64, f64),
    pub transfer_bytes: u64,
    pub bandwidth_mbps: f64,
    pub status: Status,
}

/// Fixed-window, ack-clocked stream from `client` to `server`. The server acks
/// every data frame; the window slides when its oldest frame is acked. A single
/// retransmission timer resends the oldest unacked frame with exponential backoff.
#[derive(Debug, Clone)]
pub struct BandwidthApp {
    cfg: TrafficConfig,
    client: HostId,
    server: HostId,
    started_at: SimTime,
    arp: ArpResolver,
    server_mac: Option<MacAddr>,
    next_seq: u64,
    base: u64,
    acked: Vec<bool>,
    received: Vec<bool>,
    rto_ms: f64,
    rto_gen: u64,
    retransmits: u64,
    /// (ms since start, cumulative unique payload bytes at the server)
    arrivals: Vec<(f64, u64)>,
    total: u64,
}

impl BandwidthApp {
    pub fn new(client: HostId, server: HostId, server_ip: Ipv4Addr, cfg: TrafficConfig, now: SimTime) -> Self {
        BandwidthApp {
            cfg,
            client,
            server,
            started_at: now,
            arp: ArpResolver::new(client, server_ip, cfg.arp_timeout_ms, None),
            server_mac: None,
            next_seq: 0,
            base: 0,
            acked: Vec::new(),
            received: Vec::new(),
            rto_ms: cfg.rto_initial_ms,
            rto_gen: 0,
            retransmits: 0,
            arrivals: Vec::new(),
            total: 0,
        }
    }

    pub fn started_at(&self) -> SimTime {
        self.started_at
    }

    pub fn retransmits(&self) -> u64 {
        self.retransmits
    }

    pub fn arp_attempts(&self) -> u32 {
        self.arp.attempts()
    }

    /// Unique payload bytes the server had received by `secs` after start.
    pub fn transfer_by(&self, secs: f64) -> u64 {
        let ms = secs * 1000.0;
        let n = self.arrivals.partition_point(|(t, _)| *t <= ms);
        if n == 0 {
            0
        } else {
            self.arrivals[n - 1].1
        }
    }

    /// Report for the window `[0, duration_s]`. `storm` overrides the status.
    pub fn report(&self, duration_s: f64, storm: bool) -> BandwidthReport {
        let transfer_bytes = self.transfer_by(duration_s);
        let bandwidth_mbps = throughput_of(transfer_bytes, duration_s).unwrap_or(0.0);
        let status = if storm {
            Status::Storm
        } else if transfer_bytes == 0 {
            Status::NoRoute
        } else {
            Status::Ok
        };
        BandwidthReport {
            interval: (0.0, duration_s),
            transfer_bytes,
            bandwidth_mbps,
            status,
        }
    }

    pub fn start(&mut self, ctx: &mut AppCtx) {
        if let ArpOutcome::Resolved { mac, .. } = self.arp.start(ctx) {
            self.begin_stream(ctx, mac);
        }
    }

    fn begin_stream(&mut self, ctx: &mut AppCtx, mac: MacAddr) {
        self.server_mac = Some(mac);
        self.fill_window(ctx);
        self.arm_rto(ctx);
    }

    fn send_data(&mut self, ctx: &mut AppCtx, seq: u64) {
        let (Some(dst), src_mac) = (self.server_mac, ctx.host(self.client).mac) else {
            return;
        };
        ctx.send(self.client, Frame::data(src_mac, dst, STREAM_ID, seq, self.cfg.mtu));
    }

    fn fill_window(&mut self, ctx: &mut AppCtx) {
        while self.next_seq < self.base + self.cfg.window as u64 {
            let seq = self.next_seq;
            self.next_seq += 1;
            self.acked.push(false);
            self.send_data(ctx, seq);
        }
    }

    fn arm_rto(&mut self, ctx: &mut AppCtx) {
        self.rto_gen += 1;
        ctx.timer(self.rto_ms, TAG_RTO | self.rto_gen);
    }

    pub fn on_upcall(&mut self, ctx: &mut AppCtx, host: HostId, up: &Upcall) {
        if self.server_mac.is_none() {
            if self.arp.on_upcall(ctx, host, up) {
                if let ArpOutcome::Resolved { mac, .. } = self.arp.outcome() {
                    self.begin_stream(ctx, mac);
                }
            }
            return;
        }
        match *up {
            Upcall::Data {
                from,
                stream_id: STREAM_ID,
                packet_seq,
                bytes,
            } if host == self.server => {
                let i = packet_seq as usize;
                if i >= self.received.len() {
                    self.received.resize(i + 1, false);
                }
                if !self.received[i] {
                    self.received[i] = true;
                    self.total += bytes as u64;
                    self.arrivals.push((ctx.now - self.started_at, self.total));
                }
                let me = ctx.host(self.server).mac;
                ctx.send(self.server, Frame::ack(me, from, STREAM_ID, packet_seq));
            }
            Upcall::Ack {
                stream_id: STREAM_ID,
                packet_seq,
            } if host == self.client => {
                let Some(slot) = self.acked.get_mut(packet_seq as usize) else {
                    return;
                };
                *slot = true;
                let before = self.base;
                while self.base < self.next_seq && self.acked[self.base as usize] {
                    self.base += 1;
                }
                if self.base > before {
                    self.rto_ms = self.cfg.rto_initial_ms;
                    self.fill_window(ctx);
                    self.arm_rto(ctx);
                }
            }
            _ => {}
        }
    }

    pub fn on_timer(&mut self, ctx: &mut AppCtx, token: u64) {
        if self.server_mac.is_none() {
            self.arp.on_timer(ctx, token);
            return;
        }
        if token & TAG_MASK != TAG_RTO || token & !TAG_MASK != self.rto_gen {
            return;
        }
        if self.base < self.next_seq {
            self.retransmits += 1;
            let base = self.base;
            self.send_data(ctx, base);
            self.rto_ms = (self.rto_ms * 2.0).min(self.cfg.rto_max_ms);
            self.arm_rto(ctx);
        }
    }
}
