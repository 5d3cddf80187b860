use super::{AppCtx, ArpOutcome, ArpResolver, TrafficConfig, TAG_ECHO_SEND, TAG_ECHO_TIMEOUT, TAG_MASK};
use crate::dataplane::{Frame, MacAddr, Upcall};
use crate::sim::SimTime;
use crate::topology::HostId;

/// Result of one ping invocation: the first echo measured separately, then
/// `count` further echoes.
#[derive(Debug, Clone, PartialEq)]
pub struct PingReport {
    pub src: HostId,
    pub dst: HostId,
    pub started_at: SimTime,
    pub arp_resolved_at: Option<SimTime>,
    pub first_rtt_ms: Option<f64>,
    /// One slot per subsequent echo; `None` is a loss.
    pub replies: Vec<Option<f64>>,
    /// Replies whose seq or timestamp matched no request we sent.
    pub integrity_errors: u64,
}

impl PingReport {
    pub fn rtts(&self) -> Vec<f64> {
        self.replies.iter().flatten().copied().collect()
    }

    pub fn losses(&self) -> usize {
        self.replies.iter().filter(|r| r.is_none()).count()
    }

    pub fn no_route(&self) -> bool {
        self.arp_resolved_at.is_none()
    }

    pub fn mean_rtt_ms(&self) -> Option<f64> {
        let r = self.rtts();
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    }

    pub fn max_rtt_ms(&self) -> Option<f64> {
        self.rtts().into_iter().reduce(f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Arp,
    First,
    Rest,
    Done,
}

/// ARP, then echo 0 alone, then echoes 1..=count at a fixed interval.
#[derive(Debug, Clone)]
pub struct PingApp {
    cfg: TrafficConfig,
    arp: ArpResolver,
    phase: Phase,
    dst_mac: MacAddr,
    sent_at: Vec<Option<SimTime>>,
    settled: Vec<bool>,
    report: PingReport,
}

impl PingApp {
    pub fn new(src: HostId, dst: HostId, dst_ip: std::net::Ipv4Addr, cfg: TrafficConfig, now: SimTime) -> Self {
        let n = cfg.ping_count as usize + 1;
        PingApp {
            cfg,
            arp: ArpResolver::new(src, dst_ip, cfg.arp_timeout_ms, Some(cfg.arp_attempts)),
            phase: Phase::Arp,
            dst_mac: MacAddr::BROADCAST,
            sent_at: vec![None; n],
            settled: vec![false; n],
            report: PingReport {
                src,
                dst,
                started_at: now,
                arp_resolved_at: None,
                first_rtt_ms: None,
                replies: vec![None; cfg.ping_count as usize],
                integrity_errors: 0,
            },
        }
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    pub fn report(&self) -> &PingReport {
        &self.report
    }

    pub fn into_report(self) -> PingReport {
        self.report
    }

    /// Upper bound on how long a ping can take, for run horizons.
    pub fn max_duration_ms(cfg: &TrafficConfig) -> f64 {
        cfg.arp_timeout_ms * cfg.arp_attempts as f64
            + cfg.echo_timeout_ms * 2.0
            + cfg.ping_interval_ms * cfg.ping_count as f64
    }

    pub fn start(&mut self, ctx: &mut AppCtx) {
        if let ArpOutcome::Resolved { mac, .. } = self.arp.start(ctx) {
            self.resolved(ctx, mac);
        }
    }

    fn resolved(&mut self, ctx: &mut AppCtx, mac: MacAddr) {
        self.dst_mac = mac;
        self.report.arp_resolved_at = Some(ctx.now);
        self.phase = Phase::First;
        self.send_echo(ctx, 0);
    }

    fn send_echo(&mut self, ctx: &mut AppCtx, seq: u32) {
        let src = self.report.src;
        let f = Frame::echo_request(ctx.host(src).mac, self.dst_mac, seq, ctx.now);
        self.sent_at[seq as usize] = Some(ctx.now);
        ctx.send(src, f);
        ctx.timer(self.cfg.echo_timeout_ms, TAG_ECHO_TIMEOUT | seq as u64);
    }

    fn settle(&mut self, ctx: &mut AppCtx, seq: u32) {
        self.settled[seq as usize] = true;
        if seq == 0 && self.phase == Phase::First {
            self.phase = Phase::Rest;
            if self.cfg.ping_count == 0 {
                self.phase = Phase::Done;
                return;
            }
            self.send_echo(ctx, 1);
            for k in 2..=self.cfg.ping_count {
                ctx.timer(self.cfg.ping_interval_ms * (k - 1) as f64, TAG_ECHO_SEND | k as u64);
            }
        } else if self.settled.iter().all(|s| *s) {
            self.phase = Phase::Done;
        }
    }

    pub fn on_upcall(&mut self, ctx: &mut AppCtx, host: HostId, up: &Upcall) {
        if self.phase == Phase::Arp {
            if self.arp.on_upcall(ctx, host, up) {
                if let ArpOutcome::Resolved { mac, .. } = self.arp.outcome() {
                    self.resolved(ctx, mac);
                }
            }
            return;
        }
        let Upcall::EchoReply { seq, send_time, .. } = *up else {
            return;
        };
        if host != self.report.src {
            return;
        }
        let idx = seq as usize;
        if idx >= self.sent_at.len() || self.sent_at[idx] != Some(send_time) {
            self.report.integrity_errors += 1;
            return;
        }
        if self.settled[idx] {
            // late reply after its timeout
            return;
        }
        let rtt = ctx.now - send_time;
        if seq == 0 {
            self.report.first_rtt_ms = Some(rtt);
        } else {
            self.report.replies[idx - 1] = Some(rtt);
        }
        self.settle(ctx, seq);
    }

    pub fn on_timer(&mut self, ctx: &mut AppCtx, token: u64) {
        if self.phase == Phase::Arp {
            if self.arp.on_timer(ctx, token) {
                self.phase = Phase::Done;
            }
            return;
        }
        let seq = (token & !TAG_MASK) as u32;
        match token & TAG_MASK {
            TAG_ECHO_TIMEOUT if !self.settled[seq as usize] => self.settle(ctx, seq),
            TAG_ECHO_SEND => self.send_echo(ctx, seq),
            _ => {}
        }
    }
}
