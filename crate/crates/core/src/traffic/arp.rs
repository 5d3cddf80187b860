use std::net::Ipv4Addr;

use super::{AppCtx, TAG_ARP, TAG_MASK};
use crate::dataplane::{Frame, MacAddr, Upcall};
use crate::sim::SimTime;
use crate::topology::HostId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArpOutcome {
    Pending,
    Resolved { mac: MacAddr, at: SimTime },
    NoRoute,
}

/// Broadcasts ARP requests from `src` for `target` until a reply arrives.
/// Each attempt waits `timeout_ms`; a reply to any earlier attempt still counts.
#[derive(Debug, Clone)]
pub struct ArpResolver {
    src: HostId,
    target: Ipv4Addr,
    timeout_ms: f64,
    /// `None` retries forever.
    max_attempts: Option<u32>,
    attempts: u32,
    outcome: ArpOutcome,
}

impl ArpResolver {
    pub fn new(src: HostId, target: Ipv4Addr, timeout_ms: f64, max_attempts: Option<u32>) -> Self {
        ArpResolver {
            src,
            target,
            timeout_ms,
            max_attempts,
            attempts: 0,
            outcome: ArpOutcome::Pending,
        }
    }

    pub fn outcome(&self) -> ArpOutcome {
        self.outcome
    }

    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    /// Resolves from the cache without sending anything when possible.
    pub fn start(&mut self, ctx: &mut AppCtx) -> ArpOutcome {
        if let Some(mac) = ctx.host(self.src).resolve(self.target) {
            self.outcome = ArpOutcome::Resolved { mac, at: ctx.now };
        } else {
            self.attempt(ctx);
        }
        self.outcome
    }

    fn attempt(&mut self, ctx: &mut AppCtx) {
        self.attempts += 1;
        let h = ctx.host(self.src);
        let req = Frame::arp_request(h.mac, h.ip, self.target);
        ctx.send(self.src, req);
        ctx.timer(self.timeout_ms, TAG_ARP | self.attempts as u64);
    }

    /// Returns true when this upcall resolved the target.
    pub fn on_upcall(&mut self, ctx: &AppCtx, host: HostId, up: &Upcall) -> bool {
        if host != self.src || self.outcome != ArpOutcome::Pending {
            return false;
        }
        match *up {
            Upcall::ArpLearned { ip, mac } if ip == self.target => {
                self.outcome = ArpOutcome::Resolved { mac, at: ctx.now };
                true
            }
            _ => false,
        }
    }

    /// Handles an ARP timer; returns true when this gave up.
    pub fn on_timer(&mut self, ctx: &mut AppCtx, token: u64) -> bool {
        if token & TAG_MASK != TAG_ARP || self.outcome != ArpOutcome::Pending {
            return false;
        }
        if token & !TAG_MASK != self.attempts as u64 {
            return false;
        }
        if self.max_attempts.is_some_and(|m| self.attempts >= m) {
            self.outcome = ArpOutcome::NoRoute;
            return true;
        }
        self.attempt(ctx);
        false
    }
}
