//! Measurement applications that run on the simulated hosts: ARP resolution,
//! ping, and a window-based bulk transfer standing in for iperf.

mod arp;
mod bandwidth;
mod ping;

use std::fmt;
use std::str::FromStr;

pub use arp::{ArpOutcome, ArpResolver};
pub use bandwidth::{BandwidthApp, BandwidthReport};
pub use ping::{PingApp, PingReport};

use crate::dataplane::{Dataplane, Frame, HostState, DEFAULT_MTU};
use crate::error::ConfigError;
use crate::sim::SimTime;
use crate::topology::HostId;

/// Timer tokens carry their owner in the high 32 bits.
pub(crate) const TAG_ARP: u64 = 1 << 32;
pub(crate) const TAG_ECHO_TIMEOUT: u64 = 2 << 32;
pub(crate) const TAG_ECHO_SEND: u64 = 3 << 32;
pub(crate) const TAG_RTO: u64 = 4 << 32;
pub(crate) const TAG_MASK: u64 = !0u64 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficConfig {
    pub window: u32,
    pub mtu: u32,
    pub arp_timeout_ms: f64,
    /// ARP requests a ping makes before giving up with no route.
    pub arp_attempts: u32,
    pub echo_timeout_ms: f64,
    pub ping_interval_ms: f64,
    /// Echoes after the first one.
    pub ping_count: u32,
    pub rto_initial_ms: f64,
    pub rto_max_ms: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            window: 64,
            mtu: DEFAULT_MTU,
            arp_timeout_ms: 3000.0,
            arp_attempts: 3,
            echo_timeout_ms: 3000.0,
            ping_interval_ms: 1000.0,
            ping_count: 10,
            rto_initial_ms: 3000.0,
            rto_max_ms: 60_000.0,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.window == 0 {
            return bad("window must be >= 1");
        }
        if self.mtu < 64 {
            return bad("mtu must be >= 64 bytes");
        }
        if self.arp_attempts == 0 {
            return bad("arp attempts must be >= 1");
        }
        for (name, v) in [
            ("arp timeout", self.arp_timeout_ms),
            ("echo timeout", self.echo_timeout_ms),
            ("ping interval", self.ping_interval_ms),
            ("initial rto", self.rto_initial_ms),
            ("max rto", self.rto_max_ms),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome class of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Ok,
    NoRoute,
    Storm,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NoRoute => "no_route",
            Status::Storm => "storm",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Status::Ok),
            "no_route" => Ok(Status::NoRoute),
            "storm" => Ok(Status::Storm),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

/// Mbps from bytes over seconds, the same unit as `BandwidthReport::bandwidth_mbps`.
pub fn throughput_of(transfer_bytes: u64, elapsed_s: f64) -> Result<f64, ConfigError> {
    if !(elapsed_s > 0.0) || !elapsed_s.is_finite() {
        return Err(ConfigError::Invalid(format!(
            "elapsed time must be positive, got {elapsed_s}"
        )));
    }
    Ok(transfer_bytes as f64 * 8.0 / (elapsed_s * 1e6))
}

/// What a traffic app sees while handling one event.
pub struct AppCtx<'a> {
    pub now: SimTime,
    dp: &'a Dataplane,
    pub(crate) sends: Vec<(HostId, Frame)>,
    pub(crate) timers: Vec<(f64, u64)>,
}

impl<'a> AppCtx<'a> {
    pub(crate) fn new(now: SimTime, dp: &'a Dataplane) -> Self {
        AppCtx {
            now,
            dp,
            sends: Vec::new(),
            timers: Vec::new(),
        }
    }

    pub fn host(&self, id: HostId) -> &HostState {
        self.dp.host(id)
    }

    pub fn send(&mut self, from: HostId, frame: Frame) {
        self.sends.push((from, frame));
    }

    pub fn timer(&mut self, delay_ms: f64, token: u64) {
        self.timers.push((delay_ms, token));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throughput_arithmetic() {
        assert!((throughput_of(12_500_000, 1.0).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(throughput_of(0, 10.0).unwrap(), 0.0);
        assert!(throughput_of(10, 0.0).is_err());
        assert!(throughput_of(10, -1.0).is_err());
    }

    #[test]
    fn status_round_trip() {
        for s in [Status::Ok, Status::NoRoute, Status::Storm] {
            assert_eq!(s.as_str().parse::<Status>().unwrap(), s);
        }
    }

    #[test]
    fn zero_window_rejected() {
        let cfg = TrafficConfig {
            window: 0,
            ..TrafficConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(TrafficConfig::default().validate().is_ok());
    }
}
