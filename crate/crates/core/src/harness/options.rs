use std::str::FromStr;

use super::{default_durations, ExperimentConfig, Metric};
use crate::controller::ControllerKind;
use crate::error::ConfigError;
use crate::topology::{HostId, TopologyKind, TopologySpec};

pub const SEED_ENV: &str = "SDNBENCH_SEED";

/// Explicit seed, else `SDNBENCH_SEED`, else 0.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64, ConfigError> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("{SEED_ENV}: '{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Flag-shaped description of one experiment, filled from CLI flags or sweep
/// keys. Unset knobs keep their defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub kind: Option<TopologyKind>,
    pub hosts: Option<u32>,
    /// Fat-tree pods; with spine-leaf, selects the spine-leaf matched to this fat tree.
    pub k: Option<u32>,
    pub spine: Option<u32>,
    pub leaf: Option<u32>,
    pub hosts_per_leaf: Option<u32>,
    pub controller: Option<ControllerKind>,
    pub metric: Option<Metric>,
    pub durations: Option<Vec<f64>>,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub bw_mbps: Option<f64>,
    pub delay_ms: Option<f64>,
    pub loss: Option<f64>,
    pub control_latency_ms: Option<f64>,
    pub window: Option<u32>,
    pub mtu: Option<u32>,
    pub buffer_cap: Option<usize>,
    pub proc_ms: Option<f64>,
    pub stp_settle_ms: Option<f64>,
    pub allow_storm: bool,
    pub src: Option<u32>,
    pub dst: Option<u32>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("{key}: cannot parse '{value}'")))
}

fn parse_named<T: FromStr<Err = String>>(value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(ConfigError::Invalid)
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::Invalid(format!("{key}: expected a boolean, got '{value}'"))),
    }
}

/// `5,10,20` or the range form `5..115:5` (inclusive, step after the colon).
pub(crate) fn parse_durations(value: &str) -> Result<Vec<f64>, ConfigError> {
    let v = value.trim();
    if let Some((range, step)) = v.split_once(':') {
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| ConfigError::Invalid(format!("duration: bad range '{v}'")))?;
        let (a, b, step): (f64, f64, f64) =
            (parse("duration", a)?, parse("duration", b)?, parse("duration", step)?);
        if !(step > 0.0) || b < a {
            return Err(ConfigError::Invalid(format!("duration: bad range '{v}'")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + step * i as f64).collect());
    }
    v.split(',').map(|d| parse("duration", d)).collect()
}

impl RunOptions {
    /// Applies one `key = value` setting; keys are the CLI flag names without dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let k = key.trim().replace('_', "-");
        match k.as_str() {
            "kind" => self.kind = Some(parse_named(value)?),
            "hosts" => self.hosts = Some(parse(&k, value)?),
            "k" => self.k = Some(parse(&k, value)?),
            "spine" | "spines" => self.spine = Some(parse(&k, value)?),
            "leaf" | "leaves" => self.leaf = Some(parse(&k, value)?),
            "hosts-per-leaf" => self.hosts_per_leaf = Some(parse(&k, value)?),
            "controller" | "controller-app" => self.controller = Some(parse_named(value)?),
            "metric" => self.metric = Some(parse_named(value)?),
            "duration" | "durations" => self.durations = Some(parse_durations(value)?),
            "trials" => self.trials = Some(parse(&k, value)?),
            "seed" => self.seed = Some(parse(&k, value)?),
            "bw-mbps" => self.bw_mbps = Some(parse(&k, value)?),
            "delay-ms" => self.delay_ms = Some(parse(&k, value)?),
            "loss" => self.loss = Some(parse(&k, value)?),
            "control-latency-ms" => self.control_latency_ms = Some(parse(&k, value)?),
            "window" => self.window = Some(parse(&k, value)?),
            "mtu" => self.mtu = Some(parse(&k, value)?),
            "buffer-cap" => self.buffer_cap = Some(parse(&k, value)?),
            "proc-ms" => self.proc_ms = Some(parse(&k, value)?),
            "stp-settle-ms" => self.stp_settle_ms = Some(parse(&k, value)?),
            "allow-storm" => self.allow_storm = parse_bool(&k, value)?,
            "src" => self.src = Some(parse(&k, value)?),
            "dst" => self.dst = Some(parse(&k, value)?),
            _ => return Err(ConfigError::Invalid(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<TopologySpec, ConfigError> {
        let kind = self
            .kind
            .ok_or_else(|| ConfigError::Invalid("topology kind is required".into()))?;
        let need = |v: Option<u32>, flag: &str| {
            v.ok_or_else(|| ConfigError::Invalid(format!("{kind} needs --{flag}")))
        };
        let spec = match kind {
            TopologyKind::Linear => TopologySpec::Linear {
                n_hosts: need(self.hosts, "hosts")?,
            },
            TopologyKind::Star => TopologySpec::Star {
                n_hosts: need(self.hosts, "hosts")?,
            },
            TopologyKind::BinaryTree => TopologySpec::BinaryTree {
                n_hosts: need(self.hosts, "hosts")?,
            },
            TopologyKind::FatTree => TopologySpec::FatTree { k: need(self.k, "k")? },
            TopologyKind::SpineLeaf => match (self.k, self.spine) {
                (Some(k), None) => TopologySpec::spine_leaf_matching_fat_tree(k),
                _ => TopologySpec::SpineLeaf {
                    spines: need(self.spine, "spine")?,
                    leaves: need(self.leaf, "leaf")?,
                    hosts_per_leaf: need(self.hosts_per_leaf, "hosts-per-leaf")?,
                },
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds and validates the experiment.
    pub fn to_config(&self) -> Result<ExperimentConfig, ConfigError> {
        let spec = self.spec()?;
        let mut cfg = ExperimentConfig::new(
            spec,
            self.controller.unwrap_or(ControllerKind::L2),
            self.metric.unwrap_or(Metric::Rtt),
        );
        cfg.durations_s = self.durations.clone().unwrap_or_else(default_durations);
        cfg.trials = self.trials.unwrap_or(3);
        cfg.seed = resolve_seed(self.seed)?;
        cfg.allow_storm = self.allow_storm;
        let sim = &mut cfg.sim;
        if let Some(v) = self.bw_mbps {
            sim.link.bandwidth_mbps = v;
        }
        if let Some(v) = self.delay_ms {
            sim.link.delay_ms = v;
        }
        if let Some(v) = self.loss {
            sim.link.loss_rate = v;
        }
        if let Some(v) = self.control_latency_ms {
            sim.control_latency_ms = v;
        }
        if let Some(v) = self.window {
            sim.traffic.window = v;
        }
        if let Some(v) = self.mtu {
            sim.traffic.mtu = v;
        }
        if let Some(v) = self.buffer_cap {
            sim.dataplane.buffer_cap = v;
        }
        if let Some(v) = self.proc_ms {
            sim.dataplane.proc_delay_ms = v;
        }
        if let Some(v) = self.stp_settle_ms {
            sim.stp_settle_ms = v;
        }
        if self.src.is_some() || self.dst.is_some() {
            let n = spec.census().hosts as u32;
            cfg.endpoints = Some((HostId(self.src.unwrap_or(1)), HostId(self.dst.unwrap_or(n))));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
