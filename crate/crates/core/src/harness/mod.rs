//! Experiment matrix runner and CSV output.

mod options;
mod records;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use options::{resolve_seed, RunOptions, SEED_ENV};
pub use records::{
    write_bandwidth, write_bandwidth_csv, write_rtt, write_rtt_csv, BandwidthRow, RttRow, Trial,
    BANDWIDTH_HEADER, RTT_HEADER,
};
pub use sweep::{load_sweep, parse_sweep, SweepEntry};

use crate::controller::ControllerKind;
use crate::error::{ConfigError, Error};
use crate::sim::trial_seed;
use crate::simulation::{SimConfig, Simulation};
use crate::topology::{build, HostId, TopologySpec};
use crate::traffic::{throughput_of, BandwidthReport, PingReport, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Bandwidth,
    Rtt,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Bandwidth => "bandwidth",
            Metric::Rtt => "rtt",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bandwidth" | "bw" => Ok(Metric::Bandwidth),
            "rtt" | "ping" => Ok(Metric::Rtt),
            other => Err(format!("unknown metric '{other}' (expected bandwidth or rtt)")),
        }
    }
}

/// 5, 10, ..., 115 seconds.
pub fn default_durations() -> Vec<f64> {
    (1..=23).map(|i| i as f64 * 5.0).collect()
}

/// Host-count sweep used for linear, star and binary-tree.
pub const HOST_SWEEP: [u32; 7] = [2, 4, 8, 16, 32, 64, 128];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spec: TopologySpec,
    pub metric: Metric,
    /// Bandwidth only; each duration is one measurement window starting at traffic start.
    pub durations_s: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
    /// Network and controller knobs; `sim.seed` is replaced per trial.
    pub sim: SimConfig,
    pub allow_storm: bool,
    /// Defaults to the first and last host.
    pub endpoints: Option<(HostId, HostId)>,
}

impl ExperimentConfig {
    pub fn new(spec: TopologySpec, controller: ControllerKind, metric: Metric) -> Self {
        ExperimentConfig {
            spec,
            metric,
            durations_s: default_durations(),
            trials: 3,
            seed: 0,
            sim: SimConfig {
                controller,
                ..SimConfig::default()
            },
            allow_storm: false,
            endpoints: None,
        }
    }

    pub fn controller(&self) -> ControllerKind {
        self.sim.controller
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spec.validate()?;
        self.sim.validate()?;
        if self.spec.kind().is_looped() && self.controller() == ControllerKind::L2 && !self.allow_storm {
            return Err(ConfigError::LoopedWithoutStp(self.spec.label()));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be >= 1".into()));
        }
        if self.metric == Metric::Bandwidth {
            if self.durations_s.is_empty() {
                return Err(ConfigError::Invalid("bandwidth needs at least one duration".into()));
            }
            if let Some(d) = self.durations_s.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
                return Err(ConfigError::Invalid(format!("duration must be positive, got {d}")));
            }
        }
        if let Some((a, b)) = self.endpoints {
            let n = self.spec.census().hosts as u32;
            if a == b || a.0 == 0 || b.0 == 0 || a.0 > n || b.0 > n {
                return Err(ConfigError::Invalid(format!(
                    "endpoints must be two distinct hosts in 1..={n}, got {a} and {b}"
                )));
            }
        }
        Ok(())
    }

    fn endpoints_or_default(&self) -> (HostId, HostId) {
        self.endpoints.unwrap_or_else(|| {
            let n = self.spec.census().hosts as u32;
            (HostId(1), HostId(n))
        })
    }

    /// Seed used by trial `n` (1-based).
    pub fn trial_seed(&self, n: u32) -> u64 {
        trial_seed(self.seed, n)
    }
}

/// Raw outcome of one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Bandwidth(Vec<BandwidthReport>),
    Rtt { report: PingReport, storm: bool },
}

/// Runs one trial on a fresh simulator.
pub fn run_trial(cfg: &ExperimentConfig, n: u32) -> Result<TrialOutcome, Error> {
    let model = build(&cfg.spec)?;
    let sim_cfg = SimConfig {
        seed: cfg.trial_seed(n),
        ..cfg.sim
    };
    let mut sim = Simulation::new(model, sim_cfg)?;
    let (src, dst) = cfg.endpoints_or_default();
    Ok(match cfg.metric {
        Metric::Bandwidth => TrialOutcome::Bandwidth(sim.bandwidth_series(src, dst, &cfg.durations_s)?),
        Metric::Rtt => {
            let report = sim.ping(src, dst)?;
            TrialOutcome::Rtt {
                report,
                storm: sim.storm().is_some(),
            }
        }
    })
}

/// Rows produced by one or more experiments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Results {
    pub bandwidth: Vec<BandwidthRow>,
    pub rtt: Vec<RttRow>,
}

impl Results {
    pub fn extend(&mut self, other: Results) {
        self.bandwidth.extend(other.bandwidth);
        self.rtt.extend(other.rtt);
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn assemble(cfg: &ExperimentConfig, outcomes: Vec<TrialOutcome>) -> Results {
    let census = cfg.spec.census();
    let topology = cfg.spec.kind().name().to_string();
    let app = cfg.controller().name().to_string();
    let mut out = Results::default();
    match cfg.metric {
        Metric::Bandwidth => {
            let reports: Vec<&Vec<BandwidthReport>> = outcomes
                .iter()
                .map(|o| match o {
                    TrialOutcome::Bandwidth(r) => r,
                    TrialOutcome::Rtt { .. } => unreachable!("metric mismatch"),
                })
                .collect();
            let row = |d: f64, trial: Trial, bytes: f64, status: Status, seed: u64| {
                let bw = if d > 0.0 { bytes * 8.0 / (d * 1e6) } else { 0.0 };
                BandwidthRow {
                    topology: topology.clone(),
                    controller_app: app.clone(),
                    hosts: census.hosts,
                    switches: census.switches,
                    duration_s: d,
                    trial,
                    transfer_bytes: bytes,
                    bandwidth_mbps: bw,
                    throughput_mbps: bw,
                    status,
                    seed,
                }
            };
            for (i, &d) in cfg.durations_s.iter().enumerate() {
                for (t, r) in reports.iter().enumerate() {
                    let r = r[i];
                    let n = t as u32 + 1;
                    let mut rec = row(d, Trial::N(n), r.transfer_bytes as f64, r.status, cfg.trial_seed(n));
                    rec.throughput_mbps = throughput_of(r.transfer_bytes, d).unwrap_or(0.0);
                    rec.bandwidth_mbps = r.bandwidth_mbps;
                    out.bandwidth.push(rec);
                }
                let bytes = mean(reports.iter().map(|r| r[i].transfer_bytes as f64)).unwrap_or(0.0);
                let status = if reports.iter().any(|r| r[i].status == Status::Storm) {
                    Status::Storm
                } else if bytes == 0.0 {
                    Status::NoRoute
                } else {
                    Status::Ok
                };
                let mut agg = row(d, Trial::Avg, bytes, status, cfg.seed);
                agg.bandwidth_mbps = mean(reports.iter().map(|r| r[i].bandwidth_mbps)).unwrap_or(0.0);
                agg.throughput_mbps = agg.bandwidth_mbps;
                out.bandwidth.push(agg);
            }
        }
        Metric::Rtt => {
            let reports: Vec<&PingReport> = outcomes
                .iter()
                .map(|o| match o {
                    TrialOutcome::Rtt { report, .. } => report,
                    TrialOutcome::Bandwidth(_) => unreachable!("metric mismatch"),
                })
                .collect();
            let seq_rtt = |r: &PingReport, seq: usize| {
                if seq == 0 {
                    r.first_rtt_ms
                } else {
                    r.replies[seq - 1]
                }
            };
            let count = cfg.sim.traffic.ping_count as usize;
            let row = |trial: Trial, seq: usize, rtt_ms: Option<f64>, seed: u64| RttRow {
                topology: topology.clone(),
                controller_app: app.clone(),
                hosts: census.hosts,
                switches: census.switches,
                trial,
                seq: seq as u32,
                rtt_ms,
                seed,
            };
            for (t, r) in reports.iter().enumerate() {
                let n = t as u32 + 1;
                for seq in 0..=count {
                    out.rtt.push(row(Trial::N(n), seq, seq_rtt(r, seq), cfg.trial_seed(n)));
                }
            }
            for seq in 0..=count {
                let m = mean(reports.iter().filter_map(|r| seq_rtt(r, seq)));
                out.rtt.push(row(Trial::Avg, seq, m, cfg.seed));
            }
        }
    }
    out
}

/// Runs every trial of one experiment, in parallel.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Results, Error> {
    run_matrix(std::slice::from_ref(cfg))
}

/// Runs all trials of all configs in parallel; rows come out in config order,
/// then trial order, whatever the scheduling.
pub fn run_matrix(configs: &[ExperimentConfig]) -> Result<Results, Error> {
    for c in configs {
        c.validate()?;
    }
    let jobs: Vec<(usize, u32)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (1..=c.trials).map(move |n| (i, n)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(i, n)| run_trial(&configs[i], n))
        .collect::<Result<_, _>>()?;
    let mut it = outcomes.into_iter();
    let mut out = Results::default();
    for c in configs {
        let mine: Vec<TrialOutcome> = it.by_ref().take(c.trials as usize).collect();
        out.extend(assemble(c, mine));
    }
    Ok(out)
}
