use std::path::PathBuf;

use thiserror::Error;

use crate::sim::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("event delay must be a finite non-negative number of ms, got {0}")]
    NegativeDelay(f64),
    #[error("simulator already finished")]
    Finished,
}

/// Raised when a topology spec violates one of its structural rules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("{kind}: host count must be at least 1")]
    NoHosts { kind: &'static str },
    #[error("binary-tree: host count must be a power of two >= 2, got {0}")]
    BinaryTreeHosts(u32),
    #[error("fat-tree: k must be even and >= 2, got {0}")]
    FatTreeK(u32),
    #[error("spine-leaf: spines, leaves and hosts-per-leaf must all be >= 1")]
    SpineLeafCounts,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("looped topology {0} needs controller l2-stp (or --allow-storm)")]
    LoopedWithoutStp(String),
    #[error("switch graph is disconnected; spanning tree cannot be computed")]
    DisconnectedSwitchGraph,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// In-flight flooded frames exceeded the storm cap; the experiment was aborted.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("broadcast storm detected at {at} ({in_flight} flooded frames in flight, cap {cap})")]
pub struct StormDetected {
    pub at: SimTime,
    pub in_flight: u64,
    pub cap: u64,
}

/// Top-level error for the harness and CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
