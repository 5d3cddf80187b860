use std::path::{Path, PathBuf};

use ini::Ini;

use super::{ExperimentConfig, Metric, RunOptions};
use crate::error::ConfigError;

/// One `[section]` of a sweep file: every config it expands to, written to one CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub name: String,
    pub out: PathBuf,
    pub metric: Metric,
    pub configs: Vec<ExperimentConfig>,
}

fn is_list_key(key: &str) -> bool {
    !matches!(key, "duration" | "durations" | "out" | "out-dir")
}

/// Parses a sweep file. Keys before the first section are defaults for every
/// section; `out-dir` there prefixes each section's `out`. A comma-separated
/// value (except `duration`) expands into one experiment per value, taking the
/// cartesian product across keys in the order they appear.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepEntry>, ConfigError> {
    let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Invalid(format!("sweep file: {e}")))?;
    let mut defaults: Vec<(String, String)> = Vec::new();
    let mut out_dir: Option<PathBuf> = None;
    for (k, v) in ini.general_section().iter() {
        if k == "out-dir" {
            out_dir = Some(PathBuf::from(v));
        } else {
            defaults.push((k.to_string(), v.to_string()));
        }
    }

    let mut entries = Vec::new();
    for (name, props) in ini.iter() {
        let Some(name) = name else { continue };
        let mut keys = defaults.clone();
        let mut out = None;
        for (k, v) in props.iter() {
            if k == "out" {
                out = Some(PathBuf::from(v));
                continue;
            }
            match keys.iter_mut().find(|(dk, _)| dk == k) {
                Some(slot) => slot.1 = v.to_string(),
                None => keys.push((k.to_string(), v.to_string())),
            }
        }
        let out = out.ok_or_else(|| ConfigError::Invalid(format!("[{name}]: missing 'out'")))?;
        let out = match &out_dir {
            Some(dir) if out.is_relative() => dir.join(out),
            _ => out,
        };

        let mut combos: Vec<RunOptions> = vec![RunOptions::default()];
        for (k, v) in &keys {
            let values: Vec<&str> = if is_list_key(k) {
                v.split(',').map(str::trim).collect()
            } else {
                vec![v.as_str()]
            };
            let mut next = Vec::with_capacity(combos.len() * values.len());
            for base in &combos {
                for val in &values {
                    let mut o = base.clone();
                    o.set(k, val)
                        .map_err(|e| ConfigError::Invalid(format!("[{name}]: {e}")))?;
                    next.push(o);
                }
            }
            combos = next;
        }
        let configs = combos
            .iter()
            .map(|o| o.to_config())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::Invalid(format!("[{name}]: {e}")))?;
        let metric = configs[0].metric;
        if configs.iter().any(|c| c.metric != metric) {
            return Err(ConfigError::Invalid(format!(
                "[{name}]: one section writes one CSV, so it needs a single metric"
            )));
        }
        entries.push(SweepEntry {
            name: name.to_string(),
            out,
            metric,
            configs,
        });
    }
    if entries.is_empty() {
        return Err(ConfigError::Invalid("sweep file defines no [sections]".into()));
    }
    Ok(entries)
}

/// Reads and parses a sweep file from disk.
pub fn load_sweep(path: &Path) -> Result<Vec<SweepEntry>, crate::error::Error> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::error::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_sweep(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::ControllerKind;
    use crate::topology::TopologySpec;

    const SAMPLE: &str = "\
out-dir = results
trials = 2
seed = 7

[linear-rtt]
kind = linear
hosts = 2,4,8
metric = rtt
out = linear_rtt.csv

[fat-tree-bw]
kind = fat-tree
k = 2, 4
controller = l2-stp
metric = bandwidth
duration = 5..15:5
trials = 1
out = ft_bw.csv
";

    #[test]
    fn expands_lists() {
        let e = parse_sweep(SAMPLE).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].out, PathBuf::from("results/linear_rtt.csv"));
        assert_eq!(e[0].configs.len(), 3);
        assert_eq!(e[0].configs[2].spec, TopologySpec::Linear { n_hosts: 8 });
        assert_eq!(e[0].configs[0].trials, 2);
        assert_eq!(e[0].configs[0].seed, 7);
        assert_eq!(e[1].configs.len(), 2);
        assert_eq!(e[1].configs[1].durations_s, vec![5.0, 10.0, 15.0]);
        assert_eq!(e[1].configs[1].trials, 1);
        assert_eq!(e[1].configs[0].controller(), ControllerKind::L2Stp);
    }

    #[test]
    fn missing_out_is_error() {
        assert!(parse_sweep("[a]\nkind = star\nhosts = 2\n").is_err());
    }

    #[test]
    fn looped_l2_rejected_in_sweep() {
        let err = parse_sweep("[a]\nkind = fat-tree\nk = 4\nseed = 1\nout = x.csv\n").unwrap_err();
        assert!(err.to_string().contains("l2-stp"));
    }
}
