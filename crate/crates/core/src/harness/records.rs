use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::Error;
use crate::traffic::Status;

pub const BANDWIDTH_HEADER: [&str; 11] = [
    "topology",
    "controller_app",
    "hosts",
    "switches",
    "duration_s",
    "trial",
    "transfer_bytes",
    "bandwidth_mbps",
    "throughput_mbps",
    "status",
    "seed",
];

pub const RTT_HEADER: [&str; 9] = [
    "topology",
    "controller_app",
    "hosts",
    "switches",
    "trial",
    "seq",
    "rtt_ms",
    "is_first",
    "seed",
];

/// Trial index (1-based) or the mean over trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trial {
    N(u32),
    Avg,
}

impl fmt::Display for Trial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trial::N(n) => write!(f, "{n}"),
            Trial::Avg => f.write_str("avg"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthRow {
    pub topology: String,
    pub controller_app: String,
    pub hosts: usize,
    pub switches: usize,
    pub duration_s: f64,
    pub trial: Trial,
    /// Whole bytes on trial rows; a mean on aggregate rows.
    pub transfer_bytes: f64,
    pub bandwidth_mbps: f64,
    pub throughput_mbps: f64,
    pub status: Status,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RttRow {
    pub topology: String,
    pub controller_app: String,
    pub hosts: usize,
    pub switches: usize,
    pub trial: Trial,
    /// 0 is the first echo.
    pub seq: u32,
    /// `None` when the echo was lost; written as an empty cell.
    pub rtt_ms: Option<f64>,
    pub seed: u64,
}

impl RttRow {
    pub fn is_first(&self) -> bool {
        self.seq == 0
    }
}

impl BandwidthRow {
    fn fields(&self) -> [String; 11] {
        [
            self.topology.clone(),
            self.controller_app.clone(),
            self.hosts.to_string(),
            self.switches.to_string(),
            self.duration_s.to_string(),
            self.trial.to_string(),
            self.transfer_bytes.to_string(),
            self.bandwidth_mbps.to_string(),
            self.throughput_mbps.to_string(),
            self.status.to_string(),
            self.seed.to_string(),
        ]
    }
}

impl RttRow {
    fn fields(&self) -> [String; 9] {
        [
            self.topology.clone(),
            self.controller_app.clone(),
            self.hosts.to_string(),
            self.switches.to_string(),
            self.trial.to_string(),
            self.seq.to_string(),
            self.rtt_ms.map(|r| r.to_string()).unwrap_or_default(),
            u8::from(self.is_first()).to_string(),
            self.seed.to_string(),
        ]
    }
}

fn write_rows<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bandwidth<W: Write>(out: W, rows: &[BandwidthRow]) -> csv::Result<()> {
    write_rows(out, BANDWIDTH_HEADER, rows.iter().map(BandwidthRow::fields))
}

pub fn write_rtt<W: Write>(out: W, rows: &[RttRow]) -> csv::Result<()> {
    write_rows(out, RTT_HEADER, rows.iter().map(RttRow::fields))
}

fn create(path: &Path) -> Result<File, Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_bandwidth_csv(path: &Path, rows: &[BandwidthRow]) -> Result<(), Error> {
    write_bandwidth(create(path)?, rows).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_rtt_csv(path: &Path, rows: &[RttRow]) -> Result<(), Error> {
    write_rtt(create(path)?, rows).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render_rtt(rows: &[RttRow]) -> String {
        let mut buf = Vec::new();
        write_rtt(&mut buf, rows).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(
            render_rtt(&[]),
            "topology,controller_app,hosts,switches,trial,seq,rtt_ms,is_first,seed\n"
        );
        let mut buf = Vec::new();
        write_bandwidth(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "topology,controller_app,hosts,switches,duration_s,trial,transfer_bytes,bandwidth_mbps,throughput_mbps,status,seed\n"
        );
    }

    #[test]
    fn lost_echo_is_empty_cell() {
        let row = RttRow {
            topology: "star".into(),
            controller_app: "l2".into(),
            hosts: 2,
            switches: 1,
            trial: Trial::N(1),
            seq: 3,
            rtt_ms: None,
            seed: 9,
        };
        assert!(render_rtt(&[row]).ends_with("star,l2,2,1,1,3,,0,9\n"));
    }

    #[test]
    fn no_route_row() {
        let row = BandwidthRow {
            topology: "linear".into(),
            controller_app: "l2".into(),
            hosts: 128,
            switches: 128,
            duration_s: 15.0,
            trial: Trial::Avg,
            transfer_bytes: 0.0,
            bandwidth_mbps: 0.0,
            throughput_mbps: 0.0,
            status: Status::NoRoute,
            seed: 1,
        };
        let mut buf = Vec::new();
        write_bandwidth(&mut buf, &[row]).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .ends_with("linear,l2,128,128,15,avg,0,0,0,no_route,1\n"));
    }
}
