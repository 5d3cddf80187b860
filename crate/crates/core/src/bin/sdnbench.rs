use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdnbench::harness::{
    load_sweep, run_experiment, run_matrix, write_bandwidth, write_bandwidth_csv, write_rtt,
    write_rtt_csv, Metric, Results, RunOptions,
};
use sdnbench::topology::{build, dump, export_dot, links, TopologyKind};
use sdnbench::{ControllerKind, Error};

#[derive(Parser)]
#[command(name = "sdnbench", version, about = "SDN topology benchmark on a simulated network")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a topology and print or export it.
    Topo {
        #[command(flatten)]
        topo: TopoArgs,
        /// List nodes.
        #[arg(long)]
        dump: bool,
        /// List links.
        #[arg(long)]
        links: bool,
        /// Write a Graphviz file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Run one experiment and write its CSV.
    Run(Box<RunArgs>),
    /// Run every experiment described in a sweep file.
    Sweep {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

#[derive(Args)]
struct TopoArgs {
    #[arg(long)]
    kind: TopologyKind,
    #[arg(long)]
    hosts: Option<u32>,
    /// Fat-tree pods (with spine-leaf: the spine-leaf matched to that fat tree).
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    spine: Option<u32>,
    #[arg(long)]
    leaf: Option<u32>,
    #[arg(long)]
    hosts_per_leaf: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    topo: TopoArgs,
    #[arg(long, default_value = "l2")]
    controller: ControllerKind,
    #[arg(long, default_value = "rtt")]
    metric: Metric,
    /// Seconds; a list `5,10` or a range `5..115:5`. Defaults to 5..115:5.
    #[arg(long)]
    duration: Option<String>,
    #[arg(long)]
    trials: Option<u32>,
    /// Falls back to $SDNBENCH_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long)]
    bw_mbps: Option<f64>,
    #[arg(long)]
    delay_ms: Option<f64>,
    #[arg(long)]
    loss: Option<f64>,
    #[arg(long)]
    control_latency_ms: Option<f64>,
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    mtu: Option<u32>,
    #[arg(long)]
    buffer_cap: Option<usize>,
    #[arg(long)]
    proc_ms: Option<f64>,
    #[arg(long)]
    stp_settle_ms: Option<f64>,
    /// Permit l2 on looped topologies (the run will likely report a storm).
    #[arg(long)]
    allow_storm: bool,
    /// Source host index (default: first host).
    #[arg(long)]
    src: Option<u32>,
    /// Destination host index (default: last host).
    #[arg(long)]
    dst: Option<u32>,
}

impl TopoArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            kind: Some(self.kind),
            hosts: self.hosts,
            k: self.k,
            spine: self.spine,
            leaf: self.leaf,
            hosts_per_leaf: self.hosts_per_leaf,
            ..RunOptions::default()
        }
    }
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions, Error> {
        let mut o = self.topo.options();
        if let Some(d) = &self.duration {
            o.set("duration", d)?;
        }
        Ok(RunOptions {
            controller: Some(self.controller),
            metric: Some(self.metric),
            trials: self.trials,
            seed: self.seed,
            bw_mbps: self.bw_mbps,
            delay_ms: self.delay_ms,
            loss: self.loss,
            control_latency_ms: self.control_latency_ms,
            window: self.window,
            mtu: self.mtu,
            buffer_cap: self.buffer_cap,
            proc_ms: self.proc_ms,
            stp_settle_ms: self.stp_settle_ms,
            allow_storm: self.allow_storm,
            src: self.src,
            dst: self.dst,
            ..o
        })
    }
}

fn write_results(results: &Results, metric: Metric, out: Option<&Path>) -> Result<(), Error> {
    match (metric, out) {
        (Metric::Bandwidth, Some(p)) => write_bandwidth_csv(p, &results.bandwidth),
        (Metric::Rtt, Some(p)) => write_rtt_csv(p, &results.rtt),
        (m, None) => {
            let stdout = std::io::stdout().lock();
            let r = match m {
                Metric::Bandwidth => write_bandwidth(stdout, &results.bandwidth),
                Metric::Rtt => write_rtt(stdout, &results.rtt),
            };
            r.map_err(|source| Error::Csv {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Command::Topo {
            topo,
            dump: want_dump,
            links: want_links,
            dot,
        } => {
            let net = build(&topo.options().spec()?)?;
            let mut out = std::io::stdout().lock();
            let io = |source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            };
            if want_dump {
                out.write_all(dump(&net).as_bytes()).map_err(io)?;
            }
            if want_links {
                out.write_all(links(&net).as_bytes()).map_err(io)?;
            }
            if let Some(path) = dot {
                std::fs::write(&path, export_dot(&net)).map_err(|source| Error::Io { path, source })?;
            }
            if !want_dump && !want_links {
                let c = net.spec.census();
                writeln!(
                    out,
                    "{}: {} hosts, {} switches, {} links",
                    net.spec.label(),
                    c.hosts,
                    c.switches,
                    c.links()
                )
                .map_err(io)?;
            }
            Ok(())
        }
        Command::Run(args) => {
            let cfg = args.options()?.to_config()?;
            let results = run_experiment(&cfg)?;
            write_results(&results, cfg.metric, args.out.as_deref())
        }
        Command::Sweep { config } => {
            let entries = load_sweep(&config)?;
            for e in &entries {
                let results = run_matrix(&e.configs)?;
                write_results(&results, e.metric, Some(&e.out))?;
                eprintln!("[{}] {} experiments -> {}", e.name, e.configs.len(), e.out.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Topology(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
