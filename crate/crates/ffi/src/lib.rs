//! C ABI over `sdnbench`.
//!
//! Every object crosses the boundary as an opaque pointer that the caller
//! owns and frees with the matching `*_free`. Functions return an
//! [`SdnStatus`]; on failure the message is kept per thread and can be read
//! with [`sdn_last_error`]. Strings handed out by the library are freed with
//! [`sdn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sdnbench::harness::{
    run_experiment, write_bandwidth, write_bandwidth_csv, write_rtt, write_rtt_csv, Metric,
    RunOptions,
};
use sdnbench::topology::{build, dump, export_dot, links, HostId, NetworkModel};
use sdnbench::{Error, Simulation, Status};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdnStatus {
    Ok = 0,
    NullArgument = 1,
    /// Bad UTF-8, unknown key, out-of-range host and similar.
    InvalidArgument = 2,
    Config = 3,
    Topology = 4,
    Simulation = 5,
    Io = 6,
    Panic = 99,
}

/// Outcome of a bandwidth run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdnRunStatus {
    Ok = 0,
    NoRoute = 1,
    Storm = 2,
}

impl From<Status> for SdnRunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => SdnRunStatus::Ok,
            Status::NoRoute => SdnRunStatus::NoRoute,
            Status::Storm => SdnRunStatus::Storm,
        }
    }
}

/// Ping summary. Missing values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdnPingResult {
    pub first_rtt_ms: f64,
    pub mean_rtt_ms: f64,
    pub max_rtt_ms: f64,
    /// Echoes after the first.
    pub sent: u32,
    pub lost: u32,
    /// True when ARP never resolved.
    pub no_route: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdnBandwidthResult {
    pub transfer_bytes: u64,
    pub bandwidth_mbps: f64,
    pub status: SdnRunStatus,
}

/// Experiment knobs, set by key like the CLI flags (`kind`, `hosts`, `k`, ...).
pub struct SdnOptions(RunOptions);

pub struct SdnTopology(NetworkModel);

pub struct SdnSimulation(Simulation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(SdnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => SdnStatus::Config,
            Error::Topology(_) => SdnStatus::Topology,
            Error::Sim(_) => SdnStatus::Simulation,
            Error::Io { .. } | Error::Csv { .. } => SdnStatus::Io,
        };
        Fail(code, e.to_string())
    }
}

impl From<sdnbench::ConfigError> for Fail {
    fn from(e: sdnbench::ConfigError) -> Self {
        Error::from(e).into()
    }
}

impl From<sdnbench::TopologyError> for Fail {
    fn from(e: sdnbench::TopologyError) -> Self {
        Error::from(e).into()
    }
}

/// Runs `f`, translating errors and panics into a status plus the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SdnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SdnStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SdnStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SdnStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SdnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(v);
    Ok(())
}

fn to_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(SdnStatus::Io, "output contained a nul byte".into()))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sdn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sdn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sdn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn sdn_options_new() -> *mut SdnOptions {
    Box::into_raw(Box::new(SdnOptions(RunOptions::default())))
}

/// # Safety
/// `opts` must come from [`sdn_options_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sdn_options_free(opts: *mut SdnOptions) {
    if !opts.is_null() {
        drop(Box::from_raw(opts));
    }
}

/// Sets one knob, e.g. `("kind", "fat-tree")`, `("duration", "5..115:5")`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sdn_options_set(
    opts: *mut SdnOptions,
    key: *const c_char,
    value: *const c_char,
) -> SdnStatus {
    guard(|| {
        let opts = mut_arg(opts, "opts")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        opts.0.set(key, value).map_err(|e| Fail(SdnStatus::InvalidArgument, e.to_string()))
    })
}

/// Builds the topology described by `opts`.
///
/// # Safety
/// `opts` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_topology_new(
    opts: *const SdnOptions,
    out: *mut *mut SdnTopology,
) -> SdnStatus {
    guard(|| {
        let spec = ref_arg(opts, "opts")?.0.spec()?;
        let net = build(&spec)?;
        put(out, Box::into_raw(Box::new(SdnTopology(net))))
    })
}

/// # Safety
/// `topo` must come from [`sdn_topology_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sdn_topology_free(topo: *mut SdnTopology) {
    if !topo.is_null() {
        drop(Box::from_raw(topo));
    }
}

/// Host, switch and link counts. Any out pointer may be null.
///
/// # Safety
/// `topo` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sdn_topology_counts(
    topo: *const SdnTopology,
    hosts: *mut u32,
    switches: *mut u32,
    links: *mut u32,
) -> SdnStatus {
    guard(|| {
        let net = &ref_arg(topo, "topo")?.0;
        for (p, v) in [(hosts, net.host_count()), (switches, net.switch_count()), (links, net.links.len())] {
            if !p.is_null() {
                p.write(v as u32);
            }
        }
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdnTopologyFormat {
    /// One line per node.
    Dump = 0,
    /// One line per link.
    Links = 1,
    /// Graphviz.
    Dot = 2,
}

/// Renders the topology; free the result with [`sdn_string_free`].
///
/// # Safety
/// `topo` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_topology_render(
    topo: *const SdnTopology,
    format: SdnTopologyFormat,
    out: *mut *mut c_char,
) -> SdnStatus {
    guard(|| {
        let net = &ref_arg(topo, "topo")?.0;
        let s = match format {
            SdnTopologyFormat::Dump => dump(net),
            SdnTopologyFormat::Links => links(net),
            SdnTopologyFormat::Dot => export_dot(net),
        };
        put(out, to_c(s)?)
    })
}

/// Runs the experiment in `opts` (all trials) and writes its CSV to `path`.
///
/// # Safety
/// `opts` and `path` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sdn_run_to_file(opts: *const SdnOptions, path: *const c_char) -> SdnStatus {
    guard(|| {
        let cfg = ref_arg(opts, "opts")?.0.to_config()?;
        let path = Path::new(str_arg(path, "path")?);
        let res = run_experiment(&cfg)?;
        match cfg.metric {
            Metric::Bandwidth => write_bandwidth_csv(path, &res.bandwidth)?,
            Metric::Rtt => write_rtt_csv(path, &res.rtt)?,
        }
        Ok(())
    })
}

/// Same as [`sdn_run_to_file`] but returns the CSV text.
///
/// # Safety
/// `opts` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_run_to_string(opts: *const SdnOptions, out: *mut *mut c_char) -> SdnStatus {
    guard(|| {
        let cfg = ref_arg(opts, "opts")?.0.to_config()?;
        let res = run_experiment(&cfg)?;
        let mut buf = Vec::new();
        match cfg.metric {
            Metric::Bandwidth => write_bandwidth(&mut buf, &res.bandwidth),
            Metric::Rtt => write_rtt(&mut buf, &res.rtt),
        }
        .map_err(|e| Fail(SdnStatus::Io, e.to_string()))?;
        put(out, to_c(String::from_utf8(buf).expect("csv output is UTF-8"))?)
    })
}

/// Creates a simulation for the topology and link/controller knobs in
/// `opts`, seeded with the resolved seed.
///
/// # Safety
/// `opts` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_simulation_new(
    opts: *const SdnOptions,
    out: *mut *mut SdnSimulation,
) -> SdnStatus {
    guard(|| {
        let cfg = ref_arg(opts, "opts")?.0.to_config()?;
        let mut sim_cfg = cfg.sim.clone();
        sim_cfg.seed = cfg.seed;
        let sim = Simulation::new(build(&cfg.spec)?, sim_cfg)?;
        put(out, Box::into_raw(Box::new(SdnSimulation(sim))))
    })
}

/// # Safety
/// `sim` must come from [`sdn_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sdn_simulation_free(sim: *mut SdnSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Current simulated time in ms.
///
/// # Safety
/// `sim` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sdn_simulation_now_ms(sim: *const SdnSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.0.now().as_ms())
}

fn host(sim: &Simulation, h: u32) -> Result<HostId, Fail> {
    let n = sim.model().host_count() as u32;
    if (1..=n).contains(&h) {
        Ok(HostId(h))
    } else {
        Err(Fail(SdnStatus::InvalidArgument, format!("host {h} out of range 1..={n}")))
    }
}

fn nan_or(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Pings `dst` from `src` (1-based host indices). State carries over between
/// calls, so a second ping finds the flows already installed.
///
/// # Safety
/// `sim` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_simulation_ping(
    sim: *mut SdnSimulation,
    src: u32,
    dst: u32,
    out: *mut SdnPingResult,
) -> SdnStatus {
    guard(|| {
        let sim = &mut mut_arg(sim, "sim")?.0;
        let (src, dst) = (host(sim, src)?, host(sim, dst)?);
        if out.is_null() {
            return Err(null("out"));
        }
        let r = sim.ping(src, dst)?;
        put(
            out,
            SdnPingResult {
                first_rtt_ms: nan_or(r.first_rtt_ms),
                mean_rtt_ms: nan_or(r.mean_rtt_ms()),
                max_rtt_ms: nan_or(r.max_rtt_ms()),
                sent: r.replies.len() as u32,
                lost: r.losses() as u32,
                no_route: r.no_route(),
            },
        )
    })
}

/// Streams from `client` to `server` for `duration_s` simulated seconds.
///
/// # Safety
/// `sim` must be valid; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sdn_simulation_bandwidth(
    sim: *mut SdnSimulation,
    client: u32,
    server: u32,
    duration_s: f64,
    out: *mut SdnBandwidthResult,
) -> SdnStatus {
    guard(|| {
        let sim = &mut mut_arg(sim, "sim")?.0;
        let (client, server) = (host(sim, client)?, host(sim, server)?);
        if out.is_null() {
            return Err(null("out"));
        }
        let r = sim.bandwidth_test(client, server, duration_s)?;
        put(
            out,
            SdnBandwidthResult {
                transfer_bytes: r.transfer_bytes,
                bandwidth_mbps: r.bandwidth_mbps,
                status: r.status.into(),
            },
        )
    })
}
