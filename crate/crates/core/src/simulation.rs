//! One simulated network: dataplane, control channel, controller app and the
//! active traffic application, driven by a single event queue.

use std::net::Ipv4Addr;

use crate::control::{
    ControlChannel, ControlMessage, Envelope, OutPayload, OutputAction, PacketIn, Toward,
    DEFAULT_CONTROL_LATENCY_MS,
};
use crate::controller::{
    Action, ControllerApp, ControllerKind, LearningSwitch, SpanningTree, StpLearningSwitch,
};
use crate::dataplane::{Dataplane, DataplaneConfig, Frame, FrameKind, InFlight, Verdict};
use crate::error::{ConfigError, Error, StormDetected};
use crate::sim::{Process, Scheduler, SeededRng, SimTime, Until};
use crate::topology::{Endpoint, HostId, LinkParams, NetworkModel, NodeId, PortNo, SwitchId};
use crate::traffic::{AppCtx, ArpOutcome, ArpResolver, BandwidthApp, BandwidthReport, PingApp, PingReport, TrafficConfig};

pub const DEFAULT_STP_SETTLE_MS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub link: LinkParams,
    pub dataplane: DataplaneConfig,
    pub control_latency_ms: f64,
    pub controller: ControllerKind,
    /// Traffic start under `l2-stp`; ignored for `l2`.
    pub stp_settle_ms: f64,
    pub traffic: TrafficConfig,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            link: LinkParams::default(),
            dataplane: DataplaneConfig::default(),
            control_latency_ms: DEFAULT_CONTROL_LATENCY_MS,
            controller: ControllerKind::L2,
            stp_settle_ms: DEFAULT_STP_SETTLE_MS,
            traffic: TrafficConfig::default(),
            seed: 0,
        }
    }
}

impl SimConfig {
    /// How long the spanning-tree controller waits for discovery probes after
    /// the first switch connects.
    pub fn discovery_wait_ms(&self) -> f64 {
        2.0 * self.control_latency_ms + 2.0 * self.link.delay_ms + 50.0
    }

    /// Latest time at which every PortMod has been applied.
    pub fn stp_convergence_bound_ms(&self) -> f64 {
        self.control_latency_ms + self.discovery_wait_ms() + self.control_latency_ms
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.link.validate()?;
        self.traffic.validate()?;
        if !(self.control_latency_ms >= 0.0 && self.control_latency_ms.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "control latency must be >= 0 ms, got {}",
                self.control_latency_ms
            )));
        }
        if !(self.dataplane.proc_delay_ms >= 0.0 && self.dataplane.proc_delay_ms.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "switch processing delay must be >= 0 ms, got {}",
                self.dataplane.proc_delay_ms
            )));
        }
        if self.dataplane.buffer_cap == 0 {
            return Err(ConfigError::Invalid("buffer cap must be >= 1".into()));
        }
        if self.controller == ControllerKind::L2Stp {
            let bound = self.stp_convergence_bound_ms();
            if !(self.stp_settle_ms > bound) {
                return Err(ConfigError::Invalid(format!(
                    "stp settle time {} ms does not cover spanning-tree convergence ({bound} ms)",
                    self.stp_settle_ms
                )));
            }
        }
        Ok(())
    }

    fn settle_ms(&self) -> f64 {
        match self.controller {
            ControllerKind::L2 => 0.0,
            ControllerKind::L2Stp => self.stp_settle_ms,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Event {
    Arrive(InFlight),
    Control(Envelope),
    ControllerTimer(u64),
    App { epoch: u64, token: u64 },
}

#[derive(Debug)]
enum ActiveApp {
    Idle,
    Arp(ArpResolver),
    Ping(PingApp),
    Bandwidth(BandwidthApp),
}

impl ActiveApp {
    fn done(&self) -> bool {
        match self {
            ActiveApp::Idle => true,
            ActiveApp::Arp(a) => a.outcome() != ArpOutcome::Pending,
            ActiveApp::Ping(p) => p.is_done(),
            ActiveApp::Bandwidth(_) => false,
        }
    }
}

struct World {
    model: NetworkModel,
    dp: Dataplane,
    channel: ControlChannel,
    controller: Box<dyn ControllerApp>,
    rng: SeededRng,
    storm: Option<StormDetected>,
    app: ActiveApp,
    epoch: u64,
    broadcast_rx: Vec<u64>,
}

fn host_port(h: HostId) -> Endpoint {
    Endpoint {
        node: NodeId::Host(h),
        port: PortNo(0),
    }
}

impl World {
    fn put(&mut self, sched: &mut Scheduler<Event>, from: Endpoint, frame: Frame, flooded: bool) {
        let now = sched.now();
        if let Some((f, at)) = self.dp.transmit(now, from, frame, flooded, &mut self.rng) {
            // only fails once the run is finished, and then nothing matters
            let _ = sched.schedule(at - now, Event::Arrive(f));
        }
    }

    fn to_channel(&mut self, sched: &mut Scheduler<Event>, toward: Toward, msg: ControlMessage) {
        let env = self.channel.send(toward, msg);
        let _ = sched.schedule(self.channel.latency_ms(), Event::Control(env));
    }

    fn apply(&mut self, sched: &mut Scheduler<Event>, actions: Vec<Action>) {
        for a in actions {
            match a {
                Action::Send(msg) => self.to_channel(sched, Toward::Switch, msg),
                Action::Timer { delay_ms, token } => {
                    let _ = sched.schedule(delay_ms, Event::ControllerTimer(token));
                }
            }
        }
    }

    fn with_app(&mut self, sched: &mut Scheduler<Event>, f: impl FnOnce(&mut ActiveApp, &mut AppCtx)) {
        let mut ctx = AppCtx::new(sched.now(), &self.dp);
        f(&mut self.app, &mut ctx);
        let AppCtx { sends, timers, .. } = ctx;
        for (delay, token) in timers {
            let _ = sched.schedule(
                delay,
                Event::App {
                    epoch: self.epoch,
                    token,
                },
            );
        }
        for (h, frame) in sends {
            self.put(sched, host_port(h), frame, false);
        }
    }

    fn at_host(&mut self, sched: &mut Scheduler<Event>, h: HostId, f: &InFlight) {
        self.dp.counters.delivered += 1;
        if f.frame.is_broadcast() {
            self.broadcast_rx[h.0 as usize - 1] += 1;
        }
        let reaction = self.dp.host_mut(h).handle(&f.frame);
        if let Some(reply) = reaction.reply {
            self.put(sched, host_port(h), reply, false);
        }
        if let Some(up) = reaction.upcall {
            self.with_app(sched, |app, ctx| match app {
                ActiveApp::Idle => {}
                ActiveApp::Arp(a) => {
                    a.on_upcall(ctx, h, &up);
                }
                ActiveApp::Ping(p) => p.on_upcall(ctx, h, &up),
                ActiveApp::Bandwidth(b) => b.on_upcall(ctx, h, &up),
            });
        }
    }

    fn at_switch(&mut self, sched: &mut Scheduler<Event>, s: SwitchId, f: &InFlight) {
        let in_port = f.to.port;
        match self.dp.switch_mut(s).classify(in_port, &f.frame, f.flooded) {
            Verdict::Forward(out) => {
                self.dp.counters.delivered += 1;
                if self.dp.switch(s).can_output(out, in_port) {
                    self.put(sched, Endpoint { node: NodeId::Switch(s), port: out }, f.frame, f.flooded);
                }
            }
            Verdict::PacketIn(buffer_ref) => {
                self.dp.counters.delivered += 1;
                let msg = ControlMessage::PacketIn(PacketIn {
                    switch_id: s,
                    in_port,
                    frame: f.frame,
                    buffer_ref,
                });
                self.to_channel(sched, Toward::Controller, msg);
            }
            Verdict::Probe => {
                self.dp.counters.delivered += 1;
                if let FrameKind::Probe { origin, origin_port } = f.frame.kind {
                    let msg = ControlMessage::DiscoveryProbe {
                        switch_id: s,
                        in_port,
                        origin,
                        origin_port,
                    };
                    self.to_channel(sched, Toward::Controller, msg);
                }
            }
            Verdict::DropBlocked => self.dp.counters.dropped_blocked += 1,
            Verdict::DropBufferFull => self.dp.counters.dropped_buffer += 1,
        }
    }

    fn at_controller(&mut self, sched: &mut Scheduler<Event>, msg: &ControlMessage) {
        let now = sched.now();
        let actions = match msg {
            ControlMessage::PacketIn(p) => self.controller.on_packet_in(now, p),
            ControlMessage::SwitchFeatures { switch_id, ports } => {
                self.controller.on_switch_features(now, *switch_id, ports)
            }
            ControlMessage::DiscoveryProbe {
                switch_id,
                in_port,
                origin,
                origin_port,
            } => self
                .controller
                .on_discovery_probe(now, *switch_id, *in_port, *origin, *origin_port),
            _ => Vec::new(),
        };
        self.apply(sched, actions);
    }

    fn switch_applies(&mut self, sched: &mut Scheduler<Event>, msg: ControlMessage) {
        let now = sched.now();
        match msg {
            ControlMessage::PacketOut(po) => {
                let s = po.switch_id;
                let (frame, in_port, flooded) = match po.payload {
                    OutPayload::Buffered(r) => match self.dp.switch_mut(s).take_buffered(r) {
                        Some(b) => (b.frame, b.in_port, b.flooded),
                        None => {
                            self.channel.note_stale_packet_out();
                            return;
                        }
                    },
                    OutPayload::Frame(f) => (f, PortNo(0), false),
                };
                let from = |port| Endpoint {
                    node: NodeId::Switch(s),
                    port,
                };
                match po.action {
                    OutputAction::Output(p) => {
                        if frame.is_probe() || self.dp.switch(s).can_output(p, in_port) {
                            self.put(sched, from(p), frame, flooded);
                        }
                    }
                    OutputAction::Flood => {
                        for p in self.dp.switch(s).flood_ports(in_port) {
                            self.put(sched, from(p), frame, true);
                        }
                    }
                }
            }
            ControlMessage::FlowMod { switch_id, mut entry } => {
                entry.installed_at = now;
                self.dp.switch_mut(switch_id).install(entry);
            }
            ControlMessage::PortMod {
                switch_id,
                port,
                state,
            } => {
                self.dp.switch_mut(switch_id).set_port_state(port, state);
            }
            _ => {}
        }
    }
}

impl Process<Event> for World {
    fn handle(&mut self, event: Event, sched: &mut Scheduler<Event>) {
        match event {
            Event::Arrive(f) => {
                self.dp.land(&f);
                match f.to.node {
                    NodeId::Host(h) => self.at_host(sched, h, &f),
                    NodeId::Switch(s) => self.at_switch(sched, s, &f),
                }
            }
            Event::Control(env) => {
                self.channel.receive(&env);
                match env.toward {
                    Toward::Controller => self.at_controller(sched, &env.msg),
                    Toward::Switch => self.switch_applies(sched, env.msg),
                }
            }
            Event::ControllerTimer(token) => {
                let actions = self.controller.on_timer(sched.now(), token);
                self.apply(sched, actions);
            }
            Event::App { epoch, token } => {
                if epoch == self.epoch {
                    self.with_app(sched, |app, ctx| match app {
                        ActiveApp::Idle => {}
                        ActiveApp::Arp(a) => {
                            a.on_timer(ctx, token);
                        }
                        ActiveApp::Ping(p) => p.on_timer(ctx, token),
                        ActiveApp::Bandwidth(b) => b.on_timer(ctx, token),
                    });
                }
            }
        }
        if self.storm.is_none() {
            if let Err(s) = self.dp.detect_storm(sched.now()) {
                self.storm = Some(s);
                sched.finish();
            }
        }
    }
}

/// A network under simulation. Created at t=0 with every switch announcing
/// itself to the controller; traffic methods first wait for the controller to
/// settle.
pub struct Simulation {
    cfg: SimConfig,
    sched: Scheduler<Event>,
    world: World,
    settled: bool,
}

impl Simulation {
    pub fn new(model: NetworkModel, cfg: SimConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let model = model.with_link_params(cfg.link);
        let controller: Box<dyn ControllerApp> = match cfg.controller {
            ControllerKind::L2 => Box::new(LearningSwitch::new()),
            ControllerKind::L2Stp => Box::new(StpLearningSwitch::new(
                cfg.discovery_wait_ms(),
                cfg.control_latency_ms,
            )),
        };
        let mut world = World {
            dp: Dataplane::new(&model, &cfg.dataplane),
            channel: ControlChannel::new(model.switch_count(), cfg.control_latency_ms),
            controller,
            rng: SeededRng::new(cfg.seed),
            storm: None,
            app: ActiveApp::Idle,
            epoch: 0,
            broadcast_rx: vec![0; model.host_count()],
            model,
        };
        let mut sched = Scheduler::new();
        let features: Vec<ControlMessage> = world
            .model
            .switches
            .iter()
            .map(|s| ControlMessage::SwitchFeatures {
                switch_id: s.id,
                ports: s.ports.iter().map(|p| p.no).collect(),
            })
            .collect();
        for msg in features {
            world.to_channel(&mut sched, Toward::Controller, msg);
        }
        Ok(Simulation {
            cfg,
            sched,
            world,
            settled: false,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn model(&self) -> &NetworkModel {
        &self.world.model
    }

    pub fn now(&self) -> SimTime {
        self.sched.now()
    }

    pub fn dataplane(&self) -> &Dataplane {
        &self.world.dp
    }

    pub fn channel(&self) -> &ControlChannel {
        &self.world.channel
    }

    pub fn controller(&self) -> &dyn ControllerApp {
        self.world.controller.as_ref()
    }

    pub fn spanning_tree(&self) -> Option<&SpanningTree> {
        self.world.controller.spanning_tree()
    }

    pub fn storm(&self) -> Option<StormDetected> {
        self.world.storm
    }

    /// Broadcast frames each host has received, indexed by host id - 1.
    pub fn broadcast_rx(&self) -> &[u64] {
        &self.world.broadcast_rx
    }

    pub fn events_executed(&self) -> u64 {
        self.sched.executed()
    }

    /// Runs the controller start-up phase (spanning tree under `l2-stp`).
    pub fn settle(&mut self) -> Result<(), ConfigError> {
        if !self.settled {
            let until = SimTime::from_ms(self.cfg.settle_ms());
            if self.sched.now() < until {
                self.sched.run(&mut self.world, Until::Time(until));
            }
            self.settled = true;
        }
        match self.world.controller.config_error() {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }

    /// Advances the clock by `ms`, running whatever is in flight.
    pub fn run_for(&mut self, ms: f64) -> SimTime {
        let until = self.sched.now() + ms;
        self.sched.run(&mut self.world, Until::Time(until))
    }

    /// Sends one ARP request from `src` without any application bookkeeping.
    pub fn inject_arp_request(&mut self, src: HostId, target: Ipv4Addr) {
        let h = self.world.dp.host(src);
        let f = Frame::arp_request(h.mac, h.ip, target);
        self.world.put(&mut self.sched, host_port(src), f, false);
    }

    fn launch(&mut self, app: ActiveApp) {
        self.world.epoch += 1;
        self.world.app = app;
        self.world.with_app(&mut self.sched, |app, ctx| match app {
            ActiveApp::Idle => {}
            ActiveApp::Arp(a) => {
                a.start(ctx);
            }
            ActiveApp::Ping(p) => p.start(ctx),
            ActiveApp::Bandwidth(b) => b.start(ctx),
        });
    }

    fn run_app(&mut self, horizon_ms: f64) {
        let until = self.sched.now() + horizon_ms;
        if !self.world.app.done() {
            self.sched
                .run_while(&mut self.world, Until::Time(until), |w| !w.app.done());
        }
    }

    fn host_ip(&self, h: HostId) -> Ipv4Addr {
        self.world.model.host(h).ip
    }

    /// Resolves `target` from `src`, retrying up to the configured attempts.
    pub fn arp_resolve(&mut self, src: HostId, target: Ipv4Addr) -> Result<ArpOutcome, Error> {
        self.settle()?;
        let t = self.cfg.traffic;
        self.launch(ActiveApp::Arp(ArpResolver::new(
            src,
            target,
            t.arp_timeout_ms,
            Some(t.arp_attempts),
        )));
        self.run_app(t.arp_timeout_ms * t.arp_attempts as f64 + 1.0);
        let outcome = match std::mem::replace(&mut self.world.app, ActiveApp::Idle) {
            ActiveApp::Arp(a) => a.outcome(),
            _ => unreachable!("arp app replaced mid-run"),
        };
        Ok(outcome)
    }

    pub fn ping(&mut self, src: HostId, dst: HostId) -> Result<PingReport, Error> {
        self.settle()?;
        let t = self.cfg.traffic;
        let app = PingApp::new(src, dst, self.host_ip(dst), t, self.sched.now());
        self.launch(ActiveApp::Ping(app));
        self.run_app(PingApp::max_duration_ms(&t) + 1.0);
        match std::mem::replace(&mut self.world.app, ActiveApp::Idle) {
            ActiveApp::Ping(p) => Ok(p.into_report()),
            _ => unreachable!("ping app replaced mid-run"),
        }
    }

    /// One stream run to the longest duration, sampled at every duration.
    pub fn bandwidth_series(
        &mut self,
        client: HostId,
        server: HostId,
        durations_s: &[f64],
    ) -> Result<Vec<BandwidthReport>, Error> {
        self.settle()?;
        if let Some(d) = durations_s.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(ConfigError::Invalid(format!("duration must be positive, got {d}")).into());
        }
        let longest = durations_s.iter().copied().fold(0.0, f64::max);
        let app = BandwidthApp::new(client, server, self.host_ip(server), self.cfg.traffic, self.sched.now());
        let start = self.sched.now();
        self.launch(ActiveApp::Bandwidth(app));
        self.run_app(longest * 1000.0);
        let ActiveApp::Bandwidth(app) = std::mem::replace(&mut self.world.app, ActiveApp::Idle) else {
            unreachable!("bandwidth app replaced mid-run");
        };
        let storm_at = self.world.storm.map(|s| s.at);
        Ok(durations_s
            .iter()
            .map(|&d| app.report(d, storm_at.is_some_and(|t| t <= start + d * 1000.0)))
            .collect())
    }

    pub fn bandwidth_test(
        &mut self,
        client: HostId,
        server: HostId,
        duration_s: f64,
    ) -> Result<BandwidthReport, Error> {
        Ok(self.bandwidth_series(client, server, &[duration_s])?[0])
    }
}
