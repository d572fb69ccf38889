//! Fixed-step simulation of one terminal moving along its route.
//!
//! Each tick: apply scripted background load, move, sample every access
//! point in deterministic coverage (with shadowing on top), update the
//! candidate counters at beacon instants, decide, execute handoffs, and
//! push one tick of media through the sender queue and the playout buffer.
//! Execution delays and scans are rounded up to whole ticks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::environment::{in_coverage, mean_rss, rss_at, ApId, Point, RssSample, Shadowing, Technology};
use crate::execmodel::{adaptive_target, execution_delay, tunnel_goodput, BufferState};
use crate::handoff::{
    decide, request_emergency, ApLoad, CandidateStates, DecisionContext, HandoffDecision, HandoffKind, Reason,
};
use crate::netres::{Admission, NetworkState, RejectReason};
use crate::planner::{plan, AttachmentPlan, PlanObjective};
use crate::scenario::{ScenarioConfig, ScenarioError};
use crate::topology::{annotate, build_graph, coverage_intervals, CoverageGraph, LoadEntry};

/// Flow id of the terminal under study.
pub const TERMINAL_FLOW: &str = "terminal";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
    #[error("compare needs at least two scenarios")]
    TooFewScenarios,
    #[error("scenario `{0}` does not share the route and service of the first scenario")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Attach {
        ap: ApId,
    },
    Detach {
        ap: ApId,
    },
    Handoff {
        from: ApId,
        to: ApId,
        kind: HandoffKind,
        reason: Reason,
        /// ms, before tick rounding
        delay: f64,
    },
    ScanStart,
    ScanEnd,
    Underrun,
    AdmissionReject {
        ap: ApId,
        reason: RejectReason,
    },
    EmergencyRebalance {
        ap: ApId,
        success: bool,
    },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Attach { ap } => write!(f, "ATTACH:{ap}"),
            Event::Detach { ap } => write!(f, "DETACH:{ap}"),
            Event::Handoff {
                from, to, kind, reason, ..
            } => write!(f, "HO:{from}->{to}:{}:{reason}", kind.code()),
            Event::ScanStart => f.write_str("SCAN_START"),
            Event::ScanEnd => f.write_str("SCAN_END"),
            Event::Underrun => f.write_str("UNDERRUN"),
            Event::AdmissionReject { ap, reason } => write!(f, "REJECT:{ap}:{reason}"),
            Event::EmergencyRebalance { ap, success } => {
                write!(f, "EMERGENCY:{ap}:{}", if *success { "ok" } else { "fail" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedEvent {
    /// ms
    pub time: f64,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub events: Vec<LoggedEvent>,
}

impl EventLog {
    pub fn handoffs(&self) -> impl Iterator<Item = (f64, &Event)> {
        self.events
            .iter()
            .filter(|e| matches!(e.event, Event::Handoff { .. }))
            .map(|e| (e.time, &e.event))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// s
    pub t: f64,
    /// arclength, m
    pub s: f64,
    pub position: Point,
    pub attached: Option<ApId>,
    pub tech: Option<Technology>,
    /// dBm, sampled RSS of the attached access point
    pub rss: Option<f64>,
    /// kb/s
    pub goodput: f64,
    /// ms of media
    pub buffer: f64,
    pub load: Option<f64>,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    /// kb/s
    pub mean_goodput: f64,
    pub peak_goodput: f64,
    pub handoffs_horizontal: usize,
    pub handoffs_vertical: usize,
    pub ping_pong_count: usize,
    /// ms
    pub total_outage: f64,
    /// ms of traffic suspended by scans
    pub total_scan_interruption: f64,
    pub underruns: u32,
    /// ms per handoff, in order
    pub handoff_delays: Vec<f64>,
    pub coverage_fraction: f64,
    pub ticks: usize,
    pub outage_ticks: usize,
    pub admission_rejects: usize,
    /// ms of media dropped at the sender when its queue overflowed
    pub sender_dropped: f64,
    /// Ticks where some network held more users than its capacity.
    pub capacity_violations: usize,
}

impl MetricsReport {
    pub fn handoff_count(&self) -> usize {
        self.handoffs_horizontal + self.handoffs_vertical
    }

    /// `(key, value)` pairs in a fixed order, as used by the key-value
    /// summary and comparison tables.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("mean_goodput_kbps", format!("{:.3}", self.mean_goodput)),
            ("peak_goodput_kbps", format!("{:.3}", self.peak_goodput)),
            ("handoff_count", self.handoff_count().to_string()),
            ("handoffs_horizontal", self.handoffs_horizontal.to_string()),
            ("handoffs_vertical", self.handoffs_vertical.to_string()),
            ("ping_pong_count", self.ping_pong_count.to_string()),
            ("total_outage_ms", format!("{:.1}", self.total_outage)),
            ("total_scan_interruption_ms", format!("{:.1}", self.total_scan_interruption)),
            ("underruns", self.underruns.to_string()),
            ("coverage_fraction", format!("{:.6}", self.coverage_fraction)),
            ("ticks", self.ticks.to_string()),
            ("outage_ticks", self.outage_ticks.to_string()),
            ("admission_rejects", self.admission_rejects.to_string()),
            ("sender_dropped_ms", format!("{:.1}", self.sender_dropped)),
            ("capacity_violations", self.capacity_violations.to_string()),
            (
                "handoff_delays_ms",
                self.handoff_delays
                    .iter()
                    .map(|d| format!("{d:.1}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub metrics: MetricsReport,
    pub events: EventLog,
    pub trace: Vec<TraceRow>,
    pub plan: Option<AttachmentPlan>,
    /// Why no plan was produced, when planning was requested.
    pub plan_error: Option<String>,
}

/// Handoff pairs A→B followed directly by B→A within `window` seconds.
pub fn ping_pong_count(events: &EventLog, window: f64) -> usize {
    let hos: Vec<(f64, &ApId, &ApId)> = events
        .handoffs()
        .filter_map(|(t, e)| match e {
            Event::Handoff { from, to, .. } => Some((t, from, to)),
            _ => None,
        })
        .collect();
    hos.windows(2)
        .filter(|w| {
            let (t1, a1, b1) = w[0];
            let (t2, a2, b2) = w[1];
            a1 == b2 && b1 == a2 && t2 - t1 <= window * 1000.0
        })
        .count()
}

struct World<'a> {
    sc: &'a ScenarioConfig,
    nets: BTreeMap<ApId, NetworkState>,
    attached: Option<ApId>,
    states: CandidateStates,
    events: Vec<LoggedEvent>,
    tick_events: Vec<String>,
    rejects: usize,
}

impl World<'_> {
    fn log(&mut self, time: f64, event: Event) {
        self.tick_events.push(event.to_string());
        self.events.push(LoggedEvent { time, event });
    }

    fn loads(&self) -> BTreeMap<ApId, ApLoad> {
        self.nets
            .iter()
            .map(|(id, n)| {
                (
                    id.clone(),
                    ApLoad {
                        load: n.load(),
                        residual_bw: n.residual_bw(),
                    },
                )
            })
            .collect()
    }

    /// Admission on `target`, with emergency rebalancing when the service
    /// allows it and bandwidth was the problem.
    fn admit(&mut self, t: f64, target: &ApId) -> bool {
        let class = self.sc.service.class;
        let verdict = self.nets.get_mut(target).expect("known ap").admit(TERMINAL_FLOW, &class);
        let reason = match verdict {
            Admission::Accepted => return true,
            Admission::Rejected(r) => r,
        };
        self.rejects += 1;
        self.log(
            t,
            Event::AdmissionReject {
                ap: target.clone(),
                reason,
            },
        );
        if !(class.emergency && reason == RejectReason::Bandwidth) {
            return false;
        }
        let mut tgt = self.nets.remove(target).expect("known ap");
        let ok = {
            let mut others: Vec<&mut NetworkState> = self.nets.values_mut().collect();
            request_emergency(&class, &mut tgt, &mut others).unwrap_or(false)
        };
        let admitted = ok && tgt.admit(TERMINAL_FLOW, &class) == Admission::Accepted;
        self.nets.insert(target.clone(), tgt);
        self.log(
            t,
            Event::EmergencyRebalance {
                ap: target.clone(),
                success: admitted,
            },
        );
        admitted
    }

    fn release(&mut self, ap: &ApId) {
        if let Some(n) = self.nets.get_mut(ap) {
            n.release(TERMINAL_FLOW);
        }
    }
}

/// Run one scenario to the route end or the duration cap.
pub fn run(sc: &ScenarioConfig) -> Result<RunOutput, SimError> {
    sc.validate()?;
    let tick = sc.sim.tick;
    let horizon = sc.horizon();
    let n_ticks = ((horizon / tick) - 1e-9).ceil().max(1.0) as usize;
    let beacon_every = ((sc.sim.beacon_interval / tick).round() as usize).max(1);
    let shadow = Shadowing::new(sc.shadowing_sigma, sc.sim.seed);
    let tunnel = tunnel_goodput(sc.service.app_rate, sc.service.payload).expect("validated payload");
    let ap_index: BTreeMap<&ApId, usize> = sc.aps.iter().enumerate().map(|(i, a)| (&a.id, i)).collect();

    let mut nets: BTreeMap<ApId, NetworkState> = sc.aps.iter().map(|a| (a.id.clone(), NetworkState::for_ap(a))).collect();
    for (id, level) in &sc.loads {
        nets.get_mut(id).expect("validated load id").set_background(*level);
    }

    let (plan_out, plan_error) = if sc.use_plan {
        match make_plan(sc, &nets) {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e)),
        }
    } else {
        (None, None)
    };

    let scans = if sc.exec.scanning {
        sc.exec.scan.scans(sc.sim.seed, horizon)
    } else {
        Vec::new()
    };

    let mut w = World {
        sc,
        nets,
        attached: None,
        states: CandidateStates::default(),
        events: Vec::new(),
        tick_events: Vec::new(),
        rejects: 0,
    };
    let mut ramp_levels: Vec<Option<f64>> = vec![None; sc.load_ramps.len()];
    let mut buffer = BufferState::new(
        if sc.exec.adaptive_buffer {
            adaptive_target(0.0)
        } else {
            sc.exec.buffer_target
        },
        sc.service.app_rate,
    );
    buffer.catchup = sc.exec.catchup;
    let mut queue = 0.0f64;
    let mut interrupted_until = 0.0f64;
    let mut run_len = 0.0f64;
    let mut max_interruption = 0.0f64;
    let mut scan_idx = 0usize;
    let mut in_scan = false;

    let mut m = MetricsReport::default();
    let mut trace = Vec::with_capacity(n_ticks);
    let mut goodput_sum = 0.0;

    for k in 0..n_ticks {
        let t = k as f64 * tick;
        w.tick_events.clear();

        for (i, r) in sc.load_ramps.iter().enumerate() {
            let level = r.level_at(t / 1000.0);
            if level.is_some() && level != ramp_levels[i] {
                w.nets.get_mut(&r.ap).expect("validated ramp ap").set_background(level.unwrap());
                ramp_levels[i] = level;
            }
        }

        let s = (sc.route.speed() * t / 1000.0).min(sc.route.length());
        let p = sc.route.point_at_arclength(s);
        let samples: Vec<RssSample> = sc
            .aps
            .iter()
            .filter(|ap| in_coverage(ap, p, &sc.obstacles))
            .map(|ap| RssSample {
                ap_id: ap.id.clone(),
                tech: ap.tech,
                time: t / 1000.0,
                s,
                rss: rss_at(ap, p, &sc.obstacles, shadow.draw(ap_index[&ap.id] as u64, k as u64)),
            })
            .collect();
        let covered = |id: &ApId| samples.iter().any(|x| &x.ap_id == id);

        while scan_idx < scans.len() && t >= scans[scan_idx].1 {
            if in_scan {
                w.log(t, Event::ScanEnd);
                in_scan = false;
            }
            scan_idx += 1;
        }
        if !in_scan && scan_idx < scans.len() && t >= scans[scan_idx].0 {
            w.log(t, Event::ScanStart);
            in_scan = true;
        }

        let beacon = k % beacon_every == 0;
        if let Some(att) = w.attached.clone() {
            if beacon {
                w.states.observe(&sc.policy, Some(&att), &samples, t);
            }
            if beacon || !covered(&att) {
                let mut excluded = BTreeSet::new();
                loop {
                    let loads = w.loads();
                    let from = sc.ap(&att).expect("attached ap exists");
                    let decision = decide(&DecisionContext {
                        policy: &sc.policy,
                        attached: &att,
                        attached_tech: from.tech,
                        samples: &samples,
                        states: &w.states,
                        plan: plan_out.as_ref(),
                        position: s,
                        service: &sc.service.class,
                        loads: &loads,
                        now: t,
                        excluded: &excluded,
                    });
                    match decision {
                        HandoffDecision::Stay => break,
                        HandoffDecision::Outage => {
                            w.release(&att);
                            w.log(t, Event::Detach { ap: att.clone() });
                            w.attached = None;
                            w.states.reset(t, false);
                            break;
                        }
                        HandoffDecision::Handoff { target, reason, kind } => {
                            if !w.admit(t, &target) {
                                excluded.insert(target);
                                continue;
                            }
                            w.release(&att);
                            let to = sc.ap(&target).expect("target exists");
                            let delay = execution_delay(&sc.exec.latency, from.tech, to.tech, from.subnet == to.subnet)
                                + (to.base_latency - from.base_latency).max(0.0);
                            interrupted_until = interrupted_until.max(t + quantize(delay, tick));
                            m.handoff_delays.push(delay);
                            match kind {
                                HandoffKind::Horizontal => m.handoffs_horizontal += 1,
                                HandoffKind::Vertical => m.handoffs_vertical += 1,
                            }
                            w.log(
                                t,
                                Event::Handoff {
                                    from: att.clone(),
                                    to: target.clone(),
                                    kind,
                                    reason,
                                    delay,
                                },
                            );
                            w.attached = Some(target);
                            w.states.reset(t, true);
                            break;
                        }
                    }
                }
            }
        }
        if w.attached.is_none() {
            let loads = w.loads();
            let mut order: Vec<&RssSample> = samples.iter().collect();
            order.sort_by(|a, b| {
                b.rss
                    .total_cmp(&a.rss)
                    .then_with(|| loads[&b.ap_id].residual_bw.total_cmp(&loads[&a.ap_id].residual_bw))
                    .then_with(|| a.ap_id.cmp(&b.ap_id))
            });
            for cand in order {
                if w.admit(t, &cand.ap_id) {
                    if k > 0 {
                        let to = sc.ap(&cand.ap_id).expect("sampled ap exists");
                        let delay = execution_delay(&sc.exec.latency, to.tech, to.tech, false);
                        interrupted_until = interrupted_until.max(t + quantize(delay, tick));
                    }
                    w.log(t, Event::Attach { ap: cand.ap_id.clone() });
                    w.attached = Some(cand.ap_id.clone());
                    w.states.reset(t, false);
                    break;
                }
            }
        }

        if beacon {
            for n in w.nets.values_mut() {
                n.record_load(t / 1000.0);
            }
        }
        if w.nets.values().any(|n| n.attached_users() > n.capacity_users) {
            m.capacity_violations += 1;
        }

        let serving = w.attached.as_ref().filter(|a| covered(a)).and_then(|a| sc.ap(a));
        let outage = serving.is_none();
        let scan_cut = in_scan && sc.exec.scan.interrupts_traffic;
        let interrupted = outage || t < interrupted_until || scan_cut;
        if outage {
            m.outage_ticks += 1;
        }
        if scan_cut {
            m.total_scan_interruption += tick;
        }
        if interrupted {
            run_len += tick;
        } else if run_len > 0.0 {
            max_interruption = max_interruption.max(run_len);
            run_len = 0.0;
            if sc.exec.adaptive_buffer {
                buffer.target = adaptive_target(max_interruption);
            }
        }

        queue += tick;
        let sent = match serving {
            Some(ap) if !interrupted => {
                let net = &w.nets[&ap.id];
                let link = ap.user_rate_cap.min(net.residual_bw() + sc.service.class.required_bw);
                queue
                    .min(sc.exec.drain_multiplier * tick)
                    .min(tick * link / tunnel.on_wire)
                    .max(0.0)
            }
            _ => 0.0,
        };
        queue -= sent;
        if queue > sc.exec.max_queue {
            m.sender_dropped += queue - sc.exec.max_queue;
            queue = sc.exec.max_queue;
        }
        if buffer.step(sent, tick) {
            m.underruns += 1;
            w.log(t, Event::Underrun);
        }
        let goodput = sent / tick * sc.service.app_rate * tunnel.fraction;
        goodput_sum += goodput;
        m.peak_goodput = m.peak_goodput.max(goodput);

        let att_ap = w.attached.as_ref().and_then(|a| sc.ap(a));
        trace.push(TraceRow {
            t: t / 1000.0,
            s,
            position: p,
            attached: w.attached.clone(),
            tech: att_ap.map(|a| a.tech),
            rss: w
                .attached
                .as_ref()
                .and_then(|a| samples.iter().find(|x| &x.ap_id == a))
                .map(|x| x.rss),
            goodput,
            buffer: buffer.occupancy,
            load: w.attached.as_ref().map(|a| w.nets[a].load()),
            events: w.tick_events.clone(),
        });
    }

    m.ticks = n_ticks;
    m.mean_goodput = goodput_sum / n_ticks as f64;
    m.total_outage = m.outage_ticks as f64 * tick;
    m.coverage_fraction = 1.0 - m.outage_ticks as f64 / n_ticks as f64;
    m.admission_rejects = w.rejects;
    let events = EventLog { events: w.events };
    m.ping_pong_count = ping_pong_count(&events, sc.sim.ping_pong_window);
    Ok(RunOutput {
        metrics: m,
        events,
        trace,
        plan: plan_out,
        plan_error,
    })
}

fn quantize(ms: f64, tick: f64) -> f64 {
    (ms / tick - 1e-9).ceil().max(0.0) * tick
}

/// Attachment plan from the scenario geometry and the given network loads.
pub fn make_plan(sc: &ScenarioConfig, nets: &BTreeMap<ApId, NetworkState>) -> Result<AttachmentPlan, String> {
    let graph = scenario_graph(sc, nets)?;
    plan(&graph, &PlanObjective).map_err(|e| e.to_string())
}

/// The load-annotated coverage graph the planner searches.
pub fn scenario_graph(sc: &ScenarioConfig, nets: &BTreeMap<ApId, NetworkState>) -> Result<CoverageGraph, String> {
    let intervals = coverage_intervals(&sc.route, &sc.aps, &sc.obstacles, sc.sim.step).map_err(|e| e.to_string())?;
    let graph = build_graph(&intervals, sc.route.length(), sc.sim.min_overlap).map_err(|e| e.to_string())?;
    let loads = nets
        .iter()
        .map(|(id, n)| {
            (
                id.clone(),
                LoadEntry {
                    load: n.load(),
                    capacity_bw: n.capacity_bw,
                },
            )
        })
        .collect();
    annotate(&graph, &loads).map_err(|e| e.to_string())
}

/// Networks with the scenario's initial background load applied.
pub fn initial_networks(sc: &ScenarioConfig) -> BTreeMap<ApId, NetworkState> {
    let mut nets: BTreeMap<ApId, NetworkState> = sc.aps.iter().map(|a| (a.id.clone(), NetworkState::for_ap(a))).collect();
    for (id, level) in &sc.loads {
        if let Some(n) = nets.get_mut(id) {
            n.set_background(*level);
        }
    }
    nets
}

/// Plan for a scenario with its initial background load applied.
pub fn plan_scenario(sc: &ScenarioConfig) -> Result<AttachmentPlan, String> {
    make_plan(sc, &initial_networks(sc))
}

/// Mean RSS of `ap` along the route, sampled every `step` metres; handy for
/// scenario design.
pub fn rss_profile(sc: &ScenarioConfig, ap: &ApId, step: f64) -> Vec<(f64, f64)> {
    let Some(a) = sc.ap(ap) else { return Vec::new() };
    crate::topology::discretize(sc.route.length(), step)
        .into_iter()
        .map(|s| (s, mean_rss(a, sc.route.point_at_arclength(s), &sc.obstacles)))
        .collect()
}

/// Run each scenario (in parallel) and return the metrics in input order.
pub fn compare(scenarios: &[(String, ScenarioConfig)]) -> Result<Vec<(String, MetricsReport)>, SimError> {
    if scenarios.len() < 2 {
        return Err(SimError::TooFewScenarios);
    }
    let first = &scenarios[0].1;
    for (name, sc) in &scenarios[1..] {
        if sc.route != first.route || sc.service != first.service {
            return Err(SimError::Mismatch(name.clone()));
        }
    }
    scenarios
        .par_iter()
        .map(|(name, sc)| run(sc).map(|o| (name.clone(), o.metrics)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{AccessPoint, Route};

    fn ho(time: f64, from: &str, to: &str) -> LoggedEvent {
        LoggedEvent {
            time,
            event: Event::Handoff {
                from: ApId::new(from),
                to: ApId::new(to),
                kind: HandoffKind::Horizontal,
                reason: Reason::RssTrigger,
                delay: 0.0,
            },
        }
    }

    fn log(events: Vec<LoggedEvent>) -> EventLog {
        EventLog { events }
    }

    #[test]
    fn ping_pong_examples() {
        assert_eq!(ping_pong_count(&log(vec![ho(0.0, "A", "B"), ho(1000.0, "B", "A")]), 5.0), 1);
        assert_eq!(ping_pong_count(&log(vec![ho(0.0, "A", "B"), ho(1000.0, "B", "C")]), 5.0), 0);
        let abab = log(vec![ho(0.0, "A", "B"), ho(1000.0, "B", "A"), ho(2000.0, "A", "B")]);
        assert_eq!(ping_pong_count(&abab, 5.0), 2);
        assert_eq!(ping_pong_count(&log(vec![ho(0.0, "A", "B"), ho(9000.0, "B", "A")]), 5.0), 0);
    }

    fn single_umts(len: f64) -> ScenarioConfig {
        let route = Route::new(vec![Point::new(0.0, 0.0), Point::new(len, 0.0)], 10.0).unwrap();
        let ap = AccessPoint::new("u1", Technology::Umts, Point::new(len / 2.0, 100.0));
        ScenarioConfig::new("single", route, vec![ap], 1)
    }

    #[test]
    fn one_ap_whole_route() {
        let sc = single_umts(500.0);
        let out = run(&sc).unwrap();
        let m = &out.metrics;
        assert_eq!(m.handoff_count(), 0);
        assert_eq!(m.coverage_fraction, 1.0);
        assert_eq!(m.ticks, 5000);
        let expect = sc.service.app_rate * tunnel_goodput(60.0, 180.0).unwrap().fraction;
        let fill = (sc.exec.buffer_target / sc.sim.tick) as usize;
        for row in &out.trace[fill..] {
            assert!((row.goodput - expect).abs() < 1e-9, "{}", row.goodput);
        }
        assert_eq!(out.trace[0].events, vec!["ATTACH:u1".to_owned()]);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let mut sc = single_umts(300.0);
        sc.shadowing_sigma = 4.0;
        let a = run(&sc).unwrap();
        assert_eq!(a, run(&sc).unwrap());
        sc.sim.seed = 2;
        let b = run(&sc).unwrap();
        assert_ne!(a.trace, b.trace);
    }

    #[test]
    fn coverage_gap_outage() {
        // two WLAN hotspots with a gap between their coverage edges
        let route = Route::new(vec![Point::new(0.0, 0.0), Point::new(300.0, 0.0)], 10.0).unwrap();
        let a = AccessPoint::new("a", Technology::Wlan, Point::new(70.0, 0.0));
        let b = AccessPoint::new("b", Technology::Wlan, Point::new(230.0, 0.0));
        let r = a.coverage_radius();
        let gap = (230.0 - r) - (70.0 + r);
        assert!(gap > 10.0);
        let mut sc = ScenarioConfig::new("gap", route, vec![a, b], 1);
        sc.use_plan = false;
        let out = run(&sc).unwrap();
        let expected = gap / 10.0 * 1000.0;
        assert!((out.metrics.total_outage - expected).abs() <= 2.0 * sc.sim.tick, "{} vs {expected}", out.metrics.total_outage);
        let kinds: Vec<String> = out
            .events
            .events
            .iter()
            .filter(|e| e.event != Event::Underrun)
            .map(|e| e.event.to_string())
            .collect();
        assert_eq!(kinds, vec!["ATTACH:a", "DETACH:a", "ATTACH:b"]);
    }

    #[test]
    fn compare_rejects_mismatch() {
        let a = single_umts(300.0);
        let b = single_umts(400.0);
        assert_eq!(compare(&[("a".into(), a.clone())]), Err(SimError::TooFewScenarios));
        assert_eq!(
            compare(&[("a".into(), a.clone()), ("b".into(), b)]),
            Err(SimError::Mismatch("b".into()))
        );
        let rows = compare(&[("x".into(), a.clone()), ("y".into(), a)]).unwrap();
        assert_eq!(rows[0].1, rows[1].1);
        assert_eq!(rows[0].0, "x");
    }
}
