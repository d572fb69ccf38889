//! Runtime handoff decisions.
//!
//! A candidate may take over from the serving access point only when all
//! trigger conditions hold at once: absolute RSS threshold, relative RSS
//! hysteresis, dwell time, consecutive good beacons (fewer for real-time
//! service), and, for network-aware strategies, a load ceiling on the
//! candidate. Losing coverage bypasses everything except feasibility.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::environment::{ApId, RssSample, Technology};
use crate::netres::{rebalance_emergency, NetworkState};
use crate::planner::AttachmentPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Mobile-controlled: the terminal decides on what it measures.
    Mcho,
    /// Network-controlled: the network decides and enforces its load ceiling.
    Ncho,
    /// Mobile-assisted: terminal measurements plus the network load ceiling.
    Maho,
}

impl Strategy {
    pub fn uses_load(self) -> bool {
        self != Strategy::Mcho
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Mcho => "MCHO",
            Strategy::Ncho => "NCHO",
            Strategy::Maho => "MAHO",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MCHO" => Some(Strategy::Mcho),
            "NCHO" => Some(Strategy::Ncho),
            "MAHO" => Some(Strategy::Maho),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServiceKind {
    RealTime,
    NonRealTime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceClass {
    pub kind: ServiceKind,
    /// kb/s reserved on admission
    pub required_bw: f64,
    pub emergency: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("policy.{field}: violates `{constraint}`")]
pub struct PolicyError {
    pub field: &'static str,
    pub constraint: &'static str,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HandoffError {
    #[error("emergency rebalancing requested for a non-emergency service")]
    NotEmergency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandoffPolicy {
    /// dBm per technology
    pub rss_threshold: BTreeMap<Technology, f64>,
    /// dB
    pub hysteresis: f64,
    /// ms
    pub dwell: f64,
    pub beacons_realtime: u32,
    pub beacons_nonrealtime: u32,
    pub strategy: Strategy,
    pub load_ceiling: f64,
}

impl Default for HandoffPolicy {
    fn default() -> Self {
        HandoffPolicy {
            rss_threshold: Technology::ALL
                .iter()
                .map(|&t| (t, t.defaults().rss_threshold))
                .collect(),
            hysteresis: 4.0,
            dwell: 1000.0,
            beacons_realtime: 3,
            beacons_nonrealtime: 5,
            strategy: Strategy::Maho,
            load_ceiling: 0.9,
        }
    }
}

impl HandoffPolicy {
    pub fn threshold(&self, tech: Technology) -> f64 {
        self.rss_threshold
            .get(&tech)
            .copied()
            .unwrap_or_else(|| tech.defaults().rss_threshold)
    }

    pub fn beacons(&self, kind: ServiceKind) -> u32 {
        match kind {
            ServiceKind::RealTime => self.beacons_realtime,
            ServiceKind::NonRealTime => self.beacons_nonrealtime,
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        let err = |field, constraint| Err(PolicyError { field, constraint });
        if !(self.hysteresis >= 0.0 && self.hysteresis.is_finite()) {
            return err("hysteresis", "hysteresis ≥ 0");
        }
        if !(self.dwell >= 0.0 && self.dwell.is_finite()) {
            return err("dwell", "dwell ≥ 0");
        }
        if self.beacons_realtime > self.beacons_nonrealtime {
            return err("beacons_realtime", "beacons_realtime ≤ beacons_nonrealtime");
        }
        if !(0.0..=1.0).contains(&self.load_ceiling) {
            return err("load_ceiling", "load_ceiling ∈ [0, 1]");
        }
        if self.rss_threshold.values().any(|v| !v.is_finite()) {
            return err("rss_threshold", "thresholds are finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HandoffKind {
    Horizontal,
    Vertical,
}

impl HandoffKind {
    pub fn code(self) -> char {
        match self {
            HandoffKind::Horizontal => 'H',
            HandoffKind::Vertical => 'V',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    RssTrigger,
    LoadTrigger,
    PlanFollow,
    CoverageLoss,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::RssTrigger => "RssTrigger",
            Reason::LoadTrigger => "LoadTrigger",
            Reason::PlanFollow => "PlanFollow",
            Reason::CoverageLoss => "CoverageLoss",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HandoffDecision {
    Stay,
    /// The serving access point is gone and nothing feasible replaces it.
    Outage,
    Handoff {
        target: ApId,
        reason: Reason,
        kind: HandoffKind,
    },
}

pub fn classify(from: Technology, to: Technology) -> HandoffKind {
    if from == to {
        HandoffKind::Horizontal
    } else {
        HandoffKind::Vertical
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateState {
    pub consecutive_good_beacons: u32,
    /// ms the superiority predicate has held without interruption
    pub superior_since: f64,
    superior_start: Option<f64>,
    pub last_sample: Option<RssSample>,
}

/// Per-terminal decision memory: candidate counters plus the time of the
/// last handoff.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateStates {
    pub candidates: BTreeMap<ApId, CandidateState>,
    /// ms
    pub last_handoff: Option<f64>,
}

/// RSS-only part of the trigger: threshold, hysteresis and strict
/// superiority (an exact tie never wins).
fn rss_superior(policy: &HandoffPolicy, current: f64, candidate: &RssSample) -> bool {
    candidate.rss >= policy.threshold(candidate.tech)
        && candidate.rss >= current + policy.hysteresis
        && candidate.rss > current
}

impl CandidateStates {
    /// Fold one beacon round into the counters. `samples` holds every
    /// in-range access point; the serving one is identified by `attached`.
    pub fn observe(&mut self, policy: &HandoffPolicy, attached: Option<&ApId>, samples: &[RssSample], now_ms: f64) {
        let current = attached.and_then(|a| samples.iter().find(|s| &s.ap_id == a)).map(|s| s.rss);
        self.candidates
            .retain(|id, _| samples.iter().any(|s| &s.ap_id == id) && Some(id) != attached);
        for s in samples {
            if Some(&s.ap_id) == attached {
                continue;
            }
            let st = self.candidates.entry(s.ap_id.clone()).or_default();
            if s.rss >= policy.threshold(s.tech) {
                st.consecutive_good_beacons += 1;
            } else {
                st.consecutive_good_beacons = 0;
            }
            if current.is_some_and(|c| rss_superior(policy, c, s)) {
                let start = *st.superior_start.get_or_insert(now_ms);
                st.superior_since = now_ms - start;
            } else {
                st.superior_start = None;
                st.superior_since = 0.0;
            }
            st.last_sample = Some(s.clone());
        }
    }

    /// Forget every candidate; called after each attachment change.
    pub fn reset(&mut self, now_ms: f64, was_handoff: bool) {
        self.candidates.clear();
        if was_handoff {
            self.last_handoff = Some(now_ms);
        }
    }

    pub fn get(&self, id: &ApId) -> CandidateState {
        self.candidates.get(id).cloned().unwrap_or_default()
    }
}

pub fn trigger(
    policy: &HandoffPolicy,
    current: &RssSample,
    candidate: &RssSample,
    state: &CandidateState,
    service: &ServiceClass,
    candidate_load: f64,
) -> bool {
    rss_superior(policy, current.rss, candidate)
        && state.superior_since >= policy.dwell
        && state.consecutive_good_beacons >= policy.beacons(service.kind)
        && (!policy.strategy.uses_load() || candidate_load <= policy.load_ceiling)
}

/// Load and residual bandwidth as seen by the decision engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApLoad {
    pub load: f64,
    pub residual_bw: f64,
}

/// Everything [`decide`] reads. The function is pure in these inputs.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub policy: &'a HandoffPolicy,
    pub attached: &'a ApId,
    pub attached_tech: Technology,
    /// In-range access points only; the serving one is absent when its
    /// coverage is lost.
    pub samples: &'a [RssSample],
    pub states: &'a CandidateStates,
    pub plan: Option<&'a AttachmentPlan>,
    /// arclength, m
    pub position: f64,
    pub service: &'a ServiceClass,
    pub loads: &'a BTreeMap<ApId, ApLoad>,
    /// ms
    pub now: f64,
    /// Targets already refused this tick.
    pub excluded: &'a BTreeSet<ApId>,
}

impl DecisionContext<'_> {
    fn load(&self, id: &ApId) -> ApLoad {
        self.loads.get(id).copied().unwrap_or(ApLoad {
            load: 0.0,
            residual_bw: 0.0,
        })
    }

    fn candidates(&self) -> impl Iterator<Item = &RssSample> {
        self.samples
            .iter()
            .filter(|s| &s.ap_id != self.attached && !self.excluded.contains(&s.ap_id))
    }

    /// Highest RSS, then most residual bandwidth, then lowest id.
    fn best<'s>(&self, it: impl Iterator<Item = &'s RssSample>) -> Option<&'s RssSample> {
        it.min_by(|a, b| {
            b.rss
                .total_cmp(&a.rss)
                .then_with(|| self.load(&b.ap_id).residual_bw.total_cmp(&self.load(&a.ap_id).residual_bw))
                .then_with(|| a.ap_id.cmp(&b.ap_id))
        })
    }

    fn handoff(&self, target: &RssSample, reason: Reason) -> HandoffDecision {
        HandoffDecision::Handoff {
            target: target.ap_id.clone(),
            reason,
            kind: classify(self.attached_tech, target.tech),
        }
    }

    fn triggers(&self, current: &RssSample, cand: &RssSample) -> bool {
        trigger(
            self.policy,
            current,
            cand,
            &self.states.get(&cand.ap_id),
            self.service,
            self.load(&cand.ap_id).load,
        )
    }

    /// The access point the plan wants next, if it differs from the serving
    /// one.
    fn planned_target(&self) -> Option<ApId> {
        let plan = self.plan?;
        if let Some(w) = plan.window_index_at(self.position) {
            if &plan.segments[w].ap_id == self.attached {
                return Some(plan.segments[w + 1].ap_id.clone());
            }
        }
        let seg = &plan.segments[plan.segment_index_at(self.position).min(plan.segments.len() - 1)];
        (&seg.ap_id != self.attached).then(|| seg.ap_id.clone())
    }
}

/// One decision round; at most one handoff per call.
pub fn decide(ctx: &DecisionContext<'_>) -> HandoffDecision {
    let policy = ctx.policy;
    let Some(current) = ctx.samples.iter().find(|s| &s.ap_id == ctx.attached) else {
        let feasible = ctx
            .candidates()
            .filter(|s| !policy.strategy.uses_load() || ctx.load(&s.ap_id).load <= policy.load_ceiling);
        return match ctx.best(feasible) {
            Some(t) => ctx.handoff(t, Reason::CoverageLoss),
            None => HandoffDecision::Outage,
        };
    };

    let dwell_ok = ctx.states.last_handoff.is_none_or(|t| ctx.now - t >= policy.dwell);
    if policy.strategy.uses_load() && ctx.load(ctx.attached).load > policy.load_ceiling && dwell_ok {
        let ready = ctx.candidates().filter(|s| {
            s.rss >= policy.threshold(s.tech)
                && ctx.states.get(&s.ap_id).consecutive_good_beacons >= policy.beacons(ctx.service.kind)
                && ctx.load(&s.ap_id).load <= policy.load_ceiling
        });
        if let Some(t) = ctx.best(ready) {
            return ctx.handoff(t, Reason::LoadTrigger);
        }
    }

    let planned = ctx.planned_target();
    if let Some(p) = &planned {
        if let Some(cand) = ctx.candidates().find(|s| &s.ap_id == p) {
            if ctx.triggers(current, cand) {
                return ctx.handoff(cand, Reason::PlanFollow);
            }
        }
    }

    let others = ctx
        .candidates()
        .filter(|s| Some(&s.ap_id) != planned.as_ref() && ctx.triggers(current, s));
    match ctx.best(others) {
        Some(t) => ctx.handoff(t, Reason::RssTrigger),
        None => HandoffDecision::Stay,
    }
}

/// Ask the surrounding networks to absorb traffic so `target` can admit an
/// emergency flow. Returns whether admission would now succeed.
pub fn request_emergency(
    service: &ServiceClass,
    target: &mut NetworkState,
    neighbors: &mut [&mut NetworkState],
) -> Result<bool, HandoffError> {
    if !service.emergency {
        return Err(HandoffError::NotEmergency);
    }
    Ok(rebalance_emergency(target, neighbors, service.required_bw))
}
