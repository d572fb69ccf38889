//! Typed simulation inputs and their validation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::environment::{AccessPoint, ApId, Obstacle, Route};
use crate::execmodel::{ExecLatencyModel, ScanSchedule};
use crate::handoff::{HandoffPolicy, ServiceClass, ServiceKind};

/// A named field that breaks a stated constraint.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{field}: violates `{constraint}`")]
pub struct ScenarioError {
    pub field: String,
    pub constraint: String,
}

impl ScenarioError {
    pub fn new(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        ScenarioError {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceSpec {
    pub class: ServiceClass,
    /// kb/s of application media
    pub app_rate: f64,
    /// bytes per packet before encapsulation
    pub payload: f64,
}

impl Default for ServiceSpec {
    fn default() -> Self {
        ServiceSpec {
            class: ServiceClass {
                kind: ServiceKind::RealTime,
                required_bw: 60.0,
                emergency: false,
            },
            app_rate: 60.0,
            payload: 180.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecConfig {
    pub latency: ExecLatencyModel,
    pub scan: ScanSchedule,
    pub scanning: bool,
    /// ms
    pub buffer_target: f64,
    pub adaptive_buffer: bool,
    /// Peak send rate after an interruption, in multiples of the app rate.
    pub drain_multiplier: f64,
    /// ms of media the sender keeps before dropping the oldest
    pub max_queue: f64,
    /// Fraction of a tick the receiver may play extra when above target.
    pub catchup: f64,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            latency: ExecLatencyModel::default(),
            scan: ScanSchedule::default(),
            scanning: false,
            buffer_target: 500.0,
            adaptive_buffer: false,
            drain_multiplier: 2.0,
            max_queue: 2000.0,
            catchup: 0.5,
        }
    }
}

/// Linear background-load ramp on one network, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadRamp {
    pub ap: ApId,
    pub start: f64,
    pub end: f64,
    pub from: f64,
    pub to: f64,
}

impl LoadRamp {
    /// Level at `t` seconds, `None` before the ramp starts.
    pub fn level_at(&self, t: f64) -> Option<f64> {
        if t < self.start {
            None
        } else if t >= self.end {
            Some(self.to)
        } else {
            let f = (t - self.start) / (self.end - self.start);
            Some(self.from + f * (self.to - self.from))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// ms
    pub tick: f64,
    pub seed: u64,
    /// s
    pub duration_cap: Option<f64>,
    /// ms
    pub beacon_interval: f64,
    /// m, coverage discretization for the planner
    pub step: f64,
    /// m
    pub min_overlap: f64,
    /// s
    pub ping_pong_window: f64,
}

impl SimParams {
    pub fn with_seed(seed: u64) -> Self {
        SimParams {
            tick: 10.0,
            seed,
            duration_cap: None,
            beacon_interval: 100.0,
            step: 1.0,
            min_overlap: 5.0,
            ping_pong_window: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub route: Route,
    pub aps: Vec<AccessPoint>,
    pub obstacles: Vec<Obstacle>,
    /// dB, 0 disables shadowing
    pub shadowing_sigma: f64,
    pub policy: HandoffPolicy,
    /// Follow the precomputed attachment plan when one exists.
    pub use_plan: bool,
    pub service: ServiceSpec,
    pub exec: ExecConfig,
    /// Initial background load per network, in [0, 1].
    pub loads: BTreeMap<ApId, f64>,
    pub load_ramps: Vec<LoadRamp>,
    pub sim: SimParams,
}

impl ScenarioConfig {
    /// Scenario with default policy, service and execution model.
    pub fn new(name: impl Into<String>, route: Route, aps: Vec<AccessPoint>, seed: u64) -> Self {
        ScenarioConfig {
            name: name.into(),
            route,
            aps,
            obstacles: Vec::new(),
            shadowing_sigma: 0.0,
            policy: HandoffPolicy::default(),
            use_plan: true,
            service: ServiceSpec::default(),
            exec: ExecConfig::default(),
            loads: BTreeMap::new(),
            load_ramps: Vec::new(),
            sim: SimParams::with_seed(seed),
        }
    }

    pub fn ap(&self, id: &ApId) -> Option<&AccessPoint> {
        self.aps.iter().find(|a| &a.id == id)
    }

    /// Total simulated time, ms.
    pub fn horizon(&self) -> f64 {
        let full = self.route.duration() * 1000.0;
        match self.sim.duration_cap {
            Some(cap) => full.min(cap * 1000.0),
            None => full,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |f: &str, c: &str| Err(ScenarioError::new(f, c));
        if self.aps.is_empty() {
            return err("aps", "at least one access point");
        }
        for (i, ap) in self.aps.iter().enumerate() {
            if !valid_id(ap.id.as_str()) {
                return err(&format!("aps[{i}].id"), "id matches [A-Za-z0-9_.-]+");
            }
            if self.aps[..i].iter().any(|o| o.id == ap.id) {
                return err(&format!("aps[{}].id", ap.id), "ids are unique");
            }
            ap.validate()
                .map_err(|e| ScenarioError::new(format!("aps[{}]", ap.id), e.to_string()))?;
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate(i)
                .map_err(|e| ScenarioError::new(format!("obstacles[{i}]"), e.to_string()))?;
        }
        if !(self.shadowing_sigma >= 0.0 && self.shadowing_sigma.is_finite()) {
            return err("environment.shadowing_sigma", "shadowing_sigma ≥ 0");
        }
        self.policy
            .validate()
            .map_err(|e| ScenarioError::new(format!("policy.{}", e.field), e.constraint))?;
        let svc = &self.service;
        if !(svc.class.required_bw >= 0.0 && svc.class.required_bw.is_finite()) {
            return err("service.required_bw", "required_bw ≥ 0");
        }
        if !(svc.app_rate > 0.0 && svc.app_rate.is_finite()) {
            return err("service.app_rate", "app_rate > 0");
        }
        if !(svc.payload > 0.0 && svc.payload.is_finite()) {
            return err("service.payload", "payload > 0");
        }
        let ex = &self.exec;
        ex.latency
            .validate()
            .map_err(|e| ScenarioError::new("exec", e.to_string()))?;
        if ex.scanning {
            ex.scan
                .validate()
                .map_err(|e| ScenarioError::new("exec", e.to_string()))?;
        }
        if !(ex.buffer_target >= 0.0 && ex.buffer_target.is_finite()) {
            return err("exec.buffer_target", "buffer_target ≥ 0");
        }
        if !(ex.drain_multiplier > 1.0) {
            return err("exec.drain_multiplier", "drain_multiplier > 1");
        }
        if !(ex.max_queue >= 0.0) {
            return err("exec.max_queue", "max_queue ≥ 0");
        }
        if !(0.0..=1.0).contains(&ex.catchup) {
            return err("exec.catchup", "catchup ∈ [0, 1]");
        }
        for (id, level) in &self.loads {
            if self.ap(id).is_none() {
                return err(&format!("load.{id}"), "names a declared access point");
            }
            if !(0.0..=1.0).contains(level) {
                return err(&format!("load.{id}"), "load ∈ [0, 1]");
            }
        }
        for (i, r) in self.load_ramps.iter().enumerate() {
            let f = |k: &str| format!("load_ramp[{i}].{k}");
            if self.ap(&r.ap).is_none() {
                return err(&f("ap"), "names a declared access point");
            }
            if !(r.start >= 0.0 && r.end > r.start) {
                return err(&f("end"), "0 ≤ start < end");
            }
            if !(0.0..=1.0).contains(&r.from) || !(0.0..=1.0).contains(&r.to) {
                return err(&f("to"), "from, to ∈ [0, 1]");
            }
        }
        let s = &self.sim;
        if !(s.tick > 0.0 && s.tick.is_finite()) {
            return err("sim.tick", "tick > 0");
        }
        if !(s.beacon_interval >= s.tick) {
            return err("sim.beacon_interval", "beacon_interval ≥ tick");
        }
        if !(s.step > 0.0) {
            return err("sim.step", "step > 0");
        }
        if !(s.min_overlap >= 0.0) {
            return err("sim.min_overlap", "min_overlap ≥ 0");
        }
        if !(s.ping_pong_window > 0.0) {
            return err("sim.ping_pong_window", "ping_pong_window > 0");
        }
        if s.duration_cap.is_some_and(|c| !(c > 0.0)) {
            return err("sim.duration_cap", "duration_cap > 0");
        }
        Ok(())
    }
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Point, Technology};

    fn base() -> ScenarioConfig {
        let route = Route::new(vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0)], 1.0).unwrap();
        let ap = AccessPoint::new("w1", Technology::Wlan, Point::new(50.0, 0.0));
        ScenarioConfig::new("t", route, vec![ap], 1)
    }

    #[test]
    fn defaults_validate() {
        assert_eq!(base().validate(), Ok(()));
        assert_eq!(base().horizon(), 100_000.0);
    }

    #[test]
    fn rejections_name_field() {
        let mut s = base();
        s.policy.hysteresis = -1.0;
        let e = s.validate().unwrap_err();
        assert_eq!(e.field, "policy.hysteresis");
        assert_eq!(e.constraint, "hysteresis ≥ 0");

        let mut s = base();
        s.aps.clear();
        assert_eq!(s.validate().unwrap_err().field, "aps");

        let mut s = base();
        s.aps.push(s.aps[0].clone());
        assert!(s.validate().unwrap_err().constraint.contains("unique"));

        let mut s = base();
        s.loads.insert(ApId::new("nope"), 0.5);
        assert_eq!(s.validate().unwrap_err().field, "load.nope");

        let mut s = base();
        s.sim.tick = 0.0;
        assert_eq!(s.validate().unwrap_err().field, "sim.tick");
    }

    #[test]
    fn ramp_levels() {
        let r = LoadRamp {
            ap: ApId::new("w1"),
            start: 10.0,
            end: 60.0,
            from: 0.5,
            to: 1.0,
        };
        assert_eq!(r.level_at(5.0), None);
        assert_eq!(r.level_at(10.0), Some(0.5));
        assert_eq!(r.level_at(35.0), Some(0.75));
        assert_eq!(r.level_at(70.0), Some(1.0));
    }

    #[test]
    fn duration_cap_shortens_horizon() {
        let mut s = base();
        s.sim.duration_cap = Some(30.0);
        assert_eq!(s.horizon(), 30_000.0);
    }
}
