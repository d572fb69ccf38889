//! Access network resource management: per-network load, admission
//! control, abstracted load indicators, average traffic and emergency
//! rebalancing.
//!
//! Load is the larger of the user ratio and the bandwidth ratio:
//! `max(attached_users / capacity_users, offered_load / capacity_bw)`.

use std::collections::VecDeque;
use std::fmt;

use crate::environment::{AccessPoint, ApId};
use crate::handoff::ServiceClass;

/// Default number of `(time, load)` samples kept per network.
pub const DEFAULT_HISTORY: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub id: String,
    /// 1 for a user flow, 0 for aggregate background bandwidth.
    pub users: u32,
    /// kb/s
    pub rate: f64,
    pub emergency: bool,
    /// Set for flows generated from a background load level.
    pub background: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub ap_id: ApId,
    pub capacity_users: u32,
    /// kb/s
    pub capacity_bw: f64,
    pub flows: Vec<Flow>,
    pub load_history: VecDeque<(f64, f64)>,
    pub history_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    UserCapacity,
    Bandwidth,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::UserCapacity => "UserCapacity",
            RejectReason::Bandwidth => "Bandwidth",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Accepted,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoadLevel {
    Low,
    Medium,
    High,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadIndicator {
    pub normalized: f64,
    pub level: LoadLevel,
}

impl LoadIndicator {
    pub fn from_normalized(normalized: f64) -> Self {
        let level = if normalized < 0.25 {
            LoadLevel::Low
        } else if normalized < 0.5 {
            LoadLevel::Medium
        } else if normalized < 0.9 {
            LoadLevel::High
        } else {
            LoadLevel::Critical
        };
        LoadIndicator { normalized, level }
    }
}

/// Result of [`average_traffic`]; `no_data` is set for an empty history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageTraffic {
    pub mean: f64,
    pub no_data: bool,
}

impl NetworkState {
    pub fn new(ap_id: ApId, capacity_users: u32, capacity_bw: f64) -> Self {
        NetworkState {
            ap_id,
            capacity_users,
            capacity_bw,
            flows: Vec::new(),
            load_history: VecDeque::new(),
            history_len: DEFAULT_HISTORY,
        }
    }

    pub fn for_ap(ap: &AccessPoint) -> Self {
        Self::new(ap.id.clone(), ap.capacity_users, ap.capacity_bw)
    }

    pub fn attached_users(&self) -> u32 {
        self.flows.iter().map(|f| f.users).sum()
    }

    /// kb/s
    pub fn offered_load(&self) -> f64 {
        self.flows.iter().map(|f| f.rate).sum()
    }

    pub fn load(&self) -> f64 {
        let users = f64::from(self.attached_users()) / f64::from(self.capacity_users);
        let bw = self.offered_load() / self.capacity_bw;
        users.max(bw).clamp(0.0, 1.0)
    }

    pub fn residual_bw(&self) -> f64 {
        (self.capacity_bw - self.offered_load()).max(0.0)
    }

    fn check(&self, users: u32, rate: f64) -> Admission {
        if self.attached_users() + users > self.capacity_users {
            Admission::Rejected(RejectReason::UserCapacity)
        } else if self.residual_bw() < rate {
            Admission::Rejected(RejectReason::Bandwidth)
        } else {
            Admission::Accepted
        }
    }

    /// Admit a flow for `service` under `flow_id`.
    pub fn admit(&mut self, flow_id: &str, service: &ServiceClass) -> Admission {
        let verdict = self.check(1, service.required_bw);
        if verdict == Admission::Accepted {
            self.flows.push(Flow {
                id: flow_id.to_owned(),
                users: 1,
                rate: service.required_bw,
                emergency: service.emergency,
                background: false,
            });
        }
        verdict
    }

    /// Remove the flow `flow_id`; returns it if it was present.
    pub fn release(&mut self, flow_id: &str) -> Option<Flow> {
        let pos = self.flows.iter().position(|f| f.id == flow_id)?;
        Some(self.flows.remove(pos))
    }

    /// Replace the background flows with `level` worth of load:
    /// `floor(level * capacity_users)` unit flows sharing
    /// `level * capacity_bw`, capped so the user count stays within
    /// capacity.
    pub fn set_background(&mut self, level: f64) {
        let level = level.clamp(0.0, 1.0);
        self.flows.retain(|f| !f.background);
        let foreground = self.attached_users();
        let wanted = (level * f64::from(self.capacity_users)).floor() as u32;
        let users = wanted.min(self.capacity_users.saturating_sub(foreground));
        let total = level * self.capacity_bw;
        if users == 0 {
            if total > 0.0 {
                self.flows.push(Flow {
                    id: format!("bg-{}-agg", self.ap_id),
                    users: 0,
                    rate: total,
                    emergency: false,
                    background: true,
                });
            }
            return;
        }
        let each = total / f64::from(users);
        for k in 0..users {
            self.flows.push(Flow {
                id: format!("bg-{}-{k}", self.ap_id),
                users: 1,
                rate: each,
                emergency: false,
                background: true,
            });
        }
    }

    pub fn record_load(&mut self, time: f64) {
        if self.load_history.len() == self.history_len.max(1) {
            self.load_history.pop_front();
        }
        self.load_history.push_back((time, self.load()));
    }
}

pub fn admit(state: &mut NetworkState, flow_id: &str, flow: &ServiceClass) -> Admission {
    state.admit(flow_id, flow)
}

pub fn load_indicator(state: &NetworkState) -> LoadIndicator {
    LoadIndicator::from_normalized(state.load())
}

/// Time-weighted mean load over the last `window` seconds of history.
///
/// Each sample holds until the next one; the newest sample is weighted by
/// the preceding sample spacing (or 1 s if it is the only one).
pub fn average_traffic(state: &NetworkState, window: f64) -> AverageTraffic {
    assert!(window > 0.0, "window must be positive");
    let h = &state.load_history;
    let Some(&(t_last, _)) = h.back() else {
        return AverageTraffic {
            mean: 0.0,
            no_data: true,
        };
    };
    let spacing = if h.len() >= 2 { t_last - h[h.len() - 2].0 } else { 1.0 };
    let end = t_last + spacing;
    let begin = end - window;
    let (mut weighted, mut total) = (0.0, 0.0);
    for (k, &(t, load)) in h.iter().enumerate() {
        let next = h.get(k + 1).map_or(end, |s| s.0);
        let a = t.max(begin);
        let b = next.min(end);
        if b > a {
            weighted += load * (b - a);
            total += b - a;
        }
    }
    AverageTraffic {
        mean: if total > 0.0 { weighted / total } else { h.back().unwrap().1 },
        no_data: false,
    }
}

/// Move non-emergency flows off `target` onto `neighbors` until `target`
/// could admit a new flow needing `required_bw`.
///
/// Flows move largest first, each to the neighbor with the most residual
/// bandwidth that can take it. All-or-nothing: on failure every network is
/// restored.
pub fn rebalance_emergency(
    target: &mut NetworkState,
    neighbors: &mut [&mut NetworkState],
    required_bw: f64,
) -> bool {
    assert!(required_bw > 0.0, "required bandwidth must be positive");
    let satisfied = |t: &NetworkState| {
        t.residual_bw() >= required_bw && t.attached_users() < t.capacity_users
    };
    if satisfied(target) {
        return true;
    }
    let saved_target = target.clone();
    let saved: Vec<NetworkState> = neighbors.iter().map(|n| (**n).clone()).collect();

    let mut candidates: Vec<Flow> = target.flows.iter().filter(|f| !f.emergency).cloned().collect();
    candidates.sort_by(|a, b| b.rate.total_cmp(&a.rate).then_with(|| a.id.cmp(&b.id)));
    for flow in candidates {
        if satisfied(target) {
            break;
        }
        let dest = neighbors
            .iter_mut()
            .filter(|n| n.check(flow.users, flow.rate) == Admission::Accepted)
            .max_by(|a, b| {
                a.residual_bw()
                    .total_cmp(&b.residual_bw())
                    .then_with(|| b.ap_id.cmp(&a.ap_id))
            });
        if let Some(dest) = dest {
            let moved = target.release(&flow.id).expect("candidate flow is on target");
            dest.flows.push(moved);
        }
    }
    if satisfied(target) {
        return true;
    }
    *target = saved_target;
    for (n, s) in neighbors.iter_mut().zip(saved) {
        **n = s;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handoff::ServiceKind;

    fn svc(bw: f64) -> ServiceClass {
        ServiceClass {
            kind: ServiceKind::RealTime,
            required_bw: bw,
            emergency: false,
        }
    }

    fn umts(id: &str) -> NetworkState {
        NetworkState::new(ApId::new(id), 85, 2000.0)
    }

    fn filled(id: &str, users: u32, rate_each: f64) -> NetworkState {
        let mut n = NetworkState::new(ApId::new(id), 85, 2000.0);
        for k in 0..users {
            n.flows.push(Flow {
                id: format!("{id}-{k}"),
                users: 1,
                rate: rate_each,
                emergency: false,
                background: false,
            });
        }
        n
    }

    #[test]
    fn user_capacity_rejects_86th() {
        let mut n = umts("cell");
        for k in 0..85 {
            assert_eq!(n.admit(&format!("u{k}"), &svc(1.0)), Admission::Accepted);
        }
        assert_eq!(n.admit("u85", &svc(1.0)), Admission::Rejected(RejectReason::UserCapacity));
        assert_eq!(n.attached_users(), 85);
    }

    #[test]
    fn admission_examples() {
        let mut n = umts("cell");
        assert_eq!(n.admit("t", &svc(60.0)), Admission::Accepted);
        let mut n = umts("cell");
        n.flows.push(Flow {
            id: "bg".into(),
            users: 0,
            rate: 1950.0,
            emergency: false,
            background: true,
        });
        assert_eq!(n.residual_bw(), 50.0);
        assert_eq!(n.admit("t", &svc(60.0)), Admission::Rejected(RejectReason::Bandwidth));
    }

    #[test]
    fn indicator_examples() {
        let n = umts("cell");
        assert_eq!(load_indicator(&n), LoadIndicator { normalized: 0.0, level: LoadLevel::Low });
        let n = filled("cell", 68, 0.0);
        let li = load_indicator(&n);
        assert!((li.normalized - 0.8).abs() < 1e-15);
        assert_eq!(li.level, LoadLevel::High);
        let n = filled("cell", 85, 0.0);
        assert_eq!(load_indicator(&n), LoadIndicator { normalized: 1.0, level: LoadLevel::Critical });
        assert_eq!(LoadIndicator::from_normalized(0.25).level, LoadLevel::Medium);
        assert_eq!(LoadIndicator::from_normalized(0.5).level, LoadLevel::High);
        assert_eq!(LoadIndicator::from_normalized(0.9).level, LoadLevel::Critical);
    }

    #[test]
    fn average_traffic_examples() {
        let mut n = umts("cell");
        assert_eq!(average_traffic(&n, 10.0), AverageTraffic { mean: 0.0, no_data: true });
        for t in 0..50 {
            n.load_history.push_back((t as f64 * 0.1, 0.5));
        }
        for w in [0.05, 1.0, 3.0, 100.0] {
            assert!((average_traffic(&n, w).mean - 0.5).abs() < 1e-12);
        }
        // half zero then half one: discrete sum oracle
        let mut n = umts("cell");
        let samples = 40;
        for k in 0..samples {
            n.load_history.push_back((k as f64, if k < samples / 2 { 0.0 } else { 1.0 }));
        }
        let oracle = (0..samples).map(|k| if k < samples / 2 { 0.0 } else { 1.0 }).sum::<f64>() / samples as f64;
        let got = average_traffic(&n, samples as f64).mean;
        assert!((got - oracle).abs() <= 1.0 / samples as f64, "{got}");
        assert!((got - 0.5).abs() <= 1.0 / samples as f64);
    }

    #[test]
    fn history_is_a_ring() {
        let mut n = umts("cell");
        n.history_len = 3;
        for t in 0..5 {
            n.record_load(t as f64);
        }
        assert_eq!(n.load_history.len(), 3);
        assert_eq!(n.load_history.front().unwrap().0, 2.0);
    }

    #[test]
    fn background_level_reproduces_load() {
        let mut n = umts("cell");
        n.set_background(0.3);
        assert!((n.load() - 0.3).abs() < 1e-12);
        assert_eq!(n.attached_users(), 25);
        n.set_background(0.001);
        assert!((n.load() - 0.001).abs() < 1e-12);
        n.admit("t", &svc(60.0));
        n.set_background(1.0);
        assert_eq!(n.attached_users(), 85);
        assert!(n.flows.iter().any(|f| f.id == "t"));
    }

    #[test]
    fn rebalance_with_spare_neighbor() {
        let mut target = filled("t", 10, 200.0);
        let mut spare = umts("n");
        let before: u32 = target.attached_users() + spare.attached_users();
        assert!(target.residual_bw() < 60.0);
        assert!(rebalance_emergency(&mut target, &mut [&mut spare], 60.0));
        assert!(target.residual_bw() >= 60.0);
        assert_eq!(target.attached_users() + spare.attached_users(), before);
        let total_rate = target.offered_load() + spare.offered_load();
        assert!((total_rate - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn rebalance_without_neighbors_is_noop() {
        let mut target = filled("t", 10, 200.0);
        let saved = target.clone();
        assert!(!rebalance_emergency(&mut target, &mut [], 60.0));
        assert_eq!(target, saved);
    }

    #[test]
    fn rebalance_rolls_back_partial_moves() {
        let mut target = filled("t", 10, 200.0);
        // neighbor can take a single 200 kb/s flow, not enough for 500 kb/s
        let mut n = filled("n", 0, 0.0);
        n.flows.push(Flow {
            id: "x".into(),
            users: 0,
            rate: 1750.0,
            emergency: false,
            background: true,
        });
        let (t0, n0) = (target.clone(), n.clone());
        assert!(!rebalance_emergency(&mut target, &mut [&mut n], 500.0));
        assert_eq!(target, t0);
        assert_eq!(n, n0);
    }

    #[test]
    fn emergency_flows_stay_put() {
        let mut target = filled("t", 0, 0.0);
        target.flows.push(Flow {
            id: "e".into(),
            users: 1,
            rate: 2000.0,
            emergency: true,
            background: false,
        });
        let mut n = umts("n");
        assert!(!rebalance_emergency(&mut target, &mut [&mut n], 60.0));
        assert_eq!(target.flows.len(), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn admit_release_round_trip(users in 0u32..85, bg in 0.0f64..0.9, bw in 1.0f64..100.0) {
                let mut n = filled("c", users, 1.0);
                n.set_background(bg);
                let before = n.clone();
                if n.admit("probe", &svc(bw)) == Admission::Accepted {
                    n.release("probe");
                }
                prop_assert_eq!(n, before);
            }

            #[test]
            fn load_monotone(users in 0u32..84, rate in 0.0f64..1900.0, extra in 0.0f64..100.0) {
                let mut n = filled("c", users, 0.0);
                n.flows.push(Flow { id: "r".into(), users: 0, rate, emergency: false, background: false });
                let base = load_indicator(&n).normalized;
                let mut more_users = n.clone();
                more_users.admit("u", &svc(0.0001));
                prop_assert!(load_indicator(&more_users).normalized >= base);
                let mut more_bw = n.clone();
                more_bw.flows.push(Flow { id: "b".into(), users: 0, rate: extra, emergency: false, background: false });
                prop_assert!(load_indicator(&more_bw).normalized >= base);
            }

            #[test]
            fn rebalance_conserves_users(
                t_users in 1u32..40, t_rate in 10.0f64..60.0,
                n_users in proptest::collection::vec((0u32..80, 0.0f64..20.0), 0..4),
                need in 1.0f64..600.0,
            ) {
                let mut target = filled("t", t_users, t_rate);
                let mut ns: Vec<NetworkState> = n_users.iter().enumerate()
                    .map(|(i, &(u, r))| filled(&format!("n{i}"), u, r)).collect();
                let before: u32 = target.attached_users() + ns.iter().map(|n| n.attached_users()).sum::<u32>();
                let snapshot = (target.clone(), ns.clone());
                let mut refs: Vec<&mut NetworkState> = ns.iter_mut().collect();
                let ok = rebalance_emergency(&mut target, &mut refs, need);
                let after: u32 = target.attached_users() + ns.iter().map(|n| n.attached_users()).sum::<u32>();
                prop_assert_eq!(before, after);
                for n in ns.iter().chain(std::iter::once(&target)) {
                    prop_assert!(n.attached_users() <= n.capacity_users);
                }
                if ok {
                    prop_assert!(target.residual_bw() >= need);
                } else {
                    prop_assert_eq!((target, ns), snapshot);
                }
            }
        }
    }
}
