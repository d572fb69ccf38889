//! Cost model for executing a handoff: link attach plus Mobile IP
//! signalling, tunnel encapsulation overhead, triangular routing, scan
//! interruptions and the receiver-side playout buffer.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::environment::Technology;

/// IP-in-IP encapsulation overhead per packet, bytes.
pub const TUNNEL_OVERHEAD_BYTES: f64 = 20.0;

/// RNG stream reserved for scan durations; shadowing uses one stream per
/// access point starting at 0.
pub const SCAN_STREAM: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExecError {
    #[error("exec.{field}: violates `{constraint}`")]
    Invalid {
        field: &'static str,
        constraint: &'static str,
    },
}

fn invalid<T>(field: &'static str, constraint: &'static str) -> Result<T, ExecError> {
    Err(ExecError::Invalid { field, constraint })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecLatencyModel {
    /// ms per technology
    pub l2_attach: BTreeMap<Technology, f64>,
    /// ms
    pub coa_config: f64,
    /// ms
    pub ha_registration_rtt: f64,
    /// Horizontal handoffs inside one subnet keep their care-of address.
    pub skip_same_subnet: bool,
}

impl Default for ExecLatencyModel {
    fn default() -> Self {
        ExecLatencyModel {
            l2_attach: Technology::ALL.iter().map(|&t| (t, 20.0)).collect(),
            coa_config: 30.0,
            ha_registration_rtt: 100.0,
            skip_same_subnet: true,
        }
    }
}

impl ExecLatencyModel {
    pub fn zero() -> Self {
        ExecLatencyModel {
            l2_attach: Technology::ALL.iter().map(|&t| (t, 0.0)).collect(),
            coa_config: 0.0,
            ha_registration_rtt: 0.0,
            skip_same_subnet: true,
        }
    }

    pub fn l2(&self, tech: Technology) -> f64 {
        self.l2_attach.get(&tech).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), ExecError> {
        if self.l2_attach.values().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return invalid("l2_attach", "l2_attach ≥ 0");
        }
        if !(self.coa_config >= 0.0 && self.coa_config.is_finite()) {
            return invalid("coa_config", "coa_config ≥ 0");
        }
        if !(self.ha_registration_rtt >= 0.0 && self.ha_registration_rtt.is_finite()) {
            return invalid("ha_registration_rtt", "ha_registration_rtt ≥ 0");
        }
        Ok(())
    }
}

/// Time from handoff decision until traffic flows on the new link, ms.
pub fn execution_delay(model: &ExecLatencyModel, from: Technology, to: Technology, same_subnet: bool) -> f64 {
    let l2 = model.l2(to);
    if from == to && same_subnet && model.skip_same_subnet {
        l2
    } else {
        l2 + model.coa_config + model.ha_registration_rtt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelRate {
    /// payload / (payload + overhead)
    pub fraction: f64,
    /// kb/s on the air for the given application rate
    pub on_wire: f64,
}

pub fn tunnel_goodput(app_rate: f64, payload: f64) -> Result<TunnelRate, ExecError> {
    if !(payload > 0.0 && payload.is_finite()) {
        return invalid("payload", "payload > 0");
    }
    let fraction = payload / (payload + TUNNEL_OVERHEAD_BYTES);
    Ok(TunnelRate {
        fraction,
        on_wire: app_rate / fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularDelay {
    pub downlink: f64,
    pub uplink: f64,
    pub asymmetry: f64,
}

/// Downlink goes correspondent → home agent → mobile; uplink goes direct.
pub fn triangular_delay(ch_to_ha: f64, ha_to_mh: f64, mh_to_ch: f64) -> Result<TriangularDelay, ExecError> {
    if ch_to_ha < 0.0 || ha_to_mh < 0.0 || mh_to_ch < 0.0 {
        return invalid("latency", "one-way delays ≥ 0");
    }
    let downlink = ch_to_ha + ha_to_mh;
    Ok(TriangularDelay {
        downlink,
        uplink: mh_to_ch,
        asymmetry: downlink - mh_to_ch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSchedule {
    /// ms between scan starts
    pub period: f64,
    /// ms bounds of a single scan
    pub min_duration: f64,
    pub max_duration: f64,
    pub interrupts_traffic: bool,
}

impl Default for ScanSchedule {
    fn default() -> Self {
        ScanSchedule {
            period: 5000.0,
            min_duration: 200.0,
            max_duration: 400.0,
            interrupts_traffic: true,
        }
    }
}

impl ScanSchedule {
    pub fn validate(&self) -> Result<(), ExecError> {
        if !(self.period > 0.0) {
            return invalid("scan_period", "scan_period > 0");
        }
        if !(self.min_duration >= 0.0 && self.min_duration <= self.max_duration) {
            return invalid("scan_min", "0 ≤ scan_min ≤ scan_max");
        }
        if self.max_duration >= self.period {
            return invalid("scan_max", "scan_max < scan_period");
        }
        Ok(())
    }

    /// Scan intervals `[start, end)` in ms starting before `horizon`.
    /// The first scan begins one period in.
    pub fn scans(&self, seed: u64, horizon: f64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SCAN_STREAM);
        let mut out = Vec::new();
        let mut start = self.period;
        while start < horizon {
            let d = if self.max_duration > self.min_duration {
                rng.random_range(self.min_duration..=self.max_duration)
            } else {
                self.min_duration
            };
            out.push((start, start + d));
            start += self.period;
        }
        out
    }
}

/// Receiver playout buffer, all quantities in ms of media.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferState {
    pub occupancy: f64,
    pub target: f64,
    /// kb/s
    pub playout_rate: f64,
    pub underruns: u32,
    /// False while the initial prebuffer fills.
    pub playing: bool,
    /// Extra playout per tick, as a fraction of the tick, allowed while
    /// occupancy sits above target.
    pub catchup: f64,
    pub arrived: f64,
    pub played: f64,
}

impl BufferState {
    /// Empty buffer that prebuffers up to `target` before playing.
    pub fn new(target: f64, playout_rate: f64) -> Self {
        BufferState {
            occupancy: 0.0,
            target,
            playout_rate,
            underruns: 0,
            playing: false,
            catchup: 0.0,
            arrived: 0.0,
            played: 0.0,
        }
    }

    /// Buffer already playing with `occupancy` ms queued.
    pub fn playing_with(target: f64, occupancy: f64, playout_rate: f64) -> Self {
        BufferState {
            occupancy,
            playing: true,
            arrived: occupancy,
            ..Self::new(target, playout_rate)
        }
    }

    /// Media in minus media out; zero in this model.
    pub fn dropped(&self) -> f64 {
        self.arrived - self.played - self.occupancy
    }

    /// Advance one tick; returns whether this tick underran.
    pub fn step(&mut self, arrived: f64, tick: f64) -> bool {
        self.arrived += arrived;
        let before = self.occupancy;
        if !self.playing {
            self.occupancy += arrived;
            if self.occupancy >= self.target {
                self.playing = true;
            }
            return false;
        }
        let underrun = before < tick;
        let mut play = tick.min(before);
        let surplus = before + arrived - tick - self.target;
        if surplus > 0.0 {
            play = (play + surplus.min(self.catchup * tick)).min(before + arrived);
        }
        self.played += play;
        self.occupancy = before - play + arrived;
        if underrun {
            self.underruns += 1;
        }
        underrun
    }
}

pub fn buffer_step(buffer: &BufferState, arrived: f64, tick: f64) -> BufferState {
    let mut next = buffer.clone();
    next.step(arrived, tick);
    next
}

/// Buffer target for the adaptive policy, ms.
pub fn adaptive_target(max_interruption: f64) -> f64 {
    (1.25 * max_interruption).clamp(100.0, 1000.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurstProfile {
    /// ms of media sent in each tick until the backlog is gone
    pub sends: Vec<f64>,
    /// ms
    pub duration: f64,
}

/// Drain of a sender backlog after an interruption while new media keeps
/// arriving at the nominal rate. Each tick may send `multiplier × tick`.
pub fn resume_burst(queued: f64, multiplier: f64, tick: f64) -> Result<BurstProfile, ExecError> {
    if !(multiplier > 1.0) {
        return invalid("drain_multiplier", "drain_multiplier > 1");
    }
    if !(tick > 0.0) {
        return invalid("tick", "tick > 0");
    }
    let mut q = queued.max(0.0);
    let mut sends = Vec::new();
    while q > 1e-9 {
        q += tick;
        let s = q.min(multiplier * tick);
        q -= s;
        sends.push(s);
    }
    let duration = if multiplier.is_infinite() {
        0.0
    } else {
        queued.max(0.0) / (multiplier - 1.0)
    };
    Ok(BurstProfile { sends, duration })
}
