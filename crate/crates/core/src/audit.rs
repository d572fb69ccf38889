//! Post-hoc checks on an event log, independent of the engine that
//! produced it.

use std::fmt;

use crate::environment::ApId;
use crate::handoff::Reason;
use crate::sim::{Event, EventLog};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TimeWentBack { index: usize, time: f64, previous: f64 },
    /// A handoff whose `from` is not the current attachment.
    WrongOrigin { index: usize, expected: Option<ApId>, found: ApId },
    AttachWhileAttached { index: usize },
    DetachMismatch { index: usize },
    /// Two non-coverage-loss handoffs closer than the dwell time.
    Dwell { index: usize, gap: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TimeWentBack { index, time, previous } => {
                write!(f, "event {index}: time {time} ms before previous {previous} ms")
            }
            Violation::WrongOrigin { index, expected, found } => {
                let e = expected.as_ref().map_or("nothing".to_owned(), |a| a.to_string());
                write!(f, "event {index}: handoff from {found} while attached to {e}")
            }
            Violation::AttachWhileAttached { index } => write!(f, "event {index}: attach while attached"),
            Violation::DetachMismatch { index } => write!(f, "event {index}: detach from a network not attached"),
            Violation::Dwell { index, gap } => write!(f, "event {index}: handoff {gap} ms after the previous one"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub handoffs: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check timestamp order, attachment continuity and dwell spacing.
pub fn audit(log: &EventLog, dwell_ms: f64) -> AuditReport {
    let mut report = AuditReport::default();
    let mut attached: Option<ApId> = None;
    let mut last_time = f64::NEG_INFINITY;
    let mut last_voluntary: Option<f64> = None;
    for (index, e) in log.events.iter().enumerate() {
        if e.time < last_time {
            report.violations.push(Violation::TimeWentBack {
                index,
                time: e.time,
                previous: last_time,
            });
        }
        last_time = last_time.max(e.time);
        match &e.event {
            Event::Attach { ap } => {
                if attached.is_some() {
                    report.violations.push(Violation::AttachWhileAttached { index });
                }
                attached = Some(ap.clone());
            }
            Event::Detach { ap } => {
                if attached.as_ref() != Some(ap) {
                    report.violations.push(Violation::DetachMismatch { index });
                }
                attached = None;
            }
            Event::Handoff { from, to, reason, .. } => {
                report.handoffs += 1;
                if attached.as_ref() != Some(from) {
                    report.violations.push(Violation::WrongOrigin {
                        index,
                        expected: attached.clone(),
                        found: from.clone(),
                    });
                }
                if *reason != Reason::CoverageLoss {
                    if let Some(prev) = last_voluntary {
                        let gap = e.time - prev;
                        if gap < dwell_ms - 1e-9 {
                            report.violations.push(Violation::Dwell { index, gap });
                        }
                    }
                    last_voluntary = Some(e.time);
                }
                attached = Some(to.clone());
            }
            _ => {}
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handoff::HandoffKind;
    use crate::sim::LoggedEvent;

    fn ev(time: f64, event: Event) -> LoggedEvent {
        LoggedEvent { time, event }
    }

    fn ho(time: f64, from: &str, to: &str, reason: Reason) -> LoggedEvent {
        ev(
            time,
            Event::Handoff {
                from: ApId::new(from),
                to: ApId::new(to),
                kind: HandoffKind::Horizontal,
                reason,
                delay: 0.0,
            },
        )
    }

    #[test]
    fn clean_log() {
        let log = EventLog {
            events: vec![
                ev(0.0, Event::Attach { ap: ApId::new("a") }),
                ho(2000.0, "a", "b", Reason::RssTrigger),
                ho(2100.0, "b", "c", Reason::CoverageLoss),
                ho(3000.0, "c", "d", Reason::PlanFollow),
            ],
        };
        let r = audit(&log, 1000.0);
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(r.handoffs, 3);
    }

    #[test]
    fn catches_each_violation() {
        let log = EventLog {
            events: vec![
                ev(0.0, Event::Attach { ap: ApId::new("a") }),
                ho(2000.0, "a", "b", Reason::RssTrigger),
                ho(2500.0, "b", "a", Reason::RssTrigger),
                ho(2400.0, "x", "b", Reason::CoverageLoss),
                ev(2600.0, Event::Attach { ap: ApId::new("c") }),
            ],
        };
        let r = audit(&log, 1000.0);
        assert!(matches!(r.violations[0], Violation::Dwell { index: 2, gap } if gap == 500.0));
        assert!(matches!(r.violations[1], Violation::TimeWentBack { index: 3, .. }));
        assert!(matches!(r.violations[2], Violation::WrongOrigin { index: 3, .. }));
        assert!(matches!(r.violations[3], Violation::AttachWhileAttached { index: 4 }));
    }
}
