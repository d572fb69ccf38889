//! Minimum-handover attachment planning over the coverage graph.
//!
//! Paths from `S` to `D` are ranked lexicographically:
//!
//! 1. fewest handovers,
//! 2. largest bottleneck residual bandwidth,
//! 3. highest mean of the per-interval mean RSS,
//! 4. smallest access-point id sequence.
//!
//! The bottleneck term does not decompose over prefixes, so the search runs
//! in three passes: minimum hop count, then the largest bandwidth threshold
//! that still admits a minimum-hop path, then an exact-length DP on the
//! thresholded DAG for the RSS sum and the id tie-break.

use std::cmp::Ordering;

use thiserror::Error;

use crate::environment::ApId;
use crate::topology::{CoverageGraph, CoverageInterval, NodeRef};

/// RSS sums closer than this are ties.
const RSS_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("coverage gap: arclength ({start:.3}, {end:.3}) m is not covered by any access point")]
    CoverageGap { start: f64, end: f64 },
    #[error("no overlap window long enough to hand off near arclength {at:.3} m")]
    NoHandoffWindow { at: f64 },
    #[error("graph node for {0} has no load annotation")]
    NotAnnotated(ApId),
    #[error("exhaustive oracle limited to 20 intervals, got {0}")]
    TooManyIntervals(usize),
}

/// The fixed lexicographic objective. It has no knobs; the type exists so
/// callers name what they optimize.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanObjective;

/// Score of one candidate path, ordered so that `Less` is better.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanScore {
    pub handovers: usize,
    pub min_residual_bw: f64,
    pub mean_rss: f64,
    pub ap_ids: Vec<ApId>,
}

impl PlanObjective {
    pub fn compare(&self, a: &PlanScore, b: &PlanScore) -> Ordering {
        a.handovers
            .cmp(&b.handovers)
            .then_with(|| b.min_residual_bw.total_cmp(&a.min_residual_bw))
            .then_with(|| {
                if (a.mean_rss - b.mean_rss).abs() <= RSS_TIE_EPS {
                    Ordering::Equal
                } else {
                    b.mean_rss.total_cmp(&a.mean_rss)
                }
            })
            .then_with(|| a.ap_ids.cmp(&b.ap_ids))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSegment {
    pub start: f64,
    pub end: f64,
    pub ap_id: ApId,
    /// Index of the graph node the segment was taken from.
    pub node: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentPlan {
    pub segments: Vec<PlanSegment>,
    /// One per adjacent segment pair.
    pub handoff_points: Vec<f64>,
    /// Overlap window each handoff point was placed in.
    pub windows: Vec<(f64, f64)>,
    pub score: PlanScore,
}

impl AttachmentPlan {
    pub fn handover_count(&self) -> usize {
        self.segments.len() - 1
    }

    /// Index of the segment holding arclength `s` (the later one at a
    /// handoff point).
    pub fn segment_index_at(&self, s: f64) -> usize {
        self.handoff_points.iter().take_while(|&&h| h <= s).count()
    }

    /// Index of the handoff window containing `s`, if any.
    pub fn window_index_at(&self, s: f64) -> Option<usize> {
        self.windows.iter().position(|&(a, b)| a <= s && s <= b)
    }

    /// Render as `start end ap_id tech` lines plus `handovers=<n>`.
    pub fn render(&self, tech_of: impl Fn(&ApId) -> String) -> String {
        let mut out = String::from("# format_version=1\n");
        for seg in &self.segments {
            out.push_str(&format!(
                "{:.3} {:.3} {} {}\n",
                seg.start,
                seg.end,
                seg.ap_id,
                tech_of(&seg.ap_id)
            ));
        }
        out.push_str(&format!("handovers={}\n", self.handover_count()));
        out
    }
}

/// Largest arclength interval covered by nobody, or the point where the
/// cover cannot be continued for lack of a long enough overlap.
pub fn diagnose_gap(intervals: &[CoverageInterval], length: f64, min_overlap: f64) -> PlanError {
    let mut sorted: Vec<&CoverageInterval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
    let mut reach = 0.0f64;
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |a: f64, b: f64| {
        if b > a && best.is_none_or(|(x, y)| b - a > y - x) {
            best = Some((a, b));
        }
    };
    for iv in &sorted {
        if iv.start > reach {
            consider(reach, iv.start);
        }
        reach = reach.max(iv.end);
    }
    if reach < length {
        consider(reach, length);
    }
    match best {
        Some((start, end)) => PlanError::CoverageGap { start, end },
        None => {
            let at = match greedy_cover(intervals, length, min_overlap) {
                Err(at) => at,
                Ok(_) => length,
            };
            PlanError::NoHandoffWindow { at }
        }
    }
}

fn residual(graph: &CoverageGraph, i: usize) -> Result<f64, PlanError> {
    let node = &graph.nodes[i];
    node.annotation
        .map(|a| a.residual_bw)
        .ok_or_else(|| PlanError::NotAnnotated(node.interval.ap_id.clone()))
}

/// Fewest nodes on an S->D path using only nodes allowed by `keep`.
fn min_nodes(graph: &CoverageGraph, keep: &[bool]) -> Option<usize> {
    let n = graph.nodes.len();
    // edges between intervals always go to a higher index
    let mut hops: Vec<Option<usize>> = vec![None; n];
    for e in graph.out_edges(NodeRef::Source) {
        if let NodeRef::Interval(j) = e.to {
            if keep[j] {
                hops[j] = Some(1);
            }
        }
    }
    let mut best = None;
    for i in 0..n {
        let Some(h) = hops[i] else { continue };
        for e in graph.out_edges(NodeRef::Interval(i)) {
            match e.to {
                NodeRef::Interval(j) if keep[j] => {
                    if hops[j].is_none_or(|x| h + 1 < x) {
                        hops[j] = Some(h + 1);
                    }
                }
                NodeRef::Dest => {
                    if best.is_none_or(|b| h < b) {
                        best = Some(h);
                    }
                }
                _ => {}
            }
        }
    }
    best
}

#[derive(Clone)]
struct Suffix {
    rss_sum: f64,
    ids: Vec<(ApId, u64)>,
    next: Option<usize>,
}

fn better_suffix(a: &Suffix, b: &Suffix) -> bool {
    if (a.rss_sum - b.rss_sum).abs() > RSS_TIE_EPS {
        return a.rss_sum > b.rss_sum;
    }
    a.ids < b.ids
}

/// Lexicographically optimal S->D attachment plan.
pub fn plan(graph: &CoverageGraph, objective: &PlanObjective) -> Result<AttachmentPlan, PlanError> {
    let _ = objective;
    let n = graph.nodes.len();
    let bws = (0..n).map(|i| residual(graph, i)).collect::<Result<Vec<_>, _>>()?;
    let intervals: Vec<CoverageInterval> = graph.nodes.iter().map(|n| n.interval.clone()).collect();

    let all = vec![true; n];
    let Some(h_star) = min_nodes(graph, &all) else {
        return Err(diagnose_gap(&intervals, graph.route_length, graph.min_overlap));
    };

    let mut thresholds = bws.clone();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut keep = all;
    for &b in &thresholds {
        let k: Vec<bool> = bws.iter().map(|&x| x >= b).collect();
        if min_nodes(graph, &k) == Some(h_star) {
            keep = k;
            break;
        }
    }

    // suffix[r][i]: best path from node i to D with exactly r nodes
    let mut suffix: Vec<Vec<Option<Suffix>>> = vec![vec![None; n]; h_star + 1];
    let key = |i: usize| {
        let iv = &graph.nodes[i].interval;
        (iv.ap_id.clone(), iv.start.to_bits())
    };
    for i in (0..n).rev() {
        if !keep[i] {
            continue;
        }
        let rss = graph.nodes[i].interval.mean_rss;
        if graph.edge(NodeRef::Interval(i), NodeRef::Dest).is_some() {
            suffix[1][i] = Some(Suffix {
                rss_sum: rss,
                ids: vec![key(i)],
                next: None,
            });
        }
        for r in 2..=h_star {
            let mut best: Option<Suffix> = None;
            for e in graph.out_edges(NodeRef::Interval(i)) {
                let NodeRef::Interval(j) = e.to else { continue };
                let Some(tail) = &suffix[r - 1][j] else { continue };
                let mut ids = Vec::with_capacity(r);
                ids.push(key(i));
                ids.extend(tail.ids.iter().cloned());
                let cand = Suffix {
                    rss_sum: rss + tail.rss_sum,
                    ids,
                    next: Some(j),
                };
                if best.as_ref().is_none_or(|b| better_suffix(&cand, b)) {
                    best = Some(cand);
                }
            }
            suffix[r][i] = best;
        }
    }

    let mut start: Option<(usize, &Suffix)> = None;
    for e in graph.out_edges(NodeRef::Source) {
        let NodeRef::Interval(i) = e.to else { continue };
        if let Some(s) = &suffix[h_star][i] {
            if start.is_none_or(|(_, b)| better_suffix(s, b)) {
                start = Some((i, s));
            }
        }
    }
    let (first, _) = start.expect("threshold pass guarantees a path of h* nodes");

    let mut path = vec![first];
    let mut r = h_star;
    while let Some(next) = suffix[r][*path.last().unwrap()].as_ref().and_then(|s| s.next) {
        path.push(next);
        r -= 1;
    }
    debug_assert_eq!(path.len(), h_star);

    let mut windows = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let e = graph
            .edge(NodeRef::Interval(w[0]), NodeRef::Interval(w[1]))
            .expect("consecutive plan nodes are adjacent");
        windows.push(e.window.expect("interval edges carry a window"));
    }
    let handoff_points: Vec<f64> = windows.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let mut segments = Vec::with_capacity(path.len());
    for (k, &i) in path.iter().enumerate() {
        segments.push(PlanSegment {
            start: if k == 0 { 0.0 } else { handoff_points[k - 1] },
            end: if k + 1 == path.len() {
                graph.route_length
            } else {
                handoff_points[k]
            },
            ap_id: graph.nodes[i].interval.ap_id.clone(),
            node: i,
        });
    }
    let score = PlanScore {
        handovers: path.len() - 1,
        min_residual_bw: path.iter().map(|&i| bws[i]).fold(f64::INFINITY, f64::min),
        mean_rss: path.iter().map(|&i| graph.nodes[i].interval.mean_rss).sum::<f64>() / path.len() as f64,
        ap_ids: path.iter().map(|&i| graph.nodes[i].interval.ap_id.clone()).collect(),
    };
    Ok(AttachmentPlan {
        segments,
        handoff_points,
        windows,
        score,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Every subset of intervals; at most 20 intervals.
    Exhaustive,
    /// Farthest-reach minimum interval cover sweep.
    Greedy,
}

fn chains(a: &CoverageInterval, b: &CoverageInterval, min_overlap: f64) -> bool {
    a.start < b.start && a.end.min(b.end) - b.start >= min_overlap
}

/// Farthest-reach sweep; `Err(frontier)` when it gets stuck.
fn greedy_cover(intervals: &[CoverageInterval], length: f64, min_overlap: f64) -> Result<usize, f64> {
    let eps = 1e-9;
    let first = intervals
        .iter()
        .filter(|c| c.start <= eps)
        .max_by(|a, b| a.end.total_cmp(&b.end));
    let Some(mut current) = first else {
        return Err(0.0);
    };
    let mut count = 1;
    while current.end < length - eps {
        let next = intervals
            .iter()
            .filter(|c| chains(current, c, min_overlap) && c.end > current.end)
            .max_by(|a, b| a.end.total_cmp(&b.end));
        match next {
            Some(n) => {
                current = n;
                count += 1;
            }
            None => return Err(current.end),
        }
    }
    Ok(count)
}

/// Minimum number of intervals chaining from arclength 0 to `length`,
/// computed without the coverage graph.
pub fn oracle_plan(
    intervals: &[CoverageInterval],
    length: f64,
    min_overlap: f64,
    mode: OracleMode,
) -> Result<usize, PlanError> {
    let result = match mode {
        OracleMode::Greedy => greedy_cover(intervals, length, min_overlap).ok(),
        OracleMode::Exhaustive => {
            if intervals.len() > 20 {
                return Err(PlanError::TooManyIntervals(intervals.len()));
            }
            let mut sorted: Vec<&CoverageInterval> = intervals.iter().collect();
            sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
            let mut best: Option<u32> = None;
            for mask in 1u32..(1u32 << sorted.len()) {
                let count = mask.count_ones();
                if best.is_some_and(|b| count >= b) {
                    continue;
                }
                let chosen: Vec<&CoverageInterval> = (0..sorted.len())
                    .filter(|k| mask & (1 << k) != 0)
                    .map(|k| sorted[k])
                    .collect();
                let ok = chosen[0].start <= 1e-9
                    && chosen.last().unwrap().end >= length - 1e-9
                    && chosen.windows(2).all(|w| chains(w[0], w[1], min_overlap));
                if ok {
                    best = Some(count);
                }
            }
            best.map(|b| b as usize)
        }
    };
    result.ok_or_else(|| diagnose_gap(intervals, length, min_overlap))
}
