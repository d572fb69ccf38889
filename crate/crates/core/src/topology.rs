//! Coverage intervals along the route and the acyclic coverage graph built
//! from them.
//!
//! Nodes are the source `S`, the destination `D`, and one node per coverage
//! interval ordered by `(start, ap_id)`. An edge `u -> v` exists when `v`
//! starts strictly after `u` and the two overlap by at least `min_overlap`
//! meters; ordering by start makes every path move forward, so the graph is
//! a DAG by construction.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::environment::{in_coverage, mean_rss, AccessPoint, ApId, Obstacle, Route};

/// Endpoint tolerance when matching intervals against `0` and `L`.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("discretization step must be positive, got {0}")]
    BadStep(f64),
    #[error("min_overlap must be positive, got {0}")]
    BadOverlap(f64),
    #[error("no load entry for access point {0}")]
    MissingLoad(ApId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageInterval {
    pub ap_id: ApId,
    /// arclength, m
    pub start: f64,
    pub end: f64,
    /// Mean of the deterministic RSS over the sample points of the run.
    pub mean_rss: f64,
}

impl CoverageInterval {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, s: f64) -> bool {
        self.start <= s && s <= self.end
    }
}

/// Sample points `0, step, 2 step, ..., L` (L always included).
pub fn discretize(length: f64, step: f64) -> Vec<f64> {
    let n = (length / step).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if let Some(&last) = pts.last() {
        if length - last > EDGE_EPS {
            pts.push(length);
        } else {
            *pts.last_mut().unwrap() = length;
        }
    }
    pts
}

/// Maximal runs of covered sample points for every access point.
///
/// Output is sorted by `(start, ap_id)`. Single-point runs have zero length
/// and are dropped.
pub fn coverage_intervals(
    route: &Route,
    aps: &[AccessPoint],
    obstacles: &[Obstacle],
    step: f64,
) -> Result<Vec<CoverageInterval>, TopologyError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(TopologyError::BadStep(step));
    }
    let samples = discretize(route.length(), step);
    let points: Vec<_> = samples.iter().map(|&s| route.point_at_arclength(s)).collect();
    let mut out = Vec::new();
    for ap in aps {
        let mut run: Option<(usize, f64)> = None;
        let close = |first: usize, last: usize, sum: f64, out: &mut Vec<CoverageInterval>| {
            if last > first {
                out.push(CoverageInterval {
                    ap_id: ap.id.clone(),
                    start: samples[first],
                    end: samples[last],
                    mean_rss: sum / (last - first + 1) as f64,
                });
            }
        };
        for (i, &p) in points.iter().enumerate() {
            if in_coverage(ap, p, obstacles) {
                let rss = mean_rss(ap, p, obstacles);
                run = Some(match run {
                    Some((first, sum)) => (first, sum + rss),
                    None => (i, rss),
                });
            } else if let Some((first, sum)) = run.take() {
                close(first, i - 1, sum, &mut out);
            }
        }
        if let Some((first, sum)) = run {
            close(first, points.len() - 1, sum, &mut out);
        }
    }
    out.sort_by(|a, b| a.start.total_cmp(&b.start).then_with(|| a.ap_id.cmp(&b.ap_id)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRef {
    Source,
    Interval(usize),
    Dest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub load: f64,
    /// kb/s
    pub residual_bw: f64,
    /// dBm
    pub mean_rss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub interval: CoverageInterval,
    pub annotation: Option<Annotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: NodeRef,
    pub to: NodeRef,
    /// Make-before-break window; `None` for edges touching `S` or `D`.
    pub window: Option<(f64, f64)>,
}

/// Load figures used to annotate graph nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadEntry {
    pub load: f64,
    pub capacity_bw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGraph {
    pub route_length: f64,
    pub min_overlap: f64,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
    adjacency: BTreeMap<NodeRef, Vec<usize>>,
}

impl CoverageGraph {
    pub fn node(&self, i: usize) -> &GraphNode {
        &self.nodes[i]
    }

    /// Outgoing edges of `n`, in insertion order (sorted by target).
    pub fn out_edges(&self, n: NodeRef) -> impl Iterator<Item = &Edge> {
        self.adjacency
            .get(&n)
            .into_iter()
            .flatten()
            .map(move |&e| &self.edges[e])
    }

    pub fn edge(&self, from: NodeRef, to: NodeRef) -> Option<&Edge> {
        self.out_edges(from).find(|e| e.to == to)
    }

    /// Kahn's algorithm; `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<NodeRef>> {
        let mut all = vec![NodeRef::Source, NodeRef::Dest];
        all.extend((0..self.nodes.len()).map(NodeRef::Interval));
        let mut indeg: BTreeMap<NodeRef, usize> = all.iter().map(|&n| (n, 0)).collect();
        for e in &self.edges {
            *indeg.get_mut(&e.to).unwrap() += 1;
        }
        let mut queue: VecDeque<NodeRef> =
            indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut order = Vec::with_capacity(all.len());
        while let Some(n) = queue.pop_front() {
            order.push(n);
            for e in self.out_edges(n) {
                let d = indeg.get_mut(&e.to).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(e.to);
                }
            }
        }
        (order.len() == all.len()).then_some(order)
    }

    /// Plain-text adjacency listing, one edge per line:
    /// `ap_a ap_b overlap_start overlap_end`. `S`/`D` stand for the
    /// source and destination.
    pub fn dump(&self) -> String {
        let mut out = String::from("# format_version=1\n");
        let name = |n: NodeRef| match n {
            NodeRef::Source => "S".to_owned(),
            NodeRef::Dest => "D".to_owned(),
            NodeRef::Interval(i) => self.nodes[i].interval.ap_id.to_string(),
        };
        for e in &self.edges {
            let (a, b) = e.window.unwrap_or(match e.to {
                NodeRef::Dest => (self.route_length, self.route_length),
                _ => (0.0, 0.0),
            });
            writeln!(out, "{} {} {:.3} {:.3}", name(e.from), name(e.to), a, b).unwrap();
        }
        out
    }
}

/// Overlap window of `u -> v`, if the ordering and overlap rules admit an
/// edge.
pub fn overlap_window(u: &CoverageInterval, v: &CoverageInterval, min_overlap: f64) -> Option<(f64, f64)> {
    if !(u.start < v.start && u.end > v.start) {
        return None;
    }
    let end = u.end.min(v.end);
    (end - v.start >= min_overlap).then_some((v.start, end))
}

pub fn build_graph(
    intervals: &[CoverageInterval],
    route_length: f64,
    min_overlap: f64,
) -> Result<CoverageGraph, TopologyError> {
    if !(min_overlap > 0.0 && min_overlap.is_finite()) {
        return Err(TopologyError::BadOverlap(min_overlap));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.start.total_cmp(&b.start).then_with(|| a.ap_id.cmp(&b.ap_id)));
    let mut edges = Vec::new();
    for (i, iv) in sorted.iter().enumerate() {
        if iv.start <= EDGE_EPS {
            edges.push(Edge {
                from: NodeRef::Source,
                to: NodeRef::Interval(i),
                window: None,
            });
        }
    }
    for (i, u) in sorted.iter().enumerate() {
        for (j, v) in sorted.iter().enumerate().skip(i + 1) {
            if let Some(w) = overlap_window(u, v, min_overlap) {
                edges.push(Edge {
                    from: NodeRef::Interval(i),
                    to: NodeRef::Interval(j),
                    window: Some(w),
                });
            }
        }
        if u.end >= route_length - EDGE_EPS {
            edges.push(Edge {
                from: NodeRef::Interval(i),
                to: NodeRef::Dest,
                window: None,
            });
        }
    }
    let mut adjacency: BTreeMap<NodeRef, Vec<usize>> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        adjacency.entry(e.from).or_default().push(k);
    }
    Ok(CoverageGraph {
        route_length,
        min_overlap,
        nodes: sorted
            .into_iter()
            .map(|interval| GraphNode {
                interval,
                annotation: None,
            })
            .collect(),
        edges,
        adjacency,
    })
}

/// Attach load, residual bandwidth and mean RSS to every node.
pub fn annotate(
    graph: &CoverageGraph,
    loads: &BTreeMap<ApId, LoadEntry>,
) -> Result<CoverageGraph, TopologyError> {
    let mut g = graph.clone();
    for node in &mut g.nodes {
        let entry = loads
            .get(&node.interval.ap_id)
            .ok_or_else(|| TopologyError::MissingLoad(node.interval.ap_id.clone()))?;
        let load = entry.load.clamp(0.0, 1.0);
        node.annotation = Some(Annotation {
            load,
            residual_bw: entry.capacity_bw * (1.0 - load),
            mean_rss: node.interval.mean_rss,
        });
    }
    Ok(g)
}
