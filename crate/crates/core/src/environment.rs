//! Geographic world: route, access points, obstacles and received signal
//! strength.
//!
//! Propagation is log-distance path loss referenced at 1 m:
//!
//! ```text
//! rss = tx_power - ref_loss - 10 n log10(max(d, 1)) - sum(obstacle loss) - shadowing
//! ```
//!
//! Coverage is always decided on the deterministic mean (no shadowing).

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("time {t} s outside route duration [0, {duration}] s")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("route needs at least 2 waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("consecutive waypoints {0} and {1} coincide")]
    DuplicateWaypoint(usize, usize),
    #[error("speed must be positive and finite, got {0}")]
    BadSpeed(f64),
    #[error("access point {id}: {constraint}")]
    AccessPoint { id: ApId, constraint: String },
    #[error("obstacle {index}: {constraint}")]
    Obstacle { index: usize, constraint: String },
}

/// Identifier of an access point or base station.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApId(pub String);

impl ApId {
    pub fn new(id: impl Into<String>) -> Self {
        ApId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ApId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ApId {
    fn from(s: &str) -> Self {
        ApId(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Radio access technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technology {
    Wlan,
    Umts,
    Wimax,
}

/// Per-technology defaults used when a scenario leaves a field unset.
///
/// These are implementer choices, not measured values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioDefaults {
    pub tx_power: f64,
    pub path_loss_exponent: f64,
    pub ref_loss: f64,
    pub sensitivity: f64,
    pub rss_threshold: f64,
    pub capacity_users: u32,
    pub capacity_bw: f64,
    pub user_rate_cap: f64,
    pub latency_ms: f64,
    pub scan_window_ms: (f64, f64),
}

impl Technology {
    pub const ALL: [Technology; 3] = [Technology::Wlan, Technology::Umts, Technology::Wimax];

    pub fn defaults(self) -> RadioDefaults {
        match self {
            Technology::Wlan => RadioDefaults {
                tx_power: 20.0,
                path_loss_exponent: 3.5,
                ref_loss: 40.0,
                sensitivity: -85.0,
                rss_threshold: -80.0,
                capacity_users: 30,
                capacity_bw: 11_000.0,
                user_rate_cap: 5_000.0,
                latency_ms: 5.0,
                scan_window_ms: (200.0, 400.0),
            },
            Technology::Umts => RadioDefaults {
                tx_power: 43.0,
                path_loss_exponent: 3.0,
                ref_loss: 34.0,
                sensitivity: -110.0,
                rss_threshold: -105.0,
                capacity_users: 85,
                capacity_bw: 2_000.0,
                user_rate_cap: 384.0,
                latency_ms: 60.0,
                scan_window_ms: (200.0, 400.0),
            },
            Technology::Wimax => RadioDefaults {
                tx_power: 43.0,
                path_loss_exponent: 2.8,
                ref_loss: 34.0,
                sensitivity: -100.0,
                rss_threshold: -95.0,
                capacity_users: 100,
                capacity_bw: 10_000.0,
                user_rate_cap: 2_000.0,
                latency_ms: 30.0,
                scan_window_ms: (200.0, 400.0),
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Technology::Wlan => "WLAN",
            Technology::Umts => "UMTS",
            Technology::Wimax => "WIMAX",
        }
    }

    pub fn parse(s: &str) -> Option<Technology> {
        match s.to_ascii_uppercase().as_str() {
            "WLAN" => Some(Technology::Wlan),
            "UMTS" => Some(Technology::Umts),
            "WIMAX" => Some(Technology::Wimax),
            _ => None,
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One radio attachment point.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub id: ApId,
    pub tech: Technology,
    pub position: Point,
    /// dBm
    pub tx_power: f64,
    pub path_loss_exponent: f64,
    /// dB at the 1 m reference distance
    pub ref_loss: f64,
    /// dBm; coverage edge
    pub sensitivity: f64,
    pub capacity_users: u32,
    /// kb/s
    pub capacity_bw: f64,
    /// Highest rate a single terminal may be served at, kb/s.
    pub user_rate_cap: f64,
    /// One-way network latency, ms.
    pub base_latency: f64,
    pub provider: String,
    /// Horizontal handoffs inside one subnet skip Mobile IP re-registration.
    pub subnet: String,
}

impl AccessPoint {
    /// Access point with every radio parameter taken from the technology
    /// defaults.
    pub fn new(id: impl Into<String>, tech: Technology, position: Point) -> Self {
        let d = tech.defaults();
        let id = ApId::new(id);
        AccessPoint {
            provider: id.0.clone(),
            subnet: id.0.clone(),
            id,
            tech,
            position,
            tx_power: d.tx_power,
            path_loss_exponent: d.path_loss_exponent,
            ref_loss: d.ref_loss,
            sensitivity: d.sensitivity,
            capacity_users: d.capacity_users,
            capacity_bw: d.capacity_bw,
            user_rate_cap: d.user_rate_cap,
            base_latency: d.latency_ms,
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let fail = |c: &str| {
            Err(EnvError::AccessPoint {
                id: self.id.clone(),
                constraint: c.to_owned(),
            })
        };
        let finite = [
            self.position.x,
            self.position.y,
            self.tx_power,
            self.ref_loss,
            self.sensitivity,
            self.capacity_bw,
            self.user_rate_cap,
            self.base_latency,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("all numeric fields must be finite");
        }
        if self.tx_power <= self.sensitivity + self.ref_loss {
            return fail("tx_power > sensitivity + ref_loss");
        }
        if self.capacity_users < 1 {
            return fail("capacity_users >= 1");
        }
        if self.capacity_bw <= 0.0 {
            return fail("capacity_bw > 0");
        }
        if self.user_rate_cap <= 0.0 {
            return fail("user_rate_cap > 0");
        }
        if self.base_latency < 0.0 {
            return fail("base_latency >= 0");
        }
        if !(1.5..=6.0).contains(&self.path_loss_exponent) {
            return fail("path_loss_exponent in [1.5, 6]");
        }
        Ok(())
    }

    /// Distance at which the unobstructed mean RSS equals the sensitivity.
    pub fn coverage_radius(&self) -> f64 {
        let margin = self.tx_power - self.ref_loss - self.sensitivity;
        10f64.powf(margin / (10.0 * self.path_loss_exponent))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Segment(Point, Point),
    /// Convex polygon, vertices in order (either orientation).
    Polygon(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub geometry: Geometry,
    /// dB
    pub penetration_loss: f64,
}

impl Obstacle {
    pub fn wall(a: Point, b: Point, loss: f64) -> Self {
        Obstacle {
            geometry: Geometry::Segment(a, b),
            penetration_loss: loss,
        }
    }

    pub fn validate(&self, index: usize) -> Result<(), EnvError> {
        let fail = |c: &str| {
            Err(EnvError::Obstacle {
                index,
                constraint: c.to_owned(),
            })
        };
        if !(self.penetration_loss >= 0.0 && self.penetration_loss.is_finite()) {
            return fail("penetration_loss >= 0");
        }
        match &self.geometry {
            Geometry::Segment(a, b) => {
                if a.distance(*b) == 0.0 {
                    return fail("segment endpoints must differ");
                }
            }
            Geometry::Polygon(pts) => {
                if pts.len() < 3 {
                    return fail("polygon needs at least 3 vertices");
                }
                let n = pts.len();
                let mut sign = 0.0f64;
                let mut area = 0.0;
                for i in 0..n {
                    let (a, b, c) = (pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
                    area += a.cross(b);
                    let turn = b.sub(a).cross(c.sub(b));
                    if turn != 0.0 {
                        if sign != 0.0 && turn.signum() != sign {
                            return fail("polygon must be convex");
                        }
                        sign = turn.signum();
                    }
                }
                if area.abs() == 0.0 {
                    return fail("polygon must have nonzero area");
                }
            }
        }
        Ok(())
    }

    /// True when the segment `a`-`b` touches or crosses the obstacle.
    pub fn blocks(&self, a: Point, b: Point) -> bool {
        match &self.geometry {
            Geometry::Segment(p, q) => segments_intersect(a, b, *p, *q),
            Geometry::Polygon(pts) => {
                if point_in_convex(pts, a) || point_in_convex(pts, b) {
                    return true;
                }
                let n = pts.len();
                (0..n).any(|i| segments_intersect(a, b, pts[i], pts[(i + 1) % n]))
            }
        }
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn point_in_convex(pts: &[Point], p: Point) -> bool {
    let n = pts.len();
    let mut sign = 0.0f64;
    for i in 0..n {
        let o = orient(pts[i], pts[(i + 1) % n], p);
        if o != 0.0 {
            if sign != 0.0 && o.signum() != sign {
                return false;
            }
            sign = o.signum();
        }
    }
    true
}

/// Polyline travelled at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    waypoints: Vec<Point>,
    speed: f64,
    /// cumulative[i] = arclength at waypoint i
    cumulative: Vec<f64>,
}

impl Route {
    pub fn new(waypoints: Vec<Point>, speed: f64) -> Result<Self, EnvError> {
        if waypoints.len() < 2 {
            return Err(EnvError::TooFewWaypoints(waypoints.len()));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(EnvError::BadSpeed(speed));
        }
        let mut cumulative = Vec::with_capacity(waypoints.len());
        cumulative.push(0.0);
        for (i, w) in waypoints.windows(2).enumerate() {
            let d = w[0].distance(w[1]);
            if d == 0.0 {
                return Err(EnvError::DuplicateWaypoint(i, i + 1));
            }
            cumulative.push(cumulative[i] + d);
        }
        Ok(Route {
            waypoints,
            speed,
            cumulative,
        })
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Total arclength in meters.
    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("route has waypoints")
    }

    /// Traversal time in seconds.
    pub fn duration(&self) -> f64 {
        self.length() / self.speed
    }

    /// Point at arclength `s`, clamped to the route ends.
    pub fn point_at_arclength(&self, s: f64) -> Point {
        let s = s.clamp(0.0, self.length());
        let seg = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).expect("finite arclength"))
        {
            Ok(i) => return self.waypoints[i],
            Err(i) => i - 1,
        };
        let (a, b) = (self.waypoints[seg], self.waypoints[seg + 1]);
        let frac = (s - self.cumulative[seg]) / (self.cumulative[seg + 1] - self.cumulative[seg]);
        Point::new(a.x + (b.x - a.x) * frac, a.y + (b.y - a.y) * frac)
    }

    pub fn position_at(&self, t: f64) -> Result<Point, EnvError> {
        let duration = self.duration();
        if !(0.0..=duration).contains(&t) {
            return Err(EnvError::TimeOutOfRange { t, duration });
        }
        Ok(self.point_at_arclength(self.speed * t))
    }
}

/// Received signal strength sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RssSample {
    pub ap_id: ApId,
    pub tech: Technology,
    /// s
    pub time: f64,
    /// arclength, m
    pub s: f64,
    /// dBm
    pub rss: f64,
}

/// Seeded log-normal shadowing.
///
/// Draws are a pure function of `(seed, stream, index)`, so the value for
/// a given access point and sample never depends on how many other draws
/// happened before it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shadowing {
    pub sigma_db: f64,
    pub seed: u64,
}

impl Shadowing {
    pub fn new(sigma_db: f64, seed: u64) -> Self {
        Shadowing { sigma_db, seed }
    }

    pub fn draw(&self, stream: u64, index: u64) -> f64 {
        if self.sigma_db == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(index) << 6);
        let z: f64 = StandardNormal.sample(&mut rng);
        z * self.sigma_db
    }
}

/// Sum of penetration losses of obstacles crossing the line of sight.
pub fn obstacle_loss(from: Point, to: Point, obstacles: &[Obstacle]) -> f64 {
    obstacles
        .iter()
        .filter(|o| o.blocks(from, to))
        .map(|o| o.penetration_loss)
        .sum()
}

/// RSS at `point`; `shadowing_db` is the (already drawn) shadowing term,
/// 0 when shadowing is disabled.
pub fn rss_at(ap: &AccessPoint, point: Point, obstacles: &[Obstacle], shadowing_db: f64) -> f64 {
    let d = ap.position.distance(point).max(1.0);
    ap.tx_power
        - ap.ref_loss
        - 10.0 * ap.path_loss_exponent * d.log10()
        - obstacle_loss(ap.position, point, obstacles)
        - shadowing_db
}

pub fn mean_rss(ap: &AccessPoint, point: Point, obstacles: &[Obstacle]) -> f64 {
    rss_at(ap, point, obstacles, 0.0)
}

pub fn in_coverage(ap: &AccessPoint, point: Point, obstacles: &[Obstacle]) -> bool {
    mean_rss(ap, point, obstacles) >= ap.sensitivity
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wlan_at(x: f64, y: f64) -> AccessPoint {
        AccessPoint::new("w", Technology::Wlan, Point::new(x, y))
    }

    #[test]
    fn position_at_endpoints_and_midpoint() {
        let r = Route::new(vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0)], 10.0).unwrap();
        assert_eq!(r.position_at(0.0).unwrap(), Point::new(0.0, 0.0));
        assert_eq!(r.position_at(10.0).unwrap(), Point::new(100.0, 0.0));
        assert_eq!(r.position_at(5.0).unwrap(), Point::new(50.0, 0.0));
        assert!(matches!(
            r.position_at(10.5),
            Err(EnvError::TimeOutOfRange { .. })
        ));
        assert!(r.position_at(-0.1).is_err());
    }

    #[test]
    fn multi_segment_route() {
        let r = Route::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(30.0, 40.0),
                Point::new(30.0, 0.0),
            ],
            5.0,
        )
        .unwrap();
        assert_eq!(r.length(), 90.0);
        assert_eq!(r.position_at(10.0).unwrap(), Point::new(30.0, 40.0));
        let p = r.position_at(14.0).unwrap();
        assert!((p.y - 20.0).abs() < 1e-12 && (p.x - 30.0).abs() < 1e-12);
        assert_eq!(r.position_at(r.duration()).unwrap(), Point::new(30.0, 0.0));
    }

    #[test]
    fn route_invariants() {
        assert_eq!(
            Route::new(vec![Point::new(0.0, 0.0)], 1.0),
            Err(EnvError::TooFewWaypoints(1))
        );
        assert!(matches!(
            Route::new(vec![Point::new(1.0, 1.0), Point::new(1.0, 1.0)], 1.0),
            Err(EnvError::DuplicateWaypoint(0, 1))
        ));
        assert!(Route::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn reference_distance() {
        let ap = wlan_at(0.0, 0.0);
        let v = rss_at(&ap, Point::new(1.0, 0.0), &[], 0.0);
        assert_eq!(v, ap.tx_power - ap.ref_loss);
        // inside 1 m the reference value holds
        assert_eq!(rss_at(&ap, Point::new(0.2, 0.0), &[], 0.0), v);
    }

    #[test]
    fn doubling_distance_with_exponent_3_5() {
        let ap = wlan_at(0.0, 0.0);
        let a = mean_rss(&ap, Point::new(20.0, 0.0), &[]);
        let b = mean_rss(&ap, Point::new(40.0, 0.0), &[]);
        // independent: 35 * log10(2) = 35 * ln 2 / ln 10
        let expected = -35.0 * std::f64::consts::LN_2 / std::f64::consts::LN_10;
        assert!((b - a - expected).abs() < 1e-12);
        assert!((expected + 10.536).abs() < 1e-3);
    }

    #[test]
    fn obstacle_is_additive() {
        let ap = wlan_at(0.0, 0.0);
        let p = Point::new(30.0, 0.0);
        let wall = Obstacle::wall(Point::new(10.0, -5.0), Point::new(10.0, 5.0), 20.0);
        let clear = mean_rss(&ap, p, &[]);
        let blocked = mean_rss(&ap, p, &[wall.clone()]);
        assert_eq!(clear - blocked, 20.0);
        // wall off to the side does nothing
        let side = Obstacle::wall(Point::new(10.0, 5.0), Point::new(10.0, 15.0), 20.0);
        assert_eq!(mean_rss(&ap, Point::new(30.0, -1.0), &[side]), mean_rss(&ap, Point::new(30.0, -1.0), &[]));
    }

    #[test]
    fn polygon_obstacle() {
        let ap = wlan_at(0.0, 0.0);
        let building = Obstacle {
            geometry: Geometry::Polygon(vec![
                Point::new(10.0, -2.0),
                Point::new(14.0, -2.0),
                Point::new(14.0, 2.0),
                Point::new(10.0, 2.0),
            ]),
            penetration_loss: 12.0,
        };
        building.validate(0).unwrap();
        let p = Point::new(30.0, 0.0);
        assert_eq!(mean_rss(&ap, p, &[]) - mean_rss(&ap, p, &[building.clone()]), 12.0);
        // endpoint inside the polygon
        assert!(building.blocks(ap.position, Point::new(12.0, 0.0)));
        assert!(!building.blocks(ap.position, Point::new(0.0, 30.0)));
    }

    #[test]
    fn obstacle_validation() {
        let bad = Obstacle::wall(Point::new(1.0, 1.0), Point::new(1.0, 1.0), 3.0);
        assert!(bad.validate(0).is_err());
        let neg = Obstacle::wall(Point::new(0.0, 0.0), Point::new(1.0, 1.0), -1.0);
        assert!(neg.validate(0).is_err());
        let concave = Obstacle {
            geometry: Geometry::Polygon(vec![
                Point::new(0.0, 0.0),
                Point::new(4.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 4.0),
            ]),
            penetration_loss: 1.0,
        };
        assert!(concave.validate(0).is_err());
    }

    #[test]
    fn coverage_edge_radius() {
        let ap = wlan_at(0.0, 0.0);
        // 20 - 40 - 35 log10 r = -85  =>  r = 10^(65/35)
        let r = 10f64.powf(65.0 / 35.0);
        assert!((r - 71.97).abs() < 0.01);
        assert!((ap.coverage_radius() - r).abs() < 1e-9);
        assert!(in_coverage(&ap, Point::new(71.0, 0.0), &[]));
        assert!(!in_coverage(&ap, Point::new(73.0, 0.0), &[]));
        assert!(in_coverage(&ap, ap.position, &[]));
        let wall = Obstacle::wall(Point::new(5.0, -1.0), Point::new(5.0, 1.0), 30.0);
        assert!(!in_coverage(&ap, Point::new(40.0, 0.0), &[wall]));
    }

    #[test]
    fn access_point_invariants() {
        let mut ap = wlan_at(0.0, 0.0);
        ap.validate().unwrap();
        ap.path_loss_exponent = 7.0;
        assert!(ap.validate().is_err());
        let mut ap = wlan_at(0.0, 0.0);
        ap.tx_power = -50.0;
        assert!(ap.validate().is_err());
        let mut ap = wlan_at(0.0, 0.0);
        ap.capacity_users = 0;
        assert!(ap.validate().is_err());
    }

    #[test]
    fn shadowing_is_keyed_and_repeatable() {
        let sh = Shadowing::new(3.0, 7);
        assert_eq!(sh.draw(1, 10), sh.draw(1, 10));
        assert_ne!(sh.draw(1, 10), sh.draw(2, 10));
        assert_ne!(sh.draw(1, 10), sh.draw(1, 11));
        assert_ne!(sh.draw(1, 10), Shadowing::new(3.0, 8).draw(1, 10));
        assert_eq!(Shadowing::new(0.0, 7).draw(1, 10), 0.0);
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|i| sh.draw(0, i)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((var.sqrt() - 3.0).abs() < 0.1, "sd {}", var.sqrt());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rss_strictly_decreasing(d1 in 1.0f64..5000.0, gap in 0.01f64..1000.0) {
                let ap = wlan_at(0.0, 0.0);
                let a = mean_rss(&ap, Point::new(d1, 0.0), &[]);
                let b = mean_rss(&ap, Point::new(d1 + gap, 0.0), &[]);
                prop_assert!(b < a);
            }

            #[test]
            fn obstacles_never_increase_rss(
                px in -100.0f64..100.0, py in -100.0f64..100.0,
                ax in -100.0f64..100.0, ay in -100.0f64..100.0,
                bx in -100.0f64..100.0, by in -100.0f64..100.0,
                loss in 0.0f64..40.0,
            ) {
                prop_assume!((ax, ay) != (bx, by));
                let ap = wlan_at(0.0, 0.0);
                let p = Point::new(px, py);
                let o = Obstacle::wall(Point::new(ax, ay), Point::new(bx, by), loss);
                prop_assert!(mean_rss(&ap, p, &[o]) <= mean_rss(&ap, p, &[]));
            }

            #[test]
            fn arclength_tracks_time(
                pts in proptest::collection::vec((-500.0f64..500.0, -500.0f64..500.0), 2..6),
                speed in 0.5f64..40.0,
                frac in 0.0f64..=1.0,
            ) {
                let wps: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
                prop_assume!(wps.windows(2).all(|w| w[0].distance(w[1]) > 1e-3));
                let route = Route::new(wps.clone(), speed).unwrap();
                let t = frac * route.duration();
                let p = route.position_at(t).unwrap();
                // arclength from start: walk the waypoints up to the segment holding p
                let target = speed * t;
                let mut walked = 0.0;
                let mut found = None;
                for w in wps.windows(2) {
                    let seg = w[0].distance(w[1]);
                    if walked + seg >= target - 1e-9 {
                        found = Some(walked + w[0].distance(p));
                        break;
                    }
                    walked += seg;
                }
                let s = found.unwrap_or(walked);
                prop_assert!((s - target).abs() <= 1e-9 * route.length().max(1.0));
            }
        }
    }
}
