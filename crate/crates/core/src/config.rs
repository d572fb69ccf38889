//! Scenario file format.
//!
//! A sectioned `key = value` text format. Lines starting with `#` are
//! comments. Sections `[aps]`, `[obstacles]` and `[load_ramp]` may repeat;
//! every other section appears at most once. Keys before the first section
//! are file-level (`format_version`, `name`).
//!
//! ```text
//! format_version = 1
//!
//! [environment]
//! waypoints = 0,0; 1000,0
//! speed = 10
//!
//! [aps]
//! id = cell1
//! tech = UMTS
//! x = 500
//! y = 100
//!
//! [sim]
//! seed = 7
//! ```
//!
//! Unknown sections and keys are rejected with the closest known name.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::environment::{AccessPoint, ApId, Geometry, Obstacle, Point, Route, Technology};
use crate::handoff::{ServiceKind, Strategy};
use crate::scenario::{LoadRamp, ScenarioConfig, ScenarioError, ServiceSpec, SimParams};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {message}")]
    Missing { path: String, message: String },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}unknown key `{key}`{}", at_line(*line), hint(suggestion))]
    UnknownKey {
        key: String,
        suggestion: Option<String>,
        line: usize,
    },
    #[error("{}{error}", at_line(*line))]
    Semantic { error: ScenarioError, line: usize },
    #[error("{0}")]
    Usage(String),
}

fn at_line(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

fn hint(s: &Option<String>) -> String {
    s.as_ref()
        .map(|k| format!("; did you mean `{k}`?"))
        .unwrap_or_default()
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Missing { .. } => 2,
            ConfigError::Syntax { .. } => 3,
            ConfigError::UnknownKey { .. } | ConfigError::Semantic { .. } => 4,
            ConfigError::Usage(_) => 5,
        }
    }

    fn semantic(field: impl Into<String>, constraint: impl Into<String>, line: usize) -> Self {
        ConfigError::Semantic {
            error: ScenarioError::new(field, constraint),
            line,
        }
    }
}

impl From<ScenarioError> for ConfigError {
    fn from(error: ScenarioError) -> Self {
        ConfigError::Semantic { error, line: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// 0 for entries that came from an override
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    fn new(name: &str) -> Self {
        Section {
            name: name.to_owned(),
            line: 0,
            entries: Vec::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    fn set(&mut self, key: &str, value: &str) {
        match self.entries.iter_mut().rev().find(|e| e.key == key) {
            Some(e) => {
                e.value = value.to_owned();
                e.line = 0;
            }
            None => self.entries.push(Entry {
                key: key.to_owned(),
                value: value.to_owned(),
                line: 0,
            }),
        }
    }
}

/// Parsed but untyped scenario file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub header: Vec<Entry>,
    pub sections: Vec<Section>,
    /// Used when the file sets no `name`.
    pub default_name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    Bool,
    Text,
    Points,
}

const REPEATED: &[&str] = &["aps", "obstacles", "load_ramp"];

const SCHEMA: &[(&str, &[(&str, Kind)])] = {
    use Kind::*;
    &[
        (
            "environment",
            &[("waypoints", Points), ("speed", Float), ("shadowing_sigma", Float)],
        ),
        (
            "aps",
            &[
                ("id", Text),
                ("tech", Text),
                ("x", Float),
                ("y", Float),
                ("tx_power", Float),
                ("path_loss_exponent", Float),
                ("ref_loss", Float),
                ("sensitivity", Float),
                ("capacity_users", Int),
                ("capacity_bw", Float),
                ("user_rate_cap", Float),
                ("latency", Float),
                ("provider", Text),
                ("subnet", Text),
            ],
        ),
        ("obstacles", &[("segment", Points), ("polygon", Points), ("loss", Float)]),
        (
            "policy",
            &[
                ("hysteresis", Float),
                ("dwell", Float),
                ("beacons_realtime", Int),
                ("beacons_nonrealtime", Int),
                ("strategy", Text),
                ("load_ceiling", Float),
                ("threshold_wlan", Float),
                ("threshold_umts", Float),
                ("threshold_wimax", Float),
                ("use_plan", Bool),
            ],
        ),
        (
            "service",
            &[
                ("kind", Text),
                ("required_bw", Float),
                ("app_rate", Float),
                ("payload", Float),
                ("emergency", Bool),
            ],
        ),
        (
            "exec",
            &[
                ("l2_wlan", Float),
                ("l2_umts", Float),
                ("l2_wimax", Float),
                ("coa_config", Float),
                ("ha_registration_rtt", Float),
                ("skip_same_subnet", Bool),
                ("scanning", Bool),
                ("scan_period", Float),
                ("scan_min", Float),
                ("scan_max", Float),
                ("multi_radio", Bool),
                ("buffer_target", Float),
                ("adaptive_buffer", Bool),
                ("drain_multiplier", Float),
                ("max_queue", Float),
                ("catchup", Float),
            ],
        ),
        // keys are access point ids
        ("load", &[]),
        (
            "load_ramp",
            &[("ap", Text), ("start", Float), ("end", Float), ("from", Float), ("to", Float)],
        ),
        (
            "sim",
            &[
                ("tick", Float),
                ("seed", Int),
                ("duration_cap", Float),
                ("beacon_interval", Float),
                ("step", Float),
                ("min_overlap", Float),
                ("ping_pong_window", Float),
            ],
        ),
    ]
};

const HEADER_KEYS: &[&str] = &["format_version", "name"];

fn schema(section: &str) -> Option<&'static [(&'static str, Kind)]> {
    SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k)
}

fn all_keys() -> impl Iterator<Item = String> {
    SCHEMA
        .iter()
        .flat_map(|(s, keys)| keys.iter().map(move |(k, _)| format!("{s}.{k}")))
        .chain(HEADER_KEYS.iter().map(|k| k.to_string()))
}

/// Closest known name within edit distance 2.
fn suggest<I: IntoIterator<Item = String>>(wanted: &str, known: I) -> Option<String> {
    known
        .into_iter()
        .map(|k| (strsim::levenshtein(wanted, &k), k))
        .filter(|(d, _)| *d <= 2)
        .min()
        .map(|(_, k)| k)
}

pub fn parse_str(text: &str) -> Result<Document, ConfigError> {
    let mut doc = Document::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + trimmed.len() + 1,
                    message: "expected `]` to close the section header".into(),
                });
            };
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + 2,
                    message: format!("invalid section name `{name}`"),
                });
            }
            doc.sections.push(Section {
                name: name.to_owned(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(ConfigError::Syntax {
                line,
                column: indent + 1,
                message: "expected `key = value` or `[section]`".into(),
            });
        };
        let key = trimmed[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                column: indent + 1,
                message: "missing key before `=`".into(),
            });
        }
        if let Some(bad) = key.find(|c: char| c.is_whitespace()) {
            return Err(ConfigError::Syntax {
                line,
                column: indent + bad + 1,
                message: format!("whitespace inside key `{key}`"),
            });
        }
        let mut value = trimmed[eq + 1..].trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        let entry = Entry {
            key: key.to_owned(),
            value: value.to_owned(),
            line,
        };
        match doc.sections.last_mut() {
            Some(s) => s.entries.push(entry),
            None => doc.header.push(entry),
        }
    }
    Ok(doc)
}

pub fn parse_file(path: &Path) -> Result<Document, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Missing {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut doc = parse_str(&text)?;
    doc.default_name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Ok(doc)
}

/// Parse, apply `key=value` overrides, type and validate.
pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut doc = parse_file(path)?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    to_scenario(&doc)
}

fn split_override(input: &str) -> Result<(&str, &str), ConfigError> {
    input.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| ConfigError::Usage(format!("override `{input}` is not of the form key=value")))
}

/// Apply one `key=value` override. Keys are dotted: `section.key`,
/// `aps.<id>.key`, `obstacles.<index>.key`, `load_ramp.<index>.key` or
/// `load.<ap>`; a bare file-level key such as `name` is also accepted.
pub fn apply_override(doc: &mut Document, input: &str) -> Result<(), ConfigError> {
    let (key, value) = split_override(input)?;
    set_value(doc, key, value)
}

pub fn set_value(doc: &mut Document, key: &str, value: &str) -> Result<(), ConfigError> {
    let unknown = || ConfigError::UnknownKey {
        key: key.to_owned(),
        suggestion: suggest(key, all_keys()),
        line: 0,
    };
    let parts: Vec<&str> = key.split('.').collect();
    match parts.as_slice() {
        [k] if HEADER_KEYS.contains(k) => {
            match doc.header.iter_mut().find(|e| e.key == *k) {
                Some(e) => e.value = value.to_owned(),
                None => doc.header.push(Entry {
                    key: k.to_string(),
                    value: value.to_owned(),
                    line: 0,
                }),
            }
            Ok(())
        }
        ["aps", id, k] => {
            let sec = doc
                .sections
                .iter_mut()
                .filter(|s| s.name == "aps")
                .find(|s| s.get("id").is_some_and(|e| e.value == *id))
                .ok_or_else(|| ConfigError::semantic(format!("aps.{id}"), "names a declared access point", 0))?;
            sec.set(k, value);
            Ok(())
        }
        [sec @ ("obstacles" | "load_ramp"), idx, k] => {
            let i: usize = idx.parse().map_err(|_| unknown())?;
            let s = doc
                .sections
                .iter_mut()
                .filter(|s| s.name == *sec)
                .nth(i)
                .ok_or_else(|| ConfigError::semantic(format!("{sec}.{i}"), "index of an existing section", 0))?;
            s.set(k, value);
            Ok(())
        }
        [sec, k] if schema(sec).is_some() && !REPEATED.contains(sec) => {
            match doc.sections.iter_mut().find(|s| s.name == *sec) {
                Some(s) => s.set(k, value),
                None => {
                    let mut s = Section::new(sec);
                    s.set(k, value);
                    doc.sections.push(s);
                }
            }
            Ok(())
        }
        _ => Err(unknown()),
    }
}

/// Whether `key` addresses a numeric field, as required by sweeps.
pub fn is_numeric_key(key: &str) -> bool {
    let parts: Vec<&str> = key.split('.').collect();
    let (sec, k) = match parts.as_slice() {
        ["load", _] => return true,
        [sec, k] => (*sec, *k),
        [sec, _, k] => (*sec, *k),
        _ => return false,
    };
    schema(sec)
        .and_then(|keys| keys.iter().find(|(n, _)| *n == k))
        .is_some_and(|(_, kind)| matches!(kind, Kind::Float | Kind::Int))
}

struct View<'a> {
    section: &'a Section,
    label: String,
}

impl<'a> View<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.section.get(key)
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.label)
    }

    fn bad(&self, e: &Entry, expected: &str) -> ConfigError {
        ConfigError::semantic(self.field(&e.key), format!("expected {expected}, got `{}`", e.value), e.line)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.entry(key)
            .map(|e| {
                e.value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.bad(e, "a number"))
            })
            .transpose()
    }

    fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.entry(key)
            .map(|e| e.value.parse::<u64>().map_err(|_| self.bad(e, "a non-negative integer")))
            .transpose()
    }

    fn u32(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        self.entry(key)
            .map(|e| e.value.parse::<u32>().map_err(|_| self.bad(e, "a non-negative integer")))
            .transpose()
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.entry(key)
            .map(|e| match e.value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(self.bad(e, "true or false")),
            })
            .transpose()
    }

    fn text(&self, key: &str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn points(&self, key: &str) -> Result<Option<Vec<Point>>, ConfigError> {
        self.entry(key)
            .map(|e| parse_points(&e.value).ok_or_else(|| self.bad(e, "points `x,y; x,y; ...`")))
            .transpose()
    }

    fn required<T>(&self, key: &str, v: Option<T>) -> Result<T, ConfigError> {
        v.ok_or_else(|| ConfigError::semantic(self.field(key), "required", self.section.line))
    }

    fn set_f64(&self, key: &str, slot: &mut f64) -> Result<(), ConfigError> {
        if let Some(v) = self.f64(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn set_bool(&self, key: &str, slot: &mut bool) -> Result<(), ConfigError> {
        if let Some(v) = self.bool(key)? {
            *slot = v;
        }
        Ok(())
    }
}

pub fn parse_points(s: &str) -> Option<Vec<Point>> {
    s.split(';')
        .map(|p| {
            let (x, y) = p.split_once(',')?;
            let x: f64 = x.trim().parse().ok()?;
            let y: f64 = y.trim().parse().ok()?;
            (x.is_finite() && y.is_finite()).then_some(Point::new(x, y))
        })
        .collect()
}

fn check_keys(doc: &Document) -> Result<(), ConfigError> {
    for e in &doc.header {
        if !HEADER_KEYS.contains(&e.key.as_str()) {
            return Err(ConfigError::UnknownKey {
                key: e.key.clone(),
                suggestion: suggest(&e.key, all_keys()),
                line: e.line,
            });
        }
    }
    let mut seen = Vec::new();
    for s in &doc.sections {
        let Some(keys) = schema(&s.name) else {
            let first = s.entries.first().map(|e| e.key.as_str()).unwrap_or("");
            let wanted = format!("{}.{first}", s.name);
            let suggestion = suggest(&wanted, all_keys()).or_else(|| {
                suggest(&s.name, SCHEMA.iter().map(|(n, _)| n.to_string())).map(|n| format!("[{n}]"))
            });
            return Err(ConfigError::UnknownKey {
                key: if first.is_empty() { format!("[{}]", s.name) } else { wanted },
                suggestion,
                line: s.entries.first().map_or(s.line, |e| e.line),
            });
        };
        if !REPEATED.contains(&s.name.as_str()) {
            if seen.contains(&s.name) {
                return Err(ConfigError::semantic(format!("[{}]", s.name), "section appears at most once", s.line));
            }
            seen.push(s.name.clone());
        }
        if s.name == "load" {
            continue;
        }
        for e in &s.entries {
            if !keys.iter().any(|(k, _)| *k == e.key) {
                let wanted = format!("{}.{}", s.name, e.key);
                return Err(ConfigError::UnknownKey {
                    suggestion: suggest(&wanted, all_keys()),
                    key: wanted,
                    line: e.line,
                });
            }
        }
    }
    Ok(())
}

fn section<'a>(doc: &'a Document, name: &str) -> Option<View<'a>> {
    doc.sections.iter().find(|s| s.name == name).map(|s| View {
        section: s,
        label: name.to_owned(),
    })
}

fn sections<'a>(doc: &'a Document, name: &'a str) -> impl Iterator<Item = &'a Section> {
    doc.sections.iter().filter(move |s| s.name == name)
}

/// Type a parsed document into a validated scenario.
pub fn to_scenario(doc: &Document) -> Result<ScenarioConfig, ConfigError> {
    check_keys(doc)?;
    if let Some(e) = doc.header.iter().find(|e| e.key == "format_version") {
        if e.value.parse::<u32>() != Ok(FORMAT_VERSION) {
            return Err(ConfigError::semantic(
                "format_version",
                format!("format_version = {FORMAT_VERSION}"),
                e.line,
            ));
        }
    }
    let name = doc
        .header
        .iter()
        .find(|e| e.key == "name")
        .map(|e| e.value.clone())
        .or_else(|| doc.default_name.clone())
        .unwrap_or_else(|| "scenario".into());

    let env = section(doc, "environment")
        .ok_or_else(|| ConfigError::semantic("environment", "required section", 0))?;
    let waypoints = env.required("waypoints", env.points("waypoints")?)?;
    let speed = env.f64("speed")?.unwrap_or(1.0);
    let route = Route::new(waypoints, speed)
        .map_err(|e| ConfigError::semantic("environment.waypoints", e.to_string(), env.section.line))?;
    let shadowing_sigma = env.f64("shadowing_sigma")?.unwrap_or(0.0);

    let mut aps = Vec::new();
    for (i, s) in sections(doc, "aps").enumerate() {
        let label = s
            .get("id")
            .map(|e| format!("aps.{}", e.value))
            .unwrap_or_else(|| format!("aps[{i}]"));
        let v = View { section: s, label };
        aps.push(access_point(&v)?);
    }

    let mut obstacles = Vec::new();
    for (i, s) in sections(doc, "obstacles").enumerate() {
        let v = View {
            section: s,
            label: format!("obstacles.{i}"),
        };
        let geometry = match (v.points("segment")?, v.points("polygon")?) {
            (Some(p), None) if p.len() == 2 => Geometry::Segment(p[0], p[1]),
            (Some(_), None) => {
                return Err(ConfigError::semantic(v.field("segment"), "exactly two points", s.line))
            }
            (None, Some(p)) => Geometry::Polygon(p),
            _ => {
                return Err(ConfigError::semantic(
                    v.field("segment"),
                    "exactly one of segment or polygon",
                    s.line,
                ))
            }
        };
        let penetration_loss = v.required("loss", v.f64("loss")?)?;
        obstacles.push(Obstacle {
            geometry,
            penetration_loss,
        });
    }

    let seed_view = section(doc, "sim");
    let seed = match &seed_view {
        Some(v) => v.u64("seed")?,
        None => None,
    }
    .ok_or_else(|| ConfigError::semantic("sim.seed", "required (no implicit seed)", 0))?;

    let mut sc = ScenarioConfig::new(name, route, aps, seed);
    sc.obstacles = obstacles;
    sc.shadowing_sigma = shadowing_sigma;

    if let Some(v) = section(doc, "policy") {
        let p = &mut sc.policy;
        v.set_f64("hysteresis", &mut p.hysteresis)?;
        v.set_f64("dwell", &mut p.dwell)?;
        if let Some(n) = v.u32("beacons_realtime")? {
            p.beacons_realtime = n;
        }
        if let Some(n) = v.u32("beacons_nonrealtime")? {
            p.beacons_nonrealtime = n;
        }
        if let Some(s) = v.text("strategy") {
            p.strategy = Strategy::parse(s).ok_or_else(|| v.bad(v.entry("strategy").unwrap(), "MCHO, NCHO or MAHO"))?;
        }
        v.set_f64("load_ceiling", &mut p.load_ceiling)?;
        for (key, tech) in [
            ("threshold_wlan", Technology::Wlan),
            ("threshold_umts", Technology::Umts),
            ("threshold_wimax", Technology::Wimax),
        ] {
            if let Some(t) = v.f64(key)? {
                p.rss_threshold.insert(tech, t);
            }
        }
        v.set_bool("use_plan", &mut sc.use_plan)?;
    }

    if let Some(v) = section(doc, "service") {
        let s: &mut ServiceSpec = &mut sc.service;
        if let Some(k) = v.text("kind") {
            s.class.kind = match k.to_ascii_lowercase().as_str() {
                "realtime" | "real_time" | "rt" => ServiceKind::RealTime,
                "nonrealtime" | "non_realtime" | "nrt" => ServiceKind::NonRealTime,
                _ => return Err(v.bad(v.entry("kind").unwrap(), "realtime or nonrealtime")),
            };
        }
        v.set_f64("required_bw", &mut s.class.required_bw)?;
        v.set_f64("app_rate", &mut s.app_rate)?;
        v.set_f64("payload", &mut s.payload)?;
        v.set_bool("emergency", &mut s.class.emergency)?;
    }

    if let Some(v) = section(doc, "exec") {
        let x = &mut sc.exec;
        for (key, tech) in [
            ("l2_wlan", Technology::Wlan),
            ("l2_umts", Technology::Umts),
            ("l2_wimax", Technology::Wimax),
        ] {
            if let Some(t) = v.f64(key)? {
                x.latency.l2_attach.insert(tech, t);
            }
        }
        v.set_f64("coa_config", &mut x.latency.coa_config)?;
        v.set_f64("ha_registration_rtt", &mut x.latency.ha_registration_rtt)?;
        v.set_bool("skip_same_subnet", &mut x.latency.skip_same_subnet)?;
        v.set_bool("scanning", &mut x.scanning)?;
        v.set_f64("scan_period", &mut x.scan.period)?;
        v.set_f64("scan_min", &mut x.scan.min_duration)?;
        v.set_f64("scan_max", &mut x.scan.max_duration)?;
        if let Some(m) = v.bool("multi_radio")? {
            x.scan.interrupts_traffic = !m;
        }
        v.set_f64("buffer_target", &mut x.buffer_target)?;
        v.set_bool("adaptive_buffer", &mut x.adaptive_buffer)?;
        v.set_f64("drain_multiplier", &mut x.drain_multiplier)?;
        v.set_f64("max_queue", &mut x.max_queue)?;
        v.set_f64("catchup", &mut x.catchup)?;
    }

    if let Some(v) = section(doc, "load") {
        let mut loads = BTreeMap::new();
        for e in &v.section.entries {
            let level = v.f64(&e.key)?.unwrap_or_default();
            loads.insert(ApId::new(e.key.clone()), level);
        }
        sc.loads = loads;
    }

    for (i, s) in sections(doc, "load_ramp").enumerate() {
        let v = View {
            section: s,
            label: format!("load_ramp.{i}"),
        };
        sc.load_ramps.push(LoadRamp {
            ap: ApId::new(v.required("ap", v.text("ap"))?),
            start: v.required("start", v.f64("start")?)?,
            end: v.required("end", v.f64("end")?)?,
            from: v.required("from", v.f64("from")?)?,
            to: v.required("to", v.f64("to")?)?,
        });
    }

    if let Some(v) = seed_view {
        let p: &mut SimParams = &mut sc.sim;
        v.set_f64("tick", &mut p.tick)?;
        if let Some(c) = v.f64("duration_cap")? {
            p.duration_cap = Some(c);
        }
        v.set_f64("beacon_interval", &mut p.beacon_interval)?;
        v.set_f64("step", &mut p.step)?;
        v.set_f64("min_overlap", &mut p.min_overlap)?;
        v.set_f64("ping_pong_window", &mut p.ping_pong_window)?;
    }

    sc.validate()?;
    Ok(sc)
}

fn access_point(v: &View<'_>) -> Result<AccessPoint, ConfigError> {
    let id = v.required("id", v.text("id"))?;
    let tech_s = v.required("tech", v.text("tech"))?;
    let tech = Technology::parse(tech_s).ok_or_else(|| v.bad(v.entry("tech").unwrap(), "WLAN, UMTS or WIMAX"))?;
    let x = v.required("x", v.f64("x")?)?;
    let y = v.required("y", v.f64("y")?)?;
    let mut ap = AccessPoint::new(id, tech, Point::new(x, y));
    v.set_f64("tx_power", &mut ap.tx_power)?;
    v.set_f64("path_loss_exponent", &mut ap.path_loss_exponent)?;
    v.set_f64("ref_loss", &mut ap.ref_loss)?;
    v.set_f64("sensitivity", &mut ap.sensitivity)?;
    if let Some(n) = v.u32("capacity_users")? {
        ap.capacity_users = n;
    }
    v.set_f64("capacity_bw", &mut ap.capacity_bw)?;
    v.set_f64("user_rate_cap", &mut ap.user_rate_cap)?;
    v.set_f64("latency", &mut ap.base_latency)?;
    if let Some(p) = v.text("provider") {
        ap.provider = p.to_owned();
    }
    if let Some(s) = v.text("subnet") {
        ap.subnet = s.to_owned();
    }
    Ok(ap)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
format_version = 1
[environment]
waypoints = 0,0; 100,0

[aps]
id = w1
tech = WLAN
x = 50
y = 0

[sim]
seed = 3
";

    #[test]
    fn minimal_file_gets_defaults() {
        let sc = to_scenario(&parse_str(MINIMAL).unwrap()).unwrap();
        assert_eq!(sc.name, "scenario");
        assert_eq!(sc.route.speed(), 1.0);
        assert_eq!(sc.aps.len(), 1);
        assert_eq!(sc.aps[0].capacity_users, 30);
        assert_eq!(sc.policy.hysteresis, 4.0);
        assert_eq!(sc.sim.tick, 10.0);
        assert_eq!(sc.sim.seed, 3);
        assert_eq!(sc.service.app_rate, 60.0);
    }

    #[test]
    fn negative_hysteresis_names_invariant() {
        let mut doc = parse_str(MINIMAL).unwrap();
        apply_override(&mut doc, "policy.hysteresis=-1").unwrap();
        let e = to_scenario(&doc).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("hysteresis ≥ 0"), "{e}");
    }

    #[test]
    fn typo_gets_suggestion() {
        let text = format!("{MINIMAL}\n[polcy]\nhysteresis = 2\n");
        let e = to_scenario(&parse_str(&text).unwrap()).unwrap_err();
        match &e {
            ConfigError::UnknownKey { key, suggestion, line } => {
                assert_eq!(key, "polcy.hysteresis");
                assert_eq!(suggestion.as_deref(), Some("policy.hysteresis"));
                assert_eq!(*line, 15);
            }
            other => panic!("{other:?}"),
        }
        let mut doc = parse_str(MINIMAL).unwrap();
        let e = apply_override(&mut doc, "polcy.hysteresis=2").unwrap_err();
        assert!(e.to_string().contains("did you mean `policy.hysteresis`"), "{e}");

        let text = MINIMAL.replace("seed = 3", "sed = 3");
        let e = to_scenario(&parse_str(&text).unwrap()).unwrap_err();
        assert!(e.to_string().contains("`sim.seed`"), "{e}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_str("[environment]\nwaypoints 0,0\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::Syntax {
                line: 2,
                column: 1,
                message: "expected `key = value` or `[section]`".into()
            }
        );
        assert_eq!(e.exit_code(), 3);
        let e = parse_str("  [aps\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, column: 7, .. }), "{e:?}");
        let e = parse_str("[sim]\n = 4\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 2, .. }));
    }

    #[test]
    fn seed_required() {
        let text = MINIMAL.replace("seed = 3", "");
        let e = to_scenario(&parse_str(&text).unwrap()).unwrap_err();
        assert!(e.to_string().contains("sim.seed"));
    }

    #[test]
    fn bad_number_is_semantic() {
        let text = MINIMAL.replace("x = 50", "x = fifty");
        let e = to_scenario(&parse_str(&text).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("aps.w1.x"), "{e}");
        assert!(e.to_string().starts_with("line 8:"), "{e}");
    }

    #[test]
    fn overrides_reach_every_section_kind() {
        let text = format!(
            "{MINIMAL}\n[obstacles]\nsegment = 10,-5; 10,5\nloss = 6\n[load]\nw1 = 0.2\n[load_ramp]\nap = w1\nstart = 1\nend = 2\nfrom = 0.2\nto = 0.4\n"
        );
        let mut doc = parse_str(&text).unwrap();
        for o in [
            "aps.w1.x=60",
            "obstacles.0.loss=9",
            "load.w1=0.3",
            "load_ramp.0.to=0.8",
            "sim.tick=5",
            "service.app_rate=120",
            "name=renamed",
        ] {
            apply_override(&mut doc, o).unwrap();
        }
        let sc = to_scenario(&doc).unwrap();
        assert_eq!(sc.aps[0].position.x, 60.0);
        assert_eq!(sc.obstacles[0].penetration_loss, 9.0);
        assert_eq!(sc.loads[&ApId::new("w1")], 0.3);
        assert_eq!(sc.load_ramps[0].to, 0.8);
        assert_eq!(sc.sim.tick, 5.0);
        assert_eq!(sc.service.app_rate, 120.0);
        assert_eq!(sc.name, "renamed");
        assert!(apply_override(&mut doc, "aps.zz.x=1").is_err());
        assert_eq!(apply_override(&mut doc, "nokey").unwrap_err().exit_code(), 5);
    }

    #[test]
    fn numeric_keys() {
        assert!(is_numeric_key("policy.hysteresis"));
        assert!(is_numeric_key("aps.w1.x"));
        assert!(is_numeric_key("load.w1"));
        assert!(is_numeric_key("sim.seed"));
        assert!(!is_numeric_key("policy.strategy"));
        assert!(!is_numeric_key("policy.nothing"));
        assert!(!is_numeric_key("exec.scanning"));
    }

    #[test]
    fn duplicate_singleton_section() {
        let text = format!("{MINIMAL}\n[sim]\ntick = 5\n");
        let e = to_scenario(&parse_str(&text).unwrap()).unwrap_err();
        assert!(e.to_string().contains("at most once"));
    }

    #[test]
    fn points_parse() {
        assert_eq!(
            parse_points("0,0; 1.5, -2"),
            Some(vec![Point::new(0.0, 0.0), Point::new(1.5, -2.0)])
        );
        assert_eq!(parse_points("0,0;"), None);
        assert_eq!(parse_points("a,b"), None);
    }
}
