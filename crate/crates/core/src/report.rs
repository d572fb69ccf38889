//! Output formats: per-tick CSV trace, plain-text summary, key-value
//! summary, and atomic file writes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::sim::{MetricsReport, RunOutput, TraceRow};

pub const TRACE_COLUMNS: [&str; 11] = [
    "t_s",
    "s_m",
    "x_m",
    "y_m",
    "attached_ap",
    "tech",
    "rss_dbm",
    "goodput_kbps",
    "buffer_ms",
    "load",
    "event",
];

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn row_fields(r: &TraceRow) -> [String; 11] {
    [
        format!("{:.3}", r.t),
        format!("{:.3}", r.s),
        format!("{:.3}", r.position.x),
        format!("{:.3}", r.position.y),
        opt(r.attached.as_ref(), |a| a.to_string()),
        opt(r.tech, |t| t.name().to_owned()),
        opt(r.rss, |v| format!("{v:.2}")),
        format!("{:.3}", r.goodput),
        format!("{:.1}", r.buffer),
        opt(r.load, |v| format!("{v:.4}")),
        r.events.join(";"),
    ]
}

/// The trace as CSV, preceded by a `# format_version: 1` line.
pub fn trace_csv(trace: &[TraceRow]) -> Vec<u8> {
    let mut out = b"# format_version: 1\n".to_vec();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(TRACE_COLUMNS).expect("write to memory");
        for r in trace {
            w.write_record(row_fields(r)).expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    out
}

/// Parse a trace written by [`trace_csv`] back into string records.
pub fn read_trace(bytes: &[u8]) -> Result<Vec<csv::StringRecord>, csv::Error> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
    r.records().collect()
}

pub fn summary_kv(name: &str, m: &MetricsReport) -> String {
    let mut s = String::from("format_version=1\n");
    let _ = writeln!(s, "scenario={name}");
    for (k, v) in m.fields() {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

pub fn summary_text(name: &str, out: &RunOutput) -> String {
    let m = &out.metrics;
    let mut s = String::new();
    let _ = writeln!(s, "scenario {name}");
    let _ = writeln!(s, "  ticks                {}", m.ticks);
    let _ = writeln!(s, "  coverage             {:.2} %", 100.0 * m.coverage_fraction);
    let _ = writeln!(s, "  outage               {:.0} ms", m.total_outage);
    let _ = writeln!(s, "  goodput mean/peak    {:.2} / {:.2} kb/s", m.mean_goodput, m.peak_goodput);
    let _ = writeln!(
        s,
        "  handoffs             {} ({} horizontal, {} vertical)",
        m.handoff_count(),
        m.handoffs_horizontal,
        m.handoffs_vertical
    );
    let _ = writeln!(s, "  ping-pong            {}", m.ping_pong_count);
    if !m.handoff_delays.is_empty() {
        let mean = m.handoff_delays.iter().sum::<f64>() / m.handoff_delays.len() as f64;
        let _ = writeln!(s, "  handoff delay mean   {mean:.1} ms");
    }
    let _ = writeln!(s, "  scan interruption    {:.0} ms", m.total_scan_interruption);
    let _ = writeln!(s, "  buffer underruns     {}", m.underruns);
    let _ = writeln!(s, "  admission rejects    {}", m.admission_rejects);
    if let Some(e) = &out.plan_error {
        let _ = writeln!(s, "  plan                 none ({e})");
    } else if let Some(p) = &out.plan {
        let ids: Vec<&str> = p.segments.iter().map(|x| x.ap_id.as_str()).collect();
        let _ = writeln!(s, "  plan                 {}", ids.join(" -> "));
    }
    s
}

/// Comparison table, one row per scenario in the given order.
pub fn comparison_csv(rows: &[(String, MetricsReport)]) -> Vec<u8> {
    table_csv("scenario", rows.iter().map(|(n, m)| (n.clone(), m)))
}

pub(crate) fn table_csv<'a>(first: &str, rows: impl Iterator<Item = (String, &'a MetricsReport)>) -> Vec<u8> {
    let mut out = b"# format_version: 1\n".to_vec();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header_done = false;
        for (label, m) in rows {
            let fields = m.fields();
            if !header_done {
                let mut h = vec![first.to_owned()];
                h.extend(fields.iter().map(|(k, _)| k.to_string()));
                w.write_record(&h).expect("write to memory");
                header_done = true;
            }
            let mut rec = vec![label];
            rec.extend(fields.into_iter().map(|(_, v)| v));
            w.write_record(&rec).expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    out
}

/// Write through a temporary file in the same directory, then rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
