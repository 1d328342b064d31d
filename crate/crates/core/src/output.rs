//! Deterministic text output: CSV with `#` metadata lines, LF endings.

use std::fmt::Write as _;

use serde_json::Value;

use crate::experiment::{Sweep, SweepPoint};
use crate::mn::MnCurve;

pub const SWEEP_HEADER: &str = "c,mn,max_error,bound,ratio,cond_estimate,l,N,status";

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `# key=value ...` line carrying the artifact version and every parameter.
pub fn metadata_line(command: &str, params: &[(&str, String)]) -> String {
    let mut line = format!("# mqshape {} {command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in params {
        let _ = write!(line, " {k}={v}");
    }
    line
}

pub fn mn_curve_csv(curve: &MnCurve, meta: &str) -> String {
    let mut out = String::new();
    out.push_str(meta);
    out.push('\n');
    out.push_str("c,mn\n");
    for s in &curve.samples {
        let _ = writeln!(out, "{},{}", fmt_f64(s.c), fmt_f64(s.mn));
    }
    out
}

pub fn sweep_csv(sweep: &Sweep, meta: &str) -> String {
    points_csv(&sweep.points, meta)
}

/// Sweep-schema CSV for any list of points; failed rows leave the solver
/// columns empty.
pub fn points_csv(points: &[SweepPoint], meta: &str) -> String {
    let mut out = String::new();
    out.push_str(meta);
    out.push('\n');
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        let cond = p.cond_estimate.map(fmt_f64).unwrap_or_default();
        match &p.report {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    fmt_f64(p.c),
                    fmt_f64(p.mn),
                    fmt_f64(r.max_error),
                    fmt_f64(r.bound),
                    fmt_f64(r.ratio),
                    cond,
                    r.l,
                    r.n_centers,
                    p.status
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{},{},,,,{},,,{}",
                    fmt_f64(p.c),
                    fmt_f64(p.mn),
                    cond,
                    p.status
                );
            }
        }
    }
    out
}

/// Pretty JSON with two-space indent, keys in map order, and floats in the
/// same 17-digit format as the CSV. Non-finite floats become `null`.
pub fn json_string(value: &Value) -> String {
    let mut out = String::new();
    write_json(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_json(out: &mut String, value: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(v) if v.is_finite() => out.push_str(&fmt_f64(v)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_json(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(out, v, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}
