//! File outputs for a sweep: a CSV table, a normalized config echo, and a
//! small self-contained SVG plot. Everything here is a pure function of the
//! rows, so rerunning a sweep rewrites byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use noma_mec::SchemeKind;

use crate::config::{echo_toml, ExperimentConfig};
use crate::sweep::Row;

pub const CSV_HEADER: &str =
    "sweep_var,sweep_value,scheme,ps_analytic,ps_mc,stderr,t1,t2,beta_a,beta_b,lambda,latency";

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Shortest round-trip decimal form; the reader recovers the exact f64.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let plan = |f: fn(&noma_mec::OffloadingPlan) -> f64| opt_num(r.plan.as_ref().map(f));
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.sweep_var,
            num(r.sweep_value),
            r.scheme,
            num(r.ps_analytic),
            opt_num(r.ps_mc),
            opt_num(r.stderr),
            plan(|p| p.t1),
            plan(|p| p.t2),
            plan(|p| p.beta_a),
            plan(|p| p.beta_b),
            plan(|p| p.lambda),
            opt_num(r.latency()),
        );
    }
    s
}

/// Writes the CSV, the config echo next to it, and the optional SVG into
/// `dir`. Returns the paths written.
pub fn emit_outputs(exp: &ExperimentConfig, rows: &[Row], dir: &Path) -> Result<Vec<PathBuf>> {
    ensure!(!rows.is_empty(), "the sweep produced no rows");
    let mut written = Vec::new();

    let csv_path = dir.join(&exp.output.csv);
    write_file(&csv_path, &csv_string(rows))?;
    written.push(csv_path.clone());

    let echo_path = csv_path.with_extension("config.toml");
    write_file(&echo_path, &echo_toml(exp))?;
    written.push(echo_path);

    if let Some(svg) = &exp.output.svg {
        let svg_path = dir.join(svg);
        write_file(&svg_path, &svg_string(exp, rows))?;
        written.push(svg_path);
    }
    Ok(written)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn series_label(exp: &ExperimentConfig, scheme_idx: usize) -> String {
    let entry = &exp.schemes[scheme_idx];
    match entry.spec.kind {
        SchemeKind::FixedOffloadNoma(beta) => format!("{} (beta = {beta})", entry.label()),
        _ => entry.label().to_string(),
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:e}")
    } else {
        num(v)
    }
}

/// One polyline of analytic probability per scheme. The x axis switches to
/// log scale when the sweep spans two decades or more.
pub fn svg_string(exp: &ExperimentConfig, rows: &[Row]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const ML: f64 = 64.0;
    const MR: f64 = 230.0;
    const MT: f64 = 34.0;
    const MB: f64 = 58.0;
    let pw = W - ML - MR;
    let ph = H - MT - MB;

    let values = &exp.sweep.values;
    let (vmin, vmax) = (values[0], values[values.len() - 1]);
    let log_x = vmin > 0.0 && vmax / vmin >= 100.0;
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let (x0, x1) = if vmin == vmax {
        (tx(vmin) - 0.5, tx(vmax) + 0.5)
    } else {
        (tx(vmin), tx(vmax))
    };
    let px = |v: f64| ML + (tx(v) - x0) / (x1 - x0) * pw;
    let py = |p: f64| MT + (1.0 - p.clamp(0.0, 1.0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">success probability vs {}</text>"#,
        ML + pw / 2.0,
        exp.sweep.variable.name(),
    );

    // Horizontal grid and y tick labels at 0, 0.25, .., 1.
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let y = py(p);
        let _ = writeln!(
            s,
            r##"<line x1="{ML}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            ML + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            ML - 8.0,
            y + 4.0,
            num(p)
        );
    }

    // X ticks on up to six of the swept values.
    let n = values.len();
    let picks: Vec<usize> = if n <= 6 {
        (0..n).collect()
    } else {
        (0..=5).map(|k| k * (n - 1) / 5).collect()
    };
    for &i in &picks {
        let v = values[i];
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#888"/>"##,
            MT + ph,
            MT + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MT + ph + 20.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        ML + pw / 2.0,
        H - 14.0,
        exp.sweep.variable.name(),
        if log_x { " (log scale)" } else { "" }
    );

    // Axes over the grid.
    let _ = writeln!(
        s,
        r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{:.2}" stroke="black"/>"#,
        MT + ph
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ML}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MT + ph,
        ML + pw,
        MT + ph
    );

    // One series per scheme, in config order.
    for si in 0..exp.schemes.len() {
        let color = PALETTE[si % PALETTE.len()];
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r.scheme_idx == si)
            .map(|r| format!("{:.2},{:.2}", px(r.sweep_value), py(r.ps_analytic)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let ly = MT + 14.0 + si as f64 * 18.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            W - MR + 12.0,
            W - MR + 36.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            W - MR + 42.0,
            ly + 4.0,
            series_label(exp, si)
        );
    }
    s.push_str("</svg>\n");
    s
}
