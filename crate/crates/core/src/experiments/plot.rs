//! Static SVG plots: Laplacian spectrum, recovered vs true coefficients, and
//! energy per outer iteration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;

use super::benchmark::Artifacts;
use crate::error::{Error, Result};
use crate::solvers::TraceEntry;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Linear map from data ranges onto the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if !(lo.is_finite() && hi.is_finite()) {
                (0.0, 1.0)
            } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        Frame {
            x: widen(x),
            y: widen(y),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn open(out: &mut String, title: &str, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
    for (v, anchor, x, y) in [
        (frame.x.0, "start", l, b + 15.0),
        (frame.x.1, "end", r, b + 15.0),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#
        );
    }
    for (v, y) in [(frame.y.0, b), (frame.y.1, t + 10.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#,
            l - 4.0
        );
    }
}

fn legend(out: &mut String, labels: &[&str]) {
    for (i, label) in labels.iter().enumerate() {
        let y = MARGIN + 15.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN - 110.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            y - 9.0,
            COLORS[i % COLORS.len()],
            x + 14.0,
            y,
            escape(label)
        );
    }
}

/// Eigenvalue against index.
pub fn spectrum_svg(spectrum: &[f64]) -> String {
    let frame = Frame::new(
        (0.0, spectrum.len().saturating_sub(1) as f64),
        range(spectrum.iter().copied().chain([0.0])),
    );
    let mut out = String::new();
    open(
        &mut out,
        "Laplacian spectrum",
        &frame,
        "index",
        "eigenvalue",
    );
    for (i, v) in spectrum.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#,
            frame.px(i as f64),
            frame.py(*v),
            COLORS[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Stems of the true and recovered coefficients; only nonzero entries are drawn.
pub fn stem_svg(truth: &DVector<f64>, recovered: &DVector<f64>, title: &str) -> String {
    let n = truth.len().max(recovered.len());
    let frame = Frame::new(
        (0.0, n.saturating_sub(1) as f64),
        range(truth.iter().chain(recovered.iter()).copied().chain([0.0])),
    );
    let mut out = String::new();
    open(&mut out, title, &frame, "spectral index", "coefficient");
    let zero = frame.py(0.0);
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{zero:.2}" x2="{}" y2="{zero:.2}" stroke="#888"/>"##,
        WIDTH - MARGIN
    );
    for (series, values) in [truth, recovered].into_iter().enumerate() {
        let color = COLORS[series];
        for (i, v) in values.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let (x, y) = (frame.px(i as f64), frame.py(*v));
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{zero:.2}" x2="{x:.2}" y2="{y:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{y:.2}" r="{}" fill="{}" stroke="{color}"/>"#,
                if series == 0 { 4 } else { 2 },
                if series == 0 { "none" } else { color }
            );
        }
    }
    legend(&mut out, &["truth", "recovered"]);
    out.push_str("</svg>\n");
    out
}

/// Total energy per outer iteration, one line per labelled trace. `None` when
/// every trace is empty.
pub fn energy_svg(traces: &[(&str, &[TraceEntry])]) -> Option<String> {
    if traces.iter().all(|(_, t)| t.is_empty()) {
        return None;
    }
    let frame = Frame::new(
        range(
            traces
                .iter()
                .flat_map(|(_, t)| t.iter().map(|e| e.outer as f64)),
        ),
        range(traces.iter().flat_map(|(_, t)| t.iter().map(|e| e.total))),
    );
    let mut out = String::new();
    open(
        &mut out,
        "Energy per outer iteration",
        &frame,
        "outer iteration",
        "total energy",
    );
    for (i, (_, trace)) in traces.iter().enumerate() {
        let points: Vec<String> = trace
            .iter()
            .filter(|e| e.total.is_finite())
            .map(|e| format!("{:.2},{:.2}", frame.px(e.outer as f64), frame.py(e.total)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.join(" "),
            COLORS[i % COLORS.len()]
        );
    }
    let labels: Vec<&str> = traces.iter().map(|(l, _)| *l).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    Some(out)
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `spectrum.svg`, `recovery_<model>.svg` per model and `energy.svg`
/// (skipped when all traces are empty) into `dir`.
pub fn emit_plots(artifacts: &Artifacts, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![write(
        dir.join("spectrum.svg"),
        &spectrum_svg(&artifacts.spectrum),
    )?];
    for r in &artifacts.recoveries {
        let title = format!("{} model, lambda = {:.4}", r.model, r.lambda);
        written.push(write(
            dir.join(format!("recovery_{}.svg", r.model)),
            &stem_svg(&artifacts.truth, &r.solution, &title),
        )?);
    }
    let traces: Vec<(&str, &[TraceEntry])> = artifacts
        .recoveries
        .iter()
        .map(|r| (r.model.name(), r.trace.as_slice()))
        .collect();
    if let Some(svg) = energy_svg(&traces) {
        written.push(write(dir.join("energy.svg"), &svg)?);
    }
    Ok(written)
}
