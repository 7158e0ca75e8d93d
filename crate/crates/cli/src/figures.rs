//! SVG figures for a finished run: curve evolution, phase portraits, the diameter
//! bifurcation diagram, evolute and envelope overlays, and Melnikov potentials.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use ovalflow_core::billiard::iterate;
use ovalflow_core::io::load_trajectory;
use ovalflow_core::normal::envelope;
use ovalflow_core::{Curve64, PhasePoint, Trajectory64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svg::node::element::{Circle, Group, Line, Polyline, Rectangle, Text};
use svg::Document;

use crate::error::{CliError, CliResult};
use crate::pipeline::{thinned, write_text, BranchReport, RunReport, TRAJECTORY_DIR};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Affine map from a data box onto the plotting frame.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |lo: f64, hi: f64| if hi - lo > 1e-12 { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    /// Box around `points` with a 5% border.
    pub fn fit(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points.into_iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
        }
        if !x0.is_finite() {
            return Frame::new(0.0, 1.0, 0.0, 1.0);
        }
        let (dx, dy) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
        Frame::new(x0 - dx, x1 + dx, y0 - dy, y1 + dy)
    }

    /// Enlarges the shorter side so one data unit has the same length on both axes.
    pub fn equal_aspect(self) -> Self {
        let sx = (self.x1 - self.x0) / (WIDTH - 2.0 * MARGIN);
        let sy = (self.y1 - self.y0) / (HEIGHT - 2.0 * MARGIN);
        let s = sx.max(sy);
        let (cx, cy) = (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1));
        let (hx, hy) = (0.5 * s * (WIDTH - 2.0 * MARGIN), 0.5 * s * (HEIGHT - 2.0 * MARGIN));
        Frame::new(cx - hx, cx + hx, cy - hy, cy + hy)
    }

    pub fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn polyline(&self, pts: &[(f64, f64)], color: &str, width: f64) -> Polyline {
        let coords: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{},{}", fmt(self.px(x)), fmt(self.py(y))))
            .collect();
        Polyline::new()
            .set("points", coords.join(" "))
            .set("fill", "none")
            .set("stroke", color)
            .set("stroke-width", width)
    }

    pub fn dot(&self, x: f64, y: f64, r: f64, color: &str) -> Circle {
        Circle::new()
            .set("cx", fmt(self.px(x)))
            .set("cy", fmt(self.py(y)))
            .set("r", r)
            .set("fill", color)
    }

    /// Border, five ticks per axis, labels and title.
    pub fn axes(&self, title: &str, xlabel: &str, ylabel: &str) -> Group {
        let mut g = Group::new().set("font-family", "sans-serif").set("font-size", 11).add(
            Rectangle::new()
                .set("x", MARGIN)
                .set("y", MARGIN)
                .set("width", WIDTH - 2.0 * MARGIN)
                .set("height", HEIGHT - 2.0 * MARGIN)
                .set("fill", "none")
                .set("stroke", "#444"),
        );
        for i in 0..=4 {
            let s = i as f64 / 4.0;
            let (x, y) = (self.x0 + s * (self.x1 - self.x0), self.y0 + s * (self.y1 - self.y0));
            let (px, py) = (self.px(x), self.py(y));
            g = g
                .add(tick(px, HEIGHT - MARGIN, px, HEIGHT - MARGIN + 4.0))
                .add(label(px, HEIGHT - MARGIN + 16.0, "middle", &format!("{x:.3}")))
                .add(tick(MARGIN - 4.0, py, MARGIN, py))
                .add(label(MARGIN - 6.0, py + 4.0, "end", &format!("{y:.3}")));
        }
        g.add(label(WIDTH / 2.0, MARGIN - 20.0, "middle", title).set("font-size", 14))
            .add(label(WIDTH / 2.0, HEIGHT - 12.0, "middle", xlabel))
            .add(label(14.0, HEIGHT / 2.0, "middle", ylabel).set("transform", format!("rotate(-90 14 {})", HEIGHT / 2.0)))
    }
}

fn tick(x1: f64, y1: f64, x2: f64, y2: f64) -> Line {
    Line::new()
        .set("x1", fmt(x1))
        .set("y1", fmt(y1))
        .set("x2", fmt(x2))
        .set("y2", fmt(y2))
        .set("stroke", "#444")
}

fn label(x: f64, y: f64, anchor: &str, text: &str) -> Text {
    Text::new(text).set("x", fmt(x)).set("y", fmt(y)).set("text-anchor", anchor)
}

fn document() -> Document {
    Document::new()
        .set("viewBox", (0, 0, WIDTH, HEIGHT))
        .set("width", WIDTH)
        .set("height", HEIGHT)
        .add(Rectangle::new().set("width", "100%").set("height", "100%").set("fill", "white"))
}

fn legend(entries: &[(String, String, Option<&str>)]) -> Group {
    let mut g = Group::new().set("font-family", "sans-serif").set("font-size", 10);
    for (i, (name, color, dash)) in entries.iter().enumerate() {
        let y = MARGIN + 12.0 + 14.0 * i as f64;
        let mut l = tick(WIDTH - MARGIN - 110.0, y - 3.0, WIDTH - MARGIN - 90.0, y - 3.0)
            .set("stroke", color.as_str())
            .set("stroke-width", 2);
        if let Some(d) = dash {
            l = l.set("stroke-dasharray", *d);
        }
        g = g.add(l).add(label(WIDTH - MARGIN - 86.0, y, "start", name));
    }
    g
}

type Polygon = Vec<(f64, f64)>;

fn boundary(curve: &Curve64, count: usize) -> Vec<(f64, f64)> {
    (0..=count)
        .map(|i| {
            let p = curve.position(TAU * i as f64 / count as f64);
            (p.x, p.y)
        })
        .collect()
}

fn evolute(curve: &Curve64, count: usize) -> Vec<(f64, f64)> {
    (0..=count)
        .map(|i| {
            let p = curve.evolute(TAU * i as f64 / count as f64);
            (p.x, p.y)
        })
        .collect()
}

/// Boundaries of up to eight snapshots drawn over each other.
pub fn evolution_overlay(traj: &Trajectory64) -> Document {
    let picks = thinned(traj.len(), PALETTE.len());
    let curves: Vec<(f64, Vec<(f64, f64)>)> =
        picks.iter().map(|&i| (traj.states[i].t, boundary(&traj.states[i].curve, 256))).collect();
    let frame = Frame::fit(curves.iter().flat_map(|(_, c)| c.iter().copied())).equal_aspect();
    let mut doc = document().add(frame.axes("Curve evolution", "x", "y"));
    let mut keys = Vec::new();
    for (k, (t, c)) in curves.iter().enumerate() {
        doc = doc.add(frame.polyline(c, PALETTE[k], 1.5));
        keys.push((format!("t = {t:.2}"), PALETTE[k].to_string(), None));
    }
    doc.add(legend(&keys))
}

/// Orbits of the billiard map from `samples` seeded starting points, in (θ mod 2π, φ).
/// Orbits that graze the boundary are cut where the map fails.
pub fn phase_portrait(curve: &Curve64, samples: usize, iters: usize, seed: u64, title: &str) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = Frame::new(0.0, TAU, 0.0, PI);
    let mut doc = document().add(frame.axes(title, "θ", "φ"));
    for k in 0..samples {
        let theta = rng.gen_range(0.0..TAU);
        let phi = rng.gen_range(0.05..PI - 0.05);
        let Ok(start) = PhasePoint::new(theta, phi) else { continue };
        let records = iterate(curve, start, iters).unwrap_or_default();
        let mut g = Group::new().set("fill", PALETTE[k % PALETTE.len()]);
        for r in records {
            g = g.add(
                Circle::new()
                    .set("cx", fmt(frame.px(r.to.theta.rem_euclid(TAU))))
                    .set("cy", fmt(frame.py(r.to.phi)))
                    .set("r", 0.8),
            );
        }
        doc = doc.add(g);
    }
    doc
}

pub fn class_style(class: &str) -> (&'static str, Option<&'static str>) {
    match class {
        "hyperbolic" => ("#d62728", None),
        "elliptic" => ("#1f77b4", Some("6 4")),
        _ => ("#2ca02c", Some("2 3")),
    }
}

/// Diameter branches over flow time, one stroke style per orbit class.
pub fn bifurcation_diagram(branches: &[BranchReport]) -> Document {
    let frame = Frame::fit(branches.iter().flat_map(|b| b.rows.iter().map(|r| (r.t, r.theta))));
    let mut doc = document().add(frame.axes("Diameter branches", "t", "θ"));
    for b in branches {
        // split each branch into runs of constant class
        let mut start = 0;
        while start < b.rows.len() {
            let class = &b.rows[start].class;
            let mut end = start;
            while end + 1 < b.rows.len() && &b.rows[end + 1].class == class {
                end += 1;
            }
            let upto = (end + 1).min(b.rows.len() - 1);
            let pts: Vec<(f64, f64)> = b.rows[start..=upto].iter().map(|r| (r.t, r.theta)).collect();
            let (color, dash) = class_style(class);
            let mut line = frame.polyline(&pts, color, 2.0);
            if let Some(d) = dash {
                line = line.set("stroke-dasharray", d);
            }
            doc = doc.add(line);
            start = end + 1;
        }
    }
    let keys: Vec<(String, String, Option<&str>)> = ["hyperbolic", "elliptic", "parabolic"]
        .iter()
        .map(|c| {
            let (color, dash) = class_style(c);
            (c.to_string(), color.to_string(), dash)
        })
        .collect();
    doc.add(legend(&keys))
}

/// Boundary and evolute of a few snapshots, with the envelope of the `m`-th reflected
/// normals on the last one where it is defined.
pub fn evolute_overlay(traj: &Trajectory64, m: usize) -> Document {
    let picks = thinned(traj.len(), 4);
    let data: Vec<(f64, Polygon, Polygon)> = picks
        .iter()
        .map(|&i| {
            let s = &traj.states[i];
            (s.t, boundary(&s.curve, 256), evolute(&s.curve, 512))
        })
        .collect();
    let last = &traj.last().curve;
    let env: Vec<(f64, f64, bool)> = (0..256)
        .filter_map(|i| envelope(last, TAU * i as f64 / 256.0, m).ok())
        .map(|e| (e.point.x, e.point.y, e.singular))
        .collect();
    let frame = Frame::fit(
        data.iter()
            .flat_map(|(_, b, _)| b.iter().copied())
            .chain(data.iter().flat_map(|(_, _, e)| e.iter().copied())),
    )
    .equal_aspect();
    let mut doc = document().add(frame.axes("Evolute and envelope", "x", "y"));
    let mut keys = Vec::new();
    for (k, (t, b, e)) in data.iter().enumerate() {
        doc = doc
            .add(frame.polyline(b, PALETTE[k], 1.5))
            .add(frame.polyline(e, PALETTE[k], 0.8).set("stroke-dasharray", "4 3"));
        keys.push((format!("t = {t:.2}"), PALETTE[k].to_string(), None));
    }
    for (x, y, singular) in env {
        doc = doc.add(frame.dot(x, y, 1.2, if singular { "#d62728" } else { "#333" }));
    }
    keys.push((format!("envelope m = {m}"), "#333".into(), Some("1 2")));
    doc.add(legend(&keys))
}

/// Sampled potential with its amplitude written in the corner.
pub fn melnikov_figure(samples: &[(f64, f64)], title: &str, amplitude: f64, status: &str) -> Document {
    let frame = Frame::fit(samples.iter().copied());
    document()
        .add(frame.axes(title, "t", "W₁"))
        .add(frame.polyline(samples, "#1f77b4", 1.5))
        .add(
            label(MARGIN + 8.0, MARGIN + 16.0, "start", &format!("amplitude = {amplitude:.6e} ({status})"))
                .set("font-family", "sans-serif")
                .set("font-size", 12),
        )
}

fn read_pairs(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split(',').map(str::parse::<f64>);
            match (it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b))) => Ok((a, b)),
                _ => Err(CliError::Config(format!("{}: malformed row `{l}`", path.display()))),
            }
        })
        .collect()
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FigureSummary {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl FigureSummary {
    fn save(&mut self, path: PathBuf, doc: &Document) -> CliResult<()> {
        write_text(&path, &doc.to_string())?;
        self.files.push(path);
        Ok(())
    }
}

/// Writes every figure the run supports into `fig_dir`. Sections the report lacks are
/// skipped with a note.
pub fn emit_figures(report: &RunReport, run_dir: &Path, fig_dir: &Path) -> CliResult<FigureSummary> {
    let mut out = FigureSummary::default();
    match load_trajectory::<f64>(&run_dir.join(&report.trajectory)) {
        Ok(traj) => {
            out.save(fig_dir.join("evolution.svg"), &evolution_overlay(&traj))?;
            out.save(fig_dir.join("evolute.svg"), &evolute_overlay(&traj, 2))?;
            for (k, i) in thinned(traj.len(), 3).into_iter().enumerate() {
                let s = &traj.states[i];
                let title = format!("Phase portrait, t = {:.2}", s.t);
                let doc = phase_portrait(&s.curve, 24, 300, report.config.seed.wrapping_add(k as u64), &title);
                out.save(fig_dir.join(format!("portrait_{k}.svg")), &doc)?;
            }
        }
        Err(e) => out.notes.push(format!("trajectory unavailable under {TRAJECTORY_DIR}: {e}")),
    }
    match &report.diameters {
        Some(d) if d.continuum => out.notes.push("bifurcation diagram skipped: diameters form a continuum".into()),
        Some(d) => out.save(fig_dir.join("bifurcation.svg"), &bifurcation_diagram(&d.branches))?,
        None => out.notes.push("bifurcation diagram skipped: no diameter analysis".into()),
    }
    if report.melnikov.is_empty() {
        out.notes.push("melnikov figure skipped: no verdicts".into());
    }
    for v in &report.melnikov {
        let (Some(file), Some(amp)) = (&v.file, v.amplitude) else {
            out.notes.push(format!("melnikov ({}, {}) skipped: {}", v.p, 2 * v.q, v.status));
            continue;
        };
        let samples = read_pairs(&run_dir.join(file))?;
        let title = format!("Melnikov potential, ({}, {})", v.p, 2 * v.q);
        let name = Path::new(file).with_extension("svg");
        out.save(fig_dir.join(name), &melnikov_figure(&samples, &title, amp, &v.status))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_maps_corners() {
        let f = Frame::new(0.0, 2.0, -1.0, 1.0);
        assert_eq!((f.px(0.0), f.py(-1.0)), (MARGIN, HEIGHT - MARGIN));
        assert_eq!((f.px(2.0), f.py(1.0)), (WIDTH - MARGIN, MARGIN));
    }

    #[test]
    fn equal_aspect_matches_scales() {
        let f = Frame::new(-2.0, 2.0, -1.0, 1.0).equal_aspect();
        let sx = (f.px(1.0) - f.px(0.0)).abs();
        let sy = (f.py(1.0) - f.py(0.0)).abs();
        assert!((sx - sy).abs() < 1e-9);
    }

    #[test]
    fn degenerate_box_is_padded() {
        let f = Frame::fit([(1.0, 1.0)]);
        assert!(f.px(1.0).is_finite() && f.py(1.0).is_finite());
    }

    #[test]
    fn annotation_carries_amplitude() {
        let s: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, (i as f64).sin())).collect();
        let text = melnikov_figure(&s, "W", 3.709, "destroyed").to_string();
        assert!(text.contains("amplitude = 3.709000e0"));
    }
}
