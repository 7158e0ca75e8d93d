//! Plain-text persistence: curves as JSON, traces and diagnostics as CSV, trajectories as a
//! directory of snapshot files. Every write goes to a temporary file renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{FlowDiagnostics, FlowState, FlowTrajectory};
use crate::geometry::SupportCurve;
use crate::scalar::{lit, Real};
use crate::spectral::Harmonics;

pub const CURVE_SCHEMA: &str = "ovalflow.curve/1";
pub const TRAJECTORY_SCHEMA: &str = "ovalflow.trajectory/1";
pub const TRACE_HEADER: &str = "theta,x,y,h,R";
pub const DIAGNOSTICS_HEADER: &str = "t,area,entropy,w,knorm,kprimenorm";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.json";

/// On-disk curve: `harmonics` rows are `[n, a_n, b_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub harmonics: Vec<(usize, f64, f64)>,
    pub grid_size: usize,
}

impl CurveDocument {
    pub fn from_curve<T: Real>(curve: &SupportCurve<T>, t: Option<T>) -> Self {
        let h = curve.harmonics();
        let harmonics = (0..h.cos.len())
            .map(|n| (n, to_f64(h.cos[n]), to_f64(h.sin[n])))
            .collect();
        Self {
            schema: Some(CURVE_SCHEMA.to_string()),
            t: t.map(to_f64),
            harmonics,
            grid_size: curve.grid_size(),
        }
    }

    /// Rebuilds and validates the curve. Missing harmonics are zero.
    pub fn to_curve<T: Real>(&self) -> Result<SupportCurve<T>> {
        let top = self.harmonics.iter().map(|r| r.0).max().unwrap_or(0);
        let mut h = Harmonics::<T>::zeros(top.max(1));
        for &(n, a, b) in &self.harmonics {
            h.cos[n] = lit(a);
            h.sin[n] = lit(b);
        }
        SupportCurve::new(h, self.grid_size)
    }
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn format_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let name = path.file_name().ok_or_else(|| io_err(path, "not a file path"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn curve_to_json<T: Real>(curve: &SupportCurve<T>, t: Option<T>) -> String {
    let mut s = serde_json::to_string_pretty(&CurveDocument::from_curve(curve, t)).expect("curve document serializes");
    s.push('\n');
    s
}

pub fn curve_from_json<T: Real>(text: &str, origin: &Path) -> Result<(SupportCurve<T>, Option<T>)> {
    let doc: CurveDocument = serde_json::from_str(text).map_err(|e| format_err(origin, e))?;
    if let Some(schema) = &doc.schema {
        if schema != CURVE_SCHEMA {
            return Err(format_err(origin, format!("unsupported schema `{schema}`")));
        }
    }
    Ok((doc.to_curve()?, doc.t.map(lit)))
}

pub fn save_curve<T: Real>(path: &Path, curve: &SupportCurve<T>, t: Option<T>) -> Result<()> {
    write_atomic(path, curve_to_json(curve, t).as_bytes())
}

pub fn load_curve<T: Real>(path: &Path) -> Result<(SupportCurve<T>, Option<T>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    curve_from_json(&text, path)
}

/// Joins rows of displayable cells under `header`.
pub fn csv_table<I, R, C>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = C>,
    C: std::fmt::Display,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{cell}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

/// `theta,x,y,h,R` at `count` equally spaced tangent angles.
pub fn trace_csv<T: Real>(curve: &SupportCurve<T>, count: usize) -> String {
    csv_table(
        TRACE_HEADER,
        curve
            .sample_trace(count)
            .into_iter()
            .map(|r| [r.theta, r.point.x, r.point.y, r.h, r.radius].map(to_f64)),
    )
}

pub fn diagnostics_csv<T: Real>(rows: &[FlowDiagnostics<T>]) -> String {
    csv_table(
        DIAGNOSTICS_HEADER,
        rows.iter()
            .map(|d| [d.t, d.area, d.entropy, d.w, d.knorm, d.kprimenorm].map(to_f64)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryManifest {
    schema: String,
    step_size: f64,
    snapshots: Vec<String>,
}

pub fn snapshot_name(index: usize) -> String {
    format!("curve_{index:04}.json")
}

/// Writes `curve_XXXX.json` per snapshot, `diagnostics.csv` and a `trajectory.json` index.
pub fn save_trajectory<T: Real>(dir: &Path, traj: &FlowTrajectory<T>) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(traj.len() + 2);
    let mut names = Vec::with_capacity(traj.len());
    for (j, s) in traj.states.iter().enumerate() {
        let name = snapshot_name(j);
        let path = dir.join(&name);
        save_curve(&path, &s.curve, Some(s.t))?;
        written.push(path);
        names.push(name);
    }
    let diag = dir.join(DIAGNOSTICS_FILE);
    write_atomic(&diag, diagnostics_csv(&traj.diagnostics).as_bytes())?;
    written.push(diag);
    let manifest = TrajectoryManifest {
        schema: TRAJECTORY_SCHEMA.to_string(),
        step_size: to_f64(traj.step_size),
        snapshots: names,
    };
    let index = dir.join(TRAJECTORY_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_atomic(&index, text.as_bytes())?;
    written.push(index);
    Ok(written)
}

/// Reloads a trajectory; diagnostics are recomputed from the curves.
pub fn load_trajectory<T: Real>(dir: &Path) -> Result<FlowTrajectory<T>> {
    let index = dir.join(TRAJECTORY_FILE);
    let text = fs::read_to_string(&index).map_err(|e| io_err(&index, e))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text).map_err(|e| format_err(&index, e))?;
    if manifest.schema != TRAJECTORY_SCHEMA {
        return Err(format_err(&index, format!("unsupported schema `{}`", manifest.schema)));
    }
    if manifest.snapshots.is_empty() {
        return Err(format_err(&index, "no snapshots"));
    }
    let mut states = Vec::with_capacity(manifest.snapshots.len());
    for name in &manifest.snapshots {
        let path = dir.join(name);
        let (curve, t) = load_curve::<T>(&path)?;
        let t = t.ok_or_else(|| format_err(&path, "snapshot without flow time `t`"))?;
        states.push(FlowState::new(t, curve));
    }
    let diagnostics = states.iter().map(FlowDiagnostics::of).collect();
    Ok(FlowTrajectory {
        states,
        step_size: lit(manifest.step_size),
        diagnostics,
    })
}
