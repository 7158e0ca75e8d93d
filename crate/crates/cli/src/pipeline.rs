//! The experiment pipeline: evolve, then diameter continuation, normal-orbit scans and the
//! Melnikov test, each persisted as CSV and summarized in `report.json`.

use std::fs;
use std::path::{Path, PathBuf};

use ovalflow_core::io::{csv_table, save_trajectory, write_atomic};
use ovalflow_core::melnikov::{melnikov_curve, resonance_solve};
use ovalflow_core::normal::{diffeo_certificate, evolute_containment, np_detect, NormalOrbitSet};
use ovalflow_core::periodic::{continue_all, find_diameters};
use ovalflow_core::{Curve64, DiameterBranch, EllipseParams, FlowSolver, FlowState, Trajectory64};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const REPORT_SCHEMA: &str = "ovalflow.report/1";
pub const REPORT_FILE: &str = "report.json";
pub const FAILED_MARKER: &str = "FAILED";
pub const TRAJECTORY_DIR: &str = "traj";
pub const BRANCHES_FILE: &str = "branches.csv";
pub const BRANCHES_HEADER: &str = "t,theta,length,class,f_prime,branch";
pub const NP_FILE: &str = "np_report.csv";
pub const NP_HEADER: &str = "t,n,count,min_abs_dA,evolute_margin";
pub const MELNIKOV_HEADER: &str = "t,W1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub area: f64,
    pub entropy: f64,
    pub w: f64,
    pub knorm: f64,
    pub kprimenorm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub t: f64,
    pub theta: f64,
    pub length: f64,
    pub class: String,
    pub f_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub id: usize,
    pub terminal_event: String,
    pub rows: Vec<BranchRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    /// Constant-width initial curve: every direction is a diameter.
    pub continuum: bool,
    pub branches: Vec<BranchReport>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpRow {
    pub t: f64,
    pub n: usize,
    /// Irreducible orbits found; `None` for a continuum.
    pub count: Option<usize>,
    pub min_abs_da: f64,
    pub evolute_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpReport {
    pub rows: Vec<NpRow>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelnikovVerdict {
    pub p: usize,
    pub q: usize,
    /// `destroyed`, `not_destroyed`, `not_admissible`.
    pub status: String,
    pub lambda: Option<f64>,
    pub modulus: Option<f64>,
    pub delta: Option<f64>,
    pub amplitude: Option<f64>,
    pub noise_floor: Option<f64>,
    pub destroyed: bool,
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config: RunConfig,
    pub trajectory: String,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub diameters: Option<DiameterReport>,
    pub np: Option<NpReport>,
    pub melnikov: Vec<MelnikovVerdict>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(REPORT_FILE);
        let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let report: RunReport =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if report.schema != REPORT_SCHEMA {
            return Err(CliError::Config(format!("{}: unsupported schema `{}`", path.display(), report.schema)));
        }
        Ok(report)
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, text.as_bytes()).map_err(CliError::output)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn solver_for(cfg: &RunConfig) -> FlowSolver<f64> {
    let d = FlowSolver::default();
    FlowSolver {
        stability: cfg.tolerances.stability.unwrap_or(d.stability),
        snapshot_stride: cfg.stride,
        area_tolerance: cfg.tolerances.area.unwrap_or(d.area_tolerance),
        truncation: cfg.tolerances.truncation,
    }
}

pub fn evolve(solver: &FlowSolver<f64>, curve: Curve64, t_end: f64, dt: f64) -> CliResult<Trajectory64> {
    solver
        .evolve(&FlowState::new(0.0, curve), t_end, dt)
        .map_err(|e| {
            let op = match &e {
                ovalflow_core::Error::Flow { t, .. } => format!("evolve (t = {t})"),
                _ => "evolve".to_string(),
            };
            CliError::numerical(op)(e)
        })
}

pub fn diagnostics_rows(traj: &Trajectory64) -> Vec<DiagnosticsRow> {
    traj.diagnostics
        .iter()
        .map(|d| DiagnosticsRow {
            t: d.t,
            area: d.area,
            entropy: d.entropy,
            w: d.w,
            knorm: d.knorm,
            kprimenorm: d.kprimenorm,
        })
        .collect()
}

pub fn branch_reports(branches: &[DiameterBranch<f64>]) -> Vec<BranchReport> {
    branches
        .iter()
        .enumerate()
        .map(|(id, b)| BranchReport {
            id,
            terminal_event: b.terminal_event.as_str().to_string(),
            rows: b
                .samples
                .iter()
                .map(|s| BranchRow {
                    t: s.t,
                    theta: s.theta,
                    length: s.length,
                    class: s.klass.as_str().to_string(),
                    f_prime: s.f_prime,
                })
                .collect(),
        })
        .collect()
}

pub fn branches_csv(branches: &[BranchReport]) -> String {
    csv_table(
        BRANCHES_HEADER,
        branches.iter().flat_map(|b| {
            b.rows.iter().map(move |r| {
                [
                    r.t.to_string(),
                    r.theta.to_string(),
                    r.length.to_string(),
                    r.class.clone(),
                    r.f_prime.to_string(),
                    b.id.to_string(),
                ]
            })
        }),
    )
}

/// Diameter analysis of a trajectory.
pub fn diameter_report(traj: &Trajectory64, file: &str) -> DiameterReport {
    let continuum = find_diameters(&traj.first().curve).is_continuum();
    DiameterReport {
        continuum,
        branches: branch_reports(&continue_all(traj)),
        file: file.to_string(),
    }
}

/// NP(2n) scan at one snapshot for `1 ≤ n ≤ n_max`.
pub fn np_rows(t: f64, curve: &Curve64, n_max: usize) -> CliResult<Vec<NpRow>> {
    let (_, margin) = evolute_containment(curve);
    (1..=n_max)
        .map(|n| {
            let op = |what: &str| format!("{what}(n = {n}) at t = {t}");
            let set = np_detect(curve, n).map_err(CliError::numerical(op("np_detect")))?;
            let cert = diffeo_certificate(curve, n).map_err(CliError::numerical(op("diffeo_certificate")))?;
            Ok(NpRow {
                t,
                n,
                count: match set {
                    NormalOrbitSet::Continuum => None,
                    s => Some(s.irreducible().len()),
                },
                min_abs_da: cert.min_abs_da,
                evolute_margin: margin,
            })
        })
        .collect()
}

pub fn np_csv(rows: &[NpRow]) -> String {
    csv_table(
        NP_HEADER,
        rows.iter().map(|r| {
            [
                r.t.to_string(),
                r.n.to_string(),
                r.count.map_or("continuum".to_string(), |c| c.to_string()),
                r.min_abs_da.to_string(),
                r.evolute_margin.to_string(),
            ]
        }),
    )
}

/// Indices of at most `max` snapshots, evenly thinned, always keeping the first and last.
pub fn thinned(len: usize, max: usize) -> Vec<usize> {
    if len <= max || max < 2 {
        return (0..len.min(max.max(1))).collect();
    }
    let mut v: Vec<usize> = (0..max).map(|i| i * (len - 1) / (max - 1)).collect();
    v.dedup();
    v
}

pub fn np_scan(traj: &Trajectory64, n_max: usize, max_snapshots: usize) -> CliResult<Vec<NpRow>> {
    let mut rows = Vec::new();
    for i in thinned(traj.len(), max_snapshots) {
        let s = &traj.states[i];
        rows.extend(np_rows(s.t, &s.curve, n_max)?);
    }
    Ok(rows)
}

pub fn melnikov_csv(samples: &[(f64, f64)]) -> String {
    csv_table(MELNIKOV_HEADER, samples.iter().map(|(t, w)| [*t, *w]))
}

/// Melnikov test for one resonance; writes the sampled potential when admissible.
pub fn melnikov_verdict(a: f64, b: f64, p: usize, q: usize, samples: usize, csv: &Path) -> CliResult<MelnikovVerdict> {
    let e = EllipseParams::new(a, b).map_err(CliError::input)?;
    let op = format!("melnikov ({p}, {})", 2 * q);
    let res = resonance_solve(&e, p, q).map_err(CliError::input)?;
    let Some(res) = res else {
        return Ok(MelnikovVerdict {
            p,
            q,
            status: "not_admissible".into(),
            lambda: None,
            modulus: None,
            delta: None,
            amplitude: None,
            noise_floor: None,
            destroyed: false,
            file: None,
        });
    };
    let c = melnikov_curve(&e, &res, samples).map_err(CliError::numerical(op))?;
    write_text(csv, &melnikov_csv(&c.samples))?;
    Ok(MelnikovVerdict {
        p,
        q,
        status: if c.destroyed { "destroyed" } else { "not_destroyed" }.into(),
        lambda: Some(res.lambda),
        modulus: Some(res.modulus),
        delta: Some(res.period),
        amplitude: Some(c.amplitude),
        noise_floor: Some(c.noise_floor),
        destroyed: c.destroyed,
        file: csv.file_name().map(|f| f.to_string_lossy().into_owned()),
    })
}

pub fn melnikov_file(p: usize, q: usize) -> String {
    format!("melnikov_{p}_{}.csv", 2 * q)
}

/// Runs every configured stage into `out`. On failure a `FAILED` marker holding the error
/// is written next to whatever outputs were already complete.
pub fn run_pipeline(cfg: &RunConfig, out: &Path) -> CliResult<RunReport> {
    let marker = out.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| CliError::Output(format!("{}: {e}", marker.display())))?;
    }
    let result = run_stages(cfg, out);
    if let Err(e) = &result {
        // the error itself is what the caller reports; the marker is best effort
        let _ = write_atomic(&marker, format!("{e}\n").as_bytes());
    }
    result
}

fn run_stages(cfg: &RunConfig, out: &Path) -> CliResult<RunReport> {
    let curve = cfg.curve.build(cfg.harmonics, &cfg.base_dir)?;
    let traj = evolve(&solver_for(cfg), curve, cfg.t_end, cfg.dt)?;
    save_trajectory(&out.join(TRAJECTORY_DIR), &traj).map_err(CliError::output)?;
    let mut notes = Vec::new();

    let diameters = if cfg.analyses.diameters {
        let r = diameter_report(&traj, BRANCHES_FILE);
        write_text(&out.join(BRANCHES_FILE), &branches_csv(&r.branches))?;
        if r.continuum {
            notes.push("diameters: initial curve has constant width, every direction is a diameter".into());
        }
        Some(r)
    } else {
        None
    };

    let np = match &cfg.analyses.np {
        Some(np) => {
            let rows = np_scan(&traj, np.n_max, np.snapshots)?;
            write_text(&out.join(NP_FILE), &np_csv(&rows))?;
            Some(NpReport {
                rows,
                file: NP_FILE.into(),
            })
        }
        None => None,
    };

    let mut melnikov = Vec::new();
    if let Some(m) = &cfg.analyses.melnikov {
        match cfg.curve.ellipse_axes() {
            Some((a, b)) => {
                for &(p, q) in &m.resonances {
                    let v = melnikov_verdict(a, b, p, q, m.samples, &out.join(melnikov_file(p, q)))?;
                    write_json(&out.join(melnikov_file(p, q).replace(".csv", ".json")), &v)?;
                    melnikov.push(v);
                }
            }
            None => notes.push("melnikov: skipped, the initial curve is not a non-circular ellipse (no hyperbolic caustics)".into()),
        }
    }

    let report = RunReport {
        schema: REPORT_SCHEMA.into(),
        config: cfg.clone(),
        trajectory: TRAJECTORY_DIR.into(),
        diagnostics: diagnostics_rows(&traj),
        diameters,
        np,
        melnikov,
        notes,
    };
    write_json(&out.join(REPORT_FILE), &report)?;
    Ok(report)
}

/// Output root: the explicit directory, else the config's, else `out`, resolved against
/// `root` when relative.
pub fn resolve_out(root: Option<&Path>, explicit: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    let p = explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    match root {
        Some(r) if p.is_relative() => r.join(p),
        _ => p,
    }
}
