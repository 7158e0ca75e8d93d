use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ovalflow_cli::config::{parse_config, CurveSpec, RunConfig};
use ovalflow_cli::error::{CliError, CliResult};
use ovalflow_cli::figures::{emit_figures, phase_portrait};
use ovalflow_cli::pipeline::{
    branches_csv, diameter_report, evolve, melnikov_verdict, np_csv, np_scan, resolve_out, run_pipeline, write_json,
    write_text, RunReport,
};
use ovalflow_core::billiard::iterate;
use ovalflow_core::io::{csv_table, load_curve, load_trajectory, save_trajectory};
use ovalflow_core::normal::envelope;
use ovalflow_core::{Curve64, FlowSolver, PhasePoint};

#[derive(Debug, Parser)]
#[command(name = "ovalflow", version, about = "Curve-shortening flow of convex ovals and their billiard dynamics")]
struct Cli {
    /// Root that relative output paths are resolved against.
    #[arg(long, global = true, env = "OVALFLOW_OUT")]
    out_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A curve JSON file or a constructor such as `ellipse(1.25,0.8)` or `circle(1)`.
#[derive(Debug, Args)]
struct CurveArg {
    /// Curve JSON file or constructor text.
    #[arg(long, visible_alias = "input")]
    curve: String,
    /// Harmonic count used when building from a constructor.
    #[arg(long, default_value_t = 64)]
    harmonics: usize,
}

impl CurveArg {
    fn load(&self) -> CliResult<Curve64> {
        let path = Path::new(&self.curve);
        if path.is_file() {
            return load_curve(path).map(|(c, _)| c).map_err(CliError::input);
        }
        let spec = CurveSpec::parse_text(&self.curve)
            .map_err(|e| CliError::Config(format!("--curve: not a file and not a constructor: {e}")))?;
        spec.build(self.harmonics, Path::new("."))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a curve under the normalized flow and persist the snapshots.
    Evolve {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Flow time between stored snapshots.
        #[arg(long, default_value_t = 0.05)]
        stride: f64,
        #[arg(long, default_value = "traj")]
        out: PathBuf,
    },
    /// Iterate the billiard map from one phase point (CSV: step,theta,phi,chord).
    Orbit {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value = "orbit.csv")]
        out: PathBuf,
    },
    /// Phase-portrait scatter of the billiard map as SVG.
    Portrait {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "portrait.svg")]
        out: PathBuf,
    },
    /// Continue the period-two orbits along a stored trajectory.
    Diameters {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, default_value = "branches.csv")]
        out: PathBuf,
    },
    /// Scan for normal periodic orbits along a stored trajectory.
    Np {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Largest number of snapshots scanned, evenly thinned.
        #[arg(long, default_value_t = 25)]
        snapshots: usize,
        #[arg(long, default_value = "np_report.csv")]
        out: PathBuf,
    },
    /// Envelope of the m-th reflected normals (CSV: theta,Ex,Ey,margin,singular).
    Envelope {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value = "env.csv")]
        out: PathBuf,
    },
    /// Melnikov potential of a resonant caustic family of an ellipse, plus a JSON verdict.
    Melnikov {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Half the period: the orbit has 2q bounces.
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value = "melnikov.csv")]
        out: PathBuf,
    },
    /// Full pipeline from a JSON run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG figures for a finished run directory.
    Figures {
        #[arg(long)]
        run: PathBuf,
        /// Defaults to `<run>/figures`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let root = cli.out_root.as_deref();
    let out_path = |p: &Path| resolve_out(root, Some(p), None);
    match cli.command {
        Command::Evolve { curve, t_end, dt, stride, out } => {
            if !(t_end > 0.0 && dt > 0.0 && stride > 0.0) {
                return Err(CliError::Config("t_end, dt and stride must be positive".into()));
            }
            let solver = FlowSolver {
                snapshot_stride: stride,
                ..FlowSolver::default()
            };
            let traj = evolve(&solver, curve.load()?, t_end, dt)?;
            let dir = out_path(&out);
            save_trajectory(&dir, &traj).map_err(CliError::output)?;
            println!("{} snapshots written to {}", traj.len(), dir.display());
        }
        Command::Orbit { curve, theta, phi, steps, out } => {
            let c = curve.load()?;
            let start = PhasePoint::new(theta, phi).map_err(CliError::input)?;
            let records = iterate(&c, start, steps).map_err(CliError::numerical("orbit"))?;
            let rows = std::iter::once([0.0, theta, phi, 0.0]).chain(
                records
                    .iter()
                    .enumerate()
                    .map(|(k, r)| [(k + 1) as f64, r.to.theta, r.to.phi, r.chord]),
            );
            write_text(&out_path(&out), &csv_table("step,theta,phi,chord", rows))?;
        }
        Command::Portrait { curve, samples, iters, seed, out } => {
            let doc = phase_portrait(&curve.load()?, samples, iters, seed, "Phase portrait");
            write_text(&out_path(&out), &doc.to_string())?;
        }
        Command::Diameters { traj, out } => {
            let t = load_trajectory::<f64>(&traj).map_err(CliError::input)?;
            let r = diameter_report(&t, "");
            if r.continuum {
                println!("initial curve has constant width: every direction is a diameter");
            }
            write_text(&out_path(&out), &branches_csv(&r.branches))?;
            for b in &r.branches {
                println!("branch {}: {} samples, {}", b.id, b.rows.len(), b.terminal_event);
            }
        }
        Command::Np { traj, n_max, snapshots, out } => {
            if n_max == 0 || snapshots == 0 {
                return Err(CliError::Config("--n-max and --snapshots must be positive".into()));
            }
            let t = load_trajectory::<f64>(&traj).map_err(CliError::input)?;
            write_text(&out_path(&out), &np_csv(&np_scan(&t, n_max, snapshots)?))?;
        }
        Command::Envelope { curve, m, samples, out } => {
            if m == 0 || samples == 0 {
                return Err(CliError::Config("--m and --samples must be positive".into()));
            }
            let c = curve.load()?;
            let mut rows = Vec::with_capacity(samples);
            for i in 0..samples {
                let theta = std::f64::consts::TAU * i as f64 / samples as f64;
                let e = envelope(&c, theta, m).map_err(CliError::numerical(format!("envelope at theta = {theta}")))?;
                rows.push([
                    theta.to_string(),
                    e.point.x.to_string(),
                    e.point.y.to_string(),
                    e.inside_margin.to_string(),
                    e.singular.to_string(),
                ]);
            }
            write_text(&out_path(&out), &csv_table("theta,Ex,Ey,margin,singular", rows))?;
        }
        Command::Melnikov { a, b, p, q, samples, out } => {
            if samples < 16 || p == 0 || q == 0 {
                return Err(CliError::Config("need p, q ≥ 1 and at least 16 samples".into()));
            }
            let csv = out_path(&out);
            let v = melnikov_verdict(a, b, p, q, samples, &csv)?;
            write_json(&csv.with_extension("json"), &v)?;
            println!("({p}, {}): {}", 2 * q, v.status);
        }
        Command::Run { config, out } => {
            let cfg: RunConfig = parse_config(&config)?;
            let dir = resolve_out(root, out.as_deref(), Some(&cfg));
            let report = run_pipeline(&cfg, &dir)?;
            for note in &report.notes {
                println!("note: {note}");
            }
            println!("report written to {}", dir.join("report.json").display());
        }
        Command::Figures { run, out } => {
            let report = RunReport::load(&run)?;
            let dir = match out {
                Some(o) => out_path(&o),
                None => run.join("figures"),
            };
            let summary = emit_figures(&report, &run, &dir)?;
            for note in &summary.notes {
                println!("note: {note}");
            }
            println!("{} figures written to {}", summary.files.len(), dir.display());
        }
    }
    Ok(())
}
