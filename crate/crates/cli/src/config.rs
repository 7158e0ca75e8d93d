//! Run configuration: a JSON document with defaults for everything except the curve and
//! the end time. Unknown keys are rejected with their path.

use std::fs;
use std::path::{Path, PathBuf};

use ovalflow_core::io::load_curve;
use ovalflow_core::{Curve64, SupportCurve};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Initial curve, written either as an object (`{"ellipse": {"a": 1.25, "b": 0.8}}`) or as
/// shorthand text (`"ellipse(1.25, 0.8)"`, `"circle(1)"`, `"file(c.json)"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    ConstantWidth {
        width: f64,
        /// `[n, cos, sin]` rows over odd `n ≥ 3`.
        harmonics: Vec<(usize, f64, f64)>,
    },
    File {
        path: PathBuf,
    },
}

impl CurveSpec {
    pub fn parse_text(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(|| format!("expected name(args), got `{s}`"))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("missing `)` in `{s}`"))?
            .trim();
        let nums = || -> Result<Vec<f64>, String> {
            args.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
                .collect()
        };
        match name.trim() {
            "circle" => match nums()?[..] {
                [radius] => Ok(CurveSpec::Circle { radius }),
                _ => Err("circle takes one argument".into()),
            },
            "ellipse" => match nums()?[..] {
                [a, b] => Ok(CurveSpec::Ellipse { a, b }),
                _ => Err("ellipse takes two arguments".into()),
            },
            "file" => Ok(CurveSpec::File { path: PathBuf::from(args) }),
            other => Err(format!("unknown curve `{other}`")),
        }
    }

    /// Semi-axes when the curve is an ellipse with distinct axes.
    pub fn ellipse_axes(&self) -> Option<(f64, f64)> {
        match *self {
            CurveSpec::Ellipse { a, b } if a > b => Some((a, b)),
            _ => None,
        }
    }

    pub fn build(&self, harmonics: usize, base: &Path) -> CliResult<Curve64> {
        let c = match self {
            CurveSpec::Circle { radius } => SupportCurve::circle(*radius, harmonics),
            CurveSpec::Ellipse { a, b } => SupportCurve::ellipse(*a, *b, harmonics),
            CurveSpec::ConstantWidth { width, harmonics: odd } => {
                SupportCurve::constant_width(*width, odd, harmonics)
            }
            CurveSpec::File { path } => load_curve(&base.join(path)).map(|(c, _)| c),
        };
        c.map_err(|e| CliError::Config(format!("curve: {e}")))
    }

    fn validate(&self, base: &Path) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("curve: {name} must be positive, got {v}"))
            }
        };
        match self {
            CurveSpec::Circle { radius } => positive("radius", *radius),
            CurveSpec::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?;
                if a < b {
                    return Err(format!("curve: ellipse needs a ≥ b, got a = {a}, b = {b}"));
                }
                Ok(())
            }
            CurveSpec::ConstantWidth { width, .. } => positive("width", *width),
            CurveSpec::File { path } => {
                let p = base.join(path);
                if p.is_file() {
                    Ok(())
                } else {
                    Err(format!("curve: file {} does not exist", p.display()))
                }
            }
        }
    }
}

fn de_curve<'de, D: serde::Deserializer<'de>>(d: D) -> Result<CurveSpec, D::Error> {
    use serde::de::Error;
    let v = serde_json::Value::deserialize(d)?;
    match v {
        serde_json::Value::String(s) => CurveSpec::parse_text(&s).map_err(D::Error::custom),
        other => serde_json::from_value(other).map_err(D::Error::custom),
    }
}

fn default_harmonics() -> usize {
    64
}
fn default_dt() -> f64 {
    1e-3
}
fn default_stride() -> f64 {
    0.05
}
fn default_true() -> bool {
    true
}
fn default_n_max() -> usize {
    3
}
fn default_np_snapshots() -> usize {
    25
}
fn default_resonances() -> Vec<(usize, usize)> {
    vec![(1, 2)]
}
fn default_samples() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpConfig {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Upper bound on the number of snapshots analyzed (evenly thinned).
    #[serde(default = "default_np_snapshots")]
    pub snapshots: usize,
}

impl Default for NpConfig {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            snapshots: default_np_snapshots(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MelnikovConfig {
    /// `(p, q)` pairs, resonance type `(p, 2q)`.
    #[serde(default = "default_resonances")]
    pub resonances: Vec<(usize, usize)>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for MelnikovConfig {
    fn default() -> Self {
        Self {
            resonances: default_resonances(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default = "default_true")]
    pub diameters: bool,
    #[serde(default = "Some_default")]
    pub np: Option<NpConfig>,
    #[serde(default = "Some_default")]
    pub melnikov: Option<MelnikovConfig>,
}

#[allow(non_snake_case)]
fn Some_default<T: Default>() -> Option<T> {
    Some(T::default())
}

impl Default for Analyses {
    fn default() -> Self {
        Self {
            diameters: true,
            np: Some(NpConfig::default()),
            melnikov: Some(MelnikovConfig::default()),
        }
    }
}

/// Overrides of module defaults; absent keys keep the library values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed `|area − π|` after each flow step.
    pub area: Option<f64>,
    /// Substep bound `c` in `dt ≤ c·min R² / N²`.
    pub stability: Option<f64>,
    /// Relative cutoff for dropping trailing harmonics during the flow.
    pub truncation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(deserialize_with = "de_curve")]
    pub curve: CurveSpec,
    #[serde(default = "default_harmonics")]
    pub harmonics: usize,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: f64,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Seed of every randomized scan (phase-portrait starting points).
    #[serde(default)]
    pub seed: u64,
    /// Directory relative paths are resolved against; the config file's directory.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let err = |m: String| Err(CliError::Config(m));
        self.curve.validate(&self.base_dir).map_err(CliError::Config)?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return err(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt > 0.0) || !(self.stride > 0.0) {
            return err("dt and stride must be positive".into());
        }
        if self.harmonics < 4 {
            return err(format!("harmonics must be at least 4, got {}", self.harmonics));
        }
        let t = &self.tolerances;
        for (name, v) in [("area", t.area), ("stability", t.stability), ("truncation", t.truncation)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return err(format!("tolerances.{name} must be positive, got {v}"));
                }
            }
        }
        if let Some(np) = &self.analyses.np {
            if np.n_max == 0 || np.snapshots == 0 {
                return err("analyses.np: n_max and snapshots must be positive".into());
            }
        }
        if let Some(m) = &self.analyses.melnikov {
            if m.samples < 16 {
                return err(format!("analyses.melnikov.samples must be at least 16, got {}", m.samples));
            }
        }
        Ok(())
    }
}

pub fn parse_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    RunConfig::from_json(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> CliResult<RunConfig> {
        RunConfig::from_json(s, Path::new("."))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(r#"{"curve": "circle(1)", "t_end": 1}"#).unwrap();
        assert_eq!(c.curve, CurveSpec::Circle { radius: 1.0 });
        assert_eq!((c.dt, c.stride, c.harmonics), (1e-3, 0.05, 64));
        assert!(c.analyses.diameters);
        assert_eq!(c.analyses.melnikov.unwrap().resonances, vec![(1, 2)]);
    }

    #[test]
    fn object_curve_form() {
        let c = parse(r#"{"curve": {"ellipse": {"a": 1.25, "b": 0.8}}, "t_end": 2, "analyses": {"np": null}}"#).unwrap();
        assert_eq!(c.curve.ellipse_axes(), Some((1.25, 0.8)));
        assert!(c.analyses.np.is_none());
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse(r#"{"curve": "circle(1)", "t_end": 1, "speling": 3}"#).unwrap_err();
        assert!(e.to_string().contains("speling"), "{e}");
        let e = parse(r#"{"curve": "circle(1)", "t_end": 1, "analyses": {"np": {"n_maxx": 2}}}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("analyses.np") && msg.contains("n_maxx"), "{msg}");
    }

    #[test]
    fn rejections() {
        for bad in [
            r#"{"curve": "ellipse(0.8, 1.25)", "t_end": 1}"#,
            r#"{"curve": "circle(1)", "t_end": 0}"#,
            r#"{"curve": "circle(1)"}"#,
            r#"{"curve": "file(missing.json)", "t_end": 1}"#,
            r#"{"curve": "circle(1)", "t_end": 1, "tolerances": {"area": -1}}"#,
            r#"{"curve": "hexagon(1)", "t_end": 1}"#,
        ] {
            assert!(matches!(parse(bad), Err(CliError::Config(_))), "{bad}");
        }
    }
}
