//! Flag and file configuration, merged into one resolved record that every
//! artifact embeds verbatim.
//!
//! The config file is plain JSON with the same names as the long flags
//! (`lambda_t` for `--lambda-t`), plus two structured fields that have no
//! flag form: `spectral` (fluctuator-ensemble distribution) and `segments`
//! (gate-sequence description). Flags override file values.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use telegraph_exchange::compose::{DiscreteComponent, SpectralDistribution, SpectralKind};
use telegraph_exchange::sequence::{named_unitary, ProcessSegment};
use telegraph_exchange::superop::Form;
use telegraph_exchange::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormArg {
    Exact,
    Approx,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Exact => Form::Exact,
            FormArg::Approx => Form::Approx,
        }
    }
}

/// Flags shared by every subcommand; unset values fall back to the config
/// file, then to per-command defaults.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Fluctuator coupling strength
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Bare exchange frequency
    #[arg(long, allow_negative_numbers = true)]
    pub j0: Option<f64>,

    /// Fluctuator switching rate
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    /// Evolution time (sweep commands treat it as the grid end point)
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,

    /// Dimensionless rate-times-duration product; sets the rate to
    /// `lambda_t / t` when `--lambda` is absent
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_t: Option<f64>,

    /// Ensemble size (trajectories per Monte Carlo estimate)
    #[arg(long)]
    pub n: Option<u64>,

    /// Master seed; per-point streams derive from it deterministically
    #[arg(long)]
    pub seed: Option<u64>,

    /// Artifact path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Closed form used for scalar comparison metrics
    #[arg(long, value_enum)]
    pub form: Option<FormArg>,

    /// Attach a Monte Carlo oracle with this many trajectories
    #[arg(long, value_name = "N")]
    pub mc_oracle: Option<u64>,

    /// Grid size for tabulating commands
    #[arg(long)]
    pub points: Option<usize>,

    /// Attach the deterministic quadrature oracle column
    #[arg(long)]
    pub quadrature: bool,

    /// JSON config file; flags override its fields
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

/// File-side mirror of [`CommonArgs`]. Unknown keys are rejected so typos
/// surface as validation errors naming the field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    j0: Option<f64>,
    lambda: Option<f64>,
    t: Option<f64>,
    lambda_t: Option<f64>,
    n: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    form: Option<FormArg>,
    mc_oracle: Option<u64>,
    points: Option<usize>,
    quadrature: Option<bool>,
    spectral: Option<SpectralConfig>,
    segments: Option<Vec<SegmentConfig>>,
}

/// Fully resolved run configuration; serialized into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub command: String,
    pub alpha: f64,
    pub j0: f64,
    pub lambda: f64,
    pub t: f64,
    /// Resolved product `lambda * t` (or the explicit `--lambda-t` value).
    pub lambda_t: f64,
    pub n: u64,
    pub seed: u64,
    pub form: FormArg,
    pub points: usize,
    pub quadrature: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_oracle: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentConfig>>,
}

pub fn resolve(command: &str, args: &CommonArgs) -> Result<Resolved> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("config: cannot read {}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text).map_err(|e| anyhow!("config: {e}"))?
        }
        None => FileConfig::default(),
    };

    let t = args.t.or(file.t).unwrap_or(1.0);
    if !(t.is_finite() && t >= 0.0) {
        bail!("t must be finite and >= 0, got {t}");
    }
    // an explicit rate wins over the product; with neither, both default to
    // rate 1 so lambda_t tracks t
    let (lambda, lambda_t) = match (args.lambda.or(file.lambda), args.lambda_t.or(file.lambda_t)) {
        (Some(l), _) => (l, l * t),
        (None, Some(y)) => {
            if t == 0.0 {
                bail!("t must be > 0 when the rate is given via lambda_t, got {t}");
            }
            (y / t, y)
        }
        (None, None) => (1.0, t),
    };

    let points = args.points.or(file.points).unwrap_or(match command {
        "pdf" => 201,
        _ => 101,
    });
    if points == 0 {
        bail!("points must be >= 1, got 0");
    }
    let n = args.n.or(file.n).unwrap_or(if command == "reproduce-fig1" {
        20_000
    } else {
        10_000
    });

    Ok(Resolved {
        command: command.to_string(),
        alpha: args.alpha.or(file.alpha).unwrap_or(1.0),
        j0: args.j0.or(file.j0).unwrap_or(1.0),
        lambda,
        t,
        lambda_t,
        n,
        seed: args.seed.or(file.seed).unwrap_or(42),
        form: args.form.or(file.form).unwrap_or(FormArg::Exact),
        points,
        quadrature: args.quadrature || file.quadrature.unwrap_or(false),
        mc_oracle: args.mc_oracle.or(file.mc_oracle),
        out: args.out.clone().or(file.out),
        spectral: file.spectral,
        segments: file.segments,
    })
}

/// Spectral-distribution description for `compose`:
/// `{"kind": "...", "alpha_spec": ..., "lambda_min": ..., "lambda_max": ...,
/// "N": ...}` with `kind` one of `discrete`, `uniform-lambda`,
/// `log-uniform-lambda`; `discrete` takes `components`
/// (`[{alpha, lambda, weight}, ...]`) instead of the three scalars.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_spec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<DiscreteComponent>>,
}

impl SpectralConfig {
    pub fn to_distribution(&self) -> Result<SpectralDistribution> {
        let scalar = |v: Option<f64>, field: &str| {
            v.ok_or_else(|| anyhow!("spectral.{field} must be present for kind {:?}", self.kind))
        };
        let kind = match self.kind.as_str() {
            "discrete" => SpectralKind::Discrete {
                components: self.components.clone().ok_or_else(|| {
                    anyhow!("spectral.components must be present for kind \"discrete\"")
                })?,
            },
            "uniform-lambda" => SpectralKind::UniformLambda {
                alpha: scalar(self.alpha_spec, "alpha_spec")?,
                lambda_min: scalar(self.lambda_min, "lambda_min")?,
                lambda_max: scalar(self.lambda_max, "lambda_max")?,
            },
            "log-uniform-lambda" => SpectralKind::LogUniformLambda {
                alpha: scalar(self.alpha_spec, "alpha_spec")?,
                lambda_min: scalar(self.lambda_min, "lambda_min")?,
                lambda_max: scalar(self.lambda_max, "lambda_max")?,
            },
            other => bail!(
                "spectral.kind must be one of \"discrete\", \"uniform-lambda\", \
                 \"log-uniform-lambda\", got {other:?}"
            ),
        };
        Ok(SpectralDistribution::new(kind, self.n)?)
    }
}

/// One element of the `segments` list:
/// `{"type": "noise", "t": ...}` or
/// `{"type": "gate", "unitary": "X1" | [[..re/im pairs..]], "t": 0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SegmentConfig {
    Noise {
        t: f64,
    },
    Gate {
        unitary: UnitarySpec,
        #[serde(default)]
        t: f64,
    },
}

/// A gate unitary: either a built-in name (`X1`, `Y1`, `Z1`, `H1`, likewise
/// `..2` for the second spin, or `CZ`) or an explicit 4x4 matrix of
/// `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Named(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl UnitarySpec {
    fn build(&self) -> Result<Array2<C64>> {
        match self {
            UnitarySpec::Named(name) => named_unitary(name).ok_or_else(|| {
                anyhow!(
                    "unitary: unknown gate name {name:?} (expected X1, Y1, Z1, H1, \
                     X2, Y2, Z2, H2, or CZ, or a 4x4 matrix of [re, im] pairs)"
                )
            }),
            UnitarySpec::Matrix(rows) => {
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                    bail!("unitary: matrix form must be 4 rows of 4 [re, im] pairs");
                }
                Ok(Array2::from_shape_fn((4, 4), |(i, j)| {
                    C64::new(rows[i][j][0], rows[i][j][1])
                }))
            }
        }
    }
}

pub fn to_segments(list: &[SegmentConfig]) -> Result<Vec<ProcessSegment>> {
    list.iter()
        .enumerate()
        .map(|(i, cfg)| {
            let seg: Result<ProcessSegment> = match cfg {
                SegmentConfig::Noise { t } => Ok(ProcessSegment::noisy(*t)?),
                SegmentConfig::Gate { unitary, t } => {
                    let u = unitary.build()?;
                    Ok(ProcessSegment::gate_with_duration(&u, *t)?)
                }
            };
            seg.with_context(|| format!("segments[{i}]"))
        })
        .collect()
}
