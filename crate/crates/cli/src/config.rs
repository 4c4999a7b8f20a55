//! Problem and initial-state sources, and the resolved experiment config.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tcpgds_core::io::{ProblemFile, TensorFile};
use tcpgds_core::{random_diagonal_problem, ActivationSpecF64, IntegratorConfigF64, TcpProblemF64};

use crate::builtin::{load_builtin, Builtin};

/// Seed used when neither the command line nor `TCPGDS_SEED` gives one.
pub const DEFAULT_SEED: u64 = 1;
pub const SEED_ENV: &str = "TCPGDS_SEED";

/// `TCPGDS_SEED` if set, else [`DEFAULT_SEED`].
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV} must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Comma-separated reals, optionally wrapped in parentheses or brackets.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let body = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    if body.trim().is_empty() {
        bail!("empty vector");
    }
    body.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().with_context(|| format!("`{t}` is not a number"))?;
            if !v.is_finite() {
                bail!("`{t}` is not finite");
            }
            Ok(v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSource {
    Builtin { name: Builtin },
    File { path: PathBuf },
    Diag { order: usize, dim: usize, seed: u64 },
}

impl FromStr for ProblemSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .with_context(|| format!("problem `{s}` must look like builtin:NAME, file:PATH or diag:m=..,n=..,seed=.."))?;
        match kind.trim() {
            "builtin" => Ok(ProblemSource::Builtin { name: rest.parse()? }),
            "file" if !rest.is_empty() => Ok(ProblemSource::File { path: rest.into() }),
            "diag" => {
                let (mut m, mut n, mut seed) = (None, None, None);
                for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
                    let (k, v) = kv.split_once('=').with_context(|| format!("expected key=value, got `{kv}`"))?;
                    let v: u64 = v.trim().parse().with_context(|| format!("`{v}` is not an integer"))?;
                    let slot = match k.trim() {
                        "m" => &mut m,
                        "n" => &mut n,
                        "seed" => &mut seed,
                        other => bail!("unknown diag key `{other}`"),
                    };
                    if slot.replace(v).is_some() {
                        bail!("duplicate diag key `{k}`");
                    }
                }
                let order = m.context("diag needs m")? as usize;
                let dim = n.context("diag needs n")? as usize;
                if order < 2 || dim < 1 {
                    bail!("diag needs m >= 2 and n >= 1");
                }
                Ok(ProblemSource::Diag {
                    order,
                    dim,
                    seed: seed.context("diag needs seed")?,
                })
            }
            other => bail!("unknown problem kind `{other}`"),
        }
    }
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSource::Builtin { name } => write!(f, "builtin:{name}"),
            ProblemSource::File { path } => write!(f, "file:{}", path.display()),
            ProblemSource::Diag { order, dim, seed } => write!(f, "diag:m={order},n={dim},seed={seed}"),
        }
    }
}

/// A loaded problem; `solution` is known only for generated instances.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: TcpProblemF64,
    pub solution: Option<Vec<f64>>,
}

impl ProblemSource {
    /// Loads the problem. `q` replaces the source's own vector where one
    /// exists; builtins fall back to their default `q`.
    pub fn load(&self, q: Option<&[f64]>) -> Result<LoadedProblem> {
        match self {
            ProblemSource::Builtin { name } => {
                let q = q.map_or_else(|| name.default_q(), <[f64]>::to_vec);
                Ok(LoadedProblem {
                    problem: load_builtin(*name, &q)?,
                    solution: None,
                })
            }
            ProblemSource::File { path } => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                let file: ProblemFile = match serde_json::from_str::<ProblemFile>(&text) {
                    Ok(mut pf) => {
                        if let Some(q) = q {
                            pf.q = q.to_vec();
                        }
                        pf
                    }
                    Err(problem_err) => {
                        let tensor: TensorFile = serde_json::from_str(&text).map_err(|_| problem_err).with_context(|| {
                            format!("{} is neither a problem file nor a tensor file", path.display())
                        })?;
                        let q = q.with_context(|| format!("{} holds only a tensor; pass --q", path.display()))?;
                        ProblemFile { tensor, q: q.to_vec() }
                    }
                };
                let problem = file
                    .to_problem()
                    .with_context(|| format!("invalid problem in {}", path.display()))?;
                Ok(LoadedProblem { problem, solution: None })
            }
            ProblemSource::Diag { order, dim, seed } => {
                if q.is_some() {
                    bail!("diag problems draw their own q; drop --q");
                }
                let (problem, solution) = random_diagonal_problem(*order, *dim, *seed)?;
                Ok(LoadedProblem {
                    problem,
                    solution: Some(solution),
                })
            }
        }
    }

    pub fn default_activations(&self) -> Vec<ActivationSpecF64> {
        match self {
            ProblemSource::Builtin { name } => name.default_activations(),
            _ => vec![ActivationSpecF64::linear()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum X0Source {
    Vector { values: Vec<f64> },
    /// Componentwise uniform on `[0, 1)` from a seeded generator.
    Seed { seed: u64 },
}

impl FromStr for X0Source {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("seed:") {
            Some(seed) => Ok(X0Source::Seed {
                seed: seed.trim().parse().with_context(|| format!("bad seed `{seed}`"))?,
            }),
            None => Ok(X0Source::Vector { values: parse_vector(s)? }),
        }
    }
}

impl X0Source {
    pub fn resolve(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            X0Source::Vector { values } => {
                if values.len() != dim {
                    bail!("x0 has length {}, problem dimension is {dim}", values.len());
                }
                Ok(values.clone())
            }
            X0Source::Seed { seed } => Ok(uniform_x0(dim, *seed)),
        }
    }
}

pub fn uniform_x0(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.random_range(0.0..1.0)).collect()
}

/// Everything that determines a sweep, before defaults are applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub q: Option<Vec<f64>>,
    /// `None` selects the problem's default list.
    pub activations: Option<Vec<ActivationSpecF64>>,
    pub gamma: f64,
    pub integrator: IntegratorConfigF64,
    pub x0: X0Source,
    pub out: PathBuf,
}

/// The config after defaults and sources are resolved; written to
/// `summary.json`. The output directory is left out so that identical
/// experiments produce identical files wherever they are written.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub problem: String,
    pub order: usize,
    pub dim: usize,
    pub q: Vec<f64>,
    pub activations: Vec<String>,
    pub gamma: f64,
    pub integrator: IntegratorConfigF64,
    pub x0_source: X0Source,
    pub x0: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
}

/// A config ready to run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ResolvedConfig,
    pub problem: TcpProblemF64,
    pub activations: Vec<ActivationSpecF64>,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let loaded = self.problem.load(self.q.as_deref())?;
        let activations = self
            .activations
            .clone()
            .unwrap_or_else(|| self.problem.default_activations());
        if activations.is_empty() {
            bail!("at least one activation is required");
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            bail!("gamma must be positive and finite, got {}", self.gamma);
        }
        self.integrator.validate()?;
        let p = &loaded.problem;
        let x0 = self.x0.resolve(p.dim())?;
        Ok(Resolved {
            config: ResolvedConfig {
                problem: self.problem.to_string(),
                order: p.order(),
                dim: p.dim(),
                q: p.q().to_vec(),
                activations: activations.iter().map(ToString::to_string).collect(),
                gamma: self.gamma,
                integrator: self.integrator,
                x0_source: self.x0.clone(),
                x0,
                known_solution: loaded.solution,
            },
            problem: loaded.problem,
            activations,
        })
    }
}
