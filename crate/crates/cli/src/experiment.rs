//! Activation sweeps: one integration per activation, CSV per run, JSON summary.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tcpgds_core::{integrate, ActivationSpecF64, GdsModelF64, Status, TrajectoryF64, Violation};

use crate::config::{ExperimentConfig, Resolved, ResolvedConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub tol: f64,
    pub solution: bool,
    pub violations: Vec<Violation<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub activation: String,
    pub label: String,
    pub converged: bool,
    pub status: Status,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Scaled time at which `res_tol` was reached; absent if it never was.
    pub tau_to_tol: Option<f64>,
    pub final_time: f64,
    pub final_residual: f64,
    pub final_state: Vec<f64>,
    /// Checked at `10 · res_tol`.
    pub verification: Verification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ResolvedConfig,
    pub runs: Vec<RunSummary>,
}

impl Summary {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.converged)
    }
}

/// Integrates one activation and verifies the endpoint.
pub fn run_one(resolved: &Resolved, act: &ActivationSpecF64) -> Result<(RunSummary, TrajectoryF64)> {
    let cfg = &resolved.config;
    let model = GdsModelF64::new(resolved.problem.clone(), *act, cfg.gamma)?;
    let traj = integrate(&model, &cfg.x0, &cfg.integrator)?;
    let tol = 10.0 * cfg.integrator.res_tol;
    let violations = match resolved.problem.verify_solution(traj.final_state(), tol)? {
        tcpgds_core::Verdict::Solution => Vec::new(),
        tcpgds_core::Verdict::Violations(v) => v,
    };
    let summary = RunSummary {
        activation: act.to_string(),
        label: act.label(),
        converged: traj.converged(),
        status: traj.status,
        steps: traj.steps,
        rejected_steps: traj.rejected_steps,
        tau_to_tol: traj.converged().then(|| traj.final_time()),
        final_time: traj.final_time(),
        final_residual: traj.final_residual(),
        final_state: traj.final_state().to_vec(),
        verification: Verification {
            tol,
            solution: violations.is_empty(),
            violations,
        },
        diagnostic: traj.diagnostic.clone(),
    };
    Ok((summary, traj))
}

/// Runs every activation in parallel and writes `<label>.csv` per run plus
/// `summary.json` into `cfg.out`. Results keep the input order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Summary> {
    let resolved = cfg.resolve()?;
    let mut seen = HashSet::new();
    for act in &resolved.activations {
        if !seen.insert(act.label()) {
            bail!("activation `{act}` appears twice");
        }
    }
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;

    let runs = resolved
        .activations
        .par_iter()
        .map(|act| {
            let (summary, traj) = run_one(&resolved, act)?;
            let path = cfg.out.join(format!("{}.csv", summary.label));
            let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
            traj.write_csv(BufWriter::new(file))
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(summary)
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = Summary {
        config: resolved.config,
        runs,
    };
    write_summary(&cfg.out, &summary)?;
    Ok(summary)
}

fn write_summary(dir: &Path, summary: &Summary) -> Result<()> {
    let path = dir.join("summary.json");
    let mut out = BufWriter::new(File::create(&path).with_context(|| format!("cannot write {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, summary)?;
    out.write_all(b"\n")?;
    out.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Aligned text table, one row per run in input order.
pub fn report_table(runs: &[RunSummary]) -> String {
    let header = ["activation", "converged", "steps", "tau-to-tol", "final Res"];
    let rows: Vec<[String; 5]> = runs
        .iter()
        .map(|r| {
            [
                r.activation.clone(),
                r.converged.to_string(),
                r.steps.to_string(),
                r.tau_to_tol.map_or_else(|| "-".to_string(), |t| format!("{t:.6e}")),
                format!("{:.3e}", r.final_residual),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 5]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join(" | ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    out.push('\n');
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4]]));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::X0Source;
    use tcpgds_core::IntegratorConfigF64;

    fn config(problem: &str, x0: &str, out: &Path) -> ExperimentConfig {
        ExperimentConfig {
            problem: problem.parse().unwrap(),
            q: None,
            activations: None,
            gamma: 1e6,
            integrator: IntegratorConfigF64::default(),
            x0: x0.parse::<X0Source>().unwrap(),
            out: out.to_path_buf(),
        }
    }

    #[test]
    fn eg2_default_sweep_reaches_origin() {
        let dir = tempfile::tempdir().unwrap();
        let s = run_experiment(&config("builtin:eg2", "seed:3", dir.path())).unwrap();
        assert_eq!(s.runs.len(), 4);
        assert!(s.all_converged());
        for r in &s.runs {
            assert!(r.final_state.iter().all(|v| v.abs() <= 1e-6), "{}", r.activation);
            assert!(r.verification.solution);
            assert!(dir.path().join(format!("{}.csv", r.label)).exists());
        }
        assert!(dir.path().join("summary.json").exists());
        let table = report_table(&s.runs);
        assert_eq!(table.lines().count(), 6);
    }

    #[test]
    fn eg3_from_published_start() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config("builtin:eg3", "0.1,0.5", dir.path());
        cfg.activations = Some(vec![ActivationSpecF64::linear()]);
        let s = run_experiment(&cfg).unwrap();
        let x = &s.runs[0].final_state;
        assert!(s.runs[0].converged);
        assert!(x[0].abs() <= 1e-5 && (x[1] - 1.0).abs() <= 1e-5, "{x:?}");
    }

    #[test]
    fn diag_matches_generator() {
        let dir = tempfile::tempdir().unwrap();
        let s = run_experiment(&config("diag:m=4,n=3,seed=42", "seed:1", dir.path())).unwrap();
        let sol = s.config.known_solution.clone().unwrap();
        for (a, b) in s.runs[0].final_state.iter().zip(&sol) {
            assert!((a - b).abs() <= 1e-5);
        }
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config("builtin:eg2", "seed:1", dir.path());
        cfg.activations = Some(vec![ActivationSpecF64::linear(), ActivationSpecF64::linear()]);
        assert!(run_experiment(&cfg).is_err());
    }

    fn fake(activation: &str, converged: bool, steps: usize, res: f64) -> RunSummary {
        RunSummary {
            activation: activation.into(),
            label: activation.into(),
            converged,
            status: if converged { Status::Converged } else { Status::HorizonReached },
            steps,
            rejected_steps: 0,
            tau_to_tol: converged.then_some(1.5),
            final_time: 1.5,
            final_residual: res,
            final_state: vec![0.0],
            verification: Verification {
                tol: 1e-7,
                solution: converged,
                violations: vec![],
            },
            diagnostic: None,
        }
    }

    #[test]
    fn table_layout() {
        let t = report_table(&[fake("lin", true, 12, 5e-9)]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("activation | converged | steps"));
        assert!(lines[2].contains("true") && lines[2].contains("5.000e-9"));

        let t = report_table(&[fake("lin", true, 12, 5e-9), fake("ps:p=5,q=7", false, 100000, 0.25)]);
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[2].starts_with("lin ") && lines[3].starts_with("ps:p=5,q=7"));
        assert!(lines[3].contains("false") && lines[3].contains(" - "));
        let bar = lines[0].find('|').unwrap();
        assert!(lines.iter().skip(2).all(|l| l.find('|') == Some(bar)));
    }
}
