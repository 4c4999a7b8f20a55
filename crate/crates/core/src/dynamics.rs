//! The gradient flow `dx/dt = −γ Vᵀ F(Φ(x))` and its integration.
//!
//! Integration runs in scaled time `τ = γt`, where the flow reads
//! `dx/dτ = −Vᵀ F(Φ(x))`. The gain only relabels the time axis, so large
//! gains cost nothing; physical times are recovered as `t = τ/γ`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationSpec;
use crate::error::{check_len, Error, Result};
use crate::integrator::{rk4_step, DormandPrince};
use crate::ncp::TcpProblem;
use crate::scalar::{all_finite, norm2, Scalar};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct GdsModel<T> {
    problem: TcpProblem<T>,
    activation: ActivationSpec<T>,
    gamma: T,
}

impl<T: Scalar> GdsModel<T> {
    pub fn new(problem: TcpProblem<T>, activation: ActivationSpec<T>, gamma: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be positive and finite, got {gamma}")));
        }
        Ok(Self {
            problem,
            activation,
            gamma,
        })
    }

    pub fn problem(&self) -> &TcpProblem<T> {
        &self.problem
    }

    pub fn activation(&self) -> &ActivationSpec<T> {
        &self.activation
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Physical-time right-hand side `−γ Vᵀ F(Φ(x))`.
    pub fn rhs(&self, x: &[T]) -> Result<Vec<T>> {
        let mut d = self.scaled_rhs(x)?;
        d.iter_mut().for_each(|v| *v *= self.gamma);
        Ok(d)
    }

    /// Scaled-time right-hand side `−Vᵀ F(Φ(x))`.
    pub fn scaled_rhs(&self, x: &[T]) -> Result<Vec<T>> {
        let (phi, v) = self.problem.phi_and_v(x)?;
        let activated = self.activation.apply_vector(&phi);
        let mut d = v.transpose_mul_vec(&activated);
        d.iter_mut().for_each(|v| *v = -*v);
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

/// Integration settings. All times are in scaled time `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig<T> {
    pub method: Method,
    /// Fixed step (RK4) or initial step (adaptive).
    pub step: T,
    pub t_max: T,
    /// Stop once `‖Φ(x)‖₂ ≤ res_tol`.
    pub res_tol: T,
    pub max_steps: usize,
    /// Keep every `record_every`-th accepted step; the last state is always kept.
    pub record_every: usize,
    pub rtol: T,
    pub atol: T,
}

impl<T: Scalar> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            step: T::lit(1e-2),
            t_max: T::lit(100.0),
            res_tol: T::lit(1e-8),
            max_steps: 1_000_000,
            record_every: 1,
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
        }
    }
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("step", self.step)?;
        positive("t_max", self.t_max)?;
        positive("res_tol", self.res_tol)?;
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        if self.max_steps == 0 || self.record_every == 0 {
            return Err(Error::InvalidConfig("max_steps and record_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    /// Horizon `t_max` or the step budget was exhausted first.
    HorizonReached,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    /// Scaled times τ, strictly increasing.
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// `‖Φ(x)‖₂` at each recorded state.
    pub residuals: Vec<T>,
    pub status: Status,
    pub gamma: T,
    /// Accepted integration steps.
    pub steps: usize,
    pub rejected_steps: usize,
    pub diagnostic: Option<String>,
}

impl<T: Scalar> Trajectory<T> {
    fn start(x0: Vec<T>, res0: T, gamma: T) -> Self {
        Self {
            times: vec![T::zero()],
            states: vec![x0],
            residuals: vec![res0],
            status: Status::HorizonReached,
            gamma,
            steps: 0,
            rejected_steps: 0,
            diagnostic: None,
        }
    }

    fn record(&mut self, tau: T, x: &[T], res: T) {
        self.times.push(tau);
        self.states.push(x.to_vec());
        self.residuals.push(res);
    }

    /// Records the final state unless it is already the last row.
    fn finish(&mut self, tau: T, x: &[T], res: T, status: Status, diagnostic: Option<String>) {
        if self.times.last() != Some(&tau) {
            self.record(tau, x, res);
        }
        self.status = status;
        self.diagnostic = diagnostic;
    }

    /// Physical times `t = τ/γ`.
    pub fn physical_times(&self) -> Vec<T> {
        self.times.iter().map(|&tau| tau / self.gamma).collect()
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_residual(&self) -> T {
        *self.residuals.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("trajectory is never empty")
    }

    /// Writes `tau,t,x1,...,xn,res`, one row per recorded state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["tau".to_string(), "t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("res".to_string());
        w.write_record(&header)?;
        for ((tau, x), res) in self.times.iter().zip(&self.states).zip(&self.residuals) {
            let mut row = Vec::with_capacity(n + 3);
            row.push(tau.to_string());
            row.push((*tau / self.gamma).to_string());
            row.extend(x.iter().map(T::to_string));
            row.push(res.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integrates the flow from `x0` until the residual drops below
/// `cfg.res_tol`, the horizon is reached, or stepping fails.
pub fn integrate<T: Scalar>(
    model: &GdsModel<T>,
    x0: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    check_len(model.problem.dim(), x0.len())?;
    cfg.validate()?;
    if !all_finite(x0) {
        return Err(Error::InvalidConfig("initial state must be finite".into()));
    }
    let res0 = model.problem.residual(x0)?;
    let mut traj = Trajectory::start(x0.to_vec(), res0, model.gamma);
    if res0 <= cfg.res_tol {
        traj.status = Status::Converged;
        return Ok(traj);
    }
    match cfg.method {
        Method::Rk4Fixed => run_fixed(model, x0, cfg, traj),
        Method::Rk45Adaptive => run_adaptive(model, x0, cfg, traj),
    }
}

fn horizon_gap<T: Scalar>(tau: T, t_max: T) -> Option<T> {
    let gap = t_max - tau;
    // Remainders below rounding level count as having arrived.
    if gap <= T::epsilon() * T::lit(16.0) * t_max.max(T::one()) {
        None
    } else {
        Some(gap)
    }
}

fn run_fixed<T: Scalar>(
    model: &GdsModel<T>,
    x0: &[T],
    cfg: &IntegratorConfig<T>,
    mut traj: Trajectory<T>,
) -> Result<Trajectory<T>> {
    let mut rhs = |x: &[T]| model.scaled_rhs(x);
    let mut x = x0.to_vec();
    let mut tau = T::zero();
    let mut res = traj.residuals[0];
    loop {
        let Some(gap) = horizon_gap(tau, cfg.t_max) else {
            traj.finish(tau, &x, res, Status::HorizonReached, None);
            return Ok(traj);
        };
        if traj.steps >= cfg.max_steps {
            traj.finish(tau, &x, res, Status::HorizonReached, Some("step budget exhausted".into()));
            return Ok(traj);
        }
        let h = cfg.step.min(gap);
        let next = rk4_step(&mut rhs, &x, h)?;
        if !all_finite(&next) {
            let msg = format!("non-finite state after step at tau = {tau}");
            traj.finish(tau, &x, res, Status::StepFailure, Some(msg));
            return Ok(traj);
        }
        x = next;
        tau = if h == gap { cfg.t_max } else { tau + h };
        traj.steps += 1;
        res = model.problem.residual(&x)?;
        if res <= cfg.res_tol {
            traj.finish(tau, &x, res, Status::Converged, None);
            return Ok(traj);
        }
        if traj.steps.is_multiple_of(cfg.record_every) {
            traj.record(tau, &x, res);
        }
    }
}

fn run_adaptive<T: Scalar>(
    model: &GdsModel<T>,
    x0: &[T],
    cfg: &IntegratorConfig<T>,
    mut traj: Trajectory<T>,
) -> Result<Trajectory<T>> {
    let dp = DormandPrince::new(cfg.rtol, cfg.atol);
    let mut rhs = |x: &[T]| model.scaled_rhs(x);
    let mut x = x0.to_vec();
    let mut k1 = rhs(&x)?;
    let mut tau = T::zero();
    let mut res = traj.residuals[0];
    let mut h = cfg.step;
    let mut saw_non_finite = false;
    loop {
        let Some(gap) = horizon_gap(tau, cfg.t_max) else {
            traj.finish(tau, &x, res, Status::HorizonReached, None);
            return Ok(traj);
        };
        if traj.steps >= cfg.max_steps {
            traj.finish(tau, &x, res, Status::HorizonReached, Some("step budget exhausted".into()));
            return Ok(traj);
        }
        let last = h >= gap;
        if last {
            h = gap;
        }
        let trial = dp.try_step(&mut rhs, &x, &k1, h)?;
        let finite = all_finite(&trial.x) && all_finite(&trial.derivative) && trial.error.is_finite();
        saw_non_finite |= !finite;

        if finite && trial.error <= T::one() {
            tau = if last { cfg.t_max } else { tau + h };
            x = trial.x;
            k1 = trial.derivative;
            traj.steps += 1;
            res = norm2(&model.problem.phi(&x)?);
            if res <= cfg.res_tol {
                traj.finish(tau, &x, res, Status::Converged, None);
                return Ok(traj);
            }
            if traj.steps.is_multiple_of(cfg.record_every) {
                traj.record(tau, &x, res);
            }
            h = (h * dp.step_factor(trial.error)).min(dp.stable_step(trial.stiffness));
        } else {
            traj.rejected_steps += 1;
            let err = if finite { trial.error } else { T::infinity() };
            h *= dp.step_factor(err).min(T::one());
        }

        let h_min = T::epsilon() * T::lit(16.0) * tau.abs().max(T::one());
        if h < h_min {
            let msg = if saw_non_finite {
                format!("non-finite state encountered; step size underflow at tau = {tau}")
            } else {
                format!("step size underflow at tau = {tau}")
            };
            traj.finish(tau, &x, res, Status::StepFailure, Some(msg));
            return Ok(traj);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport<T> {
    pub monotone: bool,
    /// First recorded index whose merit exceeds its predecessor's.
    pub first_violation_index: Option<usize>,
    /// Largest increase of the merit between consecutive records.
    pub max_uptick: T,
}

/// Checks that `L = ½ Res²` never increases along the recorded trajectory,
/// up to `1e-10 · (1 + L(0))`.
pub fn lyapunov_audit<T: Scalar>(traj: &Trajectory<T>) -> LyapunovReport<T> {
    let half = T::lit(0.5);
    let merits: Vec<T> = traj.residuals.iter().map(|&r| half * r * r).collect();
    let tol = T::lit(1e-10) * (T::one() + merits.first().copied().unwrap_or_else(T::zero));
    let mut report = LyapunovReport {
        monotone: true,
        first_violation_index: None,
        max_uptick: T::zero(),
    };
    for (k, w) in merits.windows(2).enumerate() {
        let uptick = w[1] - w[0];
        report.max_uptick = report.max_uptick.max(uptick);
        if uptick > tol && report.first_violation_index.is_none() {
            report.monotone = false;
            report.first_violation_index = Some(k + 1);
        }
    }
    report
}

/// Diagonal problem `a_{k…k} = d_k` with its closed-form solution
/// `x_k = max(0, −q_k/d_k)^{1/(m−1)}`. Requires `d_k > 0`.
pub fn diagonal_problem<T: Scalar>(order: usize, d: &[T], q: &[T]) -> Result<(TcpProblem<T>, Vec<T>)> {
    check_len(d.len(), q.len())?;
    if d.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::InvalidTensor("diagonal entries must be positive".into()));
    }
    let tensor = DenseTensor::diagonal(order, d)?;
    let problem = TcpProblem::new(&tensor, q.to_vec())?;
    let root = T::one() / T::from_usize(order - 1).expect("order fits in scalar");
    let solution = d
        .iter()
        .zip(q)
        .map(|(&dk, &qk)| (-qk / dk).max(T::zero()).powf(root))
        .collect();
    Ok((problem, solution))
}

/// Seeded random diagonal problem: `d_k ~ U(0.5, 2)`, then `q_k ~ U(−2, 2)`.
pub fn random_diagonal_problem<T: Scalar>(
    order: usize,
    dim: usize,
    seed: u64,
) -> Result<(TcpProblem<T>, Vec<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<T> = (0..dim).map(|_| T::lit(rng.random_range(0.5..2.0))).collect();
    let q: Vec<T> = (0..dim).map(|_| T::lit(rng.random_range(-2.0..2.0))).collect();
    diagonal_problem(order, &d, &q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eg3() -> TcpProblem<f64> {
        let a = DenseTensor::from_one_based(
            4,
            2,
            [
                ([1, 1, 1, 1], 1.0),
                ([1, 1, 1, 2], -2.0),
                ([1, 1, 2, 2], 1.0),
                ([2, 2, 2, 2], 1.0),
            ],
        )
        .unwrap();
        TcpProblem::new(&a, vec![0.0, -1.0]).unwrap()
    }

    fn lin() -> ActivationSpec<f64> {
        ActivationSpec::linear()
    }

    #[test]
    fn rhs_vanishes_at_solutions() {
        let m = GdsModel::new(eg3(), lin(), 1e6).unwrap();
        assert_eq!(m.rhs(&[0.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert!(norm2(&m.rhs(&[1.0, 1.0]).unwrap()) <= 1e-12);
        let (p, _) = diagonal_problem(5, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        let m = GdsModel::new(p, lin(), 1.0).unwrap();
        assert_eq!(m.rhs(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(m.rhs(&[0.0; 2]).is_err());
    }

    #[test]
    fn rhs_scales_with_gamma() {
        let x = [0.3, 0.7];
        let a = GdsModel::new(eg3(), lin(), 1.0).unwrap().rhs(&x).unwrap();
        let b = GdsModel::new(eg3(), lin(), 10.0).unwrap().rhs(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_relative_eq!(10.0 * u, *v, max_relative = 1e-15);
        }
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(GdsModel::new(eg3(), lin(), 0.0).is_err());
        assert!(GdsModel::new(eg3(), lin(), f64::INFINITY).is_err());
    }

    #[test]
    fn linear_rhs_is_negative_merit_gradient() {
        // Away from kinks, −VᵀΦ is the gradient of −½‖Φ‖².
        let p = eg3();
        let m = GdsModel::new(p.clone(), lin(), 1.0).unwrap();
        let x = [0.4, 0.9];
        let g = m.rhs(&x).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.merit(&xp).unwrap() - p.merit(&xm).unwrap()) / (2.0 * h);
            assert_relative_eq!(-g[i], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn diagonal_problem_solutions() {
        let (_, s) = diagonal_problem(5, &[1.0, 2.0, 3.0], &[-3.0, -2.0, -3.0]).unwrap();
        assert_relative_eq!(s[0], 3f64.powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(s[1], 1.0, max_relative = 1e-15);
        assert_relative_eq!(s[2], 1.0, max_relative = 1e-15);
        let (_, s) = diagonal_problem(5, &[1.0, 2.0], &[0.5, 0.0]).unwrap();
        assert_eq!(s, vec![0.0, 0.0]);
        let (_, s) = diagonal_problem(5, &[1.0], &[-16.0]).unwrap();
        assert_relative_eq!(s[0], 2.0, max_relative = 1e-15);
        assert!(diagonal_problem(4, &[1.0, -1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn random_diagonal_is_seeded_and_solved() {
        let (p1, s1) = random_diagonal_problem::<f64>(4, 3, 42).unwrap();
        let (p2, s2) = random_diagonal_problem::<f64>(4, 3, 42).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(s1, s2);
        assert_ne!(random_diagonal_problem::<f64>(4, 3, 43).unwrap().0, p1);
        assert!(p1.verify_solution(&s1, 1e-12).unwrap().is_solution());
        for &qk in p1.q() {
            assert!((-2.0..2.0).contains(&qk));
        }
    }

    #[test]
    fn converges_on_example_three_near_origin_solution() {
        let m = GdsModel::new(eg3(), lin(), 100.0).unwrap();
        let cfg = IntegratorConfig {
            t_max: 1e4,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.1, 0.5], &cfg).unwrap();
        assert_eq!(traj.status, Status::Converged, "{:?}", traj.diagnostic);
        assert!(traj.final_residual() <= 1e-8);
        assert!((traj.final_state()[0]).abs() < 1e-6);
        assert!((traj.final_state()[1] - 1.0).abs() < 1e-6);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert!(lyapunov_audit(&traj).monotone);
    }

    #[test]
    fn residuals_match_states() {
        let (p, _) = random_diagonal_problem::<f64>(4, 3, 5).unwrap();
        let m = GdsModel::new(p.clone(), lin(), 1.0).unwrap();
        let traj = integrate(&m, &[0.5, 0.5, 0.5], &IntegratorConfig::default()).unwrap();
        for (x, &r) in traj.states.iter().zip(&traj.residuals) {
            assert_eq!(p.residual(x).unwrap(), r);
        }
        assert_eq!(traj.physical_times(), traj.times);
    }

    #[test]
    fn already_solved_start_is_single_point() {
        let m = GdsModel::new(eg3(), lin(), 1.0).unwrap();
        let traj = integrate(&m, &[0.0, 1.0], &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.status, Status::Converged);
        assert_eq!(traj.times.len(), 1);
        let report = lyapunov_audit(&traj);
        assert!(report.monotone);
        assert_eq!(report.first_violation_index, None);
    }

    #[test]
    fn horizon_and_budget() {
        let (p, _) = diagonal_problem(4, &[1.0, 1.0], &[-1.0, -1.0]).unwrap();
        let m = GdsModel::new(p, lin(), 1.0).unwrap();
        let cfg = IntegratorConfig {
            method: Method::Rk4Fixed,
            step: 0.01,
            t_max: 0.5,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.1, 0.2], &cfg).unwrap();
        assert_eq!(traj.status, Status::HorizonReached);
        assert_eq!(traj.final_time(), 0.5);
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.1, 0.2], &cfg).unwrap();
        assert_eq!(traj.status, Status::HorizonReached);
        assert_eq!(traj.steps, 3);
        assert!(traj.diagnostic.unwrap().contains("budget"));
    }

    #[test]
    fn thinning_keeps_final_row() {
        let (p, _) = diagonal_problem(4, &[1.0, 2.0], &[-1.0, 0.5]).unwrap();
        let m = GdsModel::new(p, lin(), 1.0).unwrap();
        let cfg = IntegratorConfig {
            record_every: 7,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.3, 0.3], &cfg).unwrap();
        assert!(traj.converged());
        assert!(traj.states.len() < traj.steps);
        assert!(traj.final_residual() <= cfg.res_tol);
    }

    #[test]
    fn blow_up_is_a_step_failure() {
        let (p, _) = diagonal_problem(4, &[1.0, 1.0], &[-1.0, -1.0]).unwrap();
        let sps = ActivationSpec::smooth_power_sigmoid(7, 11.0).unwrap();
        let m = GdsModel::new(p, sps, 1.0).unwrap();
        let cfg = IntegratorConfig {
            method: Method::Rk4Fixed,
            step: 10.0,
            t_max: 1e4,
            ..Default::default()
        };
        let traj = integrate(&m, &[3.0, 3.0], &cfg).unwrap();
        assert_eq!(traj.status, Status::StepFailure);
        assert!(traj.diagnostic.as_deref().unwrap().contains("non-finite"));
        assert!(all_finite(traj.final_state()));
    }

    #[test]
    fn large_fixed_step_breaks_descent() {
        let (p, _) = diagonal_problem(5, &[1.0, 2.0, 3.0], &[-3.0, -2.0, -3.0]).unwrap();
        let m = GdsModel::new(p, lin(), 1.0).unwrap();
        let cfg = IntegratorConfig {
            method: Method::Rk4Fixed,
            step: 10.0,
            t_max: 100.0,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.5, 0.5, 0.5], &cfg).unwrap();
        let report = lyapunov_audit(&traj);
        assert!(!report.monotone);
        let k = report.first_violation_index.unwrap();
        assert!(traj.residuals[k] > traj.residuals[k - 1]);
        assert!(report.max_uptick > 0.0);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let m = GdsModel::new(eg3(), lin(), 1.0).unwrap();
        let bad = IntegratorConfig {
            step: 0.0,
            ..Default::default()
        };
        assert!(integrate(&m, &[0.1, 0.5], &bad).is_err());
        assert!(integrate(&m, &[0.1], &IntegratorConfig::default()).is_err());
        assert!(integrate(&m, &[f64::NAN, 0.5], &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = GdsModel::new(eg3(), lin(), 4.0).unwrap();
        let cfg = IntegratorConfig {
            max_steps: 2,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.1, 0.5], &cfg).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau,t,x1,x2,res"));
        assert_eq!(lines.next(), Some(format!("0,0,0.1,0.5,{}", traj.residuals[0]).as_str()));
        assert_eq!(text.lines().count(), 1 + traj.times.len());
    }

    #[test]
    fn runs_in_single_precision() {
        let (p, s) = diagonal_problem::<f32>(4, &[1.0, 2.0], &[-1.0, 1.0]).unwrap();
        let m = GdsModel::new(p, ActivationSpec::bipolar_sigmoid(5.0).unwrap(), 1.0).unwrap();
        let cfg = IntegratorConfig {
            res_tol: 1e-5,
            rtol: 1e-5,
            atol: 1e-7,
            ..Default::default()
        };
        let traj = integrate(&m, &[0.5, 0.5], &cfg).unwrap();
        assert!(traj.converged());
        assert!((traj.final_state()[0] - s[0]).abs() < 1e-4);
    }
}
