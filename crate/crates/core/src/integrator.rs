//! Explicit Runge–Kutta steppers for autonomous systems `dx/dτ = g(x)`.
//!
//! Classic RK4 for fixed steps and the Dormand–Prince 5(4) pair with an
//! embedded error estimate for adaptive stepping. The right-hand side is a
//! fallible closure so dimension errors propagate instead of panicking.

use crate::error::Result;
use crate::scalar::Scalar;

fn axpy<T: Scalar>(x: &[T], h: T, terms: &[(f64, &[T])]) -> Vec<T> {
    let mut out = x.to_vec();
    for &(c, k) in terms {
        if c == 0.0 {
            continue;
        }
        let hc = h * T::lit(c);
        out.iter_mut().zip(k).for_each(|(o, &ki)| *o += hc * ki);
    }
    out
}

/// One classic fourth-order step of size `h`.
pub fn rk4_step<T, F>(rhs: &mut F, x: &[T], h: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    let k1 = rhs(x)?;
    let k2 = rhs(&axpy(x, h, &[(0.5, &k1)]))?;
    let k3 = rhs(&axpy(x, h, &[(0.5, &k2)]))?;
    let k4 = rhs(&axpy(x, h, &[(1.0, &k3)]))?;
    Ok(axpy(
        x,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    ))
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Result of a trial Dormand–Prince step.
#[derive(Debug, Clone)]
pub struct TrialStep<T> {
    pub x: Vec<T>,
    /// `g(x)` at the new point; reused as the first stage of the next step.
    pub derivative: Vec<T>,
    /// Scaled RMS error; the step is acceptable when `≤ 1`.
    pub error: T,
    /// Estimate of the local spectral radius of the Jacobian,
    /// `‖g(x₇) − g(x₆)‖ / ‖x₇ − x₆‖` from the last two stages.
    pub stiffness: T,
}

/// Step-size controller for the Dormand–Prince pair.
#[derive(Debug, Clone, Copy)]
pub struct DormandPrince<T> {
    pub rtol: T,
    pub atol: T,
    pub safety: T,
    pub min_factor: T,
    pub max_factor: T,
    /// Fraction of the real stability interval (`|hλ| ≤ 3.3`) the step may use.
    pub stability_fraction: T,
}

impl<T: Scalar> DormandPrince<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            safety: T::lit(0.9),
            min_factor: T::lit(0.2),
            max_factor: T::lit(5.0),
            stability_fraction: T::lit(0.75),
        }
    }

    /// Attempts a step of size `h` from `x`, where `k1 = g(x)`.
    pub fn try_step<F>(&self, rhs: &mut F, x: &[T], k1: &[T], h: T) -> Result<TrialStep<T>>
    where
        F: FnMut(&[T]) -> Result<Vec<T>>,
    {
        let k2 = rhs(&axpy(x, h, &[(A21, k1)]))?;
        let k3 = rhs(&axpy(x, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = rhs(&axpy(x, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs(&axpy(x, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let x6 = axpy(
            x,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = rhs(&x6)?;
        let x_new = axpy(
            x,
            h,
            &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(&x_new)?;

        let zero = vec![T::zero(); x.len()];
        let err_vec = axpy(
            &zero,
            h,
            &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let sum_sq = err_vec
            .iter()
            .zip(x)
            .zip(&x_new)
            .fold(T::zero(), |acc, ((&e, &a), &b)| {
                let scale = self.atol + self.rtol * a.abs().max(b.abs());
                let r = e / scale;
                acc + r * r
            });
        let n = T::from_usize(x.len().max(1)).expect("dimension fits in scalar");
        let dist = |u: &[T], v: &[T]| {
            u.iter()
                .zip(v)
                .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
                .sqrt()
        };
        let dx = dist(&x_new, &x6);
        let stiffness = if dx > T::zero() { dist(&k7, &k6) / dx } else { T::zero() };
        Ok(TrialStep {
            x: x_new,
            derivative: k7,
            error: (sum_sq / n).sqrt(),
            stiffness,
        })
    }

    /// Multiplier for the next step size given a trial error.
    pub fn step_factor(&self, error: T) -> T {
        if error.is_zero() {
            return self.max_factor;
        }
        if !error.is_finite() {
            return self.min_factor;
        }
        let f = self.safety * error.powf(T::lit(-0.2));
        f.max(self.min_factor).min(self.max_factor)
    }

    /// Largest step keeping `h ρ` inside the stability interval.
    ///
    /// At the boundary the amplification factor is close to 1, so stiff
    /// components stop decaying while the error controller is satisfied.
    pub fn stable_step(&self, stiffness: T) -> T {
        if stiffness > T::zero() && stiffness.is_finite() {
            self.stability_fraction * T::lit(3.3) / stiffness
        } else {
            T::infinity()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| -v).collect())
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |h: f64| {
            let mut x = vec![1.0];
            let steps = (1.0 / h).round() as usize;
            for _ in 0..steps {
                x = rk4_step(&mut decay, &x, h).unwrap();
            }
            (x[0] - (-1.0f64).exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "error ratio {ratio}");
    }

    #[test]
    fn dormand_prince_error_estimate_is_fifth_order_small() {
        let dp = DormandPrince::new(1e-8, 1e-10);
        let x = [1.0];
        let k1 = decay(&x).unwrap();
        let s = dp.try_step(&mut decay, &x, &k1, 0.1).unwrap();
        assert!((s.x[0] - (-0.1f64).exp()).abs() < 1e-9);
        assert_eq!(s.derivative, vec![-s.x[0]]);
        let s2 = dp.try_step(&mut decay, &x, &k1, 0.05).unwrap();
        // Local error estimate scales like h^5.
        let ratio = s.error / s2.error;
        assert!(ratio > 20.0 && ratio < 45.0, "ratio {ratio}");
    }

    #[test]
    fn stiffness_estimate_tracks_eigenvalue() {
        let dp = DormandPrince::new(1e-8, 1e-10);
        let mut stiff = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![-50.0 * x[0]]) };
        let x = [1.0];
        let k1 = stiff(&x).unwrap();
        let s = dp.try_step(&mut stiff, &x, &k1, 0.01).unwrap();
        assert!((s.stiffness - 50.0).abs() < 1e-9, "{}", s.stiffness);
        assert!((dp.stable_step(50.0) - 0.75 * 3.3 / 50.0).abs() < 1e-15);
        assert_eq!(dp.stable_step(0.0), f64::INFINITY);
    }

    #[test]
    fn step_factor_is_clamped() {
        let dp = DormandPrince::new(1e-8, 1e-10);
        assert_eq!(dp.step_factor(0.0), 5.0);
        assert_eq!(dp.step_factor(1e9), 0.2);
        assert_eq!(dp.step_factor(f64::NAN), 0.2);
        assert!((dp.step_factor(1.0) - 0.9).abs() < 1e-15);
    }
}
