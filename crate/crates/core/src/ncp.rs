//! Fischer–Burmeister reformulation of TCP(A, q).
//!
//! With `F(x) = A x^{m-1} + q`, the problem is equivalent to `Φ(x) = 0`
//! where `Φ_i(x) = φ(x_i, F_i(x))` and `φ(a, b) = √(a² + b²) − a − b`.

use std::fmt;

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::{norm2, Scalar};
use crate::tensor::DenseTensor;

/// Fischer–Burmeister function `√(a² + b²) − a − b`.
///
/// Zero exactly on complementary pairs (`a ≥ 0`, `b ≥ 0`, `ab = 0`). When
/// `a + b > 0` the equivalent quotient `−2ab / (√(a² + b²) + a + b)` is used,
/// which avoids cancellation near the complementary boundary.
pub fn fb<T: Scalar>(a: T, b: T) -> T {
    let r = a.hypot(b);
    let s = a + b;
    if s > T::zero() {
        -(a + a) * b / (r + s)
    } else {
        r - s
    }
}

/// One element `(∂φ/∂a, ∂φ/∂b)` of the generalized gradient of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FbSubgradPair<T> {
    pub a_coeff: T,
    pub b_coeff: T,
}

/// Generalized gradient of `φ` at `(a, b)`. Off the origin this is the
/// ordinary gradient; at the origin the selection `α = β = 1/√2` is used.
pub fn fb_subgrad<T: Scalar>(a: T, b: T) -> FbSubgradPair<T> {
    if a.is_zero() && b.is_zero() {
        let c = T::lit(std::f64::consts::FRAC_1_SQRT_2) - T::one();
        return FbSubgradPair {
            a_coeff: c,
            b_coeff: c,
        };
    }
    let r = a.hypot(b);
    FbSubgradPair {
        a_coeff: a / r - T::one(),
        b_coeff: b / r - T::one(),
    }
}

/// An instance TCP(A, q). The tensor is stored partially symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct TcpProblem<T> {
    tensor: DenseTensor<T>,
    q: Vec<T>,
}

impl<T: Scalar> TcpProblem<T> {
    /// Symmetrizes `tensor` in its trailing indices and pairs it with `q`.
    pub fn new(tensor: &DenseTensor<T>, q: Vec<T>) -> Result<Self> {
        check_len(tensor.dim(), q.len())?;
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("q must be finite".into()));
        }
        Ok(Self {
            tensor: tensor.partial_symmetrize(),
            q,
        })
    }

    pub fn tensor(&self) -> &DenseTensor<T> {
        &self.tensor
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    /// `F(x) = A x^{m-1} + q`
    pub fn affine_map(&self, x: &[T]) -> Result<Vec<T>> {
        let mut y = self.tensor.contract_m1(x)?;
        y.iter_mut().zip(&self.q).for_each(|(y, &q)| *y += q);
        Ok(y)
    }

    /// `Φ(x)` with components `φ(x_i, F_i(x))`.
    pub fn phi(&self, x: &[T]) -> Result<Vec<T>> {
        let f = self.affine_map(x)?;
        Ok(x.iter().zip(&f).map(|(&a, &b)| fb(a, b)).collect())
    }

    /// Merit `½‖Φ(x)‖₂²`.
    pub fn merit(&self, x: &[T]) -> Result<T> {
        let r = self.residual(x)?;
        Ok(T::lit(0.5) * r * r)
    }

    /// `Res = ‖Φ(x)‖₂`.
    pub fn residual(&self, x: &[T]) -> Result<T> {
        self.phi(x).map(|p| norm2(&p))
    }

    /// Element `V = D_a(x) + (m−1) D_b(x) Â x^{m-2}` of the generalized
    /// Jacobian of `Φ`.
    pub fn v_matrix(&self, x: &[T]) -> Result<SquareMatrix<T>> {
        let f = self.affine_map(x)?;
        self.v_matrix_with(x, &f)
    }

    /// `Φ(x)` and `V(x)` from a single evaluation of `F`.
    pub fn phi_and_v(&self, x: &[T]) -> Result<(Vec<T>, SquareMatrix<T>)> {
        let f = self.affine_map(x)?;
        let phi = x.iter().zip(&f).map(|(&a, &b)| fb(a, b)).collect();
        let v = self.v_matrix_with(x, &f)?;
        Ok((phi, v))
    }

    fn v_matrix_with(&self, x: &[T], f: &[T]) -> Result<SquareMatrix<T>> {
        let n = self.dim();
        let scale = T::from_usize(self.order() - 1).expect("order fits in scalar");
        let m = self.tensor.contract_m2(x)?;
        let mut v = SquareMatrix::zeros(n);
        for i in 0..n {
            let g = fb_subgrad(x[i], f[i]);
            let row_scale = scale * g.b_coeff;
            for j in 0..n {
                v[(i, j)] = row_scale * m[(i, j)];
            }
            v[(i, i)] += g.a_coeff;
        }
        Ok(v)
    }

    /// Checks `x ≥ −tol`, `F(x) ≥ −tol` and `|xᵀF(x)| ≤ tol` (absolute).
    pub fn verify_solution(&self, x: &[T], tol: T) -> Result<Verdict<T>> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidConfig("verification tolerance must be positive".into()));
        }
        let f = self.affine_map(x)?;
        let mut violations = Vec::new();

        if let Some((index, value)) = argmin(x) {
            if value < -tol {
                violations.push(Violation::NegativeState { index, value });
            }
        }
        if let Some((index, value)) = argmin(&f) {
            if value < -tol {
                violations.push(Violation::NegativeMap { index, value });
            }
        }
        let terms: Vec<T> = x.iter().zip(&f).map(|(&a, &b)| a * b).collect();
        let inner = terms.iter().fold(T::zero(), |acc, &t| acc + t);
        if !(inner.abs() <= tol) {
            let index = terms
                .iter()
                .map(|t| t.abs())
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (i, t)| if t > best.1 { (i, t) } else { best })
                .0;
            violations.push(Violation::Complementarity { index, value: inner });
        }

        Ok(if violations.is_empty() {
            Verdict::Solution
        } else {
            Verdict::Violations(violations)
        })
    }
}

fn argmin<T: Scalar>(v: &[T]) -> Option<(usize, T)> {
    v.iter()
        .copied()
        .enumerate()
        .fold(None, |best: Option<(usize, T)>, (i, x)| match best {
            Some((_, b)) if !(x < b) && !x.is_nan() => best,
            _ => Some((i, x)),
        })
}

/// A violated TCP condition. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation<T> {
    /// Most negative state component.
    NegativeState { index: usize, value: T },
    /// Most negative component of `F(x)`.
    NegativeMap { index: usize, value: T },
    /// `xᵀF(x)` too large; `index` is the dominant term.
    Complementarity { index: usize, value: T },
}

impl<T: fmt::Display> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeState { index, value } => {
                write!(f, "x_{} = {} < 0", index + 1, value)
            }
            Violation::NegativeMap { index, value } => {
                write!(f, "(Ax^(m-1)+q)_{} = {} < 0", index + 1, value)
            }
            Violation::Complementarity { index, value } => {
                write!(f, "x'F(x) = {} != 0 (largest term at index {})", value, index + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "violations", rename_all = "snake_case")]
pub enum Verdict<T> {
    Solution,
    Violations(Vec<Violation<T>>),
}

impl<T> Verdict<T> {
    pub fn is_solution(&self) -> bool {
        matches!(self, Verdict::Solution)
    }
}
