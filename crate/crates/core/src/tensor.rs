//! Dense real tensors of order `m` and dimension `n`, plus the multilinear
//! contractions the flow needs.
//!
//! Entries are stored flat in row-major order: the first index varies
//! slowest. Indices are 0-based in this API; the 1-based helpers exist for
//! authoring tensors the way they are usually written by hand.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    order: usize,
    dim: usize,
    entries: Vec<T>,
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    if order < 2 {
        return Err(Error::InvalidTensor(format!("order must be >= 2, got {order}")));
    }
    if dim < 1 {
        return Err(Error::InvalidTensor("dimension must be >= 1".into()));
    }
    u32::try_from(order)
        .ok()
        .and_then(|o| dim.checked_pow(o))
        .ok_or_else(|| Error::InvalidTensor(format!("{dim}^{order} entries overflow")))
}

impl<T: Scalar> DenseTensor<T> {
    /// Wraps a flat row-major entry array of length `dim^order`.
    pub fn new(order: usize, dim: usize, entries: Vec<T>) -> Result<Self> {
        let len = checked_len(order, dim)?;
        if entries.len() != len {
            return Err(Error::InvalidTensor(format!(
                "expected {len} entries for order {order}, dimension {dim}; got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTensor(format!("entry {pos} is not finite")));
        }
        Ok(Self { order, dim, entries })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Ok(Self {
            order,
            dim,
            entries: vec![T::zero(); len],
        })
    }

    /// Builds a tensor from `(1-based index tuple, value)` pairs; unlisted
    /// entries are zero and repeated tuples are rejected.
    pub fn from_one_based<I, J>(order: usize, dim: usize, nonzeros: I) -> Result<Self>
    where
        I: IntoIterator<Item = (J, T)>,
        J: AsRef<[usize]>,
    {
        let mut t = Self::zeros(order, dim)?;
        let mut seen = vec![false; t.entries.len()];
        for (idx, value) in nonzeros {
            let idx = idx.as_ref();
            let zero_based = idx
                .iter()
                .map(|&i| {
                    if i == 0 || i > dim {
                        Err(Error::InvalidTensor(format!(
                            "index {i} out of range 1..={dim} in {idx:?}"
                        )))
                    } else {
                        Ok(i - 1)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let flat = t.flat_index(&zero_based)?;
            if seen[flat] {
                return Err(Error::InvalidTensor(format!("duplicate index tuple {idx:?}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidTensor(format!("entry {idx:?} is not finite")));
            }
            seen[flat] = true;
            t.entries[flat] = value;
        }
        Ok(t)
    }

    /// Diagonal tensor with `a_{k…k} = diag[k]`.
    pub fn diagonal(order: usize, diag: &[T]) -> Result<Self> {
        let mut t = Self::zeros(order, diag.len())?;
        for (k, &d) in diag.iter().enumerate() {
            let flat = t.flat_index(&vec![k; order])?;
            t.entries[flat] = d;
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order {
            return Err(Error::InvalidTensor(format!(
                "index tuple has {} components, tensor order is {}",
                idx.len(),
                self.order
            )));
        }
        idx.iter().try_fold(0usize, |acc, &i| {
            if i >= self.dim {
                Err(Error::InvalidTensor(format!("index {i} out of range 0..{}", self.dim)))
            } else {
                Ok(acc * self.dim + i)
            }
        })
    }

    /// Entry at a 0-based index tuple.
    pub fn get(&self, idx: &[usize]) -> Result<T> {
        self.flat_index(idx).map(|f| self.entries[f])
    }

    /// Nonzero entries as `(1-based index tuple, value)`, in storage order.
    pub fn nonzeros_one_based(&self) -> Vec<(Vec<usize>, T)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(flat, &v)| {
                let idx = self.unflatten(flat).into_iter().map(|i| i + 1).collect();
                (idx, v)
            })
            .collect()
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// `y = A x^{m-1}`: `y_i = Σ a_{i i₂…i_m} x_{i₂}⋯x_{i_m}`.
    pub fn contract_m1(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.dim, x.len())?;
        let mono = monomials(x, self.order - 1);
        Ok(self
            .entries
            .chunks_exact(mono.len())
            .map(|row| dot(row, &mono))
            .collect())
    }

    /// `M = A x^{m-2}`: `M_{jk} = Σ a_{j k i₃…i_m} x_{i₃}⋯x_{i_m}`.
    ///
    /// For a tensor symmetric in its trailing indices, `(m-1) M` is the
    /// Jacobian of `x ↦ A x^{m-1}`.
    pub fn contract_m2(&self, x: &[T]) -> Result<SquareMatrix<T>> {
        check_len(self.dim, x.len())?;
        let mono = monomials(x, self.order - 2);
        let data = self
            .entries
            .chunks_exact(mono.len())
            .map(|block| dot(block, &mono))
            .collect();
        Ok(SquareMatrix::from_row_major(self.dim, data))
    }

    /// Averages every entry over all permutations of its indices `2…m`.
    ///
    /// Each distinct rearrangement of a trailing multi-index occurs equally
    /// often among the `(m-1)!` permutations, so the average equals the mean
    /// over the orbit of distinct rearrangements. Orbits whose entries are
    /// already equal are left bit-for-bit unchanged.
    pub fn partial_symmetrize(&self) -> Self {
        struct Orbit<T> {
            sum: T,
            count: usize,
            first: T,
            uniform: bool,
        }
        let mut orbits: HashMap<(usize, Vec<usize>), Orbit<T>> = HashMap::new();
        let mut keys = Vec::with_capacity(self.entries.len());
        for (flat, &v) in self.entries.iter().enumerate() {
            let idx = self.unflatten(flat);
            let mut tail = idx[1..].to_vec();
            tail.sort_unstable();
            let key = (idx[0], tail);
            let orbit = orbits.entry(key.clone()).or_insert(Orbit {
                sum: T::zero(),
                count: 0,
                first: v,
                uniform: true,
            });
            orbit.uniform &= orbit.first == v;
            orbit.sum += v;
            orbit.count += 1;
            keys.push(key);
        }
        let entries = keys
            .iter()
            .zip(&self.entries)
            .map(|(key, &v)| {
                let orbit = &orbits[key];
                if orbit.uniform {
                    v
                } else {
                    orbit.sum / T::from_usize(orbit.count).expect("orbit size fits in scalar")
                }
            })
            .collect();
        Self {
            order: self.order,
            dim: self.dim,
            entries,
        }
    }

    /// True if entries are invariant under permutations of indices `2…m`
    /// up to `tol` absolute.
    pub fn is_partially_symmetric(&self, tol: T) -> bool {
        let sym = self.partial_symmetrize();
        self.entries
            .iter()
            .zip(&sym.entries)
            .all(|(&a, &b)| (a - b).abs() <= tol)
    }

    /// Sampling diagnostic for the P-tensor property: for every nonzero `x`
    /// some `i` must have `x_i (A x^{m-1})_i > 0`.
    ///
    /// Tests the `2n` signed coordinate axes, then `trials` points drawn
    /// uniformly on the unit sphere. Finding no counterexample proves nothing.
    pub fn p_tensor_sample_check(&self, trials: usize, seed: u64) -> PTensorVerdict<T> {
        let n = self.dim;
        let score = |x: &[T]| -> T {
            let y = self.contract_m1(x).expect("sample has tensor dimension");
            x.iter()
                .zip(&y)
                .map(|(&xi, &yi)| xi * yi)
                .fold(T::neg_infinity(), T::max)
        };

        for k in 0..n {
            for sign in [T::one(), -T::one()] {
                let mut x = vec![T::zero(); n];
                x[k] = sign;
                let s = score(&x);
                if s <= T::zero() {
                    return PTensorVerdict::Counterexample { x, max_product: s };
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0;
        while drawn < trials {
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len == 0.0 || !len.is_finite() {
                continue;
            }
            drawn += 1;
            let x: Vec<T> = g.iter().map(|v| T::lit(v / len)).collect();
            let s = score(&x);
            if s <= T::zero() {
                return PTensorVerdict::Counterexample { x, max_product: s };
            }
        }
        PTensorVerdict::NoCounterexampleFound { samples: 2 * n + trials }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PTensorVerdict<T> {
    NoCounterexampleFound { samples: usize },
    /// `x` has unit length and `max_i x_i (A x^{m-1})_i = max_product ≤ 0`.
    Counterexample { x: Vec<T>, max_product: T },
}

impl<T> PTensorVerdict<T> {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, PTensorVerdict::Counterexample { .. })
    }
}

/// All products `x_{j₁}⋯x_{j_k}` in row-major multi-index order; a single 1
/// for `k = 0`.
fn monomials<T: Scalar>(x: &[T], k: usize) -> Vec<T> {
    let mut mono = vec![T::one()];
    for _ in 0..k {
        mono = mono
            .iter()
            .flat_map(|&p| x.iter().map(move |&xi| p * xi))
            .collect();
    }
    mono
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}
