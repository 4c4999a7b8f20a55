//! JSON file formats.
//!
//! Tensor: `{"order": m, "dim": n, "entries": [[i1, ..., im, value], ...]}`
//! with 1-based indices; unlisted entries are zero.
//!
//! Problem: `{"tensor": <tensor object>, "q": [q1, ..., qn]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncp::TcpProblem;
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub order: usize,
    pub dim: usize,
    pub entries: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub tensor: TensorFile,
    pub q: Vec<f64>,
}

impl TensorFile {
    pub fn from_tensor<T: Scalar>(t: &DenseTensor<T>) -> Self {
        let entries = t
            .nonzeros_one_based()
            .into_iter()
            .map(|(idx, v)| {
                let mut row: Vec<f64> = idx.into_iter().map(|i| i as f64).collect();
                row.push(v.to_f64_lossy());
                row
            })
            .collect();
        Self {
            order: t.order(),
            dim: t.dim(),
            entries,
        }
    }

    pub fn to_tensor<T: Scalar>(&self) -> Result<DenseTensor<T>> {
        let m = self.order;
        let coords = self
            .entries
            .iter()
            .enumerate()
            .map(|(row, e)| {
                if e.len() != m + 1 {
                    return Err(Error::Format(format!(
                        "entry {row} has {} fields, expected {} indices and a value",
                        e.len(),
                        m
                    )));
                }
                let idx = e[..m]
                    .iter()
                    .map(|&i| {
                        if i.fract() == 0.0 && i >= 1.0 && i <= usize::MAX as f64 {
                            Ok(i as usize)
                        } else {
                            Err(Error::Format(format!("entry {row}: index {i} is not a positive integer")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let value = T::from_f64(e[m])
                    .ok_or_else(|| Error::Format(format!("entry {row}: value not representable")))?;
                Ok((idx, value))
            })
            .collect::<Result<Vec<_>>>()?;
        DenseTensor::from_one_based(self.order, self.dim, coords)
    }
}

impl ProblemFile {
    pub fn to_problem<T: Scalar>(&self) -> Result<TcpProblem<T>> {
        let tensor = self.tensor.to_tensor()?;
        let q = self.q.iter().map(|&v| T::lit(v)).collect();
        TcpProblem::new(&tensor, q)
    }
}

pub fn parse_tensor<T: Scalar>(json: &str) -> Result<DenseTensor<T>> {
    serde_json::from_str::<TensorFile>(json)?.to_tensor()
}

pub fn parse_problem<T: Scalar>(json: &str) -> Result<TcpProblem<T>> {
    serde_json::from_str::<ProblemFile>(json)?.to_problem()
}
