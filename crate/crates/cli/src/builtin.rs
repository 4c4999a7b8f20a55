//! The three worked examples shipped with the tool.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use serde::Serialize;
use tcpgds_core::{ActivationSpecF64, DenseTensorF64, TcpProblemF64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Eg1,
    Eg2,
    Eg3,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Eg1, Builtin::Eg2, Builtin::Eg3];

    pub fn order(self) -> usize {
        match self {
            Builtin::Eg1 | Builtin::Eg3 => 4,
            Builtin::Eg2 => 5,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Builtin::Eg1 | Builtin::Eg3 => 2,
            Builtin::Eg2 => 3,
        }
    }

    /// Nonzero entries with 1-based indices, as published.
    pub fn nonzeros(self) -> Vec<(Vec<usize>, f64)> {
        let list: &[(&[usize], f64)] = match self {
            Builtin::Eg1 => &[
                (&[1, 1, 1, 1], 1.0),
                (&[1, 2, 2, 2], -1.0),
                (&[1, 1, 2, 2], 1.0),
                (&[2, 2, 2, 2], 1.0),
                (&[2, 1, 1, 1], -1.0),
                (&[2, 2, 1, 1], 1.0),
            ],
            Builtin::Eg2 => &[
                (&[1, 1, 1, 1, 1], 1.0),
                (&[2, 2, 2, 2, 2], 2.0),
                (&[3, 3, 3, 3, 3], 3.0),
            ],
            Builtin::Eg3 => &[
                (&[1, 1, 1, 1], 1.0),
                (&[1, 1, 1, 2], -2.0),
                (&[1, 1, 2, 2], 1.0),
                (&[2, 2, 2, 2], 1.0),
            ],
        };
        list.iter().map(|(i, v)| (i.to_vec(), *v)).collect()
    }

    pub fn tensor(self) -> DenseTensorF64 {
        DenseTensorF64::from_one_based(self.order(), self.dim(), self.nonzeros())
            .expect("builtin tensors are well formed")
    }

    /// `q` used when none is given on the command line.
    pub fn default_q(self) -> Vec<f64> {
        match self {
            Builtin::Eg1 => vec![5.0, 3.0],
            Builtin::Eg2 => vec![1.0, 2.0, 3.0],
            Builtin::Eg3 => vec![0.0, -1.0],
        }
    }

    /// Linear activation followed by the example's nonlinear parameter set.
    pub fn default_activations(self) -> Vec<ActivationSpecF64> {
        let (bs, ps, sps) = match self {
            Builtin::Eg1 => (5.0, (3, 5.0), (3, 7.0)),
            Builtin::Eg2 => (7.0, (5, 7.0), (5, 9.0)),
            Builtin::Eg3 => (7.0, (5, 9.0), (7, 11.0)),
        };
        vec![
            ActivationSpecF64::linear(),
            ActivationSpecF64::bipolar_sigmoid(bs).expect("valid gain"),
            ActivationSpecF64::power_sigmoid(ps.0, ps.1).expect("valid parameters"),
            ActivationSpecF64::smooth_power_sigmoid(sps.0, sps.1).expect("valid parameters"),
        ]
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builtin::Eg1 => "eg1",
            Builtin::Eg2 => "eg2",
            Builtin::Eg3 => "eg3",
        })
    }
}

impl FromStr for Builtin {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eg1" => Ok(Builtin::Eg1),
            "eg2" => Ok(Builtin::Eg2),
            "eg3" => Ok(Builtin::Eg3),
            other => bail!("unknown builtin `{other}` (expected eg1, eg2 or eg3)"),
        }
    }
}

/// The named example with the given `q`.
pub fn load_builtin(name: Builtin, q: &[f64]) -> Result<TcpProblemF64> {
    if q.len() != name.dim() {
        bail!("{name} needs q of length {}, got {}", name.dim(), q.len());
    }
    Ok(TcpProblemF64::new(&name.tensor(), q.to_vec())?)
}
