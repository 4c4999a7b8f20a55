//! Solve tensor complementarity problems TCP(A, q) by integrating a
//! gradient dynamical system over the Fischer–Burmeister residual.
//!
//! Given an order-`m`, dimension-`n` tensor `A` and `q ∈ ℝⁿ`, find `x` with
//!
//! ```text
//! x ≥ 0,   F(x) = A x^{m-1} + q ≥ 0,   xᵀ F(x) = 0.
//! ```
//!
//! The problem is rewritten as `Φ(x) = 0` with `Φ_i(x) = φ(x_i, F_i(x))` and
//! the flow `dx/dt = −γ Vᵀ 𝓕(Φ(x))` is integrated until `‖Φ(x)‖₂` is small,
//! where `V` is an element of the generalized Jacobian of `Φ` and `𝓕` is an
//! odd, increasing activation applied componentwise.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below fix the precision.
//!
//! ```
//! use tcpgds_core::{integrate, ActivationSpec, DenseTensor, GdsModel, IntegratorConfig, TcpProblem};
//!
//! let a = DenseTensor::diagonal(5, &[1.0, 2.0, 3.0]).unwrap();
//! let problem = TcpProblem::new(&a, vec![-3.0, -2.0, -3.0]).unwrap();
//! let model = GdsModel::new(problem, ActivationSpec::linear(), 1e6).unwrap();
//! let traj = integrate(&model, &[0.5, 0.5, 0.5], &IntegratorConfig::default()).unwrap();
//! assert!(traj.converged());
//! assert!((traj.final_state()[0] - 3f64.powf(0.25)).abs() < 1e-6);
//! ```

pub mod activation;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod io;
pub mod matrix;
pub mod ncp;
pub mod scalar;
pub mod tensor;

pub use activation::{parse_activation_list, ActivationSpec, Family};
pub use dynamics::{
    diagonal_problem, integrate, lyapunov_audit, random_diagonal_problem, GdsModel, IntegratorConfig,
    LyapunovReport, Method, Status, Trajectory,
};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use ncp::{fb, fb_subgrad, FbSubgradPair, TcpProblem, Verdict, Violation};
pub use scalar::{norm2, Scalar};
pub use tensor::{DenseTensor, PTensorVerdict};

pub type DenseTensorF64 = DenseTensor<f64>;
pub type TcpProblemF64 = TcpProblem<f64>;
pub type ActivationSpecF64 = ActivationSpec<f64>;
pub type GdsModelF64 = GdsModel<f64>;
pub type IntegratorConfigF64 = IntegratorConfig<f64>;
pub type TrajectoryF64 = Trajectory<f64>;

pub type DenseTensorF32 = DenseTensor<f32>;
pub type TcpProblemF32 = TcpProblem<f32>;
pub type ActivationSpecF32 = ActivationSpec<f32>;
pub type GdsModelF32 = GdsModel<f32>;
pub type IntegratorConfigF32 = IntegratorConfig<f32>;
pub type TrajectoryF32 = Trajectory<f32>;
