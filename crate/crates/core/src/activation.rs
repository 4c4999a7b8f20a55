//! Odd, monotonically increasing activation functions shaping the flow.
//!
//! The sigmoid part `((1+e^{-q})/(1-e^{-q})) · ((1-e^{-qx})/(1+e^{-qx}))` is
//! evaluated as `tanh(qx/2) / tanh(q/2)`, which is the same function but
//! does not overflow for large `|qx|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    BipolarSigmoid,
    PowerSigmoid,
    SmoothPowerSigmoid,
}

/// A validated activation: family plus exponent `p` and sigmoid gain `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActivationSpec<T> {
    family: Family,
    p: Option<u32>,
    gain: Option<T>,
}

impl<T: Scalar> ActivationSpec<T> {
    pub fn linear() -> Self {
        Self {
            family: Family::Linear,
            p: None,
            gain: None,
        }
    }

    /// Requires `q > 2`.
    pub fn bipolar_sigmoid(q: T) -> Result<Self> {
        check_gain(q, T::lit(2.0), true)?;
        Ok(Self {
            family: Family::BipolarSigmoid,
            p: None,
            gain: Some(q),
        })
    }

    /// Requires odd `p ≥ 3` and `q ≥ 2`.
    pub fn power_sigmoid(p: u32, q: T) -> Result<Self> {
        check_exponent(p)?;
        check_gain(q, T::lit(2.0), false)?;
        Ok(Self {
            family: Family::PowerSigmoid,
            p: Some(p),
            gain: Some(q),
        })
    }

    /// Requires odd `p ≥ 3` and `q > 2`.
    pub fn smooth_power_sigmoid(p: u32, q: T) -> Result<Self> {
        check_exponent(p)?;
        check_gain(q, T::lit(2.0), true)?;
        Ok(Self {
            family: Family::SmoothPowerSigmoid,
            p: Some(p),
            gain: Some(q),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn exponent(&self) -> Option<u32> {
        self.p
    }

    pub fn gain(&self) -> Option<T> {
        self.gain
    }

    /// Short label usable as a file stem, e.g. `ps-p5-q7`.
    pub fn label(&self) -> String {
        let q = || self.gain.map(|g| g.to_string()).unwrap_or_default();
        match self.family {
            Family::Linear => "lin".to_string(),
            Family::BipolarSigmoid => format!("bs-q{}", q()),
            Family::PowerSigmoid => format!("ps-p{}-q{}", self.p.unwrap_or_default(), q()),
            Family::SmoothPowerSigmoid => format!("sps-p{}-q{}", self.p.unwrap_or_default(), q()),
        }
    }

    pub fn apply_scalar(&self, x: T) -> T {
        match self.family {
            Family::Linear => x,
            Family::BipolarSigmoid => sigmoid(x, self.gain()),
            Family::PowerSigmoid => {
                if x.abs() >= T::one() {
                    x.powi(self.p_i32())
                } else {
                    sigmoid(x, self.gain())
                }
            }
            Family::SmoothPowerSigmoid => {
                T::lit(0.5) * x.powi(self.p_i32()) + sigmoid(x, self.gain())
            }
        }
    }

    pub fn apply_vector(&self, v: &[T]) -> Vec<T> {
        v.iter().map(|&x| self.apply_scalar(x)).collect()
    }

    fn p_i32(&self) -> i32 {
        self.p.map_or(1, |p| p as i32)
    }
}

fn sigmoid<T: Scalar>(x: T, gain: Option<T>) -> T {
    let q = gain.expect("sigmoid families carry a gain");
    let half = T::lit(0.5);
    (half * q * x).tanh() / (half * q).tanh()
}

fn check_exponent(p: u32) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || p > i32::MAX as u32 {
        return Err(Error::InvalidActivation(format!(
            "exponent p must be an odd integer >= 3, got {p}"
        )));
    }
    Ok(())
}

fn check_gain<T: Scalar>(q: T, bound: T, strict: bool) -> Result<()> {
    let ok = q.is_finite() && if strict { q > bound } else { q >= bound };
    if ok {
        Ok(())
    } else {
        let rel = if strict { ">" } else { ">=" };
        Err(Error::InvalidActivation(format!("gain q must be {rel} {bound}, got {q}")))
    }
}

/// Canonical grammar: `lin`, `bs:q=5`, `ps:p=3,q=5`, `sps:p=3,q=7`.
impl<T: Scalar> fmt::Display for ActivationSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.gain.unwrap_or_else(T::zero);
        let p = self.p.unwrap_or_default();
        match self.family {
            Family::Linear => write!(f, "lin"),
            Family::BipolarSigmoid => write!(f, "bs:q={q}"),
            Family::PowerSigmoid => write!(f, "ps:p={p},q={q}"),
            Family::SmoothPowerSigmoid => write!(f, "sps:p={p},q={q}"),
        }
    }
}

impl<T: Scalar> FromStr for ActivationSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((n, rest)) => (n.trim(), rest),
            None => (s, ""),
        };
        let mut p: Option<u32> = None;
        let mut q: Option<T> = None;
        for kv in params.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidActivation(format!("expected key=value, got `{kv}`")))?;
            let value = value.trim();
            match key.trim() {
                "p" if p.is_none() => {
                    p = Some(value.parse().map_err(|_| {
                        Error::InvalidActivation(format!("p must be a positive integer, got `{value}`"))
                    })?)
                }
                "q" if q.is_none() => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::InvalidActivation(format!("q must be a number, got `{value}`"))
                    })?;
                    q = Some(T::lit(v));
                }
                other => {
                    return Err(Error::InvalidActivation(format!(
                        "unexpected or repeated parameter `{other}` in `{s}`"
                    )))
                }
            }
        }
        let need_q = || q.ok_or_else(|| Error::InvalidActivation(format!("`{s}` needs q=")));
        let need_p = || p.ok_or_else(|| Error::InvalidActivation(format!("`{s}` needs p=")));
        let reject_p = || match p {
            Some(_) => Err(Error::InvalidActivation(format!("`{name}` takes no p"))),
            None => Ok(()),
        };
        match name {
            "lin" => {
                if p.is_some() || q.is_some() {
                    return Err(Error::InvalidActivation("`lin` takes no parameters".into()));
                }
                Ok(Self::linear())
            }
            "bs" => {
                reject_p()?;
                Self::bipolar_sigmoid(need_q()?)
            }
            "ps" => Self::power_sigmoid(need_p()?, need_q()?),
            "sps" => Self::smooth_power_sigmoid(need_p()?, need_q()?),
            other => Err(Error::InvalidActivation(format!(
                "unknown family `{other}` (expected lin, bs, ps or sps)"
            ))),
        }
    }
}

/// Parses a `;`-separated list such as `lin;bs:q=7;ps:p=5,q=7`.
pub fn parse_activation_list<T: Scalar>(s: &str) -> Result<Vec<ActivationSpec<T>>> {
    let specs = s
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(Error::InvalidActivation("at least one activation is required".into()));
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn printed_sigmoid(x: f64, q: f64) -> f64 {
        ((1.0 + (-q).exp()) / (1.0 - (-q).exp())) * ((1.0 - (-q * x).exp()) / (1.0 + (-q * x).exp()))
    }

    fn all_specs() -> Vec<ActivationSpec<f64>> {
        parse_activation_list(
            "lin;bs:q=5;bs:q=7;ps:p=3,q=5;ps:p=5,q=7;ps:p=5,q=9;ps:p=3,q=2;sps:p=3,q=7;sps:p=5,q=9;sps:p=7,q=11",
        )
        .unwrap()
    }

    #[test]
    fn scalar_examples() {
        let lin = ActivationSpec::<f64>::linear();
        assert_eq!(lin.apply_scalar(2.0), 2.0);
        let ps = ActivationSpec::power_sigmoid(3, 5.0).unwrap();
        assert_eq!(ps.apply_scalar(2.0), 8.0);
        let bs = ActivationSpec::bipolar_sigmoid(5.0).unwrap();
        assert_relative_eq!(bs.apply_scalar(1.0), 1.0, max_relative = 1e-15);
        for spec in all_specs() {
            assert_eq!(spec.apply_scalar(0.0), 0.0, "{spec}");
        }
    }

    #[test]
    fn vector_examples() {
        let lin = ActivationSpec::<f64>::linear();
        assert_eq!(lin.apply_vector(&[-1.0, 0.0, 3.0]), vec![-1.0, 0.0, 3.0]);
        let ps = ActivationSpec::power_sigmoid(3, 5.0).unwrap();
        assert_eq!(ps.apply_vector(&[2.0, -2.0]), vec![8.0, -8.0]);
        for spec in all_specs() {
            assert_eq!(spec.apply_vector(&[0.0; 4]), vec![0.0; 4]);
        }
    }

    #[test]
    fn tanh_form_matches_printed_formula() {
        for q in [2.5, 5.0, 7.0, 11.0] {
            for i in -300..=300 {
                let x = i as f64 / 100.0;
                let printed = printed_sigmoid(x, q);
                let bs = ActivationSpec::bipolar_sigmoid(q).unwrap();
                assert!((bs.apply_scalar(x) - printed).abs() <= 1e-13, "q={q} x={x}");
            }
        }
        // Far tails: the printed form is fine for x > 0 but overflows to NaN for very negative qx.
        let bs = ActivationSpec::bipolar_sigmoid(7.0).unwrap();
        assert!(printed_sigmoid(-200.0, 7.0).is_nan());
        assert_relative_eq!(bs.apply_scalar(-200.0), -1.0 / (3.5f64).tanh(), max_relative = 1e-15);
    }

    #[test]
    fn smooth_power_sigmoid_is_not_normalized() {
        let sps = ActivationSpec::smooth_power_sigmoid(3, 7.0).unwrap();
        assert_relative_eq!(sps.apply_scalar(1.0), 1.5, max_relative = 1e-15);
    }

    #[test]
    fn validation() {
        assert!(ActivationSpec::bipolar_sigmoid(2.0).is_err());
        assert!(ActivationSpec::bipolar_sigmoid(f64::NAN).is_err());
        assert!(ActivationSpec::power_sigmoid(3, 2.0).is_ok());
        assert!(ActivationSpec::power_sigmoid(3, 1.9).is_err());
        assert!(ActivationSpec::power_sigmoid(4, 5.0).is_err());
        assert!(ActivationSpec::power_sigmoid(1, 5.0).is_err());
        assert!(ActivationSpec::smooth_power_sigmoid(3, 2.0).is_err());
        assert!(ActivationSpec::smooth_power_sigmoid(6, 7.0).is_err());
    }

    #[test]
    fn grammar() {
        let specs = all_specs();
        for spec in &specs {
            let again: ActivationSpec<f64> = spec.to_string().parse().unwrap();
            assert_eq!(&again, spec);
        }
        assert_eq!(specs[3].to_string(), "ps:p=3,q=5");
        assert_eq!(specs[3].label(), "ps-p3-q5");
        assert_eq!(specs[1].label(), "bs-q5");
        for bad in ["", "foo", "bs", "bs:q=x", "bs:p=3,q=5", "lin:q=3", "ps:q=5", "ps:p=4,q=5", "sps:p=3,q=7,q=8", "bs:q"] {
            assert!(parse_activation_list::<f64>(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_activation_list::<f64>(" lin ; bs:q=7 ").unwrap().len(), 2);
    }

    /// Exact `f(y) − f(x)` for `x < y` in the same branch, computed without
    /// cancellation: `tanh u − tanh v = sinh(u − v) / (cosh u cosh v)`.
    fn exact_increment(spec: &ActivationSpec<f64>, x: f64, y: f64) -> f64 {
        let sig = |q: f64| {
            let (u, v) = (0.5 * q * y, 0.5 * q * x);
            (u - v).sinh() / (u.cosh() * v.cosh()) / (0.5 * q).tanh()
        };
        let pow = |p: u32| y.powi(p as i32) - x.powi(p as i32);
        match spec.family() {
            Family::Linear => y - x,
            Family::BipolarSigmoid => sig(spec.gain().unwrap()),
            Family::PowerSigmoid if x.abs() >= 1.0 && y.abs() >= 1.0 => pow(spec.exponent().unwrap()),
            Family::PowerSigmoid => f64::INFINITY,
            Family::SmoothPowerSigmoid => 0.5 * pow(spec.exponent().unwrap()) + sig(spec.gain().unwrap()),
        }
    }

    #[test]
    fn oddness_monotonicity_sign_on_grid() {
        for spec in all_specs() {
            let grid: Vec<f64> = (-500..=500).map(|i| i as f64 / 100.0).collect();
            for &x in &grid {
                let fx = spec.apply_scalar(x);
                assert!((spec.apply_scalar(-x) + fx).abs() <= 1e-12, "{spec} x={x}");
                if x != 0.0 {
                    assert!(x * fx > 0.0, "{spec} x={x}");
                }
            }
            for w in grid.windows(2) {
                let (a, b) = (spec.apply_scalar(w[0]), spec.apply_scalar(w[1]));
                assert!(exact_increment(&spec, w[0], w[1]) > 0.0, "{spec} at {}", w[0]);
                // Strictness is only observable when the true step exceeds rounding.
                if exact_increment(&spec, w[0], w[1]) > 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
                    assert!(a < b, "{spec} at {}", w[0]);
                } else {
                    assert!(a <= b, "{spec} at {}", w[0]);
                }
            }
        }
    }
}
