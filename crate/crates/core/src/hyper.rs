//! Generalized hypergeometric series
//! `pFq(a₁..a_p; b₁..b_q; z) = Σ_k Π(a_i)_k / Π(b_j)_k · z^k / k!`.
//!
//! Terms follow the ratio recurrence
//! `t_{k+1} = t_k · Π(a_i + k) / Π(b_j + k) · z / (k + 1)` in double-double
//! arithmetic. Terminating series (a numerator parameter equal to `−n`) are
//! summed exactly to `t_n`; other series use the [`TruncationPolicy`] rule.

use crate::dd::{DoubleDouble, DD_EPS};
use crate::error::{Error, Result};
use crate::series::{SeriesAccumulator, SeriesEval, TruncationPolicy};
use crate::specfun::{nonpositive_integer, POLE_TOL};

/// Parameters and argument of a `pFq` series.
///
/// Parameters are carried in double-double so that combinations such as
/// `½ + ν + ½j` can be formed without rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    pub num: Vec<DoubleDouble>,
    pub den: Vec<DoubleDouble>,
    pub arg: DoubleDouble,
}

impl HyperParams {
    pub fn new(num: &[f64], den: &[f64], arg: f64) -> Self {
        Self {
            num: num.iter().copied().map(DoubleDouble::from).collect(),
            den: den.iter().copied().map(DoubleDouble::from).collect(),
            arg: DoubleDouble::from(arg),
        }
    }

    pub fn exact(num: Vec<DoubleDouble>, den: Vec<DoubleDouble>, arg: DoubleDouble) -> Self {
        Self { num, den, arg }
    }

    pub fn p(&self) -> usize {
        self.num.len()
    }

    pub fn q(&self) -> usize {
        self.den.len()
    }

    /// First denominator parameter that vanishes before the series terminates.
    pub fn blocking_denominator(&self) -> Option<f64> {
        let stop = termination_index(self);
        self.den.iter().map(|b| b.to_f64()).find(|&b| {
            match (nonpositive_integer(b, POLE_TOL), stop) {
                (None, _) => false,
                (Some(m), Some(n)) => m <= n,
                (Some(_), None) => true,
            }
        })
    }

    fn check(&self) -> Result<Option<u64>> {
        if let Some(b) = self.blocking_denominator() {
            return Err(Error::Parameter(format!(
                "denominator parameter {b} is a nonpositive integer before termination"
            )));
        }
        let stop = termination_index(self);
        if stop.is_none() {
            let (p, q) = (self.p(), self.q());
            if p > q + 1 {
                return Err(Error::Parameter(format!(
                    "{p}F{q} diverges for every nonzero argument"
                )));
            }
            if p == q + 1 && self.arg.to_f64().abs() >= 1.0 {
                return Err(Error::Parameter(format!(
                    "{p}F{q} requires |z| < 1, got {}",
                    self.arg.to_f64()
                )));
            }
        }
        Ok(stop)
    }
}

/// Number of the last nonzero term of a terminating series: the smallest
/// `n` with some numerator parameter equal to `−n`. `None` for an infinite
/// series.
pub fn termination_index(params: &HyperParams) -> Option<u64> {
    params
        .num
        .iter()
        .filter_map(|a| nonpositive_integer(a.to_f64(), POLE_TOL))
        .min()
}

fn next_term(params: &HyperParams, term: DoubleDouble, k: u64) -> DoubleDouble {
    let kf = k as f64;
    let num = params
        .num
        .iter()
        .fold(params.arg, |acc, &a| acc * (a + kf));
    let den = params
        .den
        .iter()
        .fold(DoubleDouble::from(kf + 1.0), |acc, &b| acc * (b + kf));
    term * num / den
}

/// Sums `pFq(a; b; z)`.
///
/// Non-terminating series need `p <= q`, or `p = q + 1` with `|z| < 1`.
pub fn eval_pfq(params: &HyperParams, policy: &TruncationPolicy) -> Result<SeriesEval> {
    sum_pfq(params, policy).map(|(_, eval)| eval)
}

/// [`eval_pfq`] that also returns the unrounded double-double sum.
pub(crate) fn sum_pfq(
    params: &HyperParams,
    policy: &TruncationPolicy,
) -> Result<(DoubleDouble, SeriesEval)> {
    policy.validate()?;
    let stop = params.check()?;
    // relative error growth of one recurrence step
    let step_err = (2 * (params.p() + params.q()) + 4) as f64 * DD_EPS;

    let mut acc = SeriesAccumulator::new(*policy);
    let mut term = DoubleDouble::ONE;
    let mut k: u64 = 0;
    match stop {
        Some(n) => {
            loop {
                acc.push(term, 0.0)?;
                if k == n {
                    break;
                }
                term = next_term(params, term, k);
                k += 1;
            }
            Ok((acc.sum(), acc.finish_terminated()))
        }
        None => loop {
            let err = term.to_f64().abs() * step_err * (k + 1) as f64;
            let done = acc.push(term, err)?;
            term = next_term(params, term, k);
            k += 1;
            if done {
                return Ok((acc.sum(), acc.finish_truncated(term.to_f64().abs())));
            }
            acc.check_budget()?;
        },
    }
}
