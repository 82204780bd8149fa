//! Running sum with the truncation rule shared by every infinite series in
//! the crate.

use serde::Serialize;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Stopping rule for infinite series.
///
/// A series stops once `consecutive` successive terms past the largest term
/// seen so far satisfy `|t_k| <= tol * |partial sum|`, or fails after `n_max`
/// terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub n_max: usize,
    pub consecutive: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-15,
            n_max: 10_000,
            consecutive: 3,
        }
    }
}

impl TruncationPolicy {
    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Policy(format!("tol must be positive, got {}", self.tol)));
        }
        if self.n_max < 16 {
            return Err(Error::Policy(format!("n_max must be >= 16, got {}", self.n_max)));
        }
        if self.consecutive == 0 {
            return Err(Error::Policy("consecutive must be >= 1".into()));
        }
        Ok(())
    }
}

/// Result of summing a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEval {
    pub value: f64,
    /// Twice the first neglected term plus a bound on accumulated rounding.
    pub abs_err_est: f64,
    pub terms_used: usize,
    /// The series is a finite polynomial and was summed completely.
    pub terminated: bool,
}

pub(crate) struct SeriesAccumulator {
    policy: TruncationPolicy,
    sum: DoubleDouble,
    peak: f64,
    peak_idx: usize,
    small_run: usize,
    count: usize,
    round_err: f64,
}

impl SeriesAccumulator {
    pub(crate) fn new(policy: TruncationPolicy) -> Self {
        Self {
            policy,
            sum: DoubleDouble::ZERO,
            peak: 0.0,
            peak_idx: 0,
            small_run: 0,
            count: 0,
            round_err: 0.0,
        }
    }

    pub(crate) fn sum(&self) -> DoubleDouble {
        self.sum
    }

    /// Adds a term with an absolute error bound. Returns `true` once the
    /// stopping rule has fired.
    pub(crate) fn push(&mut self, term: DoubleDouble, term_err: f64) -> Result<bool> {
        if !term.is_finite() || !term_err.is_finite() {
            return Err(Error::Domain(format!(
                "series term {} overflowed",
                self.count
            )));
        }
        let k = self.count;
        self.sum += term;
        self.round_err += term_err;
        self.count += 1;

        let mag = term.to_f64().abs();
        if k == 0 || mag > self.peak {
            self.peak = mag;
            self.peak_idx = k;
            self.small_run = 0;
            return Ok(false);
        }
        if mag <= self.policy.tol * self.sum.to_f64().abs() {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        Ok(self.small_run >= self.policy.consecutive)
    }

    /// Fails once the term budget is spent.
    pub(crate) fn check_budget(&self) -> Result<()> {
        if self.count >= self.policy.n_max {
            Err(Error::NoConvergence {
                n_max: self.policy.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// Closes an infinite series whose next (unused) term has magnitude `next_abs`.
    pub(crate) fn finish_truncated(self, next_abs: f64) -> SeriesEval {
        self.finish_scaled(next_abs, 1.0)
    }

    /// As [`Self::finish_truncated`] for a series multiplied by `scale`.
    pub(crate) fn finish_scaled(self, next_abs: f64, scale: f64) -> SeriesEval {
        let value = (self.sum * scale).to_f64();
        let s = scale.abs();
        SeriesEval {
            value,
            abs_err_est: s * (2.0 * next_abs + self.round_err) + f64::EPSILON * value.abs(),
            terms_used: self.count,
            terminated: false,
        }
    }

    /// Closes a finite polynomial sum.
    pub(crate) fn finish_terminated(self) -> SeriesEval {
        SeriesEval {
            value: self.sum.to_f64(),
            abs_err_est: 0.0,
            terms_used: self.count,
            terminated: true,
        }
    }
}
