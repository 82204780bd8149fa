//! Grid verification of the closed forms against the defining series.
//!
//! Every grid point yields one [`VerifyRecord`]: the left side is always
//! [`s_direct`], the right side the method under test (the closed form by
//! default). Points where a formula is undefined become skips, numeric
//! disagreements and evaluation errors become fails.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{closed_form_singularity, evaluate, s_direct, CaseKind, IdentityCase, Method};
use crate::series::TruncationPolicy;

/// Largest `x` at which the defining series is trusted as an oracle.
pub const ORACLE_X_MAX: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub nu_values: Vec<f64>,
    pub j_values: Vec<u32>,
    pub x_values: Vec<f64>,
    pub cases: Vec<CaseKind>,
    pub rel_tol: f64,
    pub policy: TruncationPolicy,
    /// Right-hand side compared against the defining series.
    pub method: Method,
}

impl GridSpec {
    /// All four cases, closed form vs direct, tolerance `1e-9`.
    pub fn new(nu_values: Vec<f64>, j_values: Vec<u32>, x_values: Vec<f64>) -> Self {
        Self {
            nu_values,
            j_values,
            x_values,
            cases: CaseKind::ALL.to_vec(),
            rel_tol: 1e-9,
            policy: TruncationPolicy::default(),
            method: Method::Closed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::Domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.nu_values.is_empty()
            || self.j_values.is_empty()
            || self.x_values.is_empty()
            || self.cases.is_empty()
        {
            return Err(Error::Domain("grid lists must be non-empty".into()));
        }
        if self.method == Method::Direct {
            return Err(Error::Domain("direct is the oracle, compare closed or middle".into()));
        }
        if let Some(v) = self.nu_values.iter().chain(&self.x_values).find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("grid values must be finite, got {v}")));
        }
        self.policy.validate()
    }

    /// Grid points in lexicographic `(case, ν, j, x)` order.
    pub fn points(&self) -> Vec<IdentityCase> {
        let mut cases = self.cases.clone();
        cases.sort();
        cases.dedup();
        let sorted_f64 = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let nus = sorted_f64(&self.nu_values);
        let xs = sorted_f64(&self.x_values);
        let mut js = self.j_values.clone();
        js.sort_unstable();
        js.dedup();

        let mut out = Vec::with_capacity(cases.len() * nus.len() * js.len() * xs.len());
        for &kind in &cases {
            for &nu in &nus {
                for &j in &js {
                    for &x in &xs {
                        out.push(IdentityCase::new(kind, nu, j, x));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub case: IdentityCase,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    /// `abs_err / (1 + max(|lhs|, |rhs|))`
    pub rel_err: f64,
    pub status: Status,
    pub skip_reason: Option<String>,
    /// Evaluation error text of a fail record.
    pub error: Option<String>,
    pub terms_lhs: usize,
    pub terms_rhs: usize,
}

impl VerifyRecord {
    fn skip(case: IdentityCase, reason: String) -> Self {
        Self {
            case,
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            status: Status::Skip,
            skip_reason: Some(reason),
            error: None,
            terms_lhs: 0,
            terms_rhs: 0,
        }
    }

    fn failed(case: IdentityCase, err: &Error) -> Self {
        Self {
            status: Status::Fail,
            skip_reason: None,
            error: Some(err.to_string()),
            ..Self::skip(case, String::new())
        }
    }
}

/// Normalized error used by the harness.
pub fn rel_err(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()))
}

/// Checks a single grid point.
pub fn verify_point(case: IdentityCase, spec: &GridSpec) -> VerifyRecord {
    if let Some(s) = case.singularity() {
        return VerifyRecord::skip(case, s.to_string());
    }
    if spec.method == Method::Closed {
        if let Some(s) = closed_form_singularity(&case) {
            return VerifyRecord::skip(case, format!("closed form undefined: {s}"));
        }
    }
    if case.x.abs() > ORACLE_X_MAX {
        let mut rec = VerifyRecord::skip(
            case,
            format!("closed-form only (|x| > {ORACLE_X_MAX})"),
        );
        if let Ok(r) = evaluate(&case, spec.method, &spec.policy) {
            rec.rhs = r.value;
            rec.terms_rhs = r.terms_used;
        }
        return rec;
    }

    let lhs = match s_direct(&case, &spec.policy) {
        Ok(v) => v,
        Err(e) => return VerifyRecord::failed(case, &e),
    };
    let rhs = match evaluate(&case, spec.method, &spec.policy) {
        Ok(v) => v,
        Err(e) => {
            let mut rec = VerifyRecord::failed(case, &e);
            rec.lhs = lhs.value;
            rec.terms_lhs = lhs.terms_used;
            return rec;
        }
    };
    let abs_err = (lhs.value - rhs.value).abs();
    let rel = rel_err(lhs.value, rhs.value);
    let status = if rel <= spec.rel_tol {
        Status::Pass
    } else {
        Status::Fail
    };
    VerifyRecord {
        case,
        lhs: lhs.value,
        rhs: rhs.value,
        abs_err,
        rel_err: rel,
        status,
        skip_reason: None,
        error: None,
        terms_lhs: lhs.terms_used,
        terms_rhs: rhs.terms_used,
    }
}

/// One record per grid point, in lexicographic `(case, ν, j, x)` order.
///
/// Points are evaluated in parallel; evaluation failures become fail
/// records, so the only error is an invalid spec.
pub fn run_grid(spec: &GridSpec) -> Result<Vec<VerifyRecord>> {
    spec.validate()?;
    Ok(spec
        .points()
        .into_par_iter()
        .map(|case| verify_point(case, spec))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRef {
    pub case: CaseKind,
    pub nu: f64,
    pub j: u32,
    pub x: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Largest `rel_err` among passing records, 0 when there are none.
    pub max_rel_err: f64,
    pub fails: Vec<PointRef>,
    pub skips: Vec<PointRef>,
}

pub fn summarize(records: &[VerifyRecord]) -> Summary {
    let mut s = Summary {
        total: records.len(),
        ..Summary::default()
    };
    for rec in records {
        let point = |detail: String| PointRef {
            case: rec.case.kind(),
            nu: rec.case.nu,
            j: rec.case.j,
            x: rec.case.x,
            detail,
        };
        match rec.status {
            Status::Pass => {
                s.passed += 1;
                s.max_rel_err = s.max_rel_err.max(rec.rel_err);
            }
            Status::Fail => {
                s.failed += 1;
                let detail = rec
                    .error
                    .clone()
                    .unwrap_or_else(|| format!("rel_err {:e}", rec.rel_err));
                s.fails.push(point(detail));
            }
            Status::Skip => {
                s.skipped += 1;
                s.skips.push(point(rec.skip_reason.clone().unwrap_or_default()));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(kind: CaseKind, nu: f64, j: u32, x: f64) -> GridSpec {
        GridSpec {
            cases: vec![kind],
            ..GridSpec::new(vec![nu], vec![j], vec![x])
        }
    }

    #[test]
    fn trivial_point_passes() {
        let recs = run_grid(&single(CaseKind::PlusPlus, 0.5, 0, 0.0)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].status, Status::Pass);
        assert_eq!(recs[0].lhs, 1.0);
        assert!((recs[0].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_pochhammer_base_is_skipped() {
        let recs = run_grid(&single(CaseKind::PlusMinus, 2.0, 3, 1.0)).unwrap();
        assert_eq!(recs[0].status, Status::Skip);
        assert!(recs[0]
            .skip_reason
            .as_deref()
            .unwrap()
            .contains("Pochhammer base nonpositive integer"));
    }

    #[test]
    fn large_x_is_closed_form_only() {
        let recs = run_grid(&single(CaseKind::PlusPlus, 0.5, 1, 25.0)).unwrap();
        assert_eq!(recs[0].status, Status::Skip);
        assert!(recs[0].rhs.is_finite());
        assert!(recs[0].lhs.is_nan());
    }

    #[test]
    fn ordering_is_lexicographic_and_deterministic() {
        let spec = GridSpec {
            cases: vec![CaseKind::MinusMinus, CaseKind::PlusPlus],
            ..GridSpec::new(vec![1.7, -0.3], vec![2, 0], vec![2.5, 0.25])
        };
        let a = run_grid(&spec).unwrap();
        let b = run_grid(&spec).unwrap();
        assert_eq!(a.len(), 16);
        let key = |r: &VerifyRecord| (r.case.kind(), r.case.nu.to_bits() as i64, r.case.j, r.case.x.to_bits());
        assert_eq!(a[0].case.kind(), CaseKind::PlusPlus);
        assert_eq!(a[0].case.nu, -0.3);
        assert_eq!(a[0].case.x, 0.25);
        assert_eq!(a.iter().map(key).collect::<Vec<_>>(), b.iter().map(key).collect::<Vec<_>>());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.lhs.to_bits(), rb.lhs.to_bits());
            assert_eq!(ra.rhs.to_bits(), rb.rhs.to_bits());
        }
    }

    #[test]
    fn invalid_spec() {
        let mut spec = GridSpec::new(vec![0.5], vec![0], vec![1.0]);
        spec.rel_tol = 0.0;
        assert!(run_grid(&spec).is_err());
        let spec = GridSpec::new(vec![], vec![0], vec![1.0]);
        assert!(run_grid(&spec).is_err());
    }

    #[test]
    fn summary_counts() {
        assert_eq!(summarize(&[]), Summary::default());

        let case = IdentityCase::new(CaseKind::PlusPlus, 0.5, 0, 1.0);
        let pass = VerifyRecord {
            case,
            lhs: 1.0,
            rhs: 1.0,
            abs_err: 2e-12,
            rel_err: 1e-12,
            status: Status::Pass,
            skip_reason: None,
            error: None,
            terms_lhs: 3,
            terms_rhs: 3,
        };
        let s = summarize(std::slice::from_ref(&pass));
        assert_eq!(s.passed, 1);
        assert_eq!(s.max_rel_err, 1e-12);

        let skip = VerifyRecord::skip(case, "why".into());
        let fail = VerifyRecord::failed(case, &Error::NoConvergence { n_max: 16 });
        let s = summarize(&[pass.clone(), skip.clone(), fail, skip, pass]);
        assert_eq!((s.total, s.passed, s.failed, s.skipped), (5, 2, 1, 2));
        assert_eq!(s.fails.len(), 1);
        assert_eq!(s.skips[0].detail, "why");
    }
}
