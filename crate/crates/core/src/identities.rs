//! Summation formulas for the weighted Laguerre series
//!
//! ```text
//! S(±ν, ±j) = e^{−x} Σ_{n≥0} xⁿ L_n^{(ν)}(x) / (1 ± ν ± j)_n
//! ```
//!
//! Each series can be computed three ways:
//!
//! * [`s_direct`]: the defining series, summed term by term;
//! * [`s_middle`]: `Σ (−x)ⁿ/n! · ₂F₁(−n, −n−ν; 1±ν±j; −1)` with every inner
//!   `₂F₁` summed as a finite polynomial;
//! * [`s_closed`]: a finite sum over `r = 0..=j` of generalized hypergeometric
//!   functions of argument `−x²` (`₄F₅`, `₂F₃`, `₃F₄`, `₂F₃` for the cases
//!   `(+,+)`, `(+,−)`, `(−,+)`, `(−,−)`).
//!
//! The closed forms come from evaluating the inner `₂F₁(−1)` values with the
//! generalized Kummer summation theorem ([`kummer_plus`], [`kummer_minus`]).
//! Gamma factors are combined in log space with sign tracking and
//! exponentiated once per `r`-term. Gamma functions in denominators use
//! reciprocal-gamma semantics, so a term with a polar denominator contributes
//! exactly zero.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dd::{DoubleDouble, DD_EPS};
use crate::error::{Error, Result, Singularity};
use crate::hyper::{sum_pfq, HyperParams};
use crate::series::{SeriesAccumulator, SeriesEval, TruncationPolicy};
use crate::specfun::{binomial, is_gamma_pole, log_gamma, nonpositive_integer, LaguerreIter};

/// Distance to a nonpositive integer at which `1 ± ν ± j` counts as singular.
pub const POCHHAMMER_BASE_TOL: f64 = 1e-10;
/// Minimum `|ν + j − 1|` for the `(−,−)` closed form.
pub const MINUS_MINUS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One of the four series `S(ν, j)`, `S(ν, −j)`, `S(−ν, j)`, `S(−ν, −j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseKind {
    #[serde(rename = "pp")]
    PlusPlus,
    #[serde(rename = "pm")]
    PlusMinus,
    #[serde(rename = "mp")]
    MinusPlus,
    #[serde(rename = "mm")]
    MinusMinus,
}

impl CaseKind {
    pub const ALL: [CaseKind; 4] = [
        CaseKind::PlusPlus,
        CaseKind::PlusMinus,
        CaseKind::MinusPlus,
        CaseKind::MinusMinus,
    ];

    pub fn from_signs(sign_nu: Sign, sign_j: Sign) -> Self {
        match (sign_nu, sign_j) {
            (Sign::Plus, Sign::Plus) => CaseKind::PlusPlus,
            (Sign::Plus, Sign::Minus) => CaseKind::PlusMinus,
            (Sign::Minus, Sign::Plus) => CaseKind::MinusPlus,
            (Sign::Minus, Sign::Minus) => CaseKind::MinusMinus,
        }
    }

    pub fn signs(self) -> (Sign, Sign) {
        match self {
            CaseKind::PlusPlus => (Sign::Plus, Sign::Plus),
            CaseKind::PlusMinus => (Sign::Plus, Sign::Minus),
            CaseKind::MinusPlus => (Sign::Minus, Sign::Plus),
            CaseKind::MinusMinus => (Sign::Minus, Sign::Minus),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseKind::PlusPlus => "pp",
            CaseKind::PlusMinus => "pm",
            CaseKind::MinusPlus => "mp",
            CaseKind::MinusMinus => "mm",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pp" => Ok(CaseKind::PlusPlus),
            "pm" => Ok(CaseKind::PlusMinus),
            "mp" => Ok(CaseKind::MinusPlus),
            "mm" => Ok(CaseKind::MinusMinus),
            other => Err(Error::Domain(format!(
                "unknown case '{other}', expected pp, pm, mp or mm"
            ))),
        }
    }
}

/// A point `(ν, j, x)` of one of the four series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCase {
    pub sign_nu: Sign,
    pub sign_j: Sign,
    pub nu: f64,
    pub j: u32,
    pub x: f64,
}

impl IdentityCase {
    pub fn new(kind: CaseKind, nu: f64, j: u32, x: f64) -> Self {
        let (sign_nu, sign_j) = kind.signs();
        Self {
            sign_nu,
            sign_j,
            nu,
            j,
            x,
        }
    }

    pub fn kind(&self) -> CaseKind {
        CaseKind::from_signs(self.sign_nu, self.sign_j)
    }

    /// Pochhammer base `c = 1 ± ν ± j`.
    pub fn c(&self) -> f64 {
        1.0 + self.sign_nu.value() * self.nu + self.sign_j.value() * f64::from(self.j)
    }

    fn c_exact(&self) -> DoubleDouble {
        DoubleDouble::sum(
            self.sign_nu.value() * self.nu,
            1.0 + self.sign_j.value() * f64::from(self.j),
        )
    }

    /// Why the defining series (and every formula for it) is undefined here.
    pub fn singularity(&self) -> Option<Singularity> {
        let c = self.c();
        if nonpositive_integer(c, POCHHAMMER_BASE_TOL).is_some() {
            return Some(Singularity::PochhammerBase { c });
        }
        if self.kind() == CaseKind::MinusMinus {
            let d = self.nu + f64::from(self.j) - 1.0;
            if d.abs() <= MINUS_MINUS_TOL {
                return Some(Singularity::MinusMinusPrefactor {
                    nu_plus_j_minus_one: d,
                });
            }
        }
        None
    }

    fn check(&self) -> Result<()> {
        match self.singularity() {
            Some(s) => Err(s.into()),
            None => Ok(()),
        }
    }
}

/// Signed product kept as `sign · exp(ln)`, or exactly zero.
#[derive(Debug, Clone, Copy)]
struct Weight {
    ln: f64,
    sign: f64,
    zero: bool,
}

impl Weight {
    fn one() -> Self {
        Self {
            ln: 0.0,
            sign: 1.0,
            zero: false,
        }
    }

    fn times(mut self, v: f64) -> Self {
        if v == 0.0 {
            self.zero = true;
        } else {
            self.ln += v.abs().ln();
            self.sign *= v.signum();
        }
        self
    }

    fn pow2(mut self, e: f64) -> Self {
        self.ln += e * LN_2;
        self
    }

    /// Multiplies by Γ(arg); a pole here is a singularity of the formula.
    fn gamma(mut self, arg: f64, factor: &'static str) -> Result<Self> {
        let lg = log_gamma(arg).map_err(|_| Singularity::GammaPole { factor, arg })?;
        self.ln += lg.ln_abs;
        self.sign *= lg.sign;
        Ok(self)
    }

    /// Multiplies by 1/Γ(arg), which vanishes at the poles of Γ.
    fn rgamma(mut self, arg: f64) -> Self {
        if is_gamma_pole(arg) {
            self.zero = true;
            return self;
        }
        if let Ok(lg) = log_gamma(arg) {
            self.ln -= lg.ln_abs;
            self.sign *= lg.sign;
        }
        self
    }

    fn value(self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }
}

fn half(n: i64) -> f64 {
    n as f64 * 0.5
}

fn parity_sign(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Which side of the generalized Kummer theorem to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KummerSign {
    /// `₂F₁(a, b; 1 + a − b + j; −1)`
    Plus,
    /// `₂F₁(a, b; 1 + a − b − j; −1)`
    Minus,
}

/// `₂F₁(a, b; 1 + a − b + j; −1)` by the generalized Kummer summation theorem.
pub fn kummer_plus(a: f64, b: f64, j: u32) -> Result<f64> {
    let jj = i64::from(j);
    let pre = Weight::one()
        .pow2(-a)
        .gamma(0.5, "Γ(1/2)")?
        .gamma(b - f64::from(j), "Γ(b-j)")?
        .gamma(1.0 + a - b + f64::from(j), "Γ(1+a-b+j)")?
        .rgamma(b)
        .rgamma(0.5 * a - b + half(jj + 1))
        .rgamma(0.5 * a - b + half(jj + 2));
    let mut sum = 0.0;
    for r in 0..=j {
        let rr = i64::from(r);
        let w = pre
            .times(parity_sign(rr) * binomial(j, r)?)
            .gamma(0.5 * a - b + half(jj + rr + 1), "Γ(a/2-b+j/2+r/2+1/2)")?
            .rgamma(0.5 * a + half(rr - jj + 1));
        sum += w.value();
    }
    Ok(sum)
}

/// `₂F₁(a, b; 1 + a − b − j; −1)` by the companion summation formula.
pub fn kummer_minus(a: f64, b: f64, j: u32) -> Result<f64> {
    let jj = i64::from(j);
    let pre = Weight::one()
        .pow2(-a)
        .gamma(0.5, "Γ(1/2)")?
        .gamma(1.0 + a - b - f64::from(j), "Γ(1+a-b-j)")?
        .rgamma(0.5 * a - b + half(1 - jj))
        .rgamma(0.5 * a - b + half(2 - jj));
    let mut sum = 0.0;
    for r in 0..=j {
        let rr = i64::from(r);
        let w = pre
            .times(binomial(j, r)?)
            .gamma(0.5 * a - b + half(rr - jj + 1), "Γ(a/2-b-j/2+r/2+1/2)")?
            .rgamma(0.5 * a + half(rr - jj + 1));
        sum += w.value();
    }
    Ok(sum)
}

pub fn kummer(a: f64, b: f64, j: u32, sign: KummerSign) -> Result<f64> {
    match sign {
        KummerSign::Plus => kummer_plus(a, b, j),
        KummerSign::Minus => kummer_minus(a, b, j),
    }
}

/// The `₂F₁(a, b; c; −1)` series that [`kummer`] sums in closed form.
pub fn kummer_series_params(a: f64, b: f64, j: u32, sign: KummerSign) -> HyperParams {
    let jf = f64::from(j);
    let c = match sign {
        KummerSign::Plus => 1.0 + a - b + jf,
        KummerSign::Minus => 1.0 + a - b - jf,
    };
    HyperParams::new(&[a, b], &[c], -1.0)
}

/// The defining series `e^{−x} Σ xⁿ L_n^{(ν)}(x) / (c)_n`, summed directly.
pub fn s_direct(case: &IdentityCase, policy: &TruncationPolicy) -> Result<SeriesEval> {
    policy.validate()?;
    case.check()?;
    let c = case.c();
    let x = case.x;
    let mut lag = LaguerreIter::new(case.nu, x);
    // xⁿ / (c)_n
    let mut ratio = 1.0;
    let mut prev_abs = 0.0;
    let mut acc = SeriesAccumulator::new(*policy);
    let mut n = 0u32;
    loop {
        let l = lag.next_value();
        let t = ratio * l;
        let err = 4.0 * f64::from(n + 1) * f64::EPSILON * ratio.abs() * (l.abs() + prev_abs);
        let done = acc.push(DoubleDouble::from(t), err)?;
        ratio *= x / (c + f64::from(n));
        prev_abs = l.abs();
        n += 1;
        if done {
            let next = ratio * lag.next_value();
            return Ok(acc.finish_scaled(next.abs(), (-x).exp()));
        }
        acc.check_budget()?;
    }
}

/// `Σ_n (−x)ⁿ/n! · F_n` with `F_n = ₚ₊₂F_q(−n, −n−ν, a…; b…; y)`, every
/// `F_n` summed as a terminating polynomial.
fn terminating_outer_sum(
    extra_num: &[DoubleDouble],
    den: &[DoubleDouble],
    y: DoubleDouble,
    nu: f64,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<SeriesEval> {
    let inner = |n: u32| -> Result<DoubleDouble> {
        let nf = f64::from(n);
        let mut num = vec![DoubleDouble::from(-nf), DoubleDouble::sum(-nf, -nu)];
        num.extend_from_slice(extra_num);
        let params = HyperParams::exact(num, den.to_vec(), y);
        sum_pfq(&params, policy).map(|(sum, _)| sum)
    };
    let mut coef = DoubleDouble::ONE;
    let mut acc = SeriesAccumulator::new(*policy);
    let mut n = 0u32;
    loop {
        let t = coef * inner(n)?;
        let err = t.to_f64().abs() * f64::from(n + 2) * 64.0 * DD_EPS;
        let done = acc.push(t, err)?;
        coef = coef * (-x) / DoubleDouble::from(f64::from(n + 1));
        n += 1;
        if done {
            let next = if coef.to_f64() == 0.0 {
                0.0
            } else {
                (coef * inner(n)?).to_f64().abs()
            };
            return Ok(acc.finish_truncated(next));
        }
        acc.check_budget()?;
    }
}

/// `Σ (−x)ⁿ/n! · ₂F₁(−n, −n−ν; c; −1)`, the intermediate form between the
/// defining series and the closed form.
pub fn s_middle(case: &IdentityCase, policy: &TruncationPolicy) -> Result<SeriesEval> {
    policy.validate()?;
    case.check()?;
    terminating_outer_sum(
        &[],
        &[case.c_exact()],
        DoubleDouble::from(-1.0),
        case.nu,
        case.x,
        policy,
    )
}

/// Both sides of the transformation
///
/// ```text
/// e^{−x} Σ Π(a)_n/Π(b)_n (−xy)ⁿ L_n^{(ν)}(x) = Σ (−x)ⁿ/n! ₚ₊₂F_q(−n, −n−ν, a; b; y)
/// ```
///
/// Requires `p <= q` (and `|xy| < 1` when `p = q`), `|y| <= 1`, and no
/// nonpositive-integer `b`.
pub fn transform_sides(
    a_list: &[f64],
    b_list: &[f64],
    y: f64,
    nu: f64,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<(SeriesEval, SeriesEval)> {
    policy.validate()?;
    let (p, q) = (a_list.len(), b_list.len());
    if p > q {
        return Err(Error::Parameter(format!(
            "transformation needs p <= q, got p = {p}, q = {q}"
        )));
    }
    if p == q && (x * y).abs() >= 1.0 {
        return Err(Error::Parameter(format!(
            "p = q needs |xy| < 1, got {}",
            x * y
        )));
    }
    if y.is_nan() || y.abs() > 1.0 {
        return Err(Error::Parameter(format!("|y| must be <= 1, got {y}")));
    }
    if let Some(b) = b_list
        .iter()
        .find(|&&b| nonpositive_integer(b, crate::specfun::POLE_TOL).is_some())
    {
        return Err(Error::Parameter(format!(
            "denominator parameter {b} is a nonpositive integer"
        )));
    }

    // left: Π(a)_n/Π(b)_n (−xy)ⁿ L_n(x)
    let mut lag = LaguerreIter::new(nu, x);
    let mut coef = DoubleDouble::ONE;
    let mut prev_abs = 0.0;
    let mut acc = SeriesAccumulator::new(*policy);
    let mut n = 0u32;
    let lhs = loop {
        let l = lag.next_value();
        let t = coef * l;
        let err = 4.0 * f64::from(n + 1) * f64::EPSILON * coef.to_f64().abs() * (l.abs() + prev_abs);
        let done = acc.push(t, err)?;
        let nf = f64::from(n);
        let num = a_list
            .iter()
            .fold(DoubleDouble::product(-x, y), |acc, &a| acc * DoubleDouble::sum(a, nf));
        let den = b_list
            .iter()
            .fold(DoubleDouble::ONE, |acc, &b| acc * DoubleDouble::sum(b, nf));
        coef = coef * num / den;
        prev_abs = l.abs();
        n += 1;
        if done {
            let next = (coef * lag.next_value()).to_f64().abs();
            break acc.finish_scaled(next, (-x).exp());
        }
        acc.check_budget()?;
    };

    let extra: Vec<DoubleDouble> = a_list.iter().copied().map(DoubleDouble::from).collect();
    let den: Vec<DoubleDouble> = b_list.iter().copied().map(DoubleDouble::from).collect();
    let rhs = terminating_outer_sum(&extra, &den, DoubleDouble::from(y), nu, x, policy)?;
    Ok((lhs, rhs))
}

/// Whether [`closed_form`] evaluates a hypergeometric factor whose weight is
/// exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroWeights {
    Skip,
    Evaluate,
}

/// One `r`-term of a closed form: `first_weight · F₁ + second_weight · F₂`.
///
/// `second_weight` already carries the minus sign of the bracket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormTerm {
    pub r: u32,
    pub first_weight: f64,
    pub first_series: Option<SeriesEval>,
    pub second_weight: f64,
    pub second_series: Option<SeriesEval>,
}

impl ClosedFormTerm {
    pub fn first(&self) -> f64 {
        match &self.first_series {
            Some(s) => self.first_weight * s.value,
            None => 0.0,
        }
    }

    pub fn second(&self) -> f64 {
        match &self.second_series {
            Some(s) => self.second_weight * s.value,
            None => 0.0,
        }
    }
}

/// A closed-form value with its `r`-term breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub value: f64,
    pub abs_err_est: f64,
    pub terms_used: usize,
    pub terms: Vec<ClosedFormTerm>,
}

struct Bracket {
    r: u32,
    first_weight: f64,
    first: HyperParams,
    second_weight: f64,
    second: HyperParams,
}

fn prefactor_gamma_den(pre: Weight, arg: f64, factor: &'static str) -> Result<Weight> {
    if is_gamma_pole(arg) {
        // 0 · ∞ against the 1/(…) coefficient of the second term
        return Err(Singularity::GammaPole { factor, arg }.into());
    }
    Ok(pre.rgamma(arg))
}

/// Weights and series parameters of every `r`-term, or the reason the
/// closed form cannot be evaluated at this point.
fn closed_form_plan(case: &IdentityCase) -> Result<Vec<Bracket>> {
    case.check()?;
    let nu = case.nu;
    let x = case.x;
    let j = case.j;
    let jj = i64::from(j);
    let jf = f64::from(j);
    // ν-coefficient · ν + (half-units)/2, formed exactly
    let p = |nu_coef: f64, halves: i64| DoubleDouble::sum(nu_coef * nu, half(halves));
    let z = -DoubleDouble::product(x, x);
    let hp = |num: Vec<DoubleDouble>, den: Vec<DoubleDouble>| HyperParams::exact(num, den, z);

    let mut plan = Vec::with_capacity(j as usize + 1);
    match case.kind() {
        CaseKind::PlusPlus => {
            let pre = Weight::one()
                .times(parity_sign(jj))
                .pow2(2.0 * nu + jf)
                .gamma(1.0 + nu, "Γ(1+ν)")?;
            let pre = prefactor_gamma_den(pre, 1.0 + 2.0 * nu + jf, "Γ(1+2ν+j)")?;
            let rational = 4.0 * x * (1.0 + nu) / ((1.0 + nu + jf) * (1.0 + 2.0 * nu + jf));
            for r in 0..=j {
                let rr = i64::from(r);
                let s = parity_sign(rr) * binomial(j, r)?;
                let w1 = pre
                    .times(s)
                    .gamma(nu + half(jj + rr + 1), "Γ(ν+j/2+r/2+1/2)")?
                    .rgamma(half(1 - jj + rr));
                let w2 = pre
                    .times(-s * rational)
                    .gamma(nu + half(jj + rr + 2), "Γ(ν+j/2+r/2+1)")?
                    .rgamma(half(rr - jj));
                plan.push(Bracket {
                    r,
                    first_weight: w1.value(),
                    first: hp(
                        vec![p(0.5, 1), p(0.5, 2), p(1.0, 1 + jj + rr), p(0.0, 1 + jj - rr)],
                        vec![p(0.0, 1), p(0.5, 1 + jj), p(0.5, 2 + jj), p(1.0, 1 + jj), p(1.0, 2 + jj)],
                    ),
                    second_weight: w2.value(),
                    second: hp(
                        vec![p(0.5, 2), p(0.5, 3), p(1.0, 2 + jj + rr), p(0.0, 2 + jj - rr)],
                        vec![p(0.0, 3), p(0.5, 2 + jj), p(0.5, 3 + jj), p(1.0, 2 + jj), p(1.0, 3 + jj)],
                    ),
                });
            }
        }
        CaseKind::PlusMinus => {
            let pre = Weight::one()
                .pow2(2.0 * nu - jf)
                .gamma(1.0 + nu - jf, "Γ(1+ν-j)")?;
            let pre = prefactor_gamma_den(pre, 1.0 + 2.0 * nu - jf, "Γ(1+2ν-j)")?;
            let rational = 4.0 * x / (1.0 + 2.0 * nu - jf);
            for r in 0..=j {
                let rr = i64::from(r);
                let s = binomial(j, r)?;
                let w1 = pre
                    .times(s)
                    .gamma(nu + half(1 - jj + rr), "Γ(ν-j/2+r/2+1/2)")?
                    .rgamma(half(1 - jj + rr));
                let w2 = pre
                    .times(-s * rational)
                    .gamma(nu + half(2 - jj + rr), "Γ(ν-j/2+r/2+1)")?
                    .rgamma(half(rr - jj));
                plan.push(Bracket {
                    r,
                    first_weight: w1.value(),
                    first: hp(
                        vec![p(1.0, 1 - jj + rr), p(0.0, 1 + jj - rr)],
                        vec![p(0.0, 1), p(1.0, 1 - jj), p(1.0, 2 - jj)],
                    ),
                    second_weight: w2.value(),
                    second: hp(
                        vec![p(1.0, 2 - jj + rr), p(0.0, 2 + jj - rr)],
                        vec![p(0.0, 3), p(1.0, 2 - jj), p(1.0, 3 - jj)],
                    ),
                });
            }
        }
        CaseKind::MinusPlus => {
            // (−2)^j / j!
            let pre = Weight::one()
                .times(parity_sign(jj))
                .pow2(jf)
                .rgamma(jf + 1.0);
            let rational = 4.0 * x / ((jf + 1.0) * (1.0 - nu + jf));
            for r in 0..=j {
                let rr = i64::from(r);
                let s = parity_sign(rr) * binomial(j, r)?;
                let w1 = pre
                    .times(s)
                    .gamma(-0.5 * nu + half(jj + rr + 1), "Γ(-ν/2+j/2+r/2+1/2)")?
                    .rgamma(-0.5 * nu + half(rr - jj + 1));
                let w2 = pre
                    .times(-s * rational)
                    .gamma(-0.5 * nu + half(jj + rr + 2), "Γ(-ν/2+j/2+r/2+1)")?
                    .rgamma(-0.5 * nu + half(rr - jj));
                plan.push(Bracket {
                    r,
                    first_weight: w1.value(),
                    first: hp(
                        vec![p(0.0, 2), p(0.5, 1 + jj - rr), p(-0.5, 1 + jj + rr)],
                        vec![p(0.0, 1 + jj), p(0.0, 2 + jj), p(-0.5, 1 + jj), p(-0.5, 2 + jj)],
                    ),
                    second_weight: w2.value(),
                    second: hp(
                        vec![p(0.0, 2), p(0.5, 2 + jj - rr), p(-0.5, 2 + jj + rr)],
                        vec![p(0.0, 2 + jj), p(0.0, 3 + jj), p(-0.5, 2 + jj), p(-0.5, 3 + jj)],
                    ),
                });
            }
        }
        CaseKind::MinusMinus => {
            let pre = Weight::one().pow2(-jf);
            let denom = nu + jf - 1.0;
            for r in 0..=j {
                let rr = i64::from(r);
                let s = binomial(j, r)?;
                let w1 = pre.times(s);
                let w2 = pre.times(-s * 2.0 * x * (nu + jf - f64::from(r)) / denom);
                plan.push(Bracket {
                    r,
                    first_weight: w1.value(),
                    first: hp(
                        vec![p(-0.5, 1 - jj + rr), p(0.5, 1 + jj - rr)],
                        vec![p(0.0, 1), p(-0.5, 1 - jj), p(-0.5, 2 - jj)],
                    ),
                    second_weight: w2.value(),
                    second: hp(
                        vec![p(-0.5, 2 - jj + rr), p(0.5, 2 + jj - rr)],
                        vec![p(0.0, 3), p(-0.5, 2 - jj), p(-0.5, 3 - jj)],
                    ),
                });
            }
        }
    }

    for b in &plan {
        for params in [&b.first, &b.second] {
            if let Some(param) = params.blocking_denominator() {
                return Err(Singularity::HyperDenominator { param }.into());
            }
        }
        if !b.first_weight.is_finite() || !b.second_weight.is_finite() {
            return Err(Error::Domain(format!(
                "closed-form weight overflow at r = {}",
                b.r
            )));
        }
    }
    Ok(plan)
}

/// Why the closed form for `case` cannot be evaluated, if it cannot.
///
/// Covers the singularities of the defining series plus gamma poles in
/// numerator factors and prefactors, zero divisors, and hypergeometric
/// denominator parameters that hit a nonpositive integer.
pub fn closed_form_singularity(case: &IdentityCase) -> Option<Singularity> {
    match closed_form_plan(case) {
        Err(Error::Singular(s)) => Some(s),
        _ => None,
    }
}

/// Evaluates the closed form for `case` with its `r`-term breakdown.
pub fn closed_form(
    case: &IdentityCase,
    policy: &TruncationPolicy,
    zero_weights: ZeroWeights,
) -> Result<ClosedForm> {
    policy.validate()?;
    let plan = closed_form_plan(case)?;
    let eval = |w: f64, params: &HyperParams| -> Result<Option<SeriesEval>> {
        if w == 0.0 && zero_weights == ZeroWeights::Skip {
            Ok(None)
        } else {
            sum_pfq(params, policy).map(|(_, e)| Some(e))
        }
    };

    let mut value = 0.0;
    let mut abs_err_est = 0.0;
    let mut magnitude = 0.0;
    let mut terms_used = 0;
    let mut terms = Vec::with_capacity(plan.len());
    for b in &plan {
        let term = ClosedFormTerm {
            r: b.r,
            first_weight: b.first_weight,
            first_series: eval(b.first_weight, &b.first)?,
            second_weight: b.second_weight,
            second_series: eval(b.second_weight, &b.second)?,
        };
        let (first, second) = (term.first(), term.second());
        value += first + second;
        magnitude += first.abs() + second.abs();
        for (w, s) in [
            (term.first_weight, &term.first_series),
            (term.second_weight, &term.second_series),
        ] {
            if let Some(s) = s {
                abs_err_est += w.abs() * s.abs_err_est;
                terms_used += s.terms_used;
            }
        }
        terms.push(term);
    }
    // gamma weights are good to a few dozen ulps
    abs_err_est += 64.0 * f64::EPSILON * magnitude;
    Ok(ClosedForm {
        value,
        abs_err_est,
        terms_used,
        terms,
    })
}

/// The closed form of `S(±ν, ±j)` at `x`.
pub fn s_closed(case: &IdentityCase, policy: &TruncationPolicy) -> Result<f64> {
    closed_form(case, policy, ZeroWeights::Skip).map(|c| c.value)
}

/// How to compute an `S` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Direct,
    Middle,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Direct => "direct",
            Method::Middle => "middle",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Method::Closed),
            "direct" => Ok(Method::Direct),
            "middle" => Ok(Method::Middle),
            other => Err(Error::Domain(format!(
                "unknown method '{other}', expected closed, direct or middle"
            ))),
        }
    }
}

/// Evaluates `case` by `method`, reporting every method as a [`SeriesEval`].
pub fn evaluate(case: &IdentityCase, method: Method, policy: &TruncationPolicy) -> Result<SeriesEval> {
    match method {
        Method::Direct => s_direct(case, policy),
        Method::Middle => s_middle(case, policy),
        Method::Closed => closed_form(case, policy, ZeroWeights::Skip).map(|c| SeriesEval {
            value: c.value,
            abs_err_est: c.abs_err_est,
            terms_used: c.terms_used,
            terminated: false,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::eval_pfq;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn case(kind: CaseKind, nu: f64, j: u32, x: f64) -> IdentityCase {
        IdentityCase::new(kind, nu, j, x)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    fn kummer_oracle(a: f64, b: f64, j: u32, sign: KummerSign) -> f64 {
        eval_pfq(&kummer_series_params(a, b, j, sign), &policy())
            .unwrap()
            .value
    }

    #[test]
    fn kummer_zero_numerator_is_one() {
        for b in [0.3, 0.4, 1.9, -1.7] {
            assert!((kummer_plus(0.0, b, 2).unwrap() - 1.0).abs() < 1e-13, "b = {b}");
        }
        assert!((kummer_minus(0.0, 0.4, 1).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kummer_examples_match_terminating_series() {
        // reference values summed in exact rational arithmetic
        let v = kummer_plus(-2.0, 0.3, 1).unwrap();
        assert!((v - (-2.857_142_857_142_857_142_9)).abs() < 1e-12, "{v}");
        assert!((v - kummer_oracle(-2.0, 0.3, 1, KummerSign::Plus)).abs() < 1e-12);

        let v = kummer_plus(-4.0, -1.2, 3).unwrap();
        assert!((v - (-2.353_896_103_896_103_896_1)).abs() < 1e-12, "{v}");

        let v = kummer_minus(-3.0, 0.7, 2).unwrap();
        assert!((v - 0.690_051_753_881_541_115_58).abs() < 1e-12, "{v}");
        assert!((v - kummer_oracle(-3.0, 0.7, 2, KummerSign::Minus)).abs() < 1e-12);
    }

    #[test]
    fn kummer_signs_agree_at_j_zero() {
        for (a, b) in [(-2.0, 0.3), (-5.0, -1.7), (0.7, 0.25), (-1.5, 1.9)] {
            let p = kummer_plus(a, b, 0).unwrap();
            let m = kummer_minus(a, b, 0).unwrap();
            assert!((p - m).abs() <= 1e-14 * p.abs().max(1.0), "a = {a}, b = {b}");
        }
    }

    #[test]
    fn kummer_non_terminating_value() {
        // classical Kummer: 2F1(a, b; 1+a−b; −1) at a = 0.5, b = 0.25 is
        // inside the convergence region of the series only on the boundary,
        // so compare against the Gauss-type closed form directly.
        let (a, b) = (0.5_f64, 0.25_f64);
        let want = crate::specfun::gamma(1.0 + a - b).unwrap()
            * crate::specfun::gamma(1.0 + 0.5 * a).unwrap()
            / (crate::specfun::gamma(1.0 + a).unwrap()
                * crate::specfun::gamma(1.0 + 0.5 * a - b).unwrap());
        assert!((kummer_plus(a, b, 0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn kummer_singular_numerator() {
        // Γ(b − j) at a pole with b a positive integer below j
        assert!(matches!(
            kummer_plus(-2.0, 1.0, 2),
            Err(Error::Singular(Singularity::GammaPole { .. }))
        ));
    }

    #[test]
    fn singular_cases() {
        let c0 = case(CaseKind::PlusMinus, 2.0, 3, 1.0);
        assert!(matches!(c0.singularity(), Some(Singularity::PochhammerBase { .. })));
        assert!(matches!(s_direct(&c0, &policy()), Err(Error::Singular(_))));
        assert!(matches!(s_middle(&c0, &policy()), Err(Error::Singular(_))));
        assert!(matches!(s_closed(&c0, &policy()), Err(Error::Singular(_))));
        assert!(c0.singularity().unwrap().to_string().contains("Pochhammer base nonpositive integer"));

        // c = 1e-9 is off the pole tolerance, ν + j − 1 is not
        let mm = case(CaseKind::MinusMinus, 1.0 - 1e-9, 0, 1.0);
        assert!(matches!(
            mm.singularity(),
            Some(Singularity::MinusMinusPrefactor { .. })
        ));
        assert!(case(CaseKind::MinusMinus, 0.3, 2, 1.5).singularity().is_none());
    }

    #[test]
    fn x_zero_gives_one_everywhere() {
        for kind in CaseKind::ALL {
            for nu in [-0.3, 0.5, 1.7] {
                for j in 0..4 {
                    let c = case(kind, nu, j, 0.0);
                    if closed_form_singularity(&c).is_some() {
                        continue;
                    }
                    assert_eq!(s_direct(&c, &policy()).unwrap().value, 1.0);
                    assert_eq!(s_middle(&c, &policy()).unwrap().value, 1.0);
                    let v = s_closed(&c, &policy()).unwrap();
                    assert!((v - 1.0).abs() <= 1e-12, "{kind} nu={nu} j={j}: {v}");
                }
            }
        }
    }

    // references: the defining series summed to 500 terms at 50 digits
    #[test]
    fn direct_matches_reference_values() {
        let cases = [
            (case(CaseKind::PlusPlus, 0.0, 0, 0.5), 0.765_197_686_557_966_551_45),
            (case(CaseKind::PlusMinus, 2.5, 1, 1.0), 0.950_768_586_055_707_293_51),
            (case(CaseKind::PlusPlus, 0.5, 2, 1.0), 0.414_287_005_711_907_566_94),
            (case(CaseKind::MinusPlus, 0.3, 1, 2.0), -0.140_206_427_813_184_798_28),
            (case(CaseKind::MinusPlus, 0.3, 2, 1.5), 0.139_503_331_240_830_537_73),
            (case(CaseKind::MinusMinus, 0.3, 2, 1.5), -4.759_195_090_092_386_368_6),
            (case(CaseKind::PlusPlus, 0.5, 0, 1.0), 0.454_648_713_412_840_847_7),
            (case(CaseKind::PlusPlus, 0.5, 2, 20.0), 7.543_065_512_593_392_880_5e-5),
        ];
        for (c, want) in cases {
            let d = s_direct(&c, &policy()).unwrap();
            assert!(close(d.value, want, 1e-13), "{c:?}: {} vs {want}", d.value);
            let cl = s_closed(&c, &policy()).unwrap();
            assert!(close(cl, want, 1e-10), "{c:?}: closed {cl} vs {want}");
        }
    }

    #[test]
    fn j_zero_series_coincide() {
        for nu in [0.25, 1.7] {
            let a = s_direct(&case(CaseKind::PlusPlus, nu, 0, 2.5), &policy()).unwrap();
            let b = s_direct(&case(CaseKind::PlusMinus, nu, 0, 2.5), &policy()).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            let a = s_direct(&case(CaseKind::MinusPlus, nu, 0, 2.5), &policy()).unwrap();
            let b = s_direct(&case(CaseKind::MinusMinus, nu, 0, 2.5), &policy()).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn middle_matches_direct() {
        for c in [
            case(CaseKind::PlusPlus, 0.5, 2, 1.0),
            case(CaseKind::MinusPlus, 0.3, 1, 2.0),
            case(CaseKind::PlusMinus, 1.7, 4, 5.0),
            case(CaseKind::MinusMinus, -0.7, 3, 2.5),
        ] {
            let d = s_direct(&c, &policy()).unwrap();
            let m = s_middle(&c, &policy()).unwrap();
            assert!(
                (d.value - m.value).abs() <= d.abs_err_est + m.abs_err_est,
                "{c:?}: {} vs {} (est {} + {})",
                d.value,
                m.value,
                d.abs_err_est,
                m.abs_err_est
            );
        }
    }

    #[test]
    fn polar_denominators_zero_the_second_term_at_j_zero() {
        for kind in [CaseKind::PlusPlus, CaseKind::PlusMinus] {
            for nu in [0.25, 0.5, 3.2] {
                let c = case(kind, nu, 0, 1.0);
                let skip = closed_form(&c, &policy(), ZeroWeights::Skip).unwrap();
                let full = closed_form(&c, &policy(), ZeroWeights::Evaluate).unwrap();
                assert_eq!(skip.terms[0].second_weight, 0.0);
                assert_eq!(full.terms[0].second().abs(), 0.0);
                assert!(skip.terms[0].second_series.is_none());
                assert!(full.terms[0].second_series.is_some());
                assert_eq!(skip.value.to_bits(), full.value.to_bits());
            }
        }
    }

    #[test]
    fn plus_plus_j_zero_reduces_to_single_series() {
        // S(ν, 0) = 2^{2ν} Γ(1+ν) Γ(ν+½) / (Γ(1+2ν) Γ(½)) · ₄F₅(−x²), and the
        // gamma factor is 1 by the duplication formula
        let c = case(CaseKind::PlusPlus, 0.5, 0, 1.0);
        let cf = closed_form(&c, &policy(), ZeroWeights::Skip).unwrap();
        assert_eq!(cf.terms.len(), 1);
        assert!((cf.terms[0].first_weight - 1.0).abs() < 1e-14);
        let d = s_direct(&c, &policy()).unwrap().value;
        assert!(close(cf.value, d, 1e-12));
    }

    #[test]
    fn removable_closed_form_singularities_are_flagged() {
        // 1 + 2ν − j = 0: Γ(0) in the prefactor and 4x/0 in the bracket
        let c = case(CaseKind::PlusMinus, 0.5, 2, 1.0);
        assert!(c.singularity().is_none());
        assert!(s_direct(&c, &policy()).is_ok());
        assert!(matches!(
            closed_form_singularity(&c),
            Some(Singularity::GammaPole { .. })
        ));
        // 1 + ν − j/2 = −1 as a ₂F₃ denominator parameter
        let c = case(CaseKind::PlusMinus, 0.5, 5, 1.0);
        assert!(closed_form_singularity(&c).is_some());
    }

    #[test]
    fn closed_matches_direct_on_examples() {
        for c in [
            case(CaseKind::PlusMinus, 2.5, 1, 1.0),
            case(CaseKind::MinusPlus, 0.3, 2, 1.5),
            case(CaseKind::MinusMinus, 0.3, 2, 1.5),
            case(CaseKind::PlusPlus, 0.5, 2, 1.0),
        ] {
            let d = s_direct(&c, &policy()).unwrap().value;
            let cl = s_closed(&c, &policy()).unwrap();
            assert!(((cl - d) / d).abs() <= 1e-10, "{c:?}: {cl} vs {d}");
        }
    }

    #[test]
    fn transform_sides_examples() {
        let (l, r) = transform_sides(&[], &[1.5], 0.0, 0.5, 1.0, &policy()).unwrap();
        let e = (-1.0f64).exp();
        assert!((l.value - e).abs() < 1e-15 && (r.value - e).abs() < 1e-15);

        let (l, r) = transform_sides(&[0.3], &[2.0, 0.7], 0.4, 1.2, 0.0, &policy()).unwrap();
        assert_eq!((l.value, r.value), (1.0, 1.0));

        let c = case(CaseKind::PlusPlus, 0.5, 1, 1.0);
        let (l, r) = transform_sides(&[], &[c.c()], -1.0, 0.5, 1.0, &policy()).unwrap();
        let d = s_direct(&c, &policy()).unwrap();
        let m = s_middle(&c, &policy()).unwrap();
        assert!((l.value - d.value).abs() <= l.abs_err_est + d.abs_err_est);
        assert!((r.value - m.value).abs() <= r.abs_err_est + m.abs_err_est);
        assert!((l.value - r.value).abs() <= l.abs_err_est + r.abs_err_est);
    }

    #[test]
    fn transform_rejects_bad_parameters() {
        assert!(transform_sides(&[1.0, 2.0], &[3.0], 0.5, 0.0, 1.0, &policy()).is_err());
        assert!(transform_sides(&[], &[-2.0], 0.5, 0.0, 1.0, &policy()).is_err());
        assert!(transform_sides(&[], &[1.0], 1.5, 0.0, 1.0, &policy()).is_err());
        assert!(transform_sides(&[0.5], &[1.0], 0.5, 0.0, 4.0, &policy()).is_err());
    }

    #[test]
    fn case_labels_round_trip() {
        for kind in CaseKind::ALL {
            assert_eq!(kind.label().parse::<CaseKind>().unwrap(), kind);
            let (a, b) = kind.signs();
            assert_eq!(CaseKind::from_signs(a, b), kind);
        }
        assert!("px".parse::<CaseKind>().is_err());
    }
}
