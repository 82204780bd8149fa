//! Scalar special functions: log-gamma, gamma, reciprocal gamma, Pochhammer
//! symbol, binomial coefficient and the generalized Laguerre polynomial.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Absolute distance to a nonpositive integer below which an argument is
/// treated as sitting on a gamma pole.
pub const POLE_TOL: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(k) − 1` for `k = 2, 3, …, 40`.
const ZETA_MINUS_ONE: [f64; 39] = [
    0.644_934_066_848_226_436_47,
    0.202_056_903_159_594_285_4,
    0.082_323_233_711_138_191_516,
    0.036_927_755_143_369_926_331,
    0.017_343_061_984_449_139_715,
    0.008_349_277_381_922_826_839_8,
    0.004_077_356_197_944_339_378_7,
    0.002_008_392_826_082_214_417_9,
    0.000_994_575_127_818_085_337_15,
    0.000_494_188_604_119_464_558_7,
    0.000_246_086_553_308_048_298_64,
    0.000_122_713_347_578_489_146_75,
    6.124_813_505_870_482_925_9e-5,
    3.058_823_630_702_049_355_2e-5,
    1.528_225_940_865_187_173_3e-5,
    7.637_197_637_899_762_273_6e-6,
    3.817_293_264_999_839_856_5e-6,
    1.908_212_716_553_938_925_7e-6,
    9.539_620_338_727_961_131_5e-7,
    4.769_329_867_878_064_631_2e-7,
    2.384_505_027_277_329_9e-7,
    1.192_199_259_653_110_730_7e-7,
    5.960_818_905_125_947_961_2e-8,
    2.980_350_351_465_228_018_6e-8,
    1.490_155_482_836_504_123_5e-8,
    7.450_711_789_835_429_492e-9,
    3.725_334_024_788_457_054_8e-9,
    1.862_659_723_513_049_006_4e-9,
    9.313_274_324_196_681_828_7e-10,
    4.656_629_065_033_784_073e-10,
    2.328_311_833_676_505_492e-10,
    1.164_155_017_270_051_977_6e-10,
    5.820_772_087_902_700_889_2e-11,
    2.910_385_044_497_099_686_9e-11,
    1.455_192_189_104_198_423_6e-11,
    7.275_959_835_057_481_014_5e-12,
    3.637_979_547_378_651_190_2e-12,
    1.818_989_650_307_065_947_6e-12,
    9.094_947_840_263_889_282_5e-13,
];

/// If `x` lies within `tol` of a nonpositive integer `−m`, returns `m`.
pub fn nonpositive_integer(x: f64, tol: f64) -> Option<u64> {
    if !x.is_finite() || x > tol {
        return None;
    }
    let r = x.round();
    if (x - r).abs() <= tol && r <= 0.0 {
        Some((-r) as u64)
    } else {
        None
    }
}

/// True when `x` is a pole of Γ under [`POLE_TOL`].
pub fn is_gamma_pole(x: f64) -> bool {
    nonpositive_integer(x, POLE_TOL).is_some()
}

/// `sin(πx)` with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnGamma {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LnGamma {
    pub fn value(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln Γ(2 + eps)` by its Taylor series about 2, for `|eps| <= 0.5`.
fn ln_gamma_near_two(eps: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &zm1) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if (i + 2) % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * eps + sign * zm1 / k;
    }
    eps * ((1.0 - EULER_GAMMA) + eps * acc)
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x >= 2.5 {
        lanczos_ln_gamma(x)
    } else if x >= 1.5 {
        ln_gamma_near_two(x - 2.0)
    } else if x >= 0.5 {
        ln_gamma_near_two(x - 1.0) - (x - 1.0).ln_1p()
    } else {
        // 0 < x < 0.5: recurse through Γ(x) = Γ(x + 1) / x
        ln_gamma_positive(x + 1.0) - x.ln()
    }
}

/// `ln|Γ(x)|` and `sign Γ(x)`.
///
/// Lanczos approximation for large arguments, Taylor series about 1 and 2
/// where `ln Γ` has its positive zeros, reflection for `x < 0.5`. Returns a
/// pole error when `x` is within [`POLE_TOL`] of a nonpositive integer.
pub fn log_gamma(x: f64) -> Result<LnGamma> {
    if x.is_nan() {
        return Err(Error::Domain("log_gamma of NaN".into()));
    }
    if is_gamma_pole(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok(LnGamma {
            ln_abs: ln_gamma_positive(x),
            sign: 1.0,
        });
    }
    // Γ(x) Γ(1 − x) = π / sin(πx), with Γ(1 − x) > 0 here.
    let s = sin_pi(x);
    let ln_abs = PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x);
    Ok(LnGamma {
        ln_abs,
        sign: s.signum(),
    })
}

fn factorial_exact(n: u64) -> Option<f64> {
    // 22! is the largest factorial exactly representable in f64
    if n > 22 {
        return None;
    }
    Some((1..=n).fold(1.0, |acc, k| acc * k as f64))
}

/// Γ(x). Pole error at nonpositive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x.fract() == 0.0 && x <= 23.0 {
        if let Some(f) = factorial_exact(x as u64 - 1) {
            return Ok(f);
        }
    }
    log_gamma(x).map(LnGamma::value)
}

/// 1/Γ(x). Total: exactly zero at (and within [`POLE_TOL`] of) the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x > 0.0 && x.fract() == 0.0 && x <= 23.0 {
        if let Some(f) = factorial_exact(x as u64 - 1) {
            return 1.0 / f;
        }
    }
    match log_gamma(x) {
        Ok(lg) => lg.sign * (-lg.ln_abs).exp(),
        Err(_) => f64::NAN,
    }
}

/// Rising factorial `(a)_n = a (a+1) ⋯ (a+n−1)` by direct product.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    if let Some(m) = nonpositive_integer(a, POLE_TOL) {
        if m < u64::from(n) {
            return 0.0;
        }
    }
    (0..n).fold(1.0, |acc, k| acc * (a + f64::from(k)))
}

/// Binomial coefficient `C(j, r)`; domain error when `r > j`.
pub fn binomial(j: u32, r: u32) -> Result<f64> {
    if r > j {
        return Err(Error::Domain(format!("binomial({j}, {r}) with r > j")));
    }
    let r = r.min(j - r);
    let mut c: u128 = 1;
    for i in 0..r {
        // c * (j - i) is divisible by (i + 1) at every step
        match c.checked_mul(u128::from(j - i)) {
            Some(v) => c = v / u128::from(i + 1),
            None => {
                let mut f = c as f64;
                for k in i..r {
                    f = f * f64::from(j - k) / f64::from(k + 1);
                }
                return Ok(f);
            }
        }
    }
    Ok(c as f64)
}

/// Generalized Laguerre polynomial `L_n^{(ν)}(x)` by the forward recurrence
/// `(k+1) L_{k+1} = (2k+1+ν−x) L_k − (k+ν) L_{k−1}`.
pub fn laguerre(n: u32, nu: f64, x: f64) -> f64 {
    let mut iter = LaguerreIter::new(nu, x);
    let mut value = 1.0;
    for _ in 0..=n {
        value = iter.next_value();
    }
    value
}

/// Yields `L_0, L_1, L_2, …` at fixed `(ν, x)`.
#[derive(Debug, Clone)]
pub(crate) struct LaguerreIter {
    nu: f64,
    x: f64,
    k: u32,
    prev: f64,
    cur: f64,
}

impl LaguerreIter {
    pub(crate) fn new(nu: f64, x: f64) -> Self {
        Self {
            nu,
            x,
            k: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }

    pub(crate) fn next_value(&mut self) -> f64 {
        let out = self.cur;
        let k = f64::from(self.k);
        let next = if self.k == 0 {
            1.0 - self.x + self.nu
        } else {
            ((2.0 * k + 1.0 + self.nu - self.x) * self.cur - (k + self.nu) * self.prev) / (k + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        out
    }
}
