//! The classical AGM over the reals.
//!
//! Euler's `pi` approximations need more digits than an `f64` carries, so
//! the AGM itself runs in decimal fixed point over big integers. The
//! elliptic integral and the hypergeometric series only need to reach
//! `1e-10`, and use `f64`.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Extra decimal digits carried internally beyond what the caller asks for.
pub const GUARD_DIGITS: u32 = 10;

/// Absolute tolerance of the adaptive quadrature behind [`elliptic_integral_ir`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-13;

/// Default truncation tolerance for [`classical_2f1`].
pub const SERIES_TOLERANCE: f64 = 1e-15;

/// Decimal fixed point: the value is `mant / 10^scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigReal {
    mant: BigInt,
    scale: u32,
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), n as usize)
}

impl BigReal {
    pub fn from_int(n: i64, scale: u32) -> BigReal {
        BigReal { mant: BigInt::from(n) * pow10(scale), scale }
    }

    /// Parses a plain decimal literal such as `"-1.25"`.
    pub fn parse(s: &str, scale: u32) -> Result<BigReal> {
        let bad = || Error::InvalidInput(format!("not a decimal number: {s:?}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut digits: String = frac.chars().take(scale as usize).collect();
        while digits.len() < scale as usize {
            digits.push('0');
        }
        let text = format!("{}{}", if int.is_empty() { "0" } else { int }, digits);
        let mant: BigInt = text.parse().map_err(|_| bad())?;
        Ok(BigReal { mant: if neg { -mant } else { mant }, scale })
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn add(&self, o: &BigReal) -> BigReal {
        debug_assert_eq!(self.scale, o.scale);
        BigReal { mant: &self.mant + &o.mant, scale: self.scale }
    }

    pub fn sub(&self, o: &BigReal) -> BigReal {
        debug_assert_eq!(self.scale, o.scale);
        BigReal { mant: &self.mant - &o.mant, scale: self.scale }
    }

    pub fn mul(&self, o: &BigReal) -> BigReal {
        debug_assert_eq!(self.scale, o.scale);
        BigReal { mant: (&self.mant * &o.mant) / pow10(self.scale), scale: self.scale }
    }

    pub fn div(&self, o: &BigReal) -> Result<BigReal> {
        debug_assert_eq!(self.scale, o.scale);
        if o.mant.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigReal { mant: (&self.mant * pow10(self.scale)) / &o.mant, scale: self.scale })
    }

    pub fn mul_int(&self, k: i64) -> BigReal {
        BigReal { mant: &self.mant * k, scale: self.scale }
    }

    pub fn div_int(&self, k: i64) -> BigReal {
        BigReal { mant: &self.mant / k, scale: self.scale }
    }

    /// Floor of the square root at the same scale.
    pub fn sqrt(&self) -> Result<BigReal> {
        if self.mant.is_negative() {
            return Err(Error::InvalidInput("square root of a negative number".into()));
        }
        Ok(BigReal { mant: (&self.mant * pow10(self.scale)).sqrt(), scale: self.scale })
    }

    pub fn abs(&self) -> BigReal {
        BigReal { mant: self.mant.abs(), scale: self.scale }
    }

    /// Changes the scale, truncating toward zero when it shrinks.
    pub fn rescale(&self, scale: u32) -> BigReal {
        let mant = match scale.cmp(&self.scale) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant * pow10(scale - self.scale),
            Ordering::Less => &self.mant / pow10(self.scale - scale),
        };
        BigReal { mant, scale }
    }

    /// Decimal expansion rounded (half away from zero) to `digits` places
    /// after the point.
    pub fn to_decimal(&self, digits: u32) -> String {
        self.round(digits).render()
    }

    /// Decimal expansion cut after `digits` places, for prefix comparisons.
    pub fn to_decimal_truncated(&self, digits: u32) -> String {
        self.rescale(digits).render()
    }

    fn render(&self) -> String {
        let (r, digits) = (self, self.scale);
        let s = r.mant.abs().to_string();
        let s = format!("{s:0>width$}", width = digits as usize + 1);
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if r.mant.sign() == Sign::Minus { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Rescales to `scale` digits, rounding half away from zero.
    pub fn round(&self, scale: u32) -> BigReal {
        if scale >= self.scale {
            return self.rescale(scale);
        }
        let unit = pow10(self.scale - scale);
        let half = &unit / 2;
        let mant = if self.mant.is_negative() { (&self.mant - half) / unit } else { (&self.mant + half) / unit };
        BigReal { mant, scale }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(self.scale.min(20)).parse().expect("decimal literal")
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        self.rescale(s).mant.cmp(&other.rescale(s).mant)
    }
}

impl std::fmt::Display for BigReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_decimal(self.scale))
    }
}

/// `(a_1, b_1), ..., (a_{steps+1}, b_{steps+1})`.
#[derive(Clone, Debug)]
pub struct RealAgmSequence {
    pub pairs: Vec<(BigReal, BigReal)>,
    pub digits: u32,
}

impl RealAgmSequence {
    /// `(a_n, b_n)` with the 1-based index used for the sequence.
    pub fn get(&self, n: usize) -> &(BigReal, BigReal) {
        &self.pairs[n - 1]
    }
}

/// Runs `steps` AGM steps from `(a, b)` carrying `digits + GUARD_DIGITS`
/// decimal places.
pub fn real_agm(a: &BigReal, b: &BigReal, steps: usize, digits: u32) -> Result<RealAgmSequence> {
    if digits < 15 {
        return Err(Error::InvalidInput(format!("need at least 15 digits, got {digits}")));
    }
    let scale = digits + GUARD_DIGITS;
    let (mut a, mut b) = (a.rescale(scale), b.rescale(scale));
    if !b.is_positive() || a <= b {
        return Err(Error::InvalidInput(format!("need a > b > 0, got a = {a}, b = {b}")));
    }
    let mut pairs = vec![(a.clone(), b.clone())];
    for _ in 0..steps {
        let next_a = a.add(&b).div_int(2);
        let next_b = a.mul(&b).sqrt()?;
        a = next_a;
        b = next_b;
        pairs.push((a.clone(), b.clone()));
    }
    Ok(RealAgmSequence { pairs, digits })
}

/// `p_n = a_n^2 / (1 - sum_{i=1}^n 2^(i-2) (a_i^2 - b_i^2))` for the AGM
/// started at `(sqrt 2, 1)`.
pub fn euler_pi(n: usize, digits: u32) -> Result<BigReal> {
    if !(1..=10).contains(&n) {
        return Err(Error::InvalidInput(format!("n must lie in 1..=10, got {n}")));
    }
    let scale = digits.max(15) + GUARD_DIGITS;
    let two = BigReal::from_int(2, scale);
    let seq = real_agm(&two.sqrt()?, &BigReal::from_int(1, scale), n - 1, digits.max(15))?;
    // 4 * sum = sum of 2^i (a_i^2 - b_i^2)
    let mut sum4 = BigReal::from_int(0, scale);
    for (i, (a, b)) in seq.pairs.iter().enumerate() {
        sum4 = sum4.add(&a.mul(a).sub(&b.mul(b)).mul_int(1 << (i + 1)));
    }
    let denom = BigReal::from_int(1, scale).sub(&sum4.div_int(4));
    let (a_n, _) = seq.get(n);
    a_n.mul(a_n).div(&denom)
}

/// Limit of the AGM as an `f64`, for cross-checks.
pub fn agm_limit_f64(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    a
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = (a + b) / 2.0;
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f((a + b) / 2.0));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `(1/2a) * integral over [1, inf) of dx / sqrt(x(x-1)(x-c))` with
/// `c = 1 - b^2/a^2`.
///
/// With `x = sec^2(theta)` this becomes
/// `(1/a) * integral over [0, pi/2] of dtheta / sqrt(1 - c cos^2 theta)`,
/// which is smooth and integrated by adaptive Simpson to
/// [`QUADRATURE_TOLERANCE`].
pub fn elliptic_integral_ir(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0 && a > b) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("need a > b > 0, got a = {a}, b = {b}")));
    }
    let c = 1.0 - (b * b) / (a * a);
    let f = |theta: f64| {
        let cos = theta.cos();
        1.0 / (1.0 - c * cos * cos).sqrt()
    };
    Ok(adaptive_simpson(&f, 0.0, FRAC_PI_2, QUADRATURE_TOLERANCE * a) / a)
}

/// `nF(n-1)` parameters: numerators `alpha`, denominators `beta`, argument
/// `t` with `|t| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypergeometricSeriesParams {
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub t: f64,
    pub tolerance: f64,
}

impl HypergeometricSeriesParams {
    /// `2F1(a, b; c | t)` with the default tolerance.
    pub fn two_f_one(a: f64, b: f64, c: f64, t: f64) -> Self {
        Self { numerators: vec![a, b], denominators: vec![c], t, tolerance: SERIES_TOLERANCE }
    }
}

const MAX_TERMS: usize = 1_000_000;

/// `sum over k of (alpha_1)_k ... (alpha_n)_k / ((beta_1)_k ... (beta_{n-1})_k) * t^k / k!`.
///
/// Summation stops once a term drops below `tolerance * (1 - |t|)` while the
/// term ratio is below one, so the geometric tail is under `tolerance`.
pub fn classical_2f1(params: &HypergeometricSeriesParams) -> Result<f64> {
    let t = params.t;
    if !(t.abs() < 1.0) {
        return Err(Error::Divergent(t));
    }
    if params.denominators.iter().any(|&b| b <= 0.0 && b.fract() == 0.0) {
        return Err(Error::InvalidInput("a denominator parameter is a nonpositive integer".into()));
    }
    let cutoff = params.tolerance * (1.0 - t.abs());
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        sum += term;
        let kf = k as f64;
        let num: f64 = params.numerators.iter().map(|a| a + kf).product();
        let den: f64 = params.denominators.iter().map(|b| b + kf).product::<f64>() * (kf + 1.0);
        let ratio = num / den * t;
        if term == 0.0 || (term.abs() < cutoff && ratio.abs() < 1.0) {
            return Ok(sum);
        }
        term *= ratio;
    }
    Err(Error::Divergent(t))
}
