//! Root multisets, normalized elementary symmetric profiles, and monic
//! coefficient vectors, with conversions between them.
//!
//! A degree-`d` monic polynomial with non-negative roots `Λ` is stored as its
//! profile `ẽ_i(Λ) = e_i(Λ) / C(d, i)`, `i = 0..=d`. Multiplicative
//! convolution is a pointwise product in this coordinate system. Each profile
//! carries a log-domain copy (`-inf` encodes `ẽ_i = 0`) and, when it was built
//! from exact data, the exact rationals as well.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::precise::{self, binomial_q};

/// Mantissa budget used by [`SymmetricProfile::to_coefficients`] for
/// log-domain profiles.
pub const DEFAULT_PRECISION_BITS: u64 = 128;

/// Sorted (descending) multiset of non-negative roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMultiset {
    roots: Vec<BigRational>,
}

impl RootMultiset {
    pub fn new(mut roots: Vec<BigRational>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRoots);
        }
        if let Some(bad) = roots.iter().find(|r| r.is_negative()) {
            return Err(Error::NegativeRoot(precise::format_exact(bad)));
        }
        // stable: equal roots keep their input order
        roots.sort_by(|a, b| b.cmp(a));
        Ok(Self { roots })
    }

    pub fn from_f64(roots: &[f64]) -> Result<Self> {
        if let Some(bad) = roots.iter().find(|r| !r.is_finite()) {
            return Err(Error::Parse(format!("non-finite root {bad}")));
        }
        Self::new(roots.iter().map(|&r| precise::from_f64(r)).collect())
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[BigRational] {
        &self.roots
    }

    pub fn zero_count(&self) -> usize {
        self.roots.iter().filter(|r| r.is_zero()).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.roots.iter().map(precise::to_f64).collect()
    }

    pub fn into_roots(self) -> Vec<BigRational> {
        self.roots
    }
}

/// `e_0..e_d` of the roots, by expanding `∏(x + λ_j)` one root at a time.
pub fn elementary_symmetric(roots: &RootMultiset) -> Vec<BigRational> {
    elementary_symmetric_of(roots.roots())
}

pub(crate) fn elementary_symmetric_of(values: &[BigRational]) -> Vec<BigRational> {
    let mut e = Vec::with_capacity(values.len() + 1);
    e.push(BigRational::one());
    for lambda in values {
        e.push(BigRational::zero());
        for i in (1..e.len()).rev() {
            let add = &e[i - 1] * lambda;
            e[i] += add;
        }
    }
    e
}

/// Maps every root `λ` to `λ^alpha`. Exact when each `λ^alpha` is rational,
/// otherwise truncated to `bits` of relative precision.
pub fn root_power_map(
    roots: &RootMultiset,
    alpha: &BigRational,
    bits: u64,
) -> Result<RootMultiset> {
    if !alpha.is_positive() {
        return Err(Error::Domain("root power exponent must be positive".into()));
    }
    let p: u32 = u32::try_from(alpha.numer())
        .map_err(|_| Error::Domain("exponent numerator too large".into()))?;
    let q: u32 = u32::try_from(alpha.denom())
        .map_err(|_| Error::Domain("exponent denominator too large".into()))?;
    let mapped = roots
        .roots()
        .iter()
        .map(|r| precise::nth_root(&num_traits::pow(r.clone(), p as usize), q, bits))
        .collect();
    RootMultiset::new(mapped)
}

/// Normalized elementary symmetric profile `ẽ_0..ẽ_d` of a monic polynomial
/// with non-negative roots.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProfile {
    degree: usize,
    zero_count: usize,
    exact: Option<Vec<BigRational>>,
    log: Vec<f64>,
}

fn zero_suffix_start<T>(values: &[T], is_zero: impl Fn(&T) -> bool) -> usize {
    values
        .iter()
        .rposition(|v| !is_zero(v))
        .map_or(0, |i| i + 1)
}

impl SymmetricProfile {
    pub fn from_roots(roots: &RootMultiset) -> Self {
        let d = roots.degree();
        let e = elementary_symmetric(roots);
        let exact: Vec<BigRational> = e
            .into_iter()
            .enumerate()
            .map(|(i, ei)| ei / binomial_q(d, i))
            .collect();
        let log = exact.iter().map(precise::ln_f64).collect();
        Self {
            degree: d,
            zero_count: roots.zero_count(),
            exact: Some(exact),
            log,
        }
    }

    /// Log-domain profile of floating-point roots, via the convex
    /// recurrence `ẽ_i ← ((m-i) ẽ_i + i λ ẽ_{i-1}) / m` evaluated with
    /// log-sum-exp. Never overflows; relative error grows like `d · ε`.
    pub fn from_float_roots(roots: &[f64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRoots);
        }
        if let Some(bad) = roots.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::NegativeRoot(bad.to_string()));
        }
        let d = roots.len();
        let mut log = vec![f64::NEG_INFINITY; d + 1];
        log[0] = 0.0;
        for (idx, &lambda) in roots.iter().enumerate() {
            let m = (idx + 1) as f64;
            let log_lambda = lambda.ln();
            for i in (1..=idx + 1).rev() {
                let keep = ((m - i as f64) / m).ln() + log[i];
                let grow = (i as f64 / m).ln() + log_lambda + log[i - 1];
                log[i] = log_add_exp(keep, grow);
            }
        }
        let zero_count = roots.iter().filter(|&&r| r == 0.0).count();
        Ok(Self {
            degree: d,
            zero_count,
            exact: None,
            log,
        })
    }

    /// Builds a profile from exact `ẽ_0..ẽ_d`, checking `ẽ_0 = 1`,
    /// non-negativity and the positive-then-zero pattern.
    pub fn from_exact(e_tilde: Vec<BigRational>) -> Result<Self> {
        if e_tilde.len() < 2 {
            return Err(Error::InvalidProfile("degree must be at least 1".into()));
        }
        if !e_tilde[0].is_one() {
            return Err(Error::InvalidProfile("ẽ_0 must equal 1".into()));
        }
        if let Some(i) = e_tilde.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidProfile(format!("ẽ_{i} is negative")));
        }
        let d = e_tilde.len() - 1;
        let end = zero_suffix_start(&e_tilde, |v| v.is_zero());
        if e_tilde[..end].iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidProfile(
                "zero ẽ_i followed by a positive one".into(),
            ));
        }
        let log = e_tilde.iter().map(precise::ln_f64).collect();
        Ok(Self {
            degree: d,
            zero_count: d + 1 - end,
            exact: Some(e_tilde),
            log,
        })
    }

    /// Builds a log-domain profile; `-inf` marks `ẽ_i = 0`.
    pub fn from_log(log: Vec<f64>) -> Result<Self> {
        if log.len() < 2 {
            return Err(Error::InvalidProfile("degree must be at least 1".into()));
        }
        if log[0] != 0.0 {
            return Err(Error::InvalidProfile("log ẽ_0 must equal 0".into()));
        }
        if log.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidProfile(
                "log values must be finite or -inf".into(),
            ));
        }
        let d = log.len() - 1;
        let end = zero_suffix_start(&log, |v| *v == f64::NEG_INFINITY);
        if log[..end].contains(&f64::NEG_INFINITY) {
            return Err(Error::InvalidProfile(
                "zero ẽ_i followed by a positive one".into(),
            ));
        }
        Ok(Self {
            degree: d,
            zero_count: d + 1 - end,
            exact: None,
            log,
        })
    }

    pub(crate) fn from_parts(exact: Option<Vec<BigRational>>, log: Vec<f64>) -> Self {
        let d = log.len() - 1;
        let end = zero_suffix_start(&log, |v| *v == f64::NEG_INFINITY);
        Self {
            degree: d,
            zero_count: d + 1 - end,
            exact,
            log,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    /// Number of positive roots, `d - k`.
    pub fn positive_count(&self) -> usize {
        self.degree - self.zero_count
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn e_tilde_exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn log_e_tilde(&self) -> &[f64] {
        &self.log
    }

    /// Drops the exact representation, keeping only log values.
    pub fn into_log_only(mut self) -> Self {
        self.exact = None;
        self
    }

    /// Newton's inequality `ẽ_i² ≥ ẽ_{i-1} ẽ_{i+1}` for `1 ≤ i ≤ d-k-1`.
    /// Exact when possible; the log check allows `tol` of slack.
    pub fn satisfies_newton(&self, tol: f64) -> bool {
        let top = self.positive_count();
        match &self.exact {
            Some(e) => (1..top).all(|i| &e[i] * &e[i] >= &e[i - 1] * &e[i + 1]),
            None => (1..top).all(|i| 2.0 * self.log[i] >= self.log[i - 1] + self.log[i + 1] - tol),
        }
    }

    /// Monic coefficients `c_i = (-1)^i C(d,i) ẽ_i` with the default
    /// precision budget for log-domain profiles.
    pub fn to_coefficients(&self) -> Result<BigPoly> {
        self.to_coefficients_with(DEFAULT_PRECISION_BITS)
    }

    /// Exact profiles convert exactly. Log-domain profiles are materialized
    /// as dyadic rationals; when the coefficient magnitudes span more than
    /// `precision_bits` binary orders a fixed-precision float of that size
    /// would drop the small ones, so this reports
    /// [`Error::PrecisionOverflow`] instead.
    pub fn to_coefficients_with(&self, precision_bits: u64) -> Result<BigPoly> {
        let d = self.degree;
        let sign = |i: usize| {
            if i.is_multiple_of(2) {
                BigRational::one()
            } else {
                -BigRational::one()
            }
        };
        if let Some(e) = &self.exact {
            let coeffs = e
                .iter()
                .enumerate()
                .map(|(i, ei)| sign(i) * binomial_q(d, i) * ei)
                .collect();
            return BigPoly::from_coefficients(coeffs);
        }
        let log2_mag: Vec<f64> = self
            .log
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_finite())
            .map(|(i, l)| {
                precise::ln_f64(&binomial_q(d, i)) / std::f64::consts::LN_2
                    + l / std::f64::consts::LN_2
            })
            .collect();
        let hi = log2_mag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = log2_mag.iter().cloned().fold(f64::INFINITY, f64::min);
        let needed = (hi - lo).ceil().max(0.0) as u64;
        if needed > precision_bits {
            return Err(Error::PrecisionOverflow {
                needed,
                budget: precision_bits,
            });
        }
        let coeffs = self
            .log
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    BigRational::one()
                } else {
                    sign(i) * binomial_q(d, i) * precise::exp_to_rational(l)
                }
            })
            .collect();
        BigPoly::from_coefficients(coeffs)
    }

    /// Inverse of [`SymmetricProfile::to_coefficients`] on exact input.
    pub fn from_coefficients(poly: &BigPoly) -> Result<Self> {
        let d = poly.degree();
        let mut e = Vec::with_capacity(d + 1);
        for (i, c) in poly.coefficients().iter().enumerate() {
            let p_i = if i % 2 == 0 { c.clone() } else { -c.clone() };
            if p_i.is_negative() {
                return Err(Error::SignPattern(format!(
                    "coefficient of x^{} has the wrong sign for non-negative roots",
                    d - i
                )));
            }
            e.push(p_i / binomial_q(d, i));
        }
        Self::from_exact(e)
    }
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Monic polynomial `x^d + c_1 x^{d-1} + … + c_d` with exact rational
/// coefficients, stored highest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigPoly {
    coeffs: Vec<BigRational>,
}

impl BigPoly {
    pub fn from_coefficients(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidProfile("degree must be at least 1".into()));
        }
        if !coeffs[0].is_one() {
            return Err(Error::NotMonic);
        }
        Ok(Self { coeffs })
    }

    /// `∏ (x - r)` for arbitrary real rational `r` (negative roots allowed).
    pub fn from_roots(roots: &[BigRational]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRoots);
        }
        let negated: Vec<BigRational> = roots.iter().map(|r| -r).collect();
        Self::from_coefficients(elementary_symmetric_of(&negated))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c_0 = 1, c_1, …, c_d` (coefficients of `x^d … x^0`).
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Unsigned-convention coefficients `p_i = (-1)^i c_i`, so that
    /// `p(x) = Σ (-1)^i p_i x^{d-i}`.
    pub fn signed_coefficients(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
            .collect()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Weak sign alternation `(-1)^i c_i ≥ 0`, necessary for non-negative roots.
    pub fn has_alternating_signs(&self) -> bool {
        self.signed_coefficients().iter().all(|p| !p.is_negative())
    }

    /// Number of trailing zero coefficients, i.e. the multiplicity of the root 0.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| c.is_zero()).count()
    }

    pub(crate) fn integer_coefficients(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
        self.coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect()
    }
}
