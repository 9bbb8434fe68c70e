//! Certified extraction of the roots of `p^{⊠_d n}`.
//!
//! Signs are always evaluated exactly on rational points. Roots are first
//! isolated, either inside the a-priori intervals
//! `[C(d,i-1)^{-1} R_i^n, C(d,i) R_i^n]` when those are pairwise disjoint, or
//! globally by splitting with Sturm counts, and then refined by bisection on
//! dyadic endpoints. Splits are geometric while an interval spans more than a
//! factor of four, so tiny roots cost `O(log log)` steps to reach.

mod poly;
mod sturm;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::convolution::{lln_limit_roots, multiplicative_power};
use crate::error::{Error, Result};
use crate::precise::{self, approx_log2, binomial_q, pow2};
use crate::symmetric::{root_power_map, BigPoly, RootMultiset, SymmetricProfile};

use poly::{QPoly, ZPoly};
use sturm::SturmSequence;

pub const DEFAULT_REL_TOL: f64 = 1e-30;

/// Relative tolerance and bisection budget for root refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    /// Maximum refinement steps per root; each step gains at most one bit.
    pub precision_bits: u32,
}

impl SolverConfig {
    pub fn new(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::Domain(format!(
                "rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        Ok(Self {
            rel_tol,
            precision_bits: Self::default_bits(rel_tol),
        })
    }

    pub fn with_precision_bits(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    /// `max(128, log2(1/rel_tol) + 64)`.
    pub fn default_bits(rel_tol: f64) -> u32 {
        let need = (-rel_tol.log2()).ceil() as u32 + 64;
        need.max(128)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(DEFAULT_REL_TOL).expect("valid default tolerance")
    }
}

/// `count` roots (with multiplicity) certified in `(lower, upper]`; a
/// degenerate `[r, r]` marks an exactly known root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootBracket {
    pub lower: BigRational,
    pub upper: BigRational,
    pub count: usize,
}

/// Number of distinct real roots of `poly` in `(a, b]`.
pub fn sturm_count(poly: &BigPoly, a: &BigRational, b: &BigRational) -> Result<usize> {
    if a >= b {
        return Err(Error::InvalidInterval(format!(
            "({}, {}] is empty",
            precise::format_exact(a),
            precise::format_exact(b)
        )));
    }
    let f = ZPoly::from_big_poly(poly);
    Ok(SturmSequence::new(&f).count(a, b))
}

/// One interval `[C(d,i-1)^{-1} R_i^n, C(d,i) R_i^n]` enclosing `λ_i^{(n)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremBracket {
    /// 1-based root index.
    pub index: usize,
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
    pub log_lower: f64,
    pub log_upper: f64,
}

impl TheoremBracket {
    pub fn contains(&self, x: &BigRational) -> bool {
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => lo <= x && x <= hi,
            _ => {
                let l = precise::ln_f64(x);
                self.log_lower <= l && l <= self.log_upper
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremBrackets {
    pub brackets: Vec<TheoremBracket>,
    /// Smallest power from which all brackets are pairwise disjoint; `None`
    /// when two limit roots coincide and the brackets never separate.
    pub disjoint_from: Option<u32>,
}

/// A-priori brackets for the positive roots of `p^{⊠_d n}`.
pub fn theorem_brackets(p: &SymmetricProfile, n: u32) -> TheoremBrackets {
    assert!(n >= 1);
    let d = p.degree();
    let m = p.positive_count();
    let limits = lln_limit_roots(p);
    let ln_binom = |k: usize| precise::ln_f64(&binomial_q(d, k));
    let brackets = (1..=m)
        .map(|i| {
            let center_log = n as f64 * limits.log_values()[i - 1];
            let (lower, upper) = match limits.exact() {
                Some(r) => {
                    let center = num_traits::pow(r[i - 1].clone(), n as usize);
                    (
                        Some(&center / binomial_q(d, i - 1)),
                        Some(&center * binomial_q(d, i)),
                    )
                }
                None => (None, None),
            };
            TheoremBracket {
                index: i,
                lower,
                upper,
                log_lower: center_log - ln_binom(i - 1),
                log_upper: center_log + ln_binom(i),
            }
        })
        .collect();
    TheoremBrackets {
        brackets,
        disjoint_from: first_disjoint_power(p),
    }
}

fn first_disjoint_power(p: &SymmetricProfile) -> Option<u32> {
    let d = p.degree();
    let m = p.positive_count();
    let limits = lln_limit_roots(p);
    let logs = limits.log_values();
    // pair (i, i+1) separates once (R_i / R_{i+1})^n > C(d,i-1) C(d,i+1)
    let pairs: Vec<usize> = (1..m).collect();
    let equal = match limits.exact() {
        Some(r) => pairs.iter().any(|&i| r[i - 1] == r[i]),
        None => pairs.iter().any(|&i| logs[i - 1] <= logs[i]),
    };
    if equal {
        return None;
    }
    let threshold = |i: usize| -> BigRational { binomial_q(d, i - 1) * binomial_q(d, i + 1) };
    let mut guess = 1u32;
    for &i in &pairs {
        let t = precise::ln_f64(&threshold(i)) / (logs[i - 1] - logs[i]);
        let cand = (t.floor() as u32).saturating_add(1);
        guess = guess.max(cand);
    }
    let Some(r) = limits.exact() else {
        return Some(guess);
    };
    let separated = |n: u32| {
        pairs
            .iter()
            .all(|&i| num_traits::pow(&r[i - 1] / &r[i], n as usize) > threshold(i))
    };
    while !separated(guess) {
        guess += 1;
    }
    while guess > 1 && separated(guess - 1) {
        guess -= 1;
    }
    Some(guess)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolationMethod {
    /// Disjoint a-priori brackets confirmed by exact sign changes.
    TheoremBrackets,
    /// Global isolation by Sturm-count interval splitting.
    Global,
}

/// Roots of a real-rooted polynomial with their certified enclosures.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedRoots {
    roots: RootMultiset,
    brackets: Vec<RootBracket>,
    method: IsolationMethod,
}

impl SolvedRoots {
    pub fn roots(&self) -> &RootMultiset {
        &self.roots
    }

    /// One entry per distinct root, descending; `count` is the multiplicity.
    pub fn brackets(&self) -> &[RootBracket] {
        &self.brackets
    }

    pub fn method(&self) -> IsolationMethod {
        self.method
    }

    /// Bracket enclosing the `i`-th root (1-based, descending order).
    pub fn bracket_of(&self, i: usize) -> &RootBracket {
        let mut seen = 0;
        for b in &self.brackets {
            seen += b.count;
            if i <= seen {
                return b;
            }
        }
        panic!("root index {i} out of range");
    }
}

/// Roots of `p^{⊠_d n}` to relative tolerance `config.rel_tol`.
pub fn roots_of_power(p: &SymmetricProfile, n: u32, config: &SolverConfig) -> Result<SolvedRoots> {
    if !p.is_exact() {
        return Err(Error::InexactInput);
    }
    let power = multiplicative_power(p, n);
    let poly = power.to_coefficients()?;
    let hints = theorem_brackets(p, n);
    if hints.disjoint_from.is_some_and(|n0| n >= n0) {
        if let Some(solved) = solve_in_brackets(&poly, &hints, config)? {
            return Ok(solved);
        }
    }
    solve_real_rooted(&poly, config)
}

fn round_dyadic(x: &BigRational, bits: i64, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let shift = bits - approx_log2(x);
    let scaled = x * pow2(shift);
    let m = if up { scaled.ceil() } else { scaled.floor() };
    m * pow2(-shift)
}

fn strip_zero_roots(poly: &BigPoly) -> (usize, Vec<BigRational>) {
    let k = poly.zero_root_multiplicity();
    let mut asc: Vec<BigRational> = poly.coefficients().iter().rev().cloned().collect();
    asc.drain(..k);
    (k, asc)
}

fn solve_in_brackets(
    poly: &BigPoly,
    hints: &TheoremBrackets,
    config: &SolverConfig,
) -> Result<Option<SolvedRoots>> {
    let (k, asc) = strip_zero_roots(poly);
    let f = ZPoly::from_qpoly(&QPoly::new(asc));
    let mut windows = Vec::with_capacity(hints.brackets.len());
    for b in &hints.brackets {
        let (Some(lo), Some(hi)) = (&b.lower, &b.upper) else {
            return Ok(None);
        };
        windows.push((round_dyadic(lo, 64, false), round_dyadic(hi, 64, true)));
    }
    if windows.windows(2).any(|w| w[0].0 <= w[1].1) {
        return Ok(None);
    }
    for (lo, hi) in &windows {
        let (sl, sh) = (f.sign_at(lo), f.sign_at(hi));
        if sl == 0 || sl == sh {
            return Ok(None);
        }
    }
    let refined: Vec<RootBracket> = windows
        .into_par_iter()
        .map(|(lo, hi)| refine(&f, None, lo, hi, config))
        .collect::<Result<_>>()?;
    Ok(Some(assemble(refined, k, IsolationMethod::TheoremBrackets)))
}

/// Roots of any monic polynomial with only non-negative real roots, by
/// square-free decomposition and Sturm isolation.
pub fn solve_real_rooted(poly: &BigPoly, config: &SolverConfig) -> Result<SolvedRoots> {
    let (k, asc) = strip_zero_roots(poly);
    let rest = QPoly::new(asc);
    let mut brackets = Vec::new();
    for (factor, mult) in rest.square_free_factors() {
        let f = ZPoly::from_qpoly(&factor);
        if f.degree() == 1 {
            let root = BigRational::new(-f.coeffs()[0].clone(), f.coeffs()[1].clone());
            if root.is_negative() {
                return Err(Error::NegativeRoot(precise::format_exact(&root)));
            }
            brackets.push(RootBracket {
                lower: root.clone(),
                upper: root,
                count: mult,
            });
            continue;
        }
        let sturm = SturmSequence::new(&f);
        let intervals = isolate(&f, &sturm);
        if intervals.len() != f.degree() {
            return Err(Error::MissingRoots {
                found: intervals.len(),
                expected: f.degree(),
            });
        }
        let refined: Vec<RootBracket> = intervals
            .into_par_iter()
            .map(|(lo, hi)| refine(&f, Some(&sturm), lo, hi, config))
            .collect::<Result<_>>()?;
        brackets.extend(
            refined
                .into_iter()
                .map(|b| RootBracket { count: mult, ..b }),
        );
    }
    Ok(assemble(brackets, k, IsolationMethod::Global))
}

fn assemble(mut brackets: Vec<RootBracket>, zeros: usize, method: IsolationMethod) -> SolvedRoots {
    brackets.sort_by(|a, b| b.upper.cmp(&a.upper));
    if zeros > 0 {
        brackets.push(RootBracket {
            lower: BigRational::zero(),
            upper: BigRational::zero(),
            count: zeros,
        });
    }
    let values = brackets
        .iter()
        .flat_map(|b| {
            let v = if b.lower == b.upper {
                b.lower.clone()
            } else {
                (&b.lower + &b.upper) / BigRational::from_integer(BigInt::from(2))
            };
            std::iter::repeat_n(v, b.count)
        })
        .collect();
    SolvedRoots {
        roots: RootMultiset::new(values).expect("non-negative roots"),
        brackets,
        method,
    }
}

/// Dyadic bounds `0 < lower < every positive root ≤ upper` for `f` with
/// `f(0) ≠ 0` (Cauchy bounds on `f` and its reversal).
fn root_bounds(f: &ZPoly) -> (BigRational, BigRational) {
    let c = f.coeffs();
    let n = f.degree();
    let to_q = |x: &BigInt| BigRational::from_integer(x.abs());
    let max_lower = c[..n].iter().map(to_q).max().unwrap();
    let upper = BigRational::one() + max_lower / to_q(&c[n]);
    let max_upper = c[1..].iter().map(to_q).max().unwrap();
    let c0 = to_q(&c[0]);
    let lower = &c0 / (&c0 + max_upper);
    (pow2(approx_log2(&lower) - 2), pow2(approx_log2(&upper) + 1))
}

fn split_point(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo.is_positive() && hi >= &(lo * BigRational::from_integer(BigInt::from(4))) {
        let e = (approx_log2(lo) + approx_log2(hi)).div_euclid(2);
        let m = pow2(e);
        if &m > lo && &m < hi {
            return m;
        }
    }
    (lo + hi) / BigRational::from_integer(BigInt::from(2))
}

fn isolate(f: &ZPoly, sturm: &SturmSequence) -> Vec<(BigRational, BigRational)> {
    let (lower, upper) = root_bounds(f);
    let (vl, vu) = (sturm.variations(&lower), sturm.variations(&upper));
    let mut stack = vec![(lower, upper, vl, vu)];
    let mut out = Vec::new();
    while let Some((lo, hi, vlo, vhi)) = stack.pop() {
        match vlo.saturating_sub(vhi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let m = split_point(&lo, &hi);
                let vm = sturm.variations(&m);
                stack.push((lo, m.clone(), vlo, vm));
                stack.push((m, hi, vm, vhi));
            }
        }
    }
    out.sort_by(|a, b| b.1.cmp(&a.1));
    out
}

/// Bisects an interval `(lo, hi]` holding exactly one simple root of `f`
/// until its relative width drops below `rel_tol`.
fn refine(
    f: &ZPoly,
    sturm: Option<&SturmSequence>,
    mut lo: BigRational,
    mut hi: BigRational,
    config: &SolverConfig,
) -> Result<RootBracket> {
    let exact = |r: BigRational| RootBracket {
        lower: r.clone(),
        upper: r,
        count: 1,
    };
    if f.sign_at(&hi) == 0 {
        return Ok(exact(hi));
    }
    let tol = precise::from_f64(config.rel_tol);
    let mut s_lo = f.sign_at(&lo);
    let mut steps = 0u32;
    while &hi - &lo > &tol * &lo {
        if steps >= config.precision_bits {
            return Err(Error::PrecisionBudgetExceeded {
                steps,
                achieved: precise::to_f64(&((&hi - &lo) / &lo)),
            });
        }
        let mid = split_point(&lo, &hi);
        let s_mid = f.sign_at(&mid);
        if s_mid == 0 {
            return Ok(exact(mid));
        }
        let go_left = if s_lo == 0 {
            // lo is a neighbouring root; fall back to counting
            let sturm = sturm.expect("Sturm sequence needed when lo is a root");
            sturm.count(&lo, &mid) == 1
        } else {
            s_mid != s_lo
        };
        if go_left {
            hi = mid;
        } else {
            lo = mid;
            s_lo = s_mid;
        }
        steps += 1;
    }
    Ok(RootBracket {
        lower: lo,
        upper: hi,
        count: 1,
    })
}

/// `(λ)^{1/n}` for every root, to `bits` of relative precision; zeros stay zero.
pub fn nth_root_of_roots(roots: &RootMultiset, n: u32, bits: u64) -> RootMultiset {
    let alpha = BigRational::new(BigInt::one(), BigInt::from(n));
    root_power_map(roots, &alpha, bits).expect("positive exponent")
}
