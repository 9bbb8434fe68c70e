//! Finite free multiplicative and additive convolutions, multiplicative
//! powers, and the limit roots of `(p^{⊠_d n})^{1/n}` as `n → ∞`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::precise::{self, binomial_q};
use crate::symmetric::{BigPoly, RootMultiset, SymmetricProfile};

/// `p ⊠_d q`: pointwise product of the profiles. The zero count of the
/// result is `max(k_p, k_q)`.
pub fn multiplicative_convolve(
    p: &SymmetricProfile,
    q: &SymmetricProfile,
) -> Result<SymmetricProfile> {
    if p.degree() != q.degree() {
        return Err(Error::DegreeMismatch {
            left: p.degree(),
            right: q.degree(),
        });
    }
    let exact = match (p.e_tilde_exact(), q.e_tilde_exact()) {
        (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x * y).collect()),
        _ => None,
    };
    let log = p
        .log_e_tilde()
        .iter()
        .zip(q.log_e_tilde())
        .map(|(a, b)| a + b)
        .collect();
    Ok(SymmetricProfile::from_parts(exact, log))
}

/// `p^{⊠_d n}`: every `ẽ_i` raised to the `n`-th power. Keeps the exact
/// representation when the input has one; see
/// [`multiplicative_power_log`] for the log-only path.
pub fn multiplicative_power(p: &SymmetricProfile, n: u32) -> SymmetricProfile {
    assert!(n >= 1, "power must be positive");
    let exact = p.e_tilde_exact().map(|e| {
        e.iter()
            .map(|v| num_traits::pow(v.clone(), n as usize))
            .collect()
    });
    SymmetricProfile::from_parts(exact, scaled_log(p, n))
}

/// Log-domain `p^{⊠_d n}` (`n · log ẽ_i`), never materializing `ẽ_i^n`.
pub fn multiplicative_power_log(p: &SymmetricProfile, n: u32) -> SymmetricProfile {
    assert!(n >= 1, "power must be positive");
    SymmetricProfile::from_parts(None, scaled_log(p, n))
}

fn scaled_log(p: &SymmetricProfile, n: u32) -> Vec<f64> {
    p.log_e_tilde().iter().map(|l| l * n as f64).collect()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `p ⊞_d q` by the defining double sum
/// `Σ_{i+j≤d} (-1)^{i+j} (d-i)!(d-j)! / ((d-i-j)! d!) p_i q_j x^{d-i-j}`.
pub fn additive_convolve(p: &BigPoly, q: &BigPoly) -> Result<BigPoly> {
    let d = p.degree();
    if d != q.degree() {
        return Err(Error::DegreeMismatch {
            left: d,
            right: q.degree(),
        });
    }
    let ps = p.signed_coefficients();
    let qs = q.signed_coefficients();
    let fact: Vec<BigInt> = (0..=d).map(factorial).collect();
    let mut out = vec![BigRational::zero(); d + 1];
    for i in 0..=d {
        for j in 0..=d - i {
            let weight = BigRational::new(&fact[d - i] * &fact[d - j], &fact[d - i - j] * &fact[d]);
            let term = weight * &ps[i] * &qs[j];
            if (i + j) % 2 == 0 {
                out[i + j] += term;
            } else {
                out[i + j] -= term;
            }
        }
    }
    BigPoly::from_coefficients(out)
}

/// `p ⊞_d q` through normalized coefficients,
/// `ẽ_k(p ⊞_d q) = Σ_{i+j=k} C(k,i) ẽ_i(p) ẽ_j(q)`. Agrees with
/// [`additive_convolve`]; `ẽ` here may be negative.
pub fn additive_convolve_normalized(p: &BigPoly, q: &BigPoly) -> Result<BigPoly> {
    let d = p.degree();
    if d != q.degree() {
        return Err(Error::DegreeMismatch {
            left: d,
            right: q.degree(),
        });
    }
    let normalize = |poly: &BigPoly| -> Vec<BigRational> {
        poly.signed_coefficients()
            .into_iter()
            .enumerate()
            .map(|(i, v)| v / binomial_q(d, i))
            .collect()
    };
    let (a, b) = (normalize(p), normalize(q));
    let coeffs = (0..=d)
        .map(|k| {
            let e_k: BigRational = (0..=k).map(|i| binomial_q(k, i) * &a[i] * &b[k - i]).sum();
            let c = binomial_q(d, k) * e_k;
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    BigPoly::from_coefficients(coeffs)
}

/// Limit roots `R_1 ≥ … ≥ R_{d-k} > 0 = … = 0` with `R_i = ẽ_i / ẽ_{i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRoots {
    degree: usize,
    zero_count: usize,
    exact: Option<Vec<BigRational>>,
    log: Vec<f64>,
}

impl LimitRoots {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// `log R_i`, `-inf` on the zero part.
    pub fn log_values(&self) -> &[f64] {
        &self.log
    }

    pub fn values_f64(&self) -> Vec<f64> {
        match &self.exact {
            Some(e) => e.iter().map(precise::to_f64).collect(),
            None => self.log.iter().map(|l| l.exp()).collect(),
        }
    }

    /// Values as rationals: exact, or dyadic images of the log values.
    pub fn values_rational(&self) -> Vec<BigRational> {
        match &self.exact {
            Some(e) => e.clone(),
            None => self
                .log
                .iter()
                .map(|&l| precise::exp_to_rational(l))
                .collect(),
        }
    }

    pub fn to_root_multiset(&self) -> RootMultiset {
        RootMultiset::new(self.values_rational()).expect("limit roots are non-negative")
    }

    /// Weakly decreasing over the whole vector.
    pub fn is_weakly_decreasing(&self) -> bool {
        match &self.exact {
            Some(e) => e.windows(2).all(|w| w[0] >= w[1]),
            None => self.log.windows(2).all(|w| w[0] >= w[1]),
        }
    }

    /// Strictly decreasing over the positive part.
    pub fn is_strictly_decreasing_on_positive(&self) -> bool {
        let m = self.degree - self.zero_count;
        match &self.exact {
            Some(e) => e[..m].windows(2).all(|w| w[0] > w[1]),
            None => self.log[..m].windows(2).all(|w| w[0] > w[1]),
        }
    }
}

pub fn lln_limit_roots(p: &SymmetricProfile) -> LimitRoots {
    let d = p.degree();
    let m = p.positive_count();
    let exact = p.e_tilde_exact().map(|e| {
        (1..=d)
            .map(|i| {
                if i <= m {
                    &e[i] / &e[i - 1]
                } else {
                    BigRational::zero()
                }
            })
            .collect()
    });
    let l = p.log_e_tilde();
    let log = (1..=d)
        .map(|i| {
            if i <= m {
                l[i] - l[i - 1]
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    LimitRoots {
        degree: d,
        zero_count: p.zero_count(),
        exact,
        log,
    }
}

/// `x^k ∏_{i ≤ d-k} (x - R_i)` expanded.
pub fn lln_limit_polynomial(p: &SymmetricProfile) -> BigPoly {
    let roots = lln_limit_roots(p).values_rational();
    BigPoly::from_roots(&roots).expect("degree at least one")
}

/// Renormalized Laguerre polynomial `d! (-d)^{-d} L_{0,d}(d x)`:
/// `ẽ_j = ∏_{m<j} (d-m)/d`.
pub fn laguerre_profile(d: usize) -> SymmetricProfile {
    assert!(d >= 1);
    let mut e = Vec::with_capacity(d + 1);
    let mut acc = BigRational::one();
    e.push(acc.clone());
    for m in 0..d {
        acc *= precise::rat((d - m) as i64, d as i64);
        e.push(acc.clone());
    }
    SymmetricProfile::from_exact(e).expect("valid Laguerre profile")
}

/// `x^d (x-1)^d` (degree `2d`): `ẽ_j = C(d,j)/C(2d,j)` for `j ≤ d`, zero after.
pub fn two_root_profile(d: usize) -> SymmetricProfile {
    assert!(d >= 1);
    let e = (0..=2 * d)
        .map(|j| {
            if j <= d {
                binomial_q(d, j) / binomial_q(2 * d, j)
            } else {
                BigRational::zero()
            }
        })
        .collect();
    SymmetricProfile::from_exact(e).expect("valid two-root profile")
}

/// Profile of `(x - c)^d`: `ẽ_i = c^i`.
pub fn constant_root_profile(c: &BigRational, d: usize) -> Result<SymmetricProfile> {
    SymmetricProfile::from_exact((0..=d).map(|i| num_traits::pow(c.clone(), i)).collect())
}
