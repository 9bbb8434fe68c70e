//! Dense univariate polynomials over Z and Q, lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::precise::sign_of;
use crate::symmetric::BigPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ZPoly {
    c: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        if c.is_empty() {
            c.push(BigInt::zero());
        }
        Self { c }
    }

    pub fn from_big_poly(p: &BigPoly) -> Self {
        let mut c = p.integer_coefficients();
        c.reverse();
        Self::new(c).primitive()
    }

    pub fn from_qpoly(p: &QPoly) -> Self {
        let lcm = p.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let lcm = BigRational::from_integer(lcm);
        Self::new(p.c.iter().map(|x| (x * &lcm).to_integer()).collect()).primitive()
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_zero()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn lc(&self) -> &BigInt {
        self.c.last().unwrap()
    }

    /// Divides out the positive content (sign is preserved).
    pub fn primitive(self) -> Self {
        let g = self.c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() || g.is_one() {
            return self;
        }
        Self::new(self.c.into_iter().map(|x| x / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![BigInt::zero()]);
        }
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * BigInt::from(k))
                .collect(),
        )
    }

    pub fn neg(self) -> Self {
        Self::new(self.c.into_iter().map(|x| -x).collect())
    }

    /// Remainder of `self` by `g`, scaled by a positive constant so it stays
    /// integral.
    pub fn positive_pseudo_rem(&self, g: &ZPoly) -> ZPoly {
        assert!(!g.is_zero());
        let dg = g.degree();
        let lc = g.lc().clone();
        let mut r = self.c.clone();
        while r.len() > dg && !(r.len() == 1 && r[0].is_zero()) {
            let dr = r.len() - 1;
            if dr < dg {
                break;
            }
            let lead = r[dr].clone();
            // r = |lc| r - sign(lc) lead x^{dr-dg} g
            let scale = lc.abs();
            for x in r.iter_mut() {
                *x *= &scale;
            }
            let factor = if lc.is_negative() { -lead } else { lead };
            for (k, gk) in g.c.iter().enumerate() {
                r[dr - dg + k] -= &factor * gk;
            }
            debug_assert!(r[dr].is_zero());
            r.pop();
            while r.len() > 1 && r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
            if r.is_empty() {
                r.push(BigInt::zero());
            }
        }
        ZPoly::new(r)
    }

    /// Sign of `self(x)` at a rational point, by homogeneous Horner in
    /// integers: `x = a/b`, `b > 0`, sign of `Σ c_k a^k b^{n-k}`.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let a = x.numer();
        let b = x.denom();
        let n = self.degree();
        let mut acc = self.c[n].clone();
        let mut bpow = BigInt::one();
        for k in (0..n).rev() {
            bpow *= b;
            acc = acc * a + &self.c[k] * &bpow;
        }
        sign_of(&acc)
    }

    #[cfg(test)]
    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QPoly {
    c: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        if c.is_empty() {
            c.push(BigRational::zero());
        }
        Self { c }
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_zero()
    }

    #[cfg(test)]
    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn monic(self) -> Self {
        let lc = self.c.last().unwrap().clone();
        if lc.is_zero() || lc.is_one() {
            return self;
        }
        Self::new(self.c.into_iter().map(|x| x / &lc).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![BigRational::zero()]);
        }
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.c.len().max(other.c.len());
        let zero = BigRational::zero();
        QPoly::new(
            (0..n)
                .map(|k| self.c.get(k).unwrap_or(&zero) - other.c.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn div_rem(&self, g: &QPoly) -> (QPoly, QPoly) {
        assert!(!g.is_zero());
        let dg = g.degree();
        if self.degree() < dg {
            return (QPoly::new(vec![BigRational::zero()]), self.clone());
        }
        let lc = g.c.last().unwrap();
        let mut r = self.c.clone();
        let mut q = vec![BigRational::zero(); self.degree() - dg + 1];
        for dr in (dg..r.len()).rev() {
            if r[dr].is_zero() {
                continue;
            }
            let f = &r[dr] / lc;
            for (k, gk) in g.c.iter().enumerate() {
                r[dr - dg + k] -= &f * gk;
            }
            q[dr - dg] = f;
        }
        r.truncate(dg.max(1));
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Exact quotient; the caller guarantees divisibility.
    pub fn div_exact(&self, g: &QPoly) -> QPoly {
        let (q, r) = self.div_rem(g);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Yun's square-free decomposition: `self = c ∏ f_m^m` with pairwise
    /// coprime square-free `f_m`. Returns `(f_m, m)` for non-constant factors.
    pub fn square_free_factors(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.clone().monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0);
        let mut c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut m = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a, m));
            }
            m += 1;
        }
        out
    }
}
