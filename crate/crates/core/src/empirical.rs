//! Empirical root distributions, their moments, Kolmogorov–Smirnov distance
//! to a target law, and midpoint-quantile discretization of measures.

use std::io::Write;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::convolution::LimitRoots;
use crate::error::{Error, Result};
use crate::free_limit::{MeasureSpec, PhiQuantileFn};
use crate::precise::{self, rat};
use crate::symmetric::RootMultiset;

/// `m δ_0 + ((1 - m)/d) Σ δ_{λ_i}` with `m` the optional extra zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    /// Ascending.
    atoms: Vec<BigRational>,
    extra_zero: BigRational,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<BigRational>) -> Result<Self> {
        Self::with_extra_zero_mass(atoms, BigRational::zero())
    }

    pub fn with_extra_zero_mass(
        mut atoms: Vec<BigRational>,
        extra_zero: BigRational,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyRoots);
        }
        if let Some(bad) = atoms.iter().find(|a| a.is_negative()) {
            return Err(Error::NegativeRoot(precise::format_exact(bad)));
        }
        if extra_zero.is_negative() || extra_zero >= BigRational::one() {
            return Err(Error::InvalidMeasure(format!(
                "extra zero mass {} outside [0, 1)",
                precise::format_exact(&extra_zero)
            )));
        }
        atoms.sort();
        Ok(Self { atoms, extra_zero })
    }

    pub fn from_roots(roots: &RootMultiset) -> Self {
        Self::new(roots.roots().to_vec()).expect("root multisets are valid")
    }

    /// `ν_d`, the empirical law of the limit roots.
    pub fn from_limit_roots(limit: &LimitRoots) -> Self {
        Self::new(limit.values_rational()).expect("limit roots are non-negative")
    }

    pub fn from_f64(atoms: &[f64]) -> Result<Self> {
        Self::new(RootMultiset::from_f64(atoms)?.into_roots())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in ascending order.
    pub fn atoms(&self) -> &[BigRational] {
        &self.atoms
    }

    pub fn extra_zero_mass(&self) -> &BigRational {
        &self.extra_zero
    }

    fn atom_weight(&self) -> BigRational {
        (BigRational::one() - &self.extra_zero) / BigRational::from_integer(self.atoms.len().into())
    }

    pub fn zero_mass(&self) -> BigRational {
        let zeros = self.atoms.iter().take_while(|a| a.is_zero()).count();
        &self.extra_zero + self.atom_weight() * BigRational::from_integer(zeros.into())
    }

    /// Right-continuous CDF `μ([0, x])`.
    pub fn cdf(&self, x: &BigRational) -> BigRational {
        if x.is_negative() {
            return BigRational::zero();
        }
        let k = self.atoms.partition_point(|a| a <= x);
        &self.extra_zero + self.atom_weight() * BigRational::from_integer(k.into())
    }

    /// `μ([0, x))`.
    pub fn cdf_left(&self, x: &BigRational) -> BigRational {
        if !x.is_positive() {
            return BigRational::zero();
        }
        let k = self.atoms.partition_point(|a| a < x);
        &self.extra_zero + self.atom_weight() * BigRational::from_integer(k.into())
    }

    /// Generalized inverse `inf{x : μ([0, x]) ≥ t}`.
    pub fn quantile(&self, t: &BigRational) -> BigRational {
        if t <= &self.extra_zero {
            return BigRational::zero();
        }
        let w = self.atom_weight();
        let k = ((t - &self.extra_zero) / w).ceil().to_integer();
        let k: usize = k.try_into().unwrap_or(self.atoms.len());
        self.atoms[k.clamp(1, self.atoms.len()) - 1].clone()
    }

    /// One row per atom, `index,location`, locations at 30 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,location")?;
        for (i, a) in self.atoms.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, precise::to_decimal(a, 30))?;
        }
        Ok(())
    }
}

/// A law on `[0, ∞)` whose CDF can be compared with an empirical one.
pub trait TargetCdf {
    /// `F(x)` as an exact rational, when a closed form is available.
    fn cdf_exact(&self, x: &BigRational) -> Option<BigRational>;
    /// `F(x-)` as an exact rational, when a closed form is available.
    fn cdf_left_exact(&self, x: &BigRational) -> Option<BigRational>;
    fn cdf_f64(&self, x: f64) -> f64;
    fn cdf_left_f64(&self, x: f64) -> f64;
    /// Points carrying positive mass.
    fn atom_locations(&self) -> Vec<BigRational>;
}

impl TargetCdf for PhiQuantileFn {
    fn cdf_exact(&self, x: &BigRational) -> Option<BigRational> {
        PhiQuantileFn::cdf_exact(self, x)
    }

    fn cdf_left_exact(&self, x: &BigRational) -> Option<BigRational> {
        PhiQuantileFn::cdf_left_exact(self, x)
    }

    fn cdf_f64(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn cdf_left_f64(&self, x: f64) -> f64 {
        self.cdf_left(x)
    }

    fn atom_locations(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        if self.zero_mass() > 0.0 {
            out.push(BigRational::zero());
        }
        if let Some(c) = self.source().as_point_mass() {
            out.push(c.clone());
        }
        out
    }
}

impl TargetCdf for MeasureSpec {
    fn cdf_exact(&self, x: &BigRational) -> Option<BigRational> {
        if x.is_negative() {
            return Some(BigRational::zero());
        }
        match self {
            MeasureSpec::Discrete(atoms) => Some(
                atoms
                    .iter()
                    .take_while(|a| &a.location <= x)
                    .map(|a| a.weight.clone())
                    .sum(),
            ),
            MeasureSpec::BernoulliHalf => Some(if x >= &BigRational::one() {
                BigRational::one()
            } else {
                rat(1, 2)
            }),
            MeasureSpec::Uniform => Some(x.clone().min(BigRational::one())),
            MeasureSpec::MarchenkoPastur => None,
        }
    }

    fn cdf_left_exact(&self, x: &BigRational) -> Option<BigRational> {
        if !x.is_positive() {
            return Some(BigRational::zero());
        }
        match self {
            MeasureSpec::Discrete(atoms) => Some(
                atoms
                    .iter()
                    .take_while(|a| &a.location < x)
                    .map(|a| a.weight.clone())
                    .sum(),
            ),
            MeasureSpec::BernoulliHalf => Some(if x > &BigRational::one() {
                BigRational::one()
            } else {
                rat(1, 2)
            }),
            _ => self.cdf_exact(x),
        }
    }

    fn cdf_f64(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn cdf_left_f64(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.cdf_left_exact(&precise::from_f64(x)) {
            Some(v) => precise::to_f64(&v),
            None => self.cdf(x),
        }
    }

    fn atom_locations(&self) -> Vec<BigRational> {
        match self {
            MeasureSpec::Discrete(atoms) => atoms.iter().map(|a| a.location.clone()).collect(),
            MeasureSpec::BernoulliHalf => vec![BigRational::zero(), BigRational::one()],
            _ => Vec::new(),
        }
    }
}

/// Evaluation points for the sup: every jump of either CDF, plus zero.
fn jump_points<T: TargetCdf + ?Sized>(emp: &EmpiricalMeasure, target: &T) -> Vec<BigRational> {
    let mut pts: Vec<BigRational> = emp.atoms.clone();
    pts.push(BigRational::zero());
    pts.extend(target.atom_locations());
    pts.sort();
    pts.dedup();
    pts
}

/// `sup_x |F_emp(x) - F(x)|` in exact arithmetic, or `None` when the target
/// has no rational closed-form CDF.
///
/// Both CDFs are non-decreasing and the empirical one is constant between
/// its atoms, so the sup is attained at a jump point, either at the point
/// or as a left limit there.
pub fn ks_distance_exact<T: TargetCdf + ?Sized>(
    emp: &EmpiricalMeasure,
    target: &T,
) -> Option<BigRational> {
    let mut best = BigRational::zero();
    for x in jump_points(emp, target) {
        let right = (emp.cdf(&x) - target.cdf_exact(&x)?).abs();
        let left = (emp.cdf_left(&x) - target.cdf_left_exact(&x)?).abs();
        best = best.max(right).max(left);
    }
    Some(best)
}

/// Kolmogorov–Smirnov distance between `emp` and the target law. Exact when
/// the target CDF has a rational closed form, otherwise evaluated in f64 at
/// the same jump points.
pub fn ks_distance<T: TargetCdf + ?Sized>(emp: &EmpiricalMeasure, target: &T) -> f64 {
    if let Some(v) = ks_distance_exact(emp, target) {
        return precise::to_f64(&v);
    }
    let mut best = 0.0f64;
    for x in jump_points(emp, target) {
        let xf = precise::to_f64(&x);
        let right = (precise::to_f64(&emp.cdf(&x)) - target.cdf_f64(xf)).abs();
        let left = (precise::to_f64(&emp.cdf_left(&x)) - target.cdf_left_f64(xf)).abs();
        best = best.max(right).max(left);
    }
    best
}

fn reject_zero(emp: &EmpiricalMeasure) -> Result<()> {
    if emp.zero_mass().is_positive() {
        return Err(Error::Domain(
            "log-moment is -∞ with an atom at zero".into(),
        ));
    }
    Ok(())
}

/// `∫ log t dμ` in f64.
pub fn log_moment(emp: &EmpiricalMeasure) -> Result<f64> {
    reject_zero(emp)?;
    let s: f64 = emp.atoms.iter().map(precise::ln_f64).sum();
    Ok(s / emp.atoms.len() as f64)
}

/// `∫ log t dμ` with absolute error below about `2^-bits`.
pub fn log_moment_precise(emp: &EmpiricalMeasure, bits: u64) -> Result<BigRational> {
    reject_zero(emp)?;
    // one logarithm of the product keeps the error budget independent of d
    let product: BigRational = emp.atoms.iter().product();
    let guard = (emp.atoms.len() as f64).log2().ceil() as u64;
    let l = precise::ln_precise(&product, bits + guard)?;
    Ok(l / BigRational::from_integer(emp.atoms.len().into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanHarmonic {
    pub mean: BigRational,
    /// `(∫ t^{-1} dμ)^{-1}`, zero when `has_zero` is set.
    pub harmonic_inverse: BigRational,
    pub has_zero: bool,
}

pub fn mean_and_harmonic(emp: &EmpiricalMeasure) -> MeanHarmonic {
    let w = emp.atom_weight();
    let mean = emp.atoms.iter().sum::<BigRational>() * &w;
    let has_zero = emp.zero_mass().is_positive();
    let harmonic_inverse = if has_zero {
        BigRational::zero()
    } else {
        (emp.atoms.iter().map(|a| a.recip()).sum::<BigRational>() * &w).recip()
    };
    MeanHarmonic {
        mean,
        harmonic_inverse,
        has_zero,
    }
}

/// Midpoint quantile sample `Q_μ((i - 1/2)/d)`, `i = 1..d`, descending.
/// Exact for measures with rational quantiles; Marchenko–Pastur quantiles
/// come from bisection on its CDF and are stored as the nearest doubles.
pub fn discretize_measure(mu: &MeasureSpec, d: usize) -> Result<RootMultiset> {
    if d == 0 {
        return Err(Error::Config(
            "discretization degree must be at least 1".into(),
        ));
    }
    let two_d = 2 * d as i64;
    let roots = (1..=d as i64)
        .map(|i| {
            let t = rat(2 * i - 1, two_d);
            mu.quantile_exact(&t)
                .unwrap_or_else(|| precise::from_f64(mu.quantile(precise::to_f64(&t))))
        })
        .collect();
    RootMultiset::new(roots)
}
