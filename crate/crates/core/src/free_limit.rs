//! ψ- and S-transforms of compactly supported measures on `[0, ∞)` and the
//! quantile function of `Φ(μ)`, the weak limit of `(μ^{⊠n})^{1/n}`.
//!
//! `Φ(μ)` puts mass `μ({0})` at the origin and satisfies
//! `Φ(μ)([0, 1/S_μ(t-1)]) = t` for `t ∈ (μ({0}), 1)`. Everything here is
//! real-axis only: `ψ_μ` is strictly increasing on `(-∞, 0)` with range
//! `(μ({0}) - 1, 0)`, so `ψ_μ^{-1}` is found by bisection.

use std::f64::consts::{FRAC_PI_2, PI};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precise::{self, format_exact, parse_rational};
use crate::quadrature::integrate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub location: BigRational,
    pub weight: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub enum MeasureSpec {
    /// Finitely many atoms, ascending by location, weights summing to one.
    Discrete(Vec<Atom>),
    /// Density `√(t(4-t)) / (2πt)` on `(0, 4)`.
    MarchenkoPastur,
    /// `½(δ_0 + δ_1)`.
    BernoulliHalf,
    /// Lebesgue measure on `(0, 1)`.
    Uniform,
}

impl MeasureSpec {
    /// Merges repeated locations and checks positivity and total mass.
    pub fn discrete(atoms: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mut merged: Vec<Atom> = Vec::new();
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (location, weight) in sorted {
            if location.is_negative() {
                return Err(Error::InvalidMeasure(format!(
                    "negative location {}",
                    format_exact(&location)
                )));
            }
            if !weight.is_positive() {
                return Err(Error::InvalidMeasure(format!(
                    "non-positive weight {}",
                    format_exact(&weight)
                )));
            }
            match merged.last_mut() {
                Some(last) if last.location == location => last.weight += weight,
                _ => merged.push(Atom { location, weight }),
            }
        }
        let total: BigRational = merged.iter().map(|a| a.weight.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {}",
                format_exact(&total)
            )));
        }
        Ok(MeasureSpec::Discrete(merged))
    }

    pub fn point_mass(c: BigRational) -> Result<Self> {
        Self::discrete(vec![(c, BigRational::one())])
    }

    /// Uniform weights on the given locations.
    pub fn empirical(locations: &[BigRational]) -> Result<Self> {
        let w = BigRational::new(1.into(), locations.len().into());
        Self::discrete(locations.iter().map(|l| (l.clone(), w.clone())).collect())
    }

    pub fn zero_mass_exact(&self) -> BigRational {
        match self {
            MeasureSpec::Discrete(atoms) => atoms
                .iter()
                .find(|a| a.location.is_zero())
                .map_or_else(BigRational::zero, |a| a.weight.clone()),
            MeasureSpec::BernoulliHalf => precise::rat(1, 2),
            MeasureSpec::MarchenkoPastur | MeasureSpec::Uniform => BigRational::zero(),
        }
    }

    pub fn zero_mass(&self) -> f64 {
        precise::to_f64(&self.zero_mass_exact())
    }

    pub fn is_delta_zero(&self) -> bool {
        self.zero_mass_exact().is_one()
    }

    /// The location `c` if the measure is `δ_c`.
    pub fn as_point_mass(&self) -> Option<&BigRational> {
        match self {
            MeasureSpec::Discrete(atoms) if atoms.len() == 1 => Some(&atoms[0].location),
            _ => None,
        }
    }

    /// True for `½(δ_0 + δ_1)` in either representation.
    pub fn is_bernoulli_half(&self) -> bool {
        match self {
            MeasureSpec::BernoulliHalf => true,
            MeasureSpec::Discrete(atoms) => {
                atoms.len() == 2
                    && atoms[0].location.is_zero()
                    && atoms[1].location.is_one()
                    && atoms[0].weight == atoms[1].weight
            }
            _ => false,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            MeasureSpec::Discrete(atoms) => precise::to_f64(
                &atoms
                    .iter()
                    .map(|a| &a.location * &a.weight)
                    .sum::<BigRational>(),
            ),
            MeasureSpec::MarchenkoPastur => 1.0,
            MeasureSpec::BernoulliHalf | MeasureSpec::Uniform => 0.5,
        }
    }

    /// `(∫ t^{-1} dμ)^{-1}`, zero when the integral diverges.
    pub fn inverse_harmonic_mean(&self) -> f64 {
        match self {
            MeasureSpec::Discrete(atoms) => {
                if atoms[0].location.is_zero() {
                    return 0.0;
                }
                let h: BigRational = atoms.iter().map(|a| &a.weight / &a.location).sum();
                precise::to_f64(&h.recip())
            }
            // t^{-3/2}, t^{-1} and the zero atom all diverge
            _ => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            MeasureSpec::Discrete(atoms) => atoms
                .iter()
                .take_while(|a| precise::to_f64(&a.location) <= x)
                .map(|a| precise::to_f64(&a.weight))
                .sum(),
            MeasureSpec::MarchenkoPastur => mp_cdf(x),
            MeasureSpec::BernoulliHalf => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.5
                }
            }
            MeasureSpec::Uniform => x.min(1.0),
        }
    }

    /// Generalized inverse `inf{x : F(x) ≥ t}` at a rational level, exact
    /// for every kind except Marchenko–Pastur.
    pub fn quantile_exact(&self, t: &BigRational) -> Option<BigRational> {
        match self {
            MeasureSpec::Discrete(atoms) => {
                let mut cum = BigRational::zero();
                for a in atoms {
                    cum += &a.weight;
                    if &cum >= t {
                        return Some(a.location.clone());
                    }
                }
                atoms.last().map(|a| a.location.clone())
            }
            MeasureSpec::BernoulliHalf => Some(if t <= &precise::rat(1, 2) {
                BigRational::zero()
            } else {
                BigRational::one()
            }),
            MeasureSpec::Uniform => {
                Some(t.clone().max(BigRational::zero()).min(BigRational::one()))
            }
            MeasureSpec::MarchenkoPastur => None,
        }
    }

    pub fn quantile(&self, t: f64) -> f64 {
        match self {
            MeasureSpec::MarchenkoPastur => mp_quantile(t),
            _ => precise::to_f64(&self.quantile_exact(&precise::from_f64(t)).unwrap()),
        }
    }
}

/// `(2/π)(φ + sin φ cos φ)` with `t = 4 sin²φ`.
pub fn mp_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 4.0 {
        return 1.0;
    }
    let phi = (x.sqrt() / 2.0).asin();
    (2.0 / PI) * (phi + phi.sin() * phi.cos())
}

pub fn mp_density(x: f64) -> f64 {
    if x <= 0.0 || x >= 4.0 {
        return 0.0;
    }
    (x * (4.0 - x)).sqrt() / (2.0 * PI * x)
}

fn mp_quantile(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 4.0;
    }
    let (mut lo, mut hi) = (0.0f64, 4.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if mp_cdf(mid) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// `∫ f dMP` through `t = 4 sin²φ`, under which the density becomes
/// `(4/π) cos²φ dφ` on `(0, π/2)`.
pub fn mp_integrate<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    integrate(
        |phi: f64| {
            let s = phi.sin();
            let c = phi.cos();
            f(4.0 * s * s) * (4.0 / PI) * c * c
        },
        0.0,
        FRAC_PI_2,
        tol,
        tol,
    )
    .0
}

fn check_measure(mu: &MeasureSpec) -> Result<()> {
    if mu.is_delta_zero() {
        return Err(Error::InvalidMeasure(
            "S-transform is undefined for the point mass at 0".into(),
        ));
    }
    Ok(())
}

/// `ψ_μ(z) = ∫ tz / (1 - tz) dμ(t)` for `z < 0`.
pub fn psi_transform(mu: &MeasureSpec, z: f64) -> Result<f64> {
    check_measure(mu)?;
    if z.is_nan() || z >= 0.0 || !z.is_finite() {
        return Err(Error::Domain(format!("ψ is evaluated on z < 0, got {z}")));
    }
    Ok(psi_unchecked(mu, z))
}

fn psi_unchecked(mu: &MeasureSpec, z: f64) -> f64 {
    match mu {
        MeasureSpec::Discrete(atoms) => atoms
            .iter()
            .map(|a| {
                let l = precise::to_f64(&a.location);
                precise::to_f64(&a.weight) * l * z / (1.0 - l * z)
            })
            .sum(),
        MeasureSpec::BernoulliHalf => 0.5 * z / (1.0 - z),
        MeasureSpec::Uniform => {
            if z.abs() < 1e-2 {
                // Σ_{k≥1} z^k / (k+1)
                let mut sum = 0.0;
                let mut p = z;
                for k in 1..40 {
                    sum += p / (k as f64 + 1.0);
                    p *= z;
                }
                sum
            } else {
                -1.0 - (-z).ln_1p() / z
            }
        }
        MeasureSpec::MarchenkoPastur => mp_integrate(|t| t * z / (1.0 - t * z), 1e-15),
    }
}

fn s_domain(mu: &MeasureSpec, t: f64) -> Result<()> {
    let lo = mu.zero_mass() - 1.0;
    if !(t > lo && t < 0.0) {
        return Err(Error::Domain(format!(
            "S-transform argument {t} outside ({lo}, 0)"
        )));
    }
    Ok(())
}

/// `ψ_μ^{-1}(s)` on `(μ({0}) - 1, 0)`: expand `[-2^j, -2^{-j}]` until it
/// brackets `s`, then bisect (geometrically while the bracket is wide) to
/// full double precision.
pub fn psi_inverse(mu: &MeasureSpec, s: f64) -> Result<f64> {
    check_measure(mu)?;
    s_domain(mu, s)?;
    let mut j = 0;
    let (mut a, mut b) = (-1.0f64, -1.0f64);
    while psi_unchecked(mu, a) >= s {
        j += 1;
        a = -(2f64.powi(j));
        if j > 1000 {
            return Err(Error::Domain(format!("ψ^-1({s}) below -2^1000")));
        }
    }
    j = 0;
    while psi_unchecked(mu, b) <= s {
        j += 1;
        b = -(2f64.powi(-j));
        if j > 1000 {
            return Err(Error::Domain(format!("ψ^-1({s}) above -2^-1000")));
        }
    }
    // invariant: ψ(a) < s < ψ(b), a < b < 0
    for _ in 0..400 {
        let mid = if a / b > 4.0 {
            -((a * b).sqrt())
        } else {
            0.5 * (a + b)
        };
        if mid <= a || mid >= b {
            break;
        }
        if psi_unchecked(mu, mid) < s {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `S_μ(t) = ((t+1)/t) ψ_μ^{-1}(t)` by numeric inversion, for every kind.
pub fn s_transform_numeric(mu: &MeasureSpec, t: f64) -> Result<f64> {
    let z = psi_inverse(mu, t)?;
    Ok((t + 1.0) / t * z)
}

/// Known closed forms: `δ_c ↦ 1/c`, `½(δ_0+δ_1) ↦ (2+2t)/(1+2t)`,
/// `MP ↦ 1/(1+t)`.
pub fn s_transform_closed_form(mu: &MeasureSpec, t: f64) -> Option<f64> {
    match mu {
        m if m.is_bernoulli_half() => Some((2.0 + 2.0 * t) / (1.0 + 2.0 * t)),
        MeasureSpec::MarchenkoPastur => Some(1.0 / (1.0 + t)),
        _ => mu
            .as_point_mass()
            .filter(|c| c.is_positive())
            .map(|c| 1.0 / precise::to_f64(c)),
    }
}

/// `S_μ(t)` on `(μ({0}) - 1, 0)`. Marchenko–Pastur uses its closed form;
/// every other measure goes through [`s_transform_numeric`].
pub fn s_transform(mu: &MeasureSpec, t: f64) -> Result<f64> {
    check_measure(mu)?;
    s_domain(mu, t)?;
    match mu {
        MeasureSpec::MarchenkoPastur => Ok(1.0 / (1.0 + t)),
        _ => s_transform_numeric(mu, t),
    }
}

/// Quantile `Q(t) = 1 / S_μ(t - 1)` of `Φ(μ)` on `(μ({0}), 1)`.
pub fn phi_quantile(mu: &MeasureSpec, t: f64) -> Result<f64> {
    check_measure(mu)?;
    let zm = mu.zero_mass();
    if !(t > zm && t < 1.0) {
        return Err(Error::Domain(format!(
            "Φ quantile level {t} outside ({zm}, 1)"
        )));
    }
    if let Some(c) = mu.as_point_mass() {
        return Ok(precise::to_f64(c));
    }
    Ok(1.0 / s_transform(mu, t - 1.0)?)
}

/// Support `[(∫t^{-1}dμ)^{-1}, ∫t dμ]` of `Φ(μ)`; the lower end is 0 when
/// the harmonic integral diverges.
pub fn support_endpoints(mu: &MeasureSpec) -> (f64, f64) {
    (mu.inverse_harmonic_mean(), mu.mean())
}

/// Closed-form CDFs of `Φ(μ)` with rational values at rational points.
#[derive(Debug, Clone, PartialEq)]
enum ExactPhiCdf {
    /// `Φ(δ_c) = δ_c`.
    PointMass(BigRational),
    /// `Φ(MP) = U(0, 1)`.
    Uniform,
    /// `Φ(½(δ_0+δ_1)) = ½δ_0 + dt / (2(1-t)²)` on `(0, 1/2)`.
    BernoulliHalf,
}

/// The quantile function of `Φ(μ)` together with its CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiQuantileFn {
    source: MeasureSpec,
    exact: Option<ExactPhiCdf>,
}

impl PhiQuantileFn {
    pub fn new(source: MeasureSpec) -> Result<Self> {
        check_measure(&source)?;
        let exact = match &source {
            MeasureSpec::MarchenkoPastur => Some(ExactPhiCdf::Uniform),
            m if m.is_bernoulli_half() => Some(ExactPhiCdf::BernoulliHalf),
            m => m.as_point_mass().cloned().map(ExactPhiCdf::PointMass),
        };
        Ok(Self { source, exact })
    }

    pub fn source(&self) -> &MeasureSpec {
        &self.source
    }

    /// Mass of `Φ(μ)` at zero, equal to `μ({0})`.
    pub fn zero_mass(&self) -> f64 {
        self.source.zero_mass()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        phi_quantile(&self.source, t)
    }

    pub fn support(&self) -> (f64, f64) {
        support_endpoints(&self.source)
    }

    pub fn has_exact_cdf(&self) -> bool {
        self.exact.is_some()
    }

    /// `Φ(μ)([0, x])` in exact arithmetic when a closed form is known.
    pub fn cdf_exact(&self, x: &BigRational) -> Option<BigRational> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        Some(match self.exact.as_ref()? {
            _ if x < &zero => zero,
            ExactPhiCdf::PointMass(c) => {
                if x >= c {
                    one
                } else {
                    zero
                }
            }
            ExactPhiCdf::Uniform => x.clone().min(one),
            ExactPhiCdf::BernoulliHalf => {
                if x >= &precise::rat(1, 2) {
                    one
                } else {
                    (precise::int(2) * (one - x)).recip()
                }
            }
        })
    }

    /// Left limit `Φ(μ)([0, x))` in exact arithmetic when a closed form is known.
    pub fn cdf_left_exact(&self, x: &BigRational) -> Option<BigRational> {
        match self.exact.as_ref()? {
            ExactPhiCdf::PointMass(c) => Some(if x > c {
                BigRational::one()
            } else {
                BigRational::zero()
            }),
            ExactPhiCdf::BernoulliHalf if x.is_zero() => Some(BigRational::zero()),
            _ if x.is_negative() || x.is_zero() => Some(BigRational::zero()),
            _ => self.cdf_exact(x),
        }
    }

    /// `Φ(μ)([0, x])`, by inverting the monotone quantile when no closed
    /// form is known.
    pub fn cdf(&self, x: f64) -> f64 {
        if let Some(v) = self.cdf_exact(&precise::from_f64(x)) {
            return precise::to_f64(&v);
        }
        self.invert(x, false)
    }

    /// `Φ(μ)([0, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if let Some(v) = self.cdf_left_exact(&precise::from_f64(x)) {
            return precise::to_f64(&v);
        }
        self.invert(x, true)
    }

    fn invert(&self, x: f64, strict: bool) -> f64 {
        let zm = self.zero_mass();
        let (lower, upper) = self.support();
        if x < 0.0 || (strict && x == 0.0) {
            return 0.0;
        }
        if x < lower || (strict && x == lower && lower > 0.0) {
            return zm;
        }
        if x > upper || (!strict && x == upper) {
            return 1.0;
        }
        // largest t with Q(t) <= x (or < x)
        let below = |t: f64| {
            let q = self.eval(t).unwrap_or(f64::NAN);
            if strict {
                q < x
            } else {
                q <= x
            }
        };
        let (mut lo, mut hi) = (zm, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `∫ log t dΦ(μ)(t) = ∫_0^1 log Q(t) dt` for measures without an atom at 0.
    pub fn log_moment(&self) -> Result<f64> {
        if self.zero_mass() > 0.0 {
            return Err(Error::Domain(
                "log-moment is -∞ with an atom at zero".into(),
            ));
        }
        if let Some(c) = self.source.as_point_mass() {
            return Ok(precise::ln_f64(c));
        }
        let (v, _) = integrate(
            |t| self.eval(t).map(f64::ln).unwrap_or(f64::NAN),
            0.0,
            1.0,
            1e-11,
            1e-11,
        );
        Ok(v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureJson {
    /// Each atom is `[weight, location]`.
    Discrete {
        atoms: Vec<(String, String)>,
    },
    Mp,
    BernoulliHalf,
    Uniform,
}

impl TryFrom<MeasureJson> for MeasureSpec {
    type Error = Error;

    fn try_from(raw: MeasureJson) -> Result<Self> {
        match raw {
            MeasureJson::Discrete { atoms } => {
                let parsed = atoms
                    .iter()
                    .map(|(w, l)| Ok((parse_rational(l)?, parse_rational(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                Self::discrete(parsed)
            }
            MeasureJson::Mp => Ok(MeasureSpec::MarchenkoPastur),
            MeasureJson::BernoulliHalf => Ok(MeasureSpec::BernoulliHalf),
            MeasureJson::Uniform => Ok(MeasureSpec::Uniform),
        }
    }
}

impl From<MeasureSpec> for MeasureJson {
    fn from(m: MeasureSpec) -> Self {
        match m {
            MeasureSpec::Discrete(atoms) => MeasureJson::Discrete {
                atoms: atoms
                    .iter()
                    .map(|a| (format_exact(&a.weight), format_exact(&a.location)))
                    .collect(),
            },
            MeasureSpec::MarchenkoPastur => MeasureJson::Mp,
            MeasureSpec::BernoulliHalf => MeasureJson::BernoulliHalf,
            MeasureSpec::Uniform => MeasureJson::Uniform,
        }
    }
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precise::{int, rat};

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (1..=n).map(move |k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
    }

    fn bernoulli_discrete() -> MeasureSpec {
        MeasureSpec::discrete(vec![(int(0), rat(1, 2)), (int(1), rat(1, 2))]).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(MeasureSpec::discrete(vec![]).is_err());
        assert!(MeasureSpec::discrete(vec![(int(-1), int(1))]).is_err());
        assert!(MeasureSpec::discrete(vec![(int(1), rat(1, 2))]).is_err());
        assert!(MeasureSpec::discrete(vec![(int(1), int(0)), (int(2), int(1))]).is_err());
        let m = MeasureSpec::discrete(vec![(int(2), rat(1, 4)), (int(2), rat(3, 4))]).unwrap();
        assert_eq!(m.as_point_mass(), Some(&int(2)));
        assert_eq!(bernoulli_discrete().zero_mass(), 0.5);
    }

    #[test]
    fn psi_examples() {
        let d1 = MeasureSpec::point_mass(int(1)).unwrap();
        assert_eq!(psi_transform(&d1, -1.0).unwrap(), -0.5);
        assert_eq!(psi_transform(&bernoulli_discrete(), -1.0).unwrap(), -0.25);
        assert_eq!(
            psi_transform(&MeasureSpec::BernoulliHalf, -1.0).unwrap(),
            -0.25
        );
        for mu in [
            d1.clone(),
            MeasureSpec::MarchenkoPastur,
            MeasureSpec::Uniform,
        ] {
            assert!(psi_transform(&mu, -1e-12).unwrap().abs() < 1e-11);
        }
        let d0 = MeasureSpec::point_mass(int(0)).unwrap();
        assert!(matches!(
            psi_transform(&d0, -1.0),
            Err(Error::InvalidMeasure(_))
        ));
        assert!(matches!(psi_transform(&d1, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_is_increasing_with_expected_range() {
        for mu in [
            bernoulli_discrete(),
            MeasureSpec::MarchenkoPastur,
            MeasureSpec::Uniform,
            MeasureSpec::discrete(vec![(int(1), rat(1, 3)), (int(5), rat(2, 3))]).unwrap(),
        ] {
            let zm = mu.zero_mass();
            let mut last = zm - 1.0;
            for k in -20..=20 {
                let z = -(2f64.powi(k));
                let v = psi_transform(&mu, z).unwrap();
                assert!(v > zm - 1.0 - 1e-12 && v < 0.0);
                // z runs from -2^-20 (near 0) to -2^20; ψ decreases along it
                if k > -20 {
                    assert!(v <= last + 1e-15);
                }
                last = v;
            }
        }
    }

    #[test]
    fn mp_psi_quadrature_matches_closed_inverse() {
        // ψ_MP^{-1}(s) = s / (1+s)^2
        for s in grid(-0.99, -0.01, 25) {
            let z = s / ((1.0 + s) * (1.0 + s));
            let psi = psi_transform(&MeasureSpec::MarchenkoPastur, z).unwrap();
            assert!((psi - s).abs() < 1e-12, "s={s} ψ={psi}");
        }
    }

    #[test]
    fn s_transform_examples() {
        for c in [rat(1, 3), int(1), int(7)] {
            let mu = MeasureSpec::point_mass(c.clone()).unwrap();
            for t in grid(-0.99, -0.01, 10) {
                let s = s_transform(&mu, t).unwrap();
                assert!((s - 1.0 / precise::to_f64(&c)).abs() < 1e-12);
            }
        }
        let s = s_transform(&bernoulli_discrete(), -0.25).unwrap();
        assert!((s - 3.0).abs() < 1e-12);
        let s = s_transform_numeric(&MeasureSpec::MarchenkoPastur, -0.5).unwrap();
        assert!((s - 2.0).abs() < 1e-10);
        assert_eq!(
            s_transform(&MeasureSpec::MarchenkoPastur, -0.5).unwrap(),
            2.0
        );
        assert!(matches!(
            s_transform(&bernoulli_discrete(), -0.75),
            Err(Error::Domain(_))
        ));
        assert!(s_transform(&MeasureSpec::Uniform, 0.1).is_err());
    }

    #[test]
    fn closed_forms_agree_with_numeric_inversion() {
        let cases = [
            (MeasureSpec::BernoulliHalf, -0.5),
            (bernoulli_discrete(), -0.5),
            (MeasureSpec::MarchenkoPastur, -1.0),
            (MeasureSpec::point_mass(rat(5, 2)).unwrap(), -1.0),
        ];
        for (mu, lo) in cases {
            for t in grid(lo, 0.0, 100) {
                let closed = s_transform_closed_form(&mu, t).unwrap();
                let numeric = s_transform_numeric(&mu, t).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-10,
                    "{mu:?} t={t}: {closed} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn phi_quantile_examples() {
        for t in grid(0.0, 1.0, 50) {
            let q = phi_quantile(&MeasureSpec::MarchenkoPastur, t).unwrap();
            assert!((q - t).abs() < 1e-12);
        }
        for t in grid(0.5, 1.0, 50) {
            let q = phi_quantile(&MeasureSpec::BernoulliHalf, t).unwrap();
            assert!((q - (2.0 * t - 1.0) / (2.0 * t)).abs() < 1e-10);
        }
        let delta = MeasureSpec::point_mass(rat(3, 2)).unwrap();
        assert_eq!(phi_quantile(&delta, 0.3).unwrap(), 1.5);
        assert!(phi_quantile(&MeasureSpec::BernoulliHalf, 0.4).is_err());
        assert!(phi_quantile(&MeasureSpec::MarchenkoPastur, 1.0).is_err());
    }

    #[test]
    fn quantiles_are_strictly_increasing() {
        let measures = [
            MeasureSpec::MarchenkoPastur,
            MeasureSpec::BernoulliHalf,
            MeasureSpec::Uniform,
            MeasureSpec::discrete(vec![(int(1), rat(1, 3)), (int(4), rat(2, 3))]).unwrap(),
        ];
        for mu in measures {
            let zm = mu.zero_mass();
            let qs: Vec<f64> = grid(zm, 1.0, 40)
                .map(|t| phi_quantile(&mu, t).unwrap())
                .collect();
            assert!(qs.windows(2).all(|w| w[0] < w[1]), "{mu:?}");
        }
    }

    #[test]
    fn support_examples() {
        let delta = MeasureSpec::point_mass(int(3)).unwrap();
        assert_eq!(support_endpoints(&delta), (3.0, 3.0));
        assert_eq!(support_endpoints(&MeasureSpec::MarchenkoPastur), (0.0, 1.0));
        assert_eq!(support_endpoints(&bernoulli_discrete()), (0.0, 0.5));
        // MP mean by quadrature; ∫_ε t^{-1} dMP grows without bound as ε → 0
        let mean = mp_integrate(|t| t, 1e-14);
        assert!((mean - 1.0).abs() < 1e-12);
        let truncated = |eps: f64| integrate(|t| mp_density(t) / t, eps, 4.0, 1e-10, 1e-10).0;
        assert!(truncated(1e-6) > 2.0 * truncated(1e-4));
    }

    #[test]
    fn quantile_approaches_support_ends() {
        let mu = MeasureSpec::discrete(vec![(int(1), rat(1, 2)), (int(3), rat(1, 2))]).unwrap();
        let (lo, hi) = support_endpoints(&mu);
        assert!((lo - 1.5).abs() < 1e-15);
        assert!((phi_quantile(&mu, 1e-8).unwrap() - lo).abs() < 1e-6);
        assert!((phi_quantile(&mu, 1.0 - 1e-8).unwrap() - hi).abs() < 1e-6);
        let q = phi_quantile(&MeasureSpec::MarchenkoPastur, 1e-8).unwrap();
        assert!(q.abs() < 1e-6);
    }

    #[test]
    fn log_moment_is_transported() {
        let mu = MeasureSpec::discrete(vec![
            (int(1), rat(1, 4)),
            (int(2), rat(1, 4)),
            (rat(7, 2), rat(1, 2)),
        ])
        .unwrap();
        let expect = 0.25 * 2f64.ln() + 0.5 * 3.5f64.ln();
        let phi = PhiQuantileFn::new(mu).unwrap();
        assert!((phi.log_moment().unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn mp_cdf_matches_density_quadrature() {
        for x in [0.1, 0.5, 1.0, 2.5, 3.9] {
            let q = integrate(mp_density, 0.0, x, 1e-13, 1e-13).0;
            assert!((mp_cdf(x) - q).abs() < 1e-9, "x={x}");
        }
        for t in [1.0 / 6.0, 0.5, 5.0 / 6.0] {
            assert!((mp_cdf(mp_quantile(t)) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_cdf_inverts_quantile() {
        let mu = MeasureSpec::discrete(vec![(int(1), rat(1, 2)), (int(3), rat(1, 2))]).unwrap();
        let phi = PhiQuantileFn::new(mu).unwrap();
        assert!(!phi.has_exact_cdf());
        for t in [0.1, 0.4, 0.8] {
            let x = phi.eval(t).unwrap();
            assert!((phi.cdf(x) - t).abs() < 1e-9);
        }
        assert_eq!(phi.cdf(0.5), 0.0);
        assert_eq!(phi.cdf(2.0), 1.0);

        let b = PhiQuantileFn::new(MeasureSpec::BernoulliHalf).unwrap();
        assert_eq!(b.cdf_exact(&int(0)).unwrap(), rat(1, 2));
        assert_eq!(b.cdf_left_exact(&int(0)).unwrap(), int(0));
        assert_eq!(b.cdf_exact(&rat(1, 4)).unwrap(), rat(2, 3));
        assert_eq!(b.cdf_exact(&rat(1, 2)).unwrap(), int(1));
        let u = PhiQuantileFn::new(MeasureSpec::MarchenkoPastur).unwrap();
        assert_eq!(u.cdf_exact(&rat(3, 7)).unwrap(), rat(3, 7));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"discrete","atoms":[["1/2","1"],["1/2","0"]]}"#;
        let m = MeasureSpec::from_json(text).unwrap();
        assert_eq!(m, bernoulli_discrete());
        assert_eq!(MeasureSpec::from_json(&m.to_json()).unwrap(), m);
        assert_eq!(
            MeasureSpec::from_json(r#"{"kind":"mp"}"#).unwrap(),
            MeasureSpec::MarchenkoPastur
        );
        assert_eq!(
            MeasureSpec::from_json(r#"{"kind":"bernoulli_half"}"#).unwrap(),
            MeasureSpec::BernoulliHalf
        );
        assert!(MeasureSpec::from_json(r#"{"kind":"cauchy"}"#).is_err());
    }
}
