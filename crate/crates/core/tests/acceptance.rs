//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reference values are computed here by methods independent of
//! the library (subset enumeration, coefficient-level convolution, closed
//! forms in integer arithmetic).

use std::time::{Duration, Instant};

use finfree::convolution::{
    laguerre_profile, lln_limit_roots, multiplicative_convolve, multiplicative_power,
    two_root_profile,
};
use finfree::empirical::{discretize_measure, ks_distance, EmpiricalMeasure};
use finfree::free_limit::{phi_quantile, s_transform_numeric, MeasureSpec, PhiQuantileFn};
use finfree::solver::{roots_of_power, solve_real_rooted, SolverConfig};
use finfree::symmetric::{BigPoly, RootMultiset, SymmetricProfile};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

fn binom(n: usize, k: usize) -> BigRational {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    BigRational::from_integer(acc)
}

/// `e_k` by summing over all `k`-subsets.
fn e_by_subsets(roots: &[BigRational]) -> Vec<BigRational> {
    let d = roots.len();
    let mut e = vec![BigRational::zero(); d + 1];
    for mask in 0u32..(1 << d) {
        let mut prod = BigRational::one();
        for (j, r) in roots.iter().enumerate() {
            if mask & (1 << j) != 0 {
                prod *= r;
            }
        }
        e[mask.count_ones() as usize] += prod;
    }
    e
}

fn e_tilde_oracle(roots: &[BigRational]) -> Vec<BigRational> {
    let d = roots.len();
    e_by_subsets(roots)
        .into_iter()
        .enumerate()
        .map(|(i, e)| e / binom(d, i))
        .collect()
}

/// Monic coefficients (descending) from `e_k`: `c_k = (-1)^k e_k`.
fn coefficients_oracle(roots: &[BigRational]) -> Vec<BigRational> {
    e_by_subsets(roots)
        .into_iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { e } else { -e })
        .collect()
}

/// Coefficient-level `⊠_d`: `c_k = (-1)^k a_k b_k / C(d,k)` on signed
/// coefficients `a_k = (-1)^k c_k(p)`.
fn mult_oracle(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let d = a.len() - 1;
    (0..=d)
        .map(|k| {
            let s = if k % 2 == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            let (ak, bk) = (&a[k] * &s, &b[k] * &s);
            ak * bk / binom(d, k) * s
        })
        .collect()
}

struct Sample {
    roots: Vec<BigRational>,
    n: u32,
}

fn corpus(seed: u64, count: usize, zero_free: bool) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.random_range(1..=10usize);
            let den = rng.random_range(1..=9i64);
            let lo = if zero_free { 1 } else { 0 };
            let roots = (0..d).map(|_| q(rng.random_range(lo..=9), den)).collect();
            Sample {
                roots,
                n: rng.random_range(1..=6),
            }
        })
        .collect()
}

fn profile(roots: &[BigRational]) -> SymmetricProfile {
    SymmetricProfile::from_roots(&RootMultiset::new(roots.to_vec()).unwrap())
}

fn limits_exact(p: &SymmetricProfile) -> Vec<BigRational> {
    lln_limit_roots(p).exact().unwrap().to_vec()
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || {
        format!(
            "{what} took {:.2} s, limit {limit} s",
            elapsed.as_secs_f64()
        )
    })
}

fn criterion_1() -> Check {
    let start = Instant::now();
    for (k, s) in corpus(1, 50, false).iter().enumerate() {
        let p = profile(&s.roots);
        let mut acc = p.clone();
        let mut coeffs = coefficients_oracle(&s.roots);
        let base = coeffs.clone();
        for _ in 1..s.n {
            acc = multiplicative_convolve(&acc, &p).map_err(|e| e.to_string())?;
            coeffs = mult_oracle(&coeffs, &base);
        }
        let want: Vec<BigRational> = e_tilde_oracle(&s.roots)
            .into_iter()
            .map(|e| num_traits::pow(e, s.n as usize))
            .collect();
        ensure(acc.e_tilde_exact().unwrap() == want.as_slice(), || {
            format!(
                "polynomial {k}: profile of the {}-fold product differs from ẽ_i^n",
                s.n
            )
        })?;
        let got = acc.to_coefficients().map_err(|e| e.to_string())?;
        ensure(got.coefficients() == coeffs.as_slice(), || {
            format!("polynomial {k}: coefficients differ from the coefficient-level product")
        })?;
    }
    within(start.elapsed(), 10.0, "50 polynomials")?;
    Ok(format!(
        "50 polynomials exact in {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Check {
    for (k, s) in corpus(1, 50, false).iter().enumerate() {
        let d = s.roots.len();
        let p = profile(&s.roots);
        let id = profile(&vec![BigRational::one(); d]);
        let out = multiplicative_convolve(&p, &id).map_err(|e| e.to_string())?;
        let coeffs = out.to_coefficients().map_err(|e| e.to_string())?;
        ensure(
            coeffs.coefficients() == coefficients_oracle(&s.roots).as_slice(),
            || format!("polynomial {k}: p ⊠ (x-1)^d != p"),
        )?;
    }
    Ok("50 polynomials unchanged".into())
}

/// `(-1)^d d! d^{-d} L_d(d x)` from the Laguerre series
/// `L_d(y) = Σ_k C(d,k) (-y)^k / k!`, descending coefficients.
fn laguerre_coefficients(d: usize) -> Vec<BigRational> {
    let mut fact = vec![BigRational::one()];
    for k in 1..=d {
        let next = &fact[k - 1] * BigRational::from_integer(k.into());
        fact.push(next);
    }
    let dd = BigRational::from_integer(d.into());
    let scale = &fact[d] / num_traits::pow(dd.clone(), d);
    (0..=d)
        .rev()
        .map(|k| {
            let c = &scale * binom(d, k) * num_traits::pow(dd.clone(), k) / &fact[k];
            if (d + k).is_multiple_of(2) {
                c
            } else {
                -c
            }
        })
        .collect()
}

fn criterion_3() -> Check {
    for d in [2usize, 5, 10, 25] {
        let poly =
            BigPoly::from_coefficients(laguerre_coefficients(d)).map_err(|e| e.to_string())?;
        let p = SymmetricProfile::from_coefficients(&poly).map_err(|e| e.to_string())?;
        ensure(p == laguerre_profile(d), || {
            format!("d={d}: profile differs from the series")
        })?;
        let want: Vec<BigRational> = (1..=d).map(|i| q((d - i + 1) as i64, d as i64)).collect();
        ensure(limits_exact(&p) == want, || {
            format!("d={d}: limit roots differ")
        })?;
    }
    Ok("d ∈ {2, 5, 10, 25} exact".into())
}

fn criterion_4() -> Check {
    for d in [1usize, 3, 8] {
        let mut roots = vec![BigRational::zero(); d];
        roots.extend(vec![BigRational::one(); d]);
        let p = profile(&roots);
        ensure(
            p.e_tilde_exact().unwrap() == e_tilde_oracle(&roots).as_slice(),
            || format!("d={d}: profile differs from subset enumeration"),
        )?;
        ensure(p == two_root_profile(d), || {
            format!("d={d}: closed-form profile differs")
        })?;
        let want: Vec<BigRational> = (1..=2 * d)
            .map(|i| {
                if i <= d {
                    q((d - i + 1) as i64, (2 * d - i + 1) as i64)
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        ensure(limits_exact(&p) == want, || {
            format!("d={d}: limit roots differ")
        })?;
    }
    Ok("d ∈ {1, 3, 8} exact".into())
}

/// `⌊√x · 2^bits⌋ / 2^bits` by integer square root.
fn sqrt_floor(x: &BigRational, bits: usize) -> BigRational {
    let scaled = (x * BigRational::from_integer(BigInt::one() << (2 * bits))).to_integer();
    BigRational::new(scaled.sqrt(), BigInt::one() << bits)
}

fn rel(a: &BigRational, b: &BigRational) -> f64 {
    ((a - b) / b).abs().to_f64().unwrap()
}

/// `ln x` for rationals far outside the f64 range: split off a power of two.
fn ln_big(x: &BigRational) -> f64 {
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    (x * pow2(-e)).to_f64().unwrap().ln() + e as f64 * std::f64::consts::LN_2
}

fn criterion_5() -> Check {
    let seed =
        SymmetricProfile::from_exact(vec![q(1, 1), q(1, 1), q(1, 2)]).map_err(|e| e.to_string())?;
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for n in (1..=64u32).chain([128, 256, 512, 1024]) {
        let poly = multiplicative_power(&seed, n)
            .to_coefficients()
            .map_err(|e| e.to_string())?;
        if n <= 64 {
            ensure(
                poly.coefficients() == [q(1, 1), q(-2, 1), pow2(-(n as i64))],
                || format!("n={n}: coefficients are not x² - 2x + 2^-n"),
            )?;
        }
        let roots = solve_real_rooted(&poly, &cfg).map_err(|e| e.to_string())?;
        let r = roots.roots().roots();
        let s = sqrt_floor(&(BigRational::one() - pow2(-(n as i64))), 400);
        let big = BigRational::one() + &s;
        let small = pow2(-(n as i64)) / &big;
        worst = worst.max(rel(&r[0], &big)).max(rel(&r[1], &small));
        ensure(worst <= 1e-25, || {
            format!("n={n}: relative root error {worst:e}")
        })?;
        if n == 1024 {
            let e1 = (ln_big(&r[0]) - std::f64::consts::LN_2).abs();
            let e2 =
                (ln_big(&r[1]) + 1024.0 * std::f64::consts::LN_2 + std::f64::consts::LN_2).abs();
            ensure(e1 <= 2e-3 && e2 <= 2e-3, || {
                format!("n=1024: |n·err_1 - log 2| = {e1:e}, |n·err_2 + log 2| = {e2:e}")
            })?;
        }
    }
    Ok(format!(
        "coefficients exact for n ≤ 64, max relative root error {worst:.1e}"
    ))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let cfg = SolverConfig::new(2f64.powi(-1000)).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for d in [3usize, 4] {
        let p = laguerre_profile(d);
        for n in [4u32, 16, 64, 256] {
            let solved = roots_of_power(&p, n, &cfg).map_err(|e| e.to_string())?;
            for (k, lambda) in solved.roots().roots().iter().enumerate() {
                let i = k + 1;
                let r_n = num_traits::pow(q((d - i + 1) as i64, d as i64), n as usize);
                let lo = &r_n / binom(d, i - 1);
                let hi = &r_n * binom(d, i);
                ensure(&lo <= lambda && lambda <= &hi, || {
                    format!("d={d} n={n} i={i}: root outside its bracket")
                })?;
                let l = ln_big(lambda);
                ensure(ln_big(&lo) <= l && l <= ln_big(&hi), || {
                    format!("d={d} n={n} i={i}: log-domain bracket check failed")
                })?;
                checked += 1;
            }
        }
    }
    within(start.elapsed(), 60.0, "sandwich check")?;
    Ok(format!(
        "{checked} roots inside their brackets at 1000-bit tolerance in {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_7() -> Check {
    for (k, s) in corpus(7, 50, true).iter().enumerate() {
        let r = limits_exact(&profile(&s.roots));
        let lhs: BigRational = r.iter().product();
        let rhs: BigRational = s.roots.iter().product();
        ensure(lhs == rhs, || format!("polynomial {k}: ∏R_i != ∏λ_i"))?;
    }
    Ok("50 zero-free polynomials exact".into())
}

fn criterion_8() -> Check {
    let mut strict = 0;
    for (k, s) in corpus(1, 50, false)
        .iter()
        .chain(corpus(7, 50, true).iter())
        .enumerate()
    {
        let e = e_tilde_oracle(&s.roots);
        let m = s.roots.iter().filter(|r| r.is_positive()).count();
        let oracle: Vec<BigRational> = (1..=s.roots.len())
            .map(|i| {
                if i <= m {
                    &e[i] / &e[i - 1]
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        let limits = lln_limit_roots(&profile(&s.roots));
        ensure(limits.exact().unwrap() == oracle.as_slice(), || {
            format!("polynomial {k}: limits differ")
        })?;
        ensure(oracle.windows(2).all(|w| w[0] >= w[1]), || {
            format!("polynomial {k}: not weakly decreasing")
        })?;
        let mut distinct: Vec<&BigRational> = s.roots.iter().filter(|r| r.is_positive()).collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() >= 2 {
            ensure(oracle[..m].windows(2).all(|w| w[0] > w[1]), || {
                format!("polynomial {k}: not strictly decreasing on the positive part")
            })?;
            ensure(limits.is_strictly_decreasing_on_positive(), || {
                format!("polynomial {k}: library disagrees")
            })?;
            strict += 1;
        }
    }
    Ok(format!(
        "100 polynomials weakly decreasing, {strict} strictly"
    ))
}

fn criterion_9() -> Check {
    let mut worst_s = 0.0f64;
    for k in 1..=100 {
        let t = -0.5 + 0.5 * k as f64 / 101.0;
        let s = s_transform_numeric(&MeasureSpec::BernoulliHalf, t).map_err(|e| e.to_string())?;
        worst_s = worst_s.max((s - (2.0 + 2.0 * t) / (1.0 + 2.0 * t)).abs());
    }
    ensure(worst_s <= 1e-10, || {
        format!("Bernoulli S-transform error {worst_s:e}")
    })?;
    let mut worst_q = 0.0f64;
    for k in 0..100 {
        let t = 0.01 + 0.98 * k as f64 / 99.0;
        let q1 = phi_quantile(&MeasureSpec::MarchenkoPastur, t).map_err(|e| e.to_string())?;
        let q2 = 1.0
            / s_transform_numeric(&MeasureSpec::MarchenkoPastur, t - 1.0)
                .map_err(|e| e.to_string())?;
        worst_q = worst_q.max((q1 - t).abs()).max((q2 - t).abs());
    }
    ensure(worst_q <= 1e-8, || format!("MP quantile error {worst_q:e}"))?;
    Ok(format!(
        "S error {worst_s:.1e}, quantile error {worst_q:.1e}"
    ))
}

/// Sup of `|F_emp - F|` over the atoms and their left limits, for a
/// continuous `F` with an optional atom at zero.
fn ks_oracle(
    atoms: &[BigRational],
    zero_mass: &BigRational,
    f: impl Fn(&BigRational) -> BigRational,
) -> BigRational {
    let mut sorted = atoms.to_vec();
    sorted.sort();
    let w = BigRational::new(BigInt::one(), sorted.len().into());
    let mut best = BigRational::zero();
    let mut below = BigRational::zero();
    let mut k = 0;
    while k < sorted.len() {
        let x = sorted[k].clone();
        let mut j = k;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let after = &w * BigRational::from_integer(j.into());
        let fx = f(&x);
        let fx_left = if x.is_zero() {
            BigRational::zero()
        } else {
            fx.clone()
        };
        let fx_right = if x.is_zero() { zero_mass.clone() } else { fx };
        best = best
            .max((&below - fx_left).abs())
            .max((&after - fx_right).abs());
        below = after;
        k = j;
    }
    best
}

fn criterion_10() -> Check {
    let start = Instant::now();
    let d = 100;
    let nu = EmpiricalMeasure::from_limit_roots(&lln_limit_roots(&laguerre_profile(d)));
    let ks_lag = ks_distance(
        &nu,
        &PhiQuantileFn::new(MeasureSpec::MarchenkoPastur).unwrap(),
    );
    let oracle = ks_oracle(nu.atoms(), &BigRational::zero(), |x| {
        x.clone().min(BigRational::one())
    });
    ensure((ks_lag - oracle.to_f64().unwrap()).abs() < 1e-15, || {
        format!("Laguerre KS {ks_lag} differs from jump-point oracle {oracle}")
    })?;
    ensure(ks_lag <= 1.0 / d as f64, || {
        format!("Laguerre KS {ks_lag} > 1/{d}")
    })?;

    let d2 = 200;
    let nu2 = EmpiricalMeasure::from_limit_roots(&lln_limit_roots(&two_root_profile(d2)));
    let ks_two = ks_distance(
        &nu2,
        &PhiQuantileFn::new(MeasureSpec::BernoulliHalf).unwrap(),
    );
    let half = q(1, 2);
    let oracle2 = ks_oracle(nu2.atoms(), &half, |x| {
        if x >= &half {
            BigRational::one()
        } else {
            (q(2, 1) * (BigRational::one() - x)).recip()
        }
    });
    ensure((ks_two - oracle2.to_f64().unwrap()).abs() < 1e-15, || {
        format!("two-root KS {ks_two} differs from jump-point oracle {oracle2}")
    })?;
    ensure(ks_two <= 2.0 / d2 as f64, || {
        format!("two-root KS {ks_two} > 2/{d2}")
    })?;
    within(start.elapsed(), 30.0, "KS study")?;
    Ok(format!("KS = {ks_lag} at d = {d}, {ks_two} at d = {d2}"))
}

fn criterion_11() -> Check {
    let lambda =
        discretize_measure(&MeasureSpec::MarchenkoPastur, 500).map_err(|e| e.to_string())?;
    let r1 = limits_exact(&SymmetricProfile::from_roots(&lambda))[0].clone();
    let mean: BigRational =
        lambda.roots().iter().sum::<BigRational>() / BigRational::from_integer(500.into());
    ensure(r1 == mean, || {
        "R_1 differs from the mean of the seed roots".into()
    })?;
    let err = (r1.to_f64().unwrap() - 1.0).abs();
    ensure(err <= 5e-3, || format!("|R_1 - 1| = {err:e}"))?;
    Ok(format!("|R_1 - 1| = {err:.2e}"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact profile of repeated ⊠ powers", criterion_1),
        ("(x-1)^d is the ⊠ identity", criterion_2),
        ("Laguerre limit roots (d-i+1)/d", criterion_3),
        ("two-root limit roots (d-i+1)/(2d-i+1)", criterion_4),
        ("degree-2 closed form and 1/n rate", criterion_5),
        ("roots inside a-priori brackets", criterion_6),
        (
            "product of limit roots equals product of roots",
            criterion_7,
        ),
        ("limit roots are decreasing", criterion_8),
        ("S-transform and Φ quantile oracles", criterion_9),
        ("KS distance of limit-root laws", criterion_10),
        ("MP endpoint R_1 near the mean", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
