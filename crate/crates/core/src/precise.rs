//! Exact-rational helpers: parsing, decimal rendering, and fixed-point
//! logarithms and roots evaluated to a requested number of bits.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// `2^e` for any sign of `e`.
pub fn pow2(e: i64) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn binomial_q(n: usize, k: usize) -> BigRational {
    BigRational::from_integer(binomial(n, k))
}

/// Parses `"p/q"`, integers, and plain or exponent decimals (`"0.125"`,
/// `"-3e-2"`) into exact rationals.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(idx) => {
            let e: i64 = s[idx + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..idx], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let all: BigInt = format!("{whole}{frac}")
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Exact `"p/q"` (or `"p"`) rendering.
pub fn format_exact(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn bit_len(x: &BigInt) -> i64 {
    x.bits() as i64
}

/// Binary exponent `e` with `2^(e-1) <= |x| < 2^(e+1)`; cheap, off by at most one.
pub fn approx_log2(x: &BigRational) -> i64 {
    bit_len(x.numer()) - bit_len(x.denom())
}

/// Decimal rendering to `sig` significant digits (round half up). Plain
/// notation for moderate exponents, scientific otherwise.
pub fn to_decimal(x: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // floor(log10 a) estimate, corrected below
    let mut e10 = ((approx_log2(&a) as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow10(e10) > a {
        e10 -= 1;
    }
    while pow10(e10 + 1) <= a {
        e10 += 1;
    }
    let scaled = &a * pow10(sig as i64 - 1 - e10);
    let mut m = (scaled + rat(1, 2)).floor().to_integer();
    let limit = num_traits::pow(BigInt::from(10), sig);
    if m >= limit {
        m /= 10;
        e10 += 1;
    }
    let digits = m.to_string();
    let sign = if neg { "-" } else { "" };
    if (-5..=20).contains(&e10) {
        let digits = digits.trim_end_matches('0');
        let digits = if digits.is_empty() { "0" } else { digits };
        let point = e10 + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else if point as usize >= digits.len() {
            format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
        } else {
            format!(
                "{}.{}",
                &digits[..point as usize],
                &digits[point as usize..]
            )
        };
        format!("{sign}{body}")
    } else {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Natural logarithm of a positive rational to f64 accuracy, without
/// overflow or underflow for huge or tiny magnitudes.
pub fn ln_f64(x: &BigRational) -> f64 {
    if !x.is_positive() {
        return if x.is_zero() {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        };
    }
    let e = approx_log2(x);
    // mantissa in (1/2, 2), extracted to 64 bits
    let m = x * pow2(-e);
    let top = (m * pow2(64)).to_integer();
    let mf = top.to_f64().unwrap() / 2f64.powi(64);
    mf.ln() + (e as f64) * std::f64::consts::LN_2
}

/// `2 * atanh(y)` in fixed point with `p` fractional bits, for |y| <= 1/3.
fn two_atanh_fixed(y: &BigRational, p: u64) -> BigInt {
    if y.is_negative() {
        return -two_atanh_fixed(&-y, p);
    }
    let one = BigInt::one() << p;
    let yf = (y * BigRational::from_integer(one.clone()))
        .round()
        .to_integer();
    let y2 = (&yf * &yf) >> p;
    let mut term = yf;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(k);
        term = (&term * &y2) >> p;
        k += 2;
    }
    sum << 1
}

/// ln(2) with absolute error below `2^-bits`.
pub fn ln2_fixed(bits: u64) -> BigRational {
    let p = bits + 16;
    BigRational::new(two_atanh_fixed(&rat(1, 3), p), BigInt::one() << p)
}

/// Natural logarithm of a positive rational with absolute error below `2^-bits`.
pub fn ln_precise(x: &BigRational, bits: u64) -> Result<BigRational> {
    if !x.is_positive() {
        return Err(Error::Domain("logarithm of a non-positive number".into()));
    }
    let e = approx_log2(x);
    let guard = 24 + (e.unsigned_abs().max(1) as f64).log2().ceil() as u64;
    let p = bits + guard;
    let m = x * pow2(-e);
    let y = (&m - BigRational::one()) / (&m + BigRational::one());
    let ln_m = BigRational::new(two_atanh_fixed(&y, p), BigInt::one() << p);
    Ok(ln_m + ln2_fixed(p) * BigRational::from_integer(BigInt::from(e)))
}

/// `x^(1/n)` for non-negative rational `x`, truncated, with relative error
/// below `2^-bits`.
pub fn nth_root(x: &BigRational, n: u32, bits: u64) -> BigRational {
    assert!(n >= 1);
    if x.is_zero() || n == 1 {
        return x.clone();
    }
    assert!(x.is_positive(), "nth_root of a negative number");
    let nn = n as i64;
    let want = nn * (bits as i64 + 2);
    let have = approx_log2(x);
    // scale exponent s so that x * 2^(n s) carries ~n(bits+2) integer bits
    let s = Integer::div_ceil(&(want - have), &nn).max(0);
    let scaled = (x * pow2(nn * s)).to_integer();
    let r = scaled.nth_root(n);
    BigRational::new(r, BigInt::one() << s as u64)
}

/// Square root to `bits` of relative precision.
pub fn sqrt(x: &BigRational, bits: u64) -> BigRational {
    nth_root(x, 2, bits)
}

/// Exponential of a finite f64 as an exact dyadic rational. Magnitudes outside
/// the f64 range are reconstructed from the binary exponent.
pub fn exp_to_rational(log_value: f64) -> BigRational {
    if log_value == f64::NEG_INFINITY {
        return BigRational::zero();
    }
    let l2 = log_value / std::f64::consts::LN_2;
    let e = l2.floor();
    let frac = (l2 - e).exp2();
    from_f64(frac) * pow2(e as i64)
}

pub fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
