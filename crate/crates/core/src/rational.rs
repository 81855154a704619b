//! Exact rationals and small vector helpers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// A rational vector (element of `𝕃 ⊗ ℚ` or `𝕃^∨ ⊗ ℚ`).
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

pub fn zero_vec(n: usize) -> QVec {
    (0..n).map(|_| Q::zero()).collect()
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Fractional part `⟨x⟩ ∈ [0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(x: &Q) -> f64 {
    // numerator and denominator may individually overflow f64 only for
    // absurd inputs; desk-scale values are fine.
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Scales a rational vector to the primitive integer vector on the same ray.
/// Returns the zero vector unchanged.
pub fn primitive(a: &[Q]) -> QVec {
    if is_zero_vec(a) {
        return a.to_vec();
    }
    let l = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = a.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Least common multiple of the denominators.
pub fn denom_lcm(a: &[Q]) -> BigInt {
    a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Formats as `a` or `a/b`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_vec(a: &[Q]) -> String {
    let parts: Vec<String> = a.iter().map(fmt_q).collect();
    alloc::format!("({})", parts.join(","))
}

/// Parses `a`, `-a` or `a/b`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * q(k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_of_negative() {
        assert_eq!(frac(&qr(-1, 3)), qr(2, 3));
        assert_eq!(frac(&q(-2)), q(0));
    }

    #[test]
    fn primitive_clears_denominators() {
        assert_eq!(primitive(&[qr(1, 2), qr(-3, 4)]), qvec(&[2, -3]));
        assert_eq!(primitive(&[q(0), q(6)]), qvec(&[0, 1]));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-3/6"), Some(qr(-1, 2)));
        assert_eq!(parse_q(" 7 "), Some(q(7)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
        assert_eq!(fmt_q(&qr(4, -6)), "-2/3");
    }
}
