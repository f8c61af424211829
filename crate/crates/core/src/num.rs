//! Exact-arithmetic helpers shared by the optimizer and the measures.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `log2` of a positive big integer, accurate to about 1e-15 relative.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return libm::log2(x.to_u64().unwrap() as f64);
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    libm::log2(top.to_u64().unwrap() as f64) + shift as f64
}

pub fn log2_bigint(x: &BigInt) -> f64 {
    log2_biguint(x.magnitude())
}

/// `log2` of a positive rational.
pub fn log2_rat(x: &Rat) -> f64 {
    log2_bigint(x.numer()) - log2_bigint(x.denom())
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    if x.is_zero() {
        return 0.0;
    }
    let l = log2_rat(&x.abs());
    if l.abs() < 1000.0 {
        if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
            if n.is_finite() && d.is_finite() {
                return n / d;
            }
        }
    }
    sign * libm::exp2(l)
}

pub fn to_biguint(x: &BigInt) -> BigUint {
    assert!(x.sign() != Sign::Minus, "negative value where a natural was expected");
    x.magnitude().clone()
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued fractions (with the semiconvergent step at the end).
pub fn best_rational(x: f64, max_den: u64) -> Rat {
    if !x.is_finite() {
        return Rat::zero();
    }
    let neg = x < 0.0;
    let mut v = libm::fabs(x);
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = libm::floor(v);
        if a > 1e18 {
            break;
        }
        let ai = a as u128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            // Largest semiconvergent that still fits.
            let k = (max_den - q0) / q1.max(1);
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            if qs > 0 && 2 * k >= ai {
                let cand_s = ps as f64 / qs as f64;
                let cand_c = p1 as f64 / q1 as f64;
                if libm::fabs(cand_s - libm::fabs(x)) < libm::fabs(cand_c - libm::fabs(x)) {
                    p1 = ps;
                    q1 = qs;
                }
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rat::zero();
    }
    let r = Rat::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// `x^e` for a rational and a small exponent.
pub fn rat_pow(x: &Rat, e: u32) -> Rat {
    num_traits::pow::pow(x.clone(), e as usize)
}

pub fn big_pow(x: &BigUint, e: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continued_fractions() {
        assert_eq!(best_rational(0.5, 10), rat(1, 2));
        assert_eq!(best_rational(1.0 / 3.0 + 1e-13, 1000), rat(1, 3));
        assert_eq!(best_rational(-0.6, 100), rat(-3, 5));
        assert_eq!(best_rational(8.0 / 5.0, 100), rat(8, 5));
        assert_eq!(best_rational(core::f64::consts::PI, 1000), rat(355, 113));
        assert_eq!(best_rational(0.0, 1000), rat(0, 1));
    }

    #[test]
    fn big_logs() {
        let x = big_pow(&BigUint::from(16u32), 40);
        assert!((log2_biguint(&x) - 160.0).abs() < 1e-9);
        assert!((log2_rat(&rat(1, 256)) + 8.0).abs() < 1e-12);
        assert!((rat_to_f64(&rat(-3, 4)) + 0.75).abs() < 1e-15);
    }
}
