use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Inverse of `w` modulo `m` by the extended Euclidean algorithm.
///
/// Returns `v` in `[1, m-1]` with `w * v ≡ 1 (mod m)`. Moduli below 2 have
/// no such range and are rejected along with non-coprime inputs.
pub fn mod_inverse(w: &BigUint, m: &BigUint) -> Result<BigUint> {
    let not_invertible = || Error::NotInvertible { value: w.to_string(), modulus: m.to_string() };
    if *m < BigUint::from(2u8) {
        return Err(not_invertible());
    }
    let (mut old_r, mut r) = (BigInt::from(w.clone() % m), BigInt::from(m.clone()));
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let (q, rem) = old_r.div_rem(&r);
        old_r = std::mem::replace(&mut r, rem);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(not_invertible());
    }
    let m_signed = BigInt::from(m.clone());
    let mut v = old_s.mod_floor(&m_signed);
    if v.is_negative() {
        v += &m_signed;
    }
    Ok(v.to_biguint().expect("non-negative after mod_floor"))
}

/// `|a - b|` on unsigned integers.
pub fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// log2 of a positive integer, exact in the integer part and f64-accurate in
/// the fraction regardless of the integer's size.
pub fn log2(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 53;
    let top: u64 = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64).log2() + shift as f64
}

/// `a / b` rounded to f64, for integers of any size. `b` must be nonzero.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    assert!(!b.is_zero(), "ratio with zero denominator");
    let drop = a.bits().max(b.bits()).saturating_sub(960);
    let (a, b) = (a >> drop, b >> drop);
    match (a.to_f64(), b.to_f64()) {
        (Some(x), Some(y)) if y > 0.0 => x / y,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(&big(1), &big(97)).unwrap(), big(1));
        assert_eq!(mod_inverse(&big(3), &big(7)).unwrap(), big(5));
        assert_eq!(mod_inverse(&big(10), &big(17)).unwrap() * big(10) % big(17), big(1));
    }

    #[test]
    fn non_coprime_is_rejected() {
        assert!(matches!(mod_inverse(&big(6), &big(9)), Err(Error::NotInvertible { .. })));
        assert!(mod_inverse(&big(0), &big(9)).is_err());
        assert!(mod_inverse(&big(1), &big(1)).is_err());
    }

    #[test]
    fn log2_of_large_values() {
        let x = BigUint::one() << 200u32;
        assert!((log2(&x) - 200.0).abs() < 1e-12);
        let y = BigUint::from(3u8) << 100u32;
        assert!((log2(&y) - (100.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(log2(&big(1)), 0.0);
    }

    #[test]
    fn ratio_survives_huge_operands() {
        assert_eq!(ratio(&big(3), &big(4)), 0.75);
        let a = BigUint::one() << 5000u32;
        let b = BigUint::one() << 4999u32;
        assert_eq!(ratio(&a, &b), 2.0);
        assert_eq!(ratio(&b, &a), 0.5);
        assert_eq!(ratio(&a, &big(1)), f64::INFINITY);
    }
}
