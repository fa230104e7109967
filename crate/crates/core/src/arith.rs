//! Exact integer helpers: gcd/lcm, p-parts, modular inverses and
//! size-guarded exponentiation.
//!
//! Every quantity in this crate that can blow up exponentially goes through
//! [`guarded_pow`] with a [`SizeGuard`], and overflow is reported in-band as
//! [`Guarded::Overflow`] rather than by panicking. Primality is certified by
//! trial division only; inputs too large for that are rejected, never
//! guessed.

use core::fmt;

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Limits for exponentiation results and nested exponent towers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeGuard {
    /// Maximum bit length a guarded result may have.
    pub max_bits: u64,
    /// Maximum nesting depth of exponent towers evaluated under this guard.
    pub max_tower_height: u32,
}

impl SizeGuard {
    /// Creates a guard. `max_bits` must be at least 64 so that small
    /// bookkeeping quantities always fit.
    pub fn new(max_bits: u64, max_tower_height: u32) -> SizeGuard {
        assert!(max_bits >= 64, "SizeGuard.max_bits must be >= 64");
        SizeGuard {
            max_bits,
            max_tower_height,
        }
    }
}

impl Default for SizeGuard {
    fn default() -> SizeGuard {
        SizeGuard {
            max_bits: 4096,
            max_tower_height: 3,
        }
    }
}

/// A value that may have exceeded a [`SizeGuard`]. Overflow is data, not an
/// error: callers degrade gracefully (skip a check, widen a divisor) instead
/// of aborting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guarded<T> {
    /// The exact value, within the guard.
    Exact(T),
    /// The computation would exceed the guard.
    Overflow,
}

impl<T> Guarded<T> {
    /// Returns the exact value, if within the guard.
    pub fn exact(&self) -> Option<&T> {
        match self {
            Guarded::Exact(v) => Some(v),
            Guarded::Overflow => None,
        }
    }

    /// Consumes the guard wrapper, returning the exact value if present.
    pub fn into_exact(self) -> Option<T> {
        match self {
            Guarded::Exact(v) => Some(v),
            Guarded::Overflow => None,
        }
    }

    /// True when the computation overflowed the guard.
    pub fn is_overflow(&self) -> bool {
        matches!(self, Guarded::Overflow)
    }

    /// Maps the exact value, preserving overflow.
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Guarded<U> {
        match self {
            Guarded::Exact(v) => Guarded::Exact(f(v)),
            Guarded::Overflow => Guarded::Overflow,
        }
    }

    /// Chains a guarded computation, preserving overflow.
    pub fn and_then<U>(self, f: impl FnOnce(T) -> Guarded<U>) -> Guarded<U> {
        match self {
            Guarded::Exact(v) => f(v),
            Guarded::Overflow => Guarded::Overflow,
        }
    }
}

/// Errors for the arithmetic helpers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    /// The argument could not be certified prime by trial division (it is
    /// composite, smaller than 2, or beyond the certification bound).
    NotPrime(BigInt),
    /// `value` has no inverse modulo `modulus`.
    NotCoprime { value: BigInt, modulus: BigInt },
    /// A modulus must be a positive integer.
    NonPositiveModulus(BigInt),
    /// Guarded powers only accept nonnegative exponents.
    NegativeExponent(BigInt),
    /// The argument must be nonzero.
    ZeroArgument,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::NotPrime(p) => write!(f, "{p} is not a certified prime"),
            ArithError::NotCoprime { value, modulus } => {
                write!(f, "{value} is not invertible modulo {modulus}")
            }
            ArithError::NonPositiveModulus(m) => write!(f, "modulus {m} is not positive"),
            ArithError::NegativeExponent(e) => write!(f, "negative exponent {e}"),
            ArithError::ZeroArgument => write!(f, "argument must be nonzero"),
        }
    }
}

impl core::error::Error for ArithError {}

/// Greatest common divisor, always nonnegative; `gcd(0,0) = 0`.
pub fn gcd(m: &BigInt, n: &BigInt) -> BigInt {
    m.gcd(n)
}

/// Least common multiple, always nonnegative; zero if either input is zero.
pub fn lcm(m: &BigInt, n: &BigInt) -> BigInt {
    if m.is_zero() || n.is_zero() {
        return BigInt::zero();
    }
    m.lcm(n)
}

/// Certification bound for [`is_certified_prime`]: trial division runs up to
/// 10^6, so only inputs below 10^12 can be certified.
pub const PRIME_CERTIFICATION_BOUND: u64 = 1_000_000_000_000;

/// Primality by trial division. Returns `true` only for inputs in
/// `[2, 10^12)` that are prime; anything larger is conservatively rejected.
pub fn is_certified_prime(p: &BigInt) -> bool {
    let p = match p.to_u64() {
        Some(v) => v,
        None => return false,
    };
    if p >= PRIME_CERTIFICATION_BOUND {
        return false;
    }
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    if p % 3 == 0 {
        return p == 3;
    }
    let mut d = 5u64;
    while d * d <= p {
        if p % d == 0 || p % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Largest power of the prime `p` dividing `n` (as a value, e.g.
/// `p_part(567, 3) = 81`). Signs are ignored; `n` must be nonzero.
pub fn p_part(n: &BigInt, p: &BigInt) -> Result<BigInt, ArithError> {
    if !is_certified_prime(p) {
        return Err(ArithError::NotPrime(p.clone()));
    }
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut rest = n.abs();
    let mut part = BigInt::one();
    loop {
        let (q, r) = rest.div_rem(p);
        if r.is_zero() {
            part *= p;
            rest = q;
        } else {
            return Ok(part);
        }
    }
}

/// Multiplicity of the prime `p` in `n` (the exponent rather than the
/// power). Same preconditions as [`p_part`].
pub fn p_multiplicity(n: &BigInt, p: &BigInt) -> Result<u32, ArithError> {
    if !is_certified_prime(p) {
        return Err(ArithError::NotPrime(p.clone()));
    }
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut rest = n.abs();
    let mut k = 0u32;
    loop {
        let (q, r) = rest.div_rem(p);
        if r.is_zero() {
            k += 1;
            rest = q;
        } else {
            return Ok(k);
        }
    }
}

/// Least nonnegative inverse of `a` modulo `m >= 1`. For `m = 1` every
/// residue is zero, so the inverse is 0.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt, ArithError> {
    if !m.is_positive() {
        return Err(ArithError::NonPositiveModulus(m.clone()));
    }
    if m.is_one() {
        return Ok(BigInt::zero());
    }
    let ext = a.extended_gcd(m);
    if !ext.gcd.is_one() {
        return Err(ArithError::NotCoprime {
            value: a.clone(),
            modulus: m.clone(),
        });
    }
    Ok(ext.x.mod_floor(m))
}

/// `base^exp` for `exp >= 0`, returning [`Guarded::Overflow`] instead of a
/// result longer than `guard.max_bits` bits. `0^0 = 1`.
pub fn guarded_pow(base: &BigInt, exp: &BigInt, guard: &SizeGuard) -> Result<Guarded<BigInt>, ArithError> {
    if exp.is_negative() {
        return Err(ArithError::NegativeExponent(exp.clone()));
    }
    if exp.is_zero() {
        return Ok(Guarded::Exact(BigInt::one()));
    }
    if base.is_zero() {
        return Ok(Guarded::Exact(BigInt::zero()));
    }
    if base.magnitude().is_one() {
        // +-1: only the sign parity matters, any exponent is fine.
        let negative = base.is_negative() && exp.is_odd();
        return Ok(Guarded::Exact(if negative {
            -BigInt::one()
        } else {
            BigInt::one()
        }));
    }
    // |base| >= 2, so the result has more than `exp` bits; an exponent past
    // the bit budget overflows before we even look at the base.
    let exp_u64 = match exp.to_u64() {
        Some(v) if v <= guard.max_bits => v,
        _ => return Ok(Guarded::Overflow),
    };
    // bits(base^exp) >= exp * (bits(base) - 1) + 1.
    let base_bits = base.magnitude().bits();
    if exp_u64.saturating_mul(base_bits - 1) + 1 > guard.max_bits {
        return Ok(Guarded::Overflow);
    }
    let result = Pow::pow(base, exp_u64);
    if result.magnitude().bits() > guard.max_bits {
        return Ok(Guarded::Overflow);
    }
    Ok(Guarded::Exact(result))
}

/// Trial-divides `n` by all primes up to `bound`. Returns the factor list
/// (prime, multiplicity) and, when the leftover cofactor exceeds 1, that
/// cofactor (prime itself whenever it is below `bound^2`, in which case it
/// is moved into the factor list instead).
pub fn trial_factor(n: &BigInt, bound: u64) -> (Vec<(BigInt, u32)>, Option<BigInt>) {
    let mut rest = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    if rest.is_zero() {
        return (factors, Some(rest));
    }
    let push = |p: u64, k: u32, factors: &mut Vec<(BigInt, u32)>| {
        if k > 0 {
            factors.push((BigInt::from(p), k));
        }
    };
    let divide_out = |rest: &mut BigInt, p: u64| -> u32 {
        let p_big = BigInt::from(p);
        let mut k = 0u32;
        loop {
            let (q, r) = rest.div_rem(&p_big);
            if r.is_zero() {
                *rest = q;
                k += 1;
            } else {
                return k;
            }
        }
    };
    let k = divide_out(&mut rest, 2);
    push(2, k, &mut factors);
    let k = divide_out(&mut rest, 3);
    push(3, k, &mut factors);
    let mut d = 5u64;
    while d <= bound && BigInt::from(d) * BigInt::from(d) <= rest {
        for p in [d, d + 2] {
            if p <= bound {
                let k = divide_out(&mut rest, p);
                push(p, k, &mut factors);
            }
        }
        d += 6;
    }
    if rest.is_one() {
        (factors, None)
    } else if rest <= BigInt::from(bound) * BigInt::from(bound) {
        // Cofactor below bound^2 with no prime factor <= bound: prime.
        factors.push((rest, 1));
        (factors, None)
    } else {
        (factors, Some(rest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&int(12), &int(18)), int(6));
        assert_eq!(gcd(&int(0), &int(5)), int(5));
        assert_eq!(gcd(&int(0), &int(0)), int(0));
        assert_eq!(gcd(&int(-4), &int(6)), int(2));
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm(&int(4), &int(6)), int(12));
        assert_eq!(lcm(&int(0), &int(0)), int(0));
        assert_eq!(lcm(&int(0), &int(7)), int(0));
        assert_eq!(lcm(&int(-4), &int(6)), int(12));
    }

    #[test]
    fn p_part_examples() {
        assert_eq!(p_part(&int(567), &int(3)).unwrap(), int(81));
        assert_eq!(p_part(&int(567), &int(7)).unwrap(), int(7));
        assert_eq!(p_part(&int(10), &int(3)).unwrap(), int(1));
        assert_eq!(p_part(&int(-24), &int(2)).unwrap(), int(8));
        assert_eq!(p_multiplicity(&int(567), &int(3)).unwrap(), 4);
        assert!(matches!(
            p_part(&int(10), &int(4)),
            Err(ArithError::NotPrime(_))
        ));
        assert!(matches!(
            p_part(&int(10), &int(1)),
            Err(ArithError::NotPrime(_))
        ));
        assert!(matches!(
            p_part(&int(0), &int(3)),
            Err(ArithError::ZeroArgument)
        ));
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&int(2), &int(27)).unwrap(), int(14));
        assert_eq!(mod_inverse(&int(1), &int(1)).unwrap(), int(0));
        assert_eq!(mod_inverse(&int(9), &int(1)).unwrap(), int(0));
        assert_eq!(mod_inverse(&int(-1), &int(5)).unwrap(), int(4));
        assert!(matches!(
            mod_inverse(&int(4), &int(8)),
            Err(ArithError::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inverse(&int(4), &int(0)),
            Err(ArithError::NonPositiveModulus(_))
        ));
    }

    #[test]
    fn guarded_pow_examples() {
        let g = SizeGuard::default();
        assert_eq!(guarded_pow(&int(2), &int(10), &g).unwrap(), Guarded::Exact(int(1024)));
        assert_eq!(guarded_pow(&int(-3), &int(3), &g).unwrap(), Guarded::Exact(int(-27)));
        assert_eq!(guarded_pow(&int(0), &int(0), &g).unwrap(), Guarded::Exact(int(1)));
        assert_eq!(guarded_pow(&int(0), &int(5), &g).unwrap(), Guarded::Exact(int(0)));
        assert_eq!(
            guarded_pow(&int(-1), &(BigInt::from(10).pow(30u32) + 1), &g).unwrap(),
            Guarded::Exact(int(-1))
        );
        assert!(matches!(
            guarded_pow(&int(2), &int(-1), &g),
            Err(ArithError::NegativeExponent(_))
        ));
        // Bit-budget edge: 2^4095 has exactly 4096 bits, 2^4096 one more.
        assert!(matches!(
            guarded_pow(&int(2), &int(4095), &g).unwrap(),
            Guarded::Exact(_)
        ));
        assert_eq!(guarded_pow(&int(2), &int(4096), &g).unwrap(), Guarded::Overflow);
        assert_eq!(
            guarded_pow(&int(5), &BigInt::from(10).pow(30u32), &g).unwrap(),
            Guarded::Overflow
        );
    }

    #[test]
    fn trial_factor_examples() {
        let (factors, rest) = trial_factor(&int(567), 1000);
        assert_eq!(factors, vec![(int(3), 4), (int(7), 1)]);
        assert_eq!(rest, None);

        let (factors, rest) = trial_factor(&int(2 * 2 * 101 * 103), 10);
        assert_eq!(factors[0], (int(2), 2));
        assert_eq!(rest, Some(int(101 * 103)));

        // Large prime cofactor below bound^2 is recognized as prime.
        let (factors, rest) = trial_factor(&int(2 * 9973), 200);
        assert_eq!(factors, vec![(int(2), 1), (int(9973), 1)]);
        assert_eq!(rest, None);
    }

    #[test]
    fn primality_by_trial_division() {
        assert!(is_certified_prime(&int(2)));
        assert!(is_certified_prime(&int(3)));
        assert!(is_certified_prime(&int(97)));
        assert!(is_certified_prime(&int(9973)));
        assert!(!is_certified_prime(&int(1)));
        assert!(!is_certified_prime(&int(0)));
        assert!(!is_certified_prime(&int(-7)));
        assert!(!is_certified_prime(&int(1_000_003i64 * 1_000_003)));
        // Beyond the certification bound: rejected even though prime.
        assert!(!is_certified_prime(
            &(BigInt::from(PRIME_CERTIFICATION_BOUND) * 4 + 7)
        ));
    }

    proptest! {
        #[test]
        fn gcd_divides_both(m in -1000i64..1000, n in -1000i64..1000) {
            let g = gcd(&int(m), &int(n));
            if !g.is_zero() {
                prop_assert!((int(m) % &g).is_zero());
                prop_assert!((int(n) % &g).is_zero());
            } else {
                prop_assert_eq!((m, n), (0, 0));
            }
        }

        #[test]
        fn gcd_lcm_product(m in -1000i64..1000, n in -1000i64..1000) {
            let g = gcd(&int(m), &int(n));
            let l = lcm(&int(m), &int(n));
            prop_assert_eq!(g * l, (int(m) * int(n)).abs());
        }

        #[test]
        fn mod_inverse_is_inverse(a in -1000i64..1000, m in 1i64..1000) {
            match mod_inverse(&int(a), &int(m)) {
                Ok(inv) => {
                    prop_assert!(inv >= int(0) && inv < int(m));
                    prop_assert_eq!((inv * int(a)).mod_floor(&int(m)), BigInt::one().mod_floor(&int(m)));
                }
                Err(_) => prop_assert!(gcd(&int(a), &int(m)) != int(1)),
            }
        }

        #[test]
        fn guarded_pow_matches_naive(base in -9i64..=9, exp in 0u32..16) {
            let g = SizeGuard::default();
            let mut naive = BigInt::one();
            for _ in 0..exp {
                naive *= int(base);
            }
            prop_assert_eq!(
                guarded_pow(&int(base), &int(exp as i64), &g).unwrap(),
                Guarded::Exact(naive)
            );
        }

        #[test]
        fn p_part_divides_and_is_coprime_after(n in 1i64..100000, pidx in 0usize..4) {
            let p = [2i64, 3, 5, 7][pidx];
            let part = p_part(&int(n), &int(p)).unwrap();
            prop_assert!((int(n) % &part).is_zero());
            let quotient = int(n) / &part;
            prop_assert!(!(quotient % int(p)).is_zero());
        }
    }
}
