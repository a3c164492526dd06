//! Exact field arithmetic over the rationals and prime fields, plus the
//! combinatorial coefficients (binomials, Steenrod denominators) that the
//! divided-power constructions need.
//!
//! Rationals are arbitrary-precision and always stored in lowest terms with a
//! positive denominator; prime-field residues live in `[0, p)`. There is no
//! floating point and no fixed-width fast path: exactness of the downstream
//! rank computations is the whole point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Names an exact coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    /// Validated prime-field constructor.
    pub fn prime_field(p: u64) -> Result<FieldSpec> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::InvalidParams(format!("{p} is not prime")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Mod { val: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        self.integer(1)
    }

    /// The image of an integer in this field.
    pub fn integer(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::PrimeField(p) => Scalar::Mod { val: reduce_i64(n, *p), p: *p },
        }
    }

    /// The image of a big integer in this field.
    pub fn big_integer(&self, n: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(n.clone())),
            FieldSpec::PrimeField(p) => {
                let m = BigInt::from(*p);
                let mut r = n % &m;
                if r.is_negative() {
                    r += &m;
                }
                let digits = r.to_u64_digits().1;
                let val = if digits.is_empty() { 0 } else { digits[0] };
                Scalar::Mod { val, p: *p }
            }
        }
    }

    /// Parses scalar text: decimal integers or `num/den` over Q, a residue
    /// (any integer, reduced) over a prime field.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let bad = || Error::ParseError(format!("bad scalar text {text:?}"));
        match self {
            FieldSpec::Rationals => {
                if let Some((n, d)) = text.split_once('/') {
                    let num: BigInt = n.trim().parse().map_err(|_| bad())?;
                    let den: BigInt = d.trim().parse().map_err(|_| bad())?;
                    if den.is_zero() {
                        return Err(Error::DivisionByZero("scalar text"));
                    }
                    Ok(Scalar::Rat(BigRational::new(num, den)))
                } else {
                    let num: BigInt = text.trim().parse().map_err(|_| bad())?;
                    Ok(Scalar::Rat(BigRational::from_integer(num)))
                }
            }
            FieldSpec::PrimeField(_) => {
                let n: BigInt = text.trim().parse().map_err(|_| bad())?;
                Ok(self.big_integer(&n))
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact element of the field named by a [`FieldSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { val: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Mod { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { val, .. } => *val == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field().to_string(), other.field().to_string()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { val: a, p }, Scalar::Mod { val: b, .. }) => {
                Scalar::Mod { val: mod_add(*a, *b, *p), p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            (Scalar::Mod { val: a, p }, Scalar::Mod { val: b, .. }) => {
                Scalar::Mod { val: mod_add(*a, *p - *b % *p, *p), p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { val: a, p }, Scalar::Mod { val: b, .. }) => {
                Scalar::Mod { val: mod_mul(*a, *b, *p), p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { val, p } => Scalar::Mod { val: if *val == 0 { 0 } else { p - val }, p: *p },
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inv"));
        }
        Ok(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Mod { val, p } => Scalar::Mod { val: mod_pow(*val, *p - 2, *p), p: *p },
        })
    }
}

// Arithmetic operators for in-field use; mixing fields is a programming error
// and panics. User-facing paths go through the checked_* methods.
macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar field mismatch")
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar field mismatch")
            }
        }
    };
}
scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { val, .. } => write!(f, "{val}"),
        }
    }
}

fn reduce_i64(n: i64, p: u64) -> u64 {
    let m = p as i128;
    let r = ((n as i128 % m) + m) % m;
    r as u64
}

fn mod_add(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128 + b as u128) % p as u128;
    s as u64
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact binomial coefficient `C(n, k)` as a big integer; zero for `k < 0`
/// or `k > n`. Multiplicative formula, no factorials.
pub fn binomial_big(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n, k)` reduced into the given field.
pub fn binomial_in_field(n: u64, k: i64, field: FieldSpec) -> Scalar {
    field.big_integer(&binomial_big(n, k))
}

/// The residue of `1/(i! (p-i)!)` mod `p`, the coefficient in the Steenrod
/// square `Sq D(a,b) = sum_i D^i(a) o D^{p-i}(b) / (i!(p-i)!)`. Equals
/// `C(p,i)/p` mod `p`.
pub fn steenrod_coefficient(i: u64, p: u64) -> Result<Scalar> {
    if i < 1 || i > p - 1 {
        return Err(Error::InvalidIndex { index: i as i64, lo: 1, hi: p as i64 - 1 });
    }
    let field = FieldSpec::PrimeField(p);
    let mut denom = field.one();
    for t in 2..=i {
        denom = &denom * &field.integer(t as i64);
    }
    for t in 2..=(p - i) {
        denom = &denom * &field.integer(t as i64);
    }
    denom.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn exact_fraction_arithmetic() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        let f5 = FieldSpec::prime_field(5).unwrap();
        assert_eq!(f5.integer(3).inv().unwrap(), f5.integer(2));
    }

    #[test]
    fn field_axioms_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [FieldSpec::Rationals, FieldSpec::PrimeField(5), FieldSpec::PrimeField(13)] {
            for _ in 0..200 {
                let a = random_scalar(&mut rng, field);
                let b = random_scalar(&mut rng, field);
                let c = random_scalar(&mut rng, field);
                assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                if !a.is_zero() {
                    assert!((&a * &a.inv().unwrap()).is_one());
                }
            }
        }
    }

    fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
        match field {
            FieldSpec::Rationals => q(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
            FieldSpec::PrimeField(p) => {
                Scalar::Mod { val: rng.gen_range(0..p), p }
            }
        }
    }

    #[test]
    fn mixed_fields_rejected() {
        let f5 = FieldSpec::PrimeField(5);
        assert!(matches!(q(1, 1).checked_add(&f5.one()), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn inv_zero_rejected() {
        assert!(matches!(q(0, 1).inv(), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn prime_validation() {
        assert!(FieldSpec::prime_field(2).is_ok());
        assert!(FieldSpec::prime_field(97).is_ok());
        assert!(FieldSpec::prime_field(1).is_err());
        assert!(FieldSpec::prime_field(91).is_err());
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(1_000_000_007u64 * 3));
    }

    #[test]
    fn binomial_examples() {
        let f5 = FieldSpec::PrimeField(5);
        assert_eq!(binomial_in_field(4, 1, f5), f5.integer(4));
        assert_eq!(binomial_in_field(7, 3, f5), f5.integer(0)); // 35 = 0 mod 5
        for n in [0u64, 3, 10, 100] {
            assert!(binomial_in_field(n, 0, FieldSpec::Rationals).is_one());
            assert!(binomial_in_field(n, -2, f5).is_zero());
            assert!(binomial_in_field(n, n as i64 + 1, f5).is_zero());
        }
    }

    /// Lucas' theorem: C(n,k) mod p is the digitwise product of base-p
    /// binomials. Independent oracle for the multiplicative-formula route.
    fn lucas(mut n: u64, mut k: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        while n > 0 || k > 0 {
            let (nd, kd) = (n % p, k % p);
            let digits = binomial_big(nd, kd as i64).to_u64_digits().1;
            let c = if digits.is_empty() { 0 } else { digits[0] % p };
            acc = acc * c % p;
            n /= p;
            k /= p;
        }
        acc
    }

    #[test]
    fn binomial_agrees_with_lucas() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [5u64, 7] {
            let field = FieldSpec::PrimeField(p);
            for _ in 0..500 {
                let n = rng.gen_range(0..p * p * p);
                let k = rng.gen_range(0..p * p * p);
                let via_formula = binomial_in_field(n, k as i64, field);
                assert_eq!(via_formula, field.integer(lucas(n, k, p) as i64), "C({n},{k}) mod {p}");
            }
        }
    }

    #[test]
    fn steenrod_coefficients() {
        // 1/(1!*4!) = 1/24 = 1/4 = 4 mod 5; 1/(2!*3!) = 1/12 = 1/2 = 3 mod 5.
        assert_eq!(steenrod_coefficient(1, 5).unwrap(), FieldSpec::PrimeField(5).integer(4));
        assert_eq!(steenrod_coefficient(2, 5).unwrap(), FieldSpec::PrimeField(5).integer(3));
        for p in [5u64, 7, 11] {
            for i in 1..p {
                assert_eq!(
                    steenrod_coefficient(i, p).unwrap(),
                    steenrod_coefficient(p - i, p).unwrap()
                );
                // C(p,i)/p = (p-1)!/(i!(p-i)!) = -1/(i!(p-i)!) by Wilson
                let c = binomial_big(p, i as i64) / BigInt::from(p);
                assert_eq!(
                    steenrod_coefficient(i, p).unwrap().neg(),
                    FieldSpec::PrimeField(p).big_integer(&c)
                );
            }
        }
        assert!(steenrod_coefficient(0, 5).is_err());
        assert!(steenrod_coefficient(5, 5).is_err());
    }

    #[test]
    fn scalar_text_round_trip() {
        let f5 = FieldSpec::PrimeField(5);
        for s in [q(-3, 7), q(4, 1), f5.integer(3), f5.integer(-1)] {
            let field = s.field();
            assert_eq!(field.parse(&s.to_string()).unwrap(), s);
        }
        assert!(FieldSpec::Rationals.parse("1/0").is_err());
        assert!(FieldSpec::Rationals.parse("x").is_err());
    }
}
