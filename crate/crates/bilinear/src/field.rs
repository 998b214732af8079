//! Exact arithmetic over the supported coefficient fields: the rationals,
//! prime fields GF(p) and real quadratic extensions Q(sqrt d).
//!
//! Scalars are kept in canonical form at all times (reduced fractions with a
//! positive denominator, residues in `[0, p)`), so structural equality is
//! value equality.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Rationals,
    PrimeField(u64),
    QuadraticExt(u64),
}

/// One of the supported coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec(Kind);

impl FieldSpec {
    pub fn rationals() -> FieldSpec {
        FieldSpec(Kind::Rationals)
    }

    /// GF(p). Fails unless `p` is prime.
    pub fn prime_field(p: u64) -> Result<FieldSpec> {
        if is_prime_u64(p) {
            Ok(FieldSpec(Kind::PrimeField(p)))
        } else {
            Err(Error::InvalidFieldSpec(format!("{p} is not prime")))
        }
    }

    /// Q(sqrt d). Fails unless `d` is square-free and greater than 1.
    pub fn quadratic_ext(d: u64) -> Result<FieldSpec> {
        if d > 1 && is_square_free(d) {
            Ok(FieldSpec(Kind::QuadraticExt(d)))
        } else {
            Err(Error::InvalidFieldSpec(format!(
                "{d} is not a square-free integer > 1"
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0, Kind::PrimeField(_))
    }

    /// The modulus, for prime fields.
    pub fn characteristic(&self) -> Option<u64> {
        match self.0 {
            Kind::PrimeField(p) => Some(p),
            _ => None,
        }
    }

    /// The radicand, for quadratic extensions.
    pub fn radicand(&self) -> Option<u64> {
        match self.0 {
            Kind::QuadraticExt(d) => Some(d),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self.0 {
            Kind::Rationals => Scalar::Rat(BigRational::zero()),
            Kind::PrimeField(p) => Scalar::Fp { value: 0, modulus: p },
            Kind::QuadraticExt(d) => Scalar::Quad {
                a: BigRational::zero(),
                b: BigRational::zero(),
                d,
            },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self.0 {
            Kind::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Kind::PrimeField(p) => Scalar::Fp {
                value: reduce_bigint_mod(&BigInt::from(n), p),
                modulus: p,
            },
            Kind::QuadraticExt(d) => Scalar::Quad {
                a: BigRational::from_integer(BigInt::from(n)),
                b: BigRational::zero(),
                d,
            },
        }
    }

    /// All field elements in ascending residue order. Finite fields only.
    pub fn enumerate(&self) -> Result<Vec<Scalar>> {
        match self.0 {
            Kind::PrimeField(p) => Ok((0..p)
                .map(|value| Scalar::Fp { value, modulus: p })
                .collect()),
            _ => Err(Error::InfiniteField),
        }
    }

    /// Number of elements, for finite fields.
    pub fn order(&self) -> Option<u64> {
        self.characteristic()
    }

    /// Parse a scalar written in the canonical grammar for this field.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let (s, used) = parse_scalar_prefix(text, 0, *self)?;
        if used != text.len() {
            return Err(Error::Parse {
                pos: used,
                expected: "end of scalar".into(),
            });
        }
        Ok(s)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Rationals => write!(f, "Q"),
            Kind::PrimeField(p) => write!(f, "GF({p})"),
            Kind::QuadraticExt(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

/// An exact field element. The representation is canonical, so derived
/// equality coincides with equality of field values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(BigRational),
    Fp { value: u64, modulus: u64 },
    Quad { a: BigRational, b: BigRational, d: u64 },
}

impl Scalar {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec(Kind::Rationals),
            Scalar::Fp { modulus, .. } => FieldSpec(Kind::PrimeField(*modulus)),
            Scalar::Quad { d, .. } => FieldSpec(Kind::QuadraticExt(*d)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { value, .. } => *value == 0,
            Scalar::Quad { a, b, .. } => a.is_zero() && b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { value, .. } => *value == 1,
            Scalar::Quad { a, b, .. } => a.is_one() && b.is_zero(),
        }
    }

    /// Rational scalar from a fraction of machine integers.
    pub fn rational(num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::Rat(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    /// Element a + b*sqrt(d) of Q(sqrt d).
    pub fn quadratic(spec: FieldSpec, a: BigRational, b: BigRational) -> Result<Scalar> {
        match spec.0 {
            Kind::QuadraticExt(d) => Ok(Scalar::Quad { a, b, d }),
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x + y)),
            (Scalar::Fp { value: x, modulus: p }, Scalar::Fp { value: y, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Fp {
                    value: add_mod(*x, *y, *p),
                    modulus: *p,
                })
            }
            (Scalar::Quad { a, b, d }, Scalar::Quad { a: a2, b: b2, d: d2 }) if d == d2 => {
                Ok(Scalar::Quad {
                    a: a + a2,
                    b: b + b2,
                    d: *d,
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Scalar> {
        Ok(match self {
            Scalar::Rat(x) => Scalar::Rat(-x),
            Scalar::Fp { value, modulus } => Scalar::Fp {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            Scalar::Quad { a, b, d } => Scalar::Quad {
                a: -a,
                b: -b,
                d: *d,
            },
        })
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x * y)),
            (Scalar::Fp { value: x, modulus: p }, Scalar::Fp { value: y, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Fp {
                    value: mul_mod(*x, *y, *p),
                    modulus: *p,
                })
            }
            (Scalar::Quad { a, b, d }, Scalar::Quad { a: a2, b: b2, d: d2 }) if d == d2 => {
                // (a + b r)(a2 + b2 r) = a a2 + d b b2 + (a b2 + b a2) r
                let rad = BigRational::from_integer(BigInt::from(*d));
                Ok(Scalar::Quad {
                    a: a * a2 + &rad * b * b2,
                    b: a * b2 + b * a2,
                    d: *d,
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(x) => Scalar::Rat(x.recip()),
            Scalar::Fp { value, modulus } => Scalar::Fp {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Quad { a, b, d } => {
                // 1/(a + b r) = (a - b r) / (a^2 - d b^2); the norm is nonzero
                // because d is square-free.
                let rad = BigRational::from_integer(BigInt::from(*d));
                let norm = a * a - &rad * b * b;
                Scalar::Quad {
                    a: a / &norm,
                    b: -(b / &norm),
                    d: *d,
                }
            }
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.checked_mul(&rhs.inv()?)
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar operands from the same field")
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.checked_neg().unwrap()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Fp { value, .. } => write!(f, "{value}"),
            Scalar::Quad { a, b, .. } => {
                if b.is_zero() {
                    write!(f, "{a}")
                } else if b.is_negative() {
                    write!(f, "{}-{}r", a, -b)
                } else {
                    write!(f, "{a}+{b}r")
                }
            }
        }
    }
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    (((a as u128) + (b as u128)) % (m as u128)) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % (m as u128)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set covers all of u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
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
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_square_free(mut n: u64) -> bool {
    let mut f = 2u64;
    while f.checked_mul(f).map_or(false, |sq| sq <= n) {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return false;
            }
        }
        f += 1;
    }
    true
}

fn reduce_bigint_mod(n: &BigInt, p: u64) -> u64 {
    use num_integer::Integer;
    let m = BigInt::from(p);
    let r = n.mod_floor(&m);
    let (_, digits) = r.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => unreachable!("residue fits in u64"),
    }
}

// ---------------------------------------------------------------------------
// scalar grammar
//
//   Q:         int | int '/' posint            (optional leading '-')
//   GF(p):     int                             (reduced mod p)
//   Q(sqrt d): rat | rat '+' rat 'r' | rat '-' rat 'r'
//
// No whitespace inside a scalar.
// ---------------------------------------------------------------------------

fn parse_digits(text: &str, pos: usize) -> Result<(BigInt, usize)> {
    let bytes = text.as_bytes();
    let start = pos;
    let mut end = pos;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::Parse {
            pos,
            expected: "digit".into(),
        });
    }
    let n: BigInt = text[start..end].parse().expect("digits parse as BigInt");
    Ok((n, end))
}

fn parse_int(text: &str, pos: usize) -> Result<(BigInt, usize)> {
    let bytes = text.as_bytes();
    if pos < bytes.len() && bytes[pos] == b'-' {
        let (n, end) = parse_digits(text, pos + 1)?;
        Ok((-n, end))
    } else {
        parse_digits(text, pos)
    }
}

fn parse_rat(text: &str, pos: usize) -> Result<(BigRational, usize)> {
    let (num, mut end) = parse_int(text, pos)?;
    let bytes = text.as_bytes();
    if end < bytes.len() && bytes[end] == b'/' {
        let (den, den_end) = parse_digits(text, end + 1)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        end = den_end;
        Ok((BigRational::new(num, den), end))
    } else {
        Ok((BigRational::from_integer(num), end))
    }
}

/// Parse a scalar starting at byte offset `pos`; returns the scalar and the
/// offset just past it. Consumes the longest valid form.
pub fn parse_scalar_prefix(text: &str, pos: usize, spec: FieldSpec) -> Result<(Scalar, usize)> {
    match spec.0 {
        Kind::Rationals => {
            let (r, end) = parse_rat(text, pos)?;
            Ok((Scalar::Rat(r), end))
        }
        Kind::PrimeField(p) => {
            let (n, end) = parse_int(text, pos)?;
            Ok((
                Scalar::Fp {
                    value: reduce_bigint_mod(&n, p),
                    modulus: p,
                },
                end,
            ))
        }
        Kind::QuadraticExt(d) => {
            let (a, end) = parse_rat(text, pos)?;
            // Longest match first: try the `rat ('+'|'-') rat 'r'` form.
            let bytes = text.as_bytes();
            if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
                let negate = bytes[end] == b'-';
                if let Ok((b, after_b)) = parse_digits_rat_for_quad(text, end + 1) {
                    if after_b < bytes.len() && bytes[after_b] == b'r' {
                        let b = if negate { -b } else { b };
                        return Ok((Scalar::Quad { a, b, d }, after_b + 1));
                    }
                }
            }
            Ok((
                Scalar::Quad {
                    a,
                    b: BigRational::zero(),
                    d,
                },
                end,
            ))
        }
    }
}

// The coefficient of r carries its sign via the joining '+'/'-', so it is an
// unsigned rational.
fn parse_digits_rat_for_quad(text: &str, pos: usize) -> Result<(BigRational, usize)> {
    let (num, mut end) = parse_digits(text, pos)?;
    let bytes = text.as_bytes();
    if end < bytes.len() && bytes[end] == b'/' {
        let (den, den_end) = parse_digits(text, end + 1)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        end = den_end;
        Ok((BigRational::new(num, den), end))
    } else {
        Ok((BigRational::from_integer(num), end))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    fn qs(d: u64) -> FieldSpec {
        FieldSpec::quadratic_ext(d).unwrap()
    }

    #[test]
    fn field_spec_validation() {
        assert!(FieldSpec::prime_field(4).is_err());
        assert!(FieldSpec::prime_field(1).is_err());
        assert!(FieldSpec::prime_field(2).is_ok());
        assert!(FieldSpec::prime_field(97).is_ok());
        assert!(FieldSpec::quadratic_ext(15).is_ok());
        assert!(FieldSpec::quadratic_ext(12).is_err()); // 4 | 12
        assert!(FieldSpec::quadratic_ext(1).is_err());
        assert!(q().is_finite() == false);
        assert!(gf(5).is_finite());
        assert!(!qs(15).is_finite());
    }

    #[test]
    fn rational_arithmetic() {
        let half = Scalar::rational(1, 2).unwrap();
        let third = Scalar::rational(1, 3).unwrap();
        let sum = half.checked_add(&third).unwrap();
        assert_eq!(sum, Scalar::rational(5, 6).unwrap());
    }

    #[test]
    fn gf5_inverse() {
        let three = gf(5).from_i64(3);
        assert_eq!(three.inv().unwrap(), gf(5).from_i64(2));
    }

    #[test]
    fn quad_conjugate_product() {
        // (1 + r)(1 - r) = 1 - 15 = -14 in Q(sqrt 15)
        let spec = qs(15);
        let one_plus = spec.parse_scalar("1+1r").unwrap();
        let one_minus = spec.parse_scalar("1-1r").unwrap();
        let prod = one_plus.checked_mul(&one_minus).unwrap();
        assert_eq!(prod, spec.from_i64(-14));
    }

    #[test]
    fn scalar_io_roundtrip_examples() {
        assert_eq!(q().parse_scalar("-3/2").unwrap(), Scalar::rational(-3, 2).unwrap());
        assert_eq!(gf(3).parse_scalar("4").unwrap(), gf(3).from_i64(1));
        let s = Scalar::quadratic(
            qs(15),
            BigRational::zero(),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        )
        .unwrap();
        assert_eq!(s.to_string(), "0+1/2r");
        assert_eq!(qs(15).parse_scalar("0+1/2r").unwrap(), s);
    }

    #[test]
    fn parse_rejects_trailing_garbage() {
        assert!(q().parse_scalar("1/0").is_err());
        assert!(q().parse_scalar("1x").is_err());
        assert!(q().parse_scalar("").is_err());
    }

    #[test]
    fn enumerate_prime_field() {
        let elems = gf(5).enumerate().unwrap();
        assert_eq!(elems.len(), 5);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(*e, gf(5).from_i64(i as i64));
        }
        assert_eq!(q().enumerate().unwrap_err(), Error::InfiniteField);
    }

    #[test]
    fn field_mismatch_is_reported() {
        let a = q().one();
        let b = gf(5).one();
        assert_eq!(a.checked_add(&b).unwrap_err(), Error::FieldMismatch);
        assert_eq!(q().zero().inv().unwrap_err(), Error::DivisionByZero);
    }

    fn sample_scalar(rng: &mut impl rand::Rng, spec: FieldSpec) -> Scalar {
        crate::sample::scalar(rng, spec)
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for spec in [q(), gf(2), gf(5), qs(15)] {
            for _ in 0..1000 {
                let x = sample_scalar(&mut rng, spec);
                let y = sample_scalar(&mut rng, spec);
                let z = sample_scalar(&mut rng, spec);
                // associativity and commutativity
                assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
                assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                assert_eq!(&x + &y, &y + &x);
                assert_eq!(&x * &y, &y * &x);
                // distributivity
                assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
                // inverse laws
                assert!((&x + &(-&x)).is_zero());
                if !x.is_zero() {
                    assert!((&x * &x.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn parse_format_roundtrip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for spec in [q(), gf(2), gf(7), qs(15)] {
            for _ in 0..1000 {
                let x = sample_scalar(&mut rng, spec);
                let printed = x.to_string();
                let parsed = spec.parse_scalar(&printed).unwrap();
                assert_eq!(parsed, x, "roundtrip failed for {printed}");
            }
        }
    }

    #[test]
    fn quad_norm_identity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let spec = qs(15);
        for _ in 0..200 {
            let x = sample_scalar(&mut rng, spec);
            if let Scalar::Quad { a, b, d } = &x {
                let conj = Scalar::Quad {
                    a: a.clone(),
                    b: -b,
                    d: *d,
                };
                let norm = x.checked_mul(&conj).unwrap();
                let rad = BigRational::from_integer(BigInt::from(*d));
                let expect = Scalar::Quad {
                    a: a * a - &rad * b * b,
                    b: BigRational::zero(),
                    d: *d,
                };
                assert_eq!(norm, expect);
            }
        }
    }
}
