//! Exact coefficient arithmetic: F_p, Z/p^2, arbitrary-precision integers
//! and rationals. Residues are stored canonically in [0, modulus).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Ring tag. Arithmetic never silently mixes tags; cross-ring maps are
/// explicit operations (`lift_canonical`, `project_mod_p`, `divide_exact_by_p`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Ring {
    ModP(u64),
    ModPSq(u64),
    Rational,
    Integer,
}

impl Ring {
    pub fn modulus(&self) -> Option<u64> {
        match self {
            Ring::ModP(p) => Some(*p),
            Ring::ModPSq(p) => Some(p * p),
            _ => None,
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Ring::ModP(p) | Ring::ModPSq(p) => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::ModP(p) => write!(f, "Z/{}", p),
            Ring::ModPSq(p) => write!(f, "Z/{}^2", p),
            Ring::Rational => write!(f, "Q"),
            Ring::Integer => write!(f, "Z"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    ModP { p: u64, value: u64 },
    ModPSq { p: u64, value: u64 },
    Rational(BigRational),
    Integer(BigInt),
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    // extended Euclid; works for any modulus, needed for Z/p^2
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

fn bigint_mod(n: &BigInt, m: u64) -> u64 {
    let r = n % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    r.to_u64().expect("residue fits u64")
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::ModP { p, .. } => Ring::ModP(*p),
            Scalar::ModPSq { p, .. } => Ring::ModPSq(*p),
            Scalar::Rational(_) => Ring::Rational,
            Scalar::Integer(_) => Ring::Integer,
        }
    }

    pub fn zero(ring: Ring) -> Scalar {
        match ring {
            Ring::ModP(p) => Scalar::ModP { p, value: 0 },
            Ring::ModPSq(p) => Scalar::ModPSq { p, value: 0 },
            Ring::Rational => Scalar::Rational(BigRational::zero()),
            Ring::Integer => Scalar::Integer(BigInt::zero()),
        }
    }

    pub fn one(ring: Ring) -> Scalar {
        match ring {
            Ring::ModP(p) => Scalar::ModP { p, value: 1 % p },
            Ring::ModPSq(p) => Scalar::ModPSq { p, value: 1 },
            Ring::Rational => Scalar::Rational(BigRational::one()),
            Ring::Integer => Scalar::Integer(BigInt::one()),
        }
    }

    pub fn from_u64(ring: Ring, n: u64) -> Scalar {
        match ring {
            Ring::ModP(p) => Scalar::ModP { p, value: n % p },
            Ring::ModPSq(p) => Scalar::ModPSq { p, value: n % (p * p) },
            Ring::Rational => Scalar::Rational(BigRational::from(BigInt::from(n))),
            Ring::Integer => Scalar::Integer(BigInt::from(n)),
        }
    }

    pub fn from_i64(ring: Ring, n: i64) -> Scalar {
        match ring {
            Ring::ModP(p) => Scalar::ModP { p, value: (n as i128).rem_euclid(p as i128) as u64 },
            Ring::ModPSq(p) => {
                let m = (p * p) as i128;
                Scalar::ModPSq { p, value: (n as i128).rem_euclid(m) as u64 }
            }
            Ring::Rational => Scalar::Rational(BigRational::from(BigInt::from(n))),
            Ring::Integer => Scalar::Integer(BigInt::from(n)),
        }
    }

    /// Reduces an exact rational into the target ring. In a modular ring
    /// the denominator must be invertible, otherwise the prime is bad.
    pub fn from_rational(ring: Ring, q: &BigRational) -> Result<Scalar> {
        match ring {
            Ring::ModP(p) => {
                let num = bigint_mod(q.numer(), p);
                let den = bigint_mod(q.denom(), p);
                let inv = mod_inverse(den, p).ok_or(Error::BadPrime(p))?;
                Ok(Scalar::ModP { p, value: mulmod(num, inv, p) })
            }
            Ring::ModPSq(p) => {
                let m = p * p;
                let num = bigint_mod(q.numer(), m);
                let den = bigint_mod(q.denom(), m);
                let inv = mod_inverse(den, m).ok_or(Error::BadPrime(p))?;
                Ok(Scalar::ModPSq { p, value: mulmod(num, inv, m) })
            }
            Ring::Rational => Ok(Scalar::Rational(q.clone())),
            Ring::Integer => {
                if q.is_integer() {
                    Ok(Scalar::Integer(q.to_integer()))
                } else {
                    Err(Error::Parse(format!("{} is not an integer", q)))
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::ModP { value, .. } | Scalar::ModPSq { value, .. } => *value == 0,
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Integer(n) => n.is_zero(),
        }
    }

    fn check_same(&self, other: &Scalar) {
        assert_eq!(
            self.ring(),
            other.ring(),
            "scalar arithmetic must not mix rings"
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::ModP { p, value: a }, Scalar::ModP { value: b, .. }) => {
                Scalar::ModP { p: *p, value: addmod(*a, *b, *p) }
            }
            (Scalar::ModPSq { p, value: a }, Scalar::ModPSq { value: b, .. }) => {
                Scalar::ModPSq { p: *p, value: addmod(*a, *b, p * p) }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a + b),
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::ModP { p, value } => Scalar::ModP { p: *p, value: if *value == 0 { 0 } else { p - value } },
            Scalar::ModPSq { p, value } => {
                let m = p * p;
                Scalar::ModPSq { p: *p, value: if *value == 0 { 0 } else { m - value } }
            }
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Integer(n) => Scalar::Integer(-n),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::ModP { p, value: a }, Scalar::ModP { value: b, .. }) => {
                Scalar::ModP { p: *p, value: mulmod(*a, *b, *p) }
            }
            (Scalar::ModPSq { p, value: a }, Scalar::ModPSq { value: b, .. }) => {
                Scalar::ModPSq { p: *p, value: mulmod(*a, *b, p * p) }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a * b),
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::ModP { p, value } => {
                mod_inverse(*value, *p).map(|v| Scalar::ModP { p: *p, value: v })
            }
            Scalar::ModPSq { p, value } => {
                mod_inverse(*value, p * p).map(|v| Scalar::ModPSq { p: *p, value: v })
            }
            Scalar::Rational(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(Scalar::Rational(q.recip()))
                }
            }
            Scalar::Integer(n) => {
                if n.is_one() || (-n).is_one() {
                    Some(Scalar::Integer(n.clone()))
                } else {
                    None
                }
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.ring());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Residue for modular scalars.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::ModP { value, .. } | Scalar::ModPSq { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::ModP { value, .. } | Scalar::ModPSq { value, .. } => write!(f, "{}", value),
            Scalar::Rational(q) => write!(f, "{}", q),
            Scalar::Integer(n) => write!(f, "{}", n),
        }
    }
}

pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128 % m as u128) % m as u128) as u64
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Views a residue of F_p as its canonical representative in Z/p^2.
pub fn lift_canonical(x: &Scalar) -> Result<Scalar> {
    match x {
        Scalar::ModP { p, value } => Ok(Scalar::ModPSq { p: *p, value: *value }),
        other => Err(Error::RingMismatch(
            other.ring().to_string(),
            "F_p".into(),
        )),
    }
}

/// Reduction Z/p^2 -> F_p.
pub fn project_mod_p(x: &Scalar) -> Result<Scalar> {
    match x {
        Scalar::ModPSq { p, value } => Ok(Scalar::ModP { p: *p, value: value % p }),
        other => Err(Error::RingMismatch(
            other.ring().to_string(),
            "Z/p^2".into(),
        )),
    }
}

/// Exact division by p: Z/p^2 -> F_p. Failure signals that an upstream
/// input was not central.
pub fn divide_exact_by_p(x: &Scalar) -> Result<Scalar> {
    match x {
        Scalar::ModPSq { p, value } => {
            if value % p != 0 {
                Err(Error::NotDivisible(*value))
            } else {
                Ok(Scalar::ModP { p: *p, value: (value / p) % p })
            }
        }
        other => Err(Error::RingMismatch(
            other.ring().to_string(),
            "Z/p^2".into(),
        )),
    }
}

/// Parses "num/den" or "num" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {:?}", s)))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {:?}", s)))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {:?}", s)));
    }
    Ok(BigRational::new(n, d))
}

/// Odd primes dividing the denominator of `q` (the bad-prime contribution).
pub fn denominator_primes(q: &BigRational) -> Vec<u64> {
    let mut den = q.denom().abs().to_u64().unwrap_or(0);
    let mut out = Vec::new();
    if den == 0 {
        return out;
    }
    let mut d = 2u64;
    while d * d <= den {
        if den % d == 0 {
            out.push(d);
            while den % d == 0 {
                den /= d;
            }
        }
        d += 1;
    }
    if den > 1 {
        out.push(den);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
