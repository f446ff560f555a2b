//! Unit arithmetic in `Z/p^N Z` for an odd prime `p`.
//!
//! A [`PAdicApprox`] stands for a p-adic integer known modulo `p^N`. When `p`
//! splits completely in a number field, each completion at a prime above `p`
//! is `Q_p`, so elements of the field embed into this ring once square roots
//! of the defining radicands are lifted with [`hensel_sqrt`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("{a} is not a quadratic residue modulo {p}")]
    NonResidue { a: i64, p: u64 },
    #[error("value is divisible by p = {0}")]
    NotAUnit(u64),
    #[error("value is not congruent to 1 modulo p = {0}")]
    NotOneModP(u64),
}

/// Outcome of a valuation computed at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    /// The valuation is exactly this value (strictly below the precision).
    Exact(u32),
    /// The quantity vanishes modulo `p^N`; precision does not resolve it.
    Saturated,
}

impl Valuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::Saturated => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::Saturated => f.write_str("saturated"),
        }
    }
}

/// An element of `Z/p^N Z`.
///
/// Binary operators require both operands to share `p`; the result carries
/// the smaller of the two precisions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicApprox {
    p: u64,
    precision: u32,
    residue: BigUint,
    modulus: BigUint,
}

impl PAdicApprox {
    /// Reduces `value` modulo `p^precision`.
    pub fn new(p: u64, precision: u32, value: &BigInt) -> Result<Self, PadicError> {
        check_params(p, precision)?;
        Ok(Self::reduce(p, precision, value))
    }

    pub fn from_i64(p: u64, precision: u32, value: i64) -> Result<Self, PadicError> {
        Self::new(p, precision, &BigInt::from(value))
    }

    /// Caller guarantees `p` odd prime and `precision >= 1`.
    pub(crate) fn reduce(p: u64, precision: u32, value: &BigInt) -> Self {
        let modulus = BigUint::from(p).pow(precision);
        let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let residue = value.mod_floor(&m).to_biguint().expect("non-negative");
        Self {
            p,
            precision,
            residue,
            modulus,
        }
    }

    fn with_residue(&self, precision: u32, residue: BigUint) -> Self {
        if precision == self.precision {
            let residue = residue % &self.modulus;
            Self {
                residue,
                ..self.clone()
            }
        } else {
            let modulus = BigUint::from(self.p).pow(precision);
            Self {
                p: self.p,
                precision,
                residue: residue % &modulus,
                modulus,
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    /// `p^N`.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Reduces to a lower precision. `precision` is clamped to the current one.
    pub fn truncate(&self, precision: u32) -> Self {
        let precision = precision.clamp(1, self.precision);
        self.with_residue(precision, self.residue.clone())
    }

    /// `x^e mod p^N` by square-and-multiply.
    pub fn pow_mod(&self, e: u64) -> Self {
        let r = self.residue.modpow(&BigUint::from(e), &self.modulus);
        self.with_residue(self.precision, r)
    }

    /// Multiplicative inverse modulo `p^N`.
    pub fn inv_mod(&self) -> Result<Self, PadicError> {
        if (&self.residue % self.p).is_zero() {
            return Err(PadicError::NotAUnit(self.p));
        }
        let a = BigInt::from_biguint(Sign::Plus, self.residue.clone());
        let m = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        let egcd = a.extended_gcd(&m);
        debug_assert!(egcd.gcd.is_one());
        Ok(Self::reduce(self.p, self.precision, &egcd.x))
    }

    /// `v_p` of the residue; `Saturated` when the residue is zero.
    pub fn valuation(&self) -> Valuation {
        if self.residue.is_zero() {
            return Valuation::Saturated;
        }
        let mut v = 0;
        let mut r = self.residue.clone();
        let p = BigUint::from(self.p);
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                return Valuation::Exact(v);
            }
            r = q;
            v += 1;
        }
    }

    /// `v_p(x - 1)` for `x ≡ 1 (mod p)`, the depth of the congruence `x ≡ 1`.
    pub fn val_unit_minus_one(&self) -> Result<Valuation, PadicError> {
        if (&self.residue % self.p) != BigUint::one() % self.p {
            return Err(PadicError::NotOneModP(self.p));
        }
        let one = self.with_residue(self.precision, BigUint::one());
        Ok((self - &one).valuation())
    }

    fn assert_compatible(&self, other: &Self) -> u32 {
        assert_eq!(self.p, other.p, "PAdicApprox operands over different primes");
        self.precision.min(other.precision)
    }
}

fn check_params(p: u64, precision: u32) -> Result<(), PadicError> {
    if p == 2 || !is_prime(p) {
        return Err(PadicError::NotOddPrime(p));
    }
    if precision == 0 {
        return Err(PadicError::ZeroPrecision);
    }
    Ok(())
}

impl fmt::Debug for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.p, self.precision)
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a PAdicApprox> for &'a PAdicApprox {
    type Output = PAdicApprox;
    fn add(self, rhs: &PAdicApprox) -> PAdicApprox {
        let n = self.assert_compatible(rhs);
        let low = if n == self.precision { self } else { rhs };
        low.with_residue(n, &self.residue + &rhs.residue)
    }
}

impl<'a> Sub<&'a PAdicApprox> for &'a PAdicApprox {
    type Output = PAdicApprox;
    fn sub(self, rhs: &PAdicApprox) -> PAdicApprox {
        let n = self.assert_compatible(rhs);
        let low = if n == self.precision { self } else { rhs };
        let rhs_low = &rhs.residue % &low.modulus;
        let lhs_low = &self.residue % &low.modulus;
        let r = if lhs_low >= rhs_low {
            lhs_low - rhs_low
        } else {
            &low.modulus - (rhs_low - lhs_low)
        };
        low.with_residue(n, r)
    }
}

impl<'a> Mul<&'a PAdicApprox> for &'a PAdicApprox {
    type Output = PAdicApprox;
    fn mul(self, rhs: &PAdicApprox) -> PAdicApprox {
        let n = self.assert_compatible(rhs);
        let low = if n == self.precision { self } else { rhs };
        low.with_residue(n, &self.residue * &rhs.residue)
    }
}

impl Neg for &PAdicApprox {
    type Output = PAdicApprox;
    fn neg(self) -> PAdicApprox {
        if self.residue.is_zero() {
            return self.clone();
        }
        self.with_residue(self.precision, &self.modulus - &self.residue)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PAdicApprox> for PAdicApprox {
            type Output = PAdicApprox;
            fn $m(self, rhs: PAdicApprox) -> PAdicApprox {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PAdicApprox {
    type Output = PAdicApprox;
    fn neg(self) -> PAdicApprox {
        -&self
    }
}

/// Square root of the unit `a` modulo `p^n`.
///
/// The root is seeded by a search over `[1, p)` and lifted by Newton steps
/// that double the precision. Of the two roots, the one whose residue mod `p`
/// is smaller is returned; the other is `p^n - r`.
pub fn hensel_sqrt(a: i64, p: u64, n: u32) -> Result<PAdicApprox, PadicError> {
    check_params(p, n)?;
    let a_mod_p = a.rem_euclid(p as i64) as u64;
    if a_mod_p == 0 {
        return Err(PadicError::NotAUnit(p));
    }
    let seed = (1..=p / 2)
        .find(|&x| ((x as u128 * x as u128) % p as u128) as u64 == a_mod_p)
        .ok_or(PadicError::NonResidue { a, p })?;

    let target = BigInt::from(a);
    let mut root = PAdicApprox::reduce(p, 1, &BigInt::from(seed));
    let mut k = 1;
    while k < n {
        k = (2 * k).min(n);
        let r = PAdicApprox::reduce(p, k, &BigInt::from_biguint(Sign::Plus, root.residue));
        let a_k = PAdicApprox::reduce(p, k, &target);
        let two_r = &r + &r;
        let step = &(&(&r * &r) - &a_k) * &two_r.inv_mod().expect("root is a unit");
        root = &r - &step;
    }
    debug_assert_eq!((&root.residue % p).to_u64(), Some(seed));
    Ok(root)
}
