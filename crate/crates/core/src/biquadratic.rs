//! The imaginary biquadratic field `K = Q(√−m, √d)`.
//!
//! Elements are written in the basis `{1, √d, √−m, √−g}` with `g = m·d` and
//! the fixed identification `√−g = √d·√−m`, over a common positive
//! denominator. Integrality is decided from the characteristic polynomial,
//! so no integral-basis case table is needed.
//!
//! When `p` splits completely, the four primes above `p` correspond to the
//! four ring homomorphisms `K → Z/p^N Z` obtained by choosing signs for the
//! lifted square roots of `d` and `−m`; see [`PrimeTag`] and
//! [`EmbeddingData`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{gcd, is_prime, is_squarefree};
use crate::padic::{hensel_sqrt, PAdicApprox, PadicError};
use crate::quadratic::{splits_completely, PellUnit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a positive squarefree integer")]
    NotSquarefree(i64),
    #[error("d must be at least 2, got {0}")]
    DegenerateRealField(i64),
    #[error("m = {m} and d = {d} are not coprime")]
    NotCoprime { m: i64, d: i64 },
    #[error("{p} does not split completely in Q(sqrt(-{m}), sqrt({d}))")]
    NotSplit { m: i64, d: i64, p: u64 },
}

/// `Q(√−m, √d)` with `m, d` positive, squarefree and coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Biquad {
    m: i64,
    d: i64,
    g: i64,
}

impl Biquad {
    pub fn new(m: i64, d: i64) -> Result<Self, FieldError> {
        if m < 1 || !is_squarefree(m) {
            return Err(FieldError::NotSquarefree(m));
        }
        if d < 1 || !is_squarefree(d) {
            return Err(FieldError::NotSquarefree(d));
        }
        if d < 2 {
            return Err(FieldError::DegenerateRealField(d));
        }
        if gcd(m, d) != 1 {
            return Err(FieldError::NotCoprime { m, d });
        }
        // m·d is squarefree for coprime squarefree m, d.
        Ok(Self { m, d, g: m * d })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Radicand of the third subfield `Q(√−g)`.
    pub fn g(&self) -> i64 {
        self.g
    }

    pub fn mul(&self, x: &KElement, y: &KElement) -> KElement {
        let [a1, b1, c1, e1] = &x.num;
        let [a2, b2, c2, e2] = &y.num;
        let (d, m, g) = (self.d, self.m, self.g);
        let a = a1 * a2 + b1 * b2 * d - c1 * c2 * m - e1 * e2 * g;
        let b = a1 * b2 + b1 * a2 - (c1 * e2 + e1 * c2) * m;
        let c = a1 * c2 + c1 * a2 + (b1 * e2 + e1 * b2) * d;
        let e = a1 * e2 + e1 * a2 + b1 * c2 + c1 * b2;
        KElement::from_parts([a, b, c, e], &x.den * &y.den)
    }

    pub fn pow(&self, x: &KElement, mut e: u64) -> KElement {
        let mut base = x.clone();
        let mut acc = KElement::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element, `x⁻¹ = (product of the other three
    /// conjugates) / N(x)`.
    pub fn inverse(&self, x: &KElement) -> Option<KElement> {
        let norm = self.abs_norm(x);
        if norm.is_zero() {
            return None;
        }
        let cofactor = self.mul(&self.mul(&x.conj_m(), &x.conj_d()), &x.conj_d().conj_m());
        Some(cofactor.scale(&norm.recip()))
    }

    /// `(t, n)` with `x` a root of `X² − tX + n` over `F = Q(√d)`: trace and
    /// norm of `x` relative to `F`, each as `(u, v)` meaning `u + v√d`.
    fn relative_trace_norm(&self, x: &KElement) -> ([BigRational; 2], [BigRational; 2]) {
        let den = &x.den;
        let t = [
            BigRational::new(&x.num[0] * 2, den.clone()),
            BigRational::new(&x.num[1] * 2, den.clone()),
        ];
        let n = self.mul(x, &x.conj_m());
        debug_assert!(n.num[2].is_zero() && n.num[3].is_zero());
        let n = [
            BigRational::new(n.num[0].clone(), n.den.clone()),
            BigRational::new(n.num[1].clone(), n.den.clone()),
        ];
        (t, n)
    }

    /// Characteristic polynomial of `x` over `Q`, as `[c0, c1, c2, c3]` for
    /// `X⁴ + c3·X³ + c2·X² + c1·X + c0`.
    pub fn char_poly(&self, x: &KElement) -> [BigRational; 4] {
        let d = BigRational::from_integer(self.d.into());
        let ([tu, tv], [nu, nv]) = self.relative_trace_norm(x);
        let two = BigRational::from_integer(2.into());
        let c3 = -(&two * &tu);
        let c2 = &tu * &tu - &d * &tv * &tv + &two * &nu;
        let c1 = -(&two * (&tu * &nu - &d * &tv * &nv));
        let c0 = &nu * &nu - &d * &nv * &nv;
        [c0, c1, c2, c3]
    }

    /// Exact product of the four conjugates.
    pub fn abs_norm(&self, x: &KElement) -> BigRational {
        let [c0, ..] = self.char_poly(x);
        c0
    }

    /// True iff `x` is an algebraic integer.
    pub fn is_integral(&self, x: &KElement) -> bool {
        if x.den.is_one() {
            return true;
        }
        self.char_poly(x).iter().all(|c| c.is_integer())
    }

    /// `Σ |σ(x)|²` over the four complex embeddings, the trace of `x·x̄`.
    pub fn t2_norm(&self, x: &KElement) -> BigRational {
        let (d, m, g) = (self.d, self.m, self.g);
        let [a, b, c, e] = &x.num;
        let q = a * a + b * b * d + c * c * m + e * e * g;
        BigRational::new(q * 4, &x.den * &x.den)
    }
}

/// A validated field together with an odd prime splitting completely in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldTriple {
    pub field: Biquad,
    pub p: u64,
}

impl FieldTriple {
    pub fn m(&self) -> i64 {
        self.field.m
    }
    pub fn d(&self) -> i64 {
        self.field.d
    }
    pub fn g(&self) -> i64 {
        self.field.g
    }
}

impl fmt::Display for FieldTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, d={}, p={})", self.m(), self.d(), self.p)
    }
}

pub fn make_triple(m: i64, d: i64, p: u64) -> Result<FieldTriple, FieldError> {
    if p == 2 {
        return Err(FieldError::EvenPrime);
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let field = Biquad::new(m, d)?;
    if !splits_completely(m, d, p) {
        return Err(FieldError::NotSplit { m, d, p });
    }
    Ok(FieldTriple { field, p })
}

/// `(a + b√d + c√−m + e√−g) / den` with `den > 0` and the five integers
/// coprime as a whole.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElement {
    num: [BigInt; 4],
    den: BigInt,
}

impl KElement {
    pub fn new(a: i64, b: i64, c: i64, e: i64, den: i64) -> Self {
        Self::from_parts([a.into(), b.into(), c.into(), e.into()], den.into())
    }

    pub fn from_parts(num: [BigInt; 4], den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut g = den.abs();
        for n in &num {
            g = g.gcd(n);
        }
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        let scale = &g * &sign;
        Self {
            num: num.map(|n| n / &scale),
            den: den / scale,
        }
    }

    pub fn integer(a: i64) -> Self {
        Self::new(a, 0, 0, 0, 1)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    /// The real quadratic unit `(X + Y√D)/2` where `D` is the fundamental
    /// discriminant of `Q(√d)`.
    pub fn from_quadratic_unit(unit: &PellUnit, disc: i64, d: i64) -> Self {
        let y = if disc == d { unit.y.clone() } else { &unit.y * 2 };
        Self::from_parts(
            [unit.x.clone(), y, BigInt::zero(), BigInt::zero()],
            BigInt::from(2),
        )
    }

    pub fn numerators(&self) -> &[BigInt; 4] {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// Complex conjugation: fixes `√d`, negates `√−m` and `√−g`.
    pub fn conj_m(&self) -> Self {
        let [a, b, c, e] = self.num.clone();
        Self {
            num: [a, b, -c, -e],
            den: self.den.clone(),
        }
    }

    /// The automorphism fixing `√−m` and negating `√d` (and `√−g`).
    pub fn conj_d(&self) -> Self {
        let [a, b, c, e] = self.num.clone();
        Self {
            num: [a, -b, c, -e],
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = std::array::from_fn(|i| &self.num[i] * &other.den + &other.num[i] * &self.den);
        Self::from_parts(num, &self.den * &other.den)
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.clone().map(|n| -n),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::from_parts(
            self.num.clone().map(|n| n * q.numer()),
            &self.den * q.denom(),
        )
    }

    /// `a,b,c,e,den`, the compact exchange form.
    pub fn to_compact(&self) -> String {
        let [a, b, c, e] = &self.num;
        format!("{a},{b},{c},{e},{}", self.den)
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = String::new();
        for (x, sym) in self.num.iter().zip(["", "√d", "√−m", "√−g"]) {
            if x.is_zero() {
                continue;
            }
            let mag = x.abs();
            let coef = if mag.is_one() && !sym.is_empty() { String::new() } else { mag.to_string() };
            let sep = match (terms.is_empty(), x.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            terms.push_str(&format!("{sep}{coef}{sym}"));
        }
        if terms.is_empty() {
            terms.push('0');
        }
        if self.den.is_one() {
            return f.write_str(&terms);
        }
        write!(f, "({terms})")?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected five comma-separated integers a,b,c,e,den with den != 0")]
pub struct ParseKElementError;

impl FromStr for KElement {
    type Err = ParseKElementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<BigInt> = s
            .split(',')
            .map(|t| t.trim().parse::<BigInt>())
            .collect::<Result<_, _>>()
            .map_err(|_| ParseKElementError)?;
        match <[BigInt; 5]>::try_from(parts) {
            Ok([a, b, c, e, den]) if !den.is_zero() => Ok(Self::from_parts([a, b, c, e], den)),
            _ => Err(ParseKElementError),
        }
    }
}

impl Serialize for KElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_compact())
    }
}

impl<'de> Deserialize<'de> for KElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One of the four primes of `K` above `p`, named by the signs applied to
/// the lifted roots of `d` and `−m`.
///
/// `sign_m = +1` fixes the prime `𝔭` of `Q(√−m)`; the two primes above it
/// form `S`, with [`PrimeTag::P`] as `𝔓` and [`PrimeTag::P_BAR`] as `𝔓̄`.
/// Flipping `sign_m` is complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeTag {
    pub sign_d: i8,
    pub sign_m: i8,
}

impl PrimeTag {
    pub const P: PrimeTag = PrimeTag { sign_d: 1, sign_m: 1 };
    pub const P_BAR: PrimeTag = PrimeTag { sign_d: -1, sign_m: 1 };
    pub const ALL: [PrimeTag; 4] = [
        PrimeTag { sign_d: 1, sign_m: 1 },
        PrimeTag { sign_d: -1, sign_m: 1 },
        PrimeTag { sign_d: 1, sign_m: -1 },
        PrimeTag { sign_d: -1, sign_m: -1 },
    ];
    pub const S: [PrimeTag; 2] = [Self::P, Self::P_BAR];

    pub fn complex_conjugate(self) -> Self {
        Self {
            sign_d: self.sign_d,
            sign_m: -self.sign_m,
        }
    }
}

impl fmt::Display for PrimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: i8| if x > 0 { '+' } else { '-' };
        write!(f, "({},{})", s(self.sign_d), s(self.sign_m))
    }
}

/// Lifted square roots defining the four embeddings `K → Z/p^N Z`.
#[derive(Debug, Clone)]
pub struct EmbeddingData {
    p: u64,
    precision: u32,
    root_d: PAdicApprox,
    root_negm: PAdicApprox,
    root_negg: PAdicApprox,
}

impl EmbeddingData {
    /// Lifts `√d` and `√−m`; `√−g` is their product, never lifted on its own.
    pub fn new(triple: &FieldTriple, precision: u32) -> Result<Self, PadicError> {
        let root_d = hensel_sqrt(triple.d(), triple.p, precision)?;
        let root_negm = hensel_sqrt(-triple.m(), triple.p, precision)?;
        let root_negg = &root_d * &root_negm;
        Ok(Self {
            p: triple.p,
            precision,
            root_d,
            root_negm,
            root_negg,
        })
    }

    /// Assembles embedding data from explicit roots without checking that
    /// they are coherent. Used to inject faults in self-checks.
    pub fn from_roots_unchecked(
        root_d: PAdicApprox,
        root_negm: PAdicApprox,
        root_negg: PAdicApprox,
    ) -> Self {
        Self {
            p: root_d.p(),
            precision: root_d.precision(),
            root_d,
            root_negm,
            root_negg,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn root_d(&self) -> &PAdicApprox {
        &self.root_d
    }

    pub fn root_negm(&self) -> &PAdicApprox {
        &self.root_negm
    }

    pub fn root_negg(&self) -> &PAdicApprox {
        &self.root_negg
    }

    /// True iff `√−g ≡ √d·√−m`, i.e. every tag gives a ring homomorphism.
    pub fn is_coherent(&self) -> bool {
        self.root_negg == &self.root_d * &self.root_negm
    }

    /// Image of `x` at the prime `tag`. Fails only when `p` divides the
    /// denominator of `x`.
    pub fn embed(&self, x: &KElement, tag: PrimeTag) -> Result<PAdicApprox, PadicError> {
        let lift = |v: &BigInt| PAdicApprox::reduce(self.p, self.precision, v);
        let signed = |r: &PAdicApprox, s: i8| if s > 0 { r.clone() } else { -r };
        let rd = signed(&self.root_d, tag.sign_d);
        let rm = signed(&self.root_negm, tag.sign_m);
        let rg = signed(&self.root_negg, tag.sign_d * tag.sign_m);
        let [a, b, c, e] = &x.num;
        let sum = &(&(&lift(a) + &(&lift(b) * &rd)) + &(&lift(c) * &rm)) + &(&lift(e) * &rg);
        Ok(&sum * &lift(&x.den).inv_mod()?)
    }
}

/// Convenience wrapper building the embedding data on the fly.
pub fn embed(
    triple: &FieldTriple,
    x: &KElement,
    tag: PrimeTag,
    precision: u32,
) -> Result<PAdicApprox, PadicError> {
    EmbeddingData::new(triple, precision)?.embed(x, tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn gaussian_sqrt2() -> Biquad {
        Biquad::new(1, 2).unwrap()
    }

    #[test]
    fn triple_validation() {
        let t = make_triple(1, 3, 13).unwrap();
        assert_eq!(t.g(), 3);
        assert_eq!(Biquad::new(2, 3).unwrap().g(), 6);
        assert_eq!(
            make_triple(6, 10, 13),
            Err(FieldError::NotCoprime { m: 6, d: 10 })
        );
        assert_eq!(make_triple(4, 3, 13), Err(FieldError::NotSquarefree(4)));
        assert_eq!(make_triple(1, 3, 2), Err(FieldError::EvenPrime));
        assert_eq!(make_triple(1, 3, 15), Err(FieldError::NotPrime(15)));
        assert_eq!(
            make_triple(1, 3, 7),
            Err(FieldError::NotSplit { m: 1, d: 3, p: 7 })
        );
        assert_eq!(make_triple(1, 1, 13), Err(FieldError::DegenerateRealField(1)));
    }

    #[test]
    fn embed_examples() {
        let t = make_triple(1, 3, 13).unwrap();
        let eps = KElement::new(2, 1, 0, 0, 1);
        let x = embed(&t, &eps, PrimeTag::P, 2).unwrap();
        assert_eq!(x.residue().to_u64(), Some(110));
        for tag in PrimeTag::ALL {
            assert_eq!(embed(&t, &KElement::one(), tag, 5).unwrap().residue().to_u64(), Some(1));
            // √d·√−m − √−g
            let rel = KElement::new(0, 0, 0, -1, 1)
                .add(&t.field.mul(&KElement::new(0, 1, 0, 0, 1), &KElement::new(0, 0, 1, 0, 1)));
            assert!(rel.is_zero());
            assert!(embed(&t, &rel, tag, 5).unwrap().is_zero());
        }
    }

    #[test]
    fn norm_examples() {
        let k = gaussian_sqrt2();
        // (2 + √2 + √−2)/2 = 1 + ζ₈
        assert_eq!(k.abs_norm(&KElement::new(2, 1, 0, 1, 2)), q(2));
        // 1 + 2ζ₈ = 1 + √2 + √−2, norm 1⁴ + 2⁴
        assert_eq!(k.abs_norm(&KElement::new(1, 1, 0, 1, 1)), q(17));
        assert_eq!(k.abs_norm(&KElement::one()), q(1));
        let k = Biquad::new(7, 5).unwrap();
        assert_eq!(k.abs_norm(&KElement::new(0, 1, 0, 0, 1)), q(25));
        assert_eq!(k.abs_norm(&KElement::new(0, 0, 1, 0, 1)), q(49));
        assert_eq!(k.abs_norm(&KElement::integer(3)), q(81));
    }

    #[test]
    fn integrality_examples() {
        let k = gaussian_sqrt2();
        assert!(k.is_integral(&KElement::new(2, 1, 0, 1, 2)));
        assert!(!k.is_integral(&KElement::new(1, 0, 0, 0, 2)));
        assert!(!k.is_integral(&KElement::new(1, 1, 0, 0, 2)));
        let k5 = Biquad::new(1, 5).unwrap();
        assert!(k5.is_integral(&KElement::new(1, 1, 0, 0, 2)));
        // all three subfields ≡ 1 mod 4: (1+√5)(1+√−3)/4 is integral
        let k = Biquad::new(3, 5).unwrap();
        assert!(k.is_integral(&KElement::new(1, 1, 1, 1, 4)));
        assert!(!k.is_integral(&KElement::new(1, 1, 1, 0, 4)));
    }

    #[test]
    fn t2_examples() {
        let k = gaussian_sqrt2();
        assert_eq!(k.t2_norm(&KElement::one()), q(4));
        assert_eq!(k.t2_norm(&KElement::new(0, 1, 0, 0, 1)), q(8));
        // 1 + ζ₈: embeddings 1 + ζ for the four primitive 8th roots
        let x = KElement::new(2, 1, 0, 1, 2);
        let float: f64 = [1.0f64, 3.0, 5.0, 7.0]
            .iter()
            .map(|k| {
                let th = k * std::f64::consts::PI / 4.0;
                (1.0 + th.cos()).powi(2) + th.sin().powi(2)
            })
            .sum();
        let exact = k.t2_norm(&x);
        let exact = exact.numer().to_f64().unwrap() / exact.denom().to_f64().unwrap();
        assert!((exact - float).abs() < 1e-9, "{exact} vs {float}");
        assert_eq!(k.t2_norm(&x), q(8));
    }

    #[test]
    fn inverse_and_pow() {
        let k = Biquad::new(1, 3).unwrap();
        let eps = KElement::new(2, 1, 0, 0, 1);
        let inv = k.inverse(&eps).unwrap();
        assert_eq!(inv, KElement::new(2, -1, 0, 0, 1));
        assert_eq!(k.mul(&eps, &inv), KElement::one());
        assert_eq!(k.pow(&eps, 2), KElement::new(7, 4, 0, 0, 1));
        assert!(k.inverse(&KElement::zero()).is_none());
    }

    #[test]
    fn compact_form_parses_back() {
        let x = KElement::new(2, 1, 0, 1, 2);
        assert_eq!(x.to_compact(), "2,1,0,1,2");
        assert_eq!("2,1,0,1,2".parse::<KElement>(), Ok(x));
        assert_eq!("4,2,0,2,-4".parse::<KElement>(), Ok(KElement::new(-2, -1, 0, -1, 2)));
        assert!("1,2,3".parse::<KElement>().is_err());
        assert!("1,2,3,4,0".parse::<KElement>().is_err());
    }

    #[test]
    fn unit_conversion() {
        let u = crate::quadratic::fundamental_unit(3).unwrap();
        assert_eq!(KElement::from_quadratic_unit(&u, 12, 3), KElement::new(2, 1, 0, 0, 1));
        let u = crate::quadratic::fundamental_unit(5).unwrap();
        assert_eq!(KElement::from_quadratic_unit(&u, 5, 5), KElement::new(1, 1, 0, 0, 2));
    }

    #[test]
    fn tag_conventions() {
        assert_eq!(PrimeTag::P.to_string(), "(+,+)");
        assert_eq!(PrimeTag::P_BAR.to_string(), "(-,+)");
        assert_eq!(PrimeTag::P.complex_conjugate(), PrimeTag { sign_d: 1, sign_m: -1 });
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(KElement::new(-4, -1, 0, -1, 2).to_string(), "(-4 - √d - √−g)/2");
        assert_eq!(KElement::new(1, 0, 3, 0, 1).to_string(), "1 + 3√−m");
        assert_eq!(KElement::zero().to_string(), "0");
    }
}
