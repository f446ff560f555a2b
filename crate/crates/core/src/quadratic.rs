//! Invariants of quadratic fields `Q(√d)`: Legendre symbols, fundamental
//! discriminants, class numbers by reduced binary quadratic forms, and the
//! fundamental unit of a real quadratic field via continued fractions.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, gcd, is_prime, is_squarefree, isqrt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("radicand {0} must be squarefree and different from 0 and 1")]
    BadRadicand(i64),
    #[error("real quadratic field needs a radicand > 1, got {0}")]
    NotReal(i64),
}

/// Fundamental unit `ε = (X + Y√D)/2 > 1` of a real quadratic field with
/// `X² − D·Y² = 4·norm_sign`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellUnit {
    #[serde(with = "bigint_string")]
    pub x: BigInt,
    #[serde(with = "bigint_string")]
    pub y: BigInt,
    pub norm_sign: i8,
}

impl PellUnit {
    /// Floating-point value of `ε`, for search radii only.
    pub fn approx_value(&self, disc: i64) -> f64 {
        let x: f64 = self.x.to_string().parse().unwrap_or(f64::INFINITY);
        let y: f64 = self.y.to_string().parse().unwrap_or(f64::INFINITY);
        (x + y * (disc as f64).sqrt()) / 2.0
    }
}

impl fmt::Display for PellUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√D)/2, norm {:+}", self.x, self.y, self.norm_sign)
    }
}

/// Discriminant, class number and (for real fields) fundamental unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadData {
    pub d: i64,
    pub disc: i64,
    pub h: u64,
    pub unit: Option<PellUnit>,
}

impl QuadData {
    pub fn compute(d: i64) -> Result<Self, QuadError> {
        let disc = fundamental_discriminant(d)?;
        if d < 0 {
            Ok(Self {
                d,
                disc,
                h: class_number_imag(disc)?,
                unit: None,
            })
        } else {
            let unit = fundamental_unit(d)?;
            let h = real_class_number_with_unit(disc, &unit);
            Ok(Self {
                d,
                disc,
                h,
                unit: Some(unit),
            })
        }
    }
}

/// Legendre symbol `(a|p)` for an odd prime `p`, via Euler's criterion.
pub fn kronecker(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2 && is_prime(p));
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let m = p as u128;
    let (mut base, mut e, mut acc) = (a as u128, (p - 1) / 2, 1u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// `d` if `d ≡ 1 (mod 4)`, else `4d`.
pub fn fundamental_discriminant(d: i64) -> Result<i64, QuadError> {
    if d == 1 || !is_squarefree(d) {
        return Err(QuadError::BadRadicand(d));
    }
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

pub fn is_fundamental(disc: i64) -> bool {
    if disc == 0 || disc == 1 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc),
        0 => {
            let k = disc / 4;
            matches!(k.rem_euclid(4), 2 | 3) && is_squarefree(k)
        }
        _ => false,
    }
}

/// Class number of the imaginary quadratic order of fundamental
/// discriminant `disc < 0`: the number of reduced forms `(a, b, c)` with
/// `|b| ≤ a ≤ c`, and `b ≥ 0` whenever `|b| = a` or `a = c`.
pub fn class_number_imag(disc: i64) -> Result<u64, QuadError> {
    if disc >= 0 || !is_fundamental(disc) {
        return Err(QuadError::NotFundamental(disc));
    }
    let n = disc.unsigned_abs();
    let a_max = isqrt(n / 3) as i64;
    let mut count = 0;
    for a in 1..=a_max {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            count += 1;
        }
    }
    Ok(count)
}

/// An indefinite binary quadratic form `ax² + bxy + cy²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Form {
    a: i64,
    b: i64,
    c: i64,
}

/// Reduced indefinite forms of discriminant `disc > 0` (non-square):
/// `0 < b < √D` and `√D − b < 2|a| < √D + b`.
fn reduced_indefinite_forms(disc: i64) -> Vec<Form> {
    let s = isqrt(disc as u64) as i64;
    let mut forms = Vec::new();
    let mut b = if (s - disc) % 2 == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (disc - b * b) / 4;
        for k in divisors(n as u64).into_iter().map(|k| k as i64) {
            let lo = (2 * k + b) * (2 * k + b) > disc;
            let hi = 2 * k - b <= 0 || (2 * k - b) * (2 * k - b) < disc;
            if !(lo && hi) {
                continue;
            }
            for (a, c) in [(k, -n / k), (-k, n / k)] {
                if gcd(gcd(a, b), c) == 1 {
                    forms.push(Form { a, b, c });
                }
            }
        }
        b -= 2;
    }
    forms
}

/// The reduction step `(a, b, c) ↦ (c, b', (b'² − D)/4c)` with
/// `b' ≡ −b (mod 2|c|)` and `√D − 2|c| < b' < √D`.
fn rho(f: Form, disc: i64, s: i64) -> Form {
    let two_c = 2 * f.c.abs();
    let b = s - (s + f.b).rem_euclid(two_c);
    Form {
        a: f.c,
        b,
        c: (b * b - disc) / (4 * f.c),
    }
}

/// Narrow class number `h⁺`: the number of ρ-cycles of reduced forms.
pub fn narrow_class_number(disc: i64) -> Result<u64, QuadError> {
    if disc <= 0 || !is_fundamental(disc) {
        return Err(QuadError::NotFundamental(disc));
    }
    let s = isqrt(disc as u64) as i64;
    let forms = reduced_indefinite_forms(disc);
    let all: HashSet<Form> = forms.iter().copied().collect();
    let mut seen = HashSet::with_capacity(forms.len());
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        loop {
            seen.insert(g);
            g = rho(g, disc, s);
            debug_assert!(all.contains(&g), "rho left the reduced set at {g:?}");
            if g == f {
                break;
            }
        }
    }
    Ok(cycles)
}

fn real_class_number_with_unit(disc: i64, unit: &PellUnit) -> u64 {
    let h_plus = narrow_class_number(disc).expect("fundamental discriminant");
    if unit.norm_sign < 0 {
        h_plus
    } else {
        h_plus / 2
    }
}

/// Wide class number of `Q(√d)`, `d > 1` squarefree.
pub fn class_number_real(d: i64) -> Result<u64, QuadError> {
    if d <= 1 {
        return Err(QuadError::NotReal(d));
    }
    let disc = fundamental_discriminant(d)?;
    let unit = fundamental_unit(d)?;
    Ok(real_class_number_with_unit(disc, &unit))
}

/// Fundamental unit of `Q(√d)`, `d > 1` squarefree.
///
/// Expands the reduced irrational `ξ = (P + √D)/2` (largest `P < √D` with
/// `P ≡ D mod 2`) with exact `(P, Q)` recurrences. Over one period of length
/// `ℓ` the unit is `q_{ℓ−1}·ξ + q_{ℓ−2}` with `q` the convergent
/// denominators, and its norm is `(−1)^ℓ`.
pub fn fundamental_unit(d: i64) -> Result<PellUnit, QuadError> {
    if d <= 1 {
        return Err(QuadError::NotReal(d));
    }
    let disc = fundamental_discriminant(d)?;
    let s = isqrt(disc as u64) as i64;
    let p0 = if (s - disc) % 2 == 0 { s } else { s - 1 };
    let q0 = 2i64;

    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (p0, q0);
    let mut period = 0u64;
    loop {
        let a = (p + s) / q;
        if period >= 1 {
            let next = &q_cur * a + &q_prev;
            q_prev = std::mem::replace(&mut q_cur, next);
        }
        let p_next = a * q - p;
        let q_next = (disc - p_next * p_next) / q;
        p = p_next;
        q = q_next;
        period += 1;
        if (p, q) == (p0, q0) {
            break;
        }
    }

    let x = &q_cur * p0 + &q_prev * 2;
    let y = q_cur;
    let norm_sign: i8 = if period.is_multiple_of(2) { 1 } else { -1 };
    debug_assert_eq!(
        &x * &x - &y * &y * disc,
        BigInt::from(4 * norm_sign as i64)
    );
    Ok(PellUnit { x, y, norm_sign })
}

/// True iff the odd prime `p` splits completely in `Q(√−m, √d)`.
pub fn splits_completely(m: i64, d: i64, p: u64) -> bool {
    if p == 2 || !is_prime(p) {
        return false;
    }
    let pi = p as i64;
    if m % pi == 0 || d % pi == 0 {
        return false;
    }
    kronecker(d, p) == 1 && kronecker(-m, p) == 1
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}
