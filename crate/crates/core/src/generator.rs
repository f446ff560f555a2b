//! Search for a generator `α` of a principal power `𝔓^t` of a prime above
//! `p`, by enumerating short vectors of the T2 form.
//!
//! Candidates live in the lattice `(1/4)·Z[√d, √−m, √−g]`, which contains
//! the maximal order. In that basis the T2 form is diagonal,
//! `T2(α) = (A² + d·B² + m·C² + g·E²)/4` for `α = (A + B√d + C√−m + E√−g)/4`,
//! so the Fincke–Pohst bounds reduce to nested ranges. The innermost
//! coordinate is further restricted by the congruence that puts `α` in the
//! target prime, which leaves only every `p^t`-th value of `A`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, isqrt};
use crate::biquadratic::{EmbeddingData, FieldTriple, KElement, PrimeTag};
use crate::padic::{PAdicApprox, Valuation};
use crate::quadratic::{fundamental_discriminant, PellUnit};

/// `(α) = 𝔓^t` for the prime `tag`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWitness {
    pub t: u32,
    pub alpha: KElement,
    pub tag: PrimeTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest exponent `t` tried.
    pub t_max: u32,
    /// Number of radii in the geometric schedule (each doubles the last).
    pub radius_steps: u32,
    /// Enumeration nodes allowed per exponent before giving up.
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            t_max: 64,
            radius_steps: 8,
            node_budget: 20_000_000,
        }
    }
}

/// How the search for one exponent ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttemptOutcome {
    Found,
    /// Every radius of the schedule enumerated without a hit.
    ScheduleExhausted,
    /// The node budget ran out.
    BudgetExhausted,
    /// `p^t` is too large for the congruence filter.
    ModulusTooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub t: u32,
    pub radii_tried: u32,
    pub nodes: u64,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSearch {
    pub witness: Option<GeneratorWitness>,
    /// One entry per exponent tried, in increasing `t`.
    pub attempts: Vec<Attempt>,
}

impl GeneratorSearch {
    pub fn summary(&self) -> String {
        self.attempts
            .iter()
            .map(|a| {
                let o = match a.outcome {
                    AttemptOutcome::Found => "found",
                    AttemptOutcome::ScheduleExhausted => "none",
                    AttemptOutcome::BudgetExhausted => "budget",
                    AttemptOutcome::ModulusTooLarge => "modulus",
                };
                format!("t={}:{}@{}", a.t, o, a.radii_tried)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Exponents to try: divisors of `class_bound` (a multiple of the order of
/// the class of `𝔓`), ascending, prime to `p`, at most `t_max`.
pub fn candidate_exponents(class_bound: u64, p: u64, t_max: u32) -> Vec<u32> {
    divisors(class_bound.max(1))
        .into_iter()
        .filter(|t| t % p != 0 && *t <= t_max as u64)
        .map(|t| t as u32)
        .collect()
}

/// Initial T2 radius `2·p^{t/2}·(ε + ε⁻¹)`: a generator balanced by a power
/// of `ε` has both pairs of conjugate absolute values within a factor `ε`.
pub fn initial_radius(p: u64, t: u32, eps: f64) -> f64 {
    2.0 * (p as f64).powf(t as f64 / 2.0) * (eps + eps.recip())
}

fn precision_for(t: u32) -> u32 {
    (t + 4).max(8)
}

/// Looks for `α` with `(α) = 𝔓^t` where `𝔓` is `tag`, trying each exponent of
/// [`candidate_exponents`] in turn.
pub fn find_generator(
    triple: &FieldTriple,
    tag: PrimeTag,
    class_bound: u64,
    unit: &PellUnit,
    config: &SearchConfig,
) -> GeneratorSearch {
    let disc = fundamental_discriminant(triple.d()).expect("validated radicand");
    let eps = unit.approx_value(disc);
    let mut attempts = Vec::new();
    for t in candidate_exponents(class_bound, triple.p, config.t_max) {
        let (witness, attempt) = search_exponent(triple, tag, t, eps, config);
        attempts.push(attempt);
        if let Some(w) = witness {
            return GeneratorSearch {
                witness: Some(w),
                attempts,
            };
        }
    }
    GeneratorSearch {
        witness: None,
        attempts,
    }
}

fn search_exponent(
    triple: &FieldTriple,
    tag: PrimeTag,
    t: u32,
    eps: f64,
    config: &SearchConfig,
) -> (Option<GeneratorWitness>, Attempt) {
    let mut attempt = Attempt {
        t,
        radii_tried: 0,
        nodes: 0,
        outcome: AttemptOutcome::ScheduleExhausted,
    };
    let Some(modulus) = (triple.p as u128).checked_pow(t).filter(|m| *m < 1 << 62) else {
        attempt.outcome = AttemptOutcome::ModulusTooLarge;
        return (None, attempt);
    };
    let emb = EmbeddingData::new(triple, precision_for(t)).expect("validated triple");
    let mut radius = initial_radius(triple.p, t, eps);
    for _ in 0..config.radius_steps.max(1) {
        attempt.radii_tried += 1;
        let bound = (4.0 * radius).floor();
        if !bound.is_finite() || bound > 1e17 {
            attempt.outcome = AttemptOutcome::BudgetExhausted;
            return (None, attempt);
        }
        let mut enumerator = Enumerator {
            triple,
            emb: &emb,
            tag,
            t,
            modulus,
            budget: config.node_budget,
            nodes: attempt.nodes,
            best: None,
        };
        let finished = enumerator.run(bound as u64);
        attempt.nodes = enumerator.nodes;
        if let Some((_, alpha)) = enumerator.best {
            attempt.outcome = AttemptOutcome::Found;
            return (Some(GeneratorWitness { t, alpha, tag }), attempt);
        }
        if !finished {
            attempt.outcome = AttemptOutcome::BudgetExhausted;
            return (None, attempt);
        }
        radius *= 2.0;
    }
    (None, attempt)
}

struct Enumerator<'a> {
    triple: &'a FieldTriple,
    emb: &'a EmbeddingData,
    tag: PrimeTag,
    t: u32,
    modulus: u128,
    budget: u64,
    nodes: u64,
    /// Smallest accepted candidate by `(Q, numerators)`.
    best: Option<(u64, KElement)>,
}

impl Enumerator<'_> {
    fn residue_at_tag(&self, root: &PAdicApprox, sign: i8) -> u128 {
        let r = (root.residue() % self.modulus).to_u128().expect("fits");
        if sign > 0 || r == 0 {
            r
        } else {
            self.modulus - r
        }
    }

    /// Enumerates all points with `A² + dB² + mC² + gE² ≤ bound`. Returns
    /// false if the node budget ran out.
    fn run(&mut self, bound: u64) -> bool {
        let (d, m, g) = (
            self.triple.d() as u64,
            self.triple.m() as u64,
            self.triple.g() as u64,
        );
        let md = self.modulus as i128;
        let rd = self.residue_at_tag(self.emb.root_d(), self.tag.sign_d) as i128;
        let rm = self.residue_at_tag(self.emb.root_negm(), self.tag.sign_m) as i128;
        let rg = self.residue_at_tag(self.emb.root_negg(), self.tag.sign_d * self.tag.sign_m) as i128;

        let e_max = isqrt(bound / g) as i64;
        for e in -e_max..=e_max {
            let rem_e = bound - g * (e * e) as u64;
            let c_max = isqrt(rem_e / m) as i64;
            for c in -c_max..=c_max {
                let rem_c = rem_e - m * (c * c) as u64;
                let b_max = isqrt(rem_c / d) as i64;
                for b in -b_max..=b_max {
                    self.nodes += 1;
                    if self.nodes > self.budget {
                        return false;
                    }
                    let rem_b = rem_c - d * (b * b) as u64;
                    let a_max = isqrt(rem_b) as i64;
                    // A ≡ −(B·√d + C·√−m + E·√−g) (mod p^t) at the tag.
                    let shift = (b as i128 * rd + c as i128 * rm + e as i128 * rg).rem_euclid(md);
                    let target = (-shift).rem_euclid(md);
                    let lo = -(a_max as i128);
                    let mut a = lo + (target - lo).rem_euclid(md);
                    while a <= a_max as i128 {
                        self.nodes += 1;
                        let q = (a * a) as u64 + (bound - rem_b);
                        self.consider(a as i64, b, c, e, q);
                        a += md;
                    }
                }
            }
        }
        true
    }

    fn consider(&mut self, a: i64, b: i64, c: i64, e: i64, q: u64) {
        if a == 0 && b == 0 && c == 0 && e == 0 {
            return;
        }
        if let Some((best_q, _)) = &self.best {
            if q > *best_q {
                return;
            }
        }
        if !norm_matches(self.triple, [a, b, c, e], self.modulus) {
            return;
        }
        let alpha = KElement::new(a, b, c, e, 4);
        if !accepts(self.triple, self.emb, &alpha, self.tag, self.t) {
            return;
        }
        let better = match &self.best {
            None => true,
            Some((best_q, best)) => (q, &alpha) < (*best_q, best),
        };
        if better {
            self.best = Some((q, alpha));
        }
    }
}

/// Cheap necessary condition `|N(X)| = 4⁴·p^t` for `α = X/4`, with
/// `N(X) = U² − d·V²` where `U + V√d` is the norm of `X` down to `Q(√d)`.
/// Overflow falls through to the exact check.
fn norm_matches(triple: &FieldTriple, x: [i64; 4], modulus: u128) -> bool {
    let [a, b, c, e] = x.map(i128::from);
    let (d, m) = (triple.d() as i128, triple.m() as i128);
    let norm = (|| {
        let u = a * a + d * b * b + m * (c * c + d * e * e);
        let v = 2 * (a * b + m * c * e);
        u.checked_mul(u)?.checked_sub(d.checked_mul(v.checked_mul(v)?)?)
    })();
    match norm {
        Some(n) => n.unsigned_abs() == 256 * modulus,
        None => true,
    }
}

/// Integral, `|N(α)| = p^t`, and valuation `t` at `tag` and `0` elsewhere,
/// with valuations read from `emb`.
fn accepts(triple: &FieldTriple, emb: &EmbeddingData, alpha: &KElement, tag: PrimeTag, t: u32) -> bool {
    let field = &triple.field;
    if !field.is_integral(alpha) {
        return false;
    }
    let target = BigRational::from_integer(BigInt::from(triple.p).pow(t));
    if field.abs_norm(alpha).abs() != target {
        return false;
    }
    PrimeTag::ALL.iter().all(|&other| {
        let Ok(x) = emb.embed(alpha, other) else {
            return false;
        };
        let want = if other == tag { t } else { 0 };
        x.valuation() == Valuation::Exact(want)
    })
}

/// Re-checks a witness from scratch at precision `2·precision`.
pub fn verify_witness(triple: &FieldTriple, w: &GeneratorWitness, precision: u32) -> bool {
    if w.t == 0 || (w.t as u64).is_multiple_of(triple.p) {
        return false;
    }
    let Ok(emb) = EmbeddingData::new(triple, precision.max(1) * 2) else {
        return false;
    };
    accepts(triple, &emb, &w.alpha, w.tag, w.t)
}
