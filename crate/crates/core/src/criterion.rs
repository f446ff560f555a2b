//! The certification criterion.
//!
//! Let `ε` be the fundamental unit of `F = Q(√d)` and `r` the exact
//! valuation of `ε^{p−1} − 1` at a prime above `p`. A unit `γ` of `K` is a
//! norm from the `n`-th layer of the tower iff `γ^{p−1} ≡ 1` modulo the
//! `(n+1)`-st power of the ramified prime, so the unit norm index at layer
//! `n` is `p^{max(0, n+1−r)}` on both the `K` and `F` sides. With `p ∤ h_K`:
//!
//! - `r = 1` certifies `μ = λ = 0` outright, since the norm hypothesis on the
//!   `(r−1)`-st layer is then a statement about `K` itself;
//! - `r = 2` certifies `μ = λ = 0` when a generator `α` of a principal power
//!   of `𝔓` satisfies `α^{p−1} ≢ 1 (mod 𝔓̄²)`;
//! - `r ≥ 3` is left inconclusive.
//!
//! `r` here is the exact valuation (the last exponent at which the
//! congruence holds), not the first exponent at which it holds, which would
//! always be 1.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::biquadratic::{make_triple, EmbeddingData, FieldError, FieldTriple, KElement, PrimeTag};
use crate::generator::{find_generator, verify_witness, SearchConfig};
use crate::padic::{hensel_sqrt, PAdicApprox, Valuation};
use crate::quadratic::{fundamental_discriminant, PellUnit, QuadData, QuadError};

/// `r` as resolved at some precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Exact(u32),
    /// Some tag still reads `ε^{p−1} ≡ 1 (mod p^N)` at precision `N`.
    SaturatedAt(u32),
    /// The four tags disagree; impossible for `ε_F`, reported rather than
    /// hidden.
    Inconsistent,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact(r) => write!(f, "{r}"),
            Depth::SaturatedAt(n) => write!(f, "saturated@{n}"),
            Depth::Inconsistent => f.write_str("inconsistent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceDepth {
    pub r: Depth,
    pub precision: u32,
    /// `v(ε^{p−1} − 1)` in the order of [`PrimeTag::ALL`].
    pub per_tag: [(PrimeTag, Valuation); 4],
}

impl CongruenceDepth {
    pub fn exact(&self) -> Option<u32> {
        match self.r {
            Depth::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn tags_agree(&self) -> bool {
        self.per_tag.iter().all(|(_, v)| *v == self.per_tag[0].1)
    }
}

fn unit_element(triple: &FieldTriple, unit: &PellUnit) -> KElement {
    let disc = fundamental_discriminant(triple.d()).expect("validated radicand");
    KElement::from_quadratic_unit(unit, disc, triple.d())
}

fn depth_from(values: &[Valuation], precision: u32) -> Depth {
    if values.contains(&Valuation::Saturated) {
        return Depth::SaturatedAt(precision);
    }
    match values.first() {
        Some(Valuation::Exact(r)) if values.iter().all(|v| *v == values[0]) => Depth::Exact(*r),
        _ => Depth::Inconsistent,
    }
}

/// `v(γ^{p−1} − 1)` at one tag; `γ` must be a unit there.
fn congruence_valuation(emb: &EmbeddingData, gamma: &KElement, tag: PrimeTag) -> Valuation {
    let x = emb.embed(gamma, tag).expect("denominator prime to p");
    x.pow_mod(emb.p() - 1)
        .val_unit_minus_one()
        .expect("Fermat: residue field is F_p")
}

/// `r` from the real fundamental unit, read at all four primes above `p`.
pub fn compute_r(triple: &FieldTriple, unit: &PellUnit, precision: u32) -> CongruenceDepth {
    let emb = EmbeddingData::new(triple, precision).expect("validated triple");
    let eps = unit_element(triple, unit);
    let per_tag = PrimeTag::ALL.map(|tag| (tag, congruence_valuation(&emb, &eps, tag)));
    let values: Vec<Valuation> = per_tag.iter().map(|(_, v)| *v).collect();
    CongruenceDepth {
        r: depth_from(&values, precision),
        precision,
        per_tag,
    }
}

/// Doubles the precision from `initial` until `r` resolves or `cap` is hit.
pub fn compute_r_escalating(
    triple: &FieldTriple,
    unit: &PellUnit,
    initial: u32,
    cap: u32,
) -> CongruenceDepth {
    let mut n = initial.clamp(1, cap.max(1));
    loop {
        let depth = compute_r(triple, unit, n);
        if !matches!(depth.r, Depth::SaturatedAt(_)) || n >= cap {
            return depth;
        }
        n = (n * 2).min(cap);
    }
}

/// Exponent `e` with `[E : N_n(K_n^*) ∩ E] = p^e`.
pub fn norm_index_exponent(n: u32, r: u32) -> u32 {
    assert!(r >= 1, "congruence depth is at least 1");
    (n + 1).saturating_sub(r)
}

/// Exponent of `p` in the order of the ambiguous class group of `K_n/K`,
/// from Chevalley's formula with two totally ramified primes of index `p^n`
/// in a degree `p^n` extension.
pub fn chevalley_p_exponent(n: u32, r: u32, a0: u32) -> u32 {
    a0 + 2 * n - n - norm_index_exponent(n, r)
}

/// Valuations of `ε^{p−1} − 1` through `F` alone, lifting only `√d`, at the
/// sign choices `+` and `−`.
pub fn quadratic_path_valuations(triple: &FieldTriple, unit: &PellUnit, precision: u32) -> [Valuation; 2] {
    let p = triple.p;
    let d = triple.d();
    let disc = fundamental_discriminant(d).expect("validated radicand");
    let root = hensel_sqrt(d, p, precision).expect("d is a residue");
    let two = PAdicApprox::from_i64(p, precision, 2).expect("valid prime");
    let half = two.inv_mod().expect("p odd");
    let x = PAdicApprox::new(p, precision, &unit.x).expect("valid prime");
    let y = PAdicApprox::new(p, precision, &unit.y).expect("valid prime");
    [1i8, -1].map(|sign| {
        let r = if sign > 0 { root.clone() } else { -&root };
        let sqrt_disc = if disc == d { r } else { &r * &two };
        let eps = &(&x + &(&y * &sqrt_disc)) * &half;
        eps.pow_mod(p - 1)
            .val_unit_minus_one()
            .expect("Fermat: residue field is F_p")
    })
}

/// Per-path comparison behind [`cross_check_l59`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L59Comparison {
    pub quartic: CongruenceDepth,
    pub quadratic: [Valuation; 2],
}

impl L59Comparison {
    pub fn agrees(&self) -> bool {
        self.quartic.per_tag.iter().all(|(tag, v)| {
            let idx = if tag.sign_d > 0 { 0 } else { 1 };
            *v == self.quadratic[idx]
        })
    }
}

pub fn compare_l59(triple: &FieldTriple, unit: &PellUnit, precision: u32) -> L59Comparison {
    L59Comparison {
        quartic: compute_r(triple, unit, precision),
        quadratic: quadratic_path_valuations(triple, unit, precision),
    }
}

/// True iff the quartic embeddings of `ε_F` and the direct embeddings of
/// `F` give the same congruence depth at every prime.
pub fn cross_check_l59(triple: &FieldTriple, unit: &PellUnit, precision: u32) -> bool {
    compare_l59(triple, unit, precision).agrees()
}

/// `v_{tag}(α^{p−1} − 1)`, or `None` if `α` is not a unit at `tag`.
pub fn alpha_condition(triple: &FieldTriple, alpha: &KElement, tag: PrimeTag, precision: u32) -> Option<Valuation> {
    let emb = EmbeddingData::new(triple, precision).ok()?;
    let x = emb.embed(alpha, tag).ok()?;
    x.pow_mod(triple.p - 1).val_unit_minus_one().ok()
}

/// Generators of the roots of unity of `K` beyond `±1`, together with `−1`.
pub fn torsion_generators(triple: &FieldTriple) -> Vec<KElement> {
    let (m, d) = (triple.m(), triple.d());
    let mut out = vec![KElement::integer(-1)];
    if m == 1 {
        out.push(KElement::new(0, 0, 1, 0, 1));
    }
    if m == 3 {
        out.push(KElement::new(-1, 0, 1, 0, 2));
    }
    if triple.g() == 3 {
        out.push(KElement::new(-1, 0, 0, 1, 2));
    }
    if (m, d) == (1, 2) {
        out.push(KElement::new(0, 1, 0, 1, 2));
    }
    out
}

/// Whether `α·ε^j·ζ` for `j ∈ −2..=2` and `ζ ∈ {1} ∪` [`torsion_generators`]
/// all agree with `α` on the condition `v_{𝔓̄}((·)^{p−1} − 1) = 1`.
pub fn unit_multiple_invariance(
    triple: &FieldTriple,
    alpha: &KElement,
    unit: &PellUnit,
    precision: u32,
) -> bool {
    let field = &triple.field;
    let eps = unit_element(triple, unit);
    let eps_inv = field.inverse(&eps).expect("unit");
    let holds = |x: &KElement| alpha_condition(triple, x, PrimeTag::P_BAR, precision) == Some(Valuation::Exact(1));
    let base = holds(alpha);
    let roots: Vec<KElement> = std::iter::once(KElement::one())
        .chain(torsion_generators(triple))
        .collect();
    (-2i32..=2).all(|j| {
        let factor = if j >= 0 {
            field.pow(&eps, j as u64)
        } else {
            field.pow(&eps_inv, (-j) as u64)
        };
        let shifted = field.mul(alpha, &factor);
        roots.iter().all(|z| holds(&field.mul(&shifted, z)) == base)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedZero,
    Inconclusive,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Route {
    #[serde(rename = "R1")]
    R1,
    #[serde(rename = "COROLLARY")]
    Corollary,
    #[serde(rename = "R_LARGE")]
    RLarge,
    #[serde(rename = "ALPHA_FAIL")]
    AlphaFail,
    #[serde(rename = "PRECISION")]
    Precision,
    #[serde(rename = "GENERATOR_FAIL")]
    GeneratorFail,
    #[serde(rename = "NOT_SPLIT")]
    NotSplit,
    #[serde(rename = "BAD_INPUT")]
    BadInput,
    #[serde(rename = "CLASS_DIVISIBLE")]
    ClassDivisible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedZero => "CERTIFIED_ZERO",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotApplicable => "NOT_APPLICABLE",
        }
    }
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::R1 => "R1",
            Route::Corollary => "COROLLARY",
            Route::RLarge => "R_LARGE",
            Route::AlphaFail => "ALPHA_FAIL",
            Route::Precision => "PRECISION",
            Route::GeneratorFail => "GENERATOR_FAIL",
            Route::NotSplit => "NOT_SPLIT",
            Route::BadInput => "BAD_INPUT",
            Route::ClassDivisible => "CLASS_DIVISIBLE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertConfig {
    pub initial_precision: u32,
    pub precision_cap: u32,
    pub search: SearchConfig,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            initial_precision: 9,
            precision_cap: 512,
            search: SearchConfig::default(),
        }
    }
}

/// Supplies class numbers and fundamental units of quadratic fields.
pub trait QuadSource {
    fn quad(&self, d: i64) -> Result<QuadData, QuadError>;
}

/// Computes every request from scratch.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectQuad;

impl QuadSource for DirectQuad {
    fn quad(&self, d: i64) -> Result<QuadData, QuadError> {
        QuadData::compute(d)
    }
}

/// Full verdict record for one `(m, d, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertReport {
    pub m: i64,
    pub d: i64,
    pub p: u64,
    pub triple: Option<FieldTriple>,
    pub h_m: Option<u64>,
    pub h_d: Option<u64>,
    pub h_g: Option<u64>,
    pub r: Option<CongruenceDepth>,
    pub t: Option<u32>,
    pub alpha: Option<KElement>,
    pub verdict: Verdict,
    pub route: Route,
    pub precision_used: u32,
    pub notes: String,
}

impl CertReport {
    fn new(m: i64, d: i64, p: u64) -> Self {
        Self {
            m,
            d,
            p,
            triple: None,
            h_m: None,
            h_d: None,
            h_g: None,
            r: None,
            t: None,
            alpha: None,
            verdict: Verdict::NotApplicable,
            route: Route::BadInput,
            precision_used: 0,
            notes: String::new(),
        }
    }

    fn finish(mut self, verdict: Verdict, route: Route, note: impl Into<String>) -> Self {
        self.verdict = verdict;
        self.route = route;
        let note = note.into();
        if !note.is_empty() {
            if !self.notes.is_empty() {
                self.notes.push_str("; ");
            }
            self.notes.push_str(&note);
        }
        self
    }

    fn note(&mut self, note: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
    }

    pub fn class_product(&self) -> Option<u64> {
        Some(self.h_m? * self.h_d? * self.h_g?)
    }

    pub fn r_value(&self) -> Option<u32> {
        self.r.as_ref().and_then(CongruenceDepth::exact)
    }
}

pub fn certify(m: i64, d: i64, p: u64, config: &CertConfig) -> CertReport {
    certify_with(m, d, p, config, &DirectQuad)
}

/// Runs the full pipeline: validation, class numbers, `r`, then the route
/// for `r`.
pub fn certify_with(m: i64, d: i64, p: u64, config: &CertConfig, quads: &dyn QuadSource) -> CertReport {
    let mut report = CertReport::new(m, d, p);
    let triple = match make_triple(m, d, p) {
        Ok(t) => t,
        Err(e @ FieldError::NotSplit { .. }) => {
            return report.finish(Verdict::NotApplicable, Route::NotSplit, e.to_string())
        }
        Err(e) => return report.finish(Verdict::NotApplicable, Route::BadInput, e.to_string()),
    };
    report.triple = Some(triple);

    let (qm, qd, qg) = match (quads.quad(-m), quads.quad(d), quads.quad(-triple.g())) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            return report.finish(Verdict::NotApplicable, Route::BadInput, e.to_string())
        }
    };
    report.h_m = Some(qm.h);
    report.h_d = Some(qd.h);
    report.h_g = Some(qg.h);
    let class_product = qm.h * qd.h * qg.h;
    if class_product % p == 0 {
        return report.finish(
            Verdict::NotApplicable,
            Route::ClassDivisible,
            format!("p divides h_m*h_d*h_g = {class_product}"),
        );
    }
    let unit = qd.unit.expect("real quadratic data carries a unit");

    let depth = compute_r_escalating(&triple, &unit, config.initial_precision, config.precision_cap);
    report.precision_used = depth.precision;
    let r = depth.r;
    report.r = Some(depth);
    let r = match r {
        Depth::Exact(r) => r,
        Depth::SaturatedAt(n) => {
            return report.finish(
                Verdict::Inconclusive,
                Route::Precision,
                format!("eps^(p-1) = 1 mod p^{n} at the precision cap"),
            )
        }
        Depth::Inconsistent => {
            return report.finish(
                Verdict::Inconclusive,
                Route::Precision,
                "per-tag congruence depths disagree",
            )
        }
    };

    match r {
        1 => report.finish(Verdict::CertifiedZero, Route::R1, ""),
        2 => corollary_route(report, &triple, &unit, class_product, config),
        _ => report.finish(Verdict::Inconclusive, Route::RLarge, format!("r = {r}")),
    }
}

fn corollary_route(
    mut report: CertReport,
    triple: &FieldTriple,
    unit: &PellUnit,
    class_product: u64,
    config: &CertConfig,
) -> CertReport {
    let search = find_generator(triple, PrimeTag::P, class_product, unit, &config.search);
    report.note(format!("P={} Pbar={}", PrimeTag::P, PrimeTag::P_BAR));
    report.note(format!("search {}", search.summary()));
    let Some(witness) = search.witness else {
        return report.finish(Verdict::Inconclusive, Route::GeneratorFail, "");
    };
    report.t = Some(witness.t);
    report.alpha = Some(witness.alpha.clone());
    let precision = report.precision_used.max(witness.t + 4);
    if !verify_witness(triple, &witness, precision) {
        return report.finish(Verdict::Inconclusive, Route::GeneratorFail, "witness failed re-check");
    }

    let at_pbar = alpha_condition(triple, &witness.alpha, PrimeTag::P_BAR, precision);
    // conj_d(α) generates the other prime of S; read it at 𝔓.
    let mirror = alpha_condition(triple, &witness.alpha.conj_d(), PrimeTag::P, precision);
    let show = |v: Option<Valuation>| v.map_or("n/a".to_string(), |v| v.to_string());
    report.note(format!("v_Pbar(alpha^(p-1)-1)={} mirror={}", show(at_pbar), show(mirror)));

    if at_pbar != Some(Valuation::Exact(1)) {
        return report.finish(Verdict::Inconclusive, Route::AlphaFail, "");
    }
    if !unit_multiple_invariance(triple, &witness.alpha, unit, precision) {
        return report.finish(
            Verdict::Inconclusive,
            Route::AlphaFail,
            "alpha condition not invariant under unit multiples",
        );
    }
    report.finish(Verdict::CertifiedZero, Route::Corollary, "")
}

/// Post-hoc soundness audit of a report. Re-derives the facts a
/// `CERTIFIED_ZERO` verdict depends on; other verdicts only need a
/// consistent route.
pub fn audit_report(report: &CertReport) -> Result<(), String> {
    let allowed: &[Route] = match report.verdict {
        Verdict::CertifiedZero => &[Route::R1, Route::Corollary],
        Verdict::Inconclusive => &[
            Route::RLarge,
            Route::AlphaFail,
            Route::Precision,
            Route::GeneratorFail,
        ],
        Verdict::NotApplicable => &[Route::NotSplit, Route::BadInput, Route::ClassDivisible],
    };
    if !allowed.contains(&report.route) {
        return Err(format!("route {} not allowed for {}", report.route, report.verdict));
    }
    if report.verdict != Verdict::CertifiedZero {
        return Ok(());
    }
    let triple = make_triple(report.m, report.d, report.p).map_err(|e| e.to_string())?;
    let hs = [
        QuadData::compute(-report.m),
        QuadData::compute(report.d),
        QuadData::compute(-triple.g()),
    ];
    let mut product = 1u64;
    for (h, claimed) in hs.iter().zip([report.h_m, report.h_d, report.h_g]) {
        let h = h.as_ref().map_err(|e| e.to_string())?.h;
        if Some(h) != claimed {
            return Err(format!("class number mismatch: {h} vs {claimed:?}"));
        }
        product *= h;
    }
    if product.is_multiple_of(report.p) {
        return Err("p divides the class number product".into());
    }
    let unit = hs[1].as_ref().unwrap().unit.clone().expect("real field");
    let r = report.r_value().ok_or("missing r")?;
    let recomputed = compute_r(&triple, &unit, report.precision_used.max(r + 1));
    if recomputed.exact() != Some(r) {
        return Err(format!("r recomputes to {}", recomputed.r));
    }
    match (report.route, r) {
        (Route::R1, 1) => Ok(()),
        (Route::Corollary, 2) => {
            let alpha = report.alpha.clone().ok_or("missing alpha")?;
            let t = report.t.ok_or("missing t")?;
            let w = crate::generator::GeneratorWitness {
                t,
                alpha: alpha.clone(),
                tag: PrimeTag::P,
            };
            if !verify_witness(&triple, &w, t + 4) {
                return Err("witness does not verify".into());
            }
            if alpha_condition(&triple, &alpha, PrimeTag::P_BAR, t + 4) != Some(Valuation::Exact(1)) {
                return Err("alpha condition fails".into());
            }
            Ok(())
        }
        (route, r) => Err(format!("route {route} inconsistent with r = {r}")),
    }
}

/// `|N(α)|` as an integer, for display.
pub fn abs_norm_integer(triple: &FieldTriple, alpha: &KElement) -> Option<BigInt> {
    let n = triple.field.abs_norm(alpha).abs();
    n.denom().is_one().then(|| n.numer().clone())
}

/// `p`-adic valuation of a positive integer.
pub fn p_valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.sign() == num_bigint::Sign::NoSign {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).to_u64() == Some(0) {
        n /= &p;
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::fundamental_unit;

    #[test]
    fn r_for_desk_example() {
        let t = make_triple(1, 3, 13).unwrap();
        let u = fundamental_unit(3).unwrap();
        let depth = compute_r(&t, &u, 4);
        assert_eq!(depth.r, Depth::Exact(1));
        assert!(depth.per_tag.iter().all(|(_, v)| *v == Valuation::Exact(1)));
        assert_eq!(compute_r(&t, &u, 1).r, Depth::SaturatedAt(1));
        assert_eq!(compute_r(&t, &u, 8).r, Depth::Exact(1));
        // the two sign_d choices: 110^12 ≡ 14 and 63^12 ≡ 157 (mod 169)
        let emb = EmbeddingData::new(&t, 2).unwrap();
        let eps = KElement::new(2, 1, 0, 0, 1);
        let plus = emb.embed(&eps, PrimeTag::P).unwrap().pow_mod(12);
        let minus = emb.embed(&eps, PrimeTag::P_BAR).unwrap().pow_mod(12);
        assert_eq!(plus.residue().to_u64(), Some(14));
        assert_eq!(minus.residue().to_u64(), Some(157));
    }

    #[test]
    fn escalation_resolves() {
        let t = make_triple(1, 3, 13).unwrap();
        let u = fundamental_unit(3).unwrap();
        let depth = compute_r_escalating(&t, &u, 1, 64);
        assert_eq!(depth.r, Depth::Exact(1));
        assert_eq!(depth.precision, 2);
        let capped = compute_r_escalating(&t, &u, 1, 1);
        assert_eq!(capped.r, Depth::SaturatedAt(1));
    }

    #[test]
    fn norm_index_examples() {
        assert_eq!(norm_index_exponent(0, 1), 0);
        assert_eq!(norm_index_exponent(3, 2), 2);
        assert_eq!(norm_index_exponent(1, 4), 0);
    }

    #[test]
    fn chevalley_examples() {
        assert_eq!(chevalley_p_exponent(5, 1, 0), 0);
        assert_eq!(chevalley_p_exponent(0, 7, 3), 3);
        assert_eq!(chevalley_p_exponent(4, 2, 0), 1);
    }

    #[test]
    fn l59_examples() {
        let t = make_triple(1, 3, 13).unwrap();
        assert!(cross_check_l59(&t, &fundamental_unit(3).unwrap(), 8));
        let t = make_triple(1, 2, 17).unwrap();
        assert!(cross_check_l59(&t, &fundamental_unit(2).unwrap(), 8));
    }

    #[test]
    fn certify_examples() {
        let cfg = CertConfig::default();
        let r = certify(1, 3, 13, &cfg);
        assert_eq!((r.verdict, r.route), (Verdict::CertifiedZero, Route::R1));
        assert_eq!((r.h_m, r.h_d, r.h_g), (Some(1), Some(1), Some(1)));
        assert_eq!(r.r_value(), Some(1));
        audit_report(&r).unwrap();

        let r = certify(1, 3, 7, &cfg);
        assert_eq!((r.verdict, r.route), (Verdict::NotApplicable, Route::NotSplit));

        let r = certify(23, 7, 3, &cfg);
        assert_eq!((r.verdict, r.route), (Verdict::NotApplicable, Route::ClassDivisible));
        assert_eq!(r.h_m, Some(3));

        let r = certify(4, 3, 13, &cfg);
        assert_eq!((r.verdict, r.route), (Verdict::NotApplicable, Route::BadInput));
        let r = certify(1, 3, 2, &cfg);
        assert_eq!(r.route, Route::BadInput);
    }

    #[test]
    fn audit_rejects_forged_reports() {
        let cfg = CertConfig::default();
        let mut r = certify(1, 3, 13, &cfg);
        r.route = Route::NotSplit;
        assert!(audit_report(&r).is_err());
        let mut r = certify(1, 3, 13, &cfg);
        r.h_d = Some(2);
        assert!(audit_report(&r).is_err());
        let mut r = certify(1, 3, 7, &cfg);
        r.verdict = Verdict::CertifiedZero;
        r.route = Route::R1;
        assert!(audit_report(&r).is_err());
    }

    #[test]
    fn p_valuations() {
        assert_eq!(p_valuation(&BigInt::from(17 * 17 * 3), 17), Some(2));
        assert_eq!(p_valuation(&BigInt::from(0), 17), None);
    }

    #[test]
    fn torsion_generators_are_roots_of_unity() {
        for (m, d, p) in [(1, 2, 17), (3, 7, 19), (1, 3, 13), (2, 3, 73)] {
            let t = make_triple(m, d, p).unwrap();
            for z in torsion_generators(&t) {
                assert_eq!(t.field.pow(&z, 24), KElement::one(), "{z} in {t}");
            }
        }
        assert_eq!(torsion_generators(&make_triple(1, 2, 17).unwrap()).len(), 3);
    }
}
