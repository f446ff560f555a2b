//! Self-check suites: each recomputes a family of invariants through an
//! independent route and reports every offending input.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::scan::scan_tasks;
use crate::arith::{is_squarefree, isqrt, odd_primes_up_to};
use crate::biquadratic::{make_triple, Biquad, EmbeddingData, FieldTriple, KElement, PrimeTag};
use crate::criterion::{chevalley_p_exponent, compare_l59, compute_r_escalating};
use crate::padic::{hensel_sqrt, PAdicApprox, PadicError, Valuation};
use crate::quadratic::{
    class_number_imag, class_number_real, fundamental_discriminant, fundamental_unit, is_fundamental,
    kronecker, QuadData,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    /// Reduced-form class numbers against the analytic class number formula.
    Classno,
    /// Fundamental units against brute-force Pell search.
    Pell,
    /// Randomized Hensel square roots.
    Hensel,
    /// Ring-homomorphism and norm compatibility of the four embeddings.
    Embed,
    /// Quartic vs. quadratic congruence depth of the real unit.
    L59,
    /// Agreement of the congruence depth across the four primes.
    Rtags,
    /// Monotonicity and stabilization of the ambiguous class exponent.
    Chevalley,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Classno,
        Suite::Pell,
        Suite::Hensel,
        Suite::Embed,
        Suite::L59,
        Suite::Rtags,
        Suite::Chevalley,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Classno => "classno",
            Suite::Pell => "pell",
            Suite::Hensel => "hensel",
            Suite::Embed => "embed",
            Suite::L59 => "l59",
            Suite::Rtags => "rtags",
            Suite::Chevalley => "chevalley",
        };
        f.write_str(s)
    }
}

/// Deliberate defects for exercising the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Negate the lifted `√−g`, breaking `√−g = √d·√−m`.
    NeggSign,
}

#[derive(Debug, Clone)]
pub struct SelfcheckConfig {
    pub m_max: i64,
    pub d_max: i64,
    pub p_max: u64,
    pub only: Option<Suite>,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        Self {
            m_max: 20,
            d_max: 20,
            p_max: 100,
            only: None,
            fault: None,
            seed: 0x1d5e_a5a1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_selfcheck(cfg: &SelfcheckConfig) -> Vec<SuiteResult> {
    let suites: Vec<Suite> = match cfg.only {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let triples: Vec<FieldTriple> = scan_tasks(cfg.m_max, cfg.d_max, cfg.p_max)
        .into_iter()
        .map(|(m, d, p)| make_triple(m, d, p).expect("scan tasks are valid"))
        .collect();
    suites
        .into_iter()
        .map(|suite| match suite {
            Suite::Classno => classno_suite(500, cfg.d_max.max(100)),
            Suite::Pell => pell_suite(100, 10_000),
            Suite::Hensel => hensel_suite(200, 10_000, 64, cfg.seed),
            Suite::Embed => embed_suite(&triples, 5, 32, cfg.seed, cfg.fault),
            Suite::L59 => l59_suite(&triples),
            Suite::Rtags => rtags_suite(&triples),
            Suite::Chevalley => chevalley_suite(6, 3, 20),
        })
        .collect()
}

/// Kronecker character `χ_D(a)` for `a > 0`, by factoring `a`.
pub fn kronecker_character(disc: i64, a: u64) -> i32 {
    let mut a = a;
    let mut chi = 1i32;
    let mut q = 2u64;
    while a > 1 {
        if q * q > a {
            q = a;
        }
        while a.is_multiple_of(q) {
            a /= q;
            let s = if q == 2 {
                match disc.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                kronecker(disc, q) as i32
            };
            chi *= s;
        }
        q += 1;
    }
    chi
}

/// `h(D)` for `D < 0` from `h = w/(2|D|)·|Σ_{a=1}^{|D|} χ_D(a)·a|`, or `None`
/// if the division is not exact.
pub fn analytic_class_number_imag(disc: i64) -> Option<u64> {
    let n = disc.unsigned_abs();
    let w: i64 = match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let sum: i64 = (1..=n).map(|a| kronecker_character(disc, a) as i64 * a as i64).sum();
    let num = w * sum.abs();
    let den = 2 * n as i64;
    (num % den == 0).then(|| (num / den) as u64)
}

/// `h(D)` for `D > 0` from `h·log ε = −½·Σ_{a<D} χ_D(a)·log sin(πa/D)`,
/// rounded; `None` if the value is not within `1e-6` of an integer.
pub fn analytic_class_number_real(d: i64) -> Option<u64> {
    let disc = fundamental_discriminant(d).ok()?;
    let unit = fundamental_unit(d).ok()?;
    let log_eps = unit.approx_value(disc).ln();
    let n = disc as u64;
    let s: f64 = (1..n)
        .map(|a| {
            let chi = kronecker_character(disc, a) as f64;
            chi * (std::f64::consts::PI * a as f64 / n as f64).sin().ln()
        })
        .sum();
    let h = -0.5 * s / log_eps;
    ((h - h.round()).abs() < 1e-6 && h.round() >= 1.0).then(|| h.round() as u64)
}

pub fn classno_suite(neg_bound: i64, real_bound: i64) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Classno);
    for disc in (-neg_bound..0).filter(|&d| is_fundamental(d)) {
        let forms = class_number_imag(disc).ok();
        let analytic = analytic_class_number_imag(disc);
        res.check(forms.is_some() && forms == analytic, || {
            format!("D={disc}: forms {forms:?} vs analytic {analytic:?}")
        });
    }
    for d in (2..=real_bound).filter(|&d| is_squarefree(d)) {
        let cycles = class_number_real(d).ok();
        let analytic = analytic_class_number_real(d);
        res.check(cycles.is_some() && cycles == analytic, || {
            format!("d={d}: cycles {cycles:?} vs analytic {analytic:?}")
        });
        let q = QuadData::compute(d).expect("squarefree");
        let unit = q.unit.expect("real");
        let h_plus = crate::quadratic::narrow_class_number(q.disc).expect("fundamental");
        let parity_ok = if unit.norm_sign < 0 {
            h_plus == q.h
        } else {
            h_plus == 2 * q.h
        };
        res.check(parity_ok, || format!("d={d}: h+={h_plus} h={} N(eps)={}", q.h, unit.norm_sign));
    }
    res
}

/// Smallest `Y ≤ y_limit` with `D·Y² ± 4` a square, by exhaustion.
pub fn brute_force_pell(disc: i64, y_limit: u64) -> Option<(u64, u64, i8)> {
    for y in 1..=y_limit {
        let base = disc as u128 * (y as u128) * (y as u128);
        for (shift, sign) in [(-4i128, -1i8), (4, 1)] {
            let v = base as i128 + shift;
            if v <= 0 {
                continue;
            }
            let x = isqrt(v as u64);
            if (x as i128) * (x as i128) == v {
                return Some((x, y, sign));
            }
        }
    }
    None
}

pub fn pell_suite(d_bound: i64, y_limit: u64) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Pell);
    for d in (2..=d_bound).filter(|&d| is_squarefree(d)) {
        let disc = fundamental_discriminant(d).expect("squarefree");
        let u = fundamental_unit(d).expect("real");
        let lhs = &u.x * &u.x - &u.y * &u.y * disc;
        res.check(lhs == BigInt::from(4 * u.norm_sign as i64), || {
            format!("d={d}: X^2 - D Y^2 = {lhs}")
        });
        let y = u.y.to_u64();
        let limit = y.map_or(y_limit, |y| (y - 1).min(y_limit));
        let smaller = brute_force_pell(disc, limit);
        res.check(smaller.is_none(), || format!("d={d}: smaller solution {smaller:?} than Y={}", u.y));
        if let Some(y) = y.filter(|&y| y <= y_limit) {
            let found = brute_force_pell(disc, y);
            let expected = u.x.to_u64().map(|x| (x, y, u.norm_sign));
            res.check(found == expected, || format!("d={d}: brute force {found:?} vs {expected:?}"));
        }
    }
    res
}

/// Outcome of one randomized Hensel trial; `Err` describes a failure.
pub fn hensel_trial(a: i64, p: u64, n: u32) -> Result<bool, String> {
    match hensel_sqrt(a, p, n) {
        Ok(root) => {
            let modulus = BigInt::from(p).pow(n);
            let r = BigInt::from(root.residue().clone());
            if !(&r * &r - a).mod_floor(&modulus).is_zero() {
                return Err(format!("a={a} p={p} N={n}: {r}^2 != a"));
            }
            let low = (&r % p).to_u64().unwrap_or(0);
            if low > p / 2 {
                return Err(format!("a={a} p={p} N={n}: root not normalized"));
            }
            let m = n.div_ceil(2);
            let coarse = hensel_sqrt(a, p, m).map_err(|e| e.to_string())?;
            if root.truncate(m) != coarse {
                return Err(format!("a={a} p={p} N={n}: truncation incoherent"));
            }
            Ok(true)
        }
        Err(PadicError::NonResidue { .. }) => {
            let target = a.rem_euclid(p as i64) as u64;
            if (0..p).any(|x| x * x % p == target) {
                Err(format!("a={a} p={p}: reported non-residue is a square"))
            } else {
                Ok(false)
            }
        }
        Err(e) => Err(format!("a={a} p={p} N={n}: {e}")),
    }
}

pub fn hensel_suite(trials: usize, p_bound: u64, n_max: u32, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Hensel);
    let primes = odd_primes_up_to(p_bound - 1);
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let p = primes[rng.gen_range(0..primes.len())];
        let n = rng.gen_range(1..=n_max);
        let a = loop {
            let a: i64 = rng.gen_range(-1_000_000_000..=1_000_000_000);
            if a.rem_euclid(p as i64) != 0 {
                break a;
            }
        };
        let outcome = hensel_trial(a, p, n);
        res.check(outcome.is_ok(), || outcome.clone().unwrap_err());
    }
    res
}

/// A random algebraic integer of `field` with numerators in `[-bound, bound]`
/// over a denominator of 1, 2 or 4.
pub fn random_integral_element(field: &Biquad, rng: &mut StdRng, bound: i64) -> KElement {
    loop {
        let den = [1, 2, 4][rng.gen_range(0..3)];
        let x = KElement::new(
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            den,
        );
        if field.is_integral(&x) {
            return x;
        }
    }
}

fn embedding_for(triple: &FieldTriple, precision: u32, fault: Option<Fault>) -> EmbeddingData {
    let emb = EmbeddingData::new(triple, precision).expect("validated triple");
    match fault {
        None => emb,
        Some(Fault::NeggSign) => EmbeddingData::from_roots_unchecked(
            emb.root_d().clone(),
            emb.root_negm().clone(),
            -emb.root_negg(),
        ),
    }
}

/// Homomorphism and norm-valuation checks for one pair; returns failure
/// messages.
pub fn embedding_pair_failures(
    triple: &FieldTriple,
    emb: &EmbeddingData,
    x: &KElement,
    y: &KElement,
) -> Vec<String> {
    let field = &triple.field;
    let sum = x.add(y);
    let prod = field.mul(x, y);
    let mut out = Vec::new();
    for tag in PrimeTag::ALL {
        let ex = emb.embed(x, tag).expect("integral");
        let ey = emb.embed(y, tag).expect("integral");
        if emb.embed(&sum, tag).expect("integral") != &ex + &ey {
            out.push(format!("{triple} tag {tag}: additivity failure for {x}, {y}"));
        }
        if emb.embed(&prod, tag).expect("integral") != &ex * &ey {
            out.push(format!("{triple} tag {tag}: multiplicativity failure for {x}, {y}"));
        }
    }
    for z in [x, y, &prod] {
        if let Some(msg) = norm_valuation_mismatch(triple, emb, z) {
            out.push(msg);
        }
    }
    out
}

/// `v_p(N(z))` against the sum of the four embedded valuations, skipped
/// when `z = 0` or an embedding saturates.
pub fn norm_valuation_mismatch(triple: &FieldTriple, emb: &EmbeddingData, z: &KElement) -> Option<String> {
    if z.is_zero() {
        return None;
    }
    let norm = triple.field.abs_norm(z);
    if !norm.is_integer() {
        return Some(format!("{triple}: non-integral norm for {z}"));
    }
    let vn = crate::criterion::p_valuation(norm.numer(), triple.p)?;
    let mut total = 0;
    for tag in PrimeTag::ALL {
        match emb.embed(z, tag).expect("integral").valuation() {
            Valuation::Exact(v) => total += v,
            Valuation::Saturated => return None,
        }
    }
    (vn != total).then(|| format!("{triple}: v_p(N) = {vn} but embeddings sum to {total} for {z}"))
}

pub fn embed_suite(
    triples: &[FieldTriple],
    pairs_per_triple: usize,
    precision: u32,
    seed: u64,
    fault: Option<Fault>,
) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Embed);
    let mut rng = StdRng::seed_from_u64(seed);
    for triple in triples {
        let emb = embedding_for(triple, precision, fault);
        res.check(emb.is_coherent(), || format!("{triple}: sqrt(-g) incoherent with sqrt(d)*sqrt(-m)"));
        for _ in 0..pairs_per_triple {
            let x = random_integral_element(&triple.field, &mut rng, 40);
            let y = random_integral_element(&triple.field, &mut rng, 40);
            let failures = embedding_pair_failures(triple, &emb, &x, &y);
            res.checks += 1;
            res.failures.extend(failures);
        }
    }
    res
}

pub fn l59_suite(triples: &[FieldTriple]) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::L59);
    for triple in triples {
        let unit = fundamental_unit(triple.d()).expect("validated");
        let mut precision = 16;
        let cmp = loop {
            let cmp = compare_l59(triple, &unit, precision);
            if cmp.quartic.exact().is_some() || precision >= 256 {
                break cmp;
            }
            precision *= 2;
        };
        res.check(cmp.agrees(), || {
            format!("{triple}: quartic {:?} vs quadratic {:?}", cmp.quartic.per_tag, cmp.quadratic)
        });
        // ambiguous class exponent through either path
        if let (Some(rk), Some(rf)) = (cmp.quartic.exact(), cmp.quadratic[0].exact()) {
            let same = (0..=10).all(|n| chevalley_p_exponent(n, rk, 0) == chevalley_p_exponent(n, rf, 0));
            res.check(same, || format!("{triple}: ambiguous exponents differ (r_K={rk}, r_F={rf})"));
        }
    }
    res
}

pub fn rtags_suite(triples: &[FieldTriple]) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Rtags);
    for triple in triples {
        let unit = fundamental_unit(triple.d()).expect("validated");
        let depth = compute_r_escalating(triple, &unit, 9, 512);
        res.check(depth.tags_agree(), || format!("{triple}: per-tag depths {:?}", depth.per_tag));
    }
    res
}

/// Non-decreasing in `n`, and equal to `a0 + r − 1` for `r − 1 ≤ n ≤ n_max`.
pub fn chevalley_suite(r_max: u32, a0_max: u32, n_max: u32) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Chevalley);
    for r in 1..=r_max {
        for a0 in 0..=a0_max {
            let values: Vec<u32> = (0..=n_max).map(|n| chevalley_p_exponent(n, r, a0)).collect();
            res.check(values.windows(2).all(|w| w[0] <= w[1]), || {
                format!("r={r} a0={a0}: not monotone {values:?}")
            });
            res.check(values[(r - 1) as usize..].iter().all(|&v| v == a0 + r - 1), || {
                format!("r={r} a0={a0}: does not stabilize at {}", a0 + r - 1)
            });
        }
    }
    res
}

/// Lifts `a` to precision `n` and embeds it, as a quick sanity probe.
pub fn constant_embeds_to_itself(triple: &FieldTriple, a: i64, n: u32) -> bool {
    let emb = EmbeddingData::new(triple, n).expect("validated");
    PrimeTag::ALL.iter().all(|&tag| {
        emb.embed(&KElement::integer(a), tag).ok() == PAdicApprox::from_i64(triple.p, n, a).ok()
    })
}
