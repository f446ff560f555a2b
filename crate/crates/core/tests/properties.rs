use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use iwasawa_biquad::biquadratic::{make_triple, Biquad, EmbeddingData, KElement, PrimeTag};
use iwasawa_biquad::criterion::{chevalley_p_exponent, norm_index_exponent};
use iwasawa_biquad::padic::{hensel_sqrt, PAdicApprox, PadicError, Valuation};

const PRIMES: [u64; 8] = [3, 5, 7, 13, 17, 101, 9973, 65537];
const TRIPLES: [(i64, i64, u64); 6] = [(1, 2, 17), (1, 3, 13), (2, 3, 73), (5, 7, 3), (3, 19, 79), (13, 23, 7)];
const FIELDS: [(i64, i64); 5] = [(1, 2), (3, 5), (1, 3), (7, 13), (2, 15)];

fn residue(x: &PAdicApprox) -> BigInt {
    BigInt::from(x.residue().clone())
}

fn element() -> impl Strategy<Value = KElement> {
    (-50i64..=50, -50i64..=50, -50i64..=50, -50i64..=50, prop::sample::select(vec![1i64, 2, 4]))
        .prop_map(|(a, b, c, e, den)| KElement::new(a, b, c, e, den))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn padic_ring_ops_match_bigint(
        p in prop::sample::select(PRIMES.to_vec()),
        n in 1u32..40,
        a in any::<i64>(),
        b in any::<i64>(),
    ) {
        let m = BigInt::from(p).pow(n);
        let x = PAdicApprox::from_i64(p, n, a).unwrap();
        let y = PAdicApprox::from_i64(p, n, b).unwrap();
        let (ba, bb) = (BigInt::from(a), BigInt::from(b));
        prop_assert_eq!(residue(&(&x + &y)), (&ba + &bb).mod_floor(&m));
        prop_assert_eq!(residue(&(&x - &y)), (&ba - &bb).mod_floor(&m));
        prop_assert_eq!(residue(&(&x * &y)), (&ba * &bb).mod_floor(&m));
        prop_assert_eq!(residue(&(-&x)), (-&ba).mod_floor(&m));
    }

    #[test]
    fn padic_truncation_is_a_ring_map(
        p in prop::sample::select(PRIMES.to_vec()),
        n in 2u32..30,
        a in any::<i64>(),
        b in any::<i64>(),
    ) {
        let k = n / 2;
        let x = PAdicApprox::from_i64(p, n, a).unwrap();
        let y = PAdicApprox::from_i64(p, n, b).unwrap();
        prop_assert_eq!((&x * &y).truncate(k), &x.truncate(k) * &y.truncate(k));
        prop_assert_eq!((&x + &y).truncate(k), &x.truncate(k) + &y.truncate(k));
    }

    #[test]
    fn padic_valuation_and_inverse(
        p in prop::sample::select(PRIMES[..6].to_vec()),
        u in 1i64..1_000_000,
        k in 0u32..6,
        n in 1u32..20,
    ) {
        prop_assume!(u % p as i64 != 0);
        let x = PAdicApprox::new(p, n, &(BigInt::from(p).pow(k) * u)).unwrap();
        let expected = if k < n { Valuation::Exact(k) } else { Valuation::Saturated };
        prop_assert_eq!(x.valuation(), expected);
        let unit = PAdicApprox::from_i64(p, n, u).unwrap();
        let inv = unit.inv_mod().unwrap();
        prop_assert!(residue(&(&unit * &inv)).is_one());
        if k > 0 && k < n {
            prop_assert!(matches!(x.inv_mod(), Err(PadicError::NotAUnit(_))));
        }
    }

    #[test]
    fn hensel_roots_square_and_cohere(
        p in prop::sample::select(PRIMES.to_vec()),
        n in 1u32..48,
        a in -1_000_000_000i64..1_000_000_000,
    ) {
        prop_assume!(a % p as i64 != 0);
        match hensel_sqrt(a, p, n) {
            Ok(r) => {
                let m = BigInt::from(p).pow(n);
                let rr = residue(&r);
                prop_assert!((&rr * &rr - a).mod_floor(&m).is_zero());
                let k = n.div_ceil(2);
                prop_assert_eq!(r.truncate(k), hensel_sqrt(a, p, k).unwrap());
            }
            Err(PadicError::NonResidue { .. }) => {
                let t = BigInt::from(a).mod_floor(&BigInt::from(p));
                prop_assert!(t.modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p)) != BigInt::one());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn field_multiplication_laws(
        (m, d) in prop::sample::select(FIELDS.to_vec()),
        x in element(),
        y in element(),
        z in element(),
    ) {
        let f = Biquad::new(m, d).unwrap();
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert_eq!(f.mul(&x, &y.add(&z)), f.mul(&x, &y).add(&f.mul(&x, &z)));
        prop_assert_eq!(f.mul(&x, &KElement::one()), x.clone());
    }

    #[test]
    fn norm_is_multiplicative_and_conjugation_is_an_automorphism(
        (m, d) in prop::sample::select(FIELDS.to_vec()),
        x in element(),
        y in element(),
    ) {
        let f = Biquad::new(m, d).unwrap();
        let xy = f.mul(&x, &y);
        prop_assert_eq!(f.abs_norm(&xy), f.abs_norm(&x) * f.abs_norm(&y));
        prop_assert_eq!(xy.conj_m(), f.mul(&x.conj_m(), &y.conj_m()));
        prop_assert_eq!(xy.conj_d(), f.mul(&x.conj_d(), &y.conj_d()));
        prop_assert_eq!(f.abs_norm(&x.conj_m()), f.abs_norm(&x));
        if !x.is_zero() {
            let inv = f.inverse(&x).unwrap();
            prop_assert_eq!(f.mul(&x, &inv), KElement::one());
        }
    }

    #[test]
    fn compact_form_round_trips(x in element()) {
        prop_assert_eq!(x.to_compact().parse::<KElement>().unwrap(), x.clone());
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<KElement>(&json).unwrap(), x);
    }

    #[test]
    fn embeddings_are_ring_homomorphisms(
        (m, d, p) in prop::sample::select(TRIPLES.to_vec()),
        a in prop::array::uniform4(-200i64..=200),
        b in prop::array::uniform4(-200i64..=200),
        n in 1u32..24,
    ) {
        let triple = make_triple(m, d, p).unwrap();
        let emb = EmbeddingData::new(&triple, n).unwrap();
        prop_assert!(emb.is_coherent());
        let x = KElement::new(a[0], a[1], a[2], a[3], 1);
        let y = KElement::new(b[0], b[1], b[2], b[3], 1);
        let prod = triple.field.mul(&x, &y);
        for tag in PrimeTag::ALL {
            let (ex, ey) = (emb.embed(&x, tag).unwrap(), emb.embed(&y, tag).unwrap());
            prop_assert_eq!(emb.embed(&x.add(&y), tag).unwrap(), &ex + &ey);
            prop_assert_eq!(emb.embed(&prod, tag).unwrap(), &ex * &ey);
            // complex conjugation permutes the primes
            prop_assert_eq!(emb.embed(&x.conj_m(), tag).unwrap(), emb.embed(&x, tag.complex_conjugate()).unwrap());
        }
    }

    #[test]
    fn ambiguous_exponent_bounds(n in 0u32..200, r in 1u32..50, a0 in 0u32..20) {
        let e = chevalley_p_exponent(n, r, a0);
        prop_assert!(e <= chevalley_p_exponent(n + 1, r, a0));
        prop_assert!(e < a0 + r);
        prop_assert!(norm_index_exponent(n, r) <= n + 1);
    }
}

#[test]
fn zero_is_not_a_unit() {
    let x = PAdicApprox::from_i64(13, 4, 0).unwrap();
    assert_eq!(x.valuation(), Valuation::Saturated);
    assert!(x.is_zero());
    assert!(BigInt::from(x.residue().clone()).is_zero());
}
