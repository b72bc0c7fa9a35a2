//! Property tests for the structural invariants: canonical forms survive
//! arithmetic, text round-trips are bit-exact, and the valuation laws hold
//! on arbitrary inputs.

use drinfeld::places::{product_formula_check, Place};
use drinfeld::poly::{enumerate_polys, Poly};
use drinfeld::rat::Rat;
use drinfeld::{DrinfeldModule, Fq};
use proptest::prelude::*;

fn fields() -> Vec<Fq> {
    vec![
        Fq::prime_field(2).unwrap(),
        Fq::prime_field(3).unwrap(),
        Fq::prime_field(5).unwrap(),
        Fq::extension_field(2, vec![1, 1, 1]).unwrap(),
    ]
}

fn poly_from_raw(fq: &Fq, raw: &[u64]) -> Poly {
    let coeffs = raw.iter().map(|&c| fq.elem_from_index(c % fq.q())).collect();
    Poly::from_coeffs(fq, coeffs)
}

fn rat_from_raw(fq: &Fq, num: &[u64], den: &[u64]) -> Rat {
    let n = poly_from_raw(fq, num);
    let mut d = poly_from_raw(fq, den);
    if d.is_zero() {
        d = Poly::one(fq);
    }
    Rat::new(n, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn poly_ring_identities(
        field_idx in 0usize..4,
        a in prop::collection::vec(0u64..16, 0..8),
        b in prop::collection::vec(0u64..16, 0..8),
        c in prop::collection::vec(0u64..16, 0..8),
    ) {
        let fq = fields()[field_idx].clone();
        let f = poly_from_raw(&fq, &a);
        let g = poly_from_raw(&fq, &b);
        let h = poly_from_raw(&fq, &c);
        prop_assert_eq!(&(&(&f + &g) * &h), &(&(&f * &h) + &(&g * &h)));
        if !g.is_zero() {
            let (q, r) = f.divrem(&g).unwrap();
            prop_assert_eq!(&(&(&g * &q) + &r), &f);
            if !r.is_zero() {
                prop_assert!(r.degree().unwrap() < g.degree().unwrap());
            }
        }
        let d = f.gcd(&g);
        if !d.is_zero() {
            prop_assert!(d.is_monic());
            prop_assert!(d.divides(&f) && d.divides(&g));
        }
    }

    #[test]
    fn poly_text_round_trip(
        field_idx in 0usize..4,
        a in prop::collection::vec(0u64..16, 0..10),
    ) {
        let fq = fields()[field_idx].clone();
        let f = poly_from_raw(&fq, &a);
        let text = f.to_string();
        let back = Poly::parse(&fq, &text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn rat_normal_form_and_round_trip(
        field_idx in 0usize..4,
        num in prop::collection::vec(0u64..16, 0..8),
        den in prop::collection::vec(0u64..16, 0..8),
        num2 in prop::collection::vec(0u64..16, 0..8),
        den2 in prop::collection::vec(0u64..16, 0..8),
    ) {
        let fq = fields()[field_idx].clone();
        let x = rat_from_raw(&fq, &num, &den);
        let y = rat_from_raw(&fq, &num2, &den2);
        for z in [x.add_ref(&y), x.sub_ref(&y), x.mul_ref(&y)] {
            prop_assert!(z.den().is_monic());
            if !z.is_zero() {
                prop_assert!(z.num().gcd(z.den()).is_one());
            } else {
                prop_assert!(z.den().is_one());
            }
        }
        let text = x.to_string();
        let back = Rat::parse(&fq, &text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn product_formula_and_ultrametric(
        field_idx in 0usize..4,
        num in prop::collection::vec(0u64..16, 0..9),
        den in prop::collection::vec(0u64..16, 0..9),
        num2 in prop::collection::vec(0u64..16, 0..9),
        den2 in prop::collection::vec(0u64..16, 0..9),
    ) {
        let fq = fields()[field_idx].clone();
        let x = rat_from_raw(&fq, &num, &den);
        let y = rat_from_raw(&fq, &num2, &den2);
        if !x.is_zero() {
            prop_assert_eq!(product_formula_check(&x).unwrap(), 0);
            // support is exactly the set of places with nonzero log
            for (v, val) in drinfeld::support(&x).unwrap() {
                prop_assert_eq!(v.valuation(&x), Some(val));
                prop_assert_ne!(val, 0);
            }
        }
        let places = [
            Place::Infinite,
            Place::finite(Poly::t(&fq)).unwrap(),
        ];
        for v in &places {
            let (lx, ly, lsum) = (v.log_abs(&x), v.log_abs(&y), v.log_abs(&x.add_ref(&y)));
            prop_assert!(lsum <= lx.max(ly));
            if lx != ly {
                prop_assert_eq!(lsum, lx.max(ly));
            }
        }
    }

    #[test]
    fn weil_height_routes_agree(
        field_idx in 0usize..4,
        num in prop::collection::vec(0u64..16, 0..9),
        den in prop::collection::vec(0u64..16, 0..9),
    ) {
        let fq = fields()[field_idx].clone();
        let x = rat_from_raw(&fq, &num, &den);
        prop_assert_eq!(
            drinfeld::heights::weil_height(&x),
            drinfeld::heights::weil_height_via_places(&x)
        );
    }

    #[test]
    fn morphism_laws(
        field_idx in 0usize..2,
        a in prop::collection::vec(0u64..8, 1..5),
        b in prop::collection::vec(0u64..8, 1..5),
    ) {
        let fq = fields()[field_idx].clone();
        let m = DrinfeldModule::new(&fq, vec![Rat::t(&fq), Rat::one(&fq)]).unwrap();
        let f = poly_from_raw(&fq, &a);
        let g = poly_from_raw(&fq, &b);
        prop_assert_eq!(m.phi_of(&(&f * &g)), m.phi_of(&f).compose(&m.phi_of(&g)));
        prop_assert_eq!(m.phi_of(&(&f + &g)), m.phi_of(&f).add_ref(&m.phi_of(&g)));
    }

    #[test]
    fn s_integral_monotone(
        num in prop::collection::vec(0u64..8, 0..6),
        den in prop::collection::vec(0u64..8, 0..6),
        anum in prop::collection::vec(0u64..8, 0..6),
        aden in prop::collection::vec(0u64..8, 0..6),
        mask in 0u32..64,
    ) {
        let fq = Fq::prime_field(3).unwrap();
        let beta = rat_from_raw(&fq, &num, &den);
        let alpha = rat_from_raw(&fq, &anum, &aden);
        let places = drinfeld::enumerate_places(&fq, 1, true);
        let mut small = drinfeld::PlaceSet::new();
        let mut large = drinfeld::PlaceSet::new();
        for (i, v) in places.iter().enumerate() {
            if mask & (1 << i) != 0 {
                small.insert(v.clone());
            }
            large.insert(v.clone());
        }
        // S subset of S' preserves integrality
        if drinfeld::s_integral(&beta, &alpha, &small) {
            prop_assert!(drinfeld::s_integral(&beta, &alpha, &large.union(&small)));
        }
    }
}

#[test]
fn enumerate_polys_cardinality() {
    for fq in fields() {
        for max_deg in 0..=2usize {
            let all = enumerate_polys(&fq, max_deg, false);
            let expected = (fq.q() as u128).pow(max_deg as u32 + 1);
            assert_eq!(all.len() as u128, expected);
            let mut dedup: Vec<_> = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len(), "duplicates in enumeration");
        }
    }
}
