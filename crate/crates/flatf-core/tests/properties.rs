//! Randomized exact-identity tests: ring laws, differential-operator axioms
//! over random potentials, normal-form structure, and series arithmetic.
//! Every assertion is an exact equality; a failure is a real counterexample.

use proptest::prelude::*;

use flatf_core::groebner::GroebnerBasis;
use flatf_core::monomial::{Monomial, MonomialOrder};
use flatf_core::multi_index::MultiIndex;
use flatf_core::parse::parse_poly;
use flatf_core::poly::{rat, rat_int, Poly, Rat};
use flatf_core::polyvec::{apply_divergence, apply_twist, bv_bracket, PolyVector};
use flatf_core::prng::SplitMix64;
use flatf_core::series::{convolve, TSeries};
use flatf_core::verifier::ElementSampler;

fn arb_poly(n_vars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_exp, n_vars),
            -9i64..=9,
            1i64..=4,
        ),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        let mut p = Poly::zero(n_vars);
        for (exps, num, den) in terms {
            p.add_term(Monomial(exps), rat(num, den));
        }
        p
    })
}

proptest! {
    #[test]
    fn ring_laws_hold_exactly(
        a in arb_poly(3, 4, 3),
        b in arb_poly(3, 4, 3),
        c in arb_poly(3, 4, 3),
    ) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&Poly::one(3)), a.clone());
    }

    #[test]
    fn partials_commute(p in arb_poly(3, 5, 4), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(p.partial(i).partial(j), p.partial(j).partial(i));
    }

    #[test]
    fn print_parse_is_identity(p in arb_poly(3, 5, 4)) {
        let names: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
        let printed = p.to_string_with(&names);
        prop_assert_eq!(parse_poly(&printed, &names).unwrap(), p);
    }

    #[test]
    fn polyvector_print_parse_is_identity(
        components in prop::collection::vec(
            (prop::collection::vec(0usize..3, 0..=3), arb_poly(3, 3, 3)),
            0..4,
        ),
    ) {
        let names: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
        let mut pv = PolyVector::zero(3);
        for (key, poly) in components {
            let mut key = key;
            key.sort_unstable();
            key.dedup();
            pv.add_component(key, poly);
        }
        let printed = pv.to_string_with(&names);
        prop_assert_eq!(
            flatf_core::polyvec::parse_polyvector(&printed, &names).unwrap(),
            pv
        );
    }

    #[test]
    fn normal_form_is_linear_and_reconstructs(
        p in arb_poly(2, 5, 4),
        q in arb_poly(2, 5, 4),
    ) {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        let gens = vec![
            parse_poly("x^2 - y", &names).unwrap(),
            parse_poly("y^2", &names).unwrap(),
        ];
        let gb = GroebnerBasis::new(gens.clone(), MonomialOrder::degrevlex(2));

        // Reconstruction identity.
        for target in [&p, &q] {
            let red = gb.reduce(target);
            let mut acc = red.remainder.clone();
            for (cof, gen) in red.cofactors.iter().zip(&gens) {
                acc = acc.add(&cof.mul(gen));
            }
            prop_assert_eq!(&acc, target);
        }

        // Linearity of the normal form.
        let np = gb.reduce(&p).remainder;
        let nq = gb.reduce(&q).remainder;
        prop_assert_eq!(gb.reduce(&p.add(&q)).remainder, np.add(&nq));

        // Idempotence with zero cofactors.
        let again = gb.reduce(&np);
        prop_assert_eq!(again.remainder, np);
        prop_assert!(again.cofactors.iter().all(Poly::is_zero));
    }

    #[test]
    fn series_product_is_commutative_and_truncates(
        entries_a in prop::collection::vec((prop::collection::vec(0usize..3, 0..3), -5i64..=5), 0..5),
        entries_b in prop::collection::vec((prop::collection::vec(0usize..3, 0..3), -5i64..=5), 0..5),
    ) {
        let mut f: TSeries<Rat> = TSeries::zero(3);
        for (key, c) in entries_a {
            f.insert(MultiIndex::new(key), rat_int(c));
        }
        let mut g: TSeries<Rat> = TSeries::zero(3);
        for (key, c) in entries_b {
            g.insert(MultiIndex::new(key), rat_int(c));
        }
        let fg = convolve(&f, &g, 3, |a, b| a * b);
        let gf = convolve(&g, &f, 3, |a, b| a * b);
        prop_assert_eq!(&fg, &gf);
        // Truncating inputs first agrees with truncating the product.
        let fg1 = convolve(&f.truncate(1), &g.truncate(1), 1, |a, b| a * b);
        prop_assert_eq!(fg.truncate(1), fg1);
    }
}

/// Operator axioms over a randomized potential: squares, anticommutator,
/// Leibniz, supercommutativity, and the bracket laws. The potential varies
/// per trial, so these cover what the fixed-potential axiom suite cannot.
#[test]
fn differential_axioms_hold_for_random_potentials() {
    let n = 3;
    let mut rng = SplitMix64::new(0x5eed);
    let sampler = ElementSampler::new(n, None);
    for trial in 0..120u64 {
        // Random potential with a handful of terms.
        let mut s = Poly::zero(n);
        for _ in 0..(1 + rng.below(4)) {
            let mut exps = vec![0u32; n];
            for e in exps.iter_mut() {
                *e = rng.below(4) as u32;
            }
            let c = rng.range_i64(-6, 6);
            s.add_term(Monomial(exps), rat_int(if c == 0 { 1 } else { c }));
        }
        let partials: Vec<Poly> = (0..n).map(|i| s.partial(i)).collect();
        let twist = |a: &PolyVector| apply_twist(&partials, a);

        let ka = rng.below(n as u64 + 1) as usize;
        let kb = rng.below(n as u64 + 1) as usize;
        let a = sampler.sample(&mut rng, ka);
        let b = sampler.sample(&mut rng, kb);

        // Squares and the anticommutator vanish identically.
        assert!(twist(&twist(&a)).is_zero(), "twist^2 trial {trial}");
        assert!(
            apply_divergence(&apply_divergence(&a)).is_zero(),
            "div^2 trial {trial}"
        );
        let anti = twist(&apply_divergence(&a)).add(&apply_divergence(&twist(&a)));
        assert!(anti.is_zero(), "anticommutator trial {trial}");

        // Odd Leibniz for the twist.
        let sign = if ka.is_multiple_of(2) {
            rat_int(1)
        } else {
            rat_int(-1)
        };
        let leib = twist(&a.mul(&b))
            .sub(&twist(&a).mul(&b))
            .sub(&a.mul(&twist(&b)).scale(&sign));
        assert!(leib.is_zero(), "Leibniz trial {trial}");

        // Supercommutativity.
        let sc_sign = if (ka * kb).is_multiple_of(2) {
            rat_int(1)
        } else {
            rat_int(-1)
        };
        assert!(
            a.mul(&b).sub(&b.mul(&a).scale(&sc_sign)).is_zero(),
            "supercommutativity trial {trial}"
        );

        // Bracket graded symmetry, stated for homogeneous elements.
        let l_ab = bv_bracket(&a, &b).unwrap();
        let l_ba = bv_bracket(&b, &a).unwrap();
        assert!(
            l_ab.sub(&l_ba.scale(&sc_sign)).is_zero(),
            "bracket symmetry trial {trial}"
        );
    }
}
