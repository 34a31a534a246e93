use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bettilab::betti::{lattice_betti_numbers, scarf_nodes, taylor_betti_oracle};
use bettilab::poset::meet_closure;
use bettilab::stanley::{sdepth, sdepth_with_cap, verify_partition, SearchBudget, Side};
use bettilab::{
    betti_table, canonical_form, hilbert_numerator, FieldSpec, FinitePoset, LcmLattice, Monomial, MonomialIdeal,
    NumeratorSource, RandomIdealParams,
};

fn small_ideal() -> impl Strategy<Value = MonomialIdeal> {
    (1usize..=4, 1usize..=4, 1u32..=3, any::<bool>(), any::<u64>()).prop_filter_map(
        "no ideal with these parameters",
        |(n_vars, n_gens, max_exp, squarefree, seed)| {
            let params = RandomIdealParams { n_vars, n_gens, max_exp, squarefree };
            MonomialIdeal::random(&params, seed).ok()
        },
    )
}

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn relabel(p: &FinitePoset, perm: &[usize]) -> FinitePoset {
    FinitePoset::from_leq(p.len(), |i, j| p.leq(perm[i], perm[j])).unwrap()
}

/// Reduced Euler characteristic from the face counts alone.
fn euler_from_faces(f: &[usize]) -> i64 {
    f.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { -(c as i64) } else { c as i64 }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_survives_shuffles(ideal in small_ideal(), seed in any::<u64>()) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let p = lcm.lattice().poset();
        let reference = canonical_form(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..p.len()).collect();
        for _ in 0..100 {
            perm.shuffle(&mut rng);
            prop_assert_eq!(&canonical_form(&relabel(p, &perm)), &reference);
        }
    }

    #[test]
    fn betti_table_matches_taylor(ideal in small_ideal()) {
        for field in [FieldSpec::RATIONALS, f2()] {
            prop_assert_eq!(betti_table(&ideal, field).unwrap(), taylor_betti_oracle(&ideal, field).unwrap());
        }
    }

    #[test]
    fn alternating_betti_sum_is_euler_characteristic(ideal in small_ideal()) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let l = lcm.lattice();
        let table = betti_table(&ideal, FieldSpec::RATIONALS).unwrap();
        for m in 0..l.len() {
            if m == l.bottom() {
                continue;
            }
            let chi = euler_from_faces(&l.open_lower_complex(m).unwrap().f_vector());
            // beta_{i,m} sits in reduced degree i - 2, which has the sign of i
            prop_assert_eq!(table.alternating_sum(lcm.degree(m)), chi);
        }
    }

    #[test]
    fn finite_field_ranks_dominate_rational(ideal in small_ideal(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let q = lattice_betti_numbers(lcm.lattice(), FieldSpec::RATIONALS);
        let fp = lattice_betti_numbers(lcm.lattice(), FieldSpec::prime(p).unwrap());
        for (m, ranks) in q {
            let other = &fp.iter().find(|(x, _)| *x == m).expect("rational Betti degree survives mod p").1;
            for (i, b) in ranks {
                prop_assert!(other.get(&i).copied().unwrap_or(0) >= b);
            }
        }
    }

    #[test]
    fn meet_closure_is_idempotent(atoms in 1usize..=6, family in prop::collection::vec(any::<u64>(), 0..6)) {
        let l = meet_closure(atoms, &family);
        let sets: Vec<u64> = (0..l.len())
            .map(|x| l.label(x).unwrap().iter().enumerate().fold(0u64, |m, (k, &b)| m | (u64::from(b) << k)))
            .collect();
        let again = meet_closure(atoms, &sets);
        prop_assert_eq!(again.len(), l.len());
        prop_assert_eq!(canonical_form(again.poset()), canonical_form(l.poset()));
    }

    #[test]
    fn removing_meet_irreducibles_keeps_a_lattice(ideal in small_ideal()) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let l = lcm.lattice();
        for a in l.meet_irreducibles() {
            if a != l.top() && a != l.bottom() {
                prop_assert!(l.remove_element(a).is_ok());
            }
        }
    }

    #[test]
    fn text_round_trip(ideal in small_ideal()) {
        let again = MonomialIdeal::parse(&ideal.to_text()).unwrap();
        prop_assert_eq!(&again, &ideal);
        prop_assert_eq!(again.fingerprint(), ideal.fingerprint());
    }

    #[test]
    fn joins_are_componentwise_maxima(ideal in small_ideal()) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let l = lcm.lattice();
        for a in 0..l.len() {
            for b in 0..l.len() {
                let expected: Vec<u32> = lcm.degree(a).0.iter().zip(&lcm.degree(b).0).map(|(x, y)| *x.max(y)).collect();
                prop_assert_eq!(&lcm.degree(l.join(a, b)).0, &expected);
            }
        }
    }

    #[test]
    fn hilbert_numerators_agree(ideal in small_ideal()) {
        prop_assert_eq!(
            hilbert_numerator(&ideal, NumeratorSource::Betti, FieldSpec::RATIONALS).unwrap(),
            hilbert_numerator(&ideal, NumeratorSource::Taylor, FieldSpec::RATIONALS).unwrap()
        );
    }

    #[test]
    fn scarf_inside_betti(ideal in small_ideal()) {
        let lcm = LcmLattice::new(&ideal).unwrap();
        let betti: BTreeSet<usize> = bettilab::betti::lattice_betti_elements(lcm.lattice(), FieldSpec::RATIONALS).into_iter().collect();
        let scarf: BTreeSet<usize> = scarf_nodes(lcm.lattice()).into_iter().collect();
        prop_assert!(scarf.is_subset(&betti));
        if ideal.is_generic() {
            prop_assert_eq!(scarf, betti);
        }
    }

    #[test]
    fn sdepth_certificates_verify(ideal in small_ideal(), quotient in any::<bool>()) {
        let side = if quotient { Side::Quotient } else { Side::Ideal };
        let r = sdepth(&ideal, side, &SearchBudget::default()).unwrap();
        let check = verify_partition(&ideal, &r.poset, &r.certificate);
        prop_assert!(check.valid, "{:?}", check.problems);
        prop_assert_eq!(check.value, Some(r.value));
        prop_assert_eq!(r.spdim() + r.value, ideal.nvars());
    }

    #[test]
    fn sdepth_ignores_cap_extension(ideal in small_ideal(), quotient in any::<bool>()) {
        let side = if quotient { Side::Quotient } else { Side::Ideal };
        let budget = SearchBudget::default();
        let base = sdepth(&ideal, side, &budget).unwrap().value;
        let g = ideal.lcm_exponents().0;
        for j in 0..g.len() {
            let mut cap = g.clone();
            cap[j] += 1;
            prop_assert_eq!(sdepth_with_cap(&ideal, side, Some(&cap), &budget).unwrap().value, base);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_sdepth_is_superadditive(a in small_ideal(), b in small_ideal()) {
        let budget = SearchBudget::default();
        let sum = a.disjoint_sum(&b);
        let whole = sdepth(&sum, Side::Quotient, &budget).unwrap().value;
        let parts = sdepth(&a, Side::Quotient, &budget).unwrap().value + sdepth(&b, Side::Quotient, &budget).unwrap().value;
        prop_assert!(whole >= parts, "{} < {}", whole, parts);
    }
}

#[test]
fn generic_sample_has_scarf_resolution() {
    let params = RandomIdealParams { n_vars: 3, n_gens: 4, max_exp: 4, squarefree: false };
    let generic = MonomialIdeal::random_corpus(&params, 200, 3)
        .unwrap()
        .into_iter()
        .find(MonomialIdeal::is_generic)
        .expect("some generic ideal among 200 samples");
    let lcm = LcmLattice::new(&generic).unwrap();
    let mut betti = bettilab::betti::lattice_betti_elements(lcm.lattice(), FieldSpec::RATIONALS);
    let mut scarf = scarf_nodes(lcm.lattice());
    betti.sort_unstable();
    scarf.sort_unstable();
    assert_eq!(betti, scarf);
    assert!(lcm.degrees().contains(&Monomial::one(3)));
}
