use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bettilab::lab::{
    check_onestep, conjecture_scan, find_join_surjection, is_join_surjection, mb_chain_check, rerun, Verdict,
};
use bettilab::stanley::SearchBudget;
use bettilab::{FieldSpec, LcmLattice, MonomialIdeal, RandomIdealParams};

fn corpus(count: usize, seed: u64) -> Vec<MonomialIdeal> {
    let params = RandomIdealParams { n_vars: 4, n_gens: 3, max_exp: 1, squarefree: true };
    MonomialIdeal::random_corpus(&params, count, seed).unwrap()
}

#[test]
fn scan_is_permutation_invariant() {
    let mut members = corpus(40, 5);
    let budget = SearchBudget::default();
    let reference = conjecture_scan(&members, FieldSpec::RATIONALS, &budget);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        members.shuffle(&mut rng);
        let again = conjecture_scan(&members, FieldSpec::RATIONALS, &budget);
        assert_eq!(again.to_json_line(), reference.to_json_line());
    }
}

#[test]
fn colon_maps_are_join_surjections() {
    for ideal in corpus(30, 21) {
        for v in 0..ideal.nvars() {
            let Ok(colon) = ideal.colon_by_variable(v) else { continue };
            let l = LcmLattice::new(&ideal).unwrap();
            let l2 = LcmLattice::new(&colon).unwrap();
            let map = find_join_surjection(l.lattice(), l2.lattice(), 1_000_000)
                .unwrap()
                .expect("the colon map is a join-surjection");
            assert!(is_join_surjection(l.lattice(), l2.lattice(), &map.images));
        }
    }
}

#[test]
fn mb_chain_is_consistent() {
    let params = RandomIdealParams { n_vars: 3, n_gens: 4, max_exp: 3, squarefree: false };
    for ideal in MonomialIdeal::random_corpus(&params, 40, 4).unwrap() {
        let r = mb_chain_check(&ideal, FieldSpec::RATIONALS).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{}", r.to_json_line());
        assert_eq!(r.quantities["lattice_size"] - r.quantities["mb_size"], r.quantities["chain_length"]);
    }
}

#[test]
fn reports_rerun_identically() {
    let budget = SearchBudget::default();
    for ideal in corpus(10, 3) {
        for v in 0..ideal.nvars() {
            let r = check_onestep(&ideal, v, FieldSpec::RATIONALS, &budget).unwrap();
            let back = bettilab::CheckReport::from_json_line(&r.to_json_line()).unwrap();
            assert_eq!(rerun(&back, &budget).unwrap(), r);
        }
    }
}
