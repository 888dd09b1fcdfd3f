//! Randomized invariants (proptest) and exhaustive corpus sweeps.

mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::props::{self, FLAVORS};
use common::*;
use pointlike::rankers::RankerAutomaton;
use pointlike::saturation::{ConeFamily, Saturator, Schedule, Side};
use pointlike::solver::*;
use pointlike::varieties::{is_in, Level};

fn automata() -> &'static Vec<RankerAutomaton> {
    static A: OnceLock<Vec<RankerAutomaton>> = OnceLock::new();
    A.get_or_init(|| FLAVORS.iter().map(|&f| props::stability_automaton(f)).collect())
}

fn corpus_morphisms() -> &'static Vec<pointlike::monoid::MonoidMorphism> {
    static M: OnceLock<Vec<pointlike::monoid::MonoidMorphism>> = OnceLock::new();
    M.get_or_init(|| CORPUS.iter().map(|r| joint_morphism(&[&dfa(r)]).unwrap()).collect())
}

fn word(letters: &'static [u8], max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop::sample::select(letters), 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn comparison_preorder_is_stable(
        k in 0..FLAVORS.len(),
        u in word(b"ab", 8),
        pick in any::<usize>(),
        pad in prop::option::of(prop::sample::select(b"ab".as_slice())),
        x in word(b"ab", 5),
        y in word(b"ab", 5),
    ) {
        let a = &automata()[k];
        let v = props::premise_partner(a, &u, pick, pad);
        prop_assert_eq!(props::stable_quadruple(&a.set, &u, &v, &x, &y), Ok(()));
    }

    #[test]
    fn n_long_matches_brute_force(w in word(b"abc", 10), n in 0usize..=4) {
        prop_assert_eq!(props::n_long_ok(&w, n), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mu_minor_properties(k in 0..CORPUS.len(), u in word(b"ab", 24)) {
        prop_assert_eq!(props::mu_minor_ok(&u, &corpus_morphisms()[k]), Ok(()));
    }

    #[test]
    fn factorization_properties(u in word(b"abc", 40), n in 1usize..=3) {
        prop_assert_eq!(props::factorization_ok(&u, n), Ok(()));
    }

    #[test]
    fn binary_factorization_properties(u in word(b"ab", 40), n in 1usize..=3) {
        prop_assert_eq!(props::factorization_ok(&u, n), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A replayed certificate is a proof of non-coverability; coverability
    /// at a level persists at every larger level.
    #[test]
    fn cover_certificates_and_monotonicity(i in 0..CORPUS.len(), j in 0..CORPUS.len()) {
        let l = dfa(CORPUS[i]);
        let others = [dfa(CORPUS[j])];
        prop_assume!(joint_morphism(&[&l, &others[0]]).unwrap().target().size() <= 16);
        for (v, w) in props::inclusions(2) {
            if v == Level::DA || w == Level::DA {
                continue;
            }
            let rv = decide_cover(v, &l, &others).unwrap();
            if let Some(c) = &rv.certificate {
                prop_assert!(replay_certificate(c, &rv.morphism, &l, &others));
            }
            if rv.coverable {
                prop_assert!(decide_cover(w, &l, &others).unwrap().coverable, "coverable at {} but not at {}", v, w);
            }
        }
    }
}

#[test]
fn seeded_stability_sample() {
    for a in automata() {
        assert_eq!(props::stability(a, 99, 10_000), Ok(10_000), "{}", a.set.label);
    }
}

#[test]
fn emitted_families_are_closed() {
    props::closure_all(3).unwrap();
}

#[test]
fn membership_follows_inclusions() {
    props::membership_monotone(3).unwrap();
}

#[test]
fn saturations_shrink_along_inclusions() {
    props::saturation_monotone(3).unwrap();
}

#[test]
fn corner_saturations_shrink_in_m() {
    for r in CORPUS {
        let mut s = Solver::new(&joint_morphism(&[&dfa(r)]).unwrap()).unwrap();
        let sat = s.saturator();
        for side in [Side::R, Side::L] {
            for m in 1..4 {
                let (lo, hi) = (sat.sat_corner(side, m), sat.sat_corner(side, m + 1));
                assert!(hi.dominated_by(&lo), "{r} {side:?} {m}");
            }
        }
    }
}

#[test]
fn da_content_property_and_identity_oracle() {
    let (inside, total) = props::da_property().unwrap();
    assert!(inside > 0 && total == CORPUS.len());
    for s in separator_pool().iter().filter(|s| s.monoid().size() <= 40) {
        assert_eq!(is_in(Level::DA, s.monoid()).unwrap(), props::da_identity(s.monoid()), "{}", s.label);
    }
}

#[test]
fn n_long_exhaustive_binary() {
    props::n_long_all(5).unwrap();
}

#[test]
fn schedules_agree_on_corpus() {
    for r in CORPUS {
        let s = Solver::new(&joint_morphism(&[&dfa(r)]).unwrap()).unwrap();
        let cs = s.alphabetized().clone();
        let mut a = Saturator::with_schedule(cs.clone(), Schedule::Rounds);
        let mut b = Saturator::with_schedule(cs, Schedule::Stack);
        assert_eq!(a.sat_j().members(), b.sat_j().members(), "{r}");
        for m in 1..=3 {
            assert_eq!(a.sat_corner(Side::R, m).members(), b.sat_corner(Side::R, m).members(), "{r} R{m}");
            assert_eq!(a.sat_fo(m + 1).members(), b.sat_fo(m + 1).members(), "{r} FO{m}");
            assert_eq!(a.sat_sp(m).members(), b.sat_sp(m).members(), "{r} SP{m}");
        }
    }
}

/// For an unordered target, `(s, S)` is a brute cone exactly when
/// `S ∪ {s}` is a brute pointlike.
#[test]
fn unordered_cones_match_pointlikes() {
    for sep in separator_pool().iter().filter(|s| !s.monoid().is_ordered() || s.label == "J_A") {
        for r in CORPUS.iter().take(12) {
            let mu = Solver::new(&joint_morphism(&[&dfa(r)]).unwrap()).unwrap().morphism().clone();
            let g = sep.graph(&mu).unwrap();
            let eq = pointlike::monoid::Relation::equality(sep.monoid().size());
            let cones = brute_conelikes(&g, &eq);
            let points = brute_pointlikes(&g);
            assert!(cones.dominated_by(&ConeFamily::from_pointlikes(&points)), "{} {r}", sep.label);
            for (s, set) in cones.pairs() {
                let mut with_s = set.clone();
                with_s.insert(s);
                assert!(points.denotes(&with_s), "{} {r}", sep.label);
            }
        }
    }
}

#[test]
fn corpus_fits_the_size_bound() {
    assert!(corpus_size_ok());
    assert!(CORPUS.len() >= 20);
}
