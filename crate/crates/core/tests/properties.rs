use std::collections::BTreeSet;

use proptest::prelude::*;

use crystalcone::cartan::{build_cartan, AdaptedSeq, DoubleIndex};
use crystalcone::linform::LinForm;
use crystalcone::moncrys::{self, detrop, gen_crystal, trop, LaurentMonomial};
use crystalcone::tableaux::{tab_forms, BoxType};
use crystalcone::verify::{build_ineq_system, conjecture_check, simplify};
use crystalcone::zcrystal::{self, ZSeq};

fn seq(tag: &str) -> AdaptedSeq {
    AdaptedSeq::default_for(build_cartan(tag.parse().unwrap()).unwrap())
}

fn reversed(tag: &str) -> AdaptedSeq {
    let c = build_cartan(tag.parse().unwrap()).unwrap();
    let n = c.rank();
    AdaptedSeq::from_period(c, &(1..=n).rev().collect::<Vec<_>>()).unwrap()
}

const FINITE: [&str; 10] = ["A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4"];

#[test]
fn dual_crystals_tropicalize_to_tableau_forms() {
    for sq in FINITE.iter().flat_map(|t| [seq(t), reversed(t)]) {
        let tag = sq.lie_type();
        let bt = BoxType::for_type(tag).unwrap();
        for k in 1..=sq.rank() {
            for s in 1..=3 {
                let m = gen_crystal(&sq.dual(), s as i64, k, usize::MAX);
                assert!(m.complete);
                let forms: BTreeSet<LinForm> = m.nodes.iter().map(|x| trop(x).unwrap()).collect();
                assert_eq!(forms.len(), m.len(), "Trop is injective");
                assert_eq!(forms, tab_forms(&sq, bt, k, s).unwrap(), "{tag} k={k} s={s}");
            }
        }
    }
}

/// Solution sets of two systems on [-1, 4]^vars, with `zeros` imposed on the second.
fn same_solutions(vars: &[DoubleIndex], a: &[LinForm], b: &[LinForm], zeros: &BTreeSet<DoubleIndex>, window: usize) {
    let compile = |f: &LinForm| -> Vec<(usize, i64)> {
        f.truncated(window)
            .to_i64_terms()
            .unwrap()
            .into_iter()
            .map(|(d, c)| (vars.iter().position(|&v| v == d).unwrap(), c))
            .collect()
    };
    let ca: Vec<_> = a.iter().map(compile).collect();
    let cb: Vec<_> = b.iter().map(compile).collect();
    let zpos: Vec<usize> = zeros.iter().map(|z| vars.iter().position(|v| v == z).unwrap()).collect();
    let holds =
        |fs: &[Vec<(usize, i64)>], p: &[i64]| fs.iter().all(|f| f.iter().map(|&(i, c)| c * p[i]).sum::<i64>() >= 0);
    let n = vars.len();
    let mut p = vec![-1i64; n];
    loop {
        assert_eq!(holds(&ca, &p), holds(&cb, &p) && zpos.iter().all(|&i| p[i] == 0), "{p:?}");
        let mut i = 0;
        while i < n && p[i] == 4 {
            p[i] = -1;
            i += 1;
        }
        if i == n {
            break;
        }
        p[i] += 1;
    }
}

#[test]
fn simplify_keeps_the_solution_set() {
    for (tag, s_max) in [("A2", 3), ("C2", 3), ("B2", 3), ("A3", 2)] {
        for sq in [seq(tag), reversed(tag)] {
            let system = build_ineq_system(&sq, s_max, None, Some(s_max)).unwrap();
            let reduced = simplify(&system);
            let vars: Vec<DoubleIndex> =
                (1..=s_max).flat_map(|s| (1..=sq.rank()).map(move |k| DoubleIndex::new(s, k))).collect();
            let original: Vec<LinForm> = system.forms.keys().cloned().collect();
            let kept: Vec<LinForm> = reduced.forms.iter().cloned().collect();
            same_solutions(&vars, &original, &kept, &reduced.forced_zero, s_max);
            // Running the reducer on its own output changes nothing.
            let again = crystalcone::verify::simplify_forms(&reduced.forms, s_max);
            assert_eq!(again.forms, reduced.forms, "{tag}");
            assert!(again.forced_zero.is_empty());
        }
    }
}

#[test]
fn deeper_inequality_systems_keep_matching_layers() {
    for tag in ["A^1:3", "A1^1", "D^2:3"] {
        let sq = seq(tag);
        let depth_image = 4;
        let window = crystalcone::verify::image_levels(&sq, depth_image) + 1;
        let mut prev: Option<(BTreeSet<LinForm>, Vec<bool>)> = None;
        for d in [2, 4, 6, 8] {
            let system = build_ineq_system(&sq, window, Some(d), Some(window)).unwrap();
            let forms: BTreeSet<LinForm> = system.forms.keys().cloned().collect();
            let report = conjecture_check(&sq, window, Some(d), depth_image).unwrap();
            let matched: Vec<bool> = report.layers.iter().map(|l| l.missing.is_empty() && l.extra.is_empty()).collect();
            assert!(report.layers.iter().all(|l| l.missing.is_empty()), "{tag}: image point cut off at depth {d}");
            if let Some((pf, pm)) = &prev {
                assert!(pf.is_subset(&forms), "{tag}");
                for (layer, (&before, &now)) in pm.iter().zip(&matched).enumerate() {
                    assert!(!before || now, "{tag}: layer {layer} lost at depth {d}");
                }
            }
            prev = Some((forms, matched));
        }
    }
}

#[test]
fn crystal_sizes_match_tableau_counts() {
    for sq in FINITE.iter().flat_map(|t| [seq(t), reversed(t)]) {
        let tag = sq.lie_type();
        let bt = BoxType::for_type(tag).unwrap();
        for k in 1..=sq.rank() {
            let m = gen_crystal(&sq.dual(), 1, k, usize::MAX);
            assert_eq!(m.len(), tab_forms(&sq, bt, k, 1).unwrap().len(), "{tag} k={k}");
        }
    }
}

fn monomial_strategy(n: usize) -> impl Strategy<Value = LaurentMonomial> {
    prop::collection::vec((1i64..6, 1..=n, -3i64..4), 0..7).prop_map(LaurentMonomial::from_factors)
}

proptest! {
    #[test]
    fn axioms_on_arbitrary_monomials(x in monomial_strategy(3), tag in prop::sample::select(vec!["A3", "B3", "C3", "A^1:3", "D^2:3"])) {
        let sq = seq(tag);
        let bad = moncrys::axiom_violations(&sq, &x);
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn axioms_on_arbitrary_sequences(entries in prop::collection::vec((1usize..13, -2i64..4), 0..6), tag in prop::sample::select(vec!["A3", "B3", "C3", "A^1:3", "C^1:3"])) {
        let sq = seq(tag);
        let a = ZSeq::from_pairs(entries);
        let bad = zcrystal::axiom_violations(&sq, &a);
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn trop_detrop_round_trip(x in monomial_strategy(4)) {
        let f = trop(&x).unwrap();
        prop_assert_eq!(detrop(&f).unwrap(), x);
    }

    #[test]
    fn trop_is_additive(x in monomial_strategy(3), y in monomial_strategy(3)) {
        let xy = x.mul_pow(&y, 1);
        prop_assert_eq!(trop(&xy).unwrap(), &trop(&x).unwrap() + &trop(&y).unwrap());
    }
}
