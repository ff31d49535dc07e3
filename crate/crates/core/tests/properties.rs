mod common;

use common::{random_member, rng, KINDS};
use proptest::prelude::*;
use rand::Rng;
use sprbench::structures::{closure, induced_substructure, is_big, is_member, BignessLevel, ClassKind, FinStructure};
use sprbench::tuples::{Combinations, TupleSpace};
use sprbench::types::{restrict_type, tuple_type, TupleType};
use sprbench::{random_coloring, type_homogeneity_witness, Coloring};

fn member(kind: usize, seed: u64, max: usize) -> FinStructure {
    let s = random_member(kind, max, &mut rng(seed));
    assert!(is_member(s.class(), &s), "generator produced a non-member: {s:?}");
    s
}

/// Random increasing tuple of length at most `max` and a nonempty sub-selection of it.
fn tuple_and_selection(s: &FinStructure, seed: u64, max: usize) -> (Vec<usize>, Vec<usize>) {
    let mut r = rng(seed ^ 0xabcd);
    let n = r.random_range(1..=max.min(s.size()));
    let mut t: Vec<usize> = (0..s.size()).collect();
    while t.len() > n {
        t.remove(r.random_range(0..t.len()));
    }
    let mut sel: Vec<usize> = (1..=n).filter(|_| r.random_bool(0.6)).collect();
    if sel.is_empty() {
        sel.push(r.random_range(1..=n));
    }
    (t, sel)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn restriction_commutes_with_subselection(kind in 0..KINDS, seed: u64) {
        let s = member(kind, seed, 9);
        let (t, sel) = tuple_and_selection(&s, seed, 4);
        let sub: Vec<usize> = sel.iter().map(|&i| t[i - 1]).collect();
        prop_assert_eq!(restrict_type(&tuple_type(&s, &t).unwrap(), &sel).unwrap(), tuple_type(&s, &sub).unwrap());
    }

    #[test]
    fn realizations_realize_their_type(kind in 0..KINDS, seed: u64) {
        let s = member(kind, seed, 8);
        let (t, _) = tuple_and_selection(&s, seed, 3);
        let p = tuple_type(&s, &t).unwrap();
        let (r, gens) = p.realization().unwrap();
        // colored chains are members only when colors cycle by position
        if !matches!(p.class(), ClassKind::ChiColor { .. }) {
            prop_assert!(is_member(r.class(), &r));
        }
        prop_assert_eq!(tuple_type(&r, &gens).unwrap(), p.clone());
        prop_assert_eq!(TupleType::from_code_base64(p.class(), &p.code_base64()).unwrap(), p);
    }

    #[test]
    fn bigness_is_monotone_in_level(kind in 0..KINDS, seed: u64, level in 0u32..5) {
        let s = member(kind, seed, 10);
        if is_big(&s, BignessLevel(level + 1)) {
            prop_assert!(is_big(&s, BignessLevel(level)));
        }
    }

    #[test]
    fn closed_substructures_are_members_with_inherited_types(kind in 0..KINDS, seed: u64) {
        let s = member(kind, seed, 9);
        let (t, _) = tuple_and_selection(&s, seed, 4);
        let c = closure(&s, &t).unwrap();
        let (sub, map) = induced_substructure(&s, &c).unwrap();
        if !matches!(s.class(), ClassKind::ChiColor { .. }) {
            prop_assert!(is_member(sub.class(), &sub));
        }
        let local: Vec<usize> = t.iter().map(|x| map.iter().position(|y| y == x).unwrap()).collect();
        prop_assert_eq!(tuple_type(&sub, &local).unwrap(), tuple_type(&s, &t).unwrap());
    }

    #[test]
    fn structure_json_roundtrip(kind in 0..KINDS, seed: u64) {
        let s = member(kind, seed, 9);
        prop_assert_eq!(FinStructure::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn tuple_rank_roundtrip(n in 1usize..12, k in 1usize..5, pick: u64) {
        prop_assume!(k <= n);
        let space = TupleSpace::new(n, k).unwrap();
        let r = (pick % space.count() as u64) as usize;
        prop_assert_eq!(space.rank(&space.unrank(r)), r);
    }

    /// A coloring that factors through types is type-homogeneous on every
    /// closed subset, with the same witness entries.
    #[test]
    fn type_factored_colorings_are_homogeneous(kind in 0..KINDS, seed: u64) {
        let s = member(kind, seed, 7);
        prop_assume!(s.size() >= 2);
        let n = 2;
        let col = Coloring::from_fn(&s, n, 3, |t| {
            let code = tuple_type(&s, t).unwrap().code_base64();
            (code.bytes().map(u32::from).sum::<u32>()) % 3
        }).unwrap();
        let all: Vec<usize> = s.elements().collect();
        let w = type_homogeneity_witness(&col, &all).unwrap().unwrap();
        for k in 1..=s.size() {
            for set in Combinations::new(s.size(), k).take(20) {
                let c = closure(&s, &set).unwrap();
                if !is_member(s.class(), &induced_substructure(&s, &c).unwrap().0) {
                    continue;
                }
                if let Some(sub) = type_homogeneity_witness(&col, &c).unwrap() {
                    for e in sub.entries() {
                        prop_assert_eq!(w.get(&e.type_), Some(e.color));
                    }
                } else {
                    prop_assert!(false, "factored coloring not homogeneous on {:?}", c);
                }
            }
        }
    }

    #[test]
    fn coloring_doc_roundtrip(kind in 0..KINDS, seed: u64, c in 1u32..4) {
        let s = member(kind, seed, 7);
        prop_assume!(s.size() >= 2);
        let col = random_coloring(&s, 2, c, seed).unwrap();
        prop_assert_eq!(Coloring::from_json(&s, &col.to_json()).unwrap(), col);
    }
}
