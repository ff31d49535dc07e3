//! Frozen reference values, each recomputed here by brute force.

mod common;

use std::collections::BTreeSet;

use common::{brute_has_mono_clique, brute_type_count};
use sprbench::blueprints::{em_model, Blueprint, BlueprintDoc};
use sprbench::reductions::{aux_coloring_chicolor, reduce_ceq, reduce_chicolor, refined_aux_coloring_chicolor, verify_subset};
use sprbench::structures::{is_big, is_member, make_canonical, BignessLevel, ClassKind, FinStructure};
use sprbench::tuples::Combinations;
use sprbench::types::{enumerate_types, tuple_type};
use sprbench::{
    arrow_check, derive_homogeneous, find_type_homogeneous, ramsey_table, type_homogeneity_witness, ArrowQuery,
    Coloring, Mode, Outcome,
};

fn parity(base: &FinStructure) -> Coloring {
    Coloring::from_fn(base, 2, 2, |t| u32::from(base.part(t[0]) == base.part(t[1]))).unwrap()
}

#[test]
fn canonical_members() {
    let s = make_canonical(ClassKind::ChiOr { chi: 2 }, BignessLevel(2)).unwrap();
    assert_eq!((0..4).map(|x| s.part(x).unwrap()).collect::<Vec<_>>(), vec![0, 0, 1, 1]);
    let s = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(3)).unwrap();
    let p0: Vec<usize> = s.elements().filter(|&x| s.color(x) == Some(0)).collect();
    assert_eq!(p0, vec![0, 2, 4]);
    assert!(!is_member(ClassKind::Ceq, &FinStructure::ceq_from_blocks(3, &[vec![0, 2], vec![1]])));
}

#[test]
fn bigness_examples() {
    assert!(is_big(&FinStructure::chi_or_with_sizes(&[3, 2]), BignessLevel(2)));
    assert!(!is_big(&FinStructure::chi_or_with_sizes(&[3, 2]), BignessLevel(3)));
    let binary = make_canonical(ClassKind::NTree { height: 2 }, BignessLevel(2)).unwrap();
    assert_eq!(binary.size(), 7);
    assert!(is_big(&binary, BignessLevel(2)));
    assert!(!is_big(&binary, BignessLevel(3)));
    assert!(is_big(&FinStructure::ceq_with_sizes(&[2, 2]), BignessLevel(2)));
}

#[test]
fn tree_pairs_under_same_and_different_parents_differ() {
    let t = make_canonical(ClassKind::NTree { height: 2 }, BignessLevel(2)).unwrap();
    // preorder: 0 root, 1 and 4 its children, leaves 2,3 under 1 and 5,6 under 4
    let leaves: Vec<usize> = t.elements().filter(|&x| t.level(x) == Some(2)).collect();
    assert_eq!(leaves, vec![2, 3, 5, 6]);
    let same = tuple_type(&t, &[2, 3]).unwrap();
    let diff = tuple_type(&t, &[2, 5]).unwrap();
    assert_ne!(same, diff);
    // brute force: the meet of a leaf pair is the parent exactly when the parents agree
    assert_eq!(t.meet(2, 3), t.parent(2));
    assert_ne!(t.meet(2, 5), t.parent(2));
}

#[test]
fn type_counts_match_brute_force() {
    let ceq3 = make_canonical(ClassKind::Ceq, BignessLevel(3)).unwrap();
    assert_eq!(brute_type_count(&ceq3, 3), 4);
    assert_eq!(enumerate_types(ClassKind::Ceq, 3, BignessLevel(3)).unwrap().len(), 4);
    for n in 1..=5 {
        let big = make_canonical(ClassKind::Ceq, BignessLevel(n as u32)).unwrap();
        assert_eq!(brute_type_count(&big, n), 1 << (n - 1));
    }
}

#[test]
fn parity_example() {
    let base = FinStructure::chi_or_with_sizes(&[3, 3]);
    let col = parity(&base);
    let w = type_homogeneity_witness(&col, &[0, 1, 2, 3, 4, 5]).unwrap().unwrap();
    assert_eq!(w.len(), 3);
    assert_eq!(w.get(&tuple_type(&base, &[0, 3]).unwrap()), Some(0));
    assert_eq!(w.get(&tuple_type(&base, &[0, 1]).unwrap()), Some(1));
    assert_eq!(w.get(&tuple_type(&base, &[4, 5]).unwrap()), Some(1));
    // no classically monochromatic set meets one part once and the other twice
    for set in (1..=6).flat_map(|k| Combinations::new(6, k)) {
        let a = set.iter().filter(|&&x| x < 3).count();
        let b = set.len() - a;
        if (a >= 1 && b >= 2) || (a >= 2 && b >= 1) {
            let colors: BTreeSet<u32> = Combinations::new(set.len(), 2).map(|p| col.color_of(&[set[p[0]], set[p[1]]]).unwrap()).collect();
            assert!(colors.len() > 1, "{set:?}");
        }
    }
}

#[test]
fn pentagon_and_triangle_oracle() {
    let pentagon = |a: usize, b: usize| u32::from(matches!(b - a, 1 | 4));
    assert!(!brute_has_mono_clique(5, 3, pentagon));
    let col = Coloring::from_fn(&FinStructure::chain(5), 2, 2, |t| pentagon(t[0], t[1])).unwrap();
    let res = find_type_homogeneous(&col, BignessLevel(3), u64::MAX).unwrap();
    assert!(res.found.is_none() && res.exhaustive);
}

/// Independent enumeration of all pair colorings of an `n`-chain.
fn brute_arrow(n: usize) -> (bool, u64) {
    let pairs: Vec<(usize, usize)> = Combinations::new(n, 2).map(|p| (p[0], p[1])).collect();
    let mut failing = 0;
    for mask in 0u64..1 << pairs.len() {
        let color = |a: usize, b: usize| (mask >> pairs.iter().position(|&p| p == (a, b)).unwrap() & 1) as u32;
        if !brute_has_mono_clique(n, 3, color) {
            failing += 1;
        }
    }
    (failing == 0, failing)
}

#[test]
fn ramsey_three_three() {
    assert!(!brute_arrow(5).0);
    assert!(brute_arrow(6).0);
    let holds = arrow_check(&ArrowQuery::new(ClassKind::Or, 6, 3, 2, 2, Mode::Exhaustive)).unwrap();
    assert!(matches!(holds.outcome, Outcome::Holds));
    assert_eq!(holds.colorings_examined, 1 << 15);
    let fails = arrow_check(&ArrowQuery::new(ClassKind::Or, 5, 3, 2, 2, Mode::Exhaustive)).unwrap();
    let Outcome::Fails(w) = fails.outcome else { panic!("expected a witness") };
    assert!(!brute_has_mono_clique(5, 3, |a, b| w.color_of(&[a, b]).unwrap()));
    // the failing 2-colorings of K5 are exactly the 12 labelled pentagons
    assert_eq!(brute_arrow(5).1, 12);
}

#[test]
fn table_least_holds_at_six() {
    let t = ramsey_table(ClassKind::Or, 3, 2, 2, 7, Mode::Exhaustive, 1 << 26).unwrap();
    assert_eq!(t.least_holds, Some(BignessLevel(6)));
}

#[test]
fn three_colors_fail_up_to_ten_by_search() {
    for lambda in 3..=10 {
        let q = ArrowQuery::new(ClassKind::Or, lambda, 3, 2, 3, Mode::CounterexampleSearch { budget: 200_000, seed: 1 });
        let v = arrow_check(&q).unwrap();
        let Outcome::Fails(w) = v.outcome else { panic!("no witness at lambda={lambda}") };
        assert!(!brute_has_mono_clique(lambda as usize, 3, |a, b| w.color_of(&[a, b]).unwrap()));
    }
}

#[test]
fn chicolor_aux_examples() {
    let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(4)).unwrap();
    // col depends only on block indices, so d is constant on equal block patterns
    let col = Coloring::from_fn(&base, 2, 2, |t| u32::from((t[1] / 2 - t[0] / 2) % 2 == 1)).unwrap();
    let d = aux_coloring_chicolor(&col).unwrap();
    for g in Combinations::new(4, 2) {
        let expect = if (g[1] - g[0]) % 2 == 1 { 0b1111 } else { 0 };
        assert_eq!(d.color_of(&g).unwrap(), expect);
    }
    // block-distance parity at six blocks reduces
    let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(6)).unwrap();
    let col = Coloring::from_fn(&base, 2, 2, |t| ((t[1] / 2 - t[0] / 2) % 2) as u32).unwrap();
    let r = reduce_chicolor(&col, BignessLevel(3), u64::MAX).unwrap().unwrap();
    assert_eq!(r.subset, vec![0, 1, 4, 5, 8, 9]);
    // constant coloring keeps the first blocks
    let col = Coloring::constant(&base, 2, 2, 1).unwrap();
    assert_eq!(reduce_chicolor(&col, BignessLevel(3), u64::MAX).unwrap().unwrap().subset, (0..6).collect::<Vec<_>>());
}

/// The unrefined pullback is not sound on its own: tuples inside one block
/// share a type with tuples spread over blocks, and the auxiliary coloring
/// never looks at them. The refined coloring closes that gap.
#[test]
fn unrefined_pullback_counterexample() {
    let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(3)).unwrap();
    // same block gets color 1, different blocks color 0
    let col = Coloring::from_fn(&base, 2, 2, |t| u32::from(t[0] / 2 == t[1] / 2)).unwrap();
    let d = aux_coloring_chicolor(&col).unwrap();
    let x = find_type_homogeneous(&d, BignessLevel(3), u64::MAX).unwrap().found.unwrap().0;
    assert_eq!(x, vec![0, 1, 2]);
    assert!(type_homogeneity_witness(&col, &[0, 1, 2, 3, 4, 5]).unwrap().is_none());
    let refined = refined_aux_coloring_chicolor(&col).unwrap();
    assert!(find_type_homogeneous(&refined, BignessLevel(3), u64::MAX).unwrap().found.is_none());
}

#[test]
fn chicolor_pullback_sound_for_every_homogeneous_set() {
    for lambda in 2..=8 {
        for chi in 1..=2u32 {
            let base = make_canonical(ClassKind::ChiColor { chi }, BignessLevel(lambda)).unwrap();
            for n in 1..=2 {
                for seed in 0..4 {
                    let col = sprbench::random_coloring(&base, n, 2, seed).unwrap();
                    let d = refined_aux_coloring_chicolor(&col).unwrap();
                    let fresh = aux_coloring_chicolor(&col).unwrap().colors();
                    for k in n..=lambda as usize {
                        for x in Combinations::new(lambda as usize, k) {
                            let colors: BTreeSet<u32> = Combinations::new(k, n)
                                .map(|s| d.color_of(&s.iter().map(|&i| x[i]).collect::<Vec<_>>()).unwrap())
                                .collect();
                            // a lone block tuple is homogeneous for any color, so fresh ones need company
                            let hom = colors.len() == 1 && (k > n || colors.iter().all(|&c| c < fresh));
                            if hom {
                                let chi = chi as usize;
                                let pulled: Vec<usize> = x.iter().flat_map(|&g| (0..chi).map(move |i| chi * g + i)).collect();
                                assert!(type_homogeneity_witness(&col, &pulled).unwrap().is_some());
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn ceq_same_class_indicator() {
    let base = FinStructure::ceq_with_sizes(&[3, 3, 3, 3]);
    let col = Coloring::from_fn(&base, 2, 2, |t| u32::from(base.block(t[0]) == base.block(t[1]))).unwrap();
    let r = reduce_ceq(&col, BignessLevel(2), u64::MAX).unwrap().unwrap();
    assert_eq!(r.witness.len(), 2);
    assert_eq!(r.witness.get(&tuple_type(&base, &[0, 1]).unwrap()), Some(1));
    assert_eq!(r.witness.get(&tuple_type(&base, &[0, 3]).unwrap()), Some(0));
    verify_subset(&col, &r.subset, BignessLevel(2), &r.witness).unwrap();
}

#[test]
fn em_shared_image_has_three_elements() {
    let doc: BlueprintDoc = serde_json::from_str(
        r#"{"class":{"kind":"or"},"signature":{"functions":[{"name":"f","arity":1}]},"n_max":2,"depth":1,
            "diagrams":{}}"#,
    )
    .unwrap();
    let mut doc = doc;
    let chain = FinStructure::chain(2);
    doc.diagrams.insert(tuple_type(&chain, &[0]).unwrap().code_base64(), vec![]);
    doc.diagrams.insert(tuple_type(&chain, &[0, 1]).unwrap().code_base64(), vec!["f(x2)=f(x1)".into()]);
    let b = Blueprint::from_doc(&doc).unwrap();
    let m = em_model(&chain, &b, 1).unwrap();
    assert_eq!(m.structure.size, 3);
}

#[test]
fn derive_matches_direct_on_parity() {
    let base = FinStructure::chi_or_with_sizes(&[3, 3]);
    let (set, w) = derive_homogeneous(&parity(&base), BignessLevel(2), u64::MAX).unwrap().unwrap();
    assert_eq!(set, (0..6).collect::<Vec<_>>());
    assert_eq!(w.len(), 3);
}
