//! Constructive reductions of type-homogeneity to classical homogeneity.
//!
//! Both reductions build an auxiliary coloring whose colors pack a whole
//! function into one id, find a classically homogeneous set for it with the
//! backtracking finder, and pull the set back to the original structure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::colorings::{find_type_homogeneous, type_homogeneity_witness, Coloring, HomogeneityWitness};
use crate::error::{Error, Result};
use crate::structures::{induced_substructure, is_big, BignessLevel, ClassKind, FinStructure};
use crate::tuples::{sub_tuples, Combinations};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringSummary {
    pub universe: usize,
    pub arity: usize,
    pub colors: u64,
    pub sha256: String,
}

impl ColoringSummary {
    pub fn of(col: &Coloring) -> Self {
        Self {
            universe: col.base().size(),
            arity: col.arity(),
            colors: u64::from(col.colors()),
            sha256: col.digest(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coloring: Option<ColoringSummary>,
    /// Elements found at this stage, in the stage's own labels.
    pub subset: Vec<usize>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionReport {
    pub reduction: String,
    pub input: ColoringSummary,
    pub level: u32,
    pub stages: Vec<Stage>,
    pub subset: Vec<usize>,
    pub witness: HomogeneityWitness,
    pub nodes: u64,
}

/// Checks a report's final subset against the coloring it was computed for.
pub fn verify_report(col: &Coloring, report: &ReductionReport) -> Result<()> {
    if report.input.sha256 != col.digest() {
        return Err(Error::Precondition("report was produced for a different coloring".into()));
    }
    verify_subset(col, &report.subset, BignessLevel(report.level), &report.witness)
}

/// The subset is closed, big and type-homogeneous with exactly `witness`.
pub fn verify_subset(col: &Coloring, subset: &[usize], level: BignessLevel, witness: &HomogeneityWitness) -> Result<()> {
    let (sub, map) = induced_substructure(col.base(), subset)?;
    if map != subset {
        return Err(Error::Precondition(format!("subset {subset:?} is not closed or not sorted")));
    }
    if !is_big(&sub, level) {
        return Err(Error::Precondition(format!("subset is not {}-big", level.0)));
    }
    match type_homogeneity_witness(col, subset)? {
        Some(w) if &w == witness => Ok(()),
        Some(_) => Err(Error::Precondition("witness does not match the coloring".into())),
        None => Err(Error::Precondition("subset is not type-homogeneous".into())),
    }
}

fn packed_colors(colors: u32, digits: usize) -> Result<u32> {
    u32::try_from(digits)
        .ok()
        .and_then(|d| colors.checked_pow(d))
        .ok_or_else(|| Error::TooLarge(format!("{colors}^{digits} packed colors")))
}

/// Auxiliary coloring on the block chain: `d(γ₁..γₙ)` packs the colors of
/// `(χγ₁+i₁, .., χγₙ+iₙ)` over all `(i₁..iₙ)` in lexicographic order, the
/// first index tuple being the most significant digit.
pub fn aux_coloring_chicolor(col: &Coloring) -> Result<Coloring> {
    let base = col.base();
    let ClassKind::ChiColor { chi } = base.class() else {
        return Err(Error::InvalidClass(format!("expected a chi_color base, got {}", base.class())));
    };
    let chi = chi as usize;
    if !base.size().is_multiple_of(chi) {
        return Err(Error::Precondition(format!("universe {} is not divisible by {chi}", base.size())));
    }
    let n = col.arity();
    let lambda = base.size() / chi;
    let offsets: Vec<Vec<usize>> = index_tuples(chi, n);
    let colors = packed_colors(col.colors(), offsets.len())?;
    let space = col.space();
    let chain = FinStructure::chain(lambda);
    let mut tuple = vec![0; n];
    Coloring::from_fn(&chain, n, colors, |gamma| {
        offsets.iter().fold(0u32, |acc, off| {
            for k in 0..n {
                tuple[k] = chi * gamma[k] + off[k];
            }
            acc * col.colors() + col.table()[space.rank(&tuple)]
        })
    })
}

/// All of `0..base` to the power `n`, in lexicographic order.
fn index_tuples(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..base).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Refinement of [`aux_coloring_chicolor`] that also sees tuples with several
/// elements in one block. A block tuple keeps its packed color only when the
/// coloring on the union of its blocks depends on residues alone; otherwise
/// it gets a color of its own, so no homogeneous set of more than `n` blocks
/// contains it. Colors at or above `c^(χ^n)` are these fresh ones.
pub fn refined_aux_coloring_chicolor(col: &Coloring) -> Result<Coloring> {
    let d = aux_coloring_chicolor(col)?;
    let ClassKind::ChiColor { chi } = col.base().class() else { unreachable!("checked by aux_coloring_chicolor") };
    let chi = chi as usize;
    let n = col.arity();
    let fresh = d.colors();
    let total = u32::try_from(d.space().count())
        .ok()
        .and_then(|k| fresh.checked_add(k))
        .ok_or_else(|| Error::TooLarge("refined auxiliary colors exceed u32".into()))?;
    let space = col.space();
    let local: Vec<Vec<usize>> = Combinations::new(chi * n, n).collect();
    let mut tuple = vec![0; n];
    let table: Vec<u32> = d
        .space()
        .iter()
        .enumerate()
        .map(|(rank, gamma)| {
            let mut by_residues: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
            let consistent = local.iter().all(|pos| {
                for (k, &p) in pos.iter().enumerate() {
                    tuple[k] = chi * gamma[p / chi] + p % chi;
                }
                let c = col.table()[space.rank(&tuple)];
                let residues: Vec<usize> = pos.iter().map(|p| p % chi).collect();
                *by_residues.entry(residues).or_insert(c) == c
            });
            if consistent { d.table()[rank] } else { fresh + rank as u32 }
        })
        .collect();
    Coloring::from_table(d.base(), n, total, table)
}

pub fn reduce_chicolor(col: &Coloring, mu: BignessLevel, budget: u64) -> Result<Option<ReductionReport>> {
    let d = refined_aux_coloring_chicolor(col)?;
    let ClassKind::ChiColor { chi } = col.base().class() else { unreachable!("checked by aux_coloring_chicolor") };
    // more than n blocks, so a color of its own cannot be homogeneous
    let level = BignessLevel(mu.0.max(col.arity() as u32 + 1));
    let res = find_type_homogeneous(&d, level, budget)?;
    let Some((x, _)) = res.found else { return Ok(None) };
    let chi = chi as usize;
    let subset: Vec<usize> = x.iter().flat_map(|&g| (0..chi).map(move |i| chi * g + i)).collect();
    let witness = type_homogeneity_witness(col, &subset)?
        .ok_or_else(|| Error::Internal("pulled-back set is not type-homogeneous".into()))?;
    let report = ReductionReport {
        reduction: "chicolor".into(),
        input: ColoringSummary::of(col),
        level: mu.0,
        stages: vec![Stage {
            name: "homogeneous set for the auxiliary coloring".into(),
            coloring: Some(ColoringSummary::of(&d)),
            subset: x,
            nodes: res.nodes,
        }],
        subset,
        witness,
        nodes: res.nodes,
    };
    verify_report(col, &report)?;
    Ok(Some(report))
}

/// Maps from `n` positions to counts summing to `n`, in lexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    index_tuples(n + 1, n).into_iter().filter(|s| s.iter().sum::<usize>() == n).collect()
}

pub fn reduce_ceq(col: &Coloring, mu: BignessLevel, budget: u64) -> Result<Option<ReductionReport>> {
    let base = col.base();
    if base.class() != ClassKind::Ceq {
        return Err(Error::InvalidClass(format!("expected a ceq base, got {}", base.class())));
    }
    let n = col.arity();
    let m = mu.get().max(n);
    let need = mu.get() + n - 1;

    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for x in base.elements() {
        classes.entry(base.block(x).expect("ceq payload")).or_default().push(x);
    }
    let adequate: Vec<Vec<usize>> = classes.into_values().filter(|c| c.len() >= m).collect();
    if adequate.len() < need {
        return Err(Error::Precondition(format!(
            "need at least {need} classes of size at least {m}, found {}",
            adequate.len()
        )));
    }
    // families of adequate classes in lexicographic order, smallest first; the
    // first family on which every stage succeeds is used
    let mut nodes = 0u64;
    for k in need..=adequate.len() {
        for family in Combinations::new(adequate.len(), k) {
            let classes: Vec<&[usize]> = family.iter().map(|&i| adequate[i].as_slice()).collect();
            let (found, used) = ceq_stages(col, &classes, mu, budget.saturating_sub(nodes))?;
            nodes += used;
            if let Some(mut report) = found {
                report.nodes = nodes;
                verify_report(col, &report)?;
                return Ok(Some(report));
            }
            if nodes >= budget {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

fn ceq_stages(col: &Coloring, classes: &[&[usize]], mu: BignessLevel, budget: u64) -> Result<(Option<ReductionReport>, u64)> {
    let n = col.arity();
    let m = mu.get().max(n);
    let need = mu.get() + n - 1;
    let union: Vec<usize> = classes.iter().flat_map(|c| c.iter().copied()).collect();
    let parts: Vec<u32> = classes.iter().enumerate().flat_map(|(p, c)| std::iter::repeat_n(p as u32, c.len())).collect();
    let k = classes.len();
    let or_base = FinStructure::chi_or(k as u32, parts.clone());
    let space = col.space();
    let lifted = Coloring::from_fn(&or_base, n, col.colors(), |t| {
        let orig: Vec<usize> = t.iter().map(|&i| union[i]).collect();
        col.table()[space.rank(&orig)]
    })?;

    // stage 1: type-homogeneous set of the disjoint-chain structure on the family
    let s1 = find_type_homogeneous(&lifted, BignessLevel(m as u32), budget)?;
    let mut nodes = s1.nodes;
    let Some((i2_local, _)) = s1.found else { return Ok((None, nodes)) };
    let i2: Vec<usize> = i2_local.iter().map(|&i| union[i]).collect();

    // stage 2: color of a tuple as a function of its class pattern, checked to be well defined
    let mut by_pattern: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    for t in sub_tuples(&i2_local, n) {
        let pattern: Vec<u32> = t.iter().map(|&i| parts[i]).collect();
        let c = lifted.table()[lifted.space().rank(&t)];
        if *by_pattern.entry(pattern.clone()).or_insert(c) != c {
            return Err(Error::Internal(format!("auxiliary color for class pattern {pattern:?} is not well defined")));
        }
    }
    let a = compositions(n);
    let aux_colors = packed_colors(col.colors(), a.len())?;
    let rep_chain = FinStructure::chain(k);
    let d = Coloring::from_fn(&rep_chain, n, aux_colors, |j| {
        a.iter().fold(0u32, |acc, s| {
            let pattern: Vec<u32> =
                j.iter().zip(s).flat_map(|(&jk, &sk)| std::iter::repeat_n(jk as u32, sk)).collect();
            acc * col.colors() + by_pattern[&pattern]
        })
    })?;

    // stage 3: homogeneous index set, keeping its first mu classes
    let s3 = find_type_homogeneous(&d, BignessLevel(need as u32), budget.saturating_sub(nodes))?;
    nodes += s3.nodes;
    let Some((x, _)) = s3.found else { return Ok((None, nodes)) };
    let keep: Vec<usize> = x[..mu.get()].to_vec();
    let subset: Vec<usize> = i2_local
        .iter()
        .filter(|&&i| keep.contains(&(parts[i] as usize)))
        .map(|&i| union[i])
        .collect();
    let witness = type_homogeneity_witness(col, &subset)?
        .ok_or_else(|| Error::Internal("union of kept classes is not type-homogeneous".into()))?;
    let report = ReductionReport {
        reduction: "ceq".into(),
        input: ColoringSummary::of(col),
        level: mu.0,
        stages: vec![
            Stage { name: "type-homogeneous set over a family of adequate classes".into(), coloring: None, subset: i2, nodes: s1.nodes },
            Stage {
                name: "homogeneous class indices for the auxiliary coloring".into(),
                coloring: Some(ColoringSummary::of(&d)),
                subset: x,
                nodes: s3.nodes,
            },
        ],
        subset,
        witness,
        nodes,
    };
    Ok((Some(report), nodes))
}

/// Brute-force count of the index set, independent of [`compositions`].
pub fn count_compositions_brute(n: usize) -> usize {
    // stars and bars through increasing (n-1)-subsets of 0..2n-1
    Combinations::new(2 * n - 1, n - 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::random_coloring;
    use crate::structures::make_canonical;

    #[test]
    fn aux_packs_two_colors_per_block() {
        let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(3)).unwrap();
        let col = Coloring::from_fn(&base, 1, 2, |t| u32::from(t[0] % 3 == 0)).unwrap();
        let d = aux_coloring_chicolor(&col).unwrap();
        assert_eq!(d.colors(), 4);
        for g in 0..3 {
            let expect = col.table()[2 * g] * 2 + col.table()[2 * g + 1];
            assert_eq!(d.table()[g], expect);
        }
    }

    #[test]
    fn chi_one_is_a_recoding() {
        let base = make_canonical(ClassKind::ChiColor { chi: 1 }, BignessLevel(5)).unwrap();
        let col = random_coloring(&base, 2, 3, 4).unwrap();
        assert_eq!(aux_coloring_chicolor(&col).unwrap().table(), col.table());
    }

    #[test]
    fn composition_count() {
        for n in 1..=5 {
            assert_eq!(compositions(n).len(), count_compositions_brute(n));
        }
        assert_eq!(compositions(2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn ceq_same_class_indicator() {
        let base = FinStructure::ceq_with_sizes(&[3, 3, 3, 3]);
        let col = Coloring::from_fn(&base, 2, 2, |t| u32::from(base.block(t[0]) == base.block(t[1]))).unwrap();
        let rep = reduce_ceq(&col, BignessLevel(2), u64::MAX).unwrap().unwrap();
        assert_eq!(rep.witness.len(), 2);
        let colors: Vec<u32> = rep.witness.0.values().copied().collect();
        assert!(colors.contains(&0) && colors.contains(&1));
    }

    #[test]
    fn constant_chicolor() {
        let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(5)).unwrap();
        let col = Coloring::constant(&base, 2, 2, 1).unwrap();
        let rep = reduce_chicolor(&col, BignessLevel(3), u64::MAX).unwrap().unwrap();
        assert_eq!(rep.subset, vec![0, 1, 2, 3, 4, 5]);
    }
}
