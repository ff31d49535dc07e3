//! Blueprint extraction by iterated refinement, and homogeneous sets read
//! off an extracted blueprint.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::diagram::Diagram;
use super::signature::{OutputSignature, Symbol};
use super::structure::OutputStructure;
use super::{check_coherence, Blueprint, TableCache};
use crate::colorings::{find_type_homogeneous, type_homogeneity_witness, Coloring, HomogeneityWitness};
use crate::error::{Error, Result};
use crate::reductions::verify_subset;
use crate::structures::{induced_substructure, is_big, is_member, BignessLevel, FinStructure};
use crate::tuples::{sub_tuples, Combinations};
use crate::types::tuple_type;

#[derive(Clone, Debug)]
pub struct Extraction {
    pub blueprint: Blueprint,
    /// The refined index subset, closed and sorted.
    pub subset: Vec<usize>,
    pub nodes: u64,
}

/// Refines the index level by level until the image diagram of every
/// increasing tuple depends only on the tuple's type, then reads off the
/// blueprint. `levels[k-1]` is the bigness kept at arity `k`.
pub fn extract_blueprint(
    index: &FinStructure,
    target: &OutputStructure,
    f: &[u32],
    n_max: usize,
    depth: usize,
    levels: &[BignessLevel],
    budget: u64,
) -> Result<Option<Extraction>> {
    if f.len() != index.size() {
        return Err(Error::Precondition(format!("map covers {} of {} index elements", f.len(), index.size())));
    }
    if f.iter().collect::<BTreeSet<_>>().len() != f.len() {
        return Err(Error::Precondition("map into the target is not injective".into()));
    }
    if let Some(&v) = f.iter().find(|&&v| v as usize >= target.size) {
        return Err(Error::ElementOutOfRange { element: v as usize, size: target.size });
    }
    if levels.len() != n_max || levels.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Precondition(format!("need {n_max} non-increasing bigness levels")));
    }
    if !is_member(index.class(), index) {
        return Err(Error::NotMember("index structure".into()));
    }
    if let Some(&first) = levels.first() {
        if !is_big(index, first) {
            return Err(Error::Precondition(format!("index is not {}-big", first.0)));
        }
    }
    target.validate()?;
    let sig = &target.signature;
    let mut tables = TableCache::new(sig);
    let mut current: Vec<usize> = (0..index.size()).collect();
    let mut nodes = 0;
    for (k, &level) in (1..=n_max).zip(levels) {
        let (sub, map) = induced_substructure(index, &current)?;
        let table = tables.get(k, depth)?;
        let mut ids: HashMap<Diagram, u32> = HashMap::new();
        let mut colors = Vec::new();
        for t in Combinations::new(sub.size(), k) {
            let elems: Vec<u32> = t.iter().map(|&i| f[map[i]]).collect();
            let d = target.diagram(&table, &elems)?;
            let next = ids.len() as u32;
            colors.push(*ids.entry(d).or_insert(next));
        }
        let col = Coloring::from_table(&sub, k, (ids.len() as u32).max(1), colors)?;
        let whole: Vec<usize> = (0..sub.size()).collect();
        if is_big(&sub, level) && type_homogeneity_witness(&col, &whole)?.is_some() {
            continue;
        }
        let res = find_type_homogeneous(&col, level, budget)?;
        nodes += res.nodes;
        let Some((set, _)) = res.found else { return Ok(None) };
        current = set.iter().map(|&i| map[i]).collect();
    }

    let mut diagrams: BTreeMap<_, Diagram> = BTreeMap::new();
    for k in 1..=n_max.min(current.len()) {
        let table = tables.get(k, depth)?;
        for t in sub_tuples(&current, k) {
            let elems: Vec<u32> = t.iter().map(|&i| f[i]).collect();
            let d = target.diagram(&table, &elems)?;
            let p = tuple_type(index, &t)?;
            match diagrams.get(&p) {
                Some(prev) if *prev != d => {
                    return Err(Error::Internal(format!("refined set is not homogeneous at tuple {t:?}")));
                }
                Some(_) => {}
                None => {
                    diagrams.insert(p, d);
                }
            }
        }
    }
    let blueprint = Blueprint { class: index.class(), signature: sig.clone(), n_max, depth, diagrams };
    if let Some(v) = check_coherence(&blueprint)?.first() {
        return Err(Error::Internal(format!("extracted blueprint is incoherent at {:?} on {}", v.subset, v.atom)));
    }
    Ok(Some(Extraction { blueprint, subset: current, nodes }))
}

/// Encodes the coloring as a two-sorted structure with an `(n+1)`-ary
/// relation `C` and one constant per color, extracts a blueprint at depth 0
/// and reads the witness off the unique color each diagram asserts.
pub fn derive_homogeneous(
    col: &Coloring,
    level: BignessLevel,
    budget: u64,
) -> Result<Option<(Vec<usize>, HomogeneityWitness)>> {
    let base = col.base();
    let n = col.arity();
    let size = base.size();
    let c = col.colors() as usize;
    if !is_big(base, level) {
        return Ok(None);
    }
    let sig = OutputSignature {
        relations: vec![Symbol { name: "C".into(), arity: n + 1 }],
        functions: vec![],
        constants: (0..c).map(|i| format!("color{i}")).collect(),
    };
    let mut target = OutputStructure::empty(&sig, size + c);
    for (i, slot) in target.constants.iter_mut().enumerate() {
        *slot = (size + i) as u32;
    }
    for (t, &color) in col.space().iter().zip(col.table()) {
        let mut row: Vec<u32> = t.iter().map(|&x| x as u32).collect();
        row.push(size as u32 + color);
        target.relations[0].insert(row);
    }
    let f: Vec<u32> = (0..size as u32).collect();
    let Some(ex) = extract_blueprint(base, &target, &f, n, 0, &vec![level; n], budget)? else {
        return Ok(None);
    };
    // at depth 0 the terms are x1..xn followed by the color constants
    let mut witness = BTreeMap::new();
    for (p, d) in ex.blueprint.diagrams.iter().filter(|(p, _)| p.arity() == n) {
        let vars: Vec<u32> = (0..n as u32).collect();
        let asserted: Vec<usize> = (0..c)
            .filter(|&j| {
                let mut args = vars.clone();
                args.push((n + j) as u32);
                d.holds(0, &args)
            })
            .collect();
        let [j] = asserted[..] else {
            return Err(Error::Internal(format!("diagram of {} asserts {} colors", p.describe(), asserted.len())));
        };
        witness.insert(p.clone(), j as u32);
    }
    let witness = HomogeneityWitness(witness);
    verify_subset(col, &ex.subset, level, &witness)
        .map_err(|e| Error::Internal(format!("derived set failed verification: {e}")))?;
    Ok(Some((ex.subset, witness)))
}
