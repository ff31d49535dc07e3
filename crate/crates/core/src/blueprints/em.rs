//! Term models generated by a blueprint over an index structure.
//!
//! Terms of bounded depth over the index elements are identified by the
//! congruence generated from the equalities that the blueprint's diagrams
//! assert for every increasing tuple, relations are read off the same
//! diagrams, and the result is checked against every diagram it used.

use std::collections::HashMap;

use serde::Serialize;

use super::diagram::Diagram;
use super::structure::{OutputStructure, OutputStructureDoc};
use super::terms::{Term, TermTable};
use super::{Blueprint, TableCache};
use crate::error::{Error, Result};
use crate::structures::{is_member, FinStructure};
use crate::tuples::Combinations;
use crate::types::tuple_type;

#[derive(Clone, Debug)]
pub struct EmModel {
    pub structure: OutputStructure,
    /// Universe element of each index element.
    pub generators: Vec<u32>,
    /// Terms over the index elements up to the report depth.
    pub terms: TermTable,
    /// Universe element of each term.
    pub element_of: Vec<u32>,
    /// Least term of each universe element.
    pub representatives: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmModelDoc {
    pub structure: OutputStructureDoc,
    pub generators: Vec<u32>,
    pub representatives: Vec<String>,
}

impl EmModel {
    pub fn to_doc(&self) -> EmModelDoc {
        let sig = &self.structure.signature;
        EmModelDoc {
            structure: self.structure.to_doc(),
            generators: self.generators.clone(),
            representatives: self.representatives.iter().map(|&t| self.terms.format(sig, t)).collect(),
        }
    }

    /// Generator assignment in the shape expected by indiscernibility checks.
    pub fn generator_assignment(&self) -> Vec<Vec<u32>> {
        self.generators.iter().map(|&g| vec![g]).collect()
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            self.0[x as usize] = self.0[self.0[x as usize] as usize];
            x = self.0[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        // the least term stays the root
        let (lo, hi) = (a.min(b), a.max(b));
        self.0[hi as usize] = lo;
        true
    }
}

/// One instantiated diagram: the index tuple, its truncated diagram over
/// `small` and the images of the small terms among the model terms.
struct Instance {
    tuple: Vec<usize>,
    diagram: Diagram,
    image: Vec<u32>,
}

pub fn em_model(index: &FinStructure, b: &Blueprint, depth: usize) -> Result<EmModel> {
    if depth > b.depth {
        return Err(Error::Precondition(format!("report depth {depth} exceeds blueprint depth {}", b.depth)));
    }
    if index.class() != b.class || !is_member(b.class, index) {
        return Err(Error::NotMember(format!("index is not a member of {}", b.class)));
    }
    let sig = &b.signature;
    let n = index.size();
    let big = TermTable::new(sig, n, depth)?;
    let mut tables = TableCache::new(sig);

    let mut instances: Vec<Instance> = Vec::new();
    if let Some((p, d)) = b.diagrams.iter().next() {
        let full = tables.get(p.arity(), b.depth)?;
        let empty = tables.get(0, b.depth)?;
        let closed = d.restrict(&full, &empty, &[]).truncate(&empty, depth);
        let small = tables.get(0, depth)?;
        instances.push(Instance { tuple: vec![], diagram: closed, image: small.substitute(&big, &[]) });
    }
    for k in 1..=b.n_max.min(n) {
        let full = tables.get(k, b.depth)?;
        let small = tables.get(k, depth)?;
        for t in Combinations::new(n, k) {
            let p = tuple_type(index, &t)?;
            let d = b
                .diagrams
                .get(&p)
                .ok_or_else(|| Error::Precondition(format!("no diagram for the type of {t:?} ({})", p.describe())))?;
            let image = small.substitute(&big, &t);
            instances.push(Instance { tuple: t, diagram: d.truncate(&full, depth), image });
        }
    }

    // equalities, then congruence closure
    let mut uf = UnionFind((0..big.len() as u32).collect());
    for inst in &instances {
        for (u, &c) in inst.diagram.class_of.iter().enumerate() {
            uf.union(inst.image[u], inst.image[c as usize]);
        }
    }
    loop {
        let mut changed = false;
        let mut seen: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        for (id, t) in big.terms().iter().enumerate() {
            if let Term::App(f, args) = t {
                let key = (*f, args.iter().map(|&a| uf.find(a)).collect());
                match seen.get(&key) {
                    Some(&other) => changed |= uf.union(other, id as u32),
                    None => {
                        seen.insert(key, id as u32);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut element_of = vec![0u32; big.len()];
    let mut representatives = Vec::new();
    let mut root_element: HashMap<u32, u32> = HashMap::new();
    for id in 0..big.len() as u32 {
        let root = uf.find(id);
        let e = *root_element.entry(root).or_insert_with(|| {
            representatives.push(id);
            representatives.len() as u32 - 1
        });
        element_of[id as usize] = e;
    }
    let size = representatives.len();

    // which instances decide atoms among which elements
    let words = instances.len().div_ceil(64).max(1);
    let mut covered = vec![0u64; size * words];
    for (i, inst) in instances.iter().enumerate() {
        for &t in &inst.image {
            covered[element_of[t as usize] as usize * words + i / 64] |= 1 << (i % 64);
        }
    }
    let decided = |elems: &[u32]| -> bool {
        (0..words).any(|w| elems.iter().fold(u64::MAX, |acc, &e| acc & covered[e as usize * words + w]) != 0)
    };
    let rep_name = |e: u32| big.format(sig, representatives[e as usize]);
    for a in 0..size as u32 {
        for b2 in a + 1..size as u32 {
            if !decided(&[a, b2]) {
                return Err(Error::SupportOverflow(format!("{}={}", rep_name(a), rep_name(b2))));
            }
        }
    }
    for sym in &sig.relations {
        if size == 0 && sym.arity > 0 {
            continue;
        }
        let mut args = vec![0u32; sym.arity];
        'tuples: loop {
            if !decided(&args) {
                let inner: Vec<String> = args.iter().map(|&e| rep_name(e)).collect();
                return Err(Error::SupportOverflow(format!("{}({})", sym.name, inner.join(","))));
            }
            for i in (0..args.len()).rev() {
                args[i] += 1;
                if (args[i] as usize) < size {
                    continue 'tuples;
                }
                args[i] = 0;
            }
            break;
        }
    }

    let mut structure = OutputStructure::empty(sig, size);
    for (id, t) in big.terms().iter().enumerate() {
        let e = element_of[id];
        match t {
            Term::Var(_) => {}
            Term::Const(c) => structure.constants[*c as usize] = e,
            Term::App(f, args) => {
                let key = args.iter().map(|&a| element_of[a as usize]).collect();
                structure.functions[*f as usize].insert(key, e);
            }
        }
    }
    for inst in &instances {
        for (r, rel) in inst.diagram.relations.iter().enumerate() {
            for tuple in rel {
                structure.relations[r]
                    .insert(tuple.iter().map(|&u| element_of[inst.image[u as usize] as usize]).collect());
            }
        }
    }
    let generators: Vec<u32> = (0..n).map(|i| element_of[i]).collect();

    // every instantiated diagram must be reproduced exactly
    for inst in &instances {
        let small = tables.get(inst.tuple.len(), depth)?;
        let elems: Vec<u32> = inst.tuple.iter().map(|&i| generators[i]).collect();
        let got = structure.diagram(&small, &elems)?;
        if let Some(atom) = inst.diagram.first_difference(&got, sig, &small) {
            return Err(Error::Internal(format!(
                "congruence contradiction at tuple {:?} on atom {atom}; the blueprint is not coherent",
                inst.tuple
            )));
        }
    }

    Ok(EmModel { structure, generators, terms: big, element_of, representatives })
}
