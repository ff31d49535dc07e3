use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::diagram::Diagram;
use super::signature::OutputSignature;
use super::terms::{Term, TermTable};
use crate::error::{Error, Result};
use crate::structures::FinStructure;
use crate::tuples::Combinations;
use crate::types::{tuple_type, TupleType};

/// A finite structure over an output signature on `0..size`. Functions may
/// be partial, which is how term models truncated at a depth are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputStructure {
    pub signature: OutputSignature,
    pub size: usize,
    pub functions: Vec<BTreeMap<Vec<u32>, u32>>,
    pub constants: Vec<u32>,
    pub relations: Vec<BTreeSet<Vec<u32>>>,
}

impl OutputStructure {
    pub fn empty(signature: &OutputSignature, size: usize) -> Self {
        Self {
            signature: signature.clone(),
            size,
            functions: vec![BTreeMap::new(); signature.functions.len()],
            constants: vec![0; signature.constants.len()],
            relations: vec![BTreeSet::new(); signature.relations.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.signature.validate()?;
        let sig = &self.signature;
        let in_range = |v: u32| (v as usize) < self.size;
        if self.functions.len() != sig.functions.len()
            || self.constants.len() != sig.constants.len()
            || self.relations.len() != sig.relations.len()
        {
            return Err(Error::Schema("structure does not match its signature".into()));
        }
        for (f, map) in self.functions.iter().enumerate() {
            for (args, &v) in map {
                if args.len() != sig.functions[f].arity || !args.iter().all(|&a| in_range(a)) || !in_range(v) {
                    return Err(Error::Schema(format!("bad entry {args:?} -> {v} of `{}`", sig.functions[f].name)));
                }
            }
        }
        if let Some(&c) = self.constants.iter().find(|&&c| !in_range(c)) {
            return Err(Error::Schema(format!("constant value {c} out of range")));
        }
        for (r, rel) in self.relations.iter().enumerate() {
            for t in rel {
                if t.len() != sig.relations[r].arity || !t.iter().all(|&a| in_range(a)) {
                    return Err(Error::Schema(format!("bad tuple {t:?} of `{}`", sig.relations[r].name)));
                }
            }
        }
        Ok(())
    }

    /// Value of every term of `table` with variable `i` bound to `elems[i]`.
    pub fn values(&self, table: &TermTable, elems: &[u32]) -> Result<Vec<u32>> {
        let mut out: Vec<u32> = Vec::with_capacity(table.len());
        for (id, t) in table.terms().iter().enumerate() {
            let v = match t {
                Term::Var(i) => elems[*i as usize],
                Term::Const(c) => self.constants[*c as usize],
                Term::App(f, args) => {
                    let key: Vec<u32> = args.iter().map(|&a| out[a as usize]).collect();
                    *self.functions[*f as usize].get(&key).ok_or_else(|| {
                        Error::Precondition(format!(
                            "`{}` is undefined on {key:?} (term {})",
                            self.signature.functions[*f as usize].name,
                            table.format(&self.signature, id as u32)
                        ))
                    })?
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    pub fn diagram(&self, table: &TermTable, elems: &[u32]) -> Result<Diagram> {
        let values = self.values(table, elems)?;
        Ok(Diagram::from_values(table.vars(), table.depth(), &values, &self.relations))
    }

    pub fn to_doc(&self) -> OutputStructureDoc {
        let sig = &self.signature;
        OutputStructureDoc {
            signature: sig.clone(),
            size: self.size,
            functions: self
                .functions
                .iter()
                .enumerate()
                .map(|(f, map)| {
                    let rows = map.iter().map(|(a, &v)| a.iter().copied().chain([v]).collect()).collect();
                    (sig.functions[f].name.clone(), rows)
                })
                .collect(),
            constants: self.constants.iter().enumerate().map(|(c, &v)| (sig.constants[c].clone(), v)).collect(),
            relations: self
                .relations
                .iter()
                .enumerate()
                .map(|(r, rel)| (sig.relations[r].name.clone(), rel.iter().cloned().collect()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &OutputStructureDoc) -> Result<Self> {
        doc.signature.validate()?;
        let sig = &doc.signature;
        let mut s = Self::empty(sig, doc.size);
        for (name, rows) in &doc.functions {
            let f = sig.function(name).ok_or_else(|| Error::Schema(format!("unknown function `{name}`")))?;
            for row in rows {
                let (v, args) = row.split_last().ok_or_else(|| Error::Schema(format!("empty row for `{name}`")))?;
                if s.functions[f].insert(args.to_vec(), *v).is_some() {
                    return Err(Error::Schema(format!("`{name}` has two values on {args:?}")));
                }
            }
        }
        for (c, name) in sig.constants.iter().enumerate() {
            s.constants[c] =
                *doc.constants.get(name).ok_or_else(|| Error::Schema(format!("constant `{name}` has no value")))?;
        }
        if let Some(name) = doc.constants.keys().find(|k| sig.constant(k).is_none()) {
            return Err(Error::Schema(format!("unknown constant `{name}`")));
        }
        for (name, rows) in &doc.relations {
            let r = sig.relation(name).ok_or_else(|| Error::Schema(format!("unknown relation `{name}`")))?;
            s.relations[r].extend(rows.iter().cloned());
        }
        s.validate()?;
        Ok(s)
    }
}

/// JSON form; function rows are `[args.., value]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputStructureDoc {
    pub signature: OutputSignature,
    pub size: usize,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<Vec<u32>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, u32>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndiscernibilityFailure {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub atom: String,
}

/// Checks that equal index types give equal image diagrams.
///
/// Each index element is assigned a tuple of target elements, all of the same
/// length; the image of an index tuple is the concatenation.
pub fn check_indiscernible(
    index: &FinStructure,
    target: &OutputStructure,
    assignment: &[Vec<u32>],
    max_arity: usize,
    depth: usize,
) -> Result<Option<IndiscernibilityFailure>> {
    if assignment.len() != index.size() {
        return Err(Error::Precondition(format!(
            "assignment covers {} elements, index has {}",
            assignment.len(),
            index.size()
        )));
    }
    let width = assignment.first().map_or(0, Vec::len);
    if assignment.iter().any(|a| a.len() != width) {
        return Err(Error::Precondition("assigned tuples differ in length".into()));
    }
    if let Some(&v) = assignment.iter().flatten().find(|&&v| v as usize >= target.size) {
        return Err(Error::ElementOutOfRange { element: v as usize, size: target.size });
    }
    for k in 1..=max_arity.min(index.size()) {
        let table = TermTable::new(&target.signature, k * width, depth)?;
        let mut seen: BTreeMap<TupleType, (Vec<usize>, Diagram)> = BTreeMap::new();
        for t in Combinations::new(index.size(), k) {
            let elems: Vec<u32> = t.iter().flat_map(|&i| assignment[i].iter().copied()).collect();
            let d = target.diagram(&table, &elems)?;
            match seen.get(&tuple_type(index, &t)?) {
                None => {
                    seen.insert(tuple_type(index, &t)?, (t, d));
                }
                Some((first, d0)) => {
                    if let Some(atom) = d0.first_difference(&d, &target.signature, &table) {
                        return Ok(Some(IndiscernibilityFailure { first: first.clone(), second: t, atom }));
                    }
                }
            }
        }
    }
    Ok(None)
}
