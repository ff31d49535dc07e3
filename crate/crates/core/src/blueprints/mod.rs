//! Finite blueprints: maps from increasing index types to bounded-depth
//! diagrams, their term models, and extraction from concrete targets.

mod diagram;
mod em;
mod extract;
mod signature;
mod structure;
mod terms;

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

pub use diagram::Diagram;
pub use em::{em_model, EmModel};
pub use extract::{derive_homogeneous, extract_blueprint, Extraction};
pub use signature::{OutputSignature, Symbol};
pub use structure::{check_indiscernible, IndiscernibilityFailure, OutputStructure, OutputStructureDoc};
pub use terms::{Term, TermTable};

use crate::error::Result;
use crate::structures::ClassKind;
use crate::tuples::Combinations;
use crate::types::{restrict_type, TupleType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blueprint {
    pub class: ClassKind,
    pub signature: OutputSignature,
    pub n_max: usize,
    pub depth: usize,
    pub diagrams: BTreeMap<TupleType, Diagram>,
}

/// `{"class", "signature", "n_max", "depth", "diagrams": {code: [true atoms]}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlueprintDoc {
    pub class: ClassKind,
    pub signature: OutputSignature,
    pub n_max: usize,
    pub depth: usize,
    pub diagrams: BTreeMap<String, Vec<String>>,
}

impl Blueprint {
    pub fn to_doc(&self) -> Result<BlueprintDoc> {
        let mut tables = TableCache::new(&self.signature);
        let mut diagrams = BTreeMap::new();
        for (p, d) in &self.diagrams {
            let table = tables.get(p.arity(), self.depth)?;
            diagrams.insert(p.code_base64(), d.atoms(&self.signature, &table));
        }
        Ok(BlueprintDoc {
            class: self.class,
            signature: self.signature.clone(),
            n_max: self.n_max,
            depth: self.depth,
            diagrams,
        })
    }

    pub fn from_doc(doc: &BlueprintDoc) -> Result<Self> {
        doc.class.validate()?;
        doc.signature.validate()?;
        let mut tables = TableCache::new(&doc.signature);
        let mut diagrams = BTreeMap::new();
        for (code, atoms) in &doc.diagrams {
            let p = TupleType::from_code_base64(doc.class, code)?;
            let table = tables.get(p.arity(), doc.depth)?;
            diagrams.insert(p, Diagram::from_atoms(&doc.signature, &table, atoms)?);
        }
        Ok(Self { class: doc.class, signature: doc.signature.clone(), n_max: doc.n_max, depth: doc.depth, diagrams })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_doc()?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

/// Term tables keyed by `(variables, depth)`, built on first use.
pub(crate) struct TableCache {
    signature: OutputSignature,
    tables: HashMap<(usize, usize), Rc<TermTable>>,
}

impl TableCache {
    pub fn new(signature: &OutputSignature) -> Self {
        Self { signature: signature.clone(), tables: HashMap::new() }
    }

    pub fn get(&mut self, vars: usize, depth: usize) -> Result<Rc<TermTable>> {
        if let Some(t) = self.tables.get(&(vars, depth)) {
            return Ok(t.clone());
        }
        let t = Rc::new(TermTable::new(&self.signature, vars, depth)?);
        self.tables.insert((vars, depth), t.clone());
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(rename = "type")]
    pub type_: TupleType,
    /// 1-based positions; empty for the closed part.
    pub subset: Vec<usize>,
    pub atom: String,
}

/// Every failure of `Φ(p^s) = Φ(p)^s`, of the diagram invariants, and of
/// agreement between the closed parts of all diagrams.
pub fn check_coherence(b: &Blueprint) -> Result<Vec<Violation>> {
    let sig = &b.signature;
    let mut tables = TableCache::new(sig);
    let mut out = Vec::new();
    let mut closed: Option<Diagram> = None;
    for (p, d) in &b.diagrams {
        let n = p.arity();
        let all: Vec<usize> = (1..=n).collect();
        let push = |out: &mut Vec<Violation>, subset: Vec<usize>, atom: String| {
            out.push(Violation { type_: p.clone(), subset, atom });
        };
        if p.class() != b.class || n == 0 || n > b.n_max || d.arity != n || d.depth != b.depth {
            push(&mut out, all, format!("diagram shape (arity {}, depth {}) does not fit the blueprint", d.arity, d.depth));
            continue;
        }
        let table = tables.get(n, b.depth)?;
        for atom in d.congruence_violations(sig, &table) {
            push(&mut out, all.clone(), atom);
        }
        for m in 1..n {
            let small = tables.get(m, b.depth)?;
            for sel in Combinations::new(n, m) {
                let one_based: Vec<usize> = sel.iter().map(|&i| i + 1).collect();
                let q = restrict_type(p, &one_based)?;
                let restricted = d.restrict(&table, &small, &sel);
                match b.diagrams.get(&q) {
                    None => push(&mut out, one_based, "no diagram for the restricted type".into()),
                    Some(e) => {
                        if let Some(atom) = e.first_difference(&restricted, sig, &small) {
                            push(&mut out, one_based, atom);
                        }
                    }
                }
            }
        }
        let empty = tables.get(0, b.depth)?;
        let r0 = d.restrict(&table, &empty, &[]);
        match &closed {
            None => closed = Some(r0),
            Some(c) => {
                if let Some(atom) = c.first_difference(&r0, sig, &empty) {
                    push(&mut out, vec![], atom);
                }
            }
        }
    }
    Ok(out)
}
