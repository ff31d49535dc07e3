//! Quantifier-free types of increasing tuples.
//!
//! A type is stored as the canonical bytes of the generator-marked closure of
//! a realizing tuple. The designated order rigidifies every structure, so two
//! tuples have the same type exactly when these bytes agree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{
    induced_substructure, make_canonical, BignessLevel, ByteReader, ClassKind, FinStructure,
};
use crate::tuples::{is_strictly_increasing, Combinations, TupleSpace};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleType {
    class: ClassKind,
    arity: usize,
    code: Vec<u8>,
}

impl TupleType {
    pub fn class(&self) -> ClassKind {
        self.class
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    pub fn code_base64(&self) -> String {
        base64::engine::general_purpose::STANDARD.encode(&self.code)
    }

    /// Rebuilds a type from its code alone; the arity is the number of
    /// generator positions trailing the structure bytes.
    pub fn from_code(class: ClassKind, code: Vec<u8>) -> Result<Self> {
        let (_, used) = FinStructure::from_canonical_bytes(class, &code)?;
        let rest = code.len() - used;
        if !rest.is_multiple_of(4) {
            return Err(Error::Schema("type code has a truncated generator list".into()));
        }
        let t = TupleType { class, arity: rest / 4, code };
        t.realization()?;
        Ok(t)
    }

    pub fn from_code_base64(class: ClassKind, code: &str) -> Result<Self> {
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(code.as_bytes())
            .map_err(|e| Error::Schema(format!("bad base64 type code: {e}")))?;
        Self::from_code(class, bytes)
    }

    /// The closure structure and the positions of the generators inside it.
    pub fn realization(&self) -> Result<(FinStructure, Vec<usize>)> {
        let (s, used) = FinStructure::from_canonical_bytes(self.class, &self.code)?;
        let mut r = ByteReader { bytes: &self.code, pos: used };
        let gens = r.u32s(self.arity)?.into_iter().map(|g| g as usize).collect();
        Ok((s, gens))
    }

    /// Human-readable summary, used in text reports.
    pub fn describe(&self) -> String {
        let Ok((s, gens)) = self.realization() else {
            return format!("<{}>", self.code_base64());
        };
        match self.class {
            ClassKind::Or => format!("increasing {}-tuple", self.arity),
            ClassKind::ChiOr { .. } => {
                let parts: Vec<String> = gens.iter().map(|&g| s.part(g).unwrap_or(0).to_string()).collect();
                format!("parts ({})", parts.join(","))
            }
            ClassKind::ChiColor { .. } => {
                let cols: Vec<String> = gens.iter().map(|&g| s.color(g).unwrap_or(0).to_string()).collect();
                format!("colors ({})", cols.join(","))
            }
            ClassKind::Ceq => {
                let rel: Vec<&str> = gens
                    .windows(2)
                    .map(|w| if s.block(w[0]) == s.block(w[1]) { "E" } else { "~E" })
                    .collect();
                format!("consecutive [{}]", rel.join(" "))
            }
            _ => format!("{} closure of size {}", self.class, s.size()),
        }
    }
}

impl fmt::Debug for TupleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TupleType({}, {}, {})", self.class, self.arity, self.code_base64())
    }
}

/// `{"class": ..., "arity": n, "code": base64}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleTypeDoc {
    pub class: ClassKind,
    pub arity: usize,
    pub code: String,
}

impl Serialize for TupleType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TupleTypeDoc { class: self.class, arity: self.arity, code: self.code_base64() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TupleType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = TupleTypeDoc::deserialize(deserializer)?;
        let code = base64::engine::general_purpose::STANDARD
            .decode(doc.code.as_bytes())
            .map_err(serde::de::Error::custom)?;
        let t = TupleType { class: doc.class, arity: doc.arity, code };
        t.realization().map_err(serde::de::Error::custom)?;
        Ok(t)
    }
}

/// Type of the strictly increasing `tuple` in `s`.
pub fn tuple_type(s: &FinStructure, tuple: &[usize]) -> Result<TupleType> {
    if !is_strictly_increasing(tuple) {
        return Err(Error::NotIncreasing(tuple.to_vec()));
    }
    if let Some(&x) = tuple.iter().find(|&&x| x >= s.size()) {
        return Err(Error::ElementOutOfRange { element: x, size: s.size() });
    }
    let (closure, map) = induced_substructure(s, tuple)?;
    let mut code = closure.canonical_bytes();
    for &t in tuple {
        let pos = map.binary_search(&t).expect("generators lie in their closure");
        code.extend_from_slice(&(pos as u32).to_le_bytes());
    }
    Ok(TupleType { class: s.class(), arity: tuple.len(), code })
}

/// Type of the sub-tuple selected by the 1-based, strictly increasing `selection`.
pub fn restrict_type(p: &TupleType, selection: &[usize]) -> Result<TupleType> {
    if selection.is_empty() {
        return Err(Error::InvalidSelection("empty selection".into()));
    }
    if !is_strictly_increasing(selection) || selection[0] == 0 || selection[selection.len() - 1] > p.arity {
        return Err(Error::InvalidSelection(format!(
            "{selection:?} is not an increasing subset of 1..={}",
            p.arity
        )));
    }
    let (s, gens) = p.realization()?;
    let sub: Vec<usize> = selection.iter().map(|&i| gens[i - 1]).collect();
    tuple_type(&s, &sub)
}

/// Types of all increasing `arity`-tuples of a structure, interned.
#[derive(Clone, Debug)]
pub struct TypeTable {
    space: TupleSpace,
    ids: Vec<u32>,
    types: Vec<TupleType>,
}

impl TypeTable {
    pub fn build(s: &FinStructure, arity: usize) -> Result<Self> {
        let space = TupleSpace::new(s.size(), arity)?;
        let mut ids = Vec::with_capacity(space.count());
        let mut types = Vec::new();
        let mut intern: HashMap<TupleType, u32> = HashMap::new();
        for t in space.iter() {
            let ty = tuple_type(s, &t)?;
            let next = types.len() as u32;
            let id = *intern.entry(ty.clone()).or_insert_with(|| {
                types.push(ty);
                next
            });
            ids.push(id);
        }
        Ok(Self { space, ids, types })
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn type_id(&self, rank: usize) -> u32 {
        self.ids[rank]
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn types(&self) -> &[TupleType] {
        &self.types
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }
}

/// The increasing `n`-types of `class`, sorted by code.
///
/// Types are read off `make_canonical(class, max(level, n))`. Ordered graphs
/// and hypergraphs have cardinality bigness, whose canonical members realize
/// a single type; for them every labelled structure on `n` points is listed.
pub fn enumerate_types(class: ClassKind, n: usize, level: BignessLevel) -> Result<Vec<TupleType>> {
    if n == 0 {
        return Err(Error::InvalidSelection("arity must be at least 1".into()));
    }
    class.validate()?;
    let gens: Vec<usize> = (0..n).collect();
    let mut out: BTreeMap<Vec<u8>, TupleType> = BTreeMap::new();
    match class {
        ClassKind::OrderedGraph => {
            let pairs: Vec<(usize, usize)> = Combinations::new(n, 2).map(|p| (p[0], p[1])).collect();
            if pairs.len() > 20 {
                return Err(Error::TooLarge(format!("2^{} ordered graphs on {n} points", pairs.len())));
            }
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<_> =
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                let t = tuple_type(&FinStructure::ordered_graph(n, &edges), &gens)?;
                out.insert(t.code.clone(), t);
            }
        }
        ClassKind::Hypergraph { arity_bound, colors } => {
            let sets: Vec<Vec<u32>> = (0..(arity_bound as usize).min(n + 1))
                .flat_map(|k| Combinations::new(n, k))
                .map(|s| s.into_iter().map(|x| x as u32).collect())
                .collect();
            let total = (colors as f64).powi(sets.len() as i32);
            if total > 1e6 {
                return Err(Error::TooLarge(format!("{total} hypergraph types of arity {n}")));
            }
            let mut digits = vec![0u32; sets.len()];
            loop {
                let map = sets.iter().cloned().zip(digits.iter().copied()).collect();
                let t = tuple_type(&FinStructure::hypergraph(arity_bound, colors, n, map), &gens)?;
                out.insert(t.code.clone(), t);
                if !increment(&mut digits, colors) {
                    break;
                }
            }
        }
        _ => {
            let mu = BignessLevel(level.0.max(n as u32));
            let s = make_canonical(class, mu)?;
            let table = TypeTable::build(&s, n)?;
            for t in table.types {
                out.insert(t.code.clone(), t);
            }
        }
    }
    Ok(out.into_values().collect())
}

fn increment(digits: &mut [u32], radix: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
