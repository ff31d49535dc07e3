//! Colorings of increasing tuples and type-homogeneity.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::search::{KernelOutcome, SearchSpace, Searcher};
use crate::structures::{closure, induced_substructure, is_member, BignessLevel, FinStructure};
use crate::tuples::{is_strictly_increasing, sub_tuples, TupleSpace};
use crate::types::{tuple_type, TupleType};

/// A total map from the increasing `arity`-tuples of `base` to `0..colors`.
/// The table is indexed by lexicographic tuple rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    base: FinStructure,
    arity: usize,
    colors: u32,
    table: Vec<u32>,
}

impl Coloring {
    pub fn from_table(base: &FinStructure, arity: usize, colors: u32, table: Vec<u32>) -> Result<Self> {
        if colors == 0 {
            return Err(Error::InvalidSelection("a coloring needs at least one color".into()));
        }
        let space = TupleSpace::new(base.size(), arity)?;
        if table.len() != space.count() {
            return Err(Error::Schema(format!(
                "coloring table has {} entries, expected {}",
                table.len(),
                space.count()
            )));
        }
        if let Some(pos) = table.iter().position(|&c| c >= colors) {
            return Err(Error::Schema(format!(
                "color {} of tuple {:?} is not below {colors}",
                table[pos],
                space.unrank(pos)
            )));
        }
        Ok(Self { base: base.clone(), arity, colors, table })
    }

    pub fn from_fn(
        base: &FinStructure,
        arity: usize,
        colors: u32,
        mut f: impl FnMut(&[usize]) -> u32,
    ) -> Result<Self> {
        let space = TupleSpace::new(base.size(), arity)?;
        let table = space.iter().map(|t| f(&t)).collect();
        Self::from_table(base, arity, colors, table)
    }

    pub fn constant(base: &FinStructure, arity: usize, colors: u32, color: u32) -> Result<Self> {
        Self::from_fn(base, arity, colors, |_| color)
    }

    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn space(&self) -> TupleSpace {
        TupleSpace::new(self.base.size(), self.arity).expect("validated at construction")
    }

    pub fn color_of(&self, tuple: &[usize]) -> Result<u32> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidSelection(format!("expected a {}-tuple", self.arity)));
        }
        if !is_strictly_increasing(tuple) {
            return Err(Error::NotIncreasing(tuple.to_vec()));
        }
        if let Some(&x) = tuple.iter().find(|&&x| x >= self.base.size()) {
            return Err(Error::ElementOutOfRange { element: x, size: self.base.size() });
        }
        Ok(self.table[self.space().rank(tuple)])
    }

    pub fn to_doc(&self) -> ColoringDoc {
        let entries = self
            .space()
            .iter()
            .zip(&self.table)
            .map(|(t, &c)| t.into_iter().map(|x| x as u64).chain([u64::from(c)]).collect())
            .collect();
        ColoringDoc { arity: self.arity, colors: self.colors, entries }
    }

    pub fn from_doc(base: &FinStructure, doc: &ColoringDoc) -> Result<Self> {
        let space = TupleSpace::new(base.size(), doc.arity)?;
        if doc.entries.len() != space.count() {
            return Err(Error::Schema(format!(
                "coloring has {} entries, expected one per increasing {}-tuple ({})",
                doc.entries.len(),
                doc.arity,
                space.count()
            )));
        }
        let mut table = Vec::with_capacity(doc.entries.len());
        for (i, (entry, expected)) in doc.entries.iter().zip(space.iter()).enumerate() {
            if entry.len() != doc.arity + 1 {
                return Err(Error::Schema(format!("entry {i} should hold {} numbers", doc.arity + 1)));
            }
            let tuple: Vec<usize> = entry[..doc.arity].iter().map(|&x| x as usize).collect();
            if tuple != expected {
                return Err(Error::Schema(format!(
                    "entry {i} is {tuple:?}; entries must list increasing tuples in lexicographic order, expected {expected:?}"
                )));
            }
            let c = u32::try_from(entry[doc.arity]).map_err(|_| Error::Schema(format!("entry {i}: color overflows")))?;
            table.push(c);
        }
        Self::from_table(base, doc.arity, doc.colors, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("coloring documents always serialize")
    }

    pub fn from_json(base: &FinStructure, text: &str) -> Result<Self> {
        Self::from_doc(base, &serde_json::from_str(text)?)
    }

    /// Hex SHA-256 of the JSON document, used to reference colorings in reports.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringDoc {
    pub arity: usize,
    pub colors: u32,
    pub entries: Vec<Vec<u64>>,
}

/// Colors of the realized types, keyed by type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomogeneityWitness(pub BTreeMap<TupleType, u32>);

impl HomogeneityWitness {
    pub fn get(&self, ty: &TupleType) -> Option<u32> {
        self.0.get(ty).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> Vec<WitnessEntry> {
        self.0.iter().map(|(t, &c)| WitnessEntry { type_: t.clone(), color: c }).collect()
    }

    pub fn from_entries(entries: Vec<WitnessEntry>) -> Self {
        Self(entries.into_iter().map(|e| (e.type_, e.color)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    #[serde(rename = "type")]
    pub type_: TupleType,
    pub color: u32,
}

impl Serialize for HomogeneityWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneityWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Self::from_entries(Vec::<WitnessEntry>::deserialize(d)?))
    }
}

/// The witness `c*` if the color of every increasing tuple in the closure of
/// `subset` depends only on its type in the base.
pub fn type_homogeneity_witness(col: &Coloring, subset: &[usize]) -> Result<Option<HomogeneityWitness>> {
    let closed = closure(col.base(), subset)?;
    let (sub, _) = induced_substructure(col.base(), &closed)?;
    if !is_member(col.base().class(), &sub) {
        return Err(Error::NotMember(format!("closure of {subset:?} is not a member of the class")));
    }
    let space = col.space();
    let mut map = BTreeMap::new();
    for t in sub_tuples(&closed, col.arity()) {
        let c = col.table()[space.rank(&t)];
        match map.entry(tuple_type(col.base(), &t)?) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(o) if *o.get() != c => return Ok(None),
            _ => {}
        }
    }
    Ok(Some(HomogeneityWitness(map)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousSearch {
    pub found: Option<(Vec<usize>, HomogeneityWitness)>,
    /// False when the node budget ran out before the search finished.
    pub exhaustive: bool,
    pub nodes: u64,
}

/// Lexicographically least big closed type-homogeneous subset, if the search
/// finds one within `budget` nodes.
pub fn find_type_homogeneous(col: &Coloring, level: BignessLevel, budget: u64) -> Result<HomogeneousSearch> {
    let space = SearchSpace::new(col.base(), col.arity())?;
    Ok(search_in(&space, col.table(), level, budget))
}

pub(crate) fn search_in(space: &SearchSpace, table: &[u32], level: BignessLevel, budget: u64) -> HomogeneousSearch {
    let mut searcher = Searcher::new(space);
    let outcome = searcher.run(table, level, budget);
    let nodes = searcher.nodes();
    match outcome {
        KernelOutcome::Found(set, pairs) => {
            let types = space.table().types();
            let map = pairs.into_iter().map(|(t, c)| (types[t as usize].clone(), c)).collect();
            HomogeneousSearch { found: Some((set, HomogeneityWitness(map))), exhaustive: true, nodes }
        }
        KernelOutcome::Exhausted => HomogeneousSearch { found: None, exhaustive: true, nodes },
        KernelOutcome::BudgetHit => HomogeneousSearch { found: None, exhaustive: false, nodes },
    }
}

/// Seeded uniform coloring: ChaCha8 seeded from `seed`, one draw in `0..c`
/// per tuple in lexicographic order.
pub fn random_coloring(s: &FinStructure, n: usize, c: u32, seed: u64) -> Result<Coloring> {
    if c == 0 {
        return Err(Error::InvalidSelection("a coloring needs at least one color".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Coloring::from_fn(s, n, c, |_| rng.random_range(0..c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{make_canonical, ClassKind};

    fn parity(base: &FinStructure) -> Coloring {
        Coloring::from_fn(base, 2, 2, |t| u32::from(base.part(t[0]) == base.part(t[1]))).unwrap()
    }

    #[test]
    fn parity_coloring_is_type_homogeneous_on_whole_structure() {
        let base = FinStructure::chi_or_with_sizes(&[3, 3]);
        let w = type_homogeneity_witness(&parity(&base), &[0, 1, 2, 3, 4, 5]).unwrap().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.get(&tuple_type(&base, &[0, 3]).unwrap()), Some(0));
        assert_eq!(w.get(&tuple_type(&base, &[0, 1]).unwrap()), Some(1));
        assert_eq!(w.get(&tuple_type(&base, &[3, 4]).unwrap()), Some(1));
    }

    #[test]
    fn parity_search_returns_whole_two_big_base() {
        let base = make_canonical(ClassKind::ChiOr { chi: 2 }, BignessLevel(2)).unwrap();
        let res = find_type_homogeneous(&parity(&base), BignessLevel(2), u64::MAX).unwrap();
        assert_eq!(res.found.unwrap().0, vec![0, 1, 2, 3]);
    }

    #[test]
    fn pentagon_has_no_monochromatic_triangle() {
        let base = FinStructure::chain(5);
        let col = Coloring::from_fn(&base, 2, 2, |t| u32::from(matches!(t[1] - t[0], 1 | 4))).unwrap();
        let res = find_type_homogeneous(&col, BignessLevel(3), u64::MAX).unwrap();
        assert!(res.found.is_none());
        assert!(res.exhaustive);
    }

    #[test]
    fn random_coloring_is_deterministic() {
        let base = FinStructure::chain(7);
        let a = random_coloring(&base, 3, 4, 9).unwrap();
        assert_eq!(a, random_coloring(&base, 3, 4, 9).unwrap());
        assert_eq!(a.table().len(), 35);
        assert!(random_coloring(&base, 3, 1, 9).unwrap().table().iter().all(|&c| c == 0));
    }

    #[test]
    fn doc_roundtrip_and_rejection() {
        let base = FinStructure::chain(4);
        let col = random_coloring(&base, 2, 3, 1).unwrap();
        let text = col.to_json();
        assert_eq!(Coloring::from_json(&base, &text).unwrap(), col);
        let mut doc = col.to_doc();
        doc.entries.swap(0, 1);
        assert!(Coloring::from_doc(&base, &doc).is_err());
    }

    #[test]
    fn non_member_subset_is_an_error() {
        let base = make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(2)).unwrap();
        let col = Coloring::constant(&base, 1, 1, 0).unwrap();
        assert!(type_homogeneity_witness(&col, &[1, 2]).is_err());
    }
}
