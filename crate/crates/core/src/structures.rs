//! Finite members of the ordered classes.
//!
//! Every structure lives on `0..N` and its designated order is the natural
//! order of the labels; the class payload is expressed against that order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuples::Combinations;

/// Upper bound on the universe of any canonical structure.
const MAX_CANONICAL_SIZE: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassKind {
    Or,
    ChiOr { chi: u32 },
    ChiColor { chi: u32 },
    NTree { height: u32 },
    Ceq,
    OrderedGraph,
    Hypergraph { arity_bound: u32, colors: u32 },
}

impl ClassKind {
    pub fn validate(&self) -> Result<()> {
        let bad = match *self {
            ClassKind::ChiOr { chi } | ClassKind::ChiColor { chi } => chi == 0,
            ClassKind::NTree { height } => height == 0,
            ClassKind::Hypergraph { arity_bound, colors } => arity_bound == 0 || colors == 0,
            _ => false,
        };
        if bad {
            Err(Error::InvalidClass(format!("{self}: parameters must be at least 1")))
        } else {
            Ok(())
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassKind::Or => "or",
            ClassKind::ChiOr { .. } => "chi_or",
            ClassKind::ChiColor { .. } => "chi_color",
            ClassKind::NTree { .. } => "n_tree",
            ClassKind::Ceq => "ceq",
            ClassKind::OrderedGraph => "ordered_graph",
            ClassKind::Hypergraph { .. } => "hypergraph",
        }
    }

    /// Whether the class has function symbols, so that substructures must be closed.
    pub fn has_functions(&self) -> bool {
        matches!(self, ClassKind::NTree { .. })
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClassKind::ChiOr { chi } => write!(f, "chi_or({chi})"),
            ClassKind::ChiColor { chi } => write!(f, "chi_color({chi})"),
            ClassKind::NTree { height } => write!(f, "n_tree({height})"),
            ClassKind::Hypergraph { arity_bound, colors } => {
                write!(f, "hypergraph({arity_bound},{colors})")
            }
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BignessLevel(pub u32);

impl BignessLevel {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for BignessLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Class-specific data attached to a universe `0..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    Plain,
    /// Part index of every element.
    Parts(Vec<u32>),
    /// Color predicate `P_beta` holding at every element.
    Colors(Vec<u32>),
    /// Tree order by parent pointers plus the level predicates `P_k`.
    Tree { parent: Vec<Option<u32>>, level: Vec<u32> },
    /// Equivalence class id of every element, numbered by first occurrence.
    Blocks(Vec<u32>),
    /// Adjacency matrix, row-major, symmetric.
    Edges(Vec<bool>),
    /// Color of every subset of size below the arity bound, keyed by the sorted subset.
    Hyper(BTreeMap<Vec<u32>, u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinStructure {
    class: ClassKind,
    size: usize,
    payload: Payload,
}

impl FinStructure {
    /// Builds a structure without checking class invariants; see [`is_member`].
    pub fn from_parts(class: ClassKind, size: usize, payload: Payload) -> Self {
        Self { class, size, payload }
    }

    pub fn chain(n: usize) -> Self {
        Self::from_parts(ClassKind::Or, n, Payload::Plain)
    }

    pub fn chi_or(chi: u32, parts: Vec<u32>) -> Self {
        Self::from_parts(ClassKind::ChiOr { chi }, parts.len(), Payload::Parts(parts))
    }

    /// A chi-or structure whose parts have the given sizes, in order.
    pub fn chi_or_with_sizes(sizes: &[usize]) -> Self {
        let parts = sizes
            .iter()
            .enumerate()
            .flat_map(|(p, &len)| std::iter::repeat_n(p as u32, len))
            .collect();
        Self::chi_or(sizes.len() as u32, parts)
    }

    pub fn chi_color(chi: u32, colors: Vec<u32>) -> Self {
        Self::from_parts(ClassKind::ChiColor { chi }, colors.len(), Payload::Colors(colors))
    }

    pub fn tree(height: u32, parent: Vec<Option<u32>>, level: Vec<u32>) -> Self {
        Self::from_parts(ClassKind::NTree { height }, parent.len(), Payload::Tree { parent, level })
    }

    /// Convexly ordered equivalence relation from explicit classes.
    ///
    /// Every element of `0..n` must appear in exactly one block; otherwise the
    /// result is malformed and fails [`is_member`].
    pub fn ceq_from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut id = vec![u32::MAX; n];
        let mut malformed = false;
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n || id[x] != u32::MAX {
                    malformed = true;
                } else {
                    id[x] = b as u32;
                }
            }
        }
        if malformed || id.contains(&u32::MAX) {
            return Self::from_parts(ClassKind::Ceq, n, Payload::Blocks(vec![u32::MAX; n]));
        }
        Self::from_parts(ClassKind::Ceq, n, Payload::Blocks(renumber_blocks(&id)))
    }

    /// Convex equivalence with consecutive blocks of the given sizes.
    pub fn ceq_with_sizes(sizes: &[usize]) -> Self {
        let ids = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &len)| std::iter::repeat_n(b as u32, len))
            .collect::<Vec<_>>();
        let n = ids.len();
        Self::from_parts(ClassKind::Ceq, n, Payload::Blocks(renumber_blocks(&ids)))
    }

    pub fn ordered_graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            if a < n && b < n && a != b {
                adj[a * n + b] = true;
                adj[b * n + a] = true;
            }
        }
        Self::from_parts(ClassKind::OrderedGraph, n, Payload::Edges(adj))
    }

    pub fn hypergraph(arity_bound: u32, colors: u32, n: usize, map: BTreeMap<Vec<u32>, u32>) -> Self {
        Self::from_parts(ClassKind::Hypergraph { arity_bound, colors }, n, Payload::Hyper(map))
    }

    pub fn class(&self) -> ClassKind {
        self.class
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn part(&self, x: usize) -> Option<u32> {
        match &self.payload {
            Payload::Parts(p) => p.get(x).copied(),
            _ => None,
        }
    }

    pub fn color(&self, x: usize) -> Option<u32> {
        match &self.payload {
            Payload::Colors(c) => c.get(x).copied(),
            _ => None,
        }
    }

    pub fn block(&self, x: usize) -> Option<u32> {
        match &self.payload {
            Payload::Blocks(b) => b.get(x).copied(),
            _ => None,
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        match &self.payload {
            Payload::Edges(adj) => adj.get(a * self.size + b).copied().unwrap_or(false),
            _ => false,
        }
    }

    pub fn hyper_color(&self, subset: &[u32]) -> Option<u32> {
        match &self.payload {
            Payload::Hyper(m) => m.get(subset).copied(),
            _ => None,
        }
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        match &self.payload {
            Payload::Tree { parent, .. } => parent.get(x).copied().flatten().map(|p| p as usize),
            _ => None,
        }
    }

    pub fn level(&self, x: usize) -> Option<u32> {
        match &self.payload {
            Payload::Tree { level, .. } => level.get(x).copied(),
            _ => None,
        }
    }

    /// Tree meet; `None` when the two nodes have no common lower bound.
    pub fn meet(&self, mut a: usize, mut b: usize) -> Option<usize> {
        let Payload::Tree { parent, .. } = &self.payload else {
            return None;
        };
        while a != b {
            // parents precede their children, so walking the larger label up terminates
            let hi = if a > b { &mut a } else { &mut b };
            let p = parent.get(*hi).copied().flatten()? as usize;
            if p >= *hi {
                return None;
            }
            *hi = p;
        }
        Some(a)
    }

    /// `a` lies strictly below `b` in the tree order.
    pub fn tree_below(&self, a: usize, b: usize) -> bool {
        let mut cur = b;
        while let Some(p) = self.parent(cur) {
            if p == a {
                return true;
            }
            if p >= cur {
                return false;
            }
            cur = p;
        }
        false
    }

    /// Deterministic byte serialization of the payload against the natural order.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.size);
        push_u32(&mut out, self.size as u32);
        match &self.payload {
            Payload::Plain => {}
            Payload::Parts(v) | Payload::Colors(v) | Payload::Blocks(v) => {
                v.iter().for_each(|&x| push_u32(&mut out, x));
            }
            Payload::Tree { parent, level } => {
                for (p, l) in parent.iter().zip(level) {
                    push_u32(&mut out, p.map_or(0, |p| p + 1));
                    push_u32(&mut out, *l);
                }
            }
            Payload::Edges(adj) => {
                let mut byte = 0u8;
                let mut bits = 0;
                for a in 0..self.size {
                    for b in a + 1..self.size {
                        byte |= (adj[a * self.size + b] as u8) << bits;
                        bits += 1;
                        if bits == 8 {
                            out.push(byte);
                            byte = 0;
                            bits = 0;
                        }
                    }
                }
                if bits > 0 {
                    out.push(byte);
                }
            }
            Payload::Hyper(m) => {
                push_u32(&mut out, m.len() as u32);
                let mut entries: Vec<_> = m.iter().collect();
                entries.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
                for (set, color) in entries {
                    push_u32(&mut out, set.len() as u32);
                    set.iter().for_each(|&x| push_u32(&mut out, x));
                    push_u32(&mut out, *color);
                }
            }
        }
        out
    }

    /// Inverse of [`canonical_bytes`](Self::canonical_bytes) for a known class.
    pub fn from_canonical_bytes(class: ClassKind, bytes: &[u8]) -> Result<(Self, usize)> {
        let mut r = ByteReader { bytes, pos: 0 };
        let size = r.u32()? as usize;
        let payload = match class {
            ClassKind::Or => Payload::Plain,
            ClassKind::ChiOr { .. } => Payload::Parts(r.u32s(size)?),
            ClassKind::ChiColor { .. } => Payload::Colors(r.u32s(size)?),
            ClassKind::Ceq => Payload::Blocks(r.u32s(size)?),
            ClassKind::NTree { .. } => {
                let mut parent = Vec::with_capacity(size);
                let mut level = Vec::with_capacity(size);
                for _ in 0..size {
                    let p = r.u32()?;
                    parent.push(p.checked_sub(1));
                    level.push(r.u32()?);
                }
                Payload::Tree { parent, level }
            }
            ClassKind::OrderedGraph => {
                let pairs = size * size.saturating_sub(1) / 2;
                let raw = r.take(pairs.div_ceil(8))?;
                let mut adj = vec![false; size * size];
                let mut idx = 0;
                for a in 0..size {
                    for b in a + 1..size {
                        let bit = raw[idx / 8] >> (idx % 8) & 1 == 1;
                        adj[a * size + b] = bit;
                        adj[b * size + a] = bit;
                        idx += 1;
                    }
                }
                Payload::Edges(adj)
            }
            ClassKind::Hypergraph { .. } => {
                let len = r.u32()? as usize;
                let mut m = BTreeMap::new();
                for _ in 0..len {
                    let k = r.u32()? as usize;
                    let set = r.u32s(k)?;
                    m.insert(set, r.u32()?);
                }
                Payload::Hyper(m)
            }
        };
        Ok((Self::from_parts(class, size, payload), r.pos))
    }
}

fn push_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

pub(crate) struct ByteReader<'a> {
    pub bytes: &'a [u8],
    pub pos: usize,
}

impl ByteReader<'_> {
    pub fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Schema("truncated canonical code".into()))?;
        self.pos = end;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u32s(&mut self, n: usize) -> Result<Vec<u32>> {
        (0..n).map(|_| self.u32()).collect()
    }
}

fn renumber_blocks(ids: &[u32]) -> Vec<u32> {
    let mut map = BTreeMap::new();
    ids.iter()
        .map(|id| {
            let next = map.len() as u32;
            *map.entry(*id).or_insert(next)
        })
        .collect()
}

fn check_size(class: ClassKind, size: u64) -> Result<usize> {
    if size > MAX_CANONICAL_SIZE {
        Err(Error::TooLarge(format!("canonical {class} structure would have {size} elements")))
    } else {
        Ok(size as usize)
    }
}

/// The minimal `level`-big member of `class`.
///
/// Ordered graphs and hypergraphs use cardinality bigness, so the canonical
/// member is the edgeless graph (all hyperedge colors 0) on `level` vertices.
pub fn make_canonical(class: ClassKind, level: BignessLevel) -> Result<FinStructure> {
    class.validate()?;
    let mu = u64::from(level.0);
    Ok(match class {
        ClassKind::Or => FinStructure::chain(check_size(class, mu)?),
        ClassKind::ChiOr { chi } => {
            check_size(class, mu * u64::from(chi))?;
            FinStructure::chi_or_with_sizes(&vec![mu as usize; chi as usize])
        }
        ClassKind::ChiColor { chi } => {
            let n = check_size(class, mu * u64::from(chi))?;
            FinStructure::chi_color(chi, (0..n as u32).map(|i| i % chi).collect())
        }
        ClassKind::NTree { height } => {
            if mu == 0 {
                return Ok(FinStructure::tree(height, Vec::new(), Vec::new()));
            }
            let mut total: u64 = 0;
            let mut width: u64 = 1;
            for _ in 0..=height {
                total = total.saturating_add(width);
                width = width.saturating_mul(mu);
            }
            check_size(class, total)?;
            let mut parent = Vec::new();
            let mut level = Vec::new();
            grow_complete_tree(&mut parent, &mut level, None, 0, height, mu as u32);
            FinStructure::tree(height, parent, level)
        }
        ClassKind::Ceq => {
            check_size(class, mu * mu)?;
            FinStructure::ceq_with_sizes(&vec![mu as usize; mu as usize])
        }
        ClassKind::OrderedGraph => {
            let n = check_size(class, mu)?;
            FinStructure::ordered_graph(n, &[])
        }
        ClassKind::Hypergraph { arity_bound, colors } => {
            let n = check_size(class, mu)?;
            let mut map = BTreeMap::new();
            for k in 0..arity_bound as usize {
                if k > n {
                    break;
                }
                for set in Combinations::new(n, k) {
                    map.insert(set.into_iter().map(|x| x as u32).collect(), 0);
                }
            }
            FinStructure::hypergraph(arity_bound, colors, n, map)
        }
    })
}

fn grow_complete_tree(
    parent: &mut Vec<Option<u32>>,
    level: &mut Vec<u32>,
    up: Option<u32>,
    depth: u32,
    height: u32,
    branching: u32,
) {
    let me = parent.len() as u32;
    parent.push(up);
    level.push(depth);
    if depth < height {
        for _ in 0..branching {
            grow_complete_tree(parent, level, Some(me), depth + 1, height, branching);
        }
    }
}

/// Checks every class invariant; malformed payloads yield `false`.
pub fn is_member(class: ClassKind, s: &FinStructure) -> bool {
    if s.class != class || class.validate().is_err() {
        return false;
    }
    let n = s.size;
    match (&s.payload, class) {
        (Payload::Plain, ClassKind::Or) => true,
        (Payload::Parts(parts), ClassKind::ChiOr { chi }) => {
            parts.len() == n
                && parts.iter().all(|&p| p < chi)
                && parts.windows(2).all(|w| w[0] <= w[1])
        }
        (Payload::Colors(colors), ClassKind::ChiColor { chi }) => {
            colors.len() == n && colors.iter().enumerate().all(|(i, &c)| c == i as u32 % chi)
        }
        (Payload::Tree { parent, level }, ClassKind::NTree { height }) => {
            tree_is_valid(parent, level, height)
        }
        (Payload::Blocks(ids), ClassKind::Ceq) => {
            ids.len() == n && ids.iter().all(|&b| (b as usize) < n.max(1)) && blocks_convex(ids)
        }
        (Payload::Edges(adj), ClassKind::OrderedGraph) => {
            adj.len() == n * n
                && (0..n).all(|a| !adj[a * n + a] && (0..n).all(|b| adj[a * n + b] == adj[b * n + a]))
        }
        (Payload::Hyper(map), ClassKind::Hypergraph { arity_bound, colors }) => {
            let mut expected = 0usize;
            for k in 0..arity_bound as usize {
                if k > n {
                    break;
                }
                for set in Combinations::new(n, k) {
                    let key: Vec<u32> = set.into_iter().map(|x| x as u32).collect();
                    match map.get(&key) {
                        Some(&c) if c < colors => expected += 1,
                        _ => return false,
                    }
                }
            }
            map.len() == expected
        }
        _ => false,
    }
}

fn blocks_convex(ids: &[u32]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    for (i, &b) in ids.iter().enumerate() {
        if i > 0 && ids[i - 1] == b {
            continue;
        }
        if !seen.insert(b) {
            return false;
        }
    }
    true
}

fn tree_is_valid(parent: &[Option<u32>], level: &[u32], height: u32) -> bool {
    let n = parent.len();
    if level.len() != n {
        return false;
    }
    if n == 0 {
        return true;
    }
    // single root, placed first in the order
    if parent[0].is_some() || parent[1..].iter().any(|p| p.is_none()) {
        return false;
    }
    for v in 1..n {
        let p = parent[v].unwrap() as usize;
        if p >= v || level[p] >= level[v] {
            return false;
        }
    }
    if level.iter().any(|&l| l > height) {
        return false;
    }
    // lexicographic traversal: every subtree occupies an interval starting at its root
    let ends = subtree_ends(parent);
    (1..n).all(|v| {
        let p = parent[v].unwrap() as usize;
        v < ends[p] && ends[v] <= ends[p]
    }) && (0..n).all(|v| (v + 1..ends[v]).all(|d| is_descendant(parent, v, d)))
}

fn is_descendant(parent: &[Option<u32>], anc: usize, mut d: usize) -> bool {
    while let Some(p) = parent[d] {
        let p = p as usize;
        if p == anc {
            return true;
        }
        d = p;
    }
    false
}

/// Exclusive end of the label interval spanned by each node and its descendants,
/// assuming parents precede children.
pub(crate) fn subtree_ends(parent: &[Option<u32>]) -> Vec<usize> {
    let n = parent.len();
    let mut ends: Vec<usize> = (0..n).map(|v| v + 1).collect();
    for v in (0..n).rev() {
        if let Some(p) = parent[v] {
            let p = p as usize;
            if p < v {
                ends[p] = ends[p].max(ends[v]);
            }
        }
    }
    ends
}

/// Closure of `subset` under the class functions, sorted.
pub fn closure(s: &FinStructure, subset: &[usize]) -> Result<Vec<usize>> {
    for &x in subset {
        if x >= s.size {
            return Err(Error::ElementOutOfRange { element: x, size: s.size });
        }
    }
    let mut set: Vec<usize> = subset.to_vec();
    set.sort_unstable();
    set.dedup();
    if s.class.has_functions() && set.len() > 1 {
        // meets of consecutive elements in a lexicographic tree order generate all meets
        let mut extra = Vec::new();
        for w in set.windows(2) {
            if let Some(m) = s.meet(w[0], w[1]) {
                extra.push(m);
            }
        }
        set.extend(extra);
        set.sort_unstable();
        set.dedup();
        // fall back to a full pass in case the order is not lexicographic
        loop {
            let mut added = Vec::new();
            for (i, &a) in set.iter().enumerate() {
                for &b in &set[i + 1..] {
                    if let Some(m) = s.meet(a, b) {
                        if set.binary_search(&m).is_err() && !added.contains(&m) {
                            added.push(m);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            set.extend(added);
            set.sort_unstable();
        }
    }
    Ok(set)
}

/// Substructure on the closure of `subset`, relabeled to `0..m` preserving the
/// order, together with the map from new labels to old labels.
pub fn induced_substructure(s: &FinStructure, subset: &[usize]) -> Result<(FinStructure, Vec<usize>)> {
    let elems = closure(s, subset)?;
    let m = elems.len();
    let new_of = |old: usize| elems.binary_search(&old).ok();
    let payload = match &s.payload {
        Payload::Plain => Payload::Plain,
        Payload::Parts(p) => Payload::Parts(elems.iter().map(|&x| p[x]).collect()),
        Payload::Colors(c) => Payload::Colors(elems.iter().map(|&x| c[x]).collect()),
        Payload::Blocks(b) => {
            Payload::Blocks(renumber_blocks(&elems.iter().map(|&x| b[x]).collect::<Vec<_>>()))
        }
        Payload::Tree { parent, level } => {
            let mut new_parent = Vec::with_capacity(m);
            for &x in &elems {
                let mut cur = parent.get(x).copied().flatten();
                let mut found = None;
                while let Some(p) = cur {
                    if let Some(i) = new_of(p as usize) {
                        found = Some(i as u32);
                        break;
                    }
                    cur = parent.get(p as usize).copied().flatten();
                }
                new_parent.push(found);
            }
            Payload::Tree { parent: new_parent, level: elems.iter().map(|&x| level[x]).collect() }
        }
        Payload::Edges(_) => {
            let mut adj = vec![false; m * m];
            for (i, &a) in elems.iter().enumerate() {
                for (j, &b) in elems.iter().enumerate() {
                    adj[i * m + j] = s.adjacent(a, b);
                }
            }
            Payload::Edges(adj)
        }
        Payload::Hyper(map) => {
            let mut out = BTreeMap::new();
            for (set, &color) in map {
                let relabeled: Option<Vec<u32>> =
                    set.iter().map(|&x| new_of(x as usize).map(|i| i as u32)).collect();
                if let Some(r) = relabeled {
                    out.insert(r, color);
                }
            }
            Payload::Hyper(out)
        }
    };
    Ok((FinStructure::from_parts(s.class, m, payload), elems))
}

/// Class-specific bigness at `level`. Assumes `s` is a member.
pub fn is_big(s: &FinStructure, level: BignessLevel) -> bool {
    let mu = level.get();
    if mu == 0 {
        return true;
    }
    match (s.class, &s.payload) {
        (ClassKind::Or | ClassKind::OrderedGraph | ClassKind::Hypergraph { .. }, _) => s.size >= mu,
        (ClassKind::ChiOr { chi }, Payload::Parts(parts)) => {
            let mut counts = vec![0usize; chi as usize];
            for &p in parts {
                if let Some(c) = counts.get_mut(p as usize) {
                    *c += 1;
                }
            }
            counts.iter().all(|&c| c >= mu)
        }
        (ClassKind::ChiColor { chi }, _) => s.size >= chi as usize * mu,
        (ClassKind::NTree { height }, Payload::Tree { parent, level }) => {
            if s.size == 0 || level[0] != 0 {
                return false;
            }
            let mut kids = vec![0usize; s.size];
            for p in parent.iter().flatten() {
                kids[*p as usize] += 1;
            }
            (0..s.size).all(|v| level[v] >= height || kids[v] >= mu)
        }
        (ClassKind::Ceq, Payload::Blocks(ids)) => {
            let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
            for &b in ids {
                *sizes.entry(b).or_default() += 1;
            }
            sizes.len() >= mu && sizes.values().all(|&c| c >= mu)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayloadDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_parent: Option<Vec<Option<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_blocks: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyper_colors: Option<Vec<(Vec<u32>, u32)>>,
}

/// `{"class": {...}, "universe": N, "payload": {...}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub class: ClassKind,
    pub universe: usize,
    pub payload: PayloadDoc,
}

impl FinStructure {
    pub fn to_doc(&self) -> StructureDoc {
        let mut payload = PayloadDoc::default();
        match &self.payload {
            Payload::Plain => {}
            Payload::Parts(p) => payload.parts = Some(p.clone()),
            Payload::Colors(c) => payload.colors = Some(c.clone()),
            Payload::Tree { parent, level } => {
                payload.tree_parent = Some(parent.clone());
                payload.levels = Some(level.clone());
            }
            Payload::Blocks(ids) => {
                let mut blocks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                for (x, &b) in ids.iter().enumerate() {
                    blocks.entry(b).or_default().push(x);
                }
                payload.eq_blocks = Some(blocks.into_values().collect());
            }
            Payload::Edges(_) => {
                let mut edges = Vec::new();
                for a in 0..self.size {
                    for b in a + 1..self.size {
                        if self.adjacent(a, b) {
                            edges.push([a, b]);
                        }
                    }
                }
                payload.edges = Some(edges);
            }
            Payload::Hyper(m) => {
                let mut entries: Vec<(Vec<u32>, u32)> = m.iter().map(|(k, v)| (k.clone(), *v)).collect();
                entries.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
                payload.hyper_colors = Some(entries);
            }
        }
        StructureDoc { class: self.class, universe: self.size, payload }
    }

    pub fn from_doc(doc: &StructureDoc) -> Result<Self> {
        doc.class.validate()?;
        let n = doc.universe;
        let p = &doc.payload;
        let allowed: &[&str] = match doc.class {
            ClassKind::Or => &[],
            ClassKind::ChiOr { .. } => &["parts"],
            ClassKind::ChiColor { .. } => &["colors"],
            ClassKind::NTree { .. } => &["tree_parent", "levels"],
            ClassKind::Ceq => &["eq_blocks"],
            ClassKind::OrderedGraph => &["edges"],
            ClassKind::Hypergraph { .. } => &["hyper_colors"],
        };
        let present = [
            ("parts", p.parts.is_some()),
            ("colors", p.colors.is_some()),
            ("tree_parent", p.tree_parent.is_some()),
            ("levels", p.levels.is_some()),
            ("eq_blocks", p.eq_blocks.is_some()),
            ("edges", p.edges.is_some()),
            ("hyper_colors", p.hyper_colors.is_some()),
        ];
        for (key, here) in present {
            if here != allowed.contains(&key) {
                let what = if here { "unexpected" } else { "missing" };
                return Err(Error::Schema(format!("{what} payload key `{key}` for class {}", doc.class)));
            }
        }
        let s = match doc.class {
            ClassKind::Or => FinStructure::chain(n),
            ClassKind::ChiOr { chi } => FinStructure::chi_or(chi, p.parts.clone().unwrap_or_default()),
            ClassKind::ChiColor { chi } => FinStructure::chi_color(chi, p.colors.clone().unwrap_or_default()),
            ClassKind::NTree { height } => FinStructure::tree(
                height,
                p.tree_parent.clone().unwrap_or_default(),
                p.levels.clone().unwrap_or_default(),
            ),
            ClassKind::Ceq => FinStructure::ceq_from_blocks(n, p.eq_blocks.as_deref().unwrap_or_default()),
            ClassKind::OrderedGraph => {
                let edges: Vec<(usize, usize)> =
                    p.edges.iter().flatten().map(|e| (e[0], e[1])).collect();
                if edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
                    return Err(Error::Schema("edge endpoint out of range or loop".into()));
                }
                FinStructure::ordered_graph(n, &edges)
            }
            ClassKind::Hypergraph { arity_bound, colors } => FinStructure::hypergraph(
                arity_bound,
                colors,
                n,
                p.hyper_colors.iter().flatten().cloned().collect(),
            ),
        };
        if s.size != n {
            return Err(Error::Schema(format!(
                "payload describes {} elements but universe is {n}",
                s.size
            )));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("structure documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}
