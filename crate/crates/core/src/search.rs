//! Backtracking kernel for big type-homogeneous subsets.
//!
//! Candidate subsets are grown by appending elements in increasing order, so
//! the search tree visits subsets in lexicographic order and the first hit is
//! the lexicographically least one. Class-closed subsets are prefix-closed in
//! this order (tree meets always precede the later argument), which lets the
//! kernel enforce closure locally.

use crate::error::Result;
use crate::structures::{subtree_ends, BignessLevel, ClassKind, FinStructure, Payload};
use crate::types::TypeTable;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
enum Shape {
    /// Plain cardinality target, in units of the level.
    Card { factor: usize },
    ChiColor { chi: usize, colors: Vec<u32> },
    Parts { suffix: Vec<Vec<usize>> },
    Blocks { block: Vec<u32>, starts: Vec<usize>, ends: Vec<usize> },
    Tree { level: Vec<u32>, height: u32, ends: Vec<usize>, children: Vec<Vec<usize>> },
}

/// Precomputed per-(structure, arity) data shared by many searches.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    base: FinStructure,
    table: TypeTable,
    shape: Shape,
}

impl SearchSpace {
    pub fn new(base: &FinStructure, arity: usize) -> Result<Self> {
        let table = TypeTable::build(base, arity)?;
        Ok(Self::with_table(base, table))
    }

    pub fn with_table(base: &FinStructure, table: TypeTable) -> Self {
        let n = base.size();
        let shape = match (base.class(), base.payload()) {
            (ClassKind::ChiColor { chi }, Payload::Colors(c)) => Shape::ChiColor { chi: chi as usize, colors: c.clone() },
            (ClassKind::ChiOr { chi }, Payload::Parts(parts)) => {
                let mut suffix = vec![vec![0usize; n + 1]; chi as usize];
                for i in (0..n).rev() {
                    for (p, row) in suffix.iter_mut().enumerate() {
                        row[i] = row[i + 1] + usize::from(parts[i] as usize == p);
                    }
                }
                Shape::Parts { suffix }
            }
            (ClassKind::Ceq, Payload::Blocks(ids)) => {
                let nb = ids.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
                let mut starts = vec![usize::MAX; nb];
                let mut ends = vec![0; nb];
                for (x, &b) in ids.iter().enumerate() {
                    starts[b as usize] = starts[b as usize].min(x);
                    ends[b as usize] = x + 1;
                }
                Shape::Blocks { block: ids.clone(), starts, ends }
            }
            (ClassKind::NTree { height }, Payload::Tree { parent, level }) => {
                let mut children = vec![Vec::new(); n];
                for (v, p) in parent.iter().enumerate() {
                    if let Some(p) = p {
                        children[*p as usize].push(v);
                    }
                }
                Shape::Tree { level: level.clone(), height, ends: subtree_ends(parent), children }
            }
            _ => Shape::Card { factor: 1 },
        };
        Self { base: base.clone(), table, shape }
    }

    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    pub fn table(&self) -> &TypeTable {
        &self.table
    }

    pub fn arity(&self) -> usize {
        self.table.space().arity()
    }

    pub fn tuple_count(&self) -> usize {
        self.table.space().count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelOutcome {
    /// Elements of the subset and the `(type id, color)` pairs it realizes.
    Found(Vec<usize>, Vec<(u32, u32)>),
    /// The whole search space was covered without a hit.
    Exhausted,
    BudgetHit,
}

enum Step {
    Found,
    Continue,
    Budget,
}

pub struct Searcher<'a> {
    space: &'a SearchSpace,
    mu: usize,
    budget: u64,
    nodes: u64,
    chosen: Vec<usize>,
    witness: Vec<u32>,
    assigned: Vec<u32>,
    // part counts, block counts or tree child counts depending on the shape
    counts: Vec<usize>,
    blocks_used: usize,
    tree_parent_in_s: Vec<usize>,
    idx: Vec<usize>,
    tuple: Vec<usize>,
    collect: Option<(Vec<Vec<usize>>, usize)>,
}

impl<'a> Searcher<'a> {
    pub fn new(space: &'a SearchSpace) -> Self {
        let n = space.base.size();
        let counts = match &space.shape {
            Shape::Parts { suffix } => suffix.len(),
            Shape::Blocks { starts, .. } => starts.len(),
            Shape::Tree { .. } => n,
            _ => 0,
        };
        Self {
            space,
            mu: 0,
            budget: u64::MAX,
            nodes: 0,
            chosen: Vec::with_capacity(n),
            witness: vec![NONE; space.table.num_types()],
            assigned: Vec::new(),
            counts: vec![0; counts],
            blocks_used: 0,
            tree_parent_in_s: Vec::with_capacity(n),
            idx: Vec::new(),
            tuple: Vec::new(),
            collect: None,
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn reset(&mut self, level: BignessLevel, budget: u64) {
        self.mu = level.get();
        self.budget = budget;
        self.nodes = 0;
        self.chosen.clear();
        self.witness.iter_mut().for_each(|w| *w = NONE);
        self.assigned.clear();
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.blocks_used = 0;
        self.tree_parent_in_s.clear();
    }

    /// Lexicographically least `level`-big class-closed subset on which the
    /// color of every increasing tuple depends only on its type.
    pub fn run(&mut self, colors: &[u32], level: BignessLevel, budget: u64) -> KernelOutcome {
        debug_assert_eq!(colors.len(), self.space.tuple_count());
        self.reset(level, budget);
        match self.dfs(0, Some(colors)) {
            Step::Found => {
                let mut pairs: Vec<(u32, u32)> = self.assigned.iter().map(|&t| (t, self.witness[t as usize])).collect();
                pairs.sort_unstable();
                KernelOutcome::Found(self.chosen.clone(), pairs)
            }
            Step::Continue => KernelOutcome::Exhausted,
            Step::Budget => KernelOutcome::BudgetHit,
        }
    }

    /// Every subset that becomes `level`-big for the first time along its
    /// growth path. Every big closed subset contains one of them.
    pub fn big_frontier(&mut self, level: BignessLevel, cap: usize) -> Option<Vec<Vec<usize>>> {
        self.reset(level, u64::MAX);
        self.collect = Some((Vec::new(), cap));
        let step = self.dfs(0, None);
        let (sets, _) = self.collect.take().expect("collector installed above");
        match step {
            Step::Budget => None,
            _ => Some(sets),
        }
    }

    fn dfs(&mut self, start: usize, colors: Option<&[u32]>) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::Budget;
        }
        if self.is_big() {
            if let Some((sets, cap)) = &mut self.collect {
                if sets.len() >= *cap {
                    return Step::Budget;
                }
                sets.push(self.chosen.clone());
                return Step::Continue;
            }
            return Step::Found;
        }
        let n = self.space.base.size();
        for x in start..n {
            if !self.can_complete(x) {
                break;
            }
            if !self.admissible(x) {
                continue;
            }
            let mark = self.assigned.len();
            if let Some(colors) = colors {
                if !self.assign_new_tuples(x, colors) {
                    self.undo_assignments(mark);
                    continue;
                }
            }
            self.push(x);
            let step = self.dfs(x + 1, colors);
            if !matches!(step, Step::Continue) {
                return step;
            }
            self.pop();
            self.undo_assignments(mark);
        }
        Step::Continue
    }

    fn undo_assignments(&mut self, mark: usize) {
        for t in self.assigned.drain(mark..) {
            self.witness[t as usize] = NONE;
        }
    }

    /// Checks the tuples `T + {x}` for all `(arity-1)`-subsets `T` of the chosen set.
    fn assign_new_tuples(&mut self, x: usize, colors: &[u32]) -> bool {
        let k = self.space.arity();
        let m = self.chosen.len();
        if k == 0 || k - 1 > m {
            return true;
        }
        let r = k - 1;
        self.idx.clear();
        self.idx.extend(0..r);
        loop {
            self.tuple.clear();
            self.tuple.extend(self.idx.iter().map(|&i| self.chosen[i]));
            self.tuple.push(x);
            let rank = self.space.table.space().rank(&self.tuple);
            let ty = self.space.table.type_id(rank) as usize;
            let c = colors[rank];
            match self.witness[ty] {
                NONE => {
                    self.witness[ty] = c;
                    self.assigned.push(ty as u32);
                }
                w if w != c => return false,
                _ => {}
            }
            // next combination of indices
            let mut i = r;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if self.idx[i] < m - (r - i) {
                    self.idx[i] += 1;
                    for j in i + 1..r {
                        self.idx[j] = self.idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn push(&mut self, x: usize) {
        match &self.space.shape {
            Shape::Parts { .. } => {
                let p = self.space.base.part(x).unwrap_or(0) as usize;
                self.counts[p] += 1;
            }
            Shape::Blocks { block, .. } => {
                let b = block[x] as usize;
                if self.counts[b] == 0 {
                    self.blocks_used += 1;
                }
                self.counts[b] += 1;
            }
            Shape::Tree { .. } => {
                let p = match self.chosen.last() {
                    Some(&last) => self.space.base.meet(x, last).unwrap_or(usize::MAX),
                    None => usize::MAX,
                };
                if p != usize::MAX {
                    self.counts[p] += 1;
                }
                self.tree_parent_in_s.push(p);
            }
            _ => {}
        }
        self.chosen.push(x);
    }

    fn pop(&mut self) {
        let x = self.chosen.pop().expect("pop after push");
        match &self.space.shape {
            Shape::Parts { .. } => {
                let p = self.space.base.part(x).unwrap_or(0) as usize;
                self.counts[p] -= 1;
            }
            Shape::Blocks { block, .. } => {
                let b = block[x] as usize;
                self.counts[b] -= 1;
                if self.counts[b] == 0 {
                    self.blocks_used -= 1;
                }
            }
            Shape::Tree { .. } => {
                let p = self.tree_parent_in_s.pop().expect("parent recorded on push");
                if p != usize::MAX {
                    self.counts[p] -= 1;
                }
            }
            _ => {}
        }
    }

    fn admissible(&self, x: usize) -> bool {
        match &self.space.shape {
            Shape::ChiColor { chi, colors } => colors[x] as usize == self.chosen.len() % chi,
            Shape::Blocks { block, .. } => match self.chosen.last() {
                Some(&last) if block[last] != block[x] => self.counts[block[last] as usize] >= self.mu,
                _ => true,
            },
            Shape::Tree { .. } => match self.chosen.last() {
                // with x beyond every chosen label, meet(x, last) is the deepest new meet
                Some(&last) => match self.space.base.meet(x, last) {
                    Some(m) => m == x || self.chosen.binary_search(&m).is_ok(),
                    None => false,
                },
                None => true,
            },
            _ => true,
        }
    }

    fn can_complete(&self, next: usize) -> bool {
        let mu = self.mu;
        if mu == 0 {
            return true;
        }
        let n = self.space.base.size();
        let have = self.chosen.len();
        match &self.space.shape {
            Shape::Card { factor } => have + (n - next) >= factor * mu,
            Shape::ChiColor { chi, .. } => have + (n - next) >= chi * mu,
            Shape::Parts { suffix } => {
                suffix.iter().enumerate().all(|(p, row)| self.counts[p] + row[next] >= mu)
            }
            Shape::Blocks { block, starts, ends } => {
                let last = self.chosen.last().map(|&l| block[l] as usize);
                let mut classes = self.blocks_used;
                if let Some(b) = last {
                    let avail = self.counts[b] + ends[b].saturating_sub(next);
                    if avail < mu {
                        return false;
                    }
                }
                for b in 0..starts.len() {
                    if Some(b) == last || self.counts[b] > 0 {
                        continue;
                    }
                    let lo = starts[b].max(next);
                    if ends[b] > lo && ends[b] - lo >= mu {
                        classes += 1;
                    }
                }
                classes >= mu
            }
            Shape::Tree { level, height, ends, children, .. } => {
                if have == 0 {
                    return next == 0 && n > 0 && level[0] == 0;
                }
                self.chosen.iter().all(|&v| {
                    if level[v] >= *height {
                        return true;
                    }
                    if ends[v] <= next {
                        self.counts[v] >= mu
                    } else {
                        let open = children[v].iter().filter(|&&c| ends[c] > next).count();
                        self.counts[v] + open >= mu
                    }
                })
            }
        }
    }

    fn is_big(&self) -> bool {
        let mu = self.mu;
        if mu == 0 {
            return true;
        }
        let have = self.chosen.len();
        match &self.space.shape {
            Shape::Card { factor } => have >= factor * mu,
            Shape::ChiColor { chi, .. } => have >= chi * mu,
            Shape::Parts { .. } => self.counts.iter().all(|&c| c >= mu),
            Shape::Blocks { block, .. } => {
                self.blocks_used >= mu
                    && self.chosen.last().is_some_and(|&l| self.counts[block[l] as usize] >= mu)
            }
            Shape::Tree { level, height, .. } => {
                have > 0
                    && level[self.chosen[0]] == 0
                    && self.chosen.iter().all(|&v| level[v] >= *height || self.counts[v] >= mu)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{is_big, make_canonical, FinStructure};
    use crate::tuples::{sub_tuples, Combinations};

    fn closed_big_subsets(base: &FinStructure, level: BignessLevel) -> Vec<Vec<usize>> {
        let n = base.size();
        let mut out = Vec::new();
        for mask in 0u32..1 << n {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let (sub, map) = crate::structures::induced_substructure(base, &set).unwrap();
            if map == set && crate::structures::is_member(base.class(), &sub) && is_big(&sub, level) {
                out.push(set);
            }
        }
        out
    }

    #[test]
    fn frontier_covers_every_big_closed_subset() {
        let bases = vec![
            FinStructure::chi_or_with_sizes(&[3, 2]),
            FinStructure::ceq_with_sizes(&[2, 3, 1, 2]),
            make_canonical(ClassKind::NTree { height: 2 }, BignessLevel(2)).unwrap(),
            make_canonical(ClassKind::ChiColor { chi: 2 }, BignessLevel(3)).unwrap(),
            FinStructure::chain(6),
        ];
        for base in bases {
            for mu in 1..3 {
                let level = BignessLevel(mu);
                let space = SearchSpace::new(&base, 1).unwrap();
                let frontier = Searcher::new(&space).big_frontier(level, usize::MAX).unwrap();
                let all = closed_big_subsets(&base, level);
                for set in &frontier {
                    assert!(all.contains(set), "{:?} {set:?}", base.class());
                }
                for set in &all {
                    assert!(
                        frontier.iter().any(|f| f.iter().all(|x| set.contains(x))),
                        "{:?} big set {set:?} has no frontier subset",
                        base.class()
                    );
                }
            }
        }
    }

    #[test]
    fn monochromatic_triangle_in_k6() {
        let base = FinStructure::chain(6);
        let space = SearchSpace::new(&base, 2).unwrap();
        let colors: Vec<u32> = Combinations::new(6, 2).map(|p| u32::from(p[1] - p[0] == 1)).collect();
        let out = Searcher::new(&space).run(&colors, BignessLevel(3), u64::MAX);
        let KernelOutcome::Found(set, _) = out else { panic!("{out:?}") };
        let first = colors[space.table().space().rank(&[set[0], set[1]])];
        for t in sub_tuples(&set, 2) {
            assert_eq!(colors[space.table().space().rank(&t)], first);
        }
    }

    #[test]
    fn budget_is_reported() {
        let base = FinStructure::chain(8);
        let space = SearchSpace::new(&base, 2).unwrap();
        let colors = vec![0; space.tuple_count()];
        let out = Searcher::new(&space).run(&colors, BignessLevel(8), 3);
        assert_eq!(out, KernelOutcome::BudgetHit);
    }
}
