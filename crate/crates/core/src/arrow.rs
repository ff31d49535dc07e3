//! Finite instances of the structural arrow relation.
//!
//! Only the canonical `λ`-big structure is checked: it embeds class-closed
//! into every `λ`-big member, and a homogeneous subset of the embedded copy
//! stays homogeneous for the restricted coloring.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colorings::{Coloring, ColoringDoc};
use crate::error::{Error, Result};
use crate::search::{KernelOutcome, SearchSpace, Searcher};
use crate::structures::{induced_substructure, make_canonical, BignessLevel, ClassKind, FinStructure};
use crate::tuples::{sub_tuples, Combinations};

pub const DEFAULT_CEILING: u128 = 1 << 26;

/// Largest frontier family the counterexample search will index.
const FAMILY_CAP: usize = 1 << 20;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Randomized { samples: u64, seed: u64 },
    /// Simulated annealing; `budget` counts proposed flips.
    CounterexampleSearch { budget: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ArrowQuery {
    pub class: ClassKind,
    pub lambda: BignessLevel,
    pub mu: BignessLevel,
    pub arity: usize,
    pub colors: u32,
    pub mode: Mode,
    pub ceiling: u128,
}

impl ArrowQuery {
    pub fn new(class: ClassKind, lambda: u32, mu: u32, arity: usize, colors: u32, mode: Mode) -> Self {
        Self {
            class,
            lambda: BignessLevel(lambda),
            mu: BignessLevel(mu),
            arity,
            colors,
            mode,
            ceiling: DEFAULT_CEILING,
        }
    }

    fn validate(&self) -> Result<()> {
        self.class.validate()?;
        if self.arity == 0 {
            return Err(Error::InvalidSelection("arity must be at least 1".into()));
        }
        if self.colors == 0 {
            return Err(Error::InvalidSelection("at least one color is required".into()));
        }
        if self.mu > self.lambda {
            return Err(Error::InvalidSelection(format!(
                "target level {} exceeds ambient level {}",
                self.mu.0, self.lambda.0
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails(Coloring),
    Unknown,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails(_) => "fails",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Set when every coloring was examined.
    pub all_covered: bool,
    pub colorings_examined: u64,
    /// Search nodes, plus proposed flips in counterexample mode.
    pub work: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictDoc {
    pub outcome: &'static str,
    pub all_covered: bool,
    pub colorings_examined: u64,
    pub work: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ColoringDoc>,
}

impl Verdict {
    pub fn to_doc(&self) -> VerdictDoc {
        VerdictDoc {
            outcome: self.outcome.name(),
            all_covered: self.all_covered,
            colorings_examined: self.colorings_examined,
            work: self.work,
            witness: match &self.outcome {
                Outcome::Fails(c) => Some(c.to_doc()),
                _ => None,
            },
        }
    }
}

pub fn arrow_check(q: &ArrowQuery) -> Result<Verdict> {
    q.validate()?;
    let base = make_canonical(q.class, q.lambda)?;
    let space = SearchSpace::new(&base, q.arity)?;
    match q.mode {
        Mode::Exhaustive => exhaustive(&space, q),
        Mode::Randomized { samples, seed } => randomized(&space, q, samples, seed),
        Mode::CounterexampleSearch { budget, seed } => annealing(&space, q, budget, seed),
    }
}

fn colorings_needed(colors: u32, tuples: usize) -> Option<u128> {
    u128::from(colors).checked_pow(u32::try_from(tuples).ok()?)
}

/// Writes coloring `index` into `table`; tuple rank 0 is the least significant digit.
fn decode(mut index: u64, colors: u32, table: &mut [u32]) {
    for slot in table.iter_mut() {
        *slot = (index % u64::from(colors)) as u32;
        index /= u64::from(colors);
    }
}

fn increment(colors: u32, table: &mut [u32]) {
    for slot in table.iter_mut() {
        *slot += 1;
        if *slot < colors {
            return;
        }
        *slot = 0;
    }
}

struct ChunkResult {
    start: u64,
    fail: Option<u64>,
    nodes: u64,
}

fn exhaustive(space: &SearchSpace, q: &ArrowQuery) -> Result<Verdict> {
    let t = space.tuple_count();
    let needed = colorings_needed(q.colors, t);
    let total = match needed {
        Some(n) if n <= q.ceiling && n <= u128::from(u64::MAX) => n as u64,
        _ => {
            return Err(Error::ExhaustiveCeiling {
                needed: needed.map_or_else(|| format!("{}^{t}", q.colors), |n| n.to_string()),
                ceiling: q.ceiling,
            })
        }
    };
    let best = AtomicU64::new(u64::MAX);
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let results: Vec<ChunkResult> = chunks
        .par_iter()
        .map(|&c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut out = ChunkResult { start, fail: None, nodes: 0 };
            if start > best.load(Ordering::Relaxed) {
                return out;
            }
            let mut searcher = Searcher::new(space);
            let mut table = vec![0u32; t];
            decode(start, q.colors, &mut table);
            for i in start..end {
                if i > best.load(Ordering::Relaxed) {
                    break;
                }
                let outcome = searcher.run(&table, q.mu, u64::MAX);
                out.nodes += searcher.nodes();
                if outcome == KernelOutcome::Exhausted {
                    out.fail = Some(i);
                    best.fetch_min(i, Ordering::Relaxed);
                    break;
                }
                increment(q.colors, &mut table);
            }
            out
        })
        .collect();
    let fail = results.iter().filter_map(|r| r.fail).min();
    // only chunks at or before the first failure count, so the statistics do not
    // depend on scheduling
    let limit = fail.unwrap_or(u64::MAX);
    let work = results.iter().filter(|r| r.start <= limit).map(|r| r.nodes).sum();
    Ok(match fail {
        Some(f) => {
            let mut table = vec![0u32; t];
            decode(f, q.colors, &mut table);
            Verdict {
                outcome: Outcome::Fails(Coloring::from_table(space.base(), q.arity, q.colors, table)?),
                all_covered: false,
                colorings_examined: f + 1,
                work,
            }
        }
        None => Verdict { outcome: Outcome::Holds, all_covered: true, colorings_examined: total, work },
    })
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn randomized(space: &SearchSpace, q: &ArrowQuery, samples: u64, seed: u64) -> Result<Verdict> {
    let t = space.tuple_count();
    let per_sample: Vec<(u64, Option<Vec<u32>>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let table: Vec<u32> = (0..t).map(|_| rng.random_range(0..q.colors)).collect();
            let mut searcher = Searcher::new(space);
            let outcome = searcher.run(&table, q.mu, u64::MAX);
            (searcher.nodes(), (outcome == KernelOutcome::Exhausted).then_some(table))
        })
        .collect();
    let first = per_sample.iter().position(|(_, f)| f.is_some());
    let examined = first.map_or(samples, |f| f as u64 + 1);
    let work = per_sample[..examined as usize].iter().map(|(n, _)| n).sum();
    Ok(match first {
        Some(f) => Verdict {
            outcome: Outcome::Fails(Coloring::from_table(
                space.base(),
                q.arity,
                q.colors,
                per_sample[f].1.clone().expect("position matched a failure"),
            )?),
            all_covered: false,
            colorings_examined: examined,
            work,
        },
        None => Verdict { outcome: Outcome::Unknown, all_covered: false, colorings_examined: examined, work },
    })
}

/// Annealing over colorings, minimizing the number of homogeneous sets among
/// the minimal big closed subsets reached by the kernel. A coloring with no
/// homogeneous such set has no big homogeneous set at all, which is then
/// confirmed by an exhaustive kernel run.
fn annealing(space: &SearchSpace, q: &ArrowQuery, budget: u64, seed: u64) -> Result<Verdict> {
    let t = space.tuple_count();
    let family = Searcher::new(space)
        .big_frontier(q.mu, FAMILY_CAP)
        .ok_or_else(|| Error::TooLarge(format!("more than {FAMILY_CAP} minimal big subsets")))?;
    let tuples = space.table().space();
    let ids = space.table().ids();
    // tuple ranks per family set and family sets per tuple rank
    let members: Vec<Vec<usize>> =
        family.iter().map(|s| sub_tuples(s, q.arity).map(|tu| tuples.rank(&tu)).collect()).collect();
    let mut touching = vec![Vec::new(); t];
    for (f, ranks) in members.iter().enumerate() {
        for &r in ranks {
            touching[r].push(f);
        }
    }
    let mut witness = vec![u32::MAX; space.table().num_types()];
    let mut homogeneous = |table: &[u32], f: usize| -> bool {
        let mut ok = true;
        for &r in &members[f] {
            let ty = ids[r] as usize;
            if witness[ty] == u32::MAX {
                witness[ty] = table[r];
            } else if witness[ty] != table[r] {
                ok = false;
                break;
            }
        }
        for &r in &members[f] {
            witness[ids[r] as usize] = u32::MAX;
        }
        ok
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flips = 0u64;
    let mut nodes = 0u64;
    let mut examined = 0u64;
    let restarts = 4u64;
    let per_restart = budget.div_ceil(restarts).max(1);
    let mut searcher = Searcher::new(space);
    while flips < budget || (budget == 0 && examined == 0) {
        let mut table: Vec<u32> = (0..t).map(|_| rng.random_range(0..q.colors)).collect();
        let mut hom: Vec<bool> = (0..family.len()).map(|f| homogeneous(&table, f)).collect();
        let mut energy = hom.iter().filter(|&&h| h).count();
        let stop = (flips + per_restart).min(budget);
        let start = flips;
        loop {
            if energy == 0 {
                examined += 1;
                let outcome = searcher.run(&table, q.mu, u64::MAX);
                nodes += searcher.nodes();
                if outcome == KernelOutcome::Exhausted {
                    return Ok(Verdict {
                        outcome: Outcome::Fails(Coloring::from_table(space.base(), q.arity, q.colors, table)?),
                        all_covered: false,
                        colorings_examined: examined,
                        work: nodes + flips,
                    });
                }
                return Err(Error::Internal("a big homogeneous set avoided every minimal big subset".into()));
            }
            if flips >= stop || q.colors < 2 || t == 0 {
                break;
            }
            flips += 1;
            // pick a tuple of a random homogeneous set and recolor it
            let hot: Vec<usize> = (0..family.len()).filter(|&f| hom[f]).collect();
            let f = hot[rng.random_range(0..hot.len())];
            let r = members[f][rng.random_range(0..members[f].len())];
            let old = table[r];
            let new = (old + rng.random_range(1..q.colors)) % q.colors;
            table[r] = new;
            let changed: Vec<(usize, bool)> = touching[r].iter().map(|&g| (g, homogeneous(&table, g))).collect();
            let delta: i64 = changed.iter().map(|&(g, h)| i64::from(h) - i64::from(hom[g])).sum();
            let progress = (flips - start) as f64 / (stop - start).max(1) as f64;
            let temperature = 2.0 * (1.0 - progress) + 0.05;
            if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp() {
                for (g, h) in changed {
                    hom[g] = h;
                }
                energy = (energy as i64 + delta) as usize;
            } else {
                table[r] = old;
            }
        }
        examined += 1;
        if budget == 0 || q.colors < 2 || t == 0 {
            break;
        }
    }
    Ok(Verdict { outcome: Outcome::Unknown, all_covered: false, colorings_examined: examined, work: nodes + flips })
}

#[derive(Clone, Debug)]
pub struct RamseyTable {
    pub rows: Vec<(BignessLevel, Verdict)>,
    pub least_holds: Option<BignessLevel>,
}

pub fn ramsey_table(
    class: ClassKind,
    mu: u32,
    arity: usize,
    colors: u32,
    lambda_max: u32,
    mode: Mode,
    ceiling: u128,
) -> Result<RamseyTable> {
    if lambda_max < mu {
        return Err(Error::InvalidSelection(format!("lambda_max {lambda_max} is below mu {mu}")));
    }
    let mut rows = Vec::new();
    for lambda in mu..=lambda_max {
        let mut q = ArrowQuery::new(class, lambda, mu, arity, colors, mode);
        q.ceiling = ceiling;
        let v = arrow_check(&q).map_err(|e| Error::Precondition(format!("row lambda={lambda}: {e}")))?;
        rows.push((BignessLevel(lambda), v));
    }
    let least_holds = rows.iter().find(|(_, v)| v.outcome == Outcome::Holds).map(|(l, _)| *l);
    if let Some(l) = least_holds {
        if rows.iter().any(|(m, v)| *m > l && matches!(v.outcome, Outcome::Fails(_))) {
            return Err(Error::Internal("table is not monotone in lambda".into()));
        }
    }
    Ok(RamseyTable { rows, least_holds })
}

/// An order-preserving embedding of `small` onto a class-closed subset of
/// `target`, found by brute force over subsets of the right size.
pub fn find_embedding(small: &FinStructure, target: &FinStructure) -> Option<Vec<usize>> {
    if small.class() != target.class() {
        return None;
    }
    let code = small.canonical_bytes();
    Combinations::new(target.size(), small.size()).find(|set| {
        induced_substructure(target, set)
            .is_ok_and(|(sub, map)| map == *set && sub.canonical_bytes() == code)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::find_type_homogeneous;

    #[test]
    fn six_chain_holds_five_chain_fails() {
        let v = arrow_check(&ArrowQuery::new(ClassKind::Or, 6, 3, 2, 2, Mode::Exhaustive)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.all_covered);
        assert_eq!(v.colorings_examined, 1 << 15);
        let v = arrow_check(&ArrowQuery::new(ClassKind::Or, 5, 3, 2, 2, Mode::Exhaustive)).unwrap();
        let Outcome::Fails(w) = v.outcome else { panic!() };
        let res = find_type_homogeneous(&w, BignessLevel(3), u64::MAX).unwrap();
        assert!(res.found.is_none() && res.exhaustive);
    }

    #[test]
    fn ceiling_is_enforced() {
        let mut q = ArrowQuery::new(ClassKind::Or, 6, 3, 2, 2, Mode::Exhaustive);
        q.ceiling = 1000;
        assert!(matches!(arrow_check(&q), Err(Error::ExhaustiveCeiling { .. })));
    }

    #[test]
    fn annealing_finds_pentagon_like_witness() {
        let q = ArrowQuery::new(ClassKind::Or, 5, 3, 2, 2, Mode::CounterexampleSearch { budget: 10_000, seed: 1 });
        assert!(matches!(arrow_check(&q).unwrap().outcome, Outcome::Fails(_)));
    }

    #[test]
    fn exhaustive_is_deterministic() {
        let q = ArrowQuery::new(ClassKind::ChiOr { chi: 2 }, 2, 2, 1, 2, Mode::Exhaustive);
        assert_eq!(arrow_check(&q).unwrap(), arrow_check(&q).unwrap());
    }
}
