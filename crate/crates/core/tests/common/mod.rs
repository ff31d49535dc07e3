//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sprbench::blueprints::{Diagram, OutputSignature, OutputStructure, Symbol, TermTable};
use sprbench::structures::{make_canonical, BignessLevel, ClassKind, FinStructure};
use sprbench::tuples::Combinations;
use sprbench::types::tuple_type;
use sprbench::Blueprint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const KINDS: usize = 7;

/// A random member of the `kind`-th class with at most `max` elements.
pub fn random_member(kind: usize, max: usize, r: &mut ChaCha8Rng) -> FinStructure {
    let n = r.random_range(1..=max);
    match kind % KINDS {
        0 => FinStructure::chain(n),
        1 => {
            let chi = r.random_range(1..=3u32);
            let mut parts: Vec<u32> = (0..n).map(|_| r.random_range(0..chi)).collect();
            parts.sort();
            FinStructure::chi_or(chi, parts)
        }
        2 => {
            let chi = r.random_range(1..=3u32);
            FinStructure::chi_color(chi, (0..n as u32).map(|i| i % chi).collect())
        }
        3 => {
            let height = r.random_range(1..=3u32);
            random_tree(height, n, r)
        }
        4 => {
            let mut sizes = Vec::new();
            let mut left = n;
            while left > 0 {
                let s = r.random_range(1..=left);
                sizes.push(s);
                left -= s;
            }
            FinStructure::ceq_with_sizes(&sizes)
        }
        5 => {
            let edges: Vec<(usize, usize)> =
                Combinations::new(n, 2).filter(|_| r.random_bool(0.5)).map(|e| (e[0], e[1])).collect();
            FinStructure::ordered_graph(n, &edges)
        }
        _ => {
            let k = r.random_range(1..=3u32);
            let sigma = r.random_range(1..=3u32);
            let mut map = BTreeMap::new();
            for size in 0..(k as usize).min(n + 1) {
                for set in Combinations::new(n, size) {
                    map.insert(set.into_iter().map(|x| x as u32).collect(), r.random_range(0..sigma));
                }
            }
            FinStructure::hypergraph(k, sigma, n, map)
        }
    }
}

/// Random rooted tree in preorder with at most `n` nodes.
fn random_tree(height: u32, n: usize, r: &mut ChaCha8Rng) -> FinStructure {
    let mut parent = vec![None];
    let mut level = vec![0u32];
    // stack of open ancestors; each new node is a child of one of them
    let mut open = vec![0usize];
    while parent.len() < n {
        let keep = r.random_range(1..=open.len());
        open.truncate(keep);
        let p = *open.last().unwrap();
        if level[p] >= height {
            open.pop();
            if open.is_empty() {
                break;
            }
            continue;
        }
        let v = parent.len();
        parent.push(Some(p as u32));
        level.push(level[p] + 1);
        open.push(v);
    }
    FinStructure::tree(height, parent, level)
}

/// Quantifier-free facts about a tuple, computed directly from the payload
/// without going through the type machinery. Trees are not covered.
pub fn brute_signature(s: &FinStructure, t: &[usize]) -> Vec<u64> {
    let mut out = Vec::new();
    match s.class() {
        ClassKind::Or => {}
        ClassKind::ChiOr { .. } => out.extend(t.iter().map(|&x| u64::from(s.part(x).unwrap()))),
        ClassKind::ChiColor { .. } => out.extend(t.iter().map(|&x| u64::from(s.color(x).unwrap()))),
        ClassKind::Ceq => {
            for (i, j) in pairs(t.len()) {
                out.push(u64::from(s.block(t[i]) == s.block(t[j])));
            }
        }
        ClassKind::OrderedGraph => {
            for (i, j) in pairs(t.len()) {
                out.push(u64::from(s.adjacent(t[i], t[j])));
            }
        }
        ClassKind::Hypergraph { arity_bound, .. } => {
            for k in 0..(arity_bound as usize).min(t.len() + 1) {
                for sel in Combinations::new(t.len(), k) {
                    let set: Vec<u32> = sel.iter().map(|&i| t[i] as u32).collect();
                    out.push(u64::from(s.hyper_color(&set).unwrap()));
                }
            }
        }
        ClassKind::NTree { .. } => panic!("no brute signature for trees"),
    }
    out
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Distinct brute signatures over all increasing `n`-tuples of `s`.
pub fn brute_type_count(s: &FinStructure, n: usize) -> usize {
    Combinations::new(s.size(), n).map(|t| brute_signature(s, &t)).collect::<BTreeSet<_>>().len()
}

/// Whether some subset of the given sizes is classically monochromatic.
pub fn brute_has_mono_clique(n: usize, k: usize, color: impl Fn(usize, usize) -> u32) -> bool {
    Combinations::new(n, k).any(|set| {
        let c = color(set[0], set[1]);
        pairs(k).all(|(i, j)| color(set[i], set[j]) == c)
    })
}

/// Parameters of a random coherent blueprint.
#[derive(Clone, Debug)]
pub struct BlueprintSpec {
    pub class: ClassKind,
    pub index_level: u32,
    pub n_max: usize,
    pub depth: usize,
    pub functions: usize,
    pub constant: bool,
    /// Global functions send everything to one fixed element.
    pub global: Vec<bool>,
    /// Idempotent private functions satisfy `f(f(x)) = f(x)`.
    pub idempotent: Vec<bool>,
    pub relation_arities: Vec<usize>,
    pub seed: u64,
}

impl BlueprintSpec {
    pub fn random(seed: u64) -> Self {
        let mut r = rng(seed ^ 0x5eed_b10e);
        let (class, index_level) = match r.random_range(0..5) {
            0 => (ClassKind::Or, 5),
            1 => (ClassKind::ChiOr { chi: 2 }, 2),
            2 => (ClassKind::ChiColor { chi: 2 }, 2),
            3 => (ClassKind::Ceq, 2),
            _ => (ClassKind::NTree { height: 1 }, 3),
        };
        let n_max = r.random_range(2..=3);
        let functions = r.random_range(0..=2);
        let depth = if functions == 0 { 0 } else { r.random_range(1..=2) };
        let global = (0..functions).map(|_| r.random_bool(0.3)).collect();
        let idempotent = (0..functions).map(|_| r.random_bool(0.3)).collect();
        let relation_arities = (0..r.random_range(1..=2)).map(|_| r.random_range(1..=n_max.min(2))).collect();
        Self { class, index_level, n_max, depth, functions, constant: r.random_bool(0.5), global, idempotent, relation_arities, seed }
    }

    pub fn signature(&self) -> OutputSignature {
        OutputSignature {
            relations: self
                .relation_arities
                .iter()
                .enumerate()
                .map(|(i, &a)| Symbol { name: format!("R{i}"), arity: a })
                .collect(),
            functions: (0..self.functions).map(|i| Symbol { name: ["f", "g"][i].into(), arity: 1 }).collect(),
            constants: if self.constant { vec!["c".into()] } else { vec![] },
        }
    }

    pub fn index(&self) -> FinStructure {
        make_canonical(self.class, BignessLevel(self.index_level)).unwrap()
    }
}

/// Element of the type-determined model: an optional generator root and a word of functions.
type Elem = (Option<usize>, Vec<usize>);

/// A type-determined model over `index` and the blueprint read off it.
///
/// Terms evaluate to words over a generator; relations hold according to a
/// table keyed by the shape of the arguments and the type of their roots,
/// filled at random on first use. Generator tuples of one type therefore have
/// the same diagram, so the blueprint is coherent by construction.
pub fn random_blueprint(spec: &BlueprintSpec) -> (Blueprint, OutputStructure) {
    let index = spec.index();
    let sig = spec.signature();
    let apply = |f: usize, e: &Elem| -> Elem {
        if spec.global[f] {
            (None, vec![f])
        } else if spec.idempotent[f] && e.1.last() == Some(&f) {
            e.clone()
        } else {
            let mut w = e.1.clone();
            w.push(f);
            (e.0, w)
        }
    };
    let mut ids: BTreeMap<Elem, u32> = BTreeMap::new();
    let mut layer: Vec<Elem> = (0..index.size()).map(|g| (Some(g), vec![])).collect();
    if spec.constant {
        layer.push((None, vec![]));
    }
    for e in &layer {
        let next = ids.len() as u32;
        ids.entry(e.clone()).or_insert(next);
    }
    let mut fun_pairs: Vec<Vec<(Elem, Elem)>> = vec![Vec::new(); spec.functions];
    for _ in 0..spec.depth {
        let mut next_layer = Vec::new();
        for e in &layer {
            for (f, pairs) in fun_pairs.iter_mut().enumerate() {
                let v = apply(f, e);
                pairs.push((e.clone(), v.clone()));
                if !ids.contains_key(&v) {
                    let next = ids.len() as u32;
                    ids.insert(v.clone(), next);
                    next_layer.push(v);
                }
            }
        }
        layer = next_layer;
    }
    let elems: Vec<Elem> = {
        let mut v: Vec<(u32, Elem)> = ids.iter().map(|(e, &i)| (i, e.clone())).collect();
        v.sort();
        v.into_iter().map(|(_, e)| e).collect()
    };
    let mut m = OutputStructure::empty(&sig, elems.len());
    for (f, pairs) in fun_pairs.iter().enumerate() {
        for (a, b) in pairs {
            m.functions[f].insert(vec![ids[a]], ids[b]);
        }
    }
    if spec.constant {
        m.constants[0] = ids[&(None, vec![])];
    }
    let mut truth: HashMap<(usize, Vec<Elem>, Vec<u8>), bool> = HashMap::new();
    let mut r = rng(spec.seed);
    for (rel, &arity) in spec.relation_arities.iter().enumerate() {
        let mut args = vec![0usize; arity];
        'tuples: loop {
            let roots: BTreeSet<usize> = args.iter().filter_map(|&a| elems[a].0).collect();
            let roots: Vec<usize> = roots.into_iter().collect();
            let shape: Vec<Elem> = args
                .iter()
                .map(|&a| (elems[a].0.map(|g| roots.iter().position(|&x| x == g).unwrap()), elems[a].1.clone()))
                .collect();
            let code = if roots.is_empty() { vec![] } else { tuple_type(&index, &roots).unwrap().code().to_vec() };
            let holds = *truth.entry((rel, shape, code)).or_insert_with(|| r.random_bool(0.5));
            if holds {
                m.relations[rel].insert(args.iter().map(|&a| a as u32).collect());
            }
            for i in (0..arity).rev() {
                args[i] += 1;
                if args[i] < elems.len() {
                    continue 'tuples;
                }
                args[i] = 0;
            }
            break;
        }
    }
    m.validate().unwrap();

    let mut diagrams = BTreeMap::new();
    for k in 1..=spec.n_max.min(index.size()) {
        let table = TermTable::new(&sig, k, spec.depth).unwrap();
        for t in Combinations::new(index.size(), k) {
            let gens: Vec<u32> = t.iter().map(|&g| ids[&(Some(g), vec![])]).collect();
            let d: Diagram = m.diagram(&table, &gens).unwrap();
            let p = tuple_type(&index, &t).unwrap();
            if let Some(prev) = diagrams.insert(p, d.clone()) {
                assert_eq!(prev, d, "generator model is not type-determined");
            }
        }
    }
    let b = Blueprint { class: spec.class, signature: sig, n_max: spec.n_max, depth: spec.depth, diagrams };
    (b, m)
}

/// Generates a coherent blueprint, builds its term model over the index,
/// extracts a blueprint back from the model and compares.
pub fn blueprint_roundtrip(seed: u64) -> Result<(), String> {
    use sprbench::blueprints::{check_coherence, check_indiscernible, em_model, extract_blueprint};
    let spec = BlueprintSpec::random(seed);
    let (b, _) = random_blueprint(&spec);
    let ctx = |what: &str| format!("seed {seed} ({spec:?}): {what}");
    let violations = check_coherence(&b).map_err(|e| ctx(&e.to_string()))?;
    if !violations.is_empty() {
        return Err(ctx(&format!("incoherent: {:?}", violations[0])));
    }
    let back = Blueprint::from_json(&b.to_json().unwrap()).map_err(|e| ctx(&e.to_string()))?;
    if back != b {
        return Err(ctx("json roundtrip changed the blueprint"));
    }
    let index = spec.index();
    let m = em_model(&index, &b, spec.depth).map_err(|e| ctx(&format!("em_model: {e}")))?;
    if let Some(f) = check_indiscernible(&index, &m.structure, &m.generator_assignment(), spec.n_max, spec.depth)
        .map_err(|e| ctx(&e.to_string()))?
    {
        return Err(ctx(&format!("generators not indiscernible: {f:?}")));
    }
    let gens: Vec<u32> = m.generators.clone();
    let levels = vec![BignessLevel(spec.index_level); spec.n_max];
    let ex = extract_blueprint(&index, &m.structure, &gens, spec.n_max, spec.depth, &levels, u64::MAX)
        .map_err(|e| ctx(&format!("extract: {e}")))?
        .ok_or_else(|| ctx("extraction found nothing"))?;
    if ex.subset.len() != index.size() {
        return Err(ctx("extraction refined an already indiscernible index"));
    }
    if ex.blueprint.diagrams != b.diagrams {
        let bad = b.diagrams.keys().find(|p| ex.blueprint.diagrams.get(*p) != b.diagrams.get(*p));
        return Err(ctx(&format!("diagram mismatch at {:?}", bad.map(|p| p.describe()))));
    }
    if !check_coherence(&ex.blueprint).map_err(|e| ctx(&e.to_string()))?.is_empty() {
        return Err(ctx("extracted blueprint incoherent"));
    }
    Ok(())
}
