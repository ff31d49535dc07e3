use std::collections::{BTreeSet, HashMap};

use super::signature::OutputSignature;
use super::terms::{Parser, Term, TermTable};
use crate::error::{Error, Result};

/// Complete atomic diagram of `arity` variables up to term depth `depth`.
///
/// Equality is stored as the least-index representative of every term;
/// relations hold tuples of representatives only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    pub arity: usize,
    pub depth: usize,
    pub class_of: Vec<u32>,
    pub relations: Vec<BTreeSet<Vec<u32>>>,
}

impl Diagram {
    /// Diagram of a term valuation: terms are equal when their values are.
    pub fn from_values(
        arity: usize,
        depth: usize,
        values: &[u32],
        relations: &[BTreeSet<Vec<u32>>],
    ) -> Self {
        let mut first: HashMap<u32, u32> = HashMap::new();
        let class_of: Vec<u32> =
            values.iter().enumerate().map(|(i, &v)| *first.entry(v).or_insert(i as u32)).collect();
        let rels = relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter_map(|tuple| tuple.iter().map(|v| first.get(v).copied()).collect::<Option<Vec<u32>>>())
                    .collect()
            })
            .collect();
        Self { arity, depth, class_of, relations: rels }
    }

    pub fn rep(&self, term: u32) -> u32 {
        self.class_of[term as usize]
    }

    pub fn reps(&self) -> impl Iterator<Item = u32> + '_ {
        self.class_of.iter().enumerate().filter(|(i, &c)| c as usize == *i).map(|(_, &c)| c)
    }

    pub fn holds(&self, rel: usize, args: &[u32]) -> bool {
        let reps: Vec<u32> = args.iter().map(|&a| self.rep(a)).collect();
        self.relations[rel].contains(&reps)
    }

    /// Same diagram cut down to terms of depth at most `depth`.
    pub fn truncate(&self, table: &TermTable, depth: usize) -> Self {
        let n = table.prefix_len(depth);
        let n32 = n as u32;
        Self {
            arity: self.arity,
            depth: depth.min(self.depth),
            class_of: self.class_of[..n].to_vec(),
            relations: self
                .relations
                .iter()
                .map(|rel| rel.iter().filter(|t| t.iter().all(|&x| x < n32)).cloned().collect())
                .collect(),
        }
    }

    /// Diagram of the variables selected by 0-based `selection`, over `small`,
    /// a table with `selection.len()` variables. `table` is this diagram's table.
    pub fn restrict(&self, table: &TermTable, small: &TermTable, selection: &[usize]) -> Self {
        let image = small.substitute(table, selection);
        let mut small_rep: HashMap<u32, u32> = HashMap::new();
        let class_of: Vec<u32> = image
            .iter()
            .enumerate()
            .map(|(u, &t)| *small_rep.entry(self.rep(t)).or_insert(u as u32))
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter_map(|tuple| tuple.iter().map(|r| small_rep.get(r).copied()).collect::<Option<Vec<u32>>>())
                    .collect()
            })
            .collect();
        Self { arity: selection.len(), depth: small.depth(), class_of, relations }
    }

    /// Atoms that break the equivalence or congruence invariants.
    pub fn congruence_violations(&self, sig: &OutputSignature, table: &TermTable) -> Vec<String> {
        let mut out = Vec::new();
        if self.class_of.len() != table.len() {
            out.push(format!("diagram covers {} terms, expected {}", self.class_of.len(), table.len()));
            return out;
        }
        for (u, &c) in self.class_of.iter().enumerate() {
            if c as usize > u || self.class_of[c as usize] != c {
                out.push(format!("{}={}", table.format(sig, u as u32), table.format(sig, c)));
            }
        }
        let mut apps: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        for (u, t) in table.terms().iter().enumerate() {
            if let Term::App(f, args) = t {
                let key = (*f, args.iter().map(|&a| self.rep(a)).collect());
                let c = self.class_of[u];
                if let Some(&prev) = apps.get(&key) {
                    if self.class_of[prev as usize] != c {
                        out.push(format!("{}={}", table.format(sig, prev), table.format(sig, u as u32)));
                    }
                } else {
                    apps.insert(key, u as u32);
                }
            }
        }
        for (r, rel) in self.relations.iter().enumerate() {
            for tuple in rel {
                let bad = tuple.len() != sig.relations[r].arity
                    || tuple.iter().any(|&x| x as usize >= self.class_of.len() || self.class_of[x as usize] != x);
                if bad {
                    out.push(format!("{}{:?}", sig.relations[r].name, tuple));
                }
            }
        }
        out
    }

    /// First atom on which the two diagrams disagree, in canonical atom order.
    pub fn first_difference(&self, other: &Diagram, sig: &OutputSignature, table: &TermTable) -> Option<String> {
        if self.class_of.len() != other.class_of.len() {
            return Some(format!("term count {} vs {}", self.class_of.len(), other.class_of.len()));
        }
        for u in 0..self.class_of.len() {
            for v in 0..u {
                let a = self.class_of[u] == self.class_of[v];
                if a != (other.class_of[u] == other.class_of[v]) {
                    return Some(format!("{}={}", table.format(sig, v as u32), table.format(sig, u as u32)));
                }
            }
        }
        for (r, (a, b)) in self.relations.iter().zip(&other.relations).enumerate() {
            if let Some(t) = a.symmetric_difference(b).min() {
                return Some(format_relation(sig, table, r, t));
            }
        }
        None
    }

    /// True atoms in canonical order: `term=rep` for every non-representative
    /// term, then relation atoms by symbol and argument indices.
    pub fn atoms(&self, sig: &OutputSignature, table: &TermTable) -> Vec<String> {
        let mut out: Vec<String> = self
            .class_of
            .iter()
            .enumerate()
            .filter(|(u, &c)| c as usize != *u)
            .map(|(u, &c)| format!("{}={}", table.format(sig, u as u32), table.format(sig, c)))
            .collect();
        for (r, rel) in self.relations.iter().enumerate() {
            out.extend(rel.iter().map(|t| format_relation(sig, table, r, t)));
        }
        out
    }

    /// Parses a list of true atoms; every atom not derivable is false.
    pub fn from_atoms(sig: &OutputSignature, table: &TermTable, atoms: &[String]) -> Result<Self> {
        let mut parent: Vec<u32> = (0..table.len() as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut rel_atoms = Vec::new();
        for atom in atoms {
            if let Some((lhs, rhs)) = atom.split_once('=') {
                let a = find(&mut parent, table.parse(sig, lhs.trim())?);
                let b = find(&mut parent, table.parse(sig, rhs.trim())?);
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi as usize] = lo;
            } else {
                let mut p = Parser { text: atom.as_bytes(), pos: 0 };
                let name = p.ident()?;
                let r = sig.relation(&name).ok_or_else(|| p.error(&format!("unknown relation `{name}`")))?;
                let mut args = Vec::new();
                if !p.eat(b'(') {
                    return Err(p.error("expected `(`"));
                }
                if !p.eat(b')') {
                    loop {
                        args.push(p.term(table, sig)?);
                        if p.eat(b')') {
                            break;
                        }
                        if !p.eat(b',') {
                            return Err(p.error("expected `,` or `)`"));
                        }
                    }
                }
                if p.pos != p.text.len() {
                    return Err(p.error("trailing input"));
                }
                if args.len() != sig.relations[r].arity {
                    return Err(Error::Schema(format!("`{name}` takes {} arguments", sig.relations[r].arity)));
                }
                rel_atoms.push((r, args));
            }
        }
        // union by least index keeps every root the least member of its class
        let class_of: Vec<u32> = (0..table.len() as u32).map(|u| find(&mut parent, u)).collect();
        let mut relations = vec![BTreeSet::new(); sig.relations.len()];
        for (r, args) in rel_atoms {
            relations[r].insert(args.iter().map(|&a| class_of[a as usize]).collect());
        }
        Ok(Self { arity: table.vars(), depth: table.depth(), class_of, relations })
    }
}

fn format_relation(sig: &OutputSignature, table: &TermTable, r: usize, args: &[u32]) -> String {
    let inner: Vec<String> = args.iter().map(|&a| table.format(sig, a)).collect();
    format!("{}({})", sig.relations[r].name, inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blueprints::signature::Symbol;

    #[test]
    fn atoms_roundtrip_and_restriction() {
        let sig = OutputSignature {
            relations: vec![Symbol { name: "R".into(), arity: 1 }],
            functions: vec![Symbol { name: "f".into(), arity: 1 }],
            constants: vec![],
        };
        let t2 = TermTable::new(&sig, 2, 1).unwrap();
        let atoms = vec!["f(x2)=f(x1)".to_string(), "R(x1)".to_string()];
        let d = Diagram::from_atoms(&sig, &t2, &atoms).unwrap();
        assert!(d.congruence_violations(&sig, &t2).is_empty());
        assert_eq!(Diagram::from_atoms(&sig, &t2, &d.atoms(&sig, &t2)).unwrap(), d);
        let t1 = TermTable::new(&sig, 1, 1).unwrap();
        let first = d.restrict(&t2, &t1, &[0]);
        assert!(first.holds(0, &[0]));
        let second = d.restrict(&t2, &t1, &[1]);
        assert!(!second.holds(0, &[0]));
        assert_eq!(second.class_of, vec![0, 1]);
    }
}
