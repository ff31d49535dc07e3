//! Bounded-depth terms in a fixed canonical order.
//!
//! Terms are listed by depth, then variables, then constants, then
//! applications ordered by function symbol and the indices of their
//! arguments. The table of depth `d` is a prefix of the table of depth `d+1`.

use std::collections::HashMap;

use super::signature::{is_variable_name, OutputSignature};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(u32),
    Const(u32),
    App(u32, Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct TermTable {
    vars: usize,
    depth: usize,
    terms: Vec<Term>,
    // terms[..level_end[k]] are the terms of depth at most k
    level_end: Vec<usize>,
    index: HashMap<Term, u32>,
}

impl TermTable {
    pub fn new(sig: &OutputSignature, vars: usize, depth: usize) -> Result<Self> {
        let mut terms: Vec<Term> = (0..vars as u32).map(Term::Var).collect();
        terms.extend((0..sig.constants.len() as u32).map(Term::Const));
        let mut level_end = vec![terms.len()];
        let mut depth_of = vec![0usize; terms.len()];
        for k in 1..=depth {
            let prev = level_end[k - 1];
            for (f, sym) in sig.functions.iter().enumerate() {
                if sym.arity > 0 && prev == 0 {
                    continue;
                }
                let mut args = vec![0u32; sym.arity];
                'odometer: loop {
                    let max_depth = args.iter().map(|&a| depth_of[a as usize]).max().unwrap_or(0);
                    if max_depth == k - 1 {
                        if terms.len() >= MAX_TERMS {
                            return Err(Error::TooLarge(format!("more than {MAX_TERMS} terms at depth {depth}")));
                        }
                        terms.push(Term::App(f as u32, args.clone()));
                        depth_of.push(k);
                    }
                    // lexicographic successor, last argument fastest
                    for i in (0..args.len()).rev() {
                        args[i] += 1;
                        if (args[i] as usize) < prev {
                            continue 'odometer;
                        }
                        args[i] = 0;
                    }
                    break;
                }
            }
            level_end.push(terms.len());
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Self { vars, depth, terms, level_end, index })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms of depth at most `depth`.
    pub fn prefix_len(&self, depth: usize) -> usize {
        self.level_end[depth.min(self.depth)]
    }

    pub fn term(&self, id: u32) -> &Term {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn id(&self, t: &Term) -> Option<u32> {
        self.index.get(t).copied()
    }

    /// Image in `target` of every term under the variable map `x_i -> x_{vars[i]}`,
    /// restricted to terms of depth at most `target.depth()`.
    pub fn substitute(&self, target: &TermTable, vars: &[usize]) -> Vec<u32> {
        let n = self.prefix_len(target.depth);
        let mut out: Vec<u32> = Vec::with_capacity(n);
        for t in &self.terms[..n] {
            let image = match t {
                Term::Var(v) => Term::Var(vars[*v as usize] as u32),
                Term::Const(c) => Term::Const(*c),
                Term::App(f, args) => Term::App(*f, args.iter().map(|&a| out[a as usize]).collect()),
            };
            out.push(target.id(&image).expect("substitution stays within depth"));
        }
        out
    }

    pub fn format(&self, sig: &OutputSignature, id: u32) -> String {
        match &self.terms[id as usize] {
            Term::Var(v) => format!("x{}", v + 1),
            Term::Const(c) => sig.constants[*c as usize].clone(),
            Term::App(f, args) => {
                let inner: Vec<String> = args.iter().map(|&a| self.format(sig, a)).collect();
                format!("{}({})", sig.functions[*f as usize].name, inner.join(","))
            }
        }
    }

    pub fn parse(&self, sig: &OutputSignature, text: &str) -> Result<u32> {
        let mut p = Parser { text: text.as_bytes(), pos: 0 };
        let id = p.term(self, sig)?;
        if p.pos != p.text.len() {
            return Err(Error::Schema(format!("trailing input in term `{text}`")));
        }
        Ok(id)
    }
}

pub(crate) struct Parser<'a> {
    pub text: &'a [u8],
    pub pos: usize,
}

impl Parser<'_> {
    pub fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.text.len() && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a symbol name"));
        }
        Ok(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.text.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn error(&self, msg: &str) -> Error {
        Error::Schema(format!("{msg} at offset {} of `{}`", self.pos, String::from_utf8_lossy(self.text)))
    }

    pub fn term(&mut self, table: &TermTable, sig: &OutputSignature) -> Result<u32> {
        let name = self.ident()?;
        let term = if self.eat(b'(') {
            let f = sig.function(&name).ok_or_else(|| self.error(&format!("unknown function `{name}`")))?;
            let mut args = Vec::new();
            if !self.eat(b')') {
                loop {
                    args.push(self.term(table, sig)?);
                    if self.eat(b')') {
                        break;
                    }
                    if !self.eat(b',') {
                        return Err(self.error("expected `,` or `)`"));
                    }
                }
            }
            if args.len() != sig.functions[f].arity {
                return Err(self.error(&format!("`{name}` takes {} arguments", sig.functions[f].arity)));
            }
            Term::App(f as u32, args)
        } else if is_variable_name(&name) {
            let v: usize = name[1..].parse().map_err(|_| self.error("bad variable"))?;
            if v == 0 || v > table.vars {
                return Err(self.error(&format!("variable `{name}` out of range")));
            }
            Term::Var(v as u32 - 1)
        } else {
            Term::Const(sig.constant(&name).ok_or_else(|| self.error(&format!("unknown constant `{name}`")))? as u32)
        };
        table.id(&term).ok_or_else(|| self.error("term exceeds the depth bound"))
    }
}
