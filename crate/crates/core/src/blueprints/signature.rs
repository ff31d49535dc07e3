use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Relation, function and constant symbols of an output structure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSignature {
    #[serde(default)]
    pub relations: Vec<Symbol>,
    #[serde(default)]
    pub functions: Vec<Symbol>,
    #[serde(default)]
    pub constants: Vec<String>,
}

impl OutputSignature {
    /// Names must be identifiers, unique across all symbols, and must not
    /// look like a variable `x<digits>`.
    pub fn validate(&self) -> Result<()> {
        let names = self
            .relations
            .iter()
            .chain(&self.functions)
            .map(|s| s.name.as_str())
            .chain(self.constants.iter().map(String::as_str));
        let mut seen = std::collections::HashSet::new();
        for name in names {
            let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ident {
                return Err(Error::Schema(format!("symbol name `{name}` is not an identifier")));
            }
            if is_variable_name(name) {
                return Err(Error::Schema(format!("symbol name `{name}` clashes with variable names")));
            }
            if !seen.insert(name) {
                return Err(Error::Schema(format!("duplicate symbol name `{name}`")));
            }
        }
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn function(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|s| s == name)
    }
}

pub(crate) fn is_variable_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('x') && name[1..].chars().all(|c| c.is_ascii_digit())
}
