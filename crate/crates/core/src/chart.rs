use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coordinate chart: an ordered list of unique coordinate names.
///
/// Every expression refers to coordinates by index into a chart, and every
/// form or vector field is attached to exactly one chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Usage("a chart needs at least one coordinate".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Usage(format!("`{name}` is not a valid coordinate name")));
            }
            if names[..i].contains(name) {
                return Err(Error::Usage(format!("duplicate coordinate `{name}`")));
            }
        }
        Ok(Arc::new(Self { names }))
    }

    /// The default space-time chart `(x, y, z, t)`.
    pub fn spacetime() -> Arc<Self> {
        Self::new(["x", "y", "z", "t"]).expect("static chart")
    }

    /// Parameter chart of the unit `p`-cube, coordinates `s0 .. s{p-1}`.
    pub fn cube(p: usize) -> Arc<Self> {
        Arc::new(Self {
            names: (0..p).map(|i| format!("s{i}")).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k < self.dim() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "coordinate index {k} out of range for a {}-dimensional chart",
                self.dim()
            )))
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
