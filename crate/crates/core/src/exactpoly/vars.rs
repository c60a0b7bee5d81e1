use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 16;

pub const Q: usize = 0;
pub const P: usize = 1;
pub const T: usize = 2;

/// Index of `a{i}` in a standard table.
pub const fn alpha(i: usize) -> usize {
    3 + i
}

/// Ordered variable names; position is the variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
    alpha_count: usize,
}

impl VarTable {
    /// `q, p, t, a0, …, a{n-1}`.
    pub fn standard(alpha_count: usize) -> Arc<VarTable> {
        Self::with_extra(alpha_count, &[]).expect("standard table fits")
    }

    /// Standard table followed by extra names (unknowns of an ansatz).
    pub fn with_extra(alpha_count: usize, extra: &[&str]) -> Result<Arc<VarTable>> {
        let mut names: Vec<String> = ["q", "p", "t"].iter().map(|s| s.to_string()).collect();
        names.extend((0..alpha_count).map(|i| format!("a{i}")));
        names.extend(extra.iter().map(|s| s.to_string()));
        Self::build(names, alpha_count)
    }

    pub fn new(names: Vec<String>) -> Result<Arc<VarTable>> {
        Self::build(names, 0)
    }

    fn build(names: Vec<String>, alpha_count: usize) -> Result<Arc<VarTable>> {
        if names.len() > MAX_VARS {
            return Err(Error::TooManyVariables(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(VarTable { names, alpha_count }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn alpha_count(&self) -> usize {
        self.alpha_count
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Indices past the parameters (ansatz unknowns).
    pub fn extra_indices(&self) -> std::ops::Range<usize> {
        alpha(self.alpha_count)..self.names.len()
    }
}

pub(crate) fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
