use std::fmt;
use std::sync::Arc;

use super::{Result, SymError};

/// An ordered list of coordinate names. Monomial exponent vectors index into it,
/// so the order is fixed for the lifetime of the chart.
#[derive(Clone)]
pub struct Chart(Arc<[String]>);

impl Chart {
    pub fn new<I, S>(names: I) -> Result<Chart>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            let valid = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(SymError::InvalidChart(format!("bad coordinate name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(SymError::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart(names.into()))
    }

    /// Panicking constructor for the fixed charts used throughout the crate.
    pub fn of(names: &[&str]) -> Chart {
        Chart::new(names.iter().copied()).expect("static chart is valid")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| SymError::UnknownCoordinate(name.to_string()))
    }

    pub(crate) fn check_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SymError::ChartMismatch {
                left: self.0.join(","),
                right: other.0.join(","),
            })
        }
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.0.join(","))
    }
}
