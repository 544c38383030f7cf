//! Structured outcome of a verification run.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::matrix::{Square, SymMatrix};

/// Data that exhibits a failure (or the extremal point of a passing check).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Matrix(Vec<Vec<f64>>),
    Vector(Vec<f64>),
}

impl From<&SymMatrix> for Witness {
    fn from(a: &SymMatrix) -> Self {
        Witness::Matrix(a.to_rows())
    }
}

impl From<&Square> for Witness {
    fn from(a: &Square) -> Self {
        Witness::Matrix(a.to_rows())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub pass: bool,
    pub margins: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Name of the margin or hypothesis responsible for a failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing: Option<String>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            pass: true,
            margins: BTreeMap::new(),
            counts: BTreeMap::new(),
            witness: None,
            notes: Vec::new(),
            failing: None,
        }
    }

    pub fn margin(&mut self, name: &str, value: f64) -> &mut Self {
        self.margins.insert(name.to_owned(), value);
        self
    }

    pub fn count(&mut self, name: &str, value: usize) -> &mut Self {
        self.counts.insert(name.to_owned(), value as u64);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Marks the report failed. The first failure keeps its name and witness.
    pub fn fail(&mut self, failing: &str, witness: Option<Witness>) -> &mut Self {
        if self.pass {
            self.pass = false;
            self.failing = Some(failing.to_owned());
            if witness.is_some() {
                self.witness = witness;
            }
        }
        self
    }

    pub fn get(&self, margin: &str) -> Option<f64> {
        self.margins.get(margin).copied()
    }
}
