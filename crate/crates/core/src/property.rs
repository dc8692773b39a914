use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::carrier::{Bool, Fault, Term};
use crate::strategy::Strategy;
use crate::value::Value;

/// Harness body: maps a carrier term to the asserted condition.
pub type Predicate = Arc<dyn Fn(&Term) -> Result<Bool, Fault> + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("invalid property name {0:?}: expected [A-Za-z0-9_.:-]+")]
    InvalidName(String),
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b':' | b'-'))
}

/// A named harness: a strategy for its inputs plus the predicate that must
/// hold for every one of them.
#[derive(Clone)]
pub struct Property {
    name: String,
    strategy: Strategy,
    predicate: Predicate,
    tags: Vec<String>,
}

impl fmt::Debug for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property")
            .field("name", &self.name)
            .field("strategy", &self.strategy)
            .field("tags", &self.tags)
            .finish_non_exhaustive()
    }
}

/// Outcome of one concrete predicate evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Pass,
    Fail(String),
}

impl Evaluation {
    pub fn failed(&self) -> bool {
        matches!(self, Evaluation::Fail(_))
    }
}

impl Property {
    pub fn new(
        name: impl Into<String>,
        strategy: Strategy,
        predicate: impl Fn(&Term) -> Result<Bool, Fault> + Send + Sync + 'static,
    ) -> Result<Self, PropertyError> {
        Self::from_parts(name, strategy, Arc::new(predicate), Vec::new())
    }

    pub fn from_parts(
        name: impl Into<String>,
        strategy: Strategy,
        predicate: Predicate,
        tags: Vec<String>,
    ) -> Result<Self, PropertyError> {
        let name = name.into();
        if !is_valid_name(&name) {
            return Err(PropertyError::InvalidName(name));
        }
        Ok(Property {
            name,
            strategy,
            predicate,
            tags,
        })
    }

    pub fn with_tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tags = tags.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_predicate(mut self, predicate: Predicate) -> Self {
        self.predicate = predicate;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Run the predicate on the carrier directly.
    pub fn apply(&self, term: &Term) -> Result<Bool, Fault> {
        (self.predicate)(term)
    }

    /// Evaluate on a concrete input. Aborts count as failures.
    pub fn evaluate(&self, v: &Value) -> Evaluation {
        match self.apply(&Term::from_value(v)) {
            Ok(Bool::Lit(true)) => Evaluation::Pass,
            Ok(Bool::Lit(false)) => Evaluation::Fail("assertion failed".into()),
            Ok(Bool::Fault(f)) | Err(f) => Evaluation::Fail(f.to_string()),
            Ok(Bool::Sym(s)) => Evaluation::Fail(format!(
                "predicate produced a symbolic result {s} on a concrete input"
            )),
        }
    }
}
