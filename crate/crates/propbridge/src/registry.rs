use std::collections::BTreeMap;
use std::sync::Arc;

use globset::Glob;
use propbridge_core::property::Predicate;
use propbridge_core::{Bool, Fault, Property, PropertyError, Strategy, Term};
use thiserror::Error;

use crate::guard;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("property `{0}` is already registered")]
    DuplicateName(String),
    #[error(transparent)]
    InvalidName(#[from] PropertyError),
    #[error("invalid filter glob `{glob}`: {message}")]
    BadGlob { glob: String, message: String },
}

/// Named properties, kept in name order.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    props: BTreeMap<String, Property>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<I, S>(
        &mut self,
        name: &str,
        strategy: Strategy,
        predicate: impl Fn(&Term) -> Result<Bool, Fault> + Send + Sync + 'static,
        tags: I,
    ) -> Result<(), RegistryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let prop = Property::new(name, strategy, predicate)?.with_tags(tags);
        self.add(prop)
    }

    /// Add a property. Its predicate is wrapped so that a panic counts as a
    /// failure instead of tearing down the run.
    pub fn add(&mut self, prop: Property) -> Result<(), RegistryError> {
        if self.props.contains_key(prop.name()) {
            return Err(RegistryError::DuplicateName(prop.name().to_string()));
        }
        let inner = prop.predicate().clone();
        let guarded: Predicate = Arc::new(move |t: &Term| {
            guard::catch(|| inner(t))
                .unwrap_or_else(|msg| Err(Fault::Failed(format!("panicked: {msg}"))))
        });
        let prop = prop.with_predicate(guarded);
        self.props.insert(prop.name().to_string(), prop);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Property> {
        self.props.get(name)
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Property> {
        self.props.values()
    }

    /// Properties whose name matches `glob` (all of them without one).
    pub fn select(&self, glob: Option<&str>) -> Result<Vec<&Property>, RegistryError> {
        let Some(glob) = glob else {
            return Ok(self.iter().collect());
        };
        let matcher = Glob::new(glob)
            .map_err(|e| RegistryError::BadGlob {
                glob: glob.to_string(),
                message: e.kind().to_string(),
            })?
            .compile_matcher();
        Ok(self.iter().filter(|p| matcher.is_match(p.name())).collect())
    }
}
