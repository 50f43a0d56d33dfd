//! Name-keyed registries of interchangeable strategies.
//!
//! MDS constructions, CSS constructions and syndrome oracles are each a family
//! of trait objects; campaigns and the CLI pick members by name.

use thiserror::Error;

/// Anything that can be looked up in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("a strategy named `{0}` is already registered")]
    Duplicate(String),
    #[error("unknown strategy `{name}` (known: {})", known.join(", "))]
    Unknown { name: String, known: Vec<String> },
}

/// Insertion-ordered registry of boxed strategies.
pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, strategy: Box<T>) -> Result<(), RegistryError> {
        if self.entries.iter().any(|e| e.name() == strategy.name()) {
            return Err(RegistryError::Duplicate(strategy.name().to_string()));
        }
        self.entries.push(strategy);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&T, RegistryError> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| RegistryError::Unknown {
                name: name.to_string(),
                known: self.names().into_iter().map(String::from).collect(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
