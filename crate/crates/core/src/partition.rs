//! Class partitions of cell indices: the projection from local cells onto
//! their congruence classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Sign;

/// Ordered partition of `0..size` into congruence classes.
///
/// Indices listed in `dropped` belong to no class: they are cells that became
/// degenerate under the lower-rank identification and were removed. For
/// vertex classes `dropped` is always empty.
///
/// Fields are public so that externally loaded maps can be inspected and
/// rejected by [`ClassPartition::check`] rather than at construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPartition {
    pub size: usize,
    pub classes: Vec<Vec<usize>>,
    pub dropped: Vec<usize>,
}

impl ClassPartition {
    /// The identity quotient: every index is its own class.
    pub fn singletons(size: usize) -> Self {
        Self {
            size,
            classes: (0..size).map(|i| vec![i]).collect(),
            dropped: Vec::new(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Verify that classes and dropped indices form a disjoint cover of
    /// `0..size` with no empty class.
    pub fn check(&self) -> Result<()> {
        let mut seen = vec![false; self.size];
        let mut mark = |i: usize| -> Result<()> {
            match seen.get_mut(i) {
                None => Err(Error::InvalidPartition(format!(
                    "index {} out of range 1..={}",
                    i + 1,
                    self.size
                ))),
                Some(true) => Err(Error::InvalidPartition(format!(
                    "index {} appears more than once",
                    i + 1
                ))),
                Some(slot) => {
                    *slot = true;
                    Ok(())
                }
            }
        };
        for (k, class) in self.classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidPartition(format!("class {} is empty", k + 1)));
            }
            class.iter().try_for_each(|&i| mark(i))?;
        }
        self.dropped.iter().try_for_each(|&i| mark(i))?;
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "index {} is not covered",
                missing + 1
            )));
        }
        Ok(())
    }

    pub fn is_partition(&self) -> bool {
        self.check().is_ok()
    }

    /// Map each index to its class; `None` for dropped indices.
    ///
    /// Assumes a valid partition.
    pub fn class_of(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.size];
        for (k, class) in self.classes.iter().enumerate() {
            for &i in class {
                map[i] = Some(k);
            }
        }
        map
    }

    /// True when classes are ordered by smallest member and each class leads
    /// with its smallest member (the seed).
    pub fn is_seed_ordered(&self) -> bool {
        let seeds_lead = self.classes.iter().all(|c| c.iter().all(|&i| i >= c[0]));
        let ordered = self.classes.windows(2).all(|w| w[0][0] < w[1][0]);
        seeds_lead && ordered
    }
}

/// A class partition carrying a relative orientation for every member.
///
/// `signs[k][j]` relates member `classes[k][j]` to the class representative:
/// the member cell equals `sign` times the representative. Seeds carry `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedClassMap {
    pub partition: ClassPartition,
    pub signs: Vec<Vec<Sign>>,
}

impl SignedClassMap {
    /// Attach `+1` to every member; used for vertices, which carry no orientation.
    pub fn unsigned(partition: ClassPartition) -> Self {
        let signs = partition
            .classes
            .iter()
            .map(|c| vec![Sign::Plus; c.len()])
            .collect();
        Self { partition, signs }
    }

    pub fn check(&self) -> Result<()> {
        self.partition.check()?;
        check_signs(&self.partition, &self.signs)
    }
}

pub(crate) fn check_signs(partition: &ClassPartition, signs: &[Vec<Sign>]) -> Result<()> {
    if signs.len() != partition.classes.len() {
        return Err(Error::InvalidPartition(format!(
            "{} sign lists for {} classes",
            signs.len(),
            partition.classes.len()
        )));
    }
    for (k, (class, s)) in partition.classes.iter().zip(signs).enumerate() {
        if class.len() != s.len() {
            return Err(Error::InvalidPartition(format!(
                "class {} has {} members but {} signs",
                k + 1,
                class.len(),
                s.len()
            )));
        }
        if s.first() != Some(&Sign::Plus) {
            return Err(Error::InvalidPartition(format!(
                "seed of class {} must have sign +1",
                k + 1
            )));
        }
    }
    Ok(())
}
