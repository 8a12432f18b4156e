use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for every probability comparison.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A finite, named alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
    /// Optional per-symbol labels, e.g. `"erased"` for the erasure symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Alphabet { name: name.into(), size, labels: None }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Alphabet::new(name, 2)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Alphabet { name: name.into(), ..self.clone() }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::structural(format!("alphabet {} has size 0", self.name)));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.size {
                return Err(Error::structural(format!(
                    "alphabet {} has {} labels for {} symbols",
                    self.name,
                    labels.len(),
                    self.size
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn sizes_of(axes: &[Alphabet]) -> Vec<usize> {
    axes.iter().map(|a| a.size).collect()
}

pub(crate) fn volume(sizes: &[usize]) -> usize {
    sizes.iter().product()
}

/// Row-major flat index (last axis fastest).
pub(crate) fn ravel(index: &[usize], sizes: &[usize]) -> usize {
    debug_assert_eq!(index.len(), sizes.len());
    index.iter().zip(sizes).fold(0, |acc, (&i, &s)| {
        debug_assert!(i < s);
        acc * s + i
    })
}

#[cfg(test)]
pub(crate) fn unravel(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = flat % s;
        flat /= s;
    }
    out
}

/// Odometer over all tuples of a product alphabet, last coordinate fastest.
/// An empty size list yields exactly one empty tuple.
#[derive(Debug, Clone)]
pub struct Tuples {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

pub fn tuples(sizes: &[usize]) -> Tuples {
    let next = if sizes.contains(&0) { None } else { Some(vec![0; sizes.len()]) };
    Tuples { sizes: sizes.to_vec(), next }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for (slot, &s) in succ.iter_mut().zip(&self.sizes).rev() {
            *slot += 1;
            if *slot < s {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(current)
    }
}

pub(crate) fn check_unique_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::structural(format!("duplicate axis name {n}")));
        }
    }
    Ok(())
}

pub(crate) fn check_entries(values: &[f64], tol: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            if !v.is_finite() {
                Err(Error::domain(format!("non-finite entry {v} at flat index {idx}")))
            } else if v < -tol {
                Err(Error::domain(format!("negative entry {v} at flat index {idx}")))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// Format a tuple as `(a,b,c)`; used in reports and constraint labels.
pub fn format_tuple(t: &[usize]) -> String {
    let inner: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(","))
}
