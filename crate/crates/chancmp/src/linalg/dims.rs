use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of labeled tensor factors.
///
/// The order is the Kronecker order of the annotated matrix. A factor of
/// dimension zero is stored as dimension one (a trivial wire).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct SystemDims {
    systems: Vec<(String, usize)>,
}

impl SystemDims {
    pub fn new<S: Into<String>>(systems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let systems: Vec<(String, usize)> =
            systems.into_iter().map(|(l, d)| (l.into(), d.max(1))).collect();
        for (i, (label, _)) in systems.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::Layout("empty system label".into()));
            }
            if systems[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::Layout(format!("duplicate label `{label}`")));
            }
        }
        Ok(SystemDims { systems })
    }

    /// No factors; total dimension 1.
    pub fn trivial() -> Self {
        SystemDims::default()
    }

    pub fn single(label: &str, dim: usize) -> Self {
        SystemDims { systems: vec![(label.to_string(), dim.max(1))] }
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn total(&self) -> usize {
        self.systems.iter().map(|(_, d)| d).product()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.systems.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|&(_, d)| d).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.systems.iter().map(|(l, d)| (l.as_str(), *d))
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.iter().any(|(l, _)| l == label)
    }

    pub fn dim(&self, label: &str) -> Result<usize> {
        Ok(self.systems[self.position(label)?].1)
    }

    /// Product of the dimensions of the listed factors.
    pub fn dim_of(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().map(|l| self.dim(l)).product()
    }

    pub fn concat(&self, other: &SystemDims) -> Result<Self> {
        SystemDims::new(self.systems.iter().chain(&other.systems).cloned())
    }

    /// The listed factors, in the listed order.
    pub fn select(&self, labels: &[&str]) -> Result<Self> {
        SystemDims::new(
            labels
                .iter()
                .map(|l| self.dim(l).map(|d| (l.to_string(), d)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// All factors except the listed ones, in the original order.
    pub fn without(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.position(l)?;
        }
        Ok(SystemDims {
            systems: self
                .systems
                .iter()
                .filter(|(l, _)| !labels.contains(&l.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Renames one factor.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let p = self.position(from)?;
        let mut systems = self.systems.clone();
        systems[p].0 = to.to_string();
        SystemDims::new(systems)
    }

    /// A label derived from `base` that is not used here.
    pub fn fresh_label(&self, base: &str) -> String {
        let mut label = base.to_string();
        while self.contains(&label) {
            label.push('\'');
        }
        label
    }

    pub(crate) fn check_matrix(&self, rows: usize, cols: usize) -> Result<()> {
        let n = self.total();
        if rows != n || cols != n {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix annotated with {self} (total {n})"
            )));
        }
        Ok(())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.systems.len()];
        for k in (0..self.systems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.systems[k + 1].1;
        }
        strides
    }

    /// For each index of the permuted space, the matching index in this space.
    pub(crate) fn permutation_map(&self, order: &[&str]) -> Result<Vec<usize>> {
        if order.len() != self.len() {
            return Err(Error::Layout(format!(
                "permutation lists {} labels, space has {}",
                order.len(),
                self.len()
            )));
        }
        let strides = self.strides();
        let mut pos = Vec::with_capacity(order.len());
        for l in order {
            let p = self.position(l)?;
            if pos.contains(&p) {
                return Err(Error::Layout(format!("label `{l}` repeated in permutation")));
            }
            pos.push(p);
        }
        let new_dims: Vec<usize> = pos.iter().map(|&p| self.systems[p].1).collect();
        let new_strides: Vec<usize> = pos.iter().map(|&p| strides[p]).collect();
        Ok(index_map(&new_dims, &new_strides))
    }

    /// Splits every index into (kept part, selected part), each given as an
    /// index in the compact space of kept factors and of selected factors.
    pub(crate) fn split_map(&self, selected: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut flags = vec![false; self.len()];
        for l in selected {
            let p = self.position(l)?;
            if flags[p] {
                return Err(Error::Layout(format!("label `{l}` listed twice")));
            }
            flags[p] = true;
        }
        let n = self.total();
        let mut kept = vec![0; n];
        let mut sel = vec![0; n];
        let dims = self.dims();
        let mut digits = vec![0usize; self.len()];
        for idx in 0..n {
            let (mut k, mut s) = (0, 0);
            for (f, (&dgt, (_, d))) in digits.iter().zip(&self.systems).enumerate() {
                if flags[f] {
                    s = s * d + dgt;
                } else {
                    k = k * d + dgt;
                }
            }
            kept[idx] = k;
            sel[idx] = s;
            increment(&mut digits, &dims);
        }
        Ok((kept, sel))
    }
}

fn increment(digits: &mut [usize], dims: &[usize]) {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < dims[k] {
            return;
        }
        digits[k] = 0;
    }
}

/// Enumerates a mixed-radix space with the given digit strides.
fn index_map(dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let n: usize = dims.iter().product();
    let mut out = Vec::with_capacity(n);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..n {
        out.push(digits.iter().zip(strides).map(|(d, s)| d * s).sum());
        increment(&mut digits, dims);
    }
    out
}

impl fmt::Debug for SystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (l, d)) in self.systems.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}:{d}")?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<(String, usize)>> for SystemDims {
    type Error = Error;
    fn try_from(v: Vec<(String, usize)>) -> Result<Self> {
        SystemDims::new(v)
    }
}

impl From<SystemDims> for Vec<(String, usize)> {
    fn from(d: SystemDims) -> Self {
        d.systems
    }
}
