//! State vectors tagged with the norm of the space they live in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Index;

use crate::error::{Error, Result};

/// Which X-norm a vector is measured in.
///
/// L² models (matrices, skew-adjoint spectral grids) use `Euclidean`;
/// sup-norm models use `Max`. Mixing the two in one operation panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    #[default]
    Euclidean,
    Max,
}

impl NormKind {
    pub fn norm(self, entries: &[Complex64]) -> f64 {
        match self {
            NormKind::Euclidean => entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::Max => entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Complex64>,
    kind: NormKind,
}

impl StateVector {
    pub fn new(entries: Vec<Complex64>, kind: NormKind) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("state vector must be non-empty".into()));
        }
        if let Some(i) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { entries, kind })
    }

    /// Internal constructor for results of finite arithmetic on finite inputs.
    pub(crate) fn from_raw(entries: Vec<Complex64>, kind: NormKind) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries, kind }
    }

    pub fn zeros(len: usize, kind: NormKind) -> Self {
        assert!(len > 0, "state vector must be non-empty");
        Self::from_raw(vec![Complex64::new(0.0, 0.0); len], kind)
    }

    /// Unit vector e_i.
    pub fn basis(len: usize, i: usize, kind: NormKind) -> Self {
        let mut v = Self::zeros(len, kind);
        v.entries[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64], kind: NormKind) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), kind)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.kind.norm(&self.entries)
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            self.kind, other.kind,
            "state vectors carry different norm kinds"
        );
        assert_eq!(self.len(), other.len(), "state vector length mismatch");
    }

    /// ‖self − other‖ in the shared norm.
    pub fn distance(&self, other: &Self) -> f64 {
        self.check_compatible(other);
        let diff: Vec<Complex64> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        self.kind.norm(&diff)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_raw(entries, self.kind)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_raw(entries, self.kind)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.entries.iter().map(|z| z * c).collect(), self.kind)
    }

    /// self += c * other
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        self.check_compatible(other);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let entries = self.entries.iter().enumerate().map(|(i, &z)| f(i, z)).collect();
        Self::from_raw(entries, self.kind)
    }

    pub fn with_kind(mut self, kind: NormKind) -> Self {
        self.kind = kind;
        self
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norms_by_kind() {
        let e = vec![c(3.0, 0.0), c(0.0, 4.0)];
        assert_eq!(StateVector::new(e.clone(), NormKind::Euclidean).unwrap().norm(), 5.0);
        assert_eq!(StateVector::new(e, NormKind::Max).unwrap().norm(), 4.0);
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let err = StateVector::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)], NormKind::Max);
        assert_eq!(err, Err(Error::NonFinite(1)));
        assert!(StateVector::new(vec![], NormKind::Euclidean).is_err());
        assert!(StateVector::new(vec![c(f64::INFINITY, 0.0)], NormKind::Euclidean).is_err());
    }

    #[test]
    #[should_panic(expected = "different norm kinds")]
    fn mixing_kinds_panics() {
        let a = StateVector::basis(2, 0, NormKind::Euclidean);
        let b = StateVector::basis(2, 0, NormKind::Max);
        let _ = a.distance(&b);
    }

    #[test]
    fn axpy_and_distance() {
        let mut a = StateVector::basis(3, 0, NormKind::Euclidean);
        let b = StateVector::basis(3, 1, NormKind::Euclidean);
        a.axpy(c(2.0, 0.0), &b);
        assert!((a.norm() - 5f64.sqrt()).abs() < 1e-15);
        assert!((a.distance(&b) - 2f64.sqrt()).abs() < 1e-15);
    }
}
