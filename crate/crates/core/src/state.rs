//! State vectors of the modeled plant.

use crate::error::{Error, Result};
use std::ops::{Deref, Index};

/// A point in the plant's state space, `x ∈ R^n` with the Euclidean norm.
///
/// Construction through [`StateVec::new`] rejects non-finite entries; the
/// integrator keeps that invariant by checking every accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec(Vec<f64>);

impl StateVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("state dimension must be >= 1".into()));
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("state entries must be finite".into()));
        }
        Ok(Self(entries))
    }

    /// Internal fast path; finiteness is the caller's responsibility.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `self + c * k`, the axpy used by the RK stages.
    pub fn add_scaled(&self, c: f64, k: &StateVec) -> StateVec {
        debug_assert_eq!(self.dim(), k.dim());
        StateVec(
            self.0
                .iter()
                .zip(&k.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &StateVec) -> StateVec {
        debug_assert_eq!(self.dim(), other.dim());
        StateVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &StateVec) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Deref for StateVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for StateVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<StateVec> for Vec<f64> {
    fn from(v: StateVec) -> Vec<f64> {
        v.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_empty() {
        assert!(StateVec::new(vec![]).is_err());
        assert!(StateVec::new(vec![1.0, f64::NAN]).is_err());
        assert!(StateVec::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(StateVec::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn euclidean_norm() {
        let v = StateVec::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.norm_sq(), 25.0);
    }

    #[test]
    fn axpy() {
        let x = StateVec::new(vec![1.0, 2.0]).unwrap();
        let k = StateVec::new(vec![10.0, -10.0]).unwrap();
        let y = x.add_scaled(0.5, &k);
        assert_eq!(y.as_slice(), &[6.0, -3.0]);
    }
}
