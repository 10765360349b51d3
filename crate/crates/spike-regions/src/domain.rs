//! Axis-aligned hyperrectangular domains.

use crate::scalar::{Mode, Scalar};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid box: {0}")]
    Invalid(String),
}

/// A hyperrectangle given by per-coordinate lower and upper bounds.
#[derive(Debug, Clone)]
pub struct BoxDomain {
    lo: Vec<Scalar>,
    hi: Vec<Scalar>,
}

impl BoxDomain {
    pub fn new(lo: Vec<Scalar>, hi: Vec<Scalar>) -> Result<Self, DomainError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(DomainError::Invalid(
                "bounds must be non-empty and of equal dimension".into(),
            ));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l.compare(h) != Ordering::Less {
                return Err(DomainError::Invalid(format!(
                    "lower bound {l} is not below upper bound {h}"
                )));
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// The centered hypercube `[-k, k]^dim`.
    pub fn centered(mode: Mode, k: i64, dim: usize) -> Self {
        BoxDomain {
            lo: vec![Scalar::from_int(mode, -k); dim],
            hi: vec![Scalar::from_int(mode, k); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Scalar] {
        &self.lo
    }

    pub fn hi(&self) -> &[Scalar] {
        &self.hi
    }

    pub fn side(&self, j: usize) -> Scalar {
        &self.hi[j] - &self.lo[j]
    }

    /// Longest side: the sup-norm diameter of the box.
    pub fn diameter(&self) -> Scalar {
        let mut d = self.side(0);
        for j in 1..self.dim() {
            d = d.max(self.side(j));
        }
        d
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| {
                    v.compare(l) != Ordering::Less && v.compare(h) != Ordering::Greater
                })
    }

    pub fn mode(&self) -> Mode {
        self.lo[0].mode()
    }

    pub fn convert(&self, mode: Mode) -> BoxDomain {
        BoxDomain {
            lo: self.lo.iter().map(|s| s.convert(mode)).collect(),
            hi: self.hi.iter().map(|s| s.convert(mode)).collect(),
        }
    }
}
