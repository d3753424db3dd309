//! Dense operator matrices tied to truncated coordinate layouts.

use crate::hardy::{AmbientSpec, BrownianElement, HardyElement};
use crate::linalg::{CMat, CVec};
use crate::error::{Error, Result};

/// Coordinate layout of the rows or columns of an [`OperatorMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Truncated `H²_E`: index `n * d + j` is fiber coordinate `j` of degree `n`.
    Analytic(AmbientSpec),
    /// Truncated `H²_E ⊕ E`: the analytic block followed by the `E` summand.
    Ambient(AmbientSpec),
    /// Coordinates with respect to a chosen orthonormal basis of a subspace.
    Subspace(usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Analytic(a) => a.analytic_dim(),
            Basis::Ambient(a) => a.total_dim(),
            Basis::Subspace(k) => *k,
        }
    }

    /// `(degree, fiber index)` for analytic coordinates, `None` for the `E`
    /// summand or subspace coordinates.
    pub fn coordinate(&self, index: usize) -> Option<(usize, usize)> {
        match self {
            Basis::Analytic(a) | Basis::Ambient(a) if index < a.analytic_dim() => {
                Some((index / a.fiber_dim(), index % a.fiber_dim()))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMat,
    pub row_basis: Basis,
    pub col_basis: Basis,
    /// Largest input degree on which the matrix reproduces the untruncated action.
    pub exact_degree: usize,
}

impl OperatorMatrix {
    pub fn new(entries: CMat, row_basis: Basis, col_basis: Basis, exact_degree: usize) -> Result<Self> {
        if entries.nrows() != row_basis.dim() {
            return Err(Error::DimensionMismatch {
                context: "OperatorMatrix rows",
                expected: row_basis.dim(),
                actual: entries.nrows(),
            });
        }
        if entries.ncols() != col_basis.dim() {
            return Err(Error::DimensionMismatch {
                context: "OperatorMatrix columns",
                expected: col_basis.dim(),
                actual: entries.ncols(),
            });
        }
        Ok(Self {
            entries,
            row_basis,
            col_basis,
            exact_degree,
        })
    }

    pub fn apply_vector(&self, v: &CVec) -> Result<CVec> {
        if v.len() != self.entries.ncols() {
            return Err(Error::DimensionMismatch {
                context: "OperatorMatrix::apply_vector",
                expected: self.entries.ncols(),
                actual: v.len(),
            });
        }
        Ok(&self.entries * v)
    }

    pub fn apply_hardy(&self, f: &HardyElement) -> Result<HardyElement> {
        let out = self.apply_vector(f.flat())?;
        match self.row_basis {
            Basis::Analytic(a) => HardyElement::from_flat(a, out),
            _ => Err(Error::Precondition("row basis is not analytic".into())),
        }
    }

    pub fn apply_brownian(&self, v: &BrownianElement) -> Result<BrownianElement> {
        let out = self.apply_vector(&v.to_vector())?;
        match self.row_basis {
            Basis::Ambient(a) => BrownianElement::from_vector(a, &out),
            _ => Err(Error::Precondition("row basis is not the ambient space".into())),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            row_basis: self.col_basis,
            col_basis: self.row_basis,
            exact_degree: self.exact_degree,
        }
    }
}
