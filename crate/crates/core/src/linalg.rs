//! Complex vector helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CRowVector = RowDVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `a† b`.
pub fn inner(a: &CVector, b: &CVector) -> Result<Complex64> {
    check_len(a.len(), b.len())?;
    Ok(a.dotc(b))
}

pub fn norm_sq(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
