//! The Tits geometric representation, used as a floating-point oracle for
//! the word engine.
//!
//! `B(e_i, e_j) = -cos(pi / m_ij)` (`-1` for infinity) and `s_i` acts by
//! `v -> v - 2 B(e_i, v) e_i`. The representation is faithful, so two words
//! name the same element exactly when their matrices agree.

use nalgebra::DMatrix;

use crate::diagrams::{CoxeterMatrix, Order};
use crate::error::{Error, Result};
use crate::words::Word;

pub fn bilinear_form(matrix: &CoxeterMatrix) -> DMatrix<f64> {
    let n = matrix.rank();
    DMatrix::from_fn(n, n, |i, j| match matrix.order(i, j) {
        Order::Finite(m) => -(std::f64::consts::PI / m as f64).cos(),
        Order::Infinite => -1.0,
    })
}

/// Matrices of the generators, acting on column vectors.
pub fn generator_matrices(matrix: &CoxeterMatrix) -> Vec<DMatrix<f64>> {
    let n = matrix.rank();
    let b = bilinear_form(matrix);
    (0..n)
        .map(|i| {
            let mut s = DMatrix::identity(n, n);
            for j in 0..n {
                s[(i, j)] -= 2.0 * b[(i, j)];
            }
            s
        })
        .collect()
}

pub fn word_matrix(matrix: &CoxeterMatrix, w: &Word) -> Result<DMatrix<f64>> {
    let gens = generator_matrices(matrix);
    let n = matrix.rank();
    let mut acc = DMatrix::identity(n, n);
    for &l in w.letters() {
        let g = gens.get(l as usize).ok_or(Error::GeneratorOutOfRange {
            generator: l as usize,
            rank: n,
        })?;
        acc *= g;
    }
    Ok(acc)
}

/// Whether `a` and `b` have equal images, up to `tol` relative to the
/// larger matrix entry (entries grow quickly when infinite orders appear).
pub fn equal_numeric(matrix: &CoxeterMatrix, a: &Word, b: &Word, tol: f64) -> Result<bool> {
    let x = word_matrix(matrix, a)?;
    let y = word_matrix(matrix, b)?;
    let scale = x.amax().max(y.amax()).max(1.0);
    Ok((x - y).amax() <= tol * scale)
}
