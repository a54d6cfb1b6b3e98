//! Closed-form coefficient matrices for standard maps.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::linmap::{d_from_kraus, CoeffMatrix, KrausSet};
use crate::neb::{standard_bicharacter, weyl_index, NiceErrorBasis};

/// `X ↦ X`: a single unit entry at (identity, identity).
pub fn identity_d(basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let e = basis.group().identity();
    CoeffMatrix::from_fn(basis.clone(), |x, y| {
        if x == e && y == e {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `X ↦ Tr(X) I / n`, i.e. `D = I / n²`.
pub fn depolarizing_d(basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let m = basis.len();
    CoeffMatrix::new(
        basis.clone(),
        CMatrix::identity(m).scale_real(1.0 / m as f64),
    )
    .expect("square of basis size")
}

/// `X ↦ Xᵗ` over a Weyl basis: `D((a,b),(−a,b)) = ϰ(a,b)/n`, zero elsewhere.
pub fn transpose_d(basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    let n = basis.weyl_modulus().ok_or(Error::NotWeylBasis)?;
    let chi = standard_bicharacter(n)?;
    let mut d = CoeffMatrix::zeros(basis.clone()).into_entries();
    for a in 0..n {
        for b in 0..n {
            d[(weyl_index(n, a, b), weyl_index(n, n - a, b))] = chi.eval(a, b) / n as f64;
        }
    }
    CoeffMatrix::new(basis.clone(), d)
}

/// Projection onto the diagonal over a Weyl basis: `D((0,b),(0,b)) = 1/n`.
pub fn diag_expectation_d(basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    let n = basis.weyl_modulus().ok_or(Error::NotWeylBasis)?;
    let mut d = CoeffMatrix::zeros(basis.clone()).into_entries();
    for b in 0..n {
        let g = weyl_index(n, 0, b);
        d[(g, g)] = Complex64::new(1.0 / n as f64, 0.0);
    }
    CoeffMatrix::new(basis.clone(), d)
}

/// `X ↦ L X L*`, the rank-one coefficient matrix `|l⟩⟨l|`.
pub fn ad_d(l: &CMatrix, basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    let k = KrausSet::new(basis.dim(), vec![l.clone()])?;
    d_from_kraus(&k, basis)
}

/// Reduction map `X ↦ Tr(X) I − X`.
pub fn reduction_d(basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let n = basis.dim() as f64;
    depolarizing_d(basis)
        .scale(Complex64::new(n, 0.0))
        .add(&identity_d(basis).scale(Complex64::new(-1.0, 0.0)))
        .expect("same basis")
}
