//! Composition and the two involutions, computed directly on coefficient matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::linmap::CoeffMatrix;

/// Coefficient matrix of `α ∘ β` by the cocycle-twisted convolution
/// `D(x,y) = Σ_{p,q} ω(p, p⁻¹x) conj(ω(q, q⁻¹y)) D_α(p,q) D_β(p⁻¹x, q⁻¹y)`.
pub fn compose(da: &CoeffMatrix, db: &CoeffMatrix) -> Result<CoeffMatrix> {
    if !da.same_basis(db) {
        return Err(Error::BasisMismatch);
    }
    let basis = da.basis();
    let group = basis.group();
    let omega = basis.cocycle();
    let order = basis.len();
    let zero = Complex64::new(0.0, 0.0);

    // For fixed (p, x): the partner index p⁻¹x and the phase ω(p, p⁻¹x).
    let partner = |p: usize, x: usize| group.mul(group.inv(p), x);

    let mut out = CMatrix::zeros(order, order);
    for p in 0..order {
        for q in 0..order {
            let a = da.get(p, q);
            if a == zero {
                continue;
            }
            for x in 0..order {
                let px = partner(p, x);
                let left = omega.get(p, px) * a;
                for y in 0..order {
                    let qy = partner(q, y);
                    let b = db.get(px, qy);
                    if b != zero {
                        out[(x, y)] += left * omega.get(q, qy).conj() * b;
                    }
                }
            }
        }
    }
    da.with_entries(out)
}

/// Coefficient matrix of the Hilbert–Schmidt adjoint `α†`, defined by
/// `⟨X, α(Y)⟩ = ⟨α†(X), Y⟩`:
/// `D†(x,y) = ω(y,y⁻¹)/ω(x,x⁻¹) · conj D(x⁻¹, y⁻¹)`.
pub fn dagger(d: &CoeffMatrix) -> CoeffMatrix {
    let basis = d.basis();
    let group = basis.group();
    let omega = basis.cocycle();
    let order = basis.len();
    let phase: Vec<Complex64> = (0..order).map(|g| omega.get(g, group.inv(g))).collect();
    let entries = CMatrix::from_fn(order, order, |x, y| {
        phase[y] / phase[x] * d.get(group.inv(x), group.inv(y)).conj()
    });
    d.with_entries(entries).expect("shape preserved")
}

/// Coefficient matrix of `α#(X) = α(X*)*`: the conjugate transpose of `D`.
pub fn sharp(d: &CoeffMatrix) -> CoeffMatrix {
    d.with_entries(d.entries().adjoint())
        .expect("shape preserved")
}
