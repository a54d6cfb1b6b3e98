use std::f64::consts::PI;

use num_complex::Complex64;

use super::{verify_neb, BasisKind, Cocycle, IndexGroup, NiceErrorBasis};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DEFAULT_TOL};

/// The pairing `ϰ(k, ℓ) = exp(2πi kℓ / n)` on `Z_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bicharacter {
    n: usize,
}

impl Bicharacter {
    pub fn modulus(&self) -> usize {
        self.n
    }

    /// `ϰ(k, ℓ)`, with both arguments reduced mod `n`.
    pub fn eval(&self, k: usize, l: usize) -> Complex64 {
        let m = ((k % self.n) * (l % self.n)) % self.n;
        Complex64::from_polar(1.0, 2.0 * PI * m as f64 / self.n as f64)
    }
}

pub fn standard_bicharacter(n: usize) -> Result<Bicharacter> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "bicharacter modulus must be at least 1".into(),
        ));
    }
    Ok(Bicharacter { n })
}

/// Weyl operators `W_{a,b} = Σ_x ϰ(b,x) |x+a⟩⟨x|` over `Z_n × Z_n`, with
/// `W_{a,b} W_{x,y} = ϰ(b,x) W_{a+x,b+y}`.
pub fn weyl_basis(n: usize) -> Result<NiceErrorBasis> {
    let chi = standard_bicharacter(n)?;
    let order = n * n;
    let unitaries = (0..order)
        .map(|g| {
            let (a, b) = (g / n, g % n);
            let mut w = CMatrix::zeros(n, n);
            for x in 0..n {
                w[((x + a) % n, x)] = chi.eval(b, x);
            }
            w
        })
        .collect();
    let cocycle = Cocycle::from_fn(order, |g, h| chi.eval(g % n, h / n));
    NiceErrorBasis::from_parts(
        BasisKind::Weyl { n },
        IndexGroup::weyl(n),
        unitaries,
        cocycle,
    )
}

/// Labels of the quaternion basis, in index order.
pub const QUATERNION_LABELS: [&str; 4] = ["(+1,+1)", "(+1,-1)", "(-1,+1)", "(-1,-1)"];

/// The 2-dimensional basis from the unit quaternions modulo their centre
/// `{±1}`: `π = (1, i, j, k)` as 2×2 matrices, indexed by `Z_2 × Z_2` written
/// multiplicatively.
pub fn quaternion_basis() -> NiceErrorBasis {
    let c = Complex64::new;
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let unitaries = vec![
        CMatrix::identity(2),
        CMatrix::from_rows(&[vec![z, i], vec![i, z]]).unwrap(),
        CMatrix::from_rows(&[vec![z, -one], vec![one, z]]).unwrap(),
        CMatrix::from_rows(&[vec![i, z], vec![z, -i]]).unwrap(),
    ];
    #[rustfmt::skip]
    let table = [
        1.0,  1.0,  1.0,  1.0,
        1.0, -1.0,  1.0, -1.0,
        1.0, -1.0, -1.0,  1.0,
        1.0,  1.0, -1.0, -1.0,
    ];
    let cocycle = Cocycle::from_fn(4, |g, h| c(table[g * 4 + h], 0.0));
    let weyl = IndexGroup::weyl(2);
    let labels = QUATERNION_LABELS.iter().map(|s| s.to_string()).collect();
    let group =
        IndexGroup::from_table(labels, weyl.table().to_vec()).expect("Z2 x Z2 table is a group");
    NiceErrorBasis::from_parts(BasisKind::Quaternion, group, unitaries, cocycle)
        .expect("quaternion basis has consistent shapes")
}

/// Largest supported parameter for [`central_type_basis`] (dimension 16).
pub const MAX_CENTRAL_TYPE_PARAM: usize = 6;

/// `π(τ) = diag(φ(0), …, φ(d-1))` with `φ(x) = exp(2πi·5^x / 2^param)`.
pub fn central_type_tau(param: usize) -> CMatrix {
    let d = 1usize << (param - 2);
    let modulus = 1u64 << param;
    let mut power = 1u64;
    let mut diag = Vec::with_capacity(d);
    for _ in 0..d {
        diag.push(Complex64::from_polar(
            1.0,
            2.0 * PI * power as f64 / modulus as f64,
        ));
        power = (power * 5) % modulus;
    }
    CMatrix::diag(&diag)
}

/// Cyclic shift with ones on the superdiagonal and in the bottom-left corner.
pub fn central_type_alpha(param: usize) -> CMatrix {
    let d = 1usize << (param - 2);
    let mut p = CMatrix::zeros(d, d);
    for i in 0..d {
        p[(i, (i + 1) % d)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Basis `{π(τ)^k π(α)^ℓ : 0 ≤ k, ℓ < d}` of dimension `d = 2^(param-2)` coming
/// from the central-type group generated by `x ↦ x+1` and `x ↦ 5x` mod `2^param`.
/// The index group (label `(k,ℓ)` at `k·d + ℓ`) and cocycle are read off the
/// products, and the result is verified before it is returned.
pub fn central_type_basis(param: usize) -> Result<NiceErrorBasis> {
    if !(3..=MAX_CENTRAL_TYPE_PARAM).contains(&param) {
        return Err(Error::InvalidParameter(format!(
            "central-type parameter must be in 3..={MAX_CENTRAL_TYPE_PARAM}, got {param}"
        )));
    }
    let d = 1usize << (param - 2);
    let tau = central_type_tau(param);
    let alpha = central_type_alpha(param);

    let mut tau_powers = vec![CMatrix::identity(d)];
    let mut alpha_powers = vec![CMatrix::identity(d)];
    for k in 1..d {
        tau_powers.push(&tau_powers[k - 1] * &tau);
        alpha_powers.push(&alpha_powers[k - 1] * &alpha);
    }
    let mut unitaries = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    for (k, tk) in tau_powers.iter().enumerate() {
        for (l, al) in alpha_powers.iter().enumerate() {
            unitaries.push(tk * al);
            labels.push(format!("({k},{l})"));
        }
    }
    let basis = NiceErrorBasis::from_unitaries(
        BasisKind::CentralType { param },
        labels,
        unitaries,
        DEFAULT_TOL,
    )?;
    let report = verify_neb(&basis, 1e-10);
    if !report.passed {
        return Err(Error::NotNiceErrorBasis(format!(
            "central-type family failed verification: {report}"
        )));
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neb::weyl_index;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn bicharacter_values() {
        let chi = standard_bicharacter(2).unwrap();
        assert!(close(chi.eval(1, 1), Complex64::new(-1.0, 0.0)));
        let chi3 = standard_bicharacter(3).unwrap();
        assert!(close(
            chi3.eval(1, 2),
            Complex64::from_polar(1.0, 4.0 * PI / 3.0)
        ));
        for n in 1..6 {
            let chi = standard_bicharacter(n).unwrap();
            for y in 0..n {
                assert!(close(chi.eval(0, y), Complex64::new(1.0, 0.0)));
            }
        }
        assert!(standard_bicharacter(0).is_err());
    }

    #[test]
    fn bicharacter_axioms_exhaustive() {
        for n in 1..=7 {
            let chi = standard_bicharacter(n).unwrap();
            for k in 0..n {
                for l in 0..n {
                    assert!((chi.eval(k, l).norm() - 1.0).abs() < 1e-15);
                    assert!(close(chi.eval(k, l), chi.eval(l, k)));
                    for m in 0..n {
                        assert!(
                            (chi.eval(k, l + m) - chi.eval(k, l) * chi.eval(k, m)).norm() < 1e-13
                        );
                    }
                }
                let trivial = (0..n).all(|y| close(chi.eval(k, y), Complex64::new(1.0, 0.0)));
                assert_eq!(trivial, k == 0, "non-degeneracy at k={k}, n={n}");
            }
        }
    }

    #[test]
    fn weyl_qubit_matrices() {
        let b = weyl_basis(2).unwrap();
        assert_eq!(
            *b.element(weyl_index(2, 1, 0)),
            CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        assert!(
            b.element(weyl_index(2, 0, 1))
                .max_abs_diff(&CMatrix::real_diag(&[1.0, -1.0]))
                < 1e-15
        );
        let w11 = b.element(weyl_index(2, 1, 1));
        assert!(w11.max_abs_diff(&CMatrix::from_real(&[&[0.0, -1.0], &[1.0, 0.0]])) < 1e-15);
        for n in 1..6 {
            assert_eq!(*weyl_basis(n).unwrap().element(0), CMatrix::identity(n));
        }
        assert!(weyl_basis(0).is_err());
    }

    #[test]
    fn weyl_commutation_relations() {
        for n in 2..=5 {
            let b = weyl_basis(n).unwrap();
            let chi = standard_bicharacter(n).unwrap();
            let u = |a: usize| b.element(weyl_index(n, a, 0)).clone();
            let v = |a: usize| b.element(weyl_index(n, 0, a)).clone();
            for a in 0..n {
                for c in 0..n {
                    assert!((&u(a) * &u(c)).max_abs_diff(&u(a + c)) < 1e-13);
                    assert!((&v(a) * &v(c)).max_abs_diff(&v(a + c)) < 1e-13);
                    let lhs = &v(c) * &u(a);
                    let rhs = (&u(a) * &v(c)).scale(chi.eval(a, c));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn weyl_adjoint_relation() {
        for n in 2..=5 {
            let b = weyl_basis(n).unwrap();
            let chi = standard_bicharacter(n).unwrap();
            for a in 0..n {
                for c in 0..n {
                    let w = b.element(weyl_index(n, a, c));
                    let rhs = b.element(weyl_index(n, n - a, n - c)).scale(chi.eval(a, c));
                    assert!(w.adjoint().max_abs_diff(&rhs) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn quaternion_cocycle_matches_products() {
        let b = quaternion_basis();
        let derived = NiceErrorBasis::from_unitaries(
            BasisKind::Table,
            QUATERNION_LABELS.iter().map(|s| s.to_string()).collect(),
            b.unitaries().to_vec(),
            1e-12,
        )
        .unwrap();
        assert_eq!(derived.group().table(), b.group().table());
        for (x, y) in derived.cocycle().values().iter().zip(b.cocycle().values()) {
            assert!(close(*x, *y));
        }
        let i = 1;
        let j = 2;
        let k = 3;
        assert!(close(b.cocycle().get(i, i), Complex64::new(-1.0, 0.0)));
        for g in 0..4 {
            assert!(close(b.cocycle().get(0, g), Complex64::new(1.0, 0.0)));
        }
        let prod = b.element(i) * b.element(j);
        assert!(prod.max_abs_diff(b.element(k)) < 1e-15);
        assert_eq!(b.cocycle().get(i, j), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn central_type_generators() {
        let tau = central_type_tau(3);
        let expected = CMatrix::diag(&[
            Complex64::from_polar(1.0, 2.0 * PI / 8.0),
            Complex64::from_polar(1.0, 10.0 * PI / 8.0),
        ]);
        assert!(tau.max_abs_diff(&expected) < 1e-15);

        let alpha = central_type_alpha(4);
        let shift = CMatrix::from_real(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(alpha, shift);
    }

    #[test]
    fn central_type_traces_vanish_off_identity() {
        let b = central_type_basis(4).unwrap();
        assert_eq!(b.dim(), 4);
        for (g, u) in b.unitaries().iter().enumerate() {
            let expected = if g == 0 { 4.0 } else { 0.0 };
            assert!(
                (u.trace() - Complex64::new(expected, 0.0)).norm() < 1e-12,
                "g={g}"
            );
        }
    }

    #[test]
    fn central_type_index_group_is_non_abelian_from_five() {
        assert!(central_type_basis(3).unwrap().group().is_abelian());
        assert!(central_type_basis(4).unwrap().group().is_abelian());
        assert!(!central_type_basis(5).unwrap().group().is_abelian());
    }

    #[test]
    fn central_type_rejects_small_parameters() {
        assert!(central_type_basis(2).is_err());
        assert!(central_type_basis(0).is_err());
    }
}
