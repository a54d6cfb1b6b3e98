use std::fmt;

use num_complex::Complex64;

use super::NiceErrorBasis;
use crate::linalg::{hs_inner, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `π_1 = I`
    Identity,
    /// `Tr π_g = n δ_{g,1}`
    Trace,
    /// `π_g* π_g = I`
    Unitarity,
    /// `π_g π_h = ω(g,h) π_{gh}` with the stored cocycle
    ProjectiveRelation,
    /// `|ω| = 1` and `ω(g,h) ω(gh,k) = ω(h,k) ω(g,hk)`
    CocycleIdentity,
    /// `⟨π_g, π_h⟩ / n = δ_{g,h}`
    Orthogonality,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Identity,
        Axiom::Trace,
        Axiom::Unitarity,
        Axiom::ProjectiveRelation,
        Axiom::CocycleIdentity,
        Axiom::Orthogonality,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Identity => "identity",
            Axiom::Trace => "trace",
            Axiom::Unitarity => "unitarity",
            Axiom::ProjectiveRelation => "projective relation",
            Axiom::CocycleIdentity => "cocycle identity",
            Axiom::Orthogonality => "hs orthogonality",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NebReport {
    pub checks: Vec<AxiomCheck>,
    pub passed: bool,
}

impl NebReport {
    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_deviation)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for NebReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<20} {:<4} max deviation {:.3e}",
                c.axiom.name(),
                if c.passed { "pass" } else { "FAIL" },
                c.max_deviation
            )?;
        }
        write!(f, "overall: {}", if self.passed { "pass" } else { "FAIL" })
    }
}

/// Checks every basis axiom numerically and reports the worst absolute
/// deviation for each. Failures are reported, never raised.
pub fn verify_neb(basis: &NiceErrorBasis, tol: f64) -> NebReport {
    let n = basis.dim();
    let nf = n as f64;
    let group = basis.group();
    let cocycle = basis.cocycle();
    let order = basis.len();
    let eye = CMatrix::identity(n);

    let identity = basis.element(group.identity()).max_abs_diff(&eye);

    let trace = (0..order)
        .map(|g| {
            let expected = if g == group.identity() { nf } else { 0.0 };
            (basis.element(g).trace() - Complex64::new(expected, 0.0)).norm()
        })
        .fold(0.0, f64::max);

    let unitarity = basis
        .unitaries()
        .iter()
        .map(|u| (&u.adjoint() * u).max_abs_diff(&eye))
        .fold(0.0, f64::max);

    let mut projective: f64 = 0.0;
    for g in 0..order {
        for h in 0..order {
            let lhs = basis.element(g) * basis.element(h);
            let rhs = basis.element(group.mul(g, h)).scale(cocycle.get(g, h));
            projective = projective.max(lhs.max_abs_diff(&rhs));
        }
    }

    let cocycle_dev = cocycle
        .cocycle_identity_deviation(group)
        .max(cocycle.unit_modulus_deviation());

    let mut orthogonality: f64 = 0.0;
    for g in 0..order {
        for h in g..order {
            let ip = hs_inner(basis.element(g), basis.element(h))
                .expect("basis elements share a shape")
                / nf;
            let expected = if g == h { 1.0 } else { 0.0 };
            orthogonality = orthogonality.max((ip - Complex64::new(expected, 0.0)).norm());
        }
    }

    let checks: Vec<AxiomCheck> = [
        (Axiom::Identity, identity),
        (Axiom::Trace, trace),
        (Axiom::Unitarity, unitarity),
        (Axiom::ProjectiveRelation, projective),
        (Axiom::CocycleIdentity, cocycle_dev),
        (Axiom::Orthogonality, orthogonality),
    ]
    .into_iter()
    .map(|(axiom, dev)| AxiomCheck {
        axiom,
        max_deviation: dev,
        passed: dev <= tol,
    })
    .collect();
    let passed = checks.iter().all(|c| c.passed);
    NebReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neb::{quaternion_basis, weyl_basis, BasisKind, Cocycle};

    #[test]
    fn weyl_three_passes_tightly() {
        let r = verify_neb(&weyl_basis(3).unwrap(), 1e-12);
        assert!(r.passed, "{r}");
        assert!(r.max_deviation() < 1e-12);
    }

    #[test]
    fn quaternion_passes() {
        assert!(verify_neb(&quaternion_basis(), 1e-12).passed);
    }

    #[test]
    fn perturbed_entry_breaks_unitarity_and_orthogonality() {
        let b = weyl_basis(2).unwrap();
        let mut unitaries = b.unitaries().to_vec();
        unitaries[2][(0, 1)] += Complex64::new(1e-3, 0.0);
        let perturbed =
            NiceErrorBasis::from_parts(b.kind(), b.group().clone(), unitaries, b.cocycle().clone())
                .unwrap();
        let r = verify_neb(&perturbed, 1e-9);
        assert!(!r.passed);
        assert!(!r.check(Axiom::Unitarity).passed);
        assert!(!r.check(Axiom::Orthogonality).passed);
        assert!(r.check(Axiom::Identity).passed);
    }

    #[test]
    fn wrong_cocycle_is_reported() {
        let b = weyl_basis(2).unwrap();
        let flat = Cocycle::from_fn(4, |_, _| Complex64::new(1.0, 0.0));
        let bad = NiceErrorBasis::from_parts(
            BasisKind::Table,
            b.group().clone(),
            b.unitaries().to_vec(),
            flat,
        )
        .unwrap();
        let r = verify_neb(&bad, 1e-9);
        assert!(!r.check(Axiom::ProjectiveRelation).passed);
        assert!(r.check(Axiom::CocycleIdentity).passed);
        assert!(r.to_string().contains("FAIL"));
    }
}
