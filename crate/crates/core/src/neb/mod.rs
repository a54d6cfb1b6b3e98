//! Nice error bases: `n²` unitaries `π_g` indexed by a group `G` with
//! `π_1 = I`, `Tr π_g = n δ_{g,1}` and `π_g π_h = ω(g,h) π_{gh}`.
//!
//! Group elements are plain indices `0..n²`. Every basis carries its full
//! multiplication table and the full cocycle table, so downstream code is
//! table-driven and never needs to know which family a basis came from,
//! except for the Weyl-only closed forms.

mod families;
mod verify;

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hs_inner, CMatrix};

pub use families::{
    central_type_basis, quaternion_basis, standard_bicharacter, weyl_basis, Bicharacter,
};
pub use verify::{verify_neb, Axiom, AxiomCheck, NebReport};

/// Finite group given by its multiplication table on indices `0..order`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexGroup {
    labels: Vec<String>,
    identity: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

impl IndexGroup {
    /// `Z_n × Z_n` with `(a, b) ↦ a·n + b`.
    pub fn weyl(n: usize) -> Self {
        let order = n * n;
        let labels = (0..order)
            .map(|i| format!("({},{})", i / n, i % n))
            .collect();
        let table = (0..order * order)
            .map(|k| {
                let (g, h) = (k / order, k % order);
                ((g / n + h / n) % n) * n + (g % n + h % n) % n
            })
            .collect();
        let inverses = (0..order)
            .map(|g| ((n - g / n) % n) * n + (n - g % n) % n)
            .collect();
        Self {
            labels,
            identity: 0,
            table,
            inverses,
        }
    }

    /// Builds a group from a row-major multiplication table `table[g * order + h] = g·h`
    /// and checks the group axioms exhaustively.
    pub fn from_table(labels: Vec<String>, table: Vec<usize>) -> Result<Self> {
        let order = labels.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty group".into()));
        }
        if table.len() != order * order {
            return Err(Error::InvalidGroup(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidGroup(format!("element {bad} out of range")));
        }
        let mul = |g: usize, h: usize| table[g * order + h];

        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul(e, g) == g && mul(g, e) == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
            inverses.push(inv);
        }
        for g in 0..order {
            for h in 0..order {
                for k in 0..order {
                    if mul(mul(g, h), k) != mul(g, mul(h, k)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({g}, {h}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            labels,
            identity,
            table,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order() + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        let order = self.order();
        (0..order).all(|g| (0..order).all(|h| self.mul(g, h) == self.mul(h, g)))
    }
}

/// Full table of the 2-cocycle `ω(g, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    order: usize,
    values: Vec<Complex64>,
}

impl Cocycle {
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let values = (0..order * order)
            .map(|k| f(k / order, k % order))
            .collect();
        Self { order, values }
    }

    pub fn from_values(order: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != order * order {
            return Err(Error::InvalidParameter(format!(
                "cocycle table has {} entries, expected {}",
                values.len(),
                order * order
            )));
        }
        Ok(Self { order, values })
    }

    #[inline]
    pub fn get(&self, g: usize, h: usize) -> Complex64 {
        self.values[g * self.order + h]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Worst `||ω(g,h)| - 1|`.
    pub fn unit_modulus_deviation(&self) -> f64 {
        self.values
            .iter()
            .map(|w| (w.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Worst violation of `ω(g,h) ω(gh,k) = ω(h,k) ω(g,hk)` over all triples.
    pub fn cocycle_identity_deviation(&self, group: &IndexGroup) -> f64 {
        let order = self.order;
        let mut worst: f64 = 0.0;
        for g in 0..order {
            for h in 0..order {
                let gh = group.mul(g, h);
                let w_gh = self.get(g, h);
                for k in 0..order {
                    let lhs = w_gh * self.get(gh, k);
                    let rhs = self.get(h, k) * self.get(g, group.mul(h, k));
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

/// Which family a basis was built from. Closed-form conversions key off `Weyl`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Weyl { n: usize },
    Quaternion,
    CentralType { param: usize },
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NiceErrorBasis {
    dim: usize,
    kind: BasisKind,
    group: IndexGroup,
    unitaries: Vec<CMatrix>,
    cocycle: Cocycle,
}

impl NiceErrorBasis {
    /// Assembles a basis from its parts, checking shapes only. Use [`verify_neb`]
    /// for the numerical axioms.
    pub fn from_parts(
        kind: BasisKind,
        group: IndexGroup,
        unitaries: Vec<CMatrix>,
        cocycle: Cocycle,
    ) -> Result<Self> {
        let dim = unitaries.first().map_or(0, CMatrix::rows);
        if dim == 0 {
            return Err(Error::NotNiceErrorBasis("no unitaries supplied".into()));
        }
        if unitaries.len() != dim * dim {
            return Err(Error::NotNiceErrorBasis(format!(
                "{} unitaries for dimension {dim}, expected {}",
                unitaries.len(),
                dim * dim
            )));
        }
        if let Some(bad) = unitaries
            .iter()
            .find(|u| u.rows() != dim || u.cols() != dim)
        {
            return Err(Error::ShapeMismatch {
                expected_rows: dim,
                expected_cols: dim,
                rows: bad.rows(),
                cols: bad.cols(),
            });
        }
        if group.order() != unitaries.len() || cocycle.order() != unitaries.len() {
            return Err(Error::NotNiceErrorBasis(format!(
                "group order {} / cocycle order {} do not match {} unitaries",
                group.order(),
                cocycle.order(),
                unitaries.len()
            )));
        }
        Ok(Self {
            dim,
            kind,
            group,
            unitaries,
            cocycle,
        })
    }

    /// Derives the index group and cocycle from the products of the given unitaries:
    /// for each pair `(g, h)` the product `π_g π_h` must be proportional to exactly
    /// one `π_m`, which defines `g·h = m` and `ω(g,h)`.
    pub fn from_unitaries(
        kind: BasisKind,
        labels: Vec<String>,
        unitaries: Vec<CMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let order = unitaries.len();
        if labels.len() != order {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {order} unitaries",
                labels.len()
            )));
        }
        let dim = unitaries.first().map_or(0, CMatrix::rows);
        if dim == 0 || order != dim * dim {
            return Err(Error::NotNiceErrorBasis(format!(
                "{order} unitaries of dimension {dim}"
            )));
        }
        let nf = dim as f64;
        // Bucket elements by sparsity pattern so monomial bases only compare a few candidates.
        let support =
            |m: &CMatrix| -> Vec<bool> { m.data().iter().map(|z| z.norm() > 1e-9).collect() };
        let mut buckets: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
        for (m, u) in unitaries.iter().enumerate() {
            buckets.entry(support(u)).or_default().push(m);
        }
        let all: Vec<usize> = (0..order).collect();
        let mut table = Vec::with_capacity(order * order);
        let mut values = Vec::with_capacity(order * order);
        for g in 0..order {
            for h in 0..order {
                let prod = unitaries[g].checked_mul(&unitaries[h])?;
                let candidates = buckets.get(&support(&prod)).unwrap_or(&all);
                let mut found = None;
                for &m in candidates.iter().chain(all.iter()) {
                    let overlap = hs_inner(&unitaries[m], &prod)? / nf;
                    if (overlap.norm() - 1.0).abs() <= tol.max(1e-12) * 1e3 {
                        found = Some((m, overlap));
                        break;
                    }
                }
                let (m, w) = found.ok_or_else(|| {
                    Error::NotNiceErrorBasis(format!(
                        "product of elements {g} and {h} is not proportional to a basis element"
                    ))
                })?;
                table.push(m);
                values.push(w / w.norm());
            }
        }
        let group = IndexGroup::from_table(labels, table)?;
        let cocycle = Cocycle::from_values(order, values)?;
        Self::from_parts(kind, group, unitaries, cocycle)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn group(&self) -> &IndexGroup {
        &self.group
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn element(&self, g: usize) -> &CMatrix {
        &self.unitaries[g]
    }

    /// Number of basis elements, `n²`.
    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// `Some(n)` for a Weyl basis.
    pub fn weyl_modulus(&self) -> Option<usize> {
        match self.kind {
            BasisKind::Weyl { n } => Some(n),
            _ => None,
        }
    }

    /// Expansion coefficients `l(x) = ⟨π_x, m⟩ / n`, so that `m = Σ_x l(x) π_x`.
    pub fn coordinates(&self, m: &CMatrix) -> Result<Vec<Complex64>> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.rows(),
            });
        }
        let nf = self.dim as f64;
        self.unitaries
            .iter()
            .map(|p| hs_inner(p, m).map(|z| z / nf))
            .collect()
    }

    /// `Σ_x coeffs[x] π_x`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> CMatrix {
        assert_eq!(coeffs.len(), self.len());
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (c, p) in coeffs.iter().zip(&self.unitaries) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            out = &out + &p.scale(*c);
        }
        out
    }
}

/// Canonical index of the Weyl label `(a, b)` in `Z_n × Z_n`.
#[inline]
pub fn weyl_index(n: usize, a: usize, b: usize) -> usize {
    (a % n) * n + b % n
}

/// Inverse of [`weyl_index`].
#[inline]
pub fn weyl_pair(n: usize, g: usize) -> (usize, usize) {
    (g / n, g % n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_group_satisfies_axioms() {
        for n in 1..=4 {
            let g = IndexGroup::weyl(n);
            let rebuilt = IndexGroup::from_table(g.labels().to_vec(), g.table().to_vec()).unwrap();
            assert_eq!(rebuilt, g);
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn weyl_ordering_is_row_major_in_labels() {
        let g = IndexGroup::weyl(3);
        assert_eq!(g.label(weyl_index(3, 2, 1)), "(2,1)");
        assert_eq!(
            g.mul(weyl_index(3, 1, 2), weyl_index(3, 2, 2)),
            weyl_index(3, 0, 1)
        );
        assert_eq!(g.inv(weyl_index(3, 1, 2)), weyl_index(3, 2, 1));
        assert_eq!(weyl_pair(3, 7), (2, 1));
    }

    #[test]
    fn from_table_rejects_non_groups() {
        let labels = vec!["a".to_string(), "b".to_string()];
        // no identity
        assert!(IndexGroup::from_table(labels.clone(), vec![1, 1, 1, 1]).is_err());
        // wrong size
        assert!(IndexGroup::from_table(labels.clone(), vec![0, 1, 1]).is_err());
        // out of range
        assert!(IndexGroup::from_table(labels, vec![0, 1, 1, 2]).is_err());
    }

    #[test]
    fn from_table_rejects_non_associative_loop() {
        // A 5-element loop with identity and inverses that is not associative.
        let t = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0, //
        ];
        let labels = (0..5).map(|i| i.to_string()).collect();
        let err = IndexGroup::from_table(labels, t).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(msg) if msg.contains("associativity")));
    }

    #[test]
    fn coordinates_round_trip_through_synthesize() {
        let b = weyl_basis(3).unwrap();
        let m = CMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(i as f64 - 0.5 * j as f64, (i * j) as f64)
        });
        let l = b.coordinates(&m).unwrap();
        assert!(b.synthesize(&l).max_abs_diff(&m) < 1e-13);
    }
}
