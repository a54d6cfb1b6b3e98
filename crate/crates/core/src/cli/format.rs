//! JSON exchange format for bases and maps.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays.
//! A map file looks like
//!
//! ```json
//! { "kind": "dmatrix", "dim": 2, "basis": { "type": "weyl", "n": 2 },
//!   "data": [[[0.5, 0.0], [0.0, 0.0], ...], ...] }
//! ```
//!
//! `dmatrix` rows and columns follow the basis order (Weyl `(a,b)` at `a·n + b`),
//! `choi` rows are `(j, a)` at `j·n + a`, `superop` acts on column-major `vec(X)`,
//! and `kraus` data is a list of `n × n` matrices. A `neb` file stores the
//! unitaries as `data` together with the group table and the cocycle.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::linmap::{ChoiMatrix, CoeffMatrix, KrausSet, LinearMap, MapForm, SuperOp};
use crate::neb::{
    central_type_basis, quaternion_basis, weyl_basis, BasisKind, Cocycle, IndexGroup,
    NiceErrorBasis,
};

/// `[re, im]`.
pub type JsonComplex = [f64; 2];
/// Row-major matrix of `[re, im]` entries.
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

/// Tolerance when checking a family-tagged `neb` file against the family it names.
const FAMILY_MATCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Dmatrix,
    Choi,
    Kraus,
    Superop,
    Neb,
}

impl FileKind {
    pub fn name(self) -> &'static str {
        match self {
            FileKind::Dmatrix => "dmatrix",
            FileKind::Choi => "choi",
            FileKind::Kraus => "kraus",
            FileKind::Superop => "superop",
            FileKind::Neb => "neb",
        }
    }
}

/// Which basis a coefficient matrix refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisDescriptor {
    Weyl {
        n: usize,
    },
    Quaternion,
    CentralType {
        param: usize,
    },
    /// A self-contained basis: group table, cocycle and unitaries.
    Table {
        labels: Vec<String>,
        mul: Vec<Vec<usize>>,
        cocycle: JsonMatrix,
        unitaries: Vec<JsonMatrix>,
    },
}

/// Multiplication table of the index group, `mul[g][h] = g·h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTable {
    pub order: usize,
    pub identity: usize,
    pub labels: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FileData {
    Matrix(JsonMatrix),
    Matrices(Vec<JsonMatrix>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub kind: FileKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<JsonMatrix>,
    pub data: FileData,
}

/// Parsed content of a [`MapFile`].
#[derive(Clone, Debug)]
pub enum Loaded {
    Map(MapForm),
    Basis(NiceErrorBasis),
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Math(#[from] crate::Error),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

pub fn complex_to_json(z: Complex64) -> JsonComplex {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| m.row(i).iter().copied().map(complex_to_json).collect())
        .collect()
}

/// Reads a matrix, checking it is `rows × cols` and finite.
pub fn matrix_from_json(
    m: &JsonMatrix,
    rows: usize,
    cols: usize,
    what: &str,
) -> Result<CMatrix, FormatError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        let got_cols = m.first().map_or(0, Vec::len);
        return Err(invalid(format!(
            "{what}: expected a {rows}x{cols} matrix, got {}x{got_cols}",
            m.len()
        )));
    }
    let data: Vec<Complex64> = m
        .iter()
        .flatten()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    if let Some(k) = data
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(invalid(format!(
            "{what}: non-finite entry at ({}, {})",
            k / cols,
            k % cols
        )));
    }
    Ok(CMatrix::new(rows, cols, data)?)
}

/// Reads a square matrix of any size.
pub fn square_from_json(m: &JsonMatrix, what: &str) -> Result<CMatrix, FormatError> {
    matrix_from_json(m, m.len(), m.len(), what)
}

fn family_descriptor(basis: &NiceErrorBasis) -> Option<BasisDescriptor> {
    match basis.kind() {
        BasisKind::Weyl { n } => Some(BasisDescriptor::Weyl { n }),
        BasisKind::Quaternion => Some(BasisDescriptor::Quaternion),
        BasisKind::CentralType { param } => Some(BasisDescriptor::CentralType { param }),
        BasisKind::Table => None,
    }
}

fn group_table(group: &IndexGroup) -> GroupTable {
    let order = group.order();
    GroupTable {
        order,
        identity: group.identity(),
        labels: group.labels().to_vec(),
        mul: group.table().chunks(order).map(<[usize]>::to_vec).collect(),
    }
}

fn cocycle_to_json(basis: &NiceErrorBasis) -> JsonMatrix {
    basis
        .cocycle()
        .values()
        .chunks(basis.len())
        .map(|row| row.iter().copied().map(complex_to_json).collect())
        .collect()
}

/// Descriptor that identifies `basis` inside a `dmatrix` file.
pub fn basis_descriptor(basis: &NiceErrorBasis) -> BasisDescriptor {
    family_descriptor(basis).unwrap_or_else(|| BasisDescriptor::Table {
        labels: basis.group().labels().to_vec(),
        mul: group_table(basis.group()).mul,
        cocycle: cocycle_to_json(basis),
        unitaries: basis.unitaries().iter().map(matrix_to_json).collect(),
    })
}

fn assemble_table_basis(
    kind: BasisKind,
    labels: Vec<String>,
    mul: &[Vec<usize>],
    cocycle: &JsonMatrix,
    unitaries: &[JsonMatrix],
) -> Result<NiceErrorBasis, FormatError> {
    let order = unitaries.len();
    let dim = unitaries.first().map_or(0, Vec::len);
    let ops = unitaries
        .iter()
        .enumerate()
        .map(|(g, u)| matrix_from_json(u, dim, dim, &format!("unitary {g}")))
        .collect::<Result<Vec<_>, _>>()?;
    if mul.len() != order || mul.iter().any(|r| r.len() != order) {
        return Err(invalid(format!("group table must be {order}x{order}")));
    }
    let group = IndexGroup::from_table(labels, mul.concat())?;
    let omega = matrix_from_json(cocycle, order, order, "cocycle")?;
    let cocycle = Cocycle::from_values(order, omega.into_data())?;
    Ok(NiceErrorBasis::from_parts(kind, group, ops, cocycle)?)
}

/// Builds the basis a descriptor refers to.
pub fn basis_from_descriptor(desc: &BasisDescriptor) -> Result<NiceErrorBasis, FormatError> {
    Ok(match desc {
        BasisDescriptor::Weyl { n } => weyl_basis(*n)?,
        BasisDescriptor::Quaternion => quaternion_basis(),
        BasisDescriptor::CentralType { param } => central_type_basis(*param)?,
        BasisDescriptor::Table {
            labels,
            mul,
            cocycle,
            unitaries,
        } => assemble_table_basis(BasisKind::Table, labels.clone(), mul, cocycle, unitaries)?,
    })
}

impl MapFile {
    pub fn from_json_str(s: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("map files always serialize")
    }

    pub fn from_coeff(d: &CoeffMatrix) -> Self {
        MapFile {
            kind: FileKind::Dmatrix,
            dim: d.dim(),
            basis: Some(basis_descriptor(d.basis())),
            group: None,
            cocycle: None,
            data: FileData::Matrix(matrix_to_json(d.entries())),
        }
    }

    pub fn from_map(map: &MapForm) -> Self {
        let square = |kind, dim, m: &CMatrix| MapFile {
            kind,
            dim,
            basis: None,
            group: None,
            cocycle: None,
            data: FileData::Matrix(matrix_to_json(m)),
        };
        match map {
            MapForm::Coeff(d) => Self::from_coeff(d),
            MapForm::Choi(c) => square(FileKind::Choi, c.dim(), c.entries()),
            MapForm::SuperOp(s) => square(FileKind::Superop, s.dim(), s.entries()),
            MapForm::Kraus(k) => MapFile {
                kind: FileKind::Kraus,
                dim: k.dim(),
                basis: None,
                group: None,
                cocycle: None,
                data: FileData::Matrices(k.operators().iter().map(matrix_to_json).collect()),
            },
        }
    }

    pub fn from_basis(basis: &NiceErrorBasis) -> Self {
        MapFile {
            kind: FileKind::Neb,
            dim: basis.dim(),
            basis: family_descriptor(basis),
            group: Some(group_table(basis.group())),
            cocycle: Some(cocycle_to_json(basis)),
            data: FileData::Matrices(basis.unitaries().iter().map(matrix_to_json).collect()),
        }
    }

    /// Validates shapes and builds the stored object.
    pub fn load(&self) -> Result<Loaded, FormatError> {
        let n = self.dim;
        if n == 0 {
            return Err(invalid("dim must be positive"));
        }
        let nn = n * n;
        let single = |what: &str| -> Result<CMatrix, FormatError> {
            match &self.data {
                FileData::Matrix(m) => matrix_from_json(m, nn, nn, what),
                FileData::Matrices(_) => {
                    Err(invalid(format!("{what}: data must be a single matrix")))
                }
            }
        };
        let list = |what: &str| -> Result<Vec<CMatrix>, FormatError> {
            match &self.data {
                FileData::Matrices(ms) => ms
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix_from_json(m, n, n, &format!("{what} {k}")))
                    .collect(),
                FileData::Matrix(m) if m.is_empty() => Ok(Vec::new()),
                FileData::Matrix(_) => {
                    Err(invalid(format!("{what}: data must be a list of matrices")))
                }
            }
        };
        Ok(match self.kind {
            FileKind::Dmatrix => {
                let desc = self
                    .basis
                    .as_ref()
                    .ok_or_else(|| invalid("dmatrix file needs a basis descriptor"))?;
                let basis = Arc::new(basis_from_descriptor(desc)?);
                if basis.dim() != n {
                    return Err(invalid(format!(
                        "basis has dimension {}, file says {n}",
                        basis.dim()
                    )));
                }
                Loaded::Map(MapForm::Coeff(CoeffMatrix::new(basis, single("dmatrix")?)?))
            }
            FileKind::Choi => Loaded::Map(MapForm::Choi(ChoiMatrix::new(n, single("choi")?)?)),
            FileKind::Superop => {
                Loaded::Map(MapForm::SuperOp(SuperOp::new(n, single("superop")?)?))
            }
            FileKind::Kraus => {
                Loaded::Map(MapForm::Kraus(KrausSet::new(n, list("kraus operator")?)?))
            }
            FileKind::Neb => Loaded::Basis(self.load_basis()?),
        })
    }

    fn load_basis(&self) -> Result<NiceErrorBasis, FormatError> {
        let group = self
            .group
            .as_ref()
            .ok_or_else(|| invalid("neb file needs a group table"))?;
        let cocycle = self
            .cocycle
            .as_ref()
            .ok_or_else(|| invalid("neb file needs a cocycle table"))?;
        let FileData::Matrices(unitaries) = &self.data else {
            return Err(invalid("neb data must be a list of unitaries"));
        };
        if unitaries.len() != self.dim * self.dim || unitaries.iter().any(|u| u.len() != self.dim) {
            return Err(invalid(format!(
                "neb file of dimension {} needs {} unitaries of size {0}x{0}",
                self.dim,
                self.dim * self.dim
            )));
        }
        if group.order != unitaries.len() {
            return Err(invalid(format!(
                "group order {} does not match data",
                group.order
            )));
        }
        let family = match &self.basis {
            Some(BasisDescriptor::Table { .. }) | None => None,
            Some(desc) => Some(basis_from_descriptor(desc)?),
        };
        let kind = family
            .as_ref()
            .map_or(BasisKind::Table, NiceErrorBasis::kind);
        let basis =
            assemble_table_basis(kind, group.labels.clone(), &group.mul, cocycle, unitaries)?;
        if basis.group().identity() != group.identity {
            return Err(invalid(format!(
                "identity {} does not match the group table (expected {})",
                group.identity,
                basis.group().identity()
            )));
        }
        if let Some(f) = family {
            let same_table = f.group().table() == basis.group().table();
            let close = f
                .unitaries()
                .iter()
                .zip(basis.unitaries())
                .all(|(a, b)| a.max_abs_diff(b) <= FAMILY_MATCH_TOL)
                && f.cocycle()
                    .values()
                    .iter()
                    .zip(basis.cocycle().values())
                    .all(|(a, b)| (a - b).norm() <= FAMILY_MATCH_TOL);
            if !(same_table && close) {
                return Err(invalid(
                    "neb file content does not match the family named in its basis descriptor",
                ));
            }
        }
        Ok(basis)
    }
}

/// Parses a bare matrix such as `[[[1,0],[2,0]],[[3,0],[4,0]]]`, or a map file's
/// single-matrix `data`.
pub fn parse_state(s: &str) -> Result<CMatrix, FormatError> {
    let value: serde_json::Value = serde_json::from_str(s)?;
    let data = match value.get("data") {
        Some(d) => d.clone(),
        None => value,
    };
    let m: JsonMatrix = serde_json::from_value(data)?;
    square_from_json(&m, "state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing_d, transpose_d};
    use crate::linmap::{choi_of_map, kraus_from_d};

    fn roundtrip(file: &MapFile) {
        let text = file.to_json_string();
        let parsed = MapFile::from_json_str(&text).unwrap();
        assert_eq!(&parsed, file);
        assert_eq!(parsed.to_json_string(), text);
    }

    #[test]
    fn dmatrix_roundtrip_is_exact() {
        let b = Arc::new(weyl_basis(3).unwrap());
        let d = transpose_d(&b).unwrap();
        let file = MapFile::from_coeff(&d);
        roundtrip(&file);
        let Loaded::Map(MapForm::Coeff(back)) = file.load().unwrap() else {
            panic!("expected a dmatrix");
        };
        assert_eq!(back.entries(), d.entries());
        assert_eq!(back.basis(), d.basis());
    }

    #[test]
    fn other_kinds_roundtrip() {
        let b = Arc::new(weyl_basis(2).unwrap());
        let d = depolarizing_d(&b);
        for map in [
            MapForm::Choi(choi_of_map(&d).unwrap()),
            MapForm::Kraus(kraus_from_d(&d, 1e-9).unwrap()),
            MapForm::SuperOp(crate::linmap::superop_of_map(&d).unwrap()),
        ] {
            let file = MapFile::from_map(&map);
            roundtrip(&file);
            assert!(file.load().is_ok());
        }
    }

    #[test]
    fn bases_roundtrip() {
        for basis in [
            weyl_basis(3).unwrap(),
            quaternion_basis(),
            central_type_basis(4).unwrap(),
        ] {
            let file = MapFile::from_basis(&basis);
            roundtrip(&file);
            let Loaded::Basis(back) = file.load().unwrap() else {
                panic!("expected a basis");
            };
            assert_eq!(back, basis);
        }
    }

    #[test]
    fn table_descriptor_roundtrip() {
        let q = quaternion_basis();
        let desc = match basis_descriptor(&q) {
            BasisDescriptor::Quaternion => BasisDescriptor::Table {
                labels: q.group().labels().to_vec(),
                mul: group_table(q.group()).mul,
                cocycle: cocycle_to_json(&q),
                unitaries: q.unitaries().iter().map(matrix_to_json).collect(),
            },
            other => panic!("unexpected {other:?}"),
        };
        let rebuilt = basis_from_descriptor(&desc).unwrap();
        assert_eq!(rebuilt.unitaries(), q.unitaries());
        assert_eq!(rebuilt.cocycle(), q.cocycle());
        assert_eq!(rebuilt.kind(), BasisKind::Table);
    }

    #[test]
    fn tampered_family_file_is_rejected() {
        let mut file = MapFile::from_basis(&weyl_basis(2).unwrap());
        if let FileData::Matrices(ms) = &mut file.data {
            ms[1][0][1] = [0.5, 0.0];
        }
        assert!(file.load().is_err());
    }

    #[test]
    fn shape_errors() {
        let text = r#"{"kind":"choi","dim":2,"data":[[[1,0]]]}"#;
        let file = MapFile::from_json_str(text).unwrap();
        assert!(matches!(file.load(), Err(FormatError::Invalid(_))));
        let text = r#"{"kind":"dmatrix","dim":2,"data":[]}"#;
        assert!(MapFile::from_json_str(text).unwrap().load().is_err());
        assert!(MapFile::from_json_str(r#"{"kind":"bogus","dim":2,"data":[]}"#).is_err());
    }

    #[test]
    fn state_parsing() {
        let m = parse_state("[[[1,0],[2,0]],[[3,0],[4,-1]]]").unwrap();
        assert_eq!(m[(1, 1)], Complex64::new(4.0, -1.0));
        assert!(parse_state("[[[1,0],[2,0]]]").is_err());
    }
}
