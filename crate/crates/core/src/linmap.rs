//! Linear maps on `M_n(ℂ)` in four interchangeable forms.
//!
//! * [`CoeffMatrix`]: `α(X) = Σ_{x,y} D(x,y) π_x X π_y*` over a nice error
//!   basis, with unnormalized `π_g`.
//! * [`ChoiMatrix`]: `C = Σ_{j,k} E_{jk} ⊗ α(E_{jk})`, row `(j, a)` at `j·n + a`.
//! * [`KrausSet`]: `α = Σ_j L_j · L_j*`.
//! * [`SuperOp`]: matrix acting on column-major `vec(X)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, psd_from_eig, CMatrix};
use crate::neb::{standard_bicharacter, weyl_index, NiceErrorBasis};
use crate::random::random_matrix;

/// Anything that acts linearly on `n × n` matrices.
pub trait LinearMap {
    fn dim(&self) -> usize;

    /// Evaluates the map on `x`, natively in the implementing representation.
    fn apply(&self, x: &CMatrix) -> Result<CMatrix>;
}

fn check_input(dim: usize, x: &CMatrix) -> Result<()> {
    if x.rows() != dim || x.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if x.rows() != dim { x.rows() } else { x.cols() },
        });
    }
    Ok(())
}

fn check_square(m: &CMatrix, size: usize) -> Result<()> {
    if m.rows() != size || m.cols() != size {
        return Err(Error::ShapeMismatch {
            expected_rows: size,
            expected_cols: size,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

/// Wraps a closure as a [`LinearMap`]. Linearity is the caller's promise.
pub struct ActionMap<F> {
    dim: usize,
    action: F,
}

impl<F: Fn(&CMatrix) -> CMatrix> ActionMap<F> {
    pub fn new(dim: usize, action: F) -> Self {
        Self { dim, action }
    }
}

impl<F: Fn(&CMatrix) -> CMatrix> LinearMap for ActionMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(self.dim, x)?;
        let y = (self.action)(x);
        check_input(self.dim, &y)?;
        Ok(y)
    }
}

/// Coefficient matrix `D` of a map relative to a nice error basis, indexed by
/// the basis's group elements in canonical order.
#[derive(Clone, Debug)]
pub struct CoeffMatrix {
    basis: Arc<NiceErrorBasis>,
    entries: CMatrix,
}

impl CoeffMatrix {
    pub fn new(basis: Arc<NiceErrorBasis>, entries: CMatrix) -> Result<Self> {
        check_square(&entries, basis.len())?;
        Ok(Self { basis, entries })
    }

    pub fn zeros(basis: Arc<NiceErrorBasis>) -> Self {
        let m = basis.len();
        Self {
            basis,
            entries: CMatrix::zeros(m, m),
        }
    }

    pub fn from_fn(basis: Arc<NiceErrorBasis>, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let m = basis.len();
        Self {
            basis,
            entries: CMatrix::from_fn(m, m, f),
        }
    }

    pub fn basis(&self) -> &Arc<NiceErrorBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.entries[(x, y)]
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis
    }

    /// Coefficient matrix with entries transformed in place; basis is kept.
    pub fn with_entries(&self, entries: CMatrix) -> Result<Self> {
        Self::new(self.basis.clone(), entries)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            basis: self.basis.clone(),
            entries: self.entries.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch);
        }
        Ok(Self {
            basis: self.basis.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.max_abs_diff(&other.entries)
    }
}

impl LinearMap for CoeffMatrix {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let n = self.dim();
        check_input(n, x)?;
        let order = self.basis.len();
        // X π_y* for every y, then π_x (Σ_y D(x,y) X π_y*) for every x.
        let right: Vec<CMatrix> = self
            .basis
            .unitaries()
            .iter()
            .map(|p| x * &p.adjoint())
            .collect();
        let mut out = CMatrix::zeros(n, n);
        for xi in 0..order {
            let mut inner = CMatrix::zeros(n, n);
            let mut any = false;
            for (yi, r) in right.iter().enumerate() {
                let d = self.get(xi, yi);
                if d != Complex64::new(0.0, 0.0) {
                    inner = &inner + &r.scale(d);
                    any = true;
                }
            }
            if any {
                out = &out + &(self.basis.element(xi) * &inner);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    entries: CMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, entries: CMatrix) -> Result<Self> {
        check_square(&entries, dim * dim)?;
        Ok(Self { dim, entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }
}

impl LinearMap for ChoiMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    /// `α(X)[a,b] = Σ_{j,k} X[j,k] C[(j,a),(k,b)]`.
    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let n = self.dim;
        check_input(n, x)?;
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let xjk = x[(j, k)];
                if xjk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        out[(a, b)] += xjk * self.entries[(j * n + a, k * n + b)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `α = Σ_j Ad_{L_j}`; an empty set is the zero map.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(dim: usize, operators: Vec<CMatrix>) -> Result<Self> {
        for op in &operators {
            check_square(op, dim)?;
        }
        Ok(Self { dim, operators })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

impl LinearMap for KrausSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(self.dim, x)?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for l in &self.operators {
            out = &out + &(&(l * x) * &l.adjoint());
        }
        Ok(out)
    }
}

/// Dense `n² × n²` matrix with `vec(α(X)) = S vec(X)`, column-major `vec`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    dim: usize,
    entries: CMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, entries: CMatrix) -> Result<Self> {
        check_square(&entries, dim * dim)?;
        Ok(Self { dim, entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }
}

impl LinearMap for SuperOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(self.dim, x)?;
        let v = self.entries.mat_vec(&x.vectorize_col_major());
        Ok(CMatrix::from_col_major(self.dim, self.dim, &v))
    }
}

/// Any of the four stored representations.
#[derive(Clone, Debug)]
pub enum MapForm {
    Coeff(CoeffMatrix),
    Choi(ChoiMatrix),
    Kraus(KrausSet),
    SuperOp(SuperOp),
}

impl LinearMap for MapForm {
    fn dim(&self) -> usize {
        match self {
            MapForm::Coeff(m) => m.dim(),
            MapForm::Choi(m) => m.dim(),
            MapForm::Kraus(m) => m.dim(),
            MapForm::SuperOp(m) => m.dim(),
        }
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        match self {
            MapForm::Coeff(m) => m.apply(x),
            MapForm::Choi(m) => m.apply(x),
            MapForm::Kraus(m) => m.apply(x),
            MapForm::SuperOp(m) => m.apply(x),
        }
    }
}

/// Applies any representation to `x`.
pub fn apply(map: &dyn LinearMap, x: &CMatrix) -> Result<CMatrix> {
    map.apply(x)
}

const LINEARITY_SEED: u64 = 0x5eed_0f11_4ea2;
const LINEARITY_TRIALS: usize = 3;
const LINEARITY_TOL: f64 = 1e-8;

fn check_linearity(map: &dyn LinearMap) -> Result<()> {
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(LINEARITY_SEED);
    for _ in 0..LINEARITY_TRIALS {
        let x = random_matrix(&mut rng, n, n);
        let y = random_matrix(&mut rng, n, n);
        let a = crate::random::gaussian(&mut rng);
        let b = crate::random::gaussian(&mut rng);
        let combined = map.apply(&(&x.scale(a) + &y.scale(b)))?;
        let separate = &map.apply(&x)?.scale(a) + &map.apply(&y)?.scale(b);
        let scale = combined.max_abs().max(separate.max_abs()).max(1.0);
        let deviation = combined.max_abs_diff(&separate) / scale;
        if deviation > LINEARITY_TOL {
            return Err(Error::NotLinear { deviation });
        }
    }
    Ok(())
}

/// Coefficient matrix of `map` in `basis`:
/// `D(x,y) = n⁻³ Σ_g Tr(π_y π_g* π_x* α(π_g))`.
///
/// Linearity is spot-checked on a few random pairs before extraction.
pub fn decompose(map: &dyn LinearMap, basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    let n = basis.dim();
    if map.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: map.dim(),
        });
    }
    check_linearity(map)?;

    let order = basis.len();
    let adjoints: Vec<CMatrix> = basis.unitaries().iter().map(CMatrix::adjoint).collect();
    let mut d = CMatrix::zeros(order, order);
    for g in 0..order {
        let image = map.apply(basis.element(g))?;
        // P_x = π_x* α(π_g),  Q_y = π_y π_g*,  Tr(Q_y P_x) = Σ_{ij} Q_y[i,j] P_x[j,i]
        let p: Vec<CMatrix> = adjoints.iter().map(|a| a * &image).collect();
        let q: Vec<CMatrix> = basis.unitaries().iter().map(|u| u * &adjoints[g]).collect();
        for (xi, px) in p.iter().enumerate() {
            let pt = px.transpose();
            for (yi, qy) in q.iter().enumerate() {
                let tr: Complex64 = qy.data().iter().zip(pt.data()).map(|(a, b)| a * b).sum();
                d[(xi, yi)] += tr;
            }
        }
    }
    let norm = 1.0 / (n as f64).powi(3);
    CoeffMatrix::new(basis.clone(), d.scale_real(norm))
}

/// `C_α = Σ_{j,k} E_{jk} ⊗ α(E_{jk})`, assembled from the images of all matrix units.
pub fn choi_of_map(map: &dyn LinearMap) -> Result<ChoiMatrix> {
    let n = map.dim();
    let mut c = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let image = map.apply(&CMatrix::unit(n, j, k))?;
            for a in 0..n {
                for b in 0..n {
                    c[(j * n + a, k * n + b)] = image[(a, b)];
                }
            }
        }
    }
    ChoiMatrix::new(n, c)
}

/// Dense superoperator: column `i + j·n` is `vec(α(E_{ij}))`.
pub fn superop_of_map(map: &dyn LinearMap) -> Result<SuperOp> {
    let n = map.dim();
    let mut s = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for i in 0..n {
            let v = map.apply(&CMatrix::unit(n, i, j))?.vectorize_col_major();
            for (r, z) in v.into_iter().enumerate() {
                s[(r, i + j * n)] = z;
            }
        }
    }
    SuperOp::new(n, s)
}

/// Choi matrix from a coefficient matrix. Over a Weyl basis this is the closed form
/// `C(v,w) = Σ_{x₂,y₂} ϰ(x₂,v₁)/ϰ(y₂,w₁) · D((v₂−v₁, x₂), (w₂−w₁, y₂))`;
/// other bases go through the action.
pub fn d_to_choi(d: &CoeffMatrix) -> Result<ChoiMatrix> {
    let Some(n) = d.basis().weyl_modulus() else {
        return choi_of_map(d);
    };
    let chi = standard_bicharacter(n)?;
    let mut c = CMatrix::zeros(n * n, n * n);
    for v1 in 0..n {
        for v2 in 0..n {
            let x1 = (v2 + n - v1) % n;
            for w1 in 0..n {
                for w2 in 0..n {
                    let y1 = (w2 + n - w1) % n;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x2 in 0..n {
                        let left = chi.eval(x2, v1);
                        for y2 in 0..n {
                            let coeff = d.get(weyl_index(n, x1, x2), weyl_index(n, y1, y2));
                            acc += left * chi.eval(y2, w1).conj() * coeff;
                        }
                    }
                    c[(v1 * n + v2, w1 * n + w2)] = acc;
                }
            }
        }
    }
    ChoiMatrix::new(n, c)
}

/// Inverse of [`d_to_choi`]. Over a Weyl basis:
/// `D(x,y) = n⁻² Σ_{a,b} ϰ(y₂,b)/ϰ(x₂,a) · C((a, a+x₁), (b, b+y₁))`;
/// other bases decompose the Choi action.
pub fn choi_to_d(c: &ChoiMatrix, basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    let n = basis.dim();
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.dim(),
        });
    }
    if basis.weyl_modulus().is_none() {
        return decompose(c, basis);
    }
    let chi = standard_bicharacter(n)?;
    let norm = 1.0 / (n * n) as f64;
    let entries = c.entries();
    let d = CoeffMatrix::from_fn(basis.clone(), |x, y| {
        let (x1, x2) = (x / n, x % n);
        let (y1, y2) = (y / n, y % n);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let left = chi.eval(x2, a).conj();
            for b in 0..n {
                acc +=
                    chi.eval(y2, b) * left * entries[(a * n + (a + x1) % n, b * n + (b + y1) % n)];
            }
        }
        acc * norm
    });
    Ok(d)
}

/// Kraus operators from the spectral decomposition `D = Σ_j λ_j |v_j⟩⟨v_j|`:
/// `L_j = √λ_j Σ_x v_j(x) π_x` for every eigenvalue at or above
/// `tol · max(1, λ_max)`.
pub fn kraus_from_d(d: &CoeffMatrix, tol: f64) -> Result<KrausSet> {
    let eig = hermitian_eig(d.entries(), tol)?;
    let psd = psd_from_eig(&eig, tol);
    if !psd.is_psd {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: psd.min_eigenvalue,
        });
    }
    let threshold = tol * eig.max_abs_eigenvalue().max(1.0);
    let basis = d.basis();
    let operators = eig
        .eigenvalues
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &l)| l >= threshold)
        .map(|(k, &l)| {
            let coords: Vec<Complex64> = eig.eigenvector(k).iter().map(|z| z * l.sqrt()).collect();
            basis.synthesize(&coords)
        })
        .collect();
    KrausSet::new(basis.dim(), operators)
}

/// `D = Σ_j |l_j⟩⟨l_j|` with `l_j` the basis coordinates of `L_j`.
pub fn d_from_kraus(k: &KrausSet, basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    if k.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: k.dim(),
        });
    }
    let order = basis.len();
    let mut d = CMatrix::zeros(order, order);
    for l in k.operators() {
        let coords = basis.coordinates(l)?;
        for x in 0..order {
            for y in 0..order {
                d[(x, y)] += coords[x] * coords[y].conj();
            }
        }
    }
    CoeffMatrix::new(basis.clone(), d)
}

/// Coefficient matrix of any stored representation.
pub fn to_coeff(map: &MapForm, basis: &Arc<NiceErrorBasis>) -> Result<CoeffMatrix> {
    match map {
        MapForm::Coeff(d) => {
            if *d.basis().as_ref() == **basis {
                Ok(d.clone())
            } else {
                decompose(d, basis)
            }
        }
        MapForm::Choi(c) => choi_to_d(c, basis),
        MapForm::Kraus(k) => d_from_kraus(k, basis),
        MapForm::SuperOp(s) => decompose(s, basis),
    }
}
