//! Reference computations for integration tests.
//!
//! Coefficient matrices are recovered from dense superoperators: the map
//! `X ↦ π_x X π_y*` has column-major superoperator `conj(π_y) ⊗ π_x`, these are
//! pairwise orthogonal with squared norm `n²`, so `D(x,y) = ⟨conj(π_y) ⊗ π_x, S⟩ / n²`.
#![allow(dead_code)]

use std::sync::Arc;

use neb_core::linalg::CMatrix;
use neb_core::linmap::{CoeffMatrix, KrausSet, LinearMap};
use neb_core::neb::NiceErrorBasis;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Rng8 = ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gauss(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn rand_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gauss(rng))
}

pub fn kron_ref(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn matmul_ref(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.cols(), b.rows());
    CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
    })
}

/// Column-major `vec`.
pub fn vec_cm(x: &CMatrix) -> Vec<Complex64> {
    let n = x.rows();
    (0..n * n).map(|k| x[(k % n, k / n)]).collect()
}

pub fn unvec_cm(v: &[Complex64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| v[i + j * n])
}

/// Superoperator of an action, column `i + j·n` = `vec(f(E_ij))`.
pub fn superop_of(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut s = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for i in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = c(1.0, 0.0);
            for (r, z) in vec_cm(&f(&e)).into_iter().enumerate() {
                s[(r, i + j * n)] = z;
            }
        }
    }
    s
}

pub fn apply_superop(s: &CMatrix, x: &CMatrix) -> CMatrix {
    let n = x.rows();
    let v = vec_cm(x);
    let out: Vec<Complex64> = (0..n * n)
        .map(|r| (0..n * n).map(|k| s[(r, k)] * v[k]).sum())
        .collect();
    unvec_cm(&out, n)
}

/// `conj(π_y) ⊗ π_x`.
pub fn elementary_superop(basis: &NiceErrorBasis, x: usize, y: usize) -> CMatrix {
    kron_ref(&basis.element(y).conj(), basis.element(x))
}

/// Superoperator of the D-form, summed term by term.
pub fn superop_from_d(d: &CoeffMatrix) -> CMatrix {
    let basis = d.basis();
    let m = basis.len();
    let nn = basis.dim() * basis.dim();
    let mut s = CMatrix::zeros(nn, nn);
    for x in 0..m {
        for y in 0..m {
            let coef = d.get(x, y);
            if coef.norm() == 0.0 {
                continue;
            }
            let e = elementary_superop(basis, x, y);
            for (dst, src) in (0..nn * nn).map(|k| (k, e.data()[k])) {
                let (r, cc) = (dst / nn, dst % nn);
                s[(r, cc)] += coef * src;
            }
        }
    }
    s
}

/// `D(x,y) = ⟨conj(π_y) ⊗ π_x, S⟩ / n²`.
pub fn d_from_superop(s: &CMatrix, basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let n = basis.dim() as f64;
    let m = basis.len();
    let mut d = CMatrix::zeros(m, m);
    for x in 0..m {
        for y in 0..m {
            let e = elementary_superop(basis, x, y);
            let ip: Complex64 = e
                .data()
                .iter()
                .zip(s.data())
                .map(|(a, b)| a.conj() * b)
                .sum();
            d[(x, y)] = ip / (n * n);
        }
    }
    CoeffMatrix::new(basis.clone(), d).unwrap()
}

/// Brute-force coefficient matrix of an action.
pub fn d_of_action(basis: &Arc<NiceErrorBasis>, f: impl Fn(&CMatrix) -> CMatrix) -> CoeffMatrix {
    d_from_superop(&superop_of(basis.dim(), f), basis)
}

/// Choi matrix straight from the definition `C[(j,a),(k,b)] = α(E_jk)[a,b]`.
pub fn choi_ref(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut ch = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(j, k)] = c(1.0, 0.0);
            let img = f(&e);
            for a in 0..n {
                for b in 0..n {
                    ch[(j * n + a, k * n + b)] = img[(a, b)];
                }
            }
        }
    }
    ch
}

pub fn random_d(rng: &mut impl Rng, basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let m = basis.len();
    CoeffMatrix::new(basis.clone(), rand_matrix(rng, m, m)).unwrap()
}

pub fn random_hermitian_d(rng: &mut impl Rng, basis: &Arc<NiceErrorBasis>) -> CoeffMatrix {
    let m = basis.len();
    CoeffMatrix::new(basis.clone(), rand_matrix(rng, m, m).hermitian_part()).unwrap()
}

pub fn random_kraus(rng: &mut impl Rng, n: usize, r: usize) -> KrausSet {
    KrausSet::new(n, (0..r).map(|_| rand_matrix(rng, n, n)).collect()).unwrap()
}

/// Action of a D-form computed through the reference superoperator.
pub fn action_of(d: &CoeffMatrix) -> impl Fn(&CMatrix) -> CMatrix {
    let s = superop_from_d(d);
    move |x: &CMatrix| apply_superop(&s, x)
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// Applies a library map, unwrapping.
pub fn run<M: LinearMap + ?Sized>(m: &M, x: &CMatrix) -> CMatrix {
    m.apply(x).unwrap()
}
