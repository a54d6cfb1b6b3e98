//! Positivity taxonomy of a map read off its coefficient matrix.
//!
//! Complete positivity, co-positivity and the trace/unit criteria are exact
//! (up to tolerance). Plain positivity is only searched for: the search either
//! produces a witness pair `(u, v)` with `⟨v, α(uu*) v⟩ < 0` or reports that
//! its budget ran out without finding one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{compose, dagger};
use crate::channels::transpose_d;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, outer, psd_from_eig, vec_norm, CMatrix};
use crate::linmap::{d_from_kraus, kraus_from_d, CoeffMatrix, KrausSet, LinearMap};
use crate::random::random_unit_vector;

/// `max |D − D*|`.
pub fn hermiticity_deviation(d: &CoeffMatrix) -> f64 {
    d.entries().hermitian_deviation()
}

/// A map preserves Hermiticity exactly when its coefficient matrix is Hermitian.
pub fn is_hermiticity_preserving(d: &CoeffMatrix, tol: f64) -> bool {
    hermiticity_deviation(d) <= tol
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpCheck {
    pub is_cp: bool,
    /// Numeric rank of `D`, present when the map is CP.
    pub kraus_rank: Option<usize>,
    /// Smallest eigenvalue of the Hermitian part of `D`.
    pub min_eigenvalue: f64,
}

/// Completely positive iff `D` is positive semi-definite; the Kraus rank is its rank.
pub fn is_cp(d: &CoeffMatrix, tol: f64) -> Result<CpCheck> {
    let entries = d.entries();
    let hermitian = entries.hermitian_deviation() <= tol * entries.max_abs().max(1.0);
    let eig = hermitian_eig(&entries.hermitian_part(), tol)?;
    let psd = psd_from_eig(&eig, tol);
    let is_cp = hermitian && psd.is_psd;
    Ok(CpCheck {
        is_cp,
        kraus_rank: is_cp.then_some(psd.rank),
        min_eigenvalue: psd.min_eigenvalue,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CcpCheck {
    pub is_ccp: bool,
    /// Smallest eigenvalue of the coefficient matrix of `T ∘ α`.
    pub min_eigenvalue: f64,
}

/// Completely co-positive iff `T ∘ α` is CP, with `T` the transposition.
/// Needs a Weyl basis for the closed form of `T`.
pub fn is_ccp(d: &CoeffMatrix, tol: f64) -> Result<CcpCheck> {
    let t = transpose_d(d.basis())?;
    let composed = compose(&t, d)?;
    let cp = is_cp(&composed, tol)?;
    Ok(CcpCheck {
        is_ccp: cp.is_cp,
        min_eigenvalue: cp.min_eigenvalue,
    })
}

/// Budget for [`positivity_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iters: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    /// `⟨v, α(uu*) v⟩ = value < 0`.
    Violated {
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        value: f64,
    },
    /// Smallest value seen; not a proof of positivity.
    NoViolationFound {
        best_value: f64,
        budget: SearchBudget,
    },
}

/// Minimises `f(u, v) = ⟨v, α(uu*) v⟩` over unit vectors by alternating
/// updates: `v` becomes a lowest eigenvector of `α(uu*)`, then `u` a lowest
/// eigenvector of `α†(vv*)`. Runs from `budget.restarts` random starts.
///
/// Returns `Violated` as soon as `f < −tol · Σ|D|`.
pub fn positivity_search(d: &CoeffMatrix, budget: SearchBudget, tol: f64) -> Result<SearchOutcome> {
    let deviation = hermiticity_deviation(d);
    if deviation > tol * d.entries().max_abs().max(1.0) {
        return Err(Error::NotHermiticityPreserving { deviation });
    }
    let n = d.dim();
    let adjoint = dagger(d);
    // |⟨v, π_x uu* π_y* v⟩| ≤ 1, so Σ|D| bounds |f|.
    let scale: f64 = d
        .entries()
        .data()
        .iter()
        .map(|z| z.norm())
        .sum::<f64>()
        .max(1.0);
    let threshold = -tol * scale;
    let eig_tol = 1e-6;

    let min_pair = |m: &CMatrix| -> Result<(f64, Vec<Complex64>)> {
        let eig = hermitian_eig(&m.hermitian_part(), eig_tol)?;
        Ok((eig.eigenvalues[0], eig.eigenvector(0)))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best = f64::INFINITY;
    for _ in 0..budget.restarts {
        let mut u = random_unit_vector(&mut rng, n);
        let mut v;
        let mut last = f64::INFINITY;
        for _ in 0..budget.iters.max(1) {
            let (fv, vv) = min_pair(&d.apply(&outer(&u, &u))?)?;
            v = vv;
            if fv < threshold {
                return Ok(SearchOutcome::Violated { u, v, value: fv });
            }
            let (fu, uu) = min_pair(&adjoint.apply(&outer(&v, &v))?)?;
            u = uu;
            best = best.min(fu).min(fv);
            if fu < threshold {
                return Ok(SearchOutcome::Violated { u, v, value: fu });
            }
            if last - fu <= 1e-14 * scale {
                break;
            }
            last = fu;
        }
    }
    Ok(SearchOutcome::NoViolationFound {
        best_value: best,
        budget,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectCheck {
    pub holds: bool,
    /// Worst deviation of the group-indexed criterion.
    pub max_defect: f64,
}

/// Trace preserving iff `Σ_x ω(x,g) D(x, xg) = δ_{1,g}` for every `g`.
pub fn is_trace_preserving(d: &CoeffMatrix, tol: f64) -> DefectCheck {
    let basis = d.basis();
    let group = basis.group();
    let omega = basis.cocycle();
    let order = basis.len();
    let mut worst: f64 = 0.0;
    for g in 0..order {
        let sum: Complex64 = (0..order)
            .map(|x| omega.get(x, g) * d.get(x, group.mul(x, g)))
            .sum();
        let target = if g == group.identity() { 1.0 } else { 0.0 };
        worst = worst.max((sum - target).norm());
    }
    DefectCheck {
        holds: worst <= tol,
        max_defect: worst,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitalCheck {
    pub holds: bool,
    /// Worst deviation of the group-indexed criterion.
    pub max_defect: f64,
    /// `max |α(I) − I|`, computed from the action.
    pub direct_defect: f64,
}

/// Unital iff `Σ_x ω(x, x⁻¹z) / ω(z⁻¹x, x⁻¹z) · D(x, z⁻¹x) = δ_{1,z}` for every `z`.
pub fn is_unital(d: &CoeffMatrix, tol: f64) -> Result<UnitalCheck> {
    let basis = d.basis();
    let group = basis.group();
    let omega = basis.cocycle();
    let order = basis.len();
    let mut worst: f64 = 0.0;
    for z in 0..order {
        let zinv = group.inv(z);
        let sum: Complex64 = (0..order)
            .map(|x| {
                let xz = group.mul(group.inv(x), z);
                let zx = group.mul(zinv, x);
                omega.get(x, xz) / omega.get(zx, xz) * d.get(x, zx)
            })
            .sum();
        let target = if z == group.identity() { 1.0 } else { 0.0 };
        worst = worst.max((sum - target).norm());
    }
    let n = d.dim();
    let eye = CMatrix::identity(n);
    let direct_defect = d.apply(&eye)?.max_abs_diff(&eye);
    Ok(UnitalCheck {
        holds: worst <= tol,
        max_defect: worst,
        direct_defect,
    })
}

#[derive(Clone, Debug)]
pub struct EbCheck {
    /// CP and co-CP; for qubit maps this is exactly entanglement breaking.
    pub is_entanglement_breaking: bool,
    /// Kraus operators of rank one reproducing the map, when one was constructed.
    pub certificate: Option<KrausSet>,
}

/// Entanglement breaking test for maps on `M_2`.
///
/// The decision is `CP ∧ co-CP`. Independently, a rank-one Kraus decomposition
/// is sought: first the spectral Kraus set of `D`, then, if some operator there
/// has full rank, a decomposition built so that every Kraus vector `l` satisfies
/// `det(Σ_x l(x) π_x) = 0`.
pub fn is_entanglement_breaking_2x2(d: &CoeffMatrix, tol: f64) -> Result<EbCheck> {
    if d.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "entanglement-breaking test is only defined for 2x2 matrices, got dimension {}",
            d.dim()
        )));
    }
    let cp = is_cp(d, tol)?;
    let ccp = is_ccp(d, tol)?;
    let certificate = if cp.is_cp {
        rank_one_certificate(d, tol)?
    } else {
        None
    };
    Ok(EbCheck {
        is_entanglement_breaking: cp.is_cp && ccp.is_ccp,
        certificate,
    })
}

/// `|det L| ≤ tol · σ_max(L)²` for a 2×2 matrix.
fn is_rank_one_2x2(l: &CMatrix, tol: f64) -> bool {
    let det = l[(0, 0)] * l[(1, 1)] - l[(0, 1)] * l[(1, 0)];
    let gram = &l.adjoint() * l;
    let sigma_max_sq = hermitian_eig(&gram, 1e-6)
        .map(|e| e.max_abs_eigenvalue())
        .unwrap_or_else(|_| gram.trace().re);
    sigma_max_sq > 0.0 && det.norm() <= tol * sigma_max_sq
}

fn rank_one_certificate(d: &CoeffMatrix, tol: f64) -> Result<Option<KrausSet>> {
    let spectral = kraus_from_d(d, tol)?;
    if spectral.operators().iter().all(|l| is_rank_one_2x2(l, tol)) {
        return Ok(Some(spectral));
    }
    let Some(candidate) = det_zero_decomposition(d, tol)? else {
        return Ok(None);
    };
    let reproduced = d_from_kraus(&candidate, d.basis())?;
    let scale = d.entries().max_abs().max(1.0);
    let faithful = reproduced.max_abs_diff(d) <= 16.0 * tol * scale;
    let rank_one = candidate
        .operators()
        .iter()
        .all(|l| is_rank_one_2x2(l, tol));
    Ok((faithful && rank_one).then_some(candidate))
}

/// Rewrites `D = Σ_j |w_j⟩⟨w_j|` as a sum of four rank-one terms whose Kraus
/// operators are singular, when the symmetric form `τ_jk = w_jᵀ Q w_k`
/// (`Q` the polarised determinant) has Takagi values with
/// `σ_1 ≤ σ_2 + σ_3 + σ_4`.
fn det_zero_decomposition(d: &CoeffMatrix, tol: f64) -> Result<Option<KrausSet>> {
    let basis = d.basis();
    let order = basis.len();
    let eig = hermitian_eig(&d.entries().hermitian_part(), tol)?;
    let threshold = tol * eig.max_abs_eigenvalue().max(1.0);
    let w: Vec<Vec<Complex64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= threshold)
        .map(|(k, &l)| eig.eigenvector(k).iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let r = w.len();
    if r == 0 {
        return Ok(Some(KrausSet::new(2, vec![])?));
    }

    // det(A) = (Tr(A)² − Tr(A²)) / 2, polarised.
    let q = CMatrix::from_fn(order, order, |x, y| {
        let (px, py) = (basis.element(x), basis.element(y));
        (px.trace() * py.trace() - (px * py).trace()) * 0.5
    });
    let bilinear = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        let qb = q.mat_vec(b);
        a.iter().zip(&qb).map(|(x, y)| x * y).sum()
    };
    let tau = CMatrix::from_fn(r, r, |j, k| bilinear(&w[j], &w[k]));

    let (sigmas, us) = takagi(&tau, tol)?;
    let mut x: Vec<(f64, Vec<Complex64>)> = sigmas
        .iter()
        .zip(&us)
        .map(|(&s, u)| {
            let mut v = vec![Complex64::new(0.0, 0.0); order];
            for (j, wj) in w.iter().enumerate() {
                let c = u[j].conj();
                for (vi, wi) in v.iter_mut().zip(wj) {
                    *vi += c * wi;
                }
            }
            (s, v)
        })
        .collect();
    while x.len() < 4 {
        x.push((0.0, vec![Complex64::new(0.0, 0.0); order]));
    }
    x.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mags: Vec<f64> = x.iter().map(|(s, _)| *s).collect();
    let slack = tol * mags[0].max(1.0);
    if mags[0] > mags[1] + mags[2] + mags[3] + slack {
        return Ok(None);
    }
    let phases = closing_phases([mags[0], mags[1], mags[2], mags[3]]);
    let rotated: Vec<Vec<Complex64>> = x
        .iter()
        .zip(phases)
        .map(|((_, v), psi)| {
            let p = Complex64::from_polar(1.0, psi / 2.0);
            v.iter().map(|z| z * p).collect()
        })
        .collect();

    const SIGNS: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    let scale = d.entries().max_abs().max(1.0);
    let operators = SIGNS
        .iter()
        .map(|row| {
            let mut z = vec![Complex64::new(0.0, 0.0); order];
            for (s, v) in row.iter().zip(&rotated) {
                for (zi, vi) in z.iter_mut().zip(v) {
                    *zi += vi * (0.5 * s);
                }
            }
            z
        })
        .filter(|z| vec_norm(z) > (tol * scale).sqrt())
        .map(|z| basis.synthesize(&z))
        .collect();
    Ok(Some(KrausSet::new(2, operators)?))
}

/// Takagi factorisation of a complex symmetric `A`: unit vectors `u_i` with
/// `A ū_i = σ_i u_i`, `σ_i ≥ 0`, completed to an orthonormal basis with `σ = 0`.
fn takagi(a: &CMatrix, tol: f64) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let r = a.rows();
    // [[Re A, Im A], [Im A, −Re A]] (x; y) = σ (x; y)  ⇔  A conj(x + iy) = σ (x + iy)
    let m = CMatrix::from_fn(2 * r, 2 * r, |i, j| {
        let z = a[(i % r, j % r)];
        let v = match (i < r, j < r) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        };
        Complex64::new(v, 0.0)
    });
    let eig = hermitian_eig(&m, 1e-6)?;
    let threshold = tol * eig.max_abs_eigenvalue().max(1.0);
    let mut sigmas = Vec::new();
    let mut us: Vec<Vec<Complex64>> = Vec::new();
    for k in (0..2 * r).rev() {
        let s = eig.eigenvalues[k];
        if s <= threshold || us.len() == r {
            break;
        }
        let col = eig.eigenvector(k);
        let u: Vec<Complex64> = (0..r)
            .map(|i| Complex64::new(col[i].re, col[i + r].re))
            .collect();
        let norm = vec_norm(&u);
        us.push(u.into_iter().map(|z| z / norm).collect());
        sigmas.push(s);
    }
    // Complete with standard basis vectors by Gram–Schmidt.
    for e in 0..r {
        if us.len() == r {
            break;
        }
        let mut v: Vec<Complex64> = (0..r)
            .map(|i| Complex64::new(if i == e { 1.0 } else { 0.0 }, 0.0))
            .collect();
        for u in &us {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            us.push(v.into_iter().map(|z| z / norm).collect());
            sigmas.push(0.0);
        }
    }
    Ok((sigmas, us))
}

/// Phases `ψ_k` with `Σ_k a_k e^{iψ_k} ≈ 0` for non-negative `a` sorted descending
/// with `a_0 ≤ a_1 + a_2 + a_3`.
fn closing_phases(a: [f64; 4]) -> [f64; 4] {
    let c = (a[0] - a[1])
        .max((a[2] - a[3]).abs())
        .min(a[0] + a[1])
        .min(a[2] + a[3]);
    let (p0, p1) = two_sum(a[0], a[1], Complex64::new(c, 0.0));
    let (p2, p3) = two_sum(a[2], a[3], Complex64::new(-c, 0.0));
    [p0, p1, p2, p3]
}

/// Phases with `a e^{iθa} + b e^{iθb} = target`, assuming `|a − b| ≤ |target| ≤ a + b`.
fn two_sum(a: f64, b: f64, target: Complex64) -> (f64, f64) {
    let t = target.norm();
    let arg = target.arg();
    let eps = 1e-300;
    if a <= eps {
        return (0.0, arg);
    }
    if b <= eps {
        return (arg, 0.0);
    }
    if t <= eps {
        return (0.0, PI);
    }
    let cos = ((a * a + t * t - b * b) / (2.0 * a * t)).clamp(-1.0, 1.0);
    let theta_a = arg + cos.acos();
    let rest = target - Complex64::from_polar(a, theta_a);
    (theta_a, rest.arg())
}

/// Three-way answer for plain positivity.
#[derive(Clone, Debug, PartialEq)]
pub enum Positivity {
    ImpliedByCp,
    Violated {
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        value: f64,
    },
    NoViolationFound {
        best_value: f64,
        budget: SearchBudget,
    },
    /// The map does not preserve Hermiticity, so the search is not defined.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub budget: SearchBudget,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol: crate::linalg::DEFAULT_TOL,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub hermiticity_preserving: bool,
    pub hermiticity_deviation: f64,
    pub cp: CpCheck,
    /// `None` when the basis has no closed-form transposition (non-Weyl).
    pub ccp: Option<CcpCheck>,
    pub positive: Positivity,
    pub trace_preserving: DefectCheck,
    pub unital: UnitalCheck,
    /// Present only for `n = 2` over a Weyl basis.
    pub eb_2x2: Option<EbCheck>,
}

/// Runs every test on `d`.
pub fn classify(d: &CoeffMatrix, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let tol = opts.tol;
    let hermiticity_deviation = hermiticity_deviation(d);
    let hermiticity_preserving = hermiticity_deviation <= tol;
    let cp = is_cp(d, tol)?;
    let weyl = d.basis().weyl_modulus().is_some();
    let ccp = if weyl { Some(is_ccp(d, tol)?) } else { None };
    let positive = if cp.is_cp {
        Positivity::ImpliedByCp
    } else if hermiticity_preserving {
        match positivity_search(d, opts.budget, tol)? {
            SearchOutcome::Violated { u, v, value } => Positivity::Violated { u, v, value },
            SearchOutcome::NoViolationFound { best_value, budget } => {
                Positivity::NoViolationFound { best_value, budget }
            }
        }
    } else {
        Positivity::NotApplicable
    };
    let eb_2x2 = if d.dim() == 2 && weyl {
        Some(is_entanglement_breaking_2x2(d, tol)?)
    } else {
        None
    };
    Ok(ClassificationReport {
        hermiticity_preserving,
        hermiticity_deviation,
        cp,
        ccp,
        positive,
        trace_preserving: is_trace_preserving(d, tol),
        unital: is_unital(d, tol)?,
        eb_2x2,
    })
}
