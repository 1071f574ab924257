//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices and kets are plain `nalgebra` dynamic types. Every routine here
//! is a pure function of its arguments and deterministic: identical inputs
//! give bitwise-identical outputs.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Dense complex matrix (operators, coins, POVM elements, Kraus maps).
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector. Normalized when used as a quantum state.
pub type CKet = DVector<Complex64>;

/// Default relative cutoff for rank decisions and general validation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Candidates whose Gram-Schmidt residual falls below this norm are skipped
/// during unitary completion.
const COMPLETION_SKIP_NORM: f64 = 1e-8;
/// Input rows to [`complete_unitary`] must be orthonormal to this level.
const ORTHONORMAL_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Scan order over the canonical basis used when completing a unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// `|0⟩, |1⟩, …, |d−1⟩`
    #[default]
    Forward,
    /// `|d−1⟩, …, |1⟩, |0⟩`
    Reverse,
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Canonical basis ket `|k⟩` in dimension `d`.
pub fn basis_ket(d: usize, k: usize) -> CKet {
    let mut v = CKet::zeros(d);
    v[k] = ONE;
    v
}

/// `|a⟩⟨b|`
pub fn outer(a: &CKet, b: &CKet) -> CMatrix {
    a * b.adjoint()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖U U† − 𝟙‖` in the max-entry norm.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u * u.adjoint() - identity(u.nrows())))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(invalid(format!("{what}: empty matrix")));
    }
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{what}: non-finite entry")))
    }
}

pub(crate) fn ensure_finite_ket(v: &CKet, what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("{what}: empty ket")));
    }
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{what}: non-finite entry")))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must be positive and finite, got {tol}")))
    }
}

/// Column-major copy; `eigh` silently conjugates its result for row-major input.
fn to_nd(m: &CMatrix) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()).f(), |(r, c)| m[(r, c)])
}

fn from_nd(a: &Array2<Complex64>) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[[r, c]])
}

/// Full SVD `m = U Σ V†`, singular values descending.
pub(crate) struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v_t: CMatrix,
}

/// LAPACK-backed SVD. `nalgebra`'s own SVD does not converge to the right
/// factors on some small complex inputs, so it is not used here.
pub(crate) fn svd(m: &CMatrix) -> Svd {
    let (u, s, v_t) = to_nd(m).svd(true, true).expect("LAPACK SVD of a finite matrix");
    Svd {
        u: from_nd(&u.expect("requested U")),
        singular_values: s.to_vec(),
        v_t: from_nd(&v_t.expect("requested V†")),
    }
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    to_nd(m).svd(false, false).expect("LAPACK SVD of a finite matrix").1.to_vec()
}

/// Largest singular value.
pub(crate) fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Moore–Penrose pseudoinverse via SVD.
///
/// Singular values `≤ tol·σ_max` are treated as zero, so the cutoff is scale
/// invariant. For invertible, well-conditioned `m` this is the inverse.
pub fn pseudo_inverse(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    check_tol(tol)?;
    ensure_finite(m, "pseudo_inverse")?;
    let Svd { u, singular_values, v_t } = svd(m);
    let sigma_max = singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * sigma_max;

    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        // V Σ⁺ U†, one rank-1 term at a time.
        let v_col = v_t.row(k).adjoint();
        let u_col = u.column(k);
        out += (v_col * u_col.adjoint()) * Complex64::from(1.0 / s);
    }
    Ok(out)
}

/// Number of singular values above `tol·σ_max` (zero for the zero matrix).
pub fn numerical_rank(m: &CMatrix, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    ensure_finite(m, "numerical_rank")?;
    let sv = singular_values(m);
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * sigma_max).count())
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::from(0.5);
    let (values, vectors) = to_nd(&h).eigh(UPLO::Lower).expect("LAPACK Hermitian eigensolver");
    (values.to_vec(), from_nd(&vectors))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Multiply `v` by a global phase so that its largest-magnitude amplitude
/// (first one, up to relative slack 1e-12) is real and positive.
pub(crate) fn fix_phase(v: &mut CKet) {
    let max = v.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("nonempty");
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
}

/// Remove from `v` its components along the orthonormal `basis`, twice.
fn orthogonalize(v: &mut CKet, basis: &[CKet]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, ONE);
        }
    }
}

/// Complete orthonormal `fixed_rows` to a `d×d` unitary.
///
/// The first `fixed_rows.len()` rows of the result are the given kets copied
/// verbatim (row `i` has entries `fixed_rows[i][k]`). Remaining rows come
/// from Gram–Schmidt over the canonical basis in forward order.
pub fn complete_unitary(fixed_rows: &[CKet], d: usize) -> Result<CMatrix> {
    complete_unitary_with(fixed_rows, d, Completion::Forward)
}

/// [`complete_unitary`] with an explicit scan order for the free rows.
pub fn complete_unitary_with(fixed_rows: &[CKet], d: usize, order: Completion) -> Result<CMatrix> {
    if d == 0 {
        return Err(invalid("complete_unitary: dimension must be positive"));
    }
    if fixed_rows.len() > d {
        return Err(invalid(format!(
            "complete_unitary: {} rows do not fit in dimension {d}",
            fixed_rows.len()
        )));
    }
    for (i, r) in fixed_rows.iter().enumerate() {
        if r.len() != d {
            return Err(invalid(format!("complete_unitary: row {i} has length {} ≠ {d}", r.len())));
        }
        ensure_finite_ket(r, "complete_unitary")?;
    }
    for (i, a) in fixed_rows.iter().enumerate() {
        for (j, b) in fixed_rows.iter().enumerate().skip(i) {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dev = (a.dotc(b) - Complex64::from(expected)).norm();
            if dev > ORTHONORMAL_TOL {
                return Err(invalid(format!(
                    "complete_unitary: rows {i} and {j} not orthonormal (deviation {dev:e})"
                )));
            }
        }
    }

    // Row entries of a unitary form an orthonormal set under the standard
    // inner product, so we complete in "row space" directly.
    let mut rows: Vec<CKet> = fixed_rows.to_vec();
    let scan: Vec<usize> = match order {
        Completion::Forward => (0..d).collect(),
        Completion::Reverse => (0..d).rev().collect(),
    };
    for k in scan {
        if rows.len() == d {
            break;
        }
        let mut cand = basis_ket(d, k);
        orthogonalize(&mut cand, &rows);
        let norm = cand.norm();
        if norm < COMPLETION_SKIP_NORM {
            continue;
        }
        cand.unscale_mut(norm);
        // one more pass after normalisation keeps the residual at roundoff
        orthogonalize(&mut cand, &rows);
        let norm = cand.norm();
        cand.unscale_mut(norm);
        rows.push(cand);
    }
    debug_assert_eq!(rows.len(), d);

    let mut u = CMatrix::zeros(d, d);
    for (i, r) in rows.iter().enumerate() {
        for k in 0..d {
            u[(i, k)] = r[k];
        }
    }
    Ok(u)
}
