//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small (at most a few hundred rows) dense
//! matrices. QR, LU, Schur and Hermitian eigen decompositions come from
//! `nalgebra`; the SVD is a one-sided Jacobi iteration (see [`svd`]). The
//! Takagi factorization, nullspace extraction and the polynomial helpers are
//! built on top of these.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default absolute threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major complex entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
    CMatrix::from_row_slice(rows, cols, entries)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    let e: Vec<Complex64> = entries.iter().map(|&x| c(x, 0.0)).collect();
    from_rows(rows, cols, &e)
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(values))
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(a: &CMatrix) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Spectral norm (largest singular value).
pub fn norm2(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// `max(1, ‖a‖₂)`, the scale used for relative tolerances.
pub fn scale_of(a: &CMatrix) -> f64 {
    norm2(a).max(1.0)
}

pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

pub fn conj_vec(x: &CVector) -> CVector {
    x.map(|z| z.conj())
}

/// Frobenius distance from unitarity, `‖A*A − I‖_F`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.ncols();
    (a.adjoint() * a - CMatrix::identity(n, n)).norm()
}

pub fn symmetry_defect(a: &CMatrix) -> f64 {
    (a - a.transpose()).norm()
}

/// Column-major vectorization.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Matrix of `X ↦ Xᵀ` acting on column-major vectorizations of n×m matrices.
pub fn transpose_operator(rows: usize, cols: usize) -> CMatrix {
    let n = rows * cols;
    let mut p = CMatrix::zeros(n, n);
    for i in 0..rows {
        for j in 0..cols {
            // X[i,j] sits at i + j*rows; Xᵀ[j,i] sits at j + i*cols.
            p[(j + i * cols, i + j * rows)] = ONE;
        }
    }
    p
}

/// Matrix of `X ↦ A·X·B` on column-major vectorizations (`Bᵀ ⊗ A`).
pub fn sandwich_operator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(a)
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        let (m, n) = (self.u.nrows(), self.v.nrows());
        let mut sigma = CMatrix::zeros(m, n);
        for (i, &s) in self.s.iter().enumerate() {
            sigma[(i, i)] = c(s, 0.0);
        }
        &self.u * sigma * self.v.adjoint()
    }
}

/// Extends the orthonormal columns of `q` to a full orthonormal basis.
pub fn complete_orthonormal(q: &CMatrix) -> CMatrix {
    let m = q.nrows();
    let mut cols: Vec<CVector> = q.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < m {
        let mut best: Option<CVector> = None;
        let mut best_norm = -1.0;
        for i in 0..m {
            let mut e = CVector::zeros(m);
            e[i] = ONE;
            for _ in 0..2 {
                for col in &cols {
                    let proj = col.dotc(&e);
                    e -= col * proj;
                }
            }
            let nrm = e.norm();
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(e);
            }
        }
        let e = best.expect("m > 0 candidates");
        cols.push(e.unscale(best_norm));
    }
    CMatrix::from_columns(&cols)
}

/// Full singular value decomposition `A = U·diag(S)·V*` with square unitary
/// `U` (m×m) and `V` (n×n) and `S` sorted in descending order.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    check_finite(a)?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(SvdResult {
            u: CMatrix::identity(m, m),
            s: Vec::new(),
            v: CMatrix::identity(n, n),
        });
    }
    let tall = m >= n;
    let work = if tall { a.clone() } else { a.adjoint() };
    let (u_thin, values, v_full) = thin_svd(&work)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let s: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let u_cols: Vec<CVector> = order.iter().map(|&i| u_thin.column(i).into_owned()).collect();
    let v_cols: Vec<CVector> = order.iter().map(|&i| v_full.column(i).into_owned()).collect();
    let u_sorted = complete_orthonormal(&CMatrix::from_columns(&u_cols));
    let v_sorted = CMatrix::from_columns(&v_cols);
    if tall {
        Ok(SvdResult { u: u_sorted, s, v: v_sorted })
    } else {
        Ok(SvdResult { u: v_sorted, s, v: u_sorted })
    }
}

/// `(U, σ, V)` with `work = U·diag(σ)·V*` for a tall `work`, `U` thin.
///
/// nalgebra's complex SVD returns factors that fail to reconstruct the input
/// on a noticeable fraction of the small matrices met here (errors from 1e−12
/// up to 1e−2), so a one-sided Jacobi SVD is used instead, applied to the `R`
/// factor of a QR decomposition when `work` has more rows than columns.
fn thin_svd(work: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (m, n) = work.shape();
    let (u, s, v) = if m > n {
        let qr = work.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let (ur, s, v) = jacobi_svd(&r);
        (q * ur, s, v)
    } else {
        jacobi_svd(work)
    };
    let err = svd_error(work, &u, &s, &v);
    if err > 1e-10 {
        return Err(Error::NumericalDegeneracy(format!("SVD reconstruction error {err:.2e}")));
    }
    Ok((u, s, v))
}

/// Relative reconstruction error plus loss of orthonormality.
fn svd_error(work: &CMatrix, u: &CMatrix, s: &[f64], v: &CMatrix) -> f64 {
    if !s.iter().all(|x| x.is_finite() && *x >= 0.0) {
        return f64::INFINITY;
    }
    let n = work.ncols();
    let sd = CMatrix::from_diagonal(&CVector::from_iterator(s.len(), s.iter().map(|&x| c(x, 0.0))));
    let recon = (u * sd * v.adjoint() - work).norm() / work.norm().max(1.0);
    let id = CMatrix::identity(n, n);
    let orth = (v.adjoint() * v - &id).norm() + (u.adjoint() * u - id).norm();
    let e = recon.max(orth);
    if e.is_nan() { f64::INFINITY } else { e }
}

/// One-sided (Hestenes) Jacobi SVD of a tall matrix: plane rotations on
/// column pairs until all columns are mutually orthogonal.
fn jacobi_svd(work: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (m, n) = work.shape();
    let mut a = work.clone();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // [a_p, a_q] ← [a_p, a_q]·[[c, s], [−s·φ̄, c·φ̄]] with φ = γ/|γ|.
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let (x, y) = (mat[(r, p)], mat[(r, q)] * phase.conj());
                        mat[(r, p)] = x * cs - y * sn;
                        mat[(r, q)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let floor = smax * f64::EPSILON * (m.max(n) as f64);
    let good: Vec<usize> = (0..n).filter(|&j| s[j] > floor && s[j] > 0.0).collect();
    let mut u = CMatrix::zeros(m, n);
    for &j in &good {
        u.set_column(j, &(a.column(j) / c(s[j], 0.0)));
    }
    if good.len() < n {
        let known = if good.is_empty() {
            CMatrix::zeros(m, 0)
        } else {
            CMatrix::from_columns(&good.iter().map(|&j| u.column(j).into_owned()).collect::<Vec<_>>())
        };
        let full = complete_orthonormal(&known);
        let mut extra = good.len();
        for j in (0..n).filter(|j| !good.contains(j)) {
            u.set_column(j, &full.column(extra));
            extra += 1;
        }
    }
    let s = s.iter().enumerate().map(|(j, &x)| if good.contains(&j) { x } else { 0.0 }).collect();
    (u, s, v)
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    if let Ok(d) = svd(a) {
        return d.s;
    }
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Unitary factor of the polar decomposition `A = Q·P`.
pub fn polar_unitary(a: &CMatrix) -> Result<CMatrix> {
    let d = svd(a)?;
    let n = a.ncols();
    let u = d.u.columns(0, n).into_owned();
    Ok(u * d.v.adjoint())
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

#[derive(Debug, Clone)]
pub struct TakagiResult {
    pub w: CMatrix,
    pub s: Vec<f64>,
}

impl TakagiResult {
    pub fn reconstruct(&self) -> CMatrix {
        let d: Vec<Complex64> = self.s.iter().map(|&x| c(x, 0.0)).collect();
        &self.w * diag(&d) * self.w.transpose()
    }
}

/// Takagi factorization `A = W·diag(S)·Wᵀ` of a complex symmetric matrix.
///
/// Writing `A = B + iC` and `w = x + iy`, the condition `A·w̄ = σw` is the
/// real symmetric eigenproblem `[[B, C], [C, −B]]·(x, y) = σ(x, y)`, whose
/// spectrum is symmetric about zero. The `n` largest eigenpairs give the
/// Takagi vectors; columns for (numerically) zero singular values are taken
/// from the orthogonal complement, and `W` is finally replaced by its polar
/// factor.
pub fn takagi(a: &CMatrix) -> Result<TakagiResult> {
    check_finite(a)?;
    if !a.is_square() {
        return Err(Error::InvalidInput("takagi needs a square matrix".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(TakagiResult { w: CMatrix::zeros(0, 0), s: Vec::new() });
    }
    let scale = scale_of(a);
    let asym = symmetry_defect(a);
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (a + a.transpose()) * c(0.5, 0.0);
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = sym[(i, j)];
            m[(i, j)] = z.re;
            m[(i, j + n)] = z.im;
            m[(i + n, j)] = z.im;
            m[(i + n, j + n)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let cutoff = 1e-13 * scale;
    let mut cols: Vec<CVector> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let lam = eig.eigenvalues[k];
        if lam <= cutoff {
            break;
        }
        let v = eig.eigenvectors.column(k);
        cols.push(CVector::from_fn(n, |i, _| c(v[i], v[i + n])));
        s.push(lam);
    }
    let mut w = if cols.is_empty() {
        CMatrix::identity(n, n)
    } else {
        complete_orthonormal(&CMatrix::from_columns(&cols))
    };
    while s.len() < n {
        s.push(0.0);
    }
    w = polar_unitary(&w)?;
    Ok(TakagiResult { w, s })
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `[−1e−8, 0)` are clamped to zero.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    check_finite(a)?;
    if !a.is_square() {
        return Err(Error::InvalidInput("psd_sqrt needs a square matrix".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let herm_defect = (a - a.adjoint()).norm();
    if herm_defect > 1e-8 * scale_of(a) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (‖A − A*‖ = {herm_defect:.3e})"
        )));
    }
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::NotPsd(min));
    }
    let roots: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| c(l.max(0.0).sqrt(), 0.0))
        .collect();
    let q = &eig.eigenvectors;
    let b = q * diag(&roots) * q.adjoint();
    Ok((&b + b.adjoint()) * c(0.5, 0.0))
}

/// Hermitian eigendecomposition, eigenvalues sorted descending.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVector> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let vecs = if cols.is_empty() { CMatrix::zeros(0, 0) } else { CMatrix::from_columns(&cols) };
    (vals, vecs)
}

/// Nullspace of a stack of linear maps together with the singular values
/// of the stacked operator (ascending, padded with zeros when the stack has
/// fewer rows than columns).
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub basis: Vec<CVector>,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl Nullspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Smallest singular value rejected from the nullspace, if any.
    pub fn gap(&self) -> Option<f64> {
        self.singular_values.iter().cloned().find(|&s| s > self.threshold)
    }

    /// Largest singular value accepted into the nullspace, if any.
    pub fn largest_accepted(&self) -> Option<f64> {
        self.singular_values.iter().cloned().filter(|&s| s <= self.threshold).last()
    }
}

pub fn nullspace_of_stack(maps: &[CMatrix], threshold: f64) -> Result<Nullspace> {
    let n = match maps.first() {
        Some(m) => m.ncols(),
        None => return Err(Error::InvalidInput("no maps given".into())),
    };
    if maps.iter().any(|m| m.ncols() != n) {
        return Err(Error::InvalidInput("maps must share a column count".into()));
    }
    let rows: usize = maps.iter().map(|m| m.nrows()).sum();
    let mut stacked = CMatrix::zeros(rows.max(1), n);
    let mut r = 0;
    for m in maps {
        stacked.view_mut((r, 0), (m.nrows(), n)).copy_from(m);
        r += m.nrows();
    }
    // Only V is needed; a tall stack is first reduced to its square R factor,
    // which has the same singular values and right singular vectors.
    if stacked.nrows() > n {
        stacked = stacked.qr().r();
    }
    let d = svd(&stacked)?;
    let mut sv: Vec<f64> = (0..n).map(|i| d.s.get(i).cloned().unwrap_or(0.0)).collect();
    let basis = (0..n)
        .filter(|&i| sv[i] <= threshold)
        .map(|i| d.v.column(i).into_owned())
        .collect();
    sv.reverse();
    Ok(Nullspace { basis, singular_values: sv, threshold })
}

/// Orthonormal basis of `⋂ ker(M)` over the given maps: the right singular
/// vectors of the vertical stack whose singular values are ≤ `threshold`.
pub fn joint_nullspace(maps: &[CMatrix], threshold: f64) -> Result<Vec<CVector>> {
    Ok(nullspace_of_stack(maps, threshold)?.basis)
}

/// Eigenvalues of a general square complex matrix (Schur form).
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    check_finite(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::new(a.clone());
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Evaluates `Σ coeffs[k]·z^k` (ascending order) by Horner's rule.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

pub fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Monic polynomial with the given roots, ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .fold(vec![ONE], |acc, &r| poly_mul(&acc, &[-r, ONE]))
}

/// All roots of `Σ coeffs[k]·z^k` (ascending order), from the eigenvalues
/// of the companion matrix followed by a few Newton refinement steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let max = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= 1e-14 * max {
        end -= 1;
    }
    let p = &coeffs[..end];
    let deg = p.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let mut comp = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i] / lead;
    }
    let mut roots = eigenvalues(&comp)?;
    let dp = poly_derivative(p);
    for r in roots.iter_mut() {
        let mut best = poly_eval(p, *r).norm();
        for _ in 0..4 {
            let d = poly_eval(&dp, *r);
            if d.norm() == 0.0 {
                break;
            }
            let cand = *r - poly_eval(p, *r) / d;
            let val = poly_eval(p, cand).norm();
            if val < best {
                best = val;
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}
