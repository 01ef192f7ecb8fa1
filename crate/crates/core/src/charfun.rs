//! Contractions, defect data and the characteristic function
//!
//! ```text
//! Θ_T(z) = [−T + z·D_{T*}(I − zT*)⁻¹D_T] restricted to 𝒟_T → 𝒟_{T*}
//! ```
//!
//! together with the detectors built on it.
//!
//! `T` is C-symmetric for some conjugation exactly when there is an
//! antiunitary `J: 𝒟_T → 𝒟_{T*}` with `Θ_T(z) = J·Θ_T(z)*·J`. Writing
//! `Jx = U·x̄` in the defect bases, this reads `Θ(z)·Uᵀ = (Θ(z)·Uᵀ)ᵀ`, which is
//! linear in `V = Uᵀ`. Any unitary solution also satisfies
//! `Θ(w)*Θ(z)·V = V·(Θ(z)Θ(w)*)ᵀ`; adding these equations makes the solution
//! space closed under polar factors, so [`detect_j`] decides the question from
//! one generic element of it.

use num_complex::Complex64;
use serde::Serialize;

use crate::conjugation::{find_conjugation_seeded, AntilinearMap, ConjugationSearch};
use crate::error::{Error, Result};
use crate::grid::{check_in_disk, circle};
use crate::numlin::{
    c, norm2, nullspace_of_stack, sandwich_operator, scale_of, singular_values, spectral_radius,
    svd, transpose_operator, unitarity_defect, unvectorize, CMatrix, CVector, RANK_TOL, ZERO,
};
use crate::search::find_unitary;
use crate::{Certificate, Verdict};

/// Norms in `(1, 1 + CLAMP]` are rescaled to 1.
pub const CLAMP: f64 = 1e-10;
/// Singular values of `D_T` closer than this share a canonical basis block.
const CLUSTER_TOL: f64 = 1e-6;
const NULLSPACE_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct DefectData {
    #[serde(with = "crate::io::matrix")]
    pub dt: CMatrix,
    #[serde(with = "crate::io::matrix")]
    pub dt_star: CMatrix,
    /// Orthonormal basis of `range D_T` (columns).
    #[serde(skip)]
    pub basis_t: CMatrix,
    /// Orthonormal basis of `range D_{T*}` (columns).
    #[serde(skip)]
    pub basis_t_star: CMatrix,
    pub d_t: usize,
    pub d_t_star: usize,
}

#[derive(Debug, Clone)]
pub struct Contraction {
    t: CMatrix,
    defect: DefectData,
}

impl Contraction {
    pub fn new(t: CMatrix) -> Result<Self> {
        if !t.is_square() || t.nrows() == 0 {
            return Err(Error::InvalidInput(format!("contraction must be square, got {:?}", t.shape())));
        }
        if !crate::numlin::is_finite(&t) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let s = norm2(&t);
        if s > 1.0 + CLAMP {
            return Err(Error::NotAContraction(s));
        }
        let t = if s > 1.0 { t / c(s, 0.0) } else { t };
        let defect = defect_data(&t)?;
        Ok(Self { t, defect })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn defect(&self) -> &DefectData {
        &self.defect
    }

    /// `Θ_T(z)` in the canonical defect bases.
    pub fn char_eval(&self, z: Complex64) -> Result<CMatrix> {
        check_in_disk(z)?;
        let d = &self.defect;
        if d.d_t == 0 || d.d_t_star == 0 {
            return Err(Error::NoDefect);
        }
        let n = self.dim();
        let ts = self.t.adjoint();
        let resolvent = CMatrix::identity(n, n) - ts * z;
        let rhs = &d.dt * &d.basis_t;
        let solved = resolvent
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NumericalDegeneracy(format!("I − zT* is singular at {z}")))?;
        let inner = -&self.t * &d.basis_t + (&d.dt_star * solved) * z;
        Ok(d.basis_t_star.adjoint() * inner)
    }

    pub fn samples(&self, points: &[Complex64]) -> Result<CharSamples> {
        let values = points.iter().map(|&z| self.char_eval(z)).collect::<Result<Vec<_>>>()?;
        Ok(CharSamples { points: points.to_vec(), values })
    }
}

/// Canonical orthonormal basis for the span of the columns of `q`: one
/// Gram–Schmidt pass over `P·e_i` for the projector `P = Q·Q*`, then the
/// first sizeable coordinate of each vector made real positive.
fn canonical_block(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let k = q.ncols();
    let p = q * q.adjoint();
    let mut out: Vec<CVector> = Vec::with_capacity(k);
    for i in 0..n {
        if out.len() == k {
            break;
        }
        let mut v = p.column(i).into_owned();
        for b in &out {
            let coef = b.dotc(&v);
            v -= b * coef;
        }
        let nv = v.norm();
        if nv > 1e-6 {
            out.push(v / c(nv, 0.0));
        }
    }
    for v in out.iter_mut() {
        if let Some(first) = v.iter().find(|x| x.norm() > 1e-10).copied() {
            *v *= first.conj() / first.norm();
        }
    }
    CMatrix::from_columns(&out)
}

fn canonical_basis(vectors: &CMatrix, weights: &[f64]) -> CMatrix {
    let n = vectors.nrows();
    let mut blocks: Vec<CMatrix> = Vec::new();
    let mut start = 0;
    while start < weights.len() {
        let mut end = start + 1;
        while end < weights.len() && (weights[end - 1] - weights[end]).abs() <= CLUSTER_TOL {
            end += 1;
        }
        blocks.push(canonical_block(&vectors.columns(start, end - start).into_owned()));
        start = end;
    }
    let cols: Vec<CVector> = blocks.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned())).collect();
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// `D_T` and `D_{T*}` from one SVD `T = W·Σ·V*`: `D_T = V·√(1 − Σ²)·V*` and
/// `D_{T*} = W·√(1 − Σ²)·W*`, with `1 − σ²` formed as `(1 − σ)(1 + σ)`.
///
/// A direction counts as defect when `1 − σ² > RANK_TOL`. Rounding in `σ`
/// puts spurious values of `√(1 − σ²)` near `1e−8`, so the rank is read off
/// `D_T²` rather than `D_T`.
fn defect_data(t: &CMatrix) -> Result<DefectData> {
    let n = t.nrows();
    let d = svd(t)?;
    let sq: Vec<f64> = d.s.iter().map(|&s| ((1.0 - s) * (1.0 + s)).max(0.0)).collect();
    let root: Vec<f64> = sq.iter().map(|x| x.sqrt()).collect();
    let build = |basis: &CMatrix| {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            let col = basis.column(i);
            m += col * col.adjoint() * c(root[i], 0.0);
        }
        m
    };
    let dt = build(&d.v);
    let dt_star = build(&d.u);
    // Defect directions ordered by descending D_T singular value.
    let mut idx: Vec<usize> = (0..n).filter(|&i| sq[i] > RANK_TOL).collect();
    idx.sort_by(|&i, &j| root[j].total_cmp(&root[i]));
    let weights: Vec<f64> = idx.iter().map(|&i| root[i]).collect();
    let pick = |m: &CMatrix| {
        if idx.is_empty() {
            CMatrix::zeros(n, 0)
        } else {
            CMatrix::from_columns(&idx.iter().map(|&i| m.column(i).into_owned()).collect::<Vec<_>>())
        }
    };
    let basis_t = canonical_basis(&pick(&d.v), &weights);
    let basis_t_star = canonical_basis(&pick(&d.u), &weights);
    Ok(DefectData {
        dt,
        dt_star,
        d_t: basis_t.ncols(),
        d_t_star: basis_t_star.ncols(),
        basis_t,
        basis_t_star,
    })
}

pub fn defect(t: &Contraction) -> &DefectData {
    t.defect()
}

pub fn char_eval(t: &Contraction, z: Complex64) -> Result<CMatrix> {
    t.char_eval(z)
}

#[derive(Debug, Clone, Serialize)]
pub struct CharSamples {
    #[serde(with = "crate::io::complex_vec")]
    pub points: Vec<Complex64>,
    #[serde(serialize_with = "crate::io::matrix_vec::serialize")]
    pub values: Vec<CMatrix>,
}

/// `‖Θ(0)‖ < 1 − 1e−8`.
pub fn is_pure_at_origin(theta0: &CMatrix) -> bool {
    theta0.is_empty() || norm2(theta0) < 1.0 - RANK_TOL
}

pub const INNER_RADII: [f64; 3] = [0.9, 0.99, 0.999];
pub const INNER_ANGLES: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct InnerCheck {
    pub inner: bool,
    /// `(r, max_θ ‖Θ(re^{iθ})*Θ(re^{iθ}) − I‖)` for each radius.
    pub defects: Vec<(f64, f64)>,
}

/// Samples `‖Θ*Θ − I‖` on circles approaching the boundary. `Θ` counts as
/// inner when the defect on the outermost circle is within `tol`, or has
/// dropped by at least a factor ten from the innermost one (the defect of an
/// inner function decays like `1 − r`).
pub fn is_inner_sampled<F>(eval: F, radii: &[f64], angles: usize, tol: f64) -> Result<InnerCheck>
where
    F: Fn(Complex64) -> Result<CMatrix>,
{
    let mut defects = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst: f64 = 0.0;
        for z in circle(r, angles) {
            let th = eval(z)?;
            let g = th.adjoint() * &th - CMatrix::identity(th.ncols(), th.ncols());
            worst = worst.max(norm2(&g));
        }
        defects.push((r, worst));
    }
    let inner = match (defects.first(), defects.last()) {
        (Some(&(_, first)), Some(&(_, last))) => last <= tol || (last < first && last <= 0.1 * first),
        _ => false,
    };
    Ok(InnerCheck { inner, defects })
}

#[derive(Debug, Clone, Serialize)]
pub struct CnuSplit {
    /// Orthogonal projection onto the largest reducing subspace on which `T`
    /// is unitary.
    #[serde(with = "crate::io::matrix")]
    pub projection: CMatrix,
    pub unitary_dim: usize,
    pub cnu: bool,
}

/// `H_u = ⋂_k ker(D_T·Tᵏ) ∩ ker(D_{T*}·T*ᵏ)`, `k < n`, using `D_T²` for the
/// kernels.
pub fn cnu_unitary_split(t: &Contraction) -> Result<CnuSplit> {
    let n = t.dim();
    let id = CMatrix::identity(n, n);
    let a = t.matrix();
    let dt2 = &id - a.adjoint() * a;
    let dts2 = &id - a * a.adjoint();
    let mut maps = Vec::with_capacity(2 * n);
    let mut pk = id.clone();
    let mut qk = id.clone();
    for _ in 0..n {
        maps.push(&dt2 * &pk);
        maps.push(&dts2 * &qk);
        pk = a * pk;
        qk = a.adjoint() * qk;
    }
    let ns = nullspace_of_stack(&maps, RANK_TOL)?;
    let mut projection = CMatrix::zeros(n, n);
    for v in &ns.basis {
        projection += v * v.adjoint();
    }
    Ok(CnuSplit { projection, unitary_dim: ns.dim(), cnu: ns.dim() == 0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct C00Check {
    pub c00: bool,
    pub spectral_radius: f64,
    /// Power `N = ⌈log tol / log ρ⌉` and `‖T^N‖`, when `0 < ρ < 1`.
    pub power: Option<usize>,
    pub power_norm: Option<f64>,
}

/// In finite dimensions `Tⁿ → 0` iff the spectral radius is below 1.
pub fn c00_check(t: &Contraction, tol: f64) -> Result<C00Check> {
    let rho = spectral_radius(t.matrix())?;
    let c00 = rho < 1.0 - CLAMP;
    let power = if c00 && tol > 0.0 && tol < 1.0 {
        let n = if rho < 1e-300 { t.dim() } else { (tol.ln() / rho.ln()).ceil().max(1.0) as usize };
        Some(n.clamp(1, 100_000))
    } else {
        None
    };
    let power_norm = power.map(|n| norm2(&matrix_power(t.matrix(), n)));
    Ok(C00Check { c00, spectral_radius: rho, power, power_norm })
}

fn matrix_power(a: &CMatrix, mut n: usize) -> CMatrix {
    let mut out = CMatrix::identity(a.nrows(), a.ncols());
    let mut base = a.clone();
    while n > 0 {
        if n & 1 == 1 {
            out = &out * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct JSearch {
    pub verdict: Verdict,
    #[serde(skip)]
    pub j: Option<AntilinearMap>,
    /// `max_z ‖Θ(z)Uᵀ − (Θ(z)Uᵀ)ᵀ‖_F` for the witness, else the best value.
    pub residual: f64,
    pub certificate: Option<Certificate>,
    pub d_t: usize,
    pub d_t_star: usize,
    /// Dimension of the linear constraint space searched.
    pub constraint_dim: usize,
    pub grid_size: usize,
    pub used_fallback: bool,
}

impl JSearch {
    /// `Θ′(z) = U*·Θ(z)`, symmetric whenever `J` was found.
    pub fn symmetrized(&self, theta: &CMatrix) -> Option<CMatrix> {
        self.j.as_ref().map(|j| j.matrix().adjoint() * theta)
    }
}

fn grid_symmetry_residual(values: &[CMatrix], v: &CMatrix) -> f64 {
    values
        .iter()
        .map(|th| {
            let m = th * v;
            (&m - m.transpose()).norm()
        })
        .fold(0.0, f64::max)
}

/// Searches for `J` with `Θ(z) = J·Θ(z)*·J` on the grid.
pub fn detect_j(t: &Contraction, grid: &[Complex64], tol: f64, seed: u64) -> Result<JSearch> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let d = t.defect();
    let mut out = JSearch {
        verdict: Verdict::Indeterminate,
        j: None,
        residual: f64::INFINITY,
        certificate: None,
        d_t: d.d_t,
        d_t_star: d.d_t_star,
        constraint_dim: 0,
        grid_size: grid.len(),
        used_fallback: false,
    };
    if d.d_t != d.d_t_star {
        out.verdict = Verdict::NotSymmetric;
        out.certificate = Some(Certificate::DefectMismatch);
        return Ok(out);
    }
    let k = d.d_t;
    if k == 0 {
        // T is unitary, hence normal; the condition on Θ is vacuous.
        out.verdict = Verdict::Symmetric;
        out.j = Some(AntilinearMap::new(CMatrix::zeros(0, 0))?);
        out.residual = 0.0;
        return Ok(out);
    }
    let values = grid.iter().map(|&z| t.char_eval(z)).collect::<Result<Vec<_>>>()?;
    let id = CMatrix::identity(k, k);
    let plain = grid_symmetry_residual(&values, &id);
    if plain <= tol {
        out.verdict = Verdict::Symmetric;
        out.residual = plain;
        out.j = Some(AntilinearMap::new(id)?);
        return Ok(out);
    }
    let flip = transpose_operator(k, k);
    let mut maps: Vec<CMatrix> = Vec::with_capacity(3 * values.len());
    for th in &values {
        let left = sandwich_operator(th, &id);
        maps.push(&left - &flip * &left);
    }
    let anchor = values
        .iter()
        .map(|th| singular_values(th).last().cloned().unwrap_or(0.0))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let w0 = &values[anchor];
    for th in &values {
        for (a, b) in [(w0, th), (th, w0)] {
            let lhs = a.adjoint() * b;
            let rhs = (b * a.adjoint()).transpose();
            maps.push(sandwich_operator(&lhs, &id) - sandwich_operator(&id, &rhs));
        }
    }
    let scale = values.iter().map(scale_of).fold(1.0, f64::max);
    let ns = nullspace_of_stack(&maps, NULLSPACE_THRESHOLD * scale)?;
    out.constraint_dim = ns.dim();
    let basis: Vec<CMatrix> = ns.basis.iter().map(|v| unvectorize(v, k, k)).collect();
    let residual = |q: &CMatrix| grid_symmetry_residual(&values, q).max(unitarity_defect(q));
    let found = find_unitary(&basis, residual, tol, true, seed);
    out.verdict = found.verdict;
    out.certificate = found.certificate;
    out.used_fallback = found.used_fallback;
    out.residual = found.residual;
    if let Some(v) = found.witness {
        out.residual = grid_symmetry_residual(&values, &v);
        out.j = Some(AntilinearMap::new(v.transpose())?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Coincidence {
    pub found: bool,
    /// `Θ(z) = U_*·Θ′(z)·U` on the grid.
    #[serde(with = "crate::io::opt_matrix")]
    pub u: Option<CMatrix>,
    #[serde(with = "crate::io::opt_matrix")]
    pub u_star: Option<CMatrix>,
    /// `max_z ‖Θ(z) − U_*Θ′(z)U‖_F`, or the best value reached.
    pub residual: f64,
    pub constraint_dim: usize,
}

/// Looks for unitaries `U`, `U_*` with `Θ(z) = U_*·Θ′(z)·U` at every sample.
///
/// Unknowns are `A = U*` and `B = U_*` with `Θ(z)A = BΘ′(z)`, plus the
/// consequences `Θ(w)*Θ(z)A = AΘ′(w)*Θ′(z)` and
/// `Θ(z)Θ(w)*B = BΘ′(z)Θ′(w)*`; the pair is searched as the block diagonal
/// matrix `diag(A, B)`.
pub fn coincide(theta: &[CMatrix], theta_prime: &[CMatrix], tol: f64, seed: u64) -> Result<Coincidence> {
    if theta.is_empty() || theta.len() != theta_prime.len() {
        return Err(Error::InvalidInput("sample lists must be nonempty and of equal length".into()));
    }
    let (p, q) = theta[0].shape();
    if theta.iter().chain(theta_prime).any(|m| m.shape() != (p, q)) {
        return Err(Error::InvalidInput("sampled values have incompatible shapes".into()));
    }
    let iq = CMatrix::identity(q, q);
    let ip = CMatrix::identity(p, p);
    let (na, nb) = (q * q, p * p);
    let block = |rows: usize, a: Option<CMatrix>, b: Option<CMatrix>| {
        let mut m = CMatrix::zeros(rows, na + nb);
        if let Some(a) = a {
            m.view_mut((0, 0), (rows, na)).copy_from(&a);
        }
        if let Some(b) = b {
            m.view_mut((0, na), (rows, nb)).copy_from(&b);
        }
        m
    };
    let mut maps = Vec::new();
    for (th, tp) in theta.iter().zip(theta_prime) {
        maps.push(block(
            p * q,
            Some(sandwich_operator(th, &iq)),
            Some(-sandwich_operator(&ip, tp)),
        ));
    }
    let anchor = theta
        .iter()
        .map(|th| singular_values(th).last().cloned().unwrap_or(0.0))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (w, wp) = (&theta[anchor], &theta_prime[anchor]);
    for (th, tp) in theta.iter().zip(theta_prime) {
        for ((a, ap), (b, bp)) in [((w, wp), (th, tp)), ((th, tp), (w, wp))] {
            let right = sandwich_operator(&(a.adjoint() * b), &iq) - sandwich_operator(&iq, &(ap.adjoint() * bp));
            maps.push(block(q * q, Some(right), None));
            let left = sandwich_operator(&(b * a.adjoint()), &ip) - sandwich_operator(&ip, &(bp * ap.adjoint()));
            maps.push(block(p * p, None, Some(left)));
        }
    }
    let scale = theta.iter().chain(theta_prime).map(scale_of).fold(1.0, f64::max);
    let ns = nullspace_of_stack(&maps, NULLSPACE_THRESHOLD * scale)?;
    let split = |x: &CMatrix| (x.view((0, 0), (q, q)).into_owned(), x.view((q, q), (p, p)).into_owned());
    let basis: Vec<CMatrix> = ns
        .basis
        .iter()
        .map(|v| {
            let a = unvectorize(&v.rows(0, na).into_owned(), q, q);
            let b = unvectorize(&v.rows(na, nb).into_owned(), p, p);
            let mut x = CMatrix::zeros(p + q, p + q);
            x.view_mut((0, 0), (q, q)).copy_from(&a);
            x.view_mut((q, q), (p, p)).copy_from(&b);
            x
        })
        .collect();
    let mismatch = |a: &CMatrix, b: &CMatrix| {
        theta
            .iter()
            .zip(theta_prime)
            .map(|(th, tp)| (th - b * tp * a.adjoint()).norm())
            .fold(0.0, f64::max)
    };
    let residual = |x: &CMatrix| {
        let (a, b) = split(x);
        mismatch(&a, &b).max(unitarity_defect(x))
    };
    let found = find_unitary(&basis, residual, tol, true, seed);
    let mut out = Coincidence {
        found: false,
        u: None,
        u_star: None,
        residual: found.residual,
        constraint_dim: ns.dim(),
    };
    if let Some(x) = found.witness {
        let (a, b) = split(&x);
        out.residual = mismatch(&a, &b);
        out.found = true;
        out.u = Some(a.adjoint());
        out.u_star = Some(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    /// Combined verdict: agreement, or the definite one of the two.
    pub verdict: Verdict,
    pub disagreement: bool,
    pub verdict_i: Verdict,
    pub verdict_ii: Verdict,
    pub residual_i: f64,
    pub residual_ii: f64,
    pub certificate_i: Option<Certificate>,
    pub certificate_ii: Option<Certificate>,
    pub intertwiner_dim: usize,
    pub constraint_dim_ii: usize,
    pub d_t: usize,
    pub d_t_star: usize,
    pub cnu: bool,
    pub c00: bool,
    pub spectral_radius: f64,
    /// `U` of the conjugation `x ↦ U·x̄` found by the direct search.
    #[serde(with = "crate::io::opt_matrix")]
    pub witness_i: Option<CMatrix>,
    /// `U` of the antiunitary `J` on the defect spaces.
    #[serde(with = "crate::io::opt_matrix")]
    pub witness_ii: Option<CMatrix>,
    #[serde(skip)]
    pub search_i: Option<ConjugationSearch>,
    #[serde(skip)]
    pub search_ii: Option<JSearch>,
}

/// Runs the direct conjugation search and the characteristic-function
/// detector on `T` and merges their verdicts.
pub fn classify(t: &Contraction, grid: &[Complex64], tol: f64, seed: u64) -> Result<Classification> {
    let first = find_conjugation_seeded(t.matrix(), tol, seed)?;
    let second = detect_j(t, grid, tol, seed)?;
    let split = cnu_unitary_split(t)?;
    let c00 = c00_check(t, tol)?;
    let disagreement = first.verdict.contradicts(second.verdict);
    let verdict = if disagreement {
        Verdict::Indeterminate
    } else if first.verdict == Verdict::Indeterminate {
        second.verdict
    } else {
        first.verdict
    };
    Ok(Classification {
        verdict,
        disagreement,
        verdict_i: first.verdict,
        verdict_ii: second.verdict,
        residual_i: first.residual,
        residual_ii: second.residual,
        certificate_i: first.certificate,
        certificate_ii: second.certificate,
        intertwiner_dim: first.intertwiner_dim,
        constraint_dim_ii: second.constraint_dim,
        d_t: t.defect().d_t,
        d_t_star: t.defect().d_t_star,
        cnu: split.cnu,
        c00: c00.c00,
        spectral_radius: c00.spectral_radius,
        witness_i: first.conjugation.as_ref().map(|cj| cj.matrix().clone()),
        witness_ii: second.j.as_ref().map(|j| j.matrix().clone()),
        search_i: Some(first),
        search_ii: Some(second),
    })
}

/// Largest `σ_max(Θ(z)) − 1` over the samples, clamped below at zero.
pub fn contraction_excess(values: &[CMatrix]) -> f64 {
    values.iter().map(|m| (norm2(m) - 1.0).max(0.0)).fold(0.0, f64::max)
}

/// Scalar samples `Θ(z)` divided by `f(z)`: spread of the ratio around its
/// mean and deviation of its modulus from 1.
pub fn scalar_ratio_spread(values: &[Complex64], reference: &[Complex64]) -> (Complex64, f64, f64) {
    let ratios: Vec<Complex64> = values.iter().zip(reference).map(|(a, b)| a / b).collect();
    let mean = ratios.iter().fold(ZERO, |s, r| s + r) / ratios.len().max(1) as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
    let modulus = ratios.iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max);
    (mean, spread, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::{compressed_shift, FiniteBlaschke};
    use crate::grid::disk_grid;
    use crate::numlin::{diag, from_real_rows, symmetry_defect, ONE};
    use crate::random::{random_contraction, random_unitary, rng_from_seed};

    fn grid(n: usize) -> Vec<Complex64> {
        disk_grid(24, n, 1).unwrap()
    }

    #[test]
    fn clamping() {
        let t = from_real_rows(1, 1, &[1.0 + 5e-11]);
        assert!((norm2(Contraction::new(t).unwrap().matrix()) - 1.0).abs() < 1e-15);
        let t = from_real_rows(1, 1, &[1.001]);
        assert!(matches!(Contraction::new(t), Err(Error::NotAContraction(_))));
    }

    #[test]
    fn defect_examples() {
        let z = Contraction::new(CMatrix::zeros(3, 3)).unwrap();
        assert_eq!((z.defect().d_t, z.defect().d_t_star), (3, 3));
        assert!((&z.defect().dt - CMatrix::identity(3, 3)).norm() < 1e-15);
        let mut rng = rng_from_seed(1);
        let u = Contraction::new(random_unitary(&mut rng, 3)).unwrap();
        assert_eq!(u.defect().d_t, 0);
        assert!(u.defect().dt.norm() < 1e-7);
        let d = Contraction::new(from_real_rows(2, 2, &[0.6, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(d.defect().d_t, 1);
        let b = d.defect().basis_t.column(0).into_owned();
        assert!((b[0] - ONE).norm() < 1e-12);
    }

    #[test]
    fn defect_square_identity() {
        let mut rng = rng_from_seed(2);
        for n in 1..6 {
            let t = random_contraction(&mut rng, n, 0.97);
            let c = Contraction::new(t.clone()).unwrap();
            let id = CMatrix::identity(n, n);
            let dt = &c.defect().dt;
            assert!((dt * dt - (&id - t.adjoint() * &t)).norm() < 1e-9);
            let dts = &c.defect().dt_star;
            assert!((dts * dts - (&id - &t * t.adjoint())).norm() < 1e-9);
        }
    }

    #[test]
    fn char_eval_examples() {
        let z = Contraction::new(CMatrix::zeros(2, 2)).unwrap();
        let w = c(0.3, 0.2);
        assert!((z.char_eval(w).unwrap() - CMatrix::identity(2, 2) * w).norm() < 1e-15);
        let t = random_contraction(&mut rng_from_seed(3), 3, 0.8);
        let ct = Contraction::new(t.clone()).unwrap();
        let d = ct.defect();
        let th0 = ct.char_eval(ZERO).unwrap();
        assert!((th0 + d.basis_t_star.adjoint() * &t * &d.basis_t).norm() < 1e-13);
        assert!(matches!(ct.char_eval(c(1.0, 0.0)), Err(Error::OutOfDisk(_))));
        let mut rng = rng_from_seed(4);
        let u = Contraction::new(random_unitary(&mut rng, 2)).unwrap();
        assert!(matches!(u.char_eval(ZERO), Err(Error::NoDefect)));
    }

    #[test]
    fn jordan_block_is_z_squared() {
        let j = Contraction::new(from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        let g = grid(2);
        let vals: Vec<Complex64> = g.iter().map(|&z| j.char_eval(z).unwrap()[(0, 0)]).collect();
        for (v, z) in vals.iter().zip(&g) {
            assert!((v.norm() - z.norm_sqr()).abs() < 1e-12);
        }
        let a: Vec<CMatrix> = vals.iter().map(|v| CMatrix::from_element(1, 1, *v)).collect();
        let b: Vec<CMatrix> = g.iter().map(|z| CMatrix::from_element(1, 1, z * z)).collect();
        let co = coincide(&a, &b, 1e-8, 1).unwrap();
        assert!(co.found && co.residual < 1e-10);
    }

    #[test]
    fn values_are_contractions_and_analytic() {
        let mut rng = rng_from_seed(5);
        for n in 2..6 {
            let t = Contraction::new(random_contraction(&mut rng, n, 0.99)).unwrap();
            let pts: Vec<Complex64> = circle(0.999, 64).into_iter().chain(grid(n)).collect();
            let vals = t.samples(&pts).unwrap().values;
            assert!(contraction_excess(&vals) <= 1e-8);
            let h = 1e-4;
            for &z in &grid(n)[..8] {
                let dx = (t.char_eval(z + h).unwrap() - t.char_eval(z - h).unwrap()) / c(2.0 * h, 0.0);
                let dy = (t.char_eval(z + c(0.0, h)).unwrap() - t.char_eval(z - c(0.0, h)).unwrap())
                    / c(2.0 * h, 0.0);
                // ∂/∂z̄ = (∂x + i∂y)/2
                let dbar = (dx + dy * c(0.0, 1.0)) / c(2.0, 0.0);
                assert!(dbar.norm() < 1e-6);
            }
        }
    }

    #[test]
    fn purity_examples() {
        assert!(is_pure_at_origin(&CMatrix::zeros(2, 2)));
        assert!(!is_pure_at_origin(&diag(&[ONE, c(0.2, 0.0)])));
        let t = Contraction::new(diag(&[c(0.5, 0.0), c(0.3, 0.0)])).unwrap();
        assert!(is_pure_at_origin(&t.char_eval(ZERO).unwrap()));
    }

    #[test]
    fn innerness_examples() {
        let id = |z: Complex64| Ok(CMatrix::identity(2, 2) * z);
        let r = is_inner_sampled(id, &INNER_RADII, INNER_ANGLES, 1e-8).unwrap();
        assert!(r.inner);
        assert!((r.defects[0].1 - (1.0 - 0.81)).abs() < 1e-12);
        let half = |_z: Complex64| Ok(CMatrix::from_element(1, 1, c(0.5, 0.0)));
        assert!(!is_inner_sampled(half, &INNER_RADII, INNER_ANGLES, 1e-8).unwrap().inner);
        let phi = FiniteBlaschke::new(vec![c(0.2, 0.1), c(-0.4, 0.0), c(0.0, 0.5)], ONE).unwrap();
        let t = compressed_shift(&phi).unwrap();
        assert!(is_inner_sampled(|z| t.char_eval(z), &INNER_RADII, INNER_ANGLES, 1e-8).unwrap().inner);
    }

    #[test]
    fn cnu_examples() {
        let mut rng = rng_from_seed(6);
        let u = Contraction::new(random_unitary(&mut rng, 3)).unwrap();
        let s = cnu_unitary_split(&u).unwrap();
        assert_eq!(s.unitary_dim, 3);
        let t = Contraction::new(random_contraction(&mut rng, 3, 0.9)).unwrap();
        assert!(cnu_unitary_split(&t).unwrap().cnu);
        let d = Contraction::new(diag(&[ONE, c(0.5, 0.0)])).unwrap();
        let s = cnu_unitary_split(&d).unwrap();
        assert_eq!(s.unitary_dim, 1);
        assert!((s.projection - diag(&[ONE, ZERO])).norm() < 1e-10);
    }

    #[test]
    fn c00_examples() {
        let j = Contraction::new(from_real_rows(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        let r = c00_check(&j, 1e-8).unwrap();
        assert!(r.c00 && r.power_norm.unwrap() < 1e-8);
        let e = Contraction::new(diag(&[ONE, c(0.3, 0.0)])).unwrap();
        assert!(!c00_check(&e, 1e-8).unwrap().c00);
    }

    #[test]
    fn detect_j_examples() {
        let phi = FiniteBlaschke::new(vec![c(0.3, 0.2)], ONE).unwrap();
        let t = compressed_shift(&phi).unwrap();
        let r = detect_j(&t, &grid(1), 1e-8, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Symmetric);
        let sym = crate::numlin::from_rows(2, 2, &[c(0.1, 0.2), c(0.3, -0.1), c(0.3, -0.1), c(-0.4, 0.0)]);
        let t = Contraction::new(sym).unwrap();
        let r = detect_j(&t, &grid(2), 1e-8, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Symmetric);
        assert!((r.j.as_ref().unwrap().matrix() - CMatrix::identity(2, 2)).norm() < 1e-12);
        for z in grid(2) {
            let th = t.char_eval(z).unwrap();
            assert!(symmetry_defect(&r.symmetrized(&th).unwrap()) < 1e-8);
        }
        assert!(detect_j(&t, &[], 1e-8, 1).is_err());
    }

    #[test]
    fn classify_examples() {
        let mut rng = rng_from_seed(7);
        for _ in 0..10 {
            let t = Contraction::new(random_contraction(&mut rng, 2, 0.95)).unwrap();
            let r = classify(&t, &grid(2), 1e-8, 1).unwrap();
            assert_eq!((r.verdict_i, r.verdict_ii), (Verdict::Symmetric, Verdict::Symmetric));
        }
        let t = Contraction::new(random_contraction(&mut rng, 4, 0.9)).unwrap();
        let r = classify(&t, &grid(4), 1e-8, 1).unwrap();
        assert!(!r.disagreement);
        assert_eq!(r.verdict, Verdict::NotSymmetric);
    }

    #[test]
    fn coincide_examples() {
        let mut rng = rng_from_seed(8);
        let t = Contraction::new(random_contraction(&mut rng, 3, 0.9)).unwrap();
        let g = grid(3);
        let a = t.samples(&g).unwrap().values;
        let co = coincide(&a, &a, 1e-8, 1).unwrap();
        assert!(co.found && co.residual < 1e-8);
        let mu = Complex64::from_polar(1.0, 0.7);
        let phi = FiniteBlaschke::new(vec![c(0.1, 0.4), c(-0.3, 0.0)], ONE).unwrap();
        let s = compressed_shift(&phi).unwrap();
        let th = s.samples(&g).unwrap().values;
        let rotated: Vec<CMatrix> = th.iter().map(|m| m * mu).collect();
        let co = coincide(&th, &rotated, 1e-8, 1).unwrap();
        assert!(co.found);
        let prod = co.u.unwrap()[(0, 0)] * co.u_star.unwrap()[(0, 0)];
        assert!((prod - mu.conj()).norm() < 1e-8);
    }
}
