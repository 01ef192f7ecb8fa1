//! Antilinear maps and conjugations in coordinates.
//!
//! An antilinear map is stored as a unitary `U` acting by `x ↦ U·x̄`. It is a
//! conjugation (involutive) exactly when `U` is also symmetric, and a square
//! matrix `T` is C-symmetric for `C = U∘conj` exactly when `T·U = U·Tᵀ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numlin::{
    c, conj, conj_vec, nullspace_of_stack, sandwich_operator, scale_of, symmetry_defect, takagi,
    transpose_operator, unitarity_defect, unvectorize, CMatrix, CVector,
};
use crate::search::find_unitary;
use crate::{Certificate, Verdict};

/// Residual tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Singular value threshold for the intertwiner nullspace.
pub const NULLSPACE_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    u: CMatrix,
}

impl AntilinearMap {
    pub fn new(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::InvalidInput("antilinear map needs a square matrix".into()));
        }
        let defect = unitarity_defect(&u);
        if defect > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "antilinear map is not isometric onto (‖U*U − I‖ = {defect:.3e})"
            )));
        }
        Ok(Self { u })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        if x.len() != self.u.ncols() {
            return Err(Error::InvalidInput(format!(
                "vector of length {} for a map on C^{}",
                x.len(),
                self.u.ncols()
            )));
        }
        Ok(&self.u * conj_vec(x))
    }
}

/// Conjugation `x ↦ U·x̄` with `U` symmetric unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation {
    map: AntilinearMap,
}

impl Conjugation {
    pub fn new(u: CMatrix) -> Result<Self> {
        let map = AntilinearMap::new(u)?;
        let asym = symmetry_defect(map.matrix());
        if asym > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "conjugation matrix is not symmetric (‖U − Uᵀ‖ = {asym:.3e})"
            )));
        }
        Ok(Self { map })
    }

    /// Entrywise complex conjugation on `Cⁿ`.
    pub fn plain(n: usize) -> Self {
        Self { map: AntilinearMap { u: CMatrix::identity(n, n) } }
    }

    pub fn matrix(&self) -> &CMatrix {
        self.map.matrix()
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        self.map.apply(x)
    }

    pub fn as_antilinear(&self) -> &AntilinearMap {
        &self.map
    }
}

/// True iff `U` is unitary and symmetric within `tol` (equivalently `C² = I`).
pub fn is_conjugation(map: &AntilinearMap, tol: f64) -> bool {
    map.matrix().is_square()
        && unitarity_defect(map.matrix()) <= tol
        && symmetry_defect(map.matrix()) <= tol
}

/// Orthonormal vectors fixed by `C`: the columns of the Takagi factor `W`
/// of `U = W·Wᵀ`, since then `U·w̄ₖ = W·Wᵀ·w̄ₖ = wₖ`.
pub fn c_real_basis(conj_op: &Conjugation) -> Result<Vec<CVector>> {
    let t = takagi(conj_op.matrix())?;
    Ok(t.w.column_iter().map(|col| col.into_owned()).collect())
}

/// `‖T·U − U·Tᵀ‖_F`, the coordinate form of `T = C·T*·C`.
pub fn c_symmetry_residual(t: &CMatrix, conj_op: &Conjugation) -> Result<f64> {
    if !t.is_square() || t.nrows() != conj_op.dim() {
        return Err(Error::InvalidInput(format!(
            "operator of shape {:?} against a conjugation on C^{}",
            t.shape(),
            conj_op.dim()
        )));
    }
    let u = conj_op.matrix();
    Ok((t * u - u * t.transpose()).norm())
}

/// Returns whether `T` is C-symmetric within `tol·max(1, ‖T‖)`, plus the
/// residual.
pub fn is_c_symmetric(t: &CMatrix, conj_op: &Conjugation, tol: f64) -> Result<(bool, f64)> {
    let r = c_symmetry_residual(t, conj_op)?;
    Ok((r <= tol * scale_of(t), r))
}

/// `‖T − C·T*·C‖_F = ‖T − U·Tᵀ·Ū‖_F`.
pub fn c_symmetry_defect(t: &CMatrix, conj_op: &Conjugation) -> f64 {
    let u = conj_op.matrix();
    (t - u * t.transpose() * conj(u)).norm()
}

/// Matrix `⟨T·eₙ, eₘ⟩` of `T` in a C-real orthonormal basis; symmetric when
/// `T` is C-symmetric.
pub fn matrix_in_c_real_basis(t: &CMatrix, conj_op: &Conjugation, tol: f64) -> Result<CMatrix> {
    let (ok, r) = is_c_symmetric(t, conj_op, tol)?;
    if !ok {
        return Err(Error::NotCSymmetric(r));
    }
    let basis = c_real_basis(conj_op)?;
    let w = CMatrix::from_columns(&basis);
    Ok(w.adjoint() * t * w)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugationSearch {
    pub verdict: Verdict,
    #[serde(skip)]
    pub conjugation: Option<Conjugation>,
    /// `‖T·U − U·Tᵀ‖_F` for the witness, or the best value reached.
    pub residual: f64,
    /// Dimension of `{X : T·X = X·Tᵀ}`.
    pub intertwiner_dim: usize,
    /// Dimension of the symmetric solutions that also intertwine `T*`.
    pub reduced_dim: usize,
    pub certificate: Option<Certificate>,
    pub used_fallback: bool,
}

/// Searches for a conjugation `C = U∘conj` with `T = C·T*·C`.
///
/// Any such `U` is a symmetric unitary with `T·U = U·Tᵀ` and, taking
/// adjoints, `T*·U = U·T̄`. The symmetric solutions of both equations are
/// computed as a joint nullspace, and a unitary element is then located by
/// [`find_unitary`]. When `T` is complex symmetric the solution space is a
/// unitary image of the commutant of `C*(T)`, so it is closed under polar
/// factors.
pub fn find_conjugation(t: &CMatrix, tol: f64) -> Result<ConjugationSearch> {
    find_conjugation_seeded(t, tol, 0x5eed)
}

pub fn find_conjugation_seeded(t: &CMatrix, tol: f64, seed: u64) -> Result<ConjugationSearch> {
    if !t.is_square() {
        return Err(Error::InvalidInput("find_conjugation needs a square matrix".into()));
    }
    let n = t.nrows();
    if n == 0 {
        return Ok(ConjugationSearch {
            verdict: Verdict::Symmetric,
            conjugation: Some(Conjugation::plain(0)),
            residual: 0.0,
            intertwiner_dim: 0,
            reduced_dim: 0,
            certificate: None,
            used_fallback: false,
        });
    }
    let scale = scale_of(t);
    let id = CMatrix::identity(n, n);
    let tt = t.transpose();
    let ts = t.adjoint();
    let intertwine = sandwich_operator(t, &id) - sandwich_operator(&id, &tt);
    let intertwine_adj = sandwich_operator(&ts, &id) - sandwich_operator(&id, &conj(t));
    let antisym = CMatrix::identity(n * n, n * n) - transpose_operator(n, n);
    let threshold = NULLSPACE_THRESHOLD * scale;
    let first = nullspace_of_stack(std::slice::from_ref(&intertwine), threshold)?;
    let reduced = nullspace_of_stack(&[intertwine, intertwine_adj, antisym], threshold)?;
    if symmetry_defect(t) <= tol {
        let plain = Conjugation::plain(n);
        let residual = c_symmetry_residual(t, &plain)?;
        return Ok(ConjugationSearch {
            verdict: Verdict::Symmetric,
            conjugation: Some(plain),
            residual,
            intertwiner_dim: first.dim(),
            reduced_dim: reduced.dim(),
            certificate: None,
            used_fallback: false,
        });
    }
    let basis: Vec<CMatrix> = reduced
        .basis
        .iter()
        .map(|v| {
            let x = unvectorize(v, n, n);
            (&x + x.transpose()) * c(0.5, 0.0)
        })
        .collect();
    let residual = |q: &CMatrix| {
        let r = (t * q - q * &tt).norm() / scale;
        r.max(symmetry_defect(q)).max(unitarity_defect(q))
    };
    let out = find_unitary(&basis, residual, tol, true, seed);
    let conjugation = match &out.witness {
        Some(q) => {
            let sym = (q + q.transpose()) * c(0.5, 0.0);
            Some(Conjugation::new(sym)?)
        }
        None => None,
    };
    let residual = match &conjugation {
        Some(cj) => c_symmetry_residual(t, cj)?,
        None => out.residual,
    };
    Ok(ConjugationSearch {
        verdict: out.verdict,
        conjugation,
        residual,
        intertwiner_dim: first.dim(),
        reduced_dim: reduced.dim(),
        certificate: out.certificate,
        used_fallback: out.used_fallback,
    })
}
