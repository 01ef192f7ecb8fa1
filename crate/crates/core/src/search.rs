//! Locating a unitary element inside a linear space of matrices.
//!
//! Every detector in the crate reduces to the same question: given an
//! orthonormal basis of a constraint space `S` (the nullspace of a stacked
//! linear map), does `S` contain a unitary matrix? The constraint spaces are
//! built so that, whenever a unitary solution exists, `S` is the image of a
//! finite-dimensional C*-algebra under a fixed unitary change of frame. Then
//! the polar factor of any invertible element of `S` lies in `S` again, so a
//! generic element settles the question. Projected alternation between `S`
//! and the unitary group is kept as a fallback for badly conditioned cases.

use serde::Serialize;

use crate::numlin::{condition_number, polar_unitary, singular_values, CMatrix};
use crate::random::{gaussian_complex, random_unitary, rng_from_seed};
use crate::{Certificate, Verdict};

const PROBES: usize = 4;
const FALLBACK_STARTS: usize = 16;
const FALLBACK_ITERS: usize = 200;
/// Elements better conditioned than this give a reliable polar factor.
const WELL_CONDITIONED: f64 = 1e6;
/// A polar residual above this is a clear obstruction, not rounding noise.
const OBSTRUCTION_MARGIN: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    #[serde(skip)]
    pub witness: Option<CMatrix>,
    /// Residual of the witness, or the best residual reached.
    pub residual: f64,
    pub certificate: Option<Certificate>,
    pub dim: usize,
    pub used_fallback: bool,
}

/// Orthogonal projection (Frobenius) onto the span of an orthonormal basis.
fn project(basis: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for b in basis {
        let coef = b.dotc(x);
        out += b * coef;
    }
    out
}

/// Looks for a unitary matrix in `span(basis)` whose `residual` is at most
/// `tol`. `polar_closed` states that the space is closed under polar factors
/// whenever it contains a unitary, which licenses the polar obstruction
/// certificate.
pub fn find_unitary<F>(
    basis: &[CMatrix],
    residual: F,
    tol: f64,
    polar_closed: bool,
    seed: u64,
) -> SearchOutcome
where
    F: Fn(&CMatrix) -> f64,
{
    let dim = basis.len();
    if dim == 0 {
        return SearchOutcome {
            verdict: Verdict::NotSymmetric,
            witness: None,
            residual: f64::INFINITY,
            certificate: Some(Certificate::EmptyNullspace),
            dim,
            used_fallback: false,
        };
    }
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(f64, CMatrix)> = None;
    let mut obstruction = false;
    let probes = if dim == 1 { 1 } else { PROBES };
    for _ in 0..probes {
        let x = if dim == 1 {
            basis[0].clone()
        } else {
            let mut x = CMatrix::zeros(basis[0].nrows(), basis[0].ncols());
            for b in basis {
                x += b * gaussian_complex(&mut rng);
            }
            x
        };
        let cond = condition_number(&x);
        if dim == 1 {
            let s = singular_values(&x);
            let spread = (s[0] - s[s.len() - 1]) / s[0];
            if spread > 1e-6 {
                return SearchOutcome {
                    verdict: Verdict::NotSymmetric,
                    witness: None,
                    residual: spread,
                    certificate: Some(Certificate::NoUnitaryDirection),
                    dim,
                    used_fallback: false,
                };
            }
        }
        let Ok(q) = polar_unitary(&x) else { continue };
        let r = residual(&q);
        if r <= tol {
            return SearchOutcome {
                verdict: Verdict::Symmetric,
                witness: Some(q),
                residual: r,
                certificate: None,
                dim,
                used_fallback: false,
            };
        }
        if cond < WELL_CONDITIONED && r > OBSTRUCTION_MARGIN {
            obstruction = true;
        }
        if best.as_ref().is_none_or(|(br, _)| r < *br) {
            best = Some((r, q));
        }
    }
    if polar_closed && obstruction {
        return SearchOutcome {
            verdict: Verdict::NotSymmetric,
            witness: None,
            residual: best.map(|b| b.0).unwrap_or(f64::INFINITY),
            certificate: Some(Certificate::PolarObstruction),
            dim,
            used_fallback: false,
        };
    }
    let n = basis[0].nrows();
    for _ in 0..FALLBACK_STARTS {
        let mut q = random_unitary(&mut rng, n);
        if q.ncols() != basis[0].ncols() {
            break;
        }
        for _ in 0..FALLBACK_ITERS {
            let p = project(basis, &q);
            match polar_unitary(&p) {
                Ok(next) => q = next,
                Err(_) => break,
            }
        }
        let r = residual(&q);
        if r <= tol {
            return SearchOutcome {
                verdict: Verdict::Symmetric,
                witness: Some(q),
                residual: r,
                certificate: None,
                dim,
                used_fallback: true,
            };
        }
        if best.as_ref().is_none_or(|(br, _)| r < *br) {
            best = Some((r, q));
        }
    }
    SearchOutcome {
        verdict: Verdict::Indeterminate,
        witness: None,
        residual: best.map(|b| b.0).unwrap_or(f64::INFINITY),
        certificate: None,
        dim,
        used_fallback: true,
    }
}
