//! Upper triangular contractions built from two compressed shifts,
//!
//! ```text
//! T = [ T_u  X   ]      X = D_{T_u*}·Y·D_{T_v},
//!     [ 0    T_v ]
//! ```
//!
//! where `Y: 𝒟_{T_v} → 𝒟_{T_u*}` is a scalar of modulus at most 1 between the
//! one-dimensional defect spaces. `T` is complex symmetric exactly when
//! `Y = 0`, `|Y| = 1`, or `v = μ·b_λ(u)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::{compressed_shift, detect_mobius_relation, model_conjugation, FiniteBlaschke, MobiusRelation};
use crate::charfun::{classify, coincide, Classification, Contraction};
use crate::error::{Error, Result};
use crate::grid::disk_grid;
use crate::numlin::{c, CMatrix, ONE, ZERO};
use crate::random::{random_in_disk, random_unimodular};
use crate::Verdict;

const Y_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct FamilySpec {
    pub u: FiniteBlaschke,
    pub v: FiniteBlaschke,
    pub y: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    u: FiniteBlaschke,
    v: FiniteBlaschke,
    #[serde(rename = "Y", with = "crate::io::complex")]
    y: Complex64,
}

impl TryFrom<SpecRepr> for FamilySpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        FamilySpec::new(r.u, r.v, r.y)
    }
}

impl From<FamilySpec> for SpecRepr {
    fn from(s: FamilySpec) -> Self {
        SpecRepr { u: s.u, v: s.v, y: s.y }
    }
}

impl FamilySpec {
    pub fn new(u: FiniteBlaschke, v: FiniteBlaschke, y: Complex64) -> Result<Self> {
        if u.degree() == 0 || v.degree() == 0 {
            return Err(Error::InvalidInput("u and v must be nonconstant".into()));
        }
        if !(y.norm() <= 1.0 + Y_TOL) {
            return Err(Error::InvalidInput(format!("|Y| = {} exceeds 1", y.norm())));
        }
        let y = if y.norm() > 1.0 { y / y.norm() } else { y };
        Ok(Self { u, v, y })
    }
}

pub fn build_t(spec: &FamilySpec) -> Result<Contraction> {
    let tu = compressed_shift(&spec.u)?;
    let tv = compressed_shift(&spec.v)?;
    let (n, m) = (tu.dim(), tv.dim());
    // e spans 𝒟_{T_v} and e_* spans 𝒟_{T_u*}; Y acts as Y·e_*e^*.
    let e = tv.defect().basis_t.clone();
    let e_star = tu.defect().basis_t_star.clone();
    if e.ncols() != 1 || e_star.ncols() != 1 {
        return Err(Error::NumericalDegeneracy("compressed shift without a one-dimensional defect".into()));
    }
    // Both defect operators have rank one, D = δ·ee*. Using that form keeps
    // the √ε noise of the computed D off the defect range out of X.
    let delta_star = (e_star.adjoint() * &tu.defect().dt_star * &e_star)[(0, 0)];
    let delta = (e.adjoint() * &tv.defect().dt * &e)[(0, 0)];
    let x = &e_star * e.adjoint() * (spec.y * delta_star * delta);
    let mut t = CMatrix::zeros(n + m, n + m);
    t.view_mut((0, 0), (n, n)).copy_from(tu.matrix());
    t.view_mut((0, n), (n, m)).copy_from(&x);
    t.view_mut((n, n), (m, m)).copy_from(tv.matrix());
    Contraction::new(t)
}

pub fn expected_defects(spec: &FamilySpec) -> (usize, usize) {
    if (spec.y.norm() - 1.0).abs() <= Y_TOL {
        (1, 1)
    } else {
        (2, 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FamilyCase {
    Zero,
    Unimodular,
    Mobius {
        #[serde(with = "crate::io::complex")]
        mu: Complex64,
        #[serde(with = "crate::io::complex")]
        lambda: Complex64,
    },
    NotSymmetric,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyClassification {
    #[serde(flatten)]
    pub case: FamilyCase,
    pub symmetric: bool,
    pub expected_defects: (usize, usize),
    pub mobius: Option<MobiusRelation>,
}

pub fn classify_family(spec: &FamilySpec) -> FamilyClassification {
    let mobius = detect_mobius_relation(&spec.u, &spec.v);
    let r = spec.y.norm();
    let case = if r <= Y_TOL {
        FamilyCase::Zero
    } else if (r - 1.0).abs() <= Y_TOL {
        FamilyCase::Unimodular
    } else if let Some(m) = mobius {
        FamilyCase::Mobius { mu: m.mu, lambda: m.lambda }
    } else {
        FamilyCase::NotSymmetric
    };
    FamilyClassification {
        symmetric: case != FamilyCase::NotSymmetric,
        case,
        expected_defects: expected_defects(spec),
        mobius,
    }
}

/// `[[α, −β·f], [β̄·g, ᾱ·f·g]] = diag(1, g)·[[α, −β], [β̄, ᾱ]]·diag(1, f)`.
pub fn theta_alpha_beta(alpha: Complex64, beta: Complex64, f: Complex64, g: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[alpha, -beta * f, beta.conj() * g, alpha.conj() * f * g])
}

fn factored(alpha: Complex64, beta: Complex64, f: Complex64, g: Complex64) -> CMatrix {
    let w = CMatrix::from_row_slice(2, 2, &[alpha, -beta, beta.conj(), alpha.conj()]);
    let left = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, g]);
    let right = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, f]);
    left * w * right
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaProduct {
    #[serde(with = "crate::io::complex")]
    pub alpha: Complex64,
    #[serde(with = "crate::io::complex")]
    pub beta: Complex64,
    /// `| |α|² + |β|² − 1 |`.
    pub norm_residual: f64,
    /// Root-mean-square misfit of the Frobenius-norm fit for `|α|²`.
    pub fit_residual: f64,
    /// `max_z ‖Θ_T(z) − U_*·Θ_{α,β}(z)·U‖_F`.
    pub coincidence_residual: f64,
    /// Largest deviation of `Θ_{α,β}` from its factored form.
    pub factorization_residual: f64,
    /// `false`: `Θ_{α,β} = [[α, −βu], [β̄v, ᾱuv]]`; `true`: `u` and `v`
    /// exchanged.
    pub swapped: bool,
    #[serde(with = "crate::io::opt_matrix")]
    pub u: Option<CMatrix>,
    #[serde(with = "crate::io::opt_matrix")]
    pub u_star: Option<CMatrix>,
}

/// Fits `Θ_T` to `Θ_{α,β}` for `0 < |Y| < 1`.
///
/// `‖Θ(z)‖_F` is invariant under coincidence, and for `Θ_{α,β}`
/// `‖Θ‖_F² − |u|² − |v|² = |α|²(1 − |u|²)(1 − |v|²)`, so `|α|²` is a linear
/// least-squares fit over the grid. The phases of `α` and `β` can be absorbed
/// into the coincidence unitaries, so both are taken real and positive.
pub fn theta_product_check(spec: &FamilySpec, grid: &[Complex64], seed: u64) -> Result<ThetaProduct> {
    let r = spec.y.norm();
    if r <= Y_TOL || (r - 1.0).abs() <= Y_TOL {
        return Err(Error::InvalidInput("the two-parameter form needs 0 < |Y| < 1".into()));
    }
    let t = build_t(spec)?;
    let samples = t.samples(grid)?.values;
    if samples.iter().any(|m| m.shape() != (2, 2)) {
        return Err(Error::CoincidenceFailed("Θ_T is not 2×2 on the grid".into()));
    }
    let uv: Vec<(Complex64, Complex64)> = grid.iter().map(|&z| (spec.u.value(z), spec.v.value(z))).collect();
    let (mut num, mut den) = (0.0, 0.0);
    let rows: Vec<(f64, f64)> = samples
        .iter()
        .zip(&uv)
        .map(|(m, (u, v))| {
            let f = m.norm_squared() - u.norm_sqr() - v.norm_sqr();
            let g = (1.0 - u.norm_sqr()) * (1.0 - v.norm_sqr());
            (f, g)
        })
        .collect();
    for &(f, g) in &rows {
        num += f * g;
        den += g * g;
    }
    let a2 = (num / den).clamp(0.0, 1.0);
    let fit_residual = (rows.iter().map(|&(f, g)| (f - a2 * g).powi(2)).sum::<f64>() / rows.len() as f64).sqrt();
    let alpha = c(a2.sqrt(), 0.0);
    let beta = c((1.0 - a2).sqrt(), 0.0);
    if alpha.norm() <= 1e-12 || beta.norm() <= 1e-12 {
        return Err(Error::CoincidenceFailed(format!("degenerate fit |α|² = {a2}")));
    }
    let norm_residual = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
    let mut best: Option<ThetaProduct> = None;
    for swapped in [false, true] {
        let model: Vec<CMatrix> = uv
            .iter()
            .map(|&(u, v)| if swapped { theta_alpha_beta(alpha, beta, v, u) } else { theta_alpha_beta(alpha, beta, u, v) })
            .collect();
        let factorization_residual = uv
            .iter()
            .zip(&model)
            .map(|(&(u, v), m)| {
                let (f, g) = if swapped { (v, u) } else { (u, v) };
                (m - factored(alpha, beta, f, g)).norm()
            })
            .fold(0.0, f64::max);
        let co = coincide(&samples, &model, 1e-6, seed)?;
        let report = ThetaProduct {
            alpha,
            beta,
            norm_residual,
            fit_residual,
            coincidence_residual: co.residual,
            factorization_residual,
            swapped,
            u: co.u,
            u_star: co.u_star,
        };
        if co.found {
            return Ok(report);
        }
        if best.as_ref().is_none_or(|b| report.coincidence_residual < b.coincidence_residual) {
            best = Some(report);
        }
    }
    let best = best.expect("two orientations tried");
    Err(Error::CoincidenceFailed(format!(
        "best coincidence residual {:.3e} with |α|² = {a2:.6}",
        best.coincidence_residual
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub symbolic: FamilyClassification,
    pub numeric: Classification,
    /// Definite numeric verdict matching the symbolic one.
    pub agreement: bool,
    pub indeterminate: bool,
}

pub fn cross_validate(spec: &FamilySpec, grid_size: usize, tol: f64, seed: u64) -> Result<CrossValidation> {
    let symbolic = classify_family(spec);
    let t = build_t(spec)?;
    let grid = disk_grid(grid_size, t.dim(), seed)?;
    let numeric = classify(&t, &grid, tol, seed)?;
    let indeterminate = numeric.verdict == Verdict::Indeterminate;
    let expected = if symbolic.symmetric { Verdict::Symmetric } else { Verdict::NotSymmetric };
    Ok(CrossValidation { agreement: numeric.verdict == expected, indeterminate, symbolic, numeric })
}

#[derive(Debug, Clone, Serialize)]
pub struct PointFixe {
    #[serde(with = "crate::io::complex")]
    pub zeta: Complex64,
    #[serde(with = "crate::io::complex")]
    pub s: Complex64,
    #[serde(with = "crate::io::complex")]
    pub t: Complex64,
    /// Coefficients of `g = s + t·u` in `K_{z·uv}`.
    #[serde(with = "crate::io::cvector")]
    pub g: crate::CVector,
    pub membership_residual: f64,
    pub fixed_point_residual: f64,
}

/// For `v = μ·b_λ(u)` with `μ = −ζ/ζ̄`, `g = −λζ + ζ·u` satisfies
/// `v·(s̄u + t̄) = s + tu`, i.e. it is fixed by `f ↦ f̄·uv` on `K_{z·uv}`.
pub fn point_fixe_bridge(spec: &FamilySpec) -> Result<PointFixe> {
    let rel = detect_mobius_relation(&spec.u, &spec.v)
        .ok_or_else(|| Error::InvalidInput("u and v are not related by a disk automorphism".into()))?;
    let zeta = (-rel.mu).sqrt();
    let (s, t) = (-rel.lambda * zeta, zeta);
    if !(s.norm() < t.norm()) {
        return Err(Error::FixedPointViolated(s.norm() - t.norm()));
    }
    let mc = model_conjugation(&spec.u.product(&spec.v))?;
    let u = spec.u.clone();
    let (g, membership_residual) = mc.space().project(|z| s + t * u.value(z));
    let fixed_point_residual = mc.fixed_point_residual(&g)?;
    if fixed_point_residual > 1e-8 || membership_residual > 1e-8 {
        return Err(Error::FixedPointViolated(fixed_point_residual.max(membership_residual)));
    }
    Ok(PointFixe { zeta, s, t, g, membership_residual, fixed_point_residual })
}

/// Branches of the seeded corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Zero,
    Unimodular,
    Mobius,
    Unrelated,
}

pub const BRANCHES: [Branch; 4] = [Branch::Zero, Branch::Unimodular, Branch::Mobius, Branch::Unrelated];
const ZERO_RADIUS: f64 = 0.8;
const INTERIOR_MODULI: [f64; 3] = [0.3, 0.7, 0.95];

pub fn random_blaschke<R: Rng>(rng: &mut R, degree: usize) -> FiniteBlaschke {
    let zeros = (0..degree).map(|_| random_in_disk(rng, ZERO_RADIUS)).collect();
    FiniteBlaschke::new(zeros, random_unimodular(rng)).expect("zeros drawn inside the disk")
}

/// A random specification for one branch. Degrees are at most 4; the
/// unrelated branch avoids the degree-one case, where any two products are
/// related.
pub fn random_spec<R: Rng>(rng: &mut R, branch: Branch) -> FamilySpec {
    let interior_y = |rng: &mut R| {
        let r = INTERIOR_MODULI[rng.random_range(0..INTERIOR_MODULI.len())];
        random_unimodular(rng) * r
    };
    let (u, v, y) = match branch {
        Branch::Zero => {
            let (du, dv) = (rng.random_range(1..=4), rng.random_range(1..=4));
            (random_blaschke(rng, du), random_blaschke(rng, dv), ZERO)
        }
        Branch::Unimodular => {
            let (du, dv) = (rng.random_range(1..=4), rng.random_range(1..=4));
            (random_blaschke(rng, du), random_blaschke(rng, dv), random_unimodular(rng))
        }
        Branch::Mobius => loop {
            let du = rng.random_range(1..=4);
            let u = random_blaschke(rng, du);
            let mu = random_unimodular(rng);
            let lambda = random_in_disk(rng, 0.7);
            if let Ok(v) = crate::blaschke::compose_elementary(mu, lambda, &u) {
                if v.zeros().iter().all(|z| z.norm() < 0.95) {
                    break (u, v, interior_y(rng));
                }
            }
        },
        Branch::Unrelated => loop {
            let (du, dv) = (rng.random_range(1..=4), rng.random_range(1..=4));
            if du == 1 && dv == 1 {
                continue;
            }
            let (u, v) = (random_blaschke(rng, du), random_blaschke(rng, dv));
            if detect_mobius_relation(&u, &v).is_none() {
                break (u, v, interior_y(rng));
            }
        },
    };
    FamilySpec::new(u, v, y).expect("valid by construction")
}
