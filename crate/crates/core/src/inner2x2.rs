//! 2×2 inner functions with determinant `φ`.
//!
//! For a finite Blaschke product `φ` and `a, b ∈ K_{zφ}` with
//! `|a|² + |b|² = 1` on the circle,
//!
//! ```text
//! Θ = [ a    −b  ]
//!     [ C(b) C(a) ]
//! ```
//!
//! is inner with `det Θ = φ`, where `C(f) = f̄·φ`. `Θ` is symmetrizable (its
//! matrix is symmetric in some fixed pair of orthonormal bases) exactly when
//! `γa + θb` is a fixed point of `C` for some `(γ, θ) ≠ (0, 0)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{fejer_riesz, model_conjugation, FiniteBlaschke, ModelConjugation, ModelFunction};
use crate::error::{Error, Result};
use crate::grid::circle;
use crate::numlin::{c, poly_eval, svd, unitarity_defect, CMatrix, CVector, I, ZERO};

pub const BOUNDARY_POINTS: usize = 256;
const MEMBERSHIP_TOL: f64 = 1e-8;
const MODULUS_TOL: f64 = 1e-8;
const NULLSPACE_THRESHOLD: f64 = 1e-7;
const FIXED_POINT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct InnerPair {
    phi: FiniteBlaschke,
    conj: ModelConjugation,
    a: ModelFunction,
    b: ModelFunction,
}

#[derive(Serialize, Deserialize)]
pub struct InnerPairRepr {
    pub phi: FiniteBlaschke,
    #[serde(with = "crate::io::cvector")]
    pub a: CVector,
    #[serde(with = "crate::io::cvector")]
    pub b: CVector,
}

impl InnerPair {
    /// `a` and `b` are coefficient vectors in the Takenaka–Malmquist basis
    /// of `K_{zφ}` (origin first); extra entries describe components outside
    /// the space.
    pub fn new(phi: &FiniteBlaschke, a: CVector, b: CVector) -> Result<Self> {
        let conj = model_conjugation(phi)?;
        let a = conj.space().function(a)?;
        let b = conj.space().function(b)?;
        Ok(Self { phi: phi.clone(), conj, a, b })
    }

    /// Projects two functions onto `K_{zφ}` by quadrature.
    pub fn from_functions<F, G>(phi: &FiniteBlaschke, fa: F, fb: G) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
        G: Fn(Complex64) -> Complex64,
    {
        let conj = model_conjugation(phi)?;
        let (ca, _) = conj.space().project(fa);
        let (cb, _) = conj.space().project(fb);
        let a = conj.space().function(ca)?;
        let b = conj.space().function(cb)?;
        Ok(Self { phi: phi.clone(), conj, a, b })
    }

    pub fn from_repr(r: &InnerPairRepr) -> Result<Self> {
        Self::new(&r.phi, r.a.clone(), r.b.clone())
    }

    pub fn to_repr(&self) -> InnerPairRepr {
        InnerPairRepr { phi: self.phi().clone(), a: self.a.coeffs().clone(), b: self.b.coeffs().clone() }
    }

    pub fn phi(&self) -> &FiniteBlaschke {
        &self.phi
    }

    pub fn a(&self) -> &ModelFunction {
        &self.a
    }

    pub fn b(&self) -> &ModelFunction {
        &self.b
    }

    pub fn conjugation(&self) -> &ModelConjugation {
        &self.conj
    }
}

/// Evaluator for `Θ = [[a, −b], [C(b), C(a)]]`.
#[derive(Debug, Clone)]
pub struct ThetaFn {
    a: ModelFunction,
    b: ModelFunction,
    ca: ModelFunction,
    cb: ModelFunction,
}

impl ThetaFn {
    pub fn eval(&self, z: Complex64) -> CMatrix {
        let (a, b) = (self.a.eval(z), self.b.eval(z));
        let (ca, cb) = (self.ca.eval(z), self.cb.eval(z));
        CMatrix::from_row_slice(2, 2, &[a, -b, cb, ca])
    }
}

pub fn build_theta(pair: &InnerPair) -> Result<ThetaFn> {
    Ok(ThetaFn {
        a: pair.a.clone(),
        b: pair.b.clone(),
        ca: pair.conj.apply(&pair.a)?,
        cb: pair.conj.apply(&pair.b)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InnerReport {
    pub passed: bool,
    pub membership_a: f64,
    pub membership_b: f64,
    /// `max | |a|² + |b|² − 1 |` on the boundary grid and where it occurs.
    pub modulus_residual: f64,
    pub modulus_worst_angle: f64,
    /// `max ‖Θ*Θ − I‖_F` on the boundary grid.
    pub unitarity_residual: f64,
    pub violations: Vec<String>,
}

pub fn verify_inner(pair: &InnerPair) -> Result<InnerReport> {
    let membership_a = pair.a.membership_residual();
    let membership_b = pair.b.membership_residual();
    let theta = build_theta(pair)?;
    let mut modulus_residual: f64 = 0.0;
    let mut modulus_worst_angle = 0.0;
    let mut unitarity_residual: f64 = 0.0;
    for (k, z) in circle(1.0, BOUNDARY_POINTS).into_iter().enumerate() {
        let r = (pair.a.eval(z).norm_sqr() + pair.b.eval(z).norm_sqr() - 1.0).abs();
        if r > modulus_residual {
            modulus_residual = r;
            modulus_worst_angle = std::f64::consts::TAU * k as f64 / BOUNDARY_POINTS as f64;
        }
        unitarity_residual = unitarity_residual.max(unitarity_defect(&theta.eval(z)));
    }
    let mut violations = Vec::new();
    if membership_a > MEMBERSHIP_TOL {
        violations.push(format!("a is not in the model space (distance {membership_a:.3e})"));
    }
    if membership_b > MEMBERSHIP_TOL {
        violations.push(format!("b is not in the model space (distance {membership_b:.3e})"));
    }
    if modulus_residual > MODULUS_TOL {
        violations.push(format!(
            "|a|² + |b|² differs from 1 by {modulus_residual:.3e} at angle {modulus_worst_angle:.6}"
        ));
    }
    if unitarity_residual > MODULUS_TOL && violations.is_empty() {
        violations.push(format!("Θ is not unitary on the circle ({unitarity_residual:.3e})"));
    }
    Ok(InnerReport {
        passed: violations.is_empty(),
        membership_a,
        membership_b,
        modulus_residual,
        modulus_worst_angle,
        unitarity_residual,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizableReport {
    /// `(γ, θ)` with `C(γa + θb) = γa + θb`, if one exists.
    #[serde(with = "opt_pair")]
    pub witness: Option<(Complex64, Complex64)>,
    /// Best candidate: the direction of the smallest singular value.
    #[serde(with = "pair")]
    pub candidate: (Complex64, Complex64),
    pub smallest_singular_value: f64,
    /// `a` and `b` are linearly dependent, so `0` is a fixed point.
    pub dependent: bool,
    pub fixed_point_residual: f64,
}

mod pair {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(p: &(Complex64, Complex64), s: S) -> std::result::Result<S::Ok, S::Error> {
        [crate::io::complex_to_json(p.0), crate::io::complex_to_json(p.1)].serialize(s)
    }
}

mod opt_pair {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(
        p: &Option<(Complex64, Complex64)>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        p.map(|p| [crate::io::complex_to_json(p.0), crate::io::complex_to_json(p.1)]).serialize(s)
    }
}

/// Unit norm, and a sign making the first sizeable component have positive
/// real part (positive imaginary part if its real part vanishes). Only a real
/// sign is free: a complex phase would not preserve the fixed-point equation.
fn normalize_sign(g: Complex64, t: Complex64) -> (Complex64, Complex64) {
    let n = (g.norm_sqr() + t.norm_sqr()).sqrt();
    let (g, t) = (g / n, t / n);
    let lead = if g.norm() > 1e-12 { g } else { t };
    let flip = if lead.re.abs() > 1e-12 { lead.re < 0.0 } else { lead.im < 0.0 };
    if flip {
        (-g, -t)
    } else {
        (g, t)
    }
}

fn combination(pair: &InnerPair, g: Complex64, t: Complex64) -> CVector {
    pair.a.in_space() * g + pair.b.in_space() * t
}

/// Solves `γ̄·C(a) + θ̄·C(b) = γ·a + θ·b` over the reals.
pub fn symmetrizable_test(pair: &InnerPair) -> Result<SymmetrizableReport> {
    let a = pair.a.in_space();
    let b = pair.b.in_space();
    let n = a.len();
    let scale = a.norm().max(b.norm()).max(1.0);
    let ab = CMatrix::from_columns(&[a.clone(), b.clone()]);
    let d = svd(&ab)?;
    let s_min = d.s.get(1).cloned().unwrap_or(0.0);
    if s_min <= NULLSPACE_THRESHOLD * scale * 1e-3 {
        let v = d.v.column(1);
        let (g, t) = normalize_sign(v[0], v[1]);
        let res = pair.conj.fixed_point_residual(&combination(pair, g, t))?;
        return Ok(SymmetrizableReport {
            witness: Some((g, t)),
            candidate: (g, t),
            smallest_singular_value: s_min,
            dependent: true,
            fixed_point_residual: res,
        });
    }
    let ua = pair.conj.apply_coeffs(&a)?;
    let ub = pair.conj.apply_coeffs(&b)?;
    let cols = [&ua - &a, (&ua + &a) * -I, &ub - &b, (&ub + &b) * -I];
    let m = DMatrix::<f64>::from_fn(2 * n, 4, |r, k| {
        let z = cols[k][r % n];
        if r < n {
            z.re
        } else {
            z.im
        }
    });
    let dec = m.svd(false, true);
    let v_t = dec.v_t.ok_or_else(|| Error::NumericalDegeneracy("SVD failed".into()))?;
    let (k, &smin) = dec
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("four singular values");
    let x = v_t.row(k);
    let (g, t) = normalize_sign(c(x[0], x[1]), c(x[2], x[3]));
    let res = pair.conj.fixed_point_residual(&combination(pair, g, t))?;
    let found = smin <= NULLSPACE_THRESHOLD * scale;
    Ok(SymmetrizableReport {
        witness: found.then_some((g, t)),
        candidate: (g, t),
        smallest_singular_value: smin,
        dependent: false,
        fixed_point_residual: res,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Symmetrizer {
    #[serde(with = "crate::io::complex")]
    pub gamma: Complex64,
    #[serde(with = "crate::io::complex")]
    pub theta: Complex64,
    #[serde(with = "crate::io::matrix")]
    pub u1: CMatrix,
    #[serde(with = "crate::io::matrix")]
    pub u2: CMatrix,
    pub fixed_point_residual: f64,
}

impl Symmetrizer {
    /// `U₁·Θ(z)·U₂`.
    pub fn eval(&self, theta: &ThetaFn, z: Complex64) -> CMatrix {
        &self.u1 * theta.eval(z) * &self.u2
    }

    /// `max ‖M(z) − M(z)ᵀ‖_F` over the points.
    pub fn symmetry_residual(&self, theta: &ThetaFn, points: &[Complex64]) -> f64 {
        points
            .iter()
            .map(|&z| {
                let m = self.eval(theta, z);
                (&m - m.transpose()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `U₁ = diag(−i, i)`, `U₂ = [[θ̄, −γ], [γ̄, θ]]`; the off-diagonal entries of
/// `U₁ΘU₂` are `i(γa + θb)` and `i·C(γa + θb)`.
pub fn symmetrizer(pair: &InnerPair, gamma: Complex64, theta: Complex64) -> Result<Symmetrizer> {
    let n = (gamma.norm_sqr() + theta.norm_sqr()).sqrt();
    if !(n > 0.0) || (n - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!("|γ|² + |θ|² = {} is not 1", n * n)));
    }
    let res = pair.conj.fixed_point_residual(&combination(pair, gamma, theta))?;
    if res > FIXED_POINT_LIMIT {
        return Err(Error::FixedPointViolated(res));
    }
    Ok(Symmetrizer {
        gamma,
        theta,
        u1: CMatrix::from_row_slice(2, 2, &[-I, ZERO, ZERO, I]),
        u2: CMatrix::from_row_slice(2, 2, &[theta.conj(), -gamma, gamma.conj(), theta]),
        fixed_point_residual: res,
    })
}

#[derive(Debug, Clone)]
pub struct SymmetricInner {
    /// The pair `(a, −i·b)`, whose `Θ` is `[[a, ib], [ib, C(a)]]`.
    pub pair: InnerPair,
    pub b_is_inner: bool,
    pub report: InnerReport,
}

impl SymmetricInner {
    pub fn theta(&self) -> Result<ThetaFn> {
        build_theta(&self.pair)
    }
}

/// Completes a fixed point `b = C(b)` with `|b| ≤ 1` to a symmetric inner
/// function `[[a, ib], [ib, C(a)]]`.
///
/// If `b` is inner then `a = 0` (and `b² = φ`). Otherwise
/// `1 − |b|² = (|D|² − |N|²)/|D|²` with `b = N/D`, `D = ∏(1 − λ̄ᵢz)`; the
/// numerator is factored as `|q|²` and `a = q/D`, which lies in `K_{zφ}`.
pub fn build_symmetric_inner(phi: &FiniteBlaschke, b: CVector) -> Result<SymmetricInner> {
    let conj = model_conjugation(phi)?;
    let space = conj.space().clone();
    let b_fn = space.function(b.clone())?;
    let cb = conj.fixed_point_residual(&b_fn.in_space())?;
    if cb > 1e-8 {
        return Err(Error::CbNotB(cb));
    }
    let boundary = circle(1.0, BOUNDARY_POINTS);
    let inner = boundary.iter().all(|&z| (b_fn.eval(z).norm() - 1.0).abs() <= MODULUS_TOL);
    let minus_ib = b_fn.in_space() * -I;
    let pair = if inner {
        let spread = boundary
            .iter()
            .map(|&z| b_fn.eval(z).powi(2) / phi.value(z))
            .collect::<Vec<_>>();
        let dev = spread.iter().map(|r| (r - spread[0]).norm()).fold(0.0, f64::max);
        if dev > 1e-8 {
            return Err(Error::FactorizationFailed(format!("b is inner but b²/φ varies by {dev:.3e}")));
        }
        InnerPair::new(phi, CVector::zeros(space.dim()), minus_ib)?
    } else {
        let den = phi.denominator();
        // b·D is a polynomial with at most dim K_{zφ} coefficients.
        let len = space.dim();
        let m = 64.max(4 * len);
        let nodes = circle(1.0, m);
        let num: Vec<Complex64> = (0..len)
            .map(|k| {
                nodes
                    .iter()
                    .map(|&z| b_fn.eval(z) * poly_eval(&den, z) * z.powu(k as u32).conj())
                    .fold(ZERO, |s, x| s + x)
                    / m as f64
            })
            .collect();
        let autocorr = |p: &[Complex64], k: usize| -> Complex64 {
            (0..p.len().saturating_sub(k)).fold(ZERO, |s, j| s + p[j + k] * p[j].conj())
        };
        let trig: Vec<Complex64> = (0..len).map(|k| autocorr(&den, k) - autocorr(&num, k)).collect();
        let q = fejer_riesz(&trig)?;
        let (a, _) = space.project(|z| poly_eval(&q, z) / poly_eval(&den, z));
        InnerPair::new(phi, a, minus_ib)?
    };
    let report = verify_inner(&pair)?;
    if !report.passed {
        return Err(Error::FactorizationFailed(report.violations.join("; ")));
    }
    Ok(SymmetricInner { pair, b_is_inner: inner, report })
}

/// Fixed point `s·Σ cᵢ fᵢ` from real weights on the C-real basis of
/// `K_{zφ}`, scaled so that `max |b| = s` on the boundary.
pub fn scaled_fixed_point(phi: &FiniteBlaschke, weights: &[f64], s: f64) -> Result<CVector> {
    let conj = model_conjugation(phi)?;
    let basis = crate::blaschke::fixed_points(conj.conjugation())?;
    if weights.len() != basis.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights for a fixed-point basis of size {}",
            weights.len(),
            basis.len()
        )));
    }
    let v = basis.iter().zip(weights).fold(CVector::zeros(basis[0].len()), |acc, (f, &w)| acc + f * c(w, 0.0));
    let f = conj.space().function(v.clone())?;
    let peak = circle(1.0, BOUNDARY_POINTS).into_iter().map(|z| f.eval(z).norm()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InvalidInput("zero fixed point".into()));
    }
    Ok(v * c(s / peak, 0.0))
}

/// The pair `(α, β·u)` over `φ = u·v`; its `Θ` is
/// `[[α, −βu], [β̄v, ᾱuv]]`.
pub fn family_pair(u: &FiniteBlaschke, v: &FiniteBlaschke, alpha: Complex64, beta: Complex64) -> Result<InnerPair> {
    let phi = u.product(v);
    let u = u.clone();
    InnerPair::from_functions(&phi, move |_| alpha, move |z| beta * u.value(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{symmetry_defect, ONE};
    use crate::random::{random_in_disk, random_unimodular, rng_from_seed};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn z_squared_pair(alpha: Complex64, beta: Complex64) -> InnerPair {
        // K_{z³} has the monomial basis 1, z, z².
        let a = CVector::from_vec(vec![alpha, ZERO, ZERO]);
        let b = CVector::from_vec(vec![ZERO, beta, ZERO]);
        InnerPair::new(&FiniteBlaschke::monomial(2), a, b).unwrap()
    }

    #[test]
    fn theta_of_constant_and_linear_pair() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let th = build_theta(&z_squared_pair(alpha, beta)).unwrap();
        let z = c(0.3, -0.4);
        let want = CMatrix::from_row_slice(2, 2, &[alpha, -beta * z, beta.conj() * z, alpha.conj() * z * z]);
        assert!((th.eval(z) - want).norm() < 1e-12);
        for w in circle(0.8, 64) {
            let m = th.eval(w);
            assert!(close(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)], w * w, 1e-12));
        }
    }

    #[test]
    fn inner_alone_gives_diagonal() {
        // a = z (inner, in K_{z³}), b = 0 over φ = z².
        let a = CVector::from_vec(vec![ZERO, ONE, ZERO]);
        let pair = InnerPair::new(&FiniteBlaschke::monomial(2), a, CVector::zeros(3)).unwrap();
        let th = build_theta(&pair).unwrap();
        let z = c(0.2, 0.5);
        let m = th.eval(z);
        assert!(close(m[(0, 0)], z, 1e-12) && close(m[(1, 1)], z, 1e-12));
        assert!(m[(0, 1)].norm() < 1e-12 && m[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn verify_examples() {
        let ok = verify_inner(&z_squared_pair(c(0.6, 0.0), c(0.8, 0.0))).unwrap();
        assert!(ok.passed, "{:?}", ok.violations);
        let big = verify_inner(&z_squared_pair(c(0.6, 0.0), c(0.9, 0.0))).unwrap();
        assert!(!big.passed && big.modulus_residual > 0.1);
        // a = z³ lies outside K_{z³}: extended coefficient index 3.
        let a = CVector::from_vec(vec![ZERO, ZERO, ZERO, ONE]);
        let pair = InnerPair::new(&FiniteBlaschke::monomial(2), a, CVector::zeros(3)).unwrap();
        let r = verify_inner(&pair).unwrap();
        assert!(!r.passed && r.membership_a > 0.5);
    }

    #[test]
    fn symmetrizable_examples() {
        let beta = c(0.48, 0.64);
        let pair = z_squared_pair(c(0.6, 0.0), beta);
        let r = symmetrizable_test(&pair).unwrap();
        let (g, t) = r.witness.unwrap();
        assert!(g.norm() < 1e-8);
        assert!((t.norm() - 1.0).abs() < 1e-10 && (t * beta).im.abs() < 1e-8);
        assert!(r.fixed_point_residual < 1e-8);
        let s = symmetrizer(&pair, g, t).unwrap();
        let th = build_theta(&pair).unwrap();
        let z = c(0.1, 0.6);
        let m = s.eval(&th, z);
        let off = I * (g * c(0.6, 0.0) + t * beta * z);
        assert!(close(m[(0, 1)], off, 1e-10) && close(m[(1, 0)], off, 1e-10));
        assert!(s.symmetry_residual(&th, &circle(0.7, 24)) < 1e-10);
        assert!(unitarity_defect(&s.u1) < 1e-12 && unitarity_defect(&s.u2) < 1e-12);
    }

    #[test]
    fn dependent_pair_short_circuits() {
        let a = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.0), ZERO]);
        let b = &a * c(0.0, 1.0);
        let pair = InnerPair::new(&FiniteBlaschke::monomial(2), a, b).unwrap();
        let r = symmetrizable_test(&pair).unwrap();
        assert!(r.dependent && r.witness.is_some() && r.fixed_point_residual < 1e-12);
    }

    #[test]
    fn unrelated_family_pair_is_not_symmetrizable() {
        let u = FiniteBlaschke::monomial(2);
        let v = FiniteBlaschke::new(vec![ZERO, c(0.5, 0.0)], ONE).unwrap();
        let pair = family_pair(&u, &v, c(0.6, 0.0), c(0.8, 0.0)).unwrap();
        assert!(verify_inner(&pair).unwrap().passed);
        let r = symmetrizable_test(&pair).unwrap();
        assert!(r.witness.is_none());
        let (g, t) = r.candidate;
        assert!(matches!(symmetrizer(&pair, g, t), Err(Error::FixedPointViolated(_))));
    }

    #[test]
    fn related_family_pair_is_symmetrizable() {
        let mut rng = rng_from_seed(4);
        let u = FiniteBlaschke::new(vec![random_in_disk(&mut rng, 0.7), random_in_disk(&mut rng, 0.7)], ONE).unwrap();
        let v = crate::blaschke::compose_elementary(random_unimodular(&mut rng), random_in_disk(&mut rng, 0.6), &u).unwrap();
        let pair = family_pair(&u, &v, c(0.8, 0.0), c(0.6, 0.0)).unwrap();
        let r = symmetrizable_test(&pair).unwrap();
        let (g, t) = r.witness.unwrap();
        let s = symmetrizer(&pair, g, t).unwrap();
        let th = build_theta(&pair).unwrap();
        assert!(s.symmetry_residual(&th, &circle(0.7, 24)) < 1e-10);
    }

    #[test]
    fn symmetric_inner_from_inner_b() {
        // φ = z²: b = z is a fixed point of C on K_{z³} and b² = φ.
        let b = CVector::from_vec(vec![ZERO, ONE, ZERO]);
        let s = build_symmetric_inner(&FiniteBlaschke::monomial(2), b).unwrap();
        assert!(s.b_is_inner);
        let th = s.theta().unwrap();
        let z = c(0.3, 0.3);
        let m = th.eval(z);
        assert!(m[(0, 0)].norm() < 1e-12 && close(m[(0, 1)], I * z, 1e-12));
        assert!(symmetry_defect(&m) < 1e-12);
    }

    #[test]
    fn symmetric_inner_from_scaled_z() {
        let s_val = 0.6;
        let b = CVector::from_vec(vec![ZERO, c(s_val, 0.0), ZERO]);
        let s = build_symmetric_inner(&FiniteBlaschke::monomial(2), b).unwrap();
        assert!(!s.b_is_inner && s.report.passed);
        let a0 = s.pair.a().eval(ZERO);
        assert!((a0.norm() - (1.0 - s_val * s_val).sqrt()).abs() < 1e-10);
        for z in circle(0.7, 16) {
            assert!(symmetry_defect(&s.theta().unwrap().eval(z)) < 1e-10);
        }
        assert!(symmetrizable_test(&s.pair).unwrap().witness.is_some());
    }

    #[test]
    fn symmetric_inner_zero_b_and_errors() {
        let phi = FiniteBlaschke::new(vec![c(0.3, 0.1)], ONE).unwrap();
        let s = build_symmetric_inner(&phi, CVector::zeros(2)).unwrap();
        assert!(s.report.passed);
        let bad = CVector::from_vec(vec![ONE, ZERO]);
        let dim2 = build_symmetric_inner(&FiniteBlaschke::monomial(1), bad);
        assert!(matches!(dim2, Err(Error::CbNotB(_))));
    }

    #[test]
    fn symmetric_inner_random_fixed_points() {
        let mut rng = rng_from_seed(17);
        for _ in 0..5 {
            let zeros = (0..3).map(|_| random_in_disk(&mut rng, 0.7)).collect();
            let phi = FiniteBlaschke::new(zeros, random_unimodular(&mut rng)).unwrap();
            let w: Vec<f64> = (0..4).map(|k| 0.3 + 0.2 * k as f64).collect();
            let b = scaled_fixed_point(&phi, &w, 0.7).unwrap();
            let s = build_symmetric_inner(&phi, b).unwrap();
            assert!(s.report.passed);
            let r = symmetrizable_test(&s.pair).unwrap();
            assert!(r.witness.is_some());
        }
    }
}
