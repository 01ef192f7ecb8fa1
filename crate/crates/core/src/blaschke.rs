//! Finite Blaschke products and their model spaces.
//!
//! A product is stored as `const·∏ (z − λᵢ)/(1 − λ̄ᵢz)`. The elementary factor
//! `b_λ(z) = (λ − z)/(1 − λ̄z)` is the one-zero product with constant `−1`.
//!
//! Model spaces `K_φ = H² ⊖ φH²` are represented in the Takenaka–Malmquist
//! basis
//!
//! ```text
//! e_k(z) = √(1 − |λ_k|²)/(1 − λ̄_k z) · ∏_{j<k} (z − λ_j)/(1 − λ̄_j z)
//! ```
//!
//! built from the zeros of `φ` in input order. Inner products are computed by
//! the trapezoid rule on the unit circle, which is exponentially accurate for
//! these rational integrands.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfun::Contraction;
use crate::conjugation::{c_real_basis, Conjugation};
use crate::error::{Error, Result};
use crate::grid::circle;
use crate::numlin::{c, conj_vec, poly_eval, poly_from_roots, poly_roots, CMatrix, CVector, ONE, ZERO};

/// Zeros must stay this far inside the unit circle.
pub const ZERO_MARGIN: f64 = 1e-10;
const POLE_GUARD: f64 = 1e-14;
const MAX_NODES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeRepr", into = "BlaschkeRepr")]
pub struct FiniteBlaschke {
    zeros: Vec<Complex64>,
    constant: Complex64,
}

#[derive(Serialize, Deserialize)]
struct BlaschkeRepr {
    #[serde(with = "crate::io::complex_vec")]
    zeros: Vec<Complex64>,
    #[serde(rename = "const", with = "crate::io::complex", default = "unit")]
    constant: Complex64,
}

fn unit() -> Complex64 {
    ONE
}

impl TryFrom<BlaschkeRepr> for FiniteBlaschke {
    type Error = Error;
    fn try_from(r: BlaschkeRepr) -> Result<Self> {
        FiniteBlaschke::new(r.zeros, r.constant)
    }
}

impl From<FiniteBlaschke> for BlaschkeRepr {
    fn from(b: FiniteBlaschke) -> Self {
        BlaschkeRepr { zeros: b.zeros, constant: b.constant }
    }
}

impl FiniteBlaschke {
    pub fn new(zeros: Vec<Complex64>, constant: Complex64) -> Result<Self> {
        for z in &zeros {
            if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 - ZERO_MARGIN {
                return Err(Error::InvalidInput(format!(
                    "Blaschke zero {} + {}i is not inside the unit disk",
                    z.re, z.im
                )));
            }
        }
        if !((constant.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidInput(format!(
                "Blaschke constant has modulus {}, expected 1",
                constant.norm()
            )));
        }
        Ok(Self { zeros, constant: constant / constant.norm() })
    }

    /// `z ↦ zⁿ`.
    pub fn monomial(n: usize) -> Self {
        Self { zeros: vec![ZERO; n], constant: ONE }
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `z·B`, with the new zero at the origin placed first.
    pub fn times_z(&self) -> Self {
        let mut zeros = Vec::with_capacity(self.zeros.len() + 1);
        zeros.push(ZERO);
        zeros.extend_from_slice(&self.zeros);
        Self { zeros, constant: self.constant }
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self { zeros, constant: self.constant * other.constant }
    }

    /// Value at `z`, `|z| ≤ 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() <= 1.0 + 1e-12) {
            return Err(Error::OutOfDisk(format!("{} + {}i", z.re, z.im)));
        }
        let mut acc = self.constant;
        for &l in &self.zeros {
            let den = ONE - l.conj() * z;
            if den.norm() < POLE_GUARD {
                return Err(Error::NumericalDegeneracy(format!(
                    "evaluation at {z} is within {POLE_GUARD:e} of a pole"
                )));
            }
            acc *= (z - l) / den;
        }
        Ok(acc)
    }

    /// Unchecked evaluation for points already known to be admissible.
    pub(crate) fn value(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.constant, |acc, &l| acc * (z - l) / (ONE - l.conj() * z))
    }

    /// `const·∏(z − λᵢ)`, ascending coefficients.
    pub fn numerator(&self) -> Vec<Complex64> {
        poly_from_roots(&self.zeros).into_iter().map(|p| p * self.constant).collect()
    }

    /// `∏(1 − λ̄ᵢz)`, ascending coefficients.
    pub fn denominator(&self) -> Vec<Complex64> {
        self.zeros.iter().fold(vec![ONE], |acc, &l| {
            crate::numlin::poly_mul(&acc, &[ONE, -l.conj()])
        })
    }

    /// Largest deviation of `|B|` from 1 on `m` boundary points.
    pub fn boundary_defect(&self, m: usize) -> f64 {
        circle(1.0, m)
            .into_iter()
            .map(|z| (self.value(z).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The elementary factor `b_λ(z) = (λ − z)/(1 − λ̄z)`.
pub fn elementary(lambda: Complex64) -> Result<FiniteBlaschke> {
    if !(lambda.norm() < 1.0) {
        return Err(Error::InvalidInput(format!("|λ| = {} is not below 1", lambda.norm())));
    }
    FiniteBlaschke::new(vec![lambda], c(-1.0, 0.0))
}

/// `μ·b_λ∘u` as a finite Blaschke product.
///
/// With `u = N/D`, `μ·b_λ(u) = μ(λD − N)/(D − λ̄N)`; its zeros solve `u = λ`
/// and the constant is read off at a boundary point.
pub fn compose_elementary(mu: Complex64, lambda: Complex64, u: &FiniteBlaschke) -> Result<FiniteBlaschke> {
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("|μ| = {} is not 1", mu.norm())));
    }
    if !(lambda.norm() < 1.0) {
        return Err(Error::InvalidInput(format!("|λ| = {} is not below 1", lambda.norm())));
    }
    let target = |z: Complex64| {
        let w = u.value(z);
        mu * (lambda - w) / (ONE - lambda.conj() * w)
    };
    let zeros = if u.degree() == 0 {
        Vec::new()
    } else {
        let num = u.numerator();
        let den = u.denominator();
        let mut p: Vec<Complex64> = vec![ZERO; num.len().max(den.len())];
        for (i, d) in den.iter().enumerate() {
            p[i] += lambda * d;
        }
        for (i, n) in num.iter().enumerate() {
            p[i] -= n;
        }
        poly_roots(&p).map_err(|e| Error::NumericalDegeneracy(format!("root finding: {e}")))?
    };
    let probe = Complex64::from_polar(1.0, 0.123);
    let partial = FiniteBlaschke { zeros: zeros.clone(), constant: ONE };
    let k = target(probe) / partial.value(probe);
    let out = FiniteBlaschke::new(zeros, k / k.norm())
        .map_err(|e| Error::NumericalDegeneracy(format!("composed product: {e}")))?;
    let err = circle(0.9, 64)
        .into_iter()
        .chain(circle(1.0, 64))
        .map(|z| (out.value(z) - target(z)).norm())
        .fold(0.0, f64::max);
    if err > 1e-8 {
        return Err(Error::NumericalDegeneracy(format!(
            "composition differs from μ·b_λ(u) by {err:.3e}"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusRelation {
    #[serde(with = "crate::io::complex")]
    pub mu: Complex64,
    #[serde(with = "crate::io::complex")]
    pub lambda: Complex64,
    /// Largest pointwise deviation of `v` from `μ·b_λ(u)` on the check grid.
    pub residual: f64,
}

const MOBIUS_SAMPLES: [(f64, f64); 3] = [(0.0, 0.0), (0.41, 0.0), (0.3, 0.5)];

/// Looks for `(μ, λ)` with `v = μ·b_λ(u)`.
///
/// The relation `v(1 − λ̄u) = μ(λ − u)` is linear in `(μλ, μ, λ̄)`, so three
/// samples determine a candidate, which is then checked on 64 boundary and
/// 64 interior points.
pub fn detect_mobius_relation(u: &FiniteBlaschke, v: &FiniteBlaschke) -> Option<MobiusRelation> {
    if u.degree() == 0 || v.degree() == 0 || u.degree() != v.degree() {
        return None;
    }
    for attempt in 0..8 {
        // Deterministic perturbation when u takes nearly equal values on
        // the samples.
        let shift = 0.03 * attempt as f64;
        let rot = Complex64::from_polar(1.0, 0.7 * attempt as f64);
        let pts: Vec<Complex64> = MOBIUS_SAMPLES
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| c(x, y) * rot + c(shift, 0.01 * i as f64 * attempt as f64))
            .collect();
        let mut a = CMatrix::zeros(3, 3);
        let mut rhs = CVector::zeros(3);
        for (i, &z) in pts.iter().enumerate() {
            let uz = u.value(z);
            let vz = v.value(z);
            a[(i, 0)] = ONE;
            a[(i, 1)] = -uz;
            a[(i, 2)] = uz * vz;
            rhs[i] = vz;
        }
        if crate::numlin::condition_number(&a) > 1e10 {
            continue;
        }
        let Some(x) = a.lu().solve(&rhs) else { continue };
        let mu = x[1];
        if (mu.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        let mu = mu / mu.norm();
        let lambda = x[0] / mu;
        if !(lambda.norm() < 1.0) {
            return None;
        }
        let residual = circle(1.0, 64)
            .into_iter()
            .chain(circle(0.6, 64))
            .map(|z| {
                let w = u.value(z);
                (v.value(z) - mu * (lambda - w) / (ONE - lambda.conj() * w)).norm()
            })
            .fold(0.0, f64::max);
        return (residual <= 1e-8).then_some(MobiusRelation { mu, lambda, residual });
    }
    None
}

/// `K_φ` with its Takenaka–Malmquist basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpace {
    phi: FiniteBlaschke,
    nodes: usize,
}

/// Trapezoid size: at least 512 and 16 per basis function, then enough that
/// `ρ^M` is negligible where `ρ` is the largest zero modulus.
fn quadrature_size(phi: &FiniteBlaschke) -> usize {
    let base = 512.max(16 * (phi.degree() + 1));
    let rho = phi.max_zero_modulus();
    let guard = if rho > 0.0 { (40.0 / -rho.ln()).ceil() as usize } else { 0 };
    base.max(guard.next_multiple_of(8)).min(MAX_NODES)
}

pub fn model_space(phi: &FiniteBlaschke) -> Result<ModelSpace> {
    ModelSpace::new(phi.clone())
}

impl ModelSpace {
    pub fn new(phi: FiniteBlaschke) -> Result<Self> {
        if phi.degree() == 0 {
            return Err(Error::InvalidInput("model space of a constant is trivial".into()));
        }
        let nodes = quadrature_size(&phi);
        let space = Self { phi, nodes };
        let defect = space.gram_defect();
        if defect > 1e-10 {
            return Err(Error::NumericalDegeneracy(format!(
                "quadrature Gram matrix is off the identity by {defect:.3e}"
            )));
        }
        Ok(space)
    }

    /// `K_{zφ}`, with the zero at the origin first.
    pub fn z_phi(phi: &FiniteBlaschke) -> Result<Self> {
        Self::new(phi.times_z())
    }

    pub fn phi(&self) -> &FiniteBlaschke {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.degree()
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.nodes
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        circle(1.0, self.nodes)
    }

    /// `(e_0(z), …, e_{len−1}(z))`; indices past `dim` continue the basis of
    /// `H²` as `φ(z)·z^k / const`.
    pub fn basis_values(&self, z: Complex64, len: usize) -> CVector {
        let mut out = CVector::zeros(len);
        let mut running = ONE;
        for (k, &l) in self.phi.zeros.iter().enumerate() {
            let den = ONE - l.conj() * z;
            if k < len {
                out[k] = running * (1.0 - l.norm_sqr()).sqrt() / den;
            }
            running *= (z - l) / den;
        }
        for k in self.dim()..len {
            out[k] = running;
            running *= z;
        }
        out
    }

    pub fn gram(&self) -> CMatrix {
        let n = self.dim();
        let mut g = CMatrix::zeros(n, n);
        for z in self.nodes() {
            let e = self.basis_values(z, n);
            g += &e * e.adjoint();
        }
        g / c(self.nodes as f64, 0.0)
    }

    pub fn gram_defect(&self) -> f64 {
        let n = self.dim();
        (self.gram() - CMatrix::identity(n, n)).norm()
    }

    /// Orthogonal projection of a function onto the space, computed by
    /// quadrature. Returns the coefficients and the L² norm of the part left
    /// over.
    pub fn project<F: Fn(Complex64) -> Complex64>(&self, f: F) -> (CVector, f64) {
        let n = self.dim();
        let nodes = self.nodes();
        let values: Vec<Complex64> = nodes.iter().map(|&z| f(z)).collect();
        let mut coeffs = CVector::zeros(n);
        for (z, fz) in nodes.iter().zip(&values) {
            coeffs += conj_vec(&self.basis_values(*z, n)) * *fz;
        }
        coeffs /= c(self.nodes as f64, 0.0);
        let mut rest = 0.0;
        for (z, fz) in nodes.iter().zip(&values) {
            let pf: Complex64 = self.basis_values(*z, n).dot(&coeffs);
            rest += (fz - pf).norm_sqr();
        }
        (coeffs, (rest / self.nodes as f64).sqrt())
    }

    pub fn function(&self, coeffs: CVector) -> Result<ModelFunction> {
        ModelFunction::new(self.clone(), coeffs)
    }
}

/// An element of `H²` given by coefficients in the (extended) basis of a
/// model space. Coefficients past `dim` describe a component outside the
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFunction {
    space: ModelSpace,
    coeffs: CVector,
}

impl ModelFunction {
    pub fn new(space: ModelSpace, coeffs: CVector) -> Result<Self> {
        if coeffs.len() < space.dim() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for a space of dimension {}",
                coeffs.len(),
                space.dim()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    /// Coefficients on the model space itself.
    pub fn in_space(&self) -> CVector {
        self.coeffs.rows(0, self.space.dim()).into_owned()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.space.basis_values(z, self.coeffs.len()).dot(&self.coeffs)
    }

    /// L² distance to the model space, measured by quadrature.
    pub fn membership_residual(&self) -> f64 {
        self.space.project(|z| self.eval(z)).1
    }
}

pub fn mf_eval(f: &ModelFunction, z: Complex64) -> Complex64 {
    f.eval(z)
}

/// Matrix of `P_{K_φ} M_z |K_φ` in the Takenaka–Malmquist basis.
pub fn compressed_shift(phi: &FiniteBlaschke) -> Result<Contraction> {
    let space = model_space(phi)?;
    let n = space.dim();
    let mut a = CMatrix::zeros(n, n);
    for z in space.nodes() {
        let e = space.basis_values(z, n);
        // a[k, j] = ⟨z e_j, e_k⟩
        a += (conj_vec(&e) * e.transpose()) * z;
    }
    a /= c(space.nodes as f64, 0.0);
    Contraction::new(a)
}

/// The conjugation `f ↦ f̄·φ` of `K_{zφ}` (boundary values).
#[derive(Debug, Clone)]
pub struct ModelConjugation {
    space: ModelSpace,
    conj: Conjugation,
}

/// Matrix entries `U_jk = ⟨C e_k, e_j⟩`, so that `C(Σ c_k e_k) = Σ_j (U·c̄)_j e_j`.
pub fn model_conjugation(phi: &FiniteBlaschke) -> Result<ModelConjugation> {
    let space = ModelSpace::z_phi(phi)?;
    let n = space.dim();
    let mut u = CMatrix::zeros(n, n);
    for z in space.nodes() {
        let e = conj_vec(&space.basis_values(z, n));
        u += (&e * e.transpose()) * phi.value(z);
    }
    u /= c(space.nodes as f64, 0.0);
    let conj = Conjugation::new(u)?;
    Ok(ModelConjugation { space, conj })
}

impl ModelConjugation {
    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn conjugation(&self) -> &Conjugation {
        &self.conj
    }

    pub fn matrix(&self) -> &CMatrix {
        self.conj.matrix()
    }

    /// Applies `C` to the in-space part of `f`.
    pub fn apply(&self, f: &ModelFunction) -> Result<ModelFunction> {
        if f.space() != &self.space {
            return Err(Error::InvalidInput("function lives in a different model space".into()));
        }
        ModelFunction::new(self.space.clone(), self.conj.apply(&f.in_space())?)
    }

    pub fn apply_coeffs(&self, x: &CVector) -> Result<CVector> {
        self.conj.apply(x)
    }

    /// `‖C f − f‖` in coefficients.
    pub fn fixed_point_residual(&self, x: &CVector) -> Result<f64> {
        Ok((self.conj.apply(x)? - x).norm())
    }
}

/// Coefficient vectors whose real span is `{f : Cf = f}`.
pub fn fixed_points(conj: &Conjugation) -> Result<Vec<CVector>> {
    c_real_basis(conj)
}

/// Spectral factor of a nonnegative trigonometric polynomial
/// `p(e^{iθ}) = Σ_{|k|≤m} p_k e^{ikθ}` given by `p_0, …, p_m` (with
/// `p_{−k} = p̄_k`). Returns ascending coefficients of `q`, all roots
/// outside the open disk, with `|q|² = p` on the circle.
pub fn fejer_riesz(p: &[Complex64]) -> Result<Vec<Complex64>> {
    if p.is_empty() {
        return Err(Error::InvalidInput("empty trigonometric polynomial".into()));
    }
    let scale = p.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    if p[0].im.abs() > 1e-12 * scale {
        return Err(Error::InvalidInput("p_0 must be real".into()));
    }
    let mut m = p.len() - 1;
    while m > 0 && p[m].norm() <= 1e-14 * scale {
        m -= 1;
    }
    let p = &p[..=m];
    let trig = |t: f64| -> f64 {
        let z = Complex64::from_polar(1.0, t);
        let mut s = p[0].re;
        let mut zk = ONE;
        for pk in &p[1..] {
            zk *= z;
            s += 2.0 * (pk * zk).re;
        }
        s
    };
    let thetas: Vec<f64> = (0..512).map(|k| TAU * k as f64 / 512.0).collect();
    let values: Vec<f64> = thetas.iter().map(|&t| trig(t)).collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::NotNonnegative(min));
    }
    if m == 0 {
        return Ok(vec![c(p[0].re.max(0.0).sqrt(), 0.0)]);
    }
    // z^m·p(z) as an ordinary polynomial of degree 2m.
    let mut full = vec![ZERO; 2 * m + 1];
    for k in 0..=m {
        full[m + k] = p[k];
        full[m - k] = p[k].conj();
    }
    full[m] = c(p[0].re, 0.0);
    let mut roots = poly_roots(&full)?;
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    roots.truncate(m);
    let monic = poly_from_roots(&roots);
    let (mut num, mut den) = (0.0, 0.0);
    for (&t, &v) in thetas.iter().zip(&values) {
        let g = poly_eval(&monic, Complex64::from_polar(1.0, t)).norm_sqr();
        num += v * g;
        den += g * g;
    }
    if !(den > 0.0) {
        return Err(Error::FactorizationFailed("degenerate spectral factor".into()));
    }
    let k = (num / den).max(0.0).sqrt();
    Ok(monic.into_iter().map(|x| x * k).collect())
}

/// Largest `| |q|² − p |` on `m` boundary points.
pub fn fejer_riesz_residual(p: &[Complex64], q: &[Complex64], m: usize) -> f64 {
    circle(1.0, m)
        .into_iter()
        .map(|z| {
            let mut s = p[0].re;
            let mut zk = ONE;
            for pk in &p[1..] {
                zk *= z;
                s += 2.0 * (pk * zk).re;
            }
            (poly_eval(q, z).norm_sqr() - s).abs()
        })
        .fold(0.0, f64::max)
}
