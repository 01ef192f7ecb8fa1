//! Numerical tests for complex symmetry of finite-dimensional contractions.
//!
//! A contraction `T` is complex symmetric when `T = C·T*·C` for some
//! conjugation `C`. This crate decides the question along independent
//! routes and cross-checks them:
//!
//! * [`conjugation`] searches for `C` directly in coordinates;
//! * [`charfun`] evaluates the characteristic function
//!   `Θ_T(z) = −T + z·D_{T*}(I − zT*)⁻¹D_T` on the defect spaces and looks for
//!   an antiunitary `J` with `Θ_T(z) = J·Θ_T(z)*·J` on a grid;
//! * [`inner2x2`] decides symmetrizability of 2×2 inner functions through a
//!   fixed point of the model-space conjugation;
//! * [`family`] builds the upper-triangular contractions assembled from two
//!   compressed shifts and classifies them through Blaschke-product algebra.

pub mod blaschke;
pub mod charfun;
pub mod conjugation;
pub mod error;
pub mod family;
pub mod grid;
pub mod inner2x2;
pub mod io;
pub mod numlin;
pub mod random;
mod search;

pub use error::{Error, Result};
pub use numlin::{CMatrix, CVector};

use serde::{Deserialize, Serialize};

/// Outcome of a complex-symmetry test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// A verified witness was found.
    Symmetric,
    /// A certificate rules out complex symmetry.
    NotSymmetric,
    /// Neither a witness nor a certificate could be produced.
    Indeterminate,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Symmetric => 0,
            Verdict::NotSymmetric => 1,
            Verdict::Indeterminate => 2,
        }
    }

    /// True when the two verdicts are definite and opposite.
    pub fn contradicts(self, other: Verdict) -> bool {
        matches!(
            (self, other),
            (Verdict::Symmetric, Verdict::NotSymmetric) | (Verdict::NotSymmetric, Verdict::Symmetric)
        )
    }
}

/// Why a `NotSymmetric` verdict holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The linear constraint space has no nonzero element.
    EmptyNullspace,
    /// The constraint space is one-dimensional and its generator is not a
    /// multiple of a unitary.
    NoUnitaryDirection,
    /// The polar factor of a well-conditioned element leaves the constraint
    /// space, which cannot happen when a unitary solution exists.
    PolarObstruction,
    /// The defect indices differ.
    DefectMismatch,
}
