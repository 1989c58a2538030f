//! Entanglement of two free particles in a symmetric Gaussian pure state.
//!
//! The analytic modules are generic over the scalar type ([`Real`], implemented for `f32` and
//! `f64`); `*F64` aliases below cover the common case. The brute-force [`oracle`] and the
//! [`report`] aggregator are `f64`-only.
//!
//! | module | contents |
//! |---|---|
//! | [`model`] | state, free evolution, moments |
//! | [`covariance`] | covariance matrix, invariants, standard form |
//! | [`criteria`] | Duan tests, sudden-death time, symplectic PPT measure |
//! | [`spectrum`] | partial-transpose spectrum, negativity, Mehler kernel |
//! | [`formation`] | reduced spectrum, entropy, entanglement of formation |
//! | [`wigner`] | Wigner and characteristic functions, phase-space quadrature |
//! | [`oracle`] | Nystrom discretization and dense eigensolves |

#![forbid(unsafe_code)]
// `!(x > 0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covariance;
pub mod criteria;
mod error;
pub mod formation;
pub mod hermite;
pub mod model;
pub mod oracle;
pub mod report;
mod scalar;
pub mod spectrum;
pub mod wigner;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ModelParamsF64 = model::ModelParams<f64>;
pub type EvolvedStateF64 = model::EvolvedState<f64>;
pub type SecondMomentsF64 = model::SecondMoments<f64>;
pub type CovarianceMatrixF64 = covariance::CovarianceMatrix<f64>;
pub type StandardFormF64 = covariance::StandardForm<f64>;
pub type PtSpectrumF64 = spectrum::PtSpectrum<f64>;
pub type ReducedSpectrumF64 = formation::ReducedSpectrum<f64>;
pub type WignerSpecF64 = wigner::WignerSpec<f64>;

pub type ModelParamsF32 = model::ModelParams<f32>;
pub type EvolvedStateF32 = model::EvolvedState<f32>;
pub type PtSpectrumF32 = spectrum::PtSpectrum<f32>;
