//! Numerical laboratory for the stability of super-resolution.
//!
//! The crate models discrete complex measures on the torus `T^d`, maps them to
//! their trigonometric moments, and provides the tools needed to certify
//! Lipschitz-type stability estimates for the inverse problem:
//!
//! * [`torus`]: wrap-around norms, separation and bottleneck matching distance.
//! * [`measure`]: probability-like measures, frequency balls and the moment map.
//! * [`localizer`]: Hann-window autocorrelations, the localizing function `ψ`,
//!   its Fourier transform and the analytic drop bounds.
//! * [`numerics`]: small dense complex kernels (Jacobi eigensolver, SVD, QR,
//!   least squares, min-cost transport).
//! * [`wasserstein`]: 1-Wasserstein distance for complex probability-like
//!   measures with certified bracketing.
//! * [`esprit`]: univariate ESPRIT recovery.
//! * [`stability`]: matching decompositions, cluster analysis, Vandermonde
//!   bounds and the inequality checkers with a Monte-Carlo driver.
//! * [`io`]: measure JSON, moment CSV and report serialization.

pub mod error;
pub mod esprit;
pub mod io;
pub mod localizer;
pub mod measure;
pub mod numerics;
pub mod stability;
pub mod torus;
pub mod wasserstein;

pub use error::{Error, Result};
pub use esprit::{esprit_recover, EspritConfig, EspritRecovery};
pub use localizer::{LocalizerParams, WindowKind};
pub use measure::{AdmissibilityClass, DiscreteMeasure, FrequencySet, MomentVector, NormKind};
pub use num_complex::Complex64;
pub use stability::{Sense, TheoremId, TheoremReport};
pub use torus::{NodeSet, TorusPoint};
pub use wasserstein::W1Result;
