//! Uncertainty relations for photons built on the center-of-energy operator.
//!
//! The crate evaluates position/momentum dispersion functionals for photon
//! wave functions in momentum space, verifies the sharp lower bounds of the
//! three-dimensional uncertainty relation by independent routes (closed-form
//! quantization conditions, ODE shooting, direct quadrature on saturating
//! states), reruns the variational minimization of the variance product over
//! polynomial trial states, and computes focal-volume bounds for photon
//! beams.
//!
//! Everything is expressed in natural units ħ = c = 1; reported quantities
//! are dimensionless combinations built from the arbitrary length scale `a`
//! of the state under study.
//!
//! Module map:
//!
//! * [`specfun`] — gamma function, confluent hypergeometric ₁F₁, Jacobi
//!   polynomials and Wigner small-d angular eigenfunctions;
//! * [`lightcone`] — polarization vectors, Berry connection/curvature and
//!   covariant derivatives on the light cone;
//! * [`states`] — the saturating states, trial families, 1D Gaussians and
//!   sampled grids, plus the state-description file format;
//! * [`functionals`] — quadrature schemes, dispersion reports, γ²,
//!   shifted-connection functionals, 1D products, focal volumes;
//! * [`spectra`] — quantization conditions, radial/angular eigenfunctions,
//!   residual checks and the shooting eigenvalue solver;
//! * [`variational`] — Nelder-Mead minimization of the variance product,
//!   the sweep over trial orders, the two-parameter fit and the
//!   infinite-momentum series;
//! * [`beams`] — the coherent-beam functional and its dispersion report.

pub mod beams;
pub mod error;
pub mod functionals;
pub mod lightcone;
pub mod specfun;
pub mod spectra;
pub mod states;
pub mod variational;

pub use beams::BeamReport;
pub use error::{Error, Result};
pub use functionals::{ExpectationReport, QuadOrders, QuadratureScheme};
pub use lightcone::{AxisVector, MomentumPoint};
pub use spectra::{SpectrumLevel, System};
pub use states::{NormConvention, PhotonState};
pub use variational::VariationalRun;
