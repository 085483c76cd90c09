//! Isospectral periodic tridiagonal Hermitian matrices.
//!
//! The crate covers the numerical side (spectral invariants of the
//! characteristic polynomial, the periodic Toda flow, the discrete
//! Schrödinger monodromy and its forbidden zones) and the exact
//! combinatorial side (the permutohedral subdivision of the torus, its
//! f/h-numbers, equivariant Hilbert series and Betti numbers of the
//! isospectral space).
//!
//! Floating point is used only in [`poly`], [`spectrum`], [`matrix`],
//! [`toda`] and [`schrodinger`]; [`tiling`] and [`homology`] are exact
//! integer computations.

pub mod error;
pub mod homology;
pub mod matrix;
pub mod poly;
pub mod schrodinger;
pub mod spectrum;
pub mod tiling;
pub mod toda;

pub use error::{Error, Result};
pub use homology::{BettiComponents, BettiTable, Diagnostics, IntPoly, RationalSeries};
pub use matrix::{GaugeForm, PeriodicJacobi, TorusElement};
pub use num_complex::Complex64;
pub use poly::{CriticalKind, CriticalProfile, RealPolynomial};
pub use schrodinger::{ForbiddenZones, Monodromy, SchrodingerOperator, ZoneParity};
pub use spectrum::{
    BSetLocation, BSetQuery, ManifoldStatus, OrbitDescriptor, Spectrum, SpectrumInvariants,
};
pub use tiling::{Face, Lattices, SimplicialStats, WonderfulComplex};
pub use toda::{DriftRecord, TodaConfig, TodaTrajectory};
