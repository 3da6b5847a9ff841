//! Superanalysis over a finite-generator Grassmann algebra.
//!
//! Supernumbers and supermatrices with exact arithmetic, supersmooth functions via Grassmann
//! continuation, Berezin integration with a consistent change of variables, odd Fourier
//! transforms, super-Hamilton flows and their applications (free and electromagnetic Weyl
//! propagators, Qi's weakly hyperbolic equation, GUE densities, SUSY quantum mechanics).

pub mod berezin;
pub mod dual;
pub mod error;
pub mod fourier_odd;
pub mod grassmann;
pub mod quadrature;
pub mod rmt;
pub mod selftest;
pub mod superlinalg;
pub mod superspace;
pub mod susyqm;
pub mod weyl_dynamics;

pub use error::{Error, Result};
pub use grassmann::{Analytic, Parity, Supernumber, C64};
