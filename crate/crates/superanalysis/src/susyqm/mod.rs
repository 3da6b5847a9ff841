//! Supersymmetric quantum mechanics: the Deift factorization on polynomial differential
//! operators, the heat-kernel Witten index of the oscillator, and the supersymmetric extension of
//! a Riemannian Hamiltonian with its flat reductions and supercharges.

pub mod diffop;
pub mod extension;
pub mod witten;

pub use diffop::{kernel_dims, susy_factorize, DiffOp1D, Factorization, IndexRecord, OpMatrix2, Poly};
pub use extension::{
    flat_susy_hamiltonian, harmonic_symbol, supercharge_drift, supercharges, susy_extension, DriftReport, Geometry, MetricData, SusyRoute,
    SUPERCHARGE_ODD_SCALE,
};
pub use witten::{lh_odd_kernel, lh_sector_image, witten_supertrace};

#[cfg(test)]
mod tests;
