//! Exact symbolic simulation of truncated GKP codes in hybrid qubit-oscillator
//! circuits.
//!
//! Oscillator states are kept as finite sums of truncated Gaussian wavepackets
//! with linear phases. Position and momentum displacements and squeezing map
//! such packets to packets, so circuits built from bounded-strength
//! displacements, squeezings and qubit gates can be simulated without any
//! discretization. Only overlaps are computed numerically, in closed form where
//! the truncation is irrelevant and by adaptive Gauss-Legendre otherwise.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! interface and parallel sweeps live in the companion `gkpsim` crate.
//!
//! Layout:
//!
//! - [`wavepacket`]: the packet algebra and its inner product.
//! - [`gkp_states`]: Gaussian-envelope and comb codewords, code parameters.
//! - [`hybrid_sim`]: states of oscillators and qubits, elementary gates.
//! - [`logical_layer`]: ideal bit-manipulation maps and bit-transfer circuits.
//! - [`compiler`]: lowering logical circuits to elementary gates, audits.
//! - [`error_analysis`]: B matrices, the sparse bound and closed-form bounds.
//! - [`clifford`]: qudit Clifford matrices and their two-qubit factorizations.
//! - [`oracle`]: independent grid quadrature and formula-built matrices.

#![no_std]
#![forbid(unsafe_code)]
// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clifford;
pub mod compiler;
pub mod error;
pub mod error_analysis;
pub mod gkp_states;
pub mod hybrid_sim;
pub mod linalg;
pub mod logical_layer;
pub mod oracle;
mod quadrature;
pub mod wavepacket;

pub use error::{Error, Result};
pub use linalg::CMatrix;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub(crate) mod math {
    pub use core::f64::consts::PI;
    pub use num_traits::Float;

    pub use crate::C64;

    #[inline]
    pub fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// `e^{i theta}`.
    #[inline]
    pub fn cis(theta: f64) -> C64 {
        C64::new(theta.cos(), theta.sin())
    }

    /// Relative-or-absolute closeness used for packet bookkeeping.
    #[inline]
    pub fn close(a: f64, b: f64, tol: f64) -> bool {
        let scale = a.abs().max(b.abs());
        (a - b).abs() <= tol * scale.max(1.0)
    }
}
