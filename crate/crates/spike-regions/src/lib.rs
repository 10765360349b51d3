//! Exact analysis of discrete-time leaky integrate-and-fire networks.
//!
//! The crate provides four pieces:
//!
//! * [`snn`] — exact forward simulation of the discrete-time LIF recurrence
//!   with static input encoding, affine/rate/count/first-spike decoders, and
//!   the block-diagonal threshold-network unrolling,
//! * [`constructors`] — compilers from polyhedron indicators, grid step
//!   functions and Lipschitz function oracles to network weights, with exact
//!   sup/L2 approximation errors,
//! * [`temporal`] — the per-neuron partition of the pre-activation axis
//!   induced by latency (at most `(T^2+T+2)/2` intervals),
//! * [`geometry`] — the hyperplane families a first layer induces on input
//!   space, closed-form region bounds, exact 2D arrangement counting, and a
//!   construction attaining the bound.
//!
//! All analysis runs on arbitrary-precision rationals by default
//! ([`scalar::Mode::Exact`]); bulk simulation can use floats.

pub mod constructors;
pub mod domain;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod snn;
pub mod temporal;

pub use domain::BoxDomain;
pub use matrix::Matrix;
pub use scalar::{Mode, Scalar, FLOAT_TOLERANCE};
pub use snn::{
    decode, decode_for, encode_direct, realize, simulate, simulate_train, unroll_to_heaviside,
    DecoderSpec, EncoderSpec, LayerParams, Network, NetworkError, SimulationTrace, SpikeTrain,
};

/// Crate version embedded in every emitted artifact.
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
