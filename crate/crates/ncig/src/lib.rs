//! Non-commutative information geometry on finite-dimensional von Neumann
//! algebras.
//!
//! A finite-dimensional von Neumann algebra is a direct sum of full matrix
//! blocks `M = ⊕_i M_{n_i}(C)`. This crate realizes, in exact matrix form,
//! the geometry that lives on its predual `M_*`:
//!
//! * [`algebra`] — algebras, their elements, normal functionals, polar
//!   decompositions of functionals.
//! * [`lp`] — the Schatten space `L_p(M)` for `1 < p < ∞`, the
//!   α-embeddings `ℓ_α : M_* → L_p` with `p = 2/(1−α)`, the duality map
//!   `x ↦ x̃`, and the potential `Ψ_p` with its Legendre structure.
//! * [`divergence`] — the Bregman-style divergence `D_p` on `L_p`, the
//!   α-divergence `S_α` on `M_*`, Hellinger/sphere specializations, and
//!   the scalar bound functions `f_p`, `g_p`.
//! * [`quasientropy`] — relative modular operator spectra and Petz
//!   quasi-entropies, an independent spectral route to `S_α`.
//! * [`projection`] — `D_p`-projections onto convex subsets of `L_p` with
//!   optimality certificates, α-projections on `M_*`, and the sphere
//!   tangent projector.
//! * [`channels`] — CPTP (stochastic) maps acting on preduals, used to
//!   exercise monotonicity of `S_α`.
//! * [`verify`] — the seeded property-check suite behind `ncig verify`.
//!
//! All types are immutable values and all operations are pure functions,
//! so everything here is safe to evaluate in parallel.

use thiserror::Error;

pub mod algebra;
pub mod channels;
pub mod divergence;
pub mod json;
mod linalg;
pub mod lp;
pub mod projection;
pub mod quasientropy;
pub mod report;
pub mod sample;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraShape, NormalFunctional, PolarDecomposition};
pub use channels::KrausChannel;
pub use divergence::DivergenceValue;
pub use lp::LpVector;
pub use projection::{ConvexSetSpec, ProjectionResult, SolverOptions};

/// Errors reported by the operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("block {index} is {rows}x{cols}, expected {expected}x{expected}")]
    BlockSize {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("alpha = {0} outside the open interval (-1, 1)")]
    AlphaOutOfRange(f64),

    #[error("order p = {0} outside the admitted range [1 + 1e-6, 1e6]")]
    OrderOutOfRange(f64),

    #[error("orders p = {p} and q = {q} are not conjugate (1/p + 1/q != 1)")]
    NotConjugate { p: f64, q: f64 },

    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(f64, f64),

    #[error("vector order {order} does not match alpha = {alpha} (expected p = {expected})")]
    OrderAlphaMismatch { order: f64, alpha: f64, expected: f64 },

    #[error("functional is not positive")]
    NotPositive,

    #[error("functional must have unit L1 norm (got {0})")]
    NotUnitNorm(f64),

    #[error("vector is not on the radius-p sphere (norm {norm}, p {p})")]
    NotOnSphere { norm: f64, p: f64 },

    #[error("zero vector has no norming functional")]
    ZeroVector,

    #[error("Hoelder orders sum to 1/r with r < 1 (sum of 1/p_k = {0})")]
    HolderOrders(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("convex set is degenerate: {0}")]
    DegenerateSet(String),

    #[error("point is not in the convex set (membership residual {0})")]
    NotInSet(f64),

    #[error("channel is invalid: {0}")]
    InvalidChannel(String),

    #[error("numerical factorization failed: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
