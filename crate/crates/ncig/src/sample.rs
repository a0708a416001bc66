//! Seeded samplers for functionals, algebra elements, L_p vectors,
//! unitaries and channels.
//!
//! Every sampler takes the random generator explicitly; a fixed seed gives
//! a fixed draw, which is what makes the verification suites reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraElement, AlgebraShape, NormalFunctional};
use crate::channels::KrausChannel;
use crate::linalg::{self, CMat};
use crate::lp::LpVector;

/// Ridge added to faithful draws so spectra stay well away from zero.
const FAITHFUL_RIDGE: f64 = 0.05;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    })
}

/// Generic (non-hermitian) functional with Gaussian blocks.
pub fn functional<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| complex_gaussian(rng, n, n))
        .collect();
    NormalFunctional::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Hermitian functional: `(G + G†)/2` per block.
pub fn hermitian_functional<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (&g + g.adjoint()) * linalg::creal(0.5)
        })
        .collect();
    NormalFunctional::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Positive functional drawn as `G†G` per block (Wishart).
pub fn positive_functional<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (g.adjoint() * &g) * linalg::creal(1.0 / n as f64)
        })
        .collect();
    NormalFunctional::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Positive functional normalized to `‖ω‖₁ = 1` (a state).
pub fn state<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let w = positive_functional(rng, shape);
    let t = w.trace_value().re;
    &w * (1.0 / t)
}

/// Faithful positive functional: Wishart plus a spectral ridge, so every
/// block eigenvalue stays well above the support clip.
pub fn faithful_functional<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (g.adjoint() * &g) * linalg::creal(1.0 / n as f64)
                + linalg::identity(n) * linalg::creal(FAITHFUL_RIDGE)
        })
        .collect();
    NormalFunctional::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Faithful state: faithful draw normalized to unit trace.
pub fn faithful_state<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> NormalFunctional {
    let w = faithful_functional(rng, shape);
    let t = w.trace_value().re;
    &w * (1.0 / t)
}

/// Generic algebra element with Gaussian blocks.
pub fn element<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| complex_gaussian(rng, n, n))
        .collect();
    AlgebraElement::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Hermitian algebra element.
pub fn hermitian_element<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (&g + g.adjoint()) * linalg::creal(0.5)
        })
        .collect();
    AlgebraElement::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// L_p vector with Gaussian blocks at the given order.
pub fn lp_vector<R: Rng>(rng: &mut R, shape: &AlgebraShape, order: f64) -> LpVector {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| complex_gaussian(rng, n, n))
        .collect();
    LpVector::new(shape.clone(), order, blocks).expect("sampled blocks match shape")
}

/// Hermitian L_p vector.
pub fn hermitian_lp_vector<R: Rng>(rng: &mut R, shape: &AlgebraShape, order: f64) -> LpVector {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (&g + g.adjoint()) * linalg::creal(0.5)
        })
        .collect();
    LpVector::new(shape.clone(), order, blocks).expect("sampled blocks match shape")
}

/// Positive semidefinite L_p vector (a point of the positive cone).
pub fn positive_lp_vector<R: Rng>(rng: &mut R, shape: &AlgebraShape, order: f64) -> LpVector {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = complex_gaussian(rng, n, n);
            (g.adjoint() * &g) * linalg::creal(1.0 / n as f64)
        })
        .collect();
    LpVector::new(shape.clone(), order, blocks).expect("sampled blocks match shape")
}

/// Random point on the sphere of radius `p` in L_p, the image of the unit
/// sphere of `M_*` under the α-embedding.
pub fn sphere_point<R: Rng>(rng: &mut R, shape: &AlgebraShape, order: f64) -> LpVector {
    let x = lp_vector(rng, shape, order);
    let n = x.norm();
    &x * (order / n)
}

/// Haar-distributed unitary of size `n`.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = complex_gaussian(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix the phases so the distribution is Haar
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::cone() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Block-diagonal unitary element of the algebra.
pub fn block_unitary<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| unitary(rng, n))
        .collect();
    AlgebraElement::new(shape.clone(), blocks).expect("sampled blocks match shape")
}

/// Random CPTP channel via a Stinespring isometry cut out of a Haar
/// unitary; `env_dim` is the environment dimension (2–4 is plenty).
pub fn channel<R: Rng>(
    rng: &mut R,
    in_shape: &AlgebraShape,
    out_shape: &AlgebraShape,
    env_dim: usize,
) -> KrausChannel {
    let n_in = in_shape.total_dim();
    let n_out = out_shape.total_dim();
    let mut env = env_dim.max(1);
    while n_out * env < n_in {
        env += 1;
    }
    let big = unitary(rng, n_out * env);
    // isometry = first n_in columns; Kraus operator e takes rows (i, e)
    let kraus = (0..env)
        .map(|e| {
            CMat::from_fn(n_out, n_in, |i, j| big[(i * env + e, j)])
        })
        .collect();
    KrausChannel::new(in_shape.clone(), out_shape.clone(), kraus)
        .expect("Stinespring construction is CPTP")
}
