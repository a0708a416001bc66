//! Finite-dimensional von Neumann algebras as direct sums of matrix blocks,
//! their elements, normal functionals, and polar decompositions of
//! functionals.
//!
//! An algebra is `M = ⊕_i M_{n_i}(C)` and a normal functional `ω ∈ M_*` is
//! stored as one density-like block `W_i` per summand, acting by
//! `ω(a) = Σ_i Tr(W_i a_i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// Complex matrix type used for blocks throughout the crate.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance for the cached hermitian/positive predicates.
const PREDICATE_TOL: f64 = 1e-10;

/// Block dimensions `[n_1, …, n_k]` of the algebra `⊕_i M_{n_i}(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    block_dims: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::ShapeMismatch("at least one block is required".into()));
        }
        if block_dims.iter().any(|&n| n == 0) {
            return Err(Error::ShapeMismatch("block dimensions must be positive".into()));
        }
        Ok(Self { block_dims })
    }

    /// A single full matrix block `M_n(C)`.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n]).expect("positive dimension")
    }

    /// The commutative algebra `C^k`, i.e. `k` blocks of size 1.
    pub fn commutative(k: usize) -> Self {
        Self::new(vec![1; k]).expect("positive block count")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Dimension of the enveloping matrix space, `Σ_i n_i`.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub(crate) fn check_blocks(&self, blocks: &[CMat]) -> Result<()> {
        if blocks.len() != self.block_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                self.block_dims.len(),
                blocks.len()
            )));
        }
        for (index, (b, &n)) in blocks.iter().zip(&self.block_dims).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::BlockSize {
                    index,
                    rows: b.nrows(),
                    cols: b.ncols(),
                    expected: n,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.block_dims, other.block_dims
            )));
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⊕M[")?;
        for (i, n) in self.block_dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "]")
    }
}

fn shape_from_blocks(blocks: &[CMat]) -> Result<AlgebraShape> {
    let dims = blocks.iter().map(|b| b.nrows()).collect();
    let shape = AlgebraShape::new(dims)?;
    shape.check_blocks(blocks)?;
    Ok(shape)
}

/// An element `a ∈ M`, one square block per summand.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMat>) -> Result<Self> {
        shape.check_blocks(&blocks)?;
        Ok(Self { shape, blocks })
    }

    /// Builds the element from its blocks, inferring the shape.
    pub fn from_blocks(blocks: Vec<CMat>) -> Result<Self> {
        let shape = shape_from_blocks(&blocks)?;
        Ok(Self { shape, blocks })
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_dims().iter().map(|&n| linalg::identity(n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_dims().iter().map(|&n| CMat::zeros(n, n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    /// Diagonal element from real entries, one vector per block.
    pub fn from_real_diagonals(diags: &[Vec<f64>]) -> Result<Self> {
        let blocks: Vec<CMat> = diags
            .iter()
            .map(|d| {
                CMat::from_fn(d.len(), d.len(), |r, c| {
                    if r == c { linalg::creal(d[r]) } else { linalg::czero() }
                })
            })
            .collect();
        Self::from_blocks(blocks)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// Operator norm: the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::operator_norm(b).unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.blocks.iter().all(|b| linalg::is_hermitian(b, PREDICATE_TOL))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| linalg::max_abs(b) <= tol)
    }

    /// Blockwise product `self * other`.
    pub fn mul_element(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.shape.ensure_same(&other.shape)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Ok(AlgebraElement { shape: self.shape.clone(), blocks })
    }
}

/// A normal functional `ω ∈ M_*`, one density block `W_i` per summand, with
/// cached hermitian/positive predicates.
#[derive(Debug, Clone)]
pub struct NormalFunctional {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
    is_hermitian: bool,
    is_positive: bool,
}

impl NormalFunctional {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMat>) -> Result<Self> {
        shape.check_blocks(&blocks)?;
        let scale = 1.0 + blocks.iter().map(linalg::max_abs).fold(0.0, f64::max);
        let is_hermitian = blocks.iter().all(|b| linalg::is_hermitian(b, PREDICATE_TOL));
        let is_positive = is_hermitian
            && blocks
                .iter()
                .all(|b| linalg::min_eigenvalue(&hermitize(b)) >= -PREDICATE_TOL * scale);
        Ok(Self { shape, blocks, is_hermitian, is_positive })
    }

    pub fn from_blocks(blocks: Vec<CMat>) -> Result<Self> {
        let shape = shape_from_blocks(&blocks)?;
        Self::new(shape, blocks)
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_dims().iter().map(|&n| CMat::zeros(n, n)).collect();
        Self::new(shape.clone(), blocks).expect("zero blocks match shape")
    }

    /// Diagonal functional from real entries, one vector per block. With
    /// all blocks of size 1 this is a classical measure on points.
    pub fn from_real_diagonals(diags: &[Vec<f64>]) -> Result<Self> {
        let el = AlgebraElement::from_real_diagonals(diags)?;
        Self::new(el.shape().clone(), el.blocks)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian
    }

    pub fn is_positive(&self) -> bool {
        self.is_positive
    }

    /// `ω(1) = Σ_i Tr W_i`.
    pub fn trace_value(&self) -> Complex64 {
        self.blocks.iter().map(linalg::trace).sum()
    }

    /// `‖ω‖₁`: the sum of all singular values across blocks.
    pub fn norm_one(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::singular_values(b).map(|s| s.iter().sum::<f64>()))
            .try_fold(0.0, |acc, r| r.map(|v| acc + v))
            .unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| linalg::max_abs(b) <= tol)
    }

    /// Evaluates `ω(a) = Σ_i Tr(W_i a_i)`.
    pub fn apply(&self, a: &AlgebraElement) -> Result<Complex64> {
        self.shape.ensure_same(a.shape())?;
        let mut acc = linalg::czero();
        for (w, ab) in self.blocks.iter().zip(a.blocks()) {
            acc += linalg::trace(&(w * ab));
        }
        Ok(acc)
    }

    /// Pushes the functional through a fixed block unitary, `W ↦ U W U†`.
    pub fn conjugate_by(&self, u: &AlgebraElement) -> Result<NormalFunctional> {
        self.shape.ensure_same(u.shape())?;
        let blocks = self
            .blocks
            .iter()
            .zip(u.blocks())
            .map(|(w, ub)| ub * w * ub.adjoint())
            .collect();
        NormalFunctional::new(self.shape.clone(), blocks)
    }
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * linalg::creal(0.5)
}

/// Polar decomposition `W = u·ρ` of a functional: `ρ = (W†W)^{1/2}` is
/// positive, `u` is a partial isometry with `u†u = support(ρ)` and zero on
/// the kernel of `ρ`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub u: AlgebraElement,
    pub rho: NormalFunctional,
    pub support: AlgebraElement,
}

/// Result of [`classify_functional`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalClass {
    pub hermitian: bool,
    pub positive: bool,
    pub norm_1: f64,
}

/// Evaluates `ω(a) = Σ_i Tr(W_i a_i)`.
pub fn apply_functional(omega: &NormalFunctional, a: &AlgebraElement) -> Result<Complex64> {
    omega.apply(a)
}

/// Blockwise polar decomposition `W = u·ρ`. The zero functional yields
/// `u = 0`, `ρ = 0`.
pub fn polar_decompose(omega: &NormalFunctional) -> Result<PolarDecomposition> {
    let mut us = Vec::with_capacity(omega.blocks.len());
    let mut rhos = Vec::with_capacity(omega.blocks.len());
    let mut supports = Vec::with_capacity(omega.blocks.len());
    for b in &omega.blocks {
        let p = linalg::polar(b)?;
        us.push(p.u);
        rhos.push(p.rho);
        supports.push(p.support);
    }
    Ok(PolarDecomposition {
        u: AlgebraElement::new(omega.shape.clone(), us)?,
        rho: NormalFunctional::new(omega.shape.clone(), rhos)?,
        support: AlgebraElement::new(omega.shape.clone(), supports)?,
    })
}

/// Orthogonal projection onto the blockwise range of a positive functional;
/// eigenvalues below the relative clip tolerance count as zero.
pub fn support_projection(rho: &NormalFunctional) -> Result<AlgebraElement> {
    if !rho.is_positive() {
        return Err(Error::NotPositive);
    }
    let blocks = rho
        .blocks
        .iter()
        .map(|b| linalg::support_projection_psd(&hermitize(b)))
        .collect();
    AlgebraElement::new(rho.shape.clone(), blocks)
}

/// Cached predicates together with the `M_*` norm `‖ω‖₁`.
pub fn classify_functional(omega: &NormalFunctional) -> FunctionalClass {
    FunctionalClass {
        hermitian: omega.is_hermitian(),
        positive: omega.is_positive(),
        norm_1: omega.norm_one(),
    }
}

macro_rules! impl_linear_ops {
    ($ty:ident) => {
        impl Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: &$ty) -> $ty {
                self.shape().ensure_same(rhs.shape()).expect("matching shapes");
                let blocks = self
                    .blocks()
                    .iter()
                    .zip(rhs.blocks())
                    .map(|(a, b)| a + b)
                    .collect();
                $ty::new(self.shape().clone(), blocks).expect("blocks match shape")
            }
        }

        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: &$ty) -> $ty {
                self.shape().ensure_same(rhs.shape()).expect("matching shapes");
                let blocks = self
                    .blocks()
                    .iter()
                    .zip(rhs.blocks())
                    .map(|(a, b)| a - b)
                    .collect();
                $ty::new(self.shape().clone(), blocks).expect("blocks match shape")
            }
        }

        impl Mul<f64> for &$ty {
            type Output = $ty;
            fn mul(self, rhs: f64) -> $ty {
                let blocks = self
                    .blocks()
                    .iter()
                    .map(|b| b * linalg::creal(rhs))
                    .collect();
                $ty::new(self.shape().clone(), blocks).expect("blocks match shape")
            }
        }

        impl Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self * -1.0
            }
        }
    };
}

impl_linear_ops!(AlgebraElement);
impl_linear_ops!(NormalFunctional);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cmat(n: usize, entries: &[(f64, f64)]) -> CMat {
        // entries row-major
        CMat::from_fn(n, n, |r, c| {
            let (re, im) = entries[r * n + c];
            Complex64::new(re, im)
        })
    }

    #[test]
    fn apply_identity_functional_to_identity() {
        let shape = AlgebraShape::full(2);
        let w = NormalFunctional::new(shape.clone(), vec![linalg::identity(2)]).unwrap();
        let a = AlgebraElement::identity(&shape);
        let v = apply_functional(&w, &a).unwrap();
        assert!((v - linalg::creal(2.0)).norm() < 1e-14);
    }

    #[test]
    fn apply_functional_orthogonal_supports() {
        let w = NormalFunctional::from_real_diagonals(&[vec![1.0, 0.0]]).unwrap();
        let a = AlgebraElement::from_real_diagonals(&[vec![0.0, 1.0]]).unwrap();
        assert!(apply_functional(&w, &a).unwrap().norm() < 1e-14);
    }

    #[test]
    fn apply_functional_matches_double_loop_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = AlgebraShape::full(3);
        let w = sample::functional(&mut rng, &shape);
        let a = sample::element(&mut rng, &shape);
        let got = apply_functional(&w, &a).unwrap();
        // independent oracle: Tr(WA) = Σ_{j,k} W[j,k] A[k,j]
        let mut want = linalg::czero();
        for j in 0..3 {
            for k in 0..3 {
                want += w.blocks()[0][(j, k)] * a.blocks()[0][(k, j)];
            }
        }
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn apply_functional_rejects_shape_mismatch() {
        let w = NormalFunctional::from_real_diagonals(&[vec![1.0, 0.0]]).unwrap();
        let a = AlgebraElement::from_real_diagonals(&[vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(apply_functional(&w, &a), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn polar_of_identity_is_trivial() {
        let shape = AlgebraShape::full(2);
        let w = NormalFunctional::new(shape, vec![linalg::identity(2)]).unwrap();
        let p = polar_decompose(&w).unwrap();
        assert!(linalg::frob_norm(&(&p.u.blocks()[0] - linalg::identity(2))) < 1e-12);
        assert!(linalg::frob_norm(&(&p.rho.blocks()[0] - linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn polar_of_rank_one_shift() {
        let w = NormalFunctional::from_blocks(vec![cmat(
            2,
            &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        )])
        .unwrap();
        let p = polar_decompose(&w).unwrap();
        let rho = &p.rho.blocks()[0];
        assert!(rho[(0, 0)].norm() < 1e-12 && (rho[(1, 1)] - linalg::cone()).norm() < 1e-12);
        let utu = p.u.blocks()[0].adjoint() * &p.u.blocks()[0];
        assert!((utu[(1, 1)] - linalg::cone()).norm() < 1e-12);
        assert!(utu[(0, 0)].norm() < 1e-12);
        assert!((p.u.blocks()[0][(0, 1)] - linalg::cone()).norm() < 1e-12);
    }

    #[test]
    fn polar_reconstructs_random_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = AlgebraShape::new(vec![3, 2]).unwrap();
        let w = sample::functional(&mut rng, &shape);
        let p = polar_decompose(&w).unwrap();
        for i in 0..2 {
            let rebuilt = &p.u.blocks()[i] * &p.rho.blocks()[i];
            assert!(linalg::frob_norm(&(rebuilt - &w.blocks()[i])) < 1e-10);
            let utu = p.u.blocks()[i].adjoint() * &p.u.blocks()[i];
            assert!(linalg::frob_norm(&(utu - &p.support.blocks()[i])) < 1e-10);
        }
        // support projection is idempotent and hermitian
        for b in p.support.blocks() {
            assert!(linalg::frob_norm(&(b * b - b)) < 1e-10);
            assert!(linalg::is_hermitian(b, 1e-10));
        }
    }

    #[test]
    fn polar_of_zero_functional() {
        let shape = AlgebraShape::full(2);
        let w = NormalFunctional::zero(&shape);
        let p = polar_decompose(&w).unwrap();
        assert!(p.u.is_zero(1e-15));
        assert!(p.rho.is_zero(1e-15));
    }

    #[test]
    fn support_projection_of_diagonal() {
        let rho = NormalFunctional::from_real_diagonals(&[vec![0.5, 0.0]]).unwrap();
        let s = support_projection(&rho).unwrap();
        assert!((s.blocks()[0][(0, 0)] - linalg::cone()).norm() < 1e-12);
        assert!(s.blocks()[0][(1, 1)].norm() < 1e-12);
        let id = NormalFunctional::new(AlgebraShape::full(2), vec![linalg::identity(2)]).unwrap();
        let si = support_projection(&id).unwrap();
        assert!(linalg::frob_norm(&(&si.blocks()[0] - linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn support_projection_of_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = sample::complex_gaussian(&mut rng, 3, 1);
        let v = &g * Complex64::new(1.0 / linalg::frob_norm(&g), 0.0);
        let w = NormalFunctional::from_blocks(vec![&v * v.adjoint()]).unwrap();
        let p = support_projection(&w).unwrap();
        assert!((linalg::trace(&p.blocks()[0]).re - 1.0).abs() < 1e-10);
        let pv = &p.blocks()[0] * &v;
        assert!(linalg::frob_norm(&(pv - &v)) < 1e-10);
    }

    #[test]
    fn support_projection_rejects_non_positive() {
        let w = NormalFunctional::from_real_diagonals(&[vec![1.0, -0.5]]).unwrap();
        assert!(matches!(support_projection(&w), Err(Error::NotPositive)));
    }

    #[test]
    fn classify_diagonal_state() {
        let w = NormalFunctional::from_real_diagonals(&[vec![0.3, 0.7]]).unwrap();
        let c = classify_functional(&w);
        assert!(c.hermitian && c.positive);
        assert!((c.norm_1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_nilpotent_block() {
        let w = NormalFunctional::from_blocks(vec![cmat(
            2,
            &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        )])
        .unwrap();
        let c = classify_functional(&w);
        assert!(!c.hermitian && !c.positive);
        assert!((c.norm_1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_hermitian_norm_is_sum_of_abs_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shape = AlgebraShape::full(4);
        let w = sample::hermitian_functional(&mut rng, &shape);
        let c = classify_functional(&w);
        assert!(c.hermitian);
        let (vals, _) = linalg::hermitian_eig(&w.blocks()[0]);
        let want: f64 = vals.iter().map(|v| v.abs()).sum();
        assert!((c.norm_1 - want).abs() < 1e-10);
    }

    #[test]
    fn functional_bound_by_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let shape = AlgebraShape::new(vec![2, 3]).unwrap();
        for _ in 0..50 {
            let w = sample::functional(&mut rng, &shape);
            let a = sample::element(&mut rng, &shape);
            let lhs = apply_functional(&w, &a).unwrap().norm();
            let rhs = w.norm_one() * a.operator_norm();
            assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
        }
    }

    #[test]
    fn scalar_blocks_reduce_to_complex_arithmetic() {
        let shape = AlgebraShape::commutative(3);
        let wv = [Complex64::new(0.5, 0.25), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)];
        let av = [Complex64::new(1.0, -1.0), Complex64::new(2.0, 0.5), Complex64::new(0.0, 1.0)];
        let w = NormalFunctional::new(
            shape.clone(),
            wv.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        )
        .unwrap();
        let a = AlgebraElement::new(
            shape,
            av.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        )
        .unwrap();
        let got = apply_functional(&w, &a).unwrap();
        let want: Complex64 = wv.iter().zip(&av).map(|(x, y)| x * y).sum();
        assert!((got - want).norm() < 1e-14);

        // polar of a scalar is the phase/modulus factorization
        let p = polar_decompose(&w).unwrap();
        for (i, &z) in wv.iter().enumerate() {
            let u = p.u.blocks()[i][(0, 0)];
            let r = p.rho.blocks()[i][(0, 0)];
            assert!((u * r - z).norm() < 1e-12);
            assert!((r.re - z.norm()).abs() < 1e-12 && r.im.abs() < 1e-14);
        }
        assert!((w.norm_one() - wv.iter().map(|z| z.norm()).sum::<f64>()).abs() < 1e-12);
    }
}
