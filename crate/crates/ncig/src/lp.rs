//! The Schatten space `L_p(M)` for `1 < p < ∞`, the α-embeddings of the
//! predual, Hölder products, the duality map and the potential functions.
//!
//! Everything is expressed in the canonical representation: an abstract
//! L_p element is stored as the matrix `X = u ρ^{1/p}` per block, so the
//! pairing `⟨X,Y⟩ = Σ_i Tr(X_i† Y_i)` never sees the reference weight.
//! The α-embedding with `p = 2/(1−α)` is
//!
//! ```text
//!     ℓ_α(ω) = p · u · ρ^{1/p},      ω = u·ρ the polar decomposition,
//! ```
//!
//! and the duality map sends `x = p·u·m` to `x̃ = q·u·m^{p−1}`, the
//! `−α`-coordinate of the same functional.

use num_complex::Complex64;

use crate::algebra::{AlgebraShape, NormalFunctional};
use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// Admitted range for the order `p`; the endpoints `1` and `∞` live in
/// `NormalFunctional` and `AlgebraElement` instead.
pub const ORDER_MIN: f64 = 1.0 + 1e-6;
pub const ORDER_MAX: f64 = 1e6;

const CONJUGACY_TOL: f64 = 1e-12;

/// An element of `L_p(M)` in canonical representation: per-block complex
/// matrices plus the order `p ∈ (1, ∞)`.
#[derive(Debug, Clone)]
pub struct LpVector {
    shape: AlgebraShape,
    order: f64,
    blocks: Vec<CMat>,
}

impl LpVector {
    pub fn new(shape: AlgebraShape, order: f64, blocks: Vec<CMat>) -> Result<Self> {
        check_order(order)?;
        shape.check_blocks(&blocks)?;
        Ok(Self { shape, order, blocks })
    }

    pub fn from_blocks(order: f64, blocks: Vec<CMat>) -> Result<Self> {
        check_order(order)?;
        let dims = blocks.iter().map(|b| b.nrows()).collect();
        let shape = AlgebraShape::new(dims)?;
        shape.check_blocks(&blocks)?;
        Ok(Self { shape, order, blocks })
    }

    pub fn zero(shape: &AlgebraShape, order: f64) -> Result<Self> {
        check_order(order)?;
        let blocks = shape.block_dims().iter().map(|&n| CMat::zeros(n, n)).collect();
        Ok(Self { shape: shape.clone(), order, blocks })
    }

    /// Single-block diagonal vector with real entries.
    pub fn from_real_diag(entries: &[f64], order: f64) -> Self {
        let n = entries.len();
        let block = CMat::from_fn(n, n, |r, c| {
            if r == c { linalg::creal(entries[r]) } else { linalg::czero() }
        });
        Self::from_blocks(order, vec![block]).expect("valid diagonal block")
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// The conjugate order `q = p/(p−1)`.
    pub fn conjugate_order(&self) -> f64 {
        conjugate_order(self.order)
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// The Schatten norm `‖X‖_p = (Σ_i Σ_j s_j(X_i)^p)^{1/p}`.
    pub fn norm(&self) -> f64 {
        linalg::schatten_norm(&self.blocks, self.order).unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| linalg::max_abs(b) <= tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.blocks.iter().all(|b| linalg::is_hermitian(b, 1e-10))
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.is_hermitian()
            && self.blocks.iter().all(|b| {
                let scale = 1.0 + linalg::max_abs(b);
                linalg::min_eigenvalue(&((b + b.adjoint()) * linalg::creal(0.5)))
                    >= -1e-10 * scale
            })
    }

    /// Blockwise left action `a·X` of an algebra element.
    pub fn act_left(&self, a: &crate::algebra::AlgebraElement) -> Result<LpVector> {
        self.shape.ensure_same(a.shape())?;
        let blocks = a
            .blocks()
            .iter()
            .zip(&self.blocks)
            .map(|(ab, xb)| ab * xb)
            .collect();
        Ok(LpVector { shape: self.shape.clone(), order: self.order, blocks })
    }

    pub(crate) fn same_space(&self, other: &LpVector) -> Result<()> {
        self.shape.ensure_same(&other.shape)?;
        if (self.order - other.order).abs() > 1e-9 * self.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }
}

impl std::ops::Add for &LpVector {
    type Output = LpVector;
    fn add(self, rhs: &LpVector) -> LpVector {
        self.same_space(rhs).expect("same space");
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect();
        LpVector { shape: self.shape.clone(), order: self.order, blocks }
    }
}

impl std::ops::Sub for &LpVector {
    type Output = LpVector;
    fn sub(self, rhs: &LpVector) -> LpVector {
        self.same_space(rhs).expect("same space");
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect();
        LpVector { shape: self.shape.clone(), order: self.order, blocks }
    }
}

impl std::ops::Mul<f64> for &LpVector {
    type Output = LpVector;
    fn mul(self, rhs: f64) -> LpVector {
        let blocks = self.blocks.iter().map(|b| b * linalg::creal(rhs)).collect();
        LpVector { shape: self.shape.clone(), order: self.order, blocks }
    }
}

impl std::ops::Neg for &LpVector {
    type Output = LpVector;
    fn neg(self) -> LpVector {
        self * -1.0
    }
}

fn check_order(order: f64) -> Result<()> {
    if !(ORDER_MIN..=ORDER_MAX).contains(&order) {
        return Err(Error::OrderOutOfRange(order));
    }
    Ok(())
}

/// `q = p/(p−1)`.
pub fn conjugate_order(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The order `p = 2/(1−α)` of the α-embedding, with `α ∈ (−1, 1)`.
pub fn alpha_to_order(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= -1.0 || alpha >= 1.0 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let p = 2.0 / (1.0 - alpha);
    check_order(p)?;
    Ok(p)
}

/// Inverse of [`alpha_to_order`].
pub fn order_to_alpha(p: f64) -> f64 {
    1.0 - 2.0 / p
}

/// The α-embedding `ℓ_α(ω) = p·u·ρ^{1/p}` with `p = 2/(1−α)`.
///
/// The matrix power is taken on the support of `ρ` and is zero on its
/// kernel, matching the relative modular operator's behavior.
pub fn alpha_embed(omega: &NormalFunctional, alpha: f64) -> Result<LpVector> {
    let p = alpha_to_order(alpha)?;
    let blocks = omega
        .blocks()
        .iter()
        .map(|w| {
            linalg::map_singular_values(w, |s| p * s.powf(1.0 / p))
        })
        .collect::<Result<Vec<_>>>()?;
    LpVector::new(omega.shape().clone(), p, blocks)
}

/// Inverse of the α-embedding: `X = p·u·m` maps back to `ω = u·m^p`.
pub fn alpha_unembed(x: &LpVector, alpha: f64) -> Result<NormalFunctional> {
    let p = alpha_to_order(alpha)?;
    if (x.order() - p).abs() > 1e-9 * p {
        return Err(Error::OrderAlphaMismatch { order: x.order(), alpha, expected: p });
    }
    let blocks = x
        .blocks()
        .iter()
        .map(|b| linalg::map_singular_values(b, |s| (s / p).powf(p)))
        .collect::<Result<Vec<_>>>()?;
    NormalFunctional::new(x.shape().clone(), blocks)
}

/// The Schatten norm of an L_p vector at its own order.
pub fn schatten_norm(x: &LpVector) -> f64 {
    x.norm()
}

fn ensure_conjugate(p: f64, q: f64) -> Result<()> {
    if (1.0 / p + 1.0 / q - 1.0).abs() > CONJUGACY_TOL {
        return Err(Error::NotConjugate { p, q });
    }
    Ok(())
}

/// Sesquilinear pairing `⟨X,Y⟩ = Σ_i Tr(X_i† Y_i)` of `X ∈ L_p` and
/// `Y ∈ L_q`, conjugate-linear in the first argument.
pub fn pairing(x: &LpVector, y: &LpVector) -> Result<Complex64> {
    x.shape().ensure_same(y.shape())?;
    ensure_conjugate(x.order(), y.order())?;
    let mut acc = linalg::czero();
    for (a, b) in x.blocks().iter().zip(y.blocks()) {
        acc += linalg::trace(&(a.adjoint() * b));
    }
    Ok(acc)
}

/// Bilinear form `[X,Y] = Σ_i Tr(X_i Y_i)` on `L_p × L_q`.
pub fn bilinear_form(x: &LpVector, y: &LpVector) -> Result<Complex64> {
    x.shape().ensure_same(y.shape())?;
    ensure_conjugate(x.order(), y.order())?;
    let mut acc = linalg::czero();
    for (a, b) in x.blocks().iter().zip(y.blocks()) {
        acc += linalg::trace(&(a * b));
    }
    Ok(acc)
}

/// Blockwise product of L_p vectors, an element of `L_r` with
/// `1/r = Σ_k 1/p_k ≤ 1`. The endpoint `r = 1` is reachable here and is
/// reported through [`HolderProduct::trace_form`] and
/// [`HolderProduct::norm`]; it does not convert back into an [`LpVector`].
#[derive(Debug, Clone)]
pub struct HolderProduct {
    shape: AlgebraShape,
    order: f64,
    blocks: Vec<CMat>,
}

impl HolderProduct {
    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    /// The induced order `r`.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// Schatten norm at the induced order, valid for any `r ≥ 1`.
    pub fn norm(&self) -> f64 {
        linalg::schatten_norm(&self.blocks, self.order).unwrap_or(f64::NAN)
    }

    /// The bilinear value `[T_1 … T_n] = Σ_i Tr(product block)`, the `L_1`
    /// evaluation of the product against the identity.
    pub fn trace_form(&self) -> Complex64 {
        self.blocks.iter().map(linalg::trace).sum()
    }

    /// Converts into an [`LpVector`] when `r` lies strictly inside
    /// `(1, ∞)`.
    pub fn into_lp_vector(self) -> Result<LpVector> {
        LpVector::new(self.shape, self.order, self.blocks)
    }
}

/// Hölder product of factors with orders `p_1, …, p_n`: blockwise matrix
/// product with induced order `r`, `1/r = Σ_k 1/p_k`.
pub fn holder_product(factors: &[&LpVector]) -> Result<HolderProduct> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Domain("Hoelder product needs at least one factor".into()))?;
    let mut inv_sum = 0.0;
    for f in factors {
        first.shape().ensure_same(f.shape())?;
        inv_sum += 1.0 / f.order();
    }
    if inv_sum > 1.0 + CONJUGACY_TOL {
        return Err(Error::HolderOrders(inv_sum));
    }
    let r = 1.0 / inv_sum;
    let blocks = (0..first.shape().num_blocks())
        .map(|i| {
            let mut acc = factors[0].blocks()[i].clone();
            for f in &factors[1..] {
                acc = acc * &f.blocks()[i];
            }
            acc
        })
        .collect();
    Ok(HolderProduct { shape: first.shape().clone(), order: r, blocks })
}

/// The duality map `x ↦ x̃`: with `x/p = u·m` polar, returns
/// `x̃ = q·u·m^{p−1}` at the conjugate order `q`. Zero maps to zero, and
/// the map realizes `ℓ_{−α} ∘ ℓ_α^{-1}` on embedded functionals.
pub fn duality_map(x: &LpVector) -> Result<LpVector> {
    let p = x.order();
    let q = conjugate_order(p);
    let blocks = x
        .blocks()
        .iter()
        .map(|b| linalg::map_singular_values(b, |s| q * (s / p).powf(p - 1.0)))
        .collect::<Result<Vec<_>>>()?;
    LpVector::new(x.shape().clone(), q, blocks)
}

/// The norming functional of `x ≠ 0`: the unit-norm `v ∈ L_q` with
/// `Re⟨x/‖x‖_p, v⟩ = 1`, realized as `‖x/p‖_p^{1−p} · x̃/q`.
pub fn norming_functional(x: &LpVector) -> Result<LpVector> {
    if x.is_zero(0.0) {
        return Err(Error::ZeroVector);
    }
    let p = x.order();
    let q = conjugate_order(p);
    let scale = (x.norm() / p).powf(1.0 - p) / q;
    Ok(&duality_map(x)? * scale)
}

/// The potential `Ψ_p(x) = q·‖x/p‖_p^p`; on an embedded functional it
/// evaluates to `q·ρ(1)`.
pub fn potential(x: &LpVector) -> f64 {
    let p = x.order();
    let q = conjugate_order(p);
    q * (x.norm() / p).powf(p)
}

/// Directional derivative `D_y Ψ_p(x) = Re⟨y, x̃⟩`.
pub fn potential_directional_derivative(x: &LpVector, y: &LpVector) -> Result<f64> {
    x.same_space(y)?;
    Ok(pairing(y, &duality_map(x)?)?.re)
}

/// A duality-map evaluation together with the residuals of the two
/// defining identities `‖x̃/q‖_q^q = ‖x/p‖_p^p` and
/// `Re⟨x,x̃⟩ = pq·‖x/p‖_p^p`.
#[derive(Debug, Clone)]
pub struct DualityReport {
    pub x: LpVector,
    pub x_tilde: LpVector,
    pub norm_defect: f64,
    pub pairing_defect: f64,
}

pub fn duality_report(x: &LpVector) -> Result<DualityReport> {
    let p = x.order();
    let q = conjugate_order(p);
    let x_tilde = duality_map(x)?;
    let lhs = (x_tilde.norm() / q).powf(q);
    let rhs = (x.norm() / p).powf(p);
    let norm_defect = (lhs - rhs).abs();
    let pairing_defect = (pairing(x, &x_tilde)?.re - p * q * rhs).abs();
    Ok(DualityReport { x: x.clone(), x_tilde, norm_defect, pairing_defect })
}
