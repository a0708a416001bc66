//! The divergence `D_p` on `L_p`, the α-divergence `S_α` on the predual,
//! and the scalar bound functions `f_p`, `g_p`.
//!
//! `D_p(x,y) = Ψ_p(x) + Ψ_q(ỹ) − Re⟨x,ỹ⟩` is a Bregman-style quasi
//! distance; pulled back through the α-embedding it becomes
//!
//! ```text
//!     S_α(ω₁,ω₂) = q·‖ω₁‖₁ + p·‖ω₂‖₁ − pq·Re Σ_i Tr(ρ^{1/p} u† v ν^{1/q})
//! ```
//!
//! with `(u,ρ)`, `(v,ν)` the polar data of the two functionals and
//! `p = 2/(1−α)`.

use num_complex::Complex64;

use crate::algebra::NormalFunctional;
use crate::linalg;
use crate::lp::{
    alpha_embed, alpha_to_order, conjugate_order, duality_map, pairing, potential, LpVector,
};
use crate::{Error, Result};

/// A divergence evaluation: the value, the norm-ratio lower bound, and the
/// pairing cross term it was computed from.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceValue {
    pub value: f64,
    pub lower_bound: f64,
    pub cross_term: Complex64,
}

/// The two scalar bound functions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarBounds {
    pub f: f64,
    pub g: f64,
}

/// `f_p(t) = p + q·t^p − pq·t`, the norm-ratio bound under `D_p`.
pub fn f_p(t: f64, p: f64) -> f64 {
    let q = conjugate_order(p);
    p + q * t.powf(p) - p * q * t
}

/// `g_p(t) = p + q·t − pq·t^{1/p}`, the operator-convex integrand whose
/// quasi-entropy equals the α-divergence.
pub fn g_p(t: f64, p: f64) -> f64 {
    let q = conjugate_order(p);
    p + q * t - p * q * t.powf(1.0 / p)
}

/// `f_p(t) = p + q·t^p − pq·t` and `g_p(t) = p + q·t − pq·t^{1/p}` for
/// `t ≥ 0`, `p ∈ (1, ∞)`. Both vanish exactly at `t = 1` (since
/// `p + q = pq`) and are strictly positive elsewhere.
pub fn scalar_bounds(t: f64, p: f64) -> Result<ScalarBounds> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be a finite non-negative real")));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie in (1, inf)")));
    }
    Ok(ScalarBounds { f: f_p(t, p), g: g_p(t, p) })
}

/// `D_p(x,y) = Ψ_p(x) + Ψ_q(ỹ) − Re⟨x,ỹ⟩`, together with the lower bound
/// `‖y/p‖_p^p · f_p(‖x‖_p/‖y‖_p)` (zero when `y = 0`, by the limit
/// convention).
pub fn divergence_dp(x: &LpVector, y: &LpVector) -> Result<DivergenceValue> {
    x.same_space(y)?;
    let p = x.order();
    let y_tilde = duality_map(y)?;
    let cross_term = pairing(x, &y_tilde)?;
    let value = potential(x) + potential(&y_tilde) - cross_term.re;
    let ny = y.norm();
    let lower_bound = if ny == 0.0 {
        0.0
    } else {
        (ny / p).powf(p) * f_p(x.norm() / ny, p)
    };
    Ok(DivergenceValue { value, lower_bound, cross_term })
}

/// Residual of the cosine law
/// `D_p(x,y) + D_p(y,z) = D_p(x,z) + Re⟨x−y, z̃−ỹ⟩`.
pub fn cosine_residual(x: &LpVector, y: &LpVector, z: &LpVector) -> Result<f64> {
    x.same_space(y)?;
    x.same_space(z)?;
    let dxy = divergence_dp(x, y)?.value;
    let dyz = divergence_dp(y, z)?.value;
    let dxz = divergence_dp(x, z)?.value;
    let corr = pairing(&(x - y), &(&duality_map(z)? - &duality_map(y)?))?.re;
    Ok((dxy + dyz - dxz - corr).abs())
}

/// Residual of the duality symmetry `D_p(y,x) = D_q(x̃,ỹ)`.
pub fn duality_symmetry_residual(x: &LpVector, y: &LpVector) -> Result<f64> {
    x.same_space(y)?;
    let lhs = divergence_dp(y, x)?.value;
    let rhs = divergence_dp(&duality_map(x)?, &duality_map(y)?)?.value;
    Ok((lhs - rhs).abs())
}

/// The α-divergence `S_α(ω₁,ω₂) = D_p(ℓ_α(ω₁), ℓ_α(ω₂))`, evaluated from
/// the polar data of the two functionals. `cross_term` holds the full
/// pairing `⟨ℓ_α(ω₁), ℓ_{−α}(ω₂)⟩`; the lower bound is
/// `‖ω₂‖₁ · g_p(‖ω₁‖₁/‖ω₂‖₁)`.
pub fn alpha_divergence(
    omega1: &NormalFunctional,
    omega2: &NormalFunctional,
    alpha: f64,
) -> Result<DivergenceValue> {
    omega1.shape().ensure_same(omega2.shape())?;
    let p = alpha_to_order(alpha)?;
    let q = conjugate_order(p);
    let x = alpha_embed(omega1, alpha)?;
    let y_tilde = alpha_embed(omega2, -alpha)?;
    let cross_term = pairing(&x, &y_tilde)?;
    let n1 = omega1.norm_one();
    let n2 = omega2.norm_one();
    let value = q * n1 + p * n2 - cross_term.re;
    let lower_bound = if n2 == 0.0 { q * n1 } else { n2 * g_p(n1 / n2, p) };
    Ok(DivergenceValue { value, lower_bound, cross_term })
}

/// Residual of the generalized Pythagorean relation
/// `S_α(φ,ψ) + S_α(ψ,σ) = S_α(φ,σ) + Re⟨ℓ_α(φ)−ℓ_α(ψ), ℓ_{−α}(σ)−ℓ_{−α}(ψ)⟩`.
pub fn pythagorean_residual(
    phi: &NormalFunctional,
    psi: &NormalFunctional,
    sigma: &NormalFunctional,
    alpha: f64,
) -> Result<f64> {
    let s1 = alpha_divergence(phi, psi, alpha)?.value;
    let s2 = alpha_divergence(psi, sigma, alpha)?.value;
    let s3 = alpha_divergence(phi, sigma, alpha)?.value;
    let d_plus = &alpha_embed(phi, alpha)? - &alpha_embed(psi, alpha)?;
    let d_minus = &alpha_embed(sigma, -alpha)? - &alpha_embed(psi, -alpha)?;
    let corr = pairing(&d_plus, &d_minus)?.re;
    Ok((s1 + s2 - s3 - corr).abs())
}

/// Gaps of the two `(1±α)`-scaling inequalities for `−1 < α ≤ β < 1`:
/// `gap1 = (1−α)S_α − (1−β)S_β ≥ 0` and `gap2 = (1+β)S_β − (1+α)S_α ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingGaps {
    pub gap1: f64,
    pub gap2: f64,
}

pub fn scaling_inequality_gap(
    phi: &NormalFunctional,
    psi: &NormalFunctional,
    alpha: f64,
    beta: f64,
) -> Result<ScalingGaps> {
    if !phi.is_positive() || !psi.is_positive() {
        return Err(Error::NotPositive);
    }
    if alpha > beta {
        return Err(Error::Domain(format!("need alpha <= beta, got {alpha} > {beta}")));
    }
    let s_alpha = alpha_divergence(phi, psi, alpha)?.value;
    let s_beta = alpha_divergence(phi, psi, beta)?.value;
    Ok(ScalingGaps {
        gap1: (1.0 - alpha) * s_alpha - (1.0 - beta) * s_beta,
        gap2: (1.0 + beta) * s_beta - (1.0 + alpha) * s_alpha,
    })
}

/// The Hellinger form of the 0-divergence,
/// `S_0 = 2·Σ_i ‖u ρ^{1/2} − v ν^{1/2}‖_F²`, which must agree with
/// [`alpha_divergence`] at `α = 0`.
pub fn hellinger_s0(omega1: &NormalFunctional, omega2: &NormalFunctional) -> Result<f64> {
    omega1.shape().ensure_same(omega2.shape())?;
    let mut acc = 0.0;
    for (a, b) in omega1.blocks().iter().zip(omega2.blocks()) {
        let sa = linalg::map_singular_values(a, f64::sqrt)?;
        let sb = linalg::map_singular_values(b, f64::sqrt)?;
        acc += linalg::frob_norm(&(sa - sb)).powi(2);
    }
    Ok(2.0 * acc)
}

/// `S_α` restricted to the unit sphere of `M_*`:
/// `pq·(1 − Re Σ_i Tr(ρ^{1/p} u† v ν^{1/q}))` for unit-norm functionals,
/// where it agrees with the general formula since `p + q = pq`.
pub fn sphere_divergence(
    omega1: &NormalFunctional,
    omega2: &NormalFunctional,
    alpha: f64,
) -> Result<f64> {
    omega1.shape().ensure_same(omega2.shape())?;
    let p = alpha_to_order(alpha)?;
    let q = conjugate_order(p);
    for w in [omega1, omega2] {
        let n = w.norm_one();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitNorm(n));
        }
    }
    let x = alpha_embed(omega1, alpha)?;
    let y_tilde = alpha_embed(omega2, -alpha)?;
    let c = pairing(&x, &y_tilde)?.re / (p * q);
    Ok(p * q * (1.0 - c))
}
