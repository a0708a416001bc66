//! `D_p`-projections onto convex subsets of `L_p` with optimality
//! certificates, α-projections on the predual, and the sphere tangent
//! projector.
//!
//! The solver is projected gradient with Armijo backtracking on the finite
//! parameterization of the set (cone coefficients, affine coordinates, or
//! the ball with radial clipping). Since `D_p(·,y)` is convex, first-order
//! stationarity on the convex parameter set is global, and the minimizer
//! is unique whenever it exists.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraShape, NormalFunctional};
use crate::divergence::{alpha_divergence, divergence_dp};
use crate::linalg;
use crate::lp::{
    alpha_embed, alpha_to_order, alpha_unembed, conjugate_order, duality_map, pairing, LpVector,
};
use crate::sample;
use crate::{Error, Result};

/// A convex subset of an L_p space, given by a finite parameterization.
#[derive(Debug, Clone)]
pub enum ConvexSetSpec {
    /// `{ Σ_i t_i·g_i : t_i ≥ 0 }` — contains zero; the embedded form of
    /// an extended α-family generated by finitely many elements.
    ConeHull { generators: Vec<LpVector> },
    /// `{ base + Σ_j s_j·d_j : s ∈ R^m }`.
    AffineSlice { base: LpVector, directions: Vec<LpVector> },
    /// `{ x : ‖x − center‖_p ≤ radius }`.
    NormBall { center: LpVector, radius: f64 },
}

impl ConvexSetSpec {
    pub fn cone(generators: Vec<LpVector>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::DegenerateSet("cone needs at least one generator".into()))?
            .clone();
        for g in &generators {
            first.same_space(g)?;
        }
        Ok(ConvexSetSpec::ConeHull { generators })
    }

    pub fn affine(base: LpVector, directions: Vec<LpVector>) -> Result<Self> {
        for d in &directions {
            base.same_space(d)?;
        }
        Ok(ConvexSetSpec::AffineSlice { base, directions })
    }

    pub fn ball(center: LpVector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::DegenerateSet(format!("ball radius {radius} must be positive")));
        }
        Ok(ConvexSetSpec::NormBall { center, radius })
    }

    fn reference(&self) -> &LpVector {
        match self {
            ConvexSetSpec::ConeHull { generators } => &generators[0],
            ConvexSetSpec::AffineSlice { base, .. } => base,
            ConvexSetSpec::NormBall { center, .. } => center,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.reference().shape()
    }

    pub fn order(&self) -> f64 {
        self.reference().order()
    }

    /// Whether `0` belongs to the set (derived, not stored).
    pub fn contains_zero(&self) -> bool {
        match self {
            ConvexSetSpec::ConeHull { .. } => true,
            _ => {
                let zero = LpVector::zero(self.shape(), self.order()).expect("valid order");
                self.membership_residual(&zero).map(|r| r <= 1e-9).unwrap_or(false)
            }
        }
    }

    /// Distance-like residual of `x` from the set: Frobenius residual of
    /// the best parameterized fit (cone/affine), or the p-norm excess over
    /// the radius (ball). Zero (up to solver accuracy) iff `x` is a member.
    pub fn membership_residual(&self, x: &LpVector) -> Result<f64> {
        self.reference().same_space(x)?;
        match self {
            ConvexSetSpec::ConeHull { generators } => {
                let (_, residual) = nnls_fit(generators, x);
                Ok(residual)
            }
            ConvexSetSpec::AffineSlice { base, directions } => {
                let target = x - base;
                let (_, residual) = lstsq_fit(directions, &target);
                Ok(residual)
            }
            ConvexSetSpec::NormBall { center, radius } => {
                Ok(((x - center).norm() - radius).max(0.0))
            }
        }
    }

    /// Draws a member of the set; `anchor` sets the sampling scale so the
    /// draws straddle the region of interest.
    fn sample_member<R: Rng>(&self, rng: &mut R, anchor: &LpVector) -> LpVector {
        match self {
            ConvexSetSpec::ConeHull { generators } => {
                let n = generators.len();
                let mean_norm = generators.iter().map(|g| g.norm()).sum::<f64>() / n as f64;
                let scale = (1.0 + anchor.norm()) / (1.0 + mean_norm);
                let radius = 2.0 * scale * rng.random::<f64>();
                // Dirichlet(1,…,1) weights via normalized exponentials
                let exps: Vec<f64> = (0..n)
                    .map(|_| -f64::ln(1.0 - rng.random::<f64>()))
                    .collect();
                let total: f64 = exps.iter().sum();
                let mut acc = LpVector::zero(self.shape(), self.order()).expect("valid order");
                for (g, e) in generators.iter().zip(&exps) {
                    acc = &acc + &(g * (radius * e / total));
                }
                acc
            }
            ConvexSetSpec::AffineSlice { base, directions } => {
                let (coords, _) = lstsq_fit(directions, &(anchor - base));
                let spread = 1.0 + coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                let mut acc = base.clone();
                for (d, c0) in directions.iter().zip(&coords) {
                    let jitter: f64 = rng.sample(rand_distr::StandardNormal);
                    acc = &acc + &(d * (c0 + spread * jitter));
                }
                acc
            }
            ConvexSetSpec::NormBall { center, radius } => {
                let dir = sample::lp_vector(rng, self.shape(), self.order());
                let dir_norm = dir.norm();
                let r = *radius * rng.random::<f64>();
                if dir_norm == 0.0 {
                    center.clone()
                } else {
                    center + &(&dir * (r / dir_norm))
                }
            }
        }
    }

    /// Deterministic members worth checking in every certificate: the
    /// apex and generators (cone), the base (affine), center and a
    /// boundary point (ball).
    fn distinguished_members(&self) -> Vec<LpVector> {
        match self {
            ConvexSetSpec::ConeHull { generators } => {
                let mut pts =
                    vec![LpVector::zero(self.shape(), self.order()).expect("valid order")];
                pts.extend(generators.iter().cloned());
                pts
            }
            ConvexSetSpec::AffineSlice { base, .. } => vec![base.clone()],
            ConvexSetSpec::NormBall { center, radius } => {
                let mut pts = vec![center.clone()];
                let id_blocks = center
                    .shape()
                    .block_dims()
                    .iter()
                    .map(|&n| linalg::identity(n))
                    .collect();
                let id = LpVector::new(center.shape().clone(), center.order(), id_blocks)
                    .expect("identity blocks");
                let id_norm = id.norm();
                pts.push(center + &(&id * (*radius / id_norm)));
                pts
            }
        }
    }
}

/// Real Frobenius inner product `Re Σ_i Tr(A_i† B_i)` used for
/// parameterizations; deliberately ignores the orders.
fn re_inner(a: &LpVector, b: &LpVector) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.blocks().iter().zip(b.blocks()) {
        acc += linalg::trace(&(x.adjoint() * y)).re;
    }
    acc
}

fn frob_norm_vec(a: &LpVector) -> f64 {
    re_inner(a, a).max(0.0).sqrt()
}

/// Non-negative least squares `min ‖Σ t_i g_i − x‖_F, t ≥ 0` by projected
/// gradient with a Lipschitz step; returns coefficients and the residual.
fn nnls_fit(generators: &[LpVector], x: &LpVector) -> (Vec<f64>, f64) {
    let n = generators.len();
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        rhs[i] = re_inner(&generators[i], x);
        for j in 0..n {
            gram[i][j] = re_inner(&generators[i], &generators[j]);
        }
    }
    // exact cyclic coordinate descent on the quadratic
    let scale = (0..n).map(|i| gram[i][i]).fold(0.0_f64, f64::max).max(1e-300);
    let mut t = vec![0.0; n];
    for _ in 0..20_000 {
        let mut shift = 0.0_f64;
        for i in 0..n {
            if gram[i][i] <= 1e-300 {
                continue;
            }
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| gram[i][j] * t[j]).sum();
            let ti = ((rhs[i] - off) / gram[i][i]).max(0.0);
            shift = shift.max((ti - t[i]).abs());
            t[i] = ti;
        }
        if shift < 1e-15 * (1.0 + scale) {
            break;
        }
    }
    let mut fit = LpVector::zero(x.shape(), x.order()).expect("valid order");
    for (g, &ti) in generators.iter().zip(&t) {
        fit = &fit + &(g * ti);
    }
    let residual = frob_norm_vec(&(&fit - x));
    (t, residual)
}

/// Least squares `min ‖Σ s_j d_j − x‖_F` over real coordinates; returns
/// coordinates and the residual.
fn lstsq_fit(directions: &[LpVector], x: &LpVector) -> (Vec<f64>, f64) {
    let m = directions.len();
    if m == 0 {
        return (Vec::new(), frob_norm_vec(x));
    }
    let gram = nalgebra::DMatrix::<f64>::from_fn(m, m, |i, j| {
        re_inner(&directions[i], &directions[j])
    });
    let rhs = nalgebra::DVector::<f64>::from_fn(m, |i, _| re_inner(&directions[i], x));
    let svd = gram.svd(true, true);
    let coords = svd
        .solve(&rhs, 1e-12)
        .unwrap_or_else(|_| nalgebra::DVector::zeros(m));
    let mut fit = LpVector::zero(x.shape(), x.order()).expect("valid order");
    for (d, &c) in directions.iter().zip(coords.iter()) {
        fit = &fit + &(d * c);
    }
    let residual = frob_norm_vec(&(&fit - x));
    (coords.iter().copied().collect(), residual)
}

/// Options for [`project_dp`] and [`alpha_project`].
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Convergence threshold on the projected-gradient residual.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Seeds the start-point jitter and the certificate sampling.
    pub seed: u64,
    /// Sample count for the three-point certificate.
    pub certificate_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iter: 10_000, seed: 0, certificate_samples: 200 }
    }
}

/// Outcome of a `D_p`-projection.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub x_m: LpVector,
    /// `D_p(x_m, y)` at the optimum.
    pub value: f64,
    /// Sup-norm of the unit-step projected-gradient mapping at `x_m`.
    pub kkt_residual: f64,
    /// Worst sampled three-point defect `D(x,x_m)+D(x_m,y)−D(x,y)`.
    pub three_point_worst: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The unique `D_p`-projection of `y` onto the set, by projected gradient
/// with Armijo backtracking (shrink 0.5, slope factor 1e-4).
pub fn project_dp(
    y: &LpVector,
    set: &ConvexSetSpec,
    opts: &SolverOptions,
) -> Result<ProjectionResult> {
    y.same_space(set.reference())?;
    let mut rng = sample::rng(opts.seed.wrapping_add(0x9e37_79b9));
    let (x_m, iterations, kkt_residual, converged) = match set {
        ConvexSetSpec::ConeHull { generators } => {
            let n = generators.len();
            let init: Vec<f64> = (0..n)
                .map(|_| (1.0 + rng.random::<f64>()) / n as f64)
                .collect();
            solve_coefficients(y, generators, None, true, init, opts)?
        }
        ConvexSetSpec::AffineSlice { base, directions } => {
            let init: Vec<f64> = (0..directions.len())
                .map(|_| {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    0.1 * z
                })
                .collect();
            solve_coefficients(y, directions, Some(base), false, init, opts)?
        }
        ConvexSetSpec::NormBall { center, radius } => {
            solve_ball(y, center, *radius, opts, &mut rng)?
        }
    };
    let value = divergence_dp(&x_m, y)?.value;
    let three_point_worst =
        three_point_certificate(&x_m, y, set, opts.certificate_samples, opts.seed)?;
    Ok(ProjectionResult { x_m, value, kkt_residual, three_point_worst, iterations, converged })
}

fn objective(x: &LpVector, y_tilde: &LpVector, psi_q_y: f64) -> f64 {
    // D_p(x, y) with the y-terms precomputed
    crate::lp::potential(x) + psi_q_y - pairing(x, y_tilde).map(|c| c.re).unwrap_or(f64::NAN)
}

fn solve_coefficients(
    y: &LpVector,
    atoms: &[LpVector],
    base: Option<&LpVector>,
    nonneg: bool,
    init: Vec<f64>,
    opts: &SolverOptions,
) -> Result<(LpVector, usize, f64, bool)> {
    let y_tilde = duality_map(y)?;
    let psi_q_y = crate::lp::potential(&y_tilde);
    // allowance for objective evaluations at the rounding floor
    let noise = 1e-14 * (1.0 + psi_q_y.abs());
    let x_of = |t: &[f64]| -> LpVector {
        let mut acc = match base {
            Some(b) => b.clone(),
            None => LpVector::zero(y.shape(), y.order()).expect("valid order"),
        };
        for (a, &ti) in atoms.iter().zip(t) {
            acc = &acc + &(a * ti);
        }
        acc
    };
    let retract = |t: &mut [f64]| {
        if nonneg {
            for v in t.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
    };

    let mut t = init;
    retract(&mut t);
    let mut x = x_of(&t);
    let mut f = objective(&x, &y_tilde, psi_q_y);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut kkt = f64::INFINITY;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (t, grad) of last iterate

    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        let x_tilde = duality_map(&x)?;
        let field = &x_tilde - &y_tilde;
        let grad: Vec<f64> = atoms.iter().map(|a| pairing_re(a, &field)).collect();

        // unit-step projected-gradient residual
        kkt = 0.0;
        for (i, &g) in grad.iter().enumerate() {
            let mut trial = t[i] - g;
            if nonneg && trial < 0.0 {
                trial = 0.0;
            }
            kkt = kkt.max((t[i] - trial).abs());
        }
        if kkt <= opts.tolerance {
            return Ok((x, iterations, kkt, true));
        }

        // Barzilai-Borwein trial step, safeguarded
        if let Some((t_old, g_old)) = &prev {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..t.len() {
                let ds = t[i] - t_old[i];
                let dg = grad[i] - g_old[i];
                num += ds * ds;
                den += ds * dg;
            }
            if den > 0.0 && num > 0.0 {
                step = (num / den).clamp(1e-10, 1e10);
            } else {
                step = (step * 2.0).min(1e10);
            }
        }
        prev = Some((t.clone(), grad.clone()));

        // Armijo backtracking along the projected path
        let mut accepted = false;
        while step > 1e-18 {
            let mut t_new: Vec<f64> = t.iter().zip(&grad).map(|(ti, g)| ti - step * g).collect();
            retract(&mut t_new);
            let slope: f64 = t_new
                .iter()
                .zip(&t)
                .zip(&grad)
                .map(|((tn, ti), g)| g * (tn - ti))
                .sum();
            let x_new = x_of(&t_new);
            let f_new = objective(&x_new, &y_tilde, psi_q_y);
            if f_new <= f + 1e-4 * slope + noise {
                t = t_new;
                x = x_new;
                f = f_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((x, iterations, kkt, kkt <= opts.tolerance))
}

fn solve_ball(
    y: &LpVector,
    center: &LpVector,
    radius: f64,
    opts: &SolverOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(LpVector, usize, f64, bool)> {
    let y_tilde = duality_map(y)?;
    let psi_q_y = crate::lp::potential(&y_tilde);
    let noise = 1e-14 * (1.0 + psi_q_y.abs());
    let clip = |x: &LpVector| -> LpVector {
        let d = x - center;
        let n = d.norm();
        if n > radius { center + &(&d * (radius / n)) } else { x.clone() }
    };

    let jitter = sample::lp_vector(rng, y.shape(), y.order());
    let jn = jitter.norm().max(1e-300);
    let mut x = clip(&(center + &(&jitter * (0.1 * radius / jn))));
    let mut f = objective(&x, &y_tilde, psi_q_y);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut kkt = f64::INFINITY;
    let mut prev: Option<(LpVector, LpVector)> = None; // (x, grad) of last iterate

    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        let x_tilde = duality_map(&x)?;
        let grad = &x_tilde - &y_tilde;

        let probe = clip(&(&x - &rescale_order(&grad, x.order())));
        kkt = max_abs_diff(&x, &probe);
        if kkt <= opts.tolerance {
            return Ok((x, iterations, kkt, true));
        }

        if let Some((x_old, g_old)) = &prev {
            let ds = &x - x_old;
            let dg = &grad - g_old;
            let num = re_inner(&ds, &ds);
            let den = re_inner(&ds, &dg);
            if den > 0.0 && num > 0.0 {
                step = (num / den).clamp(1e-10, 1e10);
            } else {
                step = (step * 2.0).min(1e10);
            }
        }
        prev = Some((x.clone(), grad.clone()));

        let mut accepted = false;
        while step > 1e-18 {
            let x_new = clip(&(&x - &rescale_order(&(&grad * step), x.order())));
            let slope = re_inner(&grad, &(&x_new - &x));
            let f_new = objective(&x_new, &y_tilde, psi_q_y);
            if f_new <= f + 1e-4 * slope + noise {
                x = x_new;
                f = f_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((x, iterations, kkt, kkt <= opts.tolerance))
}

/// Reinterprets the blocks of a gradient field at the order of the primal
/// iterate so the subtraction is well-typed.
fn rescale_order(v: &LpVector, order: f64) -> LpVector {
    LpVector::new(v.shape().clone(), order, v.blocks().to_vec()).expect("valid order")
}

fn max_abs_diff(a: &LpVector, b: &LpVector) -> f64 {
    a.blocks()
        .iter()
        .zip(b.blocks())
        .map(|(x, y)| linalg::max_abs(&(x - y)))
        .fold(0.0, f64::max)
}

fn pairing_re(a: &LpVector, field: &LpVector) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.blocks().iter().zip(field.blocks()) {
        acc += linalg::trace(&(x.adjoint() * y)).re;
    }
    acc
}

fn three_point_certificate(
    x_m: &LpVector,
    y: &LpVector,
    set: &ConvexSetSpec,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = sample::rng(seed.wrapping_add(0x3c6e_f372));
    let d_my = divergence_dp(x_m, y)?.value;
    let mut worst = f64::NEG_INFINITY;
    let mut members = set.distinguished_members();
    members.extend((0..samples).map(|_| set.sample_member(&mut rng, x_m)));
    for x in &members {
        let lhs = divergence_dp(x, x_m)?.value + d_my;
        let rhs = divergence_dp(x, y)?.value;
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}

/// The two §-style optimality certificates at a feasible point.
#[derive(Debug, Clone, Copy)]
pub struct OptimalityResiduals {
    /// `max_x Re⟨x − x_m, ỹ − x̃_m⟩` over sampled members — at the true
    /// projection this is ≤ 0.
    pub normal_cone: f64,
    /// `max_x D(x,x_m) + D(x_m,y) − D(x,y)` over sampled members — at the
    /// true projection this is ≤ 0.
    pub three_point: f64,
}

/// Samples the set and evaluates both optimality certificates for a
/// candidate projection `x_m` of `y`. Errors when `x_m` is not a member.
pub fn optimality_residuals(
    x_m: &LpVector,
    y: &LpVector,
    set: &ConvexSetSpec,
    samples: usize,
    seed: u64,
) -> Result<OptimalityResiduals> {
    x_m.same_space(y)?;
    let membership = set.membership_residual(x_m)?;
    if membership > 1e-6 * (1.0 + x_m.norm()) {
        return Err(Error::NotInSet(membership));
    }
    let mut rng = sample::rng(seed);
    let mut members = set.distinguished_members();
    members.extend((0..samples).map(|_| set.sample_member(&mut rng, x_m)));

    let y_tilde = duality_map(y)?;
    let x_m_tilde = duality_map(x_m)?;
    let field = &y_tilde - &x_m_tilde;
    let d_my = divergence_dp(x_m, y)?.value;

    let mut normal_cone = f64::NEG_INFINITY;
    let mut three_point = f64::NEG_INFINITY;
    for x in &members {
        normal_cone = normal_cone.max(pairing_re(&(x - x_m), &field));
        let defect = divergence_dp(x, x_m)?.value + d_my - divergence_dp(x, y)?.value;
        three_point = three_point.max(defect);
    }
    Ok(OptimalityResiduals { normal_cone, three_point })
}

/// Membership in the sublevel set `U_{y,d} = {x : D_p(x,y) ≤ d}`.
pub fn sublevel_membership(y: &LpVector, d: f64, x: &LpVector) -> Result<bool> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::Domain(format!("sublevel level d = {d} must be non-negative")));
    }
    Ok(divergence_dp(x, y)?.value <= d)
}

/// An α-projection: the predual point, the underlying L_p projection, and
/// the sampled gap of the defining inequality
/// `S_α(σ,ψ) ≥ S_α(φ_m,ψ) + S_{−α}(φ_m,σ)` (non-negative at the optimum).
#[derive(Debug, Clone)]
pub struct AlphaProjection {
    pub omega_m: NormalFunctional,
    pub result: ProjectionResult,
    /// `min_σ S_α(σ,ψ) − S_α(φ_m,ψ) − S_{−α}(φ_m,σ)` over sampled `σ ∈ C`.
    pub inequality_gap: f64,
}

/// α-projection of `ψ` onto the α-convex set whose embedded form is
/// `set` (which must live at order `p = 2/(1−α)`).
pub fn alpha_project(
    psi: &NormalFunctional,
    set: &ConvexSetSpec,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<AlphaProjection> {
    let p = alpha_to_order(alpha)?;
    if (set.order() - p).abs() > 1e-9 * p {
        return Err(Error::OrderAlphaMismatch { order: set.order(), alpha, expected: p });
    }
    let y = alpha_embed(psi, alpha)?;
    let result = project_dp(&y, set, opts)?;
    let omega_m = alpha_unembed(&result.x_m, alpha)?;

    let s_mp = alpha_divergence(&omega_m, psi, alpha)?.value;
    let mut rng = sample::rng(opts.seed.wrapping_add(0x1b87_3593));
    let mut members = set.distinguished_members();
    members.extend(
        (0..opts.certificate_samples).map(|_| set.sample_member(&mut rng, &result.x_m)),
    );
    let mut gap = f64::INFINITY;
    for x in &members {
        let sigma = alpha_unembed(x, alpha)?;
        let lhs = alpha_divergence(&sigma, psi, alpha)?.value;
        let rhs = alpha_divergence(&omega_m, &sigma, -alpha)?.value;
        gap = gap.min(lhs - s_mp - rhs);
    }
    Ok(AlphaProjection { omega_m, result, inequality_gap: gap })
}

/// Tangent-plane projector at a point `x` of the radius-`p` sphere:
/// `π_x(y) = y − (1/pq)·Re⟨y,x̃⟩·x`, killing the radial component.
pub fn tangent_project(x: &LpVector, y: &LpVector) -> Result<LpVector> {
    x.same_space(y)?;
    let p = x.order();
    let q = conjugate_order(p);
    let n = x.norm();
    if (n - p).abs() > 1e-8 {
        return Err(Error::NotOnSphere { norm: n, p });
    }
    let x_tilde = duality_map(x)?;
    let radial = pairing(y, &x_tilde)?.re / (p * q);
    Ok(y - &(x * radial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use approx::assert_relative_eq;

    fn default_opts(seed: u64) -> SolverOptions {
        SolverOptions { seed, ..SolverOptions::default() }
    }

    #[test]
    fn cone_projection_p2_matches_closed_form() {
        let mut rng = sample::rng(100);
        let shape = AlgebraShape::full(3);
        for trial in 0..10 {
            let g1 = sample::lp_vector(&mut rng, &shape, 2.0);
            let y = sample::lp_vector(&mut rng, &shape, 2.0);
            let set = ConvexSetSpec::cone(vec![g1.clone()]).unwrap();
            let res = project_dp(&y, &set, &default_opts(trial)).unwrap();
            assert!(res.converged);
            let t_star = (re_inner(&g1, &y) / re_inner(&g1, &g1)).max(0.0);
            let want = &g1 * t_star;
            assert!(
                (&res.x_m - &want).norm() < 1e-7 * (1.0 + want.norm()),
                "trial {trial}: distance {}",
                (&res.x_m - &want).norm()
            );
        }
    }

    #[test]
    fn projection_of_member_is_identity() {
        let mut rng = sample::rng(101);
        let shape = AlgebraShape::full(2);
        let g1 = sample::positive_lp_vector(&mut rng, &shape, 3.0);
        let g2 = sample::positive_lp_vector(&mut rng, &shape, 3.0);
        let y = &(&g1 * 0.7) + &(&g2 * 1.3);
        let set = ConvexSetSpec::cone(vec![g1, g2]).unwrap();
        let res = project_dp(&y, &set, &default_opts(5)).unwrap();
        assert!(res.converged);
        assert!(res.value < 1e-10);
        assert!((&res.x_m - &y).norm() < 1e-5 * (1.0 + y.norm()));
    }

    #[test]
    fn cone_projection_is_unique_across_seeds() {
        let mut rng = sample::rng(102);
        let shape = AlgebraShape::full(2);
        let gens: Vec<LpVector> = (0..3)
            .map(|_| sample::positive_lp_vector(&mut rng, &shape, 3.0))
            .collect();
        let y = sample::lp_vector(&mut rng, &shape, 3.0);
        let set = ConvexSetSpec::cone(gens).unwrap();
        let r1 = project_dp(&y, &set, &default_opts(1)).unwrap();
        let r2 = project_dp(&y, &set, &default_opts(999)).unwrap();
        assert!(r1.converged && r2.converged);
        assert!(
            (&r1.x_m - &r2.x_m).norm() <= 1e-6 * (1.0 + r1.x_m.norm()),
            "seed disagreement {}",
            (&r1.x_m - &r2.x_m).norm()
        );
    }

    #[test]
    fn affine_projection_reaches_stationarity() {
        let mut rng = sample::rng(103);
        let shape = AlgebraShape::full(2);
        let base = sample::lp_vector(&mut rng, &shape, 1.5);
        let dirs: Vec<LpVector> = (0..2).map(|_| sample::lp_vector(&mut rng, &shape, 1.5)).collect();
        let y = sample::lp_vector(&mut rng, &shape, 1.5);
        let set = ConvexSetSpec::affine(base, dirs.clone()).unwrap();
        let res = project_dp(&y, &set, &default_opts(7)).unwrap();
        assert!(res.converged, "kkt = {}", res.kkt_residual);
        // stationarity along each direction
        let field = &duality_map(&res.x_m).unwrap() - &duality_map(&y).unwrap();
        for d in &dirs {
            assert!(pairing_re(d, &field).abs() < 1e-6);
        }
        assert!(res.three_point_worst <= 1e-6);
    }

    #[test]
    fn ball_projection_moves_to_boundary() {
        let mut rng = sample::rng(104);
        let shape = AlgebraShape::full(2);
        let center = LpVector::zero(&shape, 2.0).unwrap();
        let y = sample::lp_vector(&mut rng, &shape, 2.0);
        let radius = 0.5 * y.norm();
        let set = ConvexSetSpec::ball(center, radius).unwrap();
        let res = project_dp(&y, &set, &default_opts(8)).unwrap();
        assert!(res.converged);
        // at p = 2 the D_p projection onto the ball is the radial clip
        let want = &y * (radius / y.norm());
        assert!((&res.x_m - &want).norm() < 1e-6 * (1.0 + radius));
    }

    #[test]
    fn certificates_accept_optimum_and_reject_perturbations() {
        let mut rng = sample::rng(105);
        let shape = AlgebraShape::full(2);
        let g1 = sample::lp_vector(&mut rng, &shape, 2.0);
        let y = sample::lp_vector(&mut rng, &shape, 2.0);
        let set = ConvexSetSpec::cone(vec![g1.clone()]).unwrap();
        let t_star = (re_inner(&g1, &y) / re_inner(&g1, &g1)).max(0.0);
        let x_m = &g1 * t_star;
        let r = optimality_residuals(&x_m, &y, &set, 200, 42).unwrap();
        assert!(r.normal_cone <= 1e-8, "normal cone residual {}", r.normal_cone);
        assert!(r.three_point <= 1e-8, "three point residual {}", r.three_point);

        // x_m = y is certified trivially when y is in the set
        let ry = optimality_residuals(&y, &y, &ConvexSetSpec::cone(vec![y.clone()]).unwrap(), 50, 1)
            .unwrap();
        assert!(ry.normal_cone <= 1e-12 && ry.three_point <= 1e-12);

        // a feasible perturbation of the optimum must be detected
        let x_bad = &g1 * (t_star * 1.01 + 1e-2);
        let rb = optimality_residuals(&x_bad, &y, &set, 200, 43).unwrap();
        assert!(
            rb.normal_cone > 0.0 || rb.three_point > 0.0,
            "perturbed point not detected"
        );
    }

    #[test]
    fn optimality_rejects_non_members() {
        let mut rng = sample::rng(106);
        let shape = AlgebraShape::full(2);
        let g1 = sample::positive_lp_vector(&mut rng, &shape, 2.0);
        let y = sample::lp_vector(&mut rng, &shape, 2.0);
        let set = ConvexSetSpec::cone(vec![g1.clone()]).unwrap();
        let outside = &(&g1 * 2.0) + &sample::lp_vector(&mut rng, &shape, 2.0);
        assert!(matches!(
            optimality_residuals(&outside, &y, &set, 10, 1),
            Err(Error::NotInSet(_))
        ));
    }

    #[test]
    fn sublevel_sets_are_convex_and_escape_rays() {
        let mut rng = sample::rng(107);
        let shape = AlgebraShape::full(2);
        let p = 2.5;
        let y = sample::lp_vector(&mut rng, &shape, p);
        let d = 2.0;
        for _ in 0..20 {
            let x1 = sample::lp_vector(&mut rng, &shape, p);
            let x2 = sample::lp_vector(&mut rng, &shape, p);
            if sublevel_membership(&y, d, &x1).unwrap() && sublevel_membership(&y, d, &x2).unwrap()
            {
                let mid = &(&x1 * 0.5) + &(&x2 * 0.5);
                assert!(sublevel_membership(&y, d, &mid).unwrap());
            }
        }
        // rays escape: far enough out, membership fails and keeps failing
        for _ in 0..10 {
            let x = sample::lp_vector(&mut rng, &shape, p);
            let h = sample::lp_vector(&mut rng, &shape, p);
            let t0 = (2.0 * y.norm() + x.norm() + 10.0) / h.norm();
            let mut prev = f64::NEG_INFINITY;
            for &k in &[1.0, 2.0, 4.0, 8.0] {
                let pt = &x + &(&h * (k * t0));
                let val = divergence_dp(&pt, &y).unwrap().value;
                assert!(val > prev);
                prev = val;
            }
            assert!(!sublevel_membership(&y, d, &(&x + &(&h * (8.0 * t0)))).unwrap());
        }
    }

    #[test]
    fn sublevel_rejects_negative_level() {
        let shape = AlgebraShape::full(2);
        let y = LpVector::zero(&shape, 2.0).unwrap();
        assert!(sublevel_membership(&y, -1.0, &y).is_err());
    }

    #[test]
    fn alpha_projection_of_member_is_fixed_point() {
        let mut rng = sample::rng(108);
        let shape = AlgebraShape::full(2);
        let alpha = 0.0;
        let g = sample::positive_lp_vector(&mut rng, &shape, 2.0);
        let set = ConvexSetSpec::cone(vec![g.clone()]).unwrap();
        let psi = alpha_unembed(&(&g * 0.6), alpha).unwrap();
        let proj = alpha_project(&psi, &set, alpha, &default_opts(3)).unwrap();
        assert!(proj.result.value < 1e-9);
        for (a, b) in proj.omega_m.blocks().iter().zip(psi.blocks()) {
            assert!(linalg::frob_norm(&(a - b)) < 1e-5);
        }
        assert!(proj.inequality_gap >= -1e-8);
    }

    #[test]
    fn alpha_projection_matches_p2_closed_form() {
        let mut rng = sample::rng(109);
        let shape = AlgebraShape::full(2);
        let alpha = 0.0;
        let g = sample::positive_lp_vector(&mut rng, &shape, 2.0);
        let psi = sample::positive_functional(&mut rng, &shape);
        let y = alpha_embed(&psi, alpha).unwrap();
        let set = ConvexSetSpec::cone(vec![g.clone()]).unwrap();
        let proj = alpha_project(&psi, &set, alpha, &default_opts(4)).unwrap();
        let t_star = (re_inner(&g, &y) / re_inner(&g, &g)).max(0.0);
        let want = alpha_unembed(&(&g * t_star), alpha).unwrap();
        for (a, b) in proj.omega_m.blocks().iter().zip(want.blocks()) {
            assert!(linalg::frob_norm(&(a - b)) < 1e-6 * (1.0 + linalg::frob_norm(b)));
        }
        assert!(proj.inequality_gap >= -1e-8);
    }

    #[test]
    fn alpha_projection_validates_set_order() {
        let mut rng = sample::rng(110);
        let shape = AlgebraShape::full(2);
        let g = sample::positive_lp_vector(&mut rng, &shape, 2.0);
        let set = ConvexSetSpec::cone(vec![g]).unwrap();
        let psi = sample::positive_functional(&mut rng, &shape);
        assert!(matches!(
            alpha_project(&psi, &set, 0.5, &default_opts(0)),
            Err(Error::OrderAlphaMismatch { .. })
        ));
    }

    #[test]
    fn tangent_projector_properties() {
        let mut rng = sample::rng(111);
        let shape = AlgebraShape::full(3);
        for &p in &[1.5, 2.0, 3.0] {
            let x = sample::sphere_point(&mut rng, &shape, p);
            // annihilates the base point
            let px = tangent_project(&x, &x).unwrap();
            assert!(px.norm() < 1e-10 * (1.0 + x.norm()));

            // idempotent, and fixes already-tangent vectors
            let y = sample::lp_vector(&mut rng, &shape, p);
            let py = tangent_project(&x, &y).unwrap();
            let ppy = tangent_project(&x, &py).unwrap();
            assert!((&ppy - &py).norm() < 1e-10 * (1.0 + py.norm()));
            let x_tilde = duality_map(&x).unwrap();
            assert!(pairing(&py, &x_tilde).unwrap().re.abs() < 1e-10 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn tangent_projector_rejects_off_sphere_points() {
        let mut rng = sample::rng(112);
        let shape = AlgebraShape::full(2);
        let x = sample::lp_vector(&mut rng, &shape, 2.0);
        let y = sample::lp_vector(&mut rng, &shape, 2.0);
        let bad = &x * (2.0 * 2.0 / x.norm()); // norm 2p, not p
        assert!(matches!(
            tangent_project(&bad, &y),
            Err(Error::NotOnSphere { .. })
        ));
    }

    #[test]
    fn contains_zero_reporting() {
        let mut rng = sample::rng(113);
        let shape = AlgebraShape::full(2);
        let g = sample::lp_vector(&mut rng, &shape, 2.0);
        assert!(ConvexSetSpec::cone(vec![g.clone()]).unwrap().contains_zero());
        let ball_at_origin =
            ConvexSetSpec::ball(LpVector::zero(&shape, 2.0).unwrap(), 1.0).unwrap();
        assert!(ball_at_origin.contains_zero());
        let far_ball = ConvexSetSpec::ball(&g * (10.0 / g.norm()), 1.0).unwrap();
        assert!(!far_ball.contains_zero());
        let affine_through_zero = ConvexSetSpec::affine(&g - &g, vec![g.clone()]).unwrap();
        assert!(affine_through_zero.contains_zero());
    }

    #[test]
    fn projection_continuity_along_shrinking_perturbations() {
        // 0 ∈ C (cone): x_m(y_n) → x_m(y) as y_n → y
        let mut rng = sample::rng(114);
        let shape = AlgebraShape::full(2);
        let gens: Vec<LpVector> = (0..2)
            .map(|_| sample::positive_lp_vector(&mut rng, &shape, 3.0))
            .collect();
        let set = ConvexSetSpec::cone(gens).unwrap();
        let y = sample::lp_vector(&mut rng, &shape, 3.0);
        let h = sample::lp_vector(&mut rng, &shape, 3.0);
        let base = project_dp(&y, &set, &default_opts(0)).unwrap();
        let mut prev_dist = f64::INFINITY;
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let yn = &y + &(&h * eps);
            let rn = project_dp(&yn, &set, &default_opts(0)).unwrap();
            let dist = (&rn.x_m - &base.x_m).norm();
            assert!(dist <= prev_dist + 1e-7, "eps={eps}: {dist} > {prev_dist}");
            prev_dist = dist;
        }
        assert!(prev_dist < 1e-2);
    }
}
