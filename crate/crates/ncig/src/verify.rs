//! The seeded property-check suite: every module invariant turned into a
//! reported, tolerance-gated check.
//!
//! Checks are deterministic given the config seed; each check derives its
//! own generator from the seed and the check name, so the report does not
//! depend on check execution order.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    apply_functional, classify_functional, polar_decompose, support_projection, AlgebraShape,
};
use crate::channels;
use crate::divergence::{
    alpha_divergence, cosine_residual, divergence_dp, duality_symmetry_residual, g_p,
    hellinger_s0, pythagorean_residual, scaling_inequality_gap, sphere_divergence,
};
use crate::linalg;
use crate::lp::{
    alpha_embed, alpha_to_order, conjugate_order, duality_map, pairing, potential,
    potential_directional_derivative, LpVector,
};
use crate::projection::{
    alpha_project, optimality_residuals, project_dp, sublevel_membership, ConvexSetSpec,
    SolverOptions,
};
use crate::quasientropy::{alpha_via_quasientropy, modular_spectrum, quasi_entropy};
use crate::report::CheckRow;
use crate::sample;
use crate::{Error, Result};

const P_GRID: [f64; 3] = [1.5, 2.0, 3.0];

/// Names of every check in the suite, in execution order; use these as
/// keys for per-check sample counts and tolerances.
pub const CHECK_NAMES: [&str; 29] = [
    "algebra_functional_bound",
    "algebra_polar_recompose",
    "algebra_support_idempotent",
    "algebra_scalar_reduction",
    "lp_hermiticity_transport",
    "lp_duality_identity",
    "lp_weight_independence",
    "lp_potential_convexity",
    "lp_legendre_derivative",
    "lp_sphere_duality_modulus",
    "divergence_laws",
    "divergence_positivity_sharp",
    "divergence_joint_convexity",
    "divergence_first_arg_convexity",
    "divergence_sublevel_sets",
    "divergence_continuity_estimate",
    "divergence_sphere_layer",
    "divergence_scaling_and_swap",
    "divergence_pythagorean",
    "divergence_hellinger",
    "quasientropy_cross_oracle",
    "quasientropy_moments",
    "quasientropy_p_monotonicity",
    "projection_certificates",
    "projection_continuity",
    "projection_alpha_uniqueness",
    "projection_normal_cone_curve",
    "channels_monotonicity",
    "channels_chain_monotonicity",
];

/// Configuration of the verification suite.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dims: Vec<AlgebraShape>,
    pub alphas: Vec<f64>,
    /// Per-check sample-count overrides (checks have their own defaults).
    pub sample_counts: BTreeMap<String, usize>,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dims: vec![
                AlgebraShape::full(2),
                AlgebraShape::full(3),
                AlgebraShape::new(vec![2, 2]).expect("static dims"),
            ],
            alphas: vec![-0.6, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.6],
            sample_counts: BTreeMap::new(),
            tolerances: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Domain("suite config needs at least one shape".into()));
        }
        for &a in &self.alphas {
            alpha_to_order(a)?;
        }
        for (name, &tol) in &self.tolerances {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::Domain(format!(
                    "tolerance for {name} must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    fn samples(&self, check: &str, default: usize) -> usize {
        self.sample_counts.get(check).copied().unwrap_or(default)
    }

    fn tol(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }

    fn rng(&self, check: &str) -> ChaCha8Rng {
        sample::rng(self.seed ^ fnv1a(check))
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs every check and returns the rows in canonical order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    algebra_functional_bound(cfg, &mut rows)?;
    algebra_polar_recompose(cfg, &mut rows)?;
    algebra_support_idempotent(cfg, &mut rows)?;
    algebra_scalar_reduction(cfg, &mut rows)?;
    lp_hermiticity_transport(cfg, &mut rows)?;
    lp_duality_identity(cfg, &mut rows)?;
    lp_weight_independence(cfg, &mut rows)?;
    lp_potential_convexity(cfg, &mut rows)?;
    lp_legendre_derivative(cfg, &mut rows)?;
    lp_sphere_duality_modulus(cfg, &mut rows)?;
    divergence_laws(cfg, &mut rows)?;
    divergence_positivity_sharp(cfg, &mut rows)?;
    divergence_joint_convexity(cfg, &mut rows)?;
    divergence_first_arg_convexity(cfg, &mut rows)?;
    divergence_sublevel_sets(cfg, &mut rows)?;
    divergence_continuity_estimate(cfg, &mut rows)?;
    divergence_sphere_layer(cfg, &mut rows)?;
    divergence_scaling_and_swap(cfg, &mut rows)?;
    divergence_pythagorean(cfg, &mut rows)?;
    divergence_hellinger(cfg, &mut rows)?;
    quasientropy_cross_oracle(cfg, &mut rows)?;
    quasientropy_moments(cfg, &mut rows)?;
    quasientropy_p_monotonicity(cfg, &mut rows)?;
    projection_certificates(cfg, &mut rows)?;
    projection_continuity(cfg, &mut rows)?;
    projection_alpha_uniqueness(cfg, &mut rows)?;
    projection_normal_cone_curve(cfg, &mut rows)?;
    channels_monotonicity(cfg, &mut rows)?;
    channels_chain_monotonicity(cfg, &mut rows)?;
    crate::report::sort_rows(&mut rows);
    Ok(rows)
}

fn algebra_functional_bound(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "algebra_functional_bound";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 200);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let w = sample::functional(&mut rng, shape);
            let a = sample::element(&mut rng, shape);
            let lhs = apply_functional(&w, &a)?.norm();
            let rhs = w.norm_one() * a.operator_norm();
            worst = worst.max((lhs - rhs) / (1.0 + rhs));
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-9)));
    Ok(())
}

fn algebra_polar_recompose(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "algebra_polar_recompose";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let w = sample::functional(&mut rng, shape);
            let p = polar_decompose(&w)?;
            for ((u, r), (wb, s)) in p
                .u
                .blocks()
                .iter()
                .zip(p.rho.blocks())
                .zip(w.blocks().iter().zip(p.support.blocks()))
            {
                worst = worst.max(linalg::frob_norm(&(u * r - wb)));
                worst = worst.max(linalg::frob_norm(&(u.adjoint() * u - s)));
            }
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-10)));
    Ok(())
}

fn algebra_support_idempotent(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "algebra_support_idempotent";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let w = sample::positive_functional(&mut rng, shape);
            let s = support_projection(&w)?;
            for b in s.blocks() {
                worst = worst.max(linalg::frob_norm(&(b * b - b)));
                worst = worst.max(linalg::frob_norm(&(b - b.adjoint())));
            }
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-10)));
    Ok(())
}

fn algebra_scalar_reduction(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "algebra_scalar_reduction";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let shape = AlgebraShape::commutative(3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let w = sample::functional(&mut rng, &shape);
        let a = sample::element(&mut rng, &shape);
        let scalar: num_complex::Complex64 = w
            .blocks()
            .iter()
            .zip(a.blocks())
            .map(|(x, y)| x[(0, 0)] * y[(0, 0)])
            .sum();
        worst = worst.max((apply_functional(&w, &a)? - scalar).norm());
        let p = polar_decompose(&w)?;
        for (i, b) in w.blocks().iter().enumerate() {
            let z = b[(0, 0)];
            worst = worst.max((p.rho.blocks()[i][(0, 0)].re - z.norm()).abs());
            worst = worst.max((p.u.blocks()[i][(0, 0)] * p.rho.blocks()[i][(0, 0)] - z).norm());
        }
        let c = classify_functional(&w);
        let abs_sum: f64 = w.blocks().iter().map(|b| b[(0, 0)].norm()).sum();
        worst = worst.max((c.norm_1 - abs_sum).abs());
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-12)));
    Ok(())
}

fn lp_hermiticity_transport(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_hermiticity_transport";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut mismatches = 0usize;
        for shape in &cfg.dims {
            for _ in 0..n {
                let h = sample::hermitian_functional(&mut rng, shape);
                if !alpha_embed(&h, alpha)?.is_hermitian() {
                    mismatches += 1;
                }
                let pos = sample::positive_functional(&mut rng, shape);
                if !alpha_embed(&pos, alpha)?.is_positive_semidefinite() {
                    mismatches += 1;
                }
                let g = sample::functional(&mut rng, shape);
                if g.is_hermitian() != alpha_embed(&g, alpha)?.is_hermitian() {
                    mismatches += 1;
                }
            }
        }
        rows.push(CheckRow::new(
            name,
            Some(p),
            Some(alpha),
            mismatches as f64,
            cfg.tol(name, 0.5),
        ));
    }
    Ok(())
}

fn lp_duality_identity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_duality_identity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let q = conjugate_order(p);
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let w = sample::positive_functional(&mut rng, shape);
                let a = sample::hermitian_element(&mut rng, shape);
                let x = alpha_embed(&w, alpha)?;
                let xt = duality_map(&x)?;
                let lhs = pairing(&x, &xt.act_left(&a)?)?;
                let rhs = w.apply(&a)? * linalg::creal(p * q);
                worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn lp_weight_independence(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_weight_independence";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &p in &P_GRID {
        let q = conjugate_order(p);
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let x = sample::lp_vector(&mut rng, shape, p);
                let y = sample::lp_vector(&mut rng, shape, q);
                let u = sample::block_unitary(&mut rng, shape);
                let conj = |v: &LpVector| {
                    let blocks = v
                        .blocks()
                        .iter()
                        .zip(u.blocks())
                        .map(|(b, ub)| ub * b * ub.adjoint())
                        .collect();
                    LpVector::new(v.shape().clone(), v.order(), blocks).expect("same dims")
                };
                let before = pairing(&x, &y)?;
                let after = pairing(&conj(&x), &conj(&y))?;
                worst = worst.max((before - after).norm() / (1.0 + before.norm()));
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn lp_potential_convexity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_potential_convexity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    for &p in &P_GRID {
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let x = sample::lp_vector(&mut rng, shape, p);
                let y = sample::lp_vector(&mut rng, shape, p);
                for &t in &[0.25, 0.5, 0.75] {
                    let mid = &(&x * t) + &(&y * (1.0 - t));
                    let gap = potential(&mid) - t * potential(&x) - (1.0 - t) * potential(&y);
                    worst = worst.max(gap / (1.0 + potential(&x) + potential(&y)));
                }
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn lp_legendre_derivative(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_legendre_derivative";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 30);
    for &p in &P_GRID {
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let x = sample::lp_vector(&mut rng, shape, p);
                let y = sample::lp_vector(&mut rng, shape, p);
                let d = potential_directional_derivative(&x, &y)?;
                let h = 1e-5;
                let fd = (potential(&(&x + &(&y * h))) - potential(&(&x - &(&y * h)))) / (2.0 * h);
                worst = worst.max((d - fd).abs() / (1.0 + fd.abs()));
                // conjugacy identity
                let xt = duality_map(&x)?;
                let legendre = pairing(&x, &xt)?.re - potential(&x);
                worst = worst.max((potential(&xt) - legendre).abs() / (1.0 + legendre.abs()));
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-5)));
    }
    Ok(())
}

fn lp_sphere_duality_modulus(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "lp_sphere_duality_modulus";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 10_000);
    let bins = 10;
    for &p in &[1.5, 3.0] {
        let shape = &cfg.dims[0];
        let mut pts: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = sample::sphere_point(&mut rng, shape, p);
                let y = sample::sphere_point(&mut rng, shape, p);
                let din = (&x - &y).norm();
                let dout = (&duality_map(&x).expect("valid order")
                    - &duality_map(&y).expect("valid order"))
                    .norm();
                (din, dout)
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
        let per = pts.len() / bins;
        let maxima: Vec<f64> = (0..bins)
            .map(|k| {
                pts[k * per..((k + 1) * per).min(pts.len())]
                    .iter()
                    .map(|&(_, d)| d)
                    .fold(0.0, f64::max)
            })
            .collect();
        let global = maxima.iter().copied().fold(0.0, f64::max).max(1e-300);
        let mut worst = f64::NEG_INFINITY;
        for k in 0..bins - 1 {
            worst = worst.max((maxima[k] - maxima[k + 1]) / global);
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 0.25)));
    }
    Ok(())
}

fn divergence_laws(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_laws";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &p in &P_GRID {
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let x = sample::lp_vector(&mut rng, shape, p);
                let y = sample::lp_vector(&mut rng, shape, p);
                let z = sample::lp_vector(&mut rng, shape, p);
                worst = worst.max(divergence_dp(&x, &x)?.value.abs());
                worst = worst.max(cosine_residual(&x, &y, &z)?);
                worst = worst.max(duality_symmetry_residual(&x, &y)?);
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn divergence_positivity_sharp(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_positivity_sharp";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let phi = sample::positive_functional(&mut rng, shape);
                let psi = sample::positive_functional(&mut rng, shape);
                let d = alpha_divergence(&phi, &psi, alpha)?;
                worst = worst.max(d.lower_bound - d.value);
                worst = worst.max(-d.lower_bound);
            }
            // sharpness: S = 0 forces coinciding embeddings
            let phi = sample::positive_functional(&mut rng, shape);
            let d = alpha_divergence(&phi, &phi, alpha)?;
            worst = worst.max(d.value.abs());
            let x = alpha_embed(&phi, alpha)?;
            worst = worst.max((&x - &x).norm());
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn divergence_joint_convexity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_joint_convexity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 60);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let phi1 = sample::positive_functional(&mut rng, shape);
                let phi2 = sample::positive_functional(&mut rng, shape);
                let psi1 = sample::positive_functional(&mut rng, shape);
                let psi2 = sample::positive_functional(&mut rng, shape);
                for &t in &[0.25, 0.5, 0.75] {
                    let phi = &(&phi1 * t) + &(&phi2 * (1.0 - t));
                    let psi = &(&psi1 * t) + &(&psi2 * (1.0 - t));
                    let mixed = alpha_divergence(&phi, &psi, alpha)?.value;
                    let bound = t * alpha_divergence(&phi1, &psi1, alpha)?.value
                        + (1.0 - t) * alpha_divergence(&phi2, &psi2, alpha)?.value;
                    worst = worst.max((mixed - bound) / (1.0 + bound.abs()));
                }
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn divergence_first_arg_convexity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_first_arg_convexity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    for &p in &P_GRID {
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let x1 = sample::lp_vector(&mut rng, shape, p);
                let x2 = sample::lp_vector(&mut rng, shape, p);
                let y = sample::lp_vector(&mut rng, shape, p);
                for &t in &[0.25, 0.5, 0.75] {
                    let mid = &(&x1 * t) + &(&x2 * (1.0 - t));
                    let lhs = divergence_dp(&mid, &y)?.value;
                    let rhs = t * divergence_dp(&x1, &y)?.value
                        + (1.0 - t) * divergence_dp(&x2, &y)?.value;
                    worst = worst.max((lhs - rhs) / (1.0 + rhs.abs()));
                }
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn divergence_sublevel_sets(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_sublevel_sets";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &p in &P_GRID {
        let mut failures = 0usize;
        let shape = &cfg.dims[0];
        let y = sample::lp_vector(&mut rng, shape, p);
        let d = 2.0;
        for _ in 0..n {
            let x1 = sample::lp_vector(&mut rng, shape, p);
            let x2 = sample::lp_vector(&mut rng, shape, p);
            if sublevel_membership(&y, d, &x1)? && sublevel_membership(&y, d, &x2)? {
                let mid = &(&x1 * 0.5) + &(&x2 * 0.5);
                if !sublevel_membership(&y, d, &mid)? {
                    failures += 1;
                }
            }
        }
        for _ in 0..n {
            let x = sample::lp_vector(&mut rng, shape, p);
            let h = sample::lp_vector(&mut rng, shape, p);
            if h.norm() == 0.0 {
                continue;
            }
            let t0 = (2.0 * y.norm() + x.norm() + 10.0) / h.norm();
            let mut prev = f64::NEG_INFINITY;
            let mut monotone = true;
            for &k in &[1.0, 2.0, 4.0, 8.0] {
                let val = divergence_dp(&(&x + &(&h * (k * t0))), &y)?.value;
                monotone &= val > prev;
                prev = val;
            }
            if !monotone || sublevel_membership(&y, d, &(&x + &(&h * (8.0 * t0))))? {
                failures += 1;
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, failures as f64, cfg.tol(name, 0.5)));
    }
    Ok(())
}

fn divergence_continuity_estimate(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_continuity_estimate";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let phi = sample::positive_functional(&mut rng, shape);
                let psi = sample::positive_functional(&mut rng, shape);
                let a = sample::hermitian_element(&mut rng, shape);
                let x = alpha_embed(&phi, alpha)?;
                let y = alpha_embed(&psi, alpha)?;
                let xt = duality_map(&x)?;
                let yt = duality_map(&y)?;
                let lhs = (phi.apply(&a)? - psi.apply(&a)?).norm();
                let bound = 0.5
                    * a.operator_norm()
                    * ((&x + &y).norm() * (&xt - &yt).norm()
                        + (&x - &y).norm() * (&xt + &yt).norm());
                worst = worst.max((lhs - bound) / (1.0 + bound));
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn divergence_sphere_layer(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_sphere_layer";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 2000);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let q = conjugate_order(p);
        let mut worst = f64::NEG_INFINITY;
        let shape = &cfg.dims[0];
        for _ in 0..n {
            // sphere convexity estimate on the radius-p sphere
            let x = sample::sphere_point(&mut rng, shape, p);
            let y = sample::sphere_point(&mut rng, shape, p);
            let d = divergence_dp(&x, &y)?.value;
            let half_sum = &(&x * (1.0 / p)) + &(&y * (1.0 / p));
            let mid = &half_sum * 0.5;
            let lhs = (1.0 - d / (2.0 * p * q)).abs();
            worst = worst.max(lhs - mid.norm());
        }
        for _ in 0..(n / 10).max(1) {
            // sphere-restricted α-divergence agrees with the general one
            let w1 = sample::state(&mut rng, shape);
            let w2 = sample::state(&mut rng, shape);
            let s = sphere_divergence(&w1, &w2, alpha)?;
            let full = alpha_divergence(&w1, &w2, alpha)?.value;
            worst = worst.max((s - full).abs() / (1.0 + full.abs()));
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn divergence_scaling_and_swap(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_scaling_and_swap";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let mut sorted = cfg.alphas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite alphas"));
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let phi = sample::positive_functional(&mut rng, shape);
            let psi = sample::positive_functional(&mut rng, shape);
            for w in sorted.windows(2) {
                let g = scaling_inequality_gap(&phi, &psi, w[0], w[1])?;
                worst = worst.max(-g.gap1);
                worst = worst.max(-g.gap2);
            }
            for &alpha in &sorted {
                let a = alpha_divergence(&phi, &psi, alpha)?.value;
                let b = alpha_divergence(&psi, &phi, -alpha)?.value;
                worst = worst.max((a - b).abs() / (1.0 + a.abs()));
            }
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-9)));
    Ok(())
}

fn divergence_pythagorean(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_pythagorean";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let phi = sample::functional(&mut rng, shape);
                let psi = sample::functional(&mut rng, shape);
                let sigma = sample::functional(&mut rng, shape);
                worst = worst.max(pythagorean_residual(&phi, &psi, &sigma, alpha)?);
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-10)));
    }
    Ok(())
}

fn divergence_hellinger(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "divergence_hellinger";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let w1 = sample::functional(&mut rng, shape);
            let w2 = sample::functional(&mut rng, shape);
            let h = hellinger_s0(&w1, &w2)?;
            let s0 = alpha_divergence(&w1, &w2, 0.0)?.value;
            worst = worst.max((h - s0).abs() / (1.0 + s0.abs()));
            // D_2 is half the squared distance
            let x = sample::lp_vector(&mut rng, shape, 2.0);
            let y = sample::lp_vector(&mut rng, shape, 2.0);
            let d2 = divergence_dp(&x, &y)?.value;
            let half = 0.5 * (&x - &y).norm().powi(2);
            worst = worst.max((d2 - half).abs() / (1.0 + half));
        }
    }
    rows.push(CheckRow::new(name, Some(2.0), Some(0.0), worst, cfg.tol(name, 1e-10)));
    Ok(())
}

fn quasientropy_cross_oracle(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "quasientropy_cross_oracle";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for shape in &cfg.dims {
            for _ in 0..n {
                let phi = sample::faithful_functional(&mut rng, shape);
                let psi = sample::faithful_functional(&mut rng, shape);
                let spectral = alpha_via_quasientropy(&phi, &psi, alpha)?;
                let paired = alpha_divergence(&phi, &psi, alpha)?.value;
                worst = worst.max((spectral - paired).abs() / (1.0 + paired.abs()));
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn quasientropy_moments(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "quasientropy_moments";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 100);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let phi = sample::positive_functional(&mut rng, shape);
            let psi = sample::faithful_functional(&mut rng, shape);
            let spec = modular_spectrum(&phi, &psi)?;
            worst = worst.max((spec.total_weight() - psi.trace_value().re).abs());
            worst = worst.max((spec.first_moment() - phi.trace_value().re).abs());
            let p = 3.0;
            let cross = spec.apply(|t| t.powf(1.0 / p));
            let mut want = 0.0;
            for (rb, nb) in phi.blocks().iter().zip(psi.blocks()) {
                let rp = linalg::psd_power(rb, 1.0 / p);
                let nq = linalg::psd_power(nb, 1.0 - 1.0 / p);
                want += linalg::trace(&(rp * nq)).re;
            }
            worst = worst.max((cross - want).abs() / (1.0 + want.abs()));
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-10)));
    Ok(())
}

fn quasientropy_p_monotonicity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "quasientropy_p_monotonicity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    let ps = [1.2, 1.5, 2.0, 3.0, 5.0, 10.0];
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n {
            let phi = sample::faithful_functional(&mut rng, shape);
            let psi = sample::faithful_functional(&mut rng, shape);
            let mut prev = f64::INFINITY;
            for &p in &ps {
                let v = quasi_entropy(|t| g_p(t, p), &phi, &psi)? / p;
                worst = worst.max(v - prev);
                prev = v;
            }
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-10)));
    Ok(())
}

fn projection_certificates(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "projection_certificates";
    let mut rng = cfg.rng(name);
    let n_samples = cfg.samples(name, 200);
    for &p in &P_GRID {
        let shape = &cfg.dims[0];
        let mut worst = f64::NEG_INFINITY;
        let opts = SolverOptions {
            tolerance: 1e-10,
            seed: cfg.seed,
            certificate_samples: n_samples,
            ..SolverOptions::default()
        };
        for trial in 0..3 {
            let gens: Vec<LpVector> = (0..3)
                .map(|_| sample::positive_lp_vector(&mut rng, shape, p))
                .collect();
            let y = sample::lp_vector(&mut rng, shape, p);
            let set = ConvexSetSpec::cone(gens).unwrap();
            let res = project_dp(&y, &set, &opts)?;
            if !res.converged {
                worst = worst.max(1.0);
                continue;
            }
            let cert =
                optimality_residuals(&res.x_m, &y, &set, n_samples, cfg.seed + trial as u64)?;
            worst = worst.max(cert.normal_cone);
            worst = worst.max(cert.three_point);
            worst = worst.max(res.three_point_worst);

            // a perturbed feasible point must be flagged by a certificate
            let bumped = &res.x_m * 1.01;
            if res.x_m.norm() > 1e-6 {
                let pc = optimality_residuals(&bumped, &y, &set, n_samples, cfg.seed)?;
                if pc.normal_cone <= 0.0 && pc.three_point <= 0.0 {
                    worst = worst.max(1.0);
                }
            }
        }
        rows.push(CheckRow::new(name, Some(p), None, worst, cfg.tol(name, 1e-6)));
    }
    Ok(())
}

fn projection_continuity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "projection_continuity";
    let mut rng = cfg.rng(name);
    let shape = &cfg.dims[0];
    let p = 3.0;
    let gens: Vec<LpVector> = (0..2)
        .map(|_| sample::positive_lp_vector(&mut rng, shape, p))
        .collect();
    let set = ConvexSetSpec::cone(gens).unwrap();
    let y = sample::lp_vector(&mut rng, shape, p);
    let h = sample::lp_vector(&mut rng, shape, p);
    let opts = SolverOptions { seed: cfg.seed, ..SolverOptions::default() };
    let base = project_dp(&y, &set, &opts)?;
    let mut dist = f64::INFINITY;
    for &eps in &[1e-1, 1e-2, 1e-3] {
        let yn = &y + &(&h * eps);
        let rn = project_dp(&yn, &set, &opts)?;
        dist = (&rn.x_m - &base.x_m).norm() / (1.0 + base.x_m.norm());
    }
    rows.push(CheckRow::new(name, Some(p), None, dist, cfg.tol(name, 1e-2)));
    Ok(())
}

fn projection_alpha_uniqueness(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "projection_alpha_uniqueness";
    let mut rng = cfg.rng(name);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let shape = &cfg.dims[0];
        let gens: Vec<LpVector> = (0..3)
            .map(|_| sample::positive_lp_vector(&mut rng, shape, p))
            .collect();
        let set = ConvexSetSpec::cone(gens).unwrap();
        let psi = sample::positive_functional(&mut rng, shape);
        let mk_opts = |seed: u64| SolverOptions { seed, ..SolverOptions::default() };
        let a = alpha_project(&psi, &set, alpha, &mk_opts(1))?;
        let b = alpha_project(&psi, &set, alpha, &mk_opts(7919))?;
        let mut dist = 0.0_f64;
        for (x, z) in a.omega_m.blocks().iter().zip(b.omega_m.blocks()) {
            dist = dist.max(linalg::frob_norm(&(x - z)));
        }
        let gap_violation = (-a.inequality_gap).max(-b.inequality_gap).max(0.0);
        let worst = dist.max(gap_violation);
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-6)));
    }
    Ok(())
}

fn projection_normal_cone_curve(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "projection_normal_cone_curve";
    let mut rng = cfg.rng(name);
    let n_samples = cfg.samples(name, 100);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let shape = &cfg.dims[0];
        let gens: Vec<LpVector> = (0..2)
            .map(|_| sample::positive_lp_vector(&mut rng, shape, p))
            .collect();
        let set = ConvexSetSpec::cone(gens.clone()).unwrap();
        let psi = sample::positive_functional(&mut rng, shape);
        let opts = SolverOptions {
            tolerance: 1e-10,
            seed: cfg.seed,
            ..SolverOptions::default()
        };
        let proj = alpha_project(&psi, &set, alpha, &opts)?;
        let x_m = alpha_embed(&proj.omega_m, alpha)?;
        let xt_m = alpha_embed(&proj.omega_m, -alpha)?;
        let yt = alpha_embed(&psi, -alpha)?;
        let mut worst = f64::NEG_INFINITY;
        let mut srng = sample::rng(cfg.seed ^ fnv1a("curve_samples"));
        for &t in &[0.5, 1.0, 2.0, 5.0] {
            // x_t − x̃_m = t·(ℓ_{−α}(ψ) − ℓ_{−α}(φ_m)) must stay in the
            // normal cone at x_m
            let dir = &(&yt - &xt_m) * t;
            for _ in 0..n_samples {
                let z = sample_cone_member(&mut srng, &gens, &x_m);
                let mut inner = 0.0;
                for (a, b) in (&z - &x_m).blocks().iter().zip(dir.blocks()) {
                    inner += linalg::trace(&(a.adjoint() * b)).re;
                }
                worst = worst.max(inner);
            }
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-5)));
    }
    Ok(())
}

fn sample_cone_member(
    rng: &mut ChaCha8Rng,
    gens: &[LpVector],
    anchor: &LpVector,
) -> LpVector {
    use rand::Rng as _;
    let mean: f64 = gens.iter().map(|g| g.norm()).sum::<f64>() / gens.len() as f64;
    let scale = (1.0 + anchor.norm()) / (1.0 + mean);
    let mut acc = LpVector::zero(anchor.shape(), anchor.order()).expect("valid order");
    for g in gens {
        acc = &acc + &(g * (2.0 * scale * rng.random::<f64>()));
    }
    acc
}

fn channels_monotonicity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "channels_monotonicity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 200);
    for &alpha in &cfg.alphas {
        let p = alpha_to_order(alpha)?;
        let mut worst = f64::NEG_INFINITY;
        for (k, shape) in cfg.dims.iter().cycle().take(n).enumerate() {
            let out_shape = if k % 2 == 0 {
                shape.clone()
            } else {
                AlgebraShape::full((shape.total_dim() / 2).max(1))
            };
            let ch = sample::channel(&mut rng, shape, &out_shape, 2 + k % 3);
            let phi = sample::positive_functional(&mut rng, shape);
            let psi = sample::positive_functional(&mut rng, shape);
            let gap = channels::monotonicity_gap(&ch, &phi, &psi, alpha)?;
            worst = worst.max(-gap);
        }
        rows.push(CheckRow::new(name, Some(p), Some(alpha), worst, cfg.tol(name, 1e-9)));
    }
    Ok(())
}

fn channels_chain_monotonicity(cfg: &SuiteConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let name = "channels_chain_monotonicity";
    let mut rng = cfg.rng(name);
    let n = cfg.samples(name, 50);
    let mut worst = f64::NEG_INFINITY;
    for shape in &cfg.dims {
        for _ in 0..n / cfg.dims.len().max(1) {
            let mid_shape = shape.clone();
            let end_shape = AlgebraShape::full((shape.total_dim() / 2).max(1));
            let c1 = sample::channel(&mut rng, shape, &mid_shape, 2);
            let c2 = sample::channel(&mut rng, &mid_shape, &end_shape, 2);
            let phi = sample::positive_functional(&mut rng, shape);
            let psi = sample::positive_functional(&mut rng, shape);
            let alpha = 1.0 / 3.0;
            let s0 = alpha_divergence(&phi, &psi, alpha)?.value;
            let phi1 = channels::apply_predual(&c1, &phi)?;
            let psi1 = channels::apply_predual(&c1, &psi)?;
            let s1 = alpha_divergence(&phi1, &psi1, alpha)?.value;
            let phi2 = channels::apply_predual(&c2, &phi1)?;
            let psi2 = channels::apply_predual(&c2, &psi1)?;
            let s2 = alpha_divergence(&phi2, &psi2, alpha)?.value;
            worst = worst.max(s1 - s0);
            worst = worst.max(s2 - s1);
        }
    }
    rows.push(CheckRow::new(name, None, None, worst, cfg.tol(name, 1e-9)));
    Ok(())
}
