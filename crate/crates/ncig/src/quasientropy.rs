//! Relative modular operator spectra and Petz quasi-entropies.
//!
//! For positive functionals with block densities `ρ = Σ λ_i e_i e_i†` and
//! `ν = Σ μ_j f_j f_j†` (the second faithful), the relative modular
//! operator has spectrum `{λ_i/μ_j}` with spectral weights
//! `μ_j·|⟨e_i,f_j⟩|²`, and the quasi-entropy of a scalar function `g` is
//!
//! ```text
//!     S_g(φ,ψ) = Σ_{i,j} g(λ_i/μ_j) · μ_j·|⟨e_i,f_j⟩|².
//! ```
//!
//! With `g = g_p` this is an independent spectral route to the
//! α-divergence, checked against the pairing formula in
//! [`crate::divergence`].

use crate::algebra::NormalFunctional;
use crate::divergence::g_p;
use crate::linalg::{self, CMat};
use crate::lp::alpha_to_order;
use crate::{Error, Result};

/// Weights smaller than this are dropped from the spectrum.
const WEIGHT_FLOOR: f64 = 1e-14;

/// Relative eigenvalue-cluster merge tolerance.
const CLUSTER_REL: f64 = 1e-10;

/// The spectrum of a relative modular operator: `(eigenvalue, weight)`
/// pairs with non-negative entries. For faithful second argument the
/// weights sum to `ψ(1)`.
#[derive(Debug, Clone)]
pub struct ModularSpectrum {
    pairs: Vec<(f64, f64)>,
    /// True when the second functional was not faithful and both inputs
    /// were compressed to its support before taking spectra.
    pub restricted: bool,
}

impl ModularSpectrum {
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// `Σ weights`, the zeroth moment (= `ψ(1)` for faithful `ψ`).
    pub fn total_weight(&self) -> f64 {
        self.pairs.iter().map(|&(_, w)| w).sum()
    }

    /// `Σ eigenvalue·weight`, the first moment (= `φ(1)` for faithful `ψ`).
    pub fn first_moment(&self) -> f64 {
        self.pairs.iter().map(|&(t, w)| t * w).sum()
    }

    /// `Σ g(eigenvalue)·weight`.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.pairs.iter().map(|&(t, w)| g(t) * w).sum()
    }
}

fn block_spectrum(rho: &CMat, nu: &CMat, out: &mut Vec<(f64, f64)>) -> bool {
    let sym = |m: &CMat| (m + m.adjoint()) * linalg::creal(0.5);
    let (mu, f_vecs) = linalg::hermitian_eig(&sym(nu));
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    let clip = linalg::CLIP_REL * mu_max;
    let kept: Vec<usize> = (0..mu.len()).filter(|&j| mu[j] > clip).collect();
    let restricted = kept.len() < mu.len();

    if kept.is_empty() {
        return restricted;
    }

    // compress rho to the support of nu, coordinates in the kept f-basis
    let m = kept.len();
    let mut basis = CMat::zeros(nu.nrows(), m);
    for (col, &j) in kept.iter().enumerate() {
        basis.set_column(col, &f_vecs.column(j));
    }
    let rho_c = basis.adjoint() * sym(rho) * &basis;
    let (lambda, e_vecs) = linalg::hermitian_eig(&rho_c);

    for i in 0..m {
        let li = lambda[i].max(0.0);
        for (jc, &j) in kept.iter().enumerate() {
            let overlap = e_vecs[(jc, i)].norm_sqr();
            let weight = mu[j] * overlap;
            if weight >= WEIGHT_FLOOR {
                out.push((li / mu[j], weight));
            }
        }
    }
    restricted
}

fn merge_clusters(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for (t, w) in pairs {
        match merged.last_mut() {
            Some((t0, w0)) if (t - *t0).abs() <= CLUSTER_REL * (1.0 + t0.abs()) => {
                // weighted mean keeps the cluster representative stable
                let tot = *w0 + w;
                *t0 = (*t0 * *w0 + t * w) / tot;
                *w0 = tot;
            }
            _ => merged.push((t, w)),
        }
    }
    merged
}

/// Spectrum of the relative modular operator of two positive functionals.
///
/// A non-faithful `ψ` is handled by compressing both functionals to the
/// support of `ψ`; the result carries `restricted = true` in that case.
pub fn modular_spectrum(
    phi: &NormalFunctional,
    psi: &NormalFunctional,
) -> Result<ModularSpectrum> {
    phi.shape().ensure_same(psi.shape())?;
    if !phi.is_positive() || !psi.is_positive() {
        return Err(Error::NotPositive);
    }
    let mut pairs = Vec::new();
    let mut restricted = false;
    for (rho, nu) in phi.blocks().iter().zip(psi.blocks()) {
        restricted |= block_spectrum(rho, nu, &mut pairs);
    }
    Ok(ModularSpectrum { pairs: merge_clusters(pairs), restricted })
}

/// Petz quasi-entropy `S_g(φ,ψ) = Σ g(eigenvalue)·weight` over the
/// relative modular spectrum.
pub fn quasi_entropy(
    g: impl Fn(f64) -> f64,
    phi: &NormalFunctional,
    psi: &NormalFunctional,
) -> Result<f64> {
    Ok(modular_spectrum(phi, psi)?.apply(g))
}

/// The α-divergence computed through the spectral route, i.e. the
/// quasi-entropy of `g_p` with `p = 2/(1−α)`. Agrees with
/// [`crate::divergence::alpha_divergence`] on faithful pairs.
pub fn alpha_via_quasientropy(
    phi: &NormalFunctional,
    psi: &NormalFunctional,
    alpha: f64,
) -> Result<f64> {
    let p = alpha_to_order(alpha)?;
    quasi_entropy(|t| g_p(t, p), phi, psi)
}

/// Named scalar functions usable as quasi-entropy integrands.
#[derive(Debug, Clone)]
pub enum ScalarFn {
    /// `g_p` with `p = 2/(1−α)`.
    GAlpha { alpha: f64 },
    /// `t·ln t`, continued by 0 at `t = 0` (relative entropy integrand).
    TLogT,
    /// `t ↦ t` (first moment).
    Identity,
    /// `t ↦ 1` (zeroth moment).
    One,
    /// Piecewise-linear interpolant of tabulated `(t, g(t))` points.
    Tabulated(Vec<(f64, f64)>),
}

impl ScalarFn {
    /// Parses the built-in names: `g_p:alpha=0.5`, `t_log_t`, `identity`,
    /// `one`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name
            .strip_prefix("g_p:alpha=")
            .or_else(|| name.strip_prefix("g_p:α="))
        {
            let alpha: f64 = rest
                .parse()
                .map_err(|_| Error::Domain(format!("bad alpha in scalar function: {name}")))?;
            alpha_to_order(alpha)?;
            return Ok(ScalarFn::GAlpha { alpha });
        }
        match name {
            "t_log_t" => Ok(ScalarFn::TLogT),
            "identity" => Ok(ScalarFn::Identity),
            "one" => Ok(ScalarFn::One),
            _ => Err(Error::Domain(format!("unknown scalar function: {name}"))),
        }
    }

    pub fn tabulated(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("tabulated function needs at least 2 points".into()));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite abscissae"));
        Ok(ScalarFn::Tabulated(points))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFn::GAlpha { alpha } => {
                let p = 2.0 / (1.0 - alpha);
                g_p(t, p)
            }
            ScalarFn::TLogT => {
                if t <= 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            ScalarFn::Identity => t,
            ScalarFn::One => 1.0,
            ScalarFn::Tabulated(points) => {
                let first = points.first().expect("nonempty table");
                let last = points.last().expect("nonempty table");
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|&(x, _)| x <= t);
                let (x0, y0) = points[k - 1];
                let (x1, y1) = points[k];
                if x1 == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
                }
            }
        }
    }
}
