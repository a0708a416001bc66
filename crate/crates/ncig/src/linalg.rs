//! Internal complex-matrix helpers: SVD, Hermitian eigendecomposition,
//! spectral functions on the support, Schatten norms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) type CMat = DMatrix<Complex64>;

/// Relative eigenvalue/singular-value clip deciding support membership.
pub(crate) const CLIP_REL: f64 = 1e-12;

pub(crate) fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub(crate) fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub(crate) fn creal(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn trace(m: &CMat) -> Complex64 {
    let mut t = czero();
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)];
    }
    t
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn frob_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let d = m - m.adjoint();
    max_abs(&d) <= tol * (1.0 + max_abs(m))
}

/// Compact-style SVD of a square complex matrix: `m = u * diag(s) * v_t`.
pub(crate) struct Svd {
    pub u: CMat,
    pub s: DVector<f64>,
    pub v_t: CMat,
}

pub(crate) fn svd(m: &CMat) -> Result<Svd> {
    let f = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    Ok(Svd {
        u: f.u.expect("svd with u"),
        s: f.singular_values,
        v_t: f.v_t.expect("svd with v_t"),
    })
}

pub(crate) fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let f = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    Ok(f.singular_values.iter().copied().collect())
}

/// Largest singular value (operator norm); 0 for empty matrices.
pub(crate) fn operator_norm(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.into_iter().fold(0.0, f64::max))
}

/// Schatten p-norm across a list of blocks: `(Σ_i Σ_j s_j(X_i)^p)^{1/p}`.
pub(crate) fn schatten_norm(blocks: &[CMat], p: f64) -> Result<f64> {
    let mut acc = 0.0;
    for b in blocks {
        for s in singular_values(b)? {
            acc += s.powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Hermitian detection threshold for choosing the stable spectral route.
const HERMITIAN_ROUTE_TOL: f64 = 1e-13;

/// Applies `f` to the singular values above the relative clip, zeroing the
/// rest: with `m = u·|m|` polar, returns `u · f(|m|)`.
///
/// With `f = id` this reproduces `m`; with `f = s ↦ s^e` it realizes the
/// spectral power on the support.
///
/// Hermitian blocks go through their eigendecomposition
/// (`u·f(|m|) = Σ sign(λ)·f(|λ|)·vv†`): eigenvalue pairs `λ ≈ −λ'` give
/// nearly degenerate singular values whose SVD subspaces mix unstably,
/// while the eigenvalues themselves stay well separated.
pub(crate) fn map_singular_values(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    if is_hermitian(m, HERMITIAN_ROUTE_TOL) {
        let h = (m + m.adjoint()) * creal(0.5);
        let (vals, vecs) = hermitian_eig(&h);
        let smax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let clip = CLIP_REL * smax;
        let n = m.nrows();
        let mut out = CMat::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            if v.abs() > clip {
                let col = vecs.column(i);
                out += col * col.adjoint() * creal(v.signum() * f(v.abs()));
            }
        }
        return Ok(out);
    }
    let fac = svd(m)?;
    let smax = fac.s.iter().copied().fold(0.0, f64::max);
    let clip = CLIP_REL * smax;
    let mapped: Vec<f64> = fac
        .s
        .iter()
        .map(|&s| if s > clip { f(s) } else { 0.0 })
        .collect();
    Ok(rebuild(&fac.u, &mapped, &fac.v_t))
}

fn rebuild(u: &CMat, s: &[f64], v_t: &CMat) -> CMat {
    let mut scaled = v_t.clone();
    for (j, &sv) in s.iter().enumerate() {
        for k in 0..v_t.ncols() {
            scaled[(j, k)] *= creal(sv);
        }
    }
    u * scaled
}

/// Polar data of a square block `m = u * rho` with `rho = (m† m)^{1/2}` PSD,
/// `u` a partial isometry vanishing on `ker rho`, and `u† u = support(rho)`.
pub(crate) struct PolarData {
    pub u: CMat,
    pub rho: CMat,
    pub support: CMat,
}

pub(crate) fn polar(m: &CMat) -> Result<PolarData> {
    let n = m.nrows();
    let mut rho = CMat::zeros(n, n);
    let mut u = CMat::zeros(n, n);
    let mut support = CMat::zeros(n, n);

    if is_hermitian(m, HERMITIAN_ROUTE_TOL) {
        // stable route: u = Σ sign(λ)vv†, ρ = Σ|λ|vv†
        let h = (m + m.adjoint()) * creal(0.5);
        let (vals, vecs) = hermitian_eig(&h);
        let smax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let clip = CLIP_REL * smax;
        for (i, &lam) in vals.iter().enumerate() {
            let col = vecs.column(i);
            rho += col * col.adjoint() * creal(lam.abs());
            if lam.abs() > clip {
                u += col * col.adjoint() * creal(lam.signum());
                support += col * col.adjoint();
            }
        }
        return Ok(PolarData { u, rho, support });
    }

    let fac = svd(m)?;
    let smax = fac.s.iter().copied().fold(0.0, f64::max);
    let clip = CLIP_REL * smax;

    // rho = V Σ V†  (all singular values; clipped ones contribute nothing)
    let v = fac.v_t.adjoint();
    for j in 0..fac.s.len() {
        let s = fac.s[j];
        let vj = v.column(j);
        rho += vj * vj.adjoint() * creal(s);
        if s > clip {
            let uj = fac.u.column(j);
            u += uj * vj.adjoint();
            support += vj * vj.adjoint();
        }
    }
    Ok(PolarData { u, rho, support })
}

/// Eigendecomposition of a Hermitian block: ascending eigenvalues with the
/// matching eigenvector columns.
pub(crate) fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..sym.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| {
        sym.eigenvalues[a]
            .partial_cmp(&sym.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let vals: Vec<f64> = idx.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(m.nrows(), m.ncols());
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &sym.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `m^e` for PSD `m`: principal power on the support eigenspaces, zero on
/// the kernel (eigenvalues below the relative clip count as zero).
pub(crate) fn psd_power(m: &CMat, e: f64) -> CMat {
    let (vals, vecs) = hermitian_eig(m);
    let vmax = vals.iter().copied().fold(0.0, f64::max);
    let clip = CLIP_REL * vmax;
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        if v > clip {
            let col = vecs.column(i);
            out += col * col.adjoint() * creal(v.powf(e));
        }
    }
    out
}

/// Orthogonal projection onto the range of a PSD block.
pub(crate) fn support_projection_psd(m: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eig(m);
    let vmax = vals.iter().copied().fold(0.0, f64::max);
    let clip = CLIP_REL * vmax;
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        if v > clip {
            let col = vecs.column(i);
            out += col * col.adjoint();
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian block.
pub(crate) fn min_eigenvalue(m: &CMat) -> f64 {
    let (vals, _) = hermitian_eig(m);
    vals.first().copied().unwrap_or(0.0)
}

pub(crate) fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
