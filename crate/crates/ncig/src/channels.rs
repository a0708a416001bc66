//! Stochastic maps between preduals: CPTP channels in Kraus form,
//! including block-structure-changing maps, used to exercise monotonicity
//! of the α-divergence.
//!
//! A channel from `⊕_i M_{n_i}` to `⊕_j M_{m_j}` is stored as Kraus
//! operators on the enveloping spaces, rectangular `N_out × N_in` matrices
//! with `N = Σ dims`. The predual action is `W ↦ Π_out(Σ_k K W K†)` where
//! `Π_out` keeps the diagonal blocks of the output algebra.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::algebra::{AlgebraShape, NormalFunctional};
use crate::divergence::alpha_divergence;
use crate::linalg::{self, CMat};
use crate::{Error, Result};

const CHANNEL_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map between preduals, in Kraus
/// form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    in_shape: AlgebraShape,
    out_shape: AlgebraShape,
    kraus: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(
        in_shape: AlgebraShape,
        out_shape: AlgebraShape,
        kraus: Vec<CMat>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        let (rows, cols) = (out_shape.total_dim(), in_shape.total_dim());
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != rows || k.ncols() != cols {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator {i} is {}x{}, expected {rows}x{cols}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        Ok(Self { in_shape, out_shape, kraus })
    }

    pub fn in_shape(&self) -> &AlgebraShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &AlgebraShape {
        &self.out_shape
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// The identity channel on a shape.
    pub fn identity(shape: &AlgebraShape) -> Self {
        let n = shape.total_dim();
        Self {
            in_shape: shape.clone(),
            out_shape: shape.clone(),
            kraus: vec![linalg::identity(n)],
        }
    }

    /// Full dephasing: Kraus operators are the rank-one diagonal
    /// projectors, so densities collapse to their diagonals.
    pub fn pinching(shape: &AlgebraShape) -> Self {
        let n = shape.total_dim();
        let kraus = (0..n)
            .map(|i| {
                let mut k = CMat::zeros(n, n);
                k[(i, i)] = linalg::cone();
                k
            })
            .collect();
        Self { in_shape: shape.clone(), out_shape: shape.clone(), kraus }
    }

    /// Partial trace over the second tensor factor, `M_{n·m} → M_n`.
    pub fn partial_trace(n: usize, m: usize) -> Self {
        let kraus = (0..m)
            .map(|j| {
                CMat::from_fn(n, n * m, |r, c| {
                    if c == r * m + j { linalg::cone() } else { linalg::czero() }
                })
            })
            .collect();
        Self {
            in_shape: AlgebraShape::full(n * m),
            out_shape: AlgebraShape::full(n),
            kraus,
        }
    }

    /// Classical channel between commutative algebras from a
    /// column-stochastic matrix `t` (columns sum to 1): probability
    /// vectors map as `p ↦ t·p`.
    pub fn from_stochastic_matrix(t: &[Vec<f64>]) -> Result<Self> {
        let rows = t.len();
        let cols = t.first().map(|r| r.len()).unwrap_or(0);
        if rows == 0 || cols == 0 || t.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidChannel("ragged or empty stochastic matrix".into()));
        }
        let mut kraus = Vec::with_capacity(rows * cols);
        for (i, row) in t.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < -CHANNEL_TOL {
                    return Err(Error::InvalidChannel(format!(
                        "negative stochastic entry t[{i}][{j}] = {v}"
                    )));
                }
                if v > 0.0 {
                    let mut k = CMat::zeros(rows, cols);
                    k[(i, j)] = linalg::creal(v.sqrt());
                    kraus.push(k);
                }
            }
        }
        Self::new(
            AlgebraShape::commutative(cols),
            AlgebraShape::commutative(rows),
            kraus,
        )
    }

    fn assemble(&self, omega: &NormalFunctional) -> CMat {
        let n = self.in_shape.total_dim();
        let mut full = CMat::zeros(n, n);
        let mut off = 0;
        for b in omega.blocks() {
            let d = b.nrows();
            full.view_mut((off, off), (d, d)).copy_from(b);
            off += d;
        }
        full
    }

    fn carve(&self, full: &CMat) -> Vec<CMat> {
        let mut blocks = Vec::with_capacity(self.out_shape.num_blocks());
        let mut off = 0;
        for &d in self.out_shape.block_dims() {
            blocks.push(full.view((off, off), (d, d)).into_owned());
            off += d;
        }
        blocks
    }

    /// Defect `‖Σ_k K†K − 1‖_F` of the trace-preservation condition.
    pub fn trace_defect(&self) -> f64 {
        let n = self.in_shape.total_dim();
        let mut acc = CMat::zeros(n, n);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        linalg::frob_norm(&(acc - linalg::identity(n)))
    }

    /// Choi matrix `Σ_k vec(K_k) vec(K_k)†`, positive semidefinite by
    /// construction for genuine Kraus lists.
    pub fn choi_matrix(&self) -> CMat {
        let dim = self.in_shape.total_dim() * self.out_shape.total_dim();
        let mut choi = CMat::zeros(dim, dim);
        for k in &self.kraus {
            let v = DVector::<Complex64>::from_iterator(dim, k.iter().copied());
            choi += &v * v.adjoint();
        }
        choi
    }
}

/// Predual action `W ↦ Π_out(Σ_k K W K†)`; preserves positivity, and
/// preserves `ω(1)` when the channel is trace-preserving.
pub fn apply_predual(
    channel: &KrausChannel,
    omega: &NormalFunctional,
) -> Result<NormalFunctional> {
    channel.in_shape.ensure_same(omega.shape())?;
    let w = channel.assemble(omega);
    let n = channel.out_shape.total_dim();
    let mut acc = CMat::zeros(n, n);
    for k in &channel.kraus {
        acc += k * &w * k.adjoint();
    }
    NormalFunctional::new(channel.out_shape.clone(), channel.carve(&acc))
}

/// Validation outcome for a Kraus list.
#[derive(Debug, Clone, Copy)]
pub struct ChannelValidation {
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub trace_defect: f64,
    pub choi_min_eigenvalue: f64,
}

/// Checks `Σ K†K = 1` within `1e−10` and positivity of the Choi matrix
/// within a `−1e−10` eigenvalue slack.
pub fn validate_channel(channel: &KrausChannel) -> ChannelValidation {
    let trace_defect = channel.trace_defect();
    let choi_min_eigenvalue = linalg::min_eigenvalue(&channel.choi_matrix());
    ChannelValidation {
        trace_preserving: trace_defect <= CHANNEL_TOL,
        completely_positive: choi_min_eigenvalue >= -CHANNEL_TOL,
        trace_defect,
        choi_min_eigenvalue,
    }
}

/// Data-processing gap `S_α(φ,ψ) − S_α(Φφ,Φψ)`, non-negative for valid
/// channels and positive inputs.
pub fn monotonicity_gap(
    channel: &KrausChannel,
    phi: &NormalFunctional,
    psi: &NormalFunctional,
    alpha: f64,
) -> Result<f64> {
    if !phi.is_positive() || !psi.is_positive() {
        return Err(Error::NotPositive);
    }
    let v = validate_channel(channel);
    if !v.trace_preserving || !v.completely_positive {
        return Err(Error::InvalidChannel(format!(
            "trace defect {} / Choi min eigenvalue {}",
            v.trace_defect, v.choi_min_eigenvalue
        )));
    }
    let before = alpha_divergence(phi, psi, alpha)?.value;
    let after = alpha_divergence(
        &apply_predual(channel, phi)?,
        &apply_predual(channel, psi)?,
        alpha,
    )?
    .value;
    Ok(before - after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;

    #[test]
    fn identity_channel_is_neutral() {
        let mut rng = sample::rng(90);
        let shape = AlgebraShape::new(vec![2, 2]).unwrap();
        let ch = KrausChannel::identity(&shape);
        let w = sample::positive_functional(&mut rng, &shape);
        let out = apply_predual(&ch, &w).unwrap();
        for (a, b) in out.blocks().iter().zip(w.blocks()) {
            assert!(linalg::frob_norm(&(a - b)) < 1e-14);
        }
        assert!(monotonicity_gap(&ch, &w, &w, 0.3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn pinching_collapses_to_diagonal() {
        let shape = AlgebraShape::full(2);
        let ch = KrausChannel::pinching(&shape);
        let w = NormalFunctional::from_blocks(vec![CMat::from_fn(2, 2, |r, c| {
            linalg::creal([[0.5, 0.3], [0.3, 0.5]][r][c])
        })])
        .unwrap();
        let out = apply_predual(&ch, &w).unwrap();
        let b = &out.blocks()[0];
        assert_relative_eq!(b[(0, 0)].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(b[(1, 1)].re, 0.5, max_relative = 1e-14);
        assert!(b[(0, 1)].norm() < 1e-14 && b[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn random_channel_preserves_trace_and_positivity() {
        let mut rng = sample::rng(91);
        let in_shape = AlgebraShape::full(3);
        let out_shape = AlgebraShape::new(vec![2, 2]).unwrap();
        for _ in 0..10 {
            let ch = sample::channel(&mut rng, &in_shape, &out_shape, 3);
            let w = sample::positive_functional(&mut rng, &in_shape);
            let out = apply_predual(&ch, &w).unwrap();
            assert!(out.is_positive());
            assert!((out.trace_value().re - w.trace_value().re).abs() < 1e-10);
        }
    }

    #[test]
    fn validation_flags() {
        let shape = AlgebraShape::full(2);
        let id = KrausChannel::identity(&shape);
        let v = validate_channel(&id);
        assert!(v.trace_preserving && v.completely_positive);

        let doubled = KrausChannel::new(
            shape.clone(),
            shape.clone(),
            vec![linalg::identity(2) * linalg::creal(2.0)],
        )
        .unwrap();
        let v2 = validate_channel(&doubled);
        assert!(!v2.trace_preserving && v2.completely_positive);

        let mut rng = sample::rng(92);
        let ch = sample::channel(&mut rng, &shape, &shape, 4);
        let v3 = validate_channel(&ch);
        assert!(v3.trace_preserving && v3.completely_positive);
    }

    #[test]
    fn pinching_fixes_commuting_pairs() {
        let shape = AlgebraShape::full(2);
        let ch = KrausChannel::pinching(&shape);
        let phi = NormalFunctional::from_real_diagonals(&[vec![0.3, 0.7]]).unwrap();
        let psi = NormalFunctional::from_real_diagonals(&[vec![0.6, 0.4]]).unwrap();
        let gap = monotonicity_gap(&ch, &phi, &psi, 0.5).unwrap();
        assert!(gap.abs() < 1e-10);
    }

    #[test]
    fn monotonicity_gap_sweep() {
        let mut rng = sample::rng(93);
        let in_shape = AlgebraShape::full(3);
        let out_shape = AlgebraShape::full(2);
        for &alpha in &[-0.5, 0.0, 0.5] {
            for _ in 0..15 {
                let ch = sample::channel(&mut rng, &in_shape, &out_shape, 2);
                let phi = sample::positive_functional(&mut rng, &in_shape);
                let psi = sample::positive_functional(&mut rng, &in_shape);
                let gap = monotonicity_gap(&ch, &phi, &psi, alpha).unwrap();
                assert!(gap >= -1e-9, "alpha={alpha} gap={gap}");
            }
        }
    }

    #[test]
    fn chained_channels_only_decrease() {
        let mut rng = sample::rng(94);
        let s3 = AlgebraShape::full(3);
        let s2 = AlgebraShape::full(2);
        let c1 = sample::channel(&mut rng, &s3, &s3, 2);
        let c2 = sample::channel(&mut rng, &s3, &s2, 2);
        let phi = sample::positive_functional(&mut rng, &s3);
        let psi = sample::positive_functional(&mut rng, &s3);
        let alpha = 1.0 / 3.0;
        let s_start = alpha_divergence(&phi, &psi, alpha).unwrap().value;
        let (phi1, psi1) = (
            apply_predual(&c1, &phi).unwrap(),
            apply_predual(&c1, &psi).unwrap(),
        );
        let s_mid = alpha_divergence(&phi1, &psi1, alpha).unwrap().value;
        let (phi2, psi2) = (
            apply_predual(&c2, &phi1).unwrap(),
            apply_predual(&c2, &psi1).unwrap(),
        );
        let s_end = alpha_divergence(&phi2, &psi2, alpha).unwrap().value;
        assert!(s_mid <= s_start + 1e-9);
        assert!(s_end <= s_mid + 1e-9);
    }

    #[test]
    fn partial_trace_is_cptp_and_monotone() {
        let ch = KrausChannel::partial_trace(2, 2);
        let v = validate_channel(&ch);
        assert!(v.trace_preserving && v.completely_positive);
        let mut rng = sample::rng(95);
        let s4 = AlgebraShape::full(4);
        let phi = sample::positive_functional(&mut rng, &s4);
        let psi = sample::positive_functional(&mut rng, &s4);
        assert!(monotonicity_gap(&ch, &phi, &psi, 0.0).unwrap() >= -1e-9);
    }

    #[test]
    fn stochastic_matrix_channel_acts_classically() {
        let t = vec![vec![0.9, 0.2], vec![0.1, 0.8]];
        let ch = KrausChannel::from_stochastic_matrix(&t).unwrap();
        let v = validate_channel(&ch);
        assert!(v.trace_preserving && v.completely_positive);
        let p = NormalFunctional::from_real_diagonals(&[vec![1.0], vec![0.0]]).unwrap();
        let out = apply_predual(&ch, &p).unwrap();
        assert_relative_eq!(out.blocks()[0][(0, 0)].re, 0.9, max_relative = 1e-12);
        assert_relative_eq!(out.blocks()[1][(0, 0)].re, 0.1, max_relative = 1e-12);
    }

    #[test]
    fn invalid_channel_is_rejected_by_monotonicity() {
        let shape = AlgebraShape::full(2);
        let bad = KrausChannel::new(
            shape.clone(),
            shape.clone(),
            vec![linalg::identity(2) * linalg::creal(1.5)],
        )
        .unwrap();
        let phi = NormalFunctional::from_real_diagonals(&[vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            monotonicity_gap(&bad, &phi, &phi, 0.0),
            Err(Error::InvalidChannel(_))
        ));
    }
}
