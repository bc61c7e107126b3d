//! Block-operator algebra of the multiple scattering expansion.
//!
//! Everything here is basis agnostic: the spectral backends hand in 4×4
//! blocks per mode, this module combines them into round-trip operators,
//! log-determinants and frequency sums.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, Matrix4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_semi_infinite, QuadResult, QuadratureConfig};
use crate::types::{EnergyBreakdown, Inverse, MatsubaraTerm, PolarizationBlock, Wavenumber};

/// `Σ_{p=0}^{order} K^p`
pub fn neumann_inverse(k: &PolarizationBlock, order: usize) -> PolarizationBlock {
    let mut sum = Matrix4::identity();
    let mut power = Matrix4::identity();
    for _ in 0..order {
        power = k.0 * power;
        sum += power;
    }
    PolarizationBlock(sum)
}

/// `(1 - K)⁻¹`, or `None` when `1 - K` is singular.
///
/// `1 - K` is balanced by a diagonal similarity first, so strongly
/// asymmetric couplings (large permittivities, κ ≪ k) do not masquerade as
/// ill-conditioning.
pub fn exact_inverse(k: &PolarizationBlock) -> Option<PolarizationBlock> {
    let (a, d) = balanced(Matrix4::identity() - k.0);
    // Hadamard ratio |det A|/Π‖rowᵢ‖ ∈ [0, 1]; near zero only for a (nearly)
    // singular matrix, unlike ‖A‖‖A⁻¹‖ which also flags exact triangular
    // couplings that balancing cannot shrink.
    let rows: f64 = (0..4).map(|i| a.row(i).norm()).product();
    let hadamard = a.determinant().abs() / rows;
    if !(hadamard.is_finite() && hadamard > 1e-13) {
        return None;
    }
    let inv = a.lu().try_inverse()?;
    if !inv.iter().all(|x| x.is_finite()) {
        return None;
    }
    Some(PolarizationBlock(Matrix4::from_fn(|i, j| d[i] * inv[(i, j)] / d[j])))
}

/// Osborne balancing with power-of-two factors: returns `D⁻¹AD` and `D`.
fn balanced(mut a: Matrix4<f64>) -> (Matrix4<f64>, [f64; 4]) {
    let mut d = [1.0; 4];
    for _ in 0..64 {
        let mut done = true;
        for i in 0..4 {
            let (mut c, mut r) = (0.0, 0.0);
            for j in (0..4).filter(|&j| j != i) {
                c += a[(j, i)].abs();
                r += a[(i, j)].abs();
            }
            if c == 0.0 || r == 0.0 || !(c + r).is_finite() {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                f *= 2.0;
                c *= 4.0;
            }
            while c > r * 2.0 {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * total {
                done = false;
                d[i] *= f;
                for j in 0..4 {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    (a, d)
}

fn inverse_of(k: &PolarizationBlock, inverse: Inverse, body: usize) -> Result<Matrix4<f64>> {
    match inverse {
        Inverse::Neumann(l) => Ok(neumann_inverse(k, l).0),
        Inverse::Exact => exact_inverse(k).map(|b| b.0).ok_or(Error::SingularSelfOperator(body)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripResult {
    pub matrix: PolarizationBlock,
    pub logdet_one_minus: f64,
}

/// `N = (1 - K₁₁)⁻¹ K₁₂ (1 - K₂₂)⁻¹ K₂₁` and `ln det(1 - N)`.
pub fn round_trip(
    k11: &PolarizationBlock,
    k12: &PolarizationBlock,
    k22: &PolarizationBlock,
    k21: &PolarizationBlock,
    inner: Inverse,
) -> Result<RoundTripResult> {
    round_trip_split(k11, k12, k22, k21, inner, inner)
}

/// As [`round_trip`] with separate inverse orders for the two bodies.
pub fn round_trip_split(
    k11: &PolarizationBlock,
    k12: &PolarizationBlock,
    k22: &PolarizationBlock,
    k21: &PolarizationBlock,
    inner1: Inverse,
    inner2: Inverse,
) -> Result<RoundTripResult> {
    let p1 = inverse_of(k11, inner1, 1)?;
    let p2 = inverse_of(k22, inner2, 2)?;
    let n = p1 * k12.0 * p2 * k21.0;
    let logdet_one_minus = logdet_one_minus(&n)?;
    Ok(RoundTripResult { matrix: PolarizationBlock(n), logdet_one_minus })
}

/// `det(1 - N) - 1` from the principal minors of `N`, free of cancellation
/// against the leading 1.
pub fn det_one_minus_minus_one(n: &Matrix4<f64>) -> f64 {
    // higher minors are below rounding here, and the LU inside
    // `determinant` breaks down on subnormal entries
    if n.amax() < 1e-100 {
        return -n.trace();
    }
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    let mut c3 = 0.0;
    for i in 0..4 {
        c1 += n[(i, i)];
        for j in i + 1..4 {
            c2 += n[(i, i)] * n[(j, j)] - n[(i, j)] * n[(j, i)];
            for k in j + 1..4 {
                let idx = [i, j, k];
                let m = |a: usize, b: usize| n[(idx[a], idx[b])];
                c3 += m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            }
        }
    }
    let c4 = n.determinant();
    -c1 + c2 - c3 + c4
}

/// `ln det(1 - N)`; a non-positive determinant is an error.
pub fn logdet_one_minus(n: &Matrix4<f64>) -> Result<f64> {
    let x = det_one_minus_minus_one(n);
    if !(x > -1.0) {
        return Err(Error::NonPositiveDeterminant(1.0 + x));
    }
    Ok(x.ln_1p())
}

/// `-Σ_{p=1}^{powers} tr(N^p)/p`, the truncated expansion of `ln det(1 - N)`.
pub fn truncated_logdet(n: &Matrix4<f64>, powers: usize) -> f64 {
    let mut power = Matrix4::identity();
    let mut sum = 0.0;
    for p in 1..=powers {
        power = n * power;
        sum -= power.trace() / p as f64;
    }
    sum
}

/// `Σ_{p=1}^{powers} tr(N^p)`, or `tr((1 - N)⁻¹ N)` when `powers` is `None`.
///
/// Multiplied by `2 s₀` this is `∂ ln det(1 - N)/∂d` when `N ∝ e^{-2 s₀ d}`.
pub fn resolvent_trace(n: &Matrix4<f64>, powers: Option<usize>) -> Result<f64> {
    match powers {
        Some(powers) => {
            let mut power = Matrix4::identity();
            let mut sum = 0.0;
            for _ in 0..powers {
                power = n * power;
                sum += power.trace();
            }
            Ok(sum)
        }
        None => {
            let inv = (Matrix4::identity() - n).try_inverse().ok_or(Error::NonPositiveDeterminant(0.0))?;
            Ok((inv * n).trace())
        }
    }
}

/// Eigenvalues sorted by descending modulus, then descending real part.
///
/// A spectrum the QR iteration fails on is reported as NaN.
pub fn block_eigenvalues(k: &PolarizationBlock) -> [Complex<f64>; 4] {
    let mut out = [Complex::new(f64::NAN, f64::NAN); 4];
    if let Some(ev) = real_eigenvalues(DMatrix::from_column_slice(4, 4, k.0.as_slice())) {
        for (o, v) in out.iter_mut().zip(ev.iter()) {
            *o = *v;
        }
    }
    sort_eigenvalues(&mut out);
    out
}

/// Eigenvalues of a real square matrix, or `None` if the QR iteration fails.
///
/// nalgebra's unshifted Schur iteration can stall forever on exactly paired
/// spectra such as `{±λ, ±λ̄}`; faer's uses exceptional shifts.
pub(crate) fn real_eigenvalues(a: DMatrix<f64>) -> Option<Vec<Complex<f64>>> {
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let ev = m.eigenvalues().ok()?;
    Some(ev.into_iter().map(|z| Complex::new(z.re, z.im)).collect())
}

pub(crate) fn sort_eigenvalues(values: &mut [Complex<f64>]) {
    values.sort_by(|a, b| {
        let (ma, mb) = (a.norm(), b.norm());
        let scale = ma.max(mb).max(1e-300);
        if (ma - mb).abs() > 1e-12 * scale {
            mb.total_cmp(&ma)
        } else {
            b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
        }
    });
}

/// Largest distance between the spectrum and its negation, matched greedily.
pub fn pairing_defect(values: &[Complex<f64>]) -> f64 {
    let mut rest: Vec<Complex<f64>> = values.iter().map(|v| -v).collect();
    let mut worst: f64 = 0.0;
    for v in values {
        let (idx, d) = rest
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (v - w).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        worst = worst.max(d);
        rest.swap_remove(idx);
    }
    worst
}

/// Stopping rule and limits of a Matsubara sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatsubaraConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub n_max: usize,
}

impl Default for MatsubaraConfig {
    fn default() -> Self {
        MatsubaraConfig { rel_tol: 1e-9, abs_tol: 1e-300, n_max: 100_000 }
    }
}

impl From<&QuadratureConfig> for MatsubaraConfig {
    fn from(q: &QuadratureConfig) -> Self {
        MatsubaraConfig { rel_tol: q.rel_tol, abs_tol: q.abs_tol, ..Default::default() }
    }
}

/// Consecutive small terms needed before the sum is truncated.
pub const TAIL_RUN: usize = 3;

/// `τ [½ term(κ₀) + Σ_{n≥1} term(κₙ)]` with `κₙ = 2πnτ`.
///
/// Stops once [`TAIL_RUN`] consecutive terms fall below
/// `max(rel_tol·|partial sum|, abs_tol)`. `term(0)` must already be the
/// static value where the integrand is singular at κ = 0.
pub fn matsubara_sum<F>(mut term: F, tau: f64, cfg: &MatsubaraConfig) -> EnergyBreakdown
where
    F: FnMut(Wavenumber) -> f64,
{
    let step = 2.0 * PI * tau;
    let mut terms = Vec::new();
    let mut sum = 0.0;
    let mut small_run = 0;
    let mut last = 0.0;
    for n in 0..=cfg.n_max {
        let kappa = step * n as f64;
        let value = term(Wavenumber::new(kappa).expect("grid wavenumbers are finite"));
        terms.push(MatsubaraTerm { n, kappa, value });
        let weighted = EnergyBreakdown::weight(tau, n) * value;
        sum += weighted;
        last = weighted.abs();
        if n == 0 {
            continue;
        }
        if last <= (cfg.rel_tol * sum.abs()).max(cfg.abs_tol) {
            small_run += 1;
            if small_run >= TAIL_RUN {
                return EnergyBreakdown { terms, total: sum, tail_estimate: last, converged: true };
            }
        } else {
            small_run = 0;
        }
    }
    EnergyBreakdown { terms, total: sum, tail_estimate: last, converged: false }
}

/// Batch size of [`matsubara_sum_par`].
const BATCH: usize = 16;

/// As [`matsubara_sum`], evaluating batches of terms concurrently.
///
/// Terms are combined in index order, so the result does not depend on the
/// number of worker threads.
pub fn matsubara_sum_par<F>(term: F, tau: f64, cfg: &MatsubaraConfig) -> EnergyBreakdown
where
    F: Fn(Wavenumber) -> f64 + Sync,
{
    let step = 2.0 * PI * tau;
    let mut cache: Vec<f64> = Vec::new();
    let mut next = 0usize;
    matsubara_sum(
        |k| {
            if next == cache.len() {
                let start = cache.len();
                let end = (start + BATCH).min(cfg.n_max + 1);
                let batch: Vec<f64> = (start..end)
                    .into_par_iter()
                    .map(|n| term(Wavenumber::new(step * n as f64).expect("grid wavenumbers are finite")))
                    .collect();
                cache.extend(batch);
            }
            debug_assert_eq!(k.value(), step * next as f64);
            next += 1;
            cache[next - 1]
        },
        tau,
        cfg,
    )
}

/// `(1/2π) ∫₀^∞ dκ term(κ)` with the map `κ = scale·t/(1 - t)`.
pub fn zero_temperature_integral<F>(term: F, scale: f64, cfg: &QuadratureConfig) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    let mut r = integrate_semi_infinite(term, scale, cfg);
    r.value /= 2.0 * PI;
    r.abs_error /= 2.0 * PI;
    r
}
