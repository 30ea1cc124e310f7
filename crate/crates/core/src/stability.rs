//! Plane-wave dispersion of the linearized system, and two matrix facts
//! behind its stability: for `A` symmetric, `B` symmetric negative
//! semi-definite and `λ > 0`, the eigenvalues of `A − iB` have `Im ≥ 0`, and
//! the finite roots of `det(kA − iB − λI) = 0` have `k_r k_i ≤ 0`.
//!
//! A plane wave `exp(i(k·x − Ωt))` solves the linearized system iff
//! `det(ΩI − Σ_d k_d Ā_d + i·S) = 0`, where `S = D̄⁻¹Q̄` is the source. The
//! frequencies for a real wave vector are therefore the eigenvalues of
//! `Σ_d k_d Ā_d − i·S`; stability in time means `Im Ω ≥ 0`. For a real
//! frequency `ω > 0` in 1-D the wave numbers solve the pencil
//! `(ωI + i·S) v = k Ā₁ v`; stability in space means `k_r k_i ≤ 0`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, HmeError, Result};
use crate::linalg::{
    eigenvalues, match_spectra, normalized_det, qz_eigenvalues, sort_complex, symmetric_eigen, to_complex, CMatrix,
    RMatrix,
};
use crate::model::LinearModel;

/// A pencil root `(α, β)` with `|α| ≤ INFINITE_ROOT_TOL · ‖Ā₁‖` is infinite.
pub const INFINITE_ROOT_TOL: f64 = 1e-12;
pub const DEFAULT_TIME_TOL: f64 = 1e-9;
pub const DEFAULT_PRODUCT_TOL: f64 = 1e-9;
pub const LEMMA_TOL: f64 = 1e-10;
pub const MAX_LEMMA_SIZE: usize = 32;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug, Serialize)]
pub struct TimeDispersionPoint {
    pub k: Vec<f64>,
    /// Sorted by real part, then imaginary part.
    pub omegas: Vec<Complex64>,
    pub min_im: f64,
}

impl TimeDispersionPoint {
    pub fn is_stable(&self, tol: f64) -> bool {
        self.min_im >= -tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceDispersionPoint {
    pub omega: f64,
    /// Finite roots, sorted by real part, then imaginary part.
    pub ks: Vec<Complex64>,
    /// `k_r k_i / |k|²` for each finite root.
    pub products: Vec<f64>,
    pub worst_product: f64,
    pub infinite_count: usize,
    /// Largest `|det(kĀ₁ − iS − ωI)|` over the roots, normalized by the row norms.
    pub max_det_residual: f64,
}

impl SpaceDispersionPoint {
    pub fn is_stable(&self, tol: f64) -> bool {
        self.worst_product <= tol
    }
}

/// `Σ_d k_d Ā_d − i·S`.
pub fn time_symbol(model: &LinearModel, k: &[f64]) -> Result<CMatrix> {
    if k.len() != model.dim {
        return Err(invalid(format!(
            "wave vector has {} components, expected {}",
            k.len(),
            model.dim
        )));
    }
    if k.iter().any(|x| !x.is_finite()) {
        return Err(invalid("wave vector must be finite"));
    }
    let n = model.len();
    let mut re = RMatrix::zeros(n, n);
    for (kd, a) in k.iter().zip(&model.abar) {
        re += a * *kd;
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        Complex64::new(re[(r, c)], -model.source[(r, c)])
    }))
}

pub fn time_dispersion(model: &LinearModel, k: &[f64]) -> Result<TimeDispersionPoint> {
    let symbol = time_symbol(model, k)?;
    let mut omegas =
        eigenvalues(&symbol).map_err(|e| HmeError::Numerical(format!("time dispersion at k = {k:?}: {e}")))?;
    sort_complex(&mut omegas);
    let min_im = omegas.iter().fold(f64::INFINITY, |a, z| a.min(z.im));
    Ok(TimeDispersionPoint {
        k: k.to_vec(),
        omegas,
        min_im,
    })
}

/// Evaluates every wave vector in parallel; results keep the input order.
pub fn time_sweep(model: &LinearModel, ks: &[Vec<f64>]) -> Result<Vec<TimeDispersionPoint>> {
    ks.par_iter().map(|k| time_dispersion(model, k)).collect()
}

pub fn space_dispersion_1d(model: &LinearModel, omega: f64) -> Result<SpaceDispersionPoint> {
    if model.dim != 1 {
        return Err(HmeError::Unsupported(format!(
            "spatial dispersion is defined for one-dimensional processes only, got D = {}",
            model.dim
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid(format!("frequency must be strictly positive, got {omega}")));
    }
    let n = model.len();
    let a = to_complex(&model.abar[0]);
    let rhs = shifted_source(&model.source, omega);
    // α_j Ā₁ v = β_j (ωI + iS) v, so k_j = β_j / α_j
    let pairs =
        qz_eigenvalues(&a, &rhs).map_err(|e| HmeError::Numerical(format!("space dispersion at ω = {omega}: {e}")))?;
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut ks = Vec::with_capacity(n);
    let mut infinite_count = 0;
    for (alpha, beta) in pairs {
        if alpha.norm() <= INFINITE_ROOT_TOL * scale {
            infinite_count += 1;
        } else {
            ks.push(beta / alpha);
        }
    }
    if ks.is_empty() {
        return Err(HmeError::DegeneratePencil(n));
    }
    sort_complex(&mut ks);
    let products: Vec<f64> = ks.iter().map(|k| k.re * k.im / k.norm_sqr()).collect();
    let worst_product = products.iter().fold(f64::NEG_INFINITY, |a, &p| a.max(p));
    let max_det_residual = ks
        .iter()
        .map(|k| normalized_det(&(&a * *k - &rhs)))
        .fold(0.0f64, f64::max);
    Ok(SpaceDispersionPoint {
        omega,
        ks,
        products,
        worst_product,
        infinite_count,
        max_det_residual,
    })
}

pub fn space_sweep_1d(model: &LinearModel, omegas: &[f64]) -> Result<Vec<SpaceDispersionPoint>> {
    omegas.par_iter().map(|&w| space_dispersion_1d(model, w)).collect()
}

/// `ωI + iS`.
fn shifted_source(source: &RMatrix, omega: f64) -> CMatrix {
    let n = source.nrows();
    CMatrix::from_fn(n, n, |r, c| {
        let d = if r == c { omega } else { 0.0 };
        Complex64::new(d, source[(r, c)])
    })
}

/// `n` points from `lo` to `hi`, geometrically spaced if `log`.
pub fn sweep_points(lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("a sweep needs at least one point"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(invalid(format!("invalid sweep range [{lo}, {hi}]")));
    }
    if log && lo <= 0.0 {
        return Err(invalid(format!(
            "a logarithmic sweep needs a positive lower bound, got {lo}"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else if log {
                (lo.ln() + step(i) * (hi / lo).ln()).exp()
            } else {
                lo + step(i) * (hi - lo)
            }
        })
        .collect())
}

/// The similarity behind the time-stability argument: with `H = Σ_d k_d
/// T⁻¹M̄_dT − i·T⁻¹Q̄T`, a real symmetric matrix minus `i` times a symmetric
/// negative semi-definite one, `Σ_d k_d Ā_d − i·S` is similar to `H`.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetricFormCheck {
    /// Largest distance between the two spectra after pairing.
    pub spectral_gap: f64,
    /// `max |Re H − (Re H)ᵀ|` and `max |Im H − (Im H)ᵀ|`.
    pub symmetry_residual: f64,
    /// Largest eigenvalue of `T⁻¹Q̄T`, which must not be positive.
    pub source_max_eig: f64,
}

pub fn symmetric_form_check(model: &LinearModel, k: &[f64]) -> Result<SymmetricFormCheck> {
    let symbol = time_symbol(model, k)?;
    let t = model.t_matrix();
    let ti = model.t_inv_matrix();
    let n = model.len();
    let mut re = RMatrix::zeros(n, n);
    for (kd, m) in k.iter().zip(&model.mbar) {
        re += &ti * m * &t * *kd;
    }
    let q = &ti * &model.qbar * &t;
    let sym = |m: &RMatrix| crate::linalg::symmetry_residual(m);
    let h = CMatrix::from_fn(n, n, |r, c| Complex64::new(re[(r, c)], -q[(r, c)]));
    let a = eigenvalues(&symbol)?;
    let b = eigenvalues(&h)?;
    let (ev, _) = symmetric_eigen(&q);
    Ok(SymmetricFormCheck {
        spectral_gap: match_spectra(&a, &b),
        symmetry_residual: sym(&re).max(sym(&q)),
        source_max_eig: ev.last().copied().unwrap_or(0.0),
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaStats {
    pub trials: usize,
    pub n: usize,
    /// Eigenvalues of `A − iB` with `Im < −tol`.
    pub eigenvalue_violations: usize,
    /// Finite roots of `det(kA − iB − λI) = 0` with `k_r k_i > tol·|k|²`.
    pub wavenumber_violations: usize,
    pub min_im: f64,
    pub worst_product: f64,
    pub infinite_roots: usize,
}

impl LemmaStats {
    pub fn passed(&self) -> bool {
        self.eigenvalue_violations == 0 && self.wavenumber_violations == 0
    }
}

/// Random trials of both lemmas with `A` symmetric and `B` symmetric
/// negative semi-definite of random rank, each of unit Frobenius norm, and
/// `λ` drawn from `[0.1, 10)`.
pub fn lemma_property_harness(trials: usize, n: usize, seed: u64) -> Result<LemmaStats> {
    if n == 0 || n > MAX_LEMMA_SIZE {
        return Err(invalid(format!("matrix size must be in 1..={MAX_LEMMA_SIZE}, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(RMatrix, RMatrix, f64)> = (0..trials)
        .map(|_| {
            let x = RMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let rank = rng.random_range(0..=n);
            let c = RMatrix::from_fn(rank, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let lambda = rng.random_range(0.1..10.0);
            let a = (&x + x.transpose()) * 0.5;
            let b = -(c.transpose() * c);
            (normalize(a), normalize(b), lambda)
        })
        .collect();
    let per_trial: Vec<LemmaStats> = inputs
        .par_iter()
        .map(|(a, b, lambda)| lemma_trial(a, b, *lambda))
        .collect::<Result<_>>()?;
    let mut stats = LemmaStats {
        trials,
        n,
        min_im: f64::INFINITY,
        worst_product: f64::NEG_INFINITY,
        ..Default::default()
    };
    for s in per_trial {
        stats.eigenvalue_violations += s.eigenvalue_violations;
        stats.wavenumber_violations += s.wavenumber_violations;
        stats.infinite_roots += s.infinite_roots;
        stats.min_im = stats.min_im.min(s.min_im);
        stats.worst_product = stats.worst_product.max(s.worst_product);
    }
    Ok(stats)
}

fn normalize(m: RMatrix) -> RMatrix {
    let f = m.norm();
    if f == 0.0 {
        m
    } else {
        m / f
    }
}

/// Both lemmas for one `(A, B, λ)`.
pub fn lemma_trial(a: &RMatrix, b: &RMatrix, lambda: f64) -> Result<LemmaStats> {
    let n = a.nrows();
    let symbol = CMatrix::from_fn(n, n, |r, c| Complex64::new(a[(r, c)], -b[(r, c)]));
    let ev = eigenvalues(&symbol)?;
    let min_im = ev.iter().fold(f64::INFINITY, |acc, z| acc.min(z.im));
    let eigenvalue_violations = ev.iter().filter(|z| z.im < -LEMMA_TOL).count();

    let ac = to_complex(a);
    let rhs = CMatrix::identity(n, n) * Complex64::new(lambda, 0.0) + to_complex(b) * I;
    let pairs = qz_eigenvalues(&ac, &rhs)?;
    let scale = a.norm();
    let mut infinite_roots = 0;
    let mut worst_product = f64::NEG_INFINITY;
    let mut wavenumber_violations = 0;
    for (alpha, beta) in pairs {
        if alpha.norm() <= INFINITE_ROOT_TOL * scale {
            infinite_roots += 1;
            continue;
        }
        let k = beta / alpha;
        let p = k.re * k.im / k.norm_sqr();
        worst_product = worst_product.max(p);
        if p > LEMMA_TOL {
            wavenumber_violations += 1;
        }
    }
    Ok(LemmaStats {
        trials: 1,
        n,
        eigenvalue_violations,
        wavenumber_violations,
        min_im,
        worst_product,
        infinite_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::linearize;
    use crate::basis::MomentBasis;
    use crate::collision::CollisionModel;
    use crate::linalg::real_eigenvalues;

    fn model(dim: usize, order: usize, c: &CollisionModel) -> LinearModel {
        let b = MomentBasis::new(dim, order).unwrap();
        let lin = linearize(&b, 1.0, 1.0).unwrap();
        LinearModel::hme(&lin, c.qbar(&b).unwrap()).unwrap()
    }

    #[test]
    fn bgk_at_zero_wave_number() {
        let m = model(1, 3, &CollisionModel::Bgk { tau: 1.0 });
        let p = time_dispersion(&m, &[0.0]).unwrap();
        let expected = [Complex64::new(0.0, 0.0); 3]
            .into_iter()
            .chain([Complex64::new(0.0, 1.0)])
            .collect::<Vec<_>>();
        assert!(match_spectra(&p.omegas, &expected) < 1e-14);
    }

    #[test]
    fn conserved_modes_at_zero_wave_number() {
        for dim in 1..=3 {
            let m = model(
                dim,
                4,
                &CollisionModel::Shakhov {
                    tau: 0.7,
                    pr: 2.0 / 3.0,
                },
            );
            let p = time_dispersion(&m, &vec![0.0; dim]).unwrap();
            let zeros = p.omegas.iter().filter(|z| z.norm() < 1e-10).count();
            assert!(zeros >= dim + 2, "D = {dim}: {zeros} zero modes");
        }
    }

    #[test]
    fn collisionless_spectrum_is_real_and_scales_with_k() {
        let m = model(1, 5, &CollisionModel::None);
        let base = real_eigenvalues(&m.abar[0]).unwrap();
        let p = time_dispersion(&m, &[2.5]).unwrap();
        assert!(p.omegas.iter().all(|z| z.im.abs() < 1e-12));
        let scaled: Vec<_> = base.iter().map(|z| z * 2.5).collect();
        assert!(match_spectra(&p.omegas, &scaled) < 1e-10);
    }

    #[test]
    fn collisionless_space_roots_are_reciprocal_speeds() {
        for order in 3..=6 {
            let m = model(1, order, &CollisionModel::None);
            let speeds = real_eigenvalues(&m.abar[0]).unwrap();
            let omega = 0.8;
            let p = space_dispersion_1d(&m, omega).unwrap();
            let nonzero: Vec<Complex64> = speeds
                .iter()
                .filter(|z| z.norm() > 1e-8)
                .map(|z| Complex64::new(omega, 0.0) / z)
                .collect();
            assert!(match_spectra(&p.ks, &nonzero) < 1e-9, "M = {order}");
            assert!(p.products.iter().all(|x| x.abs() < 1e-12));
            // odd number of speeds: one zero speed gives one infinite root
            assert_eq!(p.infinite_count, speeds.len() - nonzero.len());
            assert_eq!(p.infinite_count, usize::from(order % 2 == 0));
        }
    }

    #[test]
    fn bgk_space_roots_are_damped_and_exact() {
        let m = model(1, 3, &CollisionModel::Bgk { tau: 1.0 });
        let p = space_dispersion_1d(&m, 1.0).unwrap();
        assert_eq!(p.ks.len() + p.infinite_count, 4);
        assert!(p.worst_product <= 1e-9);
        assert!(p.max_det_residual <= 1e-8, "{}", p.max_det_residual);
    }

    #[test]
    fn infinite_roots_match_kernel_of_flux() {
        for order in [4, 6] {
            let m = model(
                1,
                order,
                &CollisionModel::EsBgk {
                    tau: 1.0,
                    pr: 2.0 / 3.0,
                },
            );
            let p = space_dispersion_1d(&m, 0.3).unwrap();
            let kernel = crate::linalg::null_space(&m.abar[0], 1e-10).ncols();
            assert_eq!(p.infinite_count, kernel);
        }
    }

    #[test]
    fn space_dispersion_rejects_bad_input() {
        let m = model(1, 3, &CollisionModel::Bgk { tau: 1.0 });
        assert!(space_dispersion_1d(&m, 0.0).is_err());
        assert!(space_dispersion_1d(&m, -1.0).is_err());
        let m2 = model(2, 3, &CollisionModel::Bgk { tau: 1.0 });
        assert!(matches!(space_dispersion_1d(&m2, 1.0), Err(HmeError::Unsupported(_))));
        assert!(time_dispersion(&m2, &[1.0]).is_err());
    }

    #[test]
    fn symmetric_form_has_same_spectrum() {
        let m = model(
            2,
            4,
            &CollisionModel::Shakhov {
                tau: 0.5,
                pr: 2.0 / 3.0,
            },
        );
        let c = symmetric_form_check(&m, &[0.7, -1.3]).unwrap();
        assert!(c.spectral_gap < 1e-9, "{}", c.spectral_gap);
        assert!(c.symmetry_residual < 1e-12);
        assert!(c.source_max_eig < 1e-12);
    }

    #[test]
    fn sweep_points_cover_range() {
        let p = sweep_points(1e-2, 1e2, 5, true).unwrap();
        assert_eq!(p.len(), 5);
        assert!((p[2] - 1.0).abs() < 1e-14 && p[0] == 1e-2 && p[4] == 1e2);
        assert_eq!(sweep_points(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(sweep_points(0.0, 1.0, 3, true).is_err());
        assert!(sweep_points(1.0, 0.0, 3, false).is_err());
        assert!(sweep_points(1.0, 2.0, 0, false).is_err());
    }

    #[test]
    fn scalar_lemma_case() {
        // det(k − i(−1) − 1) = 0 gives k = 1 − i
        let a = RMatrix::identity(1, 1);
        let b = -RMatrix::identity(1, 1);
        let s = lemma_trial(&a, &b, 1.0).unwrap();
        assert_eq!(s.wavenumber_violations, 0);
        assert!((s.worst_product + 0.5).abs() < 1e-15);
        assert!((s.min_im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_source_gives_real_spectrum() {
        let a = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let s = lemma_trial(&a, &RMatrix::zeros(2, 2), 0.5).unwrap();
        assert!(s.min_im.abs() < 1e-15);
        assert!(s.worst_product.abs() < 1e-15);
    }

    #[test]
    fn harness_is_reproducible() {
        let a = lemma_property_harness(20, 6, 7).unwrap();
        let b = lemma_property_harness(20, 6, 7).unwrap();
        assert!(a.passed());
        assert_eq!(a.min_im, b.min_im);
        assert_eq!(a.worst_product, b.worst_product);
        assert!(lemma_property_harness(1, 33, 0).is_err());
    }
}
