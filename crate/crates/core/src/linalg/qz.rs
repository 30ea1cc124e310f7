//! Eigenvalues of a complex matrix pencil `(A, B)` by single-shift QZ.
//!
//! The pencil is reduced to Hessenberg-triangular form with Givens rotations
//! and then iterated with Wilkinson-type shifts until `A` is triangular. Only
//! the generalized eigenvalues are returned, as pairs `(α_j, β_j)` with
//! `A v = (α_j/β_j) B v`. The iteration assumes `B` is nonsingular; callers
//! that expect infinite eigenvalues put the possibly singular matrix in the
//! `A` slot and read the pair the other way round.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HmeError, Result};

type C = Complex64;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: C,
}

impl Rotation {
    /// Rotation with `[c s; -s̄ c] [f; g] = [r; 0]`.
    fn zeroing(f: C, g: C) -> Self {
        let gn = g.norm();
        if gn == 0.0 {
            return Self {
                c: 1.0,
                s: C::new(0.0, 0.0),
            };
        }
        let fn_ = f.norm();
        if fn_ == 0.0 {
            return Self {
                c: 0.0,
                s: g.conj() / gn,
            };
        }
        let n = fn_.hypot(gn);
        let phase = f / fn_;
        Self {
            c: fn_ / n,
            s: phase * g.conj() / n,
        }
    }

    fn apply_rows(&self, m: &mut DMatrix<C>, i: usize, j: usize, cols: std::ops::RangeInclusive<usize>) {
        for k in cols {
            let x = m[(i, k)];
            let y = m[(j, k)];
            m[(i, k)] = x * self.c + self.s * y;
            m[(j, k)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Column rotation on `(i, i+1)` built from `(f, g) = (m[r, i+1], m[r, i])`,
    /// which zeroes `m[r, i]`.
    fn apply_cols(&self, m: &mut DMatrix<C>, i: usize, j: usize, rows: std::ops::RangeInclusive<usize>) {
        for k in rows {
            let x = m[(k, i)];
            let y = m[(k, j)];
            m[(k, i)] = x * self.c - self.s.conj() * y;
            m[(k, j)] = self.s * x + y * self.c;
        }
    }
}

fn frobenius(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Generalized eigenvalue pairs `(α_j, β_j)` of `A v = λ B v`.
pub fn qz_eigenvalues(a: &DMatrix<C>, b: &DMatrix<C>) -> Result<Vec<(C, C)>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(HmeError::InvalidParameter(format!(
            "pencil shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(HmeError::Numerical(format!(
            "non-finite entries in pencil\nA = {a}\nB = {b}"
        )));
    }
    let mut s = a.clone();
    let mut t = b.clone();

    // B ← QᴴB upper triangular
    for j in 0..n {
        for i in (j + 1..n).rev() {
            let r = Rotation::zeroing(t[(i - 1, j)], t[(i, j)]);
            r.apply_rows(&mut t, i - 1, i, j..=n - 1);
            r.apply_rows(&mut s, i - 1, i, 0..=n - 1);
            t[(i, j)] = C::new(0.0, 0.0);
        }
    }

    // Hessenberg-triangular reduction
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let r = Rotation::zeroing(s[(i - 1, j)], s[(i, j)]);
            r.apply_rows(&mut s, i - 1, i, j..=n - 1);
            r.apply_rows(&mut t, i - 1, i, i - 1..=n - 1);
            s[(i, j)] = C::new(0.0, 0.0);
            let z = Rotation::zeroing(t[(i, i)], t[(i, i - 1)]);
            z.apply_cols(&mut t, i - 1, i, 0..=i);
            z.apply_cols(&mut s, i - 1, i, 0..=n - 1);
            t[(i, i - 1)] = C::new(0.0, 0.0);
        }
    }

    let eps = f64::EPSILON;
    let anorm = frobenius(&s).max(f64::MIN_POSITIVE);
    let bnorm = frobenius(&t).max(f64::MIN_POSITIVE);
    let mut ihi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    while ihi > 0 {
        let mut ilo = ihi;
        while ilo > 0 && s[(ilo, ilo - 1)].norm() > eps * anorm {
            ilo -= 1;
        }
        if ilo > 0 {
            s[(ilo, ilo - 1)] = C::new(0.0, 0.0);
        }
        if ilo == ihi {
            ihi -= 1;
            iter = 0;
            continue;
        }
        for k in ilo..=ihi {
            if t[(k, k)].norm() <= eps * bnorm {
                return Err(HmeError::Numerical(format!(
                    "QZ: B is numerically singular at diagonal {k}; swap the pencil\nA = {a}\nB = {b}"
                )));
            }
        }
        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(HmeError::Numerical(format!(
                "QZ iteration did not converge after {total} sweeps\nA = {a}\nB = {b}"
            )));
        }

        let shift = if iter.is_multiple_of(10) {
            // exceptional shift
            let scale = s[(ihi, ihi - 1)].norm() / t[(ihi - 1, ihi - 1)].norm();
            s[(ihi, ihi)] / t[(ihi, ihi)] + C::new(scale, 0.5 * scale)
        } else {
            wilkinson_shift(&s, &t, ihi)
        };

        let mut x = s[(ilo, ilo)] - shift * t[(ilo, ilo)];
        let mut y = s[(ilo + 1, ilo)];
        for k in ilo..ihi {
            if k > ilo {
                x = s[(k, k - 1)];
                y = s[(k + 1, k - 1)];
            }
            let r = Rotation::zeroing(x, y);
            let first = if k > ilo { k - 1 } else { ilo };
            r.apply_rows(&mut s, k, k + 1, first..=ihi);
            r.apply_rows(&mut t, k, k + 1, k..=ihi);
            if k > ilo {
                s[(k + 1, k - 1)] = C::new(0.0, 0.0);
            }
            let z = Rotation::zeroing(t[(k + 1, k + 1)], t[(k + 1, k)]);
            z.apply_cols(&mut s, k, k + 1, ilo..=(k + 2).min(ihi));
            z.apply_cols(&mut t, k, k + 1, ilo..=k + 1);
            t[(k + 1, k)] = C::new(0.0, 0.0);
        }
    }

    Ok((0..n).map(|i| (s[(i, i)], t[(i, i)])).collect())
}

/// Eigenvalue of the trailing 2×2 sub-pencil closest to `s[h,h]/t[h,h]`.
fn wilkinson_shift(s: &DMatrix<C>, t: &DMatrix<C>, h: usize) -> C {
    let (a11, a12, a21, a22) = (s[(h - 1, h - 1)], s[(h - 1, h)], s[(h, h - 1)], s[(h, h)]);
    let (b11, b12, b22) = (t[(h - 1, h - 1)], t[(h - 1, h)], t[(h, h)]);
    let rayleigh = a22 / b22;
    // det(A − λB) = qa λ² − qb λ + qc
    let qa = b11 * b22;
    let qb = a11 * b22 + a22 * b11 - a21 * b12;
    let qc = a11 * a22 - a12 * a21;
    if qa.norm() == 0.0 {
        return rayleigh;
    }
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let (r1, r2) = {
        let big = if (qb + disc).norm() >= (qb - disc).norm() {
            qb + disc
        } else {
            qb - disc
        };
        if big.norm() == 0.0 {
            (C::new(0.0, 0.0), C::new(0.0, 0.0))
        } else {
            (big / (qa * 2.0), qc * 2.0 / big)
        }
    };
    let pick = if (r1 - rayleigh).norm() <= (r2 - rayleigh).norm() {
        r1
    } else {
        r2
    };
    if pick.re.is_finite() && pick.im.is_finite() {
        pick
    } else {
        rayleigh
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, match_spectra};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
        DMatrix::from_fn(n, n, |_, _| {
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_b_reproduces_standard_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 6, 12, 25] {
            let a = random_complex(n, &mut rng);
            let pairs = qz_eigenvalues(&a, &DMatrix::identity(n, n)).unwrap();
            let lam: Vec<C> = pairs.iter().map(|(x, y)| x / y).collect();
            let reference = eigenvalues(&a).unwrap();
            assert!(match_spectra(&lam, &reference) < 1e-10 * (n as f64), "n = {n}");
        }
    }

    #[test]
    fn general_pencil_matches_inverse_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 5, 9, 16] {
            let a = random_complex(n, &mut rng);
            let b = random_complex(n, &mut rng) + DMatrix::<C>::identity(n, n) * C::new(2.0, 0.0);
            let pairs = qz_eigenvalues(&a, &b).unwrap();
            let lam: Vec<C> = pairs.iter().map(|(x, y)| x / y).collect();
            let binv_a = b.clone().try_inverse().unwrap() * &a;
            let reference = eigenvalues(&binv_a).unwrap();
            assert!(match_spectra(&lam, &reference) < 1e-9, "n = {n}");
            // every root makes A − λB singular
            for l in &lam {
                let m = &a - &b * *l;
                assert!(crate::linalg::normalized_det(&m) < 1e-10);
            }
        }
    }

    #[test]
    fn singular_a_gives_zero_alpha() {
        // A = diag(1, 0, 2) in a rotated frame
        let q = nalgebra::DMatrix::<f64>::from_row_slice(3, 3, &[0.6, 0.8, 0.0, -0.8, 0.6, 0.0, 0.0, 0.0, 1.0]);
        let d = nalgebra::DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 2.0]));
        let a = (q.transpose() * d * &q).map(|x| C::new(x, 0.0));
        let pairs = qz_eigenvalues(&a, &DMatrix::identity(3, 3)).unwrap();
        let zeros = pairs.iter().filter(|(x, _)| x.norm() < 1e-14).count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn rejects_shape_mismatch() {
        let a = DMatrix::<C>::identity(2, 2);
        let b = DMatrix::<C>::identity(3, 3);
        assert!(qz_eigenvalues(&a, &b).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn every_root_makes_the_pencil_singular(n in 1usize..14, seed in proptest::prelude::any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_complex(n, &mut rng);
            let b = random_complex(n, &mut rng) + DMatrix::<C>::identity(n, n) * C::new(3.0, 0.0);
            let pairs = qz_eigenvalues(&a, &b).unwrap();
            proptest::prop_assert_eq!(pairs.len(), n);
            for (x, y) in pairs {
                let m = &a * y - &b * x;
                proptest::prop_assert!(crate::linalg::normalized_det(&m) < 1e-9);
            }
        }
    }
}
