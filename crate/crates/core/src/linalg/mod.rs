//! Dense linear-algebra helpers shared by the analysis modules.

mod qz;

pub use qz::qz_eigenvalues;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{HmeError, Result};

pub type RMatrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn max_abs(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `max |m_ij − m_ji|`.
pub fn symmetry_residual(m: &RMatrix) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn diag(values: &[f64]) -> RMatrix {
    RMatrix::from_diagonal(&DVector::from_column_slice(values))
}

/// Eigenvalues of a general complex matrix via the Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(HmeError::Numerical(format!("non-finite entries\n{m}")));
    }
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, 1000 * n.max(1)) {
        if let Some(v) = schur.eigenvalues() {
            return Ok(v.iter().copied().collect());
        }
    }
    // nalgebra's local deflation test can stall on clustered spectra; the QZ
    // iteration deflates against the global norm instead
    let pairs = qz_eigenvalues(m, &CMatrix::identity(n, n))?;
    Ok(pairs.into_iter().map(|(a, b)| a / b).collect())
}

pub fn real_eigenvalues(m: &RMatrix) -> Result<Vec<Complex64>> {
    eigenvalues(&to_complex(m))
}

/// Eigen-decomposition of the symmetric part of `m`, eigenvalues ascending.
pub fn symmetric_eigen(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = RMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values in descending order.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &RMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Orthonormal basis of the right null space, as columns.
pub fn null_space(m: &RMatrix, rel_tol: f64) -> RMatrix {
    let (rows, cols) = m.shape();
    // pad to square so the SVD returns a full set of right vectors
    let padded = if rows < cols {
        let mut p = RMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right vectors");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax || smax == 0.0)
        .collect();
    RMatrix::from_fn(cols, keep.len(), |r, c| vt[(keep[c], r)])
}

/// Sine of the largest principal angle between two column spaces with
/// orthonormal bases. Subspaces of different dimension are at distance one.
pub fn subspace_distance(a: &RMatrix, b: &RMatrix) -> f64 {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.transpose() * b);
    singular_values(&residual).first().copied().unwrap_or(0.0).min(1.0)
}

/// `|det m| / Π_i ‖row_i‖`, which lies in `[0, 1]` by Hadamard's inequality.
pub fn normalized_det(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut log_rows = 0.0;
    for i in 0..n {
        let big = m.row(i).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if big == 0.0 {
            return 0.0;
        }
        let r = big * m.row(i).iter().map(|z| (z / big).norm_sqr()).sum::<f64>().sqrt();
        log_rows += r.ln();
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut log_det = 0.0;
    for i in 0..n {
        let d = u[(i, i)].norm();
        if d == 0.0 {
            return 0.0;
        }
        log_det += d.ln();
    }
    (log_det - log_rows).exp().min(1.0)
}

/// Largest distance after greedily pairing each value of `a` with its nearest
/// unused partner in `b`. Lists of different length are infinitely apart.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Sort by real part, then imaginary part.
pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_eigenvalues_of_fixed_matrix() {
        // frozen from an independent LAPACK run
        let m = CMatrix::from_fn(5, 5, |i, j| {
            Complex64::new((i * 3 + j * 7 % 5) as f64, if i == j { -1.0 } else { 0.3 })
        });
        let got = eigenvalues(&m).unwrap();
        let expected = [
            Complex64::new(-1.79245908e+00, -1.23831149),
            Complex64::new(0.0, -1.3),
            Complex64::new(0.0, -1.3),
            Complex64::new(0.0, -1.3),
            Complex64::new(4.17924591e+01, 0.13831149),
        ];
        assert!(match_spectra(&got, &expected) < 1e-6);
    }

    #[test]
    fn rank_and_null_space() {
        let m = RMatrix::from_row_slice(3, 4, &[1.0, 2.0, 3.0, 4.0, 2.0, 4.0, 6.0, 8.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(numerical_rank(&m, 1e-10), 2);
        let k = null_space(&m, 1e-10);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-12);
        assert!(max_abs(&(k.transpose() * &k - RMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn subspace_distance_detects_rotation() {
        let a = RMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let t = 0.3f64;
        let b = RMatrix::from_row_slice(3, 1, &[t.cos(), t.sin(), 0.0]);
        assert!((subspace_distance(&a, &b) - t.sin()).abs() < 1e-14);
        assert!(subspace_distance(&a, &a) < 1e-15);
        let c = RMatrix::identity(3, 2);
        assert_eq!(subspace_distance(&a, &c), 1.0);
    }

    #[test]
    fn normalized_det_bounds() {
        let id = CMatrix::identity(4, 4);
        assert!((normalized_det(&id) - 1.0).abs() < 1e-15);
        let mut s = id.clone();
        s[(3, 3)] = Complex64::new(0.0, 0.0);
        s[(3, 0)] = Complex64::new(1.0, 0.0);
        s[(0, 0)] = Complex64::new(1.0, 0.0);
        // rows 0 and 3 identical
        assert!(normalized_det(&s) < 1e-15);
        let scaled = id * Complex64::new(1e200, 0.0);
        assert!((normalized_det(&scaled) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectra_matching() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)];
        let b = [Complex64::new(2.0, 1.0 + 1e-9), Complex64::new(1.0, 0.0)];
        assert!(match_spectra(&a, &b) < 2e-9);
        assert_eq!(match_spectra(&a, &b[..1]), f64::INFINITY);
    }

    #[test]
    fn symmetric_eigen_ascending() {
        let m = RMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, q) = symmetric_eigen(&m);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        assert!(max_abs(&(&m * &q - &q * diag(&v))) < 1e-14);
    }
}
