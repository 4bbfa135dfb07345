//! Small dense symmetric matrix routines in f64: just enough for the
//! Gaussian Fréchet distance (covariances, matrix square roots via
//! eigendecomposition). Matrices are row-major `Vec<f64>` of dimension
//! `d * d`; feature dimensions at desk scale are tiny, so cyclic Jacobi is
//! plenty.

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as columns
/// of the returned row-major matrix: `a = V diag(lambda) V^T`.
pub(crate) fn sym_eig(a: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), d * d, "matrix must be d x d");
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    if d == 1 {
        return (vec![m[0]], v);
    }

    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = (norm * 1e-14).max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[p * d + q].abs();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq.abs() <= tol / (d * d) as f64 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2 + 1)).
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..d).map(|i| m[i * d + i]).collect();
    (eigenvalues, v)
}

/// Symmetric positive-semidefinite square root via eigendecomposition;
/// negative eigenvalues (floating-point asymmetry) clip to zero.
pub(crate) fn sym_sqrt(a: &[f64], d: usize) -> Vec<f64> {
    let (lambda, v) = sym_eig(a, d);
    let roots: Vec<f64> = lambda.iter().map(|&l| l.max(0.0).sqrt()).collect();
    // V diag(roots) V^T
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut sum = 0.0;
            for (k, &r) in roots.iter().enumerate() {
                sum += v[i * d + k] * r * v[j * d + k];
            }
            out[i * d + j] = sum;
        }
    }
    out
}

pub(crate) fn mat_mul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

/// Mean vector and covariance matrix (1/(n-1) normalization) of a feature
/// set given as rows.
pub(crate) fn mean_and_covariance(features: &[Vec<f64>], d: usize) -> (Vec<f64>, Vec<f64>) {
    let n = features.len();
    let mut mean = vec![0.0; d];
    for row in features {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    for row in features {
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in i..d {
                cov[i * d + j] += di * (row[j] - mean[j]);
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i * d + j] /= denom;
            cov[j * d + i] = cov[i * d + j];
        }
    }
    (mean, cov)
}
