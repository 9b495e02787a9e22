//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Sweeps rotate away every off-diagonal pair in turn until the off-diagonal
//! Frobenius norm drops below `1e-12 * (1 + ||M||_F)`, with a hard cap of 100
//! sweeps. Intended for dimensions up to 16.

const SWEEP_CAP: usize = 100;
const CONV_REL: f64 = 1e-12;

/// Eigenvalues of a symmetric matrix given as a row-major `dim * dim` slice,
/// returned in ascending order.
pub fn symmetric_eigenvalues(data: &[f64], dim: usize) -> Vec<f64> {
    assert_eq!(data.len(), dim * dim);
    if dim == 0 {
        return Vec::new();
    }
    if dim == 1 {
        return vec![data[0]];
    }
    let mut a = data.to_vec();
    let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = CONV_REL * (1.0 + norm);

    for _ in 0..SWEEP_CAP {
        if off_diagonal_norm(&a, dim) <= threshold {
            break;
        }
        for p in 0..dim - 1 {
            for q in p + 1..dim {
                rotate(&mut a, dim, p, q);
            }
        }
    }

    let mut evs: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    evs
}

/// Smallest eigenvalue; `f64::INFINITY` for the 0-dimensional matrix.
pub fn min_eigenvalue(data: &[f64], dim: usize) -> f64 {
    symmetric_eigenvalues(data, dim)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

fn off_diagonal_norm(a: &[f64], dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                s += a[i * dim + j] * a[i * dim + j];
            }
        }
    }
    s.sqrt()
}

/// One Givens rotation zeroing the (p, q) entry.
fn rotate(a: &mut [f64], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * dim + p];
    let aqq = a[q * dim + q];
    let theta = (aqq - app) / (2.0 * apq);
    // Stable choice of tan(phi): the smaller root of t^2 + 2*theta*t - 1 = 0.
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        1.0 / (theta - (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = c * akp - s * akq;
        a[k * dim + q] = s * akp + c * akq;
    }
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = c * apk - s * aqk;
        a[q * dim + k] = s * apk + c * aqk;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(symmetric_eigenvalues(&m, 3), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn known_2x2() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = [2.0, 1.0, 1.0, 2.0];
        let evs = symmetric_eigenvalues(&m, 2);
        assert!((evs[0] - 1.0).abs() < 1e-12);
        assert!((evs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        // Fixed 4x4 symmetric matrix; eigenvalues must reproduce both the
        // trace and the Frobenius norm.
        let dim = 4;
        let mut m = vec![0.0; 16];
        let vals = [
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 3.0, 0.0, -1.0],
            [-2.0, 0.0, 1.0, 0.25],
            [0.5, -1.0, 0.25, -2.0],
        ];
        for i in 0..dim {
            for j in 0..dim {
                m[i * dim + j] = vals[i][j];
            }
        }
        let evs = symmetric_eigenvalues(&m, dim);
        let trace: f64 = (0..dim).map(|i| m[i * dim + i]).sum();
        let frob2: f64 = m.iter().map(|v| v * v).sum();
        let ev_sum: f64 = evs.iter().sum();
        let ev_sq: f64 = evs.iter().map(|v| v * v).sum();
        assert!((trace - ev_sum).abs() < 1e-10);
        assert!((frob2 - ev_sq).abs() < 1e-9);
    }

    #[test]
    fn min_eigenvalue_indefinite() {
        let m = [1.0, 0.0, 0.0, -1.0];
        assert!((min_eigenvalue(&m, 2) + 1.0).abs() < 1e-12);
    }
}
