//! Dense eigensolvers used throughout the crate.
//!
//! The real symmetric path is the classic pair of Householder reduction to
//! tridiagonal form followed by the implicit-shift QL iteration, which
//! delivers residuals at the machine-precision level. A cyclic Jacobi
//! iteration handles the small complex Hermitian matrices of the spin-flip
//! construction.

use nalgebra::{Complex, DMatrix, Matrix4};

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a real
/// symmetric matrix.
pub fn symmetric_eigen_dense(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut z = a.clone();
    let (mut d, mut e) = tridiagonalize(&mut z);
    ql_implicit(&mut d, &mut e, &mut z);
    sort_eigen(&mut d, &mut z);
    (d, z)
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix given by its
/// diagonal `d` and subdiagonal `e` (`e[0]` unused), together with the
/// orthogonal eigenvector matrix.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&off[..n - 1]);
    let mut z = DMatrix::identity(n, n);
    ql_implicit(&mut d, &mut e, &mut z);
    sort_eigen(&mut d, &mut z);
    (d, z)
}

fn sort_eigen(d: &mut [f64], z: &mut DMatrix<f64>) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut sorted_z = DMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        sorted_z.set_column(new, &z.column(old));
    }
    d.copy_from_slice(&sorted_d);
    *z = sorted_z;
}

/// Householder reduction of the symmetric matrix in `z` to tridiagonal
/// form; `z` is overwritten with the accumulated orthogonal transform.
/// Returns the diagonal and the subdiagonal (entry 0 unused).
fn tridiagonalize(z: &mut DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = z.nrows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        if l > 1 {
            let mut scale = 0.0;
            for k in 0..l {
                scale += z[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = z[(i, l - 1)];
            } else {
                for k in 0..l {
                    let v = z[(i, k)] / scale;
                    z[(i, k)] = v;
                    h += v * v;
                }
                let f = z[(i, l - 1)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[(i, l - 1)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..l {
                    z[(j, i)] = z[(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[(j, k)] * z[(i, k)];
                    }
                    for k in (j + 1)..l {
                        g += z[(k, j)] * z[(i, k)];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * z[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..l {
                    let f = z[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let t = f * e[k] + g * z[(i, k)];
                        z[(j, k)] -= t;
                    }
                }
            }
        } else {
            e[i] = z[(i, l - 1)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;

    // Accumulate the transforms.
    for i in 0..n {
        let l = i;
        if d[i] != 0.0 {
            for j in 0..l {
                let mut g = 0.0;
                for k in 0..l {
                    g += z[(i, k)] * z[(k, j)];
                }
                for k in 0..l {
                    let t = g * z[(k, i)];
                    z[(k, j)] -= t;
                }
            }
        }
        d[i] = z[(i, i)];
        z[(i, i)] = 1.0;
        for j in 0..l {
            z[(j, i)] = 0.0;
            z[(i, j)] = 0.0;
        }
    }
    (d, e)
}

fn pythag(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// QL iteration with implicit shifts on a tridiagonal matrix, rotating the
/// columns of `z` along. `e[0]` is unused on input.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut DMatrix<f64>) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

type CMatrix4 = Matrix4<Complex<f64>>;

/// Eigenvalues (ascending) and unitary eigenvector columns of a 4x4
/// Hermitian matrix, by cyclic Jacobi rotations.
pub fn hermitian_eigen4(a: &CMatrix4) -> ([f64; 4], CMatrix4) {
    let mut m = *a;
    let mut v = CMatrix4::identity();
    let norm = m.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * norm;

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / Complex::new(mag, 0.0);
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * mag);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary plane rotation J: J_pp = c, J_pq = -s*phase,
                // J_qp = s*conj(phase), J_qq = c; apply m <- J^H m J.
                let jpq = -phase * Complex::new(s, 0.0);
                let jqp = phase.conj() * Complex::new(s, 0.0);
                let cc = Complex::new(c, 0.0);
                for k in 0..4 {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * cc + mkq * jqp;
                    m[(k, q)] = mkp * jpq + mkq * cc;
                }
                for k in 0..4 {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = cc * mpk + jqp.conj() * mqk;
                    m[(q, k)] = jpq.conj() * mpk + cc * mqk;
                }
                for k in 0..4 {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cc + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * cc;
                }
            }
        }
    }

    let mut vals = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re];
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    let sorted = [vals[order[0]], vals[order[1]], vals[order[2]], vals[order[3]]];
    vals = sorted;
    let mut vs = CMatrix4::zeros();
    for (new, &old) in order.iter().enumerate() {
        for r in 0..4 {
            vs[(r, new)] = v[(r, old)];
        }
    }
    (vals, vs)
}

/// Singular values (descending) of a 4x4 complex matrix, by one-sided
/// Jacobi: columns are rotated pairwise until mutually orthogonal, then the
/// singular values are the column norms. Absolute errors stay at the
/// `eps * |G|` level even for singular values near zero, which the crate
/// relies on when spin-flip eigenvalue quadruples contain near-cancelling
/// pairs.
pub fn singular_values4(g: &CMatrix4) -> [f64; 4] {
    let mut m = *g;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let gi = m.column(i);
                let gj = m.column(j);
                let a = gi.norm_squared();
                let b = gj.norm_squared();
                let mut overlap = Complex::new(0.0, 0.0);
                for k in 0..4 {
                    overlap += gi[k].conj() * gj[k];
                }
                let mag = overlap.norm();
                if mag <= 1e-30 + f64::EPSILON * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = overlap / Complex::new(mag, 0.0);
                let tau = (b - a) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cc = Complex::new(c, 0.0);
                let ss = Complex::new(s, 0.0);
                for k in 0..4 {
                    let col_i = m[(k, i)];
                    let col_j = m[(k, j)] * phase.conj();
                    m[(k, i)] = cc * col_i - ss * col_j;
                    m[(k, j)] = ss * col_i + cc * col_j;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = [0.0f64; 4];
    for (k, s) in sigma.iter_mut().enumerate() {
        *s = m.column(k).norm();
    }
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sigma
}
