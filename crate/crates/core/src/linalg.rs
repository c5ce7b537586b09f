//! Small dense eigen-solvers and a Lanczos iteration for the top of a
//! Hermitian spectrum. Matrices are row-major `Vec<f64>` / `Vec<Complex64>`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigenvalues of a real symmetric matrix, ascending. Householder
/// reduction to tridiagonal form followed by implicit QL.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i * n + i];
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|x, y| x.total_cmp(y));
    d
}

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e[0..n-1]`. Eigenvalues are left in `d`, unsorted.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
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
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix.
/// Returns ascending eigenvalues and the matching eigenvectors as columns
/// of a row-major `n x n` matrix.
pub fn jacobi_eigh(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let vals = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new] = v[k * n + old];
        }
    }
    (vals, vecs)
}

fn realify(h: &[Complex64], m: usize) -> Vec<f64> {
    let n = 2 * m;
    let mut a = vec![0.0; n * n];
    for i in 0..m {
        for j in 0..m {
            let z = h[i * m + j];
            a[i * n + j] = z.re;
            a[(i + m) * n + (j + m)] = z.re;
            a[i * n + (j + m)] = -z.im;
            a[(i + m) * n + j] = z.im;
        }
    }
    a
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &[Complex64], m: usize) -> Vec<f64> {
    if h.iter().all(|z| z.im == 0.0) {
        return symmetric_eigenvalues(h.iter().map(|z| z.re).collect(), m);
    }
    // The real embedding doubles every eigenvalue.
    let all = symmetric_eigenvalues(realify(h, m), 2 * m);
    all.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// Largest eigenvalue of a small Hermitian matrix with a unit eigenvector.
pub fn hermitian_top(h: &[Complex64], m: usize) -> (f64, Vec<Complex64>) {
    if m == 0 {
        return (0.0, Vec::new());
    }
    if h.iter().all(|z| z.im == 0.0) {
        let (vals, vecs) = jacobi_eigh(h.iter().map(|z| z.re).collect(), m);
        let top = m - 1;
        let v = (0..m)
            .map(|k| Complex64::new(vecs[k * m + top], 0.0))
            .collect();
        return (vals[top], v);
    }
    let n = 2 * m;
    let (vals, vecs) = jacobi_eigh(realify(h, m), n);
    let top = n - 1;
    let mut v: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(vecs[k * n + top], vecs[(k + m) * n + top]))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    (vals[top], v)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic start vector: all ones with a fixed hashed perturbation,
/// so it is not orthogonal to symmetric or antisymmetric eigenvectors.
pub fn seed_vector(n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let u = (splitmix(i as u64) >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::new(1.0 + (u - 0.5), 0.0)
        })
        .collect();
    normalize(&mut v);
    v
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalize(a: &mut [Complex64]) -> f64 {
    let n = norm2(a);
    if n > 0.0 {
        a.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Largest eigenvalue and Ritz vector of a symmetric tridiagonal matrix,
/// via Sturm bisection and inverse iteration.
fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], vec![1.0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 }
            + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: f64| -> usize {
        let mut cnt = 0;
        let mut q = alpha[0] - x;
        if q < 0.0 {
            cnt += 1;
        }
        for i in 1..k {
            let denom = if q == 0.0 { 1e-300 } else { q };
            q = alpha[i] - x - beta[i - 1] * beta[i - 1] / denom;
            if q < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    // inverse iteration with a tiny shift above theta
    let shift = theta + (hi - lo).max(theta.abs() * 1e-14).max(1e-300);
    let mut x = vec![1.0; k];
    for _ in 0..4 {
        // Thomas algorithm on (T - shift I) y = x
        let mut c = vec![0.0; k];
        let mut dvec = vec![0.0; k];
        let mut diag = alpha[0] - shift;
        if diag == 0.0 {
            diag = 1e-300;
        }
        c[0] = if k > 1 { beta[0] / diag } else { 0.0 };
        dvec[0] = x[0] / diag;
        for i in 1..k {
            let mut m = alpha[i] - shift - beta[i - 1] * c[i - 1];
            if m == 0.0 {
                m = 1e-300;
            }
            if i + 1 < k {
                c[i] = beta[i] / m;
            }
            dvec[i] = (x[i] - beta[i - 1] * dvec[i - 1]) / m;
        }
        let mut y = vec![0.0; k];
        y[k - 1] = dvec[k - 1];
        for i in (0..k - 1).rev() {
            y[i] = dvec[i] - c[i] * y[i + 1];
        }
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            break;
        }
        x = y.into_iter().map(|v| v / nrm).collect();
    }
    // Rayleigh quotient is more accurate than the bisection midpoint.
    let mut rq = 0.0;
    for i in 0..k {
        let mut tx = alpha[i] * x[i];
        if i > 0 {
            tx += beta[i - 1] * x[i - 1];
        }
        if i + 1 < k {
            tx += beta[i] * x[i + 1];
        }
        rq += x[i] * tx;
    }
    (rq.max(theta.min(rq + 1e-300)), x)
}

/// Outcome of [`lanczos_top`].
#[derive(Clone, Debug)]
pub struct TopEigen {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Top eigenpair of a Hermitian positive semidefinite operator given by its
/// action. Lanczos with full reorthogonalisation and explicit restarts from
/// the current Ritz vector; converged when the residual is at most
/// `tol * value`.
pub fn lanczos_top<F>(n: usize, mut apply: F, tol: f64, max_matvecs: usize) -> Result<TopEigen>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    if n == 0 {
        return Ok(TopEigen {
            value: 0.0,
            vector: Vec::new(),
            residual: 0.0,
            iterations: 0,
        });
    }
    let max_dim = n.min(400);
    let mut start = seed_vector(n);
    let mut matvecs = 0;
    let mut best = TopEigen {
        value: 0.0,
        vector: start.clone(),
        residual: f64::INFINITY,
        iterations: 0,
    };
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = norm2(&w);
            let dim = alpha.len();
            let check = dim == max_dim
                || b <= 1e-14 * a.abs().max(1e-300)
                || dim.is_multiple_of(5)
                || matvecs >= max_matvecs;
            if check {
                let (theta, s) = tridiagonal_top(&alpha, &beta);
                let residual = b * s[dim - 1].abs();
                let mut y = vec![Complex64::new(0.0, 0.0); n];
                for (coef, q) in s.iter().zip(&basis) {
                    for (yi, qi) in y.iter_mut().zip(q) {
                        *yi += *coef * qi;
                    }
                }
                normalize(&mut y);
                let converged = residual <= tol * theta.abs().max(1e-300)
                    || b <= 1e-14 * theta.abs().max(1e-300);
                if converged || theta >= best.value {
                    best = TopEigen {
                        value: theta,
                        vector: y.clone(),
                        residual: if b <= 1e-14 * theta.abs().max(1e-300) {
                            0.0
                        } else {
                            residual
                        },
                        iterations: matvecs,
                    };
                }
                if converged || theta.abs() < 1e-300 && b < 1e-300 {
                    best.residual = best.residual.min(residual);
                    return Ok(best);
                }
                if matvecs >= max_matvecs {
                    return Err(Error::NonConvergence {
                        iterations: matvecs,
                        lower: best.value.max(0.0).sqrt(),
                        upper: (best.value + best.residual).max(0.0).sqrt(),
                    });
                }
                if dim == max_dim {
                    start = y;
                    break;
                }
            }
            beta.push(b);
            let next: Vec<Complex64> = w.iter().map(|z| z / b).collect();
            basis.push(next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path_adjacency(n: usize) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
        a
    }

    #[test]
    fn path_spectrum_closed_form() {
        let n = 40;
        let vals = symmetric_eigenvalues(path_adjacency(n), n);
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (core::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(|a, b| a.total_cmp(b));
        for (v, e) in vals.iter().zip(&expected) {
            assert_relative_eq!(v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_matches_householder() {
        let n = 12;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 7 + j * 3) % 11) as f64 - 5.0;
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let (vals, vecs) = jacobi_eigh(a.clone(), n);
        let ql = symmetric_eigenvalues(a.clone(), n);
        for (x, y) in vals.iter().zip(&ql) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
        for c in 0..n {
            for i in 0..n {
                let av: f64 = (0..n).map(|k| a[i * n + k] * vecs[k * n + c]).sum();
                assert_relative_eq!(av, vals[c] * vecs[i * n + c], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn hermitian_top_of_rotation_generator() {
        // [[0, -i], [i, 0]] has eigenvalues -1 and 1.
        let h = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ];
        let (top, v) = hermitian_top(&h, 2);
        assert_relative_eq!(top, 1.0, epsilon = 1e-12);
        let hv0 = h[0] * v[0] + h[1] * v[1];
        let hv1 = h[2] * v[0] + h[3] * v[1];
        assert!((hv0 - v[0]).norm() < 1e-10 && (hv1 - v[1]).norm() < 1e-10);
        let vals = hermitian_eigenvalues(&h, 2);
        assert_relative_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lanczos_on_squared_path() {
        let n = 200;
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            // y = A^2 x
            let mut t = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                if i > 0 {
                    t[i] += x[i - 1];
                }
                if i + 1 < n {
                    t[i] += x[i + 1];
                }
            }
            for i in 0..n {
                y[i] = Complex64::new(0.0, 0.0);
                if i > 0 {
                    y[i] += t[i - 1];
                }
                if i + 1 < n {
                    y[i] += t[i + 1];
                }
            }
        };
        let top = lanczos_top(n, apply, 1e-13, 10 * n).unwrap();
        let exact = 2.0 * (core::f64::consts::PI / 201.0).cos();
        assert_relative_eq!(top.value.sqrt(), exact, epsilon = 1e-10);
    }
}
