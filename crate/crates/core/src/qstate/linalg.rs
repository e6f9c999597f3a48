//! Dense complex linear algebra helpers.

use ndarray::Array2;
use num_traits::Zero;

use crate::scalar::{Real, C};

pub type CMatrix<T> = Array2<C<T>>;

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim {
        m[(i, i)] = C::new(T::one(), T::zero());
    }
    m
}

pub fn adjoint<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.t().mapv(|x| x.conj())
}

pub fn matmul<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (n, k) = a.dim();
    let (k2, p) = b.dim();
    assert_eq!(k, k2, "matmul dimension mismatch");
    let mut out = Array2::zeros((n, p));
    for i in 0..n {
        for l in 0..k {
            let x = a[(i, l)];
            if x.is_zero() {
                continue;
            }
            for j in 0..p {
                out[(i, j)] = out[(i, j)] + x * b[(l, j)];
            }
        }
    }
    out
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    m.diag().iter().fold(C::zero(), |acc, &x| acc + x)
}

pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).norm()))
}

pub fn hermiticity_error<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut err = T::zero();
    for i in 0..n {
        for j in i..n {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Cyclic complex Jacobi: every pivot is first rotated to a real entry by a
/// diagonal phase, then annihilated by a real Givens rotation. Only the
/// Hermitian part of the input is used.
///
/// Indices coupled by nonzero entries are grouped first, so block-diagonal
/// and diagonal inputs only pay for their largest block.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    let herm = |i: usize, j: usize| (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5);

    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !m[(i, j)].is_zero() || !m[(j, i)].is_zero() {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks[r].push(i);
    }

    let mut ev = Vec::with_capacity(n);
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        if block.len() == 1 {
            ev.push(m[(block[0], block[0])].re);
            continue;
        }
        let a: Vec<C<T>> = block
            .iter()
            .flat_map(|&i| block.iter().map(move |&j| (i, j)))
            .map(|(i, j)| herm(i, j))
            .collect();
        ev.extend(jacobi(a, block.len()));
    }
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Cyclic Jacobi on a dense row-major Hermitian matrix.
fn jacobi<T: Real>(mut a: Vec<C<T>>, n: usize) -> Vec<T> {
    let idx = |i: usize, j: usize| i * n + j;

    let total: T = a.iter().map(|x| x.norm_sqr()).sum();
    let thresh = total * T::epsilon() * T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a[idx(i, j)].norm_sqr();
            }
        }
        if off <= thresh || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[idx(p, q)];
                let mag = b.norm();
                if mag == T::zero() || mag * mag <= thresh / T::lit((n * n) as f64) {
                    continue;
                }
                let phase = b / mag; // e^{iφ}
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cos = T::one() / (t * t + T::one()).sqrt();
                let sin = t * cos;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)] * phase.conj();
                    let new_kp = akp * cos - akq * sin;
                    let new_kq = akp * sin + akq * cos;
                    a[idx(k, p)] = new_kp;
                    a[idx(p, k)] = new_kp.conj();
                    a[idx(k, q)] = new_kq;
                    a[idx(q, k)] = new_kq.conj();
                }
                a[idx(p, p)] = C::new(app - t * mag, T::zero());
                a[idx(q, q)] = C::new(aqq + t * mag, T::zero());
                a[idx(p, q)] = C::zero();
                a[idx(q, p)] = C::zero();
            }
        }
    }
    (0..n).map(|i| a[idx(i, i)].re).collect()
}
