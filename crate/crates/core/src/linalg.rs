//! Small dense complex linear algebra generic over the scalar backend.
//!
//! Matrices here are at most a few dozen rows, so everything is a plain
//! row-major `Vec`. Factorizations avoid square roots where they can, which
//! keeps the PSD test and the normal-equation solves exact for rationals.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{abs1, cabs, Real, Scalar, C};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMat { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("matrix must be square"));
        }
        Ok(CMat { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<C<T>>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Largest `|re| + |im|` over all entries.
    pub fn max_abs1(&self) -> T {
        self.data.iter().map(abs1).fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn is_hermitian(&self, tol: &T) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|j| abs1(&(self[(i, j)].clone() - self[(j, i)].conj())) <= *tol))
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|i| (0..self.n).fold(C::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| {
            (0..self.n).fold(C::zero(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        })
    }

    /// `self - t * other`.
    pub fn sub_scaled(&self, t: &T, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() - other[(i, j)].scale(t.clone()))
    }

    /// Leading principal or arbitrary index submatrix.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    /// `v^H A v`.
    pub fn quad_form(&self, v: &[C<T>]) -> C<T> {
        let av = self.mul_vec(v);
        v.iter().zip(&av).fold(C::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Hermitian `A = P L D L^H P^T` with diagonal pivoting, stopped once the
/// largest remaining pivot drops to `tol`.
#[derive(Clone, Debug)]
pub struct Ldl<T> {
    perm: Vec<usize>,
    l: CMat<T>,
    d: Vec<T>,
    /// Number of pivots above tolerance.
    pub rank: usize,
    /// Schur complement left after `rank` steps, in pivoted order.
    remainder: CMat<T>,
}

impl<T: Scalar> Ldl<T> {
    pub fn factor(a: &CMat<T>, tol: &T) -> Self {
        let n = a.dim();
        let mut s = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut l = CMat::identity(n);
        let mut d = Vec::with_capacity(n);
        let mut rank = n;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| s[(x, x)].re.partial_cmp(&s[(y, y)].re).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(k);
            if s[(p, p)].re <= *tol {
                rank = k;
                break;
            }
            if p != k {
                perm.swap(k, p);
                for j in 0..n {
                    s.data.swap(k * n + j, p * n + j);
                }
                for i in 0..n {
                    s.data.swap(i * n + k, i * n + p);
                }
                for j in 0..k {
                    l.data.swap(k * n + j, p * n + j);
                }
            }
            let piv = s[(k, k)].re.clone();
            for i in k + 1..n {
                l[(i, k)] = s[(i, k)].unscale(piv.clone());
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let upd = l[(i, k)].clone() * s[(k, j)].clone();
                    s[(i, j)] = s[(i, j)].clone() - upd;
                }
            }
            d.push(piv);
        }
        Ldl { perm, l, d, rank, remainder: s }
    }

    pub fn pivots(&self) -> &[T] {
        &self.d
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.perm.len()
    }

    /// Solves `A x = b`; needs full rank.
    pub fn solve(&self, b: &[C<T>]) -> Option<Vec<C<T>>> {
        if !self.is_full_rank() {
            return None;
        }
        let n = self.perm.len();
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for i in 0..n {
            y[i] = y[i].unscale(self.d[i].clone());
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.l[(k, i)].conj() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
        }
        let mut x = vec![C::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i].clone();
        }
        Some(x)
    }

    /// Product of the pivots, i.e. `det A` when full rank.
    pub fn det(&self) -> T {
        if !self.is_full_rank() {
            return T::zero();
        }
        self.d.iter().fold(T::one(), |acc, v| acc * v.clone())
    }
}

/// Verdict of a positive-semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdTest<T> {
    pub psd: bool,
    pub rank: usize,
    /// Smallest accepted pivot, or the largest rejected diagonal when the
    /// factorization stopped early.
    pub min_pivot: T,
}

/// Pivoted-LDL PSD test: the matrix is accepted when every pivot is above
/// `tol` or the untouched Schur complement is within `tol` of zero.
pub fn ldl_psd<T: Scalar>(a: &CMat<T>, tol: &T) -> PsdTest<T> {
    let n = a.dim();
    let f = Ldl::factor(a, tol);
    let mut min_pivot = f.d.iter().cloned().fold(None, |m: Option<T>, v| match m {
        Some(m) if m <= v => Some(m),
        _ => Some(v),
    });
    let mut psd = true;
    if f.rank < n {
        let s = &f.remainder;
        let two_tol = tol.clone() + tol.clone();
        let mut worst_diag: Option<T> = None;
        for i in f.rank..n {
            let di = s[(i, i)].re.clone();
            if di < -tol.clone() {
                psd = false;
            }
            for j in f.rank..n {
                if i != j && abs1(&s[(i, j)]) > two_tol {
                    psd = false;
                }
            }
            worst_diag = match worst_diag {
                Some(w) if w >= di => Some(w),
                _ => Some(di),
            };
        }
        if let Some(w) = worst_diag {
            min_pivot = Some(match min_pivot {
                Some(m) if m <= w => m,
                _ => w,
            });
        }
    }
    PsdTest { psd, rank: f.rank, min_pivot: min_pivot.unwrap_or_else(T::zero) }
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky<T: Real>(a: &CMat<T>) -> Option<CMat<T>> {
    let n = a.dim();
    let mut l = CMat::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)].re.clone();
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if d <= T::zero() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = C::from(d.clone());
        for i in j + 1..n {
            let mut v = a[(i, j)].clone();
            for k in 0..j {
                v = v - l[(i, k)].clone() * l[(j, k)].conj();
            }
            l[(i, j)] = v.unscale(d.clone());
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_subst<T: Scalar>(l: &CMat<T>, b: &[C<T>]) -> Vec<C<T>> {
    let n = l.dim();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let t = l[(i, k)].clone() * x[k].clone();
            x[i] = x[i].clone() - t;
        }
        x[i] = x[i].clone() / l[(i, i)].clone();
    }
    x
}

/// LU with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
    sign_odd: bool,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &CMat<T>) -> Self {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_odd = false;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| {
                    abs1(&lu[(x, k)]).partial_cmp(&abs1(&lu[(y, k)])).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            if lu[(p, k)].is_zero() {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(k, p);
                sign_odd = !sign_odd;
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
            }
            let piv = lu[(k, k)].clone();
            for i in k + 1..n {
                let f = lu[(i, k)].clone() / piv.clone();
                for j in k + 1..n {
                    let t = f.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = lu[(i, j)].clone() - t;
                }
                lu[(i, k)] = f;
            }
        }
        Lu { lu, perm, sign_odd, singular }
    }

    pub fn det(&self) -> C<T> {
        if self.singular {
            return C::zero();
        }
        let d = (0..self.lu.dim()).fold(C::one(), |acc, i| acc * self.lu[(i, i)].clone());
        if self.sign_odd {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[C<T>]) -> Option<Vec<C<T>>> {
        if self.singular {
            return None;
        }
        let n = self.lu.dim();
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        Some(y)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues ascend; eigenvectors are the matching columns.
pub fn hermitian_eigen<T: Real>(a: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = CMat::identity(n);
    let frob = |m: &CMat<T>, off_only: bool| {
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                if !off_only || i != j {
                    acc = acc + m[(i, j)].norm_sqr();
                }
            }
        }
        acc
    };
    let total = frob(&m, false);
    let eps = T::epsilon();
    let target = total * eps.clone() * eps;
    for _sweep in 0..100 {
        if frob(&m, true) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)].clone();
                let r = cabs(&apq);
                if r.is_zero() {
                    continue;
                }
                let e = apq.unscale(r.clone());
                let tau = (m[(q, q)].re.clone() - m[(p, p)].re.clone()) / (r.clone() + r);
                let t = {
                    let root = (T::one() + tau.clone() * tau.clone()).sqrt();
                    let mag = T::one() / (tau.abs() + root);
                    if tau.is_negative() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (T::one() + t.clone() * t.clone()).sqrt();
                let s = t * c.clone();
                // J = diag(1, conj(e)) * [[c, s], [-s, c]] on the (p, q) plane.
                let jpp = C::from(c.clone());
                let jpq = C::from(s.clone());
                let jqp = e.conj().scale(-s);
                let jqq = e.conj().scale(c);
                for k in 0..n {
                    let (xp, xq) = (m[(k, p)].clone(), m[(k, q)].clone());
                    m[(k, p)] = xp.clone() * jpp.clone() + xq.clone() * jqp.clone();
                    m[(k, q)] = xp * jpq.clone() + xq * jqq.clone();
                    let (vp, vq) = (v[(k, p)].clone(), v[(k, q)].clone());
                    v[(k, p)] = vp.clone() * jpp.clone() + vq.clone() * jqp.clone();
                    v[(k, q)] = vp * jpq.clone() + vq * jqq.clone();
                }
                for k in 0..n {
                    let (xp, xq) = (m[(p, k)].clone(), m[(q, k)].clone());
                    m[(p, k)] = jpp.conj() * xp.clone() + jqp.conj() * xq.clone();
                    m[(q, k)] = jpq.conj() * xp + jqq.conj() * xq;
                }
                m[(p, q)] = C::zero();
                m[(q, p)] = C::zero();
                m[(p, p)] = C::from(m[(p, p)].re.clone());
                m[(q, q)] = C::from(m[(q, q)].re.clone());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.partial_cmp(&m[(y, y)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re.clone()).collect();
    let vectors = CMat::from_fn(n, |i, j| v[(i, order[j])].clone());
    (values, vectors)
}

/// Column `j` of a matrix.
pub fn column<T: Scalar>(m: &CMat<T>, j: usize) -> Vec<C<T>> {
    (0..m.dim()).map(|i| m[(i, j)].clone()).collect()
}

pub fn vec_norm_sqr<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// `<x, y> = sum x_i conj(y_i)`.
pub fn vec_dot<T: Scalar>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    x.iter().zip(y).fold(C::zero(), |acc, (a, b)| acc + a.clone() * b.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn real(rows: &[&[f64]]) -> CMat<f64> {
        CMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| C::from(x)).collect()).collect()).unwrap()
    }

    fn hilbert<T: Scalar>(n: usize) -> CMat<T> {
        CMat::from_fn(n, |i, j| C::from(T::one() / T::int((1 + i + j) as i64)))
    }

    #[test]
    fn psd_verdicts() {
        assert!(ldl_psd(&CMat::<f64>::identity(3), &0.0).psd);
        let t = ldl_psd(&real(&[&[1.0, 2.0], &[2.0, 1.0]]), &1e-14);
        assert!(!t.psd);
        let t = ldl_psd(&real(&[&[0.0, 1.0], &[1.0, 0.0]]), &1e-14);
        assert!(!t.psd);
        let t = ldl_psd(&real(&[&[1.0, 1.0], &[1.0, 1.0]]), &1e-14);
        assert!(t.psd);
        assert_eq!(t.rank, 1);
    }

    #[test]
    fn exact_rank_deficient_pick_matrix() {
        // [[3/4, 1/2], [1/2, 1/3]] has determinant exactly zero.
        let q = |p: i64, r: i64| C::from(BigRational::new(p.into(), r.into()));
        let a = CMat::from_rows(vec![vec![q(3, 4), q(1, 2)], vec![q(1, 2), q(1, 3)]]).unwrap();
        let t = ldl_psd(&a, &BigRational::zero());
        assert!(t.psd);
        assert_eq!(t.rank, 1);
    }

    #[test]
    fn ldl_solve_matches_lu() {
        let h = hilbert::<f64>(4);
        let b: Vec<C<f64>> = (0..4).map(|i| C::new(i as f64, 1.0)).collect();
        let x1 = Ldl::factor(&h, &0.0).solve(&b).unwrap();
        let x2 = Lu::factor(&h).solve(&b).unwrap();
        for (a, b) in x1.iter().zip(&x2) {
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
        }
    }

    #[test]
    fn hilbert_determinant_exact() {
        let h = hilbert::<BigRational>(3);
        let det = Ldl::factor(&h, &BigRational::zero()).det();
        assert_eq!(det, BigRational::new(1.into(), 2160.into()));
        assert_eq!(Lu::factor(&h).det().re, det);
    }

    #[test]
    fn jacobi_diagonalizes_complex_hermitian() {
        let a = CMat::from_rows(vec![
            vec![C::new(2.0, 0.0), C::new(1.0, 1.0), C::new(0.0, -0.5)],
            vec![C::new(1.0, -1.0), C::new(3.0, 0.0), C::new(0.25, 0.0)],
            vec![C::new(0.0, 0.5), C::new(0.25, 0.0), C::new(-1.0, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = hermitian_eigen(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (j, lam) in vals.iter().enumerate() {
            let x = column(&vecs, j);
            let ax = a.mul_vec(&x);
            for (u, w) in ax.iter().zip(&x) {
                assert!((u - w * lam).norm() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 4.0).abs() < 1e-12);
    }
}
