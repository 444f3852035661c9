//! Complex polynomials and simultaneous root finding.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{abs1, cabs, Real, Scalar, C};

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<C<T>>,
}

impl<T: Scalar> Poly<T> {
    /// Drops exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<C<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C::zero());
        }
        Poly { coeffs }
    }

    pub fn constant(c: C<T>) -> Self {
        Poly::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C<T>]) -> Self {
        let mut p = Poly::constant(C::one());
        for r in roots {
            p = p.mul_linear(r);
        }
        p
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &C<T> {
        self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, s: &C<T>) -> C<T> {
        self.coeffs.iter().rev().fold(C::zero(), |acc, c| acc * s.clone() + c.clone())
    }

    /// Multiplies by `(s - r)`.
    pub fn mul_linear(&self, r: &C<T>) -> Self {
        let mut out = vec![C::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = out[k + 1].clone() + c.clone();
            out[k] = out[k].clone() - c.clone() * r.clone();
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = C::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z).clone() + other.coeffs.get(k).unwrap_or(&z).clone())
                .collect(),
        )
    }

    pub fn scale(&self, c: &C<T>) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Poly::constant(C::zero());
        }
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.scale(T::int(k as i64))).collect(),
        )
    }

    /// Coefficients of `p(c + e)` as a polynomial in `e`.
    pub fn taylor_shift(&self, c: &C<T>) -> Vec<C<T>> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let t = a[k + 1].clone() * c.clone();
                a[k] = a[k].clone() + t;
            }
        }
        a
    }

    /// Divides by `(s - r)`, returning quotient and remainder `p(r)`.
    pub fn div_linear(&self, r: &C<T>) -> (Self, C<T>) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Poly::constant(C::zero()), self.coeffs[0].clone());
        }
        let mut q = vec![C::zero(); n - 1];
        let mut acc = C::zero();
        for k in (0..n).rev() {
            acc = acc * r.clone() + self.coeffs[k].clone();
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        (Poly::new(q), acc)
    }

    /// Drops leading coefficients below `tol` times the largest magnitude.
    pub fn trim_relative(&self, tol: &T) -> Self {
        let scale = self.coeffs.iter().map(abs1).fold(T::zero(), |m, v| if v > m { v } else { m });
        let cut = scale * tol.clone();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| abs1(c) <= cut) {
            coeffs.pop();
        }
        Poly::new(coeffs)
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading().clone();
        Poly::new(self.coeffs.iter().map(|c| c.clone() / lead.clone()).collect())
    }

    /// `sum |a_k| |s|^k`, the natural scale of rounding in `eval`.
    pub fn abs_eval(&self, s_abs: &T) -> T
    where
        T: Real,
    {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * s_abs.clone() + cabs(c))
    }
}

/// A root together with the number of computed roots merged into it.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster<T> {
    pub root: C<T>,
    pub multiplicity: usize,
}

/// All roots by Aberth–Ehrlich iteration, each converged to the level where
/// `|p(z)|` is indistinguishable from rounding noise.
pub fn aberth_roots<T: Real>(p: &Poly<T>) -> Result<Vec<C<T>>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::domain("root finding needs degree >= 1"));
    }
    let p = p.monic();
    if n == 1 {
        return Ok(vec![-p.coeffs[0].clone()]);
    }
    let dp = p.derivative();
    let center = -p.coeffs[n - 1].unscale(T::int(n as i64));
    let shifted = p.taylor_shift(&center);
    // Fujiwara-type bound on the shifted roots.
    let mut radius = T::zero();
    for (k, c) in shifted.iter().enumerate().take(n) {
        let m = cabs(c);
        if m.is_zero() {
            continue;
        }
        let r = (m.ln() / T::int((n - k) as i64)).exp();
        if r > radius {
            radius = r;
        }
    }
    if radius.is_zero() {
        return Ok(vec![center; n]);
    }
    radius = radius * T::int(2);
    let two_pi = T::pi() * T::int(2);
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let ang = two_pi.clone() * T::int(k as i64) / T::int(n as i64) + T::val(0.7);
            center.clone() + C::new(ang.cos(), ang.sin()).scale(radius.clone())
        })
        .collect();
    let mut done = vec![false; n];
    let eps = T::epsilon();
    let noise = T::int(4 * n as i64) * eps.clone();
    let max_iter = 500 + 100 * n;
    for _ in 0..max_iter {
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
        for k in 0..n {
            if done[k] {
                continue;
            }
            let pz = p.eval(&z[k]);
            let zabs = cabs(&z[k]);
            if cabs(&pz) <= noise.clone() * p.abs_eval(&zabs) {
                done[k] = true;
                continue;
            }
            let dpz = dp.eval(&z[k]);
            if dpz.is_zero() {
                z[k] = z[k].clone() + C::new(radius.clone() * T::val(1e-3), radius.clone() * T::val(1e-3));
                continue;
            }
            let ratio = pz / dpz;
            let mut sum = C::<T>::zero();
            for j in 0..n {
                if j != k {
                    let d = z[k].clone() - z[j].clone();
                    if !d.is_zero() {
                        sum = sum + C::<T>::one() / d;
                    }
                }
            }
            let denom = C::<T>::one() - ratio.clone() * sum;
            let w = if denom.is_zero() { ratio } else { ratio / denom };
            z[k] = z[k].clone() - w.clone();
            if cabs(&w) <= eps.clone() * cabs(&z[k]) {
                done[k] = true;
            }
        }
    }
    if done.iter().all(|&d| d) {
        Ok(z)
    } else {
        Err(Error::NoConvergence { degree: n, bits: T::bits().unwrap_or(0) })
    }
}

/// Groups roots closer than `tol * max(1, |z|)`; each cluster is replaced by
/// its mean. Output is sorted by real then imaginary part.
pub fn cluster_roots<T: Real>(roots: &[C<T>], tol: &T) -> Vec<RootCluster<T>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = {
                let a = cabs(&roots[i]);
                if a > T::one() {
                    a
                } else {
                    T::one()
                }
            };
            if cabs(&(roots[i].clone() - roots[j].clone())) <= tol.clone() * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut out: Vec<RootCluster<T>> = groups
        .into_iter()
        .map(|(_, members)| {
            let m = members.len();
            let sum = members.iter().fold(C::zero(), |acc, &i| acc + roots[i].clone());
            RootCluster { root: sum.unscale(T::int(m as i64)), multiplicity: m }
        })
        .collect();
    sort_complex_by(&mut out, |c| &c.root);
    out
}

/// Roots with multiplicities; the multiplicities sum to the degree.
pub fn find_roots<T: Real>(p: &Poly<T>, cluster_tol: &T) -> Result<Vec<RootCluster<T>>> {
    let roots = aberth_roots(p)?;
    let mut clusters = cluster_roots(&roots, cluster_tol);
    for c in clusters.iter_mut().filter(|c| c.multiplicity > 1) {
        c.root = polish_multiple(p, &c.root, c.multiplicity, cluster_tol);
    }
    Ok(clusters)
}

/// Newton on `p^(m-1)`, where an `m`-fold root is simple. The step is kept
/// only if it stays inside the cluster radius.
fn polish_multiple<T: Real>(p: &Poly<T>, start: &C<T>, m: usize, cluster_tol: &T) -> C<T> {
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start.clone();
    let eps = T::epsilon();
    for _ in 0..100 {
        let den = dd.eval(&z);
        if den.is_zero() {
            break;
        }
        let step = d.eval(&z) / den;
        z = z - step.clone();
        if cabs(&step) <= eps.clone() * cabs(&z) {
            break;
        }
    }
    let scale = if cabs(start) > T::one() { cabs(start) } else { T::one() };
    if cabs(&(z.clone() - start.clone())) <= cluster_tol.clone() * scale {
        z
    } else {
        start.clone()
    }
}

/// Deterministic order on complex keys: real part, then imaginary part.
pub fn sort_complex_by<T: Scalar, X>(items: &mut [X], key: impl Fn(&X) -> &C<T>) {
    items.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.re
            .partial_cmp(&kb.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ka.im.partial_cmp(&kb.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Largest `|p(root)| / (sum |a_k| |root|^k)` over the given roots.
pub fn relative_residual<T: Real>(p: &Poly<T>, roots: &[C<T>]) -> T {
    roots.iter().fold(T::zero(), |m, r| {
        let scale = p.abs_eval(&cabs(r));
        let v = if scale.is_zero() { T::zero() } else { cabs(&p.eval(r)) / scale };
        if v > m {
            v
        } else {
            m
        }
    })
}

#[allow(dead_code)]
fn is_real_axis<T: Scalar>(z: &C<T>, tol: &T) -> bool {
    z.im.abs() <= *tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mp;

    fn p(coeffs: &[f64]) -> Poly<f64> {
        Poly::new(coeffs.iter().map(|&c| C::from(c)).collect())
    }

    #[test]
    fn simple_and_double_roots() {
        // (s+1)(s+2) = s^2 + 3s + 2
        let r = find_roots(&p(&[2.0, 3.0, 1.0]), &1e-6).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].root - C::from(-2.0)).norm() < 1e-12);
        assert!((r[1].root - C::from(-1.0)).norm() < 1e-12);
        // (s+2)^2
        let r = find_roots(&p(&[4.0, 4.0, 1.0]), &1e-6).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].root - C::from(-2.0)).norm() < 1e-10);
    }

    #[test]
    fn triple_root_at_high_precision() {
        type M = Mp<128>;
        let root = C::new(M::val(-1.5), M::val(0.25));
        let poly = Poly::from_roots(&[root.clone(), root.clone(), root.clone(), C::from(M::val(-3.0))]);
        let r = find_roots(&poly, &crate::Context::<M>::default().root_cluster_tol).unwrap();
        assert_eq!(r.len(), 2);
        let triple = r.iter().find(|c| c.multiplicity == 3).unwrap();
        assert!(cabs(&(triple.root.clone() - root)) < M::val(1e-30));
    }

    #[test]
    fn taylor_shift_and_division() {
        let q = p(&[1.0, -3.0, 0.0, 2.0]);
        let c = C::new(0.5, -0.25);
        let shifted = q.taylor_shift(&c);
        let e = C::new(0.1, 0.2);
        let direct = q.eval(&(c + e));
        let via = Poly::new(shifted).eval(&e);
        assert!((direct - via).norm() < 1e-14);
        let (quot, rem) = q.div_linear(&c);
        assert!((rem - q.eval(&c)).norm() < 1e-14);
        let back = quot.mul_linear(&c).add(&Poly::constant(rem));
        for (a, b) in back.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(aberth_roots(&p(&[3.0])).is_err());
    }
}
