//! Generalized finite monomial spaces: Gram matrices, projections,
//! distances, Cauchy determinants and the Müntz–Szász partial sums.

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::functions::{
    inner_product, norm_sqr, term_inner, truncated_inner_product, Exponent, LogMonomialSum, LogMonomialTerm,
};
use crate::linalg::{cholesky, forward_subst, hermitian_eigen, CMat, Ldl, Lu};
use crate::scalar::{Real, Scalar, C};

/// Exponents with multiplicities. Entry `(s, m)` contributes the basis
/// functions `(log x)^r x^s` for `r = 0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentMultiset<T> {
    entries: Vec<(Exponent<T>, usize)>,
}

impl<T: Scalar> ExponentMultiset<T> {
    /// Merges exponents within `merge_tol`, drops zero multiplicities and
    /// sorts by `(Re s, Im s)`.
    pub fn new(entries: Vec<(Exponent<T>, usize)>, ctx: &Context<T>) -> Self {
        let mut sorted: Vec<_> = entries.into_iter().filter(|(_, m)| *m > 0).collect();
        sorted.sort_by(|a, b| a.0.cmp_key(&b.0));
        let mut out: Vec<(Exponent<T>, usize)> = Vec::new();
        for (s, m) in sorted {
            match out.iter_mut().find(|(e, _)| e.close_to(&s, &ctx.merge_tol)) {
                Some((_, k)) => *k += m,
                None => out.push((s, m)),
            }
        }
        out.sort_by(|a, b| a.0.cmp_key(&b.0));
        ExponentMultiset { entries: out }
    }

    pub fn empty() -> Self {
        ExponentMultiset { entries: Vec::new() }
    }

    /// Simple real exponents.
    pub fn from_reals(values: &[T], ctx: &Context<T>) -> Result<Self> {
        let entries = values
            .iter()
            .map(|v| Exponent::real(v.clone(), ctx).map(|e| (e, 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(entries, ctx))
    }

    pub fn entries(&self) -> &[(Exponent<T>, usize)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total dimension `sum m_j`.
    pub fn dim(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Basis labels `(s, r)` in order.
    pub fn basis(&self) -> Vec<(C<T>, u32)> {
        self.entries
            .iter()
            .flat_map(|(s, m)| (0..*m as u32).map(move |r| (s.value().clone(), r)))
            .collect()
    }

    pub fn basis_functions(&self) -> Vec<LogMonomialSum<T>> {
        self.entries
            .iter()
            .flat_map(|(s, m)| (0..*m as u32).map(move |r| LogMonomialSum::term(C::one(), s.clone(), r)))
            .collect()
    }

    /// Union as multisets.
    pub fn union(&self, other: &Self, ctx: &Context<T>) -> Self {
        let mut all = self.entries.clone();
        all.extend(other.entries.iter().cloned());
        Self::new(all, ctx)
    }

    /// Removes `count` copies of the exponent 0, if present.
    pub fn remove_zero(&self, count: usize) -> Self {
        let mut entries = self.entries.clone();
        if let Some(pos) = entries.iter().position(|(s, _)| s.is_zero()) {
            let m = entries[pos].1.saturating_sub(count);
            if m == 0 {
                entries.remove(pos);
            } else {
                entries[pos].1 = m;
            }
        }
        ExponentMultiset { entries }
    }

    pub fn multiplicity_of_zero(&self) -> usize {
        self.entries.iter().find(|(s, _)| s.is_zero()).map_or(0, |(_, m)| *m)
    }
}

/// `G[i][j] = <b_j, b_i>`.
pub fn gram<T: Scalar>(space: &ExponentMultiset<T>) -> CMat<T> {
    let basis = space.basis();
    CMat::from_fn(basis.len(), |i, j| term_inner(&basis[j].0, basis[j].1, &basis[i].0, basis[i].1))
}

/// Function whose distance to a monomial space can be computed in closed form.
#[derive(Clone, Debug)]
pub enum Target<T> {
    Sum(LogMonomialSum<T>),
    /// `f` times the indicator of `[a, 1]`.
    Truncated { a: T, f: LogMonomialSum<T> },
}

impl<T: Real> Target<T> {
    /// The indicator of `[a, 1]`.
    pub fn indicator(a: T) -> Self {
        Target::Truncated { a, f: LogMonomialSum::one() }
    }

    pub fn inner_with(&self, g: &LogMonomialSum<T>) -> Result<C<T>> {
        match self {
            Target::Sum(f) => Ok(inner_product(f, g)),
            Target::Truncated { a, f } => truncated_inner_product(f, g, a),
        }
    }

    pub fn norm_sqr(&self) -> Result<T> {
        match self {
            Target::Sum(f) => Ok(norm_sqr(f)),
            Target::Truncated { a, f } => Ok(truncated_inner_product(f, f, a)?.re),
        }
    }
}

/// Bits needed to resolve a matrix whose pivots span `norm / min_pivot`.
pub fn bits_for_condition<T: Scalar>(norm: &T, min_pivot: &T) -> u32 {
    let current = T::bits().unwrap_or(0);
    if *min_pivot <= T::zero() {
        return (current * 2).max(128);
    }
    let ratio = (norm.clone() / min_pivot.clone()).as_f64();
    let need = if ratio.is_finite() { ratio.log2().ceil() as u32 + 32 } else { current * 2 };
    need.max(current + 1)
}

fn factor_gram<T: Scalar>(g: &CMat<T>, ctx: &Context<T>, what: &str) -> Result<Ldl<T>> {
    let norm = g.max_abs1();
    let tol = ctx.psd_tol(g.dim(), &norm);
    let f = Ldl::factor(g, &tol);
    if f.is_full_rank() {
        return Ok(f);
    }
    let min = f.pivots().iter().cloned().fold(None, |m: Option<T>, v| match m {
        Some(m) if m <= v => Some(m),
        _ => Some(v),
    });
    Err(Error::IllConditioned {
        what: what.to_string(),
        bits: ctx.bits(),
        needed_bits: bits_for_condition(&norm, &min.map(|m| m * T::epsilon()).unwrap_or_else(T::zero)),
    })
}

/// Coefficients of the orthogonal projection in the basis of `space`.
pub fn projection_coeffs<T: Scalar>(
    rhs: &[C<T>],
    space: &ExponentMultiset<T>,
    ctx: &Context<T>,
) -> Result<Vec<C<T>>> {
    let f = factor_gram(&gram(space), ctx, "Gram matrix")?;
    Ok(f.solve(rhs).expect("full rank"))
}

fn assemble<T: Scalar>(coeffs: &[C<T>], space: &ExponentMultiset<T>, ctx: &Context<T>) -> LogMonomialSum<T> {
    let terms = space
        .basis()
        .into_iter()
        .zip(coeffs)
        .map(|((s, r), c)| LogMonomialTerm::new(c.clone(), Exponent::new(s, ctx).expect("validated"), r))
        .collect();
    LogMonomialSum::new(terms, ctx)
}

/// Orthogonal projection onto `Mult(space)`.
pub fn project<T: Scalar>(
    f: &LogMonomialSum<T>,
    space: &ExponentMultiset<T>,
    ctx: &Context<T>,
) -> Result<LogMonomialSum<T>> {
    if space.is_empty() {
        return Ok(LogMonomialSum::zero());
    }
    let rhs: Vec<_> = space.basis_functions().iter().map(|b| inner_product(f, b)).collect();
    let c = projection_coeffs(&rhs, space, ctx)?;
    Ok(assemble(&c, space, ctx))
}

/// `dist(f, Mult(space))` as the norm of the projection residual.
pub fn dist_to_space<T: Real>(f: &LogMonomialSum<T>, space: &ExponentMultiset<T>, ctx: &Context<T>) -> Result<T> {
    let p = project(f, space, ctx)?;
    let r = norm_sqr(&f.sub(&p, ctx));
    Ok(if r > T::zero() { r.sqrt() } else { T::zero() })
}

/// `dist(target, Mult(space))` as `sqrt(|g|^2 - b^H G^-1 b)`; works for
/// truncated targets that are not log-monomial sums.
pub fn dist_to_target<T: Real>(target: &Target<T>, space: &ExponentMultiset<T>, ctx: &Context<T>) -> Result<T> {
    let total = target.norm_sqr()?;
    if space.is_empty() {
        return Ok(total.sqrt());
    }
    let rhs = space.basis_functions().iter().map(|b| target.inner_with(b)).collect::<Result<Vec<_>>>()?;
    let c = projection_coeffs(&rhs, space, ctx)?;
    let captured = c.iter().zip(&rhs).fold(T::zero(), |acc, (ci, bi)| acc + (bi.conj() * ci.clone()).re);
    let r = total - captured;
    Ok(if r > T::zero() { r.sqrt() } else { T::zero() })
}

/// `dist(f, Mult(space))^2 = det Gram(space + f) / det Gram(space)`, with
/// both determinants by LU.
pub fn dist_sqr_det_ratio<T: Scalar>(f: &LogMonomialSum<T>, space: &ExponentMultiset<T>) -> Result<T> {
    let basis = space.basis_functions();
    let g = gram(space);
    let d = g.dim();
    let aug = CMat::from_fn(d + 1, |i, j| match (i < d, j < d) {
        (true, true) => g[(i, j)].clone(),
        (true, false) => inner_product(f, &basis[i]),
        (false, true) => inner_product(&basis[j], f),
        (false, false) => inner_product(f, f),
    });
    let den = Lu::factor(&g).det();
    if den.is_zero() {
        return Err(Error::IllConditioned { what: "Gram determinant".into(), bits: T::bits().unwrap_or(0), needed_bits: 0 });
    }
    Ok((Lu::factor(&aug).det() / den).re)
}

/// `det(1/(1 + s_j + conj s_i))` by the Cauchy product formula.
pub fn cauchy_det<T: Scalar>(space: &ExponentMultiset<T>) -> Result<T> {
    if space.entries.iter().any(|(_, m)| *m != 1) {
        return Err(Error::domain("Cauchy determinant needs simple exponents; use the Gram LU determinant"));
    }
    let s: Vec<C<T>> = space.entries.iter().map(|(e, _)| e.value().clone()).collect();
    let mut num = T::one();
    let mut den = T::one();
    for i in 0..s.len() {
        den = den * (T::one() + s[i].re.clone() + s[i].re.clone());
        for j in i + 1..s.len() {
            let diff = (s[i].clone() - s[j].clone()).norm_sqr();
            if diff.is_zero() {
                return Err(Error::domain("Cauchy determinant needs distinct exponents"));
            }
            num = num * diff;
            den = den * (C::<T>::one() + s[i].clone() + s[j].conj()).norm_sqr();
        }
    }
    Ok(num / den)
}

/// Partial sums of `sum_k (2 Re s_k + 1) / |s_k + 1|^2` over the first `k`
/// exponents.
pub fn muntz_partial_sums<T: Scalar>(exponents: &[Exponent<T>], k: usize) -> Vec<T> {
    let mut acc = T::zero();
    exponents
        .iter()
        .take(k)
        .map(|e| {
            let s = e.value();
            let term = (T::one() + s.re.clone() + s.re.clone()) / (C::<T>::one() + s.clone()).norm_sqr();
            acc = acc.clone() + term;
            acc.clone()
        })
        .collect()
}

/// `{s + w^j h : 0 <= j < m}` with `w` a primitive `m`-th root of unity.
pub fn roots_of_unity_space<T: Real>(s: &Exponent<T>, m: usize, h: &T, ctx: &Context<T>) -> Result<ExponentMultiset<T>> {
    if m < 2 {
        return Err(Error::domain("roots-of-unity space needs m >= 2"));
    }
    if *h <= T::zero() {
        return Err(Error::domain("h must be positive"));
    }
    if s.value().re.clone() - h.clone() <= ctx.half_plane_margin.clone() - T::val(0.5) {
        return Err(Error::domain("h too large: need Re(s) - h > -1/2"));
    }
    let entries = (0..m)
        .map(|j| {
            // quarter turns are exact
            let w = match (4 * j) % (4 * m) {
                0 => C::new(T::one(), T::zero()),
                q if q * 2 == 4 * m => C::new(-T::one(), T::zero()),
                q if q * 4 == 4 * m => C::new(T::zero(), T::one()),
                q if q * 4 == 12 * m => C::new(T::zero(), -T::one()),
                _ => {
                    let ang = T::pi() * T::int(2 * j as i64) / T::int(m as i64);
                    C::new(ang.cos(), ang.sin())
                }
            };
            Exponent::new(s.value().clone() + w.scale(h.clone()), ctx).map(|e| (e, 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentMultiset::new(entries, ctx))
}

/// `sup { dist(f, Mult(to)) : f in Mult(from), |f| = 1 }`, the largest
/// principal-angle sine between the two spaces.
pub fn subspace_gap<T: Real>(from: &ExponentMultiset<T>, to: &ExponentMultiset<T>, ctx: &Context<T>) -> Result<T> {
    let fb = from.basis_functions();
    let tb = to.basis_functions();
    let g_from = gram(from);
    let g_to = factor_gram(&gram(to), ctx, "Gram matrix")?;
    let n = fb.len();
    // columns of G_to^-1 X with X[i][j] = <fb_j, tb_i>
    let sol: Vec<Vec<C<T>>> = fb
        .iter()
        .map(|f| g_to.solve(&tb.iter().map(|t| inner_product(f, t)).collect::<Vec<_>>()).expect("full rank"))
        .collect();
    let x: Vec<Vec<C<T>>> = fb.iter().map(|f| tb.iter().map(|t| inner_product(f, t)).collect()).collect();
    let resid = CMat::from_fn(n, |i, j| {
        let captured = x[i].iter().zip(&sol[j]).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b.clone());
        g_from[(i, j)].clone() - captured
    });
    let l = cholesky(&g_from).ok_or_else(|| Error::IllConditioned {
        what: "Gram matrix".into(),
        bits: ctx.bits(),
        needed_bits: bits_for_condition(&g_from.max_abs1(), &T::zero()),
    })?;
    // L^-1 R L^-H
    let cols: Vec<Vec<C<T>>> = (0..n)
        .map(|j| forward_subst(&l, &(0..n).map(|i| resid[(i, j)].clone()).collect::<Vec<_>>()))
        .collect();
    let half = CMat::from_fn(n, |i, j| cols[j][i].clone());
    let rows: Vec<Vec<C<T>>> = (0..n)
        .map(|i| forward_subst(&l, &(0..n).map(|j| half[(i, j)].conj()).collect::<Vec<_>>()))
        .collect();
    let whitened = CMat::from_fn(n, |i, j| rows[j][i].clone());
    let sym = CMat::from_fn(n, |i, j| (whitened[(i, j)].clone() + whitened[(j, i)].conj()).unscale(T::int(2)));
    let (vals, _) = hermitian_eigen(&sym);
    let top = vals.last().cloned().unwrap_or_else(T::zero);
    Ok(if top > T::zero() { top.sqrt() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Exact, Mp256};
    use num_traits::Signed;

    fn ctx() -> Context<f64> {
        Context::default()
    }

    fn space(v: &[f64]) -> ExponentMultiset<f64> {
        ExponentMultiset::from_reals(v, &ctx()).unwrap()
    }

    fn mono(s: f64) -> LogMonomialSum<f64> {
        LogMonomialSum::monomial(Exponent::real(s, &ctx()).unwrap())
    }

    #[test]
    fn gram_examples() {
        let g = gram(&space(&[0.0, 1.0]));
        assert_eq!(g[(0, 1)], C::from(0.5));
        assert!((g[(1, 1)] - C::from(1.0 / 3.0)).norm() < 1e-16);
        let double = ExponentMultiset::new(vec![(Exponent::zero(), 2)], &ctx());
        let g = gram(&double);
        assert_eq!(g.rows(), vec![vec![C::from(1.0), C::from(-1.0)], vec![C::from(-1.0), C::from(2.0)]]);
        let g = gram(&space(&[0.75]));
        assert_eq!(g[(0, 0)], C::from(1.0 / 2.5));
    }

    #[test]
    fn projection_examples() {
        let c = ctx();
        let p = project(&mono(0.0), &space(&[1.0]), &c).unwrap();
        assert!((p.terms()[0].coeff - C::from(1.5)).norm() < 1e-14);
        let p = project(&mono(1.0), &space(&[1.0]), &c).unwrap();
        assert!((p.terms()[0].coeff - C::from(1.0)).norm() < 1e-14);
        let p = project(&mono(2.0), &space(&[0.0, 1.0]), &c).unwrap();
        let want = mono(1.0).sub(&mono(0.0).scale(&C::from(1.0 / 6.0)), &c);
        assert!(norm_sqr(&p.sub(&want, &c)) < 1e-24);
    }

    #[test]
    fn distance_examples() {
        let c = ctx();
        let s = space(&[0.0, 1.0]);
        let want = 1.0 / 180f64.sqrt();
        assert!((dist_to_space(&mono(2.0), &s, &c).unwrap() - want).abs() < 1e-12);
        assert!((dist_sqr_det_ratio(&mono(2.0), &s).unwrap().sqrt() - want).abs() < 1e-10);
        assert!(dist_to_space(&mono(1.0), &space(&[1.0]), &c).unwrap() < 1e-12);
        let t = Target::Sum(mono(2.0));
        assert!((dist_to_target(&t, &s, &c).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn exact_distance() {
        let c = Context::<Exact>::default();
        let s = ExponentMultiset::from_reals(&[Exact::from_integer(0.into()), Exact::from_integer(1.into())], &c).unwrap();
        let f = LogMonomialSum::monomial(Exponent::real(Exact::from_integer(2.into()), &c).unwrap());
        assert_eq!(dist_sqr_det_ratio(&f, &s).unwrap(), Exact::new(1.into(), 180.into()));
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_det(&space(&[0.75])).unwrap(), 1.0 / 2.5);
        assert!((cauchy_det(&space(&[0.0, 1.0])).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        let double = ExponentMultiset::new(vec![(Exponent::zero(), 2)], &ctx());
        assert!(cauchy_det(&double).is_err());
        let c = ctx();
        let cx = ExponentMultiset::new(
            vec![
                (Exponent::new(C::new(0.2, 1.0), &c).unwrap(), 1),
                (Exponent::new(C::new(-0.3, -0.4), &c).unwrap(), 1),
                (Exponent::new(C::new(1.7, 0.1), &c).unwrap(), 1),
            ],
            &c,
        );
        let lu = Lu::factor(&gram(&cx)).det();
        let cd = cauchy_det(&cx).unwrap();
        assert!(((lu.re - cd) / cd).abs() < 1e-12 && lu.im.abs() < 1e-14);
    }

    #[test]
    fn muntz_examples() {
        let c = ctx();
        let ks: Vec<_> = (1..=3).map(|k| Exponent::real(k as f64, &c).unwrap()).collect();
        let sums = muntz_partial_sums(&ks, 3);
        let want = [0.75, 0.75 + 5.0 / 9.0, 0.75 + 5.0 / 9.0 + 7.0 / 16.0];
        for (a, b) in sums.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let zeros = vec![Exponent::<f64>::zero(); 5];
        assert_eq!(muntz_partial_sums(&zeros, 5), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn roots_of_unity_examples() {
        let c = ctx();
        let r = roots_of_unity_space(&Exponent::zero(), 2, &0.1, &c).unwrap();
        let vals: Vec<_> = r.entries().iter().map(|(e, _)| *e.value()).collect();
        assert_eq!(vals, vec![C::from(-0.1), C::from(0.1)]);
        let r = roots_of_unity_space(&Exponent::zero(), 3, &0.1, &c).unwrap();
        assert_eq!(r.dim(), 3);
        let r = roots_of_unity_space(&Exponent::real(1.0, &c).unwrap(), 2, &0.5, &c).unwrap();
        let vals: Vec<_> = r.entries().iter().map(|(e, _)| *e.value()).collect();
        assert_eq!(vals, vec![C::from(0.5), C::from(1.5)]);
        assert!(roots_of_unity_space(&Exponent::zero(), 2, &0.6, &c).is_err());
    }

    #[test]
    fn gap_of_nested_spaces() {
        let c = Context::<Mp256>::default();
        let small = ExponentMultiset::from_reals(&[Mp256::val(1.0)], &c).unwrap();
        let big = ExponentMultiset::from_reals(&[Mp256::val(0.0), Mp256::val(1.0)], &c).unwrap();
        assert!(subspace_gap(&small, &big, &c).unwrap() < Mp256::val(1e-30));
        // x^0 against span{x}: sine of the angle is sqrt(1 - 3/4)
        let g = subspace_gap(&ExponentMultiset::from_reals(&[Mp256::val(0.0)], &c).unwrap(), &small, &c).unwrap();
        assert!((g - Mp256::val(0.5)).abs() < Mp256::val(1e-30));
    }
}
