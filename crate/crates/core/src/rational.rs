//! Rational symbols `alpha = R/L`, partial fractions of `alpha(s)/(s+1)`
//! and the inverse Laplace map back to log-monomial sums.

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::functions::{Exponent, LogMonomialSum, LogMonomialTerm};
use crate::geometry::ExponentMultiset;
use crate::poly::{find_roots, sort_complex_by, Poly};
use crate::scalar::{abs1, cabs, factorial, sign_pow, Real, Scalar, C};

/// `num / den` with `den` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn<T> {
    pub num: Poly<T>,
    pub den: Poly<T>,
}

impl<T: Scalar> RationalFn<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        let lead = den.leading().clone();
        let inv = C::<T>::one() / lead;
        Ok(RationalFn { num: num.scale(&inv), den: den.monic() })
    }

    pub fn constant(c: C<T>) -> Self {
        RationalFn { num: Poly::constant(c), den: Poly::constant(C::one()) }
    }

    pub fn eval(&self, s: &C<T>) -> C<T> {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }
}

/// `sum_i w_i prod_{k in supp, k != i} (s + 1 + k)`, plus the same with
/// `|w_i|` and absolute factor coefficients as a rounding scale.
fn interp_poly<T: Real>(w: &[(usize, C<T>)]) -> (Poly<T>, Vec<T>) {
    let mut acc = Poly::constant(C::zero());
    let mut scale = vec![T::zero(); w.len().max(1)];
    for (i, wi) in w {
        let mut p = Poly::constant(wi.clone());
        let mut a = vec![cabs(wi)];
        for (k, _) in w {
            if k != i {
                let r = -C::from(T::int(*k as i64 + 1));
                p = p.mul_linear(&r);
                // multiply the absolute polynomial by (s + 1 + k)
                let c = T::int(*k as i64 + 1);
                let mut next = vec![T::zero(); a.len() + 1];
                for (j, v) in a.iter().enumerate() {
                    next[j] = next[j].clone() + v.clone() * c.clone();
                    next[j + 1] = next[j + 1].clone() + v.clone();
                }
                a = next;
            }
        }
        acc = acc.add(&p);
        for (j, v) in a.into_iter().enumerate() {
            scale[j] = scale[j].clone() + v;
        }
    }
    (acc, scale)
}

fn trim_against<T: Real>(p: &Poly<T>, scale: &[T], tol: &T) -> Poly<T> {
    let mut c = p.coeffs().to_vec();
    while c.len() > 1 {
        let j = c.len() - 1;
        let s = scale.get(j).cloned().unwrap_or_else(T::zero);
        if cabs(&c[j]) <= tol.clone() * s {
            c.pop();
        } else {
            break;
        }
    }
    Poly::new(c)
}

/// Cancels roots shared by numerator and denominator.
pub fn reduce<T: Real>(alpha: &RationalFn<T>, ctx: &Context<T>) -> Result<RationalFn<T>> {
    if alpha.num.degree() == 0 || alpha.den.degree() == 0 || alpha.num.is_zero() {
        return Ok(alpha.clone());
    }
    let nr = find_roots(&alpha.num, &ctx.root_cluster_tol)?;
    let dr = find_roots(&alpha.den, &ctx.root_cluster_tol)?;
    let mut num_roots: Vec<C<T>> = nr.iter().flat_map(|c| vec![c.root.clone(); c.multiplicity]).collect();
    let mut den_roots: Vec<C<T>> = dr.iter().flat_map(|c| vec![c.root.clone(); c.multiplicity]).collect();
    let mut cancelled = false;
    let mut i = 0;
    while i < num_roots.len() {
        let z = num_roots[i].clone();
        let scale = if cabs(&z) > T::one() { cabs(&z) } else { T::one() };
        let hit = den_roots
            .iter()
            .position(|w| cabs(&(w.clone() - z.clone())) <= ctx.root_cluster_tol.clone() * scale.clone());
        match hit {
            Some(j) => {
                num_roots.remove(i);
                den_roots.remove(j);
                cancelled = true;
            }
            None => i += 1,
        }
    }
    if !cancelled {
        return Ok(alpha.clone());
    }
    let lead = alpha.num.leading().clone();
    RationalFn::new(Poly::from_roots(&num_roots).scale(&lead), Poly::from_roots(&den_roots))
}

/// `alpha = R/L` from `sum_i conj(a_i) g_i/(1+i+s) alpha(s) = sum_i g_i/(1+i+s)`,
/// cleared over `prod_{i in supp g} (1+i+s)` and reduced.
pub fn build_alpha<T: Real>(gamma: &[C<T>], alpha_values: &[C<T>], ctx: &Context<T>) -> Result<RationalFn<T>> {
    if gamma.len() != alpha_values.len() {
        return Err(Error::domain("gamma and interpolation values differ in length"));
    }
    let supp: Vec<usize> = (0..gamma.len()).filter(|&i| !gamma[i].is_zero()).collect();
    if supp.is_empty() {
        return Err(Error::DegenerateKernel("gamma is zero".into()));
    }
    let r: Vec<_> = supp.iter().map(|&i| (i, gamma[i].clone())).collect();
    let l: Vec<_> = supp.iter().map(|&i| (i, alpha_values[i].conj() * gamma[i].clone())).collect();
    let (pr, sr) = interp_poly(&r);
    let (pl, sl) = interp_poly(&l);
    let tol = ctx.merge_tol.clone();
    let pr = trim_against(&pr, &sr, &tol);
    let pl = trim_against(&pl, &sl, &tol);
    let lmax = sl.iter().fold(T::zero(), |m, v| if *v > m { v.clone() } else { m });
    if pl.coeffs().iter().all(|c| cabs(c) <= tol.clone() * lmax.clone()) {
        return Err(Error::DegenerateKernel("L(s) vanishes identically".into()));
    }
    reduce(&RationalFn::new(pr, pl)?, ctx)
}

/// Pole `lambda` of multiplicity `coeffs.len()` with `coeffs[r-1] = c^r`
/// in `sum_r (r-1)! c^r / (s - lambda)^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pole<T> {
    pub lambda: C<T>,
    pub coeffs: Vec<C<T>>,
}

impl<T> Pole<T> {
    pub fn multiplicity(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractionForm<T> {
    pub poles: Vec<Pole<T>>,
}

impl<T: Scalar> PartialFractionForm<T> {
    pub fn eval(&self, s: &C<T>) -> C<T> {
        let mut acc = C::zero();
        for p in &self.poles {
            let inv = C::<T>::one() / (s.clone() - p.lambda.clone());
            let mut pw = inv.clone();
            for (r, c) in p.coeffs.iter().enumerate() {
                acc = acc + c.clone() * pw.clone() * C::from(factorial::<T>(r as u32));
                pw = pw * inv.clone();
            }
        }
        acc
    }

    pub fn has_minus_one(&self) -> bool {
        self.poles.iter().any(|p| p.lambda == -C::<T>::one())
    }
}

fn series_mul<T: Scalar>(a: &[C<T>], b: &[C<T>], order: usize) -> Vec<C<T>> {
    (0..order)
        .map(|k| {
            (0..=k).fold(C::zero(), |acc, i| match (a.get(i), b.get(k - i)) {
                (Some(x), Some(y)) => acc + x.clone() * y.clone(),
                _ => acc,
            })
        })
        .collect()
}

/// Expands `alpha(s)/(s+1)`. The pole at -1 is added symbolically; roots of
/// the denominator within `root_cluster_tol` of -1 join it.
pub fn partial_fractions_over_splus1<T: Real>(alpha: &RationalFn<T>, ctx: &Context<T>) -> Result<PartialFractionForm<T>> {
    let minus_one = -C::<T>::one();
    let mut num = alpha.num.clone();
    let at = num.eval(&minus_one);
    let num_scale = num.abs_eval(&T::one());
    let vanishing = cabs(&at) <= ctx.root_cluster_tol.clone() * num_scale;
    let mut poles: Vec<(C<T>, usize)> = Vec::new();
    if vanishing {
        if !ctx.allow_vanishing_at_minus_one {
            return Err(Error::VanishingAtMinusOne(format!("|num(-1)| = {:.3e}", cabs(&at).as_f64())));
        }
        num = num.div_linear(&minus_one).0;
    } else {
        poles.push((minus_one.clone(), 1));
    }
    if alpha.den.degree() > 0 {
        for c in find_roots(&alpha.den, &ctx.root_cluster_tol)? {
            if cabs(&(c.root.clone() - minus_one.clone())) <= ctx.root_cluster_tol.clone() {
                match poles.iter_mut().find(|(l, _)| *l == minus_one) {
                    Some((_, m)) => *m += c.multiplicity,
                    None => poles.push((minus_one.clone(), c.multiplicity)),
                }
            } else {
                poles.push((c.root, c.multiplicity));
            }
        }
    }
    let mut out = Vec::new();
    for (j, (lambda, m)) in poles.iter().enumerate() {
        // Taylor data of Q = num / prod_{k != j} (s - lambda_k)^m_k at lambda
        let mut q: Vec<C<T>> = num.taylor_shift(lambda);
        q.truncate(*m);
        for (k, (other, mk)) in poles.iter().enumerate() {
            if k == j {
                continue;
            }
            let delta = lambda.clone() - other.clone();
            let inv = C::<T>::one() / delta;
            // (delta + e)^-1 = sum_i (-1)^i e^i / delta^(i+1)
            let mut geo = Vec::with_capacity(*m);
            let mut p = inv.clone();
            for i in 0..*m {
                geo.push(p.scale(sign_pow::<T>(i as u32)));
                p = p * inv.clone();
            }
            for _ in 0..*mk {
                q = series_mul(&q, &geo, *m);
            }
        }
        q.resize(*m, C::zero());
        let coeffs = (1..=*m)
            .map(|r| q[m - r].clone().unscale(factorial::<T>(r as u32 - 1)))
            .collect();
        out.push(Pole { lambda: lambda.clone(), coeffs });
    }
    sort_complex_by(&mut out, |p| &p.lambda);
    let pf = PartialFractionForm { poles: out };
    check_residual(alpha, &pf, ctx)?;
    Ok(pf)
}

fn sample_points<T: Scalar>() -> Vec<C<T>> {
    [(0.3, 0.0), (1.7, 0.4), (0.0, 2.5), (-0.2, -1.1), (4.0, 3.0), (2.2, -0.6)]
        .iter()
        .map(|&(re, im)| C::new(T::val(re), T::val(im)))
        .collect()
}

fn check_residual<T: Real>(alpha: &RationalFn<T>, pf: &PartialFractionForm<T>, ctx: &Context<T>) -> Result<()> {
    let one = C::<T>::one();
    let mut worst = T::zero();
    for s in sample_points::<T>() {
        let want = alpha.eval(&s) / (s.clone() + one.clone());
        let got = pf.eval(&s);
        let scale = cabs(&want) + T::one();
        let r = cabs(&(got - want)) / scale;
        if r > worst {
            worst = r;
        }
    }
    let tol = ctx.root_cluster_tol.clone();
    if worst > tol {
        return Err(Error::Residual { residual: worst.as_f64(), tol: tol.as_f64() });
    }
    Ok(())
}

/// `u(x) = sum conj(c^r) (log 1/x)^(r-1) x^(-conj(lambda) - 1)`, the function
/// whose Laplace data reproduces `alpha(s) = (1+s) <x^s, u>`.
pub fn inverse_laplace_un<T: Scalar>(pf: &PartialFractionForm<T>, ctx: &Context<T>) -> Result<LogMonomialSum<T>> {
    let mut terms = Vec::new();
    for p in &pf.poles {
        let s = -p.lambda.conj() - C::<T>::one();
        let e = Exponent::new(s, ctx).map_err(|_| {
            Error::domain(format!(
                "reconstruction: pole {} maps outside the half plane",
                crate::scalar::complex_to_text(&p.lambda)
            ))
        })?;
        for (r, c) in p.coeffs.iter().enumerate() {
            let coeff = c.conj().scale(sign_pow::<T>(r as u32));
            terms.push(LogMonomialTerm::new(coeff, e.clone(), r as u32));
        }
    }
    Ok(LogMonomialSum::new(terms, ctx))
}

/// Full multiset `{-conj(lambda_j) - 1}` and the reduced one with a single
/// copy of the exponent 0 removed.
pub fn exponent_multiset_from_poles<T: Scalar>(
    pf: &PartialFractionForm<T>,
    ctx: &Context<T>,
) -> Result<(ExponentMultiset<T>, ExponentMultiset<T>)> {
    if !pf.has_minus_one() {
        return Err(Error::VanishingAtMinusOne("no pole at s = -1".into()));
    }
    let entries = pf
        .poles
        .iter()
        .map(|p| {
            let s = -p.lambda.conj() - C::<T>::one();
            let s = if p.lambda == -C::<T>::one() { C::zero() } else { s };
            Exponent::new(s, ctx).map(|e| (e, p.multiplicity()))
        })
        .collect::<Result<Vec<_>>>()?;
    let full = ExponentMultiset::new(entries, ctx);
    let reduced = full.remove_zero(1);
    if reduced.is_empty() {
        return Err(Error::DegenerateSubspace("reduced exponent multiset is empty".into()));
    }
    Ok((full, reduced))
}

/// Largest `|alpha(s)|` over the given points.
pub fn max_modulus<T: Real>(alpha: &RationalFn<T>, points: &[C<T>]) -> T {
    points.iter().map(|s| cabs(&alpha.eval(s))).fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// Largest coefficient difference between two rational functions with monic
/// denominators; 1 when the degrees differ.
pub fn coeff_distance<T: Scalar>(a: &RationalFn<T>, b: &RationalFn<T>) -> T {
    if a.num.degree() != b.num.degree() || a.den.degree() != b.den.degree() {
        return T::one();
    }
    let d = |x: &Poly<T>, y: &Poly<T>| {
        x.coeffs()
            .iter()
            .zip(y.coeffs())
            .map(|(p, q)| abs1(&(p.clone() - q.clone())))
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    };
    let (p, q) = (d(&a.num, &b.num), d(&a.den, &b.den));
    if p > q {
        p
    } else {
        q
    }
}
