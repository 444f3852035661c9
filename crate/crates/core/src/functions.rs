//! Log-monomial functions `c (log x)^m x^s` on (0,1) and the closed forms of
//! H, H* and the L² inner product on their finite sums.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::scalar::{abs1, factorial, real_powc, sign_pow, Real, Scalar, C};

/// Exponent `s` with `Re(s) > -1/2`, so that `x^s` is square integrable.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponent<T>(C<T>);

impl<T: Scalar> Exponent<T> {
    pub fn new(s: C<T>, ctx: &Context<T>) -> Result<Self> {
        let bound = ctx.half_plane_margin.clone() - T::val(0.5);
        if s.re > bound {
            Ok(Exponent(s))
        } else {
            Err(Error::domain(format!(
                "exponent {} is outside the half plane Re(s) > -1/2",
                crate::scalar::complex_to_text(&s)
            )))
        }
    }

    pub fn real(s: T, ctx: &Context<T>) -> Result<Self> {
        Self::new(C::new(s, T::zero()), ctx)
    }

    pub fn zero() -> Self {
        Exponent(C::zero())
    }

    pub fn value(&self) -> &C<T> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Order by real part, then imaginary part.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.0
            .re
            .partial_cmp(&other.0.re)
            .unwrap_or(Ordering::Equal)
            .then(self.0.im.partial_cmp(&other.0.im).unwrap_or(Ordering::Equal))
    }

    pub(crate) fn close_to(&self, other: &Self, tol: &T) -> bool {
        abs1(&(self.0.clone() - other.0.clone())) <= *tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogMonomialTerm<T> {
    pub coeff: C<T>,
    pub exponent: Exponent<T>,
    pub logpow: u32,
}

impl<T: Scalar> LogMonomialTerm<T> {
    pub fn new(coeff: C<T>, exponent: Exponent<T>, logpow: u32) -> Self {
        LogMonomialTerm { coeff, exponent, logpow }
    }
}

/// Finite sum of log-monomial terms in canonical form: sorted by
/// `(Re s, Im s, logpow)`, one term per key, no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMonomialSum<T> {
    terms: Vec<LogMonomialTerm<T>>,
}

impl<T: Scalar> LogMonomialSum<T> {
    /// Canonicalizes: exponents within `merge_tol` of each other share the
    /// first one seen in sorted order, and exponents that close to 0 become 0.
    pub fn new(terms: Vec<LogMonomialTerm<T>>, ctx: &Context<T>) -> Self {
        let tol = &ctx.merge_tol;
        let zero = Exponent::zero();
        let mut sorted = terms;
        sorted.sort_by(|a, b| a.exponent.cmp_key(&b.exponent));
        let mut groups: Vec<(Exponent<T>, Vec<(u32, C<T>)>)> = Vec::new();
        for t in sorted {
            let key = if t.exponent.close_to(&zero, tol) { zero.clone() } else { t.exponent };
            let slot = match groups.iter().position(|(e, _)| e.close_to(&key, tol)) {
                Some(i) => i,
                None => {
                    groups.push((key, Vec::new()));
                    groups.len() - 1
                }
            };
            let powers = &mut groups[slot].1;
            match powers.iter_mut().find(|(m, _)| *m == t.logpow) {
                Some((_, c)) => *c = c.clone() + t.coeff,
                None => powers.push((t.logpow, t.coeff)),
            }
        }
        let mut out = Vec::new();
        for (e, mut powers) in groups {
            powers.sort_by_key(|(m, _)| *m);
            for (m, c) in powers {
                if !c.is_zero() {
                    out.push(LogMonomialTerm::new(c, e.clone(), m));
                }
            }
        }
        out.sort_by(|a, b| a.exponent.cmp_key(&b.exponent).then(a.logpow.cmp(&b.logpow)));
        LogMonomialSum { terms: out }
    }

    pub fn zero() -> Self {
        LogMonomialSum { terms: Vec::new() }
    }

    /// The constant function 1.
    pub fn one() -> Self {
        LogMonomialSum { terms: vec![LogMonomialTerm::new(C::one(), Exponent::zero(), 0)] }
    }

    /// `c (log x)^m x^s` as a one-term sum.
    pub fn term(coeff: C<T>, s: Exponent<T>, logpow: u32) -> Self {
        let mut terms = vec![LogMonomialTerm::new(coeff, s, logpow)];
        terms.retain(|t| !t.coeff.is_zero());
        LogMonomialSum { terms }
    }

    pub fn monomial(s: Exponent<T>) -> Self {
        Self::term(C::one(), s, 0)
    }

    pub fn terms(&self) -> &[LogMonomialTerm<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self, ctx: &Context<T>) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms, ctx)
    }

    pub fn sub(&self, other: &Self, ctx: &Context<T>) -> Self {
        self.add(&other.scale(&-C::<T>::one()), ctx)
    }

    pub fn scale(&self, c: &C<T>) -> Self {
        LogMonomialSum {
            terms: self
                .terms
                .iter()
                .map(|t| LogMonomialTerm::new(t.coeff.clone() * c.clone(), t.exponent.clone(), t.logpow))
                .filter(|t| !t.coeff.is_zero())
                .collect(),
        }
    }

    /// Largest coefficient magnitude (`|re| + |im|`), 0 for the empty sum.
    pub fn max_coeff(&self) -> T {
        self.terms.iter().map(|t| abs1(&t.coeff)).fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    pub fn max_logpow(&self) -> u32 {
        self.terms.iter().map(|t| t.logpow).max().unwrap_or(0)
    }
}

/// `<(log x)^a x^t, (log x)^b x^s> = (-1)^(a+b) (a+b)! / (1 + t + conj s)^(a+b+1)`.
pub fn term_inner<T: Scalar>(t: &C<T>, a: u32, s: &C<T>, b: u32) -> C<T> {
    let k = a + b;
    let base = C::<T>::one() + t.clone() + s.conj();
    if base.im.is_zero() {
        let mut den = base.re.clone();
        for _ in 0..k {
            den = den * base.re.clone();
        }
        return C::from(sign_pow::<T>(k) * factorial::<T>(k) / den);
    }
    let mut den = base.clone();
    for _ in 0..k {
        den = den * base.clone();
    }
    C::from(sign_pow::<T>(k) * factorial::<T>(k)) / den
}

/// `<f, g> = ∫_0^1 f conj(g) dx`, linear in `f`.
pub fn inner_product<T: Scalar>(f: &LogMonomialSum<T>, g: &LogMonomialSum<T>) -> C<T> {
    let mut acc = C::zero();
    for p in &f.terms {
        for q in &g.terms {
            let k = term_inner(p.exponent.value(), p.logpow, q.exponent.value(), q.logpow);
            if p.coeff.im.is_zero() && q.coeff.im.is_zero() && k.im.is_zero() {
                acc.re = acc.re + p.coeff.re.clone() * q.coeff.re.clone() * k.re;
            } else {
                acc = acc + p.coeff.clone() * q.coeff.conj() * k;
            }
        }
    }
    acc
}

pub fn norm_sqr<T: Scalar>(f: &LogMonomialSum<T>) -> T {
    inner_product(f, f).re
}

/// `H((log x)^m x^s) = sum_k m!/k! (-1)^(m-k) / (s+1)^(m-k+1) (log x)^k x^s`.
pub fn apply_hardy<T: Scalar>(f: &LogMonomialSum<T>, ctx: &Context<T>) -> LogMonomialSum<T> {
    let mut out = Vec::new();
    for t in &f.terms {
        let inv = C::<T>::one() / (C::<T>::one() + t.exponent.value().clone());
        let m = t.logpow;
        let mf = factorial::<T>(m);
        // inv^(m-k+1), built from k = m downward
        let mut p = inv.clone();
        for k in (0..=m).rev() {
            let w = mf.clone() / factorial::<T>(k) * sign_pow::<T>(m - k);
            out.push(LogMonomialTerm::new(t.coeff.clone() * p.scale(w), t.exponent.clone(), k));
            p = p * inv.clone();
        }
    }
    LogMonomialSum::new(out, ctx)
}

/// `H* g(x) = ∫_x^1 g(t)/t dt` in closed form. For `s != 0` the boundary
/// value at `t = 1` appears as a constant term.
pub fn apply_hardy_adjoint<T: Scalar>(f: &LogMonomialSum<T>, ctx: &Context<T>) -> LogMonomialSum<T> {
    let mut out = Vec::new();
    for t in &f.terms {
        let m = t.logpow;
        if t.exponent.is_zero() {
            let c = t.coeff.unscale(T::int(m as i64 + 1));
            out.push(LogMonomialTerm::new(-c, Exponent::zero(), m + 1));
            continue;
        }
        let s = t.exponent.value().clone();
        let inv = C::<T>::one() / s;
        let mf = factorial::<T>(m);
        let mut p = inv.clone();
        for k in (0..=m).rev() {
            let w = mf.clone() / factorial::<T>(k) * sign_pow::<T>(m - k);
            out.push(LogMonomialTerm::new(-(t.coeff.clone() * p.scale(w)), t.exponent.clone(), k));
            p = p * inv.clone();
        }
        // p = 1/s^(m+2) here; the constant needs 1/s^(m+1)
        let constant = t.coeff.clone() * (p * t.exponent.value().clone()).scale(sign_pow::<T>(m) * mf);
        out.push(LogMonomialTerm::new(constant, Exponent::zero(), 0));
    }
    LogMonomialSum::new(out, ctx)
}

/// Point value at `0 < x < 1`.
pub fn evaluate<T: Real>(f: &LogMonomialSum<T>, x: &T) -> Result<C<T>> {
    if !(*x > T::zero() && *x < T::one()) {
        return Err(Error::domain("evaluation point must lie in (0, 1)"));
    }
    let lx = x.ln();
    let mut acc = C::zero();
    for t in &f.terms {
        let mut lp = T::one();
        for _ in 0..t.logpow {
            lp = lp * lx.clone();
        }
        acc = acc + t.coeff.clone() * real_powc(x, t.exponent.value()).scale(lp);
    }
    Ok(acc)
}

/// `∫_a^1 x^p (log x)^k dx` for `k = 0..=kmax`, by integration by parts.
pub fn truncated_moments<T: Real>(p: &C<T>, kmax: u32, a: &T) -> Vec<C<T>> {
    let p1 = p.clone() + C::one();
    let ap1 = real_powc(a, &p1);
    let la = a.ln();
    let mut out = Vec::with_capacity(kmax as usize + 1);
    out.push((C::<T>::one() - ap1.clone()) / p1.clone());
    let mut lak = T::one();
    for k in 1..=kmax {
        lak = lak * la.clone();
        let prev = out[k as usize - 1].clone();
        let v = -(ap1.scale(lak.clone()) / p1.clone()) - prev.scale(T::int(k as i64)) / p1.clone();
        out.push(v);
    }
    out
}

/// `∫_a^1 f conj(g) dx`.
pub fn truncated_inner_product<T: Real>(f: &LogMonomialSum<T>, g: &LogMonomialSum<T>, a: &T) -> Result<C<T>> {
    if !(*a > T::zero() && *a < T::one()) {
        return Err(Error::domain("truncation point must lie in (0, 1)"));
    }
    let mut acc = C::zero();
    for p in &f.terms {
        for q in &g.terms {
            let e = p.exponent.value().clone() + q.exponent.value().conj();
            let k = p.logpow + q.logpow;
            let m = truncated_moments(&e, k, a);
            acc = acc + p.coeff.clone() * q.coeff.conj() * m[k as usize].clone();
        }
    }
    Ok(acc)
}
