//! Laguerre basis `e_n = (1 - H*)^n 1` and the shift picture of `1 - H*`.

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::functions::{Exponent, LogMonomialSum, LogMonomialTerm};
use crate::scalar::{binomial, cpowi, factorial, sign_pow, Scalar, C};

/// `e_n = sum_j C(n,j) (log x)^j / j!`.
pub fn laguerre_fn<T: Scalar>(n: u32, ctx: &Context<T>) -> LogMonomialSum<T> {
    let terms = (0..=n)
        .map(|j| {
            let c = binomial::<T>(n, j) / factorial::<T>(j);
            LogMonomialTerm::new(C::from(c), Exponent::zero(), j)
        })
        .collect();
    LogMonomialSum::new(terms, ctx)
}

/// Coordinates in the Laguerre basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftCoefficients<T> {
    pub coeffs: Vec<C<T>>,
}

impl<T: Scalar> ShiftCoefficients<T> {
    pub fn new(coeffs: Vec<C<T>>) -> Self {
        ShiftCoefficients { coeffs }
    }

    /// Unit vector `e_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![C::zero(); n + 1];
        coeffs[n] = C::one();
        ShiftCoefficients { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// `sum_n c_n e_n` as a function.
    pub fn to_function(&self, ctx: &Context<T>) -> LogMonomialSum<T> {
        let mut acc = LogMonomialSum::zero();
        for (n, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&laguerre_fn(n as u32, ctx).scale(c), ctx);
            }
        }
        acc
    }
}

/// `<(log x)^a x^s, e_n>`, the `a`-th s-derivative of `s^n / (s+1)^(n+1)`.
pub fn term_coeff<T: Scalar>(s: &C<T>, a: u32, n: u32) -> C<T> {
    let s1 = C::<T>::one() + s.clone();
    let inv = C::<T>::one() / s1.clone();
    let base = cpowi(&inv, n + 1);
    let mut acc = C::zero();
    // a! [e^a] (s+e)^n (s+1+e)^-(n+1)
    for i in 0..=a.min(n) {
        let left = cpowi(s, n - i).scale(binomial::<T>(n, i));
        let j = a - i;
        let right = (base.clone() * cpowi(&inv, j)).scale(sign_pow::<T>(j) * binomial::<T>(n + j, j));
        acc = acc + left * right;
    }
    acc.scale(factorial::<T>(a))
}

/// `<f, e_n>` for `n = 0..=nmax`, by closed form.
pub fn laguerre_coeffs<T: Scalar>(f: &LogMonomialSum<T>, nmax: u32) -> ShiftCoefficients<T> {
    let coeffs = (0..=nmax)
        .map(|n| {
            f.terms().iter().fold(C::zero(), |acc, t| {
                acc + t.coeff.clone() * term_coeff(t.exponent.value(), t.logpow, n)
            })
        })
        .collect();
    ShiftCoefficients { coeffs }
}

/// Output of [`blaschke_shift_apply`]: the truncated image and the exact
/// squared norm of everything beyond the truncation.
#[derive(Clone, Debug)]
pub struct ShiftImage<T> {
    pub coeffs: ShiftCoefficients<T>,
    pub trunc: usize,
    pub tail_norm_sqr: T,
}

/// Applies `(S - a)(1 - conj(a) S)^-1` with `a = 1 - z`, the shift-picture
/// form of `(H* - z)[(conj z - 1) H* - conj z]^-1`.
///
/// The image of a vector supported on `0..L` decays like `|a|^n` beyond `L`,
/// so the part cut off at `trunc` has squared norm
/// `|a|^(2(trunc-L)) (1 - |a|^2) |w_(L-1)|^2` with `w` the resolvent sequence.
/// `trunc` starts at `max(trunc, L+1)` and doubles until `|a|^(trunc-L) < tol`.
pub fn blaschke_shift_apply<T: Scalar>(
    z: &C<T>,
    v: &ShiftCoefficients<T>,
    trunc: Option<usize>,
    tol: &T,
) -> Result<ShiftImage<T>> {
    let a = C::<T>::one() - z.clone();
    let a2 = a.norm_sqr();
    if a2 >= T::one() {
        return Err(Error::domain("Blaschke parameter z must satisfy |z - 1| < 1"));
    }
    let l = v.len().max(1);
    let mut trunc = trunc.unwrap_or(256).max(l + 1);
    let tol2 = tol.clone() * tol.clone();
    let decay = |k: usize| {
        let mut p = T::one();
        for _ in 0..k {
            p = p * a2.clone();
            if p.is_zero() {
                break;
            }
        }
        p
    };
    while !a2.is_zero() && decay(trunc - l) >= tol2 && trunc < 1 << 20 {
        trunc *= 2;
    }
    let ab = a.conj();
    let mut out = Vec::with_capacity(trunc);
    let mut w_prev = C::<T>::zero();
    for n in 0..trunc {
        let vn = v.coeffs.get(n).cloned().unwrap_or_else(C::zero);
        let w = vn + ab.clone() * w_prev.clone();
        out.push(w_prev.clone() - a.clone() * w.clone());
        w_prev = w;
    }
    // w_prev now holds w_(trunc-1) = conj(a)^(trunc-L) w_(L-1)
    let w_last = v
        .coeffs
        .iter()
        .fold(C::<T>::zero(), |acc, c| c.clone() + ab.clone() * acc);
    let tail_norm_sqr = decay(trunc - l) * (T::one() - a2) * w_last.norm_sqr();
    Ok(ShiftImage { coeffs: ShiftCoefficients { coeffs: out }, trunc, tail_norm_sqr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{apply_hardy_adjoint, inner_product};
    use crate::Exact;

    #[test]
    fn first_basis_elements() {
        let c = Context::<Exact>::default();
        let e1 = laguerre_fn::<Exact>(1, &c);
        let want = LogMonomialSum::one().add(&LogMonomialSum::term(C::one(), Exponent::zero(), 1), &c);
        assert_eq!(e1, want);
        let e2 = laguerre_fn::<Exact>(2, &c);
        let t = e2.terms();
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].coeff, C::from(Exact::from_integer(2.into())));
        assert_eq!(t[2].coeff, C::from(Exact::new(1.into(), 2.into())));
    }

    #[test]
    fn shift_relation_exact() {
        let c = Context::<Exact>::default();
        for n in 0..8 {
            let e = laguerre_fn::<Exact>(n, &c);
            let shifted = e.sub(&apply_hardy_adjoint(&e, &c), &c);
            assert_eq!(shifted, laguerre_fn(n + 1, &c));
        }
    }

    #[test]
    fn orthonormal_exact() {
        let c = Context::<Exact>::default();
        let es: Vec<_> = (0..8).map(|n| laguerre_fn::<Exact>(n, &c)).collect();
        for (i, a) in es.iter().enumerate() {
            for (j, b) in es.iter().enumerate() {
                let want = if i == j { C::one() } else { C::zero() };
                assert_eq!(inner_product(a, b), want);
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let c = Context::<f64>::default();
        let one = laguerre_coeffs(&LogMonomialSum::<f64>::one(), 4);
        assert_eq!(one.coeffs[0], C::from(1.0));
        assert!(one.coeffs[1..].iter().all(|v| v.norm() < 1e-15));
        let x = LogMonomialSum::monomial(Exponent::real(1.0, &c).unwrap());
        let cx = laguerre_coeffs(&x, 10);
        for (n, v) in cx.coeffs.iter().enumerate() {
            assert!((v - C::from(0.5f64.powi(n as i32 + 1))).norm() < 1e-15);
        }
        let e3 = laguerre_coeffs(&laguerre_fn::<f64>(3, &c), 6);
        for (n, v) in e3.coeffs.iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((v - C::from(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn log_coefficients_match_inner_products() {
        let c = Context::<f64>::default();
        let s = Exponent::new(C::new(0.3, -0.7), &c).unwrap();
        let f = LogMonomialSum::term(C::new(1.0, 0.5), s, 3);
        let got = laguerre_coeffs(&f, 7);
        for n in 0..=7 {
            let want = inner_product(&f, &laguerre_fn(n, &c));
            assert!((got.coeffs[n as usize] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_examples() {
        let v = ShiftCoefficients::new(vec![C::new(1.0, 0.0), C::new(0.0, 2.0)]);
        let out = blaschke_shift_apply(&C::from(1.0), &v, Some(8), &1e-12).unwrap();
        assert_eq!(out.coeffs.coeffs[0], C::from(0.0));
        assert_eq!(out.coeffs.coeffs[1], v.coeffs[0]);
        assert_eq!(out.coeffs.coeffs[2], v.coeffs[1]);

        let e0 = ShiftCoefficients::<f64>::basis(0);
        let out = blaschke_shift_apply(&C::from(0.5), &e0, None, &1e-14).unwrap();
        let want = [-0.5, 0.75, 0.375, 0.1875];
        for (k, w) in want.iter().enumerate() {
            assert!((out.coeffs.coeffs[k] - C::from(*w)).norm() < 1e-15);
        }
        assert!((out.coeffs.norm_sqr() + out.tail_norm_sqr - 1.0).abs() < 1e-14);
        assert!(blaschke_shift_apply(&C::from(2.0), &e0, None, &1e-12).is_err());
    }

    #[test]
    fn tail_bound_is_exact_in_rational_mode() {
        let e0 = ShiftCoefficients::<Exact>::basis(0);
        let half = Exact::new(1.into(), 2.into());
        let tol = Exact::new(1.into(), 1000.into());
        let out = blaschke_shift_apply(&C::from(half), &e0, Some(4), &tol).unwrap();
        assert_eq!(out.coeffs.norm_sqr() + out.tail_norm_sqr, Exact::one());
    }
}
