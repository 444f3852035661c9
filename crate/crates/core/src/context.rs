//! Tolerances threaded explicitly through every operation.

use crate::scalar::{pow2_neg, Scalar};

/// Working tolerances for one precision backend.
///
/// Defaults depend on the backend's mantissa width:
///
/// | tolerance          | double | `b` bits      | exact |
/// |--------------------|--------|---------------|-------|
/// | `merge_tol`        | 1e-9   | 2^-(b/2)      | 0     |
/// | `root_cluster_tol` | 1e-6   | 2^-(b/4)      | 0     |
/// | `bisection_tol`    | 2^-17  | 2^-(b/3)      | 2^-64 |
#[derive(Clone, Debug)]
pub struct Context<T> {
    /// Exponents closer than this are the same exponent.
    pub merge_tol: T,
    /// Polynomial roots closer than this (relative) form one multiple root.
    pub root_cluster_tol: T,
    /// `dist(e_k, S)` at or below this counts as membership.
    pub membership_tol: T,
    /// Relative width at which the scaling-constant bisection stops.
    pub bisection_tol: T,
    /// Exponents need `Re(s) > -1/2 + half_plane_margin`.
    pub half_plane_margin: T,
    /// Largest Laguerre index tried when locating the wandering vector.
    pub k_max: usize,
    /// Accept symbols that vanish at `s = -1` instead of raising an error.
    pub allow_vanishing_at_minus_one: bool,
    /// Multiplier on the `d * eps * norm` PSD threshold.
    pub psd_factor: T,
}

impl<T: Scalar> Default for Context<T> {
    fn default() -> Self {
        let (merge_tol, root_cluster_tol, bisection_tol) = match T::bits() {
            None => (T::zero(), T::zero(), pow2_neg(64)),
            Some(53) => (T::val(1e-9), T::val(1e-6), pow2_neg(17)),
            Some(b) => (pow2_neg(b / 2), pow2_neg(b / 4), pow2_neg(b / 3)),
        };
        Context {
            merge_tol,
            root_cluster_tol,
            membership_tol: T::val(1e-9),
            bisection_tol,
            half_plane_margin: T::val(1e-12),
            k_max: 32,
            allow_vanishing_at_minus_one: false,
            psd_factor: T::one(),
        }
    }
}

impl<T: Scalar> Context<T> {
    /// Backward-stable PSD threshold `d * eps * norm`.
    pub fn psd_tol(&self, dim: usize, norm: &T) -> T {
        self.psd_factor.clone() * T::int(dim as i64) * T::epsilon() * norm.clone()
    }

    pub fn bits(&self) -> u32 {
        T::bits().unwrap_or(0)
    }
}

/// Precision-independent overrides; unset fields keep the defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerances {
    pub merge_tol: Option<f64>,
    pub root_cluster_tol: Option<f64>,
    pub membership_tol: Option<f64>,
    pub bisection_tol: Option<f64>,
    pub half_plane_margin: Option<f64>,
    pub psd_factor: Option<f64>,
    pub k_max: Option<usize>,
    pub allow_vanishing_at_minus_one: Option<bool>,
}

impl Tolerances {
    pub fn context<T: Scalar>(&self) -> Context<T> {
        let mut c = Context::<T>::default();
        let set = |slot: &mut T, v: Option<f64>| {
            if let Some(v) = v {
                *slot = T::val(v);
            }
        };
        set(&mut c.merge_tol, self.merge_tol);
        set(&mut c.root_cluster_tol, self.root_cluster_tol);
        set(&mut c.membership_tol, self.membership_tol);
        set(&mut c.bisection_tol, self.bisection_tol);
        set(&mut c.half_plane_margin, self.half_plane_margin);
        set(&mut c.psd_factor, self.psd_factor);
        if let Some(k) = self.k_max {
            c.k_max = k;
        }
        if let Some(a) = self.allow_vanishing_at_minus_one {
            c.allow_vanishing_at_minus_one = a;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mp;

    #[test]
    fn defaults_follow_precision() {
        let d = Context::<f64>::default();
        assert_eq!(d.merge_tol, 1e-9);
        assert_eq!(d.root_cluster_tol, 1e-6);
        let m = Context::<Mp<128>>::default();
        assert_eq!(m.merge_tol, pow2_neg(64));
        assert_eq!(m.root_cluster_tol, pow2_neg(32));
        assert_eq!(m.bisection_tol, pow2_neg(42));
    }

    #[test]
    fn overrides_apply() {
        let t = Tolerances { membership_tol: Some(1e-6), k_max: Some(8), ..Default::default() };
        let c: Context<f64> = t.context();
        assert_eq!(c.membership_tol, 1e-6);
        assert_eq!(c.k_max, 8);
        assert_eq!(c.merge_tol, 1e-9);
    }
}
