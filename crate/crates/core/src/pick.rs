//! Pick matrices for diagonal operators commuting with H, and the scaling
//! constant `C_N` with its kernel vector.

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::functions::Exponent;
use crate::geometry::bits_for_condition;
use crate::linalg::{column, hermitian_eigen, ldl_psd, CMat};
use crate::scalar::{abs1, cabs, Real, Scalar, C};

/// Interpolation data `alpha(s_i) = values[i]` with norm bound `M`.
#[derive(Clone, Debug)]
pub struct PickSystem<T> {
    pub points: Vec<Exponent<T>>,
    pub values: Vec<C<T>>,
    pub bound: T,
}

impl<T: Scalar> PickSystem<T> {
    pub fn new(points: Vec<Exponent<T>>, values: Vec<C<T>>, bound: T) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::domain("points and values differ in length"));
        }
        if bound <= T::zero() {
            return Err(Error::domain("bound must be positive"));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::domain("Pick points must be distinct"));
                }
            }
        }
        Ok(PickSystem { points, values, bound })
    }
}

/// `P[i][j] = (M^2 - conj(a_i) a_j) / (1 + conj(s_i) + s_j)`.
pub fn pick_matrix<T: Scalar>(sys: &PickSystem<T>) -> CMat<T> {
    let m2 = C::from(sys.bound.clone() * sys.bound.clone());
    CMat::from_fn(sys.points.len(), |i, j| {
        let num = m2.clone() - sys.values[i].conj() * sys.values[j].clone();
        let den = C::<T>::one() + sys.points[i].value().conj() + sys.points[j].value().clone();
        num / den
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdVerdict<T> {
    pub psd: bool,
    /// Smallest eigenvalue by Jacobi iteration.
    pub min_eig: T,
}

/// Pivoted-LDL verdict with tolerance `tol`, plus an eigenvalue estimate.
pub fn is_psd<T: Real>(a: &CMat<T>, tol: &T) -> PsdVerdict<T> {
    let verdict = ldl_psd(a, tol);
    let (vals, _) = hermitian_eigen(a);
    PsdVerdict { psd: verdict.psd, min_eig: vals.first().cloned().unwrap_or_else(T::zero) }
}

/// `m[i] = <x^i, u>` for `i = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence<T> {
    m: Vec<C<T>>,
}

impl<T: Scalar> MomentSequence<T> {
    pub fn new(m: Vec<C<T>>) -> Result<Self> {
        if m.is_empty() || m.iter().all(|v| v.is_zero()) {
            return Err(Error::ScalingUnbounded);
        }
        Ok(MomentSequence { m })
    }

    pub fn values(&self) -> &[C<T>] {
        &self.m
    }

    /// Largest index `N`.
    pub fn order(&self) -> usize {
        self.m.len() - 1
    }

    /// The first `n + 1` moments.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n + 1 > self.m.len() {
            return Err(Error::domain(format!("only {} moments available, N = {} requested", self.m.len(), n)));
        }
        Self::new(self.m[..=n].to_vec())
    }

    /// `beta_i = (i + 1) m_i`.
    pub fn beta(&self) -> Vec<C<T>> {
        self.m.iter().enumerate().map(|(i, v)| v.scale(T::int(i as i64 + 1))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ScalingResult<T> {
    pub c_n: T,
    /// Unit kernel vector, first nonzero entry positive real.
    pub gamma: Vec<C<T>>,
    /// Smallest eigenvalue of `K - C_N^2 B` at the returned `C_N`.
    pub min_eig: T,
    /// Smallest LDL pivot at each bisection step.
    pub min_eig_trace: Vec<T>,
    /// Numerical kernel dimension; above 1 means `gamma` was chosen by the
    /// echelon rule.
    pub kernel_dim: usize,
}

impl<T> ScalingResult<T> {
    pub fn degenerate(&self) -> bool {
        self.kernel_dim > 1
    }
}

/// Hilbert matrix `1/(1+i+j)`.
pub fn hilbert<T: Scalar>(n: usize) -> CMat<T> {
    CMat::from_fn(n, |i, j| C::from(T::one() / T::int((1 + i + j) as i64)))
}

/// `B[i][j] = conj(beta_i) beta_j / (1+i+j)`.
pub fn moment_matrix<T: Scalar>(beta: &[C<T>]) -> CMat<T> {
    CMat::from_fn(beta.len(), |i, j| beta[i].conj() * beta[j].clone() / C::from(T::int((1 + i + j) as i64)))
}

fn rayleigh<T: Scalar>(k: &CMat<T>, b: &CMat<T>, v: &[C<T>]) -> Option<T> {
    let den = b.quad_form(v).re;
    if den <= T::zero() {
        return None;
    }
    Some(k.quad_form(v).re / den)
}

/// Largest `C` with `K - C^2 B` positive semidefinite, by bisection on `C^2`
/// followed by a Rayleigh-quotient refinement, and a kernel vector of the
/// critical matrix.
pub fn max_scaling_constant<T: Real>(m: &MomentSequence<T>, ctx: &Context<T>) -> Result<ScalingResult<T>> {
    let n = m.order();
    let d = n + 1;
    if T::bits() == Some(53) && n > 10 {
        return Err(Error::IllConditioned { what: format!("Hilbert matrix of size {d}"), bits: 53, needed_bits: 128 });
    }
    let beta = m.beta();
    let k = hilbert::<T>(d);
    let b = moment_matrix(&beta);
    let scale = k.max_abs1();
    let kf = ldl_psd(&k, &ctx.psd_tol(d, &scale));
    if kf.rank < d {
        return Err(Error::IllConditioned {
            what: format!("Hilbert matrix of size {d}"),
            bits: ctx.bits(),
            needed_bits: ((5 * d + 32) as u32).max(bits_for_condition(&scale, &T::zero())),
        });
    }
    let mut hi: Option<T> = None;
    for v in &beta {
        let a = v.norm_sqr();
        if !a.is_zero() {
            let cand = T::int(2) / a;
            hi = Some(match hi {
                Some(h) if h <= cand => h,
                _ => cand,
            });
        }
    }
    let mut hi = hi.ok_or(Error::ScalingUnbounded)?;
    let mut lo = T::zero();
    let bnorm = b.max_abs1();
    let psd_at = |t: &T| {
        let a = k.sub_scaled(t, &b);
        let tol = ctx.psd_tol(d, &(scale.clone() + t.clone() * bnorm.clone()));
        ldl_psd(&a, &tol)
    };
    let mut trace = Vec::new();
    while hi.clone() - lo.clone() > ctx.bisection_tol.clone() * hi.clone() {
        let mid = (lo.clone() + hi.clone()) / T::int(2);
        let v = psd_at(&mid);
        trace.push(v.min_pivot.clone());
        if v.psd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let width = hi.clone() - lo.clone();
    let mut t = lo.clone();
    let eig_at = |t: &T| hermitian_eigen(&k.sub_scaled(t, &b));
    let (mut vals, mut vecs) = eig_at(&t);
    for _ in 0..6 {
        let v = column(&vecs, 0);
        let Some(tr) = rayleigh(&k, &b, &v) else { break };
        let moved = abs1(&C::from(tr.clone() - t.clone()));
        if tr > hi.clone() + width.clone() * T::int(4) || tr < lo.clone() - width.clone() * T::int(4) {
            break;
        }
        t = tr;
        let next = eig_at(&t);
        vals = next.0;
        vecs = next.1;
        if moved <= T::epsilon() * t.clone() * T::int(16) {
            break;
        }
    }
    let kernel_tol = T::int(1000) * T::int(d as i64) * T::epsilon() * (scale.clone() + t.clone() * bnorm.clone());
    let kernel_dim = vals.iter().filter(|v| **v <= kernel_tol).count().max(1);
    let gamma = if kernel_dim == 1 {
        normalize(column(&vecs, 0))
    } else {
        let basis: Vec<Vec<C<T>>> = (0..kernel_dim).map(|j| column(&vecs, j)).collect();
        normalize(echelon_first_row(basis, &ctx.root_cluster_tol))
    };
    let c_n = t.sqrt();
    Ok(ScalingResult { c_n, gamma, min_eig: vals[0].clone(), min_eig_trace: trace, kernel_dim })
}

/// Unit norm, first entry above noise made positive real.
fn normalize<T: Real>(mut v: Vec<C<T>>) -> Vec<C<T>> {
    let norm = v.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt();
    let noise = norm.clone() * T::epsilon() * T::int(1 << 10);
    if let Some(first) = v.iter().find(|c| cabs(c) > noise).cloned() {
        let phase = first.conj().unscale(cabs(&first) * norm);
        for c in v.iter_mut() {
            *c = c.clone() * phase.clone();
        }
    }
    for c in v.iter_mut() {
        if cabs(c) <= noise {
            *c = C::zero();
        }
    }
    v
}

/// First row of the reduced row echelon form of the span of `rows`: the
/// kernel vector whose leading nonzero index is smallest, with zeros at the
/// other pivot columns.
fn echelon_first_row<T: Real>(mut rows: Vec<Vec<C<T>>>, tol: &T) -> Vec<C<T>> {
    let k = rows.len();
    let d = rows[0].len();
    let mut r = 0;
    for col in 0..d {
        if r == k {
            break;
        }
        let (best, mag) = (r..k)
            .map(|i| (i, cabs(&rows[i][col])))
            .fold((r, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= *tol {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][col].clone();
        for c in rows[r].iter_mut() {
            *c = c.clone() / p.clone();
        }
        for i in 0..k {
            if i != r {
                let f = rows[i][col].clone();
                if !f.is_zero() {
                    for c in 0..d {
                        let t = f.clone() * rows[r][c].clone();
                        rows[i][c] = rows[i][c].clone() - t;
                    }
                }
            }
        }
        r += 1;
    }
    rows.swap_remove(0)
}
