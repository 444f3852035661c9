//! Subspace specification to monomial approximants `Mult_N`: wandering
//! vector, moments, scaling constant, rational symbol, partial fractions,
//! reconstructed vector and exponents, with per-N diagnostics.

use std::fmt;

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::functions::{apply_hardy_adjoint, inner_product, norm_sqr, Exponent, LogMonomialSum};
use crate::geometry::{dist_to_target, project, ExponentMultiset, Target};
use crate::laguerre::laguerre_fn;
use crate::pick::{max_scaling_constant, MomentSequence, ScalingResult};
use crate::rational::{
    build_alpha, exponent_multiset_from_poles, inverse_laplace_un, max_modulus, partial_fractions_over_splus1,
    PartialFractionForm, RationalFn,
};
use crate::scalar::{cabs, Real, C};

/// How the invariant subspace is given.
#[derive(Clone, Debug)]
pub enum SubspaceSpec<T> {
    /// `Mult(S)` for a finite exponent multiset.
    Monomial(ExponentMultiset<T>),
    /// A unit wandering vector of the orthogonal complement.
    Wandering(LogMonomialSum<T>),
    /// Integer moments `<x^i, u>` of the wandering vector.
    Moments(MomentSequence<T>),
    /// Functions vanishing on `[0, a]`.
    Truncation(T),
}

/// The wandering vector, or as much of it as the pipeline needs.
#[derive(Clone, Debug)]
pub enum WanderingVector<T> {
    Function { u: LogMonomialSum<T>, k0: Option<usize> },
    /// `u = chi_[0,a] / sqrt(a)`, known through its moments only.
    Truncation { a: T },
    Moments(MomentSequence<T>),
}

impl<T: Real> WanderingVector<T> {
    /// `m_i = <x^i, u>` for `i = 0..=n`.
    pub fn moments(&self, n: usize, ctx: &Context<T>) -> Result<MomentSequence<T>> {
        match self {
            WanderingVector::Function { u, .. } => {
                let m = (0..=n)
                    .map(|i| {
                        let xi = LogMonomialSum::monomial(Exponent::real(T::int(i as i64), ctx)?);
                        Ok(inner_product(&xi, u))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MomentSequence::new(m)
            }
            WanderingVector::Truncation { a } => {
                let ra = a.sqrt();
                let mut p = a.clone();
                let m = (0..=n)
                    .map(|i| {
                        let v = p.clone() / (T::int(i as i64 + 1) * ra.clone());
                        p = p.clone() * a.clone();
                        C::from(v)
                    })
                    .collect();
                MomentSequence::new(m)
            }
            WanderingVector::Moments(m) => m.truncate(n),
        }
    }

    pub fn function(&self) -> Option<&LogMonomialSum<T>> {
        match self {
            WanderingVector::Function { u, .. } => Some(u),
            _ => None,
        }
    }

    pub fn k0(&self) -> Option<usize> {
        match self {
            WanderingVector::Function { k0, .. } => *k0,
            _ => None,
        }
    }
}

/// `u = eta / |eta|` with `eta = e_k0 - P e_k0` and `k0` the first Laguerre
/// index outside the space.
pub fn wandering_vector<T: Real>(spec: &SubspaceSpec<T>, ctx: &Context<T>) -> Result<WanderingVector<T>> {
    match spec {
        SubspaceSpec::Monomial(space) => {
            if space.is_empty() {
                return Err(Error::domain("monomial spec needs a nonempty exponent multiset"));
            }
            let tol2 = ctx.membership_tol.clone() * ctx.membership_tol.clone();
            for k in 0..=ctx.k_max {
                let e = laguerre_fn::<T>(k as u32, ctx);
                let eta = e.sub(&project(&e, space, ctx)?, ctx);
                let n2 = norm_sqr(&eta);
                if n2 > tol2 {
                    let u = eta.scale(&C::from(T::one() / n2.sqrt()));
                    return Ok(WanderingVector::Function { u, k0: Some(k) });
                }
            }
            Err(Error::SpaceAppearsDense { k_max: ctx.k_max })
        }
        SubspaceSpec::Wandering(u) => {
            let n2 = norm_sqr(u);
            if (n2.clone() - T::one()).abs_val() > ctx.membership_tol {
                return Err(Error::domain(format!("wandering vector must have unit norm, got |u|^2 = {}", n2.as_f64())));
            }
            Ok(WanderingVector::Function { u: u.clone(), k0: None })
        }
        SubspaceSpec::Moments(m) => Ok(WanderingVector::Moments(m.clone())),
        SubspaceSpec::Truncation(a) => {
            if !(*a > T::zero() && *a < T::one()) {
                return Err(Error::domain("truncation point must lie in (0, 1)"));
            }
            Ok(WanderingVector::Truncation { a: a.clone() })
        }
    }
}

trait AbsVal {
    fn abs_val(self) -> Self;
}

impl<T: Real> AbsVal for T {
    fn abs_val(self) -> Self {
        if self < T::zero() {
            -self
        } else {
            self
        }
    }
}

#[derive(Clone, Debug)]
pub struct WanderingDiagnostics<T> {
    /// `<(1 - H*)^k u, u>` for `k = 0..=K`.
    pub values: Vec<C<T>>,
    pub max_violation: T,
    pub warning: Option<String>,
}

/// Checks `<(1 - H*)^k u, u> = delta_k0` for `k <= K`.
pub fn validate_wandering<T: Real>(u: &LogMonomialSum<T>, k: usize, ctx: &Context<T>) -> WanderingDiagnostics<T> {
    let mut values = Vec::with_capacity(k + 1);
    let mut v = u.clone();
    let mut worst = T::zero();
    for j in 0..=k {
        let ip = inner_product(&v, u);
        let target = if j == 0 { C::one() } else { C::zero() };
        let dev = cabs(&(ip.clone() - target));
        if dev > worst {
            worst = dev;
        }
        values.push(ip);
        v = v.sub(&apply_hardy_adjoint(&v, ctx), ctx);
    }
    let warning = (worst > ctx.membership_tol).then(|| {
        format!("u is not wandering: max |<(1-H*)^k u, u> - delta| = {:.3e}", worst.as_f64())
    });
    WanderingDiagnostics { values, max_violation: worst, warning }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Wandering,
    Moments,
    Scaling,
    Alpha,
    PartialFractions,
    InverseLaplace,
    Exponents,
    Diagnostics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Wandering => "wandering",
            Stage::Moments => "moments",
            Stage::Scaling => "scaling",
            Stage::Alpha => "alpha",
            Stage::PartialFractions => "partial_fractions",
            Stage::InverseLaplace => "inverse_laplace",
            Stage::Exponents => "exponents",
            Stage::Diagnostics => "diagnostics",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageError {
    pub n: usize,
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N = {}, stage {}: {}", self.n, self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

/// Everything computed for one `N`.
#[derive(Clone, Debug)]
pub struct NRecord<T> {
    pub n: usize,
    pub bits: u32,
    pub scaling: ScalingResult<T>,
    pub alpha: RationalFn<T>,
    pub partial_fractions: PartialFractionForm<T>,
    pub u_n: LogMonomialSum<T>,
    pub full_exponents: ExponentMultiset<T>,
    pub exponents: ExponentMultiset<T>,
    /// `max |alpha_N(i) - C_N (i+1) m_i|` over the support of gamma.
    pub alpha_residual: T,
    /// `|<x^i, u_N> - m_i|` for `i = 0..=N`.
    pub moment_errors: Vec<T>,
    /// `max |alpha_N|` over a grid in the half plane.
    pub max_alpha_modulus: T,
    /// `dist(test_k, Mult_N)`, in the order the tests were given.
    pub distances: Vec<Option<T>>,
    pub warnings: Vec<String>,
}

impl<T> NRecord<T> {
    pub fn c_n(&self) -> &T {
        &self.scaling.c_n
    }
}

fn half_plane_grid<T: Real>() -> Vec<C<T>> {
    let re = [-0.45, -0.25, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
    let im = [0.0, 0.5, -0.5, 2.0, -2.0, 5.0, -5.0, 20.0, -20.0, 50.0];
    re.iter().flat_map(|&r| im.iter().map(move |&i| C::new(T::val(r), T::val(i)))).collect()
}

/// One pass of the pipeline at order `n`.
pub fn run_n<T: Real>(
    w: &WanderingVector<T>,
    n: usize,
    tests: &[Target<T>],
    ctx: &Context<T>,
) -> std::result::Result<NRecord<T>, StageError> {
    let tag = |stage: Stage| move |error: Error| StageError { n, stage, error };
    let m = w.moments(n, ctx).map_err(tag(Stage::Moments))?;
    let scaling = max_scaling_constant(&m, ctx).map_err(tag(Stage::Scaling))?;
    let values: Vec<C<T>> = m.beta().iter().map(|b| b.scale(scaling.c_n.clone())).collect();
    // the kernel equation reads gamma^H P = 0 in this orientation, so the
    // conjugate vector enters the interpolation identity
    let gamma_conj: Vec<C<T>> = scaling.gamma.iter().map(|g| g.conj()).collect();
    let alpha = build_alpha(&gamma_conj, &values, ctx).map_err(tag(Stage::Alpha))?;
    let pf = partial_fractions_over_splus1(&alpha, ctx).map_err(tag(Stage::PartialFractions))?;
    let u_n = inverse_laplace_un(&pf, ctx).map_err(tag(Stage::InverseLaplace))?;
    let (full, reduced) = exponent_multiset_from_poles(&pf, ctx).map_err(tag(Stage::Exponents))?;

    let mut warnings = Vec::new();
    let mut alpha_residual = T::zero();
    for (i, g) in scaling.gamma.iter().enumerate() {
        if !g.is_zero() {
            let r = cabs(&(alpha.eval(&C::from(T::int(i as i64))) - values[i].clone()));
            if r > alpha_residual {
                alpha_residual = r;
            }
        }
    }
    let moment_errors = m
        .values()
        .iter()
        .enumerate()
        .map(|(i, mi)| {
            let xi = LogMonomialSum::monomial(Exponent::real(T::int(i as i64), ctx).expect("integer exponent"));
            cabs(&(inner_product(&xi, &u_n) - mi.clone()))
        })
        .collect();
    let max_alpha_modulus = max_modulus(&alpha, &half_plane_grid());
    if max_alpha_modulus > T::one() + T::val(1e-8) {
        warnings.push(format!("|alpha_N| reaches {:.6e} > 1 on the half-plane grid", max_alpha_modulus.as_f64()));
    }
    if scaling.degenerate() {
        warnings.push(format!("kernel dimension {}; gamma chosen by the echelon rule", scaling.kernel_dim));
    }
    let distances = tests
        .iter()
        .map(|t| match dist_to_target(t, &reduced, ctx) {
            Ok(d) => Some(d),
            Err(e) => {
                warnings.push(format!("distance to test function failed: {e}"));
                None
            }
        })
        .collect();
    Ok(NRecord {
        n,
        bits: ctx.bits(),
        scaling,
        alpha,
        partial_fractions: pf,
        u_n,
        full_exponents: full,
        exponents: reduced,
        alpha_residual,
        moment_errors,
        max_alpha_modulus,
        distances,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct ApproximationReport<T> {
    pub k0: Option<usize>,
    pub wandering: Option<WanderingDiagnostics<T>>,
    /// One entry per requested `N`, in order; failures keep their stage.
    pub entries: Vec<std::result::Result<NRecord<T>, StageError>>,
    pub warnings: Vec<String>,
}

impl<T: Real> ApproximationReport<T> {
    pub fn records(&self) -> impl Iterator<Item = &NRecord<T>> {
        self.entries.iter().filter_map(|e| e.as_ref().ok())
    }

    /// Appends a record and checks that `C_N` does not increase.
    pub fn push(&mut self, entry: std::result::Result<NRecord<T>, StageError>, tol: &T) {
        if let Ok(rec) = &entry {
            if let Some(prev) = self.records().filter(|r| r.n < rec.n).last() {
                if rec.scaling.c_n > prev.scaling.c_n.clone() + tol.clone() {
                    self.warnings.push(format!("C_N increased from N = {} to N = {}", prev.n, rec.n));
                }
            }
            if rec.scaling.c_n < T::one() - tol.clone() {
                self.warnings.push(format!("C_{} = {:.12} is below 1", rec.n, rec.scaling.c_n.as_f64()));
            }
        }
        self.entries.push(entry);
    }
}

/// Runs the pipeline for every `N` in `ns` at the precision of `T`.
pub fn approximate<T: Real>(
    spec: &SubspaceSpec<T>,
    ns: &[usize],
    tests: &[Target<T>],
    ctx: &Context<T>,
) -> std::result::Result<ApproximationReport<T>, StageError> {
    let w = wandering_vector(spec, ctx).map_err(|error| StageError { n: 0, stage: Stage::Wandering, error })?;
    let wandering = w.function().map(|u| validate_wandering(u, 8, ctx));
    let mut report = ApproximationReport {
        k0: w.k0(),
        warnings: wandering.iter().filter_map(|d| d.warning.clone()).collect(),
        wandering,
        entries: Vec::new(),
    };
    let tol = T::val(1e-6);
    for &n in ns {
        report.push(run_n(&w, n, tests, ctx), &tol);
    }
    Ok(report)
}

/// `dist(test_k, Mult_N)` with rows indexed by test and columns by record.
pub fn convergence_diagnostics<T: Real>(
    report: &ApproximationReport<T>,
    tests: &[Target<T>],
    ctx: &Context<T>,
) -> Vec<Vec<Option<T>>> {
    tests
        .iter()
        .map(|t| report.records().map(|r| dist_to_target(t, &r.exponents, ctx).ok()).collect())
        .collect()
}

/// Working precision for order `n`: double through 8, then 128, 256, 512 bits.
pub fn ladder_bits(n: usize) -> u32 {
    match n {
        0..=8 => 53,
        9..=12 => 128,
        13..=16 => 256,
        _ => 512,
    }
}

/// The next rung above `bits`, if any.
pub fn next_bits(bits: u32) -> Option<u32> {
    match bits {
        0..=53 => Some(128),
        54..=128 => Some(256),
        129..=256 => Some(512),
        _ => None,
    }
}
