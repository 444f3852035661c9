//! Subcommand bodies, generic over the working precision.

use std::path::Path;

use hardy_core::context::Context;
use hardy_core::functions::{apply_hardy, apply_hardy_adjoint, norm_sqr, Exponent, LogMonomialSum};
use hardy_core::geometry::{
    dist_sqr_det_ratio, dist_to_target, gram, muntz_partial_sums, project, roots_of_unity_space, subspace_gap,
    ExponentMultiset, Target,
};
use hardy_core::json::{
    complex_to_json, exponents_from_text, matrix_to_json, moments_from_json, multiset_from_json, multiset_from_text,
    real_from_json, real_to_json, scaling_to_json, sum_from_json, sum_to_json, target_from_json,
};
use hardy_core::laguerre::{laguerre_coeffs, laguerre_fn};
use hardy_core::linalg::CMat;
use hardy_core::pick::{is_psd, max_scaling_constant, pick_matrix, PickSystem};
use hardy_core::scalar::{parse_complex, Real, C};
use hardy_core::Error;
use serde_json::{json, Value};

use crate::CliError;

/// Inline JSON when the text starts with `{` or `[`, otherwise a file path.
pub fn load_json(arg: &str) -> Result<Value, CliError> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Parse(format!("{arg}: {e}"))))
}

/// A comma list such as `0,1,-0.25+1.5i`, inline JSON, or a JSON file.
pub fn load_exponents<T: Real>(arg: &str, ctx: &Context<T>) -> Result<ExponentMultiset<T>, CliError> {
    let t = arg.trim_start();
    if t.starts_with('[') || Path::new(arg).is_file() {
        Ok(multiset_from_json(&load_json(arg)?, ctx)?)
    } else {
        Ok(multiset_from_text(arg, ctx)?)
    }
}

/// `1..12`, `1,2,5` or `3`.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad N list {text:?}; use 3, 1,2,5 or 1..12"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

fn parse_complex_list<T: Real>(text: &str) -> Result<Vec<C<T>>, CliError> {
    text.split(',')
        .map(|p| parse_complex(p).ok_or_else(|| CliError::Usage(format!("bad complex number {p:?}"))))
        .collect()
}

fn parse_real<T: Real>(text: &str) -> Result<T, CliError> {
    Ok(real_from_json(&Value::String(text.trim().to_string()))?)
}

/// Real matrices print as rows of numbers, complex ones as `[re, im]` pairs.
fn matrix_json<T: Real>(m: &CMat<T>) -> Value {
    let rows = m.rows();
    if rows.iter().flatten().all(|z| z.im.is_zero()) {
        Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(|z| real_to_json(&z.re)).collect())).collect())
    } else {
        matrix_to_json(m)
    }
}

fn sqrt_nonneg<T: Real>(x: T) -> T {
    if x > T::zero() {
        x.sqrt()
    } else {
        T::zero()
    }
}

pub fn apply<T: Real>(op: &str, f: &Value, ctx: &Context<T>) -> Result<Value, CliError> {
    let f = sum_from_json(f, ctx)?;
    let out = match op {
        "H" => apply_hardy(&f, ctx),
        "H*" | "Hstar" | "adjoint" => apply_hardy_adjoint(&f, ctx),
        "1-H" => f.sub(&apply_hardy(&f, ctx), ctx),
        "1-H*" | "1-Hstar" => f.sub(&apply_hardy_adjoint(&f, ctx), ctx),
        other => return Err(CliError::Usage(format!("unknown operator {other:?}; use H, H*, 1-H or 1-H*"))),
    };
    Ok(sum_to_json(&out))
}

pub fn gram_cmd<T: Real>(exponents: &str, ctx: &Context<T>) -> Result<Value, CliError> {
    let space = load_exponents(exponents, ctx)?;
    Ok(matrix_json(&gram(&space)))
}

pub fn dist<T: Real>(f: &Value, space: &str, ctx: &Context<T>) -> Result<Value, CliError> {
    let space = load_exponents(space, ctx)?;
    let target = target_from_json(f, ctx)?;
    let d = dist_to_target(&target, &space, ctx)?;
    let mut out = json!({ "dist": real_to_json(&d) });
    if let Target::Sum(g) = &target {
        let ratio = sqrt_nonneg(dist_sqr_det_ratio(g, &space)?);
        out["dist_det_ratio"] = real_to_json(&ratio);
    }
    Ok(out)
}

pub fn project_cmd<T: Real>(f: &Value, space: &str, ctx: &Context<T>) -> Result<Value, CliError> {
    let space = load_exponents(space, ctx)?;
    let f = sum_from_json(f, ctx)?;
    let p = project(&f, &space, ctx)?;
    let r = sqrt_nonneg(norm_sqr(&f.sub(&p, ctx)));
    Ok(json!({ "projection": sum_to_json(&p), "residual_norm": real_to_json(&r) }))
}

pub fn laguerre<T: Real>(n: u32, expand: Option<&Value>, nmax: Option<u32>, ctx: &Context<T>) -> Result<Value, CliError> {
    match expand {
        None => Ok(json!({ "n": n, "function": sum_to_json(&laguerre_fn::<T>(n, ctx)) })),
        Some(f) => {
            let f = sum_from_json(f, ctx)?;
            let c = laguerre_coeffs(&f, nmax.unwrap_or(n));
            Ok(json!({ "coeffs": c.coeffs.iter().map(complex_to_json).collect::<Vec<_>>() }))
        }
    }
}

pub enum MuntzSource<'a> {
    List(&'a str),
    /// `s_k = k^p` for `k = 1, 2, …`.
    Power(u32),
}

pub fn muntz<T: Real>(src: MuntzSource, terms: usize, ctx: &Context<T>) -> Result<Vec<T>, CliError> {
    let exps: Vec<Exponent<T>> = match src {
        MuntzSource::List(text) => load_exponents(text, ctx)?
            .entries()
            .iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m))
            .collect(),
        MuntzSource::Power(p) => (1..=terms as i64)
            .map(|k| Exponent::real(T::int(k.pow(p)), ctx))
            .collect::<Result<_, _>>()?,
    };
    Ok(muntz_partial_sums(&exps, terms))
}

pub fn pick<T: Real>(points: &str, values: &str, bound: &str, ctx: &Context<T>) -> Result<Value, CliError> {
    let points = exponents_from_text(points, ctx)?;
    let values = parse_complex_list::<T>(values)?;
    let sys = PickSystem::new(points, values, parse_real(bound)?)?;
    let p = pick_matrix(&sys);
    let tol = ctx.psd_tol(p.dim(), &p.max_abs1());
    let v = is_psd(&p, &tol);
    Ok(json!({ "psd": v.psd, "min_eig": real_to_json(&v.min_eig), "matrix": matrix_to_json(&p) }))
}

pub fn scaling<T: Real>(moments: &Value, n: Option<usize>, ctx: &Context<T>) -> Result<Value, CliError> {
    let mut m = moments_from_json::<T>(moments)?;
    if let Some(n) = n {
        m = m.truncate(n)?;
    }
    Ok(scaling_to_json(&max_scaling_constant(&m, ctx)?))
}

/// Rows `(h, dist, slope)`; `dist` is `dist((log x)^n x^s, Mult_h)` or, with
/// `reverse`, the largest distance from the unit ball of `Mult_h` to the
/// space with `s` of multiplicity `m`.
pub fn roots_of_unity<T: Real>(
    s: &str,
    m: usize,
    n: u32,
    hs: &[String],
    reverse: bool,
    ctx: &Context<T>,
) -> Result<Vec<(T, T)>, CliError> {
    let z = parse_complex::<T>(s).ok_or_else(|| CliError::Usage(format!("bad exponent {s:?}")))?;
    let s = Exponent::new(z, ctx)?;
    if !reverse && n as usize >= m {
        return Err(CliError::Core(Error::domain("need n < m for (log x)^n to lie in the limit space")));
    }
    let f = LogMonomialSum::term(C::from(T::one()), s.clone(), n);
    let limit = ExponentMultiset::new(vec![(s.clone(), m)], ctx);
    hs.iter()
        .map(|h| {
            let h: T = parse_real(h)?;
            let space = roots_of_unity_space(&s, m, &h, ctx)?;
            let d = if reverse { subspace_gap(&space, &limit, ctx)? } else { dist_to_target(&Target::Sum(f.clone()), &space, ctx)? };
            Ok((h, d))
        })
        .collect()
}

/// Log-log slopes between consecutive rows; empty for the first row.
pub fn slopes(rows: &[(f64, f64)]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in rows.windows(2) {
        let ((h0, d0), (h1, d1)) = (w[0], w[1]);
        out.push(Some((d1 / d0).ln() / (h1 / h0).ln()));
    }
    out.truncate(rows.len());
    out
}
