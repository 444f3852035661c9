//! JSON and CSV forms of the crate's values.
//!
//! Reals are written as decimal strings with `bits/3` significant digits
//! (17 in double precision) so every emitted value parses back to itself.
//! Readers accept either strings or JSON numbers.

use serde_json::{json, Value};

use crate::context::{Context, Tolerances};
use crate::error::{Error, Result};
use crate::functions::{Exponent, LogMonomialSum, LogMonomialTerm};
use crate::geometry::{ExponentMultiset, Target};
use crate::linalg::CMat;
use crate::pick::{MomentSequence, ScalingResult};
use crate::pipeline::{approximate, ladder_bits, next_bits, NRecord, StageError, SubspaceSpec};
use crate::poly::Poly;
use crate::rational::{PartialFractionForm, Pole, RationalFn};
use crate::scalar::{parse_complex, Real, Scalar, C};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn real_to_json<T: Scalar>(x: &T) -> Value {
    if x.is_zero() {
        return Value::String(T::zero().to_decimal());
    }
    Value::String(x.to_decimal())
}

pub fn real_from_json<T: Scalar>(v: &Value) -> Result<T> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(parse_err(format!("expected a number, got {other}"))),
    };
    T::parse_decimal(&text).ok_or_else(|| parse_err(format!("bad number {text:?}")))
}

/// `[re, im]`.
pub fn complex_to_json<T: Scalar>(z: &C<T>) -> Value {
    json!([real_to_json(&z.re), real_to_json(&z.im)])
}

/// Reads `[re, im]`, a real number, or text such as `"-0.25+1.5i"`.
pub fn complex_from_json<T: Scalar>(v: &Value) -> Result<C<T>> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(C::new(real_from_json(&a[0])?, real_from_json(&a[1])?)),
        Value::String(s) => parse_complex(s).ok_or_else(|| parse_err(format!("bad complex number {s:?}"))),
        Value::Number(_) => Ok(C::from(real_from_json::<T>(v)?)),
        other => Err(parse_err(format!("expected a complex number, got {other}"))),
    }
}

fn complex_vec_to_json<T: Scalar>(v: &[C<T>]) -> Value {
    Value::Array(v.iter().map(complex_to_json).collect())
}

fn complex_vec_from_json<T: Scalar>(v: &Value) -> Result<Vec<C<T>>> {
    array(v, "list of complex numbers")?.iter().map(complex_from_json).collect()
}

fn real_vec_to_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(real_to_json).collect())
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("expected {what}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
    .ok_or_else(|| parse_err(format!("{what} must be a nonnegative integer")))
}

/// `{"terms":[{"re","im","s_re","s_im","logpow"}]}`.
pub fn sum_to_json<T: Scalar>(f: &LogMonomialSum<T>) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|t| {
            let s = t.exponent.value();
            json!({
                "re": real_to_json(&t.coeff.re),
                "im": real_to_json(&t.coeff.im),
                "s_re": real_to_json(&s.re),
                "s_im": real_to_json(&s.im),
                "logpow": t.logpow,
            })
        })
        .collect();
    json!({ "terms": terms })
}

pub fn sum_from_json<T: Scalar>(v: &Value, ctx: &Context<T>) -> Result<LogMonomialSum<T>> {
    let zero = Value::from(0);
    let get = |t: &'_ Value, k: &str| -> Result<T> { real_from_json(t.get(k).unwrap_or(&zero)) };
    let terms = array(field(v, "terms")?, "a list of terms")?
        .iter()
        .map(|t| {
            let coeff = C::new(get(t, "re")?, get(t, "im")?);
            let s = Exponent::new(C::new(get(t, "s_re")?, get(t, "s_im")?), ctx)?;
            let logpow = uint(t.get("logpow").unwrap_or(&zero), "logpow")?;
            let logpow = u32::try_from(logpow).map_err(|_| parse_err("logpow too large"))?;
            Ok(LogMonomialTerm::new(coeff, s, logpow))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogMonomialSum::new(terms, ctx))
}

/// `[{"s":"0.5","mult":1}]`.
pub fn multiset_to_json<T: Scalar>(m: &ExponentMultiset<T>) -> Value {
    Value::Array(
        m.entries()
            .iter()
            .map(|(s, k)| json!({ "s": crate::scalar::complex_to_text(s.value()), "mult": k }))
            .collect(),
    )
}

/// Reads the form written by [`multiset_to_json`] or a bare list of exponents.
pub fn multiset_from_json<T: Scalar>(v: &Value, ctx: &Context<T>) -> Result<ExponentMultiset<T>> {
    let entries = array(v, "a list of exponents")?
        .iter()
        .map(|e| {
            let (s, mult) = match e.get("s") {
                Some(s) => (s, e.get("mult").map(|m| uint(m, "mult")).transpose()?.unwrap_or(1)),
                None => (e, 1),
            };
            if mult == 0 {
                return Err(parse_err("multiplicity must be positive"));
            }
            Ok((Exponent::new(complex_from_json(s)?, ctx)?, mult as usize))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentMultiset::new(entries, ctx))
}

/// Parses a comma-separated exponent list such as `0,1,-0.25+1.5i`.
pub fn multiset_from_text<T: Scalar>(text: &str, ctx: &Context<T>) -> Result<ExponentMultiset<T>> {
    let entries = exponents_from_text(text, ctx)?.into_iter().map(|s| (s, 1)).collect();
    Ok(ExponentMultiset::new(entries, ctx))
}

pub fn exponents_from_text<T: Scalar>(text: &str, ctx: &Context<T>) -> Result<Vec<Exponent<T>>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let z = parse_complex(p).ok_or_else(|| parse_err(format!("bad exponent {p:?}")))?;
            Exponent::new(z, ctx)
        })
        .collect()
}

/// Rows of `[re, im]` pairs.
pub fn matrix_to_json<T: Scalar>(m: &CMat<T>) -> Value {
    Value::Array(m.rows().iter().map(|r| complex_vec_to_json(r)).collect())
}

/// `{"num":[[re,im],…],"den":[…]}`, coefficients from low to high degree.
pub fn rational_to_json<T: Scalar>(r: &RationalFn<T>) -> Value {
    json!({ "num": complex_vec_to_json(r.num.coeffs()), "den": complex_vec_to_json(r.den.coeffs()) })
}

pub fn rational_from_json<T: Scalar>(v: &Value) -> Result<RationalFn<T>> {
    let num = Poly::new(complex_vec_from_json(field(v, "num")?)?);
    let den = Poly::new(complex_vec_from_json(field(v, "den")?)?);
    RationalFn::new(num, den)
}

/// `{"poles":[{"lambda":[re,im],"coeffs":[…]}]}`.
pub fn partial_fractions_to_json<T: Scalar>(pf: &PartialFractionForm<T>) -> Value {
    let poles: Vec<Value> = pf
        .poles
        .iter()
        .map(|p| json!({ "lambda": complex_to_json(&p.lambda), "coeffs": complex_vec_to_json(&p.coeffs) }))
        .collect();
    json!({ "poles": poles })
}

pub fn partial_fractions_from_json<T: Scalar>(v: &Value) -> Result<PartialFractionForm<T>> {
    let poles = array(field(v, "poles")?, "a list of poles")?
        .iter()
        .map(|p| {
            Ok(Pole { lambda: complex_from_json(field(p, "lambda")?)?, coeffs: complex_vec_from_json(field(p, "coeffs")?)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialFractionForm { poles })
}

pub fn moments_to_json<T: Scalar>(m: &MomentSequence<T>) -> Value {
    complex_vec_to_json(m.values())
}

pub fn moments_from_json<T: Scalar>(v: &Value) -> Result<MomentSequence<T>> {
    let v = v.get("m").unwrap_or(v);
    MomentSequence::new(complex_vec_from_json(v)?)
}

pub fn scaling_to_json<T: Scalar>(r: &ScalingResult<T>) -> Value {
    json!({
        "C_N": real_to_json(&r.c_n),
        "gamma": complex_vec_to_json(&r.gamma),
        "min_eig": real_to_json(&r.min_eig),
        "kernel_dim": r.kernel_dim,
        "min_eig_trace": real_vec_to_json(&r.min_eig_trace),
    })
}

pub fn scaling_from_json<T: Scalar>(v: &Value) -> Result<ScalingResult<T>> {
    let trace = array(field(v, "min_eig_trace")?, "a list of pivots")?
        .iter()
        .map(real_from_json)
        .collect::<Result<Vec<T>>>()?;
    Ok(ScalingResult {
        c_n: real_from_json(field(v, "C_N")?)?,
        gamma: complex_vec_from_json(field(v, "gamma")?)?,
        min_eig: real_from_json(field(v, "min_eig")?)?,
        min_eig_trace: trace,
        kernel_dim: uint(field(v, "kernel_dim")?, "kernel_dim")? as usize,
    })
}

/// `{"variant":"monomial","exponents":[…]}`, `{"variant":"wandering","u":{…}}`,
/// `{"variant":"moments","m":[…]}` or `{"variant":"truncation","a":0.25}`.
pub fn subspace_from_json<T: Scalar>(v: &Value, ctx: &Context<T>) -> Result<SubspaceSpec<T>> {
    let variant = field(v, "variant")?.as_str().ok_or_else(|| parse_err("variant must be a string"))?;
    match variant {
        "monomial" => Ok(SubspaceSpec::Monomial(multiset_from_json(field(v, "exponents")?, ctx)?)),
        "wandering" => Ok(SubspaceSpec::Wandering(sum_from_json(field(v, "u")?, ctx)?)),
        "moments" => Ok(SubspaceSpec::Moments(moments_from_json(field(v, "m")?)?)),
        "truncation" => Ok(SubspaceSpec::Truncation(real_from_json(field(v, "a")?)?)),
        other => Err(parse_err(format!("unknown subspace variant {other:?}"))),
    }
}

pub fn subspace_to_json<T: Scalar>(s: &SubspaceSpec<T>) -> Value {
    match s {
        SubspaceSpec::Monomial(m) => json!({ "variant": "monomial", "exponents": multiset_to_json(m) }),
        SubspaceSpec::Wandering(u) => json!({ "variant": "wandering", "u": sum_to_json(u) }),
        SubspaceSpec::Moments(m) => json!({ "variant": "moments", "m": moments_to_json(m) }),
        SubspaceSpec::Truncation(a) => json!({ "variant": "truncation", "a": real_to_json(a) }),
    }
}

/// A test function: a bare log-monomial sum, `{"indicator": a}` for the
/// indicator of `[a, 1]`, or `{"truncated": a, "f": {…}}`.
pub fn target_from_json<T: Scalar>(v: &Value, ctx: &Context<T>) -> Result<Target<T>> {
    if let Some(a) = v.get("indicator") {
        return Ok(Target::Truncated { a: real_from_json(a)?, f: LogMonomialSum::one() });
    }
    if let Some(a) = v.get("truncated") {
        return Ok(Target::Truncated { a: real_from_json(a)?, f: sum_from_json(field(v, "f")?, ctx)? });
    }
    Ok(Target::Sum(sum_from_json(v, ctx)?))
}

pub fn targets_from_json<T: Scalar>(v: &Value, ctx: &Context<T>) -> Result<Vec<Target<T>>> {
    array(v, "a list of test functions")?.iter().map(|t| target_from_json(t, ctx)).collect()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::IllConditioned { .. } => "ill_conditioned",
        Error::ScalingUnbounded => "scaling_unbounded",
        Error::DegenerateKernel(_) => "degenerate_kernel",
        Error::VanishingAtMinusOne(_) => "vanishing_at_minus_one",
        Error::DegenerateSubspace(_) => "degenerate_subspace",
        Error::NoConvergence { .. } => "no_convergence",
        Error::SpaceAppearsDense { .. } => "space_appears_dense",
        Error::Residual { .. } => "residual",
        Error::Parse(_) => "parse",
    }
}

pub fn record_to_json<T: Real>(r: &NRecord<T>) -> Value {
    let dist: Vec<Value> = r.distances.iter().map(|d| d.as_ref().map_or(Value::Null, real_to_json)).collect();
    json!({
        "N": r.n,
        "bits": r.bits,
        "C_N": real_to_json(&r.scaling.c_n),
        "scaling": scaling_to_json(&r.scaling),
        "alpha": rational_to_json(&r.alpha),
        "partial_fractions": partial_fractions_to_json(&r.partial_fractions),
        "u_N": sum_to_json(&r.u_n),
        "full_exponents": multiset_to_json(&r.full_exponents),
        "exponents": multiset_to_json(&r.exponents),
        "alpha_residual": real_to_json(&r.alpha_residual),
        "moment_errors": real_vec_to_json(&r.moment_errors),
        "max_alpha_modulus": real_to_json(&r.max_alpha_modulus),
        "distances": dist,
        "warnings": r.warnings,
    })
}

pub fn stage_error_to_json(e: &StageError, bits: u32) -> Value {
    json!({
        "N": e.n,
        "bits": bits,
        "stage": e.stage.to_string(),
        "kind": error_kind(&e.error),
        "error": e.error.to_string(),
    })
}

/// Fully serialized outcome of a sweep over `N`, possibly at several precisions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportJson {
    pub k0: Option<usize>,
    pub entries: Vec<Value>,
    pub warnings: Vec<String>,
}

impl ReportJson {
    pub fn to_json(&self) -> Value {
        json!({ "k0": self.k0, "entries": self.entries, "warnings": self.warnings })
    }

    /// Columns `N, C_N, num_exponents, max_moment_residual, dist:test_k…`.
    pub fn to_csv(&self, n_tests: usize) -> String {
        let mut out = String::from("N,C_N,num_exponents,max_moment_residual");
        for k in 0..n_tests {
            out.push_str(&format!(",dist:test_{k}"));
        }
        out.push('\n');
        let text = |v: Option<&Value>| v.and_then(Value::as_str).unwrap_or("").to_string();
        for e in &self.entries {
            let mut row = vec![e["N"].to_string()];
            if e.get("error").is_some() {
                row.extend(std::iter::repeat_n(String::new(), 3 + n_tests));
            } else {
                row.push(text(e.get("C_N")));
                let dim: u64 = e["exponents"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|x| x["mult"].as_u64()).sum())
                    .unwrap_or(0);
                row.push(dim.to_string());
                let worst = e["moment_errors"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter_map(|v| v.as_str()?.parse::<f64>().ok())
                    .fold(0.0f64, f64::max);
                row.push(format!("{worst:.6e}"));
                for k in 0..n_tests {
                    row.push(text(e["distances"].get(k)));
                }
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Working precisions offered by [`with_scalar!`](crate::with_scalar).
pub const SUPPORTED_BITS: [u32; 4] = [53, 128, 256, 512];

pub fn check_bits(bits: u32) -> Result<()> {
    if SUPPORTED_BITS.contains(&bits) {
        Ok(())
    } else {
        Err(Error::domain(format!("unsupported precision {bits} bits; choose 53, 128, 256 or 512")))
    }
}

/// Runs `$body` with `$T` bound to the scalar type for `$bits`.
/// Callers check `$bits` with [`check_bits`] first.
#[macro_export]
macro_rules! with_scalar {
    ($bits:expr, $T:ident => $body:expr) => {
        match $bits {
            53 => {
                type $T = f64;
                $body
            }
            128 => {
                type $T = $crate::Mp128;
                $body
            }
            256 => {
                type $T = $crate::Mp256;
                $body
            }
            512 => {
                type $T = $crate::Mp512;
                $body
            }
            b => unreachable!("unsupported precision {b}"),
        }
    };
}

struct Attempt {
    entry: Value,
    k0: Option<usize>,
    warnings: Vec<String>,
    precision_failure: bool,
    c_n: Option<f64>,
}

fn attempt<T: Real>(spec: &Value, n: usize, tests: &Value, tol: &Tolerances) -> Result<Attempt> {
    let ctx: Context<T> = tol.context();
    let bits = ctx.bits();
    let spec = subspace_from_json(spec, &ctx)?;
    let tests = targets_from_json(tests, &ctx)?;
    let report = match approximate(&spec, &[n], &tests, &ctx) {
        Ok(r) => r,
        Err(e) => {
            return Ok(Attempt {
                precision_failure: e.error.is_precision_related(),
                entry: stage_error_to_json(&e, bits),
                k0: None,
                warnings: Vec::new(),
                c_n: None,
            })
        }
    };
    let (entry, precision_failure, c_n) = match &report.entries[0] {
        Ok(rec) => (record_to_json(rec), false, Some(rec.scaling.c_n.as_f64())),
        Err(e) => (stage_error_to_json(e, bits), e.error.is_precision_related(), None),
    };
    Ok(Attempt { entry, k0: report.k0, warnings: report.warnings, precision_failure, c_n })
}

/// Runs the pipeline for every `N`, each at `bits` or on the precision ladder
/// when `bits` is `None`, moving up a rung whenever a stage fails for
/// precision reasons.
pub fn approximate_json(spec: &Value, ns: &[usize], tests: &Value, bits: Option<u32>, tol: &Tolerances) -> Result<ReportJson> {
    if let Some(b) = bits {
        check_bits(b)?;
    }
    let mut out = ReportJson { k0: None, entries: Vec::new(), warnings: Vec::new() };
    let mut prev: Option<(usize, f64)> = None;
    for &n in ns {
        let mut b = bits.unwrap_or_else(|| ladder_bits(n));
        let result = loop {
            let a = with_scalar!(b, T => attempt::<T>(spec, n, tests, tol))?;
            match next_bits(b) {
                Some(up) if a.precision_failure => {
                    out.warnings.push(format!("N = {n}: escalating from {b} to {up} bits"));
                    b = up;
                }
                _ => break a,
            }
        };
        if out.k0.is_none() {
            out.k0 = result.k0;
        }
        for w in result.warnings {
            if !out.warnings.contains(&w) {
                out.warnings.push(w);
            }
        }
        if let Some(c) = result.c_n {
            if let Some((pn, pc)) = prev {
                if c > pc + 1e-6 {
                    out.warnings.push(format!("C_N increased from N = {pn} to N = {n}"));
                }
            }
            if c < 1.0 - 1e-6 {
                out.warnings.push(format!("C_{n} = {c:.12} is below 1"));
            }
            prev = Some((n, c));
        }
        out.entries.push(result.entry);
    }
    Ok(out)
}
