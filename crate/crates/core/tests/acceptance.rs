//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use hardy_core::context::Context;
use hardy_core::functions::{
    apply_hardy, apply_hardy_adjoint, evaluate, inner_product, norm_sqr, term_inner, Exponent, LogMonomialSum,
    LogMonomialTerm,
};
use hardy_core::geometry::{
    cauchy_det, dist_to_target, gram, muntz_partial_sums, roots_of_unity_space, subspace_gap, ExponentMultiset, Target,
};
use hardy_core::laguerre::{blaschke_shift_apply, laguerre_coeffs, laguerre_fn, ShiftCoefficients};
use hardy_core::linalg::Lu;
use hardy_core::pick::{is_psd, pick_matrix, PickSystem};
use hardy_core::pipeline::{approximate, SubspaceSpec};
use hardy_core::poly::Poly;
use hardy_core::rational::{coeff_distance, RationalFn};
use hardy_core::scalar::{cabs, Real, Scalar, C};
use hardy_core::{Exact, Mp128, Mp256};
use hardy_quadrature::{integrate, Integrand};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_917;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + offset)
}

fn ctx() -> Context<f64> {
    Context::default()
}

fn random_sum(r: &mut ChaCha8Rng, max_terms: usize) -> LogMonomialSum<f64> {
    let c = ctx();
    let n = r.gen_range(1..=max_terms);
    let terms = (0..n)
        .map(|_| {
            let coeff = C::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let s = C::new(r.gen_range(-0.45..3.0), r.gen_range(-3.0..3.0));
            LogMonomialTerm::new(coeff, Exponent::new(s, &c).unwrap(), r.gen_range(0..=3))
        })
        .collect();
    LogMonomialSum::new(terms, &c)
}

/// `sum |c_i| |c_j| |<t_i, t_j>|`: the size of `<f, g>` before cancellation.
fn pair_scale(f: &LogMonomialSum<f64>, g: &LogMonomialSum<f64>) -> f64 {
    let mut s = 0.0;
    for a in f.terms() {
        for b in g.terms() {
            s += a.coeff.norm() * b.coeff.norm() * term_inner(a.exponent.value(), a.logpow, b.exponent.value(), b.logpow).norm();
        }
    }
    s
}

/// `sum |c| x^Re(s) |log x|^k`: the size of `f(x)` before cancellation.
fn abs_eval(f: &LogMonomialSum<f64>, x: f64) -> f64 {
    f.terms()
        .iter()
        .map(|t| t.coeff.norm() * x.powf(t.exponent.value().re) * x.ln().abs().powi(t.logpow as i32))
        .sum()
}

fn c64(z: C<f64>) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Direct point value on `(0, 1]`, independent of the library evaluator.
fn pointwise(f: &LogMonomialSum<f64>, x: f64) -> Complex64 {
    let lx = x.ln();
    f.terms()
        .iter()
        .map(|t| c64(t.coeff) * Complex64::from(x).powc(c64(*t.exponent.value())) * lx.powi(t.logpow as i32))
        .sum()
}

fn criterion_1() -> Verdict {
    let c = ctx();
    let es: Vec<_> = (0..16).map(|n| laguerre_fn::<f64>(n, &c)).collect();
    let mut dev = 0.0f64;
    for (i, e) in es.iter().enumerate() {
        let row = laguerre_coeffs(e, 15);
        for (j, v) in row.coeffs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((v - C::from(want)).norm());
        }
    }
    let cx = Context::<Exact>::default();
    let ex: Vec<_> = (0..16).map(|n| laguerre_fn::<Exact>(n, &cx)).collect();
    let mut exact = true;
    for (i, a) in ex.iter().enumerate() {
        for (j, b) in ex.iter().enumerate() {
            let want = if i == j { C::one() } else { C::zero() };
            exact &= inner_product(a, b) == want;
        }
    }
    verdict(dev < 1e-10 && exact, format!("double max |G - I| = {dev:.2e} (< 1e-10), rational G == I: {exact}"))
}

fn criterion_2() -> Verdict {
    let c = ctx();
    let mut r = rng(2);
    let one = LogMonomialSum::one();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_sum(&mut r, 6);
        let g = f.sub(&apply_hardy(&f, &c), &c);
        let resid = norm_sqr(&f) - norm_sqr(&g) - inner_product(&f, &one).norm_sqr();
        worst = worst.max(resid.abs() / pair_scale(&f, &f));
    }
    verdict(worst < 1e-10, format!("max relative residual |f|^2 - |(1-H)f|^2 - |<f,1>|^2 = {worst:.2e} (< 1e-10) over 100 sums"))
}

fn criterion_3() -> Verdict {
    let c = ctx();
    let mut r = rng(3);
    let xs = [0.01, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9, 0.99];
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random_sum(&mut r, 4);
        let p = f.terms().iter().map(|t| t.exponent.value().re).fold(0.0, f64::min);
        let k = f.max_logpow();
        let hf = apply_hardy(&f, &c);
        let hsf = apply_hardy_adjoint(&f, &c);
        for &x in &xs {
            // (Hf)(x) = ∫₀¹ f(x u) du
            let ff = f.clone();
            let h_int = Integrand::new(move |u: f64| pointwise(&ff, x * u)).singularity(p, k);
            let got = integrate(&h_int, 1e-12).expect("quadrature").value;
            let want = c64(evaluate(&hf, &x).unwrap());
            worst = worst.max((got - want).norm() / want.norm().max(abs_eval(&hf, x)));
            // (H*f)(x) = ∫ₓ¹ f(t)/t dt = -log x ∫₀¹ f(x^u) du
            let ff = f.clone();
            let lx = -x.ln();
            let hs_int = Integrand::new(move |u: f64| pointwise(&ff, x.powf(u)) * lx);
            let got = integrate(&hs_int, 1e-12).expect("quadrature").value;
            let want = c64(evaluate(&hsf, &x).unwrap());
            worst = worst.max((got - want).norm() / want.norm().max(abs_eval(&hsf, x)));
        }
    }
    verdict(worst < 1e-8, format!("max relative error of H and H* against quadrature = {worst:.2e} (< 1e-8), 50 functions x 10 points"))
}

fn criterion_4() -> Verdict {
    let c = ctx();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = C::new(r.gen_range(-0.45..5.0), r.gen_range(-5.0..5.0));
        let xs = LogMonomialSum::monomial(Exponent::new(s, &c).unwrap());
        let d = xs.add(&apply_hardy_adjoint(&xs, &c).scale(&s), &c).sub(&LogMonomialSum::one(), &c);
        worst = d.terms().iter().map(|t| t.coeff.norm()).fold(worst, f64::max);
    }
    verdict(worst < 1e-12, format!("max coefficient of (1 + s H*) x^s - 1 = {worst:.2e} (< 1e-12) over 20 s"))
}

fn criterion_5() -> Verdict {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    let mut bracketed = true;
    for _ in 0..100 {
        let rad = r.gen_range(0.0..0.95f64);
        let ang = r.gen_range(0.0..std::f64::consts::TAU);
        let z = C::new(1.0 - rad * ang.cos(), -rad * ang.sin());
        let len = r.gen_range(1..16);
        let v = ShiftCoefficients::new((0..len).map(|_| C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect());
        let out = blaschke_shift_apply(&z, &v, None, &1e-12).unwrap();
        let (kept, total) = (out.coeffs.norm_sqr(), v.norm_sqr());
        worst = worst.max((kept + out.tail_norm_sqr - total).abs() / total);
        bracketed &= kept <= total * (1.0 + 1e-12);
    }
    verdict(
        worst < 1e-12 && bracketed,
        format!("max relative |(|Bv|^2 + certified tail) - |v|^2| = {worst:.2e} (< 1e-12) over 100 (z, v)"),
    )
}

fn criterion_6() -> Verdict {
    let c = ctx();
    let x = |s: f64| LogMonomialSum::monomial(Exponent::real(s, &c).unwrap());
    let poly = |v: &[f64]| Poly::new(v.iter().map(|&a| C::from(a)).collect());
    let mut notes = Vec::new();
    let mut pass = true;

    let s1 = ExponentMultiset::from_reals(&[1.0], &c).unwrap();
    let r = approximate(&SubspaceSpec::Monomial(s1), &[1], &[], &c).unwrap();
    match &r.entries[0] {
        Ok(rec) => {
            let want = RationalFn::new(poly(&[1.0, -1.0]), poly(&[2.0, 1.0])).unwrap();
            let dc = (rec.scaling.c_n - 1.0).abs();
            let da = coeff_distance(&rec.alpha, &want);
            let ex = rec.exponents.entries();
            let de = if ex.len() == 1 && ex[0].1 == 1 { (ex[0].0.value() - C::from(1.0)).norm() } else { f64::INFINITY };
            let u = x(0.0).scale(&C::from(2.0)).sub(&x(1.0).scale(&C::from(3.0)), &c);
            let du = norm_sqr(&rec.u_n.sub(&u, &c)).sqrt();
            pass &= dc < 1e-9 && da < 1e-9 && de < 1e-8 && du < 1e-8;
            notes.push(format!("{{1}}: |C_1-1| = {dc:.1e}, alpha {da:.1e}, exponent {de:.1e}, u_1 {du:.1e}"));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("{{1}}: {e}"));
        }
    }

    let s0 = ExponentMultiset::from_reals(&[0.0], &c).unwrap();
    let r = approximate(&SubspaceSpec::Monomial(s0), &[1], &[], &c).unwrap();
    match &r.entries[0] {
        Ok(rec) => {
            let want = RationalFn::new(poly(&[0.0, 1.0]), poly(&[1.0, 1.0])).unwrap();
            let dc = (rec.scaling.c_n - 1.0).abs();
            let da = coeff_distance(&rec.alpha, &want);
            let double_pole = rec.partial_fractions.poles.len() == 1 && rec.partial_fractions.poles[0].multiplicity() == 2;
            let ex = rec.exponents.entries();
            let ex_ok = ex.len() == 1 && ex[0].1 == 1 && ex[0].0.is_zero();
            let u = x(0.0).add(&LogMonomialSum::term(C::from(1.0), Exponent::zero(), 1), &c);
            let du = norm_sqr(&rec.u_n.sub(&u, &c)).sqrt();
            pass &= dc < 1e-9 && da < 1e-9 && double_pole && ex_ok && du < 1e-8;
            notes.push(format!("{{0}}: |C_1-1| = {dc:.1e}, alpha {da:.1e}, double pole {double_pole}, Mult_1 = {{0}} {ex_ok}, u_1 {du:.1e}"));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("{{0}}: {e}"));
        }
    }
    verdict(pass, notes.join("; "))
}

fn criterion_7() -> Verdict {
    let c = Context::<Mp128>::default();
    let mut r = rng(7);
    let (mut worst_c, mut worst_e) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for trial in 0..20 {
        let d = r.gen_range(1..=4);
        let mut exps: Vec<f64> = (0..d).map(|_| r.gen_range(-0.4..3.0)).collect();
        exps.sort_by(f64::total_cmp);
        let v: Vec<Mp128> = exps.iter().map(|&e| Mp128::val(e)).collect();
        let space = ExponentMultiset::from_reals(&v, &c).unwrap();
        let rep = approximate(&SubspaceSpec::Monomial(space), &[d], &[], &c).unwrap();
        match &rep.entries[0] {
            Ok(rec) if rec.exponents.dim() == d => {
                worst_c = worst_c.max((rec.scaling.c_n.as_f64() - 1.0).abs());
                for ((a, _), e) in rec.exponents.entries().iter().zip(&exps) {
                    worst_e = worst_e.max(cabs(&(a.value().clone() - C::from(Mp128::val(*e)))).as_f64());
                }
            }
            Ok(rec) => failures.push(format!("trial {trial}: {} exponents for dimension {d}", rec.exponents.dim())),
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    let pass = failures.is_empty() && worst_c < 1e-6 && worst_e < 1e-5;
    let mut detail = format!("20 specs at 128 bits: max |C_N - 1| = {worst_c:.1e} (< 1e-6), max exponent error = {worst_e:.1e} (< 1e-5)");
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join(", ")));
    }
    verdict(pass, detail)
}

fn criterion_8() -> Verdict {
    let c = Context::<Mp256>::default();
    let a = Mp256::int(1) / Mp256::int(4);
    let chi = Target::indicator(a.clone());
    let ns: Vec<usize> = (2..=12).collect();
    let rep = approximate(&SubspaceSpec::Truncation(a), &ns, &[chi], &c).unwrap();
    let recs: Vec<_> = rep.records().collect();
    if recs.len() != ns.len() {
        let errs: Vec<String> = rep.entries.iter().filter_map(|e| e.as_ref().err().map(|e| e.to_string())).collect();
        return verdict(false, format!("pipeline failures: {}", errs.join("; ")));
    }
    let cs: Vec<Mp256> = recs.iter().map(|r| r.scaling.c_n.clone()).collect();
    let tol = Mp256::val(1e-30);
    let monotone = cs.windows(2).all(|w| w[1] <= w[0].clone() + tol.clone());
    let one = Mp256::one();
    let shrinks = cs[10].clone() - one.clone() < cs[0].clone() - one;
    let d2 = recs[0].distances[0].as_ref().unwrap().as_f64();
    let d12 = recs[10].distances[0].as_ref().unwrap().as_f64();
    let resid = recs.iter().map(|r| r.alpha_residual.as_f64()).fold(0.0, f64::max);
    verdict(
        monotone && shrinks && d12 < 0.5 * d2 && resid < 1e-10,
        format!(
            "C_2 - 1 = {:.3e}, C_12 - 1 = {:.3e}, nonincreasing {monotone}; dist N=2 {d2:.4}, N=12 {d12:.4} (ratio {:.3} < 0.5); max alpha residual {resid:.1e} (< 1e-10)",
            (cs[0].clone() - Mp256::one()).as_f64(),
            (cs[10].clone() - Mp256::one()).as_f64(),
            d12 / d2
        ),
    )
}

/// Least-squares slope of log d against log h.
fn fitted_slope(rows: &[(f64, f64)]) -> f64 {
    let n = rows.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows.iter().map(|(h, d)| (h.ln(), d.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn criterion_9() -> Verdict {
    let c = Context::<Mp128>::default();
    let hs = [0.1, 0.05, 0.025];
    let s = Exponent::zero();
    let mut pass = true;
    let mut notes = Vec::new();
    for m in [2usize, 3] {
        let spaces: Vec<_> = hs.iter().map(|&h| roots_of_unity_space(&s, m, &Mp128::val(h), &c).unwrap()).collect();
        for n in 0..m as u32 {
            let f = Target::Sum(LogMonomialSum::term(C::from(Mp128::one()), s.clone(), n));
            let rows: Vec<(f64, f64)> =
                hs.iter().zip(&spaces).map(|(&h, sp)| (h, dist_to_target(&f, sp, &c).unwrap().as_f64())).collect();
            let slope = fitted_slope(&rows);
            pass &= slope >= m as f64 - 0.2;
            notes.push(format!("m={m} n={n} slope {slope:.3}"));
        }
        let limit = ExponentMultiset::new(vec![(s.clone(), m)], &c);
        let rows: Vec<(f64, f64)> =
            hs.iter().zip(&spaces).map(|(&h, sp)| (h, subspace_gap(sp, &limit, &c).unwrap().as_f64())).collect();
        let slope = fitted_slope(&rows);
        pass &= slope >= 0.9;
        notes.push(format!("m={m} reverse slope {slope:.3}"));
    }
    verdict(pass, format!("{} (forward >= m - 0.2, reverse >= 0.9)", notes.join(", ")))
}

fn criterion_10() -> Verdict {
    // Random 5-point Gram matrices reach condition numbers near 1e8, so the
    // LU reference runs at 128 bits; double LU is reported alongside.
    let c = Context::<Mp128>::default();
    let cd = ctx();
    let mut r = rng(10);
    let (mut worst, mut worst_double) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let pts: Vec<(f64, f64)> = (0..5).map(|_| (r.gen_range(-0.4..3.0), r.gen_range(-3.0..3.0))).collect();
        let mp = pts.iter().map(|&(a, b)| (Exponent::new(C::new(Mp128::val(a), Mp128::val(b)), &c).unwrap(), 1)).collect();
        let space = ExponentMultiset::new(mp, &c);
        let closed = cauchy_det(&space).unwrap();
        let lu = Lu::factor(&gram(&space)).det();
        worst = worst.max((cabs(&(lu - C::from(closed.clone()))) / closed.abs()).as_f64());
        let dp = pts.iter().map(|&(a, b)| (Exponent::new(C::new(a, b), &cd).unwrap(), 1)).collect();
        let space = ExponentMultiset::new(dp, &cd);
        let closed = cauchy_det(&space).unwrap();
        worst_double = worst_double.max((Lu::factor(&gram(&space)).det() - C::from(closed)).norm() / closed.abs());
    }
    verdict(
        worst < 1e-10,
        format!("max relative |det_LU - det_Cauchy| = {worst:.2e} (< 1e-10) over 50 sets at 128 bits; double LU {worst_double:.2e}"),
    )
}

fn criterion_11() -> Verdict {
    let c = ctx();
    let terms = 100_000;
    let linear: Vec<_> = (1..=terms).map(|k| Exponent::real(k as f64, &c).unwrap()).collect();
    let sums = muntz_partial_sums(&linear, terms);
    let crossing = sums.iter().position(|&v| v > 10.0);
    let square: Vec<_> = (1..=5000u64).map(|k| Exponent::real((k * k) as f64, &c).unwrap()).collect();
    let sq = muntz_partial_sums(&square, square.len());
    let max_inc = sq.windows(2).skip(999).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let pass = crossing.is_some() && max_inc < 1e-3;
    verdict(
        pass,
        format!(
            "s_k = k exceeds 10 at term {} of {terms}; s_k = k^2 largest increment beyond term 1000 = {max_inc:.2e} (< 1e-3)",
            crossing.map_or("none".to_string(), |k| (k + 1).to_string())
        ),
    )
}

fn criterion_12() -> Verdict {
    let c = ctx();
    let mut r = rng(12);
    let mut worst_min = f64::INFINITY;
    let mut all_fail = true;
    for _ in 0..50 {
        let n = r.gen_range(2..=8);
        let pts: Vec<_> = (0..n)
            .map(|_| Exponent::new(C::new(r.gen_range(-0.45..5.0), r.gen_range(-5.0..5.0)), &c).unwrap())
            .collect();
        let contractive = pts.iter().map(|s| (C::from(1.0) - s.value()) / (C::from(2.0) + s.value())).collect();
        let p = pick_matrix(&PickSystem::new(pts.clone(), contractive, 1.0).unwrap());
        worst_min = worst_min.min(is_psd(&p, &c.psd_tol(p.dim(), &p.max_abs1())).min_eig);
        let big = vec![C::from(2.0); n];
        let q = pick_matrix(&PickSystem::new(pts, big, 1.0).unwrap());
        all_fail &= !is_psd(&q, &c.psd_tol(q.dim(), &q.max_abs1())).psd;
    }
    verdict(
        worst_min >= -1e-10 && all_fail,
        format!("(1-s)/(s+2): min eigenvalue {worst_min:.2e} (>= -1e-10); alpha = 2 rejected on all 50 sets: {all_fail}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 12] = [
        ("Laguerre orthonormality", Duration::from_secs(1), criterion_1),
        ("norm identity", Duration::from_secs(5), criterion_2),
        ("operator closed forms vs oracle", Duration::from_secs(30), criterion_3),
        ("resolvent identity", Duration::from_secs(1), criterion_4),
        ("Blaschke isometry", Duration::from_secs(10), criterion_5),
        ("pipeline worked threads", Duration::from_secs(1), criterion_6),
        ("randomized finite recovery", Duration::from_secs(120), criterion_7),
        ("truncation-subspace convergence", Duration::from_secs(300), criterion_8),
        ("roots-of-unity rates", Duration::from_secs(30), criterion_9),
        ("Cauchy determinant", Duration::from_secs(5), criterion_10),
        ("Muntz partial sums", Duration::from_secs(1), criterion_11),
        ("Pick positivity", Duration::from_secs(5), criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let ok = v.pass && took < *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<33} {}  {} [{:.2} s, limit {} s]",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
