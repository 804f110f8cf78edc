//! One PASS/FAIL line per acceptance criterion. Exits nonzero when any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

use trace_poisson::basis::ab_products;
use trace_poisson::catalog::{check_leading, fitting_points};
use trace_poisson::coeff::CoefficientQn;
use trace_poisson::flows::{
    apply_family, certify_symplectic, family_hamiltonian, max_entry_difference, ode_flow, Certified, FamilyId,
    FlowFamily, FlowTolerances,
};
use trace_poisson::generation::chains::replay_lemma_chain;
use trace_poisson::generation::closure::{build_closure, standard_generators, ClosureConfig};
use trace_poisson::generation::membership::MembershipContext;
use trace_poisson::generation::model::{
    model_bracket, model_generation, standard_model_generators, ExponentBox, LaurentPoly2, ModelSpace,
};
use trace_poisson::generation::product::{product_bracket, ProductPoly, Tagged};
use trace_poisson::numeric::cm::{normal_form, sample_many, trace_residual, SamplerConfig, DEFAULT_LAMBDA};
use trace_poisson::numeric::eval::{bracket_scale, evaluate, gradient_at, numeric_bracket};
use trace_poisson::numeric::linalg::CMatrix;
use trace_poisson::poisson::{bracket, bracket_traceless};
use trace_poisson::reduce::cayley_hamilton_reduce;
use trace_poisson::{Letter, Mode, TracePolynomial, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn t(a: u32, b: u32) -> TracePolynomial {
    TracePolynomial::trace_ab(Mode::Traceless, a, b)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

/// Exact bracket identities with every expected value written out from
/// its closed form.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut expect = |lhs: &TracePolynomial, rhs: &TracePolynomial, want: TracePolynomial, id: String| {
        count += 1;
        let got = bracket(lhs, rhs).map_err(|e| format!("{id}: {e}"))?;
        check(got == want, || format!("{id}: got {got}, want {want}"))
    };
    for j in 1..=5u32 {
        for q in 1..=5u32 {
            let jq = i64::from(j * q);
            let lead = t(j - 1, q - 1).scale_int(jq);
            let corr = (&t(j - 1, 0) * &t(0, q - 1))
                .scale(&CoefficientQn::monomial(BigRational::from_integer(BigInt::from(-jq)), -1));
            expect(&t(j, 0), &t(0, q), &lead + &corr, format!("AjBk j={j} q={q}"))?;
        }
    }
    for j in 0..=5u32 {
        for k in 0..=5u32 {
            if j + k == 0 {
                continue;
            }
            let want = t(j, k).scale_int(i64::from(j) - i64::from(k));
            expect(&t(j, k), &t(1, 1), want, format!("ABweight j={j} k={k}"))?;
        }
    }
    for j in 1..=5u32 {
        expect(&t(j, 0), &t(0, 2), t(j - 1, 1).scale_int(2 * i64::from(j)), format!("trAjB j={j}"))?;
    }
    for j in 1..=5u32 {
        for k in 1..=5u32 {
            expect(&t(j, 0), &t(k, 0), TracePolynomial::zero(Mode::Traceless), format!("commute A j={j} k={k}"))?;
            expect(&t(0, j), &t(0, k), TracePolynomial::zero(Mode::Traceless), format!("commute B j={j} k={k}"))?;
        }
    }
    for letter in [Letter::First, Letter::Second] {
        let central = TracePolynomial::trace(Mode::Plain, &Word::power(letter, 1));
        for j in 0..=5u32 {
            for k in 0..=5u32 {
                if j + k == 0 {
                    continue;
                }
                let f = t(j, k).to_plain().map_err(|e| e.to_string())?;
                expect(
                    &central,
                    &f,
                    TracePolynomial::zero(Mode::Plain),
                    format!("poissonCommute {letter:?} j={j} k={k}"),
                )?;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{count} identities exact in {elapsed:.2?}"))
}

/// `(jq-kp) tr A^{j+p-1}B^{k+q-1} - (1/n)(jq trA^{j-1}B^k trA^pB^{q-1} - kp trA^jB^{k-1} trA^{p-1}B^q)`.
fn leading_oracle(j: u32, k: u32, p: u32, q: u32) -> TracePolynomial {
    let (ji, ki, pi, qi) = (i64::from(j), i64::from(k), i64::from(p), i64::from(q));
    let mut out = TracePolynomial::zero(Mode::Traceless);
    let top = ji * qi - ki * pi;
    if top != 0 {
        out = &out + &t(j + p - 1, k + q - 1).scale_int(top);
    }
    let inv_n = |v: i64| CoefficientQn::monomial(BigRational::from_integer(BigInt::from(v)), -1);
    if j > 0 && q > 0 {
        out = &out + &(&t(j - 1, k) * &t(p, q - 1)).scale(&inv_n(-ji * qi));
    }
    if k > 0 && p > 0 {
        out = &out + &(&t(j, k - 1) * &t(p - 1, q)).scale(&inv_n(ki * pi));
    }
    out
}

fn criterion_2() -> Outcome {
    let point_sets = vec![
        fitting_points(2, 100, 2).map_err(|e| e.to_string())?,
        fitting_points(3, 100, 3).map_err(|e| e.to_string())?,
    ];
    let mut count = 0;
    let mut worst = 0.0f64;
    for j in 0..=10u32 {
        for k in 0..=10 - j {
            for p in 0..=10 - j - k {
                for q in 0..=10 - j - k - p {
                    if j + k == 0 || p + q == 0 {
                        continue;
                    }
                    let s = i64::from(j + k + p + q);
                    let actual = bracket_traceless(&t(j, k), &t(p, q)).map_err(|e| e.to_string())?;
                    let want = leading_oracle(j, k, p, q);
                    let c = check_leading(&actual, &want, s - 6, &point_sets).map_err(|e| e.to_string())?;
                    check(c.leading_difference.is_zero(), || {
                        format!("({j},{k},{p},{q}): leading difference {}", c.leading_difference)
                    })?;
                    check(c.max_residual() < 1e-8, || {
                        format!("({j},{k},{p},{q}): tail residual {:.3e}", c.max_residual())
                    })?;
                    worst = worst.max(c.max_residual());
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} tuples, 100 points at n=2,3, worst tail residual {worst:.2e}"))
}

fn generate<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).expect("strategy generates").current()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let strategy = common::poly(Mode::Traceless, 3, 2, 5, 5);
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let n = 2 + (i % 3) as usize;
        let f = generate(&mut runner, &strategy);
        let g = generate(&mut runner, &strategy);
        let pt = sample_many(n, true, 1000 + i, 1, &SamplerConfig::default()).map_err(|e| e.to_string())?.remove(0);
        let exact = evaluate(&bracket(&f, &g).map_err(|e| e.to_string())?, &pt, n).map_err(|e| e.to_string())?;
        let numeric = numeric_bracket(&f, &g, &pt).map_err(|e| e.to_string())?;
        let rel = (exact - numeric).norm() / bracket_scale(&f, &g, &pt).max(numeric.norm()).max(1.0);
        check(rel < 1e-9, || format!("triple {i} (n={n}): {f} | {g}: relative error {rel:.2e}"))?;
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("200 triples, worst relative error {worst:.2e} in {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let mut worst_rank = 0.0f64;
    let mut worst_trace = 0.0f64;
    for n in 1..=4 {
        for traceless in [false, true] {
            let pts =
                sample_many(n, traceless, 40 + n as u64, 1000, &SamplerConfig::default()).map_err(|e| e.to_string())?;
            check(pts.len() == 1000, || format!("n={n}: {} points", pts.len()))?;
            for (i, pt) in pts.iter().enumerate() {
                check(pt.rank_residual < 1e-10, || format!("n={n} point {i}: rank residual {:.2e}", pt.rank_residual))?;
                worst_rank = worst_rank.max(pt.rank_residual);
                if traceless {
                    let tr = trace_residual(&pt.pair);
                    check(tr < 1e-10, || format!("n={n} point {i}: trace residual {tr:.2e}"))?;
                    worst_trace = worst_trace.max(tr);
                }
            }
        }
    }
    let c = |re, im| Complex64::new(re, im);
    let pair =
        normal_form(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(0.0, 0.0); 2], DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
    let m = pair.commutator() - CMatrix::identity(2, 2) * c(0.0, 1.0);
    let want = CMatrix::from_row_slice(2, 2, &[c(0.0, -1.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, -1.0)]);
    check(m == want, || format!("n=2 example gave {m}"))?;
    Ok(format!(
        "8000 points, worst rank residual {worst_rank:.2e}, worst trace residual {worst_trace:.2e}, n=2 example exact"
    ))
}

fn criterion_5() -> Outcome {
    let times = [c64(0.1, 0.0), c64(1.0, 0.0), c64(1.0, 1.0), c64(10.0, 0.0)];
    let tol = FlowTolerances { symplectic: 1e-7, rank: 1e-9, trace: 1e-10 };
    let mut records = 0;
    let mut worst_ode = 0.0f64;
    for n in [2usize, 3] {
        let pts = sample_many(n, true, 500 + n as u64, 5, &SamplerConfig::flow()).map_err(|e| e.to_string())?;
        for id in FamilyId::ALL {
            let h = family_hamiltonian(id);
            for &time in &times {
                let fam = FlowFamily::new(id, time);
                for r in certify_symplectic(&Certified::Family(fam), &pts, tol) {
                    check(r.passed, || format!("{id} t={time} n={n}: {r:?}"))?;
                    records += 1;
                }
                for pt in &pts {
                    let exact = apply_family(fam, pt).map_err(|e| e.to_string())?;
                    let flowed = ode_flow(&h, pt, time, 400).map_err(|e| e.to_string())?;
                    let scale = exact.pair.x.norm().max(exact.pair.y.norm()).max(1.0);
                    let err = max_entry_difference(&flowed.pair, &exact.pair) / scale;
                    check(err < 1e-8, || format!("{id} t={time} n={n}: ODE differs by {err:.2e} (relative)"))?;
                    worst_ode = worst_ode.max(err);
                }
            }
        }
    }
    Ok(format!("{records} flow records certified, worst ODE difference {worst_ode:.2e}"))
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (n, max_degree) in [(2usize, 6u32), (3, 8)] {
        let cfg = ClosureConfig::new(n);
        let basis = build_closure(&standard_generators(), &cfg).map_err(|e| e.to_string())?;
        let ctx = MembershipContext::new(&basis, None, 7).map_err(|e| e.to_string())?;
        let targets = ab_products(max_degree);
        let mut worst = 0.0f64;
        for target in &targets {
            let cert = ctx.check(target).map_err(|e| e.to_string())?;
            check(cert.is_valid() && cert.residual < 1e-8, || {
                format!("n={n}: {target}: {:?} residual {:.2e} ({})", cert.status, cert.residual, cert.message)
            })?;
            worst = worst.max(cert.residual);
        }
        parts.push(format!(
            "n={n}: {} products certified by {} elements at depth {}, worst residual {worst:.1e}",
            targets.len(),
            basis.len(),
            cfg.depth_cap
        ));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!("{} in {elapsed:.1?}", parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    for id in ["trAj&trBk", "pullingright"] {
        let r = replay_lemma_chain(id).map_err(|e| e.to_string())?;
        check(r.passed, || format!("{id} failed at step {:?}", r.first_failure))?;
        parts.push(format!("{id}: {} steps", r.steps.len()));
    }
    Ok(parts.join(", "))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for (space, target) in [
        (ModelSpace::Plane, ExponentBox::degree(8)),
        (ModelSpace::Cylinder, ExponentBox::rect((0, 4), (-4, 4))),
        (ModelSpace::Torus, ExponentBox::rect((-4, 4), (-4, 4))),
    ] {
        let gens = standard_model_generators(space, &target);
        let r = model_generation(space, &gens, &target, 8).map_err(|e| e.to_string())?;
        check(r.passed, || format!("{space}: missing {:?}", r.missing))?;
        parts.push(format!("{space} {}/{}", r.reached, r.targets));
    }

    let one = |s: ModelSpace| LaurentPoly2::one(s);
    let mono =
        |s: ModelSpace, a: i32, b: i32| LaurentPoly2::monomial(s, a, b, BigRational::from_integer(1.into())).unwrap();
    let (l, r) = (ModelSpace::Torus, ModelSpace::Cylinder);
    let mut pairs = 0;
    for a in -2..=2 {
        for b in -2..=2 {
            for c in 0..=2 {
                for d in -2..=2 {
                    let f = mono(l, a, b).checked_add(&mono(l, b, a)).unwrap();
                    let g = mono(r, c, d).checked_add(&mono(r, 0, 1)).unwrap();
                    let cross =
                        product_bracket(&Tagged::Left(f.clone()), &Tagged::Right(g.clone()), &one(l), &one(r)).unwrap();
                    check(cross.is_zero(), || format!("cross bracket of {f} and {g} is {cross}"))?;
                    let same = product_bracket::<LaurentPoly2, LaurentPoly2>(
                        &Tagged::Left(f.clone()),
                        &Tagged::Left(mono(l, d, c)),
                        &one(l),
                        &one(r),
                    )
                    .unwrap();
                    let own = ProductPoly::from_left(&model_bracket(&f, &mono(l, d, c)).unwrap(), &one(r)).unwrap();
                    check(same == own, || format!("left bracket of {f} differs from the factor bracket"))?;
                    let fl = ProductPoly::from_left(&f, &one(r)).unwrap();
                    let gr = ProductPoly::from_right(&one(l), &g).unwrap();
                    check(polarizes(&fl, &gr), || format!("polarization fails for {f}, {g}"))?;
                    pairs += 1;
                }
            }
        }
    }
    let words = [t(2, 1), &t(1, 1) * &t(0, 2), t(3, 0), &t(2, 2) + &t(1, 0)];
    for f in &words {
        {
            let left = f.to_plain().unwrap();
            let fl = ProductPoly::from_left(f, &left).unwrap();
            let gr = ProductPoly::from_right(f, &left).unwrap();
            let cross = product_bracket(&Tagged::Left(f.clone()), &Tagged::Right(left.clone()), f, &left).unwrap();
            check(cross.is_zero(), || format!("cross bracket of {f} and {left} is {cross}"))?;
            check(polarizes(&fl, &gr), || format!("polarization fails for {f} on the matrix product"))?;
            pairs += 1;
        }
    }
    parts.push(format!("product: {pairs} cross-zero and polarization identities exact"));
    Ok(parts.join(", "))
}

fn polarizes<L, R>(f: &ProductPoly<L, R>, g: &ProductPoly<L, R>) -> bool
where
    L: trace_poisson::generation::product::Factor,
    R: trace_poisson::generation::product::Factor,
{
    let lhs = f.mul(g).unwrap().scale_int(2);
    let rhs = f.add(g).pow(2).unwrap().sub(&f.pow(2).unwrap()).sub(&g.pow(2).unwrap());
    lhs == rhs
}

fn run_cases<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), String>,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, |v| test(v).map_err(proptest::test_runner::TestCaseError::fail)).map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    use proptest::prelude::*;
    let triple = |d: u32| {
        common::any_mode().prop_flat_map(move |m| {
            let p = move || common::poly(m, 2, 2, 3, d);
            (p(), p(), p())
        })
    };
    let br = |f: &TracePolynomial, g: &TracePolynomial| bracket(f, g).unwrap();
    run_cases(500, triple(5), |(f, g, _)| check((&br(&f, &g) + &br(&g, &f)).is_zero(), || "antisymmetry".into()))?;
    run_cases(500, triple(4), |(f, g, h)| {
        let lhs = br(&f, &(&g * &h));
        let rhs = &(&br(&f, &g) * &h) + &(&g * &br(&f, &h));
        check(lhs == rhs, || "Leibniz".into())
    })?;
    run_cases(500, triple(5), |(f, g, h)| {
        let sum = &(&br(&f, &br(&g, &h)) + &br(&g, &br(&h, &f))) + &br(&h, &br(&f, &g));
        check(sum.is_zero(), || format!("Jacobi sum {sum}"))
    })?;
    let plain_or_traceless = common::any_mode().prop_flat_map(|m| common::poly(m, 3, 2, 5, 8));
    run_cases(100, (plain_or_traceless, 1usize..=4, any::<u64>()), |(p, n, seed)| {
        let r = cayley_hamilton_reduce(&p, n as u32).map_err(|e| e.to_string())?;
        let pair = common::random_pair(n, seed);
        let scale = common::term_scale(&p, &pair);
        let diff = (trace_poisson::numeric::eval::evaluate_pair(&p, &pair)
            - trace_poisson::numeric::eval::evaluate_pair(&r, &pair))
        .norm();
        check(diff <= 1e-10 * scale, || format!("CH reduction at n={n} moved {p} by {diff:.2e}"))
    })?;
    let small = common::any_mode().prop_flat_map(|m| common::poly(m, 3, 2, 3, 5));
    run_cases(100, (small, 2usize..=4, any::<u64>()), |(p, n, seed)| {
        let pair = common::random_pair(n, seed);
        let (gx, gy) = gradient_at(&p, &pair);
        let (fx, fy) = common::fd_gradient(&p, &pair, 1e-5);
        let scale = gx.norm().max(gy.norm()).max(1.0);
        let err = (gx - fx).norm().max((gy - fy).norm()) / scale;
        check(err <= 1e-6, || format!("gradient of {p} off by {err:.2e}"))
    })?;
    Ok("500 antisymmetry, 500 Leibniz, 500 Jacobi, 100 CH, 100 gradient cases".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact bracket catalog", criterion_1),
        ("leading-term law", criterion_2),
        ("symbolic vs numeric bracket", criterion_3),
        ("Calogero-Moser sampler", criterion_4),
        ("symplectic flows", criterion_5),
        ("closure membership", criterion_6),
        ("lemma chain replays", criterion_7),
        ("model spaces and products", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
