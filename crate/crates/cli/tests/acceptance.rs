//! Exit criteria. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::{LN_2, PI};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylres_core::charlier::{charlier_rodrigues_oracle, charlier_sum, charlier_symbolic};
use weylres_core::coefficients::{
    calibrate, model_residue, newton_oracle, residue_extract, synthesize,
};
use weylres_core::liouville::{
    classical_liouville_verdict, delta_liouville_verdict, exp_type_estimate, q_liouville_verdict, LiouvilleParams,
    Verdict,
};
use weylres_core::quadrature::barnes_residue;
use weylres_core::{
    parse_weyl_expr, AlgebraParams, AnalyticFunction, Circle, ContourSpec, Function, ModelSemantics, NewtonOptions,
    VerticalLine, WeightSign, WeylElement, C64,
};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

const LAMBDAS: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.5, 0.0),
    C64::new(2.0, 0.0),
    C64::new(0.3, 0.1),
];

fn random_element(rng: &mut ChaCha8Rng, min_x: i64, max_deg: i64) -> WeylElement {
    let n = rng.gen_range(1..=3);
    WeylElement::from_terms((0..n).map(|_| {
        (
            (rng.gen_range(min_x..=max_deg), rng.gen_range(0..=max_deg as u32)),
            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        )
    }))
}

fn within(a: &WeylElement, b: &WeylElement, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol * a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0)
}

fn algebra_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let p = AlgebraParams::new(LAMBDAS[i % 4]).unwrap();
        let (a, b, cc) = (
            random_element(&mut rng, 0, 4),
            random_element(&mut rng, 0, 4),
            random_element(&mut rng, 0, 4),
        );
        let assoc = (p.multiply(&p.multiply(&a, &b), &cc), p.multiply(&a, &p.multiply(&b, &cc)));
        let left_dist = (p.multiply(&a, &(&b + &cc)), p.multiply(&a, &b) + p.multiply(&a, &cc));
        let right_dist = (p.multiply(&(&a + &b), &cc), p.multiply(&a, &cc) + p.multiply(&b, &cc));
        for (l, r) in [assoc, left_dist, right_dist] {
            worst = worst.max(l.max_abs_diff(&r) / l.max_abs_coeff().max(r.max_abs_coeff()).max(1.0));
            check(within(&l, &r, 1e-12), format!("triple {i}: difference {:e}", l.max_abs_diff(&r)))?;
        }
    }
    for l in LAMBDAS {
        let p = AlgebraParams::new(l).unwrap();
        let rel = p.multiply(&WeylElement::d(), &WeylElement::x())
            - p.multiply(&WeylElement::x(), &WeylElement::d()).scale(l);
        check(rel == WeylElement::one(), format!("d*X - lambda*X*d = {rel} for lambda = {l}"))?;
        for m in -5i64..=5 {
            let red = p.multiply(&WeylElement::d(), &WeylElement::x_pow(m)).reduce_mod_ideal();
            let want = if l == c(1.0, 0.0) {
                c(m as f64, 0.0)
            } else {
                (l.powi(m as i32) - 1.0) / (l - 1.0)
            };
            let got = red.coeff(m - 1);
            check(
                (got - want).norm() <= 1e-12 * want.norm().max(1.0),
                format!("dX^{m} mod ideal: {got} vs {want} (lambda {l})"),
            )?;
            let extra = red.terms().filter(|&(k, _)| k != m - 1).count();
            check(extra == 0, format!("dX^{m} mod ideal has stray terms"))?;
        }
    }
    Ok(format!("200 triples, worst relative difference {worst:.1e}; relation exact; m in [-5,5]"))
}

fn all_semantics() -> Vec<ModelSemantics> {
    vec![
        ModelSemantics::classical(),
        ModelSemantics::forward_difference(),
        ModelSemantics::jackson_a(c(0.5, 0.0)).unwrap(),
        ModelSemantics::jackson_b(c(0.5, 0.0)).unwrap(),
    ]
}

fn homomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f: Function = weylres_core::parse_function("exp(t/3) + t^2 - (0.5+1i)").unwrap().into();
    let points: Vec<C64> = (0..20)
        .map(|_| c(rng.gen_range(0.5..2.0), rng.gen_range(0.3..1.0)))
        .collect();
    let mut worst: f64 = 0.0;
    for s in all_semantics() {
        let alg = s.algebra();
        for pair in 0..50 {
            let a = random_element(&mut rng, -1, 2);
            let b = random_element(&mut rng, -1, 2);
            let whole = s.interpret(&alg.multiply(&a, &b), &f).map_err(|e| e.to_string())?;
            let inner = s.interpret(&b, &f).map_err(|e| e.to_string())?;
            let nested = s.interpret(&a, &inner).map_err(|e| e.to_string())?;
            for &t in &points {
                let l = whole.eval(t).map_err(|e| e.to_string())?;
                let r = nested.eval(t).map_err(|e| e.to_string())?;
                let scale = l.norm().max(r.norm());
                let rel = if scale == 0.0 { 0.0 } else { (l - r).norm() / scale };
                worst = worst.max(rel);
                check(rel <= 1e-9, format!("{} pair {pair} at {t}: {l} vs {r}", s.kind()))?;
            }
        }
    }
    Ok(format!("4 models x 50 pairs x 20 points, worst relative error {worst:.1e}"))
}

fn newton_oracle_check() -> Outcome {
    let sq: Function = AnalyticFunction::var().powi(2).into();
    let a = newton_oracle(&sq, 2, NewtonOptions::default()).map_err(|e| e.to_string())?;
    check(
        a.values == vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        format!("t^2 gave {:?}", a.values),
    )?;
    let two: Function = AnalyticFunction::const_pow(c(2.0, 0.0)).into();
    let a = newton_oracle(&two, 10, NewtonOptions::default()).map_err(|e| e.to_string())?;
    for k in 0..=10 {
        check(
            (a.values[k] - 1.0 / factorial(k)).norm() <= 1e-10,
            format!("2^t: a_{k} = {}", a.values[k]),
        )?;
    }
    let a = newton_oracle(&two, 29, NewtonOptions::uncapped()).map_err(|e| e.to_string())?;
    let syn = synthesize(&ModelSemantics::forward_difference(), &a.values);
    let mut worst = (0.0, c(0.0, 0.0));
    for i in 0..=20 {
        for j in 0..=8 {
            let t = c(0.25 * i as f64, -1.0 + 0.25 * j as f64);
            let err = (syn.eval(t).map_err(|e| e.to_string())? - two.eval(t).unwrap()).norm();
            if err > worst.0 {
                worst = (err, t);
            }
        }
    }
    check(
        worst.0 <= 1e-6,
        format!("30-term synthesis of 2^t off by {:.3e} at t = {}", worst.0, worst.1),
    )?;
    Ok(format!("t^2 exact; 2^t a_k within 1e-10; synthesis error {:.1e}", worst.0))
}

/// `K₀(1) = ∫_0^∞ e^{−cosh u} du`.
fn bessel_k0_at_one() -> f64 {
    let h = 1e-3;
    let n = 8000;
    (0..=n)
        .map(|j| if j == 0 || j == n { 0.5 } else { 1.0 } * (-(j as f64 * h).cosh()).exp())
        .sum::<f64>()
        * h
}

fn barnes_engine() -> Outcome {
    let want = c(0.0, bessel_k0_at_one() / PI);
    let one = Function::constant(c(1.0, 0.0));
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.05, 0.1, 0.15] {
        let line = VerticalLine::new(a, WeightSign::Plus).map_err(|e| e.to_string())?;
        let r = barnes_residue(&one, &line).map_err(|e| e.to_string())?;
        worst = worst.max((r.value - want).norm());
        check((r.value - want).norm() <= 1e-8, format!("a = {a}: {} vs {want}", r.value))?;
    }
    let line = VerticalLine::new(0.0, WeightSign::Plus).unwrap();
    let shifted = line.shifted(1.0).unwrap();
    let g: Function = weylres_core::parse_function("exp(t/2) * (t^2 + 1)").unwrap().into();
    let gg = g.clone();
    let dg = Function::from_fn(move |t| Ok(gg.eval(t + 1.0)? - gg.eval(t)?));
    let lhs = barnes_residue(&dg, &line).map_err(|e| e.to_string())?.value;
    let rhs = barnes_residue(&g, &shifted).map_err(|e| e.to_string())?.value
        - barnes_residue(&g, &line).map_err(|e| e.to_string())?.value;
    check((lhs - rhs).norm() <= 1e-8, format!("telescoping: {lhs} vs {rhs}"))?;
    Ok(format!("Res(1) = {:.9}i, band spread {worst:.1e}, telescoping {:.1e}", want.im, (lhs - rhs).norm()))
}

fn q_residue_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = ModelSemantics::jackson_a(c(0.5, 0.0)).unwrap();
    let spec = ContourSpec::Circle(Circle::new(2.0, 512).unwrap());
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let terms: Vec<(i32, C64)> = (0..rng.gen_range(1..=5))
            .map(|_| (rng.gen_range(-4..=4), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let g = Function::from_fn(move |t| Ok(terms.iter().map(|&(m, a)| a * t.powi(m)).sum()));
        let dg = s.act_d(&g).map_err(|e| e.to_string())?;
        let r = model_residue(&s, &dg, &spec).map_err(|e| e.to_string())?.value.norm();
        worst = worst.max(r);
        check(r <= 1e-10, format!("Laurent polynomial {i}: |Res(Dg)| = {r:e}"))?;
    }
    for q in [0.3, 0.5, 0.8] {
        let s = ModelSemantics::jackson_a(c(q, 0.0)).unwrap();
        let cal = calibrate(&s, &spec).map_err(|e| e.to_string())?;
        check((cal.c - 1.0 / q).norm() <= 1e-8, format!("q = {q}: c = {}", cal.c))?;
    }
    Ok(format!("max |Res(Dg)| {worst:.1e}; c = 1/q for q in {{0.3, 0.5, 0.8}}"))
}

fn q_extraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spec = ContourSpec::Circle(Circle::new(2.0, 512).unwrap());
    let mut worst: f64 = 0.0;
    for q in [0.5, 0.3] {
        let s = ModelSemantics::jackson_a(c(q, 0.0)).unwrap();
        let cal = calibrate(&s, &spec).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let coeffs: Vec<C64> = (0..=6)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = synthesize(&s, &coeffs).function();
            for (k, want) in coeffs.iter().enumerate() {
                let got = residue_extract(&s, &f, k, &spec, &cal).map_err(|e| e.to_string())?.value;
                worst = worst.max((got - want).norm());
                check((got - want).norm() <= 1e-8, format!("q = {q}, k = {k}: {got} vs {want}"))?;
            }
        }
    }
    Ok(format!("20 random sums, worst coefficient error {worst:.1e}"))
}

fn classical_liouville() -> Outcome {
    let params = LiouvilleParams {
        k_max: 12,
        circle: Circle::new(1.0, 512).unwrap(),
        ..Default::default()
    };
    let r = classical_liouville_verdict(&AnalyticFunction::constant(c(5.0, 0.0)), &params)
        .map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::Consistent, format!("f = 5: {}", r.verdict.as_str()))?;
    for row in &r.coefficients[1..] {
        check(row.oracle.norm() <= 1e-10, format!("f = 5: a_{} = {}", row.k, row.oracle))?;
    }
    let r = classical_liouville_verdict(&AnalyticFunction::var().exp(), &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::HypothesisViolated, format!("f = exp: {}", r.verdict.as_str()))?;
    for row in &r.coefficients {
        check(
            (row.oracle - 1.0 / factorial(row.k)).norm() <= 1e-10,
            format!("f = exp: a_{} = {}", row.k, row.oracle),
        )?;
    }
    Ok("f = 5 consistent; exp hypothesis-violated with a_k = 1/k!".into())
}

fn q_liouville() -> Outcome {
    let q = c(0.5, 0.0);
    let params = LiouvilleParams {
        k_max: 6,
        ..Default::default()
    };
    let r = q_liouville_verdict(&Function::constant(c(3.0, 0.0)), q, &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::Consistent, format!("f = 3: {}", r.verdict.as_str()))?;
    for row in &r.coefficients[1..] {
        check(row.oracle.norm() <= 1e-8, format!("f = 3: a_{} = {}", row.k, row.oracle))?;
    }
    let s = ModelSemantics::jackson_a(q).unwrap();
    let r = q_liouville_verdict(&s.basis().function(1), q, &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::HypothesisViolated, format!("f = phi_1: {}", r.verdict.as_str()))?;
    check(
        (r.coefficients[1].oracle - 1.0).norm() <= 1e-8,
        format!("f = phi_1: a_1 = {}", r.coefficients[1].oracle),
    )?;
    Ok("f = 3 consistent; phi_1 hypothesis-violated with a_1 = 1".into())
}

fn delta_liouville() -> Outcome {
    let params = LiouvilleParams::default();
    let e2pi: Function = AnalyticFunction::var().scale(c(0.0, 2.0 * PI)).exp().into();
    let r = delta_liouville_verdict(&e2pi, &e2pi, &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::Consistent, format!("f = p = e^(2 pi i t): {}", r.verdict.as_str()))?;
    let one = Function::constant(c(1.0, 0.0));
    let grow: Function = AnalyticFunction::const_pow(c(2.0, 0.0)).into();
    let r = delta_liouville_verdict(&grow, &one, &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::HypothesisViolated, format!("f = 2^t: {}", r.verdict.as_str()))?;
    let decay: Function = AnalyticFunction::const_pow(c(0.5, 0.0)).into();
    let r = delta_liouville_verdict(&decay, &one, &params).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::DiscrepancyRecorded, format!("f = 2^-t: {}", r.verdict.as_str()))?;
    for row in &r.coefficients {
        let want = (-0.5f64).powi(row.k as i32) / factorial(row.k);
        check((row.oracle - want).norm() <= 1e-10, format!("f = 2^-t: a_{} = {}", row.k, row.oracle))?;
        check(row.residue.is_some() && row.residue_error.is_some(), "residue column missing".into())?;
    }
    let populated = !r.hypotheses.is_empty()
        && r.calibration.is_some()
        && !r.bound_checks.is_empty()
        && r.growth.is_some()
        && !r.notes.is_empty()
        && r.conclusion.residual.is_finite();
    check(populated, "2^-t report has empty fields".into())?;
    Ok(format!(
        "positive control consistent; 2^t violated; 2^-t discrepancy-recorded (periodicity residual {:.3})",
        r.conclusion.residual
    ))
}

/// `Σ_k |C(n,k) (−1/a)^k x(x−1)⋯(x−k+1)|`.
fn term_scale(n: u32, a: C64, x: u64) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for k in 0..=n as u64 {
        total += term;
        if k < n as u64 {
            term *= (n as u64 - k) as f64 / (k + 1) as f64 * (x as f64 - k as f64).abs() / a.norm();
        }
    }
    total
}

fn charlier_agreement() -> Outcome {
    let s = ModelSemantics::forward_difference();
    let mut worst: f64 = 0.0;
    for n in 0..=8 {
        for a in [0.5, 1.0, 2.0] {
            let a = c(a, 0.0);
            let sym = charlier_symbolic(n, a).map_err(|e| e.to_string())?;
            let syn = synthesize(&s, &sym.falling);
            for x in 0..=10u64 {
                let xc = c(x as f64, 0.0);
                let v = [
                    syn.eval(xc).map_err(|e| e.to_string())?,
                    charlier_sum(n, a, xc).map_err(|e| e.to_string())?,
                    charlier_rodrigues_oracle(n, a, x).map_err(|e| e.to_string())?,
                ];
                // At a root of C_n the values are pure rounding, so errors are
                // measured against the size of the summands that cancel.
                let scale = v.iter().map(|z| z.norm()).fold(term_scale(n, a, x), f64::max);
                for i in 0..3 {
                    for j in 0..i {
                        let rel = if scale == 0.0 { 0.0 } else { (v[i] - v[j]).norm() / scale };
                        worst = worst.max(rel);
                        check(rel <= 1e-9, format!("n={n} a={a} x={x}: {:?}", v))?;
                    }
                }
            }
        }
    }
    Ok(format!("n <= 8, 3 parameters, x in 0..10: worst relative spread {worst:.1e}"))
}

fn growth_estimation() -> Outcome {
    let two: Function = AnalyticFunction::const_pow(c(2.0, 0.0)).into();
    let g = exp_type_estimate(&two, 64.0, 256).map_err(|e| e.to_string())?;
    check(
        (0.67..=0.72).contains(&g.type_estimate),
        format!("type of 2^t estimated as {}", g.type_estimate),
    )?;
    let k = exp_type_estimate(&Function::constant(c(7.0, 0.0)), 64.0, 256).map_err(|e| e.to_string())?;
    check(k.type_estimate <= 0.01, format!("type of a constant estimated as {}", k.type_estimate))?;
    Ok(format!("type(2^t) = {:.5} (ln 2 = {LN_2:.5}); type(7) = {}", g.type_estimate, k.type_estimate))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weylres"))
        .args(args)
        .output()
        .expect("run weylres");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli_contract() -> Outcome {
    let corpus = include_str!("data/weyl_corpus.txt");
    let mut count = 0;
    for line in corpus.lines().filter(|l| !l.trim().is_empty()) {
        let once = parse_weyl_expr(line).map_err(|e| format!("{line:?}: {e}"))?;
        let twice = parse_weyl_expr(&once.to_string()).map_err(|e| format!("reprint of {line:?}: {e}"))?;
        check(once == twice, format!("{line:?} is not stable under print/parse"))?;
        count += 1;
    }
    check(count == 30, format!("corpus has {count} expressions"))?;

    let runs: [&[&str]; 4] = [
        &["extract", "--model", "delta", "--method", "oracle", "--K", "8", "--f", "pow(2,t)"],
        &["residue", "--model", "classical", "--r", "2", "--g", "1/t"],
        &["charlier", "--n", "2", "--a", "2", "--x", "3"],
        &["liouville", "--model", "qa", "--q", "0.5", "--f", "3"],
    ];
    for args in runs {
        let (code1, out1) = run_cli(args);
        let (code2, out2) = run_cli(args);
        check(code1 == 0 && code2 == 0, format!("{args:?} exited {code1}/{code2}"))?;
        check(out1 == out2, format!("{args:?} output differs between runs"))?;
    }

    let exits: [(&[&str], i32); 9] = [
        (&["normalize", "d*X"], 0),
        (&["reduce", "d*Xinv"], 0),
        (&["expand", "X*d", "--model", "delta", "--f", "t^2", "--at", "1,2"], 0),
        (&["liouville", "--model", "classical", "--f", "exp(t)"], 1),
        (&["liouville", "--model", "delta", "--f", "pow(2,t)"], 1),
        (&["normalize", "X/d"], 2),
        (&["extract", "--model", "nonsense", "--f", "t"], 2),
        (&["residue", "--model", "qb", "--g", "t"], 2),
        (&["extract", "--model", "delta", "--r", "2", "--f", "t"], 2),
    ];
    for (args, want) in exits {
        let (code, _) = run_cli(args);
        check(code == want, format!("{args:?} exited {code}, expected {want}"))?;
    }
    Ok("30-expression corpus stable; 4 commands byte-identical across runs; 9 exit codes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("algebra exactness", algebra_exactness),
        ("algebra-analysis compatibility", homomorphism),
        ("Newton oracle", newton_oracle_check),
        ("vertical-line residue engine", barnes_engine),
        ("q-residue soundness", q_residue_soundness),
        ("q extraction matches oracle", q_extraction),
        ("classical Liouville reproduction", classical_liouville),
        ("q-Liouville", q_liouville),
        ("difference Liouville controls", delta_liouville),
        ("Charlier three-way agreement", charlier_agreement),
        ("growth estimation", growth_estimation),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
