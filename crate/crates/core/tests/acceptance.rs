//! Acceptance criteria, one pass/fail line each.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use twonorm::axioms::{check_axioms, reverse_triangle_residual, AxiomConfig};
use twonorm::convergence::ConvergenceOptions;
use twonorm::functional::{BLinearFunctional, NormMethod};
use twonorm::hahn_banach::{
    extend_full, interval, norming_functional, recover_two_norm_detailed, AlphaRule,
};
use twonorm::linalg::{unit, vector};
use twonorm::optimize::DirectionSearch;
use twonorm::product::{join, product, split_cauchy, SplitProbes};
use twonorm::sampling::{self, bounded_coeffs, normal_vector, random_gram_space, SampleRng};
use twonorm::seminorm::AnchoredSeminorm;
use twonorm::subspace::Subspace;
use twonorm::ubp::{
    pointwise_bound, uniform_bound, weakstar_criterion, weakstar_limit, CriterionOptions,
    FunctionalFamily, TotalSet, Verdict,
};
use twonorm::{TwoNormSpace, Vector};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn dim(rng: &mut SampleRng) -> usize {
    rng.random_range(2..=6)
}

fn bounded_functional(rng: &mut SampleRng, space: &TwoNormSpace, b: &Vector) -> BLinearFunctional {
    let sn = AnchoredSeminorm::new(space, b).unwrap();
    BLinearFunctional::new(space, b, bounded_coeffs(rng, &sn)).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = sampling::rng(1);
    let spaces: Vec<_> = (0..20)
        .map(|_| {
            let n = dim(&mut rng);
            random_gram_space(&mut rng, n)
        })
        .collect();
    let cfg = AxiomConfig::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut checked = 0;
    let mut check = |s: &TwoNormSpace, seed: u64| {
        let report = check_axioms(s, &AxiomConfig { seed, ..cfg });
        checked += 1;
        if !report.passed() {
            failures += 1;
        }
        for a in &report.axioms {
            if a.id != "N1" {
                worst = worst.max(a.worst_residual);
            }
        }
    };
    for (i, s) in spaces.iter().enumerate() {
        check(s, i as u64);
    }
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            check(&product(&spaces[i], &spaces[j]), (100 * i + j) as u64);
        }
    }
    outcome(
        failures == 0 && worst <= 1e-9,
        format!("{checked} spaces, {failures} failing, worst N2-N4 residual {worst:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = sampling::rng(2);
    let mut min = f64::INFINITY;
    for k in 0..10_000 {
        let n = dim(&mut rng);
        let space = if k % 5 == 0 {
            let m = rng.random_range(2..=3);
            product(&random_gram_space(&mut rng, n), &random_gram_space(&mut rng, m))
        } else {
            random_gram_space(&mut rng, n)
        };
        let d = space.dim();
        let (x, y, z) = (
            normal_vector(&mut rng, d),
            normal_vector(&mut rng, d),
            normal_vector(&mut rng, d),
        );
        min = min.min(reverse_triangle_residual(&space, &x, &y, &z).unwrap());
    }
    outcome(min >= -1e-12, format!("min residual {min:.2e} over 10000 triples"))
}

fn criterion_3() -> Outcome {
    let mut rng = sampling::rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = dim(&mut rng);
        let (t, label) = match k % 4 {
            // restricted domains on Gram spaces
            0 => {
                let space = random_gram_space(&mut rng, n);
                let b = normal_vector(&mut rng, n);
                let k = rng.random_range(1..n);
                let w = sampling::random_subspace(&mut rng, n, k);
                let c = normal_vector(&mut rng, n);
                (BLinearFunctional::on_subspace(&space, &b, c, w).unwrap(), "subspace")
            }
            // whole product spaces
            1 => {
                let m = rng.random_range(2..=3);
                let space = product(&random_gram_space(&mut rng, n), &random_gram_space(&mut rng, m));
                let b = normal_vector(&mut rng, space.dim());
                (bounded_functional(&mut rng, &space, &b), "product")
            }
            _ => {
                let space = random_gram_space(&mut rng, n);
                let b = normal_vector(&mut rng, n);
                (bounded_functional(&mut rng, &space, &b), "gram")
            }
        };
        let closed = t.functional_norm(NormMethod::ClosedForm).unwrap();
        let oracle = t.functional_norm(NormMethod::Oracle).unwrap();
        let rel = (closed - oracle).abs() / closed.max(f64::MIN_POSITIVE);
        if rel > worst {
            worst = rel;
        }
        if rel > 1e-6 {
            eprintln!("  norm mismatch ({label}): closed {closed} oracle {oracle}");
        }
    }
    let mut spread: f64 = 0.0;
    for k in 0..50 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let t = if k % 2 == 0 {
            bounded_functional(&mut rng, &space, &b)
        } else {
            let k = rng.random_range(1..n);
                let w = sampling::random_subspace(&mut rng, n, k);
            BLinearFunctional::on_subspace(&space, &b, normal_vector(&mut rng, n), w).unwrap()
        };
        let f = t.norm_formulas(&DirectionSearch { seed: k, ..Default::default() }).unwrap();
        let reference = t.functional_norm(NormMethod::ClosedForm).unwrap();
        for v in f.values() {
            spread = spread.max((v - reference).abs() / reference);
        }
    }
    outcome(
        worst <= 1e-6 && spread <= 1e-6,
        format!("closed vs oracle worst {worst:.2e} (200), four formulas worst {spread:.2e} (50)"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = sampling::rng(4);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_agree: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..100 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let k = rng.random_range(1..n);
                let w = sampling::random_subspace(&mut rng, n, k);
        let c = normal_vector(&mut rng, n);
        let t = BLinearFunctional::on_subspace(&space, &b, c, w.clone()).unwrap();
        let initial = t.functional_norm(NormMethod::ClosedForm).unwrap();
        let Ok((ext, trace)) = extend_full(&t, None, AlphaRule::Midpoint) else {
            errors += 1;
            continue;
        };
        for s in &trace.steps {
            worst_gap = worst_gap.max(s.s - s.i);
        }
        for v in w.basis() {
            let target = t.evaluate(v).unwrap();
            let got = ext.evaluate(v).unwrap();
            worst_agree = worst_agree.max((got - target).abs() / target.abs().max(1.0));
        }
        let fin = ext.functional_norm(NormMethod::ClosedForm).unwrap();
        worst_norm = worst_norm.max((fin - initial).abs() / initial);
    }
    // worked fixture
    let r3 = TwoNormSpace::euclidean(3).unwrap();
    let t = BLinearFunctional::on_subspace(
        &r3,
        &unit(3, 2),
        unit(3, 0),
        Subspace::new(3, vec![unit(3, 0)]).unwrap(),
    )
    .unwrap();
    let at1 = interval(&t, &unit(3, 1), 1.0).unwrap();
    let at2 = interval(&t, &unit(3, 1), 2.0).unwrap();
    let r = 3f64.sqrt();
    let fixture = at1.s.abs() <= 1e-6
        && at1.i.abs() <= 1e-6
        && (at2.s + r).abs() <= 1e-6
        && (at2.i - r).abs() <= 1e-6;
    outcome(
        errors == 0 && worst_gap <= 1e-6 && worst_agree <= 1e-9 && worst_norm <= 1e-6 && fixture,
        format!(
            "100 extensions ({errors} errors): max s-i {worst_gap:.2e}, agreement {worst_agree:.2e}, \
             norm drift {worst_norm:.2e}; fixture M=1 ({:.1e}, {:.1e}) M=2 ({:.9}, {:.9})",
            at1.s, at1.i, at2.s, at2.i
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = sampling::rng(5);
    let mut worst_value: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for _ in 0..100 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let x0 = sampling::independent_of(&mut rng, &b);
        let p = space.two_norm(&x0, &b).unwrap();
        let t = norming_functional(&space, &x0, &b).unwrap();
        worst_value = worst_value.max((t.evaluate(&x0).unwrap() - p).abs() / p.max(1.0));
        let norm = t.functional_norm(NormMethod::ClosedForm).unwrap();
        worst_norm = worst_norm.max((norm - 1.0).abs());
    }
    let r3 = TwoNormSpace::euclidean(3).unwrap();
    let x0 = vector(&[3.0, 4.0, 0.0]);
    let t = norming_functional(&r3, &x0, &unit(3, 2)).unwrap();
    let fixture = t.evaluate(&x0).unwrap();
    outcome(
        worst_value <= 1e-9 && worst_norm <= 1e-6 && (fixture - 5.0).abs() <= 1e-9,
        format!(
            "100 pairs: value residual {worst_value:.2e}, norm residual {worst_norm:.2e}; fixture {fixture}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = sampling::rng(6);
    let mut worst: f64 = 0.0;
    let mut excess = f64::NEG_INFINITY;
    for k in 0..100 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let x = normal_vector(&mut rng, n);
        let r = recover_two_norm_detailed(&space, &x, &b, 50, k).unwrap();
        worst = worst.max((r.value - r.two_norm).abs() / r.two_norm.max(1.0));
        excess = excess.max(r.max_sampled_ratio() - r.two_norm);
    }
    outcome(
        worst <= 1e-4 && excess <= 1e-9,
        format!("100 pairs: recovery residual {worst:.2e}, max sampled excess {excess:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = sampling::rng(7);
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..50 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let sn = AnchoredSeminorm::new(&space, &b).unwrap();
        let size = rng.random_range(1..=30);
        let coeffs: Vec<_> = (0..size)
            .map(|_| bounded_coeffs(&mut rng, &sn) * rng.random_range(0.0..5.0))
            .collect();
        let family = FunctionalFamily::from_coeffs(&space, &b, coeffs, "random").unwrap();
        let mut probes: Vec<_> = (0..20).map(|_| normal_vector(&mut rng, n)).collect();
        probes.push(&b * 2.5);
        let k = pointwise_bound(&family, &probes).unwrap();
        let u = uniform_bound(&family).unwrap();
        min_gap = min_gap.min(u - k);
        if !(u.is_finite() && u >= k - 1e-9) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("50 families: {violations} violations, min uniform - pointwise {min_gap:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = sampling::rng(8);
    let mut mismatches = 0;
    let mut bound_violation = f64::NEG_INFINITY;
    let mut counts = [0usize; 3];
    for k in 0..51 {
        let n = dim(&mut rng);
        let space = random_gram_space(&mut rng, n);
        let b = normal_vector(&mut rng, n);
        let sn = AnchoredSeminorm::new(&space, &b).unwrap();
        let c = bounded_coeffs(&mut rng, &sn);
        let mut d = bounded_coeffs(&mut rng, &sn);
        d /= d.norm();
        let class = k % 3;
        counts[class] += 1;
        let members: Vec<Vector> = (1..=1000)
            .map(|m| {
                let m = m as f64;
                match class {
                    0 if k % 2 == 0 => &c + &d * (0.5 / m),
                    0 => &c + &d * 0.9f64.powf(m),
                    1 => &c + &d * if (m as usize) % 2 == 0 { 1.0 } else { -1.0 },
                    _ => &c + &d * m,
                }
            })
            .collect();
        let family = FunctionalFamily::from_coeffs(&space, &b, members, "sequence").unwrap();
        let total_vecs: Vec<_> = (0..n).map(|_| {
            let v = normal_vector(&mut rng, n);
            &v / v.norm()
        }).collect();
        let total = TotalSet::new(&space, &b, total_vecs).unwrap();
        let crit = weakstar_criterion(&family, &total, &CriterionOptions::default()).unwrap();
        let expected = [Verdict::Convergent, Verdict::FailsCauchyOnTotal, Verdict::FailsNormBound][class];
        if crit.verdict != expected || !crit.agrees_with_limit {
            mismatches += 1;
            eprintln!("  sequence {k}: expected {expected:?}, got {crit:?}");
        }
        if let Some(limit) = weakstar_limit(&family, None, &ConvergenceOptions::default()) {
            if !limit.is_bounded() {
                mismatches += 1;
            }
            let sup = crit.uniform_bound;
            for _ in 0..200 {
                let x = normal_vector(&mut rng, n);
                let lhs = limit.evaluate(&x).unwrap().abs();
                let rhs = sup * space.two_norm(&x, &b).unwrap();
                bound_violation = bound_violation.max(lhs - rhs);
            }
        }
    }
    outcome(
        mismatches == 0 && bound_violation <= 1e-9 && counts.iter().all(|c| *c >= 10),
        format!(
            "{} sequences ({counts:?} per class): {mismatches} mismatches, M-bound excess {bound_violation:.2e}",
            counts.iter().sum::<usize>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = sampling::rng(9);
    let a = random_gram_space(&mut rng, 3);
    let b = random_gram_space(&mut rng, 2);
    let p = product(&a, &b);
    let cfg = AxiomConfig::default();
    let verified = check_axioms(&a, &cfg).passed() && check_axioms(&b, &cfg).passed();
    let product_ok = check_axioms(&p, &cfg).passed();
    let opts = ConvergenceOptions::with_tol(1e-2);
    let mut broken = 0;
    let mut verdicts = [0usize; 4];
    for k in 0..50 {
        let l0 = normal_vector(&mut rng, 3);
        let r0 = normal_vector(&mut rng, 2);
        let dl = normal_vector(&mut rng, 3);
        let dr = normal_vector(&mut rng, 2);
        let (left_cauchy, right_cauchy) = ((k % 4) & 1 == 0, (k % 4) & 2 == 0);
        let seq: Vec<_> = (1..=400)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let f = 1.0 / n as f64;
                let l = &l0 + &dl * if left_cauchy { f } else { sign };
                let r = &r0 + &dr * if right_cauchy { f } else { sign };
                join(&l, &r)
            })
            .collect();
        let v = split_cauchy(&p, &seq, &SplitProbes::default(), &opts).unwrap();
        verdicts[(v.left as usize) | ((v.right as usize) << 1)] += 1;
        if !v.conjunction_holds() || v.left != left_cauchy || v.right != right_cauchy {
            broken += 1;
        }
    }
    outcome(
        verified && product_ok && broken == 0,
        format!("product axioms {product_ok}; 50 sequences, {broken} conjunction failures, verdict mix {verdicts:?}"),
    )
}

fn run(args: &[&str], dir: &std::path::Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_twonorm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run twonorm");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let (c1, r1) = run(&["verify", "duality", "duality_r4.json", "--seed", "7"], &fixtures);
    let (_, r2) = run(&["verify", "duality", "duality_r4.json", "--seed", "7"], &fixtures);
    let deterministic = c1 == 0 && r1 == r2 && !r1.is_empty();
    let (pass, _) = run(&["axioms", "identity_r3.json"], &fixtures);
    let (math_fail, _) = run(&["axioms", "corrupted_gram.json"], &fixtures);
    let (unbounded, _) = run(&["extend", "identity_r3.json", "unbounded_functional.json"], &fixtures);
    let (missing, _) = run(&["axioms", "no_such_file.json"], &fixtures);
    let (malformed, _) = run(&["axioms", "malformed.json"], &fixtures);
    let (suite, _) = run(&["verify", "bogus", "identity_r3.json"], &fixtures);
    let codes = [pass, math_fail, unbounded, missing, malformed, suite];
    outcome(
        deterministic && codes == [0, 1, 1, 2, 2, 2],
        format!("byte-identical reports {deterministic}; exit codes {codes:?} (expected [0, 1, 1, 2, 2, 2])"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("axiom suite", criterion_1),
        ("reverse triangle", criterion_2),
        ("norm agreement", criterion_3),
        ("norm-preserving extension", criterion_4),
        ("norming functional", criterion_5),
        ("duality", criterion_6),
        ("uniform boundedness ordering", criterion_7),
        ("weak* criterion", criterion_8),
        ("product calculus", criterion_9),
        ("cli determinism and exit codes", criterion_10),
    ];
    println!();
    let mut all = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.passed;
        println!(
            "criterion {:>2} {:<32} {}  {} ({:.1}s)",
            k + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
