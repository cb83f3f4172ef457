//! Command implementations behind the `twonorm` binary.
//!
//! Each command returns a [`Report`]; the exit code is 0 when the report
//! passes and 1 when a property fails. Input problems surface as
//! [`CliError::Input`] (exit 2).

use std::path::{Path, PathBuf};

use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::axioms::{check_axioms, AxiomConfig, AxiomReport};
use crate::convergence::ConvergenceOptions;
use crate::error::Error;
use crate::functional::{BLinearFunctional, NormMethod};
use crate::hahn_banach::{extend_full, norming_functional, recover_two_norm_detailed, AlphaRule};
use crate::linalg::{standard_basis, Vector};
use crate::optimize::DirectionSearch;
use crate::product::{join, split_cauchy, SplitProbes};
use crate::report::{Property, Report};
use crate::sampling::{self, bounded_coeffs, independent_of, normal_vector, SampleRng};
use crate::seminorm::AnchoredSeminorm;
use crate::space::TwoNormSpace;
use crate::spec_io::{
    read_one_or_many, read_spec, FunctionalSpec, Sequence, SequenceSpec, Source, SpaceSpec,
    SpecError,
};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;
use crate::ubp::{
    pointwise_bound, uniform_bound, weakstar_criterion, weakstar_limit, CriterionOptions,
    TotalSet,
};

/// Random functionals compared against each duality sample.
const RECOVERY_TRIALS: usize = 8;

/// Length of the sequences built by the product suite.
const SEQUENCE_LEN: usize = 400;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            CliError::Spec(_) | CliError::Input(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Norm,
    Duality,
    Ubp,
    Weakstar,
    Product,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Norm => "norm",
            Suite::Duality => "duality",
            Suite::Ubp => "ubp",
            Suite::Weakstar => "weakstar",
            Suite::Product => "product",
        }
    }
}

pub struct AxiomsArgs {
    pub space: PathBuf,
    pub samples: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

pub struct ExtendArgs {
    pub space: PathBuf,
    pub functional: PathBuf,
    pub alpha_rule: AlphaRule,
    pub tol: Tolerances,
}

pub struct VerifyArgs {
    pub suite: Suite,
    pub spec: PathBuf,
    pub seed: u64,
    pub cases: usize,
    pub tol: Tolerances,
}

fn axiom_description(id: &str) -> &'static str {
    match id {
        "N1" => "‖x, y‖ = 0 iff x, y are linearly dependent",
        "N2" => "‖x, y‖ = ‖y, x‖",
        "N3" => "‖αx, y‖ = |α| ‖x, y‖",
        "N4" => "‖x, y + z‖ ≤ ‖x, y‖ + ‖x, z‖",
        _ => "",
    }
}

fn axiom_properties(report: &AxiomReport, tol: f64) -> Vec<Property> {
    report
        .axioms
        .iter()
        .map(|a| Property {
            id: a.id.into(),
            description: axiom_description(a.id).into(),
            passed: a.passed,
            cases: a.cases,
            max_residual: a.worst_residual,
            tolerance: tol,
        })
        .collect()
}

fn load_space(path: &Path, allow_indefinite: bool) -> Result<TwoNormSpace, CliError> {
    let spec: SpaceSpec = read_spec(path)?;
    Ok(spec.build(&Source { path }, "$", allow_indefinite)?)
}

fn load_spaces(path: &Path) -> Result<Vec<(SpaceSpec, TwoNormSpace)>, CliError> {
    let specs: Vec<SpaceSpec> = read_one_or_many(path)?;
    let src = Source { path };
    specs
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let space = s.build(&src, &format!("$[{k}]"), false)?;
            Ok((s, space))
        })
        .collect()
}

fn load_sequences(path: &Path) -> Result<Vec<Sequence>, CliError> {
    let specs: Vec<SequenceSpec> = read_one_or_many(path)?;
    let src = Source { path };
    specs
        .iter()
        .enumerate()
        .map(|(k, s)| Ok(s.build(&src, &format!("$[{k}]"))?))
        .collect()
}

pub fn cmd_axioms(args: &AxiomsArgs) -> Result<Report, CliError> {
    let space = load_space(&args.space, true)?;
    let config = AxiomConfig {
        samples: args.samples,
        seed: args.seed,
        tol: args.tol.axiom,
        dependence_tol: args.tol.dependence,
    };
    let result = check_axioms(&space, &config);
    let mut report = Report::new("axioms", &[&args.space], args.tol);
    report.seed = Some(args.seed);
    for p in axiom_properties(&result, args.tol.axiom) {
        report.push(p);
    }
    report.details = json!({
        "dim": space.dim(),
        "samples": args.samples,
        "positive_definite": space.is_positive_definite(),
    });
    Ok(report)
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff.abs() / scale.abs().max(1.0)
}

pub fn cmd_extend(args: &ExtendArgs) -> Result<Report, CliError> {
    let space = load_space(&args.space, false)?;
    let spec: FunctionalSpec = read_spec(&args.functional)?;
    let f = spec.build(&space, &Source { path: &args.functional })?;
    let violation = f.boundedness_violation();
    if !f.is_bounded() {
        return Err(CliError::Math(format!(
            "unbounded: the functional does not vanish on the kernel of ‖·, b‖ within its domain (violation {violation:.3e})"
        )));
    }
    let (ext, trace) =
        extend_full(&f, None, args.alpha_rule).map_err(|e| CliError::Math(e.to_string()))?;
    let tol = args.tol;

    let mut bounded = Property::new(
        "bounded-input",
        "the input functional vanishes on the kernel of ‖·, b‖ within its domain",
        crate::tolerance::BOUNDEDNESS,
    );
    bounded.record(violation);

    let mut nonempty = Property::new(
        "interval-nonempty",
        "every extension interval satisfies s ≤ i",
        tol.interval,
    );
    let mut contained = Property::new(
        "alpha-in-interval",
        "every chosen α lies in [s, i]",
        tol.interval,
    );
    for s in &trace.steps {
        let scale = s.s.abs().max(s.i.abs());
        nonempty.record(relative((s.s - s.i).max(0.0), scale));
        contained.record(relative((s.s - s.alpha).max(s.alpha - s.i).max(0.0), scale));
    }

    let mut agrees = Property::new(
        "agrees-on-domain",
        "the extension coincides with the input on its domain",
        tol.norm,
    );
    for v in f.domain().basis() {
        let before = f.coeffs().dot(v);
        let after = ext.coeffs().dot(v);
        agrees.record(relative(after - before, before));
    }

    let mut preserved = Property::new(
        "norm-preserved",
        "the norm after every step equals the input norm",
        tol.norm,
    );
    preserved.record(trace.norm_drift());

    let mut report = Report::new("extend", &[&args.space, &args.functional], tol);
    for p in [bounded, nonempty, contained, agrees, preserved] {
        report.push(p);
    }
    report.details = json!({
        "alpha_rule": args.alpha_rule,
        "trace": trace,
        "final_norm": trace.final_norm(),
        "extension": ext.coeffs().as_slice(),
    });
    Ok(report)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    if args.cases == 0 {
        return Err(CliError::Input("--cases must be at least 1".into()));
    }
    let mut rng = sampling::rng(args.seed);
    let (properties, details) = match args.suite {
        Suite::Norm => verify_norm(&load_spaces(&args.spec)?, args, &mut rng),
        Suite::Duality => verify_duality(&load_spaces(&args.spec)?, args, &mut rng),
        Suite::Ubp => verify_ubp(&load_sequences(&args.spec)?, args, &mut rng),
        Suite::Weakstar => verify_weakstar(&load_sequences(&args.spec)?, args),
        Suite::Product => verify_product(&load_spaces(&args.spec)?, args, &mut rng),
    };
    let mut report = Report::new("verify", &[&args.spec], args.tol);
    report.suite = Some(args.suite.name().into());
    report.seed = Some(args.seed);
    for p in properties {
        report.push(p);
    }
    report.details = details;
    Ok(report)
}

fn random_domain(rng: &mut SampleRng, space: &TwoNormSpace) -> Subspace {
    let n = space.dim();
    if space.is_product() {
        return Subspace::full(n);
    }
    let k = rng.random_range(1..=n);
    if k == n {
        Subspace::full(n)
    } else {
        sampling::random_subspace(rng, n, k)
    }
}

fn domain_point(rng: &mut SampleRng, domain: &Subspace) -> Vector {
    let coords = normal_vector(rng, domain.dim());
    domain.matrix() * coords
}

fn verify_norm(
    spaces: &[(SpaceSpec, TwoNormSpace)],
    args: &VerifyArgs,
    rng: &mut SampleRng,
) -> (Vec<Property>, Value) {
    let tol = args.tol;
    let mut closed = Property::new(
        "closed-form-vs-oracle",
        "closed-form norm agrees with the direction-search oracle",
        tol.norm,
    );
    let mut formulas = Property::new(
        "norm-formulas-agree",
        "the infimum bound and the three suprema coincide",
        tol.norm,
    );
    let mut lipschitz = Property::new(
        "lipschitz-bound",
        "|T(x, b) − T(y, b)| ≤ ‖T‖ ‖x − y, b‖",
        tol.axiom,
    );
    let mut detection = Property::new(
        "boundedness-detection",
        "functionals with a kernel component are flagged unbounded",
        0.0,
    );
    let mut dims = Vec::new();
    for (_, space) in spaces {
        let n = space.dim();
        dims.push(n);
        for _ in 0..args.cases {
            let b = normal_vector(rng, n);
            let sn = AnchoredSeminorm::new(space, &b).expect("validated space");
            let c = bounded_coeffs(rng, &sn);
            let domain = random_domain(rng, space);
            let f = BLinearFunctional::on_subspace(space, &b, c.clone(), domain)
                .expect("validated space");
            let search = DirectionSearch {
                seed: rng.random(),
                ..DirectionSearch::default()
            };
            match f.functional_norm(NormMethod::ClosedForm) {
                Ok(exact) => {
                    let oracle = f.oracle_norm(&search);
                    closed.record((exact - oracle).abs() / exact.max(f64::MIN_POSITIVE));
                    match f.norm_formulas(&search) {
                        Ok(v) => formulas.record(v.spread()),
                        Err(_) => formulas.record(f64::INFINITY),
                    }
                    let x = domain_point(rng, f.domain());
                    let y = domain_point(rng, f.domain());
                    match f.lipschitz_residual(&x, &y) {
                        Ok(r) => {
                            let scale = (exact * space.two_norm(&(&x - &y), &b).unwrap_or(0.0))
                                .max(1.0);
                            lipschitz.record((-r).max(0.0) / scale)
                        }
                        Err(_) => lipschitz.record(f64::INFINITY),
                    }
                }
                Err(_) => closed.record(f64::INFINITY),
            }
            let unbounded =
                BLinearFunctional::new(space, &b, &c + &b * (1.0 / b.norm())).expect("valid");
            let bounded = BLinearFunctional::new(space, &b, c).expect("valid");
            detection.record_ok(!unbounded.is_bounded() && bounded.is_bounded());
        }
    }
    (
        vec![closed, formulas, lipschitz, detection],
        json!({ "spaces": spaces.len(), "dims": dims, "cases_per_space": args.cases }),
    )
}

fn verify_duality(
    spaces: &[(SpaceSpec, TwoNormSpace)],
    args: &VerifyArgs,
    rng: &mut SampleRng,
) -> (Vec<Property>, Value) {
    let tol = args.tol;
    let mut recovery = Property::new(
        "two-norm-recovery",
        "sup |T(x, b)| / ‖T‖ over bounded T recovers ‖x, b‖",
        tol.duality,
    );
    let mut ceiling = Property::new(
        "sampled-ratio-ceiling",
        "no bounded functional exceeds |T(x, b)| ≤ ‖T‖ ‖x, b‖",
        tol.axiom,
    );
    let mut value = Property::new(
        "norming-value",
        "the norming functional attains T(x, b) = ‖x, b‖",
        tol.axiom,
    );
    let mut unit = Property::new("norming-unit-norm", "the norming functional has norm 1", tol.norm);
    let mut degenerate = Property::new(
        "degenerate-recovery",
        "recovery returns 0 when x depends on b",
        0.0,
    );
    for (_, space) in spaces {
        let n = space.dim();
        for _ in 0..args.cases {
            let b = normal_vector(rng, n);
            let x = independent_of(rng, &b);
            let seed = rng.random();
            match recover_two_norm_detailed(space, &x, &b, RECOVERY_TRIALS, seed) {
                Ok(r) => {
                    recovery.record((r.value - r.two_norm).abs() / r.two_norm);
                    ceiling.record((r.max_sampled_ratio() / r.two_norm - 1.0).max(0.0));
                }
                Err(_) => {
                    recovery.record(f64::INFINITY);
                    ceiling.record(f64::INFINITY);
                }
            }
            match norming_functional(space, &x, &b) {
                Ok(t) => {
                    let target = space.two_norm(&x, &b).unwrap_or(f64::NAN);
                    let got = t.evaluate(&x).unwrap_or(f64::NAN);
                    value.record((got - target).abs() / target);
                    unit.record(t.norm().map_or(f64::INFINITY, |m| (m - 1.0).abs()));
                }
                Err(_) => {
                    value.record(f64::INFINITY);
                    unit.record(f64::INFINITY);
                }
            }
            let dependent = &b * rng.random_range(-3.0..3.0);
            let zero = recover_two_norm_detailed(space, &dependent, &b, RECOVERY_TRIALS, seed);
            degenerate.record_ok(matches!(zero, Ok(r) if r.value == 0.0));
        }
    }
    (
        vec![recovery, ceiling, value, unit, degenerate],
        json!({
            "spaces": spaces.len(),
            "cases_per_space": args.cases,
            "trials": RECOVERY_TRIALS,
        }),
    )
}

fn verify_ubp(sequences: &[Sequence], args: &VerifyArgs, rng: &mut SampleRng) -> (Vec<Property>, Value) {
    let tol = args.tol;
    let mut dominates = Property::new(
        "uniform-dominates-pointwise",
        "sup ‖T_k‖ bounds |T_k(x, b)| / ‖x, b‖ on every probe",
        tol.norm,
    );
    let mut finite = Property::new(
        "uniform-bound-finite",
        "a pointwise bounded family is uniformly bounded",
        0.0,
    );
    let mut rows = Vec::new();
    for seq in sequences {
        let family = &seq.family;
        let n = family.space().dim();
        let mut probes = seq.probes.clone().unwrap_or_else(|| standard_basis(n));
        probes.extend((0..args.cases).map(|_| normal_vector(rng, n)));
        let pointwise = pointwise_bound(family, &probes);
        let uniform = uniform_bound(family);
        match (&pointwise, &uniform) {
            (Ok(p), Ok(u)) => {
                dominates.record((p - u).max(0.0) / u.max(1.0));
                finite.record_ok(p.is_finite() && u.is_finite());
            }
            _ => {
                dominates.record(f64::INFINITY);
                finite.record_ok(false);
            }
        }
        rows.push(json!({
            "label": family.label(),
            "members": family.len(),
            "probes": probes.len(),
            "pointwise_bound": pointwise.ok(),
            "uniform_bound": uniform.ok(),
        }));
    }
    (vec![dominates, finite], json!({ "sequences": rows }))
}

fn verify_weakstar(sequences: &[Sequence], args: &VerifyArgs) -> (Vec<Property>, Value) {
    let tol = args.tol;
    let mut agreement = Property::new(
        "verdict-matches-limit",
        "the criterion verdict agrees with the existence of a weak* limit",
        0.0,
    );
    let mut expected = Property::new(
        "expected-verdict",
        "the verdict matches the one declared in the spec",
        0.0,
    );
    let mut limit_bounded = Property::new(
        "limit-bounded",
        "a weak* limit is a bounded functional",
        0.0,
    );
    let mut limit_norm = Property::new(
        "limit-norm-bound",
        "the limit norm does not exceed sup ‖T_n‖",
        tol.norm,
    );
    let opts = CriterionOptions {
        convergence: ConvergenceOptions::with_tol(tol.convergence),
        growth_factor: tol.growth_factor,
    };
    let mut rows = Vec::new();
    for seq in sequences {
        let family = &seq.family;
        let n = family.space().dim();
        let vectors = seq.total.clone().unwrap_or_else(|| standard_basis(n));
        let criterion = TotalSet::new(family.space(), family.anchor(), vectors)
            .and_then(|total| weakstar_criterion(family, &total, &opts));
        let limit = weakstar_limit(family, seq.probes.as_deref(), &opts.convergence);
        match &criterion {
            Ok(c) => {
                agreement.record_ok(c.agrees_with_limit);
                if let Some(want) = seq.expected {
                    expected.record_ok(want == c.verdict);
                }
                if let Some(l) = &limit {
                    limit_bounded.record_ok(l.is_bounded());
                    match l.norm() {
                        Ok(m) => limit_norm.record((m - c.uniform_bound).max(0.0) / c.uniform_bound.max(1.0)),
                        Err(_) => limit_norm.record(f64::INFINITY),
                    }
                }
            }
            Err(_) => {
                agreement.record_ok(false);
                if seq.expected.is_some() {
                    expected.record_ok(false);
                }
            }
        }
        rows.push(json!({
            "label": family.label(),
            "members": family.len(),
            "expected": seq.expected,
            "criterion": criterion.as_ref().ok(),
            "error": criterion.as_ref().err().map(Error::to_string),
            "has_limit": limit.is_some(),
        }));
    }
    (
        vec![agreement, expected, limit_bounded, limit_norm],
        json!({ "sequences": rows }),
    )
}

fn verify_product(
    spaces: &[(SpaceSpec, TwoNormSpace)],
    args: &VerifyArgs,
    rng: &mut SampleRng,
) -> (Vec<Property>, Value) {
    let tol = args.tol;
    let mut components = Property::new(
        "component-axioms",
        "both factors satisfy the 2-norm axioms",
        tol.axiom,
    );
    let mut product_axioms = Property::new(
        "product-axioms",
        "the product form satisfies the sampled 2-norm axioms",
        tol.axiom,
    );
    let mut conjunction = Property::new(
        "split-cauchy-conjunction",
        "a product sequence is b-Cauchy iff both component sequences are",
        0.0,
    );
    let mut classification = Property::new(
        "split-cauchy-classification",
        "component verdicts match the construction of each sequence",
        0.0,
    );
    let conv = ConvergenceOptions::with_tol(tol.convergence);
    let mut rows = Vec::new();
    for (_, space) in spaces {
        let p = match space.components() {
            Some(_) => space.clone(),
            None => TwoNormSpace::product(space.clone(), space.clone()),
        };
        let (left, right) = p.components().expect("product space");
        let config = AxiomConfig {
            samples: 50 * args.cases,
            seed: rng.random(),
            tol: tol.axiom,
            dependence_tol: tol.dependence,
        };
        let worst = |prop: &mut Property, report: &AxiomReport| {
            for a in &report.axioms {
                prop.cases += a.cases;
                prop.max_residual = prop.max_residual.max(a.worst_residual);
                prop.passed &= a.passed;
            }
        };
        worst(&mut components, &check_axioms(left, &config));
        worst(&mut components, &check_axioms(right, &config));
        worst(&mut product_axioms, &check_axioms(&p, &config));

        let (nl, nr) = (left.dim(), right.dim());
        for k in 0..args.cases {
            let (want_left, want_right) = (k & 1 == 0, k & 2 == 0);
            let (l0, dl) = (normal_vector(rng, nl), normal_vector(rng, nl));
            let (r0, dr) = (normal_vector(rng, nr), normal_vector(rng, nr));
            let seq: Vec<Vector> = (1..=SEQUENCE_LEN)
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let decay = 1.0 / (n * n) as f64;
                    let l = &l0 + &dl * if want_left { decay } else { sign };
                    let r = &r0 + &dr * if want_right { decay } else { sign };
                    join(&l, &r)
                })
                .collect();
            match split_cauchy(&p, &seq, &SplitProbes::default(), &conv) {
                Ok(v) => {
                    conjunction.record_ok(v.conjunction_holds());
                    classification.record_ok(v.left == want_left && v.right == want_right);
                }
                Err(_) => {
                    conjunction.record_ok(false);
                    classification.record_ok(false);
                }
            }
        }
        let u = normal_vector(rng, nl);
        let v = normal_vector(rng, nr);
        let witness = p
            .two_norm(&join(&u, &Vector::zeros(nr)), &join(&Vector::zeros(nl), &v))
            .ok();
        rows.push(json!({
            "left_dim": nl,
            "right_dim": nr,
            "independent_pair_with_zero_two_norm": witness,
        }));
    }
    (
        vec![components, product_axioms, conjunction, classification],
        json!({ "products": rows, "sequence_len": SEQUENCE_LEN }),
    )
}
