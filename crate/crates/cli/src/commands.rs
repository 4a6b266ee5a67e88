use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use logdgla_core::checks::{axiom_suite, primitive_suite};
use logdgla_core::ode::{solve, SolveConfig};
use logdgla_core::specseq::{random_double_complex, staircase, vertical_pair};
use logdgla_core::{
    build_koszul, check_convergence, direct_sum_page_dims, kernel_dprime_description, koszul_homology, model_summands,
    restrict_to_stratum, validate_value_module, ConvergenceReport, DoubleComplex, ModelConfig, Truncation,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{Command, ComplexSource, RunConfig, DEFAULT_ODE_TOLERANCE};
use crate::{Report, RunError, SCHEMA_VERSION};

type Checks = Map<String, Value>;

fn check(checks: &mut Checks, name: &str, ok: bool) {
    checks.insert(name.into(), Value::Bool(ok));
}

/// Dispatches to the configured command and assembles the report.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let t0 = Instant::now();
    let mut checks = Checks::new();
    let model = config.resolved_model().map(Arc::new);
    let need_model = || model.clone().ok_or_else(|| RunError::Usage("no model configured".into()));
    let need_truncation = || config.truncation.ok_or_else(|| RunError::Usage("no truncation configured".into()));
    let samples = config.samples;

    let result = match config.command {
        Command::Validate => validate(&need_model()?, &mut checks)?,
        Command::DglaCheck => dgla_check(&need_model()?, samples.unwrap_or(100), config.seed, &mut checks)?,
        Command::Primitive => {
            let r = primitive_suite(&need_model()?, &need_truncation()?, samples.unwrap_or(50), config.seed)?;
            check(&mut checks, "primitives_from_images", r.images.passed());
            check(&mut checks, "primitives_from_kernel", r.kernel.passed());
            check(&mut checks, "positive_degree_cohomology_vanishes", r.vanishing);
            serde_json::to_value(r)?
        }
        Command::Koszul => koszul(&need_model()?, &need_truncation()?, &mut checks)?,
        Command::E1 => e1(&need_model()?, &need_truncation()?, &mut checks),
        Command::Specseq => specseq(config, model.as_ref(), &mut checks)?,
        Command::Ode => ode(config, &mut checks)?,
    };

    let passed = checks.values().all(|v| v == &Value::Bool(true));
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command.name(),
        "seed": config.seed,
        "config": config,
        "checks": checks,
        "passed": passed,
        "result": result,
    });
    if config.timings {
        report["timings"] = json!({ "total_ms": t0.elapsed().as_secs_f64() * 1e3 });
    }
    Ok(Report { value: report, passed })
}

fn model_summary(m: &ModelConfig) -> Value {
    serde_json::to_value(m).expect("models serialize")
}

fn validate(m: &Arc<ModelConfig>, checks: &mut Checks) -> Result<Value, RunError> {
    let v = validate_value_module(m.values());
    check(checks, "antisymmetry", v.antisymmetry);
    check(checks, "character_grading", v.grading);
    check(checks, "jacobi", v.jacobi);
    let l = m.l();
    // All strata for few branches, single branches otherwise.
    let sets: Vec<BTreeSet<usize>> = if l <= 4 {
        (1u32..(1 << l)).map(|mask| (0..l).filter(|i| mask >> i & 1 == 1).collect()).collect()
    } else {
        (0..l).map(|i| BTreeSet::from([i])).collect()
    };
    let mut strata = Vec::new();
    for s in sets {
        let r = restrict_to_stratum(m, &s)?;
        strata.push(json!({
            "branches": s.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "d": r.d(),
            "l": r.l(),
            "values": r.values().basis().iter().map(|e| e.name.as_str()).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "model": model_summary(m), "value_module": v, "strata": strata }))
}

fn dgla_check(m: &Arc<ModelConfig>, samples: usize, seed: u64, checks: &mut Checks) -> Result<Value, RunError> {
    let v = validate_value_module(m.values());
    let r = axiom_suite(m, samples, seed)?;
    check(checks, "value_module", v.is_valid());
    check(checks, "antisymmetry", r.antisymmetry.passed());
    check(checks, "jacobi", r.jacobi.passed());
    check(checks, "leibniz", r.leibniz.passed());
    check(checks, "dprime_squared", r.dprime_squared.passed());
    check(checks, "dsecond_squared", r.dsecond_squared.passed());
    check(checks, "anticommute", r.anticommute.passed());
    check(checks, "admissible_closure", r.closure.passed());
    check(checks, "residue_morphism", r.residue_morphism.passed());
    Ok(json!({ "model": model_summary(m), "value_module": v, "axioms": r }))
}

fn koszul(m: &Arc<ModelConfig>, t: &Truncation, checks: &mut Checks) -> Result<Value, RunError> {
    let mut values = Vec::new();
    let (mut complexes, mut exact) = (true, true);
    for (v, e) in m.values().basis().iter().enumerate() {
        let kc = build_koszul(m, v, t)?;
        let h = koszul_homology(&kc);
        let nontrivial = e.kappa.components().iter().all(|k| !k.is_zero());
        complexes &= kc.is_complex();
        exact &= !nontrivial || h.iter().all(|&x| x == 0);
        values.push(json!({
            "name": e.name,
            "kappa": e.kappa,
            "dims": kc.dims(),
            "homology": h,
            "all_exponents_nonzero": nontrivial,
        }));
    }
    check(checks, "is_complex", complexes);
    check(checks, "exact_when_all_exponents_nonzero", exact);
    Ok(json!({ "model": model_summary(m), "truncation": t, "values": values }))
}

fn e1(m: &Arc<ModelConfig>, t: &Truncation, checks: &mut Checks) -> Value {
    let d = m.d();
    let parts: Vec<DoubleComplex> = model_summands(m, 0..=d, 0..=d, t).into_iter().map(|mc| mc.complex).collect();
    let (e0, e1) = if parts.is_empty() {
        (vec![vec![0; d + 1]; d + 1], vec![vec![0; d + 1]; d + 1])
    } else {
        (direct_sum_page_dims(&parts, 0).unwrap(), direct_sum_page_dims(&parts, 1).unwrap())
    };
    let mut kernel = Vec::new();
    let mut matches = true;
    for q in 0..=d {
        let k = kernel_dprime_description(m, q, t);
        matches &= k.matches;
        kernel.push(json!({
            "q": q,
            "kernel_dim": k.kernel.len(),
            "predicted_dim": k.predicted.len(),
            "matches": k.matches,
        }));
    }
    check(checks, "kernel_description", matches);
    json!({
        "model": model_summary(m),
        "truncation": t,
        "e0_dims": e0,
        "e1_dims": e1,
        "kernel": kernel,
    })
}

fn convergence_value(r: &ConvergenceReport) -> Value {
    json!({
        "page_dims": r.page_dims,
        "nonzero_differentials": r.nonzero_differentials,
        "e_infinity_total": r.e_infinity_total,
        "total_cohomology": r.total_cohomology,
        "page_law": r.page_law,
        "d_squared_zero": r.d_squared_zero,
        "stabilized": r.stabilized,
        "converged": r.converged,
    })
}

fn specseq(config: &RunConfig, model: Option<&Arc<ModelConfig>>, checks: &mut Checks) -> Result<Value, RunError> {
    let opts = config.specseq.clone().unwrap_or_default();
    let reports: Vec<ConvergenceReport> = match opts.source {
        ComplexSource::Model => {
            let m = model.ok_or_else(|| RunError::Usage("no model configured".into()))?;
            let t = config.truncation.ok_or_else(|| RunError::Usage("no truncation configured".into()))?;
            let d = m.d();
            let r_max = opts.r_max.unwrap_or(d + 2);
            let parts: Vec<ConvergenceReport> =
                model_summands(m, 0..=d, 0..=d, &t).iter().map(|mc| check_convergence(&mc.complex, r_max)).collect();
            let whole = ConvergenceReport::direct_sum(&parts)
                .unwrap_or_else(|| check_convergence(&DoubleComplex::zero(vec![vec![0; d + 1]; d + 1]), r_max));
            vec![whole]
        }
        ComplexSource::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let r_max = opts.r_max.unwrap_or(opts.height + 1);
            (0..opts.count)
                .map(|_| {
                    let dc = random_double_complex(&mut rng, opts.width, opts.height, opts.max_dim);
                    check_convergence(&dc, r_max)
                })
                .collect()
        }
        ComplexSource::Staircase => {
            let dc = staircase();
            vec![check_convergence(&dc, opts.r_max.unwrap_or(dc.height() + 1))]
        }
        ComplexSource::VerticalPair => {
            let dc = vertical_pair();
            vec![check_convergence(&dc, opts.r_max.unwrap_or(dc.height() + 1))]
        }
    };
    check(checks, "page_law", reports.iter().all(|r| r.page_law));
    check(checks, "d_squared_zero", reports.iter().all(|r| r.d_squared_zero));
    check(checks, "stabilized", reports.iter().all(|r| r.stabilized));
    check(checks, "converged", reports.iter().all(|r| r.converged));
    Ok(json!({
        "source": opts.source,
        "complexes": reports.iter().map(convergence_value).collect::<Vec<_>>(),
    }))
}

fn ode(config: &RunConfig, checks: &mut Checks) -> Result<Value, RunError> {
    let o = config.ode.as_ref().ok_or_else(|| RunError::Usage("no ode table configured".into()))?;
    let tol = config.tolerance.unwrap_or(DEFAULT_ODE_TOLERANCE);
    let f = o.f.sample(o.radius, o.n_r, o.n_phi)?;
    let solve_config = SolveConfig { n_max: o.n_max, verify_fraction: o.verify_fraction };
    let (_, report) = solve(&f, o.kappa.to_f64(), &solve_config)?;
    check(checks, "residual_within_tolerance", report.residual <= tol);
    check(checks, "mode_bounds_hold", report.mode_bounds_hold);
    Ok(json!({ "tolerance": tol, "solve": report }))
}
