//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Runs as a plain binary (`harness = false`) so the lines always print.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use logdgla_cli::{cli_main, parse_config, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use logdgla_core::checks::{axiom_suite, primitive_suite, AxiomReport};
use logdgla_core::logform::enumerate_keys;
use logdgla_core::ode::{solve, Expression, MonomialTerm, PolarSamples, SolveConfig};
use logdgla_core::primitives::dprime_matrix;
use logdgla_core::specseq::{random_double_complex, staircase, vertical_pair};
use logdgla_core::*;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn arc(m: ModelConfig) -> Arc<ModelConfig> {
    Arc::new(m)
}

/// The rank-one abelian fixtures with kappa 0, 1/2 and (1/3, 1/2), and the
/// gl_2 carry fixture.
fn axiom_fixtures() -> Vec<(&'static str, Arc<ModelConfig>)> {
    vec![
        ("abelian-k0", arc(fixtures::abelian_k0())),
        ("abelian-khalf", arc(fixtures::abelian_khalf())),
        ("abelian-two-branch", arc(fixtures::abelian_two_branch())),
        ("gl2-carry", arc(fixtures::gl2_carry())),
    ]
}

fn all_fixtures() -> Vec<(&'static str, Arc<ModelConfig>)> {
    fixtures::NAMES.iter().map(|n| (*n, arc(fixtures::by_name(n).unwrap()))).collect()
}

fn summarize(
    reports: &[(&str, AxiomReport)],
    pick: impl Fn(&AxiomReport) -> Vec<(&'static str, logdgla_core::checks::Tally)>,
) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, r) in reports {
        let tallies = pick(r);
        let failures: usize = tallies.iter().map(|(_, t)| t.failures).sum();
        let trials = tallies.iter().map(|(_, t)| t.trials).min().unwrap_or(0);
        ok &= failures == 0;
        parts.push(format!("{name} {trials}x{} fail {failures}", tallies.len()));
    }
    (ok, parts.join("; "))
}

fn criterion_1_2_3_6() -> [Outcome; 4] {
    let t0 = Instant::now();
    let mut reports = Vec::new();
    for (name, m) in axiom_fixtures() {
        reports.push((name, axiom_suite(&m, 500, 1).expect("suite runs")));
    }
    let elapsed = t0.elapsed();

    let (ok1, d1) =
        summarize(&reports, |r| vec![("antisymmetry", r.antisymmetry), ("jacobi", r.jacobi), ("leibniz", r.leibniz)]);
    let samples_ok = reports.iter().all(|(_, r)| r.jacobi.trials == 500);
    let c1 =
        outcome(ok1 && samples_ok && elapsed < Duration::from_secs(60), format!("{d1}; {:.1}s", elapsed.as_secs_f64()));

    let (ok2, d2) = summarize(&reports, |r| {
        vec![("d'^2", r.dprime_squared), ("d''^2", r.dsecond_squared), ("anticommute", r.anticommute)]
    });
    let (ok3, d3) = summarize(&reports, |r| vec![("closure", r.closure)]);

    // Residues need at least one log branch; every fixture here has one.
    let mut reports6 = Vec::new();
    for (name, m) in all_fixtures().into_iter().filter(|(_, m)| m.l() > 0) {
        reports6.push((name, axiom_suite(&m, 200, 6).expect("suite runs")));
    }
    let (ok6, d6) = summarize(&reports6, |r| vec![("residue", r.residue_morphism)]);
    let nonempty = reports6.iter().all(|(_, r)| r.residue_morphism.trials == 200);
    [c1, outcome(ok2, d2), outcome(ok3, d3), outcome(ok6 && nonempty, d6)]
}

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, m) in all_fixtures() {
        // d <= 3 and l <= 3 hold for every fixture.
        let t = Truncation::new(4, 4);
        let r = primitive_suite(&m, &t, 200, 4).expect("suite runs");
        ok &= r.passed() && r.images.trials + r.kernel.trials >= 200;
        parts.push(format!(
            "{name} {}+{} forms, {} fail, H^+=0 {}",
            r.images.trials,
            r.kernel.trials,
            r.images.failures + r.kernel.failures,
            r.vanishing
        ));
    }
    outcome(ok, format!("{}; {:.1}s", parts.join("; "), t0.elapsed().as_secs_f64()))
}

/// `dim ker d'` on admissible `(0, q)`-forms by one direct rank computation.
fn direct_kernel_dim(m: &Arc<ModelConfig>, q: usize, t: &Truncation) -> usize {
    let dom = enumerate_keys(m, 0, q, t, true);
    let cod = enumerate_keys(m, 1, q, t, true);
    dom.len() - dprime_matrix(m, &dom, &cod).rank()
}

fn criterion_5() -> Outcome {
    let t = Truncation::new(2, 2);
    let mut ok = true;
    let mut failures = Vec::new();
    for (name, m) in all_fixtures() {
        for q in 0..=m.d() {
            let k = kernel_dprime_description(&m, q, &t);
            let direct = direct_kernel_dim(&m, q, &t);
            if !k.matches || k.kernel.len() != direct {
                ok = false;
                failures.push(format!("{name} q={q}"));
            }
        }
    }
    let k0 = arc(fixtures::abelian_k0());
    let kh = arc(fixtures::abelian_khalf());
    let dims0: Vec<usize> = (0..=1).map(|q| kernel_dprime_description(&k0, q, &t).kernel.len()).collect();
    let dimsh: Vec<usize> = (0..=1).map(|q| kernel_dprime_description(&kh, q, &t).kernel.len()).collect();
    ok &= dims0 == [3, 3] && dimsh == [0, 0];
    outcome(
        ok,
        format!(
            "match on {} fixtures; kappa=0 dims {dims0:?}, kappa=1/2 dims {dimsh:?}{}",
            fixtures::NAMES.len(),
            if failures.is_empty() { String::new() } else { format!("; mismatches {failures:?}") }
        ),
    )
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let mut exact_cases = 0;
    for case in 0..20 {
        let l = rng.random_range(1..=3usize);
        let d = l + rng.random_range(0..=1usize);
        let n_values = rng.random_range(1..=3usize);
        let basis: Vec<ValueElement> = (0..n_values)
            .map(|v| {
                let kappa = (0..l)
                    .map(|_| {
                        let den = rng.random_range(1..=4i64);
                        Rational::new(rng.random_range(0..den), den)
                    })
                    .collect();
                ValueElement { name: format!("e{v}"), kappa: Character::new(kappa).unwrap() }
            })
            .collect();
        let m = ModelConfig::new(d, l, ValueModule::new(basis, None).unwrap()).unwrap();
        let (tz, tb) = (rng.random_range(0..=3u32), rng.random_range(0..=2u32));
        let t = Truncation::new(tz, tb);
        for v in 0..n_values {
            let kc = build_koszul(&m, v, &t).unwrap();
            let h = koszul_homology(&kc);
            let chi = m.values().character(v);
            let all_trivial = chi.components().iter().all(Rational::is_zero);
            // Each monomial carries scalars a_i + kappa_i; only a_i = kappa_i = 0
            // on every branch leaves homology, binom(l, j) in degree j.
            let kern = if all_trivial { binom(d - l + tz as usize, d - l) } else { 0 };
            let zbar = binom(d + tb as usize, d);
            let expect: Vec<usize> = (0..=l).map(|j| binom(l, j) * kern * zbar).collect();
            if h != expect || !kc.is_complex() {
                ok = false;
                eprintln!("koszul case {case} value {v}: {h:?} != {expect:?}");
            }
            if chi.components().iter().all(|k| !k.is_zero()) {
                exact_cases += 1;
                ok &= h.iter().all(|&x| x == 0);
            }
        }
    }
    outcome(ok, format!("20 configurations, {exact_cases} value(s) with all kappa_i != 0 exact"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    let mut max_dim = 0;
    for _ in 0..50 {
        let (w, h) = (rng.random_range(1..=4usize), rng.random_range(1..=4usize));
        let dc = random_double_complex(&mut rng, w, h, 6);
        max_dim = max_dim.max(dc.dims().iter().flatten().copied().max().unwrap_or(0));
        ok &= dc.check_invariants() && check_convergence(&dc, h + 1).ok();
    }
    let random_ok = ok && max_dim <= 6;

    let t = Truncation::new(2, 1);
    let mut models_ok = true;
    for (_, m) in all_fixtures() {
        let d = m.d();
        let reports: Vec<ConvergenceReport> =
            model_summands(&m, 0..=d, 0..=d, &t).iter().map(|mc| check_convergence(&mc.complex, d + 2)).collect();
        models_ok &= ConvergenceReport::direct_sum(&reports).is_some_and(|r| r.ok());
    }

    let s = check_convergence(&staircase(), 3);
    let v = check_convergence(&vertical_pair(), 2);
    let pinned = s.ok() && s.nonzero_differentials.contains(&2) && v.ok() && v.nonzero_differentials.contains(&1);
    outcome(
        random_ok && models_ok && pinned,
        format!(
            "50 random (max slot dim {max_dim}) {random_ok}; {} model fixtures {models_ok}; staircase d_r != 0 for r in {:?}, vertical pair for r in {:?}",
            fixtures::NAMES.len(),
            s.nonzero_differentials,
            v.nonzero_differentials
        ),
    )
}

fn exact_p(e: &Expression, kappa: f64, z: Complex64) -> Complex64 {
    // P(e^{-s|z|^2} z^a zbar^b) = (a + kappa - s|z|^2) e^{-s|z|^2} z^a zbar^b
    let env = (-e.gaussian * z.norm_sqr()).exp();
    e.terms
        .iter()
        .map(|t| {
            let mono = Complex64::new(t.re, t.im) * z.powu(t.a) * z.conj().powu(t.b);
            mono * (t.a as f64 + kappa - e.gaussian * z.norm_sqr()) * env
        })
        .sum()
}

fn criterion_9() -> Outcome {
    let (radius, n_r, n_phi) = (1.0, 256, 64);
    let config = SolveConfig { n_max: 32, verify_fraction: 0.9 };
    let term = |re: f64, im: f64, a: u32, b: u32| MonomialTerm { re, im, a, b };
    let manufactured = Expression {
        gaussian: 0.0,
        terms: vec![term(1.0, 0.0, 2, 0), term(0.0, -0.5, 1, 3), term(0.25, 0.0, 0, 2), term(1.0, 1.0, 3, 3)],
    };
    let smooth = Expression {
        gaussian: 1.5,
        terms: vec![term(1.0, 0.0, 0, 0), term(0.5, 0.2, 1, 0), term(-0.3, 0.0, 0, 2), term(0.2, 0.1, 3, 1)],
    };
    let mut ok = true;
    let (mut worst_err, mut worst_res, mut slowest) = (0.0f64, 0.0f64, Duration::ZERO);
    for &kappa in &[0.5, 1.0 / 3.0, 1e-3, 1.0 - 1e-3] {
        let f = PolarSamples::from_fn(radius, n_r, n_phi, |z| exact_p(&manufactured, kappa, z)).unwrap();
        let (g, _) = solve(&f, kappa, &config).unwrap();
        let err = g.sup_diff(&manufactured.sample(radius, n_r, n_phi).unwrap(), radius);
        worst_err = worst_err.max(err);

        let f = smooth.sample(radius, n_r, n_phi).unwrap();
        let t0 = Instant::now();
        let (_, report) = solve(&f, kappa, &config).unwrap();
        slowest = slowest.max(t0.elapsed());
        worst_res = worst_res.max(report.residual);
        ok &= report.mode_bounds_hold;
    }
    ok &= worst_err <= 1e-8 && worst_res <= 1e-6 && slowest < Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "manufactured err {worst_err:.1e}, smooth residual {worst_res:.1e} on r <= 0.9R, slowest solve {:.2}s",
            slowest.as_secs_f64()
        ),
    )
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("logdgla").chain(args.iter().copied());
    let code = cli_main(argv, &mut out, &mut err);
    (code, out)
}

fn criterion_10() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let golden: BTreeMap<String, PathBuf> = std::fs::read_dir(root.join("tests/golden"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), p))
        .collect();
    let mut identical = !golden.is_empty();
    for (name, path) in &golden {
        let cfg = root.join("configs").join(format!("{name}.toml"));
        let cfg = cfg.to_str().unwrap();
        let (c1, a) = cli(&["--config", cfg, "--quiet"]);
        let (c2, b) = cli(&["--config", cfg, "--quiet"]);
        identical &= c1 == EXIT_OK && c2 == EXIT_OK && a == b && a == std::fs::read(path).unwrap();
    }

    let mut round_trip = true;
    let mut n_configs = 0;
    for e in std::fs::read_dir(root.join("configs")).unwrap() {
        let text = std::fs::read_to_string(e.unwrap().path()).unwrap();
        let c = parse_config(&text).unwrap();
        round_trip &= parse_config(&c.to_toml()).as_ref() == Ok(&c);
        n_configs += 1;
    }

    let ode = root.join("configs/ode-monomial.toml");
    let ode = ode.to_str().unwrap();
    let dir = std::env::temp_dir().join(format!("logdgla-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "command = \"e1\"\nfixture = \"no-such-fixture\"\n").unwrap();
    let codes = [
        cli(&["--config", ode, "--quiet"]).0 == EXIT_OK,
        cli(&["--config", ode, "--quiet", "--tol", "1e-300"]).0 == EXIT_CHECK_FAILED,
        cli(&["--config", bad.to_str().unwrap(), "--quiet"]).0 == EXIT_USAGE,
        cli(&["--bogus"]).0 == EXIT_USAGE,
    ];
    let _ = std::fs::remove_dir_all(&dir);
    let exit_ok = codes.iter().all(|&c| c);
    outcome(
        identical && round_trip && exit_ok,
        format!(
            "{} golden reports identical {identical}; {n_configs} configs round-trip {round_trip}; exit codes 0/1/2 {exit_ok}",
            golden.len()
        ),
    )
}

fn main() {
    let t0 = Instant::now();
    let [c1, c2, c3, c6] = criterion_1_2_3_6();
    let results = [
        ("DGLA axioms", c1),
        ("differential identities", c2),
        ("admissible closure", c3),
        ("truncated d'-Poincare", criterion_4()),
        ("E1 kernel description", criterion_5()),
        ("residue morphism", c6),
        ("Koszul homology oracle", criterion_7()),
        ("spectral sequence convergence", criterion_8()),
        ("ODE validator", criterion_9()),
        ("CLI contract", criterion_10()),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!("[{}] {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} in {:.1}s", if all { "all passed" } else { "FAILED" }, t0.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
