//! Seeded randomized suites over the algebraic identities. The CLI reports
//! their tallies; the acceptance tests run them at full sample counts.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::logform::{bracket, dprime, dsecond, dtotal, is_admissible, random_form_with, residue, residue_m, LogForm};
use crate::model::ModelConfig;
use crate::primitives::{
    dprime_cohomology, peel_primitive, random_closed_form, solve_dprime, verify_primitive, Truncation,
};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub trials: usize,
    pub failures: usize,
}

impl Tally {
    pub fn record(&mut self, ok: bool) {
        self.trials += 1;
        self.failures += usize::from(!ok);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub seed: u64,
    pub antisymmetry: Tally,
    pub jacobi: Tally,
    pub leibniz: Tally,
    pub dprime_squared: Tally,
    pub dsecond_squared: Tally,
    pub anticommute: Tally,
    pub closure: Tally,
    pub residue_morphism: Tally,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        [
            self.antisymmetry,
            self.jacobi,
            self.leibniz,
            self.dprime_squared,
            self.dsecond_squared,
            self.anticommute,
            self.closure,
            self.residue_morphism,
        ]
        .iter()
        .all(Tally::passed)
    }
}

fn sign(deg: usize) -> Rational {
    if deg % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn homogeneous(rng: &mut ChaCha8Rng, m: &Arc<ModelConfig>, max_deg: u32, admissible: bool) -> LogForm {
    let p = rng.random_range(0..=m.d());
    let q = rng.random_range(0..=m.d());
    random_form_with(rng, m, p, q, max_deg, 3, admissible)
}

/// Runs `samples` rounds. Each round draws three admissible homogeneous
/// forms for the bracket identities and one ambient form for the
/// differential and residue identities.
pub fn axiom_suite(model: &Arc<ModelConfig>, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = AxiomReport { samples, seed, ..Default::default() };
    let mut strata: Vec<BTreeSet<usize>> = (0..model.l()).map(|i| BTreeSet::from([i])).collect();
    for i in 0..model.l() {
        for j in i + 1..model.l() {
            strata.push(BTreeSet::from([i, j]));
        }
    }
    for _ in 0..samples {
        let a = homogeneous(&mut rng, model, 2, true);
        let b = homogeneous(&mut rng, model, 2, true);
        let c = homogeneous(&mut rng, model, 2, true);
        let (i, j, k) = (a.degree().unwrap_or(0), b.degree().unwrap_or(0), c.degree().unwrap_or(0));

        let ab = bracket(&a, &b)?;
        let ba = bracket(&b, &a)?;
        r.antisymmetry.record((&ab + &ba.scale(&sign(i * j))).is_zero());

        let t1 = bracket(&a, &bracket(&b, &c)?)?.scale(&sign(i * k));
        let t2 = bracket(&b, &bracket(&c, &a)?)?.scale(&sign(j * i));
        let t3 = bracket(&c, &ab)?.scale(&sign(k * j));
        r.jacobi.record((&(&t1 + &t2) + &t3).is_zero());

        let lhs = dtotal(&ab);
        let rhs = &bracket(&dtotal(&a), &b)? + &bracket(&a, &dtotal(&b))?.scale(&sign(i));
        r.leibniz.record(lhs == rhs);

        let residues_vanish = (0..model.l()).all(|n| residue(&a, n).is_ok_and(|x| x.is_zero()));
        r.closure.record(
            is_admissible(&a)
                && is_admissible(&ab)
                && is_admissible(&dprime(&a))
                && is_admissible(&dsecond(&a))
                && residues_vanish,
        );

        let f = homogeneous(&mut rng, model, 2, false);
        r.dprime_squared.record(dprime(&dprime(&f)).is_zero());
        r.dsecond_squared.record(dsecond(&dsecond(&f)).is_zero());
        r.anticommute.record((&dprime(&dsecond(&f)) + &dsecond(&dprime(&f))).is_zero());
        if !strata.is_empty() {
            let mut ok = true;
            for s in &strata {
                let lhs = residue_m(&dtotal(&f), s)?;
                let rhs = dtotal(&residue_m(&f, s)?).scale(&sign(s.len()));
                ok &= lhs == rhs;
            }
            r.residue_morphism.record(ok);
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrimitiveReport {
    pub samples: usize,
    pub seed: u64,
    pub truncation: Option<Truncation>,
    /// Closed forms built as `d'` of a random admissible form.
    pub images: Tally,
    /// Closed forms built from kernel vectors of `d'`.
    pub kernel: Tally,
    /// `cohomology[q][p] = dim H^p_{d'}` on `Ã^{*,q}(T)`.
    pub cohomology: Vec<Vec<usize>>,
    pub vanishing: bool,
}

impl PrimitiveReport {
    pub fn passed(&self) -> bool {
        self.images.passed() && self.kernel.passed() && self.vanishing
    }
}

fn primitive_ok(omega: &LogForm, t: &Truncation) -> Result<bool> {
    let peeled = peel_primitive(omega, t)?;
    let solved = solve_dprime(omega, t)?;
    Ok(verify_primitive(omega, &peeled)
        && peeled.fits(&t.widen())
        && is_admissible(&peeled)
        && solved.is_some_and(|s| verify_primitive(omega, &s)))
}

/// Checks that every `d'`-closed admissible form with `p >= 1` drawn by
/// either generator has a primitive within `t` widened by one, and that the
/// block-wise `d'`-cohomology vanishes in positive degree.
pub fn primitive_suite(model: &Arc<ModelConfig>, t: &Truncation, samples: usize, seed: u64) -> Result<PrimitiveReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.d();
    let mut r = PrimitiveReport { samples, seed, truncation: Some(*t), ..Default::default() };
    if d == 0 || model.values().is_empty() {
        r.vanishing = true;
        return Ok(r);
    }
    let deg = t.max_z_deg.min(t.max_zbar_deg);
    for _ in 0..samples {
        let p = rng.random_range(1..=d);
        let q = rng.random_range(0..=d);
        let alpha = random_form_with(&mut rng, model, p - 1, q, deg, 3, true);
        let omega = dprime(&alpha);
        if !omega.is_zero() {
            r.images.record(primitive_ok(&omega, t)?);
        }
        if let Some(omega) = random_closed_form(&mut rng, model, p, q, t) {
            r.kernel.record(primitive_ok(&omega, t)?);
        }
    }
    r.cohomology = (0..=d).map(|q| dprime_cohomology(model, q, t)).collect();
    r.vanishing = r.cohomology.iter().all(|h| h[1..].iter().all(|&x| x == 0));
    Ok(r)
}
