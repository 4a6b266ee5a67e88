//! Seeded workloads shared by the benchmarks.

use std::sync::Arc;

use logdgla_core::logform::random_form_with;
use logdgla_core::ode::{Expression, MonomialTerm, PolarSamples};
use logdgla_core::specseq::random_double_complex;
use logdgla_core::{fixtures, DoubleComplex, LogForm, ModelConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn model(name: &str) -> Arc<ModelConfig> {
    Arc::new(fixtures::by_name(name).expect("known fixture"))
}

/// `count` admissible `(p, q)`-forms of degree at most `max_deg`.
pub fn forms(m: &Arc<ModelConfig>, p: usize, q: usize, max_deg: u32, count: usize) -> Vec<LogForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..count).map(|_| random_form_with(&mut rng, m, p, q, max_deg, 4, true)).collect()
}

pub fn double_complex(side: usize, max_dim: usize) -> DoubleComplex {
    random_double_complex(&mut ChaCha8Rng::seed_from_u64(0), side, side, max_dim)
}

/// Smooth non-polynomial right-hand side on the standard grid.
pub fn smooth_rhs(n_r: usize, n_phi: usize) -> PolarSamples {
    let term = |re, im, a, b| MonomialTerm { re, im, a, b };
    Expression {
        gaussian: 1.5,
        terms: vec![term(1.0, 0.0, 0, 0), term(0.5, 0.2, 1, 0), term(-0.3, 0.0, 0, 2), term(0.2, 0.1, 3, 1)],
    }
    .sample(1.0, n_r, n_phi)
    .expect("valid grid")
}
