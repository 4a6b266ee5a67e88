use std::collections::BTreeSet;
use std::sync::Arc;

use logdgla_core::fixtures;
use logdgla_core::logform::random_form_with;
use logdgla_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn models() -> Vec<Arc<ModelConfig>> {
    [
        fixtures::abelian_k0(),
        fixtures::abelian_khalf(),
        fixtures::abelian_two_branch(),
        fixtures::mixed_three(),
        fixtures::gl2_carry(),
        fixtures::gl2_carry_two_branches(),
        fixtures::smooth_plane(),
    ]
    .into_iter()
    .map(Arc::new)
    .collect()
}

fn sign(deg: usize) -> Rational {
    if deg % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn homogeneous(rng: &mut ChaCha8Rng, m: &Arc<ModelConfig>, admissible: bool) -> LogForm {
    use rand::RngExt;
    let p = rng.random_range(0..=m.d());
    let q = rng.random_range(0..=m.d());
    random_form_with(rng, m, p, q, 2, 3, admissible)
}

fn degree(f: &LogForm) -> usize {
    f.degree().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differentials_square_to_zero(seed in any::<u64>(), which in 0usize..7) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = homogeneous(&mut rng, m, false);
        prop_assert!(dprime(&dprime(&f)).is_zero());
        prop_assert!(dsecond(&dsecond(&f)).is_zero());
        prop_assert!((&dprime(&dsecond(&f)) + &dsecond(&dprime(&f))).is_zero());
    }

    #[test]
    fn bracket_is_graded_lie(seed in any::<u64>(), which in 0usize..6) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (homogeneous(&mut rng, m, true), homogeneous(&mut rng, m, true), homogeneous(&mut rng, m, true));
        let (i, j, k) = (degree(&a), degree(&b), degree(&c));
        let ab = bracket(&a, &b).unwrap();
        let ba = bracket(&b, &a).unwrap();
        prop_assert!((&ab + &ba.scale(&sign(i * j))).is_zero());

        // (-1)^{ik}[a,[b,c]] + (-1)^{ji}[b,[c,a]] + (-1)^{kj}[c,[a,b]] = 0
        let t1 = bracket(&a, &bracket(&b, &c).unwrap()).unwrap().scale(&sign(i * k));
        let t2 = bracket(&b, &bracket(&c, &a).unwrap()).unwrap().scale(&sign(j * i));
        let t3 = bracket(&c, &ab).unwrap().scale(&sign(k * j));
        prop_assert!((&(&t1 + &t2) + &t3).is_zero());
    }

    #[test]
    fn leibniz(seed in any::<u64>(), which in 0usize..6) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (homogeneous(&mut rng, m, true), homogeneous(&mut rng, m, true));
        let lhs = dtotal(&bracket(&a, &b).unwrap());
        let rhs = &bracket(&dtotal(&a), &b).unwrap()
            + &bracket(&a, &dtotal(&b)).unwrap().scale(&sign(degree(&a)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn admissibility_is_closed(seed in any::<u64>(), which in 0usize..6) {
        let m = &models()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (homogeneous(&mut rng, m, true), homogeneous(&mut rng, m, true));
        prop_assert!(is_admissible(&a) && is_admissible(&b));
        prop_assert!(is_admissible(&bracket(&a, &b).unwrap()));
        prop_assert!(is_admissible(&dprime(&a)));
        prop_assert!(is_admissible(&dsecond(&a)));
        for i in 0..m.l() {
            prop_assert!(residue(&a, i).unwrap().is_zero());
        }
    }

    #[test]
    fn residue_commutes_with_differential(seed in any::<u64>(), which in 0usize..6) {
        let m = &models()[which];
        if m.l() == 0 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = homogeneous(&mut rng, m, false);
        let mut sets: Vec<BTreeSet<usize>> = (0..m.l()).map(|i| BTreeSet::from([i])).collect();
        for i in 0..m.l() {
            for j in i + 1..m.l() {
                sets.push(BTreeSet::from([i, j]));
            }
        }
        for s in sets {
            let lhs = residue_m(&dtotal(&f), &s).unwrap();
            let rhs = dtotal(&residue_m(&f, &s).unwrap()).scale(&sign(s.len()));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn normal_form_is_idempotent(seed in any::<u64>(), which in 0usize..7) {
        let m = &models()[which];
        let f = random_form(m, 1, 1, 3, seed, false);
        prop_assert_eq!(normal_form(&normal_form(&f)), normal_form(&f));
    }

    #[test]
    fn view_round_trip(seed in any::<u64>(), which in 0usize..7) {
        let m = &models()[which];
        let f = random_form(m, 1, 0, 3, seed, false);
        let json = serde_json::to_string(&f).unwrap();
        let views: Vec<TermView> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(LogForm::from_views(m.clone(), &views).unwrap(), f);
    }
}

#[test]
fn residue_model_matches_iterated_restriction() {
    let m = Arc::new(fixtures::gl2_carry_two_branches());
    let f = random_form(&m, 2, 0, 2, 5, false);
    let r = residue_m(&f, &BTreeSet::from([0, 1])).unwrap();
    assert_eq!(**r.model(), restrict_to_stratum(&m, &BTreeSet::from([0, 1])).unwrap());
}
