use std::sync::Arc;

use logdgla_core::specseq::{random_double_complex, staircase, vertical_pair};
use logdgla_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Brute-force pages from the filtration of the total complex by `q`,
/// independent of the incremental engine:
/// `E_r^{p,q} = Z_r^q / (Z_{r-1}^{q+1} + D Z_{r-1}^{q-r+1})` with
/// `Z_r^s = { x in F^s : Dx in F^{s+r} }`.
struct Oracle<'a> {
    dc: &'a DoubleComplex,
}

impl Oracle<'_> {
    /// Slots `(p, q, offset)` of `Tot^n`, ordered by `q`.
    fn slots(&self, n: usize) -> (Vec<(usize, usize, usize)>, usize) {
        let mut out = Vec::new();
        let mut off = 0;
        for q in 0..self.dc.height() {
            if let Some(p) = n.checked_sub(q).filter(|&p| p < self.dc.width()) {
                out.push((p, q, off));
                off += self.dc.dim(p, q);
            }
        }
        (out, off)
    }

    fn differential(&self, n: usize) -> Matrix {
        let (src, cols) = self.slots(n);
        let (dst, rows) = self.slots(n + 1);
        let mut m = Matrix::zeros(rows, cols);
        let place = |m: &mut Matrix, block: &Matrix, r0: usize, c0: usize| {
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    m.set(r0 + i, c0 + j, block.get(i, j).clone());
                }
            }
        };
        for &(p, q, c0) in &src {
            for &(tp, tq, r0) in &dst {
                if tp == p + 1 && tq == q {
                    place(&mut m, self.dc.d1(p, q), r0, c0);
                }
                if tp == p && tq == q + 1 {
                    place(&mut m, self.dc.d2(p, q), r0, c0);
                }
            }
        }
        m
    }

    /// Basis of `Z_r^s` in `Tot^n`; `s` may be negative or `r` may be `-1`.
    fn z(&self, r: i64, s: i64, n: usize) -> Vec<Vec<Rational>> {
        let (slots, len) = self.slots(n);
        let in_f = |q: usize, level: i64| q as i64 >= level;
        let coords: Vec<usize> = slots
            .iter()
            .filter(|&&(p, q, _)| in_f(q, s) && self.dc.dim(p, q) > 0)
            .flat_map(|&(p, q, off)| off..off + self.dc.dim(p, q))
            .collect();
        let (tslots, _) = self.slots(n + 1);
        let low_rows: Vec<usize> = tslots
            .iter()
            .filter(|&&(_, q, _)| !in_f(q, s + r))
            .flat_map(|&(p, q, off)| off..off + self.dc.dim(p, q))
            .collect();
        let d = self.differential(n).select_cols(&coords).select_rows(&low_rows);
        let lift = |v: Vec<Rational>| {
            let mut full = vec![Rational::zero(); len];
            for (c, x) in coords.iter().zip(v) {
                full[*c] = x;
            }
            full
        };
        if low_rows.is_empty() {
            return (0..coords.len())
                .map(|i| lift((0..coords.len()).map(|j| Rational::from(u32::from(i == j))).collect()))
                .collect();
        }
        d.kernel().into_iter().map(lift).collect()
    }

    fn rank_of(vectors: &[Vec<Rational>], len: usize) -> usize {
        if vectors.is_empty() || len == 0 {
            return 0;
        }
        Matrix::from_columns(vectors, len).rank()
    }

    fn page_dim(&self, r: usize, p: usize, q: usize) -> usize {
        let (n, r, s) = (p + q, r as i64, q as i64);
        let len = self.slots(n).1;
        let z = self.z(r, s, n);
        let mut b = self.z(r - 1, s + 1, n);
        if n > 0 {
            let d = self.differential(n - 1);
            b.extend(self.z(r - 1, s - r + 1, n - 1).iter().map(|x| d.mul_vec(x)));
        }
        // B is a subspace of Z_r.
        Self::rank_of(&z, len) - Self::rank_of(&b, len)
    }

    fn total(&self, n: usize) -> usize {
        let len = self.slots(n).1;
        let out = if len == 0 { 0 } else { self.differential(n).rank() };
        let inc = if n == 0 || self.slots(n - 1).1 == 0 || len == 0 { 0 } else { self.differential(n - 1).rank() };
        len - out - inc
    }
}

fn assert_matches_oracle(dc: &DoubleComplex) {
    let oracle = Oracle { dc };
    for r in 0..=dc.height() + 1 {
        let page = e_page(dc, r);
        for p in 0..dc.width() {
            for q in 0..dc.height() {
                assert_eq!(page.dim(p, q), oracle.page_dim(r, p, q), "E_{r} at ({p},{q})");
            }
        }
    }
    let total: Vec<usize> = (0..dc.total_len()).map(|n| oracle.total(n)).collect();
    assert_eq!(total_cohomology(dc), total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_complexes_converge(seed in any::<u64>(), w in 1usize..=4, h in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dc = random_double_complex(&mut rng, w, h, 6);
        prop_assert!(dc.check_invariants());
        prop_assert!(dc.dims().iter().flatten().all(|&x| x <= 6));
        let report = check_convergence(&dc, h + 1);
        prop_assert!(report.ok(), "{:?}", report);
    }

    #[test]
    fn pages_match_brute_force(seed in any::<u64>(), w in 1usize..=3, h in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dc = random_double_complex(&mut rng, w, h, 4);
        assert_matches_oracle(&dc);
    }
}

#[test]
fn pinned_fixtures_match_brute_force() {
    let s = staircase();
    assert_matches_oracle(&s);
    assert_eq!(check_convergence(&s, 3).nonzero_differentials, vec![0, 2]);
    let v = vertical_pair();
    assert_matches_oracle(&v);
    assert_eq!(check_convergence(&v, 2).nonzero_differentials, vec![1]);
}

#[test]
fn model_complexes_converge() {
    let t = Truncation::new(2, 1);
    for name in fixtures::NAMES {
        let m = Arc::new(fixtures::by_name(name).unwrap());
        let d = m.d();
        let parts = model_summands(&m, 0..=d, 0..=d, &t);
        let complexes: Vec<DoubleComplex> = parts.iter().map(|mc| mc.complex.clone()).collect();
        let reports: Vec<ConvergenceReport> = complexes
            .iter()
            .map(|dc| {
                assert!(dc.check_invariants(), "{name}");
                assert_matches_oracle(dc);
                check_convergence(dc, d + 2)
            })
            .collect();
        let sum = ConvergenceReport::direct_sum(&reports).unwrap();
        assert!(sum.ok(), "{name}");
        if d <= 2 {
            // The splitting is exact: the whole complex has the summed pages.
            let whole = from_model(&m, 0..=d, 0..=d, &t).complex;
            let direct = check_convergence(&whole, d + 2);
            assert_eq!(direct, sum, "{name}");
            for r in 0..=2 {
                assert_eq!(e_page(&whole, r).dims, direct_sum_page_dims(&complexes, r).unwrap());
            }
        }
    }
}
