//! Primitives for `d'`: diagonal inversion of `P_i`, the inductive peeling
//! solver and an exact linear-algebra fallback.
//!
//! `d'` preserves the z-weight vector (see [`TermKey::weight`]), the value
//! index, `b` and `K`. Every linear problem for `d'` therefore splits into
//! independent blocks labelled by those data, each of dimension at most
//! `2^d`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::logform::{dprime, exponent_vectors, is_admissible, subsets_of_size, FactorSet, LogForm, TermKey};
use crate::model::ModelConfig;
use crate::rational::Rational;

/// Bounds on z-degree (counting smooth `dz_j` as one) and zbar-degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_z_deg: u32,
    pub max_zbar_deg: u32,
}

impl Truncation {
    pub fn new(max_z_deg: u32, max_zbar_deg: u32) -> Self {
        Truncation { max_z_deg, max_zbar_deg }
    }

    /// One extra degree of z headroom.
    pub fn widen(self) -> Self {
        Truncation { max_z_deg: self.max_z_deg + 1, ..self }
    }

    pub fn contains(&self, k: &TermKey) -> bool {
        k.z_degree() <= self.max_z_deg && k.zbar_degree() <= self.max_zbar_deg
    }
}

/// `1 / (a_i + kappa_i(v))`, or `None` on the kernel direction `a_i = kappa_i = 0`.
///
/// Panics if `i` is not a log branch.
pub fn monomial_inverse(model: &ModelConfig, v: usize, i: usize, a: &[u32], _b: &[u32]) -> Option<Rational> {
    assert!(i < model.l(), "monomial_inverse needs a log branch");
    let eigen = Rational::from(a[i]) + model.kappa(v, i);
    (!eigen.is_zero()).then(|| eigen.recip())
}

/// Data fixed by `d'` on a term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockLabel {
    pub v: usize,
    pub anti: FactorSet,
    pub b: Vec<u32>,
    pub weight: Vec<u32>,
}

impl BlockLabel {
    pub fn of(k: &TermKey) -> Self {
        BlockLabel { v: k.v, anti: k.anti, b: k.b.clone(), weight: k.weight() }
    }

    /// All keys with this label and holomorphic degree `p`, in canonical order.
    pub fn keys(&self, model: &ModelConfig, p: usize, admissible_only: bool) -> Vec<TermKey> {
        let l = model.l();
        let low = (1u32 << l) - 1;
        let mut out = Vec::new();
        for h in subsets_of_size(model.d(), p) {
            let log = FactorSet::from_bits(h.bits() & low);
            let smooth = FactorSet::from_bits(h.bits() & !low);
            if smooth.iter().any(|j| self.weight[j] == 0) {
                continue;
            }
            let a = self.weight.iter().enumerate().map(|(j, &w)| w - smooth.contains(j) as u32).collect();
            let key = TermKey { v: self.v, log, smooth, anti: self.anti, a, b: self.b.clone() };
            let ok = log.iter().all(|i| key.a[i] >= 1 || !model.kappa(key.v, i).is_zero());
            if !admissible_only || ok {
                out.push(key);
            }
        }
        out.sort();
        out
    }
}

/// Matrix of a linear operator on forms, from `domain` to `codomain` keys
/// (columns are images of domain keys). Panics if an image leaves `codomain`.
pub fn operator_matrix(
    model: &Arc<ModelConfig>,
    op: impl Fn(&LogForm) -> LogForm,
    domain: &[TermKey],
    codomain: &[TermKey],
) -> Matrix {
    let index: BTreeMap<&TermKey, usize> = codomain.iter().enumerate().map(|(n, k)| (k, n)).collect();
    let mut m = Matrix::zeros(codomain.len(), domain.len());
    for (col, k) in domain.iter().enumerate() {
        let img = op(&LogForm::term(model.clone(), k.clone(), Rational::one()).expect("valid key"));
        for (t, c) in img.terms() {
            let row = *index.get(t).expect("operator image leaves the codomain basis");
            m.set(row, col, c.clone());
        }
    }
    m
}

/// Matrix of `d'` from `domain` to `codomain`.
pub fn dprime_matrix(model: &Arc<ModelConfig>, domain: &[TermKey], codomain: &[TermKey]) -> Matrix {
    operator_matrix(model, dprime, domain, codomain)
}

fn check_input(omega: &LogForm, t: &Truncation) -> Result<(usize, usize)> {
    let Some((p, q)) = omega.bidegree() else {
        return Err(Error::Precondition("form must be nonzero and homogeneous".into()));
    };
    if p == 0 {
        return Err(Error::Precondition("primitives need holomorphic degree p >= 1".into()));
    }
    if !is_admissible(omega) {
        return Err(Error::Precondition("form is not admissible".into()));
    }
    if !omega.fits(t) {
        return Err(Error::Precondition("form exceeds the truncation".into()));
    }
    Ok((p, q))
}

/// Solves `d' alpha = omega` by peeling off the highest holomorphic index:
/// writing `omega = dz_k ^ psi + beta` with `beta` free of `dz_k`, the
/// coefficients of `psi` are inverted under `P_k` (log branch) or integrated
/// in `z_k` (smooth coordinate), and the remainder involves only lower indices.
pub fn peel_primitive(omega: &LogForm, t: &Truncation) -> Result<LogForm> {
    if omega.is_zero() {
        return Ok(omega.clone());
    }
    check_input(omega, t)?;
    if !dprime(omega).is_zero() {
        return Err(Error::Precondition("form is not d'-closed".into()));
    }
    let model = omega.model();
    let l = model.l();
    let mut alpha = LogForm::zero(model.clone());
    let mut current = omega.clone();
    while !current.is_zero() {
        let top = current.terms().filter_map(|(k, _)| k.holomorphic().max()).max();
        let Some(k) = top else {
            return Err(Error::Solver("closed remainder of holomorphic degree 0".into()));
        };
        let mut psi = Vec::new();
        for (key, c) in current.terms() {
            if key.holomorphic().max() != Some(k) {
                continue;
            }
            // dz_k is the last holomorphic factor; move it to the front.
            let mut coeff = if (key.p() - 1) % 2 == 1 { -c.clone() } else { c.clone() };
            let mut nk = key.clone();
            if k < l {
                let Some(inv) = monomial_inverse(model, key.v, k, &key.a, &key.b) else {
                    return Err(Error::Solver(format!(
                        "P_{} has a kernel on a log term; form is not admissible",
                        k + 1
                    )));
                };
                coeff = &coeff * &inv;
                nk.log = nk.log.without(k);
            } else {
                nk.a[k] += 1;
                coeff = &coeff * &Rational::from(nk.a[k]).recip();
                nk.smooth = nk.smooth.without(k);
            }
            psi.push((nk, coeff));
        }
        let step = LogForm::from_terms(model.clone(), psi)?;
        let next = &current - &dprime(&step);
        alpha = &alpha + &step;
        let next_top = next.terms().filter_map(|(x, _)| x.holomorphic().max()).max();
        if next_top.is_some_and(|n| n >= k) {
            return Err(Error::Solver(format!("peeling stalled at index {}", k + 1)));
        }
        current = next;
    }
    Ok(alpha)
}

/// Exact linear solve of `d' alpha = omega` over admissible forms; returns
/// `None` when `omega` is not in the image. Any solution may be returned.
///
/// The search space is the admissible `(p-1, q)` forms in `T+1`; as `d'`
/// preserves z-weight, only blocks meeting `omega` contribute.
pub fn solve_dprime(omega: &LogForm, t: &Truncation) -> Result<Option<LogForm>> {
    if omega.is_zero() {
        return Ok(Some(omega.clone()));
    }
    let (p, _) = check_input(omega, t)?;
    let model = omega.model();
    let mut blocks: BTreeMap<BlockLabel, Vec<(TermKey, Rational)>> = BTreeMap::new();
    for (k, c) in omega.terms() {
        blocks.entry(BlockLabel::of(k)).or_default().push((k.clone(), c.clone()));
    }
    let mut alpha = Vec::new();
    for (label, terms) in blocks {
        let domain = label.keys(model, p - 1, true);
        let codomain = label.keys(model, p, true);
        let m = dprime_matrix(model, &domain, &codomain);
        let mut rhs = vec![Rational::zero(); codomain.len()];
        for (k, c) in terms {
            let row = codomain.binary_search(&k).expect("admissible term lies in its block");
            rhs[row] = c;
        }
        let Some(x) = m.solve(&rhs) else {
            return Ok(None);
        };
        alpha.extend(domain.into_iter().zip(x).filter(|(_, c)| !c.is_zero()));
    }
    Ok(Some(LogForm::from_terms(model.clone(), alpha)?))
}

pub fn verify_primitive(omega: &LogForm, alpha: &LogForm) -> bool {
    dprime(alpha) == *omega
}

/// All block labels of `(p, q)`-terms within `t`.
pub fn block_labels(model: &ModelConfig, q: usize, t: &Truncation) -> Vec<BlockLabel> {
    let d = model.d();
    let mut out = Vec::new();
    let zb = exponent_vectors(d, t.max_zbar_deg);
    let ws = exponent_vectors(d, t.max_z_deg);
    for v in 0..model.values().len() {
        for anti in subsets_of_size(d, q) {
            for b in &zb {
                for w in &ws {
                    out.push(BlockLabel { v, anti, b: b.clone(), weight: w.clone() });
                }
            }
        }
    }
    out
}

/// Dimensions of `H^p` of `(Ã^{*,q}(T), d')` for `p = 0..=d`.
pub fn dprime_cohomology(model: &Arc<ModelConfig>, q: usize, t: &Truncation) -> Vec<usize> {
    let d = model.d();
    let mut h = vec![0usize; d + 1];
    for label in block_labels(model, q, t) {
        let spaces: Vec<Vec<TermKey>> = (0..=d).map(|p| label.keys(model, p, true)).collect();
        let ranks: Vec<usize> = (0..d).map(|p| dprime_matrix(model, &spaces[p], &spaces[p + 1]).rank()).collect();
        for p in 0..=d {
            let out_rank = if p < d { ranks[p] } else { 0 };
            let in_rank = if p > 0 { ranks[p - 1] } else { 0 };
            h[p] += spaces[p].len() - out_rank - in_rank;
        }
    }
    h
}

/// Random `d'`-closed admissible `(p, q)`-form, built from kernel vectors of
/// `d'` on randomly chosen blocks within `t`. `None` if no nonzero kernel
/// vector was found within the attempt budget.
pub fn random_closed_form(
    rng: &mut ChaCha8Rng,
    model: &Arc<ModelConfig>,
    p: usize,
    q: usize,
    t: &Truncation,
) -> Option<LogForm> {
    let d = model.d();
    let n_values = model.values().len();
    if n_values == 0 || p > d || q > d {
        return None;
    }
    let zb = exponent_vectors(d, t.max_zbar_deg);
    let ws = exponent_vectors(d, t.max_z_deg);
    let antis = subsets_of_size(d, q);
    let mut acc = LogForm::zero(model.clone());
    let wanted = rng.random_range(1..=3);
    let mut found = 0;
    for _ in 0..64 {
        let label = BlockLabel {
            v: rng.random_range(0..n_values),
            anti: antis[rng.random_range(0..antis.len())],
            b: zb[rng.random_range(0..zb.len())].clone(),
            weight: ws[rng.random_range(0..ws.len())].clone(),
        };
        let dom = label.keys(model, p, true);
        let cod = label.keys(model, p + 1, true);
        if dom.is_empty() {
            continue;
        }
        let kernel = dprime_matrix(model, &dom, &cod).kernel();
        if kernel.is_empty() {
            continue;
        }
        let mut terms = Vec::new();
        for vec in &kernel {
            let c = Rational::new(rng.random_range(-3i64..=3), rng.random_range(1i64..=2));
            for (k, x) in dom.iter().zip(vec) {
                terms.push((k.clone(), x * &c));
            }
        }
        let part = LogForm::from_terms(model.clone(), terms).expect("block keys are valid");
        acc = &acc + &part;
        found += 1;
        if found >= wanted && !acc.is_zero() {
            return Some(acc);
        }
    }
    (!acc.is_zero()).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn monomial_inverse_examples() {
        let m = fixtures::rank_one(1, 1, &[(1, 3)]);
        assert_eq!(monomial_inverse(&m, 0, 0, &[2], &[0]), Some(Rational::new(3, 7)));
        let m0 = fixtures::abelian_k0();
        assert_eq!(monomial_inverse(&m0, 0, 0, &[0], &[0]), None);
        let mh = fixtures::abelian_khalf();
        assert_eq!(monomial_inverse(&mh, 0, 0, &[0], &[0]), Some(Rational::from_int(2)));
    }

    #[test]
    fn peel_examples() {
        let t = Truncation::new(2, 2);
        let mh = Arc::new(fixtures::abelian_khalf());
        let w = LogForm::term(mh.clone(), TermKey::unit(&mh, 0).dlog(1, 0), one()).unwrap();
        let a = peel_primitive(&w, &t).unwrap();
        assert_eq!(a, LogForm::term(mh.clone(), TermKey::unit(&mh, 0), Rational::from_int(2)).unwrap());
        assert!(verify_primitive(&w, &a));

        let ms = Arc::new(fixtures::rank_one(1, 0, &[]));
        let w = LogForm::term(ms.clone(), TermKey::unit(&ms, 0).z(&[1]).dz(0, 0), one()).unwrap();
        let a = peel_primitive(&w, &t).unwrap();
        let expect = LogForm::term(ms.clone(), TermKey::unit(&ms, 0).z(&[2]), Rational::new(1, 2)).unwrap();
        assert_eq!(a, expect);
        assert!(verify_primitive(&w, &a));

        let m2 = Arc::new(fixtures::abelian_two_branch());
        let w = LogForm::term(m2.clone(), TermKey::unit(&m2, 0).dlog(2, 0).dlog(2, 1), one()).unwrap();
        let a = peel_primitive(&w, &t).unwrap();
        assert!(verify_primitive(&w, &a));
        assert!(verify_primitive(&w, &solve_dprime(&w, &t).unwrap().unwrap()));
    }

    #[test]
    fn peel_rejects_non_closed() {
        let m = Arc::new(fixtures::abelian_two_branch());
        let w = LogForm::term(m.clone(), TermKey::unit(&m, 0).dlog(2, 0), one()).unwrap();
        assert!(matches!(peel_primitive(&w, &Truncation::new(2, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn solve_agrees_with_monomial_inverse() {
        let m = Arc::new(fixtures::rank_one(1, 1, &[(1, 3)]));
        for a in 0..4u32 {
            let w = LogForm::term(m.clone(), TermKey::unit(&m, 0).z(&[a]).dlog(1, 0), one()).unwrap();
            let x = solve_dprime(&w, &Truncation::new(4, 0)).unwrap().unwrap();
            let inv = monomial_inverse(&m, 0, 0, &[a], &[0]).unwrap();
            assert_eq!(x.coeff(&TermKey::unit(&m, 0).z(&[a])), inv);
        }
    }

    #[test]
    fn cohomology_vanishes_in_positive_degree() {
        for m in [fixtures::abelian_k0(), fixtures::abelian_khalf(), fixtures::mixed_three()] {
            let m = Arc::new(m);
            for q in 0..=m.d() {
                let h = dprime_cohomology(&m, q, &Truncation::new(2, 1));
                assert!(h[1..].iter().all(|&x| x == 0), "{h:?}");
            }
        }
    }
}
