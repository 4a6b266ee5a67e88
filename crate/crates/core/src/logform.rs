//! Polynomial-coefficient logarithmic forms with values in a character-graded
//! module.
//!
//! A term is `c * z^a zbar^b * (dz_I/z_I) ^ dz_J ^ dzbar_K (x) mu_v` where
//! `I` ranges over log branches `0..l`, `J` over smooth coordinates `l..d` and
//! `K` over all coordinates. For a log branch `i` the smooth form `dz_i` is
//! never stored directly: it is `z_i * dz_i/z_i`, i.e. `a_i` is incremented.
//! Factors are ordered holomorphic-first (ascending index), then
//! anti-holomorphic (ascending), and every differential inserts with the sign
//! of the permutation into that order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{char_sum, restrict_to_stratum, stratum_value_map, ModelConfig};
use crate::primitives::Truncation;
use crate::rational::Rational;

/// Set of one-form indices, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorSet(u32);

impl FactorSet {
    pub const EMPTY: FactorSet = FactorSet(0);

    pub fn from_indices(idx: &[usize]) -> Self {
        FactorSet(idx.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn from_bits(bits: u32) -> Self {
        FactorSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, i: usize) -> Self {
        FactorSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        FactorSet(self.0 & !(1 << i))
    }

    pub fn union(self, other: FactorSet) -> Self {
        FactorSet(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: FactorSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Number of elements strictly below `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u32 << i) - 1)).count_ones() as usize
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Removes index `i` and shifts the higher indices down by one.
    pub fn delete_index(self, i: usize) -> Self {
        let low = self.0 & ((1u32 << i) - 1);
        let high = (self.0 >> (i + 1)) << i;
        FactorSet(low | high)
    }

    /// Pairs `(x, y)` with `x` in `self`, `y` in `other` and `x > y`.
    fn inversions(self, other: FactorSet) -> usize {
        other.iter().map(|y| (self.0 >> (y + 1)).count_ones() as usize).sum()
    }
}

impl fmt::Debug for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn parity(n: usize) -> bool {
    n % 2 == 1
}

/// Everything about a term except its coefficient. Ordered by
/// `(v, I, J, K, a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub v: usize,
    pub log: FactorSet,
    pub smooth: FactorSet,
    pub anti: FactorSet,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl TermKey {
    /// Constant 0-form `1 (x) mu_v`.
    pub fn unit(model: &ModelConfig, v: usize) -> Self {
        TermKey {
            v,
            log: FactorSet::EMPTY,
            smooth: FactorSet::EMPTY,
            anti: FactorSet::EMPTY,
            a: vec![0; model.d()],
            b: vec![0; model.d()],
        }
    }

    pub fn z(mut self, a: &[u32]) -> Self {
        for (x, y) in self.a.iter_mut().zip(a) {
            *x += y;
        }
        self
    }

    pub fn zbar(mut self, b: &[u32]) -> Self {
        for (x, y) in self.b.iter_mut().zip(b) {
            *x += y;
        }
        self
    }

    /// Adds the log factor `dz_i/z_i` (requires `i < l`).
    pub fn dlog(mut self, l: usize, i: usize) -> Self {
        assert!(i < l, "dz_{i}/z_{i} needs a log branch");
        self.log = self.log.with(i);
        self
    }

    /// Adds a smooth factor `dz_j`; on a log branch this is `z_j dz_j/z_j`.
    pub fn dz(mut self, l: usize, j: usize) -> Self {
        if j < l {
            self.log = self.log.with(j);
            self.a[j] += 1;
        } else {
            self.smooth = self.smooth.with(j);
        }
        self
    }

    pub fn dzbar(mut self, k: usize) -> Self {
        self.anti = self.anti.with(k);
        self
    }

    pub fn holomorphic(&self) -> FactorSet {
        self.log.union(self.smooth)
    }

    pub fn p(&self) -> usize {
        self.log.len() + self.smooth.len()
    }

    pub fn q(&self) -> usize {
        self.anti.len()
    }

    pub fn degree(&self) -> usize {
        self.p() + self.q()
    }

    /// Polynomial degree in `z`, counting each smooth `dz_j` as one.
    ///
    /// This is the grading preserved by `d'`, and is what truncations bound.
    pub fn z_degree(&self) -> u32 {
        self.a.iter().sum::<u32>() + self.smooth.len() as u32
    }

    pub fn zbar_degree(&self) -> u32 {
        self.b.iter().sum()
    }

    /// Per-coordinate `z`-weight, `a_j` plus one for a smooth factor `dz_j`.
    pub fn weight(&self) -> Vec<u32> {
        self.a.iter().enumerate().map(|(j, &x)| x + self.smooth.contains(j) as u32).collect()
    }

    fn is_admissible_in(&self, model: &ModelConfig) -> bool {
        self.log.iter().all(|i| self.a[i] >= 1 || !model.kappa(self.v, i).is_zero())
    }

    fn validate(&self, model: &ModelConfig) -> Result<()> {
        let (d, l) = (model.d(), model.l());
        let bad = |msg: String| Err(Error::Config(msg));
        if self.v >= model.values().len() {
            return bad(format!("value index {} out of range", self.v));
        }
        if self.a.len() != d || self.b.len() != d {
            return bad(format!("exponent vectors must have length {d}"));
        }
        if self.log.bits() >> l != 0 {
            return bad(format!("log factors {:?} outside branches 0..{l}", self.log));
        }
        if self.smooth.bits() & ((1u32 << l) - 1) != 0 || self.smooth.bits() >> d != 0 {
            return bad(format!("smooth factors {:?} outside {l}..{d}", self.smooth));
        }
        if self.anti.bits() >> d != 0 {
            return bad(format!("anti-holomorphic factors {:?} outside 0..{d}", self.anti));
        }
        Ok(())
    }
}

/// Finite rational combination of terms over a fixed model, always in normal
/// form: canonical order, merged keys, no zero coefficients.
#[derive(Clone)]
pub struct LogForm {
    model: Arc<ModelConfig>,
    terms: BTreeMap<TermKey, Rational>,
}

impl PartialEq for LogForm {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.model, &other.model) || self.model == other.model) && self.terms == other.terms
    }
}

impl Eq for LogForm {}

impl fmt::Debug for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(
                f,
                "({c:?}) z^{:?} zb^{:?} I{:?} J{:?} K{:?} {}",
                k.a,
                k.b,
                k.log,
                k.smooth,
                k.anti,
                self.model.values().element(k.v).name
            )?;
        }
        Ok(())
    }
}

fn accumulate(map: &mut BTreeMap<TermKey, Rational>, key: TermKey, coeff: Rational) {
    if coeff.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(coeff);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += &coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl LogForm {
    pub fn zero(model: Arc<ModelConfig>) -> Self {
        LogForm { model, terms: BTreeMap::new() }
    }

    /// Builds a form from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_terms(model: Arc<ModelConfig>, terms: impl IntoIterator<Item = (TermKey, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            k.validate(&model)?;
            accumulate(&mut map, k, c);
        }
        Ok(LogForm { model, terms: map })
    }

    pub fn term(model: Arc<ModelConfig>, key: TermKey, coeff: Rational) -> Result<Self> {
        LogForm::from_terms(model, [(key, coeff)])
    }

    pub fn model(&self) -> &Arc<ModelConfig> {
        &self.model
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &TermKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(p, q)` if every term has the same bidegree; `None` for zero or mixed forms.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|k| (k.p(), k.q()));
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    /// Total degree if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(TermKey::degree);
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    pub fn scale(&self, s: &Rational) -> LogForm {
        if s.is_zero() {
            return LogForm::zero(self.model.clone());
        }
        LogForm { model: self.model.clone(), terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect() }
    }

    pub fn fits(&self, t: &Truncation) -> bool {
        self.terms.keys().all(|k| t.contains(k))
    }

    fn same_model(&self, other: &LogForm) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || self.model == other.model {
            Ok(())
        } else {
            Err(Error::Config("forms live over different models".into()))
        }
    }

    fn combine(&self, other: &LogForm, sign: Rational) -> LogForm {
        self.same_model(other).expect("model mismatch in form arithmetic");
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            accumulate(&mut terms, k.clone(), c * &sign);
        }
        LogForm { model: self.model.clone(), terms }
    }
}

impl Add for &LogForm {
    type Output = LogForm;
    fn add(self, rhs: &LogForm) -> LogForm {
        self.combine(rhs, Rational::one())
    }
}

impl Sub for &LogForm {
    type Output = LogForm;
    fn sub(self, rhs: &LogForm) -> LogForm {
        self.combine(rhs, -Rational::one())
    }
}

impl Neg for &LogForm {
    type Output = LogForm;
    fn neg(self) -> LogForm {
        self.scale(&-Rational::one())
    }
}

/// Re-normalizes a form. Forms are kept normalized on construction, so this
/// only re-merges; it is idempotent.
pub fn normal_form(f: &LogForm) -> LogForm {
    LogForm::from_terms(f.model.clone(), f.terms.iter().map(|(k, c)| (k.clone(), c.clone())))
        .expect("terms of an existing form are valid")
}

fn signed(c: Rational, negative: bool) -> Rational {
    if negative {
        -c
    } else {
        c
    }
}

/// Holomorphic part of the connection: `sum_i P_i (dz_i/z_i ^ -)` on log
/// branches with `P_i = z_i d/dz_i + kappa_i`, and `sum_j d/dz_j (dz_j ^ -)`
/// on smooth coordinates.
pub fn dprime(f: &LogForm) -> LogForm {
    let model = &f.model;
    let (d, l) = (model.d(), model.l());
    let mut out = BTreeMap::new();
    for (k, c) in &f.terms {
        let hol = k.holomorphic();
        for i in (0..l).filter(|&i| !k.log.contains(i)) {
            let eigen = Rational::from(k.a[i]) + model.kappa(k.v, i);
            if eigen.is_zero() {
                continue;
            }
            let mut key = k.clone();
            key.log = k.log.with(i);
            accumulate(&mut out, key, signed(c * &eigen, parity(hol.count_below(i))));
        }
        for j in (l..d).filter(|&j| !k.smooth.contains(j) && k.a[j] > 0) {
            let mut key = k.clone();
            key.a[j] -= 1;
            key.smooth = k.smooth.with(j);
            let coeff = c * &Rational::from(k.a[j]);
            accumulate(&mut out, key, signed(coeff, parity(hol.count_below(j))));
        }
    }
    LogForm { model: f.model.clone(), terms: out }
}

/// Anti-holomorphic differential `sum_k d/dzbar_k (dzbar_k ^ -)`, with the
/// extra sign for passing the holomorphic factors.
pub fn dsecond(f: &LogForm) -> LogForm {
    let d = f.model.d();
    let mut out = BTreeMap::new();
    for (key0, c) in &f.terms {
        let p = key0.p();
        for k in (0..d).filter(|&k| !key0.anti.contains(k) && key0.b[k] > 0) {
            let mut key = key0.clone();
            key.b[k] -= 1;
            key.anti = key0.anti.with(k);
            let coeff = c * &Rational::from(key0.b[k]);
            accumulate(&mut out, key, signed(coeff, parity(p + key0.anti.count_below(k))));
        }
    }
    LogForm { model: f.model.clone(), terms: out }
}

/// Total differential `d' + d''`.
pub fn dtotal(f: &LogForm) -> LogForm {
    &dprime(f) + &dsecond(f)
}

/// Graded bracket `[phi (x) x, psi (x) y] = (phi ^ psi) (x) [x, y]`, where the
/// value bracket picks up the carry monomial of the characters.
pub fn bracket(f: &LogForm, g: &LogForm) -> Result<LogForm> {
    f.same_model(g)?;
    let model = &f.model;
    let vm = model.values();
    let Some(structure) = vm.structure() else {
        return Err(Error::Config("value module has no Lie structure".into()));
    };
    let l = model.l();
    let mut carries: BTreeMap<(usize, usize), Vec<u32>> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (k1, c1) in &f.terms {
        let (h1, a1) = (k1.holomorphic(), k1.anti);
        for (k2, c2) in &g.terms {
            let (h2, a2) = (k2.holomorphic(), k2.anti);
            if !h1.is_disjoint(h2) || !a1.is_disjoint(a2) {
                continue;
            }
            let mut targets = structure.bracket(k1.v, k2.v).peekable();
            if targets.peek().is_none() {
                continue;
            }
            let flips = a1.len() * h2.len() + h1.inversions(h2) + a1.inversions(a2);
            let carry = carries
                .entry((k1.v, k2.v))
                .or_insert_with(|| char_sum(vm.character(k1.v), vm.character(k2.v)).expect("uniform lengths").1);
            let base = signed(c1 * c2, parity(flips));
            let mut a: Vec<u32> = k1.a.iter().zip(&k2.a).map(|(x, y)| x + y).collect();
            for i in 0..l {
                a[i] += carry[i];
            }
            let b: Vec<u32> = k1.b.iter().zip(&k2.b).map(|(x, y)| x + y).collect();
            for (v, s) in targets {
                let key = TermKey {
                    v,
                    log: k1.log.union(k2.log),
                    smooth: k1.smooth.union(k2.smooth),
                    anti: a1.union(a2),
                    a: a.clone(),
                    b: b.clone(),
                };
                accumulate(&mut out, key, &base * s);
            }
        }
    }
    Ok(LogForm { model: f.model.clone(), terms: out })
}

/// Membership in the admissible subcomplex: every log factor `dz_i/z_i`
/// against a trivial-monodromy value must carry `a_i >= 1`.
pub fn is_admissible(f: &LogForm) -> bool {
    f.terms.keys().all(|k| k.is_admissible_in(&f.model))
}

/// Residue along branch `i`, valued in the monodromy-invariant part on the
/// stratum `{z_i = 0}`.
pub fn residue(f: &LogForm, i: usize) -> Result<LogForm> {
    let model = &f.model;
    if i >= model.l() {
        return Err(Error::Precondition(format!("residue along branch {} but l = {}", i + 1, model.l())));
    }
    let s = BTreeSet::from([i]);
    let stratum = Arc::new(restrict_to_stratum(model, &s)?);
    let vmap = stratum_value_map(model, &s);
    let mut out = BTreeMap::new();
    for (k, c) in &f.terms {
        let keep =
            k.log.contains(i) && model.kappa(k.v, i).is_zero() && k.a[i] == 0 && k.b[i] == 0 && !k.anti.contains(i);
        if !keep {
            continue;
        }
        let drop_at =
            |v: &[u32]| -> Vec<u32> { v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect() };
        let key = TermKey {
            v: vmap[k.v].expect("invariant value survives"),
            log: k.log.without(i).delete_index(i),
            smooth: k.smooth.delete_index(i),
            anti: k.anti.delete_index(i),
            a: drop_at(&k.a),
            b: drop_at(&k.b),
        };
        accumulate(&mut out, key, signed(c.clone(), parity(k.log.count_below(i))));
    }
    Ok(LogForm { model: stratum, terms: out })
}

/// Iterated residue over the branches in `s`, taken in ascending order.
pub fn residue_m(f: &LogForm, s: &BTreeSet<usize>) -> Result<LogForm> {
    if s.is_empty() {
        return Err(Error::Precondition("residue over an empty branch set".into()));
    }
    let mut cur = f.clone();
    for (removed, &i) in s.iter().enumerate() {
        cur = residue(&cur, i - removed)?;
    }
    Ok(cur)
}

/// Enumerates all term keys of bidegree `(p, q)` within `t`, optionally only
/// the admissible ones, in canonical order.
pub fn enumerate_keys(model: &ModelConfig, p: usize, q: usize, t: &Truncation, admissible_only: bool) -> Vec<TermKey> {
    let (d, l) = (model.d(), model.l());
    let mut out = Vec::new();
    let hol_sets = subsets_of_size(d, p);
    let anti_sets = subsets_of_size(d, q);
    let zbar_monos = exponent_vectors(d, t.max_zbar_deg);
    for v in 0..model.values().len() {
        for &h in &hol_sets {
            let log = FactorSet(h.0 & ((1u32 << l) - 1));
            let smooth = FactorSet(h.0 & !((1u32 << l) - 1));
            let budget = t.max_z_deg as i64 - smooth.len() as i64;
            if budget < 0 {
                continue;
            }
            let z_monos = exponent_vectors(d, budget as u32);
            for &anti in &anti_sets {
                for a in &z_monos {
                    for b in &zbar_monos {
                        let key = TermKey { v, log, smooth, anti, a: a.clone(), b: b.clone() };
                        if !admissible_only || key.is_admissible_in(model) {
                            out.push(key);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<FactorSet> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(FactorSet).collect()
}

/// All exponent vectors of length `n` with total degree at most `max`.
pub(crate) fn exponent_vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max, &mut Vec::with_capacity(n), &mut out);
    out
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> FactorSet {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    FactorSet::from_indices(&idx[..k])
}

fn random_exponents(rng: &mut ChaCha8Rng, base: &mut [u32], extra_max: u32) {
    if base.is_empty() {
        return;
    }
    let extra = rng.random_range(0..=extra_max);
    for _ in 0..extra {
        let j = rng.random_range(0..base.len());
        base[j] += 1;
    }
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = rng.random_range(-4i64..=3);
    if n >= 0 {
        n += 1;
    }
    Rational::new(n, rng.random_range(1i64..=3))
}

/// Random homogeneous `(p, q)`-form with z- and zbar-degree at most `max_deg`,
/// drawing from `rng`. Up to `max_terms` terms are generated.
pub fn random_form_with(
    rng: &mut ChaCha8Rng,
    model: &Arc<ModelConfig>,
    p: usize,
    q: usize,
    max_deg: u32,
    max_terms: usize,
    admissible: bool,
) -> LogForm {
    let (d, l) = (model.d(), model.l());
    let n_values = model.values().len();
    let mut terms = Vec::new();
    if n_values == 0 || p > d || q > d {
        return LogForm::zero(model.clone());
    }
    let n_terms = rng.random_range(1..=max_terms.max(1));
    for _ in 0..n_terms {
        for _attempt in 0..16 {
            let v = rng.random_range(0..n_values);
            let hol = random_subset(rng, d, p);
            let anti = random_subset(rng, d, q);
            let log = FactorSet(hol.0 & ((1u32 << l) - 1));
            let smooth = FactorSet(hol.0 & !((1u32 << l) - 1));
            let mut a = vec![0u32; d];
            if admissible {
                for i in log.iter().filter(|&i| model.kappa(v, i).is_zero()) {
                    a[i] = 1;
                }
            }
            let used = a.iter().sum::<u32>() + smooth.len() as u32;
            if used > max_deg {
                continue;
            }
            random_exponents(rng, &mut a, max_deg - used);
            let mut b = vec![0u32; d];
            random_exponents(rng, &mut b, max_deg);
            terms.push((TermKey { v, log, smooth, anti, a, b }, random_coeff(rng)));
            break;
        }
    }
    LogForm::from_terms(model.clone(), terms).expect("generated keys are valid")
}

/// Deterministic pseudorandom `(p, q)`-form; admissible when requested.
pub fn random_form(model: &Arc<ModelConfig>, p: usize, q: usize, max_deg: u32, seed: u64, admissible: bool) -> LogForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_form_with(&mut rng, model, p, q, max_deg, 3, admissible)
}

/// Serialized view of a term; indices are 1-based and `a` is the stored
/// exponent in the log frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermView {
    pub coeff: Rational,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    #[serde(rename = "I")]
    pub log: Vec<usize>,
    #[serde(rename = "J")]
    pub smooth: Vec<usize>,
    #[serde(rename = "K")]
    pub anti: Vec<usize>,
    pub v: String,
}

impl LogForm {
    pub fn to_views(&self) -> Vec<TermView> {
        let one_based = |s: FactorSet| s.iter().map(|i| i + 1).collect();
        self.terms
            .iter()
            .map(|(k, c)| TermView {
                coeff: c.clone(),
                a: k.a.clone(),
                b: k.b.clone(),
                log: one_based(k.log),
                smooth: one_based(k.smooth),
                anti: one_based(k.anti),
                v: self.model.values().element(k.v).name.clone(),
            })
            .collect()
    }

    pub fn from_views(model: Arc<ModelConfig>, views: &[TermView]) -> Result<Self> {
        let set = |idx: &[usize]| -> Result<FactorSet> {
            if idx.iter().any(|&i| i == 0 || i > model.d()) {
                return Err(Error::Parse(format!("factor index out of range in {idx:?}")));
            }
            Ok(FactorSet::from_indices(&idx.iter().map(|i| i - 1).collect::<Vec<_>>()))
        };
        let mut terms = Vec::with_capacity(views.len());
        for t in views {
            let v = model.values().index_of(&t.v).ok_or_else(|| Error::Parse(format!("unknown value {:?}", t.v)))?;
            let key = TermKey {
                v,
                log: set(&t.log)?,
                smooth: set(&t.smooth)?,
                anti: set(&t.anti)?,
                a: t.a.clone(),
                b: t.b.clone(),
            };
            terms.push((key, t.coeff.clone()));
        }
        LogForm::from_terms(model, terms)
    }
}

impl Serialize for LogForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_views().serialize(serializer)
    }
}
