//! Spectral sequence of a finite double complex filtered by the second
//! (anti-holomorphic) degree `q`.
//!
//! Conventions: `d1 : (p,q) -> (p+1,q)`, `d2 : (p,q) -> (p,q+1)`, the two
//! anticommute and the total differential is `D = d1 + d2`. With
//! `F^s = sum_{q >= s}`, `E_0` carries `d1` and `d_r : E_r^{p,q} -> E_r^{p-r+1, q+r}`.
//!
//! Pages are computed directly from the total complex:
//! `Z_r^s = {x in F^s : Dx in F^{s+r}}` and
//! `E_r^s = Z_r^s / (Z_{r-1}^{s+1} + D Z_{r-1}^{s-r+1})`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, Matrix};
use crate::logform::{dsecond, enumerate_keys, LogForm, TermKey};
use crate::model::ModelConfig;
use crate::primitives::{block_labels, dprime_matrix, operator_matrix, Truncation};
use crate::rational::Rational;

/// Finite double complex on the grid `0..width x 0..height`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleComplex {
    dims: Vec<Vec<usize>>,
    d1: Vec<Vec<Matrix>>,
    d2: Vec<Vec<Matrix>>,
    /// Bidegree of grid slot `(0, 0)`, for reporting.
    pub origin: (usize, usize),
}

impl DoubleComplex {
    /// `dims[p][q]`; `d1[p][q]` has `dims[p+1][q]` rows (0 on the last column),
    /// `d2[p][q]` has `dims[p][q+1]` rows (0 on the last row).
    pub fn new(dims: Vec<Vec<usize>>, d1: Vec<Vec<Matrix>>, d2: Vec<Vec<Matrix>>) -> Result<Self> {
        let width = dims.len();
        let height = dims.first().map_or(0, Vec::len);
        if dims.iter().any(|c| c.len() != height) {
            return Err(Error::Config("ragged dimension grid".into()));
        }
        let at = |p: usize, q: usize| if p < width && q < height { dims[p][q] } else { 0 };
        for p in 0..width {
            for q in 0..height {
                let (m1, m2) = (&d1[p][q], &d2[p][q]);
                if m1.cols() != dims[p][q] || m1.rows() != at(p + 1, q) {
                    return Err(Error::Config(format!("d1 at ({p},{q}) has the wrong shape")));
                }
                if m2.cols() != dims[p][q] || m2.rows() != at(p, q + 1) {
                    return Err(Error::Config(format!("d2 at ({p},{q}) has the wrong shape")));
                }
            }
        }
        Ok(DoubleComplex { dims, d1, d2, origin: (0, 0) })
    }

    /// Complex with all differentials zero.
    pub fn zero(dims: Vec<Vec<usize>>) -> Self {
        let width = dims.len();
        let height = dims.first().map_or(0, Vec::len);
        let at = |p: usize, q: usize| if p < width && q < height { dims[p][q] } else { 0 };
        let d1 = (0..width).map(|p| (0..height).map(|q| Matrix::zeros(at(p + 1, q), dims[p][q])).collect()).collect();
        let d2 = (0..width).map(|p| (0..height).map(|q| Matrix::zeros(at(p, q + 1), dims[p][q])).collect()).collect();
        DoubleComplex { dims, d1, d2, origin: (0, 0) }
    }

    pub fn width(&self) -> usize {
        self.dims.len()
    }

    pub fn height(&self) -> usize {
        self.dims.first().map_or(0, Vec::len)
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        if p < self.width() && q < self.height() {
            self.dims[p][q]
        } else {
            0
        }
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    pub fn d1(&self, p: usize, q: usize) -> &Matrix {
        &self.d1[p][q]
    }

    pub fn d2(&self, p: usize, q: usize) -> &Matrix {
        &self.d2[p][q]
    }

    /// `d1 d1 = 0`, `d2 d2 = 0` and `d1 d2 + d2 d1 = 0`.
    pub fn check_invariants(&self) -> bool {
        let (w, h) = (self.width(), self.height());
        for p in 0..w {
            for q in 0..h {
                if p + 1 < w && !self.d1[p + 1][q].mul(&self.d1[p][q]).is_zero() {
                    return false;
                }
                if q + 1 < h && !self.d2[p][q + 1].mul(&self.d2[p][q]).is_zero() {
                    return false;
                }
                if p + 1 < w && q + 1 < h {
                    let a = self.d1[p][q + 1].mul(&self.d2[p][q]);
                    let b = self.d2[p + 1][q].mul(&self.d1[p][q]);
                    if !a.add(&b).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Largest total degree present plus one.
    pub fn total_len(&self) -> usize {
        (self.width() + self.height()).saturating_sub(1)
    }
}

/// Slot of the total complex `Tot^n`: bidegree and coordinate offset.
#[derive(Clone, Copy, Debug)]
struct Slot {
    p: usize,
    q: usize,
    offset: usize,
    dim: usize,
}

/// Admissible model complex `(Ã^{p,q}(T), d', d'')` together with its bases.
#[derive(Clone, Debug)]
pub struct ModelComplex {
    pub complex: DoubleComplex,
    /// `bases[p][q]` indexes grid slot `(p, q)` relative to the origin.
    pub bases: Vec<Vec<Vec<TermKey>>>,
}

/// Assembles `d'` and `d''` on admissible forms within `t`. Differentials
/// leaving the requested ranges are dropped.
pub fn from_model(
    model: &Arc<ModelConfig>,
    p_range: RangeInclusive<usize>,
    q_range: RangeInclusive<usize>,
    t: &Truncation,
) -> ModelComplex {
    let origin = (*p_range.start(), *q_range.start());
    let bases = p_range.map(|p| q_range.clone().map(|q| enumerate_keys(model, p, q, t, true)).collect()).collect();
    assemble(model, bases, origin)
}

/// Summand label: value index, z-weight and zbar-weight `b + 1_K`. Both
/// differentials preserve all three.
type SummandLabel = (usize, Vec<u32>, Vec<u32>);

fn summand_label(k: &TermKey) -> SummandLabel {
    let anti = k.b.iter().enumerate().map(|(j, &x)| x + k.anti.contains(j) as u32).collect();
    (k.v, k.weight(), anti)
}

/// The model complex of [`from_model`] split into its direct summands. Pages
/// and cohomology of the whole are the slotwise sums over the summands.
pub fn model_summands(
    model: &Arc<ModelConfig>,
    p_range: RangeInclusive<usize>,
    q_range: RangeInclusive<usize>,
    t: &Truncation,
) -> Vec<ModelComplex> {
    let origin = (*p_range.start(), *q_range.start());
    let ps: Vec<usize> = p_range.collect();
    let qs: Vec<usize> = q_range.collect();
    let mut groups: BTreeMap<SummandLabel, Vec<Vec<Vec<TermKey>>>> = BTreeMap::new();
    for (i, &p) in ps.iter().enumerate() {
        for (j, &q) in qs.iter().enumerate() {
            for k in enumerate_keys(model, p, q, t, true) {
                let grid =
                    groups.entry(summand_label(&k)).or_insert_with(|| vec![vec![Vec::new(); qs.len()]; ps.len()]);
                grid[i][j].push(k);
            }
        }
    }
    groups.into_values().map(|bases| assemble(model, bases, origin)).collect()
}

fn assemble(model: &Arc<ModelConfig>, bases: Vec<Vec<Vec<TermKey>>>, origin: (usize, usize)) -> ModelComplex {
    let empty = Vec::new();
    let basis = |i: usize, j: usize| bases.get(i).and_then(|c| c.get(j)).unwrap_or(&empty);
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for (i, col) in bases.iter().enumerate() {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for j in 0..col.len() {
            c1.push(dprime_matrix(model, basis(i, j), basis(i + 1, j)));
            c2.push(operator_matrix(model, dsecond, basis(i, j), basis(i, j + 1)));
        }
        d1.push(c1);
        d2.push(c2);
    }
    let dims = bases.iter().map(|c| c.iter().map(Vec::len).collect()).collect();
    let mut complex = DoubleComplex::new(dims, d1, d2).expect("assembled shapes agree");
    complex.origin = origin;
    ModelComplex { complex, bases }
}

/// One page: per-slot dimensions, representatives in total-complex
/// coordinates, and the matrices of `d_r` leaving each slot.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: usize,
    pub dims: Vec<Vec<usize>>,
    /// Representatives of `E_r^{p,q}` as vectors in `Tot^{p+q}`.
    pub reps: Vec<Vec<Vec<Vec<Rational>>>>,
    /// `d_r` out of `(p,q)`, with target `(p-r+1, q+r)`; zero rows if the
    /// target lies outside the grid.
    pub differentials: Vec<Vec<Matrix>>,
}

impl Page {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims[p][q]
    }

    pub fn target(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        let tp = (p + 1).checked_sub(self.r)?;
        let tq = q + self.r;
        (tp < self.dims.len() && tq < self.dims[0].len()).then_some((tp, tq))
    }

    pub fn is_zero_differential(&self) -> bool {
        self.differentials.iter().flatten().all(Matrix::is_zero)
    }

    /// Sum of dimensions per total degree.
    pub fn total_dims(&self) -> Vec<usize> {
        let w = self.dims.len();
        let h = self.dims.first().map_or(0, Vec::len);
        let mut out = vec![0; (w + h).saturating_sub(1)];
        for p in 0..w {
            for q in 0..h {
                out[p + q] += self.dims[p][q];
            }
        }
        out
    }
}

type Basis = Vec<Vec<Rational>>;

/// (p, q, local index) of a generator.
type Generator = (usize, usize, usize);

/// Page engine over a fixed double complex; caches filtration kernels.
pub struct SpectralSequence<'a> {
    dc: &'a DoubleComplex,
    slots: Vec<Vec<Slot>>,
    tot: Vec<Matrix>,
    z_cache: RefCell<HashMap<(i64, i64, usize), Basis>>,
}

impl<'a> SpectralSequence<'a> {
    pub fn new(dc: &'a DoubleComplex) -> Self {
        let n_max = dc.total_len();
        let mut slots = vec![Vec::new(); n_max];
        for (n, s) in slots.iter_mut().enumerate() {
            let mut offset = 0;
            for q in 0..dc.height() {
                let Some(p) = n.checked_sub(q) else { break };
                if p >= dc.width() {
                    continue;
                }
                let dim = dc.dim(p, q);
                s.push(Slot { p, q, offset, dim });
                offset += dim;
            }
        }
        let tot_dim = |s: &[Slot]| s.iter().map(|x| x.dim).sum::<usize>();
        let mut tot = Vec::with_capacity(n_max);
        for n in 0..n_max {
            let empty = Vec::new();
            let next = slots.get(n + 1).unwrap_or(&empty);
            let mut m = Matrix::zeros(tot_dim(next), tot_dim(&slots[n]));
            for src in &slots[n] {
                for dst in next {
                    let block = if dst.q == src.q && dst.p == src.p + 1 {
                        dc.d1(src.p, src.q)
                    } else if dst.p == src.p && dst.q == src.q + 1 {
                        dc.d2(src.p, src.q)
                    } else {
                        continue;
                    };
                    for i in 0..block.rows() {
                        for j in 0..block.cols() {
                            let x = block.get(i, j);
                            if !x.is_zero() {
                                m.set(dst.offset + i, src.offset + j, x.clone());
                            }
                        }
                    }
                }
            }
            tot.push(m);
        }
        SpectralSequence { dc, slots, tot, z_cache: RefCell::new(HashMap::new()) }
    }

    fn tot_dim(&self, n: usize) -> usize {
        self.slots.get(n).map_or(0, |s| s.iter().map(|x| x.dim).sum())
    }

    /// Coordinates of `Tot^n` lying in filtration `>= s`.
    fn filtered(&self, n: usize, s: i64) -> Vec<usize> {
        self.slots[n].iter().filter(|x| x.q as i64 >= s).flat_map(|x| x.offset..x.offset + x.dim).collect()
    }

    /// Basis of `Z_r^s` in `Tot^n`.
    fn z(&self, r: i64, s: i64, n: usize) -> Basis {
        if let Some(b) = self.z_cache.borrow().get(&(r, s, n)) {
            return b.clone();
        }
        let dim = self.tot_dim(n);
        let cols = self.filtered(n, s);
        let rows: Vec<usize> = match self.slots.get(n + 1) {
            Some(next) => {
                next.iter().filter(|x| (x.q as i64) < s + r).flat_map(|x| x.offset..x.offset + x.dim).collect()
            }
            None => Vec::new(),
        };
        let sub = self.tot[n].select_rows(&rows).select_cols(&cols);
        let basis: Basis = if rows.is_empty() {
            cols.iter()
                .map(|&c| {
                    let mut v = vec![Rational::zero(); dim];
                    v[c] = Rational::one();
                    v
                })
                .collect()
        } else {
            sub.kernel()
                .into_iter()
                .map(|k| {
                    let mut v = vec![Rational::zero(); dim];
                    for (&c, x) in cols.iter().zip(k) {
                        v[c] = x;
                    }
                    v
                })
                .collect()
        };
        self.z_cache.borrow_mut().insert((r, s, n), basis.clone());
        basis
    }

    /// Span of `Z_{r-1}^{s+1} + D Z_{r-1}^{s-r+1}` in `Tot^n`.
    fn boundaries(&self, r: i64, s: i64, n: usize) -> EchelonBasis {
        let mut w = EchelonBasis::new(self.tot_dim(n));
        for v in self.z(r - 1, s + 1, n) {
            w.insert(&v);
        }
        if n > 0 {
            for y in self.z(r - 1, s - r + 1, n - 1) {
                w.insert(&self.tot[n - 1].mul_vec(&y));
            }
        }
        w
    }

    /// Representatives of `E_r^{p,q}` in `Tot^{p+q}`, plus the denominator.
    fn reps(&self, r: usize, p: usize, q: usize) -> (Basis, EchelonBasis) {
        let n = p + q;
        let (r, s) = (r as i64, q as i64);
        let mut w = self.boundaries(r, s, n);
        let denominator = w.clone();
        let reps = self.z(r, s, n).into_iter().filter(|z| w.insert(z)).collect();
        (reps, denominator)
    }

    pub fn page(&self, r: usize) -> Page {
        let (w, h) = (self.dc.width(), self.dc.height());
        let mut reps = vec![vec![Vec::new(); h]; w];
        let mut denominators: Vec<Vec<Option<EchelonBasis>>> = vec![vec![None; h]; w];
        for p in 0..w {
            for q in 0..h {
                let (rs, den) = self.reps(r, p, q);
                reps[p][q] = rs;
                denominators[p][q] = Some(den);
            }
        }
        let dims: Vec<Vec<usize>> = reps.iter().map(|c| c.iter().map(Vec::len).collect()).collect();
        let mut page = Page { r, dims, reps, differentials: Vec::new() };
        let mut differentials = Vec::with_capacity(w);
        for p in 0..w {
            let mut col = Vec::with_capacity(h);
            for q in 0..h {
                let src = &page.reps[p][q];
                let Some((tp, tq)) = page.target(p, q) else {
                    col.push(Matrix::zeros(0, src.len()));
                    continue;
                };
                let tgt = &page.reps[tp][tq];
                let den = denominators[tp][tq].as_ref().expect("filled above");
                let n = p + q;
                let mut columns: Vec<Vec<Rational>> = tgt.clone();
                columns.extend(den.vectors().map(<[Rational]>::to_vec));
                let sys = Matrix::from_columns(&columns, self.tot_dim(n + 1));
                let mut m = Matrix::zeros(tgt.len(), src.len());
                for (j, x) in src.iter().enumerate() {
                    let y = self.tot[n].mul_vec(x);
                    let c = sys.solve(&y).expect("D maps Z_r^s into Z_r^{s+r}");
                    for (i, ci) in c.into_iter().take(tgt.len()).enumerate() {
                        m.set(i, j, ci);
                    }
                }
                col.push(m);
            }
            differentials.push(col);
        }
        page.differentials = differentials;
        page
    }

    /// Cohomology dimensions of `(Tot, D)`.
    pub fn total_cohomology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.tot.iter().map(Matrix::rank).collect();
        (0..self.slots.len()).map(|n| self.tot_dim(n) - ranks[n] - if n > 0 { ranks[n - 1] } else { 0 }).collect()
    }
}

pub fn e_page(dc: &DoubleComplex, r: usize) -> Page {
    SpectralSequence::new(dc).page(r)
}

pub fn total_cohomology(dc: &DoubleComplex) -> Vec<usize> {
    SpectralSequence::new(dc).total_cohomology()
}

/// Outcome of [`check_convergence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    /// `dims[r]` is the dimension grid of `E_r` for `r = 0..=r_max+1`.
    pub page_dims: Vec<Vec<Vec<usize>>>,
    /// Pages `r` whose differential `d_r` is nonzero.
    pub nonzero_differentials: Vec<usize>,
    pub page_law: bool,
    pub d_squared_zero: bool,
    pub stabilized: bool,
    pub e_infinity_total: Vec<usize>,
    pub total_cohomology: Vec<usize>,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn ok(&self) -> bool {
        self.page_law && self.d_squared_zero && self.stabilized && self.converged
    }

    /// Report of a direct sum from the reports of its summands, which must
    /// share grid shape and `r_max`.
    pub fn direct_sum(parts: &[ConvergenceReport]) -> Option<ConvergenceReport> {
        let (first, rest) = parts.split_first()?;
        let mut out = first.clone();
        for r in rest {
            add_grids(&mut out.page_dims, &r.page_dims);
            out.nonzero_differentials.extend(&r.nonzero_differentials);
            out.page_law &= r.page_law;
            out.d_squared_zero &= r.d_squared_zero;
            out.stabilized &= r.stabilized;
            add_slices(&mut out.e_infinity_total, &r.e_infinity_total);
            add_slices(&mut out.total_cohomology, &r.total_cohomology);
        }
        out.nonzero_differentials.sort_unstable();
        out.nonzero_differentials.dedup();
        out.converged = parts.iter().all(|r| r.converged) && out.e_infinity_total == out.total_cohomology;
        Some(out)
    }
}

fn add_slices(acc: &mut [usize], x: &[usize]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

fn add_grids(acc: &mut [Vec<Vec<usize>>], x: &[Vec<Vec<usize>>]) {
    for (a, b) in acc.iter_mut().zip(x) {
        for (ac, bc) in a.iter_mut().zip(b) {
            add_slices(ac, bc);
        }
    }
}

/// Slotwise dimensions of `E_r` of a direct sum.
pub fn direct_sum_page_dims(parts: &[DoubleComplex], r: usize) -> Option<Vec<Vec<usize>>> {
    let (first, _) = parts.split_first()?;
    let mut acc = vec![vec![0; first.height()]; first.width()];
    for dc in parts {
        let page = e_page(dc, r);
        for (a, b) in acc.iter_mut().zip(&page.dims) {
            add_slices(a, b);
        }
    }
    Some(acc)
}

fn page_law_holds(page: &Page, next: &Page) -> bool {
    let (w, h) = (page.dims.len(), page.dims.first().map_or(0, Vec::len));
    let r = page.r;
    for p in 0..w {
        for q in 0..h {
            let out = page.differentials[p][q].rank();
            // Incoming d_r starts at (p + r - 1, q - r).
            let inc = match (q.checked_sub(r), (p + r).checked_sub(1)) {
                (Some(sq), Some(sp)) if sp < w => page.differentials[sp][sq].rank(),
                _ => 0,
            };
            if next.dims[p][q] + out + inc != page.dims[p][q] {
                return false;
            }
        }
    }
    true
}

fn d_squared_zero(page: &Page) -> bool {
    let (w, h) = (page.dims.len(), page.dims.first().map_or(0, Vec::len));
    for p in 0..w {
        for q in 0..h {
            if let Some((tp, tq)) = page.target(p, q) {
                if page.target(tp, tq).is_some() {
                    let m = page.differentials[tp][tq].mul(&page.differentials[p][q]);
                    if !m.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Computes `E_0 .. E_{r_max+1}`, checks the page laws and compares
/// `E_infinity = E_{r_max+1}` with the total cohomology. Differentials
/// `d_r` with `r` beyond the grid height vanish for degree reasons, so
/// stabilization means `d_r = 0` for `r_max <= r < height`.
pub fn check_convergence(dc: &DoubleComplex, r_max: usize) -> ConvergenceReport {
    let ss = SpectralSequence::new(dc);
    let last = r_max.max(dc.height()) + 1;
    let pages: Vec<Page> = (0..=last).map(|r| ss.page(r)).collect();
    let page_law = pages.windows(2).all(|w| page_law_holds(&w[0], &w[1]));
    let d_sq = pages.iter().all(d_squared_zero);
    let nonzero: Vec<usize> = pages.iter().filter(|p| !p.is_zero_differential()).map(|p| p.r).collect();
    let stabilized = nonzero.iter().all(|&r| r < r_max);
    let e_inf = pages[r_max + 1].total_dims();
    let total = ss.total_cohomology();
    ConvergenceReport {
        page_dims: pages[..=r_max + 1].iter().map(|p| p.dims.clone()).collect(),
        nonzero_differentials: nonzero,
        page_law,
        d_squared_zero: d_sq,
        stabilized,
        converged: e_inf == total,
        e_infinity_total: e_inf,
        total_cohomology: total,
    }
}

/// True iff `d_s = 0` for every `s >= r`.
pub fn check_degeneration(dc: &DoubleComplex, r: usize) -> bool {
    let ss = SpectralSequence::new(dc);
    (r..=dc.height().max(r)).all(|s| ss.page(s).is_zero_differential())
}

/// Computed kernel of `d'` on `Ã^{0,q}(T)` against the predicted
/// anti-holomorphic basis on trivial-character values.
#[derive(Clone, Debug)]
pub struct KernelDescription {
    pub kernel: Vec<LogForm>,
    pub predicted: Vec<TermKey>,
    pub matches: bool,
}

pub fn kernel_dprime_description(model: &Arc<ModelConfig>, q: usize, t: &Truncation) -> KernelDescription {
    let mut kernel = Vec::new();
    for label in block_labels(model, q, t) {
        let dom = label.keys(model, 0, true);
        if dom.is_empty() {
            continue;
        }
        let cod = label.keys(model, 1, true);
        for v in dprime_matrix(model, &dom, &cod).kernel() {
            let terms = dom.iter().cloned().zip(v);
            kernel.push(LogForm::from_terms(model.clone(), terms).expect("block keys are valid"));
        }
    }
    let predicted: Vec<TermKey> = enumerate_keys(model, 0, q, t, true)
        .into_iter()
        .filter(|k| k.a.iter().all(|&x| x == 0) && model.values().character(k.v).is_trivial())
        .collect();

    // Compare spans inside the coordinate space of (0, q)-keys.
    let coords = enumerate_keys(model, 0, q, t, true);
    let index: BTreeMap<&TermKey, usize> = coords.iter().enumerate().map(|(n, k)| (k, n)).collect();
    let vec_of = |f: &LogForm| {
        let mut v = vec![Rational::zero(); coords.len()];
        for (k, c) in f.terms() {
            v[index[k]] = c.clone();
        }
        v
    };
    let mut span = EchelonBasis::new(coords.len());
    for f in &kernel {
        span.insert(&vec_of(f));
    }
    let kernel_rank = span.rank();
    let mut predicted_span = EchelonBasis::new(coords.len());
    let mut contained = true;
    for k in &predicted {
        let mut v = vec![Rational::zero(); coords.len()];
        v[index[k]] = Rational::one();
        predicted_span.insert(&v);
        contained &= span.contains(&v);
    }
    let matches = contained && predicted_span.rank() == kernel_rank;
    KernelDescription { kernel, predicted, matches }
}

/// Random anticommuting double complex on a `width x height` grid with at
/// most `max_dim` per slot: a direct sum of zero, horizontal, vertical,
/// square and staircase pieces, conjugated by a random invertible change of
/// basis in every slot.
pub fn random_double_complex(rng: &mut ChaCha8Rng, width: usize, height: usize, max_dim: usize) -> DoubleComplex {
    // (p, q, local index) for each generator; edges (src, dst, coeff, is_d1).
    let mut dims = vec![vec![0usize; height]; width];
    let mut edges: Vec<(Generator, Generator, i64, bool)> = Vec::new();
    let pieces = rng.random_range(1..=3 * width * height);
    for _ in 0..pieces {
        let kind = rng.random_range(0..5u32);
        let p = rng.random_range(0..width);
        let q = rng.random_range(0..height);
        let cells: Vec<(usize, usize)> = match kind {
            0 => vec![(p, q)],
            1 => vec![(p, q), (p + 1, q)],
            2 => vec![(p, q), (p, q + 1)],
            3 => vec![(p, q), (p + 1, q), (p, q + 1), (p + 1, q + 1)],
            _ => vec![(p + 1, q), (p + 1, q + 1), (p, q + 1), (p, q + 2)],
        };
        if cells.iter().any(|&(a, b)| a >= width || b >= height || dims[a][b] >= max_dim) {
            continue;
        }
        let ids: Vec<(usize, usize, usize)> = cells
            .iter()
            .map(|&(a, b)| {
                dims[a][b] += 1;
                (a, b, dims[a][b] - 1)
            })
            .collect();
        match kind {
            1 => edges.push((ids[0], ids[1], 1, true)),
            2 => edges.push((ids[0], ids[1], 1, false)),
            3 => {
                edges.push((ids[0], ids[1], 1, true));
                edges.push((ids[0], ids[2], 1, false));
                edges.push((ids[2], ids[3], 1, true));
                edges.push((ids[1], ids[3], -1, false));
            }
            4 => {
                // x=(p+1,q), z=(p+1,q+1), y=(p,q+1), w=(p,q+2)
                edges.push((ids[0], ids[1], 1, false));
                edges.push((ids[2], ids[1], 1, true));
                edges.push((ids[2], ids[3], 1, false));
            }
            _ => {}
        }
    }
    let mut dc = DoubleComplex::zero(dims.clone());
    for (src, dst, c, horizontal) in edges {
        let m = if horizontal { &mut dc.d1[src.0][src.1] } else { &mut dc.d2[src.0][src.1] };
        m.set(dst.2, src.2, Rational::from_int(c));
    }
    // Change of basis: d -> B_dst d B_src^{-1}.
    let bases: Vec<Vec<(Matrix, Matrix)>> =
        dims.iter().map(|c| c.iter().map(|&n| random_unimodular(rng, n)).collect()).collect();
    for p in 0..width {
        for q in 0..height {
            let inv = &bases[p][q].1;
            if p + 1 < width {
                dc.d1[p][q] = bases[p + 1][q].0.mul(&dc.d1[p][q]).mul(inv);
            }
            if q + 1 < height {
                dc.d2[p][q] = bases[p][q + 1].0.mul(&dc.d2[p][q]).mul(inv);
            }
        }
    }
    dc
}

/// Random `L U` with unit diagonals and its inverse.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, Rational::from_int(rng.random_range(-2i64..=2)));
            upper.set(j, i, Rational::from_int(rng.random_range(-2i64..=2)));
        }
    }
    let b = lower.mul(&upper);
    let inv = b.inverse().expect("unit triangular factors are invertible");
    (b, inv)
}

/// Three-slot staircase with a nonzero `d_2`: `x` at (1,0), `z` at (1,1),
/// `y` at (0,1), `w` at (0,2), `d2 x = z`, `d1 y = z`, `d2 y = w`.
pub fn staircase() -> DoubleComplex {
    let dims = vec![vec![0, 1, 1], vec![1, 1, 0]];
    let mut dc = DoubleComplex::zero(dims);
    dc.d2[1][0].set(0, 0, Rational::one());
    dc.d1[0][1].set(0, 0, Rational::one());
    dc.d2[0][1].set(0, 0, Rational::one());
    dc
}

/// Vertical pair `x -> z` under `d2`, giving a nonzero `d_1`.
pub fn vertical_pair() -> DoubleComplex {
    let mut dc = DoubleComplex::zero(vec![vec![1, 1]]);
    dc.d2[0][0].set(0, 0, Rational::one());
    dc
}
