//! Numerical solver for `z dg/dz + kappa g = f` on a disk, `0 < kappa < 1`.
//!
//! Angular modes come from an FFT on each circle. Radially, samples live on
//! the Chebyshev-Gauss nodes in `a = r^2` over `[0, R^2]`; these radii are also
//! the positive half of the `2 N_r`-point Chebyshev-Gauss grid in `r` over
//! `[-R, R]`, so a mode `s_n(r)` extended by its parity `(-1)^n` has a
//! spectrally accurate Chebyshev expansion in `r`.
//!
//! Per mode, `P` acts as `(r/2) s' + (n/2 + kappa) s`. For `n >= 0` the regular
//! solution is `s_g(r) = 2 int_0^1 tau^{n+2 kappa-1} s_f(r tau) dtau`; for `n < 0`
//! it is `r^m w(r^2)` with `w(a) = int_0^1 t^{kappa-1} h(a t) dt`, `m = -n` and
//! `s_f = r^m h(r^2)`. Endpoint weights are integrated exactly by Gauss-Jacobi.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chebyshev-Gauss radial nodes: `a_j = (A/2)(1 - cos(pi (2j+1) / (2 N_r)))`.
pub fn radial_nodes(radius: f64, n_r: usize) -> Vec<f64> {
    (0..n_r)
        .map(|j| {
            let theta = PI * (2 * j + 1) as f64 / (2 * n_r) as f64;
            // sqrt((A/2)(1 - cos t)) = R sin(t/2), without cancellation.
            radius * (theta / 2.0).sin()
        })
        .collect()
}

/// Complex samples `f(r_j e^{i phi_k})`, `phi_k = 2 pi k / N_phi`, row-major in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarSamples {
    radius: f64,
    n_r: usize,
    n_phi: usize,
    radii: Vec<f64>,
    values: Vec<Complex64>,
}

impl PolarSamples {
    pub fn new(radius: f64, n_r: usize, n_phi: usize, values: Vec<Complex64>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
        }
        if n_r < 2 {
            return Err(Error::Precondition("need at least two radii".into()));
        }
        if !n_phi.is_power_of_two() || n_phi < 4 {
            return Err(Error::Precondition(format!("N_phi = {n_phi} must be a power of two >= 4")));
        }
        if values.len() != n_r * n_phi {
            return Err(Error::Precondition(format!("expected {} samples, got {}", n_r * n_phi, values.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("samples must be finite".into()));
        }
        Ok(PolarSamples { radius, n_r, n_phi, radii: radial_nodes(radius, n_r), values })
    }

    pub fn from_fn(radius: f64, n_r: usize, n_phi: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let radii = radial_nodes(radius, n_r);
        let mut values = Vec::with_capacity(n_r * n_phi);
        for &r in &radii {
            for k in 0..n_phi {
                values.push(f(Complex64::from_polar(r, 2.0 * PI * k as f64 / n_phi as f64)));
            }
        }
        PolarSamples::new(radius, n_r, n_phi, values)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.n_phi + k]
    }

    pub fn point(&self, j: usize, k: usize) -> Complex64 {
        Complex64::from_polar(self.radii[j], 2.0 * PI * k as f64 / self.n_phi as f64)
    }

    /// `max |self - other|` over radii `r <= r_max`.
    pub fn sup_diff(&self, other: &PolarSamples, r_max: f64) -> f64 {
        let mut m = 0.0f64;
        for j in (0..self.n_r).filter(|&j| self.radii[j] <= r_max) {
            for k in 0..self.n_phi {
                m = m.max((self.at(j, k) - other.at(j, k)).norm());
            }
        }
        m
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Text form: grid parameters plus `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolarSamplesData {
    pub radius: f64,
    pub n_r: usize,
    pub n_phi: usize,
    pub values: Vec<[f64; 2]>,
}

impl From<&PolarSamples> for PolarSamplesData {
    fn from(s: &PolarSamples) -> Self {
        PolarSamplesData {
            radius: s.radius,
            n_r: s.n_r,
            n_phi: s.n_phi,
            values: s.values.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<PolarSamplesData> for PolarSamples {
    type Error = Error;
    fn try_from(d: PolarSamplesData) -> Result<Self> {
        let values = d.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        PolarSamples::new(d.radius, d.n_r, d.n_phi, values)
    }
}

// ---------------------------------------------------------------------------
// Chebyshev and quadrature kernels

/// Chebyshev coefficients of the interpolant through Chebyshev-Gauss nodes
/// `x_k = cos(pi (k + 1/2) / N)`.
fn cheb_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (j, cj) in c.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            s += v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos();
        }
        *cj = s * (2.0 / n as f64);
    }
    c[0] *= 0.5;
    c
}

/// Drops trailing coefficients below `rel * max|c|`.
fn trim(mut c: Vec<Complex64>, rel: f64) -> Vec<Complex64> {
    let top = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().is_some_and(|z| z.norm() <= rel * top) {
        c.pop();
    }
    c
}

fn clenshaw(c: &[Complex64], x: f64) -> Complex64 {
    let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * x - b2
}

/// Coefficients of the derivative series.
fn cheb_derivative(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    if n < 2 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in (0..n - 1).rev() {
        d[k] = d[k + 2] + c[k + 1] * (2.0 * (k + 1) as f64);
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Gauss rule for `int_0^1 t^alpha g(t) dt`, `alpha > -1`, with `q` nodes
/// (Golub-Welsch on the Jacobi matrix for `(1+x)^alpha` on `[-1, 1]`).
pub fn gauss_jacobi(alpha: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(alpha > -1.0 && q >= 1);
    let b = alpha;
    let mut m = DMatrix::<f64>::zeros(q, q);
    for n in 0..q {
        let nf = n as f64;
        let s = 2.0 * nf + b;
        m[(n, n)] = if n == 0 { b / (b + 2.0) } else { b * b / (s * (s + 2.0)) };
        if n + 1 < q {
            let k = nf + 1.0;
            let s = 2.0 * k + b;
            let off = (4.0 * k * k * (k + b) * (k + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            m[(n, n + 1)] = off;
            m[(n + 1, n)] = off;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut rule: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, v0 * v0 / (alpha + 1.0))
        })
        .collect();
    rule.sort_by(|x, y| x.0.total_cmp(&y.0));
    rule.into_iter().unzip()
}

// ---------------------------------------------------------------------------
// Modes

/// One angular mode: `s_n(r_j)` and `h_n(r_j^2) = s_n / r^{|n|}`.
#[derive(Clone, Debug)]
pub struct Mode {
    pub n: i64,
    pub s: Vec<Complex64>,
    pub h: Vec<Complex64>,
    /// `h_n(0)`, extrapolated by the fit.
    pub h0: Complex64,
    /// Weighted least-squares misfit `max_j |r_j^{|n|} h(a_j) - s_n(r_j)|`.
    pub fit_residual: f64,
}

#[derive(Clone, Debug)]
pub struct ModeData {
    pub n_max: usize,
    pub radius: f64,
    pub radii: Vec<f64>,
    pub modes: Vec<Mode>,
    /// `(n, sup_r |s_n|)` for resolved modes beyond `n_max`.
    pub discarded: Vec<(i64, f64)>,
    /// Energy near the Nyquist frequency suggests under-resolution.
    pub aliasing_warning: bool,
    pub sup_f: f64,
}

impl ModeData {
    pub fn mode(&self, n: i64) -> Option<&Mode> {
        self.modes.iter().find(|m| m.n == n)
    }
}

fn mode_index(bin: usize, n_phi: usize) -> i64 {
    // The Nyquist bin is read as +N/2.
    if bin <= n_phi / 2 {
        bin as i64
    } else {
        bin as i64 - n_phi as i64
    }
}

/// Angular FFT on every circle: `spectra[j][bin]`, normalized.
fn angular_spectra(s: &PolarSamples) -> Vec<Vec<Complex64>> {
    let fft = FftPlanner::new().plan_fft_forward(s.n_phi);
    let scale = 1.0 / s.n_phi as f64;
    (0..s.n_r)
        .map(|j| {
            let mut row = s.values[j * s.n_phi..(j + 1) * s.n_phi].to_vec();
            fft.process(&mut row);
            row.iter().map(|z| z * scale).collect()
        })
        .collect()
}

fn synthesize(radius: f64, radii: &[f64], n_phi: usize, modes: &[(i64, Vec<Complex64>)]) -> Result<PolarSamples> {
    let n_r = radii.len();
    let ifft = FftPlanner::new().plan_fft_inverse(n_phi);
    let mut values = Vec::with_capacity(n_r * n_phi);
    for j in 0..n_r {
        let mut row = vec![Complex64::new(0.0, 0.0); n_phi];
        for (n, s) in modes {
            row[n.rem_euclid(n_phi as i64) as usize] += s[j];
        }
        ifft.process(&mut row);
        values.extend(row);
    }
    PolarSamples::new(radius, n_r, n_phi, values)
}

/// Fits `s_n(r) ~ r^m h(r^2)` with `h` a Chebyshev series in `a`, by weighted
/// least squares; the degree grows until the misfit reaches noise level.
fn fit_h(radii: &[f64], radius: f64, m: u32, s: &[Complex64], noise: f64) -> (Vec<Complex64>, f64) {
    let n_r = radii.len();
    let a_max = radius * radius;
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    let mut k = 4;
    loop {
        let k_eff = k.min(n_r);
        let design = DMatrix::from_fn(n_r, k_eff, |j, c| {
            let x = 2.0 * radii[j] * radii[j] / a_max - 1.0;
            radii[j].powi(m as i32) * (c as f64 * x.clamp(-1.0, 1.0).acos()).cos()
        });
        let rhs = DMatrix::from_fn(n_r, 2, |j, c| if c == 0 { s[j].re } else { s[j].im });
        let svd = design.clone().svd(true, true);
        let cut = 1e-14 * svd.singular_values.max();
        let sol = svd.solve(&rhs, cut).expect("U and V were computed");
        let fitted = &design * &sol;
        let misfit = (0..n_r)
            .map(|j| Complex64::new(fitted[(j, 0)] - s[j].re, fitted[(j, 1)] - s[j].im).norm())
            .fold(0.0, f64::max);
        let coeffs: Vec<Complex64> = (0..k_eff).map(|c| Complex64::new(sol[(c, 0)], sol[(c, 1)])).collect();
        if best.as_ref().map_or(true, |b| misfit < b.1) {
            best = Some((coeffs, misfit));
        }
        if misfit <= noise || k_eff == n_r || k >= 128 {
            break;
        }
        k *= 2;
    }
    best.expect("at least one fit")
}

fn eval_a_series(c: &[Complex64], a: f64, a_max: f64) -> Complex64 {
    clenshaw(c, (2.0 * a / a_max - 1.0).clamp(-1.0, 1.0))
}

/// Relative level below which a mode is treated as absent.
const MODE_FLOOR: f64 = 1e-13;

/// Splits `s` into angular modes `|n| <= n_max` and extracts `h_n`.
pub fn fourier_modes(s: &PolarSamples, n_max: usize) -> Result<ModeData> {
    if n_max > s.n_phi / 2 {
        return Err(Error::Precondition(format!("n_max = {n_max} exceeds N_phi/2 = {}", s.n_phi / 2)));
    }
    let spectra = angular_spectra(s);
    let sup_f = s.sup_norm();
    let noise = 1e-15 * sup_f.max(f64::MIN_POSITIVE) * s.n_r as f64;
    let a_max = s.radius * s.radius;
    let mut modes = Vec::new();
    let mut discarded = Vec::new();
    let mut near_nyquist = 0.0f64;
    for bin in 0..s.n_phi {
        let n = mode_index(bin, s.n_phi);
        let col: Vec<Complex64> = spectra.iter().map(|row| row[bin]).collect();
        let sup = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if n.unsigned_abs() as usize >= s.n_phi / 2 - s.n_phi / 8 {
            near_nyquist = near_nyquist.max(sup);
        }
        if n.unsigned_abs() as usize > n_max {
            if sup > MODE_FLOOR * sup_f {
                discarded.push((n, sup));
            }
            continue;
        }
        if sup <= MODE_FLOOR * sup_f {
            continue;
        }
        let m = n.unsigned_abs() as u32;
        let (c, fit_residual) = fit_h(&s.radii, s.radius, m, &col, noise);
        let h = s.radii.iter().map(|&r| eval_a_series(&c, r * r, a_max)).collect();
        let h0 = eval_a_series(&c, 0.0, a_max);
        modes.push(Mode { n, s: col, h, h0, fit_residual });
    }
    modes.sort_by_key(|m| m.n);
    discarded.sort_by_key(|x| x.0);
    Ok(ModeData {
        n_max,
        radius: s.radius,
        radii: s.radii.clone(),
        modes,
        discarded,
        aliasing_warning: near_nyquist > 1e-10 * sup_f.max(f64::MIN_POSITIVE),
        sup_f,
    })
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("kappa must lie in (0, 1), got {kappa}")))
    }
}

/// Exponent `nu` of the radial equation `a w' + nu w = h` for mode `n`.
pub fn mode_exponent(n: i64, kappa: f64) -> f64 {
    if n >= 0 {
        n as f64 + kappa
    } else {
        kappa
    }
}

/// `w(a_j) = int_0^1 t^{nu-1} h(a_j t) dt` for `h` sampled at the nodes
/// `a_j = r_j^2` of [`radial_nodes`] on a disk of the given radius.
pub fn radial_solve(radius: f64, h: &[Complex64], n: i64, kappa: f64) -> Result<Vec<Complex64>> {
    check_kappa(kappa)?;
    let n_r = h.len();
    let radii = radial_nodes(radius, n_r);
    let a_max = radius * radius;
    // Nodes in a increase with j, so reversing gives the usual cos ordering.
    let rev: Vec<Complex64> = h.iter().rev().copied().collect();
    let c = trim(cheb_coeffs(&rev), 1e-16);
    let nu = mode_exponent(n, kappa);
    let (t, wq) = gauss_jacobi(nu - 1.0, c.len() / 2 + 2);
    Ok(radii
        .iter()
        .map(|&r| {
            let a = r * r;
            t.iter().zip(&wq).map(|(&ti, &wi)| eval_a_series(&c, a * ti, a_max) * wi).sum()
        })
        .collect())
}

/// Derivative `w'(a_j) = int_0^1 t^nu h'(a_j t) dt`, an independent check on
/// [`radial_solve`] through `a w' + nu w = h`.
pub fn radial_derivative(radius: f64, h: &[Complex64], n: i64, kappa: f64) -> Result<Vec<Complex64>> {
    check_kappa(kappa)?;
    let radii = radial_nodes(radius, h.len());
    let a_max = radius * radius;
    let rev: Vec<Complex64> = h.iter().rev().copied().collect();
    let dc: Vec<Complex64> =
        cheb_derivative(&trim(cheb_coeffs(&rev), 1e-16)).into_iter().map(|z| z * (2.0 / a_max)).collect();
    let nu = mode_exponent(n, kappa);
    let (t, wq) = gauss_jacobi(nu, dc.len() / 2 + 2);
    Ok(radii
        .iter()
        .map(|&r| {
            let a = r * r;
            t.iter().zip(&wq).map(|(&ti, &wi)| eval_a_series(&dc, a * ti, a_max) * wi).sum()
        })
        .collect())
}

/// `g = sum_n e^{i n phi} r^{|n|} w_n(r^2)` on the grid of the given radius.
pub fn reconstruct(radius: f64, n_phi: usize, modes: &[(i64, Vec<Complex64>)]) -> Result<PolarSamples> {
    let n_r = modes.first().map_or(2, |m| m.1.len());
    let radii = radial_nodes(radius, n_r);
    let scaled: Vec<(i64, Vec<Complex64>)> = modes
        .iter()
        .map(|(n, w)| {
            let m = n.unsigned_abs() as i32;
            (*n, w.iter().zip(&radii).map(|(x, &r)| x * r.powi(m)).collect())
        })
        .collect();
    synthesize(radius, &radii, n_phi, &scaled)
}

/// Chebyshev coefficients in `x = r/R` of the mode extended to `[-R, R]`
/// with parity `(-1)^n`.
fn parity_coeffs(s: &[Complex64], n: i64) -> Vec<Complex64> {
    let n_r = s.len();
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    // Nodes x_k = cos(pi (k+1/2) / (2 N_r)): k < N_r are positive and
    // decreasing, i.e. radius index N_r - 1 - k.
    let mut full = Vec::with_capacity(2 * n_r);
    full.extend(s.iter().rev().copied());
    full.extend(s.iter().map(|&x| x * sign));
    trim(cheb_coeffs(&full), 1e-14)
}

/// Applies `P = z d/dz + kappa` spectrally: FFT in `phi`, Chebyshev
/// differentiation in `r`, then `(r/2) s' + (n/2 + kappa) s` per mode.
pub fn apply_p_numeric(g: &PolarSamples, kappa: f64) -> Result<PolarSamples> {
    let spectra = angular_spectra(g);
    let sup = g.sup_norm();
    let mut modes = Vec::new();
    for bin in 0..g.n_phi {
        let n = mode_index(bin, g.n_phi);
        let col: Vec<Complex64> = spectra.iter().map(|row| row[bin]).collect();
        if col.iter().all(|z| z.norm() <= MODE_FLOOR * 1e-3 * sup) {
            continue;
        }
        let c = parity_coeffs(&col, n);
        let dc = cheb_derivative(&c);
        let out = g
            .radii
            .iter()
            .zip(&col)
            .map(|(&r, &v)| {
                let ds = clenshaw(&dc, r / g.radius) / g.radius;
                ds * (r / 2.0) + v * (n as f64 / 2.0 + kappa)
            })
            .collect();
        modes.push((n, out));
    }
    synthesize(g.radius, &g.radii, g.n_phi, &modes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub n_max: usize,
    /// Residuals are measured on `r <= verify_fraction * R`.
    pub verify_fraction: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { n_max: 32, verify_fraction: 0.9 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub modes: Duration,
    pub radial: Duration,
    pub reconstruct: Duration,
    pub verify: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.modes + self.radial + self.reconstruct + self.verify
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeReport {
    pub n: i64,
    pub sup_h: f64,
    pub sup_w: f64,
    pub bound: f64,
    pub fit_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub kappa: f64,
    pub n_max: usize,
    pub verify_radius: f64,
    /// `sup |P g - f|` on `r <= verify_radius`.
    pub residual: f64,
    /// Sum over modes beyond `n_max` of `sup|s_n| / min(nu, |nu - 1|)`.
    pub tail_bound: f64,
    /// Every solved mode satisfies `sup|w_n| <= sup|h_n| / min(nu, |nu-1|)`.
    pub mode_bounds_hold: bool,
    pub aliasing_warning: bool,
    pub modes: Vec<ModeReport>,
    /// Wall-clock timings; kept out of serialized reports.
    #[serde(skip)]
    pub timings: Timings,
}

fn bound_denominator(n: i64, kappa: f64) -> f64 {
    let nu = mode_exponent(n, kappa);
    nu.min((nu - 1.0).abs())
}

/// Full pipeline: modes, radial solves, reconstruction and verification.
pub fn solve(f: &PolarSamples, kappa: f64, config: &SolveConfig) -> Result<(PolarSamples, SolveReport)> {
    check_kappa(kappa)?;
    if !(config.verify_fraction > 0.0 && config.verify_fraction <= 1.0) {
        return Err(Error::Precondition("verify_fraction must lie in (0, 1]".into()));
    }
    let mut timings = Timings::default();
    let t0 = Instant::now();
    let md = fourier_modes(f, config.n_max)?;
    timings.modes = t0.elapsed();

    let t0 = Instant::now();
    let mut g_modes = Vec::with_capacity(md.modes.len());
    let mut reports = Vec::with_capacity(md.modes.len());
    let mut bounds_hold = true;
    for mode in &md.modes {
        let w = radial_solve(f.radius, &mode.h, mode.n, kappa)?;
        let sup_h = mode.h.iter().map(|z| z.norm()).fold(mode.h0.norm(), f64::max);
        let sup_w = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let bound = sup_h / bound_denominator(mode.n, kappa);
        bounds_hold &= sup_w <= bound + 1e-10 * bound.max(1.0);
        let s_g = if mode.n >= 0 {
            direct_nonnegative(&md.radii, f.radius, &mode.s, mode.n, kappa)
        } else {
            let m = (-mode.n) as i32;
            w.iter().zip(&md.radii).map(|(x, &r)| x * r.powi(m)).collect()
        };
        g_modes.push((mode.n, s_g));
        reports.push(ModeReport { n: mode.n, sup_h, sup_w, bound, fit_residual: mode.fit_residual });
    }
    timings.radial = t0.elapsed();

    let t0 = Instant::now();
    let g = synthesize(f.radius, &md.radii, f.n_phi, &g_modes)?;
    timings.reconstruct = t0.elapsed();

    let t0 = Instant::now();
    let verify_radius = config.verify_fraction * f.radius;
    let residual = apply_p_numeric(&g, kappa)?.sup_diff(f, verify_radius);
    timings.verify = t0.elapsed();

    let tail_bound = md.discarded.iter().map(|&(n, sup)| sup / bound_denominator(n, kappa)).sum();
    let report = SolveReport {
        kappa,
        n_max: config.n_max,
        verify_radius,
        residual,
        tail_bound,
        mode_bounds_hold: bounds_hold,
        aliasing_warning: md.aliasing_warning,
        modes: reports,
        timings,
    };
    Ok((g, report))
}

/// `s_g(r) = 2 int_0^1 tau^{n + 2 kappa - 1} s_f(r tau) dtau` for `n >= 0`.
fn direct_nonnegative(radii: &[f64], radius: f64, s: &[Complex64], n: i64, kappa: f64) -> Vec<Complex64> {
    let c = parity_coeffs(s, n);
    let (tau, wq) = gauss_jacobi(n as f64 + 2.0 * kappa - 1.0, c.len() / 2 + 2);
    radii
        .iter()
        .map(|&r| {
            let acc: Complex64 = tau.iter().zip(&wq).map(|(&t, &w)| clenshaw(&c, r * t / radius) * w).sum();
            acc * 2.0
        })
        .collect()
}

/// Built-in test functions: `exp(-gaussian |z|^2) * sum c z^a zbar^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expression {
    #[serde(default)]
    pub gaussian: f64,
    pub terms: Vec<MonomialTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialTerm {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default)]
    pub a: u32,
    #[serde(default)]
    pub b: u32,
}

impl Expression {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let envelope = (-self.gaussian * z.norm_sqr()).exp();
        let poly: Complex64 =
            self.terms.iter().map(|t| Complex64::new(t.re, t.im) * z.powu(t.a) * z.conj().powu(t.b)).sum();
        poly * envelope
    }

    pub fn sample(&self, radius: f64, n_r: usize, n_phi: usize) -> Result<PolarSamples> {
        PolarSamples::from_fn(radius, n_r, n_phi, |z| self.eval(z))
    }
}
