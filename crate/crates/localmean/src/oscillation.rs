//! Sign-change machinery: the tapered resonance kernel, its closed-form
//! transform, windowed averages of the normalized dual mean, short-window
//! extremum detection, and sign/gap scanners over coefficient streams.
//!
//! The kernel K(t) = (1 − |t|)(1 + τ cos(2ρt + θ)) concentrates the average
//! of S₀((T + 2αt)^{2A}) on the first dual frequency when ρ = (hμ₁)^{1/(2A)}α
//! and θ = κπ; at resonance points T on the lattice 2nπ/(hμ₁)^{1/(2A)} the
//! average is pinned away from zero, which is what makes two-sided extremum
//! detection work.

use crate::feq::{DerivedConstants, FunctionalEquationSpec};
use crate::gamma::ExpansionCoefficients;
use crate::quad::gl_table;
use crate::streams::{CoefficientStream, StreamPoint};
use crate::voronoi::{direct_local_core, main_term_residues, series_components};
use crate::weight::{self, WeightProfile};
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

/// Tapered resonance kernel parameters. K is nonnegative on [−1, 1] iff
/// |tau| ≤ 1; `alpha` is the half-scale of the window in T-space and fixes
/// the resonant choice rho = (hμ₁)^{1/(2A)}·alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub tau: f64,
    pub rho: f64,
    pub theta: f64,
    pub alpha: f64,
}

/// Detection tuning: relative window scale `delta` (the weight profile's
/// concentration), window constant `c0`, dual split length `n_split`, and
/// the scan grid size `t_grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    pub delta: f64,
    pub c0: f64,
    pub n_split: usize,
    pub t_grid: usize,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            delta: 0.1,
            c0: 2.0,
            n_split: 50,
            t_grid: 64,
        }
    }
}

impl DetectionParams {
    fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.delta > 0.0 && self.delta <= 1.0) || !self.delta.is_finite() {
            issues.push(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if !(self.c0 > 0.0) || !self.c0.is_finite() {
            issues.push(format!("c0 must be positive, got {}", self.c0));
        }
        if self.n_split == 0 {
            issues.push(String::from("n_split must be at least 1"));
        }
        if self.t_grid < 2 {
            issues.push(format!("t_grid must be at least 2, got {}", self.t_grid));
        }
        issues
    }
}

/// K(t) = (1 − |t|)(1 + τ cos(2ρt + θ)) for t ∈ [−1, 1].
pub fn kernel(params: &KernelParams, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "kernel argument must lie in [-1, 1], got {t}"
        )));
    }
    Ok((1.0 - t.abs()) * (1.0 + params.tau * (2.0 * params.rho * t + params.theta).cos()))
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// ∫₋₁¹ K(t) e^{2iυt} dt in closed form:
/// sinc²(υ) + (τ/2)(e^{iθ} sinc²(υ + ρ) + e^{−iθ} sinc²(υ − ρ)).
pub fn kernel_transform(params: &KernelParams, upsilon: f64) -> Complex64 {
    let s0 = sinc(upsilon);
    let sp = sinc(upsilon + params.rho);
    let sm = sinc(upsilon - params.rho);
    let half_tau = Complex64::new(0.0, params.theta).exp() * (0.5 * params.tau);
    Complex64::new(s0 * s0, 0.0) + half_tau * (sp * sp) + half_tau.conj() * (sm * sm)
}

/// S₀(x) = Σ_{n≤N} b_n μ_n^{a} ∫ φ(u) u^{a} cos((hμ_n x u)^{1/(2A)} + kπ) du,
/// the dual mean with the 1/(2A)·e₀ω(hx)^{1+a} prefactor stripped.
fn normalized_dual_mean(
    consts: &DerivedConstants,
    points: &[StreamPoint],
    profile: &WeightProfile,
    x: f64,
) -> Result<Complex64> {
    let two_a = 2.0 * consts.big_a;
    let base = 1.0 / two_a;
    let offset = consts.k * PI;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in points {
        let scale = (consts.h * p.lambda * x).powf(base);
        let osc = weight::oscillatory_integral(profile, base, scale, consts.a, offset)?;
        sum += p.a * (consts.a * p.lambda.ln()).exp() * osc;
    }
    Ok(sum)
}

/// Windowed average of the normalized dual mean against the kernel,
/// together with its resonance prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAverage {
    /// τ(|b₁|/(b₁μ₁^{iξ})) ∫₋₁¹ S₀((T + 2αt)^{2A}) K(t) dt by quadrature,
    /// with the dual sum cut at `terms_used`.
    pub numeric: Complex64,
    /// τ²(|b₁|/(2μ₁^ϑ)) cos((hμ₁)^{1/(2A)}T + κπ − θ + iηπ) ∫φ; at the
    /// resonant taper θ = κπ the cosine argument is (hμ₁)^{1/(2A)}T + iηπ.
    pub analytic: Complex64,
    pub terms_used: usize,
    /// (2α)^{2A}: anchors below this sit too close to the window edge for
    /// the average to isolate the first frequency.
    pub x_floor: f64,
}

/// Averages S₀((T + 2αt)^{2A}) against the kernel over t ∈ [−1, 1].
///
/// `big_t` must lie in [(2X)^{1/(2A)}, (3X)^{1/(2A)}] for the profile's
/// anchor X, and must exceed 2α so the window stays inside [X, 8X].
pub fn kernel_average(
    consts: &DerivedConstants,
    stream: &CoefficientStream,
    profile: &WeightProfile,
    big_t: f64,
    params: &KernelParams,
    detection: &DetectionParams,
) -> Result<KernelAverage> {
    let issues = detection.validate();
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let two_a = 2.0 * consts.big_a;
    let x_anchor = profile.anchor();
    let lo = (2.0 * x_anchor).powf(1.0 / two_a);
    let hi = (3.0 * x_anchor).powf(1.0 / two_a);
    if !(big_t >= lo && big_t <= hi) {
        return Err(Error::Domain(format!(
            "resonance point {big_t} outside the bracket [{lo:.6}, {hi:.6}] of anchor {x_anchor}"
        )));
    }
    if big_t <= 2.0 * params.alpha {
        return Err(Error::Domain(format!(
            "resonance point {big_t} must exceed twice the window half-scale alpha = {}",
            params.alpha
        )));
    }
    let dual = stream.dual_points();
    let n_used = dual.len().min(detection.n_split);
    let points = &dual[..n_used];
    // Phase of term n is linear in t: (hμ_n)^{1/(2A)}(T + 2αt); size the
    // t-grid to the fastest term plus the taper frequency.
    let mut rate = 0.0f64;
    if let Some(last) = points.last() {
        rate = 2.0 * params.alpha.abs() * (consts.h * last.lambda).powf(1.0 / two_a);
    }
    let span = rate + 2.0 * params.rho.abs();
    let table = gl_table(profile.nodes_for_phase(span)?);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t0, t1) in [(-1.0, 0.0), (0.0, 1.0)] {
        let mut failure: Option<Error> = None;
        let panel = table.integrate(t0, t1, |t| {
            let x_t = (big_t + 2.0 * params.alpha * t).powf(two_a);
            let k_t =
                (1.0 - t.abs()) * (1.0 + params.tau * (2.0 * params.rho * t + params.theta).cos());
            match normalized_dual_mean(consts, points, profile, x_t) {
                Ok(v) => v * k_t,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(f64::NAN, f64::NAN)
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        acc += panel;
    }
    let b1 = dual[0].a;
    let mu1 = dual[0].lambda;
    let rot = (Complex64::new(0.0, consts.xi()) * mu1.ln()).exp();
    let numeric = acc * (params.tau * b1.norm()) / (b1 * rot);
    let phase = (consts.h * mu1).powf(1.0 / two_a) * big_t + consts.kappa() * PI - params.theta;
    let analytic = Complex64::new(phase, consts.eta() * PI).cos()
        * (0.5 * params.tau * params.tau * b1.norm() * mu1.powf(-consts.theta()))
        * weight::weight_integral(profile);
    Ok(KernelAverage {
        numeric,
        analytic,
        terms_used: n_used,
        x_floor: (2.0 * params.alpha).powf(two_a),
    })
}

/// Smallest window half-scale α making the off-resonance remainder of the
/// windowed average at most δ/L: α = (δ⁻¹ Σ_{n≤N} |b_n| μ_n^{−ϑ−1/A})^{1/2}.
pub fn select_alpha(
    consts: &DerivedConstants,
    stream: &CoefficientStream,
    detection: &DetectionParams,
) -> Result<f64> {
    let issues = detection.validate();
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let q = consts.theta() + 1.0 / consts.big_a;
    let dual = stream.dual_points();
    let n = dual.len().min(detection.n_split);
    let sum: f64 = dual[..n]
        .iter()
        .map(|p| p.a.norm() * p.lambda.powf(-q))
        .sum();
    Ok((sum / detection.delta).sqrt())
}

/// Resonance lattice T = 2nπ/(hμ₁)^{1/(2A)} restricted to
/// [(2X)^{1/(2A)}, (3X)^{1/(2A)}] for the anchor X.
pub fn resonance_grid(
    consts: &DerivedConstants,
    mu1: f64,
    x_anchor: f64,
) -> Result<Vec<f64>> {
    if !(mu1 > 0.0) || !(x_anchor > 0.0) || !mu1.is_finite() || !x_anchor.is_finite() {
        return Err(Error::Domain(format!(
            "resonance grid needs positive first frequency and anchor, got {mu1} and {x_anchor}"
        )));
    }
    let inv = 1.0 / (2.0 * consts.big_a);
    let step = 2.0 * PI / (consts.h * mu1).powf(inv);
    let lo = (2.0 * x_anchor).powf(inv);
    let hi = (3.0 * x_anchor).powf(inv);
    let mut n = (lo / step).ceil().max(1.0) as u64;
    let mut out = Vec::new();
    loop {
        let t = step * n as f64;
        if t > hi {
            break;
        }
        out.push(t);
        n += 1;
    }
    Ok(out)
}

/// Which representation of the local mean the extremum scan evaluates.
#[derive(Clone, Copy)]
pub enum DetectionSide<'a> {
    /// Windowed primal sum minus the residue main term.
    Direct,
    /// Dual expansion cut at the first `terms` dual points.
    Series {
        coeffs: &'a ExpansionCoefficients,
        terms: usize,
    },
}

/// Outcome of a short-window extremum scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaReport {
    pub x_plus: f64,
    pub x_minus: f64,
    pub value_plus: f64,
    pub value_minus: f64,
    /// True when the scan found both a positive and a negative value.
    pub success: bool,
    /// On success, a point between the two extrema where the scanned
    /// function changes sign.
    pub crossing: Option<f64>,
}

/// Scans g(t) = Re(ς⁻¹ S_φ(t) (μ₁ht)^{−iξ}), ς = ωe₀b₁/|b₁|, on a grid over
/// [x − c₀x^{1−1/(2A)}, x + c₀x^{1−1/(2A)}] and reports the extreme values.
///
/// The weight profile is rebuilt at anchor x with the detection δ, so the
/// window scale is L = δ⁻¹x^{1/(2A)}. Detection is best-effort: a window in
/// which g keeps one sign reports `success = false` without erring.
pub fn detect_extrema(
    spec: &FunctionalEquationSpec,
    consts: &DerivedConstants,
    stream: &CoefficientStream,
    x: f64,
    detection: &DetectionParams,
    side: DetectionSide<'_>,
) -> Result<ExtremaReport> {
    let issues = detection.validate();
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "detection anchor must be positive and finite, got {x}"
        )));
    }
    if let DetectionSide::Series { terms, .. } = side {
        if terms == 0 {
            return Err(Error::Domain(String::from(
                "series-side detection needs at least one dual term",
            )));
        }
    }
    let two_a = 2.0 * consts.big_a;
    let half_width = detection.c0 * x.powf(1.0 - 1.0 / two_a);
    let lo = x - half_width;
    let hi = x + half_width;
    if lo <= 0.0 {
        return Err(Error::Domain(format!(
            "detection window [{lo:.6}, {hi:.6}] leaves the positive axis; shrink c0"
        )));
    }
    let profile = WeightProfile::new(detection.delta, x, consts.big_a)?;
    let dual = stream.dual_points();
    let b1 = dual[0].a;
    let mu1 = dual[0].lambda;
    let varsigma = consts.omega * consts.e0 * b1 / b1.norm();
    let xi = consts.xi();
    let eval = |t: f64| -> Result<f64> {
        let s_phi = match side {
            DetectionSide::Direct => {
                let (direct, _) = direct_local_core(stream, &profile, t)?;
                direct - main_term_residues(spec, &profile, t)?
            }
            DetectionSide::Series { coeffs, terms } => {
                let n = dual.len().min(terms);
                let parts = series_components(consts, coeffs, &profile, t, &dual[..n])?;
                parts.iter().sum()
            }
        };
        let rot = (Complex64::new(0.0, -xi) * (mu1 * consts.h * t).ln()).exp();
        Ok((s_phi * rot / varsigma).re)
    };
    let m = detection.t_grid;
    let mut best_hi = (f64::NEG_INFINITY, lo);
    let mut best_lo = (f64::INFINITY, lo);
    for i in 0..m {
        let t = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        let v = eval(t)?;
        if v > best_hi.0 {
            best_hi = (v, t);
        }
        if v < best_lo.0 {
            best_lo = (v, t);
        }
    }
    let success = best_hi.0 > 0.0 && best_lo.0 < 0.0;
    let crossing = if success {
        let (mut a, mut b) = (best_hi.1, best_lo.1);
        let mut fa = best_hi.0;
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            let fm = eval(mid)?;
            if (fm > 0.0) == (fa > 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        Some(0.5 * (a + b))
    } else {
        None
    };
    Ok(ExtremaReport {
        x_plus: best_hi.1,
        x_minus: best_lo.1,
        value_plus: best_hi.0,
        value_minus: best_lo.0,
        success,
        crossing,
    })
}

/// One tile of a window scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRecord {
    pub center: f64,
    /// True when the window holds both a positive and a negative coefficient.
    pub found: bool,
    /// Position of the first positive coefficient in the window.
    pub x_plus: Option<f64>,
    /// Position of the first negative coefficient in the window.
    pub x_minus: Option<f64>,
}

/// Sign statistics of a coefficient stream, with optional window tiling.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChangeReport {
    pub x_low: f64,
    pub x_high: f64,
    pub windows: Vec<WindowRecord>,
    /// Sign changes between consecutive nonzero coefficients.
    pub n_star: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Largest found-free stretch of the tiling divided by midpoint^exponent
    /// (zero when every window is found or no tiling was requested).
    pub max_gap_normalized: f64,
}

fn coefficient_sign(p: &StreamPoint, index: usize) -> Result<i32> {
    if p.a.im.abs() > 1e-12 * p.a.norm() {
        return Err(Error::Data(format!(
            "coefficient {index} at lambda = {} is materially complex: {}",
            p.lambda, p.a
        )));
    }
    Ok(if p.a.re > 0.0 {
        1
    } else if p.a.re < 0.0 {
        -1
    } else {
        0
    })
}

fn count_signs(points: &[StreamPoint], lo: f64, hi: f64) -> Result<(usize, usize, usize)> {
    let start = points.partition_point(|p| p.lambda < lo);
    let (mut plus, mut minus, mut star) = (0usize, 0usize, 0usize);
    let mut prev = 0i32;
    for (off, p) in points[start..].iter().enumerate() {
        if p.lambda > hi {
            break;
        }
        let s = coefficient_sign(p, start + off)?;
        if s > 0 {
            plus += 1;
        } else if s < 0 {
            minus += 1;
        }
        if s != 0 {
            if prev != 0 && s != prev {
                star += 1;
            }
            prev = s;
        }
    }
    Ok((plus, minus, star))
}

/// Counts signs of the primal coefficients with λ_n ≤ x_max. Zero
/// coefficients are skipped in the alternation count, and a coefficient with
/// a material imaginary part (|Im| > 10⁻¹²|a|) is rejected by index.
pub fn sign_changes(stream: &CoefficientStream, x_max: f64) -> Result<SignChangeReport> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::Domain(format!(
            "scan bound must be positive and finite, got {x_max}"
        )));
    }
    let points = stream.points();
    let (n_plus, n_minus, n_star) = count_signs(points, 0.0, x_max)?;
    let x_low = points[0].lambda;
    let x_high = points
        .iter()
        .take_while(|p| p.lambda <= x_max)
        .last()
        .map_or(x_max, |p| p.lambda);
    Ok(SignChangeReport {
        x_low,
        x_high,
        windows: Vec::new(),
        n_star,
        n_plus,
        n_minus,
        max_gap_normalized: 0.0,
    })
}

/// Tiles [x_low, x_high] with windows [x − c₀xᵉ, x + c₀xᵉ] and flags each
/// window that holds coefficients of both signs. `max_gap_normalized` is the
/// longest run of flagless windows divided by (run midpoint)ᵉ.
pub fn window_scan(
    stream: &CoefficientStream,
    x_low: f64,
    x_high: f64,
    c0: f64,
    exponent: f64,
) -> Result<SignChangeReport> {
    if !(x_low > 0.0) || !(x_high > x_low) || !(c0 > 0.0) || !exponent.is_finite() {
        return Err(Error::Domain(format!(
            "window tiling needs 0 < xLow < xHigh and c0 > 0, got [{x_low}, {x_high}] with c0 = {c0}"
        )));
    }
    let points = stream.points();
    // First center puts the window's low edge at x_low; subsequent centers
    // put each low edge at the previous high edge (fixed-point solve of
    // c − c0·cᵉ = edge, which converges for any exponent < 1).
    let center_for_edge = |edge: f64| -> f64 {
        let mut c = edge + c0 * edge.powf(exponent);
        for _ in 0..8 {
            c = edge + c0 * c.powf(exponent);
        }
        c
    };
    let mut center = center_for_edge(x_low);
    let mut windows = Vec::new();
    loop {
        let w = c0 * center.powf(exponent);
        let (wlo, whi) = (center - w, center + w);
        if wlo >= x_high {
            break;
        }
        let start = points.partition_point(|p| p.lambda < wlo);
        let mut x_plus = None;
        let mut x_minus = None;
        for (off, p) in points[start..].iter().enumerate() {
            if p.lambda > whi {
                break;
            }
            let s = coefficient_sign(p, start + off)?;
            if s > 0 && x_plus.is_none() {
                x_plus = Some(p.lambda);
            }
            if s < 0 && x_minus.is_none() {
                x_minus = Some(p.lambda);
            }
            if x_plus.is_some() && x_minus.is_some() {
                break;
            }
        }
        windows.push(WindowRecord {
            center,
            found: x_plus.is_some() && x_minus.is_some(),
            x_plus,
            x_minus,
        });
        let next = center_for_edge(whi);
        if !(next > center) || !next.is_finite() {
            break;
        }
        center = next;
    }
    if windows.is_empty() {
        return Err(Error::Domain(format!(
            "window tiling of [{x_low}, {x_high}] with c0 = {c0} is empty"
        )));
    }
    let mut max_gap = 0.0f64;
    let mut run: Option<(f64, f64)> = None;
    for w in &windows {
        let half = c0 * w.center.powf(exponent);
        if !w.found {
            let hi = w.center + half;
            run = Some(match run {
                None => (w.center - half, hi),
                Some((lo, _)) => (lo, hi),
            });
        } else if let Some((lo, hi)) = run.take() {
            max_gap = max_gap.max((hi - lo) / (0.5 * (lo + hi)).powf(exponent));
        }
    }
    if let Some((lo, hi)) = run {
        max_gap = max_gap.max((hi - lo) / (0.5 * (lo + hi)).powf(exponent));
    }
    let (n_plus, n_minus, n_star) = count_signs(points, x_low, x_high)?;
    Ok(SignChangeReport {
        x_low,
        x_high,
        windows,
        n_star,
        n_plus,
        n_minus,
        max_gap_normalized: max_gap,
    })
}

/// Smallest window constant (bisected to ~10⁻⁵ relative) for which every
/// window of the tiling of [x_low, x_high] holds both signs.
pub fn minimal_c0(
    stream: &CoefficientStream,
    x_low: f64,
    x_high: f64,
    exponent: f64,
) -> Result<f64> {
    let all_found = |c0: f64| -> Result<bool> {
        let report = window_scan(stream, x_low, x_high, c0, exponent)?;
        Ok(report.windows.iter().all(|w| w.found))
    };
    let mut hi = 0.25;
    let mut doublings = 0;
    while !all_found(hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > 40 {
            return Err(Error::NonConvergence {
                what: "window constant search",
                residual: hi,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if !(mid > 0.0) {
            break;
        }
        if all_found(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest normalized neighbor gap (λ_{n+1} − λ_n)/λ_n^{1−1/(2A)} over
/// consecutive stream points with both ends in [lo, hi].
pub fn gap_scan(stream: &CoefficientStream, lo: f64, hi: f64, two_a: f64) -> Result<f64> {
    if !(two_a > 0.0) || !two_a.is_finite() || !(hi > lo) {
        return Err(Error::Domain(format!(
            "gap scan needs 2A > 0 and lo < hi, got 2A = {two_a}, [{lo}, {hi}]"
        )));
    }
    let exponent = 1.0 - 1.0 / two_a;
    let mut max_gap = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for p in stream.points() {
        if p.lambda < lo {
            continue;
        }
        if p.lambda > hi {
            break;
        }
        if let Some(q) = prev {
            if p.lambda <= q {
                return Err(Error::Data(format!(
                    "positions not strictly increasing at lambda = {}",
                    p.lambda
                )));
            }
            max_gap = max_gap.max((p.lambda - q) / q.powf(exponent));
        }
        prev = Some(p.lambda);
    }
    if max_gap == f64::NEG_INFINITY {
        return Err(Error::Domain(format!(
            "fewer than two stream points in [{lo}, {hi}]"
        )));
    }
    Ok(max_gap)
}
