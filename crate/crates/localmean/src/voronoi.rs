//! Local mean evaluation: the direct window sum, its residue main term, and
//! the dual oscillatory series with a certified truncation bound.
//!
//! `tail_bound` certifies only the omitted part of the dual sum (terms
//! `n > term_count`); the truncation error of the j-expansion itself is a
//! separate systematic scale, reported per kernel call as `remainder_scale`.

use crate::feq::{strict_positive_ceiling, DerivedConstants, FunctionalEquationSpec};
use crate::gamma::ExpansionCoefficients;
use crate::quad::circle_mean;
use crate::streams::{CoefficientStream, StreamPoint};
use crate::taylor::Jet;
use crate::weight::{self, WeightProfile};
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Highest integration-by-parts order the truncation bound will try.
const MAX_IBP_ORDER: usize = 8;
/// Midpoint count for the envelope-derivative measurement grid; the eighth
/// bump derivative has peaks of relative width ~4e-3, so 801 midpoints keep
/// every peak sampled.
const SUP_GRID: usize = 801;
/// The dual sum is never cut below this many terms (or the full stream,
/// whichever is smaller), so degenerate windows keep a nonempty series.
const MIN_TERMS: usize = 8;

/// Truncation request for the dual series. `tolerance` is an absolute bound
/// on the omitted tail; `r_order`, when given, pins the integration-by-parts
/// order (clamped up per expansion term to keep the tail exponent past the
/// convergence abscissa); `max_terms` caps the series length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tolerance: f64,
    pub r_order: Option<usize>,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(tolerance: f64) -> Self {
        TruncationPolicy {
            tolerance,
            r_order: None,
            max_terms: 1_000_000,
        }
    }

    fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            problems.push(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            ));
        }
        if let Some(r) = self.r_order {
            if r == 0 || r > MAX_IBP_ORDER {
                problems.push(format!(
                    "integration-by-parts order must lie in 1..={MAX_IBP_ORDER}, got {r}"
                ));
            }
        }
        if self.max_terms == 0 {
            problems.push(String::from("max_terms must be positive"));
        }
        problems
    }
}

/// Everything one evaluation produces. `s_phi` is always
/// `direct_sum - main_term_residues`; on success `tail_bound <= tolerance`
/// and `term_count <= max_terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiEvaluation {
    pub x: f64,
    pub direct_sum: Complex64,
    pub main_term_residues: Complex64,
    pub s_phi: Complex64,
    pub leading_term: Complex64,
    pub series_value: Complex64,
    pub tail_bound: f64,
    pub term_count: usize,
    pub empty_window: bool,
}

/// Oscillatory kernel value together with the scale of the expansion
/// remainder dropped after `j_count` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IKernelValue {
    pub value: Complex64,
    pub remainder_scale: f64,
}

/// First-term-only series evaluation, certified the same way as the full
/// series but with the single closed-form coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTermEvaluation {
    pub value: Complex64,
    pub tail_bound: f64,
    pub term_count: usize,
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "{what} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn check_anchored(profile: &WeightProfile, x: f64) -> Result<()> {
    check_positive(x, "evaluation point x")?;
    let anchor = profile.anchor();
    if x < anchor / 2.0 || x > 4.0 * anchor {
        return Err(Error::Domain(format!(
            "evaluation point {x} outside the anchored range [{}, {}] of this weight profile",
            anchor / 2.0,
            4.0 * anchor
        )));
    }
    Ok(())
}

/// Σ a_n φ(λ_n/x) over the window λ_n/x ∈ (1−1/L, 1+1/L), with the count of
/// points inside the window.
pub(crate) fn direct_local_core(
    stream: &CoefficientStream,
    profile: &WeightProfile,
    x: f64,
) -> Result<(Complex64, usize)> {
    check_positive(x, "evaluation point x")?;
    let l = profile.l();
    let lo = x * (1.0 - 1.0 / l);
    let hi = x * (1.0 + 1.0 / l);
    let points = stream.points();
    let last = points.last().map_or(0.0, |p| p.lambda);
    if last < hi {
        return Err(Error::InsufficientData {
            needed: hi,
            available: last,
            what: "coefficient data through the weight window",
        });
    }
    let start = points.partition_point(|p| p.lambda <= lo);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    for p in &points[start..] {
        if p.lambda >= hi {
            break;
        }
        acc += p.a * weight::weight(profile, p.lambda / x);
        count += 1;
    }
    Ok((acc, count))
}

/// The weighted local sum evaluated termwise from the primal stream.
pub fn direct_local_sum(
    stream: &CoefficientStream,
    profile: &WeightProfile,
    x: f64,
) -> Result<Complex64> {
    Ok(direct_local_core(stream, profile, x)?.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Σ over the poles of φ of Res φ(s)·φ̂(s)·x^s, through the Laurent data
/// carried on the spec: each pole of order m contributes
/// Σ_{l=1..m} c_{−l} · (φ̂(s)x^s)^{(l−1)}|_υ / (l−1)!.
pub fn main_term_residues(
    spec: &FunctionalEquationSpec,
    profile: &WeightProfile,
    x: f64,
) -> Result<Complex64> {
    check_positive(x, "evaluation point x")?;
    let ln_x = x.ln();
    let mut total = Complex64::new(0.0, 0.0);
    for pole in &spec.poles {
        if pole.order > MAX_IBP_ORDER {
            return Err(Error::Domain(format!(
                "pole order {} exceeds the supported maximum {MAX_IBP_ORDER}",
                pole.order
            )));
        }
        let x_up = (pole.location * ln_x).exp();
        // derivatives of g(s) = φ̂(s)·x^s at the pole, by the product rule
        let mut mellin_d = Vec::with_capacity(pole.order);
        mellin_d.push(weight::mellin(profile, pole.location)?);
        for m in 1..pole.order {
            mellin_d.push(weight::mellin_deriv(profile, pole.location, m)?);
        }
        for l in 1..=pole.order {
            let c = pole.principal_part[pole.order - l];
            let r = l - 1;
            let mut g_r = Complex64::new(0.0, 0.0);
            for (i, md) in mellin_d.iter().enumerate().take(r + 1) {
                g_r += binomial(r, i) * md * ln_x.powi((r - i) as i32);
            }
            total += c * g_r * x_up / factorial(r);
        }
    }
    Ok(total)
}

/// The same main term as a contour mean: (1/2πi)∮_{|s|=R} φ(s)φ̂(s)x^s ds
/// with R the spec's pole radius, for any evaluator of φ on that circle.
pub fn main_term_contour<F>(
    spec: &FunctionalEquationSpec,
    profile: &WeightProfile,
    x: f64,
    mut phi_eval: F,
) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    check_positive(x, "evaluation point x")?;
    let ln_x = x.ln();
    let mut inner: Option<Error> = None;
    let got = circle_mean(Complex64::new(0.0, 0.0), spec.pole_radius, 1e-10, |s| {
        let term = phi_eval(s)
            .and_then(|phi| Ok(phi * weight::mellin(profile, s)? * (s * ln_x).exp() * s));
        match term {
            Ok(v) => v,
            Err(e) => {
                inner = Some(e);
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    });
    if let Some(e) = inner {
        return Err(e);
    }
    got
}

/// The oscillatory kernel truncated after `j_count` expansion terms:
/// (y/2A) Σ_{j<J} e_j (hy)^{a−j/(2A)} ∫φ(u)u^{a−j/(2A)}
///   cos((hyu)^{1/(2A)} + (k+j/2)π) du.
pub fn i_kernel(
    consts: &DerivedConstants,
    coeffs: &ExpansionCoefficients,
    profile: &WeightProfile,
    y: f64,
    j_count: usize,
) -> Result<IKernelValue> {
    check_positive(y, "kernel argument y")?;
    if j_count == 0 || j_count > coeffs.j_count {
        return Err(Error::Domain(format!(
            "kernel expansion order must lie in 1..={}, got {j_count}",
            coeffs.j_count
        )));
    }
    let two_a = 2.0 * consts.big_a;
    let hy = consts.h * y;
    let base = 1.0 / two_a;
    let pairs = phase_pairs(consts, j_count);
    let osc = weight::oscillatory_integral_multi(profile, base, hy.powf(base), &pairs)?;
    let ln_hy = hy.ln();
    let mut value = Complex64::new(0.0, 0.0);
    for j in 0..j_count {
        value += coeffs.e[j] * (pairs[j].0 * ln_hy).exp() * osc[j];
    }
    value *= y / two_a;
    let exponent = 1.0 - consts.theta() - (j_count as f64 - 0.5) / two_a;
    Ok(IKernelValue {
        value,
        remainder_scale: y.powf(exponent) / profile.l(),
    })
}

/// (u-power, cosine offset) pairs of the first `j_count` expansion terms.
fn phase_pairs(consts: &DerivedConstants, j_count: usize) -> Vec<(Complex64, Complex64)> {
    let two_a = 2.0 * consts.big_a;
    (0..j_count)
        .map(|j| {
            let power = consts.a - j as f64 / two_a;
            let offset = (consts.k + j as f64 / 2.0) * PI;
            (power, offset)
        })
        .collect()
}

/// Per-expansion-term sums of the dual series over `points`:
/// component[j] = (ωx/2A) e_j Σ_n b_n (hμ_n x)^{a−j/(2A)} ·
///   ∫φ(u)u^{a−j/(2A)} cos((hμ_n x u)^{1/(2A)} + (k+j/2)π) du.
pub(crate) fn series_components(
    consts: &DerivedConstants,
    coeffs: &ExpansionCoefficients,
    profile: &WeightProfile,
    x: f64,
    points: &[StreamPoint],
) -> Result<Vec<Complex64>> {
    let two_a = 2.0 * consts.big_a;
    let j_count = coeffs.j_count;
    let base = 1.0 / two_a;
    let pairs = phase_pairs(consts, j_count);
    let mut sums = vec![Complex64::new(0.0, 0.0); j_count];
    for p in points {
        let hyx = consts.h * p.lambda * x;
        let osc = weight::oscillatory_integral_multi(profile, base, hyx.powf(base), &pairs)?;
        let ln_hyx = hyx.ln();
        for j in 0..j_count {
            sums[j] += p.a * (pairs[j].0 * ln_hyx).exp() * osc[j];
        }
    }
    let pref = consts.omega * x / two_a;
    for (j, s) in sums.iter_mut().enumerate() {
        *s *= pref * coeffs.e[j];
    }
    Ok(sums)
}

/// sup_t |d^r/dt^r [φ(t^{2A}) t^{c_j}]| for r ≤ 8 and each expansion term,
/// c_j = 2A(1+a) − j − 1: measured on a midpoint grid by order-8 jets, then
/// doubled, and floored by the leading chain-rule scale (2AL)^r·sup|φ₀^{(r)}|.
fn envelope_sups(
    consts: &DerivedConstants,
    profile: &WeightProfile,
    j_count: usize,
) -> Result<Vec<Vec<f64>>> {
    let two_a = 2.0 * consts.big_a;
    let l = profile.l();
    let one = Complex64::new(1.0, 0.0);
    let c_j: Vec<Complex64> = (0..j_count)
        .map(|j| two_a * (one + consts.a) - (j as f64 + 1.0))
        .collect();
    let mut grid_max = vec![vec![0.0f64; MAX_IBP_ORDER + 1]; j_count];
    for i in 0..SUP_GRID {
        let v = -1.0 + 2.0 * (i as f64 + 0.5) / SUP_GRID as f64;
        let t = (1.0 + v / l).powf(1.0 / two_a);
        let tj = Jet::variable(Complex64::new(t, 0.0), MAX_IBP_ORDER);
        let uj = tj.powc(Complex64::new(two_a, 0.0));
        // v = (u−1)L, then the bump exp(1 − 1/(1−v²))
        let vj = uj.add(&Jet::constant(-one, MAX_IBP_ORDER)).scale(l.into());
        let wj = vj.mul(&vj);
        let dj = Jet::constant(one, MAX_IBP_ORDER)
            .add(&wj.scale((-1.0).into()))
            .recip();
        let bj = Jet::constant(one, MAX_IBP_ORDER)
            .add(&dj.scale((-1.0).into()))
            .exp();
        for (j, c) in c_j.iter().enumerate() {
            let g = bj.mul(&tj.powc(*c));
            for r in 0..=MAX_IBP_ORDER {
                let m = g.derivative(r).norm();
                if m > grid_max[j][r] {
                    grid_max[j][r] = m;
                }
            }
        }
    }
    let mut sups = grid_max;
    for row in &mut sups {
        for (r, s) in row.iter_mut().enumerate() {
            let floor = (two_a * l).powi(r as i32) * weight::bump_derivative_sup(r)?;
            *s = (2.0 * *s).max(floor);
        }
    }
    Ok(sups)
}

/// Per-term tail machinery. For expansion term j and parts order r the
/// omitted terms n > N obey
///   |term_{n,j}| ≤ cosh(πη)·|e_j|·sup|G_j^{(r)}|·t_len·h^{−q}·x^{1−q}·|b_n|μ_n^{−q},
/// q = ϑ + (j+r)/(2A), with t_len the substituted support width. Data past
/// the stream end are extrapolated by the recent dyadic block sums of
/// |b_n|μ_n^{−σ*}, which is sound whenever those sums stay near their
/// observed ceiling.
struct TailMachine {
    /// (q-key j+r, coefficient C_{j,r}); one inner list per expansion term.
    coeffs: Vec<Vec<(usize, f64)>>,
    /// distinct q-keys, ascending
    keys: Vec<usize>,
    /// Σ of |b_n|μ_n^{−q} beyond the current cut, one slot per key
    suffix: Vec<f64>,
    /// extrapolated Σ beyond the stream end, one slot per key
    beyond: Vec<f64>,
    theta: f64,
    inv_two_a: f64,
}

impl TailMachine {
    fn new(
        consts: &DerivedConstants,
        e_abs: &[f64],
        profile: &WeightProfile,
        x: f64,
        policy: &TruncationPolicy,
        points: &[StreamPoint],
    ) -> Result<TailMachine> {
        let two_a = 2.0 * consts.big_a;
        let theta = consts.theta();
        let sigma_star = consts.sigma_star;
        let sups = envelope_sups(consts, profile, e_abs.len())?;
        let l = profile.l();
        let base = 1.0 / two_a;
        let t_len = (1.0 + 1.0 / l).powf(base) - (1.0 - 1.0 / l).powf(base);
        let cosh_eta = (PI * consts.eta()).cosh();

        let mut coeffs = Vec::with_capacity(e_abs.len());
        for (j, &ej) in e_abs.iter().enumerate() {
            // smallest parts order keeping q strictly past σ*
            let strict = strict_positive_ceiling(two_a * (sigma_star - consts.theta_j(j)));
            let r_lo = policy.r_order.unwrap_or(1).max(strict).max(1);
            if r_lo > MAX_IBP_ORDER {
                return Err(Error::Validation(vec![format!(
                    "expansion term {j} needs integration-by-parts order {r_lo}, \
                     beyond the supported maximum {MAX_IBP_ORDER}"
                )]));
            }
            let r_hi = if policy.r_order.is_some() {
                r_lo
            } else {
                MAX_IBP_ORDER
            };
            let mut row = Vec::with_capacity(r_hi - r_lo + 1);
            for r in r_lo..=r_hi {
                let q = theta + (j + r) as f64 / two_a;
                let c = cosh_eta
                    * ej
                    * sups[j][r]
                    * t_len
                    * consts.h.powf(-q)
                    * x.powf(1.0 - q);
                row.push((j + r, c));
            }
            coeffs.push(row);
        }

        let mut keys: Vec<usize> = coeffs
            .iter()
            .flat_map(|row| row.iter().map(|&(k, _)| k))
            .collect();
        keys.sort_unstable();
        keys.dedup();

        // recent dyadic ceiling of Σ_block |b_n|μ_n^{−σ*}
        let mu1 = points[0].lambda;
        let mut blocks: Vec<f64> = Vec::new();
        for p in points {
            let k = (p.lambda / mu1).log2().floor().max(0.0) as usize;
            if k >= blocks.len() {
                blocks.resize(k + 1, 0.0);
            }
            blocks[k] += p.a.norm() * p.lambda.powf(-sigma_star);
        }
        let s_obs = blocks
            .iter()
            .rev()
            .filter(|&&b| b > 0.0)
            .take(3)
            .fold(0.0f64, |m, &b| m.max(b));
        let mu_last = points[points.len() - 1].lambda;

        let inv_two_a = base;
        let beyond: Vec<f64> = keys
            .iter()
            .map(|&k| {
                let q = theta + k as f64 * inv_two_a;
                let gap = q - sigma_star;
                debug_assert!(gap > 0.0);
                mu_last.powf(-gap) * s_obs / (1.0 - 0.5f64.powf(gap))
            })
            .collect();

        Ok(TailMachine {
            coeffs,
            suffix: vec![0.0; keys.len()],
            beyond,
            keys,
            theta,
            inv_two_a,
        })
    }

    /// Fold one point into the suffix sums (the cut moves below it).
    fn absorb(&mut self, p: &StreamPoint) {
        let ln_mu = p.lambda.ln();
        let b = p.a.norm();
        for (slot, &k) in self.suffix.iter_mut().zip(&self.keys) {
            let q = self.theta + k as f64 * self.inv_two_a;
            *slot += b * (-q * ln_mu).exp();
        }
    }

    /// Certified bound on everything past the current cut.
    fn tail(&self) -> f64 {
        let mut total = 0.0;
        for row in &self.coeffs {
            let mut best = f64::INFINITY;
            for &(k, c) in row {
                let slot = self.keys.binary_search(&k).unwrap();
                let b = c * (self.suffix[slot] + self.beyond[slot]);
                if b < best {
                    best = b;
                }
            }
            total += best;
        }
        total
    }
}

/// Smallest certified series length under `policy`, with its tail bound.
fn select_terms(
    consts: &DerivedConstants,
    e_abs: &[f64],
    profile: &WeightProfile,
    x: f64,
    policy: &TruncationPolicy,
    points: &[StreamPoint],
) -> Result<(usize, f64)> {
    if points.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1.0,
            available: 0.0,
            what: "dual coefficient data",
        });
    }
    let mut machine = TailMachine::new(consts, e_abs, profile, x, policy, points)?;
    let usable = points.len().min(policy.max_terms);
    for p in points[usable..].iter().rev() {
        machine.absorb(p);
    }
    let mut tail = machine.tail();
    if tail > policy.tolerance {
        return Err(Error::Truncation {
            requested: policy.tolerance,
            achieved: tail,
            terms: usable,
        });
    }
    let floor = usable.min(MIN_TERMS);
    let mut n = usable;
    while n > floor {
        machine.absorb(&points[n - 1]);
        let t = machine.tail();
        if t > policy.tolerance {
            break;
        }
        n -= 1;
        tail = t;
    }
    Ok((n, tail))
}

/// Full dual-series evaluation at `x` against the expansion `coeffs`.
///
/// The direct sum, residue main term, and their difference `s_phi` come from
/// the primal side; the series and its certified `tail_bound` from the dual
/// side. `x` must stay within a factor of the profile's anchor so the
/// quadratures remain sized for the window.
pub fn voronoi_series(
    spec: &FunctionalEquationSpec,
    consts: &DerivedConstants,
    coeffs: &ExpansionCoefficients,
    stream: &CoefficientStream,
    profile: &WeightProfile,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<VoronoiEvaluation> {
    let problems = policy.validate();
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    check_anchored(profile, x)?;

    let (direct_sum, window_count) = direct_local_core(stream, profile, x)?;
    let residues = main_term_residues(spec, profile, x)?;
    let s_phi = direct_sum - residues;

    let dual = stream.dual_points();
    let e_abs: Vec<f64> = coeffs.e.iter().map(|e| e.norm()).collect();
    let (term_count, tail_bound) = select_terms(consts, &e_abs, profile, x, policy, dual)?;
    let components = series_components(consts, coeffs, profile, x, &dual[..term_count])?;
    let series_value = components.iter().sum();

    Ok(VoronoiEvaluation {
        x,
        direct_sum,
        main_term_residues: residues,
        s_phi,
        leading_term: components[0],
        series_value,
        tail_bound,
        term_count,
        empty_window: window_count == 0,
    })
}

/// The j = 0 term alone, in its closed normal form
/// (ωe₀/2Ah)(hx)^{1+a} Σ_n b_n μ_n^a ∫φ(u)u^a cos((hμ_n x u)^{1/(2A)} + kπ) du,
/// certified by the same tail machinery restricted to the first term.
pub fn leading_term(
    consts: &DerivedConstants,
    stream: &CoefficientStream,
    profile: &WeightProfile,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<LeadingTermEvaluation> {
    let problems = policy.validate();
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    check_anchored(profile, x)?;
    let dual = stream.dual_points();
    let e_abs = [consts.e0.norm()];
    let (term_count, tail_bound) = select_terms(consts, &e_abs, profile, x, policy, dual)?;

    let two_a = 2.0 * consts.big_a;
    let base = 1.0 / two_a;
    let hx = consts.h * x;
    let offset = consts.k * PI;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in &dual[..term_count] {
        let scale = (hx * p.lambda).powf(base);
        let osc = weight::oscillatory_integral(profile, base, scale, consts.a, offset)?;
        sum += p.a * (consts.a * p.lambda.ln()).exp() * osc;
    }
    let one = Complex64::new(1.0, 0.0);
    let pref =
        consts.omega * consts.e0 / (two_a * consts.h) * ((one + consts.a) * hx.ln()).exp();
    Ok(LeadingTermEvaluation {
        value: pref * sum,
        tail_bound,
        term_count,
    })
}

/// Expansion length past which the expansion remainder falls below the
/// truncation scale of the dual sum: 1 + ⌈2A(σ*−ϑ) + 1/2⌉₊, capped at the
/// largest fitted order.
pub fn default_expansion_order(consts: &DerivedConstants) -> usize {
    let two_a = 2.0 * consts.big_a;
    let j = 1 + strict_positive_ceiling(two_a * (consts.sigma_star - consts.theta()) + 0.5);
    j.min(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feq::derive_constants;
    use crate::gamma::{expansion_coeffs, gamma_ratio};
    use crate::instances::{
        delta_spec, phi_eval_zeta, phi_eval_zeta_squared, zeta_spec, zeta_squared_spec,
        EULER_GAMMA,
    };
    use crate::quad::gl_table;
    use crate::streams::{zeta_squared_stream, StreamKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(
        spec: FunctionalEquationSpec,
        j_count: usize,
    ) -> (FunctionalEquationSpec, DerivedConstants, ExpansionCoefficients) {
        let consts = derive_constants(&spec).unwrap();
        let coeffs = expansion_coeffs(&spec, &consts, j_count).unwrap();
        (spec, consts, coeffs)
    }

    #[test]
    fn direct_sum_matches_windowed_bruteforce() {
        let stream = zeta_squared_stream(4_000);
        let profile = WeightProfile::new(0.5, 3_000.0, 1.0).unwrap();
        let x = 3_000.0;
        let got = direct_local_sum(&stream, &profile, x).unwrap();
        // full-stream loop; out-of-window points contribute exact zeros
        let mut want = c(0.0, 0.0);
        for p in stream.points() {
            want += p.a * weight::weight(&profile, p.lambda / x);
        }
        assert_eq!(got, want);
    }

    #[test]
    fn direct_sum_requires_window_coverage() {
        let stream = zeta_squared_stream(100);
        let profile = WeightProfile::new(0.5, 3_000.0, 1.0).unwrap();
        match direct_local_sum(&stream, &profile, 3_000.0) {
            Err(Error::InsufficientData {
                needed, available, ..
            }) => {
                assert!(needed > 3_000.0);
                assert!((available - PI * 100.0).abs() < 1e-9);
            }
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    #[test]
    fn empty_window_reported_not_erred() {
        let (spec, consts, coeffs) = setup(zeta_spec(), 1);
        let pts = vec![
            StreamPoint {
                lambda: 1.0,
                a: c(1.0, 0.0),
            },
            StreamPoint {
                lambda: 2.0,
                a: c(1.0, 0.0),
            },
            StreamPoint {
                lambda: 2_000.0,
                a: c(1.0, 0.0),
            },
        ];
        let stream = CoefficientStream::from_parts(StreamKind::FromFile, pts, None, None).unwrap();
        let profile = WeightProfile::new(0.5, 1_000.0, 0.5).unwrap();
        let policy = TruncationPolicy::new(1.0);
        let eval =
            voronoi_series(&spec, &consts, &coeffs, &stream, &profile, 1_000.0, &policy).unwrap();
        assert!(eval.empty_window);
        assert_eq!(eval.direct_sum, c(0.0, 0.0));
        assert_eq!(eval.s_phi, eval.direct_sum - eval.main_term_residues);
        assert_eq!(eval.term_count, 3);
    }

    #[test]
    fn residues_zeta_closed_form() {
        let spec = zeta_spec();
        let profile = WeightProfile::new(0.3, 500.0, 0.5).unwrap();
        let x = 500.0;
        let got = main_term_residues(&spec, &profile, x).unwrap();
        let mhat = weight::mellin(&profile, c(1.0, 0.0)).unwrap();
        let want = mhat * x / PI.sqrt();
        assert!(
            (got - want).norm() <= 1e-14 * want.norm(),
            "got {got}, want {want}"
        );
    }

    #[test]
    fn residues_zeta_squared_closed_form() {
        let spec = zeta_squared_spec();
        let profile = WeightProfile::new(0.4, 800.0, 1.0).unwrap();
        let x = 800.0;
        let got = main_term_residues(&spec, &profile, x).unwrap();
        let m0 = weight::mellin(&profile, c(1.0, 0.0)).unwrap();
        let m1 = weight::mellin_deriv(&profile, c(1.0, 0.0), 1).unwrap();
        let want = ((m1 + m0 * x.ln()) / PI + m0 * (2.0 * EULER_GAMMA - PI.ln()) / PI) * x;
        assert!(
            (got - want).norm() <= 1e-12 * want.norm(),
            "got {got}, want {want}"
        );

        let none = main_term_residues(&delta_spec(), &profile, x).unwrap();
        assert_eq!(none, c(0.0, 0.0));
    }

    #[test]
    fn residues_match_contour_integral() {
        let profile_z = WeightProfile::new(0.4, 800.0, 0.5).unwrap();
        let profile_z2 = WeightProfile::new(0.4, 800.0, 1.0).unwrap();
        let x = 800.0;
        for radius in [2.0, 2.5] {
            let mut spec = zeta_spec();
            spec.pole_radius = radius;
            let res = main_term_residues(&spec, &profile_z, x).unwrap();
            let contour = main_term_contour(&spec, &profile_z, x, phi_eval_zeta).unwrap();
            assert!(
                (res - contour).norm() <= 1e-8 * res.norm(),
                "radius {radius}: residues {res}, contour {contour}"
            );

            let mut spec2 = zeta_squared_spec();
            spec2.pole_radius = radius;
            let res2 = main_term_residues(&spec2, &profile_z2, x).unwrap();
            let contour2 =
                main_term_contour(&spec2, &profile_z2, x, phi_eval_zeta_squared).unwrap();
            assert!(
                (res2 - contour2).norm() <= 1e-6 * res2.norm(),
                "radius {radius}: residues {res2}, contour {contour2}"
            );
        }
    }

    #[test]
    fn contour_vanishes_without_poles() {
        let spec = delta_spec();
        let profile = WeightProfile::new(0.4, 800.0, 1.0).unwrap();
        let got = main_term_contour(&spec, &profile, 800.0, |s| Ok((s * 0.3).exp())).unwrap();
        assert!(got.norm() < 1e-10, "got {got}");
    }

    /// Line-integral evaluation of the oscillatory kernel, independent of
    /// the cosine expansion: (1/π)·Re ∫₀^∞ ratio(c+it)·φ̂(1−c−it)·y^{1−c−it} dt
    /// on a vertical line right of the ratio's poles, in phase-sized panels,
    /// stopped once panels past the stationary point stay negligible.
    /// Real self-dual data only.
    fn i_line_oracle(
        spec: &FunctionalEquationSpec,
        consts: &DerivedConstants,
        profile: &WeightProfile,
        y: f64,
    ) -> Complex64 {
        let two_a = 2.0 * consts.big_a;
        let cre = consts.theta() + 3.0 / (4.0 * consts.big_a);
        let t_star = (consts.h * y).powf(1.0 / two_a) / two_a;
        let ln_y = y.ln();
        let table = gl_table(24);
        let quiet_floor = 1e-11 * y.powf(1.0 - consts.theta()) / profile.l();
        let t_hard = (64.0 * t_star).max(2_000.0 * profile.l()).max(1_024.0);
        let mut acc = c(0.0, 0.0);
        let mut t = 0.0f64;
        let mut quiet = 0;
        let mut settled = false;
        while t < t_hard {
            let rate =
                two_a * (two_a * t.max(1.0)).ln().abs() + ln_y.abs() + consts.h.ln().abs();
            let t2 = (t + 8.0 * PI / rate).min(t_hard);
            let panel = table.integrate(t, t2, |tt| {
                let s = c(cre, tt);
                let one_minus = c(1.0, 0.0) - s;
                gamma_ratio(spec, s).unwrap()
                    * weight::mellin(profile, one_minus).unwrap()
                    * (one_minus * ln_y).exp()
            });
            acc += panel;
            t = t2;
            if t > 3.0 * t_star {
                if panel.norm() < quiet_floor {
                    quiet += 1;
                    if quiet >= 6 {
                        settled = true;
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
        }
        assert!(settled, "line-integral oracle still active at t = {t}");
        c(acc.re / PI, 0.0)
    }

    #[test]
    fn i_kernel_matches_line_integral() {
        let (spec, consts, coeffs) = setup(zeta_spec(), 1);
        let profile = WeightProfile::new(1.0, 100.0, 0.5).unwrap();
        let y = PI.sqrt() * 60.0;
        let oracle = i_line_oracle(&spec, &consts, &profile, y);
        let k = i_kernel(&consts, &coeffs, &profile, y, 1).unwrap();
        assert!(
            (k.value - oracle).norm() < 2e-6,
            "kernel {} vs line integral {}",
            k.value,
            oracle
        );
        let scale = y.powf(1.0 - consts.theta() - 0.5 / (2.0 * consts.big_a)) / profile.l();
        assert!((k.remainder_scale - scale).abs() <= 1e-12 * scale);
    }

    #[test]
    fn i_kernel_expansion_improves_with_order() {
        let (spec, consts, coeffs) = setup(delta_spec(), 3);
        let profile = WeightProfile::new(1.0, 2_500.0, 1.0).unwrap();
        let y = 2.0 * PI * 10_000.0;
        let oracle = i_line_oracle(&spec, &consts, &profile, y);
        let k1 = i_kernel(&consts, &coeffs, &profile, y, 1).unwrap();
        let k2 = i_kernel(&consts, &coeffs, &profile, y, 2).unwrap();
        let k3 = i_kernel(&consts, &coeffs, &profile, y, 3).unwrap();
        let e1 = (k1.value - oracle).norm();
        let e2 = (k2.value - oracle).norm();
        let e3 = (k3.value - oracle).norm();
        assert!(
            e2 < e1 / 2.5 && e3 < e2 / 2.5,
            "expansion terms not improving: errors {e1}, {e2}, {e3} at value {oracle}"
        );
        assert!(e2 <= 200.0 * k2.remainder_scale);
    }

    #[test]
    fn series_matches_direct_for_square_instance() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 4);
        let stream = zeta_squared_stream(200_000);
        let profile = WeightProfile::new(0.4, 1_000.0, 1.0).unwrap();
        let x = 1_000.0;
        let tol = 0.05 * x.powf(1.0 - consts.theta()) / profile.l();
        let policy = TruncationPolicy::new(tol);
        let eval =
            voronoi_series(&spec, &consts, &coeffs, &stream, &profile, x, &policy).unwrap();
        assert!(!eval.empty_window);
        assert!(eval.term_count <= policy.max_terms);
        assert!(eval.tail_bound <= tol);
        assert_eq!(eval.s_phi, eval.direct_sum - eval.main_term_residues);
        assert!(
            eval.series_value.im.abs() <= 1e-6 * (1.0 + eval.series_value.re.abs()),
            "series should be essentially real, got {}",
            eval.series_value
        );
        let err = (eval.series_value - eval.s_phi).norm();
        assert!(
            err <= eval.tail_bound.max(1e-3 * eval.s_phi.norm()),
            "series {} vs direct-side {} (err {err}, certified tail {})",
            eval.series_value,
            eval.s_phi,
            eval.tail_bound
        );
    }

    #[test]
    fn dropped_block_within_tail_bound() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 4);
        let stream = zeta_squared_stream(200_000);
        let profile = WeightProfile::new(0.5, 1_000.0, 1.0).unwrap();
        let x = 1_000.0;
        let tol = 0.05 * x.powf(1.0 - consts.theta()) / profile.l();
        let policy = TruncationPolicy::new(tol);
        let eval =
            voronoi_series(&spec, &consts, &coeffs, &stream, &profile, x, &policy).unwrap();
        let n = eval.term_count;
        let hi = (4 * n).min(stream.dual_points().len());
        let block =
            series_components(&consts, &coeffs, &profile, x, &stream.dual_points()[n..hi])
                .unwrap();
        let dropped: Complex64 = block.iter().sum();
        assert!(
            dropped.norm() <= eval.tail_bound,
            "dropped block {} exceeds certified tail {}",
            dropped.norm(),
            eval.tail_bound
        );
    }

    #[test]
    fn series_error_within_certified_scales() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 4);
        let stream = zeta_squared_stream(200_000);
        let profile = WeightProfile::new(0.4, 1_000.0, 1.0).unwrap();
        let policy =
            TruncationPolicy::new(0.05 * 1_000f64.powf(1.0 - consts.theta()) / profile.l());
        let rem_exponent =
            1.0 - consts.theta() - (coeffs.j_count as f64 - 0.5) / (2.0 * consts.big_a);
        for i in 0..6 {
            let x = 1_000.0 * 3.99f64.powf(i as f64 / 5.0);
            let eval =
                voronoi_series(&spec, &consts, &coeffs, &stream, &profile, x, &policy).unwrap();
            let err = (eval.series_value - eval.s_phi).norm();
            let rem = x.powf(rem_exponent) / profile.l();
            assert!(
                err <= eval.tail_bound + 30.0 * rem,
                "x = {x}: err {err} vs tail {} + expansion remainder {rem}",
                eval.tail_bound
            );
        }
    }

    #[test]
    fn higher_expansion_terms_are_suppressed() {
        let (_spec, consts, coeffs) = setup(zeta_squared_spec(), 2);
        let stream = zeta_squared_stream(6_000);
        let pts = &stream.dual_points()[..4_000];
        let profile = WeightProfile::new(0.4, 1_000.0, 1.0).unwrap();
        for &x in &[1_000.0, 2_000.0] {
            let mut rs: Vec<f64> = (0..5)
                .map(|k| {
                    let comp =
                        series_components(&consts, &coeffs, &profile, x + 30.0 * k as f64, pts)
                            .unwrap();
                    comp[1].norm() / comp[0].norm()
                })
                .collect();
            rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = rs[2];
            let scale = (coeffs.e[1].norm() / coeffs.e[0].norm())
                * (consts.h * PI * x).powf(-1.0 / (2.0 * consts.big_a));
            assert!(
                med <= 20.0 * scale,
                "x = {x}: median term ratio {med} vs scale {scale}"
            );
        }
    }

    #[test]
    fn leading_term_agrees_with_first_expansion_term() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 1);
        let stream = zeta_squared_stream(100_000);
        let profile = WeightProfile::new(0.5, 1_000.0, 1.0).unwrap();
        let x = 1_000.0;
        let tol = 0.05 * x.powf(1.0 - consts.theta()) / profile.l();
        let policy = TruncationPolicy::new(tol);
        let eval =
            voronoi_series(&spec, &consts, &coeffs, &stream, &profile, x, &policy).unwrap();
        assert_eq!(eval.leading_term, eval.series_value);
        let lead = leading_term(&consts, &stream, &profile, x, &policy).unwrap();
        assert_eq!(lead.term_count, eval.term_count);
        assert!((lead.tail_bound - eval.tail_bound).abs() <= 1e-12 * eval.tail_bound);
        assert!(
            (lead.value - eval.series_value).norm() <= 1e-10 * lead.value.norm(),
            "normal form {} vs expansion term {}",
            lead.value,
            eval.series_value
        );
    }

    #[test]
    fn single_term_series_crossing_spacing() {
        let (_spec, consts, coeffs) = setup(delta_spec(), 1);
        let profile = WeightProfile::new(1.0, 1.0e4, 1.0).unwrap();
        let pt = [StreamPoint {
            lambda: PI,
            a: c(1.0, 0.0),
        }];
        let g = |x: f64| {
            series_components(&consts, &coeffs, &profile, x, &pt).unwrap()[0].re
        };
        let x0 = 1.0e4;
        let spacing = (PI * x0).sqrt();
        let (lo, hi) = (x0, x0 + 3.2 * spacing);
        let m = 80;
        let mut crossings = Vec::new();
        let mut prev = (lo, g(lo));
        for i in 1..=m {
            let x = lo + (hi - lo) * i as f64 / m as f64;
            let v = g(x);
            if prev.1 != 0.0 && v != 0.0 && (prev.1 > 0.0) != (v > 0.0) {
                let (mut a2, mut b2, mut fa) = (prev.0, x, prev.1);
                for _ in 0..48 {
                    let mid = 0.5 * (a2 + b2);
                    let fm = g(mid);
                    if (fm > 0.0) == (fa > 0.0) {
                        a2 = mid;
                        fa = fm;
                    } else {
                        b2 = mid;
                    }
                }
                crossings.push(0.5 * (a2 + b2));
            }
            prev = (x, v);
        }
        assert!(crossings.len() >= 3, "found {} crossings", crossings.len());
        for w in crossings.windows(2) {
            let gap = w[1] - w[0];
            let want = (PI * 0.5 * (w[0] + w[1])).sqrt();
            assert!(
                (gap - want).abs() <= 0.06 * want,
                "crossing gap {gap} vs phase prediction {want}"
            );
        }
    }

    #[test]
    fn truncation_error_reports_shortfall() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 4);
        let stream = zeta_squared_stream(10_000);
        let profile = WeightProfile::new(0.4, 1_000.0, 1.0).unwrap();
        let policy = TruncationPolicy {
            tolerance: 1e-12,
            r_order: None,
            max_terms: 64,
        };
        match voronoi_series(&spec, &consts, &coeffs, &stream, &profile, 1_000.0, &policy) {
            Err(Error::Truncation {
                requested,
                achieved,
                terms,
            }) => {
                assert_eq!(terms, 64);
                assert_eq!(requested, 1e-12);
                assert!(achieved > requested);
            }
            other => panic!("expected Truncation, got {other:?}"),
        }
    }

    #[test]
    fn default_expansion_order_matches_instances() {
        for (spec, want) in [(zeta_spec(), 3), (zeta_squared_spec(), 4), (delta_spec(), 4)] {
            let consts = derive_constants(&spec).unwrap();
            assert_eq!(default_expansion_order(&consts), want, "{:?}", spec.poles);
        }
    }

    #[test]
    fn input_validation() {
        let (spec, consts, coeffs) = setup(zeta_squared_spec(), 2);
        let stream = zeta_squared_stream(2_000);
        let profile = WeightProfile::new(0.5, 1_000.0, 1.0).unwrap();
        let good = TruncationPolicy::new(1.0);
        for x in [100.0, 8_000.0] {
            match voronoi_series(&spec, &consts, &coeffs, &stream, &profile, x, &good) {
                Err(Error::Domain(_)) => {}
                other => panic!("expected Domain error at x = {x}, got {other:?}"),
            }
        }
        let bad_policies = [
            TruncationPolicy {
                tolerance: -1.0,
                ..good
            },
            TruncationPolicy {
                tolerance: f64::NAN,
                ..good
            },
            TruncationPolicy {
                r_order: Some(0),
                ..good
            },
            TruncationPolicy {
                r_order: Some(9),
                ..good
            },
            TruncationPolicy {
                max_terms: 0,
                ..good
            },
        ];
        for bad in bad_policies {
            match voronoi_series(&spec, &consts, &coeffs, &stream, &profile, 1_000.0, &bad) {
                Err(Error::Validation(_)) => {}
                other => panic!("expected Validation error for {bad:?}, got {other:?}"),
            }
        }
        for j in [0usize, 3] {
            match i_kernel(&consts, &coeffs, &profile, 500.0, j) {
                Err(Error::Domain(_)) => {}
                other => panic!("expected Domain error at order {j}, got {other:?}"),
            }
        }
    }
}
