//! The compactly supported smooth weight, its Mellin transform, and
//! oscillatory integrals against it.
//!
//! The weight is a translate-and-squeeze of the standard bump
//! φ₀(v) = exp(1 − 1/(1−v²)) on (−1, 1): with squeeze factor L it becomes
//! u ↦ φ₀((u−1)L), supported on [1 − 1/L, 1 + 1/L]. L couples the window
//! width δ to the anchor scale X through L = X^{1/(2A)}/δ, where 2A is the
//! degree of the underlying gamma factor.

use crate::quad::{circle_mean, gl_table};
use crate::{Complex64, Error, Result};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

/// Hard ceiling on quadrature nodes for a single oscillatory integral.
pub const NODE_CEILING: usize = 1 << 14;

/// The standard bump exp(1 − 1/(1−v²)) on (−1, 1), zero outside.
pub fn bump(v: f64) -> f64 {
    if v.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - v * v)).exp()
    }
}

/// A positioned weight: window parameter δ, anchor scale X, and gamma-factor
/// degree 2A determine the squeeze L = X^{1/(2A)}/δ.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    delta: f64,
    anchor: f64,
    big_a: f64,
    l: f64,
}

impl WeightProfile {
    /// Validates δ ∈ (0, 1], X > 0, A > 0 and requires the support to stay
    /// inside the positive half-line with margin (L ≥ 2).
    pub fn new(delta: f64, anchor: f64, big_a: f64) -> Result<Self> {
        let mut issues = Vec::new();
        if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
            issues.push(alloc::format!("delta must lie in (0, 1], got {delta}"));
        }
        if !(anchor > 0.0) || !anchor.is_finite() {
            issues.push(alloc::format!("anchor must be positive, got {anchor}"));
        }
        if !(big_a > 0.0) || !big_a.is_finite() {
            issues.push(alloc::format!("degree/2 must be positive, got {big_a}"));
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        let l = anchor.powf(1.0 / (2.0 * big_a)) / delta;
        if !(l >= 2.0) {
            return Err(Error::Validation(vec![alloc::format!(
                "squeeze L = X^(1/2A)/delta = {l:.3} is below 2; support would leave (0, 2)"
            )]));
        }
        Ok(WeightProfile {
            delta,
            anchor,
            big_a,
            l,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn big_a(&self) -> f64 {
        self.big_a
    }

    /// The squeeze factor L.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Support of the weight, [1 - 1/L, 1 + 1/L].
    pub fn support(&self) -> (f64, f64) {
        (1.0 - 1.0 / self.l, 1.0 + 1.0 / self.l)
    }

    /// Node count for an integrand whose phase varies by `phase_span`
    /// radians across the support. The base 96 is what Gauss-Legendre needs
    /// to integrate the bare bump to machine precision (its endpoint
    /// singularities cap convergence at root-exponential rate); 8 nodes per
    /// phase cycle keeps the oscillatory part fully resolved.
    pub(crate) fn nodes_for_phase(&self, phase_span: f64) -> Result<usize> {
        let cycles = (phase_span.abs() / (2.0 * PI)).ceil();
        if !cycles.is_finite() || cycles > (NODE_CEILING as f64) {
            return Err(Error::OscillationTooFast {
                nodes: if cycles.is_finite() {
                    96 + 8 * cycles as usize
                } else {
                    usize::MAX
                },
                ceiling: NODE_CEILING,
            });
        }
        let n = 96 + 8 * cycles as usize;
        if n > NODE_CEILING {
            return Err(Error::OscillationTooFast {
                nodes: n,
                ceiling: NODE_CEILING,
            });
        }
        Ok(n)
    }
}

/// The weight itself: φ(u) = φ₀((u−1)L).
pub fn weight(p: &WeightProfile, u: f64) -> f64 {
    bump((u - 1.0) * p.l)
}

/// ∫ φ(u) du over the support; equals (∫φ₀)/L ≈ 1.2069003/L.
///
/// Quadrature runs in the bump variable v = (u−1)L, where the support is
/// exactly [−1, 1] and GL nodes feed the bump directly — the u-space form
/// would lose ~5 digits to cancellation in u−1 at large L.
pub fn weight_integral(p: &WeightProfile) -> f64 {
    let t = gl_table(128);
    let mut acc = 0.0;
    for (x, w) in t.nodes.iter().zip(&t.weights) {
        acc += w * bump(*x);
    }
    acc / p.l
}

/// Mellin transform φ̂(s) = ∫ φ(u) u^{s-1} du. Entire in s; nodes scale
/// with |Im s| / L, the phase span of u^{iT} across the support.
pub fn mellin(p: &WeightProfile, s: Complex64) -> Result<Complex64> {
    // phase of u^{i Im s} spans about 2|Im s|/L radians over the support
    let n = p.nodes_for_phase(2.0 * s.im.abs() / p.l)?;
    let sm1 = s - 1.0;
    let t = gl_table(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in t.nodes.iter().zip(&t.weights) {
        let wt = bump(*x);
        if wt == 0.0 {
            continue;
        }
        let lnu = (x / p.l).ln_1p();
        acc += (sm1 * lnu).exp() * (w * wt);
    }
    Ok(acc / p.l)
}

/// m-th derivative of the Mellin transform by the Cauchy integral on a
/// circle of radius m·L. φ̂ is entire, so any radius is valid; this one
/// balances the e^{r/L} growth of |φ̂| against the r^{−m} concentration of
/// the kernel, keeping the cancellation between circle nodes — and with it
/// the f64 noise floor — independent of L (≈ 2.4^m · ε).
pub fn mellin_deriv(p: &WeightProfile, s: Complex64, m: usize) -> Result<Complex64> {
    if m == 0 {
        return mellin(p, s);
    }
    let radius = m as f64 * p.l;
    let mean = circle_mean(s, radius, 1e-12, |z| {
        let inner = mellin(p, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        inner * (z - s).powi(-(m as i32))
    })?;
    if !mean.re.is_finite() || !mean.im.is_finite() {
        return Err(Error::NonConvergence {
            what: "mellin_deriv circle integrand",
            residual: f64::NAN,
        });
    }
    let mut fact = 1.0;
    for i in 1..=m {
        fact *= i as f64;
    }
    Ok(mean * fact)
}

/// Numerator polynomials P_r with φ₀^{(r)}(v) = P_r(v) (1−v²)^{−2r} φ₀(v);
/// index r, ascending coefficients.
fn bump_numerators(up_to: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![1.0]];
    for r in 0..up_to {
        let p = &out[r];
        // P' as a polynomial
        let dp: Vec<f64> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
        // q = P'·(1−v²) + 4r·v·P
        let mut q = vec![0.0; p.len() + 2];
        for (i, c) in dp.iter().enumerate() {
            q[i] += c;
            q[i + 2] -= c;
        }
        for (i, c) in p.iter().enumerate() {
            q[i + 1] += 4.0 * r as f64 * c;
        }
        // next = q·(1−v²) − 2v·P
        let mut next = vec![0.0; q.len() + 2];
        for (i, c) in q.iter().enumerate() {
            next[i] += c;
            next[i + 2] -= c;
        }
        for (i, c) in p.iter().enumerate() {
            next[i + 1] -= 2.0 * c;
        }
        while next.len() > 1 && next.last() == Some(&0.0) {
            next.pop();
        }
        out.push(next);
    }
    out
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// r-th derivative of the standard bump at v (exact rational-times-bump
/// form; zero outside the open support).
pub fn bump_derivative(v: f64, r: usize) -> f64 {
    if v.abs() >= 1.0 {
        return 0.0;
    }
    if r == 0 {
        return bump(v);
    }
    let polys = bump_numerators(r);
    let om = 1.0 - v * v;
    poly_eval(&polys[r], v) * om.powi(-2 * (r as i32)) * bump(v)
}

/// sup over (−1,1) of |φ₀^{(r)}|: dense grid (20001 points) plus golden
/// refinement of the winning bracket. Supported for r ≤ 12.
pub fn bump_derivative_sup(r: usize) -> Result<f64> {
    if r > 12 {
        return Err(Error::Domain(alloc::format!(
            "bump derivative order {r} exceeds the supported maximum 12"
        )));
    }
    if r == 0 {
        return Ok(1.0);
    }
    let polys = bump_numerators(r);
    let f = |v: f64| -> f64 {
        if v.abs() >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - v * v;
        (poly_eval(&polys[r], v) * om.powi(-2 * (r as i32)) * bump(v)).abs()
    };
    let n = 20_000usize;
    let mut best_i = 0usize;
    let mut best = 0.0f64;
    for i in 0..=n {
        let v = -1.0 + 2.0 * i as f64 / n as f64;
        let y = f(v);
        if y > best {
            best = y;
            best_i = i;
        }
    }
    let mut lo = -1.0 + 2.0 * (best_i.saturating_sub(1)) as f64 / n as f64;
    let mut hi = -1.0 + 2.0 * (best_i + 1).min(n) as f64 / n as f64;
    // golden-section refinement on the bracketing interval
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    Ok(best.max(f1).max(f2))
}

/// sup over the support of |φ^{(r)}| for the positioned weight; the squeeze
/// contributes L^r by the chain rule. Supported for r ≤ 8.
pub fn derivative_sup(p: &WeightProfile, r: usize) -> Result<f64> {
    if r > 8 {
        return Err(Error::Domain(alloc::format!(
            "weight derivative order {r} exceeds the supported maximum 8"
        )));
    }
    Ok(p.l.powi(r as i32) * bump_derivative_sup(r)?)
}

/// ∫ φ(u) u^{power} cos(scale·u^{base} + offset) du over the support.
///
/// `power` and `offset` may be complex (the cosine of a complex argument is
/// bounded by cosh of its imaginary part on the support). Errors with
/// [`Error::OscillationTooFast`] when the phase span demands more than
/// [`NODE_CEILING`] nodes; `scale` must be nonnegative.
pub fn oscillatory_integral(
    p: &WeightProfile,
    base: f64,
    scale: f64,
    power: Complex64,
    offset: Complex64,
) -> Result<Complex64> {
    Ok(oscillatory_integral_multi(p, base, scale, &[(power, offset)])?[0])
}

/// Shared-node evaluation of several `(power, offset)` pairs against the
/// same oscillation scale; one exp/sincos per node is amortized across
/// terms.
pub fn oscillatory_integral_multi(
    p: &WeightProfile,
    base: f64,
    scale: f64,
    terms: &[(Complex64, Complex64)],
) -> Result<Vec<Complex64>> {
    if !(scale >= 0.0) || !scale.is_finite() || !base.is_finite() {
        return Err(Error::Domain(alloc::format!(
            "phase scale must be finite and nonnegative (scale {scale}, exponent base {base})"
        )));
    }
    let (a, b) = p.support();
    // phase span of scale·u^{base} across the support
    let span = scale * (b.powf(base) - a.powf(base)).abs();
    let n = p.nodes_for_phase(span)?;
    let table = gl_table(n);

    let all_real = terms
        .iter()
        .all(|(pw, off)| pw.im == 0.0 && off.im == 0.0);

    // quadrature in v = (u−1)L: nodes are exact bump arguments, u = 1 + v/L
    let mut acc = vec![Complex64::new(0.0, 0.0); terms.len()];

    if all_real {
        let offs: Vec<(f64, f64)> = terms.iter().map(|(_, off)| off.re.sin_cos()).collect();
        for (x, w) in table.nodes.iter().zip(&table.weights) {
            let wt = bump(*x);
            if wt == 0.0 {
                continue;
            }
            let lnu = (x / p.l).ln_1p();
            let phase = scale * (base * lnu).exp();
            let (sp, cp) = phase.sin_cos();
            for (k, (pw, _)) in terms.iter().enumerate() {
                let upow = (pw.re * lnu).exp();
                let (so, co) = offs[k];
                acc[k] += Complex64::new(w * wt * upow * (cp * co - sp * so), 0.0);
            }
        }
    } else {
        let i = Complex64::new(0.0, 1.0);
        // cos(z) = (e^{iz} + e^{-iz})/2 with z = phase + offset; the
        // offset factors are node-independent.
        let fward: Vec<Complex64> = terms.iter().map(|(_, off)| (i * off).exp() * 0.5).collect();
        let bward: Vec<Complex64> = terms.iter().map(|(_, off)| (-i * off).exp() * 0.5).collect();
        for (x, w) in table.nodes.iter().zip(&table.weights) {
            let wt = bump(*x);
            if wt == 0.0 {
                continue;
            }
            let lnu = (x / p.l).ln_1p();
            let phase = scale * (base * lnu).exp();
            let (sp, cp) = phase.sin_cos();
            let e = Complex64::new(cp, sp);
            let ec = e.conj();
            for (k, (pw, _)) in terms.iter().enumerate() {
                let upow = (pw * lnu).exp();
                acc[k] += upow * (e * fward[k] + ec * bward[k]) * (w * wt);
            }
        }
    }
    for v in &mut acc {
        *v /= p.l;
    }
    Ok(acc)
}
