//! Functional-equation data and the constants derived from it.
//!
//! A Dirichlet series φ(s) = Σ a_n λ_n^{−s} is tied to its dual
//! ψ(s) = Σ b_n μ_n^{−s} by Δ(s)φ(s) = ω Δ̃(1−s)ψ(1−s), where
//! Δ(s) = ∏ Γ(α_ν s + β_ν) and Δ̃(s) = ∏ Γ(α_ν s + β̃_ν). Everything the
//! series machinery needs downstream (A, B, B̃, h, a, k, e₀) is a closed-form
//! function of the gamma-factor data.

use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// One gamma factor: Γ(αs + β) on the primal side, Γ(αs + β̃) on the dual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub alpha: f64,
    pub beta: Complex64,
    pub beta_tilde: Complex64,
}

impl GammaFactor {
    pub fn new(alpha: f64, beta: Complex64, beta_tilde: Complex64) -> Self {
        GammaFactor {
            alpha,
            beta,
            beta_tilde,
        }
    }

    /// Factor with β = β̃ real, the common self-dual case.
    pub fn self_dual(alpha: f64, beta: f64) -> Self {
        let b = Complex64::new(beta, 0.0);
        GammaFactor {
            alpha,
            beta: b,
            beta_tilde: b,
        }
    }
}

/// A pole of φ inside the disk |s| < R, carried as its Laurent principal
/// part: `principal_part[i]` is the coefficient of (s − location)^{i − order}.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSpec {
    pub location: Complex64,
    pub order: usize,
    pub principal_part: Vec<Complex64>,
}

/// Full functional-equation description of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalEquationSpec {
    pub factors: Vec<GammaFactor>,
    pub omega: Complex64,
    /// Abscissa from which both series converge absolutely.
    pub sigma_star: f64,
    /// Radius R of the disk known to contain every pole of φ.
    pub pole_radius: f64,
    pub poles: Vec<PoleSpec>,
}

/// Constants computed once from the gamma-factor data:
/// A = Σα_ν, B = Σβ_ν, B̃ = Σβ̃_ν, h = ∏(2A/α_ν)^{2α_ν},
/// a = 1/(4A) − 1/2 − (B−B̃)/(2A) = −ϑ + iξ,
/// k = d/2 − 1/4 − (A+B+B̃)/2 = κ + iη with d the number of factors,
/// e₀ = √(2/π) ∏(2A/α_ν)^{α_ν+β_ν−β̃_ν}.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants {
    pub big_a: f64,
    pub b: Complex64,
    pub b_tilde: Complex64,
    pub h: f64,
    pub a: Complex64,
    pub k: Complex64,
    pub e0: Complex64,
    pub d: usize,
    pub omega: Complex64,
    pub sigma_star: f64,
}

impl DerivedConstants {
    /// ϑ = −Re a; the main terms decay like x^{1−ϑ}.
    pub fn theta(&self) -> f64 {
        -self.a.re
    }

    /// ξ = Im a.
    pub fn xi(&self) -> f64 {
        self.a.im
    }

    /// κ = Re k.
    pub fn kappa(&self) -> f64 {
        self.k.re
    }

    /// η = Im k.
    pub fn eta(&self) -> f64 {
        self.k.im
    }

    /// Shifted exponent ϑ(j) = ϑ + j/(2A).
    pub fn theta_j(&self, j: usize) -> f64 {
        self.theta() + j as f64 / (2.0 * self.big_a)
    }

    /// σ₀ = ϑ + 1/(4A), the fitting abscissa for the ratio expansion.
    pub fn sigma0(&self) -> f64 {
        self.theta() + 1.0 / (4.0 * self.big_a)
    }
}

/// Smallest positive integer strictly greater than x.
pub fn strict_positive_ceiling(x: f64) -> usize {
    if x < 0.0 {
        return 1;
    }
    let next = x.floor() + 1.0;
    if next < 1.0 {
        1
    } else {
        next as usize
    }
}

/// Checks the machine-checkable structural invariants; violations come back
/// as messages, an empty list meaning the spec is usable.
pub fn validate_spec(spec: &FunctionalEquationSpec) -> Vec<String> {
    let mut out = Vec::new();
    if spec.factors.is_empty() {
        out.push(String::from("factor list is empty"));
    }
    for (i, f) in spec.factors.iter().enumerate() {
        if !(f.alpha > 0.0) || !f.alpha.is_finite() {
            out.push(format!(
                "factor {i}: alpha must be strictly positive, got {}",
                f.alpha
            ));
        }
        if !f.beta.re.is_finite()
            || !f.beta.im.is_finite()
            || !f.beta_tilde.re.is_finite()
            || !f.beta_tilde.im.is_finite()
        {
            out.push(format!("factor {i}: beta/betaTilde must be finite"));
        }
    }
    let om = spec.omega.norm();
    if !om.is_finite() || (om - 1.0).abs() > 1e-12 {
        out.push(format!(
            "root number modulus |omega| = {om:.15} differs from 1 by more than 1e-12"
        ));
    }
    if !(spec.sigma_star > 0.0) || !spec.sigma_star.is_finite() {
        out.push(format!(
            "sigmaStar must be positive, got {}",
            spec.sigma_star
        ));
    }
    if !(spec.pole_radius > 0.0) || !spec.pole_radius.is_finite() {
        out.push(format!(
            "poleRadius must be positive, got {}",
            spec.pole_radius
        ));
    }
    for (i, p) in spec.poles.iter().enumerate() {
        if p.order == 0 {
            out.push(format!("pole {i}: order must be at least 1"));
        }
        if p.principal_part.len() != p.order {
            out.push(format!(
                "pole {i}: principal part has {} coefficients, order is {}",
                p.principal_part.len(),
                p.order
            ));
        }
        if p.principal_part.first().map_or(true, |c| c.norm() == 0.0) {
            out.push(format!(
                "pole {i}: leading Laurent coefficient must be nonzero"
            ));
        }
        if !(p.location.norm() < spec.pole_radius) {
            out.push(format!(
                "pole {i}: pole outside disk (|location| = {:.6} >= R = {})",
                p.location.norm(),
                spec.pole_radius
            ));
        }
    }
    out
}

/// Computes the derived constants; fails with the validation report when the
/// spec is structurally unusable.
pub fn derive_constants(spec: &FunctionalEquationSpec) -> Result<DerivedConstants> {
    let issues = validate_spec(spec);
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let d = spec.factors.len();
    let big_a: f64 = spec.factors.iter().map(|f| f.alpha).sum();
    let b: Complex64 = spec.factors.iter().map(|f| f.beta).sum();
    let b_tilde: Complex64 = spec.factors.iter().map(|f| f.beta_tilde).sum();

    let mut ln_h = 0.0;
    let mut ln_e0 = Complex64::new(0.0, 0.0);
    for f in &spec.factors {
        let ln_ratio = (2.0 * big_a / f.alpha).ln();
        ln_h += 2.0 * f.alpha * ln_ratio;
        ln_e0 += (Complex64::new(f.alpha, 0.0) + f.beta - f.beta_tilde) * ln_ratio;
    }
    let h = ln_h.exp();
    let e0 = (2.0 / core::f64::consts::PI).sqrt() * ln_e0.exp();

    let a = Complex64::new(1.0 / (4.0 * big_a) - 0.5, 0.0) - (b - b_tilde) / (2.0 * big_a);
    let k = Complex64::new(d as f64 / 2.0 - 0.25, 0.0) - (big_a + b + b_tilde) / 2.0;

    Ok(DerivedConstants {
        big_a,
        b,
        b_tilde,
        h,
        a,
        k,
        e0,
        d,
        omega: spec.omega,
        sigma_star: spec.sigma_star,
    })
}

/// ς = ω e₀ b₁/|b₁|, the unimodular-rescaled leading dual coefficient that
/// normalizes the detected oscillation.
pub fn sign_scalar(consts: &DerivedConstants, b1: Complex64) -> Result<Complex64> {
    let n = b1.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Domain(String::from(
            "sign scalar needs a nonzero leading dual coefficient",
        )));
    }
    Ok(consts.omega * consts.e0 * b1 / n)
}
