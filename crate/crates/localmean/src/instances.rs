//! Builtin functional-equation instances matching the builtin streams, plus
//! black-box evaluators of their completed Dirichlet series for contour
//! oracles.

use crate::feq::{FunctionalEquationSpec, GammaFactor, PoleSpec};
use crate::special::zeta;
use crate::{Complex64, Result};
use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

pub const EULER_GAMMA: f64 = 0.5772156649015329;

const PI: f64 = core::f64::consts::PI;

/// Γ(s/2)-type equation for Σ (√π·n)^{−s}: one factor α = 1/2, simple pole
/// at s = 1 with residue 1/√π.
pub fn zeta_spec() -> FunctionalEquationSpec {
    FunctionalEquationSpec {
        factors: vec![GammaFactor::self_dual(0.5, 0.0)],
        omega: Complex64::new(1.0, 0.0),
        sigma_star: 1.1,
        pole_radius: 2.0,
        poles: vec![PoleSpec {
            location: Complex64::new(1.0, 0.0),
            order: 1,
            principal_part: vec![Complex64::new(1.0 / PI.sqrt(), 0.0)],
        }],
    }
}

/// Squared equation for Σ d(n)(π·n)^{−s}: two α = 1/2 factors, double pole
/// at s = 1 with principal part 1/(π(s−1)²) + (2γ − ln π)/(π(s−1)).
pub fn zeta_squared_spec() -> FunctionalEquationSpec {
    FunctionalEquationSpec {
        factors: vec![
            GammaFactor::self_dual(0.5, 0.0),
            GammaFactor::self_dual(0.5, 0.0),
        ],
        omega: Complex64::new(1.0, 0.0),
        sigma_star: 1.1,
        pole_radius: 2.0,
        poles: vec![PoleSpec {
            location: Complex64::new(1.0, 0.0),
            order: 2,
            principal_part: vec![
                Complex64::new(1.0 / PI, 0.0),
                Complex64::new((2.0 * EULER_GAMMA - PI.ln()) / PI, 0.0),
            ],
        }],
    }
}

/// Weight-12 cusp-form equation for Σ τ(n)n^{−11/2}(2π·n)^{−s}: one factor
/// Γ(s + 11/2), entire.
pub fn delta_spec() -> FunctionalEquationSpec {
    FunctionalEquationSpec {
        factors: vec![GammaFactor::self_dual(1.0, 5.5)],
        omega: Complex64::new(1.0, 0.0),
        sigma_star: 1.6,
        pole_radius: 2.0,
        poles: vec![],
    }
}

/// φ(s) = π^{−s/2} ζ(s) for the first instance.
pub fn phi_eval_zeta(s: Complex64) -> Result<Complex64> {
    Ok((-s * PI.ln() / 2.0).exp() * zeta(s))
}

/// φ(s) = π^{−s} ζ(s)² for the squared instance.
pub fn phi_eval_zeta_squared(s: Complex64) -> Result<Complex64> {
    let z = zeta(s);
    Ok((-s * PI.ln()).exp() * z * z)
}
