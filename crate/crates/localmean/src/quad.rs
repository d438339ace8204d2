//! Gauss-Legendre quadrature and a doubling trapezoid rule for circle
//! contours.
//!
//! Node/weight tables are computed by Newton iteration on the Legendre
//! recurrence. With `std` enabled, tables are cached per order behind a
//! mutex; without it they are recomputed on demand.

use crate::{Complex64, Error, Result};
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug)]
pub struct GlTable {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_gl(n: usize) -> GlTable {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dpn = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: (k+1)P_{k+1} = (2k+1)xP_k - kP_{k-1}
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dpn = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                // one polishing step after convergence
                let mut q0 = 1.0;
                let mut q1 = x;
                for k in 1..n {
                    let kf = k as f64;
                    let q2 = ((2.0 * kf + 1.0) * x * q1 - kf * q0) / (kf + 1.0);
                    q0 = q1;
                    q1 = q2;
                }
                dpn = nf * (x * q1 - q0) / (x * x - 1.0);
                x -= q1 / dpn;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dpn * dpn);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GlTable { nodes, weights }
}

#[cfg(feature = "std")]
fn table_cached(n: usize) -> Arc<GlTable> {
    use std::collections::BTreeMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<GlTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(n).or_insert_with(|| Arc::new(compute_gl(n))).clone()
}

/// Gauss-Legendre table of the given order (cached when `std` is on).
pub fn gl_table(n: usize) -> Arc<GlTable> {
    #[cfg(feature = "std")]
    {
        table_cached(n)
    }
    #[cfg(not(feature = "std"))]
    {
        Arc::new(compute_gl(n))
    }
}

impl GlTable {
    /// ∫_a^b f, exact for polynomials of degree < 2n.
    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Complex-valued counterpart of [`integrate_real`](Self::integrate_real).
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

/// Mean of f over the circle |z - center| = radius by the trapezoid rule,
/// doubling the node count until successive values agree to `tol` (relative
/// to the larger of 1 and the magnitude). Trapezoid is spectrally accurate
/// for periodic analytic integrands.
pub fn circle_mean<F: FnMut(Complex64) -> Complex64>(
    center: Complex64,
    radius: f64,
    tol: f64,
    mut f: F,
) -> Result<Complex64> {
    let mut n = 96usize;
    let mut prev: Option<Complex64> = None;
    loop {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let th = 2.0 * PI * (k as f64) / (n as f64);
            let z = center + Complex64::new(radius * th.cos(), radius * th.sin());
            acc += f(z);
        }
        acc /= n as f64;
        if let Some(p) = prev {
            let err = (acc - p).norm();
            if err <= tol * acc.norm().max(1.0) {
                return Ok(acc);
            }
        }
        prev = Some(acc);
        if n >= 1 << 16 {
            return Err(Error::NonConvergence {
                what: "circle_mean trapezoid refinement",
                residual: prev.map(|p| p.norm()).unwrap_or(f64::NAN),
            });
        }
        n *= 2;
    }
}
