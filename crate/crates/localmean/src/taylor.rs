//! Truncated Taylor-series ("jet") arithmetic over Complex64.
//!
//! A jet stores the scaled derivatives c[i] = f^{(i)}(w0)/i! at a fixed
//! expansion point. Orders stay small (<= 9 here), so the O(n^2) products
//! are the right tool. Used to measure derivative suprema of composite
//! integrand profiles without symbolic differentiation.

use crate::Complex64;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug)]
pub(crate) struct Jet {
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(v: Complex64, ord: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); ord + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at w0.
    pub fn variable(w0: Complex64, ord: usize) -> Self {
        let mut j = Jet::constant(w0, ord);
        if ord >= 1 {
            j.c[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// f^{(r)}(w0), un-scaled.
    pub fn derivative(&self, r: usize) -> Complex64 {
        let mut fact = 1.0;
        for i in 1..=r {
            fact *= i as f64;
        }
        self.c[r] * fact
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| a + b)
            .collect();
        Jet { c }
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet {
            c: self.c.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.order();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Jet { c }
    }

    /// 1/f; requires f(w0) != 0.
    pub fn recip(&self) -> Jet {
        let n = self.order();
        let inv0 = self.c[0].inv();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[0] = inv0;
        for k in 1..=n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * c[k - j];
            }
            c[k] = -s * inv0;
        }
        Jet { c }
    }

    /// exp(f): e_k = (1/k) Σ_{j=1..k} j a_j e_{k-j}.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[0] = self.c[0].exp();
        for k in 1..=n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * c[k - j] * (j as f64);
            }
            c[k] = s / (k as f64);
        }
        Jet { c }
    }

    /// ln(f), principal branch at the base point; requires f(w0) != 0.
    pub fn ln(&self) -> Jet {
        let n = self.order();
        let inv0 = self.c[0].inv();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[0] = self.c[0].ln();
        for k in 1..=n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..k {
                s += c[j] * self.c[k - j] * (j as f64);
            }
            c[k] = (self.c[k] * (k as f64) - s) * inv0 / (k as f64);
        }
        Jet { c }
    }

    /// f^p for complex exponent, via exp(p ln f).
    pub fn powc(&self, p: Complex64) -> Jet {
        self.ln().scale(p).exp()
    }
}
