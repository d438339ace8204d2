//! Coefficient streams: the (λ_n, a_n) / (μ_n, b_n) pairs a Dirichlet series
//! exposes, plus the builtin instances and text ingestion.

use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Zeta,
    ZetaSquared,
    RamanujanDelta,
    FromFile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamPoint {
    pub lambda: f64,
    pub a: Complex64,
}

/// Ordered coefficient data. `dual` is `None` exactly when the stream is
/// self-dual, so the points/dual-points identity holds structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientStream {
    pub kind: StreamKind,
    pub degree_two_a: Option<f64>,
    points: Vec<StreamPoint>,
    dual: Option<Vec<StreamPoint>>,
}

fn check_side(points: &[StreamPoint], side: &str) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Data(format!("{side} stream is empty")));
    }
    if points[0].a.norm() == 0.0 {
        return Err(Error::Data(format!(
            "{side} stream has zero first coefficient"
        )));
    }
    let mut prev = 0.0;
    for (i, p) in points.iter().enumerate() {
        if !p.lambda.is_finite() || !p.a.re.is_finite() || !p.a.im.is_finite() {
            return Err(Error::Data(format!(
                "{side} stream entry {} is not finite",
                i + 1
            )));
        }
        if p.lambda <= prev {
            return Err(Error::Data(format!(
                "{side} stream not strictly increasing at entry {}",
                i + 1
            )));
        }
        prev = p.lambda;
    }
    Ok(())
}

impl CoefficientStream {
    pub fn from_parts(
        kind: StreamKind,
        points: Vec<StreamPoint>,
        dual: Option<Vec<StreamPoint>>,
        degree_two_a: Option<f64>,
    ) -> Result<Self> {
        check_side(&points, "primary")?;
        if let Some(d) = &dual {
            check_side(d, "dual")?;
        }
        Ok(CoefficientStream {
            kind,
            degree_two_a,
            points,
            dual,
        })
    }

    pub fn self_dual(&self) -> bool {
        self.dual.is_none()
    }

    pub fn points(&self) -> &[StreamPoint] {
        &self.points
    }

    pub fn dual_points(&self) -> &[StreamPoint] {
        self.dual.as_deref().unwrap_or(&self.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

const SQRT_PI: f64 = 1.7724538509055160273;
const PI: f64 = core::f64::consts::PI;

/// λ_n = √π·n, a_n = 1.
pub fn zeta_stream(limit: usize) -> CoefficientStream {
    let points = (1..=limit)
        .map(|n| StreamPoint {
            lambda: SQRT_PI * n as f64,
            a: Complex64::new(1.0, 0.0),
        })
        .collect();
    CoefficientStream {
        kind: StreamKind::Zeta,
        degree_two_a: Some(1.0),
        points,
        dual: None,
    }
}

pub(crate) fn divisor_sieve(limit: usize) -> Vec<u32> {
    let mut d = vec![0u32; limit + 1];
    for k in 1..=limit {
        let mut m = k;
        while m <= limit {
            d[m] += 1;
            m += k;
        }
    }
    d
}

/// λ_n = π·n, a_n = d(n) by divisor sieve.
pub fn zeta_squared_stream(limit: usize) -> CoefficientStream {
    let d = divisor_sieve(limit);
    let points = (1..=limit)
        .map(|n| StreamPoint {
            lambda: PI * n as f64,
            a: Complex64::new(d[n] as f64, 0.0),
        })
        .collect();
    CoefficientStream {
        kind: StreamKind::ZetaSquared,
        degree_two_a: Some(2.0),
        points,
        dual: None,
    }
}

pub const DELTA_STREAM_CEILING: usize = 1_000_000;

/// τ(1), …, τ(limit) exactly. The coefficients of q·∏(1−q^k)²⁴ are produced
/// by the log-derivative recurrence of that truncated product against the
/// sparse pentagonal expansion of ∏(1−q^k):
///   n·f(n) = Σ_{g_j ≤ n} (−1)^j (25·g_j − n) f(n − g_j),  f(0) = 1,
/// over the generalized pentagonal numbers g_j = j(3j∓1)/2, with
/// τ(n) = f(n−1). The division by n is exact at every step.
///
/// |τ(n)| ≤ d(n)·n^{11/2} < 2^118 for n ≤ 10^6, so every value fits i128;
/// the dot product Σ(25g−n)f(n−g) needs up to ~2^153 bits and is carried in
/// a 256-bit two's-complement accumulator. The ceiling guard keeps these
/// bounds valid.
pub fn tau_series(limit: usize) -> Result<Vec<i128>> {
    if limit > DELTA_STREAM_CEILING {
        return Err(Error::Domain(format!(
            "coefficient count {limit} exceeds the ceiling {DELTA_STREAM_CEILING}"
        )));
    }
    if limit == 0 {
        return Ok(Vec::new());
    }
    // pentagonal pairs (g_j, sign), ascending in g
    let top = limit - 1;
    let mut pent: Vec<(usize, i64)> = Vec::new();
    let mut j = 1usize;
    loop {
        let g1 = j * (3 * j - 1) / 2;
        if g1 > top {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        pent.push((g1, sign));
        let g2 = j * (3 * j + 1) / 2;
        if g2 <= top {
            pent.push((g2, sign));
        }
        j += 1;
    }
    let mut f: Vec<i128> = Vec::with_capacity(limit);
    f.push(1);
    for n in 1..=top {
        let mut acc = [0u64; 4];
        for &(g, sign) in &pent {
            if g > n {
                break;
            }
            let w = sign * (25 * g as i64 - n as i64);
            acc_add_product(&mut acc, f[n - g], w);
        }
        f.push(acc_div_exact(acc, n as u64));
    }
    Ok(f)
}

/// acc += f·w in 256-bit two's complement. |f| < 2^118, |w| < 2^26.
#[inline]
fn acc_add_product(acc: &mut [u64; 4], f: i128, w: i64) {
    let fm = f.unsigned_abs();
    let wm = w.unsigned_abs() as u128;
    // 128×64 → 192-bit magnitude
    let p0 = (fm as u64 as u128) * wm;
    let p1 = ((fm >> 64) as u128) * wm + (p0 >> 64);
    let mut limbs = [p0 as u64, p1 as u64, (p1 >> 64) as u64, 0u64];
    if (f < 0) != (w < 0) {
        // two's-complement negation
        let mut carry = 1u64;
        for l in &mut limbs {
            let (v, c) = (!*l).overflowing_add(carry);
            *l = v;
            carry = c as u64;
        }
    }
    let mut carry = 0u64;
    for (a, &l) in acc.iter_mut().zip(&limbs) {
        let (v1, c1) = a.overflowing_add(l);
        let (v2, c2) = v1.overflowing_add(carry);
        *a = v2;
        carry = (c1 | c2) as u64;
    }
}

/// acc / n for a 256-bit two's-complement acc whose quotient fits i128.
/// The recurrence guarantees the division is exact.
fn acc_div_exact(mut acc: [u64; 4], n: u64) -> i128 {
    let neg = acc[3] >> 63 != 0;
    if neg {
        let mut carry = 1u64;
        for l in &mut acc {
            let (v, c) = (!*l).overflowing_add(carry);
            *l = v;
            carry = c as u64;
        }
    }
    let n128 = n as u128;
    let mut rem = 0u64;
    let mut q = [0u64; 4];
    for i in (0..4).rev() {
        let cur = ((rem as u128) << 64) | acc[i] as u128;
        q[i] = (cur / n128) as u64;
        rem = (cur % n128) as u64;
    }
    debug_assert!(rem == 0, "recurrence division not exact");
    debug_assert!(q[2] == 0 && q[3] == 0, "τ value exceeds i128");
    let mag = ((q[1] as u128) << 64) | q[0] as u128;
    if neg {
        -(mag as i128)
    } else {
        mag as i128
    }
}

/// λ_n = 2π·n, a_n = τ(n)/n^{11/2}, self-dual.
pub fn delta_stream(limit: usize) -> Result<CoefficientStream> {
    let tau = tau_series(limit)?;
    let points = tau
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let n = (i + 1) as f64;
            StreamPoint {
                lambda: 2.0 * PI * n,
                a: Complex64::new(*t as f64 / n.powf(5.5), 0.0),
            }
        })
        .collect();
    Ok(CoefficientStream {
        kind: StreamKind::RamanujanDelta,
        degree_two_a: Some(2.0),
        points,
        dual: None,
    })
}

/// Exponent table for the coefficient bound |a_n| ≤ d_m(n)·n^{θ_m} used to
/// sanity-check ingested degree-m data. Advisory only.
pub fn ramanujan_exponent(m: u32) -> f64 {
    match m {
        0 | 1 => 0.0,
        2 => 7.0 / 64.0,
        3 => 5.0 / 14.0,
        4 => 9.0 / 22.0,
        _ => 0.5 - 1.0 / (m as f64 * m as f64 + 1.0),
    }
}

/// m-fold divisor function d_m(n) for n ≤ limit, by repeated Dirichlet
/// convolution with 1.
pub fn divisor_m_sieve(m: u32, limit: usize) -> Vec<f64> {
    let mut d = vec![1.0f64; limit + 1];
    if limit == 0 {
        return d;
    }
    d[0] = 0.0;
    for _ in 1..m.max(1) {
        let mut next = vec![0.0f64; limit + 1];
        for k in 1..=limit {
            let mut mult = k;
            let mut q = 1;
            while mult <= limit {
                next[mult] += d[q];
                mult += k;
                q += 1;
            }
        }
        d = next;
        d[0] = 0.0;
    }
    d
}

/// Positional check of |a_n| ≤ d_m(n)·n^{θ_m}·(1+1e−9); returns one warning
/// line per violation (capped), never an error.
pub fn coefficient_bound_warnings(stream: &CoefficientStream, m: u32) -> Vec<String> {
    let pts = stream.points();
    let dm = divisor_m_sieve(m, pts.len());
    let theta = ramanujan_exponent(m);
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let n = (i + 1) as f64;
        let cap = dm[i + 1] * n.powf(theta) * (1.0 + 1e-9);
        if p.a.norm() > cap {
            out.push(format!(
                "entry {}: |a| = {} exceeds degree-{m} coefficient bound {}",
                i + 1,
                p.a.norm(),
                cap
            ));
            if out.len() >= 20 {
                out.push("further violations suppressed".to_string());
                break;
            }
        }
    }
    out
}

/// CSV layout: header `lambda,aRe,aIm` (self-dual) or
/// `lambda,aRe,aIm,mu,bRe,bIm`; one row per n.
pub fn parse_stream_csv(text: &str) -> Result<CoefficientStream> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Data("empty stream file".to_string()))?;
    let header = header.trim();
    let with_dual = match header {
        "lambda,aRe,aIm" => false,
        "lambda,aRe,aIm,mu,bRe,bIm" => true,
        _ => {
            return Err(Error::Data(format!(
                "line 1: unrecognized header {header:?}"
            )))
        }
    };
    let mut points = Vec::new();
    let mut dual = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let want = if with_dual { 6 } else { 3 };
        if fields.len() != want {
            return Err(Error::Data(format!(
                "line {lineno}: expected {want} fields, found {}",
                fields.len()
            )));
        }
        let mut nums = [0.0f64; 6];
        for (k, field) in fields.iter().enumerate() {
            nums[k] = field.parse::<f64>().map_err(|_| {
                Error::Data(format!("line {lineno}: cannot parse number {field:?}"))
            })?;
        }
        points.push(StreamPoint {
            lambda: nums[0],
            a: Complex64::new(nums[1], nums[2]),
        });
        if with_dual {
            dual.push(StreamPoint {
                lambda: nums[3],
                a: Complex64::new(nums[4], nums[5]),
            });
        }
    }
    CoefficientStream::from_parts(
        StreamKind::FromFile,
        points,
        if with_dual { Some(dual) } else { None },
        None,
    )
}
