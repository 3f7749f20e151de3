//! Adaptive Gauss–Kronrod (21-point) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Adaptive quadrature settings.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv = [(0.0, 0.0); 10];
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * fc.abs();
    for i in 0..10 {
        let dx = h * XGK[i];
        let (f1, f2) = (f(c - dx), f(c + dx));
        fv[i] = (f1, f2);
        kron += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    // QUADPACK error heuristic
    let mean = 0.5 * kron;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((fv[i].0 - mean).abs() + (fv[i].1 - mean).abs());
    }
    let (value, resabs, resasc) = (kron * h, resabs * h.abs(), resasc * h.abs());
    let mut err = ((kron - gauss) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    (value, err.max(50.0 * f64::EPSILON * resabs))
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature { abs_tol, rel_tol, ..Default::default() }
    }

    /// `∫_a^b f`, splitting additionally at the given interior points.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadResult> {
        if points.len() < 2 {
            return Err(Error::Domain("at least two break points are needed".into()));
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(a.is_finite() && b.is_finite()) || b < a {
                return Err(Error::Domain(format!("invalid integration interval [{a}, {b}]")));
            }
            if b > a {
                let (value, error) = gk21(&f, a, b);
                evaluations += 21;
                heap.push(Segment { a, b, value, error });
            }
        }
        let total = |heap: &BinaryHeap<Segment>| {
            heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
        };
        loop {
            let (value, error) = total(&heap);
            if !value.is_finite() {
                return Err(Error::Domain("integrand is not finite".into()));
            }
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                return Ok(QuadResult { value, error, evaluations, converged: true });
            }
            if heap.len() >= self.max_intervals {
                return Ok(QuadResult { value, error, evaluations, converged: false });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => return Ok(QuadResult { value: 0.0, error: 0.0, evaluations, converged: true }),
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted at machine precision
                heap.push(Segment { error: 0.0, ..worst });
                continue;
            }
            let (v1, e1) = gk21(&f, worst.a, mid);
            let (v2, e2) = gk21(&f, mid, worst.b);
            evaluations += 42;
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// `∫_a^∞ f` through the map `u = a + v/(1−v)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<QuadResult> {
        let g = |v: f64| {
            if v >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - v;
            let u = a + v / one_minus;
            let y = f(u);
            if y == 0.0 {
                0.0
            } else {
                y / (one_minus * one_minus)
            }
        };
        self.integrate(g, 0.0, 1.0)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let q = Quadrature::default();
        let r = q.integrate(|x| x.powi(30), -1.0, 1.0).unwrap();
        assert!((r.value - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn kinks_and_breaks() {
        let q = Quadrature::default();
        let r = q.integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0]).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        let r = q.integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0).unwrap();
        assert!((r.value - 0.29).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite() {
        let q = Quadrature::default();
        let r = q.integrate_to_infinity(|x: f64| (-2.0 * x).exp(), 1.0).unwrap();
        assert!((r.value - (-2.0f64).exp() / 2.0).abs() < 1e-12);
        let r = q.integrate_to_infinity(|x: f64| (1.0 + x).powf(-3.0), 0.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
