//! Special functions.

use crate::error::{domain, Result};

// B_{2j} / (2j)! for j = 1..12
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
    854_513.0 / 138.0 / 1_124_000_727_777_607_680_000.0,
    -236_364_091.0 / 2730.0 / 620_448_401_733_239_439_360_000.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("Hurwitz zeta needs s > 1, got s = {s}"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("Hurwitz zeta needs a > 0, got a = {a}"));
    }
    let shift = if a < 16.0 { (16.0 - a).ceil() as usize } else { 0 };
    let mut head = 0.0;
    // add the small terms first
    for k in (0..shift).rev() {
        head += (k as f64 + a).powf(-s);
    }
    let x = shift as f64 + a;
    let xs = x.powf(-s);
    let mut tail = x * xs / (s - 1.0) + 0.5 * xs;
    // rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut term = s * xs / x;
    let x2 = x * x;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let add = c * term;
        tail += add;
        if add.abs() < 1e-17 * tail.abs() {
            break;
        }
        let j = j as f64 + 1.0;
        term *= (s + 2.0 * j - 1.0) * (s + 2.0 * j) / x2;
    }
    Ok(head + tail)
}
