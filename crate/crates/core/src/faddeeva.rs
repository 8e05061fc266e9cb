//! Faddeeva function `w(z) = exp(-z²)·erfc(-iz)` in the closed upper half-plane.
//!
//! Weideman's rational expansion with 32 terms. Absolute error is near 1e-15
//! for `Im z >= 0`, which is the only half-plane a Voigt profile needs.

use std::f64::consts::PI;
use std::sync::LazyLock;

const TERMS: usize = 32;

struct Expansion {
    scale: f64,
    // polynomial coefficients a_1..a_N, lowest order first
    coeffs: [f64; TERMS],
}

static EXPANSION: LazyLock<Expansion> = LazyLock::new(|| {
    let n = TERMS;
    let m = 2 * n;
    let scale = (n as f64 / 2f64.sqrt()).sqrt();
    // f_k on k = -M+1..M-1 (f_{-M} = 0), even in k
    let samples: Vec<(f64, f64)> = (-(m as i64) + 1..m as i64)
        .map(|k| {
            let theta = k as f64 * PI / m as f64;
            let t = scale * (theta / 2.0).tan();
            (k as f64, (-t * t).exp() * (scale * scale + t * t))
        })
        .collect();
    let mut coeffs = [0.0; TERMS];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let order = (j + 1) as f64;
        let sum: f64 = samples
            .iter()
            .map(|&(k, f)| f * (PI * k * order / m as f64).cos())
            .sum();
        *c = sum / (2 * m) as f64;
    }
    Expansion { scale, coeffs }
});

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: Self) -> Self {
        // Smith's algorithm
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Self::new((self.re + self.im * r) / d, (self.im - self.re * r) / d)
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Self::new((self.re * r + self.im) / d, (self.im * r - self.re) / d)
        }
    }
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
    fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

/// `w(x + iy)` for `y >= 0`.
pub(crate) fn faddeeva(x: f64, y: f64) -> C64 {
    debug_assert!(y >= 0.0);
    let exp = &*EXPANSION;
    let l = exp.scale;
    // L - iz = (L + y) - ix ; L + iz = (L - y) + ix
    let denom = C64::new(l + y, -x);
    let numer = C64::new(l - y, x);
    let z_map = numer.div(denom);
    let mut p = C64::new(0.0, 0.0);
    for &c in exp.coeffs.iter().rev() {
        p = p.mul(z_map).add(C64::new(c, 0.0));
    }
    let inv = C64::new(1.0, 0.0).div(denom);
    p.mul(inv).mul(inv).scale(2.0).add(inv.scale(1.0 / PI.sqrt()))
}

/// Scaled complementary error function `exp(y²)·erfc(y)` for `y >= 0`, which
/// equals `Re w(iy)`.
pub(crate) fn erfcx(y: f64) -> f64 {
    faddeeva(0.0, y).re
}
