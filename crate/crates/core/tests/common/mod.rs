//! Oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use harvestlab::quadrature::{integrate_1d, integrate_2d, ComplexValue, Interval1D, QuadConfig, QuadResult, Rect2D};
use num_complex::Complex64;

pub struct AnalyticCase {
    pub name: &'static str,
    pub exact: Complex64,
    pub run: fn(&QuadConfig) -> QuadResult,
}

fn iv(lo: f64, hi: f64) -> Interval1D {
    Interval1D::new(lo, hi).unwrap()
}

/// Integrals with closed forms: √π, π/4, 2i, π, 6, 0.
pub fn analytic_cases() -> Vec<AnalyticCase> {
    vec![
        AnalyticCase {
            name: "exp(-x^2) on [-8, 8]",
            exact: Complex64::new(PI.sqrt(), 0.0),
            run: |cfg| integrate_1d(|x| ComplexValue::new((-x * x).exp(), 0.0), iv(-8.0, 8.0), cfg).unwrap(),
        },
        AnalyticCase {
            name: "1/(1+x^2) on [0, 1]",
            exact: Complex64::new(PI / 4.0, 0.0),
            run: |cfg| integrate_1d(|x| ComplexValue::new(1.0 / (1.0 + x * x), 0.0), iv(0.0, 1.0), cfg).unwrap(),
        },
        AnalyticCase {
            name: "exp(ix) on [0, pi]",
            exact: Complex64::new(0.0, 2.0),
            run: |cfg| integrate_1d(|x| ComplexValue::new(x.cos(), x.sin()), iv(0.0, PI), cfg).unwrap(),
        },
        AnalyticCase {
            name: "exp(-x^2-y^2) on [-8, 8]^2",
            exact: Complex64::new(PI, 0.0),
            run: |cfg| {
                let d = Rect2D::new(iv(-8.0, 8.0), iv(-8.0, 8.0));
                integrate_2d(|x, y| ComplexValue::new((-x * x - y * y).exp(), 0.0), d, cfg).unwrap()
            },
        },
        AnalyticCase {
            name: "1 on [0, 2] x [0, 3]",
            exact: Complex64::new(6.0, 0.0),
            run: |cfg| {
                let d = Rect2D::new(iv(0.0, 2.0), iv(0.0, 3.0));
                integrate_2d(|_, _| ComplexValue::new(1.0, 0.0), d, cfg).unwrap()
            },
        },
        AnalyticCase {
            name: "x y exp(-x^2-y^2) on [-8, 8]^2",
            exact: Complex64::new(0.0, 0.0),
            run: |cfg| {
                let d = Rect2D::new(iv(-8.0, 8.0), iv(-8.0, 8.0));
                integrate_2d(|x, y| ComplexValue::new(x * y * (-x * x - y * y).exp(), 0.0), d, cfg).unwrap()
            },
        },
    ]
}

/// Midpoint sum of the E integral written straight from its definition.
pub fn riemann_e(c1: f64, c2: f64, c3: f64, cells: usize) -> f64 {
    let alpha = (c1 * c3 / (2.0 * c2)).powi(2);
    let r = 16.0 * c2 / (c1 * c3);
    let h = 2.0 * r / cells as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..cells {
        let y = -r + (k as f64 + 0.5) * h;
        let s = Complex64::new(c1 * y / 2.0, -c2).sinh();
        sum += (-alpha * y * y).exp() / (s * s);
    }
    let pref = -c1 * c2 * (-c3 * c3).exp() / (16.0 * PI.powf(1.5) * c3);
    pref * (sum.re * h)
}

/// Midpoint sum of the X integral on `[-R, R] × [0, R]`.
pub fn riemann_x(c1: f64, c2: f64, c3: f64, nx: usize, ny: usize) -> Complex64 {
    let alpha = (c1 * c3 / (2.0 * c2)).powi(2);
    let r = 16.0 * c2 / (c1 * c3);
    let (hx, hy) = (2.0 * r / nx as f64, r / ny as f64);
    let phase = Complex64::new(0.0, c2).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..nx {
        let x = -r + (i as f64 + 0.5) * hx;
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..ny {
            let y = (j as f64 + 0.5) * hy;
            let sh = (c1 * y / 2.0).sinh();
            let d1 = c1 / 2.0 - (-c1 * x / 2.0).exp() * sh / phase;
            let d2 = c1 / 2.0 + (c1 * x / 2.0).exp() * sh * phase;
            row += (-alpha * (x * x + y * y)).exp() / (d1 * d2);
        }
        sum += row;
    }
    let pref = c1 * c1 * (-c3 * c3).exp() / (32.0 * PI * PI);
    sum * (pref * hx * hy)
}

/// Relative distance `|a − b| / |b|`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
