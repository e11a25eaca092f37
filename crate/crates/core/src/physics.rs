//! Entanglement-harvesting observables for two detectors on parallel
//! uniformly accelerated worldlines, coupled to a massless scalar field
//! through Gaussian windows.
//!
//! Everything is expressed in the dimensionless parameters
//! `c1 = κL`, `c2 = κΩσ²`, `c3 = σΩ`. The integrals are evaluated after the
//! contour shift that removes the light-cone poles, so the integrands are
//! smooth and the `iε` prescription drops out:
//!
//! ```text
//! E = −η0² c1 c2 e^{−c3²} / (16 π^{3/2} c3) ∫ dy  e^{−α y²} csch²(c1 y/2 − i c2)
//! X =  η0² c1²  e^{−c3²} / (32 π²)        ∫ dx ∫_0 dy  e^{−α (x² + y²)} / (D1 D2)
//!
//! α  = (c1 c3 / 2 c2)²
//! D1 = c1/2 − e^{−c1 x/2} e^{−i c2} sinh(c1 y/2)
//! D2 = c1/2 + e^{ c1 x/2} e^{ i c2} sinh(c1 y/2)
//! ```
//!
//! Both integrals are truncated at `R = 16 c2 / (c1 c3)`, eight Gaussian
//! widths, where the neglected tail is below `e^{−64}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{self, ComplexValue, Interval1D, QuadConfig, QuadError, QuadResult, Rect2D};

/// Distance from `kπ` below which `c2` is rejected.
pub const C2_SINGULAR_GUARD: f64 = 1e-6;

/// Truncation radius in units of the Gaussian width `1/√α`.
pub const TRUNCATION_WIDTHS: f64 = 8.0;

/// Large-`c3` limit of `|X| / X_sp` on the half-plane `y ≥ 0`.
///
/// Replacing the non-Gaussian factor by its value at the origin and
/// integrating the Gaussian over the half-plane gives half of `X_sp`; the
/// numerical ratio approaches this value as `c3` grows (see the acceptance
/// tests for the measured sequence).
pub const KAPPA_X: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParams {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

fn positive(name: &'static str, value: f64) -> Result<f64, PhysicsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(PhysicsError::InvalidParams { name, value, reason: "must be positive and finite" })
    }
}

/// A point in dimensionless parameter space plus the coupling amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarvestParams {
    c1: f64,
    c2: f64,
    c3: f64,
    eta0: f64,
}

impl HarvestParams {
    /// Validated parameters with `η0 = 1`.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self, PhysicsError> {
        Self::with_eta0(c1, c2, c3, 1.0)
    }

    pub fn with_eta0(c1: f64, c2: f64, c3: f64, eta0: f64) -> Result<Self, PhysicsError> {
        let c1 = positive("c1", c1)?;
        let c2 = positive("c2", c2)?;
        let c3 = positive("c3", c3)?;
        let eta0 = positive("eta0", eta0)?;
        let k = (c2 / PI).round();
        if (c2 - k * PI).abs() < C2_SINGULAR_GUARD {
            return Err(PhysicsError::InvalidParams {
                name: "c2",
                value: c2,
                reason: "too close to an integer multiple of pi (integrands are singular there)",
            });
        }
        Ok(HarvestParams { c1, c2, c3, eta0 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn c3(&self) -> f64 {
        self.c3
    }
    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// Gaussian exponent coefficient `(c1 c3 / 2 c2)²`.
    pub fn alpha(&self) -> f64 {
        let a = self.c1 * self.c3 / (2.0 * self.c2);
        a * a
    }

    /// Default truncation radius `16 c2 / (c1 c3)`.
    pub fn truncation_radius(&self) -> f64 {
        TRUNCATION_WIDTHS / self.alpha().sqrt()
    }
}

/// Physical detector parameters (natural units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Proper acceleration κ.
    pub kappa: f64,
    /// Detector separation L.
    pub separation: f64,
    /// Energy gap Ω.
    pub omega: f64,
    /// Window half-width σ.
    pub sigma: f64,
}

impl PhysicalParams {
    /// `c1 = κL`, `c2 = κΩσ²`, `c3 = σΩ`.
    pub fn to_dimensionless(&self, eta0: f64) -> Result<HarvestParams, PhysicsError> {
        let kappa = positive("kappa", self.kappa)?;
        let sep = positive("L", self.separation)?;
        let omega = positive("omega", self.omega)?;
        let sigma = positive("sigma", self.sigma)?;
        HarvestParams::with_eta0(kappa * sep, kappa * omega * sigma * sigma, sigma * omega, eta0)
    }
}

/// `csch²(z)`, evaluated through `e^{−2|Re z|}` away from the origin so
/// that large real parts underflow gracefully instead of overflowing.
pub fn csch_squared(z: Complex64) -> Complex64 {
    if z.re.abs() < 1.0 {
        let s = z.sinh();
        (s * s).finv()
    } else {
        let w = if z.re > 0.0 { z } else { -z };
        let e = (-2.0 * w).exp();
        let d = Complex64::new(1.0, 0.0) - e;
        (e * 4.0).fdiv(d * d)
    }
}

/// Integrand of the reduced one-dimensional E integral.
pub fn integrand_e(y: f64, p: &HarvestParams) -> ComplexValue {
    let gauss = (-p.alpha() * y * y).exp();
    csch_squared(Complex64::new(0.5 * p.c1 * y, -p.c2)) * gauss
}

fn recip_or_zero(d: Complex64) -> Complex64 {
    if d.re.is_finite() && d.im.is_finite() {
        d.finv()
    } else {
        Complex64::default()
    }
}

/// `1 / (D1 D2)` for `y ≥ 0`.
fn inverse_denominators(x: f64, y: f64, c1: f64, c2: f64) -> Complex64 {
    let a = 0.5 * c1 * x;
    let t = 0.5 * c1 * y;
    let half = 0.5 * c1;
    if t == 0.0 {
        return Complex64::new(1.0 / (half * half), 0.0);
    }
    if t < 1.0 {
        // D1 D2 = c1²/4 + c1 sinh(t) sinh(a + i c2) − sinh²(t)
        let s = t.sinh();
        let d = Complex64::new(half * half - s * s, 0.0) + Complex64::new(a, c2).sinh() * (c1 * s);
        recip_or_zero(d)
    } else {
        // Divide through by sinh²(t): with u = csch(t) and
        // w = sinh(a + i c2) u, 1/(D1 D2) = u² / (c1² u²/4 + c1 w − 1).
        let norm = -(-2.0 * t).exp_m1();
        let u = 2.0 * (-t).exp() / norm;
        let w = (Complex64::from_polar((a - t).exp(), c2) - Complex64::from_polar((-a - t).exp(), -c2))
            / norm;
        let d = Complex64::new(half * half * u * u - 1.0, 0.0) + w * c1;
        recip_or_zero(d) * (u * u)
    }
}

/// Integrand of the two-dimensional X integral on `y ≥ 0`.
pub fn integrand_x(x: f64, y: f64, p: &HarvestParams) -> ComplexValue {
    let gauss = (-p.alpha() * (x * x + y * y)).exp();
    if gauss == 0.0 {
        return Complex64::default();
    }
    inverse_denominators(x, y, p.c1, p.c2) * gauss
}

/// Real-valued E with the discarded imaginary part kept for checking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EValue {
    pub value: f64,
    /// Imaginary part of the prefactor × integral, zero up to quadrature error.
    pub imag: f64,
    pub err: f64,
    pub meta: QuadResult,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XValue {
    pub value: ComplexValue,
    pub err: f64,
    pub meta: QuadResult,
}

fn e_prefactor(p: &HarvestParams) -> f64 {
    -p.c1 * p.c2 * (-p.c3 * p.c3).exp() / (16.0 * PI.powf(1.5) * p.c3)
}

fn x_prefactor(p: &HarvestParams) -> f64 {
    p.c1 * p.c1 * (-p.c3 * p.c3).exp() / (32.0 * PI * PI)
}

/// E on the default truncated domain `[−R, R]`.
pub fn eval_e(p: &HarvestParams, cfg: &QuadConfig) -> Result<EValue, PhysicsError> {
    eval_e_truncated(p, cfg, p.truncation_radius())
}

/// E on `[−radius, radius]`.
pub fn eval_e_truncated(p: &HarvestParams, cfg: &QuadConfig, radius: f64) -> Result<EValue, PhysicsError> {
    let domain = Interval1D::new(-radius, radius)?;
    let meta = quadrature::integrate_1d(|y| integrand_e(y, p), domain, cfg)?;
    let eta2 = p.eta0 * p.eta0;
    let pref = e_prefactor(p);
    let scaled = meta.value * pref;
    Ok(EValue {
        value: scaled.re * eta2,
        imag: scaled.im * eta2,
        err: meta.err_est * pref.abs() * eta2,
        meta,
    })
}

/// X on the default truncated domain `[−R, R] × [0, R]`.
pub fn eval_x(p: &HarvestParams, cfg: &QuadConfig) -> Result<XValue, PhysicsError> {
    eval_x_truncated(p, cfg, p.truncation_radius())
}

/// X on `[−radius, radius] × [0, radius]`.
pub fn eval_x_truncated(p: &HarvestParams, cfg: &QuadConfig, radius: f64) -> Result<XValue, PhysicsError> {
    let domain = Rect2D::new(Interval1D::new(-radius, radius)?, Interval1D::new(0.0, radius)?);
    let meta = quadrature::integrate_2d(|x, y| integrand_x(x, y, p), domain, cfg)?;
    let eta2 = p.eta0 * p.eta0;
    let pref = x_prefactor(p);
    Ok(XValue {
        value: meta.value * pref * eta2,
        err: meta.err_est * pref * eta2,
        meta,
    })
}

/// Stationary-phase E: `η0² e^{−c3²} (c2/c3)² csc²(c2) / 8π`.
pub fn eval_e_sp(p: &HarvestParams) -> f64 {
    let r = p.c2 / p.c3;
    let s = p.c2.sin();
    (-p.c3 * p.c3).exp() * r * r / (8.0 * PI * s * s) * (p.eta0 * p.eta0)
}

/// Stationary-phase X: `η0² e^{−c3²} (c2 / c3 c1)² / 2π`.
pub fn eval_x_sp(p: &HarvestParams) -> f64 {
    let r = p.c2 / (p.c3 * p.c1);
    (-p.c3 * p.c3).exp() * r * r / (2.0 * PI) * (p.eta0 * p.eta0)
}

/// `|X| − E`, unclamped. Its sign decides entanglement.
pub fn signed_negativity(e: f64, x: ComplexValue) -> f64 {
    x.norm() - e
}

/// `max(|X| − E, 0)`.
pub fn negativity(e: f64, x: ComplexValue) -> f64 {
    signed_negativity(e, x).max(0.0)
}

/// Stationary-phase entanglement test `4/c1² > csc²(c2)`, i.e.
/// `c1 < 2 |sin c2|`. Independent of `c3`.
pub fn sp_entangled(c1: f64, c2: f64) -> bool {
    c1 < 2.0 * c2.sin().abs()
}

/// Everything computed at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables {
    pub e: f64,
    pub x: ComplexValue,
    pub n: f64,
    pub err_e: f64,
    pub err_x: f64,
    pub converged: bool,
    pub e_meta: QuadResult,
    pub x_meta: QuadResult,
}

impl Observables {
    pub fn signed_n(&self) -> f64 {
        signed_negativity(self.e, self.x)
    }

    pub fn n_evals(&self) -> usize {
        self.e_meta.n_evals + self.x_meta.n_evals
    }
}

/// Evaluates E, X and the negativity at `p`.
pub fn observe(p: &HarvestParams, cfg: &QuadConfig) -> Result<Observables, PhysicsError> {
    let e = eval_e(p, cfg)?;
    let x = eval_x(p, cfg)?;
    Ok(Observables {
        e: e.value,
        x: x.value,
        n: negativity(e.value, x.value),
        err_e: e.err,
        err_x: x.err,
        converged: e.meta.converged && x.meta.converged,
        e_meta: e.meta,
        x_meta: x.meta,
    })
}
