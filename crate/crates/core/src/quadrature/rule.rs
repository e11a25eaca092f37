//! The 7-point Gauss / 15-point Kronrod pair and its tensor product on
//! rectangles.
//!
//! Nodes and weights are the standard QUADPACK values on `[-1, 1]`. The
//! Gauss nodes are the odd-indexed Kronrod nodes, so one set of 15 samples
//! (225 in 2D) yields both estimates.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use super::{Interval1D, QuadError, Rect2D};

/// Positive Kronrod abscissae, outermost first; the last entry is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights aligned with `XGK`; zero where the node is Kronrod-only.
const WG: [f64; 8] = [
    0.0,
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.0,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.0,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.0,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Number of samples one 1D rule application takes.
pub const POINTS_1D: usize = 15;
/// Number of samples one 2D (tensor) rule application takes.
pub const POINTS_2D: usize = POINTS_1D * POINTS_1D;

/// Raw output of one rule application, already scaled to the region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleEstimate {
    pub kronrod: Complex64,
    pub gauss: Complex64,
    /// Kronrod estimate of the integral of `|Re f|`.
    pub abs_re: f64,
    /// Kronrod estimate of the integral of `|Im f|`.
    pub abs_im: f64,
    /// Error attributable to each axis: the Kronrod result minus the rule
    /// that drops to Gauss along that axis only (max over components). The
    /// second entry is zero in 1D.
    pub axis_err: [f64; 2],
}

impl RuleEstimate {
    /// Per-component error: `|K - G|`, floored at the rounding level
    /// `50 ε ∫|f|` of the region.
    pub fn component_errors(&self) -> (f64, f64) {
        let floor = 50.0 * f64::EPSILON;
        let diff = self.kronrod - self.gauss;
        (
            diff.re.abs().max(floor * self.abs_re),
            diff.im.abs().max(floor * self.abs_im),
        )
    }
}

/// Weighted sums over a 15-point symmetric sample set. Symmetric pairs are
/// added before weighting so that odd integrands cancel exactly on a
/// symmetric region.
struct Sums {
    kronrod: Complex64,
    gauss: Complex64,
    abs_re: f64,
    abs_im: f64,
}

fn weighted_sums(center: Complex64, pairs: &[(Complex64, Complex64); 7]) -> Sums {
    let mut kronrod = center * WGK[7];
    let mut gauss = center * WG[7];
    let mut abs_re = center.re.abs() * WGK[7];
    let mut abs_im = center.im.abs() * WGK[7];
    for (k, (lo, hi)) in pairs.iter().enumerate() {
        let sum = lo + hi;
        kronrod += sum * WGK[k];
        gauss += sum * WG[k];
        abs_re += (lo.re.abs() + hi.re.abs()) * WGK[k];
        abs_im += (lo.im.abs() + hi.im.abs()) * WGK[k];
    }
    Sums { kronrod, gauss, abs_re, abs_im }
}

fn component_max(z: Complex64) -> f64 {
    z.re.abs().max(z.im.abs())
}

fn checked(v: Complex64, x: f64, y: Option<f64>) -> Result<Complex64, QuadError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFiniteIntegrand { x, y })
    }
}

/// Applies the G7K15 pair once on `domain`.
pub fn apply_1d<F>(f: &mut F, domain: &Interval1D) -> Result<RuleEstimate, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    let center = domain.midpoint();
    let half = 0.5 * domain.width();
    let mut eval = |x: f64| checked(f(x), x, None);
    let fc = eval(center)?;
    let mut pairs = [(Complex64::default(), Complex64::default()); 7];
    for (k, pair) in pairs.iter_mut().enumerate() {
        let dx = half * XGK[k];
        *pair = (eval(center - dx)?, eval(center + dx)?);
    }
    let s = weighted_sums(fc, &pairs);
    let kronrod = s.kronrod * half;
    let gauss = s.gauss * half;
    Ok(RuleEstimate {
        kronrod,
        gauss,
        abs_re: s.abs_re * half,
        abs_im: s.abs_im * half,
        axis_err: [component_max(kronrod - gauss), 0.0],
    })
}

/// Applies the tensor-product G7K15 rule once on `domain`.
///
/// The Kronrod estimate uses all 15×15 samples, the Gauss estimate the 7×7
/// subset.
pub fn apply_2d<F>(f: &mut F, domain: &Rect2D) -> Result<RuleEstimate, QuadError>
where
    F: FnMut(f64, f64) -> Complex64,
{
    let (cx, cy) = (domain.x.midpoint(), domain.y.midpoint());
    let (hx, hy) = (0.5 * domain.x.width(), 0.5 * domain.y.width());

    let mut column = |x: f64| -> Result<Sums, QuadError> {
        let mut eval = |y: f64| checked(f(x, y), x, Some(y));
        let fc = eval(cy)?;
        let mut pairs = [(Complex64::default(), Complex64::default()); 7];
        for (k, pair) in pairs.iter_mut().enumerate() {
            let dy = hy * XGK[k];
            *pair = (eval(cy - dy)?, eval(cy + dy)?);
        }
        Ok(weighted_sums(fc, &pairs))
    };

    let mid = column(cx)?;
    let mut cols = Vec::with_capacity(7);
    for &xk in &XGK[..7] {
        let dx = hx * xk;
        cols.push((column(cx - dx)?, column(cx + dx)?));
    }

    let mut kronrod = mid.kronrod * WGK[7];
    let mut gauss = mid.gauss * WG[7];
    // Gauss along x with Kronrod along y, and the converse.
    let mut gauss_x = mid.kronrod * WG[7];
    let mut gauss_y = mid.gauss * WGK[7];
    let mut abs_re = mid.abs_re * WGK[7];
    let mut abs_im = mid.abs_im * WGK[7];
    for (k, (lo, hi)) in cols.iter().enumerate() {
        kronrod += (lo.kronrod + hi.kronrod) * WGK[k];
        gauss += (lo.gauss + hi.gauss) * WG[k];
        gauss_x += (lo.kronrod + hi.kronrod) * WG[k];
        gauss_y += (lo.gauss + hi.gauss) * WGK[k];
        abs_re += (lo.abs_re + hi.abs_re) * WGK[k];
        abs_im += (lo.abs_im + hi.abs_im) * WGK[k];
    }
    let jac = hx * hy;
    Ok(RuleEstimate {
        kronrod: kronrod * jac,
        gauss: gauss * jac,
        abs_re: abs_re * jac,
        abs_im: abs_im * jac,
        axis_err: [
            component_max((kronrod - gauss_x) * jac),
            component_max((kronrod - gauss_y) * jac),
        ],
    })
}
