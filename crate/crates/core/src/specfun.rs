//! Scalar special functions: `erfc`, the scaled `erfcx`, and the free
//! Gaussian heat kernel in three dimensions.
//!
//! The rational approximations for `erfc` are the ones from FreeBSD's
//! `s_erf.c` (Copyright (C) 1993 by Sun Microsystems, Inc., freely
//! redistributable with this notice). `erfcx` reuses the tail fit of the
//! same family, where the factor `exp(-x^2)` cancels analytically, and
//! switches to the asymptotic series once the fit range is exhausted.

use crate::error::{Error, Result};
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// 1/sqrt(pi)
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// sqrt(2 pi)
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

const ERX: f64 = 8.45062911510467529297e-01;

// erf on [0, 0.84375]
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// erf on [0.84375, 1.25]
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// erfc on [1.25, 1/0.35]
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// erfc on [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// Largest |x| for which `exp(x^2)` is finite.
const EXP_SQUARE_LIMIT: f64 = 26.641_747_557_046_327;

/// `erf(x) - x` scaled, for |x| < 0.84375.
#[inline]
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

/// `erf(1 + s) - ERX` for 0.84375 <= 1 + s < 1.25.
#[inline]
fn near_one(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// Tail fit: `log(x erfc(x)) + x^2 + 0.5625` for 1.25 <= x < 28.
#[inline]
fn tail_fit(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    if x < 1.0 / 0.35 {
        let r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        r / q
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        r / q
    }
}

/// Complementary error function `(2/sqrt(pi)) * int_x^inf exp(-s^2) ds`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        if ax < 1.387_778_780_781_445_7e-17 {
            return 1.0 - x;
        }
        let y = small_ratio(ax);
        if negative {
            return 1.0 + (ax + ax * y);
        }
        return if ax < 0.25 {
            1.0 - (ax + ax * y)
        } else {
            // keeps the subtraction exact near erf(x) = 0.5
            0.5 - (ax * y + (ax - 0.5))
        };
    }
    if ax < 1.25 {
        let p = near_one(ax - 1.0);
        return if negative { 1.0 + ERX + p } else { 1.0 - ERX - p };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        // split x^2 so that the leading exponential is exact
        let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
        let r = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + tail_fit(ax)).exp() / ax;
        return if negative { 2.0 - r } else { r };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

/// `exp(x^2) * erfc(x)` for x >= 0; never overflows.
fn erfcx_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 1.25 {
        (x * x).exp() * erfc(x)
    } else if x < 28.0 {
        // exp(x^2) cancels against the split exponent of the tail fit
        (tail_fit(x) - 0.5625).exp() / x
    } else if x < 1e8 {
        // asymptotic series, truncation error below 1e-17 for x >= 28
        let w = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..9 {
            term *= -((2 * k - 1) as f64) * w;
            sum += term;
        }
        FRAC_1_SQRT_PI * sum / x
    } else {
        FRAC_1_SQRT_PI / x
    }
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
///
/// Stable for all `x >= 0`. For negative arguments the value grows like
/// `2 exp(x^2)` and overflows once `x^2` leaves the double range, which is
/// reported as [`Error::Overflow`].
pub fn erfcx(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("erfcx of NaN"));
    }
    if x >= 0.0 {
        return Ok(erfcx_nonneg(x));
    }
    if x < -EXP_SQUARE_LIMIT {
        return Err(Error::Overflow("erfcx: exp(x^2) exceeds the double range"));
    }
    let value = 2.0 * (x * x).exp() - erfcx_nonneg(-x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("erfcx: exp(x^2) exceeds the double range"))
    }
}

/// Infallible `erfcx` for arguments known to be non-negative.
#[inline]
pub(crate) fn erfcx_pos(x: f64) -> f64 {
    erfcx_nonneg(x.max(0.0))
}

/// Free heat kernel `(2 pi t)^{-3/2} exp(-d^2 / 2t)` of `Delta/2` in R^3.
pub fn free_heat_kernel(t: f64, d: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("free heat kernel requires t > 0"));
    }
    if !(d >= 0.0) {
        return Err(Error::Domain("free heat kernel requires d >= 0"));
    }
    Ok(free_heat_kernel_unchecked(t, d))
}

#[inline]
pub(crate) fn free_heat_kernel_unchecked(t: f64, d: f64) -> f64 {
    (-d * d / (2.0 * t)).exp() / (2.0 * PI * t).powf(1.5)
}
