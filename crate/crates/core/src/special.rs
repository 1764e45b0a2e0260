//! Complementary error function and its logarithm.
//!
//! Rational approximations from FreeBSD's `s_erf.c` (Sun Microsystems, 1993:
//! "Permission to use, copy, modify, and distribute this software is freely
//! granted, provided that this notice is preserved."). Accuracy is about one
//! ulp for erfc itself. `ln_erfc` reuses the tail approximation in log form so
//! it stays finite where erfc underflows.

// coefficients are kept digit for digit as published
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

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

const TINY: f64 = 1.387_778_780_781_445_7e-17; // 2^-56

/// ln(sqrt(pi))
const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

/// Complementary error function, 1 - erf(x).
///
/// Saturates to exactly 0 for x >= 28 and to 2 for x <= -6; never negative.
/// NaN propagates.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let negative = x < 0.0;
    let ax = x.abs();

    if ax < 0.84375 {
        let t = if ax < TINY {
            ax
        } else {
            let z = ax * ax;
            let y = small_ratio(z);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let pq = near_one_ratio(ax - 1.0);
        return if negative { 1.0 + ERX + pq } else { 1.0 - ERX - pq };
    }
    if negative && ax >= 6.0 {
        return 2.0;
    }
    if ax >= 28.0 {
        return if negative { 2.0 } else { 0.0 };
    }
    let r = tail_log_x(ax).exp() / ax;
    if negative {
        2.0 - r
    } else {
        r
    }
}

/// `ln(erfc(x))`, finite for every finite x (no underflow for large x).
pub fn ln_erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if x < 1.25 {
        return erfc(x).ln();
    }
    if x < 28.0 {
        return tail_log_x(x) - x.ln();
    }
    // erfc(x) ~ exp(-x²)/(x√π) · (1 - 1/(2x²) + 3/(4x⁴) - 15/(8x⁶) + 105/(16x⁸))
    let s = 1.0 / (x * x);
    let series = 1.0 + s * (-0.5 + s * (0.75 + s * (-1.875 + s * 6.5625)));
    -x * x - x.ln() - LN_SQRT_PI + series.ln()
}

/// Like [`erfc`], rejecting non-finite input.
pub fn checked_erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::param("x", format!("erfc argument must be finite, got {x}")));
    }
    Ok(erfc(x))
}

fn small_ratio(z: f64) -> f64 {
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

fn near_one_ratio(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// ln(x · erfc(x)) for x >= 1.25.
fn tail_log_x(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // Split x² so the large part of the exponent is exact.
    let hi = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    -hi * hi - 0.5625 + ((hi - x) * (hi + x) + r / q)
}
