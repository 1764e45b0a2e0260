//! Closed-form solution of the retarded advection-diffusion equation on a
//! semi-infinite column with a constant-concentration surface source (Ogata's
//! erfc solution).
//!
//! [`ogata_profile_1d`] is the oracle every verification uses.
//! [`ogata_paper_2d`] keeps the two-bracket superposition in its printed form.
//! It reaches 2·C0 at the origin, so it is wrapped in [`PaperLiteral`] and
//! kept out of verification.

use crate::error::{Error, Result};
use crate::special::{erfc, ln_erfc};
use crate::transport::TransportParams;

/// Largest argument for which `exp` stays finite.
const EXP_LIMIT: f64 = 709.0;

/// A value from the literal two-bracket formula, not a physical concentration
/// bound by C0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperLiteral(pub f64);

fn check_query(coord: f64, name: &'static str, t: f64, r: f64) -> Result<()> {
    if !(coord.is_finite() && coord >= 0.0) {
        return Err(Error::param(name, format!("must be finite and >= 0, got {coord}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::param("R", format!("retardation factor must be >= 1, got {r}")));
    }
    Ok(())
}

/// `erfc(a1) + exp(v s / D) erfc(a2)` for one coordinate, in [0, 2].
fn bracket(s: f64, t: f64, p: &TransportParams, r: f64) -> Option<f64> {
    let spread = 2.0 * (r * p.d * t).sqrt();
    let lead = erfc((r * s - p.v * t) / spread);
    let tail_arg = (r * s + p.v * t) / spread;
    let tail = if p.v == 0.0 {
        erfc(tail_arg)
    } else {
        let exponent = p.v * s / p.d + ln_erfc(tail_arg);
        if exponent > EXP_LIMIT {
            return None;
        }
        exponent.exp()
    };
    Some(lead + tail)
}

/// Concentration at depth `z` (cm) and time `t` (days).
///
/// Returns `background` at t = 0. The overflow-prone product
/// `exp(v z / D) · erfc(...)` is evaluated as one exponential of a sum of
/// logs; if even that exceeds the float range the background is returned
/// and a warning is logged.
pub fn ogata_profile_1d(z: f64, t: f64, params: &TransportParams, r: f64) -> Result<f64> {
    check_query(z, "z", t, r)?;
    let bg = params.background;
    if t == 0.0 {
        return Ok(bg);
    }
    match bracket(z, t, params, r) {
        Some(b) => Ok((bg + 0.5 * (params.c0 - bg) * b).clamp(bg, params.c0)),
        None => {
            log::warn!("ogata_profile_1d: exp(v z / D) product overflows at z={z} t={t}; returning background");
            Ok(bg)
        }
    }
}

/// Sum of the depth bracket and the lateral bracket, as printed.
pub fn ogata_paper_2d(x: f64, z: f64, t: f64, params: &TransportParams, r: f64) -> Result<PaperLiteral> {
    check_query(x, "x", t, r)?;
    check_query(z, "z", t, r)?;
    let bg = params.background;
    if t == 0.0 {
        return Ok(PaperLiteral(bg));
    }
    let half = 0.5 * (params.c0 - bg);
    let bz = bracket(z, t, params, r).unwrap_or_else(|| {
        log::warn!("ogata_paper_2d: depth bracket overflows at z={z} t={t}");
        0.0
    });
    let bx = bracket(x, t, params, r).unwrap_or_else(|| {
        log::warn!("ogata_paper_2d: lateral bracket overflows at x={x} t={t}");
        0.0
    });
    Ok(PaperLiteral(bg + half * bz + half * bx))
}

/// Oracle sampled at the nodes of one depth profile (`z_j = j * dz`).
pub fn ogata_column(nz: usize, dz: f64, t: f64, params: &TransportParams, r: f64) -> Result<Vec<f64>> {
    (0..nz).map(|j| ogata_profile_1d(j as f64 * dz, t, params, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{convert_diffusion_m2a_to_cm2day, Species};

    fn params(v: f64) -> TransportParams {
        TransportParams {
            d: convert_diffusion_m2a_to_cm2day(0.02).unwrap(),
            v,
            theta: 0.3,
            c0: 675.0,
            background: 0.0,
            species: Species::conservative("Cl-", "anion"),
        }
    }

    #[test]
    fn surface_is_source() {
        for &t in &[0.5, 50.0, 1000.0] {
            let c = ogata_profile_1d(0.0, t, &params(0.01), 1.0).unwrap();
            assert!((c - 675.0).abs() < 1e-12, "{c}");
        }
    }

    #[test]
    fn front_not_arrived() {
        let c = ogata_profile_1d(50.0, 0.01, &params(0.01), 1.0).unwrap();
        assert!(c <= 1e-9 * 675.0, "{c}");
    }

    #[test]
    fn initial_condition_shortcut() {
        let mut p = params(0.01);
        p.background = 3.0;
        assert_eq!(ogata_profile_1d(0.0, 0.0, &p, 1.0).unwrap(), 3.0);
        assert_eq!(ogata_profile_1d(4.0, 0.0, &p, 2.0).unwrap(), 3.0);
    }

    #[test]
    fn high_velocity_does_not_overflow() {
        // v z / D ~ 1.8e5: the naive exp() overflows, the log-space path does not.
        let c = ogata_profile_1d(1000.0, 0.5, &params(100.0), 1.0).unwrap();
        assert!(c.is_finite() && (0.0..=675.0).contains(&c), "{c}");
    }

    #[test]
    fn literal_2d_limits() {
        let p = params(0.01);
        let origin = ogata_paper_2d(0.0, 0.0, 1.0e6, &p, 1.0).unwrap().0;
        assert!((origin - 1350.0).abs() < 1e-6, "{origin}");
        let far = ogata_paper_2d(1.0e4, 0.0, 100.0, &p, 1.0).unwrap().0;
        assert!((far - 675.0).abs() < 1e-9, "{far}");
    }

    #[test]
    fn rejects_bad_queries() {
        let p = params(0.01);
        assert!(ogata_profile_1d(-1.0, 1.0, &p, 1.0).is_err());
        assert!(ogata_profile_1d(1.0, f64::NAN, &p, 1.0).is_err());
        assert!(ogata_profile_1d(1.0, 1.0, &p, 0.5).is_err());
        assert!(ogata_paper_2d(-1.0, 1.0, 1.0, &p, 1.0).is_err());
    }
}
