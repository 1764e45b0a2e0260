use std::fmt;

use crate::transport::SimulationConfig;

/// Mesh ratios of the explicit scheme.
///
/// Diffusion numbers and Courant numbers use the retarded coefficients D/R
/// and v/R, which are what the update actually applies per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityDiagnostics {
    pub r_x: f64,
    pub r_z: f64,
    pub courant_x: f64,
    pub courant_z: f64,
    pub peclet_x: f64,
    pub peclet_z: f64,
    pub stable: bool,
}

impl StabilityDiagnostics {
    pub fn compute(d: f64, v: f64, r: f64, dt: f64, dx: f64, dz: f64) -> Self {
        let d_eff = d / r;
        let v_eff = v / r;
        let r_x = d_eff * dt / (dx * dx);
        let r_z = d_eff * dt / (dz * dz);
        let courant_x = v_eff * dt / dx;
        let courant_z = v_eff * dt / dz;
        let peclet = |h: f64| if v == 0.0 { 0.0 } else { v * h / d };
        let stable = r_x + r_z <= 0.5 && courant_x <= 1.0 && courant_z <= 1.0;
        StabilityDiagnostics {
            r_x,
            r_z,
            courant_x,
            courant_z,
            peclet_x: peclet(dx),
            peclet_z: peclet(dz),
            stable,
        }
    }

    /// Human-readable reason when unstable.
    pub fn violation(&self) -> Option<String> {
        if self.stable {
            return None;
        }
        let mut parts = Vec::new();
        if self.r_x + self.r_z > 0.5 {
            parts.push(format!("r_x + r_z = {:.4} > 0.5", self.r_x + self.r_z));
        }
        if self.courant_x > 1.0 {
            parts.push(format!("courant_x = {:.4} > 1", self.courant_x));
        }
        if self.courant_z > 1.0 {
            parts.push(format!("courant_z = {:.4} > 1", self.courant_z));
        }
        Some(parts.join(", "))
    }
}

impl fmt::Display for StabilityDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r_x       = {:.6}", self.r_x)?;
        writeln!(f, "r_z       = {:.6}", self.r_z)?;
        writeln!(f, "r_x + r_z = {:.6}  (limit 0.5)", self.r_x + self.r_z)?;
        writeln!(f, "courant_x = {:.6}", self.courant_x)?;
        writeln!(f, "courant_z = {:.6}", self.courant_z)?;
        writeln!(f, "peclet_x  = {:.6}", self.peclet_x)?;
        writeln!(f, "peclet_z  = {:.6}", self.peclet_z)?;
        write!(f, "stable    = {}", self.stable)
    }
}

pub fn stability_diagnostics(config: &SimulationConfig) -> StabilityDiagnostics {
    // an invalid R falls back to 1, the most restrictive value
    let r = config.retardation().unwrap_or(1.0);
    StabilityDiagnostics::compute(
        config.params.d,
        config.params.v,
        r,
        config.dt,
        config.grid.dx,
        config.grid.dz,
    )
}
