use crate::error::{Error, Result};
use crate::transport::{GridSpec, TransportParams};

/// Concentration snapshot (mg/L) on the node lattice at time `t` (days).
///
/// Storage is row-major in depth: node (i, j) lives at `j * nx + i`, with
/// j = 0 the surface row.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationField {
    pub grid: GridSpec,
    pub t: f64,
    pub(crate) values: Vec<f64>,
}

impl ConcentrationField {
    /// Wraps raw row-major values; rejects shape mismatches and non-finite
    /// entries.
    pub fn from_values(grid: GridSpec, t: f64, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "field has {} values, grid {}x{} needs {}",
                values.len(),
                grid.nx,
                grid.nz,
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!(
                "non-finite value at node (i={}, j={})",
                k % grid.nx,
                k / grid.nx
            )));
        }
        Ok(ConcentrationField { grid, t, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let nx = self.grid.nx;
        self.values[j * nx + i] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Depth profile of column `i`, surface first.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.grid.nz).map(|j| self.get(i, j)).collect()
    }

    pub fn surface_row(&self) -> &[f64] {
        &self.values[..self.grid.nx]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Background everywhere, C0 on the surface row.
pub fn init_field(grid: GridSpec, params: &TransportParams) -> ConcentrationField {
    let mut values = vec![params.background; grid.len()];
    values[..grid.nx].fill(params.c0);
    ConcentrationField { grid, t: 0.0, values }
}
