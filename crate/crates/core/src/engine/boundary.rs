use std::fmt;

use super::field::ConcentrationField;
use crate::transport::TransportParams;

/// Surface (z = 0) treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopCondition {
    /// Dirichlet at C0: the landfill source.
    #[default]
    Source,
    /// Mirror ghost row, no source. Only used to build closed test boxes
    /// (see [`BoundaryConditionSet::sealed`]); configs cannot select it.
    Mirror,
}

/// Bottom row treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BottomCondition {
    /// dC/dz = 0: bottom row copies the last interior row.
    #[default]
    ZeroGradient,
    /// dC/dt = 0: bottom row held at its initial (background) value.
    Frozen,
    /// Mirror ghost row. Test boxes only.
    Mirror,
}

/// Lateral (x = 0 and x = width) treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideCondition {
    /// Edge columns are ghost nodes mirroring across the first physical
    /// column, so the stencil there sees C[i-1] = C[i+1].
    Reflect,
    /// Edge column copies its single interior neighbour.
    #[default]
    NeumannZeroFlux,
}

impl BottomCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BottomCondition::ZeroGradient => "zero_gradient",
            BottomCondition::Frozen => "frozen",
            BottomCondition::Mirror => "mirror",
        }
    }

    /// Parses the selectable values (`mirror` is not one of them).
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero_gradient" | "zero-gradient" => Some(BottomCondition::ZeroGradient),
            "frozen" => Some(BottomCondition::Frozen),
            _ => None,
        }
    }
}

impl SideCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            SideCondition::Reflect => "reflect",
            SideCondition::NeumannZeroFlux => "neumann",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "reflect" => Some(SideCondition::Reflect),
            "neumann" | "neumann_zero_flux" | "neumann-zero-flux" => Some(SideCondition::NeumannZeroFlux),
            _ => None,
        }
    }
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for BottomCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundaryConditionSet {
    pub top: TopCondition,
    pub bottom: BottomCondition,
    pub sides: SideCondition,
}

impl BoundaryConditionSet {
    pub fn new(sides: SideCondition, bottom: BottomCondition) -> Self {
        BoundaryConditionSet {
            top: TopCondition::Source,
            bottom,
            sides,
        }
    }

    /// Mirror on all four sides and no source: a closed box whose weighted
    /// mass the scheme conserves exactly when v = 0.
    pub fn sealed() -> Self {
        BoundaryConditionSet {
            top: TopCondition::Mirror,
            bottom: BottomCondition::Mirror,
            sides: SideCondition::Reflect,
        }
    }
}

/// Source indices for the two ghost lines of a mirrored axis of `n` nodes.
fn mirror_sources(n: usize) -> (usize, usize) {
    if n == 3 {
        // one physical line: both ghosts equal it
        (1, 1)
    } else {
        (2, n - 3)
    }
}

/// Returns a copy of `field` with every boundary condition enforced.
pub fn apply_boundaries(
    field: &ConcentrationField,
    bc: &BoundaryConditionSet,
    params: &TransportParams,
) -> ConcentrationField {
    let mut out = field.clone();
    apply_in_place(&mut out.values, field.grid.nx, field.grid.nz, bc, params);
    out
}

/// Order: bottom, sides (all rows), top. The surface row is written last so
/// it holds C0 exactly, corners included.
pub(crate) fn apply_in_place(
    values: &mut [f64],
    nx: usize,
    nz: usize,
    bc: &BoundaryConditionSet,
    params: &TransportParams,
) {
    let row = |j: usize| j * nx;
    let last = nz - 1;

    match bc.bottom {
        BottomCondition::ZeroGradient => values.copy_within(row(last - 1)..row(last), row(last)),
        BottomCondition::Frozen => values[row(last)..row(last) + nx].fill(params.background),
        BottomCondition::Mirror => {
            let (_, src) = mirror_sources(nz);
            values.copy_within(row(src)..row(src) + nx, row(last));
        }
    }

    let (lo_src, hi_src) = match bc.sides {
        SideCondition::Reflect => mirror_sources(nx),
        SideCondition::NeumannZeroFlux => (1, nx - 2),
    };
    for j in 0..nz {
        let r = row(j);
        values[r] = values[r + lo_src];
        values[r + nx - 1] = values[r + hi_src];
    }

    match bc.top {
        TopCondition::Source => values[..nx].fill(params.c0),
        TopCondition::Mirror => {
            let (src, _) = mirror_sources(nz);
            values.copy_within(row(src)..row(src) + nx, 0);
        }
    }
}

/// Per-axis weights of the control volumes each node owns: ghosts 0,
/// mirrored boundary nodes 1/2, everything else 1.
fn axis_weights(n: usize, mirrored: bool) -> Vec<f64> {
    let mut w = vec![1.0; n];
    w[0] = 0.0;
    w[n - 1] = 0.0;
    if mirrored && n > 3 {
        w[1] = 0.5;
        w[n - 2] = 0.5;
    }
    w
}

/// Total solute in the nodes the scheme updates, each weighted by the
/// fraction of its cell inside the domain. Constant in time for a
/// [`BoundaryConditionSet::sealed`] box with v = 0.
pub fn discrete_mass(field: &ConcentrationField, bc: &BoundaryConditionSet) -> f64 {
    let g = field.grid;
    let wx = axis_weights(g.nx, bc.sides == SideCondition::Reflect);
    let wz = axis_weights(
        g.nz,
        bc.top == TopCondition::Mirror && bc.bottom == BottomCondition::Mirror,
    );
    let mut total = 0.0;
    for (j, wzj) in wz.iter().enumerate() {
        if *wzj == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (i, wxi) in wx.iter().enumerate() {
            row += wxi * field.get(i, j);
        }
        total += wzj * row;
    }
    total * g.dx * g.dz
}
