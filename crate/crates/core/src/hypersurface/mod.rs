//! Discrete geometry of star-shaped radial graphs over the cross-section.
//!
//! A hypersurface is stored as the graph height `u` in the arclength
//! coordinate: a periodic field on a [`CrossSectionGrid`] in full mode, or a
//! single scalar in symmetric mode. Any single-valued height field is a
//! radial graph, so star-shapedness is structural. Full-grid mode is
//! available for flat cross-sections only; the hyperbolic case is handled in
//! symmetric mode, which realizes every slice exactly.

mod grid;
mod ops;

pub use grid::CrossSectionGrid;
pub use ops::{
    area, area_element, extrinsic_scalar, laplace_beltrami, mean_curvature, minkowski_residual,
    shape_operator, support_function, umbilicity, v_derivatives, w_factor, ShapeField,
    VDerivatives,
};

pub(crate) use ops::graph_fields;

use crate::error::{Error, Result};
use crate::warped::{AmbientModel, Epsilon};

/// One Fourier mode of an initial graph: wavevector (one integer per axis)
/// and cosine/sine amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub k: Vec<i32>,
    pub amp_cos: f64,
    pub amp_sin: f64,
}

#[derive(Debug, Clone)]
pub enum GraphRepr {
    /// Rotationally invariant graph: a single height value.
    Symmetric { u: f64 },
    /// Periodic height field over the torus grid.
    Grid {
        grid: CrossSectionGrid,
        u: Vec<f64>,
    },
}

/// The evolving hypersurface: ambient parameters, height representation, and
/// flow time.
#[derive(Debug, Clone)]
pub struct GraphState {
    ambient: AmbientModel,
    repr: GraphRepr,
    t: f64,
}

impl GraphState {
    /// Symmetric graph at height `s0`. For hyperbolic cross-sections the
    /// height must stay strictly above `log 2`.
    pub fn symmetric(ambient: AmbientModel, s0: f64) -> Result<Self> {
        if !s0.is_finite() {
            return Err(Error::InvalidParameter(format!("s0 = {s0} must be finite")));
        }
        if ambient.epsilon() == Epsilon::Hyperbolic && s0 <= Epsilon::Hyperbolic.s_min() {
            return Err(Error::InvalidParameter(format!(
                "s0 = {s0} must exceed log 2 for a hyperbolic cross-section"
            )));
        }
        Ok(GraphState {
            ambient,
            repr: GraphRepr::Symmetric { u: s0 },
            t: 0.0,
        })
    }

    /// Full-grid graph from an explicit height field.
    pub fn grid(ambient: AmbientModel, grid: CrossSectionGrid, u: Vec<f64>) -> Result<Self> {
        if ambient.epsilon() != Epsilon::Flat {
            return Err(Error::InvalidParameter(
                "full-grid mode requires a flat cross-section".into(),
            ));
        }
        if grid.dim() != ambient.dim() {
            return Err(Error::InvalidParameter(format!(
                "grid dimension {} does not match the cross-section dimension {}",
                grid.dim(),
                ambient.dim()
            )));
        }
        if u.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "height field has {} values for {} nodes",
                u.len(),
                grid.len()
            )));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("height field is not finite".into()));
        }
        Ok(GraphState {
            ambient,
            repr: GraphRepr::Grid { grid, u },
            t: 0.0,
        })
    }

    /// Full-grid graph `u = s0 + sum of Fourier modes` on an `m`-point grid.
    pub fn from_modes(
        ambient: AmbientModel,
        m: usize,
        s0: f64,
        modes: &[FourierMode],
    ) -> Result<Self> {
        let dim = ambient.dim();
        let grid = CrossSectionGrid::new(dim, m)?;
        for mode in modes {
            if mode.k.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "mode wavevector has {} entries for {} axes",
                    mode.k.len(),
                    dim
                )));
            }
        }
        let u: Vec<f64> = (0..grid.len())
            .map(|p| {
                let angles = grid.angles(p);
                let mut v = s0;
                for mode in modes {
                    let phase: f64 = mode
                        .k
                        .iter()
                        .zip(&angles)
                        .map(|(&k, &th)| f64::from(k) * th)
                        .sum();
                    v += mode.amp_cos * phase.cos() + mode.amp_sin * phase.sin();
                }
                v
            })
            .collect();
        GraphState::grid(ambient, grid, u)
    }

    pub fn ambient(&self) -> &AmbientModel {
        &self.ambient
    }

    pub fn repr(&self) -> &GraphRepr {
        &self.repr
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn set_t(&mut self, t: f64) {
        self.t = t;
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.repr, GraphRepr::Grid { .. })
    }

    pub fn grid_handle(&self) -> Option<&CrossSectionGrid> {
        match &self.repr {
            GraphRepr::Grid { grid, .. } => Some(grid),
            GraphRepr::Symmetric { .. } => None,
        }
    }

    /// Height values as a slice (length 1 in symmetric mode).
    pub fn u_values(&self) -> &[f64] {
        match &self.repr {
            GraphRepr::Symmetric { u } => std::slice::from_ref(u),
            GraphRepr::Grid { u, .. } => u,
        }
    }

    pub fn min_u(&self) -> f64 {
        self.u_values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_u(&self) -> f64 {
        self.u_values()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same grid and ambient data with a replaced height field and time.
    pub(crate) fn with_field(&self, u_new: Vec<f64>, t: f64) -> GraphState {
        let repr = match &self.repr {
            GraphRepr::Symmetric { .. } => {
                debug_assert_eq!(u_new.len(), 1);
                GraphRepr::Symmetric { u: u_new[0] }
            }
            GraphRepr::Grid { grid, .. } => GraphRepr::Grid {
                grid: grid.clone(),
                u: u_new,
            },
        };
        GraphState {
            ambient: self.ambient.clone(),
            repr,
            t,
        }
    }

    /// Dump a grid field as a CSV matrix, row-major with axis 0 fastest.
    pub fn write_field_csv<W: std::io::Write>(&self, field: &[f64], mut w: W) -> std::io::Result<()> {
        let m = self
            .grid_handle()
            .map(|g| g.points_per_axis())
            .unwrap_or(field.len());
        for chunk in field.chunks(m) {
            let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}
