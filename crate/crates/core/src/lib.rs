//! Numerical laboratory for star-shaped hypersurfaces in locally hyperbolic
//! warped products.
//!
//! The ambient stage is the family `P = I x N` with metric `dr^2/rho(r)^2 + r^2 h`,
//! where `(N, h)` is a closed space form of curvature `epsilon` in `{-1, 0}` and
//! `rho(r) = sqrt(r^2 + epsilon)`. On this stage the crate provides:
//!
//! - [`warped`]: closed-form scalar functions of the ambient space (warping
//!   factor, static potential, coordinate changes) and the [`warped::AmbientModel`]
//!   parameter record.
//! - [`kottler`]: the static black-hole deformation of the ambient metric;
//!   horizon root-finding, mass/area algebra, curvature identities, and the
//!   isometric graph embedding.
//! - [`hypersurface`]: discrete geometry of radial graphs over a periodic grid;
//!   mean curvature, shape operator, support function, area, Laplace-Beltrami.
//! - [`flow`]: explicit time integration of the inverse mean curvature flow in
//!   graph form with stability control and trace recording.
//! - [`functionals`]: the integral quantities I, J, K, L, the Brendle and
//!   Alexandrov-Fenchel deficits, and monotonicity/asymptotics reports.
//! - [`mass`]: flux mass at finite radius with extrapolation, the graph mass
//!   formula, and Penrose-type certificates.
//! - [`verify`]: the property suites gating the whole toolkit.

pub mod error;
pub mod flow;
pub mod functionals;
pub mod hypersurface;
pub mod kottler;
pub mod mass;
pub mod verify;
pub mod warped;

pub use error::{Error, Result};
pub use hypersurface::{CrossSectionGrid, FourierMode, GraphState};
pub use warped::{AmbientModel, Epsilon};
