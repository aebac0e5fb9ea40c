//! Pointwise geometry of the graph: derivatives, normal factor, shape
//! operator, mean curvature, support function, area element, and the
//! Laplace-Beltrami operator of the induced metric.
//!
//! With `v` the reparametrized height (`dv = du / lambda(u)`), the induced
//! metric is `lambda^2 (h_ij + v_i v_j)`, the normal factor is
//! `W = sqrt(1 + |Dv|^2)`, and the shape operator reads
//!
//! ```text
//! a^i_j = lambda'/(W lambda) d^i_j - (1/(W lambda)) ht^{ik} v_{kj},
//! ht^{ij} = h^{ij} - v^i v^j / W^2.
//! ```
//!
//! The auxiliary variable `v` itself is never materialized; only its
//! derivatives enter any formula, and those follow from the chain rule:
//! `v_i = u_i/lambda`, `v_ij = u_ij/lambda - lambda' u_i u_j / lambda^2`.

use super::{GraphRepr, GraphState};
use crate::error::{Error, Result};
use crate::warped::{lambda_dot_unchecked, lambda_unchecked};

/// Shared pointwise data for one state. Length-1 vectors in symmetric mode.
pub(crate) struct GraphFields {
    pub dim: usize,
    pub len: usize,
    pub n: usize,
    /// Quadrature weight per node.
    pub weight: f64,
    pub lambda: Vec<f64>,
    pub lambda_dot: Vec<f64>,
    /// `v_i` per axis; empty in symmetric mode.
    pub dv: Vec<Vec<f64>>,
    /// `v_ij` flattened as `i*dim + j`; empty in symmetric mode.
    pub ddv: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    pub mean_h: Vec<f64>,
    pub support: Vec<f64>,
    /// Area density `lambda^(n-1) W` per unit cross-section volume.
    pub dens: Vec<f64>,
}

impl GraphFields {
    /// `ht^{ij} = d_ij - v_i v_j / W^2` at node `p`.
    #[inline]
    pub fn ht(&self, i: usize, j: usize, p: usize) -> f64 {
        let kron = if i == j { 1.0 } else { 0.0 };
        if self.dv.is_empty() {
            return kron;
        }
        kron - self.dv[i][p] * self.dv[j][p] / (self.w[p] * self.w[p])
    }

    /// Shape operator entry `a^i_j` at node `p`.
    #[inline]
    pub fn shape_entry(&self, i: usize, j: usize, p: usize) -> f64 {
        let wl = self.w[p] * self.lambda[p];
        let mut val = if i == j {
            self.lambda_dot[p] / wl
        } else {
            0.0
        };
        for k in 0..self.dim {
            val -= self.ht(i, k, p) * self.ddv[k * self.dim + j][p] / wl;
        }
        val
    }
}

pub(crate) fn graph_fields(state: &GraphState) -> GraphFields {
    let eps = state.ambient().epsilon();
    let n = state.ambient().n();
    match state.repr() {
        GraphRepr::Symmetric { u } => {
            let l = lambda_unchecked(*u, eps);
            let ld = lambda_dot_unchecked(*u, eps);
            GraphFields {
                dim: state.ambient().dim(),
                len: 1,
                n,
                weight: state.ambient().theta(),
                lambda: vec![l],
                lambda_dot: vec![ld],
                dv: Vec::new(),
                ddv: Vec::new(),
                w: vec![1.0],
                mean_h: vec![(n as f64 - 1.0) * ld / l],
                support: vec![l],
                dens: vec![l.powi(n as i32 - 1)],
            }
        }
        GraphRepr::Grid { grid, u } => {
            let dim = grid.dim();
            let len = grid.len();
            let lambda: Vec<f64> = u.iter().map(|&s| lambda_unchecked(s, eps)).collect();
            let lambda_dot: Vec<f64> = u.iter().map(|&s| lambda_dot_unchecked(s, eps)).collect();

            let du: Vec<Vec<f64>> = (0..dim).map(|a| grid.d1(u, a)).collect();
            let mut ddu: Vec<Vec<f64>> = vec![Vec::new(); dim * dim];
            for i in 0..dim {
                for j in i..dim {
                    let f = if i == j {
                        grid.d2_axis(u, i)
                    } else {
                        grid.d2_cross(u, i, j)
                    };
                    ddu[i * dim + j] = f.clone();
                    ddu[j * dim + i] = f;
                }
            }

            let dv: Vec<Vec<f64>> = (0..dim)
                .map(|a| (0..len).map(|p| du[a][p] / lambda[p]).collect())
                .collect();
            let mut ddv: Vec<Vec<f64>> = vec![Vec::new(); dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    ddv[i * dim + j] = (0..len)
                        .map(|p| {
                            ddu[i * dim + j][p] / lambda[p]
                                - lambda_dot[p] * du[i][p] * du[j][p] / (lambda[p] * lambda[p])
                        })
                        .collect();
                }
            }

            let w: Vec<f64> = (0..len)
                .map(|p| {
                    let g2: f64 = (0..dim).map(|a| dv[a][p] * dv[a][p]).sum();
                    (1.0 + g2).sqrt()
                })
                .collect();

            let nf = n as f64;
            let mean_h: Vec<f64> = (0..len)
                .map(|p| {
                    let wl = w[p] * lambda[p];
                    let mut trace = 0.0;
                    for i in 0..dim {
                        for k in 0..dim {
                            let kron = if i == k { 1.0 } else { 0.0 };
                            let ht = kron - dv[i][p] * dv[k][p] / (w[p] * w[p]);
                            trace += ht * ddv[k * dim + i][p];
                        }
                    }
                    (nf - 1.0) * lambda_dot[p] / wl - trace / wl
                })
                .collect();

            let support: Vec<f64> = (0..len).map(|p| lambda[p] / w[p]).collect();
            let dens: Vec<f64> = (0..len)
                .map(|p| lambda[p].powi(n as i32 - 1) * w[p])
                .collect();

            GraphFields {
                dim,
                len,
                n,
                weight: grid.cell_volume(),
                lambda,
                lambda_dot,
                dv,
                ddv,
                w,
                mean_h,
                support,
                dens,
            }
        }
    }
}

fn require_grid(state: &GraphState, what: &str) -> Result<()> {
    if state.is_grid() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} requires full-grid mode"
        )))
    }
}

/// First and second derivatives of the reparametrized height `v`.
pub struct VDerivatives {
    /// `v_i`, indexed `[axis][node]`.
    pub grad: Vec<Vec<f64>>,
    /// `v_ij`, indexed `[i*dim + j][node]`.
    pub hess: Vec<Vec<f64>>,
}

pub fn v_derivatives(state: &GraphState) -> Result<VDerivatives> {
    require_grid(state, "v_derivatives")?;
    let gf = graph_fields(state);
    Ok(VDerivatives {
        grad: gf.dv,
        hess: gf.ddv,
    })
}

/// Normal factor `W = sqrt(1 + |Dv|^2) >= 1`; identically 1 in symmetric mode.
pub fn w_factor(state: &GraphState) -> Vec<f64> {
    graph_fields(state).w
}

/// Mean curvature with respect to the inward normal.
pub fn mean_curvature(state: &GraphState) -> Vec<f64> {
    graph_fields(state).mean_h
}

/// Support function `p = lambda(u) / W > 0`.
pub fn support_function(state: &GraphState) -> Vec<f64> {
    graph_fields(state).support
}

/// Area density per unit cross-section volume, `lambda^(n-1) W`.
pub fn area_element(state: &GraphState) -> Vec<f64> {
    graph_fields(state).dens
}

/// Total area: periodic quadrature of the area density.
pub fn area(state: &GraphState) -> f64 {
    let gf = graph_fields(state);
    gf.dens.iter().sum::<f64>() * gf.weight
}

/// Shape operator as a field of `dim x dim` endomorphisms.
pub struct ShapeField {
    pub dim: usize,
    /// Entry `a^i_j`, indexed `[i*dim + j][node]`.
    pub entries: Vec<Vec<f64>>,
}

impl ShapeField {
    pub fn trace_at(&self, p: usize) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i][p]).sum()
    }

    /// `tr(a^2) = a^i_j a^j_i`; the squared norm of the shape operator.
    pub fn norm2_at(&self, p: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.entries[i * self.dim + j][p] * self.entries[j * self.dim + i][p];
            }
        }
        acc
    }
}

pub fn shape_operator(state: &GraphState) -> Result<ShapeField> {
    require_grid(state, "shape_operator")?;
    let gf = graph_fields(state);
    let dim = gf.dim;
    let mut entries = vec![vec![0.0; gf.len]; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for p in 0..gf.len {
                entries[i * dim + j][p] = gf.shape_entry(i, j, p);
            }
        }
    }
    Ok(ShapeField { dim, entries })
}

/// Pointwise deviation from a round point: max-norm of `a - (H/(n-1)) Id`.
pub fn umbilicity(state: &GraphState) -> Result<Vec<f64>> {
    require_grid(state, "umbilicity")?;
    let shape = shape_operator(state)?;
    let gf = graph_fields(state);
    let nf = gf.n as f64;
    Ok((0..gf.len)
        .map(|p| {
            let target = gf.mean_h[p] / (nf - 1.0);
            let mut worst = 0.0f64;
            for i in 0..gf.dim {
                for j in 0..gf.dim {
                    let kron = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((shape.entries[i * gf.dim + j][p] - kron * target).abs());
                }
            }
            worst
        })
        .collect())
}

/// Extrinsic scalar curvature `K = (H^2 - |a|^2) / 2`, the second elementary
/// symmetric function of the principal curvatures.
pub fn extrinsic_scalar(state: &GraphState) -> Result<Vec<f64>> {
    require_grid(state, "extrinsic_scalar")?;
    let shape = shape_operator(state)?;
    let gf = graph_fields(state);
    Ok((0..gf.len)
        .map(|p| {
            let h = gf.mean_h[p];
            0.5 * (h * h - shape.norm2_at(p))
        })
        .collect())
}

/// Laplace-Beltrami operator of the induced metric in divergence form,
/// `(1/sqrt(eta)) d_i (sqrt(eta) eta^{ij} d_j f)`.
///
/// Diagonal fluxes use half-point arithmetic averages of the coefficient
/// `c^{ij} = sqrt(eta) eta^{ij}`; mixed terms use the symmetrized central
/// form `(D_i(c D_j f) + D_j(c D_i f)) / 2` summed over ordered pairs, so the
/// whole stencil is exactly self-adjoint in the `sqrt(eta)`-weighted inner
/// product and annihilates constants to rounding.
pub fn laplace_beltrami(state: &GraphState, f: &[f64]) -> Result<Vec<f64>> {
    require_grid(state, "laplace_beltrami")?;
    let grid = state.grid_handle().unwrap();
    if f.len() != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "field has {} values for {} nodes",
            f.len(),
            grid.len()
        )));
    }
    let gf = graph_fields(state);
    let dim = gf.dim;
    let len = gf.len;
    let h2 = grid.spacing() * grid.spacing();

    // c^{ij} = sqrt(eta) eta^{ij} = lambda^(n-3) W ht^{ij}
    let coeff = |i: usize, j: usize| -> Vec<f64> {
        (0..len)
            .map(|p| gf.dens[p] / (gf.lambda[p] * gf.lambda[p]) * gf.ht(i, j, p))
            .collect()
    };

    let mut out = vec![0.0; len];

    for i in 0..dim {
        let c = coeff(i, i);
        for p in 0..len {
            let pp = grid.neighbor(p, i, 1);
            let pm = grid.neighbor(p, i, -1);
            let c_plus = 0.5 * (c[p] + c[pp]);
            let c_minus = 0.5 * (c[p] + c[pm]);
            out[p] += (c_plus * (f[pp] - f[p]) - c_minus * (f[p] - f[pm])) / h2;
        }
    }

    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let c = coeff(i, j);
            let djf = grid.d1(f, j);
            let flux: Vec<f64> = (0..len).map(|p| c[p] * djf[p]).collect();
            let div = grid.d1(&flux, i);
            for p in 0..len {
                out[p] += div[p];
            }
        }
    }

    for p in 0..len {
        out[p] /= gf.dens[p];
    }
    Ok(out)
}

/// Max-norm residual of the Minkowski-type identity
/// `Lap(rho) = (n-1) rho - H p` with `rho = lambda'(u)` on the graph.
/// Exactly zero (to rounding) on slices; vanishes at 2nd order on smooth
/// graphs under refinement.
pub fn minkowski_residual(state: &GraphState) -> f64 {
    match state.repr() {
        GraphRepr::Symmetric { .. } => 0.0,
        GraphRepr::Grid { .. } => {
            let gf = graph_fields(state);
            let rho: Vec<f64> = gf.lambda_dot.clone();
            let lap = laplace_beltrami(state, &rho).expect("grid state");
            let nf = gf.n as f64;
            (0..gf.len)
                .map(|p| (lap[p] - (nf - 1.0) * rho[p] + gf.mean_h[p] * gf.support[p]).abs())
                .fold(0.0f64, f64::max)
        }
    }
}
