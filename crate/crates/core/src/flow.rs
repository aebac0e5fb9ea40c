//! Explicit time integration of the inverse mean curvature flow in graph
//! form.
//!
//! Up to tangential diffeomorphisms the flow is the scalar equation
//! `du/dt = W/H` for the graph height, a quasilinear parabolic problem whose
//! diffusion tensor `ht^{ij} / (lambda^2 H^2)` has eigenvalues at most
//! `1/(lambda^2 H^2)`. Since `lambda^2 H^2` grows exponentially along the
//! flow, the parabolic stiffness relaxes over time and classical RK4 with the
//! matching step bound stays stable throughout.

use crate::error::{Error, Result};
use crate::functionals::{af_deficit, brendle_deficit, functionals_of};
use crate::hypersurface::{graph_fields, minkowski_residual, umbilicity, GraphState};
use crate::warped::{lambda_unchecked, Epsilon};
use std::io::{self, Write};

pub const DEFAULT_SAFETY: f64 = 0.4;
pub const DEFAULT_MIN_H: f64 = 1e-8;

/// Step scale for symmetric mode, where the flow is a plain ODE with no grid
/// stiffness; sized so RK4 keeps the closed-form solution to ~1e-12 relative.
const SYMMETRIC_DT_UNIT: f64 = 5e-3;

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    /// Fraction of the stability bound used per step, in (0, 1].
    pub safety: f64,
    /// End time of the integration.
    pub t_end: f64,
    /// Spacing between recorded trace entries.
    pub record_dt: f64,
    /// Evolve the drift-free height `u - t/(n-1)`; `None` means automatic
    /// (enabled for `t_end > 15`, where `lambda(u)` precision matters).
    pub rescale: Option<bool>,
    /// Mean-convexity guard: the flow aborts if `min H` falls to this level.
    pub min_h: f64,
}

impl FlowConfig {
    pub fn new(t_end: f64, record_dt: f64) -> Self {
        FlowConfig {
            safety: DEFAULT_SAFETY,
            t_end,
            record_dt,
            rescale: None,
            min_h: DEFAULT_MIN_H,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "safety = {} must lie in (0, 1]",
                self.safety
            )));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} must be positive",
                self.t_end
            )));
        }
        if !(self.record_dt > 0.0 && self.record_dt <= self.t_end) {
            return Err(Error::InvalidParameter(format!(
                "record_dt = {} must lie in (0, t_end]",
                self.record_dt
            )));
        }
        if !(self.min_h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "min_h = {} must be positive",
                self.min_h
            )));
        }
        Ok(())
    }

    fn rescale_on(&self) -> bool {
        self.rescale.unwrap_or(self.t_end > 15.0)
    }
}

/// One recorded snapshot of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub area: f64,
    /// Normalized area `area / theta`.
    pub a_norm: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
    /// `(J - K) / a_norm^(n/(n-1))`.
    pub jk_norm: f64,
    pub af_deficit: f64,
    pub brendle_deficit: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Grid mean of the flow speed `W/H`.
    pub mean_wh: f64,
    pub max_grad_v: f64,
    pub max_umbilicity: f64,
    pub minkowski_resid: f64,
    /// Spread of `w = e^(u - t/(n-1)) + e^(-t/(n-1))` over the grid.
    pub w_range: f64,
}

impl TraceRecord {
    pub const CSV_HEADER: &'static str = "t,area,anorm,I,J,K,L,jk_norm,af_deficit,\
brendle_deficit,minH,maxH,mean_WH,max_grad_v,max_umbilicity,minkowski_resid,w_range";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.area,
            self.a_norm,
            self.i,
            self.j,
            self.k,
            self.l,
            self.jk_norm,
            self.af_deficit,
            self.brendle_deficit,
            self.min_h,
            self.max_h,
            self.mean_wh,
            self.max_grad_v,
            self.max_umbilicity,
            self.minkowski_resid,
            self.w_range
        )
    }
}

/// Context a trace was produced under, carried for tolerance bookkeeping and
/// CSV emission.
#[derive(Debug, Clone)]
pub struct TraceMeta {
    pub n: usize,
    pub epsilon: Epsilon,
    pub theta: f64,
    /// Grid spacing; `None` for symmetric runs.
    pub dtheta: Option<f64>,
    pub record_dt: f64,
    /// Free-form resolved-configuration note written as a `#` comment line.
    pub config_comment: String,
}

/// Time series of flow snapshots at uniform `record_dt`.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
}

impl FlowTrace {
    pub fn first(&self) -> &TraceRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace is never empty")
    }

    /// Emit the trace as CSV: one `#` comment line with the resolved
    /// configuration, the fixed header, then one row per record in full
    /// double precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.meta.config_comment)?;
        writeln!(w, "{}", TraceRecord::CSV_HEADER)?;
        for rec in &self.records {
            writeln!(w, "{}", rec.csv_row())?;
        }
        Ok(())
    }
}

/// Flow speed `W/H` pointwise; in symmetric mode the closed slice form
/// `lambda / ((n-1) lambda')`.
pub fn rhs(state: &GraphState) -> Result<Vec<f64>> {
    rhs_with(state, DEFAULT_MIN_H)
}

pub(crate) fn rhs_with(state: &GraphState, min_h: f64) -> Result<Vec<f64>> {
    if !state.is_grid() {
        let hm = symmetric_mean_h(state);
        if hm <= min_h {
            return Err(Error::NonMeanConvex {
                t: state.t(),
                min_h: hm,
            });
        }
        return Ok(vec![1.0 / hm]);
    }
    let gf = graph_fields(state);
    let hm = gf.mean_h.iter().cloned().fold(f64::INFINITY, f64::min);
    if hm <= min_h {
        return Err(Error::NonMeanConvex {
            t: state.t(),
            min_h: hm,
        });
    }
    Ok((0..gf.len).map(|p| gf.w[p] / gf.mean_h[p]).collect())
}

/// Overflow-safe `(n-1) lambda' / lambda` for a symmetric state. For a
/// hyperbolic cross-section the ratio is `(1 - q)/(1 + q)` with
/// `q = 4 e^(-2u)`, which never overflows however large `u` grows.
fn symmetric_mean_h(state: &GraphState) -> f64 {
    let u = state.u_values()[0];
    let nf = state.ambient().n() as f64 - 1.0;
    match state.ambient().epsilon() {
        Epsilon::Flat => nf,
        Epsilon::Hyperbolic => {
            let q = 4.0 * (-2.0 * u).exp();
            nf * (1.0 - q) / (1.0 + q)
        }
    }
}

/// Largest stable explicit step:
/// `dt = safety * dtheta^2 * min(lambda^2 H^2) / (2 (n-1))`,
/// from the eigenvalue bound `1/(lambda^2 H^2)` of the linearized diffusion
/// tensor. Symmetric mode has no grid constraint and returns a fixed
/// accuracy-driven step.
pub fn stable_dt(state: &GraphState, safety: f64) -> Result<f64> {
    stable_dt_with(state, safety, DEFAULT_MIN_H)
}

pub(crate) fn stable_dt_with(state: &GraphState, safety: f64, min_h: f64) -> Result<f64> {
    if !state.is_grid() {
        let hm = symmetric_mean_h(state);
        if hm <= min_h {
            return Err(Error::NonMeanConvex {
                t: state.t(),
                min_h: hm,
            });
        }
        return Ok(safety * SYMMETRIC_DT_UNIT);
    }
    let gf = graph_fields(state);
    let hm = gf.mean_h.iter().cloned().fold(f64::INFINITY, f64::min);
    if hm <= min_h {
        return Err(Error::NonMeanConvex {
            t: state.t(),
            min_h: hm,
        });
    }
    let min_l2h2 = (0..gf.len)
        .map(|p| (gf.lambda[p] * gf.mean_h[p]).powi(2))
        .fold(f64::INFINITY, f64::min);
    let grid = state.grid_handle().unwrap();
    let dth = grid.spacing();
    let nf = state.ambient().n() as f64;
    Ok(safety * dth * dth * min_l2h2 / (2.0 * (nf - 1.0)))
}

/// One classical RK4 step of `du/dt = W/H`.
pub fn step(state: &GraphState, dt: f64) -> Result<GraphState> {
    step_with(state, dt, DEFAULT_MIN_H, false)
}

/// RK4 step; with `rescale` the integrated variable is the drift-free height
/// `u - t/(n-1)` (an identical map in exact arithmetic, but it keeps the
/// stored field O(1) on long runs).
pub(crate) fn step_with(
    state: &GraphState,
    dt: f64,
    min_h: f64,
    rescale: bool,
) -> Result<GraphState> {
    let t0 = state.t();
    let c = if rescale {
        1.0 / (state.ambient().n() as f64 - 1.0)
    } else {
        0.0
    };

    let to_y = |u: &[f64], t: f64| -> Vec<f64> { u.iter().map(|&x| x - c * t).collect() };
    let to_u = |y: &[f64], t: f64| -> Vec<f64> { y.iter().map(|&x| x + c * t).collect() };

    let eval = |y: &[f64], t: f64| -> Result<Vec<f64>> {
        let stage = state.with_field(to_u(y, t), t);
        let mut k = rhs_with(&stage, min_h)?;
        for v in &mut k {
            *v -= c;
        }
        Ok(k)
    };

    let y0 = to_y(state.u_values(), t0);
    let len = y0.len();
    let axpy = |y: &[f64], s: f64, k: &[f64]| -> Vec<f64> {
        (0..len).map(|p| y[p] + s * k[p]).collect()
    };

    let k1 = eval(&y0, t0)?;
    let k2 = eval(&axpy(&y0, 0.5 * dt, &k1), t0 + 0.5 * dt)?;
    let k3 = eval(&axpy(&y0, 0.5 * dt, &k2), t0 + 0.5 * dt)?;
    let k4 = eval(&axpy(&y0, dt, &k3), t0 + dt)?;

    let t1 = t0 + dt;
    let y1: Vec<f64> = (0..len)
        .map(|p| y0[p] + dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]))
        .collect();
    Ok(state.with_field(to_u(&y1, t1), t1))
}

/// Build a full trace snapshot of a state.
pub fn record_entry(state: &GraphState) -> Result<TraceRecord> {
    let n = state.ambient().n() as f64;
    let f = functionals_of(state);
    let af = af_deficit(state);
    let br = brendle_deficit(state)?;
    let jk_norm = (f.j - f.k) / f.a_norm.powf(n / (n - 1.0));

    if state.is_grid() {
        let gf = graph_fields(state);
        let min_h = gf.mean_h.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_h = gf.mean_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean_wh =
            (0..gf.len).map(|p| gf.w[p] / gf.mean_h[p]).sum::<f64>() / gf.len as f64;
        let max_grad_v = (0..gf.len)
            .map(|p| (gf.w[p] * gf.w[p] - 1.0).max(0.0).sqrt())
            .fold(0.0f64, f64::max);
        let umb = umbilicity(state)?;
        let max_umbilicity = umb.into_iter().fold(0.0f64, f64::max);
        let mink = minkowski_residual(state);
        let drift = (-state.t() / (n - 1.0)).exp();
        let mut w_min = f64::INFINITY;
        let mut w_max = f64::NEG_INFINITY;
        for &u in state.u_values() {
            let w = (u - state.t() / (n - 1.0)).exp() + drift;
            w_min = w_min.min(w);
            w_max = w_max.max(w);
        }
        Ok(TraceRecord {
            t: state.t(),
            area: f.area,
            a_norm: f.a_norm,
            i: f.i,
            j: f.j,
            k: f.k,
            l: f.l,
            jk_norm,
            af_deficit: af,
            brendle_deficit: br,
            min_h,
            max_h,
            mean_wh,
            max_grad_v,
            max_umbilicity,
            minkowski_resid: mink,
            w_range: w_max - w_min,
        })
    } else {
        let h = symmetric_mean_h(state);
        Ok(TraceRecord {
            t: state.t(),
            area: f.area,
            a_norm: f.a_norm,
            i: f.i,
            j: f.j,
            k: f.k,
            l: f.l,
            jk_norm,
            af_deficit: af,
            brendle_deficit: br,
            min_h: h,
            max_h: h,
            mean_wh: 1.0 / h,
            max_grad_v: 0.0,
            max_umbilicity: 0.0,
            minkowski_resid: 0.0,
            w_range: 0.0,
        })
    }
}

/// Integrate a strictly mean convex state to `t_end`, recording every
/// `record_dt`.
///
/// The step is `min(stable_dt, distance to the next record boundary)`, so
/// every record lands on an exact multiple of `record_dt` and traces from
/// identical configurations are bit-identical.
pub fn run(state0: &GraphState, config: &FlowConfig) -> Result<FlowTrace> {
    config.validate()?;
    let rescale = config.rescale_on();
    let t0 = state0.t();

    let mut boundaries: Vec<f64> = Vec::new();
    let mut k = 1usize;
    loop {
        let t = t0 + k as f64 * config.record_dt;
        if t >= config.t_end - 1e-12 * config.t_end.max(1.0) {
            break;
        }
        boundaries.push(t);
        k += 1;
    }
    boundaries.push(config.t_end);

    let meta = TraceMeta {
        n: state0.ambient().n(),
        epsilon: state0.ambient().epsilon(),
        theta: state0.ambient().theta(),
        dtheta: state0.grid_handle().map(|g| g.spacing()),
        record_dt: config.record_dt,
        config_comment: format!(
            "n={} epsilon={} theta={} mode={} safety={} t_end={} record_dt={} rescale={} min_h={}",
            state0.ambient().n(),
            state0.ambient().epsilon().as_i32(),
            state0.ambient().theta(),
            if state0.is_grid() { "grid" } else { "symmetric" },
            config.safety,
            config.t_end,
            config.record_dt,
            rescale,
            config.min_h
        ),
    };

    let mut records = Vec::with_capacity(boundaries.len() + 1);
    records.push(record_entry(state0)?);

    let mut state = state0.clone();
    for &target in &boundaries {
        while state.t() < target {
            let dt_stable = stable_dt_with(&state, config.safety, config.min_h)?;
            let remaining = target - state.t();
            let (dt, landing) = if dt_stable < remaining {
                (dt_stable, false)
            } else {
                (remaining, true)
            };
            let mut next = step_with(&state, dt, config.min_h, rescale)?;
            if landing {
                next.set_t(target);
            }
            let lam_max = lambda_unchecked(next.max_u(), next.ambient().epsilon());
            if !lam_max.is_finite() {
                return Err(Error::NumericalOverflow { t: next.t() });
            }
            state = next;
        }
        records.push(record_entry(&state)?);
    }

    Ok(FlowTrace { meta, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::FourierMode;
    use crate::warped::{s_from_r, AmbientModel};
    use std::f64::consts::TAU;

    fn torus3() -> AmbientModel {
        AmbientModel::flat_torus(3).unwrap()
    }

    fn standard_state() -> GraphState {
        GraphState::from_modes(
            torus3(),
            64,
            1.0,
            &[
                FourierMode {
                    k: vec![1, 0],
                    amp_cos: 0.1,
                    amp_sin: 0.0,
                },
                FourierMode {
                    k: vec![0, 1],
                    amp_cos: 0.05,
                    amp_sin: 0.0,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rhs_slice_values() {
        let slice = GraphState::from_modes(torus3(), 16, 0.0, &[]).unwrap();
        for v in rhs(&slice).unwrap() {
            assert!((v - 0.5).abs() < 1e-13);
        }
        let g2 = AmbientModel::from_genus(2).unwrap();
        let s = s_from_r(2.0, Epsilon::Hyperbolic).unwrap();
        let sym = GraphState::symmetric(g2, s).unwrap();
        let v = rhs(&sym).unwrap()[0];
        assert!((v - 2.0 / (2.0 * 3.0f64.sqrt())).abs() < 1e-12);
        assert!((v - 0.5773503).abs() < 1e-7);
    }

    #[test]
    fn rhs_rejects_horizon_slice() {
        let g2 = AmbientModel::from_genus(2).unwrap();
        let boundary = GraphState::symmetric(g2, std::f64::consts::LN_2 + 1e-12).unwrap();
        assert!(matches!(
            rhs(&boundary),
            Err(Error::NonMeanConvex { .. })
        ));
    }

    #[test]
    fn stable_dt_formula_and_scaling() {
        let slice = GraphState::from_modes(torus3(), 64, 0.0, &[]).unwrap();
        let dt = stable_dt(&slice, 0.4).unwrap();
        let dth = TAU / 64.0;
        let expect = 0.4 * dth * dth * 4.0 / 4.0;
        assert!((dt - expect).abs() < 1e-15, "dt = {dt}, expect {expect}");
        assert!((expect - 0.003855).abs() < 1e-5);

        let fine = GraphState::from_modes(torus3(), 128, 0.0, &[]).unwrap();
        let dt_fine = stable_dt(&fine, 0.4).unwrap();
        assert!((dt / dt_fine - 4.0).abs() < 1e-10);
    }

    #[test]
    fn stable_dt_grows_exponentially_on_slices() {
        // along a slice flow lambda^2 H^2 = (n-1)^2 (lambda^2 + eps) ~ e^(2t/(n-1))
        let s0 = GraphState::from_modes(torus3(), 16, 0.0, &[]).unwrap();
        let dt0 = stable_dt(&s0, 0.4).unwrap();
        let t = 3.0;
        let mut evolved = GraphState::from_modes(torus3(), 16, t / 2.0, &[]).unwrap();
        evolved.set_t(t);
        let dt1 = stable_dt(&evolved, 0.4).unwrap();
        assert!(((dt1 / dt0) / t.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn step_exact_on_flat_symmetric() {
        let sym = GraphState::symmetric(torus3(), 0.3).unwrap();
        let stepped = step(&sym, 0.25).unwrap();
        assert!((stepped.u_values()[0] - (0.3 + 0.125)).abs() < 1e-15);
        assert!((stepped.t() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn symmetric_flow_matches_closed_form() {
        // lambda(u(t)) = lambda(u0) e^(t/(n-1)) for every epsilon
        let g2 = AmbientModel::from_genus(2).unwrap();
        let s0 = s_from_r(1.5, Epsilon::Hyperbolic).unwrap();
        let mut state = GraphState::symmetric(g2, s0).unwrap();
        let lam0 = 1.5;
        let dt = 2e-3;
        while state.t() < 5.0 - 1e-12 {
            state = step(&state, dt).unwrap();
        }
        let lam = lambda_unchecked(state.u_values()[0], Epsilon::Hyperbolic);
        let expect = lam0 * (state.t() / 2.0).exp();
        assert!(
            ((lam - expect) / expect).abs() < 1e-10,
            "lambda {lam} vs {expect}"
        );
    }

    #[test]
    fn rk4_local_order_on_grid() {
        // coarse grid keeps the stability bound well above the probe steps
        // and the dt^5 defect above the rounding floor
        let state = GraphState::from_modes(
            torus3(),
            16,
            1.0,
            &[FourierMode {
                k: vec![1, 0],
                amp_cos: 0.1,
                amp_sin: 0.0,
            }],
        )
        .unwrap();
        let defect = |dt: f64| -> f64 {
            let one = step(&state, dt).unwrap();
            let half = step(&step(&state, dt / 2.0).unwrap(), dt / 2.0).unwrap();
            one.u_values()
                .iter()
                .zip(half.u_values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        // the step-doubling defect scales like dt^5: halving dt divides it by 32
        let ratio = defect(0.2) / defect(0.1);
        assert!(
            (22.0..44.0).contains(&ratio),
            "RK4 order ratio {ratio}"
        );
    }

    #[test]
    fn rescale_matches_plain_integration() {
        let state = standard_state();
        let plain = step_with(&state, 0.01, DEFAULT_MIN_H, false).unwrap();
        let resc = step_with(&state, 0.01, DEFAULT_MIN_H, true).unwrap();
        for (a, b) in plain.u_values().iter().zip(resc.u_values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn run_slice_area_law() {
        let sym = GraphState::symmetric(torus3(), 0.2).unwrap();
        let trace = run(&sym, &FlowConfig::new(2.0, 0.1)).unwrap();
        let a0 = trace.first().area;
        for rec in &trace.records {
            let ratio = rec.area * (-rec.t).exp() / a0;
            assert!(
                (ratio - 1.0).abs() < 1e-8,
                "area law violated at t = {}: {ratio}",
                rec.t
            );
        }
    }

    #[test]
    fn run_grid_slice_area_law() {
        let slice = GraphState::from_modes(torus3(), 16, 0.0, &[]).unwrap();
        let trace = run(&slice, &FlowConfig::new(1.0, 0.25)).unwrap();
        let a0 = trace.first().area;
        for rec in &trace.records {
            assert!((rec.area * (-rec.t).exp() / a0 - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn run_respects_sandwich_bounds() {
        let state = standard_state();
        let lam_min0 = lambda_unchecked(state.min_u(), Epsilon::Flat);
        let lam_max0 = lambda_unchecked(state.max_u(), Epsilon::Flat);
        let mut s = state.clone();
        for target in [0.5f64, 1.0, 1.5, 2.0, 2.5, 3.0] {
            while s.t() < target {
                let dt = stable_dt(&s, 0.4)
                    .unwrap()
                    .min(target - s.t());
                s = step(&s, dt).unwrap();
            }
            let growth = (s.t() / 2.0).exp();
            let lo = lambda_unchecked(s.min_u(), Epsilon::Flat);
            let hi = lambda_unchecked(s.max_u(), Epsilon::Flat);
            assert!(lo >= growth * lam_min0 * (1.0 - 1e-6), "lower sandwich at {}", s.t());
            assert!(hi <= growth * lam_max0 * (1.0 + 1e-6), "upper sandwich at {}", s.t());
        }
    }

    #[test]
    fn run_records_at_exact_times() {
        let sym = GraphState::symmetric(torus3(), 0.0).unwrap();
        let trace = run(&sym, &FlowConfig::new(1.0, 0.125)).unwrap();
        assert_eq!(trace.records.len(), 9);
        for (k, rec) in trace.records.iter().enumerate() {
            assert_eq!(rec.t, k as f64 * 0.125);
        }
    }

    #[test]
    fn run_is_deterministic() {
        let state = GraphState::from_modes(
            torus3(),
            16,
            0.5,
            &[FourierMode {
                k: vec![1, 1],
                amp_cos: 0.05,
                amp_sin: 0.0,
            }],
        )
        .unwrap();
        let config = FlowConfig::new(1.0, 0.2);
        let t1 = run(&state, &config).unwrap();
        let t2 = run(&state, &config).unwrap();
        assert_eq!(t1.records.len(), t2.records.len());
        for (a, b) in t1.records.iter().zip(&t2.records) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.area.to_bits(), b.area.to_bits());
            assert_eq!(a.l.to_bits(), b.l.to_bits());
            assert_eq!(a.max_h.to_bits(), b.max_h.to_bits());
        }
    }

    #[test]
    fn run_aborts_on_overflow() {
        // e^u leaves the double range at u ~ 709.8, here around t ~ 19.6
        let sym = GraphState::symmetric(torus3(), 700.0).unwrap();
        let mut config = FlowConfig::new(30.0, 10.0);
        config.rescale = Some(false);
        match run(&sym, &config) {
            Err(Error::NumericalOverflow { t }) => assert!(t > 19.0 && t < 20.5),
            other => panic!("expected NumericalOverflow, got {other:?}"),
        }
    }

    #[test]
    fn run_aborts_on_lost_convexity() {
        // a deep dent makes H negative somewhere: the solver must refuse
        let dented = GraphState::from_modes(
            torus3(),
            32,
            0.0,
            &[FourierMode {
                k: vec![3, 0],
                amp_cos: 0.6,
                amp_sin: 0.0,
            }],
        )
        .unwrap();
        match run(&dented, &FlowConfig::new(1.0, 0.5)) {
            Err(Error::NonMeanConvex { .. }) => {}
            other => panic!("expected NonMeanConvex, got {other:?}"),
        }
    }

    #[test]
    fn standard_run_invariants() {
        // shared 12-unit reference run; cached across the test binary
        let trace = crate::verify::standard_trace().unwrap();

        // the flow speed equilibrates: mean W/H within 1e-3 of 1/(n-1) by
        // t = 10 and closer at the end
        for rec in trace.records.iter().filter(|r| r.t >= 10.0) {
            assert!(
                (rec.mean_wh - 0.5).abs() < 1e-3,
                "mean W/H = {} at t = {}",
                rec.mean_wh,
                rec.t
            );
        }

        // umbilicity decays monotonically once the transient has passed
        let after: Vec<f64> = trace
            .records
            .iter()
            .filter(|r| r.t >= 3.0)
            .map(|r| r.max_umbilicity)
            .collect();
        for w in after.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-8) || w[1] < 1e-10,
                "umbilicity rose: {} -> {}",
                w[0],
                w[1]
            );
        }

        // the rescaled-height spread has stabilized near the end
        let tail: Vec<&TraceRecord> = trace
            .records
            .iter()
            .filter(|r| r.t >= 11.0)
            .collect();
        for pair in tail.windows(2) {
            assert!((pair[1].w_range - pair[0].w_range).abs() < 1e-3);
        }
    }

    #[test]
    fn trace_csv_shape() {
        let sym = GraphState::symmetric(torus3(), 0.0).unwrap();
        let trace = run(&sym, &FlowConfig::new(0.5, 0.25)).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), TraceRecord::CSV_HEADER);
        assert_eq!(lines.count(), trace.records.len());
    }
}
