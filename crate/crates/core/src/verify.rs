//! Property suites gating the toolkit.
//!
//! Each criterion checks one family of exact identities, inequalities, or
//! convergence rates at a pinned tolerance and reports
//! [`InequalityReport`] rows (`worst_violation <= 0` passes). Suites bundle
//! the criteria for the command-line verifier; the acceptance test target
//! runs all of them.

use crate::error::{Error, Result};
use crate::flow::{run, FlowConfig, FlowTrace};
use crate::functionals::{
    af_deficit, asymptotics_report, brendle_deficit, didt_identity_check, functionals_of,
    monotonicity_report, InequalityReport,
};
use crate::hypersurface::{mean_curvature, minkowski_residual, FourierMode, GraphState};
use crate::kottler::{
    self, embedding_profile, haw_bound, horizon_radius, mass_from_area, KottlerParams,
};
use crate::mass::{
    flux_mass_extrapolated, scalar_curvature_symmetric, theta_graph, KottlerProfile,
};
use crate::warped::{rho, s_from_r, AmbientModel, Epsilon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

/// Outcome of one criterion: its reports plus wall-clock time.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub reports: Vec<InequalityReport>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn passes(&self) -> bool {
        self.reports.iter().all(|r| r.passes())
    }
}

/// Named bundles of criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Slices,
    Geometry,
    Monotonicity,
    Asymptotics,
    Mass,
    All,
}

impl Suite {
    pub fn from_name(name: &str) -> Option<Suite> {
        match name {
            "slices" => Some(Suite::Slices),
            "geometry" => Some(Suite::Geometry),
            "monotonicity" => Some(Suite::Monotonicity),
            "asymptotics" => Some(Suite::Asymptotics),
            "mass" => Some(Suite::Mass),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    pub fn criteria(self) -> Vec<usize> {
        match self {
            Suite::Slices => vec![1, 11],
            Suite::Mass => vec![2, 3, 4],
            Suite::Geometry => vec![5, 9, 10],
            Suite::Monotonicity => vec![6, 7],
            Suite::Asymptotics => vec![8],
            Suite::All => (1..=11).collect(),
        }
    }
}

pub const CRITERION_NAMES: [&str; 11] = [
    "slice equality cases",
    "mass/area round trip",
    "scalar curvature identity",
    "flux mass limit",
    "embedding consistency",
    "exact area law",
    "flow monotonicity",
    "flow asymptotics",
    "discretization convergence",
    "inequality sampling",
    "genus-form consistency",
];

/// Run one criterion (1-based, matching [`CRITERION_NAMES`]).
pub fn criterion(id: usize) -> Result<CriterionOutcome> {
    let start = std::time::Instant::now();
    let reports = match id {
        1 => c01_slice_equality()?,
        2 => c02_mass_round_trip()?,
        3 => c03_scalar_curvature()?,
        4 => c04_flux_limit()?,
        5 => c05_embedding()?,
        6 => c06_area_law()?,
        7 => c07_monotonicity()?,
        8 => c08_asymptotics()?,
        9 => c09_convergence()?,
        10 => c10_inequality_sampling()?,
        11 => c11_genus_consistency()?,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "criterion id {id} out of range 1..=11"
            )))
        }
    };
    Ok(CriterionOutcome {
        id,
        name: CRITERION_NAMES[id - 1],
        reports,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_suite(suite: Suite) -> Result<Vec<CriterionOutcome>> {
    suite.criteria().into_iter().map(criterion).collect()
}

fn ambient_for(n: usize, eps: Epsilon) -> AmbientModel {
    match eps {
        Epsilon::Flat => AmbientModel::flat_torus(n).unwrap(),
        Epsilon::Hyperbolic => {
            if n == 3 {
                AmbientModel::from_genus(2).unwrap()
            } else {
                // cross-section area is a free positive parameter beyond n = 3
                AmbientModel::new(n, eps, 2.0 + n as f64, None).unwrap()
            }
        }
    }
}

/// The reference flow of the monotonicity and asymptotics criteria:
/// a two-mode graph over the 64^2 torus run to t = 12.
pub fn standard_trace() -> Result<&'static FlowTrace> {
    static TRACE: OnceLock<std::result::Result<FlowTrace, Error>> = OnceLock::new();
    TRACE
        .get_or_init(|| {
            let state = standard_state()?;
            run(&state, &FlowConfig::new(12.0, 0.1))
        })
        .as_ref()
        .map_err(|e| e.clone())
}

pub fn standard_state() -> Result<GraphState> {
    GraphState::from_modes(
        AmbientModel::flat_torus(3)?,
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
}

/// Criterion 1: on 20 slices across n in {3,4,5} and both curvature signs,
/// both deficits vanish and L hits its sharp value, all within 1e-10.
fn c01_slice_equality() -> Result<Vec<InequalityReport>> {
    let mut cases: Vec<(AmbientModel, f64)> = Vec::new();
    for n in [3usize, 4, 5] {
        for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
            let amb = ambient_for(n, eps);
            let radii: &[f64] = match eps {
                Epsilon::Flat => &[0.6, 1.0, 2.7],
                Epsilon::Hyperbolic => &[1.4, 2.0, 4.1],
            };
            for &r in radii {
                cases.push((amb.clone(), r));
            }
        }
    }
    cases.push((ambient_for(3, Epsilon::Flat), 5.3));
    cases.push((ambient_for(3, Epsilon::Hyperbolic), 7.0));
    assert_eq!(cases.len(), 20);

    let mut worst_af = f64::NEG_INFINITY;
    let mut worst_br = f64::NEG_INFINITY;
    let mut worst_l = f64::NEG_INFINITY;
    let mut loc_af = String::new();
    let mut loc_br = String::new();
    let mut loc_l = String::new();
    for (amb, r) in &cases {
        let s = s_from_r(*r, amb.epsilon())?;
        let slice = GraphState::symmetric(amb.clone(), s)?;
        let here = format!("n={} eps={} r={r}", amb.n(), amb.epsilon().as_i32());
        let af = af_deficit(&slice).abs();
        if af > worst_af {
            worst_af = af;
            loc_af = here.clone();
        }
        let br = brendle_deficit(&slice)?.abs();
        if br > worst_br {
            worst_br = br;
            loc_br = here.clone();
        }
        let f = functionals_of(&slice);
        let n = amb.n() as f64;
        let sharp = (n - 1.0) * amb.theta() * amb.epsilon().value();
        let dl = (f.l - sharp).abs();
        if dl > worst_l {
            worst_l = dl;
            loc_l = here;
        }
    }
    Ok(vec![
        InequalityReport::upper_bound("slice_af_deficit", worst_af, 1e-10, loc_af),
        InequalityReport::upper_bound("slice_brendle_deficit", worst_br, 1e-10, loc_br),
        InequalityReport::upper_bound("slice_L_sharp_value", worst_l, 1e-10, loc_l),
    ])
}

/// Criterion 2: for 50 random masses, the horizon area reproduces the mass
/// through the area formula and through the boundary flux, to 1e-10.
fn c02_mass_round_trip() -> Result<Vec<InequalityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_7373);
    let mut worst_area = f64::NEG_INFINITY;
    let mut worst_flux = f64::NEG_INFINITY;
    let mut loc_area = String::new();
    let mut loc_flux = String::new();
    for _ in 0..50 {
        let m = 10f64.powf(rng.gen_range(-2.0..2.0));
        for n in [3usize, 4, 5] {
            for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
                let amb = ambient_for(n, eps);
                let params = KottlerParams::new(amb.clone(), m);
                let r_h = horizon_radius(&params)?;
                let area = amb.theta() * r_h.powi(n as i32 - 1);
                let here = format!("n={n} eps={} m={m}", eps.as_i32());
                let d1 = (mass_from_area(area, &amb)? - m).abs();
                if d1 > worst_area {
                    worst_area = d1;
                    loc_area = here.clone();
                }
                let d2 = (kottler::boundary_mass(&params)? - m).abs();
                if d2 > worst_flux {
                    worst_flux = d2;
                    loc_flux = here;
                }
            }
        }
    }
    Ok(vec![
        InequalityReport::upper_bound("mass_from_area_round_trip", worst_area, 1e-10, loc_area),
        InequalityReport::upper_bound("boundary_mass_round_trip", worst_flux, 1e-10, loc_flux),
    ])
}

/// Criterion 3: the symmetric scalar curvature is -n(n-1) on the whole
/// two-parameter family, at 50 radii each, to 1e-10.
fn c03_scalar_curvature() -> Result<Vec<InequalityReport>> {
    let mut worst = f64::NEG_INFINITY;
    let mut loc = String::new();
    for n in [3usize, 4, 5] {
        for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
            let amb = ambient_for(n, eps);
            let m = 1.0 + n as f64;
            let profile = KottlerProfile::new(KottlerParams::new(amb, m))?;
            let expect = -(n as f64) * (n as f64 - 1.0);
            for k in 0..50 {
                let r = profile.horizon() * 1.02 + 0.9 * k as f64;
                let d = (scalar_curvature_symmetric(&profile, r) - expect).abs();
                if d > worst {
                    worst = d;
                    loc = format!("n={n} eps={} r={r:.3}", eps.as_i32());
                }
            }
        }
    }
    Ok(vec![InequalityReport::upper_bound(
        "scalar_curvature_identity",
        worst,
        1e-10,
        loc,
    )])
}

fn flux_cases() -> Vec<(usize, Epsilon, f64)> {
    vec![
        (3, Epsilon::Flat, 4.0),
        (3, Epsilon::Hyperbolic, 3.0),
        (4, Epsilon::Hyperbolic, 6.0),
    ]
}

/// Criterion 4: the flux at r in {10, 100, 1000} extrapolates to the mass
/// within 0.1% on the three reference black holes.
fn c04_flux_limit() -> Result<Vec<InequalityReport>> {
    let mut worst = f64::NEG_INFINITY;
    let mut loc = String::new();
    for (n, eps, m) in flux_cases() {
        let amb = ambient_for(n, eps);
        let profile = KottlerProfile::new(KottlerParams::new(amb, m))?;
        let ex = flux_mass_extrapolated(&profile, 10.0, 10.0)?;
        let rel = (ex.limit - m).abs() / m;
        if rel > worst {
            worst = rel;
            loc = format!(
                "n={n} eps={} m={m}: {:?} -> {}",
                eps.as_i32(),
                ex.values,
                ex.limit
            );
        }
    }
    Ok(vec![InequalityReport::upper_bound(
        "flux_mass_limit",
        worst,
        1e-3,
        loc,
    )])
}

/// Criterion 5: the embedding satisfies its defining identity to 1e-9
/// relative on [r_h + 1e-3, 50], and the normal tilt matches the static
/// potential to 1e-8.
fn c05_embedding() -> Result<Vec<InequalityReport>> {
    let mut worst_metric = f64::NEG_INFINITY;
    let mut worst_theta = f64::NEG_INFINITY;
    let mut loc_metric = String::new();
    let mut loc_theta = String::new();
    for (n, eps, m) in flux_cases() {
        let amb = ambient_for(n, eps);
        let params = KottlerParams::new(amb.clone(), m);
        let profile = embedding_profile(&params, 50.0, 1e-3)?;
        for row in profile.rows.iter().skip(1) {
            let rho_v = rho(row.r, eps)?;
            let rho2 = rho_v * rho_v;
            let lhs = rho2 * row.dudr * row.dudr + 1.0 / rho2;
            let psi = kottler::rho_m(row.r, &params)?;
            let resid = (lhs * psi * psi - 1.0).abs();
            if resid > worst_metric {
                worst_metric = resid;
                loc_metric = format!("n={n} eps={} r={:.4}", eps.as_i32(), row.r);
            }
            let dth = (theta_graph(&amb, row.r, row.dudr)? - psi).abs();
            if dth > worst_theta {
                worst_theta = dth;
                loc_theta = format!("n={n} eps={} r={:.4}", eps.as_i32(), row.r);
            }
        }
    }
    Ok(vec![
        InequalityReport::upper_bound("induced_metric_residual", worst_metric, 1e-9, loc_metric),
        InequalityReport::upper_bound("tilt_equals_potential", worst_theta, 1e-8, loc_theta),
    ])
}

/// Criterion 6: slice flows obey `area(t) = area(0) e^t` to 1e-8 and
/// `lambda(t) = lambda(0) e^(t/(n-1))` to 1e-10 over t in [0, 2].
fn c06_area_law() -> Result<Vec<InequalityReport>> {
    let mut worst_area = f64::NEG_INFINITY;
    let mut worst_lam = f64::NEG_INFINITY;
    let mut loc_area = String::new();
    let mut loc_lam = String::new();
    for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
        let amb = ambient_for(3, eps);
        let s0 = match eps {
            Epsilon::Flat => 0.2,
            Epsilon::Hyperbolic => s_from_r(1.6, eps)?,
        };
        let state = GraphState::symmetric(amb.clone(), s0)?;
        let trace = run(&state, &FlowConfig::new(2.0, 0.1))?;
        let a0 = trace.first().area;
        let lam0 = (a0 / amb.theta()).sqrt();
        for rec in &trace.records {
            let da = (rec.area * (-rec.t).exp() / a0 - 1.0).abs();
            if da > worst_area {
                worst_area = da;
                loc_area = format!("eps={} t={}", eps.as_i32(), rec.t);
            }
            let lam = (rec.area / amb.theta()).sqrt();
            let dl = (lam / (lam0 * (rec.t / 2.0).exp()) - 1.0).abs();
            if dl > worst_lam {
                worst_lam = dl;
                loc_lam = format!("eps={} t={}", eps.as_i32(), rec.t);
            }
        }
    }
    Ok(vec![
        InequalityReport::upper_bound("slice_area_law", worst_area, 1e-8, loc_area),
        InequalityReport::upper_bound("slice_radius_law", worst_lam, 1e-10, loc_lam),
    ])
}

/// Criterion 7: monotone quantities on the standard run, with the
/// discretization-aware slack, plus `J - K <= 1e-8` throughout.
fn c07_monotonicity() -> Result<Vec<InequalityReport>> {
    let trace = standard_trace()?;
    monotonicity_report(trace)
}

/// Criterion 8: limits on the standard run: `J/K -> 1` within 1%, final `L`
/// above the sharp bound with 1e-2 slack, curvature tail decay exponent
/// within 20% of 2/(n-1), and gradient/w-range decay below 10% of initial.
fn c08_asymptotics() -> Result<Vec<InequalityReport>> {
    let trace = standard_trace()?;
    let amb = AmbientModel::flat_torus(3)?;
    asymptotics_report(trace, &amb)
}

/// Criterion 9: the Minkowski-identity residual converges at observed
/// order 1.8 or better across M in {32, 64, 128}, and the dI/dt identity
/// residual at M = 64 with probe 1e-4 stays below 1e-4.
///
/// The fixed probe graph sits at a moderate scale: the identity residual is
/// an absolute target while the functional magnitudes grow like
/// `lambda(s0)^n`, so the s0 = 1 reference graph would need a relative
/// agreement of 3e-8 from a 2nd-order scheme.
fn c09_convergence() -> Result<Vec<InequalityReport>> {
    let graph = |m: usize| -> Result<GraphState> {
        GraphState::from_modes(
            AmbientModel::flat_torus(3)?,
            m,
            -0.5,
            &[
                FourierMode {
                    k: vec![1, 0],
                    amp_cos: 0.05,
                    amp_sin: 0.0,
                },
                FourierMode {
                    k: vec![0, 1],
                    amp_cos: 0.03,
                    amp_sin: 0.0,
                },
            ],
        )
    };
    let r32 = minkowski_residual(&graph(32)?);
    let r64 = minkowski_residual(&graph(64)?);
    let r128 = minkowski_residual(&graph(128)?);
    let order = (r32 / r64).log2().min((r64 / r128).log2());

    let didt = didt_identity_check(&graph(64)?, 1e-4)?;

    Ok(vec![
        InequalityReport::upper_bound(
            "minkowski_residual_order",
            1.8 - order,
            0.0,
            format!("residuals {r32:.3e} {r64:.3e} {r128:.3e}"),
        ),
        InequalityReport::upper_bound("didt_identity_residual", didt, 1e-4, "M=64 delta=1e-4"),
    ])
}

/// Criterion 10: 100 random strictly mean convex torus graphs (Fourier
/// amplitudes at most 0.2) all satisfy both sharp inequalities to -1e-8.
fn c10_inequality_sampling() -> Result<Vec<InequalityReport>> {
    let amb = AmbientModel::flat_torus(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x696e_6571);
    let mut worst_af = f64::NEG_INFINITY;
    let mut worst_br = f64::NEG_INFINITY;
    let mut loc_af = String::new();
    let mut loc_br = String::new();
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < 100 {
        attempts += 1;
        if attempts > 2000 {
            return Err(Error::InvalidParameter(
                "sampling failed to produce 100 mean convex graphs".into(),
            ));
        }
        let n_modes = rng.gen_range(1..=3);
        let modes: Vec<FourierMode> = (0..n_modes)
            .map(|_| {
                let mut k = vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
                if k.iter().all(|&x| x == 0) {
                    k[0] = 1;
                }
                FourierMode {
                    k,
                    amp_cos: rng.gen_range(-0.07..0.07),
                    amp_sin: rng.gen_range(-0.07..0.07),
                }
            })
            .collect();
        let s0 = rng.gen_range(0.6..1.4);
        let state = GraphState::from_modes(amb.clone(), 32, s0, &modes)?;
        let min_h = mean_curvature(&state)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_h <= 1e-3 {
            continue;
        }
        accepted += 1;
        let af = af_deficit(&state);
        if -af > worst_af {
            worst_af = -af;
            loc_af = format!("sample {accepted} (s0={s0:.3})");
        }
        let br = brendle_deficit(&state)?;
        if -br > worst_br {
            worst_br = -br;
            loc_br = format!("sample {accepted} (s0={s0:.3})");
        }
    }
    Ok(vec![
        InequalityReport::upper_bound("af_deficit_nonnegative", worst_af, 1e-8, loc_af),
        InequalityReport::upper_bound("brendle_deficit_nonnegative", worst_br, 1e-8, loc_br),
    ])
}

/// Criterion 11: the genus form of the bound agrees with the normalized-area
/// form to 1e-12, for genus 2..4 over 20 areas, and genus 1 matches the flat
/// normalization.
fn c11_genus_consistency() -> Result<Vec<InequalityReport>> {
    let pi = std::f64::consts::PI;
    let mut worst = f64::NEG_INFINITY;
    let mut loc = String::new();
    for genus in [2u32, 3, 4] {
        let theta2 = 4.0 * pi * f64::from(genus - 1);
        let amb = AmbientModel::new(3, Epsilon::Hyperbolic, theta2, Some(genus))?;
        for k in 0..20 {
            let area = theta2 * (0.3 + 0.25 * k as f64);
            let d = (haw_bound(area, genus)? - mass_from_area(area, &amb)?).abs();
            if d > worst {
                worst = d;
                loc = format!("genus={genus} area={area:.3}");
            }
        }
    }
    let flat = AmbientModel::new(3, Epsilon::Flat, 4.0 * pi, Some(1))?;
    for k in 0..20 {
        let area = 4.0 * pi * (0.3 + 0.25 * k as f64);
        let d = (haw_bound(area, 1)? - mass_from_area(area, &flat)?).abs();
        if d > worst {
            worst = d;
            loc = format!("genus=1 area={area:.3}");
        }
    }
    Ok(vec![InequalityReport::upper_bound(
        "genus_form_consistency",
        worst,
        1e-12,
        loc,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_resolve() {
        assert_eq!(Suite::from_name("slices"), Some(Suite::Slices));
        assert_eq!(Suite::from_name("all"), Some(Suite::All));
        assert_eq!(Suite::from_name("bogus"), None);
        let mut all: Vec<usize> = Suite::All.criteria();
        all.sort_unstable();
        assert_eq!(all, (1..=11).collect::<Vec<_>>());
        // every criterion belongs to exactly one non-All suite
        let mut union: Vec<usize> = [
            Suite::Slices,
            Suite::Geometry,
            Suite::Monotonicity,
            Suite::Asymptotics,
            Suite::Mass,
        ]
        .iter()
        .flat_map(|s| s.criteria())
        .collect();
        union.sort_unstable();
        assert_eq!(union, (1..=11).collect::<Vec<_>>());
    }

    #[test]
    fn quick_criteria_pass() {
        // the fast criteria run in well under a second each
        for id in [1usize, 2, 3, 11] {
            let out = criterion(id).unwrap();
            assert!(
                out.passes(),
                "criterion {id} failed: {:?}",
                out.reports
                    .iter()
                    .filter(|r| !r.passes())
                    .map(|r| (&r.name, r.worst_violation))
                    .collect::<Vec<_>>()
            );
        }
    }
}
