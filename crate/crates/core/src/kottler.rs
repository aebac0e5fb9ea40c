//! The Kottler black-hole reference family.
//!
//! For a mass parameter `m` the deformed metric `dr^2/rho_m(r)^2 + r^2 h` has
//! static potential `rho_m(r) = sqrt(r^2 + epsilon - 2m/r^(n-2))`. The horizon
//! is the unique positive zero of `f(r) = r^n + epsilon r^(n-2) - 2m`, and the
//! metric embeds isometrically as a radially symmetric vertical graph in the
//! Riemannian cone over the ambient space.

use crate::error::{Error, Result};
use crate::warped::{rho, AmbientModel, Epsilon};
use std::io::{self, Write};

/// Black-hole parameters: the ambient stage plus the mass `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KottlerParams {
    ambient: AmbientModel,
    m: f64,
}

impl KottlerParams {
    pub fn new(ambient: AmbientModel, m: f64) -> Self {
        KottlerParams { ambient, m }
    }

    pub fn ambient(&self) -> &AmbientModel {
        &self.ambient
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    fn n(&self) -> usize {
        self.ambient.n()
    }

    fn eps(&self) -> f64 {
        self.ambient.epsilon().value()
    }
}

/// `f(r) = r^n + epsilon r^(n-2) - 2m`, evaluated exactly as written.
pub fn f_eval(r: f64, params: &KottlerParams) -> f64 {
    let n = params.n() as i32;
    r.powi(n) + params.eps() * r.powi(n - 2) - 2.0 * params.m
}

fn f_prime(r: f64, params: &KottlerParams) -> f64 {
    let n = params.n() as f64;
    let ni = params.n() as i32;
    n * r.powi(ni - 1) + (n - 2.0) * params.eps() * r.powi(ni - 3)
}

/// Cancellation-free factor `g` in `f(r) = (r - r_h) g(r)`, valid because
/// `f(r_h) = 0`:
/// `g(r) = sum_{j<n} r^j r_h^(n-1-j) + epsilon sum_{j<n-2} r^j r_h^(n-3-j)`.
pub(crate) fn f_factor(r: f64, r_h: f64, params: &KottlerParams) -> f64 {
    let n = params.n();
    let mut g = 0.0;
    for j in 0..n {
        g += r.powi(j as i32) * r_h.powi((n - 1 - j) as i32);
    }
    if n >= 3 {
        let mut ge = 0.0;
        for j in 0..(n - 2) {
            ge += r.powi(j as i32) * r_h.powi((n - 3 - j) as i32);
        }
        g += params.eps() * ge;
    }
    g
}

/// Horizon radius: the unique positive zero of `f`, found by bracketed
/// bisection down to width 1e-3 followed by Newton iteration.
///
/// Requires `m > 0`; then `r_h > 0` for flat and `r_h > 1` for hyperbolic
/// cross-sections, strictly increasing in `m`.
pub fn horizon_radius(params: &KottlerParams) -> Result<f64> {
    if !(params.m.is_finite() && params.m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon requires m > 0, got m = {}",
            params.m
        )));
    }
    let n = params.n() as f64;
    let guess = (2.0 * params.m).powf(1.0 / n);
    let floor = match params.ambient.epsilon() {
        Epsilon::Flat => 0.0,
        Epsilon::Hyperbolic => 1.0,
    };
    let mut lo = (guess / 2.0).max(floor);
    let mut hi = guess + 2.0;
    debug_assert!(f_eval(lo, params) <= 0.0 && f_eval(hi, params) > 0.0);

    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if f_eval(mid, params) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let mut r = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = f_eval(r, params) / f_prime(r, params);
        let next = r - step;
        if (next - r).abs() <= 1e-15 * next.abs() {
            r = next;
            break;
        }
        r = next;
    }
    Ok(r)
}

/// Static potential `rho_m(r) = sqrt(r^2 + epsilon - 2m/r^(n-2))`.
///
/// Defined for `r >= r_h` when `m > 0` (exactly zero at the horizon) and for
/// all ambient radii when `m = 0`, where it reduces to [`rho`].
pub fn rho_m(r: f64, params: &KottlerParams) -> Result<f64> {
    if params.m < 0.0 {
        return Err(Error::InvalidParameter(
            "static potential is only provided for m >= 0".into(),
        ));
    }
    if params.m == 0.0 {
        return rho(r, params.ambient.epsilon());
    }
    let r_h = horizon_radius(params)?;
    if r < r_h - 1e-12 * r_h {
        return Err(Error::Domain(format!(
            "r = {r} is inside the horizon r_h = {r_h}"
        )));
    }
    // f(r) = (r - r_h) g(r) avoids cancellation near the horizon.
    let f = (r - r_h).max(0.0) * f_factor(r, r_h, params);
    Ok((f / r.powi(params.n() as i32 - 2)).max(0.0).sqrt())
}

/// Critical mass `-(n-2)^((n-2)/2) / n^(n/2)` below which no static solution
/// exists for hyperbolic cross-sections.
pub fn critical_mass(n: usize) -> f64 {
    let nf = n as f64;
    -((nf - 2.0).powf((nf - 2.0) / 2.0)) / nf.powf(nf / 2.0)
}

/// Mass of a horizon with the given area:
/// `m = (A^(n/(n-1)) + epsilon A^((n-2)/(n-1))) / 2` with `A = area/theta`.
///
/// The same expression is the sharp lower bound for the mass of any geometry
/// enclosing a horizon of that area, so this doubles as the Penrose-type
/// bound.
pub fn mass_from_area(area: f64, ambient: &AmbientModel) -> Result<f64> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "area = {area} must be positive"
        )));
    }
    let n = ambient.n() as f64;
    let a = area / ambient.theta();
    Ok(0.5 * (a.powf(n / (n - 1.0)) + ambient.epsilon().value() * a.powf((n - 2.0) / (n - 1.0))))
}

/// Genus form of the three-dimensional mass bound:
/// `(4 pi / theta_2)^(3/2) sqrt(area / 16 pi) (1 - gamma + area / 4 pi)`,
/// where `theta_2 = 4 pi (gamma - 1)` for `gamma >= 2` and `4 pi` for the
/// normalized `gamma = 1` case.
pub fn haw_bound(area: f64, genus: u32) -> Result<f64> {
    if genus < 1 {
        return Err(Error::InvalidParameter("genus must be >= 1".into()));
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "area = {area} must be positive"
        )));
    }
    let pi = std::f64::consts::PI;
    let theta2 = if genus == 1 {
        4.0 * pi
    } else {
        4.0 * pi * f64::from(genus - 1)
    };
    Ok((4.0 * pi / theta2).powf(1.5)
        * (area / (16.0 * pi)).sqrt()
        * (1.0 - f64::from(genus) + area / (4.0 * pi)))
}

/// Sectional curvatures `(radial, tangential)` of the black-hole metric at
/// radius `r`: `radial = -1 - (n-2) m / r^n`, `tangential = -1 + 2m / r^n`.
///
/// The tangential exponent is `r^-n`: it is the unique choice for which the
/// scalar curvature reconstructs to the constant `-n(n-1)`, which a numerical
/// curvature oracle confirms.
pub fn sectional_curvatures(r: f64, params: &KottlerParams) -> Result<(f64, f64)> {
    if params.m < 0.0 {
        return Err(Error::InvalidParameter(
            "sectional curvatures are only provided for m >= 0".into(),
        ));
    }
    let inner = if params.m == 0.0 {
        params.ambient.epsilon().r_min()
    } else {
        horizon_radius(params)?
    };
    // the curvatures extend smoothly to the horizon slice itself
    if r < inner * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "r = {r} must not be inside the horizon {inner}"
        )));
    }
    let n = params.n() as f64;
    let rn = r.powi(params.n() as i32);
    Ok((
        -1.0 - (n - 2.0) * params.m / rn,
        -1.0 + 2.0 * params.m / rn,
    ))
}

/// Scalar curvature reconstructed from the sectional values; constantly
/// `-n(n-1)` on the whole family.
pub fn scalar_curvature(r: f64, params: &KottlerParams) -> Result<f64> {
    let (rad, tan) = sectional_curvatures(r, params)?;
    let n = params.n() as f64;
    Ok(2.0 * ((n - 1.0) * rad + (n - 1.0) * (n - 2.0) / 2.0 * tan))
}

/// One row of the embedding profile: radius, graph height, slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub r: f64,
    pub u: f64,
    pub dudr: f64,
}

/// Radially symmetric vertical graph realizing the black-hole metric inside
/// the Riemannian cone over the ambient space.
#[derive(Debug, Clone)]
pub struct EmbeddingProfile {
    pub params: KottlerParams,
    pub rows: Vec<ProfileRow>,
}

impl EmbeddingProfile {
    /// Serialize as CSV with header `r,u,dudr` in full double precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# n={} epsilon={} m={}",
            self.params.n(),
            self.params.ambient.epsilon().as_i32(),
            self.params.m
        )?;
        writeln!(w, "r,u,dudr")?;
        for row in &self.rows {
            writeln!(w, "{},{},{}", row.r, row.u, row.dudr)?;
        }
        Ok(())
    }
}

/// Graph slope of the embedding. The defining relation
/// `rho^2 (du/dr)^2 = 1/rho_m^2 - 1/rho^2` collapses to the closed form
/// `du/dr = sqrt(2m / f(r)) / rho(r)^2`, which is evaluated through the
/// factorization `f(r) = (r - r_h) g(r)` to stay accurate near the horizon.
fn embedding_slope(r: f64, r_h: f64, params: &KottlerParams) -> f64 {
    let f = (r - r_h) * f_factor(r, r_h, params);
    if f <= 0.0 {
        return f64::INFINITY;
    }
    let rho2 = r * r + params.eps();
    (2.0 * params.m / f).sqrt() / rho2
}

/// Integrate the embedding ODE from `u(r_h) = 0` out to `r_max`, reporting
/// rows every `step` in `r`.
///
/// The slope has an inverse-square-root singularity at the horizon; in the
/// variable `x = sqrt(r - r_h)` the integrand
/// `du/dx = 2 sqrt(2m / g(r_h + x^2)) / rho(r_h + x^2)^2`
/// is smooth down to `x = 0`, so the height is accumulated by composite
/// Simpson quadrature in `x`. `m = 0` yields the trivial profile `u = 0`.
pub fn embedding_profile(
    params: &KottlerParams,
    r_max: f64,
    step: f64,
) -> Result<EmbeddingProfile> {
    if params.m < 0.0 {
        return Err(Error::InvalidParameter(
            "embedding profiles are only defined for m >= 0".into(),
        ));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step = {step} must be positive"
        )));
    }

    if params.m == 0.0 {
        let r_start = match params.ambient.epsilon() {
            Epsilon::Flat => step,
            Epsilon::Hyperbolic => 1.0,
        };
        if r_max <= r_start {
            return Err(Error::InvalidParameter(format!(
                "r_max = {r_max} must exceed {r_start}"
            )));
        }
        let mut rows = Vec::new();
        let mut r = r_start;
        while r < r_max + step * 0.5 {
            rows.push(ProfileRow {
                r: r.min(r_max),
                u: 0.0,
                dudr: 0.0,
            });
            r += step;
        }
        return Ok(EmbeddingProfile {
            params: params.clone(),
            rows,
        });
    }

    let r_h = horizon_radius(params)?;
    if r_max <= r_h {
        return Err(Error::InvalidParameter(format!(
            "r_max = {r_max} must exceed the horizon {r_h}"
        )));
    }

    // du/dx as a smooth function of x = sqrt(r - r_h).
    let du_dx = |x: f64| {
        let r = r_h + x * x;
        let g = f_factor(r, r_h, params);
        let rho2 = r * r + params.eps();
        2.0 * (2.0 * params.m / g).sqrt() / rho2
    };

    let mut radii: Vec<f64> = Vec::new();
    let mut r = r_h;
    while r < r_max - 1e-12 * r_max {
        radii.push(r);
        r += step;
    }
    radii.push(r_max);

    let mut rows = Vec::with_capacity(radii.len());
    rows.push(ProfileRow {
        r: r_h,
        u: 0.0,
        dudr: f64::INFINITY,
    });

    let mut u = 0.0;
    let mut x_prev = 0.0;
    for &ri in radii.iter().skip(1) {
        let x_next = (ri - r_h).sqrt();
        u += simpson(du_dx, x_prev, x_next, 16);
        rows.push(ProfileRow {
            r: ri,
            u,
            dudr: embedding_slope(ri, r_h, params),
        });
        x_prev = x_next;
    }

    Ok(EmbeddingProfile {
        params: params.clone(),
        rows,
    })
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1) * 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

/// Mass recovered from the flux through the horizon slice:
/// `c_n * integral of rho H` over the slice `r = r_h` with the slice mean
/// curvature `H = (n-1) rho(r_h) / r_h`. Equals `m` identically.
pub fn boundary_mass(params: &KottlerParams) -> Result<f64> {
    let r_h = horizon_radius(params)?;
    let eps = params.ambient.epsilon();
    let rho_h = rho(r_h, eps)?;
    let n = params.n() as f64;
    let area = params.ambient.theta() * r_h.powi(params.n() as i32 - 1);
    let h = (n - 1.0) * rho_h / r_h;
    Ok(params.ambient.c_n() * area * rho_h * h)
}
