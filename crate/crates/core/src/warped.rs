//! Closed-form scalar functions of the locally hyperbolic ambient space.
//!
//! The ambient metric `dr^2/rho(r)^2 + r^2 h` becomes `ds^2 + lambda(s)^2 h`
//! in the arclength coordinate `s` with `ds = dr/rho(r)`, where
//!
//! ```text
//! lambda(s) = e^s                      (epsilon = 0,  s in R)
//! lambda(s) = e^s/4 + e^{-s}           (epsilon = -1, s >= log 2)
//! ```
//!
//! The warping factor satisfies `lambda'^2 = lambda^2 + epsilon` and
//! `lambda'' = lambda`, and the static potential is `rho = lambda'`.
//! Everything here is exact closed-form evaluation; nothing is tabulated.

use crate::error::{Error, Result};
use std::f64::consts::{LN_2, PI, TAU};

/// Curvature sign of the closed cross-section `(N, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epsilon {
    /// Flat cross-section (`epsilon = 0`), realized as the unit `2*pi`-torus.
    Flat,
    /// Hyperbolic cross-section (`epsilon = -1`), e.g. a higher-genus surface.
    Hyperbolic,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Flat => 0.0,
            Epsilon::Hyperbolic => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Epsilon::Flat => 0,
            Epsilon::Hyperbolic => -1,
        }
    }

    pub fn from_i32(k: i32) -> Result<Self> {
        match k {
            0 => Ok(Epsilon::Flat),
            -1 => Ok(Epsilon::Hyperbolic),
            _ => Err(Error::InvalidParameter(format!(
                "epsilon must be 0 or -1, got {k}"
            ))),
        }
    }

    /// Lower end of the `s`-range: `-inf` for flat, `log 2` for hyperbolic.
    pub fn s_min(self) -> f64 {
        match self {
            Epsilon::Flat => f64::NEG_INFINITY,
            Epsilon::Hyperbolic => LN_2,
        }
    }

    /// Lower end of the `r`-range: `0` for flat, `1` for hyperbolic.
    pub fn r_min(self) -> f64 {
        match self {
            Epsilon::Flat => 0.0,
            Epsilon::Hyperbolic => 1.0,
        }
    }
}

/// Slack used when checking an `s` or `r` value against the boundary of its
/// domain, so that exact boundary values survive round-trips.
const DOMAIN_SLACK: f64 = 1e-12;

fn check_s(s: f64, epsilon: Epsilon) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("s = {s} is not finite")));
    }
    if epsilon == Epsilon::Hyperbolic && s < LN_2 - DOMAIN_SLACK {
        return Err(Error::Domain(format!(
            "s = {s} < log 2 is outside the hyperbolic range"
        )));
    }
    Ok(())
}

pub(crate) fn lambda_unchecked(s: f64, epsilon: Epsilon) -> f64 {
    match epsilon {
        Epsilon::Flat => s.exp(),
        Epsilon::Hyperbolic => s.exp() / 4.0 + (-s).exp(),
    }
}

pub(crate) fn lambda_dot_unchecked(s: f64, epsilon: Epsilon) -> f64 {
    match epsilon {
        Epsilon::Flat => s.exp(),
        Epsilon::Hyperbolic => s.exp() / 4.0 - (-s).exp(),
    }
}

/// Warping factor `lambda(s)`.
pub fn lambda(s: f64, epsilon: Epsilon) -> Result<f64> {
    check_s(s, epsilon)?;
    Ok(lambda_unchecked(s, epsilon))
}

/// First derivative `lambda'(s)`; equals the static potential `rho` on slices.
pub fn lambda_dot(s: f64, epsilon: Epsilon) -> Result<f64> {
    check_s(s, epsilon)?;
    Ok(lambda_dot_unchecked(s, epsilon))
}

/// Second derivative `lambda''(s) = lambda(s)`.
pub fn lambda_ddot(s: f64, epsilon: Epsilon) -> Result<f64> {
    lambda(s, epsilon)
}

/// Static potential `rho(r) = sqrt(r^2 + epsilon)` in the radial coordinate.
pub fn rho(r: f64, epsilon: Epsilon) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    let sq = r * r + epsilon.value();
    if sq < -DOMAIN_SLACK {
        return Err(Error::Domain(format!(
            "r^2 + epsilon = {sq} is negative at r = {r}"
        )));
    }
    Ok(sq.max(0.0).sqrt())
}

/// Arclength coordinate of a radius: `log r` for flat,
/// `log(2 sqrt(r^2 - 1) + 2r)` for hyperbolic.
pub fn s_from_r(r: f64, epsilon: Epsilon) -> Result<f64> {
    match epsilon {
        Epsilon::Flat => {
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::Domain(format!("r = {r} must be positive")));
            }
            Ok(r.ln())
        }
        Epsilon::Hyperbolic => {
            if !r.is_finite() || r < 1.0 - DOMAIN_SLACK {
                return Err(Error::Domain(format!(
                    "r = {r} < 1 is outside the hyperbolic range"
                )));
            }
            let q = (r * r - 1.0).max(0.0);
            Ok((2.0 * q.sqrt() + 2.0 * r).ln())
        }
    }
}

/// Radius of an arclength coordinate; inverse of [`s_from_r`].
pub fn r_from_s(s: f64, epsilon: Epsilon) -> Result<f64> {
    lambda(s, epsilon)
}

/// Parameter record for the warped-product stage: dimension, cross-section
/// curvature sign, cross-section area, and the derived mass normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientModel {
    n: usize,
    epsilon: Epsilon,
    theta: f64,
    genus: Option<u32>,
}

impl AmbientModel {
    /// General constructor. `theta` is the cross-section area; `genus` is a
    /// reporting label, only meaningful for `n = 3`.
    pub fn new(n: usize, epsilon: Epsilon, theta: f64, genus: Option<u32>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("n = {n} must be >= 3")));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} must be positive"
            )));
        }
        if let Some(g) = genus {
            if n != 3 {
                return Err(Error::InvalidParameter(
                    "genus labels are only defined for n = 3".into(),
                ));
            }
            if g < 1 {
                return Err(Error::InvalidParameter("genus must be >= 1".into()));
            }
            let expect_flat = g == 1;
            if expect_flat != (epsilon == Epsilon::Flat) {
                return Err(Error::InvalidParameter(format!(
                    "genus {g} is inconsistent with epsilon = {}",
                    epsilon.as_i32()
                )));
            }
        }
        Ok(AmbientModel {
            n,
            epsilon,
            theta,
            genus,
        })
    }

    /// Flat default: the unit `2*pi`-torus cross-section, `theta = (2*pi)^(n-1)`.
    pub fn flat_torus(n: usize) -> Result<Self> {
        Self::new(n, Epsilon::Flat, TAU.powi(n as i32 - 1), None)
    }

    /// Three-dimensional model labelled by the genus of its cross-section:
    /// `gamma >= 2` gives the hyperbolic surface with area `4*pi*(gamma - 1)`,
    /// `gamma = 1` gives the flat case with the normalization `theta = 4*pi`.
    pub fn from_genus(genus: u32) -> Result<Self> {
        match genus {
            0 => Err(Error::InvalidParameter("genus must be >= 1".into())),
            1 => Self::new(3, Epsilon::Flat, 4.0 * PI, Some(1)),
            g => Self::new(3, Epsilon::Hyperbolic, 4.0 * PI * f64::from(g - 1), Some(g)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Cross-section area `theta_(n-1)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn genus(&self) -> Option<u32> {
        self.genus
    }

    /// Mass normalization `c_n = 1 / (2 (n-1) theta)`, always derived.
    pub fn c_n(&self) -> f64 {
        1.0 / (2.0 * (self.n as f64 - 1.0) * self.theta)
    }

    /// Cross-section dimension `n - 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambda_flat_at_zero() {
        assert_eq!(lambda(0.0, Epsilon::Flat).unwrap(), 1.0);
    }

    #[test]
    fn lambda_hyperbolic_at_boundary() {
        let v = lambda(LN_2, Epsilon::Hyperbolic).unwrap();
        assert!((v - 1.0).abs() < 1e-14, "lambda(log 2) = {v}");
        // The warping factor is minimal at the boundary.
        let d = lambda_dot(LN_2, Epsilon::Hyperbolic).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn lambda_hyperbolic_rejects_below_boundary() {
        assert!(lambda(LN_2 - 1e-6, Epsilon::Hyperbolic).is_err());
    }

    #[test]
    fn warping_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let eps = if rng.gen_bool(0.5) {
                Epsilon::Flat
            } else {
                Epsilon::Hyperbolic
            };
            let s = match eps {
                Epsilon::Flat => rng.gen_range(-3.0..3.0),
                Epsilon::Hyperbolic => rng.gen_range(LN_2..LN_2 + 5.0),
            };
            let l = lambda(s, eps).unwrap();
            let ld = lambda_dot(s, eps).unwrap();
            let ldd = lambda_ddot(s, eps).unwrap();
            assert!(
                (ld * ld - l * l - eps.value()).abs() < 1e-12 * (1.0 + l * l),
                "lambda'^2 - lambda^2 - eps residual at s = {s}"
            );
            assert!((ldd - l).abs() < 1e-13 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn rho_matches_examples() {
        assert!((rho(1.0, Epsilon::Hyperbolic).unwrap()).abs() < 1e-15);
        assert!((rho(2.0, Epsilon::Hyperbolic).unwrap() - 3.0f64.sqrt()).abs() < 1e-12);
        let e = std::f64::consts::E;
        assert!((rho(e, Epsilon::Flat).unwrap() - e).abs() < 1e-12);
        assert!((lambda_dot(1.0, Epsilon::Flat).unwrap() - e).abs() < 1e-12);
        assert!(rho(0.5, Epsilon::Hyperbolic).is_err());
    }

    #[test]
    fn rho_is_lambda_dot_at_s_of_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
                let r = match eps {
                    Epsilon::Flat => rng.gen_range(0.05..50.0),
                    Epsilon::Hyperbolic => rng.gen_range(1.0..50.0),
                };
                let s = s_from_r(r, eps).unwrap();
                let ld = lambda_dot(s, eps).unwrap();
                let rh = rho(r, eps).unwrap();
                assert!(
                    (ld - rh).abs() < 1e-12 * (1.0 + rh),
                    "lambda'(s(r)) != rho(r) at r = {r}, eps = {}",
                    eps.as_i32()
                );
            }
        }
    }

    #[test]
    fn s_r_round_trip() {
        assert!((s_from_r(1.0, Epsilon::Hyperbolic).unwrap() - LN_2).abs() < 1e-15);
        let expect = (4.0 + 2.0 * 3.0f64.sqrt()).ln();
        assert!((s_from_r(2.0, Epsilon::Hyperbolic).unwrap() - expect).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            for eps in [Epsilon::Flat, Epsilon::Hyperbolic] {
                let r = match eps {
                    Epsilon::Flat => rng.gen_range(0.01..100.0),
                    Epsilon::Hyperbolic => rng.gen_range(1.0..100.0),
                };
                let back = r_from_s(s_from_r(r, eps).unwrap(), eps).unwrap();
                assert!(
                    (back - r).abs() < 1e-12 * r.max(1.0),
                    "round trip failed at r = {r}"
                );
            }
        }
    }

    #[test]
    fn ambient_model_validation() {
        assert!(AmbientModel::new(2, Epsilon::Flat, 1.0, None).is_err());
        assert!(AmbientModel::new(3, Epsilon::Flat, -1.0, None).is_err());
        assert!(AmbientModel::new(4, Epsilon::Flat, 1.0, Some(2)).is_err());
        assert!(AmbientModel::new(3, Epsilon::Flat, 1.0, Some(2)).is_err());

        let torus = AmbientModel::flat_torus(3).unwrap();
        assert!((torus.theta() - TAU * TAU).abs() < 1e-12);
        assert!((torus.c_n() - 1.0 / (4.0 * TAU * TAU)).abs() < 1e-18);

        let g2 = AmbientModel::from_genus(2).unwrap();
        assert_eq!(g2.epsilon(), Epsilon::Hyperbolic);
        assert!((g2.theta() - 4.0 * PI).abs() < 1e-12);

        let g1 = AmbientModel::from_genus(1).unwrap();
        assert_eq!(g1.epsilon(), Epsilon::Flat);
        assert!((g1.theta() - 4.0 * PI).abs() < 1e-12);
        assert!(AmbientModel::from_genus(0).is_err());
    }
}
