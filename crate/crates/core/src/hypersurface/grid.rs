//! Periodic finite-difference grid on the flat unit torus `[0, 2*pi)^dim`.
//!
//! The cross-section metric is the identity, so covariant derivatives are
//! plain coordinate derivatives and the quadrature weight of every node is
//! `(2*pi/M)^dim`. All stencils are 2nd-order central differences; index
//! arithmetic wraps in every axis.

use crate::error::{Error, Result};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossSectionGrid {
    dim: usize,
    m: usize,
    strides: Vec<usize>,
    len: usize,
}

impl CrossSectionGrid {
    /// `dim` axes with `m` points per axis; `m` must be even and at least 8.
    pub fn new(dim: usize, m: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be >= 1".into()));
        }
        if m < 8 || m % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be even and >= 8, got {m}"
            )));
        }
        let mut strides = Vec::with_capacity(dim);
        let mut len = 1usize;
        for _ in 0..dim {
            strides.push(len);
            len = len
                .checked_mul(m)
                .ok_or_else(|| Error::InvalidParameter("grid too large".into()))?;
        }
        Ok(CrossSectionGrid {
            dim,
            m,
            strides,
            len,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.m as f64
    }

    /// Quadrature weight of a node (periodic trapezoidal rule).
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Angles of the node with flat index `p`; axis 0 varies fastest.
    pub fn angles(&self, p: usize) -> Vec<f64> {
        let h = self.spacing();
        (0..self.dim)
            .map(|a| ((p / self.strides[a]) % self.m) as f64 * h)
            .collect()
    }

    /// Flat index of the node shifted by `off` cells along `axis`, wrapping.
    #[inline]
    pub fn neighbor(&self, p: usize, axis: usize, off: isize) -> usize {
        let stride = self.strides[axis];
        let c = (p / stride) % self.m;
        let shifted = (c as isize + off).rem_euclid(self.m as isize) as usize;
        p + shifted * stride - c * stride
    }

    /// Central first derivative along `axis`.
    pub fn d1(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let inv = 1.0 / (2.0 * self.spacing());
        (0..self.len)
            .map(|p| (f[self.neighbor(p, axis, 1)] - f[self.neighbor(p, axis, -1)]) * inv)
            .collect()
    }

    /// Central second derivative along one axis.
    pub fn d2_axis(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let inv = 1.0 / (self.spacing() * self.spacing());
        (0..self.len)
            .map(|p| {
                (f[self.neighbor(p, axis, 1)] - 2.0 * f[p] + f[self.neighbor(p, axis, -1)]) * inv
            })
            .collect()
    }

    /// Central mixed second derivative along two distinct axes.
    pub fn d2_cross(&self, f: &[f64], ai: usize, aj: usize) -> Vec<f64> {
        debug_assert_ne!(ai, aj);
        let inv = 1.0 / (4.0 * self.spacing() * self.spacing());
        (0..self.len)
            .map(|p| {
                let pp = self.neighbor(self.neighbor(p, ai, 1), aj, 1);
                let pm = self.neighbor(self.neighbor(p, ai, 1), aj, -1);
                let mp = self.neighbor(self.neighbor(p, ai, -1), aj, 1);
                let mm = self.neighbor(self.neighbor(p, ai, -1), aj, -1);
                (f[pp] - f[pm] - f[mp] + f[mm]) * inv
            })
            .collect()
    }

    /// Field translated by whole cells along `axis` (used by symmetry tests).
    pub fn translate(&self, f: &[f64], axis: usize, cells: isize) -> Vec<f64> {
        (0..self.len)
            .map(|p| f[self.neighbor(p, axis, cells)])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(CrossSectionGrid::new(2, 7).is_err());
        assert!(CrossSectionGrid::new(2, 6).is_err());
        assert!(CrossSectionGrid::new(0, 8).is_err());
        let g = CrossSectionGrid::new(2, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert!((g.cell_volume() - g.spacing() * g.spacing()).abs() < 1e-18);
    }

    #[test]
    fn neighbor_wraps() {
        let g = CrossSectionGrid::new(2, 8).unwrap();
        // node (0, 0): stepping back along axis 0 lands on (7, 0)
        assert_eq!(g.neighbor(0, 0, -1), 7);
        // node (7, 3): stepping forward along axis 0 lands on (0, 3)
        let p = 7 + 3 * 8;
        assert_eq!(g.neighbor(p, 0, 1), 3 * 8);
        assert_eq!(g.neighbor(p, 1, 1), 7 + 4 * 8);
        assert_eq!(g.neighbor(g.neighbor(p, 1, 5), 1, -5), p);
    }

    #[test]
    fn stencils_second_order_on_sin() {
        for m in [16usize, 32] {
            let g = CrossSectionGrid::new(2, m).unwrap();
            let f: Vec<f64> = (0..g.len()).map(|p| g.angles(p)[0].sin()).collect();
            let df = g.d1(&f, 0);
            let max_err = (0..g.len())
                .map(|p| (df[p] - g.angles(p)[0].cos()).abs())
                .fold(0.0f64, f64::max);
            let h = g.spacing();
            assert!(max_err < h * h / 6.0 * 1.1, "d1 error {max_err} at M = {m}");
        }
    }

    #[test]
    fn cross_derivative_exact_on_separable_product() {
        let g = CrossSectionGrid::new(2, 32).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|p| {
                let a = g.angles(p);
                a[0].sin() * a[1].sin()
            })
            .collect();
        let dxy = g.d2_cross(&f, 0, 1);
        let h = g.spacing();
        for p in 0..g.len() {
            let a = g.angles(p);
            let exact = a[0].cos() * a[1].cos();
            assert!((dxy[p] - exact).abs() < h * h * 0.4);
        }
    }
}
