//! Mellin transform along vertical lines, weighted norms, line inversion of
//! the corner problem and residue extraction.
//!
//! Radial data lives on a uniform grid in `t = log r`; angular data on an
//! [`AngularGrid`]. With `v̂(lambda) = int r^{-lambda} v dr/r` the transform
//! on `Re lambda = xi` is the Fourier transform in `t` of `exp(-xi t) v`.

pub mod io;
pub mod norms;
pub mod pipeline;
pub mod residue;
pub mod transform;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{AngularGrid, AngularSamples};
use crate::domain::Side;
use crate::error::{Error, Result};
use crate::quadrature::{trapezoid_weights, uniform_node};

pub use norms::{apply_operator_fd, weighted_norm, WeightedNormSpec};
pub use pipeline::{check_line, invert_on_line, LineOptions};
pub use residue::{singular_coefficient, ResidueOptions, SingularCoefficient};
pub use transform::{mellin_forward, mellin_inverse, transform_at};

/// Uniform grid in `t = log r`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl TGrid {
    pub const DEFAULT: TGrid = TGrid {
        t_min: -12.0,
        t_max: 6.0,
        n: 4096,
    };

    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite()) || t_min >= t_max {
            return Err(Error::Domain(format!("t-range [{t_min}, {t_max}] is empty")));
        }
        if n < 8 {
            return Err(Error::Resolution(format!("t-grid needs at least 8 nodes, got {n}")));
        }
        Ok(Self { t_min, t_max, n })
    }

    pub fn node(&self, k: usize) -> f64 {
        uniform_node(self.t_min, self.t_max, self.n, k)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n, self.spacing())
    }
}

impl Default for TGrid {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Symmetric uniform grid on `[-eta_max, eta_max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaGrid {
    pub eta_max: f64,
    pub n: usize,
}

impl EtaGrid {
    pub const DEFAULT: EtaGrid = EtaGrid {
        eta_max: 128.0,
        n: 4096,
    };

    pub fn new(eta_max: f64, n: usize) -> Result<Self> {
        if !(eta_max.is_finite() && eta_max > 0.0) {
            return Err(Error::Domain(format!("eta_max must be positive, got {eta_max}")));
        }
        if n < 8 {
            return Err(Error::Resolution(format!("eta grid needs at least 8 nodes, got {n}")));
        }
        Ok(Self { eta_max, n })
    }

    /// Exactly antisymmetric: `node(m) = -node(n-1-m)`.
    pub fn node(&self, m: usize) -> f64 {
        let num = 2.0 * m as f64 - (self.n - 1) as f64;
        self.eta_max * num / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.node(m)).collect()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.eta_max / (self.n - 1) as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n, self.spacing())
    }
}

impl Default for EtaGrid {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Samples on the tensor grid, `t`-major: `values[k * n_theta + j]` with `j`
/// the flat angular index (minus nodes first).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub tgrid: TGrid,
    pub agrid: AngularGrid,
    pub values: Vec<Complex64>,
    /// The first and last `t`-rows vanish identically.
    pub compact: bool,
}

impl RadialFunction {
    pub fn new(tgrid: TGrid, agrid: AngularGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != tgrid.n * agrid.total() {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                tgrid.n * agrid.total(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("radial samples must be finite".into()));
        }
        let m = agrid.total();
        let zero = |row: &[Complex64]| row.iter().all(|v| v.norm() == 0.0);
        let compact = zero(&values[..m]) && zero(&values[values.len() - m..]);
        Ok(Self {
            tgrid,
            agrid,
            values,
            compact,
        })
    }

    pub fn zeros(tgrid: TGrid, agrid: AngularGrid) -> Self {
        Self {
            tgrid,
            agrid,
            values: vec![Complex64::new(0.0, 0.0); tgrid.n * agrid.total()],
            compact: true,
        }
    }

    pub fn from_fn(
        tgrid: TGrid,
        agrid: AngularGrid,
        f: impl Fn(f64, Side, f64) -> Complex64 + Sync,
    ) -> Self {
        let thetas: Vec<(Side, f64)> = Side::BOTH
            .iter()
            .flat_map(|s| agrid.nodes(*s).into_iter().map(move |t| (*s, t)))
            .collect();
        let mut values = Vec::with_capacity(tgrid.n * thetas.len());
        for k in 0..tgrid.n {
            let t = tgrid.node(k);
            values.extend(thetas.iter().map(|(s, th)| f(t, *s, *th)));
        }
        let m = agrid.total();
        let zero = |row: &[Complex64]| row.iter().all(|v| v.norm() == 0.0);
        let compact = zero(&values[..m]) && zero(&values[values.len() - m..]);
        Self {
            tgrid,
            agrid,
            values,
            compact,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.agrid.total()
    }

    pub fn at(&self, k: usize, j: usize) -> Complex64 {
        self.values[k * self.n_theta() + j]
    }

    /// The `t`-profile at flat angular index `j`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.tgrid.n).map(|k| self.at(k, j)).collect()
    }

    /// Angular samples at `t`-index `k`.
    pub fn row(&self, k: usize) -> AngularSamples {
        let m = self.n_theta();
        AngularSamples::from_flat(self.agrid, &self.values[k * m..(k + 1) * m])
    }

    /// Pointwise map over `(t, value)`.
    pub fn map_t(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let m = self.n_theta();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| f(self.tgrid.node(i / m), *v))
            .collect::<Vec<_>>();
        Self::new(self.tgrid, self.agrid, values).expect("map preserves the layout")
    }

    pub fn sub(&self, other: &RadialFunction) -> Result<Self> {
        if self.tgrid != other.tgrid || self.agrid != other.agrid {
            return Err(Error::Domain("radial functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::new(self.tgrid, self.agrid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Values `V(xi + i eta, theta)` on an [`EtaGrid`], `eta`-major, together
/// with the radial grid they pair with under inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinLineData {
    pub xi: f64,
    pub eta: EtaGrid,
    pub agrid: AngularGrid,
    pub tgrid: TGrid,
    pub values: Vec<Complex64>,
}

impl MellinLineData {
    pub fn zeros(xi: f64, eta: EtaGrid, agrid: AngularGrid, tgrid: TGrid) -> Self {
        Self {
            xi,
            eta,
            agrid,
            tgrid,
            values: vec![Complex64::new(0.0, 0.0); eta.n * agrid.total()],
        }
    }

    pub fn at(&self, m: usize, j: usize) -> Complex64 {
        self.values[m * self.agrid.total() + j]
    }

    pub fn row(&self, m: usize) -> AngularSamples {
        let n = self.agrid.total();
        AngularSamples::from_flat(self.agrid, &self.values[m * n..(m + 1) * n])
    }

    pub fn lambda(&self, m: usize) -> Complex64 {
        Complex64::new(self.xi, self.eta.node(m))
    }

    /// `(1/2 pi) int ||V(xi + i eta)||^2_{L^2(G)} d eta`.
    pub fn energy(&self) -> f64 {
        let wa = self.agrid.flat_weights();
        let we = self.eta.weights();
        let n = self.agrid.total();
        let mut acc = 0.0;
        for (m, w) in we.iter().enumerate() {
            let row: f64 = (0..n).map(|j| wa[j] * self.values[m * n + j].norm_sqr()).sum();
            acc += w * row;
        }
        acc / (2.0 * std::f64::consts::PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CornerConfig;

    #[test]
    fn eta_grid_is_antisymmetric() {
        let g = EtaGrid::DEFAULT;
        for m in [0, 1, 100, 2047] {
            assert_eq!(g.node(m), -g.node(g.n - 1 - m));
        }
        assert_eq!(g.node(0), -128.0);
        assert_eq!(g.node(g.n - 1), 128.0);
    }

    #[test]
    fn layout_and_compact_flag() {
        let tg = TGrid::new(-1.0, 1.0, 9).unwrap();
        let ag = AngularGrid::new(CornerConfig::right_angle(), 4).unwrap();
        let f = RadialFunction::from_fn(tg, ag, |t, _, th| Complex64::new(t, th));
        assert_eq!(f.at(3, 5), Complex64::new(tg.node(3), ag.node(Side::Plus, 1)));
        assert!(!f.compact);
        let g = RadialFunction::from_fn(tg, ag, |t, _, _| Complex64::new(1.0 - t * t, 0.0));
        assert!(g.compact);
        assert_eq!(g.column(2).len(), 9);
    }
}
