//! Angular grids, sampled angular data and piecewise-trigonometric functions
//! on the circle split into `G-` and `G+`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{CornerConfig, Side};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_on, hermite_basis, trapezoid_weights, uniform_node};

/// Uniform nodes on each closed sector; the interface rays appear once per
/// sector, so `theta = omega` is sampled twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularGrid {
    corner: CornerConfig,
    per_sector: usize,
}

impl AngularGrid {
    pub const DEFAULT_PER_SECTOR: usize = 64;

    pub fn new(corner: CornerConfig, per_sector: usize) -> Result<Self> {
        if per_sector < 4 {
            return Err(Error::Resolution(format!(
                "angular grid needs at least 4 nodes per sector, got {per_sector}"
            )));
        }
        Ok(Self { corner, per_sector })
    }

    pub fn corner(&self) -> CornerConfig {
        self.corner
    }

    pub fn per_sector(&self) -> usize {
        self.per_sector
    }

    pub fn total(&self) -> usize {
        2 * self.per_sector
    }

    pub fn spacing(&self, side: Side) -> f64 {
        let (a, b) = self.corner.sector(side);
        (b - a) / (self.per_sector - 1) as f64
    }

    pub fn node(&self, side: Side, j: usize) -> f64 {
        let (a, b) = self.corner.sector(side);
        uniform_node(a, b, self.per_sector, j)
    }

    pub fn nodes(&self, side: Side) -> Vec<f64> {
        (0..self.per_sector).map(|j| self.node(side, j)).collect()
    }

    /// Flat index of node `j` of `side` (minus nodes first).
    pub fn flat_index(&self, side: Side, j: usize) -> usize {
        match side {
            Side::Minus => j,
            Side::Plus => self.per_sector + j,
        }
    }

    /// All nodes in flat order.
    pub fn flat_nodes(&self) -> Vec<f64> {
        let mut v = self.nodes(Side::Minus);
        v.extend(self.nodes(Side::Plus));
        v
    }

    /// Trapezoid weights in flat order (each sector integrated separately).
    pub fn flat_weights(&self) -> Vec<f64> {
        let mut w = trapezoid_weights(self.per_sector, self.spacing(Side::Minus));
        w.extend(trapezoid_weights(self.per_sector, self.spacing(Side::Plus)));
        w
    }
}

/// Complex samples on an [`AngularGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSamples {
    pub grid: AngularGrid,
    pub minus: Vec<Complex64>,
    pub plus: Vec<Complex64>,
}

impl AngularSamples {
    pub fn zeros(grid: AngularGrid) -> Self {
        let n = grid.per_sector();
        Self {
            grid,
            minus: vec![Complex64::new(0.0, 0.0); n],
            plus: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_fn(grid: AngularGrid, mut f: impl FnMut(Side, f64) -> Complex64) -> Self {
        let minus = grid.nodes(Side::Minus).into_iter().map(|t| f(Side::Minus, t)).collect();
        let plus = grid.nodes(Side::Plus).into_iter().map(|t| f(Side::Plus, t)).collect();
        Self { grid, minus, plus }
    }

    /// Builds samples from a flat slice (minus nodes first).
    pub fn from_flat(grid: AngularGrid, flat: &[Complex64]) -> Self {
        let n = grid.per_sector();
        Self {
            grid,
            minus: flat[..n].to_vec(),
            plus: flat[n..2 * n].to_vec(),
        }
    }

    pub fn side(&self, side: Side) -> &[Complex64] {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<Complex64> {
        match side {
            Side::Minus => &mut self.minus,
            Side::Plus => &mut self.plus,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.flat_weights();
        self.minus
            .iter()
            .chain(&self.plus)
            .zip(w)
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Piecewise solution of `(lambda^2 + d^2/dtheta^2) W = f` sampled on a grid,
/// with nodal derivatives for Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticularPart {
    pub grid: AngularGrid,
    pub values: AngularSamples,
    pub derivatives: AngularSamples,
}

impl ParticularPart {
    fn eval(&self, side: Side, theta: f64) -> (Complex64, Complex64) {
        let n = self.grid.per_sector();
        let h = self.grid.spacing(side);
        let (a, _) = self.grid.corner().sector(side);
        let x = ((theta - a) / h).clamp(0.0, (n - 1) as f64);
        let j = (x.floor() as usize).min(n - 2);
        let s = x - j as f64;
        let (b, db) = hermite_basis(s);
        let v = self.values.side(side);
        let d = self.derivatives.side(side);
        let value = v[j] * b[0] + d[j] * (h * b[1]) + v[j + 1] * b[2] + d[j + 1] * (h * b[3]);
        let deriv =
            (v[j] * db[0] + d[j] * (h * db[1]) + v[j + 1] * db[2] + d[j + 1] * (h * db[3])) / h;
        (value, deriv)
    }
}

/// `W(theta) = alpha cos(lambda theta) + beta sin(lambda theta)` on each
/// sector, plus an optional sampled particular part. At `lambda = 0` the
/// homogeneous pair is `{1, theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFunction {
    lambda: Complex64,
    corner: CornerConfig,
    coeffs_minus: [Complex64; 2],
    coeffs_plus: [Complex64; 2],
    particular: Option<ParticularPart>,
}

impl AngularFunction {
    pub fn homogeneous(
        lambda: Complex64,
        corner: CornerConfig,
        coeffs_minus: [Complex64; 2],
        coeffs_plus: [Complex64; 2],
    ) -> Self {
        Self {
            lambda,
            corner,
            coeffs_minus,
            coeffs_plus,
            particular: None,
        }
    }

    pub fn with_particular(mut self, particular: ParticularPart) -> Self {
        self.particular = Some(particular);
        self
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn corner(&self) -> CornerConfig {
        self.corner
    }

    pub fn coeffs(&self, side: Side) -> [Complex64; 2] {
        match side {
            Side::Minus => self.coeffs_minus,
            Side::Plus => self.coeffs_plus,
        }
    }

    pub fn particular(&self) -> Option<&ParticularPart> {
        self.particular.as_ref()
    }

    fn basis(&self, theta: f64) -> ([Complex64; 2], [Complex64; 2]) {
        let one = Complex64::new(1.0, 0.0);
        if self.lambda == Complex64::new(0.0, 0.0) {
            return (
                [one, Complex64::new(theta, 0.0)],
                [Complex64::new(0.0, 0.0), one],
            );
        }
        let z = self.lambda * theta;
        let (c, s) = (z.cos(), z.sin());
        ([c, s], [-self.lambda * s, self.lambda * c])
    }

    /// Value and derivative on the closed sector `side`.
    pub fn eval_with_derivative(&self, side: Side, theta: f64) -> (Complex64, Complex64) {
        let [alpha, beta] = self.coeffs(side);
        let ([u, v], [du, dv]) = self.basis(theta);
        let mut value = alpha * u + beta * v;
        let mut deriv = alpha * du + beta * dv;
        if let Some(p) = &self.particular {
            let (pv, pd) = p.eval(side, theta);
            value += pv;
            deriv += pd;
        }
        (value, deriv)
    }

    pub fn eval_on(&self, side: Side, theta: f64) -> Complex64 {
        self.eval_with_derivative(side, theta).0
    }

    pub fn derivative_on(&self, side: Side, theta: f64) -> Complex64 {
        self.eval_with_derivative(side, theta).1
    }

    /// Value at `theta` (mod 2 pi), choosing the sector by position.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let side = self.corner.side_of(theta);
        let t = theta.rem_euclid(crate::domain::TWO_PI);
        // 2 pi maps back to 0 under rem_euclid; keep the plus-sector endpoint.
        let t = if side == Side::Minus && t == 0.0 && theta > 0.0 {
            return self.eval_on(Side::Plus, crate::domain::TWO_PI);
        } else {
            t
        };
        self.eval_on(side, t)
    }

    pub fn sample(&self, grid: AngularGrid) -> AngularSamples {
        AngularSamples::from_fn(grid, |side, t| self.eval_on(side, t))
    }

    /// `L^2(G)` inner product `<self, other>` (conjugate-linear in `other`).
    pub fn inner(&self, other: &AngularFunction) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for side in Side::BOTH {
            let (a, b) = self.corner.sector(side);
            let (x, w) = gauss_legendre_on(64, a, b);
            for (t, wt) in x.iter().zip(&w) {
                acc += self.eval_on(side, *t) * other.eval_on(side, *t).conj() * *wt;
            }
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs_minus = [self.coeffs_minus[0] * factor, self.coeffs_minus[1] * factor];
        out.coeffs_plus = [self.coeffs_plus[0] * factor, self.coeffs_plus[1] * factor];
        if let Some(p) = &mut out.particular {
            for s in [&mut p.values, &mut p.derivatives] {
                s.minus.iter_mut().chain(s.plus.iter_mut()).for_each(|v| *v *= factor);
            }
        }
        out
    }

    /// `self - factor * other`, for homogeneous functions at the same `lambda`.
    pub(crate) fn minus_scaled(&self, other: &AngularFunction, factor: Complex64) -> Self {
        debug_assert!(self.particular.is_none() && other.particular.is_none());
        let mut out = self.clone();
        for k in 0..2 {
            out.coeffs_minus[k] -= factor * other.coeffs_minus[k];
            out.coeffs_plus[k] -= factor * other.coeffs_plus[k];
        }
        out
    }

    /// Constant on the whole circle (`lambda = 0`, no `theta` term, equal levels).
    pub fn is_constant(&self, tol: f64) -> bool {
        if self.particular.is_some() || self.lambda.norm() > tol {
            return false;
        }
        let [am, bm] = self.coeffs_minus;
        let [ap, bp] = self.coeffs_plus;
        let scale = am.norm().max(ap.norm()).max(f64::MIN_POSITIVE);
        bm.norm() <= tol * scale && bp.norm() <= tol * scale && (am - ap).norm() <= tol * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_layout() {
        let g = AngularGrid::new(CornerConfig::right_angle(), 5).unwrap();
        assert_eq!(g.node(Side::Minus, 0), 0.0);
        assert_eq!(g.node(Side::Minus, 4), FRAC_PI_2);
        assert_eq!(g.node(Side::Plus, 0), FRAC_PI_2);
        assert_eq!(g.node(Side::Plus, 4), 2.0 * PI);
        assert_eq!(g.flat_index(Side::Plus, 2), 7);
        let total: f64 = g.flat_weights().iter().sum();
        assert!((total - 2.0 * PI).abs() < 1e-14);
        assert!(AngularGrid::new(CornerConfig::right_angle(), 3).is_err());
    }

    #[test]
    fn constant_function_has_expected_norm() {
        let f = AngularFunction::homogeneous(
            c(0.0),
            CornerConfig::right_angle(),
            [c(1.0), c(0.0)],
            [c(1.0), c(0.0)],
        );
        assert!((f.l2_norm() - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(f.is_constant(1e-12));
        assert_eq!(f.eval(2.0 * PI), c(1.0));
    }

    #[test]
    fn trig_evaluation_and_derivative() {
        let lam = Complex64::new(0.7, 0.2);
        let f = AngularFunction::homogeneous(
            lam,
            CornerConfig::right_angle(),
            [c(1.0), c(2.0)],
            [c(-1.0), c(0.5)],
        );
        let t = 3.0;
        let h = 1e-6;
        let fd = (f.eval_on(Side::Plus, t + h) - f.eval_on(Side::Plus, t - h)) / (2.0 * h);
        assert!((fd - f.derivative_on(Side::Plus, t)).norm() < 1e-8);
        let expect = -(lam * t).cos() + 0.5 * (lam * t).sin();
        assert!((f.eval(t) - expect).norm() < 1e-14);
    }
}
