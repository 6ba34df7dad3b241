//! Weighted Sobolev norms on the tensor grid and a finite-difference
//! application of the transmission operator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::RadialFunction;
use crate::domain::Side;
use crate::error::{Error, Result};
use crate::quadrature::derivatives;

/// `||v||^2 = sum_{|alpha| <= s} || r^{|alpha| - s + gamma} d^alpha v ||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSpec {
    pub s: u32,
    pub gamma: f64,
}

fn complex_derivatives(grid: &[f64], values: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let re: Vec<f64> = values.iter().map(|v| v.re).collect();
    let im: Vec<f64> = values.iter().map(|v| v.im).collect();
    let (r1, r2) = derivatives(grid, &re);
    let (i1, i2) = derivatives(grid, &im);
    let join = |a: Vec<f64>, b: Vec<f64>| a.into_iter().zip(b).map(|(x, y)| C64::new(x, y)).collect();
    (join(r1, i1), join(r2, i2))
}

/// `t`-derivatives of every column, in the layout of `v`.
fn t_derivatives(v: &RadialFunction) -> (Vec<C64>, Vec<C64>) {
    let n = v.n_theta();
    let grid = v.tgrid.nodes();
    let mut d1 = vec![C64::new(0.0, 0.0); v.values.len()];
    let mut d2 = d1.clone();
    for j in 0..n {
        let (a, b) = complex_derivatives(&grid, &v.column(j));
        for k in 0..v.tgrid.n {
            d1[k * n + j] = a[k];
            d2[k * n + j] = b[k];
        }
    }
    (d1, d2)
}

/// `theta`-derivatives within each closed sector, in the layout of `values`.
fn theta_derivatives(v: &RadialFunction, values: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let n = v.n_theta();
    let p = v.agrid.per_sector();
    let mut d1 = vec![C64::new(0.0, 0.0); values.len()];
    let mut d2 = d1.clone();
    for (idx, side) in Side::BOTH.into_iter().enumerate() {
        let grid = v.agrid.nodes(side);
        for k in 0..v.tgrid.n {
            let off = k * n + idx * p;
            let (a, b) = complex_derivatives(&grid, &values[off..off + p]);
            d1[off..off + p].copy_from_slice(&a);
            d2[off..off + p].copy_from_slice(&b);
        }
    }
    (d1, d2)
}

/// Discrete weighted norm for `s` in `0..=2`, with derivatives in polar
/// form: `r d_x = cos d_t - sin d_theta`, `r d_y = sin d_t + cos d_theta`.
pub fn weighted_norm(v: &RadialFunction, spec: WeightedNormSpec) -> Result<f64> {
    if spec.s > 2 {
        return Err(Error::Domain(format!("norm order must be 0, 1 or 2, got {}", spec.s)));
    }
    if !spec.gamma.is_finite() {
        return Err(Error::Domain(format!("weight exponent must be finite, got {}", spec.gamma)));
    }
    let n = v.n_theta();
    let thetas = v.agrid.flat_nodes();
    let wa = v.agrid.flat_weights();
    let wt = v.tgrid.weights();
    let expo = 2.0 * (spec.gamma - spec.s as f64 + 1.0);

    let (vt, vtt) = if spec.s > 0 {
        t_derivatives(v)
    } else {
        (Vec::new(), Vec::new())
    };
    let (vth, vthth) = if spec.s > 0 {
        theta_derivatives(v, &v.values)
    } else {
        (Vec::new(), Vec::new())
    };
    let vtth = if spec.s > 1 {
        theta_derivatives(v, &vt).0
    } else {
        Vec::new()
    };

    let mut total = 0.0;
    for k in 0..v.tgrid.n {
        let weight = wt[k] * (expo * v.tgrid.node(k)).exp();
        if weight == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            let i = k * n + j;
            let mut e = v.values[i].norm_sqr();
            if spec.s >= 1 {
                e += vt[i].norm_sqr() + vth[i].norm_sqr();
            }
            if spec.s >= 2 {
                let (s, c) = thetas[j].sin_cos();
                let a = vtt[i] - vt[i];
                let b = vt[i] + vthth[i];
                let m = vtth[i] - vth[i];
                let xx = c * c * a + s * s * b - 2.0 * s * c * m;
                let yy = s * s * a + c * c * b + 2.0 * s * c * m;
                let xy = s * c * (vtt[i] - 2.0 * vt[i] - vthth[i]) + (c * c - s * s) * m;
                e += xx.norm_sqr() + yy.norm_sqr() + xy.norm_sqr();
            }
            row += wa[j] * e;
        }
        total += weight * row;
    }
    if !total.is_finite() {
        return Err(Error::Domain("weighted norm is not finite".into()));
    }
    Ok(total.sqrt())
}

/// `a Delta w` by second-order finite differences, in polar form
/// `r^{-2} a (w_tt + w_thetatheta)`.
pub fn apply_operator_fd(a_plus: f64, a_minus: f64, w: &RadialFunction) -> RadialFunction {
    let n = w.n_theta();
    let p = w.agrid.per_sector();
    let (_, wtt) = t_derivatives(w);
    let (_, wthth) = theta_derivatives(w, &w.values);
    let values = (0..w.values.len())
        .map(|i| {
            let (k, j) = (i / n, i % n);
            let a = if j < p { a_minus } else { a_plus };
            a * (wtt[i] + wthth[i]) * (-2.0 * w.tgrid.node(k)).exp()
        })
        .collect();
    RadialFunction::new(w.tgrid, w.agrid, values).expect("same layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CornerConfig;
    use crate::mellin::TGrid;
    use crate::AngularGrid;
    use std::f64::consts::PI;

    fn grid(nt: usize, per: usize) -> (TGrid, AngularGrid) {
        (
            TGrid::new(-8.0, 2.0, nt).unwrap(),
            AngularGrid::new(CornerConfig::new(2.2).unwrap(), per).unwrap(),
        )
    }

    #[test]
    fn polar_second_derivatives_match_cartesian() {
        // v = x^2 y exp(-r^2): compare |r^2 D^2 v|^2 against closed forms.
        let (tg, ag) = grid(2001, 401);
        let v = RadialFunction::from_fn(tg, ag, |t, _, th| {
            let r = t.exp();
            let (x, y) = (r * th.cos(), r * th.sin());
            C64::new(x * x * y * (-r * r).exp(), 0.0)
        });
        let got = weighted_norm(&v, WeightedNormSpec { s: 2, gamma: 1.0 }).unwrap();
        // Cartesian quadrature in polar coordinates.
        let mut acc = 0.0;
        let (nr, nth) = (4000, 800);
        for i in 0..nr {
            let t = -8.0 + 10.0 * (i as f64 + 0.5) / nr as f64;
            let r = f64::exp(t);
            for j in 0..nth {
                let th = 2.0 * PI * (j as f64 + 0.5) / nth as f64;
                let (x, y) = (r * th.cos(), r * th.sin());
                let e = (-r * r).exp();
                let f = x * x * y;
                let fx = 2.0 * x * y;
                let fy = x * x;
                let vx = (fx - 2.0 * x * f) * e;
                let vy = (fy - 2.0 * y * f) * e;
                let vxx = (2.0 * y - 4.0 * x * fx - 2.0 * f + 4.0 * x * x * f) * e;
                let vyy = (-4.0 * y * fy - 2.0 * f + 4.0 * y * y * f) * e;
                let vxy = (2.0 * x - 2.0 * y * fx - 2.0 * x * fy + 4.0 * x * y * f) * e;
                let w2 = r.powi(2);
                let dens = (f * e).powi(2) * r.powi(-2)
                    + (vx * vx + vy * vy)
                    + w2 * (vxx * vxx + vyy * vyy + vxy * vxy);
                // r^{2 (|alpha| - s + gamma)} with s = 2, gamma = 1, times r^2 dt.
                acc += dens * w2 * (10.0 / nr as f64) * (2.0 * PI / nth as f64);
            }
        }
        let want = acc.sqrt();
        assert!((got - want).abs() < 2e-4 * want, "{got} vs {want}");
    }

    #[test]
    fn zeroth_order_matches_closed_form() {
        // int exp(2 t) exp(-2 t^2) dt * 2 pi with gamma = 0.
        let tg = TGrid::new(-8.0, 8.0, 4001).unwrap();
        let ag = AngularGrid::new(CornerConfig::new(2.2).unwrap(), 65).unwrap();
        let v = RadialFunction::from_fn(tg, ag, |t, _, _| C64::new((-t * t).exp(), 0.0));
        let got = weighted_norm(&v, WeightedNormSpec { s: 0, gamma: 0.0 }).unwrap();
        let want = (2.0 * PI * (PI / 2.0).sqrt() * (0.5f64).exp()).sqrt();
        assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn operator_fd_is_second_order() {
        let mut errs = Vec::new();
        for (nt, per) in [(201, 33), (401, 65)] {
            let (tg, ag) = grid(nt, per);
            let w = RadialFunction::from_fn(tg, ag, |t, _, th| {
                C64::new((-(t + 3.0).powi(2)).exp() * (2.0 * th).cos(), 0.0)
            });
            let got = apply_operator_fd(1.0, -3.0, &w);
            let mut err = 0.0f64;
            for k in (0..nt).step_by((nt - 1) / 20) {
                let t = tg.node(k);
                let g = (-(t + 3.0).powi(2)).exp();
                let gtt = (4.0 * (t + 3.0).powi(2) - 2.0) * g;
                for (j, th) in ag.flat_nodes().into_iter().enumerate() {
                    let a = if j < per { -3.0 } else { 1.0 };
                    let want = a * (gtt - 4.0 * g) * (2.0 * th).cos() * (-2.0 * t).exp();
                    err = err.max((got.at(k, j).re - want).abs() * (2.0 * t).exp());
                }
            }
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }

    #[test]
    fn rejects_high_order() {
        let (tg, ag) = grid(16, 8);
        let v = RadialFunction::zeros(tg, ag);
        assert!(weighted_norm(&v, WeightedNormSpec { s: 3, gamma: 0.0 }).is_err());
    }
}
