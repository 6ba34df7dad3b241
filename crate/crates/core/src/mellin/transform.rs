//! Forward and inverse transforms on a vertical line by chirp-z (Bluestein)
//! convolution, and direct quadrature at isolated complex points.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{EtaGrid, MellinLineData, RadialFunction};
use crate::angular::AngularSamples;
use crate::error::{Error, Result};

/// `y_m = sum_k x_k exp(-i beta m k)` for `m < n_out`.
pub struct Czt {
    n_in: usize,
    n_out: usize,
    len: usize,
    chirp_in: Vec<C64>,
    chirp_out: Vec<C64>,
    kernel: Vec<C64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

fn chirp(beta: f64, j: usize) -> C64 {
    let jj = (j as u64 * j as u64) as f64;
    C64::from_polar(1.0, (0.5 * beta * jj) % (2.0 * PI))
}

impl Czt {
    pub fn new(n_in: usize, n_out: usize, beta: f64) -> Self {
        let len = (n_in + n_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(len);
        let ifft = planner.plan_fft_inverse(len);
        let chirp_in: Vec<C64> = (0..n_in).map(|k| chirp(beta, k).conj()).collect();
        let chirp_out: Vec<C64> = (0..n_out).map(|m| chirp(beta, m).conj()).collect();
        let mut kernel = vec![C64::new(0.0, 0.0); len];
        for (j, slot) in kernel.iter_mut().enumerate().take(n_out) {
            *slot = chirp(beta, j);
        }
        for j in 1..n_in {
            kernel[len - j] = chirp(beta, j);
        }
        fft.process(&mut kernel);
        Self {
            n_in,
            n_out,
            len,
            chirp_in,
            chirp_out,
            kernel,
            fft,
            ifft,
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n_in);
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        for (k, v) in x.iter().enumerate() {
            buf[k] = v * self.chirp_in[k];
        }
        self.fft.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        (0..self.n_out)
            .map(|m| buf[m] * self.chirp_out[m] * scale)
            .collect()
    }
}

fn check_integrable(v: &RadialFunction, xi: f64) -> Result<()> {
    if v.compact {
        return Ok(());
    }
    let n = v.n_theta();
    let weighted = |k: usize| {
        let w = (-xi * v.tgrid.node(k)).exp();
        (0..n).map(|j| w * v.at(k, j).norm()).fold(0.0, f64::max)
    };
    let peak = (0..v.tgrid.n).map(weighted).fold(0.0, f64::max);
    let ends = weighted(0).max(weighted(v.tgrid.n - 1));
    if !peak.is_finite() || ends > 1e-3 * peak {
        return Err(Error::Domain(format!(
            "data weighted by exp(-xi t), xi = {xi}, is not small at the ends of the t-grid ({ends:.3e} vs peak {peak:.3e})"
        )));
    }
    Ok(())
}

/// `V(xi + i eta) = int exp(-(xi + i eta) t) v(t) dt` on every node of `eta`.
pub fn mellin_forward(v: &RadialFunction, xi: f64, eta: EtaGrid) -> Result<MellinLineData> {
    if !xi.is_finite() {
        return Err(Error::Domain(format!("line abscissa must be finite, got {xi}")));
    }
    check_integrable(v, xi)?;
    let tg = v.tgrid;
    let (dt, t0, eta0) = (tg.spacing(), tg.t_min, eta.node(0));
    let czt = Czt::new(tg.n, eta.n, eta.spacing() * dt);
    let wt = tg.weights();
    let pre: Vec<C64> = (0..tg.n)
        .map(|k| {
            let t = tg.node(k);
            wt[k] * (-xi * t).exp() * C64::from_polar(1.0, -eta0 * (k as f64 * dt))
        })
        .collect();
    let post: Vec<C64> = (0..eta.n)
        .map(|m| C64::from_polar(1.0, -eta.node(m) * t0))
        .collect();
    let n = v.n_theta();
    let columns: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let x: Vec<C64> = (0..tg.n).map(|k| pre[k] * v.at(k, j)).collect();
            let y = czt.apply(&x);
            y.into_iter().zip(&post).map(|(a, b)| a * b).collect()
        })
        .collect();
    let mut out = MellinLineData::zeros(xi, eta, v.agrid, tg);
    for (j, col) in columns.iter().enumerate() {
        for (m, val) in col.iter().enumerate() {
            out.values[m * n + j] = *val;
        }
    }
    Ok(out)
}

/// `v(t) = (1/2 pi) int exp((xi + i eta) t) V(xi + i eta) d eta`, on the
/// radial grid carried by `data`.
pub fn mellin_inverse(data: &MellinLineData) -> Result<RadialFunction> {
    let (tg, eta) = (data.tgrid, data.eta);
    let (dt, t0, eta0, de) = (tg.spacing(), tg.t_min, eta.node(0), eta.spacing());
    let czt = Czt::new(eta.n, tg.n, -de * dt);
    let we = eta.weights();
    let pre: Vec<C64> = (0..eta.n)
        .map(|m| we[m] * C64::from_polar(1.0, (m as f64 * de) * t0))
        .collect();
    let post: Vec<C64> = (0..tg.n)
        .map(|k| {
            let t = tg.node(k);
            (data.xi * t).exp() * C64::from_polar(1.0, eta0 * t) / (2.0 * PI)
        })
        .collect();
    let n = data.agrid.total();
    let columns: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let x: Vec<C64> = (0..eta.n).map(|m| pre[m] * data.at(m, j)).collect();
            let y = czt.apply(&x);
            y.into_iter().zip(&post).map(|(a, b)| a * b).collect()
        })
        .collect();
    let mut values = vec![C64::new(0.0, 0.0); tg.n * n];
    for (j, col) in columns.iter().enumerate() {
        for (k, val) in col.iter().enumerate() {
            values[k * n + j] = *val;
        }
    }
    RadialFunction::new(tg, data.agrid, values)
}

/// The transform at a single complex `lambda`, by trapezoidal quadrature.
pub fn transform_at(v: &RadialFunction, lambda: C64) -> AngularSamples {
    let tg = v.tgrid;
    let wt = tg.weights();
    let n = v.n_theta();
    let mut acc = vec![C64::new(0.0, 0.0); n];
    for (k, w) in wt.iter().enumerate() {
        let e = w * (-lambda * tg.node(k)).exp();
        if e == C64::new(0.0, 0.0) {
            continue;
        }
        let row = &v.values[k * n..(k + 1) * n];
        for (a, x) in acc.iter_mut().zip(row) {
            *a += e * x;
        }
    }
    AngularSamples::from_flat(v.agrid, &acc)
}
