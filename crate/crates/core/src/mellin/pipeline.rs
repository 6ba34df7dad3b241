//! Solution of `a Delta w = g` in the weighted space of exponent `gamma` by
//! inverting the symbol on the line `Re lambda = 1 - gamma`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::transform::{mellin_forward, mellin_inverse};
use super::{EtaGrid, MellinLineData, RadialFunction};
use crate::domain::{CornerConfig, MaterialPair};
use crate::error::{Error, Result};
use crate::spectrum::{find_spectrum, imaginary_bound, Band};
use crate::symbol::SymbolSolver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineOptions {
    pub eta: EtaGrid,
    /// Half-width of the strip searched for spectrum around the line.
    pub guard: f64,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self {
            eta: EtaGrid::DEFAULT,
            guard: 0.01,
        }
    }
}

/// Fails with [`Error::SpectrumOnLine`] if a zero of the determinant lies
/// within `guard` of `Re lambda = xi`, up to height `eta_max`.
pub fn check_line(mu: f64, omega: f64, xi: f64, eta_max: f64, guard: f64) -> Result<()> {
    let band = Band::new(xi - guard, xi + guard, eta_max)?;
    let report = find_spectrum(mu, omega, band)?;
    if report.roots.is_empty() {
        Ok(())
    } else {
        Err(Error::SpectrumOnLine {
            xi,
            roots: report.roots.iter().map(|r| r.lambda).collect(),
        })
    }
}

/// Middle of the zero-free vertical strip around `Re lambda = xi`, looking
/// at most `STRIP_REACH` to either side.
pub fn strip_center(mu: f64, omega: f64, xi: f64) -> Result<f64> {
    let band = Band::new(xi - STRIP_REACH, xi + STRIP_REACH, imaginary_bound(mu, omega) + 1.0)?;
    let report = find_spectrum(mu, omega, band)?;
    let left = report
        .roots
        .iter()
        .map(|r| r.lambda.re)
        .filter(|re| *re < xi)
        .fold(xi - STRIP_REACH, f64::max);
    let right = report
        .roots
        .iter()
        .map(|r| r.lambda.re)
        .filter(|re| *re > xi)
        .fold(xi + STRIP_REACH, f64::min);
    Ok(0.5 * (left + right))
}

const STRIP_REACH: f64 = 1.0;

/// Solves `a Delta w = g` with `w` in the weighted space of exponent
/// `gamma`: `w = M^{-1}[ L(lambda)^{-1} (r^2 g)^ ]` on `Re lambda = 1 - gamma`.
pub fn invert_on_line(
    materials: &MaterialPair,
    corner: CornerConfig,
    g: &RadialFunction,
    gamma: f64,
    options: &LineOptions,
) -> Result<RadialFunction> {
    if g.agrid.corner() != corner {
        return Err(Error::Domain("data grid and corner disagree".into()));
    }
    let xi = 1.0 - gamma;
    check_line(materials.mu(), corner.omega(), xi, options.eta.eta_max, options.guard)?;
    let q = g.map_t(|t, v| v * (2.0 * t).exp());
    // Any line of the same zero-free strip yields the same solution; its
    // middle keeps the integrand away from the poles, which limits aliasing
    // of the sampled inverse.
    let line = if q.compact {
        strip_center(materials.mu(), corner.omega(), xi)?
    } else {
        xi
    };
    let data = mellin_forward(&q, line, options.eta)?;
    let solved = solve_line(materials, &data)?;
    mellin_inverse(&solved)
}

/// Applies `L(lambda)^{-1}` at every node of the line.
pub fn solve_line(materials: &MaterialPair, data: &MellinLineData) -> Result<MellinLineData> {
    let solver = SymbolSolver::new(*materials, data.agrid);
    let rows: Vec<Vec<C64>> = (0..data.eta.n)
        .into_par_iter()
        .map(|m| solver.solve_samples(data.lambda(m), &data.row(m)))
        .collect::<Result<_>>()?;
    let mut out = data.clone();
    out.values = rows.into_iter().flatten().collect();
    Ok(out)
}
