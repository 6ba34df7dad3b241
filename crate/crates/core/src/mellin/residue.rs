//! Coefficients of the singular terms `r^{lambda0} log^q r phi(theta)` of a
//! solution, read off from contour integrals of `L(lambda)^{-1} (r^2 g)^`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::transform::transform_at;
use super::RadialFunction;
use crate::angular::AngularFunction;
use crate::domain::{CornerConfig, MaterialPair, Side};
use crate::error::{Error, Result};
use crate::quadrature::gregory_weights;
use crate::spectrum::{find_spectrum, Band};
use crate::symbol::{closed_form_determinant, is_on_spectrum, kernel_at, SymbolSolver};

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueOptions {
    /// Contour radius; defaults to half the distance to the nearest other pole.
    pub radius: Option<f64>,
    pub nodes: usize,
    /// Relative agreement required between the radii.
    pub tolerance: f64,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        Self {
            radius: None,
            nodes: 128,
            tolerance: 1e-6,
        }
    }
}

/// `coefficients[i]` multiplies `r^{lambda0} angular[i]`; `log_terms[q-1]`
/// holds the coefficients of `r^{lambda0} log^q r angular[i]`.
#[derive(Debug, Clone)]
pub struct SingularCoefficient {
    pub lambda0: C64,
    pub coefficients: Vec<C64>,
    pub angular: Vec<AngularFunction>,
    pub log_terms: Vec<Vec<C64>>,
    pub radius: f64,
    /// Largest disagreement between radii, in units of the coefficients.
    pub spread: f64,
    pub multiplicity: usize,
}

impl SingularCoefficient {
    pub fn coefficient(&self) -> C64 {
        self.coefficients[0]
    }
}

/// Angular weights for projections onto kernel functions.
fn projection_weights(g: &RadialFunction) -> Vec<f64> {
    let grid = g.agrid;
    if grid.per_sector() < 6 {
        return grid.flat_weights();
    }
    Side::BOTH
        .iter()
        .flat_map(|s| gregory_weights(grid.per_sector(), grid.spacing(*s)))
        .collect()
}

/// Distance from `lambda0` to the nearest other zero, and the order of the
/// zero at `lambda0`.
fn isolation(lambda0: C64, mu: f64, omega: f64) -> Result<(f64, usize)> {
    let reach = 2.0;
    let band = Band::new(lambda0.re - reach, lambda0.re + reach, lambda0.im.abs() + reach)?;
    let report = find_spectrum(mu, omega, band)?;
    let mut dist = reach;
    let mut order = None;
    for r in &report.roots {
        let d = (r.lambda - lambda0).norm();
        if d <= 1e-7 * (1.0 + lambda0.norm()) {
            order = Some(r.multiplicity);
        } else {
            dist = dist.min(d);
        }
    }
    let order = order.ok_or(Error::NotARoot {
        lambda: lambda0,
        modulus: closed_form_determinant(lambda0, mu, omega).norm(),
    })?;
    Ok((dist, order))
}

/// `a_{-k-1} = (1/2 pi i) oint (lambda - lambda0)^k V(lambda) d lambda` for
/// `k < order`, plus the largest `||V||` seen on the circle.
fn contour_moments(
    solver: &SymbolSolver,
    q: &RadialFunction,
    lambda0: C64,
    radius: f64,
    nodes: usize,
    order: usize,
) -> Result<(Vec<Vec<C64>>, f64)> {
    let samples: Vec<(C64, Vec<C64>)> = (0..nodes)
        .into_par_iter()
        .map(|n| {
            let z = C64::from_polar(1.0, 2.0 * PI * (n as f64 + 0.5) / nodes as f64);
            let lambda = lambda0 + radius * z;
            let rhs = transform_at(q, lambda);
            solver.solve_samples(lambda, &rhs).map(|v| (z, v))
        })
        .collect::<Result<_>>()?;
    let len = q.n_theta();
    let mut moments = vec![vec![C64::new(0.0, 0.0); len]; order];
    let mut peak = 0.0f64;
    let wa = q.agrid.flat_weights();
    for (z, v) in &samples {
        let norm = v.iter().zip(&wa).map(|(x, w)| w * x.norm_sqr()).sum::<f64>().sqrt();
        peak = peak.max(norm);
        let mut f = *z * radius / nodes as f64;
        for mom in moments.iter_mut() {
            for (a, x) in mom.iter_mut().zip(v) {
                *a += f * x;
            }
            f *= *z * radius;
        }
    }
    Ok((moments, peak))
}

/// Coefficients of the singular terms at `lambda0` of the solution of
/// `a Delta u = g` taken on the side of the contour `Re lambda < Re lambda0`,
/// relative to the solution on the other side: `u_left = u_right + sum c r^lambda0 ...`.
pub fn singular_coefficient(
    materials: &MaterialPair,
    corner: CornerConfig,
    g: &RadialFunction,
    lambda0: C64,
    options: &ResidueOptions,
) -> Result<SingularCoefficient> {
    let (mu, omega) = (materials.mu(), corner.omega());
    if g.agrid.corner() != corner {
        return Err(Error::Domain("data grid and corner disagree".into()));
    }
    if !is_on_spectrum(lambda0, mu, omega) {
        return Err(Error::NotARoot {
            lambda: lambda0,
            modulus: closed_form_determinant(lambda0, mu, omega).norm(),
        });
    }
    if options.nodes < 16 {
        return Err(Error::Resolution(format!("contour needs at least 16 nodes, got {}", options.nodes)));
    }
    let (dist, order) = isolation(lambda0, mu, omega)?;
    let radii = match options.radius {
        Some(r) => {
            if !(r > 0.0 && r < dist) {
                return Err(Error::Contour { center: lambda0, radius: r });
            }
            [0.6 * r, r, 0.8 * r]
        }
        None => [0.3 * dist, 0.5 * dist, 0.7 * dist],
    };
    let angular = kernel_at(lambda0, mu, omega)?;
    let samples: Vec<Vec<C64>> = angular
        .iter()
        .map(|phi| {
            let s = phi.sample(g.agrid);
            s.minus.into_iter().chain(s.plus).collect()
        })
        .collect();
    let wa = projection_weights(g);
    let q = g.map_t(|t, v| v * (2.0 * t).exp());
    let solver = SymbolSolver::new(*materials, g.agrid);

    let mut per_radius = Vec::with_capacity(radii.len());
    let mut peak = 0.0f64;
    for &r in &radii {
        let (moments, p) = contour_moments(&solver, &q, lambda0, r, options.nodes, order)?;
        peak = peak.max(p * r);
        let mut fact = 1.0;
        let proj: Vec<Vec<C64>> = moments
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k > 0 {
                    fact *= k as f64;
                }
                samples
                    .iter()
                    .map(|phi| {
                        let dot: C64 = a
                            .iter()
                            .zip(phi)
                            .zip(&wa)
                            .map(|((x, y), w)| w * x * y.conj())
                            .sum();
                        -dot / fact
                    })
                    .collect()
            })
            .collect();
        per_radius.push(proj);
    }
    let primary = &per_radius[1];
    let size = primary
        .iter()
        .flatten()
        .fold(0.0f64, |m, c| m.max(c.norm()));
    let scale = size.max(1e-3 * peak).max(f64::MIN_POSITIVE);
    let mut spread = 0.0f64;
    for other in [&per_radius[0], &per_radius[2]] {
        for (a, b) in other.iter().flatten().zip(primary.iter().flatten()) {
            spread = spread.max((a - b).norm() / scale);
        }
    }
    if !spread.is_finite() || spread > options.tolerance {
        return Err(Error::Quadrature(format!(
            "residue at {lambda0} changes by {spread:.3e} between contour radii"
        )));
    }
    let mut proj = per_radius.swap_remove(1);
    let coefficients = proj.remove(0);
    Ok(SingularCoefficient {
        lambda0,
        coefficients,
        angular,
        log_terms: proj,
        radius: radii[1],
        spread,
        multiplicity: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{Cutoff, PlantedSingular};
    use crate::mellin::TGrid;
    use crate::spectrum::lambda1;
    use crate::AngularGrid;

    fn planted() -> (MaterialPair, CornerConfig, RadialFunction, C64) {
        let m = MaterialPair::from_contrast(-5.0).unwrap();
        let corner = CornerConfig::right_angle();
        let ag = AngularGrid::new(corner, 24).unwrap();
        let tg = TGrid::new(-8.0, 4.0, 1024).unwrap();
        let l1 = C64::new(lambda1(-5.0).unwrap(), 0.0);
        let phi = kernel_at(l1, -5.0, corner.omega()).unwrap().remove(0);
        let p = PlantedSingular {
            lambda0: l1,
            angular: phi,
            cutoff: Cutoff { start: -4.0, end: 0.0 },
            materials: m,
        };
        (m, corner, p.data(tg, ag), l1)
    }

    #[test]
    fn planted_coefficient_on_coarse_grid() {
        let (m, corner, g, l1) = planted();
        let r = singular_coefficient(&m, corner, &g, l1, &ResidueOptions::default()).unwrap();
        assert!((r.coefficient() - 1.0).norm() < 1e-4, "{}", r.coefficient());
        assert!(r.log_terms.is_empty());
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn radius_reaching_another_pole_is_rejected() {
        let (m, corner, g, l1) = planted();
        let opts = ResidueOptions {
            radius: Some(0.6),
            ..ResidueOptions::default()
        };
        assert!(matches!(
            singular_coefficient(&m, corner, &g, l1, &opts),
            Err(Error::Contour { .. })
        ));
    }

    #[test]
    fn non_root_is_rejected() {
        let (m, corner, g, _) = planted();
        assert!(matches!(
            singular_coefficient(&m, corner, &g, C64::new(0.3, 0.0), &ResidueOptions::default()),
            Err(Error::NotARoot { .. })
        ));
    }
}
