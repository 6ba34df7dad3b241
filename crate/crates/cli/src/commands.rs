use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use corner_spectrum::fixtures::{Bump, CubicProfile, Cutoff, PlantedSingular, RadialShape, RegularSolution};
use corner_spectrum::mellin::io::{load_radial, write_radial_csv};
use corner_spectrum::mellin::{
    invert_on_line, singular_coefficient, weighted_norm, EtaGrid, LineOptions, RadialFunction, ResidueOptions,
    TGrid, WeightedNormSpec,
};
use corner_spectrum::spectrum::{eta, find_spectrum, h1_singular_terms, lambda1, singular_term_inventory, Band};
use corner_spectrum::symbol::kernel_at;
use corner_spectrum::transmission_1d::{solve_1d, ExpPoly, HalfLine, HalfLineRhs, DEFAULT_LENGTH, DEFAULT_STEP};
use corner_spectrum::{AngularGrid, CornerConfig, Error, MaterialPair};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Defaults;
use crate::svg::{Mark, Plot, Series};
use crate::{Failure, Format, Grids, Output};

fn format_of(output: &Output, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = output.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!("format {f:?} is not available for this command")))
    }
}

fn emit(out: &Option<PathBuf>, content: &[u8]) -> Result<(), Failure> {
    let res = match out {
        Some(path) => std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(content).map_err(|e| e.to_string()),
    };
    res.map_err(|e| Failure::Core(Error::Io(e)))
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Core(Error::Io(e.to_string())))?;
    s.push('\n');
    emit(out, s.as_bytes())
}

fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn grids(defaults: &Defaults, corner: CornerConfig, g: &Grids) -> Result<(TGrid, AngularGrid, EtaGrid), Failure> {
    let tg = TGrid::new(defaults.t_min, defaults.t_max, g.grid_t.unwrap_or(defaults.grid_t))?;
    let ag = AngularGrid::new(corner, g.grid_theta.unwrap_or(defaults.grid_theta))?;
    let eg = EtaGrid::new(defaults.eta_max, g.grid_eta.unwrap_or(defaults.grid_eta))?;
    Ok((tg, ag, eg))
}

pub fn spectrum(
    defaults: &Defaults,
    mu: f64,
    omega: f64,
    band: Option<&[f64]>,
    output: &Output,
) -> Result<(), Failure> {
    let format = format_of(output, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
    let b = band.unwrap_or(&defaults.band);
    let report = find_spectrum(mu, omega, Band::new(b[0], b[1], b[2])?)?;
    match format {
        Format::Json => {
            let corner = CornerConfig::new(omega)?;
            let closed_form = if corner.is_right_angle() && mu < 0.0 {
                json!({
                    "lambda1": lambda1(mu).ok(),
                    "eta": eta(mu).ok(),
                })
            } else {
                Value::Null
            };
            let roots: Vec<Value> = report
                .roots
                .iter()
                .map(|r| {
                    json!({
                        "re": r.lambda.re,
                        "im": r.lambda.im,
                        "multiplicity": r.multiplicity,
                        "kernel_dim": r.kernel_dim,
                    })
                })
                .collect();
            emit_json(
                &output.out,
                &json!({
                    "mu": mu,
                    "omega": omega,
                    "band": { "re_min": b[0], "re_max": b[1], "im_max": b[2] },
                    "regime": report.regime.label(),
                    "roots": roots,
                    "closed_form": closed_form,
                }),
            )
        }
        Format::Csv => {
            let mut s = String::from("re,im,multiplicity,kernel_dim\n");
            for r in &report.roots {
                let _ = writeln!(s, "{},{},{},{}", r.lambda.re, r.lambda.im, r.multiplicity, r.kernel_dim);
            }
            emit(&output.out, s.as_bytes())
        }
        Format::Svg => {
            let plot = Plot {
                title: format!("zeros for mu = {mu}, omega = {omega:.4}"),
                x_label: "Re lambda".into(),
                y_label: "Im lambda".into(),
                series: vec![Series {
                    label: report.regime.label().into(),
                    color: "#1f5fa8",
                    mark: Mark::Dots,
                    points: report.roots.iter().map(|r| (r.lambda.re, r.lambda.im)).collect(),
                }],
                bands: vec![],
            };
            emit(&output.out, plot.render().as_bytes())
        }
    }
}

struct SweepRow {
    mu: f64,
    lambda1: Option<f64>,
    eta: Option<f64>,
    regime: String,
    status: &'static str,
}

/// Snaps `mu` to a nearby value with at most nine decimals, so that ranges
/// hit `-1` and `-3` exactly.
fn snap(mu: f64) -> f64 {
    let r = (mu * 1e9).round() / 1e9;
    if (r - mu).abs() <= 1e-12 * (1.0 + mu.abs()) {
        r
    } else {
        mu
    }
}

fn sweep_row(mu: f64) -> SweepRow {
    match corner_spectrum::spectrum::classify(mu) {
        Err(_) => SweepRow {
            mu,
            lambda1: None,
            eta: None,
            regime: String::new(),
            status: "excluded",
        },
        Ok(regime) => SweepRow {
            mu,
            lambda1: lambda1(mu).ok(),
            eta: eta(mu).ok(),
            regime: regime.label().into(),
            status: "ok",
        },
    }
}

pub fn sweep(from: f64, to: f64, step: f64, output: &Output) -> Result<(), Failure> {
    let format = format_of(output, Format::Csv, &[Format::Csv, Format::Svg, Format::Json])?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::Usage(format!("step must be positive, got {step}")));
    }
    if !(from.is_finite() && to.is_finite() && from <= to) {
        return Err(Failure::Usage(format!("need from <= to, got {from} and {to}")));
    }
    let n = ((to - from) / step * (1.0 + 1e-12)).floor() as usize + 1;
    let rows: Vec<SweepRow> = (0..n)
        .into_par_iter()
        .map(|k| sweep_row(snap(from + k as f64 * step)))
        .collect();
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    match format {
        Format::Csv => {
            let mut s = String::from("mu,lambda1,eta,regime,status\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", r.mu, opt(r.lambda1), opt(r.eta), r.regime, r.status);
            }
            emit(&output.out, s.as_bytes())
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "mu": r.mu, "lambda1": r.lambda1, "eta": r.eta, "regime": r.regime, "status": r.status }))
                .collect();
            emit_json(&output.out, &Value::Array(v))
        }
        Format::Svg => {
            let curve = |f: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
                rows.iter().map(|r| (r.mu, f(r).unwrap_or(f64::NAN))).collect()
            };
            let plot = Plot {
                title: "right-angle exponents".into(),
                x_label: "mu".into(),
                y_label: "exponent".into(),
                series: vec![
                    Series {
                        label: "lambda1".into(),
                        color: "#1f5fa8",
                        mark: Mark::Line,
                        points: curve(|r| r.lambda1),
                    },
                    Series {
                        label: "eta".into(),
                        color: "#b8401c",
                        mark: Mark::Line,
                        points: curve(|r| r.eta),
                    },
                ],
                bands: vec![(-3.0, -1.0 / 3.0)],
            };
            emit(&output.out, plot.render().as_bytes())
        }
    }
}

pub fn singular_function(
    defaults: &Defaults,
    mu: f64,
    omega: f64,
    index: usize,
    output: &Output,
) -> Result<(), Failure> {
    let format = format_of(output, Format::Csv, &[Format::Csv, Format::Svg, Format::Json])?;
    let (lambda0, phi) = if index == 0 {
        let phi = kernel_at(C64::new(0.0, 0.0), mu, omega)?.remove(0);
        (C64::new(0.0, 0.0), phi)
    } else {
        let inventory = singular_term_inventory(mu, omega)?;
        let terms = h1_singular_terms(&inventory);
        let term = terms.get(index - 1).ok_or(Error::WrongRegime {
            mu,
            expected: "requested singular-term",
        })?;
        (term.lambda0, term.angular.clone())
    };
    let norm = phi.l2_norm();
    let n = defaults.profile_nodes.max(2);
    let samples: Vec<(f64, C64)> = (0..n)
        .map(|k| {
            let th = corner_spectrum::domain::TWO_PI * k as f64 / (n - 1) as f64;
            (th, phi.eval(th) / norm)
        })
        .collect();
    match format {
        Format::Csv => {
            let mut s = String::from("theta,phi_re,phi_im\n");
            for (th, v) in &samples {
                let _ = writeln!(s, "{th},{},{}", v.re, v.im);
            }
            emit(&output.out, s.as_bytes())
        }
        Format::Json => emit_json(
            &output.out,
            &json!({
                "mu": mu,
                "omega": omega,
                "index": index,
                "lambda0": complex(lambda0),
                "theta": samples.iter().map(|s| s.0).collect::<Vec<_>>(),
                "phi_re": samples.iter().map(|s| s.1.re).collect::<Vec<_>>(),
                "phi_im": samples.iter().map(|s| s.1.im).collect::<Vec<_>>(),
            }),
        ),
        Format::Svg => {
            let plot = Plot {
                title: format!("angular profile at lambda = {lambda0:.6}"),
                x_label: "theta".into(),
                y_label: "phi".into(),
                series: vec![
                    Series {
                        label: "real part".into(),
                        color: "#1f5fa8",
                        mark: Mark::Line,
                        points: samples.iter().map(|(t, v)| (*t, v.re)).collect(),
                    },
                    Series {
                        label: "imaginary part".into(),
                        color: "#b8401c",
                        mark: Mark::Line,
                        points: samples.iter().map(|(t, v)| (*t, v.im)).collect(),
                    },
                ],
                bands: vec![(0.0, omega)],
            };
            emit(&output.out, plot.render().as_bytes())
        }
    }
}

/// Parses `coeff:power:rate` terms separated by commas.
pub fn parse_exp_poly(text: &str) -> Result<ExpPoly, Failure> {
    let mut poly = ExpPoly::zero();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        let bad = || Failure::Usage(format!("bad term `{part}`, expected coeff:power:rate"));
        if fields.len() != 3 {
            return Err(bad());
        }
        let coeff: f64 = fields[0].parse().map_err(|_| bad())?;
        let power: u32 = fields[1].parse().map_err(|_| bad())?;
        let rate: f64 = fields[2].parse().map_err(|_| bad())?;
        if !(rate > 0.0) {
            return Err(Failure::Usage(format!("term `{part}` must decay (rate > 0)")));
        }
        poly = poly.plus(&ExpPoly::term(coeff, power, rate));
    }
    Ok(poly)
}

pub fn solve1d(
    (a_plus, a_minus): (f64, f64),
    plus: &str,
    minus: &str,
    sampled: bool,
    extent: f64,
    points: usize,
    output: &Output,
) -> Result<(), Failure> {
    let format = format_of(output, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
    let materials = MaterialPair::new(a_plus, a_minus)?;
    let (hp, hm) = (parse_exp_poly(plus)?, parse_exp_poly(minus)?);
    let rhs = if sampled {
        HalfLineRhs {
            minus: HalfLine::sample(|s| hm.eval(s), DEFAULT_LENGTH, DEFAULT_STEP),
            plus: HalfLine::sample(|s| hp.eval(s), DEFAULT_LENGTH, DEFAULT_STEP),
        }
    } else {
        HalfLineRhs::closed(hm, hp)
    };
    let sol = solve_1d(&materials, &rhs)?;
    if points < 2 || !(extent > 0.0) {
        return Err(Failure::Usage("need at least 2 points and a positive extent".into()));
    }
    let ys: Vec<f64> = (0..points)
        .map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64)
        .collect();
    match format {
        Format::Json => emit_json(
            &output.out,
            &json!({
                "a_plus": a_plus,
                "a_minus": a_minus,
                "path": if sampled { "finite-difference" } else { "closed-form" },
                "value": sol.traces.value,
                "d_plus": sol.traces.d_plus,
                "d_minus": sol.traces.d_minus,
                "continuity_residual": sol.continuity_residual(),
                "transmission_residual": sol.transmission_residual(),
                "h2_norm": sol.h2_norm()?,
            }),
        ),
        Format::Csv => {
            let mut s = String::from("y,w\n");
            for y in &ys {
                let _ = writeln!(s, "{y},{}", sol.eval(*y));
            }
            emit(&output.out, s.as_bytes())
        }
        Format::Svg => {
            let plot = Plot {
                title: format!("a+ = {a_plus}, a- = {a_minus}"),
                x_label: "y".into(),
                y_label: "w".into(),
                series: vec![Series {
                    label: "w".into(),
                    color: "#1f5fa8",
                    mark: Mark::Line,
                    points: ys.iter().map(|y| (*y, sol.eval(*y))).collect(),
                }],
                bands: vec![(-extent, 0.0)],
            };
            emit(&output.out, plot.render().as_bytes())
        }
    }
}

fn load_data(path: &Path, corner: CornerConfig) -> Result<RadialFunction, Failure> {
    let g = load_radial(path)?;
    if (g.agrid.corner().omega() - corner.omega()).abs() > 1e-9 * corner.omega() {
        return Err(Failure::Usage(format!(
            "data grid has omega = {}, expected {}",
            g.agrid.corner().omega(),
            corner.omega()
        )));
    }
    Ok(g)
}

fn radial_csv(v: &RadialFunction) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_radial_csv(v, &mut buf)?;
    Ok(buf)
}

pub fn invert_line(
    defaults: &Defaults,
    mu: f64,
    omega: f64,
    gamma: f64,
    data: Option<&Path>,
    grid_flags: &Grids,
    output: &Output,
) -> Result<(), Failure> {
    let format = format_of(output, Format::Csv, &[Format::Csv, Format::Json])?;
    let materials = MaterialPair::from_contrast(mu)?;
    let corner = CornerConfig::new(omega)?;
    let (tg, ag, eg) = grids(defaults, corner, grid_flags)?;
    let (g, exact) = match data {
        Some(path) => (load_data(path, corner)?, None),
        None => {
            let w = RegularSolution {
                profile: CubicProfile::new(&materials, corner, [1.0, 0.3, -0.5, 0.8]),
                radial: RadialShape::Annulus(Bump::new(-11.5, -3.5, -3.5, 4.5)),
                materials,
            };
            (w.data(tg, ag), Some(w.sample(tg, ag)))
        }
    };
    let opts = LineOptions {
        eta: eg,
        guard: defaults.guard,
    };
    let w = invert_on_line(&materials, corner, &g, gamma, &opts)?;
    match format {
        Format::Csv => emit(&output.out, &radial_csv(&w)?),
        Format::Json => {
            let norm = |v: &RadialFunction, s: u32| weighted_norm(v, WeightedNormSpec { s, gamma });
            let error = match &exact {
                Some(e) => Some(norm(&w.sub(e)?, 0)? / norm(e, 0)?),
                None => None,
            };
            emit_json(
                &output.out,
                &json!({
                    "mu": mu,
                    "omega": omega,
                    "gamma": gamma,
                    "xi": 1.0 - gamma,
                    "grid": { "t": w.tgrid.n, "eta": eg.n, "theta_per_sector": ag.per_sector() },
                    "solution_norm_s0": norm(&w, 0)?,
                    "solution_norm_s2": norm(&w, 2)?,
                    "data_norm_s0": norm(&g, 0)?,
                    "manufactured_relative_error": error,
                }),
            )
        }
        Format::Svg => unreachable!(),
    }
}

pub struct ResidueTarget {
    pub lambda: C64,
    pub data: Option<PathBuf>,
    pub amplitude: f64,
    pub radius: Option<f64>,
}

pub fn residue(
    defaults: &Defaults,
    mu: f64,
    omega: f64,
    target: &ResidueTarget,
    grid_flags: &Grids,
    output: &Output,
) -> Result<(), Failure> {
    format_of(output, Format::Json, &[Format::Json])?;
    let materials = MaterialPair::from_contrast(mu)?;
    let corner = CornerConfig::new(omega)?;
    let (tg, ag, _) = grids(defaults, corner, grid_flags)?;
    let g = match &target.data {
        Some(path) => load_data(path, corner)?,
        None => {
            let phi = kernel_at(target.lambda, mu, omega)?.remove(0);
            PlantedSingular {
                lambda0: target.lambda,
                angular: phi.scaled(C64::new(target.amplitude, 0.0)),
                cutoff: Cutoff { start: -4.0, end: 0.0 },
                materials,
            }
            .data(tg, ag)
        }
    };
    let opts = ResidueOptions {
        radius: target.radius,
        nodes: defaults.residue_nodes,
        tolerance: defaults.residue_tolerance,
    };
    let r = singular_coefficient(&materials, corner, &g, target.lambda, &opts)?;
    emit_json(
        &output.out,
        &json!({
            "mu": mu,
            "omega": omega,
            "lambda0": complex(r.lambda0),
            "multiplicity": r.multiplicity,
            "coefficients": r.coefficients.iter().map(|c| complex(*c)).collect::<Vec<_>>(),
            "log_terms": r.log_terms.iter().map(|row| row.iter().map(|c| complex(*c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "radius": r.radius,
            "spread": r.spread,
            "planted_amplitude": if target.data.is_none() { Some(target.amplitude) } else { None },
        }),
    )
}
