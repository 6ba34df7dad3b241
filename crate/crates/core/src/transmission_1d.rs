//! One-dimensional interface model: `a(w - w'') = h` on each half-line,
//! `w` continuous at 0, `a+ w+'(0) = a- w-'(0)`, decay at infinity.
//!
//! Both half-lines are parametrised by the distance `s = |y|` to the
//! interface; `w-'(0)` is the derivative in `y`, i.e. `-dw/ds`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;

use crate::domain::{CornerConfig, MaterialPair, Side};
use crate::error::{Error, Result};
use crate::quadrature::{derivatives, gauss_legendre_on, trapezoid, uniform_nodes};
use crate::spectrum::{find_spectrum, Band};

/// Truncation length of the numeric half-line.
pub const DEFAULT_LENGTH: f64 = 40.0;
/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1.0 / 128.0;

const GRAM_CANCELLATION: f64 = 1e-8;
const RESONANCE_BAND: f64 = 0.1;
const MAX_EXPANSION: u32 = 60;

/// `coeff * s^power * exp(-rate * s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: f64,
    pub power: u32,
    pub rate: f64,
}

/// Finite sum of [`ExpTerm`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn term(coeff: f64, power: u32, rate: f64) -> Self {
        Self {
            terms: vec![ExpTerm { coeff, power, rate }],
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * s.powi(t.power as i32) * (-t.rate * s).exp())
            .sum()
    }

    pub fn derivative(&self) -> ExpPoly {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power > 0 {
                out.push(ExpTerm {
                    coeff: t.coeff * t.power as f64,
                    power: t.power - 1,
                    rate: t.rate,
                });
            }
            out.push(ExpTerm {
                coeff: -t.coeff * t.rate,
                power: t.power,
                rate: t.rate,
            });
        }
        ExpPoly { terms: out }
    }

    pub fn scaled(&self, factor: f64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm {
                    coeff: t.coeff * factor,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().copied());
        ExpPoly { terms }
    }

    /// `int_0^inf f(s)^2 ds`, exactly.
    pub fn l2_norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        let mut size = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let n = a.power + b.power;
                let q = a.rate + b.rate;
                let g = a.coeff * b.coeff * factorial(n) / q.powi(n as i32 + 1);
                acc += g;
                size += g.abs();
            }
        }
        // Near-resonant terms carry huge cancelling coefficients; the
        // pointwise values are still accurate.
        if acc < GRAM_CANCELLATION * size {
            return self.l2_norm_sqr_quadrature();
        }
        acc.max(0.0)
    }

    fn l2_norm_sqr_quadrature(&self) -> f64 {
        let slowest = self.terms.iter().map(|t| t.rate).fold(f64::INFINITY, f64::min);
        let fastest = self.terms.iter().map(|t| t.rate).fold(0.0, f64::max);
        if !slowest.is_finite() {
            return 0.0;
        }
        let length = 80.0 / slowest;
        let width = (2.0 / fastest).min(2.0);
        let panels = (length / width).ceil() as usize;
        let mut acc = 0.0;
        for k in 0..panels {
            let (x, w) = gauss_legendre_on(20, k as f64 * width, (k + 1) as f64 * width);
            acc += x.iter().zip(&w).map(|(s, wk)| wk * self.eval(*s).powi(2)).sum::<f64>();
        }
        acc
    }

    fn check_integrable(&self) -> Result<()> {
        for t in &self.terms {
            if !(t.rate > 0.0) || !t.coeff.is_finite() {
                return Err(Error::Domain(format!(
                    "term {} s^{} exp(-{} s) is not square-integrable",
                    t.coeff, t.power, t.rate
                )));
            }
        }
        Ok(())
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Data on one half-line.
#[derive(Debug, Clone, PartialEq)]
pub enum HalfLine {
    /// Exponential-polynomial in `s`.
    Closed(ExpPoly),
    /// Samples on an increasing grid starting at `s = 0`.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl HalfLine {
    /// Samples `f` on the uniform grid `[0, length]` with step `h`.
    pub fn sample(f: impl Fn(f64) -> f64, length: f64, h: f64) -> Self {
        let n = (length / h).round() as usize + 1;
        let grid = uniform_nodes(0.0, length, n);
        let values = grid.iter().map(|s| f(*s)).collect();
        HalfLine::Sampled { grid, values }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            HalfLine::Closed(p) => p.eval(s),
            HalfLine::Sampled { grid, values } => interpolate(grid, values, s),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            HalfLine::Closed(p) => p.check_integrable(),
            HalfLine::Sampled { grid, values } => {
                if grid.len() < 5 || grid.len() != values.len() {
                    return Err(Error::Resolution(
                        "half-line samples need at least 5 nodes and matching lengths".into(),
                    ));
                }
                if grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Domain(
                        "half-line grid must start at 0 and increase strictly".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("half-line samples must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// `L^2` norm, exact for closed forms and by trapezoid otherwise.
    pub fn l2_norm(&self) -> f64 {
        match self {
            HalfLine::Closed(p) => p.l2_norm_sqr().sqrt(),
            HalfLine::Sampled { grid, values } => {
                let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
                trapezoid(grid, &sq).sqrt()
            }
        }
    }
}

fn interpolate(grid: &[f64], values: &[f64], s: f64) -> f64 {
    if s <= grid[0] {
        return values[0];
    }
    if s >= grid[grid.len() - 1] {
        return 0.0;
    }
    let j = grid.partition_point(|x| *x <= s) - 1;
    let t = (s - grid[j]) / (grid[j + 1] - grid[j]);
    values[j] * (1.0 - t) + values[j + 1] * t
}

/// Right-hand side `h` on both half-lines.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineRhs {
    pub minus: HalfLine,
    pub plus: HalfLine,
}

impl HalfLineRhs {
    pub fn closed(minus: ExpPoly, plus: ExpPoly) -> Self {
        Self {
            minus: HalfLine::Closed(minus),
            plus: HalfLine::Closed(plus),
        }
    }

    pub fn side(&self, side: Side) -> &HalfLine {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }
}

/// `(w(0), w+'(0), w-'(0))`, derivatives in `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traces {
    pub value: f64,
    pub d_plus: f64,
    pub d_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSolution1D {
    pub minus: HalfLine,
    pub plus: HalfLine,
    pub traces: Traces,
    /// Value of `w` at `0` from each side.
    pub interface_values: (f64, f64),
    pub materials: MaterialPair,
}

impl TransmissionSolution1D {
    /// `w(y)` on the whole line.
    pub fn eval(&self, y: f64) -> f64 {
        if y >= 0.0 {
            self.plus.eval(y)
        } else {
            self.minus.eval(-y)
        }
    }

    pub fn continuity_residual(&self) -> f64 {
        self.interface_values.0 - self.interface_values.1
    }

    pub fn transmission_residual(&self) -> f64 {
        self.materials.a_plus() * self.traces.d_plus - self.materials.a_minus() * self.traces.d_minus
    }

    /// `||w||_{H^2}` over both half-lines.
    pub fn h2_norm(&self) -> Result<f64> {
        let mut acc = 0.0;
        for h in [&self.minus, &self.plus] {
            acc += match h {
                HalfLine::Closed(p) => {
                    let d1 = p.derivative();
                    let d2 = d1.derivative();
                    p.l2_norm_sqr() + d1.l2_norm_sqr() + d2.l2_norm_sqr()
                }
                HalfLine::Sampled { grid, values } => {
                    parametric_norm(grid, values, 0.0, 2)?.powi(2)
                }
            };
        }
        Ok(acc.sqrt())
    }
}

/// Dirichlet solution `w0 - w0'' = f`, `w0(0) = 0`, decaying, for
/// `f = coeff s^p exp(-q s)`: `w0 = exp(-q s) P(s) - P(0) exp(-s)`.
fn dirichlet_term(t: &ExpTerm) -> ExpPoly {
    let p = t.power as usize;
    let q = t.rate;
    if q != 1.0 && (q - 1.0).abs() < RESONANCE_BAND {
        return dirichlet_near_resonance(t);
    }
    let mut out = vec![];
    if q == 1.0 {
        // 2P' - P'' = coeff s^p, P of degree p + 1 with P(0) = 0.
        let mut c = vec![0.0; p + 3];
        for k in (0..=p).rev() {
            let rk = if k == p { t.coeff } else { 0.0 };
            c[k + 1] = (rk + ((k + 2) * (k + 1)) as f64 * c[k + 2]) / (2.0 * (k + 1) as f64);
        }
        for (k, ck) in c.iter().enumerate().take(p + 2).skip(1) {
            out.push(ExpTerm {
                coeff: *ck,
                power: k as u32,
                rate: 1.0,
            });
        }
    } else {
        // (1 - q^2) P + 2q P' - P'' = coeff s^p, P of degree p.
        let mut c = vec![0.0; p + 3];
        for k in (0..=p).rev() {
            let rk = if k == p { t.coeff } else { 0.0 };
            c[k] = (rk - 2.0 * q * (k + 1) as f64 * c[k + 1]
                + ((k + 2) * (k + 1)) as f64 * c[k + 2])
                / (1.0 - q * q);
        }
        for (k, ck) in c.iter().enumerate().take(p + 1) {
            out.push(ExpTerm {
                coeff: *ck,
                power: k as u32,
                rate: q,
            });
        }
        out.push(ExpTerm {
            coeff: -c[0],
            power: 0,
            rate: 1.0,
        });
    }
    ExpPoly { terms: out }
}

/// Rates close to 1: expand `exp(-(q - 1) s)` so that every piece is solved
/// in the exact resonant branch.
fn dirichlet_near_resonance(t: &ExpTerm) -> ExpPoly {
    let eps = t.rate - 1.0;
    // L2 norm of s^m exp(-s).
    let size = |m: u32| (factorial(2 * m) / 2f64.powi(2 * m as i32 + 1)).sqrt();
    let first = t.coeff.abs() * size(t.power);
    let mut coeffs: Vec<f64> = vec![];
    let mut a = t.coeff;
    for j in 0..MAX_EXPANSION {
        let power = t.power + j;
        let piece = dirichlet_term(&ExpTerm { coeff: a, power, rate: 1.0 });
        for term in piece.terms {
            let k = term.power as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] += term.coeff;
        }
        if j > 0 && a.abs() * size(power) <= 1e-17 * first {
            break;
        }
        a *= -eps / (j + 1) as f64;
    }
    ExpPoly {
        terms: coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0.0)
            .map(|(k, coeff)| ExpTerm { coeff, power: k as u32, rate: 1.0 })
            .collect(),
    }
}

/// Second-order finite-difference Dirichlet solve of `w - w'' = f` on the
/// given grid, with `w = 0` at both ends.
fn dirichlet_fd(grid: &[f64], f: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let m = n - 2;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let hl = grid[i] - grid[i - 1];
        let hr = grid[i + 1] - grid[i];
        let s = 2.0 / (hl + hr);
        lower[k] = -s / hl;
        upper[k] = -s / hr;
        diag[k] = 1.0 + s / hl + s / hr;
        rhs[k] = f[i];
    }
    let sol = thomas(&lower, &diag, &upper, &rhs);
    let mut w = vec![0.0; n];
    w[1..n - 1].copy_from_slice(&sol);
    w
}

/// Tridiagonal solve; `lower[0]` and `upper[m-1]` are ignored.
pub(crate) fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for k in 1..m {
        beta = diag[k] - lower[k] * c[k - 1];
        c[k] = upper[k] / beta;
        d[k] = (rhs[k] - lower[k] * d[k - 1]) / beta;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for k in (0..m - 1).rev() {
        x[k] = d[k] - c[k] * x[k + 1];
    }
    x
}

/// `w0'(0)` from a finite-difference solution: forward difference corrected
/// by the equation, `w0''(0) = -f(0)`.
fn fd_trace(grid: &[f64], w: &[f64], f0: f64) -> f64 {
    let h = grid[1] - grid[0];
    (w[1] - w[0]) / h + 0.5 * h * f0
}

struct Dirichlet {
    solution: HalfLine,
    slope: f64,
}

fn dirichlet(data: &HalfLine, a: f64) -> Dirichlet {
    match data {
        HalfLine::Closed(p) => {
            let w0 = p
                .terms
                .iter()
                .map(|t| dirichlet_term(&ExpTerm { coeff: t.coeff / a, ..*t }))
                .fold(ExpPoly::zero(), |acc, x| acc.plus(&x));
            let slope = w0.derivative().eval(0.0);
            Dirichlet {
                solution: HalfLine::Closed(w0),
                slope,
            }
        }
        HalfLine::Sampled { grid, values } => {
            let f: Vec<f64> = values.iter().map(|v| v / a).collect();
            let w = dirichlet_fd(grid, &f);
            let fine = fd_trace(grid, &w, f[0]);
            // Richardson against the every-other-node grid when available.
            let slope = if grid.len() % 2 == 1 && grid.len() >= 9 {
                let cg: Vec<f64> = grid.iter().step_by(2).copied().collect();
                let cf: Vec<f64> = f.iter().step_by(2).copied().collect();
                let cw = dirichlet_fd(&cg, &cf);
                let coarse = fd_trace(&cg, &cw, cf[0]);
                (4.0 * fine - coarse) / 3.0
            } else {
                fine
            };
            Dirichlet {
                solution: HalfLine::Sampled {
                    grid: grid.clone(),
                    values: w,
                },
                slope,
            }
        }
    }
}

fn add_exponential(w0: HalfLine, c: f64) -> HalfLine {
    match w0 {
        HalfLine::Closed(p) => HalfLine::Closed(p.plus(&ExpPoly::term(c, 0, 1.0))),
        HalfLine::Sampled { grid, values } => {
            let values = grid
                .iter()
                .zip(values)
                .map(|(s, v)| v + c * (-s).exp())
                .collect();
            HalfLine::Sampled { grid, values }
        }
    }
}

/// Solves the interface problem as `w = w0 + c exp(-|y|)`, where `w0` solves
/// the Dirichlet problems on each half-line and `c` restores the flux
/// condition: `c = (a+ w0+'(0) - a- w0-'(0)) / (a+ + a-)`.
pub fn solve_1d(materials: &MaterialPair, rhs: &HalfLineRhs) -> Result<TransmissionSolution1D> {
    let (ap, am) = (materials.a_plus(), materials.a_minus());
    if ap + am == 0.0 {
        return Err(Error::ExcludedContrast { mu: materials.mu() });
    }
    rhs.minus.check()?;
    rhs.plus.check()?;
    let dm = dirichlet(&rhs.minus, am);
    let dp = dirichlet(&rhs.plus, ap);
    // In y, w0-'(0) = -dw0/ds.
    let d0_minus = -dm.slope;
    let d0_plus = dp.slope;
    let c = (ap * d0_plus - am * d0_minus) / (ap + am);
    let minus = add_exponential(dm.solution, c);
    let plus = add_exponential(dp.solution, c);
    let interface_values = (minus.eval(0.0), plus.eval(0.0));
    Ok(TransmissionSolution1D {
        traces: Traces {
            value: 0.5 * (interface_values.0 + interface_values.1),
            d_plus: d0_plus - c,
            d_minus: d0_minus + c,
        },
        minus,
        plus,
        interface_values,
        materials: *materials,
    })
}

/// Norm with frequency weight `rho`: order 2 gives
/// `(||(1+rho)^2 z||^2 + ||(1+rho) z'||^2 + ||z''||^2)^(1/2)`, order 1 gives
/// `(||(1+rho) z||^2 + ||z'||^2)^(1/2)`. Finite differences and trapezoid.
pub fn parametric_norm(grid: &[f64], values: &[f64], rho: f64, order: u32) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return Err(Error::Domain(format!("order must be 1 or 2, got {order}")));
    }
    if grid.len() < 4 || grid.len() != values.len() {
        return Err(Error::Resolution(
            "parametric norm needs at least 4 nodes".into(),
        ));
    }
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("rho must be nonnegative, got {rho}")));
    }
    let (d1, d2) = derivatives(grid, values);
    let sq = |v: &[f64]| -> f64 {
        let s: Vec<f64> = v.iter().map(|x| x * x).collect();
        trapezoid(grid, &s)
    };
    let w = 1.0 + rho;
    Ok(if order == 2 {
        (w.powi(4) * sq(values) + w * w * sq(&d1) + sq(&d2)).sqrt()
    } else {
        (w * w * sq(values) + sq(&d1)).sqrt()
    })
}

/// Ratios `||V||_{H^2(G, |eta|)} / ||L(xi + i eta) V||_{L^2(G)}` for random
/// `V` satisfying the transmission conditions, one per `eta`.
pub fn symbol_bound_probe(
    mu: f64,
    omega: f64,
    xi: f64,
    etas: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    let materials = MaterialPair::from_contrast(mu)?;
    let corner = CornerConfig::new(omega)?;
    let top = etas.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let report = find_spectrum(mu, omega, Band::new(xi - 0.01, xi + 0.01, top + 1.0)?)?;
    if !report.roots.is_empty() {
        return Err(Error::SpectrumOnLine {
            xi,
            roots: report.roots.iter().map(|r| r.lambda).collect(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    etas.iter()
        .map(|eta| {
            let v = RandomTransmissionProfile::new(&materials, corner, &mut rng);
            Ok(bound_ratio(&materials, corner, Complex64::new(xi, *eta), |s, t| v.eval(s, t)))
        })
        .collect()
}

/// The ratio for one profile, given as `(V, V', V'')` on each side.
pub fn bound_ratio(
    materials: &MaterialPair,
    corner: CornerConfig,
    lambda: Complex64,
    v: impl Fn(Side, f64) -> [Complex64; 3],
) -> f64 {
    let r = lambda.im.abs();
    let w = 1.0 + r;
    let (mut num, mut den) = (0.0, 0.0);
    for side in Side::BOTH {
        let a = materials.coefficient(side);
        let (lo, hi) = corner.sector(side);
        let (x, wt) = gauss_legendre_on(64, lo, hi);
        for (t, q) in x.iter().zip(&wt) {
            let [f, d1, d2] = v(side, *t);
            num += q * (w.powi(4) * f.norm_sqr() + w * w * d1.norm_sqr() + d2.norm_sqr());
            den += q * (a * (lambda * lambda * f + d2)).norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// Random trigonometric polynomial on each sector, with a cubic correction
/// on `G+` enforcing the four transmission conditions.
#[derive(Debug, Clone)]
pub struct RandomTransmissionProfile {
    minus: Vec<(f64, f64, f64)>,
    plus: Vec<(f64, f64, f64)>,
    correction: [f64; 4],
    corner: CornerConfig,
}

impl RandomTransmissionProfile {
    pub fn new(materials: &MaterialPair, corner: CornerConfig, rng: &mut impl Rng) -> Self {
        let mut modes = |_: ()| -> Vec<(f64, f64, f64)> {
            (0..4)
                .map(|k| {
                    (
                        k as f64,
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect()
        };
        let minus = modes(());
        let plus = modes(());
        let mut out = Self {
            minus,
            plus,
            correction: [0.0; 4],
            corner,
        };
        let omega = corner.omega();
        let two_pi = crate::domain::TWO_PI;
        let ratio = materials.a_minus() / materials.a_plus();
        let (m0, m0d, _) = trig(&out.minus, 0.0);
        let (mw, mwd, _) = trig(&out.minus, omega);
        let (pw, pwd, _) = trig(&out.plus, omega);
        let (p2, p2d, _) = trig(&out.plus, two_pi);
        // Targets: V+(omega) = V-(omega), V+'(omega) = ratio V-'(omega),
        // V+(2pi) = V-(0), V+'(2pi) = ratio V-'(0).
        out.correction = [mw - pw, ratio * mwd - pwd, m0 - p2, ratio * m0d - p2d];
        out
    }

    /// `(V, V', V'')` at `theta` on `side`.
    pub fn eval(&self, side: Side, theta: f64) -> [Complex64; 3] {
        let (f, d1, d2) = match side {
            Side::Minus => trig(&self.minus, theta),
            Side::Plus => {
                let (f, d1, d2) = trig(&self.plus, theta);
                let (a, b) = self.corner.sector(Side::Plus);
                let h = b - a;
                let s = (theta - a) / h;
                let [y0, d0, y1, dd1] = self.correction;
                let (v, dv, ddv) = hermite_with_second(s, y0, h * d0, y1, h * dd1);
                (f + v, d1 + dv / h, d2 + ddv / (h * h))
            }
        };
        [f, d1, d2].map(|x| Complex64::new(x, 0.0))
    }
}

fn trig(modes: &[(f64, f64, f64)], t: f64) -> (f64, f64, f64) {
    let mut out = (0.0, 0.0, 0.0);
    for (k, a, b) in modes {
        let (s, c) = (k * t).sin_cos();
        out.0 += a * c + b * s;
        out.1 += k * (-a * s + b * c);
        out.2 += -k * k * (a * c + b * s);
    }
    out
}

fn hermite_with_second(s: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> (f64, f64, f64) {
    let (b, db) = crate::quadrature::hermite_basis(s);
    let dd = [12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0];
    let c = [y0, m0, y1, m1];
    let dot = |w: &[f64; 4]| w.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>();
    (dot(&b), dot(&db), dot(&dd))
}
