//! Zeros of the determinant: argument-principle search in rectangular bands,
//! closed-form exponents for the right-angle corner, regime labels and the
//! list of singular terms in the strip `0 <= Re lambda < 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::AngularFunction;
use crate::domain::{validate_mu, validate_omega};
use crate::error::{Error, Result};
use crate::symbol::{
    closed_form_derivative, closed_form_determinant, determinant_derivative, is_on_spectrum,
    kernel_at, kernel_dimension, log_derivative, scaled_factors,
};

type C64 = Complex64;

/// Search window `re_min <= Re lambda <= re_max`, `|Im lambda| <= im_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl Band {
    pub fn new(re_min: f64, re_max: f64, im_max: f64) -> Result<Self> {
        if !(re_min.is_finite() && re_max.is_finite() && im_max.is_finite())
            || re_min >= re_max
            || im_max <= 0.0
        {
            return Err(Error::Domain(format!(
                "band needs re_min < re_max and im_max > 0, got [{re_min}, {re_max}] x {im_max}"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_max,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Negative contrast outside `[-3, -1/3]`.
    IndexConjecturedYes,
    /// Negative contrast in the closed interval `[-3, -1/3]`.
    IndexConjecturedNo,
    /// Positive contrast.
    EllipticContrast,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::IndexConjecturedYes => "IndexConjecturedYes",
            Regime::IndexConjecturedNo => "IndexConjecturedNo",
            Regime::EllipticContrast => "EllipticContrast",
        }
    }
}

/// `|mu - 1| / (2 |mu + 1|)`. Exactly 1 at the two endpoints `-3` and
/// `-1/3` (as represented in f64), where rounding would otherwise leave a
/// square-root-sized error in the exponents.
pub fn rho(mu: f64) -> f64 {
    if mu == -3.0 || mu == -1.0 / 3.0 {
        return 1.0;
    }
    (mu - 1.0).abs() / (2.0 * (mu + 1.0).abs())
}

pub fn classify(mu: f64) -> Result<Regime> {
    validate_mu(mu)?;
    Ok(if mu > 0.0 {
        Regime::EllipticContrast
    } else if (-3.0..=-1.0 / 3.0).contains(&mu) {
        Regime::IndexConjecturedNo
    } else {
        Regime::IndexConjecturedYes
    })
}

/// Real exponent in `[0, 1)` at the right angle, for `mu <= -3` or
/// `-1/3 <= mu < 0`: `(2/pi) arccos(rho)`.
pub fn lambda1(mu: f64) -> Result<f64> {
    validate_mu(mu)?;
    if mu > 0.0 {
        return Err(Error::WrongRegime {
            mu,
            expected: "negative contrast",
        });
    }
    if mu > -3.0 && mu < -1.0 / 3.0 {
        return Err(Error::WrongRegime {
            mu,
            expected: "real-exponent (mu <= -3 or mu >= -1/3)",
        });
    }
    Ok((2.0 / PI) * rho(mu).min(1.0).acos())
}

/// Imaginary exponent at the right angle, for `-3 <= mu <= -1/3`:
/// `(2/pi) arcosh(rho)`.
pub fn eta(mu: f64) -> Result<f64> {
    validate_mu(mu)?;
    if !(-3.0..=-1.0 / 3.0).contains(&mu) {
        return Err(Error::WrongRegime {
            mu,
            expected: "critical interval [-3, -1/3]",
        });
    }
    Ok((2.0 / PI) * rho(mu).max(1.0).acosh())
}

/// A zero of the determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRoot {
    pub lambda: C64,
    /// Order of the zero (winding number of its isolating box).
    pub multiplicity: usize,
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<SpectralRoot>,
    pub regime: Regime,
    pub mu: f64,
    pub omega: f64,
    pub band: Band,
}

impl SpectrumReport {
    /// Total count of zeros with multiplicity.
    pub fn zero_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

const CELL: f64 = 0.5;
const MAX_DEPTH: u32 = 20;
const BASE_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 1 << 15;
const MAX_TURN: f64 = PI / 4.0;
const REFINE_DEPTH: u32 = 24;
/// A cut or band edge must keep `|A/A'|` above this fraction of its length.
const CLEARANCE: f64 = 0.01;
const NEWTON_STEP: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn vertices(&self) -> [C64; 4] {
        [
            C64::new(self.re0, self.im0),
            C64::new(self.re1, self.im0),
            C64::new(self.re1, self.im1),
            C64::new(self.re0, self.im1),
        ]
    }

    fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re0 - slack
            && z.re <= self.re1 + slack
            && z.im >= self.im0 - slack
            && z.im <= self.im1 + slack
    }

    fn unstable(&self) -> Error {
        Error::UnstableWinding {
            re_min: self.re0,
            re_max: self.re1,
            im_min: self.im0,
            im_max: self.im1,
        }
    }
}

/// `A exp(-2 pi |Im|)` and a magnitude scale for near-zero tests.
fn scaled_eval(z: C64, mu: f64, omega: f64) -> (C64, f64) {
    let (b, c) = scaled_factors(z, mu, omega);
    let floor = (-2.0 * PI * z.im.abs()).exp();
    ((b + c) * (b - c), floor.max(b.norm_sqr() + c.norm_sqr()))
}

/// Whether the segment `[z0, z1]` passes within about `clearance` of a
/// zero, judged by the Newton distance `|A/A'|`.
fn segment_hits_zero(z0: C64, z1: C64, clearance: f64, mu: f64, omega: f64) -> bool {
    (0..=BASE_SAMPLES).any(|k| {
        let z = z0 + (z1 - z0) * (k as f64 / BASE_SAMPLES as f64);
        let d = 1.0 / log_derivative(z, mu, omega).norm();
        !(d >= clearance)
    })
}

struct Winding {
    count: i64,
    /// `(1/2 pi i) \oint z A'/A dz`, the sum of enclosed zeros.
    moment: C64,
}

/// Phase change of `A` from `z0` to `z1` and its contribution to the first
/// moment, bisecting the step until each piece turns the phase by less than
/// `MAX_TURN`.
fn step_log(z0: C64, v0: C64, z1: C64, v1: C64, depth: u32, mu: f64, omega: f64) -> Option<(C64, C64)> {
    let ratio = v1 / v0;
    let turn = ratio.arg();
    if turn.abs() > MAX_TURN {
        if depth == 0 {
            return None;
        }
        let zm = 0.5 * (z0 + z1);
        let (vm, _) = scaled_eval(zm, mu, omega);
        if vm == C64::new(0.0, 0.0) {
            return None;
        }
        let (a, ma) = step_log(z0, v0, zm, vm, depth - 1, mu, omega)?;
        let (b, mb) = step_log(zm, vm, z1, v1, depth - 1, mu, omega)?;
        return Some((a + b, ma + mb));
    }
    // d log A = d log(scaled) + 2 pi d|Im z|.
    let dlog = C64::new(ratio.norm().ln() + 2.0 * PI * (z1.im.abs() - z0.im.abs()), turn);
    Some((dlog, 0.5 * (z0 + z1) * dlog))
}

/// Winding number of `A` around a closed polygon, with `n` samples per edge
/// refined locally where the phase turns fast, doubling `n` until two
/// consecutive counts agree.
pub(crate) fn polygon_winding(
    vertices: &[C64],
    mu: f64,
    omega: f64,
) -> std::result::Result<(i64, C64), ()> {
    let run = |n: usize| -> Option<Winding> {
        let mut total = C64::new(0.0, 0.0);
        let mut moment = C64::new(0.0, 0.0);
        let m = vertices.len();
        let mut prev_z = vertices[0];
        let (mut prev_v, _) = scaled_eval(prev_z, mu, omega);
        for e in 0..m {
            let (z0, z1) = (vertices[e], vertices[(e + 1) % m]);
            for k in 1..=n {
                let z = z0 + (z1 - z0) * (k as f64 / n as f64);
                let (v, _) = scaled_eval(z, mu, omega);
                if v == C64::new(0.0, 0.0) || prev_v == C64::new(0.0, 0.0) {
                    return None;
                }
                let (dlog, dm) = step_log(prev_z, prev_v, z, v, REFINE_DEPTH, mu, omega)?;
                total += dlog;
                moment += dm;
                prev_z = z;
                prev_v = v;
            }
        }
        Some(Winding {
            count: (total.im / (2.0 * PI)).round() as i64,
            moment: moment / C64::new(0.0, 2.0 * PI),
        })
    };
    let mut n = BASE_SAMPLES;
    let mut last: Option<Winding> = None;
    while n <= MAX_SAMPLES {
        let cur = run(n);
        if let (Some(a), Some(b)) = (&last, &cur) {
            if a.count == b.count {
                return Ok((b.count, b.moment));
            }
        }
        last = cur;
        n *= 2;
    }
    Err(())
}

fn rect_winding(r: &Rect, mu: f64, omega: f64) -> Result<(i64, C64)> {
    let (count, moment) = polygon_winding(&r.vertices(), mu, omega).map_err(|_| r.unstable())?;
    if count < 0 {
        return Err(r.unstable());
    }
    Ok((count, moment))
}

/// Split fractions tried in turn when a cut would pass near a zero.
const SPLITS: [f64; 8] = [0.5371, 0.4613, 0.5887, 0.4129, 0.6411, 0.3593, 0.5127, 0.4877];

fn split(r: &Rect, mu: f64, omega: f64) -> Result<(Rect, Rect)> {
    let along_re = r.width() >= r.height();
    let clearance = CLEARANCE * r.width().min(r.height());
    for f in SPLITS {
        if along_re {
            let x = r.re0 + f * r.width();
            if !segment_hits_zero(C64::new(x, r.im0), C64::new(x, r.im1), clearance, mu, omega) {
                return Ok((Rect { re1: x, ..*r }, Rect { re0: x, ..*r }));
            }
        } else {
            let y = r.im0 + f * r.height();
            if !segment_hits_zero(C64::new(r.re0, y), C64::new(r.re1, y), clearance, mu, omega) {
                return Ok((Rect { im1: y, ..*r }, Rect { im0: y, ..*r }));
            }
        }
    }
    Err(r.unstable())
}

struct Candidate {
    start: C64,
    multiplicity: usize,
    rect: Rect,
}

fn search(
    r: Rect,
    count: i64,
    moment: C64,
    depth: u32,
    mu: f64,
    omega: f64,
) -> Result<Vec<Candidate>> {
    if count == 0 {
        return Ok(vec![]);
    }
    let coarse = r.width().max(r.height()) > CELL * (1.0 + 1e-12);
    let refine = count > 1 && depth < MAX_DEPTH;
    if !coarse && !refine {
        return Ok(vec![Candidate {
            start: moment / count as f64,
            multiplicity: count as usize,
            rect: r,
        }]);
    }
    let (a, b) = split(&r, mu, omega)?;
    let (wa, wb) = rayon::join(|| rect_winding(&a, mu, omega), || rect_winding(&b, mu, omega));
    let ((ca, ma), (cb, mb)) = (wa?, wb?);
    if ca + cb != count {
        return Err(r.unstable());
    }
    let next = if coarse { depth } else { depth + 1 };
    let (ra, rb) = rayon::join(
        || search(a, ca, ma, next, mu, omega),
        || search(b, cb, mb, next, mu, omega),
    );
    let mut out = ra?;
    out.extend(rb?);
    Ok(out)
}

/// Newton refinement of a zero of order `m`, applied to `A^(m-1)` so that
/// the iteration sees a simple zero.
fn refine(start: C64, m: usize, mu: f64, omega: f64) -> C64 {
    let mut z = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..100 {
        let (f, df) = if m == 1 {
            (
                closed_form_determinant(z, mu, omega),
                closed_form_derivative(z, mu, omega),
            )
        } else {
            (
                determinant_derivative(z, mu, omega, m - 1),
                determinant_derivative(z, mu, omega, m),
            )
        };
        if df == C64::new(0.0, 0.0) {
            break;
        }
        let dz = f / df;
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            break;
        }
        z -= dz;
        let step = dz.norm();
        if step <= NEWTON_STEP || (step < 1e-10 && step >= last_step) {
            break;
        }
        last_step = step;
    }
    snap(z)
}

fn snap(z: C64) -> C64 {
    let tol = 1e-12 * z.norm().max(1.0);
    if z.norm() < 1e-9 {
        return C64::new(0.0, 0.0);
    }
    C64::new(
        if z.re.abs() <= tol { 0.0 } else { z.re },
        if z.im.abs() <= tol { 0.0 } else { z.im },
    )
}

/// Moves band edges outward until no edge passes near a zero. Zeros found
/// in the widened margin are dropped later unless they sit on the band edge.
fn clear_boundary(band: &Band, mu: f64, omega: f64) -> Result<Rect> {
    let mut r = Rect {
        re0: band.re_min,
        re1: band.re_max,
        im0: -band.im_max,
        im1: band.im_max,
    };
    let clearance = 1e-3 * (band.re_max - band.re_min).min(2.0 * band.im_max);
    let mut step = 2.0 * clearance;
    for _ in 0..32 {
        let v = r.vertices();
        let hits: Vec<bool> = (0..4)
            .map(|e| segment_hits_zero(v[e], v[(e + 1) % 4], clearance, mu, omega))
            .collect();
        if !hits.iter().any(|h| *h) {
            return Ok(r);
        }
        if hits[0] {
            r.im0 -= step;
        }
        if hits[1] {
            r.re1 += step;
        }
        if hits[2] {
            r.im1 += step;
        }
        if hits[3] {
            r.re0 -= step;
        }
        step *= 1.5;
    }
    Err(r.unstable())
}

fn in_band(z: C64, band: &Band) -> bool {
    let tol = 1e-9 * (1.0 + z.norm());
    z.re >= band.re_min - tol && z.re <= band.re_max + tol && z.im.abs() <= band.im_max + tol
}

/// All zeros of the determinant in `band`, with multiplicities and kernel
/// dimensions. Zeros on the band boundary are included.
pub fn find_spectrum(mu: f64, omega: f64, band: Band) -> Result<SpectrumReport> {
    let regime = classify(mu)?;
    validate_omega(omega)?;
    let rect = clear_boundary(&band, mu, omega)?;
    let (count, moment) = rect_winding(&rect, mu, omega)?;
    let candidates = search(rect, count, moment, 0, mu, omega)?;
    let mut roots: Vec<SpectralRoot> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut z = refine(c.start, c.multiplicity, mu, omega);
        let slack = 1e-6 * (1.0 + c.rect.width().max(c.rect.height()));
        if !c.rect.contains(z, slack) || !is_on_spectrum(z, mu, omega) {
            // The box is already tiny; its moment estimate is the best guess.
            z = snap(c.start);
            if !is_on_spectrum(z, mu, omega) {
                return Err(c.rect.unstable());
            }
        }
        if !in_band(z, &band) {
            continue;
        }
        roots.push(SpectralRoot {
            lambda: z,
            multiplicity: c.multiplicity,
            kernel_dim: kernel_dimension(z, mu, omega),
        });
    }
    symmetrize(&mut roots);
    roots.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    Ok(SpectrumReport {
        roots,
        regime,
        mu,
        omega,
        band,
    })
}

/// Replaces each root in the lower half-plane by the conjugate of its
/// upper partner, so the report is exactly closed under conjugation.
fn symmetrize(roots: &mut [SpectralRoot]) {
    let uppers: Vec<C64> = roots
        .iter()
        .filter(|r| r.lambda.im > 0.0)
        .map(|r| r.lambda)
        .collect();
    for r in roots.iter_mut().filter(|r| r.lambda.im < 0.0) {
        if let Some(u) = uppers
            .iter()
            .find(|u| (u.conj() - r.lambda).norm() <= 1e-9 * (1.0 + u.norm()))
        {
            r.lambda = u.conj();
        }
    }
}

/// Order of the zero of the determinant at `lambda0`, read off as the
/// winding number on a circle of the given radius.
pub fn zero_order_at(lambda0: C64, mu: f64, omega: f64, radius: f64) -> Result<usize> {
    validate_mu(mu)?;
    validate_omega(omega)?;
    let mut last = None;
    let mut n = BASE_SAMPLES;
    while n <= MAX_SAMPLES {
        let pts: Vec<C64> = (0..n)
            .map(|k| lambda0 + radius * C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        let mut arg = 0.0;
        for k in 0..n {
            let a = closed_form_determinant(pts[k], mu, omega);
            let b = closed_form_determinant(pts[(k + 1) % n], mu, omega);
            arg += (b / a).arg();
        }
        let w = (arg / (2.0 * PI)).round();
        if w < 0.0 || !w.is_finite() {
            return Err(Error::Contour {
                center: lambda0,
                radius,
            });
        }
        if last == Some(w) {
            return Ok(w as usize);
        }
        last = Some(w);
        n *= 2;
    }
    Err(Error::Contour {
        center: lambda0,
        radius,
    })
}

/// Order of the zero at `lambda = 0`, probed on the circle of radius `1e-3`.
pub fn zero_order(mu: f64, omega: f64) -> Result<usize> {
    zero_order_at(C64::new(0.0, 0.0), mu, omega, 1e-3)
}

/// A height beyond which the determinant has no zeros: there
/// `|mu+1| sinh(pi y) > |mu-1| cosh(|pi-omega| y)`.
pub fn imaginary_bound(mu: f64, omega: f64) -> f64 {
    let k = (PI - omega).abs();
    let (p, q) = ((mu + 1.0).abs(), (mu - 1.0).abs());
    let mut y: f64 = 1.0;
    while p * (PI * y).sinh() <= q * (k * y).cosh() && y < 1e3 {
        y *= 1.25;
    }
    y
}

/// A term `r^lambda0 log^q r phi(theta)`, `q <= log_power_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTermSpec {
    pub lambda0: C64,
    pub multiplicity: usize,
    pub kernel_dim: usize,
    pub log_power_max: usize,
    pub angular: AngularFunction,
    pub in_h1: bool,
}

/// Singular terms with `0 <= Re lambda0 < 1`, for negative contrast.
pub fn singular_term_inventory(mu: f64, omega: f64) -> Result<Vec<SingularTermSpec>> {
    validate_mu(mu)?;
    validate_omega(omega)?;
    if mu > 0.0 {
        return Err(Error::WrongRegime {
            mu,
            expected: "negative contrast",
        });
    }
    let band = Band::new(-0.05, 0.95, imaginary_bound(mu, omega) + 1.0)?;
    let report = find_spectrum(mu, omega, band)?;
    let mut out = Vec::new();
    for root in report.roots.iter().filter(|r| r.lambda.re >= 0.0 && r.lambda.re < 1.0) {
        let multiplicity = if root.lambda == C64::new(0.0, 0.0) {
            zero_order(mu, omega)?
        } else {
            root.multiplicity
        };
        let basis = kernel_at(root.lambda, mu, omega)?;
        let angular = basis[0].clone();
        let in_h1 = root.lambda.re > 0.0
            || (root.lambda == C64::new(0.0, 0.0) && angular.is_constant(1e-8));
        out.push(SingularTermSpec {
            lambda0: root.lambda,
            multiplicity,
            kernel_dim: basis.len(),
            log_power_max: multiplicity.saturating_sub(basis.len()),
            angular,
            in_h1,
        });
    }
    Ok(out)
}

/// Terms that survive in `H^1` beyond the constant.
pub fn h1_singular_terms(inventory: &[SingularTermSpec]) -> Vec<&SingularTermSpec> {
    inventory
        .iter()
        .filter(|t| t.in_h1 && t.lambda0 != C64::new(0.0, 0.0))
        .collect()
}

/// Half the distance from the imaginary axis to the nearest zero with
/// `Re lambda < 0`, capped at `0.1`.
pub fn strip_epsilon(mu: f64, omega: f64) -> Result<f64> {
    let band = Band::new(-0.25, 0.05, imaginary_bound(mu, omega) + 1.0)?;
    let report = find_spectrum(mu, omega, band)?;
    let nearest = report
        .roots
        .iter()
        .filter(|r| r.lambda.re < 0.0)
        .map(|r| -r.lambda.re)
        .fold(f64::INFINITY, f64::min);
    Ok((0.5 * nearest).min(0.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    /// Right-angle zeros enumerated from the factorisation
    /// `b +- c = sin(pi l/2) (2(mu+1) cos(pi l/2) +- (mu-1))`.
    fn right_angle_zeros(mu: f64, re: (f64, f64)) -> Vec<C64> {
        let r = rho(mu);
        let t = if r <= 1.0 {
            C64::new((2.0 / PI) * r.acos(), 0.0)
        } else {
            C64::new(0.0, (2.0 / PI) * r.acosh())
        };
        let mut out = vec![];
        for k in -10i32..=10 {
            let base = 2.0 * k as f64;
            out.push(C64::new(base, 0.0));
            out.push(C64::new(base, 0.0));
            out.push(base + t);
            out.push(base - t);
        }
        out.retain(|z| z.re >= re.0 && z.re <= re.1);
        out
    }

    #[test]
    fn lemma_values() {
        assert!(lambda1(-1.0 / 3.0).unwrap().abs() < 1e-12);
        assert!((lambda1(-1e-14).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(eta(-1.0 / 3.0).unwrap().abs() < 1e-12);
        assert!(eta(-3.0).unwrap().abs() < 1e-12);
        assert!((eta(-0.5).unwrap() - eta(-2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tall_narrow_bands_around_a_root() {
        let l1 = lambda1(-5.0).unwrap();
        let band = Band::new(l1 - 0.01, l1 + 0.01, 128.0).unwrap();
        let report = find_spectrum(-5.0, FRAC_PI_2, band).unwrap();
        assert_eq!(report.roots.len(), 1);
        assert!((report.roots[0].lambda.re - l1).abs() < 1e-12);
        let band = Band::new(-0.01, 0.01, 8.0).unwrap();
        assert_eq!(find_spectrum(-2.0, FRAC_PI_2, band).unwrap().zero_count(), 4);
    }

    #[test]
    fn wrong_regimes() {
        assert!(matches!(lambda1(-2.0), Err(Error::WrongRegime { .. })));
        assert!(matches!(eta(-5.0), Err(Error::WrongRegime { .. })));
        assert!(matches!(eta(-1.0), Err(Error::ExcludedContrast { .. })));
        assert!(matches!(classify(-1.0), Err(Error::ExcludedContrast { .. })));
        assert!(classify(0.0).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(-10.0).unwrap(), Regime::IndexConjecturedYes);
        assert_eq!(classify(-1.0 / 3.0).unwrap(), Regime::IndexConjecturedNo);
        assert_eq!(classify(-3.0).unwrap(), Regime::IndexConjecturedNo);
        assert_eq!(classify(5.0).unwrap(), Regime::EllipticContrast);
        assert_eq!(classify(-0.3333).unwrap(), Regime::IndexConjecturedYes);
    }

    #[test]
    fn exponents_are_zeros() {
        let l = lambda1(-5.0).unwrap();
        assert!(closed_form_determinant(C64::new(l, 0.0), -5.0, FRAC_PI_2).norm() < 1e-13);
        let e = eta(-2.0).unwrap();
        assert!(closed_form_determinant(C64::new(0.0, e), -2.0, FRAC_PI_2).norm() < 1e-12);
    }

    #[test]
    fn eta_blows_up_near_minus_one() {
        let mut prev = 0.0;
        for k in 1..10 {
            let v = eta(-1.0 + 10f64.powi(-k)).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn spectrum_mu_minus_five() {
        let r = find_spectrum(-5.0, FRAC_PI_2, Band::new(-0.1, 1.0, 5.0).unwrap()).unwrap();
        assert_eq!(r.roots.len(), 2, "{:?}", r.roots);
        assert_eq!(r.roots[0].lambda, C64::new(0.0, 0.0));
        assert_eq!(r.roots[0].multiplicity, 2);
        assert_eq!(r.roots[0].kernel_dim, 1);
        assert!((r.roots[1].lambda - lambda1(-5.0).unwrap()).norm() < 1e-10);
        assert_eq!(r.roots[1].multiplicity, 1);
        assert_eq!(r.regime, Regime::IndexConjecturedYes);
    }

    #[test]
    fn spectrum_mu_minus_two() {
        let r = find_spectrum(-2.0, FRAC_PI_2, Band::new(-0.1, 1.0, 5.0).unwrap()).unwrap();
        let zs: Vec<C64> = r.roots.iter().map(|x| x.lambda).collect();
        assert_eq!(zs.len(), 3, "{zs:?}");
        let e = eta(-2.0).unwrap();
        assert!((zs[0] - C64::new(0.0, -e)).norm() < 1e-10);
        assert_eq!(zs[1], C64::new(0.0, 0.0));
        assert!((zs[2] - C64::new(0.0, e)).norm() < 1e-10);
        assert_eq!(zs[0], zs[2].conj());
    }

    #[test]
    fn even_integers_and_wide_band() {
        let mu = -7.0;
        let r = find_spectrum(mu, FRAC_PI_2, Band::new(-4.5, 4.5, 3.0).unwrap()).unwrap();
        let expect = right_angle_zeros(mu, (-4.5, 4.5));
        assert_eq!(r.zero_count(), expect.len());
        for z in expect {
            assert!(r.roots.iter().any(|x| (x.lambda - z).norm() < 1e-9), "{z}");
        }
        let two = r.roots.iter().find(|x| (x.lambda - 2.0).norm() < 1e-9).unwrap();
        assert_eq!(two.multiplicity, 2);
        assert_eq!(two.kernel_dim, 2);
    }

    #[test]
    fn boundary_roots_are_counted() {
        let r = find_spectrum(-5.0, FRAC_PI_2, Band::new(0.0, 0.8, 1.0).unwrap()).unwrap();
        assert_eq!(r.roots.len(), 2);
    }

    #[test]
    fn order_at_zero() {
        assert_eq!(zero_order(-5.0, FRAC_PI_2).unwrap(), 2);
        assert_eq!(zero_order(-1.0 / 3.0, FRAC_PI_2).unwrap(), 4);
        assert_eq!(zero_order(0.5, 1.0).unwrap(), 2);
    }

    #[test]
    fn inventory_yes_regime() {
        let inv = singular_term_inventory(-5.0, FRAC_PI_2).unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[0].lambda0, C64::new(0.0, 0.0));
        assert_eq!(inv[0].log_power_max, 1);
        assert!(inv[0].in_h1);
        assert!((inv[1].lambda0.re - lambda1(-5.0).unwrap()).abs() < 1e-10);
        assert_eq!(inv[1].log_power_max, 0);
        assert!(inv[1].in_h1);
        assert_eq!(h1_singular_terms(&inv).len(), 1);
    }

    #[test]
    fn inventory_no_regime() {
        let inv = singular_term_inventory(-2.0, FRAC_PI_2).unwrap();
        assert_eq!(inv.len(), 3);
        assert!(h1_singular_terms(&inv).is_empty());
        for t in &inv {
            assert_eq!(t.in_h1, t.lambda0 == C64::new(0.0, 0.0));
        }
        let inv = singular_term_inventory(-1.0 / 3.0, FRAC_PI_2).unwrap();
        assert_eq!(inv.len(), 1);
        assert!(h1_singular_terms(&inv).is_empty());
    }

    #[test]
    fn epsilon_choice() {
        assert_eq!(strip_epsilon(-5.0, FRAC_PI_2).unwrap(), 0.1);
        let mu = -0.33;
        let l = lambda1(mu).unwrap();
        assert!((strip_epsilon(mu, FRAC_PI_2).unwrap() - 0.5 * l).abs() < 1e-10);
    }

    #[test]
    fn imaginary_bound_holds() {
        let y = imaginary_bound(-1.05, 1.0);
        let r = find_spectrum(-1.05, 1.0, Band::new(-0.5, 0.5, y + 2.0).unwrap()).unwrap();
        assert!(r.roots.iter().all(|x| x.lambda.im.abs() <= y));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn inversion_symmetry(mu in -50.0f64..-0.02) {
            prop_assume!((mu + 1.0).abs() > 1e-6);
            if let Ok(l) = lambda1(mu) {
                prop_assert!((lambda1(1.0 / mu).unwrap() - l).abs() < 1e-12);
            }
            if let Ok(e) = eta(mu) {
                prop_assert!((eta(1.0 / mu).unwrap() - e).abs() < 1e-12);
            }
        }

        #[test]
        fn lambda1_nondecreasing(a in -1.0f64/3.0..-1e-9, b in -1.0f64/3.0..-1e-9) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(lambda1(lo).unwrap() <= lambda1(hi).unwrap());
        }

        #[test]
        fn eta_nonincreasing(a in -0.999f64..=-1.0/3.0, b in -0.999f64..=-1.0/3.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(eta(lo).unwrap() >= eta(hi).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn roots_match_closed_forms_and_winding(mu in -12.0f64..-0.05) {
            prop_assume!((mu + 1.0).abs() > 0.05);
            let band = Band::new(-0.3, 2.7, 4.0).unwrap();
            let r = find_spectrum(mu, FRAC_PI_2, band).unwrap();
            let expect: Vec<C64> = right_angle_zeros(mu, (-0.3, 2.7))
                .into_iter()
                .filter(|z| z.im.abs() <= 4.0)
                .collect();
            prop_assert_eq!(r.zero_count(), expect.len());
            for root in &r.roots {
                prop_assert!(closed_form_determinant(root.lambda, mu, FRAC_PI_2).norm() <= 1e-10);
                prop_assert!(expect.iter().any(|z| (z - root.lambda).norm() < 1e-10));
                if root.lambda.im != 0.0 {
                    prop_assert!(r.roots.iter().any(|o| o.lambda == root.lambda.conj()));
                }
            }
        }
    }
}
