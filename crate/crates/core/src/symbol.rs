//! The angular operator `a(lambda^2 + d^2/dtheta^2)` with transmission
//! conditions on the two interface rays: matrix assembly, determinant,
//! solves and kernels.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::angular::{AngularFunction, AngularGrid, AngularSamples, ParticularPart};
use crate::domain::{validate_mu, validate_omega, CornerConfig, MaterialPair, Side, TWO_PI};
use crate::error::{Error, Result};
use crate::quadrature::{fornberg_weights, gauss_legendre_on};

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative tolerance deciding whether `lambda` lies on the spectrum.
pub const ROOT_TOLERANCE: f64 = 1e-9;

/// Relative singular-value threshold for kernel vectors.
const KERNEL_SV_THRESHOLD: f64 = 1e-6;

/// `(mu^2+1) sin(l w) sin(l(2pi-w)) + 2 mu (1 - cos(l w) cos(l(2pi-w)))`.
pub fn closed_form_determinant(lambda: C64, mu: f64, omega: f64) -> C64 {
    let p = lambda * omega;
    let q = lambda * (TWO_PI - omega);
    (mu * mu + 1.0) * p.sin() * q.sin() + 2.0 * mu * (ONE - p.cos() * q.cos())
}

/// Derivative in `lambda` of [`closed_form_determinant`].
pub fn closed_form_derivative(lambda: C64, mu: f64, omega: f64) -> C64 {
    let w2 = TWO_PI - omega;
    let p = lambda * omega;
    let q = lambda * w2;
    let (sp, cp, sq, cq) = (p.sin(), p.cos(), q.sin(), q.cos());
    (mu * mu + 1.0) * (omega * cp * sq + w2 * sp * cq) + 2.0 * mu * (omega * sp * cq + w2 * cp * sq)
}

/// The factors `b = (mu+1) sin(lambda pi)` and `c = (mu-1) sin(lambda(pi-omega))`;
/// the determinant is `(b+c)(b-c)`.
pub fn factored_determinant(lambda: C64, mu: f64, omega: f64) -> (C64, C64) {
    (
        (mu + 1.0) * (lambda * PI).sin(),
        (mu - 1.0) * (lambda * (PI - omega)).sin(),
    )
}

/// Derivatives of the two factors of [`factored_determinant`].
pub fn factored_derivative(lambda: C64, mu: f64, omega: f64) -> (C64, C64) {
    (
        (mu + 1.0) * PI * (lambda * PI).cos(),
        (mu - 1.0) * (PI - omega) * (lambda * (PI - omega)).cos(),
    )
}

/// `n`-th derivative in `lambda` of the determinant, through the factors:
/// `A^(n) = sum_k C(n,k) (b^(k) b^(n-k) - c^(k) c^(n-k))`.
pub fn determinant_derivative(lambda: C64, mu: f64, omega: f64, order: usize) -> C64 {
    let factor_derivs = |scale: f64, freq: f64| -> Vec<C64> {
        (0..=order)
            .map(|k| scale * freq.powi(k as i32) * (lambda * freq + k as f64 * 0.5 * PI).sin())
            .collect()
    };
    let b = factor_derivs(mu + 1.0, PI);
    let c = factor_derivs(mu - 1.0, PI - omega);
    let mut binom = 1.0;
    let mut acc = ZERO;
    for k in 0..=order {
        acc += binom * (b[k] * b[order - k] - c[k] * c[order - k]);
        binom = binom * (order - k) as f64 / (k + 1) as f64;
    }
    acc
}

/// `sin(z) * exp(-p)`, without forming `sin(z)` when `|Im z|` is large.
fn sin_scaled(z: C64, p: f64) -> C64 {
    let y = z.im.abs();
    let grow = (y - p).exp();
    let shrink = (-y - p).exp();
    let ch = 0.5 * (grow + shrink);
    let sh = 0.5 * (grow - shrink) * z.im.signum();
    C64::new(z.re.sin() * ch, z.re.cos() * sh)
}

/// Factors `(b, c)` multiplied by `exp(-pi |Im lambda|)`. The determinant
/// computed from them is `A(lambda) exp(-2 pi |Im lambda|)`, finite for any
/// finite `lambda`.
pub fn scaled_factors(lambda: C64, mu: f64, omega: f64) -> (C64, C64) {
    let p = PI * lambda.im.abs();
    (
        (mu + 1.0) * sin_scaled(lambda * PI, p),
        (mu - 1.0) * sin_scaled(lambda * (PI - omega), p),
    )
}

/// `cos(z) * exp(-p)`.
fn cos_scaled(z: C64, p: f64) -> C64 {
    let y = z.im.abs();
    let grow = (y - p).exp();
    let shrink = (-y - p).exp();
    let ch = 0.5 * (grow + shrink);
    let sh = 0.5 * (grow - shrink) * z.im.signum();
    C64::new(z.re.cos() * ch, -z.re.sin() * sh)
}

/// `A'(lambda) / A(lambda)`, overflow-free; infinite at a zero.
pub fn log_derivative(lambda: C64, mu: f64, omega: f64) -> C64 {
    let p = PI * lambda.im.abs();
    let (b, c) = scaled_factors(lambda, mu, omega);
    let db = (mu + 1.0) * PI * cos_scaled(lambda * PI, p);
    let dc = (mu - 1.0) * (PI - omega) * cos_scaled(lambda * (PI - omega), p);
    let den = (b + c) * (b - c);
    if den == ZERO {
        return C64::new(f64::INFINITY, 0.0);
    }
    2.0 * (b * db - c * dc) / den
}

/// `A(lambda) exp(-2 pi |Im lambda|)`.
pub fn scaled_determinant(lambda: C64, mu: f64, omega: f64) -> C64 {
    let (b, c) = scaled_factors(lambda, mu, omega);
    (b + c) * (b - c)
}

/// `|A(lambda)| <= 1e-9 max(1, |b|^2 + |c|^2)`, evaluated in scaled form.
pub fn is_on_spectrum(lambda: C64, mu: f64, omega: f64) -> bool {
    let (b, c) = scaled_factors(lambda, mu, omega);
    let floor = (-2.0 * PI * lambda.im.abs()).exp();
    ((b + c) * (b - c)).norm() <= ROOT_TOLERANCE * floor.max(b.norm_sqr() + c.norm_sqr())
}

/// The four transmission conditions as a 4x4 matrix acting on
/// `(alpha-, beta-, alpha+, beta+)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    pub entries: Matrix4<C64>,
    pub lambda: C64,
    pub mu: f64,
    pub omega: f64,
}

/// Assembles the matrix in the `cos`/`sin` basis. Rows: `W` continuous at
/// `0 = 2 pi`, the flux continuous there, `W` continuous at `omega`, the flux
/// continuous there. Flux rows are divided by `lambda`, except at
/// `lambda = 0` where the basis is `{1, theta}`.
pub fn assemble_matrix(lambda: C64, mu: f64, omega: f64) -> Result<TransmissionMatrix> {
    check_inputs(lambda, mu, omega)?;
    let entries = if lambda == ZERO {
        let w = C64::new(omega, 0.0);
        let m = C64::new(mu, 0.0);
        Matrix4::new(
            -ONE, ZERO, ONE, C64::new(TWO_PI, 0.0),
            ZERO, -ONE, ZERO, m,
            -ONE, -w, ONE, w,
            ZERO, -ONE, ZERO, m,
        )
    } else {
        let (s2, c2) = ((lambda * TWO_PI).sin(), (lambda * TWO_PI).cos());
        let (sw, cw) = ((lambda * omega).sin(), (lambda * omega).cos());
        Matrix4::new(
            -ONE, ZERO, c2, s2,
            ZERO, -ONE, -mu * s2, mu * c2,
            -cw, -sw, cw, sw,
            sw, -cw, -mu * sw, mu * cw,
        )
    };
    Ok(TransmissionMatrix {
        entries,
        lambda,
        mu,
        omega,
    })
}

fn check_inputs(lambda: C64, mu: f64, omega: f64) -> Result<()> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
    }
    if !mu.is_finite() || mu == 0.0 {
        return Err(Error::InvalidContrast {
            mu,
            reason: "contrast must be finite and nonzero",
        });
    }
    validate_omega(omega)?;
    Ok(())
}

impl TransmissionMatrix {
    /// Plain LU determinant of the stored entries. Loses relative accuracy
    /// once `|Im lambda|` exceeds a few units, because the columns grow like
    /// `exp(2 pi |Im lambda|)` while the determinant does not cancel that.
    pub fn lu_determinant(&self) -> C64 {
        self.entries.lu().determinant()
    }

    /// Determinant of the same operator, computed in the decaying
    /// exponential basis and mapped back by the exact change-of-basis factor.
    pub fn determinant(&self) -> C64 {
        if self.lambda == ZERO {
            return self.lu_determinant();
        }
        let basis = StableBasis::new(self.lambda, self.omega);
        let m = basis.matrix(self.mu);
        m.lu().determinant() / (-4.0 * (basis.kappa * TWO_PI).exp())
    }
}

/// Per-sector basis `exp(kappa (theta - a))`, `exp(kappa (b - theta))` with
/// `kappa = i s lambda`, `s = sign(Im lambda)`, so both decay into the sector.
#[derive(Debug, Clone, Copy)]
struct StableBasis {
    lambda: C64,
    kappa: C64,
    sign: f64,
    omega: f64,
    /// `exp(kappa L)` for the minus and plus sectors.
    e_minus: C64,
    e_plus: C64,
}

impl StableBasis {
    fn new(lambda: C64, omega: f64) -> Self {
        let sign = if lambda.im < 0.0 { -1.0 } else { 1.0 };
        let kappa = I * sign * lambda;
        Self {
            lambda,
            kappa,
            sign,
            omega,
            e_minus: (kappa * omega).exp(),
            e_plus: (kappa * (TWO_PI - omega)).exp(),
        }
    }

    /// Transmission matrix acting on `(A-, B-, A+, B+)`.
    fn matrix(&self, mu: f64) -> Matrix4<C64> {
        let k = self.kappa / self.lambda;
        let (em, ep) = (self.e_minus, self.e_plus);
        Matrix4::new(
            -ONE, -em, ep, ONE,
            -k, k * em, mu * k * ep, -mu * k,
            -em, -ONE, ONE, ep,
            -k * em, k, mu * k, -mu * k * ep,
        )
    }

    /// Global `(alpha, beta)` of `A u1 + B u2` on the sector `[a, b]`.
    fn to_global(&self, a: f64, b: f64, coef_a: C64, coef_b: C64) -> [C64; 2] {
        let p = coef_a * (-self.kappa * a).exp();
        let q = coef_b * (self.kappa * b).exp();
        [p + q, I * self.sign * (p - q)]
    }

    fn sector_e(&self, side: Side) -> C64 {
        match side {
            Side::Minus => self.e_minus,
            Side::Plus => self.e_plus,
        }
    }

    fn sector(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Minus => (0.0, self.omega),
            Side::Plus => (self.omega, TWO_PI),
        }
    }
}

/// Monomial coefficients of the cubic interpolant on a panel: row `k` gives
/// the weights of the four stencil values in the coefficient of `x^k`, for
/// the panel starting at stencil offset `o`.
fn panel_monomials() -> &'static [[[f64; 4]; 4]; 3] {
    static TABLE: OnceLock<[[[f64; 4]; 4]; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[[0.0; 4]; 4]; 3];
        let fact = [1.0, 1.0, 2.0, 6.0];
        for (o, slot) in t.iter_mut().enumerate() {
            let w = fornberg_weights(o as f64, &[0.0, 1.0, 2.0, 3.0], 3);
            for k in 0..4 {
                for i in 0..4 {
                    slot[k][i] = w[k][i] / fact[k];
                }
            }
        }
        t
    })
}

/// `int_0^1 y^k exp(-c y) dy` for `k = 0..3`, with `Re c >= 0`.
fn exp_moments(c: C64) -> [C64; 4] {
    if c.norm() < 4.0 {
        let (x, w) = gauss_legendre_on(16, 0.0, 1.0);
        let mut m = [ZERO; 4];
        for (xi, wi) in x.iter().zip(&w) {
            let e = (-c * *xi).exp() * *wi;
            let mut p = 1.0;
            for slot in m.iter_mut() {
                *slot += e * p;
                p *= xi;
            }
        }
        m
    } else {
        // Upward recursion is stable once |c| exceeds the moment order.
        let e = (-c).exp();
        let mut m = [ZERO; 4];
        m[0] = (ONE - e) / c;
        for k in 1..4 {
            m[k] = (k as f64 * m[k - 1] - e) / c;
        }
        m
    }
}

/// Values and derivatives of `W_p`, the decaying-Green solution of
/// `W'' - kappa^2 W = f` on a uniform sector grid, with `f` replaced by its
/// piecewise-cubic interpolant and the panel integrals done exactly.
fn green_particular(f: &[C64], h: f64, kappa: C64) -> (Vec<C64>, Vec<C64>) {
    let n = f.len();
    let table = panel_monomials();
    let c = -kappa * h;
    let mom = exp_moments(c);
    let decay = (-c).exp();
    let mut p = vec![ZERO; n - 1];
    let mut q = vec![ZERO; n - 1];
    for j in 0..n - 1 {
        let s = j.saturating_sub(1).min(n - 4);
        let t = &table[j - s];
        let mut a = [ZERO; 4];
        for k in 0..4 {
            for i in 0..4 {
                a[k] += t[k][i] * f[s + i];
            }
        }
        // p(1 - y) in monomials of y.
        let b = [
            a[0] + a[1] + a[2] + a[3],
            -(a[1] + 2.0 * a[2] + 3.0 * a[3]),
            a[2] + 3.0 * a[3],
            -a[3],
        ];
        let mut pj = ZERO;
        let mut qj = ZERO;
        for k in 0..4 {
            pj += b[k] * mom[k];
            qj += a[k] * mom[k];
        }
        p[j] = pj * h;
        q[j] = qj * h;
    }
    let mut left = vec![ZERO; n];
    let mut right = vec![ZERO; n];
    for j in 0..n - 1 {
        left[j + 1] = decay * left[j] + p[j];
    }
    for j in (0..n - 1).rev() {
        right[j] = decay * right[j + 1] + q[j];
    }
    let values = left
        .iter()
        .zip(&right)
        .map(|(l, r)| (l + r) / (2.0 * kappa))
        .collect();
    let derivs = left.iter().zip(&right).map(|(l, r)| (l - r) * 0.5).collect();
    (values, derivs)
}

/// Solution of the symbol equation in the stable representation.
struct StableSolution {
    basis: StableBasis,
    /// `(A-, B-, A+, B+)`.
    coeffs: Vector4<C64>,
    particular: [(Vec<C64>, Vec<C64>); 2],
}

fn solve_stable(
    materials: &MaterialPair,
    lambda: C64,
    grid: &AngularGrid,
    rhs: &AngularSamples,
) -> Result<StableSolution> {
    let corner = grid.corner();
    let omega = corner.omega();
    let mu = materials.mu();
    let basis = StableBasis::new(lambda, omega);
    let mut particular: [(Vec<C64>, Vec<C64>); 2] = Default::default();
    for (slot, side) in particular.iter_mut().zip(Side::BOTH) {
        let a = materials.coefficient(side);
        let f: Vec<C64> = rhs.side(side).iter().map(|v| v / a).collect();
        *slot = green_particular(&f, grid.spacing(side), basis.kappa);
    }
    let (pm, dm) = &particular[0];
    let (pp, dp) = &particular[1];
    let last = pm.len() - 1;
    let r = Vector4::new(
        -(pp[last] - pm[0]),
        -(mu * dp[last] - dm[0]) / lambda,
        -(pp[0] - pm[last]),
        -(mu * dp[0] - dm[last]) / lambda,
    );
    let coeffs = basis
        .matrix(mu)
        .lu()
        .solve(&r)
        .ok_or(Error::NearSingularSymbol {
            lambda,
            modulus: closed_form_determinant(lambda, mu, omega).norm(),
        })?;
    if coeffs.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NearSingularSymbol {
            lambda,
            modulus: closed_form_determinant(lambda, mu, omega).norm(),
        });
    }
    Ok(StableSolution {
        basis,
        coeffs,
        particular,
    })
}

/// Solves `a(lambda^2 + d^2/dtheta^2) W = F` on both sectors with the four
/// transmission conditions. `rhs` is sampled on a uniform angular grid;
/// `F` is interpolated by piecewise cubics between nodes.
pub fn solve_symbol(
    materials: &MaterialPair,
    lambda: C64,
    corner: CornerConfig,
    rhs: &AngularSamples,
) -> Result<AngularFunction> {
    let mu = materials.mu();
    check_inputs(lambda, mu, corner.omega())?;
    if rhs.grid.corner() != corner {
        return Err(Error::Domain("right-hand side sampled for another corner".into()));
    }
    if lambda == ZERO || is_on_spectrum(lambda, mu, corner.omega()) {
        return Err(Error::NearSingularSymbol {
            lambda,
            modulus: closed_form_determinant(lambda, mu, corner.omega()).norm(),
        });
    }
    let grid = rhs.grid;
    let sol = solve_stable(materials, lambda, &grid, rhs)?;
    let c = sol.coeffs;
    let basis = sol.basis;
    let (am, bm) = basis.sector(Side::Minus);
    let (ap, bp) = basis.sector(Side::Plus);
    let minus = basis.to_global(am, bm, c[0], c[1]);
    let plus = basis.to_global(ap, bp, c[2], c[3]);
    if minus.iter().chain(&plus).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Domain(format!(
            "trigonometric coefficients overflow at lambda = {lambda}"
        )));
    }
    let [(vm, dm), (vp, dp)] = sol.particular;
    let particular = ParticularPart {
        grid,
        values: AngularSamples {
            grid,
            minus: vm,
            plus: vp,
        },
        derivatives: AngularSamples {
            grid,
            minus: dm,
            plus: dp,
        },
    };
    Ok(AngularFunction::homogeneous(lambda, corner, minus, plus).with_particular(particular))
}

/// Reusable solver returning nodal samples only. Stable for large
/// `|Im lambda|`, where the trigonometric representation overflows.
#[derive(Debug, Clone, Copy)]
pub struct SymbolSolver {
    pub materials: MaterialPair,
    pub grid: AngularGrid,
}

impl SymbolSolver {
    pub fn new(materials: MaterialPair, grid: AngularGrid) -> Self {
        Self { materials, grid }
    }

    /// Nodal values of the solution, in flat order (minus nodes first).
    pub fn solve_samples(&self, lambda: C64, rhs: &AngularSamples) -> Result<Vec<C64>> {
        if lambda == ZERO {
            return Err(Error::NearSingularSymbol {
                lambda,
                modulus: 0.0,
            });
        }
        let sol = solve_stable(&self.materials, lambda, &self.grid, rhs)?;
        let mut out = Vec::with_capacity(self.grid.total());
        for (idx, side) in Side::BOTH.into_iter().enumerate() {
            let (a, b) = sol.basis.sector(side);
            let e = sol.basis.sector_e(side);
            let (ca, cb) = (sol.coeffs[2 * idx], sol.coeffs[2 * idx + 1]);
            let (vals, _) = &sol.particular[idx];
            let len = b - a;
            for (j, v) in vals.iter().enumerate() {
                let theta = self.grid.node(side, j);
                let u1 = (sol.basis.kappa * (theta - a)).exp();
                let u2 = (sol.basis.kappa * (b - theta)).exp();
                out.push(v + ca * u1 + cb * u2);
                debug_assert!(len > 0.0 && e.norm() <= 1.0 + 1e-12);
            }
        }
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NearSingularSymbol {
                lambda,
                modulus: closed_form_determinant(lambda, self.materials.mu(), self.grid.corner().omega())
                    .norm(),
            });
        }
        Ok(out)
    }
}

/// Residuals of the four transmission conditions, in row order.
pub fn transmission_residuals(w: &AngularFunction, materials: &MaterialPair) -> [C64; 4] {
    let omega = w.corner().omega();
    let (a_p, a_m) = (materials.a_plus(), materials.a_minus());
    let (v0, d0) = w.eval_with_derivative(Side::Minus, 0.0);
    let (v2, d2) = w.eval_with_derivative(Side::Plus, TWO_PI);
    let (vm, dm) = w.eval_with_derivative(Side::Minus, omega);
    let (vp, dp) = w.eval_with_derivative(Side::Plus, omega);
    [v2 - v0, a_p * d2 - a_m * d0, vp - vm, a_p * dp - a_m * dm]
}

/// Singular values of the kernel matrix in decreasing order, together with
/// the right singular vectors (columns, same order).
fn kernel_svd(lambda: C64, mu: f64, omega: f64) -> (Vec<f64>, Vec<Vector4<C64>>) {
    let m = if lambda == ZERO {
        assemble_matrix(lambda, mu, omega)
            .map(|t| t.entries)
            .unwrap_or_else(|_| Matrix4::zeros())
    } else {
        StableBasis::new(lambda, omega).matrix(mu)
    };
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut pairs: Vec<(f64, Vector4<C64>)> = (0..4)
        .map(|i| {
            let row = v_t.row(i);
            (svd.singular_values[i], Vector4::new(row[0], row[1], row[2], row[3]).conjugate())
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.into_iter().unzip()
}

/// Singular values of the (balanced) transmission matrix, largest first.
pub fn singular_values(lambda: C64, mu: f64, omega: f64) -> Vec<f64> {
    kernel_svd(lambda, mu, omega).0
}

/// Dimension of the kernel at a spectrum point.
pub fn kernel_dimension(lambda: C64, mu: f64, omega: f64) -> usize {
    let sv = singular_values(lambda, mu, omega);
    let top = sv[0].max(f64::MIN_POSITIVE);
    sv.iter().filter(|s| **s <= KERNEL_SV_THRESHOLD * top).count()
}

/// Orthonormal basis (in `L^2(G)`) of the kernel at a spectrum point.
pub fn kernel_at(lambda0: C64, mu: f64, omega: f64) -> Result<Vec<AngularFunction>> {
    check_inputs(lambda0, mu, omega)?;
    validate_mu(mu)?;
    if !is_on_spectrum(lambda0, mu, omega) {
        return Err(Error::NotARoot {
            lambda: lambda0,
            modulus: closed_form_determinant(lambda0, mu, omega).norm(),
        });
    }
    let corner = CornerConfig::new(omega)?;
    let (sv, vecs) = kernel_svd(lambda0, mu, omega);
    let top = sv[0].max(f64::MIN_POSITIVE);
    let mut raw: Vec<AngularFunction> = sv
        .iter()
        .zip(&vecs)
        .filter(|(s, _)| **s <= KERNEL_SV_THRESHOLD * top)
        .map(|(_, v)| {
            if lambda0 == ZERO {
                AngularFunction::homogeneous(lambda0, corner, [v[0], v[1]], [v[2], v[3]])
            } else {
                let basis = StableBasis::new(lambda0, omega);
                let minus = basis.to_global(0.0, omega, v[0], v[1]);
                let plus = basis.to_global(omega, TWO_PI, v[2], v[3]);
                AngularFunction::homogeneous(lambda0, corner, minus, plus)
            }
        })
        .collect();
    if raw.is_empty() {
        return Err(Error::NotARoot {
            lambda: lambda0,
            modulus: closed_form_determinant(lambda0, mu, omega).norm(),
        });
    }
    // Gram-Schmidt in L^2(G), then a phase making the dominant coefficient
    // real and positive.
    let mut basis: Vec<AngularFunction> = Vec::with_capacity(raw.len());
    for f in raw.drain(..) {
        let mut g = f;
        for e in &basis {
            let proj = g.inner(e);
            g = g.minus_scaled(e, proj);
        }
        let norm = g.l2_norm();
        if norm > 0.0 {
            basis.push(g.scaled(C64::new(1.0 / norm, 0.0)));
        }
    }
    Ok(basis.into_iter().map(fix_phase).collect())
}

fn fix_phase(f: AngularFunction) -> AngularFunction {
    let coeffs: Vec<C64> = Side::BOTH.iter().flat_map(|s| f.coeffs(*s)).collect();
    let dominant = coeffs
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    if dominant.norm() == 0.0 {
        return f;
    }
    f.scaled(dominant.conj() / dominant.norm())
}
