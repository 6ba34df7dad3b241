//! Smooth cutoffs and manufactured data: transmission-compatible angular
//! profiles, regular radial data and planted singular functions.

use num_complex::Complex64;

use crate::angular::AngularFunction;
use crate::domain::{CornerConfig, MaterialPair, Side};
use crate::mellin::{RadialFunction, TGrid};
use crate::quadrature::hermite_basis;
use crate::AngularGrid;

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Self { v, d1: 1.0, d2: 0.0 }
    }

    pub fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    pub fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    pub fn scale(self, k: f64) -> Jet {
        Jet {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
        }
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        Jet {
            v: r,
            d1: -self.d1 * r * r,
            d2: (2.0 * self.d1 * self.d1 * r - self.d2) * r * r,
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        Jet {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }
}

/// `exp(-1/x)` for `x > 0`, zero otherwise.
fn flat(x: Jet) -> Jet {
    if x.v <= 0.0 {
        Jet::constant(0.0)
    } else {
        x.recip().scale(-1.0).exp()
    }
}

/// `C^inf` step: 0 for `x <= 0`, 1 for `x >= 1`.
pub fn smooth_step(x: Jet) -> Jet {
    if x.v <= 0.0 {
        return Jet::constant(0.0);
    }
    if x.v >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = flat(x);
    let b = flat(Jet::constant(1.0).add(x.scale(-1.0)));
    a.mul(a.add(b).recip())
}

/// Cutoff in `t = log r`: 1 for `t <= start`, 0 for `t >= end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub start: f64,
    pub end: f64,
}

impl Cutoff {
    pub fn eval(&self, t: f64) -> Jet {
        let w = self.end - self.start;
        let x = Jet {
            v: (t - self.start) / w,
            d1: 1.0 / w,
            d2: 0.0,
        };
        Jet::constant(1.0).add(smooth_step(x).scale(-1.0))
    }
}

/// Bump in `t`: rises over `[a, b]`, falls over `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub rise: Cutoff,
    pub fall: Cutoff,
}

impl Bump {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self {
            rise: Cutoff { start: a, end: b },
            fall: Cutoff { start: c, end: d },
        }
    }

    pub fn eval(&self, t: f64) -> Jet {
        let up = Jet::constant(1.0).add(self.rise.eval(t).scale(-1.0));
        up.mul(self.fall.eval(t))
    }
}

/// Piecewise cubic on the two sectors satisfying the transmission
/// conditions: Hermite data `(value, slope)` at `0` and at `omega` on the
/// minus side, with matching plus-side data `(value, a-/a+ slope)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicProfile {
    corner: CornerConfig,
    minus: [f64; 4],
    plus: [f64; 4],
}

impl CubicProfile {
    pub fn new(materials: &MaterialPair, corner: CornerConfig, data: [f64; 4]) -> Self {
        let [v0, s0, vw, sw] = data;
        let r = materials.a_minus() / materials.a_plus();
        Self {
            corner,
            minus: [v0, s0, vw, sw],
            plus: [vw, r * sw, v0, r * s0],
        }
    }

    /// `(phi, phi', phi'')` on the closed sector `side`.
    pub fn eval(&self, side: Side, theta: f64) -> [f64; 3] {
        let (a, b) = self.corner.sector(side);
        let h = b - a;
        let s = (theta - a) / h;
        let [y0, m0, y1, m1] = match side {
            Side::Minus => self.minus,
            Side::Plus => self.plus,
        };
        let (w, dw) = hermite_basis(s);
        let dd = [12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0];
        let c = [y0, h * m0, y1, h * m1];
        let dot = |w: &[f64; 4]| w.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>();
        [dot(&w), dot(&dw) / h, dot(&dd) / (h * h)]
    }

    pub fn corner(&self) -> CornerConfig {
        self.corner
    }
}

/// `w(t, theta) = exp(2t) psi(t) phi(theta)` with `phi` a [`CubicProfile`]:
/// regular at the corner, so every residue of its data vanishes.
#[derive(Debug, Clone, Copy)]
pub struct RegularSolution {
    pub profile: CubicProfile,
    pub radial: RadialShape,
    pub materials: MaterialPair,
}

/// Radial factors used by the manufactured solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialShape {
    /// `exp(2t)` times a cutoff equal to 1 near the corner.
    Cutoff(Cutoff),
    /// `exp(2t)` times a bump supported in an annulus.
    Annulus(Bump),
}

impl RadialShape {
    /// `exp(2t) psi(t)` and its `t`-derivatives.
    pub fn eval(&self, t: f64) -> Jet {
        let psi = match self {
            RadialShape::Cutoff(c) => c.eval(t),
            RadialShape::Annulus(b) => b.eval(t),
        };
        let e = (2.0 * t).exp();
        Jet {
            v: e,
            d1: 2.0 * e,
            d2: 4.0 * e,
        }
        .mul(psi)
    }
}

impl RegularSolution {
    pub fn value(&self, t: f64, side: Side, theta: f64) -> f64 {
        self.radial.eval(t).v * self.profile.eval(side, theta)[0]
    }

    /// `r^2 a Delta w = a (w_tt + w_thetatheta)`, exactly.
    pub fn scaled_operator(&self, t: f64, side: Side, theta: f64) -> f64 {
        let r = self.radial.eval(t);
        let [p, _, p2] = self.profile.eval(side, theta);
        self.materials.coefficient(side) * (r.d2 * p + r.v * p2)
    }

    pub fn sample(&self, tgrid: TGrid, agrid: AngularGrid) -> RadialFunction {
        RadialFunction::from_fn(tgrid, agrid, |t, side, th| {
            Complex64::new(self.value(t, side, th), 0.0)
        })
    }

    /// The data `g = a Delta w` sampled on the grid.
    pub fn data(&self, tgrid: TGrid, agrid: AngularGrid) -> RadialFunction {
        RadialFunction::from_fn(tgrid, agrid, |t, side, th| {
            Complex64::new(self.scaled_operator(t, side, th) * (-2.0 * t).exp(), 0.0)
        })
    }
}

/// `u = chi(t) exp(lambda0 t) phi(theta)` with `phi` a kernel function at
/// `lambda0`; its data is supported where `chi` varies.
#[derive(Debug, Clone)]
pub struct PlantedSingular {
    pub lambda0: Complex64,
    pub angular: AngularFunction,
    pub cutoff: Cutoff,
    pub materials: MaterialPair,
}

impl PlantedSingular {
    pub fn value(&self, t: f64, side: Side, theta: f64) -> Complex64 {
        self.cutoff.eval(t).v * (self.lambda0 * t).exp() * self.angular.eval_on(side, theta)
    }

    /// `r^2 a Delta u = a (chi'' + 2 lambda0 chi') exp(lambda0 t) phi`.
    pub fn scaled_operator(&self, t: f64, side: Side, theta: f64) -> Complex64 {
        let c = self.cutoff.eval(t);
        self.materials.coefficient(side)
            * (c.d2 + 2.0 * self.lambda0 * c.d1)
            * (self.lambda0 * t).exp()
            * self.angular.eval_on(side, theta)
    }

    pub fn sample(&self, tgrid: TGrid, agrid: AngularGrid) -> RadialFunction {
        RadialFunction::from_fn(tgrid, agrid, |t, side, th| self.value(t, side, th))
    }

    pub fn data(&self, tgrid: TGrid, agrid: AngularGrid) -> RadialFunction {
        RadialFunction::from_fn(tgrid, agrid, |t, side, th| {
            self.scaled_operator(t, side, th) * (-2.0 * t).exp()
        })
    }
}

/// `u = chi(t) t`: a `log r` term at `lambda0 = 0` with constant profile.
#[derive(Debug, Clone, Copy)]
pub struct PlantedLog {
    pub cutoff: Cutoff,
    pub materials: MaterialPair,
}

impl PlantedLog {
    pub fn value(&self, t: f64) -> f64 {
        self.cutoff.eval(t).v * t
    }

    /// `a (chi'' t + 2 chi')`.
    pub fn scaled_operator(&self, t: f64, side: Side) -> f64 {
        let c = self.cutoff.eval(t);
        self.materials.coefficient(side) * (c.d2 * t + 2.0 * c.d1)
    }

    pub fn data(&self, tgrid: TGrid, agrid: AngularGrid) -> RadialFunction {
        RadialFunction::from_fn(tgrid, agrid, |t, side, _| {
            Complex64::new(self.scaled_operator(t, side) * (-2.0 * t).exp(), 0.0)
        })
    }
}
