//! Small-vector algebra of Lorentz-Minkowski 3-space ℝ³₁.
//!
//! The pseudo inner product has signature (−,+,+):
//! `⟨x,y⟩ = −x1·y1 + x2·y2 + x3·y3`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::jet::Jet2;

/// Relative zero tolerance used when no explicit tolerance is supplied.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Relative size below which a quadratic discriminant `b² − ac` counts as
/// rounding noise and is set to zero.
pub const DISC_CLAMP: f64 = 64.0 * f64::EPSILON;

/// A vector of ℝ³₁.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MVec3 {
    pub const ZERO: MVec3 = MVec3::new(0.0, 0.0, 0.0);
    pub const E1: MVec3 = MVec3::new(1.0, 0.0, 0.0);
    pub const E2: MVec3 = MVec3::new(0.0, 1.0, 0.0);
    pub const E3: MVec3 = MVec3::new(0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MVec3 { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        MVec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// `⟨self, other⟩`.
    #[inline]
    pub fn dot(self, other: MVec3) -> f64 {
        pseudo_inner(self, other)
    }

    /// `self ∧ other`.
    #[inline]
    pub fn wedge(self, other: MVec3) -> MVec3 {
        wedge(self, other)
    }

    /// `√|⟨x,x⟩|`, never negative.
    pub fn norm(self) -> f64 {
        self.dot(self).abs().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn scale(self, s: f64) -> MVec3 {
        MVec3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// Relative zero tolerance `1e-9 · max(1, ‖x‖∞²)`.
    pub fn default_tol(self) -> f64 {
        DEFAULT_REL_TOL * self.max_abs().powi(2).max(1.0)
    }
}

impl Add for MVec3 {
    type Output = MVec3;
    fn add(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MVec3 {
    fn add_assign(&mut self, o: MVec3) {
        *self = *self + o;
    }
}

impl Sub for MVec3 {
    type Output = MVec3;
    fn sub(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for MVec3 {
    type Output = MVec3;
    fn neg(self) -> MVec3 {
        MVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<MVec3> for f64 {
    type Output = MVec3;
    fn mul(self, v: MVec3) -> MVec3 {
        v.scale(self)
    }
}

/// Pseudo inner product `−x1y1 + x2y2 + x3y3`.
#[inline]
pub fn pseudo_inner(x: MVec3, y: MVec3) -> f64 {
    -x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3
}

/// Lorentzian wedge product: the cofactor expansion of
/// `det(−e1 e2 e3; x; y)`, so that `⟨z, x∧y⟩ = det(z, x, y)`.
#[inline]
pub fn wedge(x: MVec3, y: MVec3) -> MVec3 {
    MVec3::new(
        -(x.x2 * y.x3 - x.x3 * y.x2),
        x.x3 * y.x1 - x.x1 * y.x3,
        x.x1 * y.x2 - x.x2 * y.x1,
    )
}

/// Causal character of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
    Zero,
}

impl CausalCharacter {
    pub fn as_str(self) -> &'static str {
        match self {
            CausalCharacter::Spacelike => "spacelike",
            CausalCharacter::Timelike => "timelike",
            CausalCharacter::Lightlike => "lightlike",
            CausalCharacter::Zero => "zero",
        }
    }
}

/// Classifies `x` against the zero tolerance `tol`.
pub fn causal_character(x: MVec3, tol: f64) -> CausalCharacter {
    debug_assert!(tol >= 0.0);
    if x.max_abs() <= tol {
        return CausalCharacter::Zero;
    }
    let q = x.dot(x);
    if q > tol {
        CausalCharacter::Spacelike
    } else if q < -tol {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}

/// Membership in hyperbolic 2-space `⟨x,x⟩ = −1`.
pub fn in_hyperbolic_plane(x: MVec3, tol: f64) -> bool {
    (x.dot(x) + 1.0).abs() <= tol
}

/// Membership in de Sitter 2-space `⟨x,x⟩ = 1`.
pub fn in_de_sitter(x: MVec3, tol: f64) -> bool {
    (x.dot(x) - 1.0).abs() <= tol
}

/// Membership in the open lightcone `LC*`.
pub fn in_lightcone(x: MVec3, tol: f64) -> bool {
    x.max_abs() > tol && x.dot(x).abs() <= tol
}

/// A pair of lightcone vectors `(v, w)` meant to satisfy `⟨v,w⟩ = −2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta4Pair {
    pub v: MVec3,
    pub w: MVec3,
}

impl Delta4Pair {
    pub fn new(v: MVec3, w: MVec3) -> Self {
        Delta4Pair { v, w }
    }

    /// First projection `(v, w) ↦ v`.
    pub fn first(&self) -> MVec3 {
        self.v
    }

    /// Second projection `(v, w) ↦ w`.
    pub fn second(&self) -> MVec3 {
        self.w
    }

    /// `m = −½ v∧w`, the spacelike unit completing the frame.
    pub fn spacelike_unit(&self) -> MVec3 {
        wedge(self.v, self.w).scale(-0.5)
    }

    pub fn residuals(&self) -> (f64, f64, f64) {
        delta4_residuals(self)
    }

    pub fn contains(&self, tol: f64) -> bool {
        let (r1, r2, r3) = self.residuals();
        r1.abs() <= tol && r2.abs() <= tol && r3.abs() <= tol
    }
}

/// `(⟨v,v⟩, ⟨w,w⟩, ⟨v,w⟩ + 2)`; all zero exactly on Δ₄.
pub fn delta4_residuals(p: &Delta4Pair) -> (f64, f64, f64) {
    (p.v.dot(p.v), p.w.dot(p.w), p.v.dot(p.w) + 2.0)
}

/// An ℝ³₁-valued jet: three [`Jet2`] components sharing a base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JVec3 {
    pub x1: Jet2,
    pub x2: Jet2,
    pub x3: Jet2,
}

impl JVec3 {
    pub fn new(x1: Jet2, x2: Jet2, x3: Jet2) -> Self {
        JVec3 { x1, x2, x3 }
    }

    pub fn constant(x: MVec3) -> Self {
        JVec3::new(
            Jet2::constant(x.x1),
            Jet2::constant(x.x2),
            Jet2::constant(x.x3),
        )
    }

    pub fn value(&self) -> MVec3 {
        MVec3::new(self.x1.value(), self.x2.value(), self.x3.value())
    }

    /// Partial derivative `(i, j)` of every component.
    pub fn partial(&self, i: usize, j: usize) -> MVec3 {
        MVec3::new(self.x1.get(i, j), self.x2.get(i, j), self.x3.get(i, j))
    }

    pub fn du(&self) -> JVec3 {
        JVec3::new(self.x1.du(), self.x2.du(), self.x3.du())
    }

    pub fn dv(&self) -> JVec3 {
        JVec3::new(self.x1.dv(), self.x2.dv(), self.x3.dv())
    }

    pub fn dot(&self, o: &JVec3) -> Jet2 {
        -(self.x1 * o.x1) + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn wedge(&self, o: &JVec3) -> JVec3 {
        JVec3::new(
            -(self.x2 * o.x3 - self.x3 * o.x2),
            self.x3 * o.x1 - self.x1 * o.x3,
            self.x1 * o.x2 - self.x2 * o.x1,
        )
    }

    pub fn scale(&self, s: f64) -> JVec3 {
        JVec3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// Componentwise product with a scalar jet.
    pub fn times(&self, f: Jet2) -> JVec3 {
        JVec3::new(self.x1 * f, self.x2 * f, self.x3 * f)
    }
}

impl Add for JVec3 {
    type Output = JVec3;
    fn add(self, o: JVec3) -> JVec3 {
        JVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for JVec3 {
    type Output = JVec3;
    fn sub(self, o: JVec3) -> JVec3 {
        JVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}
