//! Order-3 truncated Taylor jets of scalar functions of `(u, v)`.
//!
//! A [`Jet2`] stores raw partial derivatives `∂^(i+j) f / ∂uⁱ∂vʲ` for
//! `i + j ≤ 3`, not Taylor coefficients. Each jet also carries the order up
//! to which its slots are known; differentiation lowers it by one, and slots
//! above the known order hold `NaN` so that accidental use is loud.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: u8 = 3;
/// Number of slots `(i, j)` with `i + j ≤ 3`.
pub const SLOTS: usize = 10;

/// Slot index of `∂uⁱ∂vʲ`.
#[inline]
pub const fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// `(i, j)` of a slot index.
pub const SLOT_ORDERS: [(usize, usize); SLOTS] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

const fn binom(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k == n => 1.0,
        (2, 1) => 2.0,
        (3, 1) | (3, 2) => 3.0,
        _ => 0.0,
    }
}

/// One Leibniz-rule term: `out += coeff · lhs[a] · rhs[b]`.
#[derive(Clone, Copy)]
struct Term {
    out: usize,
    a: usize,
    b: usize,
    coeff: f64,
}

const N_TERMS: usize = 35;

const fn leibniz_table() -> [Term; N_TERMS] {
    let mut table = [Term {
        out: 0,
        a: 0,
        b: 0,
        coeff: 0.0,
    }; N_TERMS];
    let mut n = 0;
    let mut s = 0;
    while s < SLOTS {
        let (i, j) = SLOT_ORDERS[s];
        let mut p = 0;
        while p <= i {
            let mut q = 0;
            while q <= j {
                table[n] = Term {
                    out: s,
                    a: slot(p, q),
                    b: slot(i - p, j - q),
                    coeff: binom(i, p) * binom(j, q),
                };
                n += 1;
                q += 1;
            }
            p += 1;
        }
        s += 1;
    }
    table
}

static LEIBNIZ: [Term; N_TERMS] = leibniz_table();

#[inline]
fn degree(s: usize) -> u8 {
    let (i, j) = SLOT_ORDERS[s];
    (i + j) as u8
}

/// Truncated bivariate jet of a scalar.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    d: [f64; SLOTS],
    order: u8,
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("order", &self.order)
            .field("slots", &self.d)
            .finish()
    }
}

impl Default for Jet2 {
    fn default() -> Self {
        Jet2::constant(0.0)
    }
}

impl Jet2 {
    /// A constant: value `c`, every derivative slot zero, exact to order 3.
    pub fn constant(c: f64) -> Self {
        let mut d = [0.0; SLOTS];
        d[0] = c;
        Jet2 {
            d,
            order: MAX_ORDER,
        }
    }

    /// The coordinate function `u` at `u0`.
    pub fn var_u(u0: f64) -> Self {
        let mut j = Jet2::constant(u0);
        j.d[slot(1, 0)] = 1.0;
        j
    }

    /// The coordinate function `v` at `v0`.
    pub fn var_v(v0: f64) -> Self {
        let mut j = Jet2::constant(v0);
        j.d[slot(0, 1)] = 1.0;
        j
    }

    /// Builds a jet from raw partials; slots above `order` are ignored.
    pub fn from_slots(slots: [f64; SLOTS], order: u8) -> Self {
        Jet2 {
            d: slots,
            order: order.min(MAX_ORDER),
        }
        .masked()
    }

    /// Builds a jet from a closure giving `∂uⁱ∂vʲ` for `i + j ≤ order`.
    pub fn from_partials(order: u8, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = [0.0; SLOTS];
        for (s, &(i, j)) in SLOT_ORDERS.iter().enumerate() {
            if (i + j) as u8 <= order {
                d[s] = f(i, j);
            }
        }
        Jet2::from_slots(d, order)
    }

    fn masked(mut self) -> Self {
        for s in 0..SLOTS {
            if degree(s) > self.order {
                self.d[s] = f64::NAN;
            }
        }
        self
    }

    /// Highest derivative order known exactly.
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn slots(&self) -> &[f64; SLOTS] {
        &self.d
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.d[0]
    }

    /// Raw partial `∂uⁱ∂vʲ`. `NaN` when `i + j` exceeds the known order.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > MAX_ORDER as usize {
            return f64::NAN;
        }
        self.d[slot(i, j)]
    }

    pub fn u(&self) -> f64 {
        self.get(1, 0)
    }
    pub fn v(&self) -> f64 {
        self.get(0, 1)
    }
    pub fn uu(&self) -> f64 {
        self.get(2, 0)
    }
    pub fn uv(&self) -> f64 {
        self.get(1, 1)
    }
    pub fn vv(&self) -> f64 {
        self.get(0, 2)
    }

    /// Gradient `(f_u, f_v)`.
    pub fn gradient(&self) -> [f64; 2] {
        [self.u(), self.v()]
    }

    /// Jet of `∂f/∂u`, one order lower.
    pub fn du(&self) -> Jet2 {
        self.shifted(1, 0)
    }

    /// Jet of `∂f/∂v`, one order lower.
    pub fn dv(&self) -> Jet2 {
        self.shifted(0, 1)
    }

    fn shifted(&self, di: usize, dj: usize) -> Jet2 {
        let order = self.order.saturating_sub(1);
        let mut d = [f64::NAN; SLOTS];
        for (s, &(i, j)) in SLOT_ORDERS.iter().enumerate() {
            if i + j < MAX_ORDER as usize {
                d[s] = self.d[slot(i + di, j + dj)];
            }
        }
        if self.order == 0 {
            d = [f64::NAN; SLOTS];
        }
        Jet2 { d, order }.masked()
    }

    /// Restricts the jet to at most `order`.
    pub fn truncate(&self, order: u8) -> Jet2 {
        Jet2 {
            d: self.d,
            order: self.order.min(order),
        }
        .masked()
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= s;
        }
        Jet2 {
            d,
            order: self.order,
        }
    }

    pub fn square(&self) -> Jet2 {
        *self * *self
    }

    /// `f(g)` for a univariate `f` given by its derivatives
    /// `[f, f', f'', f''']` at `g.value()`.
    pub fn compose(&self, f: [f64; 4]) -> Jet2 {
        let mut h = *self;
        h.d[0] = 0.0;
        let h2 = h * h;
        let h3 = h2 * h;
        let mut out = [0.0; SLOTS];
        out[0] = f[0];
        for s in 1..SLOTS {
            out[s] = f[1] * h.d[s] + 0.5 * f[2] * h2.d[s] + f[3] / 6.0 * h3.d[s];
        }
        Jet2 {
            d: out,
            order: self.order,
        }
        .masked()
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Jet2 {
        let t = self.value().tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t)])
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        self.compose([e, e, e, e])
    }

    /// Natural logarithm; the caller guarantees a positive value.
    pub fn ln(&self) -> Jet2 {
        let x = self.value();
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    /// Square root; the caller guarantees a positive value.
    pub fn sqrt(&self) -> Jet2 {
        let x = self.value();
        let r = x.sqrt();
        self.compose([r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)])
    }

    /// `1/f`; the caller guarantees a non-zero value.
    pub fn recip(&self) -> Jet2 {
        let x = self.value();
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// Integer power. Negative exponents need a non-zero value.
    pub fn powi(&self, n: i32) -> Jet2 {
        let x = self.value();
        let mut f = [0.0; 4];
        let mut falling = 1.0;
        for (k, fk) in f.iter_mut().enumerate() {
            if k > 0 {
                falling *= (n - (k as i32 - 1)) as f64;
            }
            *fk = if falling == 0.0 {
                0.0
            } else {
                falling * x.powi(n - k as i32)
            };
        }
        self.compose(f)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut d = self.d;
        for (x, y) in d.iter_mut().zip(o.d.iter()) {
            *x += y;
        }
        Jet2 {
            d,
            order: self.order.min(o.order),
        }
        .masked()
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, o: Jet2) {
        *self = *self + o;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let order = self.order.min(o.order);
        let mut d = [0.0; SLOTS];
        for t in LEIBNIZ.iter() {
            if degree(t.out) <= order {
                d[t.out] += t.coeff * self.d[t.a] * o.d[t.b];
            }
        }
        Jet2 { d, order }.masked()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, c: f64) -> Jet2 {
        self.d[0] += c;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, c: f64) -> Jet2 {
        self.d[0] -= c;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}

impl From<f64> for Jet2 {
    fn from(c: f64) -> Self {
        Jet2::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_layout() {
        for (s, &(i, j)) in SLOT_ORDERS.iter().enumerate() {
            assert_eq!(slot(i, j), s);
        }
    }

    #[test]
    fn constants_have_zero_derivatives() {
        let c = Jet2::constant(2.5);
        assert_eq!(c.value(), 2.5);
        assert!(c.slots()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sin_of_u() {
        let u0 = 0.7_f64;
        let j = Jet2::var_u(u0).sin();
        let (s, c) = u0.sin_cos();
        let expected = [s, c, 0.0, -s, 0.0, 0.0, -c, 0.0, 0.0, 0.0];
        for (a, b) in j.slots().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn product_rule_mixed_partials() {
        // f = u²v at (2, 3): f_uv = 2u = 4, f_uuv = 2, f_uu = 2v = 6.
        let u = Jet2::var_u(2.0);
        let v = Jet2::var_v(3.0);
        let f = u * u * v;
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.get(1, 1), 4.0);
        assert_eq!(f.get(2, 0), 6.0);
        assert_eq!(f.get(2, 1), 2.0);
        assert_eq!(f.get(3, 0), 0.0);
    }

    #[test]
    fn derivative_lowers_order() {
        let f = Jet2::var_u(1.0).powi(4);
        let g = f.du();
        assert_eq!(g.order(), 2);
        assert_eq!(g.value(), 4.0);
        assert_eq!(g.get(2, 0), 24.0);
        assert!(g.get(3, 0).is_nan());
        assert_eq!((g * f).order(), 2);
    }

    #[test]
    fn powi_at_zero_base() {
        let f = Jet2::var_u(0.0).powi(2);
        assert_eq!(f.value(), 0.0);
        assert_eq!(f.get(2, 0), 2.0);
        assert_eq!(f.get(3, 0), 0.0);
        let g = Jet2::var_u(0.0).powi(1);
        assert_eq!(g.u(), 1.0);
    }

    #[test]
    fn recip_matches_division_identity() {
        let x = Jet2::var_u(0.8).exp() + Jet2::var_v(0.3).sin();
        let one = x * x.recip();
        assert!((one.value() - 1.0).abs() < 1e-14);
        for s in 1..SLOTS {
            assert!(one.slots()[s].abs() < 1e-12);
        }
    }
}
