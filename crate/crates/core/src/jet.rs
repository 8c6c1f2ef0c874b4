//! Second-order forward-mode jets in up to [`MAX_DIM`] chart variables.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar function
//! at a point; [`Jet1`] drops the Hessian. Geometric code is written once
//! against [`Scalar`] and instantiated at `Jet2`, `Jet1` and `f64`, with
//! [`Differentiable`] stepping down one order per partial derivative.
//!
//! Derivative slots beyond the chart dimension stay zero, so all arithmetic
//! runs over the full fixed-size arrays.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 4;

/// Magnitudes below this are treated as zero divisors.
pub const DIVISION_FLOOR: f64 = 1e-300;

/// Arithmetic shared by `f64`, [`Jet1`] and [`Jet2`].
///
/// The transcendental methods do no domain checking; use [`apply`] when the
/// operand comes from user input.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    /// True when every derivative slot is zero.
    fn is_constant(&self) -> bool;
    /// Truncation from the top of the tower.
    fn from_jet2(j: &Jet2) -> Self;
    fn scale(self, k: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    /// `self^k` for a constant real exponent; needs a positive base unless
    /// `k` is an integer.
    fn powf(self, k: f64) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }
}

/// Truncation from a first-order jet.
pub trait FromJet1: Scalar {
    fn from_jet1(j: &Jet1) -> Self;
}

/// A scalar that can be differentiated once more.
pub trait Differentiable: Scalar {
    type Lower: FromJet1;

    /// Partial derivative with respect to coordinate `i`, one order lower.
    fn partial(&self, i: usize) -> Self::Lower;
    /// The same function with its top derivative order dropped.
    fn lower(&self) -> Self::Lower;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn from_jet2(j: &Jet2) -> Self {
        j.value
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn powf(self, k: f64) -> Self {
        libm::pow(self, k)
    }
}

impl FromJet1 for f64 {
    fn from_jet1(j: &Jet1) -> Self {
        j.value
    }
}

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
}

impl Jet1 {
    pub fn new(value: f64, grad: [f64; MAX_DIM]) -> Self {
        Jet1 { value, grad }
    }

    /// Derivative along the direction `v` (`Σ v^i ∂_i`).
    pub fn directional(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.grad.iter()).map(|(a, b)| a * b).sum()
    }

    fn chain(self, f0: f64, f1: f64) -> Self {
        let mut grad = [0.0; MAX_DIM];
        for (g, a) in grad.iter_mut().zip(self.grad.iter()) {
            *g = f1 * a;
        }
        Jet1 { value: f0, grad }
    }
}

impl Scalar for Jet1 {
    fn constant(v: f64) -> Self {
        Jet1 {
            value: v,
            grad: [0.0; MAX_DIM],
        }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn is_constant(&self) -> bool {
        self.grad.iter().all(|g| *g == 0.0)
    }
    fn from_jet2(j: &Jet2) -> Self {
        Jet1 {
            value: j.value,
            grad: j.grad,
        }
    }
    fn scale(self, k: f64) -> Self {
        self.chain(self.value * k, k)
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.value);
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(libm::log(self.value), 1.0 / self.value)
    }
    fn sin(self) -> Self {
        self.chain(libm::sin(self.value), libm::cos(self.value))
    }
    fn cos(self) -> Self {
        self.chain(libm::cos(self.value), -libm::sin(self.value))
    }
    fn sqrt(self) -> Self {
        let s = libm::sqrt(self.value);
        self.chain(s, 0.5 / s)
    }
    fn powf(self, k: f64) -> Self {
        let v = self.value;
        self.chain(libm::pow(v, k), k * libm::pow(v, k - 1.0))
    }
}

impl FromJet1 for Jet1 {
    fn from_jet1(j: &Jet1) -> Self {
        *j
    }
}

impl Differentiable for Jet1 {
    type Lower = f64;

    fn partial(&self, i: usize) -> f64 {
        self.grad[i]
    }
    fn lower(&self) -> f64 {
        self.value
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, b) in grad.iter_mut().zip(rhs.grad.iter()) {
            *g += b;
        }
        Jet1 {
            value: self.value + rhs.value,
            grad,
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, b) in grad.iter_mut().zip(rhs.grad.iter()) {
            *g -= b;
        }
        Jet1 {
            value: self.value - rhs.value,
            grad,
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut grad = [0.0; MAX_DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * rhs.value + self.value * rhs.grad[k];
        }
        Jet1 {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: Jet1) -> Jet1 {
        let q = self.value / rhs.value;
        let mut grad = [0.0; MAX_DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[k] - q * rhs.grad[k]) / rhs.value;
        }
        Jet1 { value: q, grad }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        let mut grad = self.grad;
        for g in grad.iter_mut() {
            *g = -*g;
        }
        Jet1 {
            value: -self.value,
            grad,
        }
    }
}

/// Value, gradient and (symmetric) Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet2 {
    /// The coordinate function `x_i` at the point `x`.
    pub fn seed(x: &[f64], i: usize) -> Result<Jet2> {
        if x.is_empty() || x.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(x.len()));
        }
        if i >= x.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: x.len(),
            });
        }
        let mut grad = [0.0; MAX_DIM];
        grad[i] = 1.0;
        Ok(Jet2 {
            value: x[i],
            grad,
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        })
    }

    /// All coordinate functions at `x`.
    pub fn variables(x: &[f64]) -> Result<alloc::vec::Vec<Jet2>> {
        (0..x.len()).map(|i| Jet2::seed(x, i)).collect()
    }

    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet2::constant(f0);
        for i in 0..MAX_DIM {
            out.grad[i] = f1 * self.grad[i];
            for j in i..MAX_DIM {
                let h = f1 * self.hess[i][j] + f2 * (self.grad[i] * self.grad[j]);
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }
}

impl Scalar for Jet2 {
    fn constant(v: f64) -> Self {
        Jet2 {
            value: v,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn is_constant(&self) -> bool {
        self.grad.iter().all(|g| *g == 0.0) && self.hess.iter().flatten().all(|h| *h == 0.0)
    }
    fn from_jet2(j: &Jet2) -> Self {
        *j
    }
    fn scale(self, k: f64) -> Self {
        self.chain(self.value * k, k, 0.0)
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.value);
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let v = self.value;
        self.chain(libm::log(v), 1.0 / v, -1.0 / (v * v))
    }
    fn sin(self) -> Self {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let v = self.value;
        let s = libm::sqrt(v);
        self.chain(s, 0.5 / s, -0.25 / (v * s))
    }
    fn powf(self, k: f64) -> Self {
        let v = self.value;
        self.chain(
            libm::pow(v, k),
            k * libm::pow(v, k - 1.0),
            k * (k - 1.0) * libm::pow(v, k - 2.0),
        )
    }
}

impl Differentiable for Jet2 {
    type Lower = Jet1;

    fn partial(&self, i: usize) -> Jet1 {
        Jet1 {
            value: self.grad[i],
            grad: self.hess[i],
        }
    }
    fn lower(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..MAX_DIM {
            out.grad[i] += rhs.grad[i];
            for j in 0..MAX_DIM {
                out.hess[i][j] += rhs.hess[i][j];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value -= rhs.value;
        for i in 0..MAX_DIM {
            out.grad[i] -= rhs.grad[i];
            for j in 0..MAX_DIM {
                out.hess[i][j] -= rhs.hess[i][j];
            }
        }
        out
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self, rhs);
        let mut out = Jet2::constant(a.value * b.value);
        for i in 0..MAX_DIM {
            out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            for j in i..MAX_DIM {
                let cross = a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
                let h = a.hess[i][j] * b.value + cross + a.value * b.hess[i][j];
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self, rhs);
        let q = a.value / b.value;
        let mut out = Jet2::constant(q);
        for i in 0..MAX_DIM {
            out.grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
        }
        for i in 0..MAX_DIM {
            for j in i..MAX_DIM {
                let num = a.hess[i][j]
                    - (out.grad[i] * b.grad[j] + out.grad[j] * b.grad[i])
                    - q * b.hess[i][j];
                let h = num / b.value;
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        let mut out = self;
        out.value = -out.value;
        for i in 0..MAX_DIM {
            out.grad[i] = -out.grad[i];
            for j in 0..MAX_DIM {
                out.hess[i][j] = -out.hess[i][j];
            }
        }
        out
    }
}

/// Operations understood by [`apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Pow,
}

impl JetOp {
    pub fn name(self) -> &'static str {
        match self {
            JetOp::Add => "add",
            JetOp::Sub => "sub",
            JetOp::Mul => "mul",
            JetOp::Div => "div",
            JetOp::Neg => "neg",
            JetOp::Exp => "exp",
            JetOp::Log => "log",
            JetOp::Sin => "sin",
            JetOp::Cos => "cos",
            JetOp::Sqrt => "sqrt",
            JetOp::Pow => "pow",
        }
    }
}

/// Largest integer exponent evaluated by repeated multiplication.
const MAX_INTEGER_EXPONENT: f64 = 64.0;

/// Domain-checked application of `op` to `a` (and `b` for binary ops).
pub fn apply<T: Scalar>(op: JetOp, a: T, b: Option<T>) -> Result<T> {
    let rhs = || b.ok_or(Error::MissingOperand(op.name()));
    let out = match op {
        JetOp::Add => a + rhs()?,
        JetOp::Sub => a - rhs()?,
        JetOp::Mul => a * rhs()?,
        JetOp::Div => {
            let b = rhs()?;
            nonzero(op, b.value())?;
            a / b
        }
        JetOp::Neg => -a,
        JetOp::Exp => a.exp(),
        JetOp::Log => {
            positive(op, a.value())?;
            a.ln()
        }
        JetOp::Sin => a.sin(),
        JetOp::Cos => a.cos(),
        JetOp::Sqrt => {
            positive(op, a.value())?;
            a.sqrt()
        }
        JetOp::Pow => pow(a, rhs()?)?,
    };
    if out.value().is_finite() {
        Ok(out)
    } else {
        Err(Error::Domain {
            op: op.name(),
            value: a.value(),
        })
    }
}

fn positive(op: JetOp, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            op: op.name(),
            value: v,
        })
    }
}

fn nonzero(op: JetOp, v: f64) -> Result<()> {
    if v.abs() >= DIVISION_FLOOR {
        Ok(())
    } else {
        Err(Error::Domain {
            op: op.name(),
            value: v,
        })
    }
}

fn pow<T: Scalar>(base: T, exponent: T) -> Result<T> {
    let e = exponent.value();
    if exponent.is_constant() && libm::trunc(e) == e && e.abs() <= MAX_INTEGER_EXPONENT {
        let k = e as i32;
        if k == 0 {
            return Ok(T::constant(1.0));
        }
        let mut acc = base;
        for _ in 1..k.unsigned_abs() {
            acc = acc * base;
        }
        if k < 0 {
            nonzero(JetOp::Pow, acc.value())?;
            acc = T::constant(1.0) / acc;
        }
        return Ok(acc);
    }
    positive(JetOp::Pow, base.value())?;
    if exponent.is_constant() {
        Ok(base.powf(e))
    } else {
        Ok((exponent * base.ln()).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var(x: &[f64], i: usize) -> Jet2 {
        Jet2::seed(x, i).unwrap()
    }

    #[test]
    fn seed_is_coordinate_function() {
        let j = var(&[3.0, 0.0], 0);
        assert_eq!(j.value, 3.0);
        assert_eq!(j.grad[..2], [1.0, 0.0]);
        assert!(j.hess.iter().flatten().all(|h| *h == 0.0));

        let j = var(&[0.0, 2.0], 1);
        assert_eq!(j.value, 2.0);
        assert_eq!(j.grad[..2], [0.0, 1.0]);
    }

    #[test]
    fn seed_index_out_of_range() {
        assert_eq!(
            Jet2::seed(&[0.0, 0.0], 5),
            Err(Error::IndexOutOfRange { index: 5, dim: 2 })
        );
        assert!(matches!(
            Jet2::seed(&[0.0; 5], 0),
            Err(Error::UnsupportedDimension(5))
        ));
    }

    #[test]
    fn sin_at_zero() {
        let s = apply(JetOp::Sin, var(&[0.0], 0), None).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.grad[0], 1.0);
        assert_eq!(s.hess[0][0], 0.0);
    }

    #[test]
    fn exp_times_y() {
        let x = [0.0, 2.0];
        let e = apply(JetOp::Exp, var(&x, 0), None).unwrap();
        let f = apply(JetOp::Mul, e, Some(var(&x, 1))).unwrap();
        assert_eq!(f.value, 2.0);
        assert_eq!(f.grad[..2], [2.0, 1.0]);
        assert_eq!(f.hess[0][1], 1.0);
        assert_eq!(f.hess[1][0], 1.0);
        assert_eq!(f.hess[0][0], 2.0);
        assert_eq!(f.hess[1][1], 0.0);
    }

    #[test]
    fn domain_errors() {
        let minus_one = Jet2::constant(-1.0);
        assert!(matches!(
            apply(JetOp::Log, minus_one, None),
            Err(Error::Domain { op: "log", .. })
        ));
        assert!(matches!(
            apply(JetOp::Sqrt, Jet2::constant(0.0), None),
            Err(Error::Domain { op: "sqrt", .. })
        ));
        assert!(matches!(
            apply(JetOp::Div, Jet2::constant(1.0), Some(Jet2::constant(1e-301))),
            Err(Error::Domain { op: "div", .. })
        ));
        assert!(matches!(
            apply(JetOp::Pow, minus_one, Some(Jet2::constant(0.5))),
            Err(Error::Domain { op: "pow", .. })
        ));
        assert_eq!(
            apply(JetOp::Add, minus_one, None),
            Err(Error::MissingOperand("add"))
        );
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let x = var(&[-2.0], 0);
        let c = apply(JetOp::Pow, x, Some(Jet2::constant(3.0))).unwrap();
        assert_eq!(c.value, -8.0);
        assert_eq!(c.grad[0], 12.0);
        assert_eq!(c.hess[0][0], -12.0);
        let r = apply(JetOp::Pow, x, Some(Jet2::constant(-2.0))).unwrap();
        assert_eq!(r.value, 0.25);
        assert!((r.grad[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn variable_exponent() {
        // x^y at (2, 3): d/dy = 8 ln 2
        let x = [2.0, 3.0];
        let p = apply(JetOp::Pow, var(&x, 0), Some(var(&x, 1))).unwrap();
        assert!((p.value - 8.0).abs() < 1e-12);
        assert!((p.grad[0] - 12.0).abs() < 1e-12);
        assert!((p.grad[1] - 8.0 * core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn constant_jets_match_plain_arithmetic_bitwise() {
        let vals = [0.3, -1.7, 2.5, 1e-3, 7.0];
        for &a in &vals {
            for &b in &vals {
                let (ja, jb) = (Jet2::constant(a), Jet2::constant(b));
                for op in [JetOp::Add, JetOp::Sub, JetOp::Mul, JetOp::Div, JetOp::Pow] {
                    let plain = apply(op, a, Some(b));
                    let jet = apply(op, ja, Some(jb));
                    match (plain, jet) {
                        (Ok(p), Ok(j)) => {
                            assert_eq!(p.to_bits(), j.value.to_bits(), "{op:?} {a} {b}");
                            assert!(j.is_constant());
                        }
                        (Err(_), Err(_)) => {}
                        other => panic!("{op:?} {a} {b}: {other:?}"),
                    }
                }
                for op in [JetOp::Exp, JetOp::Sin, JetOp::Cos, JetOp::Neg, JetOp::Log, JetOp::Sqrt] {
                    match (apply(op, a, None), apply(op, ja, None)) {
                        (Ok(p), Ok(j)) => assert_eq!(p.to_bits(), j.value.to_bits()),
                        (Err(_), Err(_)) => {}
                        other => panic!("{op:?} {a}: {other:?}"),
                    }
                }
            }
        }
    }

    fn composite<T: Scalar>(x: T, y: T, c: f64) -> T {
        let one = T::constant(1.0);
        let r2 = x * x + y * y;
        (x * y.scale(c)).sin() * (r2 + one).ln() + (x - y).exp() / (one + r2).sqrt()
            - (x * x + one).powf(1.5) * y.cos()
    }

    fn fd_check(x0: f64, y0: f64, c: f64) {
        let x = [x0, y0];
        let f = composite(var(&x, 0), var(&x, 1), c);
        let eval = |a: f64, b: f64| composite(a, b, c);
        let h = 1e-5;
        let gx = (eval(x0 + h, y0) - eval(x0 - h, y0)) / (2.0 * h);
        let gy = (eval(x0, y0 + h) - eval(x0, y0 - h)) / (2.0 * h);
        for (fd, jet) in [(gx, f.grad[0]), (gy, f.grad[1])] {
            assert!((fd - jet).abs() <= 1e-5 * (1.0 + jet.abs()), "{fd} vs {jet}");
        }
        let h = 1e-4;
        let hxx = (eval(x0 + h, y0) - 2.0 * eval(x0, y0) + eval(x0 - h, y0)) / (h * h);
        let hyy = (eval(x0, y0 + h) - 2.0 * eval(x0, y0) + eval(x0, y0 - h)) / (h * h);
        let hxy = (eval(x0 + h, y0 + h) - eval(x0 + h, y0 - h) - eval(x0 - h, y0 + h)
            + eval(x0 - h, y0 - h))
            / (4.0 * h * h);
        for (fd, jet) in [(hxx, f.hess[0][0]), (hyy, f.hess[1][1]), (hxy, f.hess[0][1])] {
            assert!((fd - jet).abs() <= 1e-3 * (1.0 + jet.abs()), "{fd} vs {jet}");
        }
    }

    proptest! {
        #[test]
        fn matches_finite_differences(x in -1.5f64..1.5, y in -1.5f64..1.5, c in 0.1f64..2.0) {
            fd_check(x, y, c);
        }

        #[test]
        fn hessian_is_exactly_symmetric(x in -2.0f64..2.0, y in -2.0f64..2.0, c in 0.1f64..2.0) {
            let p = [x, y];
            let f = composite(var(&p, 0), var(&p, 1), c);
            for i in 0..MAX_DIM {
                for j in 0..MAX_DIM {
                    prop_assert_eq!(f.hess[i][j].to_bits(), f.hess[j][i].to_bits());
                }
            }
        }
    }

    #[test]
    fn lowering_drops_one_order() {
        let x = [1.0, 2.0];
        let f = var(&x, 0) * var(&x, 0) * var(&x, 1);
        let dx = f.partial(0);
        assert_eq!(dx.value, 4.0);
        assert_eq!(dx.grad[..2], [4.0, 2.0]);
        assert_eq!(dx.partial(1), 2.0);
        assert_eq!(f.lower().lower(), 2.0);
    }
}
