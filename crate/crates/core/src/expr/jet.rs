use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::Scalar;

/// Largest chart dimension a jet can carry.
pub const MAX_DIM: usize = 8;

/// First-order jet: a value and its partial derivatives with respect to the
/// chart coordinates.
///
/// Constants have `dim == 0`; binary operations take the larger dimension, so
/// constants mix freely with coordinate jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    value: f64,
    grad: [f64; MAX_DIM],
    dim: usize,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: [0.0; MAX_DIM],
            dim: 0,
        }
    }

    /// The coordinate function `x_index` of an `dim`-dimensional chart, at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        assert!(index < dim);
        let mut grad = [0.0; MAX_DIM];
        grad[index] = 1.0;
        Jet { value, grad, dim }
    }

    pub fn from_parts(value: f64, partials: &[f64]) -> Self {
        assert!(partials.len() <= MAX_DIM);
        let mut grad = [0.0; MAX_DIM];
        grad[..partials.len()].copy_from_slice(partials);
        Jet {
            value,
            grad,
            dim: partials.len(),
        }
    }

    /// Seed a point as a vector of coordinate jets.
    pub fn point(p: &[f64]) -> Vec<Jet> {
        let n = p.len();
        p.iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(v, i, n))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn partials(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    /// Partial derivative along coordinate `k`; zero past the jet dimension.
    pub fn d(&self, k: usize) -> f64 {
        if k < MAX_DIM {
            self.grad[k]
        } else {
            0.0
        }
    }

    // chain rule: f(u) with f'(u) = slope
    fn chain(self, value: f64, slope: f64) -> Jet {
        let mut grad = [0.0; MAX_DIM];
        for k in 0..self.dim {
            grad[k] = slope * self.grad[k];
        }
        Jet {
            value,
            grad,
            dim: self.dim,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let dim = self.dim.max(rhs.dim);
        let mut grad = [0.0; MAX_DIM];
        for k in 0..dim {
            grad[k] = self.grad[k] + rhs.grad[k];
        }
        Jet {
            value: self.value + rhs.value,
            grad,
            dim,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let dim = self.dim.max(rhs.dim);
        let mut grad = [0.0; MAX_DIM];
        for k in 0..dim {
            grad[k] = self.grad[k] - rhs.grad[k];
        }
        Jet {
            value: self.value - rhs.value,
            grad,
            dim,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let dim = self.dim.max(rhs.dim);
        let mut grad = [0.0; MAX_DIM];
        for k in 0..dim {
            grad[k] = self.value * rhs.grad[k] + rhs.value * self.grad[k];
        }
        Jet {
            value: self.value * rhs.value,
            grad,
            dim,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let dim = self.dim.max(rhs.dim);
        let q = self.value / rhs.value;
        let mut grad = [0.0; MAX_DIM];
        for k in 0..dim {
            grad[k] = (self.grad[k] - q * rhs.grad[k]) / rhs.value;
        }
        Jet {
            value: q,
            grad,
            dim,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut grad = [0.0; MAX_DIM];
        for k in 0..self.dim {
            grad[k] = -self.grad[k];
        }
        Jet {
            value: -self.value,
            grad,
            dim: self.dim,
        }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Scalar for Jet {
    const DIFFERENTIATED: bool = true;

    fn from_f64(c: f64) -> Self {
        Jet::constant(c)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn abs(self) -> Self {
        self.chain(self.value.abs(), self.value.signum())
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return self.chain(1.0, 0.0);
        }
        self.chain(self.value.powi(n), n as f64 * self.value.powi(n - 1))
    }
    fn powf(self, e: f64) -> Self {
        self.chain(self.value.powf(e), e * self.value.powf(e - 1.0))
    }
    fn scale(self, c: f64) -> Self {
        self.chain(self.value * c, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_obeys_leibniz() {
        let p = Jet::point(&[0.3, -1.2, 2.0]);
        let f = p[0] * p[1] + p[2].sin();
        let g = (p[0] * p[2]).exp();
        let fg = f * g;
        for k in 0..3 {
            let expect = f.value() * g.d(k) + g.value() * f.d(k);
            assert!((fg.d(k) - expect).abs() <= 1e-15 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = Jet::variable(2.0, 1, 3);
        let y = Jet::constant(3.0) * x + Jet::constant(1.0);
        assert_eq!(y.value(), 7.0);
        assert_eq!(y.partials(), &[0.0, 3.0, 0.0]);
    }

    #[test]
    fn quotient_rule() {
        let p = Jet::point(&[1.5, 0.5]);
        let q = p[0] / p[1];
        assert_eq!(q.value(), 3.0);
        assert!((q.d(0) - 2.0).abs() < 1e-15);
        assert!((q.d(1) + 6.0).abs() < 1e-15);
    }
}
