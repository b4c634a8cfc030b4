//! Truncated derivative jets `(v, v', v'', v''')` of one-variable functions.

use std::ops::{Add, Mul, Neg, Sub};

pub const ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; ORDER + 1]);

impl Jet {
    pub fn var(x: f64) -> Jet {
        Jet([x, 1.0, 0.0, 0.0])
    }

    pub fn constant(c: f64) -> Jet {
        Jet([c, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `g ∘ self`, given `g` and its first three derivatives at `self.value()`.
    pub fn compose(&self, g: [f64; 4]) -> Jet {
        let [_, u1, u2, u3] = self.0;
        Jet([
            g[0],
            g[1] * u1,
            g[2] * u1 * u1 + g[1] * u2,
            g[3] * u1 * u1 * u1 + 3.0 * g[2] * u1 * u2 + g[1] * u3,
        ])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn recip(&self) -> Jet {
        let v = self.value();
        let i = 1.0 / v;
        self.compose([i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i])
    }

    pub fn sqrt(&self) -> Jet {
        let v = self.value();
        let s = v.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)])
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.map(|v| v * c))
    }

    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self.0, o.0);
        Jet([
            a[0] * b[0],
            a[1] * b[0] + a[0] * b[1],
            a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3],
        ])
    }
}

/// `exp(-1/x)` for `x > 0`, zero (with all derivatives) otherwise.
pub fn flat(x: Jet) -> Jet {
    if x.value() <= 0.0 {
        return Jet::constant(0.0);
    }
    (-x.recip()).exp()
}

/// Smooth step: 0 for `x <= 0`, 1 for `x >= 1`, strictly increasing between,
/// with `step(x) + step(1 - x) = 1`.
pub fn step(x: Jet) -> Jet {
    let v = x.value();
    if v <= 0.0 {
        return Jet::constant(0.0);
    }
    if v >= 1.0 {
        return Jet::constant(1.0);
    }
    // ψ(x)/(ψ(x)+ψ(1-x)) written through the ratio ψ(x)/ψ(1-x), which keeps
    // the derivatives free of cancellation near both ends.
    let one = Jet::constant(1.0);
    let lhs = x.recip();
    let rhs = (one - x).recip();
    if v <= 0.5 {
        let p = (rhs - lhs).exp();
        p * (one + p).recip()
    } else {
        (one + (lhs - rhs).exp()).recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> Jet, x: f64, k: usize) -> f64 {
        let h = 1e-4;
        (f(x + h).derivative(k) - f(x - h).derivative(k)) / (2.0 * h)
    }

    #[test]
    fn step_derivatives_match_differences() {
        for &x in &[0.1, 0.3, 0.5, 0.77, 0.9] {
            let j = step(Jet::var(x));
            for k in 0..3 {
                let num = fd(|t| step(Jet::var(t)), x, k);
                let exact = j.derivative(k + 1);
                assert!((num - exact).abs() < 1e-5 * exact.abs().max(1.0), "x={x} k={k}");
            }
        }
        // High-precision reference values at x = 0.95.
        let j = step(Jet::var(0.95));
        let want = [0.999_999_994_094_421_5, 2.368_774_956_932_730e-6, -8.556_591_737_075_399e-4, 0.273_091_412_113_096_4];
        for k in 0..4 {
            assert!((j.derivative(k) - want[k]).abs() < 1e-12 * want[k].abs().max(1e-3), "k={k}");
        }
        assert_eq!(step(Jet::var(0.0)).value(), 0.0);
        assert_eq!(step(Jet::var(1.0)).value(), 1.0);
        assert!((step(Jet::var(0.3)).value() + step(Jet::var(0.7)).value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_and_recip_chain() {
        let x = 0.6;
        let j = (Jet::var(x) * Jet::var(x) + Jet::constant(1.0)).sqrt().recip();
        for k in 0..3 {
            let num = fd(|t| (Jet::var(t) * Jet::var(t) + Jet::constant(1.0)).sqrt().recip(), x, k);
            assert!((num - j.derivative(k + 1)).abs() < 1e-6);
        }
    }
}
