use crate::error::Result;
use crate::expr::{Expr, ExprRealization, Realization};
use crate::profiles::jet::{step, Jet};

/// Monodromy potential `ψ̃ = P(args) · (1 - S((a_k - lo) / width))`.
///
/// The cutoff makes `ψ̃` vanish for `a_k >= lo + width`, which models a
/// gluing map that is the identity near the fiber boundary: on a collar
/// attached there, `u dψ̃` is zero. First derivatives only.
#[derive(Debug)]
pub struct CollarPotential {
    poly: ExprRealization,
    cutoff_arg: usize,
    lo: f64,
    width: f64,
}

impl CollarPotential {
    pub fn new(body: &Expr, args: &[&str], cutoff_arg: &str, lo: f64, width: f64) -> Result<Self> {
        let k = args
            .iter()
            .position(|a| *a == cutoff_arg)
            .ok_or_else(|| crate::error::Error::UnknownCoordinate(cutoff_arg.to_string()))?;
        Ok(CollarPotential { poly: ExprRealization::new(body, args, 1)?, cutoff_arg: k, lo, width })
    }

    fn cutoff(&self, s: f64) -> Jet {
        Jet::constant(1.0) - step((Jet::var(s) - Jet::constant(self.lo)).scale(1.0 / self.width))
    }
}

impl Realization for CollarPotential {
    fn arity(&self) -> usize {
        self.poly.arity()
    }

    fn max_order(&self) -> u32 {
        1
    }

    fn eval(&self, deriv: &[u32], args: &[f64]) -> f64 {
        let c = self.cutoff(args[self.cutoff_arg]);
        let zero = vec![0; deriv.len()];
        let p = self.poly.eval(&zero, args);
        match deriv.iter().position(|&d| d > 0) {
            None => p * c.value(),
            Some(i) => {
                let pi = self.poly.eval(deriv, args);
                let extra = if i == self.cutoff_arg { p * c.derivative(1) } else { 0.0 };
                pi * c.value() + extra
            }
        }
    }
}
