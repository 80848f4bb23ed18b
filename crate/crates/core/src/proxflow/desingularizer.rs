use serde::{Deserialize, Serialize};

use crate::funclib::{check_exponent, check_modulus, conjugate_exponent};
use crate::Result;

/// Power desingularizer `phi(t) = p / (q^{1/q} mu^{1/p}) t^{1/p}`.
///
/// With this `phi`, the p-Lojasiewicz inequality with constant `mu` reads
/// `phi'(f - inf f) |x*| >= 1`, and its inverse
/// `phi^{-1}(s) = (mu/p) s^p / (p - 1)^{p - 1}` is the conditioning bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Desingularizer {
    p: f64,
    mu: f64,
    q: f64,
}

impl Desingularizer {
    pub fn new(p: f64, mu: f64) -> Result<Self> {
        check_exponent(p)?;
        check_modulus(mu)?;
        Ok(Desingularizer {
            p,
            mu,
            q: conjugate_exponent(p),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn coefficient(&self) -> f64 {
        self.p / (self.q.powf(1.0 / self.q) * self.mu.powf(1.0 / self.p))
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.coefficient() * t.powf(1.0 / self.p)
    }

    /// `phi'(t) = t^{-1/q} / (q^{1/q} mu^{1/p})` for `t > 0`.
    pub fn phi_prime(&self, t: f64) -> f64 {
        t.powf(-1.0 / self.q) / (self.q.powf(1.0 / self.q) * self.mu.powf(1.0 / self.p))
    }

    pub fn phi_inv(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let p = self.p;
        self.mu / p * s.powf(p) / (p - 1.0).powf(p - 1.0)
    }
}
