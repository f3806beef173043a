use std::f64::consts::PI;

use super::{check_alpha, check_positive, unknown_param, Domain, ReactionModel, Species};
use crate::error::{Error, Result};
use crate::grid::BoundaryCondition;

/// Activator-inhibitor Gierer-Meinhardt system on `[−1, 1]²` (Neumann):
///
/// ```text
/// u_t = −ε² (−Δ)^{α/2} u + u²/v − u
/// v_t = −(K/μ) (−Δ)^{β/2} v + u²/(εμ) − v/μ
/// ```
///
/// A non-positive inhibitor value aborts the evaluation instead of being
/// clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct GiererMeinhardt {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub epsilon: f64,
    pub mu: f64,
}

impl GiererMeinhardt {
    pub fn new(alpha: f64, beta: f64, k: f64) -> Result<Self> {
        Ok(GiererMeinhardt {
            alpha: check_alpha(alpha)?,
            beta: check_alpha(beta)?,
            k: check_positive("K", k)?,
            epsilon: 0.04,
            mu: 0.1,
        })
    }

    pub fn kappa_u(&self) -> f64 {
        self.epsilon * self.epsilon
    }

    pub fn kappa_v(&self) -> f64 {
        self.k / self.mu
    }
}

impl ReactionModel for GiererMeinhardt {
    fn name(&self) -> &'static str {
        "gierer_meinhardt"
    }

    fn species(&self) -> Vec<Species> {
        vec![
            Species {
                name: "u",
                kappa: self.kappa_u(),
                alpha: self.alpha,
            },
            Species {
                name: "v",
                kappa: self.kappa_v(),
                alpha: self.beta,
            },
        ]
    }

    fn domain(&self) -> Domain {
        Domain {
            dim: 2,
            lower: -1.0,
            upper: 1.0,
            default_bc: BoundaryCondition::Neumann,
            allowed: &[BoundaryCondition::Neumann],
        }
    }

    fn react(&self, _t: f64, x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let (a, h) = (u[0], u[1]);
        if !(h > 0.0) {
            return Err(Error::Model {
                model: self.name().into(),
                reason: format!("inhibitor v = {h} <= 0 at ({}, {})", x[0], x[1]),
            });
        }
        out[0] = a * a / h - a;
        out[1] = a * a / (self.epsilon * self.mu) - h / self.mu;
        Ok(())
    }

    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        let r = x[0].hypot(x[1]);
        let wiggle: f64 = (1..=20).map(|j| (0.5 * PI * j as f64 * x[1]).cos()).sum();
        let sech = 1.0 / (r / (2.0 * self.epsilon)).cosh();
        out[0] = 0.5 * (1.0 + 0.001 * wiggle) * sech * sech;
        out[1] = (1.0 - r).cosh() / (3.0 * 1f64.cosh());
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("K", self.k),
            ("epsilon", self.epsilon),
            ("mu", self.mu),
        ]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" | "alpha_u" => self.alpha = check_alpha(value)?,
            "beta" | "alpha_v" => self.beta = check_alpha(value)?,
            "K" | "k" => self.k = check_positive(name, value)?,
            "epsilon" => self.epsilon = check_positive(name, value)?,
            "mu" => self.mu = check_positive(name, value)?,
            _ => return Err(unknown_param(self.name(), name, value)),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaction_and_initial() {
        let m = GiererMeinhardt::new(2.0, 1.8, 0.0162).unwrap();
        let mut out = [0.0; 2];
        m.react(0.0, [0.0; 3], &[1.0, 1.0], &mut out).unwrap();
        assert_eq!(out[0], 0.0);
        m.initial([0.0; 3], &mut out);
        assert!((out[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((out[0] - 0.5 * 1.02).abs() < 1e-15);
        assert!(m.react(0.0, [0.0; 3], &[1.0, 0.0], &mut out).is_err());
        assert!((m.kappa_v() - 0.162).abs() < 1e-15);
    }
}
