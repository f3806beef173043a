use super::{
    check_alpha, check_nonnegative, check_positive, unknown_param, Domain, ReactionModel, Species,
};
use crate::error::Result;
use crate::grid::BoundaryCondition;

/// 3D fractional Schnakenberg system on the periodic cube `(0, l)³`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schnakenberg3d {
    pub alpha: f64,
    pub length: f64,
    pub kappa_u: f64,
    pub kappa_v: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

impl Schnakenberg3d {
    pub fn new(alpha: f64, length: f64) -> Result<Self> {
        Ok(Schnakenberg3d {
            alpha: check_alpha(alpha)?,
            length: check_positive("l", length)?,
            kappa_u: 1.0,
            kappa_v: 10.0,
            gamma: 1.0,
            a: 0.1,
            b: 0.9,
        })
    }

    /// Homogeneous steady state `(a + b, b / (a + b)²)`.
    pub fn steady_state(&self) -> (f64, f64) {
        let s = self.a + self.b;
        (s, self.b / (s * s))
    }
}

impl ReactionModel for Schnakenberg3d {
    fn name(&self) -> &'static str {
        "schnakenberg3d"
    }

    fn species(&self) -> Vec<Species> {
        vec![
            Species {
                name: "u",
                kappa: self.kappa_u,
                alpha: self.alpha,
            },
            Species {
                name: "v",
                kappa: self.kappa_v,
                alpha: self.alpha,
            },
        ]
    }

    fn domain(&self) -> Domain {
        Domain {
            dim: 3,
            lower: 0.0,
            upper: self.length,
            default_bc: BoundaryCondition::Periodic,
            allowed: &[BoundaryCondition::Periodic],
        }
    }

    fn react(&self, _t: f64, _x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let uuv = u[0] * u[0] * u[1];
        out[0] = self.gamma * (self.a - u[0] + uuv);
        out[1] = self.gamma * (self.b - uuv);
        Ok(())
    }

    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        let c = 0.5 * self.length;
        let (dx, dy, dz) = (x[0] - c, x[1] - c, x[2] - c);
        out[0] = 1.0 - (-10.0 * (dx * dx + dy * dy + dz * dz)).exp();
        out[1] = (-10.0 * (dx * dx + 2.0 * dy * dy + dz * dz)).exp();
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("l", self.length),
            ("kappa_u", self.kappa_u),
            ("kappa_v", self.kappa_v),
            ("gamma", self.gamma),
            ("a", self.a),
            ("b", self.b),
        ]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" => self.alpha = check_alpha(value)?,
            "l" | "length" => self.length = check_positive(name, value)?,
            "kappa_u" => self.kappa_u = check_nonnegative(name, value)?,
            "kappa_v" => self.kappa_v = check_nonnegative(name, value)?,
            "gamma" => self.gamma = value,
            "a" => self.a = value,
            "b" => self.b = value,
            _ => return Err(unknown_param(self.name(), name, value)),
        }
        Ok(())
    }
}
