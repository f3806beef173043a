use std::f64::consts::PI;

use super::{check_alpha, check_nonnegative, unknown_param, Domain, ReactionModel, Species};
use crate::error::{Error, Result};
use crate::grid::BoundaryCondition;

/// 2D fractional Huxley-type equation on `[0, 1]²` with reaction
/// `u(1 − u)(u − 1)` and a source manufactured for
/// `u = t^α cos³(2πx) cos³(2πy)`.
///
/// The exact solution is even about both ends of each axis, so it satisfies
/// periodic and homogeneous Neumann conditions alike.
#[derive(Debug, Clone, PartialEq)]
pub struct Huxley2d {
    alpha: f64,
    kappa: f64,
    bc: BoundaryCondition,
    // (8π²)^{α/2}, (40π²)^{α/2}, (72π²)^{α/2}
    pows: [f64; 3],
}

fn profile(x: [f64; 3]) -> f64 {
    ((2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos()).powi(3)
}

impl Huxley2d {
    pub fn new(alpha: f64, kappa: f64, bc: BoundaryCondition) -> Result<Self> {
        let alpha = check_alpha(alpha)?;
        if bc == BoundaryCondition::Dirichlet {
            return Err(Error::UnsupportedBoundary {
                model: "huxley2d".into(),
                bc,
            });
        }
        let p = |k: f64| (k * PI * PI).powf(0.5 * alpha);
        Ok(Huxley2d {
            alpha,
            kappa: check_nonnegative("kappa", kappa)?,
            bc,
            pows: [p(8.0), p(40.0), p(72.0)],
        })
    }

    /// `κ (−Δ)^{α/2}` of `cos³(2πx) cos³(2πy)`.
    fn phi(&self, x: [f64; 3]) -> f64 {
        let (c1x, c3x) = ((2.0 * PI * x[0]).cos(), (6.0 * PI * x[0]).cos());
        let (c1y, c3y) = ((2.0 * PI * x[1]).cos(), (6.0 * PI * x[1]).cos());
        let [p8, p40, p72] = self.pows;
        self.kappa / 16.0
            * (9.0 * p8 * c1x * c1y + 3.0 * p40 * (c3x * c1y + c1x * c3y) + p72 * c3x * c3y)
    }
}

impl ReactionModel for Huxley2d {
    fn name(&self) -> &'static str {
        "huxley2d"
    }

    fn species(&self) -> Vec<Species> {
        vec![Species {
            name: "u",
            kappa: self.kappa,
            alpha: self.alpha,
        }]
    }

    fn domain(&self) -> Domain {
        Domain {
            dim: 2,
            lower: 0.0,
            upper: 1.0,
            default_bc: self.bc,
            allowed: &[BoundaryCondition::Periodic, BoundaryCondition::Neumann],
        }
    }

    fn react(&self, t: f64, x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let c = profile(x);
        let ta = t.powf(self.alpha);
        let e = ta * c;
        let u = u[0];
        out[0] = u * (1.0 - u) * (u - 1.0)
            + self.alpha * t.powf(self.alpha - 1.0) * c
            + ta * self.phi(x)
            - e * (1.0 - e) * (e - 1.0);
        Ok(())
    }

    fn initial(&self, _x: [f64; 3], out: &mut [f64]) {
        out[0] = 0.0;
    }

    fn exact(&self, t: f64, x: [f64; 3], out: &mut [f64]) -> bool {
        out[0] = t.powf(self.alpha) * profile(x);
        true
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("alpha", self.alpha), ("kappa", self.kappa)]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        *self = match name {
            "alpha" => Huxley2d::new(value, self.kappa, self.bc)?,
            "kappa" => Huxley2d::new(self.alpha, value, self.bc)?,
            _ => return Err(unknown_param(self.name(), name, value)),
        };
        Ok(())
    }
}
