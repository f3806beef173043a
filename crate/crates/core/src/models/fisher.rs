use std::f64::consts::PI;

use super::{check_alpha, check_nonnegative, unknown_param, Domain, ReactionModel, Species};
use crate::error::Result;
use crate::grid::BoundaryCondition;

/// 1D fractional Fisher equation on `[0, 1]` (Dirichlet) with a source
/// manufactured so that `u = e^{−t} sin³(2πx)`.
///
/// Uses `sin³a = (3 sin a − sin 3a)/4`, whose fractional Laplacian is
/// `(3(2π)^α sin 2πx − (6π)^α sin 6πx)/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fisher1d {
    alpha: f64,
    kappa: f64,
    pow2: f64,
    pow6: f64,
}

impl Fisher1d {
    pub fn new(alpha: f64, kappa: f64) -> Result<Self> {
        let alpha = check_alpha(alpha)?;
        Ok(Fisher1d {
            alpha,
            kappa: check_nonnegative("kappa", kappa)?,
            pow2: (2.0 * PI).powf(alpha),
            pow6: (6.0 * PI).powf(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl ReactionModel for Fisher1d {
    fn name(&self) -> &'static str {
        "fisher1d"
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
            dim: 1,
            lower: 0.0,
            upper: 1.0,
            default_bc: BoundaryCondition::Dirichlet,
            allowed: &[BoundaryCondition::Dirichlet],
        }
    }

    fn react(&self, t: f64, x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let s = (2.0 * PI * x[0]).sin();
        let s3 = s * s * s;
        let e = (-t).exp();
        let u = u[0];
        out[0] = -2.0 * e * s3
            + 0.25 * self.kappa * e * (3.0 * self.pow2 * s - self.pow6 * (6.0 * PI * x[0]).sin())
            + e * e * s3 * s3
            + u
            - u * u;
        Ok(())
    }

    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        out[0] = (2.0 * PI * x[0]).sin().powi(3);
    }

    fn exact(&self, t: f64, x: [f64; 3], out: &mut [f64]) -> bool {
        out[0] = (-t).exp() * (2.0 * PI * x[0]).sin().powi(3);
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
            "alpha" => Fisher1d::new(value, self.kappa)?,
            "kappa" => Fisher1d::new(self.alpha, value)?,
            _ => return Err(unknown_param(self.name(), name, value)),
        };
        Ok(())
    }
}
