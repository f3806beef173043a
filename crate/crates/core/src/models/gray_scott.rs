use super::{check_alpha, check_nonnegative, unknown_param, Domain, ReactionModel, Species};
use crate::error::Result;
use crate::grid::BoundaryCondition;

/// Fractional Gray-Scott system on the periodic unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayScott {
    pub alpha: f64,
    pub feed: f64,
    pub kill: f64,
    pub kappa_u: f64,
    pub kappa_v: f64,
}

impl GrayScott {
    /// Kill rates with distinct pattern regimes at `F = 0.03`.
    pub const KILL_PRESETS: [f64; 3] = [0.055, 0.061, 0.063];
    /// Squared radius of the seeded disk around the centre.
    pub const SEED_RADIUS2: f64 = 0.0016;

    pub fn new(alpha: f64, feed: f64, kill: f64) -> Result<Self> {
        Ok(GrayScott {
            alpha: check_alpha(alpha)?,
            feed: check_nonnegative("F", feed)?,
            kill: check_nonnegative("K", kill)?,
            kappa_u: 2e-5,
            kappa_v: 1e-5,
        })
    }
}

impl ReactionModel for GrayScott {
    fn name(&self) -> &'static str {
        "gray_scott"
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
            dim: 2,
            lower: 0.0,
            upper: 1.0,
            default_bc: BoundaryCondition::Periodic,
            allowed: &[BoundaryCondition::Periodic],
        }
    }

    fn react(&self, _t: f64, _x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let (a, b) = (u[0], u[1]);
        let uvv = a * b * b;
        out[0] = -uvv + self.feed * (1.0 - a);
        out[1] = uvv - (self.feed + self.kill) * b;
        Ok(())
    }

    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        let r2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        if r2 <= Self::SEED_RADIUS2 {
            out[0] = 0.5;
            out[1] = 0.25;
        } else {
            out[0] = 1.0;
            out[1] = 0.0;
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("F", self.feed),
            ("K", self.kill),
            ("kappa_u", self.kappa_u),
            ("kappa_v", self.kappa_v),
        ]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" => self.alpha = check_alpha(value)?,
            "F" | "feed" => self.feed = check_nonnegative(name, value)?,
            "K" | "kill" => self.kill = check_nonnegative(name, value)?,
            "kappa_u" => self.kappa_u = check_nonnegative(name, value)?,
            "kappa_v" => self.kappa_v = check_nonnegative(name, value)?,
            _ => return Err(unknown_param(self.name(), name, value)),
        }
        Ok(())
    }
}
