use super::{
    check_alpha, check_nonnegative, check_positive, unknown_param, Domain, ReactionModel, Species,
};
use crate::error::{Error, Result};
use crate::grid::BoundaryCondition;

/// FitzHugh-Nagumo excitable medium on `[0, 2.5]²`:
///
/// ```text
/// u_t = −κ(−Δ)^{α/2} u + u(1 − u)(u − μ) − v
/// v_t = ε(βu − γv − δ)
/// ```
///
/// `v` does not diffuse and is stepped with zero eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct FitzHughNagumo {
    pub alpha: f64,
    pub kappa: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    bc: BoundaryCondition,
}

impl FitzHughNagumo {
    pub const LENGTH: f64 = 2.5;

    pub fn new(alpha: f64, kappa: f64, bc: BoundaryCondition) -> Result<Self> {
        if bc == BoundaryCondition::Dirichlet {
            return Err(Error::UnsupportedBoundary {
                model: "fitzhugh_nagumo".into(),
                bc,
            });
        }
        Ok(FitzHughNagumo {
            alpha: check_alpha(alpha)?,
            kappa: check_nonnegative("kappa", kappa)?,
            mu: 0.1,
            epsilon: 0.01,
            beta: 0.5,
            gamma: 1.0,
            delta: 0.0,
            bc,
        })
    }
}

impl ReactionModel for FitzHughNagumo {
    fn name(&self) -> &'static str {
        "fitzhugh_nagumo"
    }

    fn species(&self) -> Vec<Species> {
        vec![
            Species {
                name: "u",
                kappa: self.kappa,
                alpha: self.alpha,
            },
            Species {
                name: "v",
                kappa: 0.0,
                alpha: self.alpha,
            },
        ]
    }

    fn domain(&self) -> Domain {
        Domain {
            dim: 2,
            lower: 0.0,
            upper: Self::LENGTH,
            default_bc: self.bc,
            allowed: &[BoundaryCondition::Periodic, BoundaryCondition::Neumann],
        }
    }

    fn react(&self, _t: f64, _x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        let (a, b) = (u[0], u[1]);
        out[0] = a * (1.0 - a) * (a - self.mu) - b;
        out[1] = self.epsilon * (self.beta * a - self.gamma * b - self.delta);
        Ok(())
    }

    /// Excited corner block for `u`, refractory strip for `v`. Nodes on
    /// `x = 0`, `y = 0` or the far faces fall outside both printed regions
    /// and get 0.
    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        let (px, py) = (x[0], x[1]);
        let l = Self::LENGTH;
        out[0] = if px > 0.0 && px <= 0.125 && py > 0.0 && py < 0.125 {
            1.0
        } else {
            0.0
        };
        out[1] = if px > 0.0 && px < l && (0.125..l).contains(&py) {
            0.1
        } else {
            0.0
        };
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("epsilon", self.epsilon),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" => self.alpha = check_alpha(value)?,
            "kappa" | "kappa_u" => self.kappa = check_nonnegative(name, value)?,
            "mu" => self.mu = value,
            "epsilon" => self.epsilon = check_positive(name, value)?,
            "beta" => self.beta = value,
            "gamma" => self.gamma = value,
            "delta" => self.delta = value,
            _ => return Err(unknown_param(self.name(), name, value)),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaction_values() {
        let m = FitzHughNagumo::new(2.0, 1e-4, BoundaryCondition::Periodic).unwrap();
        let mut out = [0.0; 2];
        m.react(0.0, [0.0; 3], &[0.0, 0.0], &mut out).unwrap();
        assert_eq!(out, [0.0, 0.0]);
        m.react(0.0, [0.0; 3], &[1.0, 0.0], &mut out).unwrap();
        assert!((out[1] - 0.005).abs() < 1e-15);
    }

    #[test]
    fn initial_regions() {
        let m = FitzHughNagumo::new(2.0, 1e-4, BoundaryCondition::Neumann).unwrap();
        let mut out = [0.0; 2];
        m.initial([0.1, 0.1, 0.0], &mut out);
        assert_eq!(out, [1.0, 0.0]);
        m.initial([0.125, 0.125, 0.0], &mut out);
        assert_eq!(out, [0.0, 0.1]);
        m.initial([0.0, 1.0, 0.0], &mut out);
        assert_eq!(out, [0.0, 0.0]);
        m.initial([1.0, 2.5, 0.0], &mut out);
        assert_eq!(out, [0.0, 0.0]);
    }
}
