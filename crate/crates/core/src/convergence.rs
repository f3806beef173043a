//! Refinement studies against manufactured solutions.

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::etd::StepperContext;
use crate::grid::{convergence_order, max_norm_error, BoundaryCondition};
use crate::models::{exact_state, grid_for, initial_state, Fisher1d, Huxley2d, ReactionModel};

/// One refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub max_error: f64,
    /// `log2(e_{k-1} / e_k)`; `None` on the coarsest level.
    pub order: Option<f64>,
    pub wall_seconds: f64,
}

/// Manufactured-solution examples with their refinement recipes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Example {
    /// 1D Fisher, Dirichlet, `κ = 10`, `N = 8, 16, …`, `τ = h/(4κ)`.
    Fisher1d,
    /// 2D Huxley, `κ = 1`, `N = 10, 20, …`, `τ = h/10`.
    Huxley2d,
}

impl Example {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fisher1d" | "fisher" => Ok(Example::Fisher1d),
            "huxley2d" | "huxley" => Ok(Example::Huxley2d),
            other => Err(Error::Model {
                model: other.into(),
                reason: "no manufactured solution (use fisher1d or huxley2d)".into(),
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Example::Fisher1d => "fisher1d",
            Example::Huxley2d => "huxley2d",
        }
    }

    pub fn default_bc(self) -> BoundaryCondition {
        match self {
            Example::Fisher1d => BoundaryCondition::Dirichlet,
            Example::Huxley2d => BoundaryCondition::Neumann,
        }
    }

    fn model(self, alpha: f64, bc: BoundaryCondition) -> Result<Arc<dyn ReactionModel>> {
        Ok(match self {
            Example::Fisher1d => {
                if bc != BoundaryCondition::Dirichlet {
                    return Err(Error::UnsupportedBoundary {
                        model: self.name().into(),
                        bc,
                    });
                }
                Arc::new(Fisher1d::new(alpha, 10.0)?)
            }
            Example::Huxley2d => Arc::new(Huxley2d::new(alpha, 1.0, bc)?),
        })
    }

    /// `(N, τ)` on refinement level `k` (0-based).
    pub fn level(self, k: usize) -> (usize, f64) {
        match self {
            Example::Fisher1d => {
                let n = 8usize << k;
                (n, 1.0 / (n as f64 * 40.0))
            }
            Example::Huxley2d => {
                let n = 10usize << k;
                (n, 0.1 / n as f64)
            }
        }
    }
}

/// Max-norm error at `t_end` of one run started from the exact solution at 0.
pub fn manufactured_error(
    model: Arc<dyn ReactionModel>,
    n: usize,
    bc: BoundaryCondition,
    tau: f64,
    t_end: f64,
) -> Result<f64> {
    let grid = grid_for(model.as_ref(), n, Some(bc))?;
    let exact = exact_state(model.as_ref(), &grid, t_end).ok_or_else(|| Error::Model {
        model: model.name().into(),
        reason: "no exact solution".into(),
    })?;
    let u0 = initial_state(model.as_ref(), &grid);
    let mut ctx = StepperContext::new(&grid, model, tau)?;
    let out = ctx.integrate(u0, 0.0, t_end, &[])?;
    let last = &out.last().expect("final state").state;
    let mut err = 0.0f64;
    for (a, b) in last.species().iter().zip(exact.species()) {
        err = err.max(max_norm_error(a, b)?);
    }
    Ok(err)
}

/// Runs `levels` refinements of `example` to `T = 1`.
pub fn study(
    example: Example,
    alpha: f64,
    bc: BoundaryCondition,
    levels: usize,
) -> Result<Vec<Level>> {
    let model = example.model(alpha, bc)?;
    let mut rows: Vec<Level> = Vec::with_capacity(levels);
    for k in 0..levels {
        let (n, tau) = example.level(k);
        let start = Instant::now();
        let max_error = manufactured_error(model.clone(), n, bc, tau, 1.0)?;
        let order = match rows.last() {
            Some(prev) => Some(convergence_order(prev.max_error, max_error)?),
            None => None,
        };
        rows.push(Level {
            n,
            h: 1.0 / n as f64,
            tau,
            max_error,
            order,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}
