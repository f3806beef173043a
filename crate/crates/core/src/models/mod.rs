//! Reaction-diffusion problems: per-species diffusion data, pointwise
//! reaction terms, initial data and (for the manufactured problems) exact
//! solutions.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Field, Grid, State};
use crate::spectrum::validate_alpha;

mod fisher;
mod fitzhugh_nagumo;
mod gierer_meinhardt;
mod gray_scott;
mod huxley;
mod schnakenberg;

pub use fisher::Fisher1d;
pub use fitzhugh_nagumo::FitzHughNagumo;
pub use gierer_meinhardt::GiererMeinhardt;
pub use gray_scott::GrayScott;
pub use huxley::Huxley2d;
pub use schnakenberg::Schnakenberg3d;

/// Diffusion data of one species: `u_t = −kappa (−Δ)^{alpha/2} u + f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: &'static str,
    pub kappa: f64,
    pub alpha: f64,
}

/// Box domain `[lower, upper]^dim` and the boundary conditions a model accepts.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub default_bc: BoundaryCondition,
    pub allowed: &'static [BoundaryCondition],
}

pub trait ReactionModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn species(&self) -> Vec<Species>;

    fn domain(&self) -> Domain;

    /// Reaction terms at one point: `out[s] = f_s(u, x, t)`.
    ///
    /// Depends only on the species values at `x`, the coordinates and `t`.
    fn react(&self, t: f64, x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()>;

    fn initial(&self, x: [f64; 3], out: &mut [f64]);

    /// Writes the exact solution and returns `true` when the model has one.
    fn exact(&self, _t: f64, _x: [f64; 3], _out: &mut [f64]) -> bool {
        false
    }

    fn has_exact(&self) -> bool {
        false
    }

    /// Named scalar parameters, including per-species `kappa`/`alpha`.
    fn params(&self) -> Vec<(&'static str, f64)>;

    fn set_param(&mut self, name: &str, value: f64) -> Result<()>;
}

/// Preset names accepted by [`by_name`].
pub const PRESETS: [&str; 6] = [
    "fisher1d",
    "huxley2d",
    "fitzhugh_nagumo",
    "gierer_meinhardt",
    "gray_scott",
    "schnakenberg3d",
];

/// Default-parameter preset by name.
pub fn by_name(name: &str) -> Result<Box<dyn ReactionModel>> {
    let model: Box<dyn ReactionModel> = match name {
        "fisher1d" | "fisher" => Box::new(Fisher1d::new(1.8, 10.0)?),
        "huxley2d" | "huxley" => Box::new(Huxley2d::new(1.8, 1.0, BoundaryCondition::Neumann)?),
        "fitzhugh_nagumo" | "fhn" => {
            Box::new(FitzHughNagumo::new(2.0, 1e-4, BoundaryCondition::Periodic)?)
        }
        "gierer_meinhardt" | "gm" => Box::new(GiererMeinhardt::new(2.0, 2.0, 0.0162)?),
        "gray_scott" | "gs" => Box::new(GrayScott::new(2.0, 0.03, 0.055)?),
        "schnakenberg3d" | "schnakenberg" => Box::new(Schnakenberg3d::new(2.0, 10.0)?),
        other => {
            return Err(Error::Model {
                model: other.to_string(),
                reason: format!("unknown model; expected one of {}", PRESETS.join(", ")),
            })
        }
    };
    Ok(model)
}

/// Grid with `n` intervals on the model's domain.
pub fn grid_for(
    model: &dyn ReactionModel,
    n: usize,
    bc: Option<BoundaryCondition>,
) -> Result<Grid> {
    let d = model.domain();
    let bc = bc.unwrap_or(d.default_bc);
    let grid = Grid::cube(d.dim, d.lower, d.upper, n, bc)?;
    check_grid(model, &grid)?;
    Ok(grid)
}

/// Rejects grids whose dimension or boundary condition the model does not support.
pub fn check_grid(model: &dyn ReactionModel, grid: &Grid) -> Result<()> {
    let d = model.domain();
    if grid.dim() != d.dim {
        return Err(Error::Model {
            model: model.name().into(),
            reason: format!("needs a {}D grid, got {}D", d.dim, grid.dim()),
        });
    }
    if !d.allowed.contains(&grid.bc()) {
        return Err(Error::UnsupportedBoundary {
            model: model.name().into(),
            bc: grid.bc(),
        });
    }
    Ok(())
}

fn sample_state(grid: &Grid, count: usize, f: impl Fn([f64; 3], &mut [f64])) -> State {
    let mut values = vec![Vec::with_capacity(grid.len()); count];
    let mut buf = vec![0.0; count];
    for i in 0..grid.len() {
        f(grid.point(i), &mut buf);
        for (s, v) in values.iter_mut().enumerate() {
            v.push(buf[s]);
        }
    }
    let fields = values
        .into_iter()
        .map(|v| Field::from_values(*grid, v).expect("sampled length matches grid"))
        .collect();
    State::new(fields).expect("fields share one grid")
}

pub fn initial_state(model: &dyn ReactionModel, grid: &Grid) -> State {
    sample_state(grid, model.species().len(), |x, out| model.initial(x, out))
}

pub fn exact_state(model: &dyn ReactionModel, grid: &Grid, t: f64) -> Option<State> {
    if !model.has_exact() {
        return None;
    }
    Some(sample_state(grid, model.species().len(), |x, out| {
        model.exact(t, x, out);
    }))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<f64> {
    validate_alpha(alpha, false)?;
    Ok(alpha)
}

pub(crate) fn check_nonnegative(name: &str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            value,
            reason: "must be finite and >= 0".into(),
        })
    }
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            value,
            reason: "must be finite and > 0".into(),
        })
    }
}

pub(crate) fn unknown_param(model: &str, name: &str, value: f64) -> Error {
    Error::InvalidParameter {
        name: name.into(),
        value,
        reason: format!("not a parameter of {model}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            let m = by_name(name).unwrap();
            assert_eq!(m.name(), name);
            let g = grid_for(m.as_ref(), 8, None).unwrap();
            let s = initial_state(m.as_ref(), &g);
            assert_eq!(s.count(), m.species().len());
            assert!(s.is_finite());
            assert_eq!(m.has_exact(), matches!(name, "fisher1d" | "huxley2d"));
        }
        assert!(by_name("brusselator").is_err());
    }

    #[test]
    fn rejects_unsupported_bc() {
        let m = by_name("gray_scott").unwrap();
        assert!(grid_for(m.as_ref(), 8, Some(BoundaryCondition::Dirichlet)).is_err());
        let f = by_name("fisher1d").unwrap();
        assert!(grid_for(f.as_ref(), 8, Some(BoundaryCondition::Periodic)).is_err());
    }

    #[test]
    fn reactions_are_pointwise_under_permutation() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for name in PRESETS {
            let m = by_name(name).unwrap();
            let s = m.species().len();
            let pts: Vec<([f64; 3], Vec<f64>)> = (0..50)
                .map(|_| {
                    let x = [
                        rng.random::<f64>(),
                        rng.random::<f64>(),
                        rng.random::<f64>(),
                    ];
                    let u = (0..s).map(|_| rng.random_range(0.1..1.0)).collect();
                    (x, u)
                })
                .collect();
            let eval = |p: &[([f64; 3], Vec<f64>)]| -> Vec<Vec<f64>> {
                p.iter()
                    .map(|(x, u)| {
                        let mut out = vec![0.0; s];
                        m.react(0.3, *x, u, &mut out).unwrap();
                        out
                    })
                    .collect()
            };
            let base = eval(&pts);
            let mut order: Vec<usize> = (0..pts.len()).collect();
            order.shuffle(&mut rng);
            let permuted: Vec<_> = order.iter().map(|&i| pts[i].clone()).collect();
            let out = eval(&permuted);
            for (k, &i) in order.iter().enumerate() {
                assert_eq!(out[k], base[i], "{name}");
            }
        }
    }
}
