//! Space-fractional reaction-diffusion solver.
//!
//! The fractional Laplacian `(−Δ)^{α/2}` is discretized by raising the
//! eigenvalues of the fourth-order compact Laplacian `A⁻¹B` to the power
//! `α/2`. Those eigenvalues are known in closed form and the eigenvectors are
//! the DFT, DST-I or DCT-I bases, so every operator application costs one
//! forward and one inverse fast transform. Time stepping uses ETDRK4 with
//! the matrix exponential replaced by its (1, 3) Padé approximant.
//!
//! ```no_run
//! use std::sync::Arc;
//! use fracrd::{models, StepperContext};
//!
//! let model: Arc<dyn models::ReactionModel> = Arc::from(models::by_name("fisher1d").unwrap());
//! let grid = models::grid_for(model.as_ref(), 64, None).unwrap();
//! let mut ctx = StepperContext::new(&grid, model.clone(), 1.0 / 2560.0).unwrap();
//! let u0 = models::initial_state(model.as_ref(), &grid);
//! let out = ctx.integrate(u0, 0.0, 1.0, &[]).unwrap();
//! println!("{}", out.last().unwrap().state.field(0).max());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod error;
pub mod etd;
pub mod grid;
pub mod models;
pub mod oracle;
pub mod par;
pub mod spectrum;
pub mod stability;
pub mod transforms;

pub use error::{Error, Result};
pub use etd::{EtdCoefficients, EtdWeights, Snapshot, StepInfo, StepperContext};
pub use grid::{BoundaryCondition, Field, Grid, State};
pub use models::ReactionModel;
pub use spectrum::{EigenvalueField, FractionalLaplacian};
pub use transforms::{SpectralField, TransformPlan};
