//! Closed-form eigenvalues of the fourth-order compact Laplacian `A⁻¹B` and
//! their fractional powers.
//!
//! In 1D every boundary condition gives `λ = 4s / (h²(1 − s/3))` with
//! `s = sin²θ` for a mode angle `θ`:
//!
//! * periodic: `θ = kπ/N`, `k = 0..N`
//! * Dirichlet: `θ = nπ/(2N)`, `n = 1..N`
//! * Neumann: `θ = nπ/(2N)`, `n = 0..=N`
//!
//! Multi-dimensional fields are tensor sums of the 1D values. Entries are
//! laid out exactly like the spectral coefficients of
//! [`TransformPlan`](crate::transforms::TransformPlan).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Field, Grid};
use crate::par;
use crate::transforms::TransformPlan;

/// Compact-Laplacian eigenvalue for mode angle `theta` and mesh width `h`.
pub fn compact_eigenvalue(theta: f64, h: f64) -> f64 {
    let s = theta.sin().powi(2);
    4.0 * s / (h * h * (1.0 - s / 3.0))
}

/// Mode angles for one axis, in spectral storage order.
pub fn mode_angles(n: usize, bc: BoundaryCondition) -> Vec<f64> {
    let nf = n as f64;
    match bc {
        BoundaryCondition::Periodic => (0..n).map(|k| k as f64 * PI / nf).collect(),
        BoundaryCondition::Dirichlet => (1..n).map(|k| k as f64 * PI / (2.0 * nf)).collect(),
        BoundaryCondition::Neumann => (0..=n).map(|k| k as f64 * PI / (2.0 * nf)).collect(),
    }
}

/// 1D compact-Laplacian eigenvalues, one per active unknown.
pub fn eigenvalues_1d(n: usize, h: f64, bc: BoundaryCondition) -> Result<Vec<f64>> {
    if n < 2 || !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "eigenvalues need N >= 2 and h > 0 (N = {n}, h = {h})"
        )));
    }
    Ok(mode_angles(n, bc)
        .into_iter()
        .map(|theta| compact_eigenvalue(theta, h))
        .collect())
}

/// `lambda^(alpha/2)` with `0^(alpha/2) = 0` and an exact identity at `alpha = 2`.
pub fn fractional_power(lambda: f64, alpha: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else if alpha == 2.0 {
        lambda
    } else {
        (0.5 * alpha * lambda.ln()).exp()
    }
}

/// Checks `alpha ∈ (1, 2]`, or `(0, 2]` when `relaxed`.
pub fn validate_alpha(alpha: f64, relaxed: bool) -> Result<()> {
    let lo = if relaxed { 0.0 } else { 1.0 };
    if alpha > lo && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange {
            alpha,
            range: if relaxed { "(0, 2]" } else { "(1, 2]" },
        })
    }
}

/// Tensor-summed eigenvalues of the compact Laplacian on a grid together
/// with their `alpha/2` power.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueField {
    grid: Grid,
    lambda: Vec<f64>,
    alpha: f64,
    lambda_pow: Vec<f64>,
}

impl EigenvalueField {
    /// Eigenvalues for `grid` raised to `alpha/2`, `alpha ∈ (1, 2]`.
    pub fn new(grid: &Grid, alpha: f64) -> Result<Self> {
        validate_alpha(alpha, false)?;
        Ok(Self::laplacian(grid).power(alpha))
    }

    /// Plain compact Laplacian (`alpha = 2`).
    pub fn laplacian(grid: &Grid) -> Self {
        let one_d: Vec<f64> = mode_angles(grid.intervals(), grid.bc())
            .into_iter()
            .map(|t| compact_eigenvalue(t, grid.h()))
            .collect();
        let m = grid.dof();
        let dim = grid.dim();
        let mut lambda = vec![0.0; grid.len()];
        par::for_each_indexed(&mut lambda, |idx, v| {
            let mut rest = idx;
            let mut sum = 0.0;
            for _ in 0..dim {
                sum += one_d[rest % m];
                rest /= m;
            }
            *v = sum;
        });
        EigenvalueField {
            grid: *grid,
            lambda_pow: lambda.clone(),
            lambda,
            alpha: 2.0,
        }
    }

    /// Same eigenvalues with a new fractional order in `(1, 2]`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        validate_alpha(alpha, false)?;
        Ok(self.power(alpha))
    }

    /// Same eigenvalues with a fractional order in `(0, 2]`.
    pub fn with_alpha_relaxed(&self, alpha: f64) -> Result<Self> {
        validate_alpha(alpha, true)?;
        Ok(self.power(alpha))
    }

    fn power(&self, alpha: f64) -> Self {
        let mut lambda_pow = vec![0.0; self.lambda.len()];
        let lambda = &self.lambda;
        par::for_each_indexed(&mut lambda_pow, |i, v| {
            *v = fractional_power(lambda[i], alpha)
        });
        EigenvalueField {
            grid: self.grid,
            lambda: self.lambda.clone(),
            alpha,
            lambda_pow,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_pow(&self) -> &[f64] {
        &self.lambda_pow
    }
}

/// `(−Δ_h)^{α/2}` applied through the fast transforms.
#[derive(Debug)]
pub struct FractionalLaplacian {
    plan: TransformPlan,
    eig: EigenvalueField,
}

impl FractionalLaplacian {
    pub fn new(grid: &Grid, alpha: f64) -> Result<Self> {
        Ok(FractionalLaplacian {
            plan: TransformPlan::new(grid),
            eig: EigenvalueField::new(grid, alpha)?,
        })
    }

    pub fn from_parts(plan: TransformPlan, eig: EigenvalueField) -> Result<Self> {
        if plan.grid() != eig.grid() {
            return Err(Error::InvalidGrid(
                "plan and eigenvalue grids differ".into(),
            ));
        }
        Ok(FractionalLaplacian { plan, eig })
    }

    pub fn eigenvalues(&self) -> &EigenvalueField {
        &self.eig
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        let mut spec = self.plan.forward(u)?;
        let pow = self.eig.lambda_pow();
        par::for_each_indexed(spec.values_mut(), |i, z: &mut Complex64| *z *= pow[i]);
        self.plan.inverse(&spec)
    }
}
