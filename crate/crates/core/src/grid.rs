//! Grid geometry, boundary conditions and field containers.
//!
//! Fields store only the active degrees of freedom of a uniform grid with
//! `N` intervals per axis. Storage is axis-major with `x` fastest, so the
//! flat index of `(i, j, k)` is `i + n * (j + n * k)` where `n` is the active
//! count per axis.

use std::fmt;

use crate::error::{Error, Result};

/// Homogeneous boundary condition applied on every face of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] = [
        BoundaryCondition::Periodic,
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Neumann,
    ];

    /// Unknowns per axis for a grid of `n` intervals.
    pub fn active_dof(self, n: usize) -> usize {
        match self {
            BoundaryCondition::Periodic => n,
            BoundaryCondition::Dirichlet => n - 1,
            BoundaryCondition::Neumann => n + 1,
        }
    }

    /// Grid node index of the first active unknown.
    pub fn first_node(self) -> usize {
        match self {
            BoundaryCondition::Dirichlet => 1,
            _ => 0,
        }
    }

    /// Numeric code used in binary snapshot headers.
    pub fn code(self) -> u32 {
        match self {
            BoundaryCondition::Periodic => 0,
            BoundaryCondition::Dirichlet => 1,
            BoundaryCondition::Neumann => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(BoundaryCondition::Periodic),
            1 => Some(BoundaryCondition::Dirichlet),
            2 => Some(BoundaryCondition::Neumann),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" | "p" => Ok(BoundaryCondition::Periodic),
            "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::InvalidGrid(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}

/// Uniform box grid with the same number of intervals and mesh width on
/// every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 3],
    upper: [f64; 3],
    n: usize,
    h: f64,
    bc: BoundaryCondition,
}

impl Grid {
    pub const MIN_INTERVALS: usize = 4;

    /// Builds a grid on `bounds` (one `(lower, upper)` pair per axis).
    ///
    /// All axes must have the same extent since a single mesh width is
    /// shared by the tensor-sum eigenvalue formulas.
    pub fn new(dim: usize, bounds: &[(f64, f64)], n: usize, bc: BoundaryCondition) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if bounds.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} axis bounds, got {}",
                bounds.len()
            )));
        }
        if n < Self::MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} intervals per axis, got {n}",
                Self::MIN_INTERVALS
            )));
        }
        let mut lower = [0.0; 3];
        let mut upper = [0.0; 3];
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: bounds ({lo}, {hi}) are not an increasing finite interval"
                )));
            }
            lower[axis] = lo;
            upper[axis] = hi;
        }
        let extent = upper[0] - lower[0];
        for axis in 1..dim {
            let e = upper[axis] - lower[axis];
            if (e - extent).abs() > 1e-12 * extent.abs().max(e.abs()) {
                return Err(Error::InvalidGrid(format!(
                    "anisotropic grid: axis 0 extent {extent} but axis {axis} extent {e}"
                )));
            }
        }
        Ok(Grid {
            dim,
            lower,
            upper,
            n,
            h: extent / n as f64,
            bc,
        })
    }

    /// Cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize, bc: BoundaryCondition) -> Result<Self> {
        let bounds = [(lo, hi); 3];
        Self::new(dim, &bounds[..dim.min(3)], n, bc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.upper[axis]
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|a| (self.lower[a], self.upper[a]))
            .collect()
    }

    /// Active unknowns per axis.
    pub fn dof(&self) -> usize {
        self.bc.active_dof(self.n)
    }

    /// Active shape, one entry per dimension.
    pub fn shape(&self) -> Vec<usize> {
        vec![self.dof(); self.dim]
    }

    /// Active shape padded with 1 to three axes.
    pub fn shape3(&self) -> [usize; 3] {
        let m = self.dof();
        let mut s = [1; 3];
        s[..self.dim].fill(m);
        s
    }

    /// Total number of active unknowns.
    pub fn len(&self) -> usize {
        self.dof().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of active index `j` along `axis`.
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        self.lower[axis] + (j + self.bc.first_node()) as f64 * self.h
    }

    /// Physical coordinates of a flat index; unused axes are 0.
    pub fn point(&self, index: usize) -> [f64; 3] {
        let m = self.dof();
        let mut p = [0.0; 3];
        let mut rest = index;
        for (axis, coord) in p.iter_mut().enumerate().take(self.dim) {
            *coord = self.coordinate(axis, rest % m);
            rest /= m;
        }
        p
    }
}

/// Real values on the active points of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Field {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Field { grid, values })
    }

    /// Samples `f` at every active node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64
    }
}

/// Ordered species fields sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    species: Vec<Field>,
}

impl State {
    pub fn new(species: Vec<Field>) -> Result<Self> {
        let Some(first) = species.first() else {
            return Err(Error::InvalidGrid(
                "state needs at least one species".into(),
            ));
        };
        let grid = *first.grid();
        if let Some(bad) = species.iter().find(|f| *f.grid() != grid) {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: bad.len(),
            });
        }
        Ok(State { species })
    }

    pub fn grid(&self) -> &Grid {
        self.species[0].grid()
    }

    pub fn species(&self) -> &[Field] {
        &self.species
    }

    pub fn species_mut(&mut self) -> &mut [Field] {
        &mut self.species
    }

    pub fn field(&self, s: usize) -> &Field {
        &self.species[s]
    }

    pub fn count(&self) -> usize {
        self.species.len()
    }

    pub fn is_finite(&self) -> bool {
        self.species.iter().all(Field::is_finite)
    }
}

/// Maximum pointwise difference between two fields on the same shape.
pub fn max_norm_error(numeric: &Field, exact: &Field) -> Result<f64> {
    if numeric.len() != exact.len() || numeric.grid().shape() != exact.grid().shape() {
        return Err(Error::ShapeMismatch {
            expected: exact.len(),
            actual: numeric.len(),
        });
    }
    Ok(numeric
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Observed order `log2(coarse / fine)` for a halving refinement.
pub fn convergence_order(coarse: f64, fine: f64) -> Result<f64> {
    if !(coarse > 0.0 && fine > 0.0) {
        return Err(Error::NonPositiveError { coarse, fine });
    }
    Ok((coarse / fine).log2())
}
