//! Dense reference implementations for small 1D grids.
//!
//! Builds the compact-scheme matrices `A` and `B` explicitly and computes
//! everything the fast path computes (eigenvalues, fractional powers, one
//! ETD step, the exact linear propagator) with dense linear algebra. Nothing
//! here is fast; it exists to check the transform path at `N ≤ 64`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::etd::{EtdWeights, StepperContext};
use crate::grid::{BoundaryCondition, Field, Grid};
use crate::models::{initial_state, Domain, ReactionModel, Species};
use crate::spectrum::{compact_eigenvalue, eigenvalues_1d, fractional_power, FractionalLaplacian};

/// Largest interval count accepted by the dense routines.
pub const MAX_DENSE_N: usize = 64;
/// Largest interval count accepted by [`exact_linear_step`] callers.
pub const MAX_EXPONENTIAL_N: usize = 32;

/// The compact pair `A u'' ≈ B u` for one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub bc: BoundaryCondition,
    pub n: usize,
    pub h: f64,
}

impl DensePair {
    pub fn new(n: usize, h: f64, bc: BoundaryCondition) -> Result<Self> {
        if n > MAX_DENSE_N {
            return Err(Error::Oracle(format!(
                "dense oracle limited to N <= {MAX_DENSE_N}, got {n}"
            )));
        }
        if n < 2 || !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "dense pair needs N >= 2 and h > 0 (N = {n}, h = {h})"
            )));
        }
        let m = bc.active_dof(n);
        let ih2 = 1.0 / (h * h);
        let mut a = DMatrix::zeros(m, m);
        let mut b = DMatrix::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = 5.0 / 6.0;
            b[(i, i)] = 2.0 * ih2;
            if i + 1 < m {
                a[(i, i + 1)] = 1.0 / 12.0;
                a[(i + 1, i)] = 1.0 / 12.0;
                b[(i, i + 1)] = -ih2;
                b[(i + 1, i)] = -ih2;
            }
        }
        match bc {
            BoundaryCondition::Dirichlet => {}
            BoundaryCondition::Periodic => {
                a[(0, m - 1)] += 1.0 / 12.0;
                a[(m - 1, 0)] += 1.0 / 12.0;
                b[(0, m - 1)] -= ih2;
                b[(m - 1, 0)] -= ih2;
            }
            BoundaryCondition::Neumann => {
                a[(0, 1)] = 1.0 / 6.0;
                a[(m - 1, m - 2)] = 1.0 / 6.0;
                b[(0, 1)] = -2.0 * ih2;
                b[(m - 1, m - 2)] = -2.0 * ih2;
            }
        }
        Ok(DensePair { a, b, bc, n, h })
    }

    pub fn dof(&self) -> usize {
        self.a.nrows()
    }

    /// `T = A⁻¹B`.
    pub fn operator(&self) -> Result<DMatrix<f64>> {
        self.a
            .clone()
            .lu()
            .solve(&self.b)
            .ok_or_else(|| Error::Oracle("A is singular".into()))
    }

    /// Row weights making `W A` and `W B` symmetric.
    fn symmetrizer(&self) -> DVector<f64> {
        let m = self.dof();
        let mut w = DVector::from_element(m, 1.0);
        if self.bc == BoundaryCondition::Neumann {
            w[0] = 0.5;
            w[m - 1] = 0.5;
        }
        w
    }

    /// Eigendecomposition of `A⁻¹B` through the symmetric-definite pencil.
    pub fn decompose(&self) -> Result<DenseSpectral> {
        let w = self.symmetrizer();
        let a_hat = DMatrix::from_diagonal(&w) * &self.a;
        let b_hat = DMatrix::from_diagonal(&w) * &self.b;
        let chol = a_hat
            .cholesky()
            .ok_or_else(|| Error::Oracle("weighted A is not positive definite".into()))?;
        let m = self.dof();
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(m, m))
            .ok_or_else(|| Error::Oracle("singular Cholesky factor".into()))?;
        let s = &l_inv * &b_hat * l_inv.transpose();
        let s = 0.5 * (&s + s.transpose());
        let eig = s.symmetric_eigen();
        // T = L⁻ᵀ V Λ Vᵀ Lᵀ
        let left = l_inv.transpose() * &eig.eigenvectors;
        let right = eig.eigenvectors.transpose() * chol.l().transpose();
        let spectral = DenseSpectral {
            left,
            right,
            lambda: eig.eigenvalues.iter().copied().collect(),
        };
        let t = self.operator()?;
        let rebuilt = spectral.apply_matrix(|l| l);
        let scale = t.amax().max(f64::MIN_POSITIVE);
        let residual = (&rebuilt - &t).amax() / scale;
        if residual > 1e-10 {
            return Err(Error::Oracle(format!(
                "eigendecomposition residual {residual:e} exceeds 1e-10"
            )));
        }
        Ok(spectral)
    }
}

/// `A⁻¹B = left · diag(lambda) · right` with `right = left⁻¹`.
#[derive(Debug, Clone)]
pub struct DenseSpectral {
    left: DMatrix<f64>,
    right: DMatrix<f64>,
    lambda: Vec<f64>,
}

impl DenseSpectral {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    /// Eigenvalues with round-off noise around the zero mode removed.
    fn clean_lambda(&self) -> Vec<f64> {
        let top = self.lambda.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        self.lambda
            .iter()
            .map(|&l| {
                if l.abs() <= 1e-12 * top {
                    0.0
                } else {
                    l.max(0.0)
                }
            })
            .collect()
    }

    /// `g(A⁻¹B)` as a dense matrix.
    pub fn apply_matrix(&self, g: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d: Vec<f64> = self.clean_lambda().into_iter().map(g).collect();
        let mut scaled = self.left.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[j];
        }
        scaled * &self.right
    }

    /// `g(A⁻¹B) u`.
    pub fn apply(&self, g: impl Fn(f64) -> f64, u: &[f64]) -> Vec<f64> {
        let v = &self.right * DVector::from_column_slice(u);
        let d = self.clean_lambda();
        let v = DVector::from_iterator(v.len(), v.iter().zip(&d).map(|(x, &l)| x * g(l)));
        (&self.left * v).iter().copied().collect()
    }
}

/// Sorted eigenvalues of `A⁻¹B` from a general (non-symmetric) eigensolver.
pub fn dense_eigenvalues(pair: &DensePair) -> Result<Vec<f64>> {
    let t = pair.operator()?;
    let ev = t.complex_eigenvalues();
    let top = ev.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut out = Vec::with_capacity(ev.len());
    for z in ev.iter() {
        if z.im.abs() > 1e-8 * top.max(1.0) {
            return Err(Error::Oracle(format!("complex eigenvalue {z} of A⁻¹B")));
        }
        out.push(z.re);
    }
    // the zero mode comes back as ±ε; powers below 1 would magnify it
    for l in out.iter_mut() {
        if l.abs() <= 1e-12 * top {
            *l = 0.0;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn max_relative_deviation(dense: &[f64], closed: &[f64]) -> Result<f64> {
    if dense.len() != closed.len() {
        return Err(Error::ShapeMismatch {
            expected: closed.len(),
            actual: dense.len(),
        });
    }
    let mut closed = closed.to_vec();
    closed.sort_by(f64::total_cmp);
    Ok(dense
        .iter()
        .zip(&closed)
        .map(|(d, c)| (d - c).abs() / c.abs().max(1.0))
        .fold(0.0, f64::max))
}

/// Max relative deviation between the closed-form `λ^{α/2}` and the dense
/// eigenvalues of `A⁻¹B` raised to `α/2`. Values below 1 are compared
/// absolutely.
pub fn dense_eigen_check(n: usize, h: f64, bc: BoundaryCondition, alpha: f64) -> Result<f64> {
    let pair = DensePair::new(n, h, bc)?;
    let closed: Vec<f64> = eigenvalues_1d(n, h, bc)?
        .into_iter()
        .map(|l| fractional_power(l, alpha))
        .collect();
    let dense: Vec<f64> = dense_eigenvalues(&pair)?
        .into_iter()
        .map(|l| fractional_power(l.max(0.0), alpha))
        .collect();
    max_relative_deviation(&dense, &closed)
}

/// Same comparison against arbitrary closed-form eigenvalues (`α = 2`).
pub fn eigen_deviation(pair: &DensePair, closed: &[f64]) -> Result<f64> {
    max_relative_deviation(&dense_eigenvalues(pair)?, closed)
}

/// Periodic eigenvalues using the half angle `kπ/(2N)`, which does not
/// match the circulant matrices. Kept to demonstrate the mismatch.
pub fn half_angle_periodic_eigenvalues(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| compact_eigenvalue(k as f64 * std::f64::consts::PI / (2.0 * n as f64), h))
        .collect()
}

/// `(A⁻¹B)^{α/2} u`.
pub fn dense_fractional_apply(pair: &DensePair, alpha: f64, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != pair.dof() {
        return Err(Error::ShapeMismatch {
            expected: pair.dof(),
            actual: u.len(),
        });
    }
    let spectral = pair.decompose()?;
    Ok(spectral.apply(|l| fractional_power(l, alpha), u))
}

/// Dense `κ (A⁻¹B)^{α/2}`.
pub fn dense_diffusion_matrix(pair: &DensePair, alpha: f64, kappa: f64) -> Result<DMatrix<f64>> {
    Ok(pair
        .decompose()?
        .apply_matrix(|l| kappa * fractional_power(l, alpha)))
}

/// `e^{(B − A)τ} v` by scaling and squaring.
pub fn exact_linear_step(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tau: f64,
    v: &[f64],
) -> Result<Vec<f64>> {
    let m = a.nrows();
    if a.shape() != (m, m) || b.shape() != (m, m) || v.len() != m {
        return Err(Error::ShapeMismatch {
            expected: m,
            actual: v.len(),
        });
    }
    if m > MAX_EXPONENTIAL_N + 1 {
        return Err(Error::Oracle(format!(
            "matrix exponential limited to {} unknowns, got {m}",
            MAX_EXPONENTIAL_N + 1
        )));
    }
    if tau == 0.0 {
        return Ok(v.to_vec());
    }
    let e = ((b - a) * tau).exp();
    Ok((e * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect())
}

/// One ETDRK4-P13 step of `u' = −κ(A⁻¹B)^{α/2} u + f(u)` with dense matrix
/// functions in place of the transform path.
pub fn dense_etd_step(
    pair: &DensePair,
    alpha: f64,
    kappa: f64,
    tau: f64,
    u: &[f64],
    f: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let sp = pair.decompose()?;
    let w = |l: f64| EtdWeights::at(kappa * tau * fractional_power(l, alpha), tau);
    let op = |g: fn(&EtdWeights) -> f64, x: &[f64]| sp.apply(|l| g(&w(l)), x);
    let add = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>();

    let fu = f(u);
    let a = add(&op(|w| w.q13, u), &op(|w| w.phi, &fu));
    let fa = f(&a);
    let b = add(&op(|w| w.q13, u), &op(|w| w.phi, &fa));
    let fb = f(&b);
    let g: Vec<f64> = fb.iter().zip(&fu).map(|(p, q)| 2.0 * p - q).collect();
    let c = add(&op(|w| w.q13, &a), &op(|w| w.phi, &g));
    let fc = f(&c);
    let sab = add(&fa, &fb);
    let mut out = add(&op(|w| w.r13, u), &op(|w| w.phi1, &fu));
    out = add(&out, &op(|w| w.phi2, &sab));
    out = add(&out, &op(|w| w.phi3, &fc));
    Ok(out)
}

/// Spatially varying linear reaction `f(u) = r(x) u` with
/// `r(x) = base + amp cos(2πx / L)`, a single diffusing species and a
/// configurable 1D domain. Used for truncation-order checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearReaction {
    pub alpha: f64,
    pub kappa: f64,
    pub base: f64,
    pub amp: f64,
    pub lower: f64,
    pub upper: f64,
    pub bc: BoundaryCondition,
}

impl LinearReaction {
    pub fn rate(&self, x: f64) -> f64 {
        let l = self.upper - self.lower;
        self.base + self.amp * (2.0 * std::f64::consts::PI * (x - self.lower) / l).cos()
    }
}

impl ReactionModel for LinearReaction {
    fn name(&self) -> &'static str {
        "linear"
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
            lower: self.lower,
            upper: self.upper,
            default_bc: self.bc,
            allowed: &BoundaryCondition::ALL,
        }
    }

    fn react(&self, _t: f64, x: [f64; 3], u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = self.rate(x[0]) * u[0];
        Ok(())
    }

    fn initial(&self, x: [f64; 3], out: &mut [f64]) {
        let s = std::f64::consts::PI * (x[0] - self.lower) / (self.upper - self.lower);
        out[0] = match self.bc {
            BoundaryCondition::Dirichlet => s.sin() + 0.3 * (3.0 * s).sin(),
            BoundaryCondition::Neumann => 0.5 + s.cos() + 0.3 * (3.0 * s).cos(),
            BoundaryCondition::Periodic => 0.5 + (2.0 * s).sin() + 0.3 * (6.0 * s).cos(),
        };
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("kappa", self.kappa),
            ("base", self.base),
            ("amp", self.amp),
        ]
    }

    fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" => self.alpha = value,
            "kappa" => self.kappa = value,
            "base" => self.base = value,
            "amp" => self.amp = value,
            _ => return Err(crate::models::unknown_param(self.name(), name, value)),
        }
        Ok(())
    }
}

/// Stiffness scale `κ λ_max^{α/2}` of the 1D unit-interval problem.
fn stiffness(n: usize, alpha: f64, kappa: f64) -> f64 {
    let h = 1.0 / n as f64;
    kappa * fractional_power(compact_eigenvalue(std::f64::consts::FRAC_PI_2, h), alpha)
}

/// Linear test problem on `(0, 1)` whose reaction rate is comparable to the
/// stiffest diffusion mode, so that `τ = 2^{-k} / σ` resolves both.
pub fn linear_test_problem(
    n: usize,
    bc: BoundaryCondition,
    alpha: f64,
) -> Result<(LinearReaction, Grid)> {
    let sigma = stiffness(n, alpha, 1.0);
    let model = LinearReaction {
        alpha,
        kappa: 1.0,
        base: 0.2 * sigma,
        amp: sigma,
        lower: 0.0,
        upper: 1.0,
        bc,
    };
    let grid = Grid::cube(1, 0.0, 1.0, n, bc)?;
    Ok((model, grid))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// One fast ETD step against the exact propagator `e^{(B − A)τ}`.
pub fn linear_step_error(model: &LinearReaction, grid: &Grid, tau: f64) -> Result<f64> {
    let pair = DensePair::new(grid.intervals(), grid.h(), grid.bc())?;
    let a = dense_diffusion_matrix(&pair, model.alpha, model.kappa)?;
    let m = pair.dof();
    let b = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            model.rate(grid.coordinate(0, i))
        } else {
            0.0
        }
    });
    let u0 = initial_state(model, grid);
    let exact = exact_linear_step(&a, &b, tau, u0.field(0).values())?;
    let mut ctx = StepperContext::new(grid, Arc::new(model.clone()), tau)?;
    let mut u = u0;
    ctx.step(&mut u, 0.0, 0)?;
    Ok(max_abs_diff(u.field(0).values(), &exact))
}

/// One fast ETD step against the same step built from dense matrix functions.
pub fn etd_step_deviation(model: &LinearReaction, grid: &Grid, tau: f64) -> Result<f64> {
    let pair = DensePair::new(grid.intervals(), grid.h(), grid.bc())?;
    let rates: Vec<f64> = (0..pair.dof())
        .map(|i| model.rate(grid.coordinate(0, i)))
        .collect();
    let u0 = initial_state(model, grid);
    let dense = dense_etd_step(
        &pair,
        model.alpha,
        model.kappa,
        tau,
        u0.field(0).values(),
        |u| u.iter().zip(&rates).map(|(v, r)| v * r).collect(),
    )?;
    let mut ctx = StepperContext::new(grid, Arc::new(model.clone()), tau)?;
    let mut u = u0;
    ctx.step(&mut u, 0.0, 0)?;
    let scale = dense.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(max_abs_diff(u.field(0).values(), &dense) / scale)
}

/// Least-squares slope of `log err` against `log τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

impl OrderFit {
    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Local truncation order of one ETD step on the linear test problem,
/// from `τ = 1/(4σ), 1/(8σ), 1/(16σ)`.
pub fn etd_order_fit(n: usize, bc: BoundaryCondition, alpha: f64) -> Result<OrderFit> {
    let (model, grid) = linear_test_problem(n, bc, alpha)?;
    let sigma = stiffness(n, alpha, model.kappa);
    let taus: Vec<f64> = (2..5).map(|k| 1.0 / (sigma * f64::powi(2.0, k))).collect();
    let errors = taus
        .iter()
        .map(|&tau| linear_step_error(&model, &grid, tau))
        .collect::<Result<Vec<_>>>()?;
    let slope = fit_slope(&taus, &errors);
    Ok(OrderFit {
        taus,
        errors,
        slope,
    })
}

/// Max-norm gap between the transform-path fractional Laplacian and the
/// dense one over `samples` random fields with entries in `[−1, 1]`.
pub fn fractional_apply_deviation(
    n: usize,
    bc: BoundaryCondition,
    alpha: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let grid = Grid::cube(1, 0.0, 1.0, n, bc)?;
    let pair = DensePair::new(n, grid.h(), bc)?;
    let spectral = pair.decompose()?;
    let fast = FractionalLaplacian::new(&grid, alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let u: Vec<f64> = (0..grid.len())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let dense = spectral.apply(|l| fractional_power(l, alpha), &u);
        let got = fast.apply(&Field::from_values(grid, u)?)?;
        worst = worst.max(max_abs_diff(got.values(), &dense));
    }
    Ok(worst)
}

/// Everything the dense oracle checks for one `(N, bc, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n: usize,
    pub bc: BoundaryCondition,
    pub alpha: f64,
    pub eigen_deviation: f64,
    pub apply_deviation: f64,
    pub step_deviation: f64,
    pub order: OrderFit,
}

pub const DEVIATION_TOLERANCE: f64 = 1e-10;
pub const ORDER_TARGET: f64 = 5.0;
pub const ORDER_TOLERANCE: f64 = 0.2;

impl OracleReport {
    pub fn run(n: usize, bc: BoundaryCondition, alpha: f64, seed: u64) -> Result<Self> {
        let h = 1.0 / n as f64;
        let (model, grid) = linear_test_problem(n, bc, alpha)?;
        let tau = 1.0 / (4.0 * stiffness(n, alpha, model.kappa));
        Ok(OracleReport {
            n,
            bc,
            alpha,
            eigen_deviation: dense_eigen_check(n, h, bc, alpha)?,
            apply_deviation: fractional_apply_deviation(n, bc, alpha, 10, seed)?,
            step_deviation: etd_step_deviation(&model, &grid, tau)?,
            order: etd_order_fit(n, bc, alpha)?,
        })
    }

    /// Names of the checks that exceed their thresholds.
    pub fn breaches(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.eigen_deviation <= DEVIATION_TOLERANCE) {
            out.push("eigenvalues");
        }
        if !(self.apply_deviation <= DEVIATION_TOLERANCE) {
            out.push("fractional apply");
        }
        if !(self.step_deviation <= DEVIATION_TOLERANCE) {
            out.push("etd step");
        }
        if !((self.order.slope - ORDER_TARGET).abs() <= ORDER_TOLERANCE) {
            out.push("etd order");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BoundaryCondition::*;

    #[test]
    fn dirichlet_matrices() {
        let p = DensePair::new(4, 0.25, Dirichlet).unwrap();
        assert_eq!(p.dof(), 3);
        assert_eq!(p.a[(1, 1)], 5.0 / 6.0);
        assert_eq!(p.a[(1, 0)], 1.0 / 12.0);
        assert_eq!(p.a[(0, 2)], 0.0);
        assert_eq!(p.b[(0, 0)], 32.0);
        assert_eq!(p.b[(0, 1)], -16.0);
    }

    #[test]
    fn periodic_rows_sum_to_zero() {
        let p = DensePair::new(4, 0.25, Periodic).unwrap();
        for i in 0..4 {
            assert_eq!(p.b.row(i).sum(), 0.0);
            assert!((p.a.row(i).sum() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn neumann_boundary_rows() {
        let p = DensePair::new(4, 0.5, Neumann).unwrap();
        assert_eq!(p.dof(), 5);
        let row: Vec<f64> = p.b.row(0).iter().copied().collect();
        assert_eq!(row, vec![8.0, -8.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.a[(4, 3)], 1.0 / 6.0);
    }

    #[test]
    fn dirichlet_a_is_diagonally_dominant() {
        let p = DensePair::new(16, 1.0 / 16.0, Dirichlet).unwrap();
        for i in 0..p.dof() {
            let off: f64 = (0..p.dof())
                .filter(|&j| j != i)
                .map(|j| p.a[(i, j)].abs())
                .sum();
            assert!(p.a[(i, i)] > off);
        }
    }

    #[test]
    fn guard_rejects_large_n() {
        assert!(matches!(
            DensePair::new(128, 0.01, Periodic),
            Err(Error::Oracle(_))
        ));
    }

    #[test]
    fn eigen_check_all_bcs() {
        for bc in BoundaryCondition::ALL {
            for alpha in [1.4, 2.0] {
                let d = dense_eigen_check(8, 1.0 / 8.0, bc, alpha).unwrap();
                assert!(d < 1e-10, "{bc} {alpha}: {d}");
            }
        }
        assert_eq!(
            dense_eigenvalues(&DensePair::new(8, 0.125, Neumann).unwrap())
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn half_angle_does_not_match_circulant() {
        let p = DensePair::new(8, 0.125, Periodic).unwrap();
        let d = eigen_deviation(&p, &half_angle_periodic_eigenvalues(8, 0.125)).unwrap();
        assert!(d > 0.1, "{d}");
    }

    #[test]
    fn square_power_is_the_operator() {
        for bc in BoundaryCondition::ALL {
            let p = DensePair::new(8, 0.125, bc).unwrap();
            let u: Vec<f64> = (0..p.dof()).map(|i| ((i * 7 % 5) as f64) - 1.3).collect();
            let direct = p.operator().unwrap() * DVector::from_column_slice(&u);
            let pow = dense_fractional_apply(&p, 2.0, &u).unwrap();
            let scale = direct.amax();
            for (x, y) in pow.iter().zip(direct.iter()) {
                assert!((x - y).abs() <= 1e-11 * scale);
            }
        }
    }

    #[test]
    fn constants_are_annihilated() {
        for bc in [Periodic, Neumann] {
            let p = DensePair::new(16, 1.0 / 16.0, bc).unwrap();
            let u = vec![1.0; p.dof()];
            let out = dense_fractional_apply(&p, 1.5, &u).unwrap();
            assert!(out.iter().all(|v| v.abs() < 1e-11), "{bc}: {out:?}");
        }
    }

    #[test]
    fn exponential_on_eigenvector() {
        let p = DensePair::new(8, 0.125, Dirichlet).unwrap();
        let a = p.operator().unwrap();
        let zero = DMatrix::zeros(7, 7);
        let v: Vec<f64> = (1..8)
            .map(|j| (std::f64::consts::PI * j as f64 / 8.0).sin())
            .collect();
        let lambda = compact_eigenvalue(std::f64::consts::PI / 16.0, 0.125);
        let tau = 0.01;
        let out = exact_linear_step(&a, &zero, tau, &v).unwrap();
        for (o, x) in out.iter().zip(&v) {
            assert!((o - (-lambda * tau).exp() * x).abs() < 1e-12);
        }
        assert_eq!(exact_linear_step(&a, &zero, 0.0, &v).unwrap(), v);
    }

    #[test]
    fn report_dirichlet_16() {
        let r = OracleReport::run(16, Dirichlet, 1.4, 7).unwrap();
        assert!(r.breaches().is_empty(), "{r:?}");
        assert!(r
            .order
            .ratios()
            .iter()
            .all(|q| (q / 32.0 - 1.0).abs() < 0.15));
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 0.5, 0.25];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(5)).collect();
        assert!((fit_slope(&x, &y) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dense_etd_without_reaction_is_pade() {
        let p = DensePair::new(8, 0.125, Dirichlet).unwrap();
        let v: Vec<f64> = (1..8)
            .map(|j| (std::f64::consts::PI * j as f64 / 8.0).sin())
            .collect();
        let lambda = compact_eigenvalue(std::f64::consts::PI / 16.0, 0.125);
        let tau = 0.05;
        let out = dense_etd_step(&p, 2.0, 1.0, tau, &v, |u| vec![0.0; u.len()]).unwrap();
        let r = crate::etd::pade13(tau * lambda);
        for (o, x) in out.iter().zip(&v) {
            assert!((o - r * x).abs() < 1e-12);
        }
    }
}
