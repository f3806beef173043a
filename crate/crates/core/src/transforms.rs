//! Fast transforms that diagonalize the compact Laplacian.
//!
//! | boundary  | basis `P[i][j]`                 | realized as                      |
//! |-----------|---------------------------------|----------------------------------|
//! | periodic  | `exp(-2πi·ij/N)`, `i,j = 0..N`  | complex DFT of length `N`        |
//! | dirichlet | `sin(ijπ/N)`, `i,j = 1..N-1`    | DST-I via odd extension, `2N`    |
//! | neumann   | `cos(ijπ/N)`, `i,j = 0..=N`     | DCT-I via even reflection, `2N`  |
//!
//! The forward transform is unnormalized and the inverse carries all the
//! scaling. For periodic and Dirichlet grids the forward transform is the
//! matrix action `P·u`. For Neumann grids it is `P·D·u` with
//! `D = diag(1, 2, …, 2, 1)`: this is what the even reflection
//! `(u_0..u_N, u_{N-1}..u_1)` followed by a length-`2N` DFT produces, and
//! `(P·D)^2 = 2N·I` makes the inverse `P·D/(2N)`. Since `D` commutes with any
//! diagonal multiplier the spectral operator `inverse(Λ ⊙ forward(u))` equals
//! `P Λ P⁻¹ u` in every case.
//!
//! Multi-dimensional transforms are applied axis by axis as batched 1D line
//! transforms; lines are independent, so they run in parallel.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Field, Grid};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// Complex DFT (periodic).
    Dft,
    /// Type-I discrete sine transform (Dirichlet).
    DstI,
    /// Type-I discrete cosine transform (Neumann).
    DctI,
}

impl TransformKind {
    pub fn for_bc(bc: BoundaryCondition) -> Self {
        match bc {
            BoundaryCondition::Periodic => TransformKind::Dft,
            BoundaryCondition::Dirichlet => TransformKind::DstI,
            BoundaryCondition::Neumann => TransformKind::DctI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// Coefficients of a field in the transform basis of its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: data.len(),
            });
        }
        Ok(SpectralField { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

struct LineScratch {
    ext: Vec<Complex64>,
    fft: Vec<Complex64>,
}

/// Reusable transform plan for one grid. Immutable and `Sync`; every call
/// allocates its own per-worker scratch.
pub struct TransformPlan {
    grid: Grid,
    kind: TransformKind,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformPlan")
            .field("grid", &self.grid)
            .field("kind", &self.kind)
            .field("fft_len", &self.fft_len())
            .finish()
    }
}

impl TransformPlan {
    pub fn new(grid: &Grid) -> Self {
        let kind = TransformKind::for_bc(grid.bc());
        let n = grid.intervals();
        let len = match kind {
            TransformKind::Dft => n,
            TransformKind::DstI | TransformKind::DctI => 2 * n,
        };
        let mut planner = FftPlanner::new();
        TransformPlan {
            grid: *grid,
            kind,
            fft: planner.plan_fft_forward(len),
            ifft: planner.plan_fft_inverse(len),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// Length of the underlying complex FFT.
    pub fn fft_len(&self) -> usize {
        self.fft.len()
    }

    /// Length of one 1D line (active unknowns per axis).
    pub fn line_len(&self) -> usize {
        self.grid.dof()
    }

    pub fn forward(&self, field: &Field) -> Result<SpectralField> {
        self.check_len(field.len())?;
        let mut out = SpectralField::zeros(self.grid);
        let mut work = Vec::new();
        self.forward_real(field.values(), &mut out.data, &mut work);
        Ok(out)
    }

    /// Inverse transform keeping only the real part.
    pub fn inverse(&self, spectral: &SpectralField) -> Result<Field> {
        self.check_len(spectral.data.len())?;
        let mut data = spectral.data.clone();
        let mut out = vec![0.0; data.len()];
        let mut work = Vec::new();
        self.inverse_real(&mut data, &mut out, &mut work);
        Field::from_values(self.grid, out)
    }

    /// Inverse transform with the imaginary part retained.
    pub fn inverse_complex(&self, spectral: &SpectralField) -> Result<Vec<Complex64>> {
        self.check_len(spectral.data.len())?;
        let mut data = spectral.data.clone();
        self.inverse_in_place(&mut data, &mut Vec::new());
        Ok(data)
    }

    /// `out = forward(values)`; `work` is resized as needed and reusable.
    pub fn forward_real(&self, values: &[f64], out: &mut [Complex64], work: &mut Vec<Complex64>) {
        debug_assert_eq!(values.len(), out.len());
        par::for_each_indexed(out, |i, o| *o = Complex64::new(values[i], 0.0));
        self.forward_in_place(out, work);
    }

    /// `out = Re(inverse(spectral))`; `spectral` is overwritten.
    pub fn inverse_real(
        &self,
        spectral: &mut [Complex64],
        out: &mut [f64],
        work: &mut Vec<Complex64>,
    ) {
        debug_assert_eq!(spectral.len(), out.len());
        self.inverse_in_place(spectral, work);
        let src: &[Complex64] = spectral;
        par::for_each_indexed(out, |i, o| *o = src[i].re);
    }

    pub fn forward_in_place(&self, data: &mut [Complex64], work: &mut Vec<Complex64>) {
        for axis in 0..self.grid.dim() {
            self.transform_axis(data, axis, Direction::Forward, work);
        }
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64], work: &mut Vec<Complex64>) {
        for axis in 0..self.grid.dim() {
            self.transform_axis(data, axis, Direction::Inverse, work);
        }
    }

    /// Forward transform along one axis only.
    pub fn forward_axis(&self, data: &mut [Complex64], axis: usize) {
        self.transform_axis(data, axis, Direction::Forward, &mut Vec::new());
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                actual: len,
            });
        }
        Ok(())
    }

    fn scratch(&self) -> LineScratch {
        let fft_scratch = self
            .fft
            .get_inplace_scratch_len()
            .max(self.ifft.get_inplace_scratch_len());
        LineScratch {
            ext: match self.kind {
                TransformKind::Dft => Vec::new(),
                _ => vec![Complex64::new(0.0, 0.0); self.fft.len()],
            },
            fft: vec![Complex64::new(0.0, 0.0); fft_scratch],
        }
    }

    fn transform_axis(
        &self,
        data: &mut [Complex64],
        axis: usize,
        dir: Direction,
        work: &mut Vec<Complex64>,
    ) {
        let m = self.line_len();
        if axis == 0 {
            par::for_each_chunk(
                data,
                m,
                || self.scratch(),
                |s, _, line| self.transform_line(line, s, dir),
            );
            return;
        }
        let stride = m.pow(axis as u32);
        let block = stride * m;
        work.resize(data.len(), Complex64::new(0.0, 0.0));
        {
            let src: &[Complex64] = data;
            par::for_each_chunk(
                work,
                m,
                || self.scratch(),
                |s, l, line| {
                    let base = (l / stride) * block + l % stride;
                    for (p, v) in line.iter_mut().enumerate() {
                        *v = src[base + p * stride];
                    }
                    self.transform_line(line, s, dir);
                },
            );
        }
        let lines: &[Complex64] = work;
        par::for_each_indexed(data, |idx, v| {
            let inner = idx % stride;
            let p = (idx / stride) % m;
            let outer = idx / block;
            *v = lines[(outer * stride + inner) * m + p];
        });
    }

    fn transform_line(&self, line: &mut [Complex64], s: &mut LineScratch, dir: Direction) {
        let n = self.grid.intervals();
        match self.kind {
            TransformKind::Dft => match dir {
                Direction::Forward => self.fft.process_with_scratch(line, &mut s.fft),
                Direction::Inverse => {
                    self.ifft.process_with_scratch(line, &mut s.fft);
                    let scale = 1.0 / n as f64;
                    line.iter_mut().for_each(|v| *v *= scale);
                }
            },
            TransformKind::DstI => {
                // odd extension (0, u_1..u_{N-1}, 0, -u_{N-1}..-u_1)
                let ext = &mut s.ext;
                ext[0] = Complex64::new(0.0, 0.0);
                ext[n] = Complex64::new(0.0, 0.0);
                for j in 1..n {
                    ext[j] = line[j - 1];
                    ext[2 * n - j] = -line[j - 1];
                }
                self.fft.process_with_scratch(ext, &mut s.fft);
                let scale = match dir {
                    Direction::Forward => 0.5,
                    Direction::Inverse => 1.0 / n as f64,
                };
                for k in 1..n {
                    let w = ext[k];
                    // W_k = -2i Σ u_j sin(jkπ/N)
                    line[k - 1] = Complex64::new(-w.im, w.re) * scale;
                }
            }
            TransformKind::DctI => {
                // even reflection (u_0..u_N, u_{N-1}..u_1)
                let ext = &mut s.ext;
                ext[..=n].copy_from_slice(line);
                for j in 1..n {
                    ext[2 * n - j] = line[j];
                }
                self.fft.process_with_scratch(ext, &mut s.fft);
                let scale = match dir {
                    Direction::Forward => 1.0,
                    Direction::Inverse => 1.0 / (2 * n) as f64,
                };
                for (v, w) in line.iter_mut().zip(ext.iter()) {
                    *v = w * scale;
                }
            }
        }
    }
}

/// Dense 1D basis matrix matching [`TransformPlan::forward`] on one axis.
///
/// Row `k`, column `j` holds the weight of input `j` in output mode `k`.
pub fn dense_forward_matrix(n: usize, bc: BoundaryCondition) -> Vec<Vec<Complex64>> {
    let m = bc.active_dof(n);
    let nf = n as f64;
    (0..m)
        .map(|k| {
            (0..m)
                .map(|j| match bc {
                    BoundaryCondition::Periodic => Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (k * j) as f64 / nf,
                    ),
                    BoundaryCondition::Dirichlet => Complex64::new(
                        (((k + 1) * (j + 1)) as f64 * std::f64::consts::PI / nf).sin(),
                        0.0,
                    ),
                    BoundaryCondition::Neumann => {
                        let d = if j == 0 || j == n { 1.0 } else { 2.0 };
                        Complex64::new(d * ((k * j) as f64 * std::f64::consts::PI / nf).cos(), 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        Field::from_values(grid, v).unwrap()
    }

    fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
        v.fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn plan_lengths() {
        let g = |bc| Grid::cube(1, 0.0, 1.0, 16, bc).unwrap();
        let p = TransformPlan::new(&g(BoundaryCondition::Periodic));
        assert_eq!(
            (p.kind(), p.fft_len(), p.line_len()),
            (TransformKind::Dft, 16, 16)
        );
        let d = TransformPlan::new(&g(BoundaryCondition::Dirichlet));
        assert_eq!((d.kind(), d.line_len()), (TransformKind::DstI, 15));
        let n = TransformPlan::new(&g(BoundaryCondition::Neumann));
        assert_eq!(
            (n.kind(), n.fft_len(), n.line_len()),
            (TransformKind::DctI, 32, 17)
        );
    }

    #[test]
    fn constant_periodic_hits_dc_only() {
        let g = Grid::cube(2, 0.0, 1.0, 8, BoundaryCondition::Periodic).unwrap();
        let c = 1.7;
        let s = TransformPlan::new(&g)
            .forward(&Field::from_fn(g, |_| c))
            .unwrap();
        assert!((s.values()[0] - Complex64::new(c * 64.0, 0.0)).norm() < 1e-12);
        assert!(max_abs(s.values()[1..].iter().map(|z| z.norm())) < 1e-12);
    }

    #[test]
    fn dirichlet_sine_is_a_delta() {
        let n = 16;
        let g = Grid::cube(1, 0.0, 1.0, n, BoundaryCondition::Dirichlet).unwrap();
        let f = Field::from_fn(g, |p| (p[0] * std::f64::consts::PI).sin());
        let s = TransformPlan::new(&g).forward(&f).unwrap();
        assert!((s.values()[0].re - n as f64 / 2.0).abs() < 1e-12);
        assert!(max_abs(s.values()[1..].iter().map(|z| z.norm())) < 1e-12);
    }

    #[test]
    fn zero_spectrum_is_zero_field() {
        for bc in BoundaryCondition::ALL {
            let g = Grid::cube(2, 0.0, 1.0, 8, bc).unwrap();
            let f = TransformPlan::new(&g)
                .inverse(&SpectralField::zeros(g))
                .unwrap();
            assert!(f.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn round_trip_all_bcs_and_dims() {
        for bc in BoundaryCondition::ALL {
            for dim in 1..=3 {
                for n in [4, 8, 16, 32] {
                    if dim == 3 && n == 32 {
                        continue;
                    }
                    let g = Grid::cube(dim, 0.0, 1.0, n, bc).unwrap();
                    let plan = TransformPlan::new(&g);
                    let u = random_field(g, (n * 10 + dim) as u64);
                    let spec = plan.forward(&u).unwrap();
                    let back = plan.inverse_complex(&spec).unwrap();
                    let scale = max_abs(u.values().iter().copied());
                    let err = max_abs(back.iter().zip(u.values()).map(|(z, x)| (z - x).norm()));
                    assert!(err <= 1e-12 * scale, "{bc} d={dim} n={n}: {err}");
                    let imag = max_abs(back.iter().map(|z| z.im));
                    assert!(imag <= 1e-12 * scale, "{bc} d={dim} n={n}: imag {imag}");
                }
            }
        }
    }

    #[test]
    fn matches_dense_basis() {
        for bc in BoundaryCondition::ALL {
            for n in [4, 8, 16] {
                let g = Grid::cube(1, 0.0, 1.0, n, bc).unwrap();
                let u = random_field(g, n as u64);
                let fast = TransformPlan::new(&g).forward(&u).unwrap();
                let p = dense_forward_matrix(n, bc);
                for (k, row) in p.iter().enumerate() {
                    let dense: Complex64 = row.iter().zip(u.values()).map(|(a, x)| a * x).sum();
                    assert!(
                        (dense - fast.values()[k]).norm() < 1e-10,
                        "{bc} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn dirichlet_inverse_is_scaled_forward() {
        let n = 16;
        let g = Grid::cube(1, 0.0, 1.0, n, BoundaryCondition::Dirichlet).unwrap();
        let plan = TransformPlan::new(&g);
        let u = random_field(g, 3);
        let spec = SpectralField::from_values(
            g,
            u.values().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap();
        let inv = plan.inverse(&spec).unwrap();
        let fwd = plan.forward(&u).unwrap();
        for (a, b) in inv.values().iter().zip(fwd.values()) {
            assert!((a - 2.0 / n as f64 * b.re).abs() < 1e-13);
        }
    }

    #[test]
    fn linearity_and_axis_commutativity() {
        for bc in BoundaryCondition::ALL {
            let g = Grid::cube(2, 0.0, 1.0, 8, bc).unwrap();
            let plan = TransformPlan::new(&g);
            let u = random_field(g, 1);
            let v = random_field(g, 2);
            let (a, b) = (0.7, -2.3);
            let w = Field::from_values(
                g,
                u.values()
                    .iter()
                    .zip(v.values())
                    .map(|(x, y)| a * x + b * y)
                    .collect(),
            )
            .unwrap();
            let (fu, fv, fw) = (
                plan.forward(&u).unwrap(),
                plan.forward(&v).unwrap(),
                plan.forward(&w).unwrap(),
            );
            for i in 0..g.len() {
                let lin = fu.values()[i] * a + fv.values()[i] * b;
                assert!((lin - fw.values()[i]).norm() < 1e-12 * 64.0);
            }

            let base: Vec<Complex64> = u.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let mut xy = base.clone();
            plan.forward_axis(&mut xy, 0);
            plan.forward_axis(&mut xy, 1);
            let mut yx = base;
            plan.forward_axis(&mut yx, 1);
            plan.forward_axis(&mut yx, 0);
            let err = max_abs(xy.iter().zip(&yx).map(|(p, q)| (p - q).norm()));
            assert!(err < 1e-12, "{bc}: {err}");
        }
    }
}
