//! Linear stability of ETDRK4-P13.
//!
//! For `u' = −c u + γ u` one step multiplies `u` by
//! `r(x, y) = c0 + c1 x + c2 x² + c3 x³ + c4 x⁴` with `x = γτ` and `y = −cτ`.
//! The coefficients are rational in `y` over the positive (for `y ≤ 0`)
//! denominators `D1 = 24 − 18y + 6y² − y³` and `D2 = 192 − 72y + 12y² − y³`.
//! At `y = 0` the polynomial is the classical RK4 one.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Smallest accepted angular resolution of a boundary trace.
pub const MIN_THETA_SAMPLES: usize = 64;
/// Default `y` values for boundary traces.
pub const DEFAULT_Y: [f64; 5] = [0.0, -5.0, -10.0, -20.0, -40.0];

/// Coefficients `c0..c4` of the amplification polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationCoeffs {
    pub y: f64,
    pub c: [f64; 5],
}

fn horner(coeffs_high_first: &[f64], y: f64) -> f64 {
    coeffs_high_first.iter().fold(0.0, |acc, &c| acc * y + c)
}

const C1_NUMERATOR: [f64; 11] = [
    -1.0,
    32.0,
    -600.0,
    6240.0,
    -46464.0,
    165888.0,
    470016.0,
    -9621504.0,
    55738368.0,
    -148635648.0,
    169869312.0,
];

const C2_NUMERATOR: [f64; 8] = [
    1.0, -25.0, 404.0, -2976.0, 11712.0, 34560.0, -221184.0, 442368.0,
];

impl AmplificationCoeffs {
    pub fn new(y: f64) -> Result<Self> {
        if !(y <= 0.0) || !y.is_finite() {
            return Err(Error::InvalidParameter {
                name: "y".into(),
                value: y,
                reason: "amplification coefficients need finite y <= 0".into(),
            });
        }
        let d1 = 24.0 - 18.0 * y + 6.0 * y * y - y * y * y;
        let d2 = 192.0 - 72.0 * y + 12.0 * y * y - y * y * y;
        let q = 96.0 - 12.0 * y + y * y;
        let d221 = d2 * d2 * d1;
        let d321 = d221 * d2;
        let c0 = 6.0 * (4.0 + y) / d1;
        let c1 = horner(&C1_NUMERATOR, y) / d321;
        let c2 = horner(&C2_NUMERATOR, y) / d221;
        let c3 = 2.0 * q * q * horner(&[1.0, 8.0, 240.0, -960.0, 1536.0], y) / d321;
        let c4 = 2.0 * q * q * q * (4.0 - 3.0 * y + y * y) / d321;
        Ok(AmplificationCoeffs {
            y,
            c: [c0, c1, c2, c3, c4],
        })
    }

    /// `r(x, y)`.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let c = &self.c;
        (((x * c[4] + c[3]) * x + c[2]) * x + c[1]) * x + c[0]
    }

    /// `∂r/∂x`.
    pub fn derivative(&self, x: Complex64) -> Complex64 {
        let c = &self.c;
        ((x * (4.0 * c[4]) + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1]
    }

    /// Roots of `r(x) = target`, each refined by one Newton step.
    pub fn solve(&self, target: Complex64) -> Result<[Complex64; 4]> {
        let c = &self.c;
        let lead = c[4];
        let a = [
            (Complex64::new(c[0], 0.0) - target) / lead,
            Complex64::new(c[1] / lead, 0.0),
            Complex64::new(c[2] / lead, 0.0),
            Complex64::new(c[3] / lead, 0.0),
        ];
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        #[rustfmt::skip]
        let companion = Matrix4::new(
            zero, zero, zero, -a[0],
            one,  zero, zero, -a[1],
            zero, one,  zero, -a[2],
            zero, zero, one,  -a[3],
        );
        let ev = companion
            .eigenvalues()
            .ok_or_else(|| Error::Oracle("companion eigenvalues did not converge".into()))?;
        let mut roots = [zero; 4];
        for (r, z) in roots.iter_mut().zip(ev.iter()) {
            let p = self.eval(*z) - target;
            let dp = self.derivative(*z);
            *r = if dp.norm() > 0.0 { *z - p / dp } else { *z };
        }
        Ok(roots)
    }
}

/// `r(x, y)` for the ETDRK4-P13 scheme.
pub fn amplification_factor(x: Complex64, y: f64) -> Result<Complex64> {
    Ok(AmplificationCoeffs::new(y)?.eval(x))
}

/// One point on a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub x: Complex64,
}

/// The curve `|r(x, y)| = 1` in the complex `x` plane, split into closed
/// loops that each follow the roots continuously in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCurve {
    pub y: f64,
    pub thetas: Vec<f64>,
    pub loops: Vec<Vec<BoundaryPoint>>,
}

impl StabilityCurve {
    pub fn points(&self) -> impl Iterator<Item = &BoundaryPoint> {
        self.loops.iter().flatten()
    }

    /// `(min re, max re, min im, max im)` over all points.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.points().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| (a.min(p.x.re), b.max(p.x.re), c.min(p.x.im), d.max(p.x.im)),
        )
    }

    /// Leftmost crossing of the real axis, interpolated between samples.
    pub fn leftmost_real_crossing(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for lp in &self.loops {
            for i in 0..lp.len() {
                let (p, q) = (lp[i].x, lp[(i + 1) % lp.len()].x);
                if p.im == 0.0 || p.im * q.im < 0.0 {
                    let s = if p.im == q.im {
                        0.0
                    } else {
                        p.im / (p.im - q.im)
                    };
                    let re = p.re + s * (q.re - p.re);
                    best = Some(best.map_or(re, |b: f64| b.min(re)));
                }
            }
        }
        best
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Permutation `p` minimising `Σ |prev[k] − next[p[k]]|`.
fn best_match(prev: &[Complex64; 4], next: &[Complex64; 4], perms: &[[usize; 4]]) -> [usize; 4] {
    let cost = |p: &[usize; 4]| (0..4).map(|k| (prev[k] - next[p[k]]).norm()).sum::<f64>();
    *perms
        .iter()
        .min_by(|p, q| cost(p).total_cmp(&cost(q)))
        .expect("24 permutations")
}

/// Traces `|r(x, y)| = 1` at `θ_j = 2πj / n_theta`.
pub fn stability_boundary(y: f64, n_theta: usize) -> Result<StabilityCurve> {
    if n_theta < MIN_THETA_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_theta".into(),
            value: n_theta as f64,
            reason: format!("need at least {MIN_THETA_SAMPLES} angles"),
        });
    }
    let coeffs = AmplificationCoeffs::new(y)?;
    let thetas: Vec<f64> = (0..n_theta)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64)
        .collect();
    let roots = par::map_collect(&thetas, |&theta| -> Result<[Complex64; 4]> {
        let roots = coeffs.solve(Complex64::from_polar(1.0, theta))?;
        for x in &roots {
            let residual = (coeffs.eval(*x).norm() - 1.0).abs();
            if !(residual < 1e-9) {
                return Err(Error::RootFinder { theta, residual });
            }
        }
        Ok(roots)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let perms = permutations4();
    let mut branches: Vec<Vec<BoundaryPoint>> = (0..4)
        .map(|k| {
            vec![BoundaryPoint {
                theta: thetas[0],
                x: roots[0][k],
            }]
        })
        .collect();
    let mut current = roots[0];
    for j in 1..n_theta {
        let p = best_match(&current, &roots[j], &perms);
        for k in 0..4 {
            current[k] = roots[j][p[k]];
            branches[k].push(BoundaryPoint {
                theta: thetas[j],
                x: current[k],
            });
        }
    }
    // branch k flows into branch wrap[k] after one revolution
    let wrap = best_match(&current, &roots[0], &perms);
    let mut visited = [false; 4];
    let mut loops = Vec::new();
    for start in 0..4 {
        if visited[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            lp.extend_from_slice(&branches[k]);
            k = wrap[k];
        }
        loops.push(lp);
    }
    Ok(StabilityCurve { y, thetas, loops })
}

/// Number of points of an `n × n` lattice on `[−half, half]²` with `|r| ≤ 1`.
pub fn stable_sample_count(y: f64, half: f64, n: usize) -> Result<usize> {
    let coeffs = AmplificationCoeffs::new(y)?;
    let step = 2.0 * half / (n as f64 - 1.0);
    let rows: Vec<usize> = (0..n).collect();
    Ok(par::map_collect(&rows, |&i| {
        let im = -half + i as f64 * step;
        (0..n)
            .filter(|&j| {
                coeffs
                    .eval(Complex64::new(-half + j as f64 * step, im))
                    .norm()
                    <= 1.0
            })
            .count()
    })
    .into_iter()
    .sum())
}

/// Area estimate of the stability region inside `[−half, half]²`.
pub fn stable_area(y: f64, half: f64, n: usize) -> Result<f64> {
    let cell = (2.0 * half / (n as f64 - 1.0)).powi(2);
    Ok(stable_sample_count(y, half, n)? as f64 * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rk4_coefficients_at_zero() {
        let k = AmplificationCoeffs::new(0.0).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in k.c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{a} {b}");
        }
    }

    #[test]
    fn c0_values() {
        let k = AmplificationCoeffs::new(-1.0).unwrap();
        assert!((k.c[0] - 18.0 / 49.0).abs() < 1e-15);
        assert!(AmplificationCoeffs::new(-1e6).unwrap().c[0].abs() < 1e-10);
        assert!(AmplificationCoeffs::new(0.5).is_err());
    }

    #[test]
    fn r_at_origin_is_c0() {
        for y in [0.0, -0.3, -7.0, -50.0] {
            let k = AmplificationCoeffs::new(y).unwrap();
            assert_eq!(k.eval(c(0.0, 0.0)), c(k.c[0], 0.0));
        }
    }

    #[test]
    fn rk4_real_boundary() {
        let r = amplification_factor(c(-2.785293563, 0.0), 0.0).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn roots_solve_the_quartic() {
        let k = AmplificationCoeffs::new(-3.0).unwrap();
        let target = Complex64::from_polar(1.0, 0.7);
        for x in k.solve(target).unwrap() {
            assert!((k.eval(x) - target).norm() < 1e-11);
        }
    }

    #[test]
    fn boundary_points_are_on_the_unit_level() {
        for y in [0.0, -5.0, -20.0] {
            let curve = stability_boundary(y, 128).unwrap();
            assert_eq!(curve.points().count(), 4 * 128);
            for p in curve.points() {
                assert!((amplification_factor(p.x, y).unwrap().norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rk4_boundary_crosses_near_minus_2_785() {
        let curve = stability_boundary(0.0, 720).unwrap();
        let x = curve.leftmost_real_crossing().unwrap();
        assert!((x + 2.7853).abs() < 1e-3, "{x}");
    }

    #[test]
    fn conjugate_symmetry() {
        let n = 128;
        let k = AmplificationCoeffs::new(-10.0).unwrap();
        for j in 1..n {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let a = k.solve(Complex64::from_polar(1.0, th)).unwrap();
            let b = k.solve(Complex64::from_polar(1.0, -th)).unwrap();
            for x in a {
                let d = b
                    .iter()
                    .map(|z| (z.conj() - x).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9 * x.norm().max(1.0), "{d}");
            }
        }
    }

    #[test]
    fn too_few_angles_rejected() {
        assert!(stability_boundary(0.0, 63).is_err());
    }

    #[test]
    fn area_grows_with_negative_y() {
        let counts: Vec<usize> = [0.0, -5.0, -10.0, -20.0]
            .iter()
            .map(|&y| stable_sample_count(y, 60.0, 301).unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
    }

    #[test]
    fn permutation_table() {
        let p = permutations4();
        assert_eq!(p.len(), 24);
        assert!(p.contains(&[3, 2, 1, 0]));
    }
}
