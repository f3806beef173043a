//! ETDRK4-P13 time stepping.
//!
//! Every matrix function of the diffusion operator is diagonal in the
//! transform basis, so the scheme reduces to six rational weights evaluated
//! elementwise at `y = κ τ λ^{α/2}`:
//!
//! ```text
//! R13 = (24 − 6y) / d1                 Q13 = 24(8 − y) / d2
//! φ   = τ(96 + 12y + y²) / d2          φ1  = τ(4 − y) / d1
//! φ2  = 2τ(4 + y) / d1                 φ3  = τ(4 + 3y + y²) / d1
//! d1  = 24 + 18y + 6y² + y³            d2  = 192 + 72y + 12y² + y³
//! ```
//!
//! `R13` is the (1, 3) Padé approximant of `e^{−y}` and `Q13` the same
//! approximant at `y/2`. One step evaluates the reaction four times:
//!
//! ```text
//! û = F(u)
//! a = F⁻¹(Q13 û + φ F(f(u, t)))
//! b = F⁻¹(Q13 û + φ F(f(a, t + τ/2)))
//! c = F⁻¹(Q13 F(a) + φ F(2 f(b, t + τ/2) − f(u, t)))
//! u⁺ = F⁻¹(R13 û + φ1 F(f(u)) + φ2 F(f(a) + f(b)) + φ3 F(f(c, t + τ)))
//! ```

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, State};
use crate::models::{check_grid, ReactionModel};
use crate::par;
use crate::spectrum::EigenvalueField;
use crate::transforms::TransformPlan;

/// The six ETDRK4-P13 weights at a single point `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtdWeights {
    pub r13: f64,
    pub q13: f64,
    pub phi: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl EtdWeights {
    pub fn at(y: f64, tau: f64) -> Self {
        let y2 = y * y;
        let y3 = y2 * y;
        let d1 = 24.0 + 18.0 * y + 6.0 * y2 + y3;
        let d2 = 192.0 + 72.0 * y + 12.0 * y2 + y3;
        EtdWeights {
            r13: (24.0 - 6.0 * y) / d1,
            q13: 24.0 * (8.0 - y) / d2,
            phi: tau * (96.0 + 12.0 * y + y2) / d2,
            phi1: tau * (4.0 - y) / d1,
            phi2: 2.0 * tau * (4.0 + y) / d1,
            phi3: tau * (4.0 + 3.0 * y + y2) / d1,
        }
    }
}

/// Padé (1, 3) approximation of `e^{−y}`.
pub fn pade13(y: f64) -> f64 {
    (24.0 - 6.0 * y) / (24.0 + 18.0 * y + 6.0 * y * y + y * y * y)
}

/// One step of the scheme on a scalar complex ODE `u' = −(y/τ) u + f(u, t)`.
pub fn scalar_step(
    y: f64,
    tau: f64,
    t: f64,
    u: Complex64,
    f: impl Fn(Complex64, f64) -> Complex64,
) -> Complex64 {
    let w = EtdWeights::at(y, tau);
    let fu = f(u, t);
    let a = u * w.q13 + fu * w.phi;
    let fa = f(a, t + 0.5 * tau);
    let b = u * w.q13 + fa * w.phi;
    let fb = f(b, t + 0.5 * tau);
    let c = a * w.q13 + (2.0 * fb - fu) * w.phi;
    let fc = f(c, t + tau);
    u * w.r13 + fu * w.phi1 + (fa + fb) * w.phi2 + fc * w.phi3
}

/// Elementwise ETDRK4-P13 weight arrays for one species.
#[derive(Debug, Clone, PartialEq)]
pub struct EtdCoefficients {
    tau: f64,
    kappa: f64,
    pub r13: Vec<f64>,
    pub q13: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub phi3: Vec<f64>,
}

impl EtdCoefficients {
    pub fn new(eig: &EigenvalueField, kappa: f64, tau: f64) -> Result<Self> {
        Self::from_lambda_pow(eig.lambda_pow(), kappa, tau)
    }

    /// Weights at `y = kappa * tau * lambda_pow[i]`.
    pub fn from_lambda_pow(lambda_pow: &[f64], kappa: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau".into(),
                value: tau,
                reason: "time step must be finite and > 0".into(),
            });
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "kappa".into(),
                value: kappa,
                reason: "diffusivity must be finite and >= 0".into(),
            });
        }
        let weights: Vec<EtdWeights> = lambda_pow
            .iter()
            .map(|&l| EtdWeights::at(kappa * tau * l, tau))
            .collect();
        let pick = |f: fn(&EtdWeights) -> f64| weights.iter().map(f).collect::<Vec<_>>();
        Ok(EtdCoefficients {
            tau,
            kappa,
            r13: pick(|w| w.r13),
            q13: pick(|w| w.q13),
            phi: pick(|w| w.phi),
            phi1: pick(|w| w.phi1),
            phi2: pick(|w| w.phi2),
            phi3: pick(|w| w.phi3),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.r13.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r13.is_empty()
    }
}

/// Number of whole steps of size `tau` between `t0` and `t1`, rejecting
/// times that are not on the step lattice (tolerance `1e-9 · tau`).
pub fn steps_between(t0: f64, t1: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0) {
        return Err(Error::Schedule(format!("time step {tau} must be > 0")));
    }
    let ratio = (t1 - t0) / tau;
    if !ratio.is_finite() || ratio < -1e-9 {
        return Err(Error::Schedule(format!("time {t1} precedes start {t0}")));
    }
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 {
        return Err(Error::Schedule(format!(
            "time {t1} is not a multiple of tau = {tau} from t0 = {t0}"
        )));
    }
    Ok(steps as usize)
}

/// Progress reported after each accepted step (and once for the initial state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub time: f64,
    pub snapshot: bool,
    pub last: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub state: State,
}

#[derive(Debug)]
struct SpeciesOperator {
    eig: EigenvalueField,
    coeffs: EtdCoefficients,
}

#[derive(Debug, Default)]
struct Workspace {
    u_hat: Vec<Vec<Complex64>>,
    fu_hat: Vec<Vec<Complex64>>,
    spec: Vec<Complex64>,
    spec2: Vec<Complex64>,
    transform: Vec<Complex64>,
    real: Vec<f64>,
    fu: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    fa: Vec<Vec<f64>>,
    fb: Vec<Vec<f64>>,
    fc: Vec<Vec<f64>>,
    packed: Vec<f64>,
}

impl Workspace {
    fn new(species: usize, len: usize) -> Self {
        let zc = || vec![vec![Complex64::new(0.0, 0.0); len]; species];
        let zr = || vec![vec![0.0; len]; species];
        Workspace {
            u_hat: zc(),
            fu_hat: zc(),
            spec: vec![Complex64::new(0.0, 0.0); len],
            spec2: vec![Complex64::new(0.0, 0.0); len],
            transform: Vec::with_capacity(len),
            real: vec![0.0; len],
            fu: zr(),
            a: zr(),
            b: zr(),
            c: zr(),
            fa: zr(),
            fb: zr(),
            fc: zr(),
            packed: vec![0.0; len * species],
        }
    }
}

/// Everything needed to advance one model on one grid with a fixed step.
#[derive(Debug)]
pub struct StepperContext {
    grid: Grid,
    plan: TransformPlan,
    model: Arc<dyn ReactionModel>,
    species: Vec<SpeciesOperator>,
    tau: f64,
    ws: Workspace,
}

#[derive(Clone, Copy)]
enum Stage {
    U,
    A,
    B,
    C,
}

impl Stage {
    fn reaction_name(self) -> &'static str {
        match self {
            Stage::U => "f(u)",
            Stage::A => "f(a)",
            Stage::B => "f(b)",
            Stage::C => "f(c)",
        }
    }
}

impl StepperContext {
    pub fn new(grid: &Grid, model: Arc<dyn ReactionModel>, tau: f64) -> Result<Self> {
        check_grid(model.as_ref(), grid)?;
        let base = EigenvalueField::laplacian(grid);
        let species = model
            .species()
            .iter()
            .map(|sp| {
                let eig = base.with_alpha(sp.alpha)?;
                let coeffs = EtdCoefficients::new(&eig, sp.kappa, tau)?;
                Ok(SpeciesOperator { eig, coeffs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StepperContext {
            grid: *grid,
            plan: TransformPlan::new(grid),
            ws: Workspace::new(species.len(), grid.len()),
            model,
            species,
            tau,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn model(&self) -> &Arc<dyn ReactionModel> {
        &self.model
    }

    pub fn coefficients(&self, species: usize) -> &EtdCoefficients {
        &self.species[species].coeffs
    }

    pub fn eigenvalues(&self, species: usize) -> &EigenvalueField {
        &self.species[species].eig
    }

    /// Advances `state` from `t` to `t + tau`. `step` only labels diagnostics.
    pub fn step(&mut self, state: &mut State, t: f64, step: usize) -> Result<()> {
        if state.count() != self.species.len() || *state.grid() != self.grid {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len() * self.species.len(),
                actual: state.grid().len() * state.count(),
            });
        }
        let tau = self.tau;
        let half = t + 0.5 * tau;
        let ns = self.species.len();
        let ws = &mut self.ws;
        let plan = &self.plan;

        for s in 0..ns {
            plan.forward_real(state.field(s).values(), &mut ws.u_hat[s], &mut ws.transform);
        }
        {
            let inputs: Vec<&[f64]> = state.species().iter().map(|f| f.values()).collect();
            evaluate(
                &*self.model,
                &self.grid,
                t,
                &inputs,
                &mut ws.fu,
                &mut ws.packed,
                Stage::U,
                step,
            )?;
        }

        // a = F⁻¹(Q13 û + φ F(f_u))
        for (s, op) in self.species.iter().enumerate() {
            let k = &op.coeffs;
            plan.forward_real(&ws.fu[s], &mut ws.fu_hat[s], &mut ws.transform);
            let (uh, fh) = (&ws.u_hat[s], &ws.fu_hat[s]);
            par::for_each_indexed(&mut ws.spec, |i, z| {
                *z = uh[i] * k.q13[i] + fh[i] * k.phi[i]
            });
            plan.inverse_real(&mut ws.spec, &mut ws.a[s], &mut ws.transform);
        }
        check_stage(&ws.a, "a", step, t)?;
        evaluate(
            &*self.model,
            &self.grid,
            half,
            &refs(&ws.a),
            &mut ws.fa,
            &mut ws.packed,
            Stage::A,
            step,
        )?;

        // b = F⁻¹(Q13 û + φ F(f_a))
        for (s, op) in self.species.iter().enumerate() {
            let k = &op.coeffs;
            plan.forward_real(&ws.fa[s], &mut ws.spec, &mut ws.transform);
            let uh = &ws.u_hat[s];
            par::for_each_indexed(&mut ws.spec, |i, z| *z = uh[i] * k.q13[i] + *z * k.phi[i]);
            plan.inverse_real(&mut ws.spec, &mut ws.b[s], &mut ws.transform);
        }
        check_stage(&ws.b, "b", step, t)?;
        evaluate(
            &*self.model,
            &self.grid,
            half,
            &refs(&ws.b),
            &mut ws.fb,
            &mut ws.packed,
            Stage::B,
            step,
        )?;

        // c = F⁻¹(Q13 F(a) + φ F(2 f_b − f_u))
        for (s, op) in self.species.iter().enumerate() {
            let k = &op.coeffs;
            plan.forward_real(&ws.a[s], &mut ws.spec, &mut ws.transform);
            let (fb, fu) = (&ws.fb[s], &ws.fu[s]);
            par::for_each_indexed(&mut ws.real, |i, r| *r = 2.0 * fb[i] - fu[i]);
            plan.forward_real(&ws.real, &mut ws.spec2, &mut ws.transform);
            let g = &ws.spec2;
            par::for_each_indexed(&mut ws.spec, |i, z| *z = *z * k.q13[i] + g[i] * k.phi[i]);
            plan.inverse_real(&mut ws.spec, &mut ws.c[s], &mut ws.transform);
        }
        check_stage(&ws.c, "c", step, t)?;
        evaluate(
            &*self.model,
            &self.grid,
            t + tau,
            &refs(&ws.c),
            &mut ws.fc,
            &mut ws.packed,
            Stage::C,
            step,
        )?;

        // u⁺ = F⁻¹(R13 û + φ1 F(f_u) + φ2 F(f_a + f_b) + φ3 F(f_c))
        for (s, op) in self.species.iter().enumerate() {
            let k = &op.coeffs;
            let (uh, fh) = (&ws.u_hat[s], &ws.fu_hat[s]);
            par::for_each_indexed(&mut ws.spec, |i, z| {
                *z = uh[i] * k.r13[i] + fh[i] * k.phi1[i]
            });
            let (fa, fb) = (&ws.fa[s], &ws.fb[s]);
            par::for_each_indexed(&mut ws.real, |i, r| *r = fa[i] + fb[i]);
            plan.forward_real(&ws.real, &mut ws.spec2, &mut ws.transform);
            let g = &ws.spec2;
            par::for_each_indexed(&mut ws.spec, |i, z| *z += g[i] * k.phi2[i]);
            plan.forward_real(&ws.fc[s], &mut ws.spec2, &mut ws.transform);
            let g = &ws.spec2;
            par::for_each_indexed(&mut ws.spec, |i, z| *z += g[i] * k.phi3[i]);
            plan.inverse_real(
                &mut ws.spec,
                state.species_mut()[s].values_mut(),
                &mut ws.transform,
            );
        }
        for f in state.species() {
            if par::any(f.values(), |v| !v.is_finite()) {
                return Err(Error::Divergence {
                    stage: "update",
                    step,
                    time: t,
                });
            }
        }
        Ok(())
    }

    /// Steps from `t0` to `t_end`, calling `observe` for the initial state and
    /// after every step. Snapshot times must lie on the step lattice.
    pub fn integrate_with(
        &mut self,
        mut state: State,
        t0: f64,
        t_end: f64,
        snapshot_times: &[f64],
        mut observe: impl FnMut(&StepInfo, &State) -> Result<()>,
    ) -> Result<State> {
        let total = steps_between(t0, t_end, self.tau)?;
        let mut marks = snapshot_times
            .iter()
            .map(|&ts| {
                if ts < t0 - 1e-9 * self.tau || ts > t_end + 1e-9 * self.tau {
                    return Err(Error::Schedule(format!(
                        "snapshot time {ts} outside [{t0}, {t_end}]"
                    )));
                }
                steps_between(t0, ts, self.tau)
            })
            .collect::<Result<Vec<_>>>()?;
        marks.sort_unstable();
        marks.dedup();

        let tau = self.tau;
        let time_at = |k: usize| t0 + k as f64 * tau;
        observe(
            &StepInfo {
                step: 0,
                time: t0,
                snapshot: marks.first() == Some(&0),
                last: total == 0,
            },
            &state,
        )?;
        for k in 0..total {
            self.step(&mut state, time_at(k), k)?;
            let done = k + 1;
            observe(
                &StepInfo {
                    step: done,
                    time: time_at(done),
                    snapshot: marks.binary_search(&done).is_ok(),
                    last: done == total,
                },
                &state,
            )?;
        }
        Ok(state)
    }

    /// Steps from `t0` to `t_end`, returning the requested snapshots followed
    /// by the final state (if not already requested).
    pub fn integrate(
        &mut self,
        state0: State,
        t0: f64,
        t_end: f64,
        snapshot_times: &[f64],
    ) -> Result<Vec<Snapshot>> {
        let mut out = Vec::new();
        self.integrate_with(state0, t0, t_end, snapshot_times, |info, state| {
            if info.snapshot || info.last {
                out.push(Snapshot {
                    step: info.step,
                    time: info.time,
                    state: state.clone(),
                });
            }
            Ok(())
        })?;
        Ok(out)
    }
}

fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
    v.iter().map(Vec::as_slice).collect()
}

fn check_stage(fields: &[Vec<f64>], stage: &'static str, step: usize, time: f64) -> Result<()> {
    if cfg!(debug_assertions) && fields.iter().any(|f| par::any(f, |v| !v.is_finite())) {
        return Err(Error::Divergence { stage, step, time });
    }
    Ok(())
}

const POINTS_PER_TASK: usize = 256;

/// `outputs[s][i] = f_s(inputs[·][i], x_i, t)` for every grid point.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    model: &dyn ReactionModel,
    grid: &Grid,
    t: f64,
    inputs: &[&[f64]],
    outputs: &mut [Vec<f64>],
    packed: &mut [f64],
    stage: Stage,
    step: usize,
) -> Result<()> {
    let ns = inputs.len();
    let failed = AtomicBool::new(false);
    par::for_each_chunk(
        packed,
        ns * POINTS_PER_TASK,
        || vec![0.0; ns],
        |u, chunk, out| {
            let first = chunk * POINTS_PER_TASK;
            for (p, o) in out.chunks_mut(ns).enumerate() {
                let i = first + p;
                for (s, inp) in inputs.iter().enumerate() {
                    u[s] = inp[i];
                }
                if model.react(t, grid.point(i), u, o).is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
            }
        },
    );
    if failed.load(Ordering::Relaxed) {
        // rescan in order so the reported point is deterministic
        let mut u = vec![0.0; ns];
        let mut o = vec![0.0; ns];
        for i in 0..grid.len() {
            for (s, inp) in inputs.iter().enumerate() {
                u[s] = inp[i];
            }
            if let Err(e) = model.react(t, grid.point(i), &u, &mut o) {
                let reason = match e {
                    Error::Model { reason, .. } => reason,
                    other => other.to_string(),
                };
                return Err(Error::Model {
                    model: model.name().into(),
                    reason: format!(
                        "{reason} while evaluating {} in step {step}",
                        stage.reaction_name()
                    ),
                });
            }
        }
    }
    let packed: &[f64] = packed;
    for (s, out) in outputs.iter_mut().enumerate() {
        par::for_each_indexed(out, |i, v| *v = packed[i * ns + s]);
    }
    Ok(())
}
