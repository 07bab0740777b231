//! Method-of-lines time integration of the transplanted system with
//! adaptive step control and singular-event classification.
//!
//! The state vector is (h₀..h_N, c, d). Steps are classical RK4 with
//! step-doubling error control; the step size is additionally capped by
//! the explicit-scheme stability limit dt ≤ STAB_FRACTION·Δθ²/max A₁,
//! which shrinks like d² as a sphere collapses. Endpoint values of h are
//! re-pinned to 0 after every accepted step (Φ₁ vanishes there, so this
//! only removes round-off drift).
//!
//! A run ends with exactly one report: Extinction (d below threshold),
//! NeckPinch (interior h collapsing while d stays positive),
//! AxisDegeneracy (endpoint h″ collapsing), MaxTimeReached, or
//! StepFailure (dt underflow).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile::{validate_initial, HProfile};
use crate::rhs;

/// Fraction of the explicit diffusion stability limit Δθ²/max A₁ used as
/// the hard step cap (RK4 tolerates ≈ 0.5; this leaves margin).
pub const STAB_FRACTION: f64 = 0.25;

/// dt below this multiple of t_max aborts the run as StepFailure.
pub const DT_UNDERFLOW: f64 = 1e-14;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowParams {
    pub n: usize,
    pub dt_init: f64,
    pub safety: f64,
    pub atol: f64,
    pub rtol: f64,
    pub t_max: f64,
    /// Extinction threshold on d; None = 1e−3·d(0).
    pub d_min: Option<f64>,
    /// Pinch threshold: event when min interior h/sin²θ < h_min·d².
    /// The sin² weight compares h to its parabolic scale near the poles;
    /// at a genuine neck (θ ≈ π/2) it coincides with a bare h threshold.
    pub h_min: f64,
    /// Axis-degeneracy threshold on the endpoint h″ at the initial scale;
    /// None = 1e−3 times the larger initial endpoint h″. Applied as
    /// h″ < h2_min·(d/d₀)² so a uniformly shrinking surface (h″ ∝ d²)
    /// never trips it; only genuine flattening relative to scale does.
    pub h2_min: Option<f64>,
    /// Keep a full profile snapshot every this many accepted steps
    /// (0 = only the final state).
    pub snapshot_stride: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            n: 256,
            dt_init: 1e-6,
            safety: 0.9,
            atol: 1e-8,
            rtol: 1e-6,
            t_max: 1.0,
            d_min: None,
            h_min: 1e-4,
            h2_min: None,
            snapshot_stride: 0,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_init > 0.0
            && self.safety > 0.0
            && self.safety <= 1.0
            && self.atol > 0.0
            && self.rtol > 0.0
            && self.t_max > 0.0
            && self.h_min > 0.0
            && self.d_min.map_or(true, |v| v > 0.0)
            && self.h2_min.map_or(true, |v| v > 0.0);
        if !ok {
            return Err(Error::InvalidInput(
                "flow parameters must be positive (safety in (0,1])".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Extinction,
    NeckPinch,
    AxisDegeneracy,
    MaxTimeReached,
    StepFailure,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EventKind::Extinction => "Extinction",
            EventKind::NeckPinch => "NeckPinch",
            EventKind::AxisDegeneracy => "AxisDegeneracy",
            EventKind::MaxTimeReached => "MaxTimeReached",
            EventKind::StepFailure => "StepFailure",
        };
        f.write_str(s)
    }
}

/// Per-step scalar block; one CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepScalars {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub area: f64,
    pub min_h: f64,
    pub h2_0: f64,
    pub h2_pi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityReport {
    pub kind: EventKind,
    pub t_event: f64,
    pub theta_star: Option<f64>,
    pub diagnostics: StepScalars,
}

/// Accepted-step history: scalars for every step, full profiles at the
/// snapshot stride (plus always the final state).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scalars: Vec<StepScalars>,
    pub snapshots: Vec<(usize, HProfile)>,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.scalars.iter().map(|s| s.t)
    }
    pub fn last(&self) -> &StepScalars {
        self.scalars.last().expect("trajectory has the initial row")
    }
    pub fn final_state(&self) -> &HProfile {
        &self.snapshots.last().expect("final snapshot always kept").1
    }
}

/// Surface area A = 2π ∫₀^π √(2h·d²sin²θ + h′²) dθ. The integrand
/// vanishes linearly at both ends (like h″(end)·θ), so the first and
/// last panels use a local quadratic through the origin,
/// ∫₀^Δ g ≈ Δ·(2g₁/3 − g₂/12), the middle is the trapezoid rule, and
/// the trapezoid's Δ² boundary defect (Euler–Maclaurin) is cancelled
/// with g′(Δ) ≈ g₂/(2Δ), g′(π−Δ) ≈ −g_{N−2}/(2Δ) (g vanishes at the
/// poles). Net accuracy is O(Δ⁴) on smooth profiles.
pub fn surface_area(grid: &Grid, values: &[f64], d: f64) -> f64 {
    let n = grid.n();
    let d1 = grid.diff1(values);
    let sin_t = grid.sin_theta();
    let g: Vec<f64> = (0..=n)
        .map(|j| {
            let s = sin_t[j];
            (2.0 * values[j] * d * d * s * s + d1[j] * d1[j]).sqrt()
        })
        .collect();
    let dt = grid.dtheta();
    let mut acc = 0.5 * (g[1] + g[n - 1]);
    for &v in &g[2..n - 1] {
        acc += v;
    }
    let interior = acc * dt;
    let left = dt * (2.0 * g[1] / 3.0 - g[2] / 12.0);
    let right = dt * (2.0 * g[n - 1] / 3.0 - g[n - 2] / 12.0);
    let em_corr = dt * (g[2] + g[n - 2]) / 24.0;
    2.0 * std::f64::consts::PI * (interior + left + right + em_corr)
}

/// One classical RK4 step of the coupled (h, c, d) system. Endpoints are
/// re-pinned to zero after the update. Errors if any stage leaves the
/// admissible set (h ≤ 0 inside, d ≤ 0, degenerate axis, pinched
/// denominator); callers treat that as a failed step and shrink dt.
pub fn step_rk4(grid: &Grid, state: &HProfile, dt: f64) -> Result<HProfile> {
    let y = pack(state);
    let y1 = rk4_raw(grid, &y, dt)?;
    unpack(grid, &y1)
}

/// Step-size update from a normalized error estimate (err = 1 sits on the
/// tolerance): dt ← safety·dt·err^{−1/5}, clamped to [dt/4, 4dt].
pub fn adapt_dt(err_norm: f64, dt: f64, safety: f64) -> f64 {
    let factor = if err_norm > 0.0 {
        safety * err_norm.powf(-0.2)
    } else {
        4.0
    };
    dt * factor.clamp(0.25, 4.0)
}

#[derive(Debug, Clone, Copy)]
struct ResolvedThresholds {
    d_min: f64,
    h_min: f64,
    /// Axis threshold divided by d₀²; compared against h″/d².
    h2_rel: f64,
}

/// Event classification, strongest first: Extinction > NeckPinch >
/// AxisDegeneracy. Returns the event and θ* for pinches. The pinch
/// detector uses h/sin²θ, not raw h: any smooth profile has
/// h ≈ ½h″(0)·θ² at pole-adjacent nodes, which for fine grids sits
/// below any fixed fraction of d² without a neck forming anywhere.
fn classify(
    grid: &Grid,
    values: &[f64],
    d: f64,
    h2_0: f64,
    h2_pi: f64,
    thr: &ResolvedThresholds,
) -> Option<(EventKind, Option<f64>)> {
    if d < thr.d_min {
        return Some((EventKind::Extinction, None));
    }
    let n = grid.n();
    let sin_t = grid.sin_theta();
    let mut min_w = f64::INFINITY;
    let mut arg = 1;
    for j in 1..n {
        let w = values[j] / (sin_t[j] * sin_t[j]);
        if w < min_w {
            min_w = w;
            arg = j;
        }
    }
    if min_w < thr.h_min * d * d {
        return Some((EventKind::NeckPinch, Some(grid.theta()[arg])));
    }
    if h2_0 < thr.h2_rel * d * d || h2_pi < thr.h2_rel * d * d {
        return Some((EventKind::AxisDegeneracy, None));
    }
    None
}

/// Public event check with the same defaults `run` resolves at t = 0.
pub fn detect_event(
    grid: &Grid,
    state: &HProfile,
    params: &FlowParams,
) -> Result<Option<(EventKind, Option<f64>)>> {
    let fit = grid.endpoint_fit(state.values());
    let thr = resolve_thresholds(params, state.d(), fit.h2_0.max(fit.h2_pi));
    Ok(classify(
        grid,
        state.values(),
        state.d(),
        fit.h2_0,
        fit.h2_pi,
        &thr,
    ))
}

fn resolve_thresholds(params: &FlowParams, d0: f64, h2_ref: f64) -> ResolvedThresholds {
    ResolvedThresholds {
        d_min: params.d_min.unwrap_or(1e-3 * d0),
        h_min: params.h_min,
        h2_rel: params.h2_min.unwrap_or(1e-3 * h2_ref) / (d0 * d0),
    }
}

/// Integrate until an event or t_max. The initial profile must pass
/// validate_initial and match params.n.
pub fn run(initial: &HProfile, params: &FlowParams) -> Result<(Trajectory, SingularityReport)> {
    params.validate()?;
    let grid = Grid::new(params.n)?;
    if initial.n() != params.n {
        return Err(Error::LengthMismatch {
            len: initial.n() + 1,
            n: params.n,
        });
    }
    let report = validate_initial(&grid, initial.values());
    if !report.passed() {
        return Err(Error::InvalidProfile(format!(
            "initial profile rejected by validation:\n{report}"
        )));
    }

    let mut y = pack(initial);
    let n = grid.n();
    let mut t = 0.0f64;
    let fit0 = grid.endpoint_fit(&y[..=n]);
    let thr = resolve_thresholds(params, initial.d(), fit0.h2_0.max(fit0.h2_pi));

    let mut traj = Trajectory {
        scalars: vec![scalars_of(&grid, &y, t)],
        snapshots: Vec::new(),
    };
    let stab = STAB_FRACTION * grid.dtheta() * grid.dtheta();
    let mut dt = params.dt_init;
    let mut accepted: usize = 0;

    let finish = |traj: &mut Trajectory,
                  y: &[f64],
                  accepted: usize,
                  kind: EventKind,
                  t_event: f64,
                  theta_star: Option<f64>|
     -> Result<SingularityReport> {
        if traj.snapshots.last().map(|(i, _)| *i) != Some(accepted) {
            traj.snapshots.push((accepted, unpack(&grid, y)?));
        }
        Ok(SingularityReport {
            kind,
            t_event,
            theta_star,
            diagnostics: *traj.last(),
        })
    };

    loop {
        // Classify the current accepted state (including t = 0).
        let fit = grid.endpoint_fit(&y[..=n]);
        if let Some((kind, theta_star)) =
            classify(&grid, &y[..=n], y[n + 2], fit.h2_0, fit.h2_pi, &thr)
        {
            let r = finish(&mut traj, &y, accepted, kind, t, theta_star)?;
            return Ok((traj, r));
        }
        if t >= params.t_max {
            let r = finish(&mut traj, &y, accepted, EventKind::MaxTimeReached, t, None)?;
            return Ok((traj, r));
        }

        // Stability cap from the current state; errors here mean the
        // state is already effectively singular between the thresholds
        // and the rhs guards, so classify them rather than bail.
        let a1_max = match rhs::full_rhs_raw(&grid, &y[..=n], y[n + 2]) {
            Ok(ev) => ev.a1_max,
            Err(Error::AxisDegeneracy { .. }) => {
                let r = finish(&mut traj, &y, accepted, EventKind::AxisDegeneracy, t, None)?;
                return Ok((traj, r));
            }
            Err(Error::PinchDenominator { theta, .. }) => {
                let r = finish(&mut traj, &y, accepted, EventKind::NeckPinch, t, Some(theta))?;
                return Ok((traj, r));
            }
            Err(e) => return Err(e),
        };
        dt = dt.min(stab / a1_max);

        // Attempt steps until one is accepted or dt underflows.
        loop {
            if dt < DT_UNDERFLOW * params.t_max {
                let r = finish(&mut traj, &y, accepted, EventKind::StepFailure, t, None)?;
                return Ok((traj, r));
            }
            let hits_t_max = dt >= params.t_max - t;
            let dt_try = if hits_t_max { params.t_max - t } else { dt };
            let (y_big, y_small) = match double_step(&grid, &y, dt_try) {
                Ok(pair) => pair,
                Err(_) => {
                    // A stage left the admissible set; shrink and retry.
                    dt = 0.5 * dt_try;
                    continue;
                }
            };
            let mut err_norm = 0.0f64;
            for i in 0..y.len() {
                let scale = params.atol + params.rtol * y_small[i].abs();
                err_norm = err_norm.max((y_big[i] - y_small[i]).abs() / (15.0 * scale));
            }
            if err_norm > 1.0 {
                dt = adapt_dt(err_norm, dt_try, params.safety);
                continue;
            }

            let prev_d = y[n + 2];
            y = y_small;
            y[0] = 0.0;
            y[n] = 0.0;
            t = if hits_t_max { params.t_max } else { t + dt_try };
            accepted += 1;
            debug_assert!(y[n + 2] < prev_d, "d must shrink at every step");
            traj.scalars.push(scalars_of(&grid, &y, t));
            if params.snapshot_stride > 0 && accepted % params.snapshot_stride == 0 {
                traj.snapshots.push((accepted, unpack(&grid, &y)?));
            }
            dt = adapt_dt(err_norm, dt_try, params.safety);
            break;
        }
    }
}

fn scalars_of(grid: &Grid, y: &[f64], t: f64) -> StepScalars {
    let n = grid.n();
    let c = y[n + 1];
    let d = y[n + 2];
    let fit = grid.endpoint_fit(&y[..=n]);
    let min_h = y[1..n].iter().cloned().fold(f64::INFINITY, f64::min);
    StepScalars {
        t,
        a: c - d,
        b: c + d,
        c,
        d,
        area: surface_area(grid, &y[..=n], d),
        min_h,
        h2_0: fit.h2_0,
        h2_pi: fit.h2_pi,
    }
}

fn pack(state: &HProfile) -> Vec<f64> {
    let mut y = Vec::with_capacity(state.n() + 3);
    y.extend_from_slice(state.values());
    y.push(state.c());
    y.push(state.d());
    y
}

fn unpack(grid: &Grid, y: &[f64]) -> Result<HProfile> {
    let n = grid.n();
    HProfile::new(y[..=n].to_vec(), y[n + 1], y[n + 2])
}

/// Reject stages whose state has left the admissible set; the rhs guards
/// only against axis/pinch degeneracy, not sign changes.
fn stage_admissible(y: &[f64], n: usize) -> bool {
    let d = y[n + 2];
    d > 0.0 && y[1..n].iter().all(|&v| v > 0.0)
}

fn eval_raw(grid: &Grid, y: &[f64]) -> Result<Vec<f64>> {
    let n = grid.n();
    if !stage_admissible(y, n) {
        return Err(Error::InvalidProfile("stage left the admissible set".into()));
    }
    let ev = rhs::full_rhs_raw(grid, &y[..=n], y[n + 2])?;
    let mut f = ev.h_t;
    f.push(ev.c_dot);
    f.push(ev.d_dot);
    Ok(f)
}

fn rk4_raw(grid: &Grid, y: &[f64], dt: f64) -> Result<Vec<f64>> {
    let k1 = eval_raw(grid, y)?;
    let k2 = eval_raw(grid, &combined(y, &[(&k1, 0.5 * dt)]))?;
    let k3 = eval_raw(grid, &combined(y, &[(&k2, 0.5 * dt)]))?;
    let k4 = eval_raw(grid, &combined(y, &[(&k3, dt)]))?;
    let sixth = dt / 6.0;
    Ok(combined(
        y,
        &[
            (&k1, sixth),
            (&k2, 2.0 * sixth),
            (&k3, 2.0 * sixth),
            (&k4, sixth),
        ],
    ))
}

fn combined(y: &[f64], terms: &[(&Vec<f64>, f64)]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, w) in terms {
        for (o, &v) in out.iter_mut().zip(k.iter()) {
            *o += w * v;
        }
    }
    out
}

/// One dt step and two dt/2 steps for the doubling error estimate.
fn double_step(grid: &Grid, y: &[f64], dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let y_big = rk4_raw(grid, y, dt)?;
    let half = rk4_raw(grid, y, 0.5 * dt)?;
    let y_small = rk4_raw(grid, &half, 0.5 * dt)?;
    Ok((y_big, y_small))
}
