//! Conservative, steady-state-preserving finite-volume solver for the
//! unified drift-diffusion problem
//!
//! ```text
//! dw/dtau = d/dy [ D dw/dy + a(tau, y) w ],   y in (0, L),
//! ```
//!
//! with zero total flux at both ends. The face flux is exponentially fitted
//! (Chang-Cooper / Scharfetter-Gummel):
//!
//! ```text
//! F_j = (D/h) [ B(P_j) w_{j-1} - B(-P_j) w_j ],   P_j = a(tau, y_j) h / D,
//! ```
//!
//! with `B(p) = p/(e^p - 1)` and `B(-p) = B(p) + p`. A face with constant
//! drift then carries zero flux exactly when `w_j / w_{j-1} = e^{-P_j}`,
//! i.e. the discrete steady state reproduces `exp(-int a/D)` on faces, which
//! keeps long-horizon relaxation measurements meaningful. Time stepping is
//! backward Euler; the resulting tridiagonal matrix has unit column sums
//! (mass conserved by telescoping) and is an M-matrix (positivity
//! preserved).
//!
//! Three frames instantiate the drift:
//!
//! - physical co-moving: `D = d`, `a = b'(t)` (time is physical `t`);
//! - diffusive (`beta <= 1/2`): `D = 2d`, `a = y + psi(tau)`;
//! - wall-speed (`beta > 1/2`): `D = d`, `a = c beta - eta(tau) y`.
//!
//! In each frame the zero-flux condition at `y = 0` reproduces the
//! flux-balance wall condition of the physical problem.

mod grid;
mod tridiag;

pub use grid::{DensityField, Grid};

use crate::boundary_motion::BoundaryMotion;
use crate::error::{CoreError, Result};
use crate::kernels::CompactInitialData;
use std::io::{self, Write};

/// Fraction of trailing cells monitored for truncation-boundary mass.
const TAIL_FRACTION: f64 = 0.05;
/// Tail mass above `TAIL_WARN_REL * M` flags the snapshot.
const TAIL_WARN_REL: f64 = 1e-8;

/// Which rescaled problem the solver integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Co-moving physical frame; the time variable is physical `t`.
    PhysicalComoving,
    /// Diffusive self-similar frame (`beta <= 1/2`).
    Diffusive,
    /// Wall-speed self-similar frame (`beta > 1/2`).
    SuperCritical,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::PhysicalComoving => "physical-comoving",
            Frame::Diffusive => "diffusive",
            Frame::SuperCritical => "wall-speed",
        }
    }
}

/// A drift-diffusion specification: frame, diffusivity, drift evaluator.
#[derive(Debug, Clone, Copy)]
pub struct FpProblem {
    frame: Frame,
    bm: BoundaryMotion,
}

impl FpProblem {
    /// Co-moving frame, valid for every exponent.
    pub fn physical_comoving(bm: BoundaryMotion) -> Self {
        Self {
            frame: Frame::PhysicalComoving,
            bm,
        }
    }

    /// Diffusive frame; requires `beta <= 1/2`.
    pub fn diffusive(bm: BoundaryMotion) -> Result<Self> {
        if bm.beta() > 0.5 {
            return Err(CoreError::WrongRegime {
                required: "beta <= 1/2 (diffusive frame)",
                beta: bm.beta(),
            });
        }
        Ok(Self {
            frame: Frame::Diffusive,
            bm,
        })
    }

    /// Wall-speed frame; requires `beta > 1/2`.
    pub fn super_critical(bm: BoundaryMotion) -> Result<Self> {
        if bm.beta() <= 0.5 {
            return Err(CoreError::WrongRegime {
                required: "beta > 1/2 (wall-speed frame)",
                beta: bm.beta(),
            });
        }
        Ok(Self {
            frame: Frame::SuperCritical,
            bm,
        })
    }

    /// Regime-appropriate self-similar frame.
    pub fn auto(bm: BoundaryMotion) -> Self {
        if bm.beta() <= 0.5 {
            Self {
                frame: Frame::Diffusive,
                bm,
            }
        } else {
            Self {
                frame: Frame::SuperCritical,
                bm,
            }
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn boundary(&self) -> &BoundaryMotion {
        &self.bm
    }

    /// Frame diffusivity `D`.
    pub fn diffusivity(&self) -> f64 {
        match self.frame {
            Frame::Diffusive => 2.0 * self.bm.d(),
            _ => self.bm.d(),
        }
    }

    /// Drift `a(tau, y)`.
    pub fn drift(&self, tau: f64, y: f64) -> f64 {
        let (c, beta) = (self.bm.c(), self.bm.beta());
        match self.frame {
            Frame::PhysicalComoving => c * beta * ((beta - 1.0) * tau.ln_1p()).exp(),
            Frame::Diffusive => y + 2.0 * c * beta * (tau * (2.0 * beta - 1.0)).exp(),
            Frame::SuperCritical => {
                c * beta - (beta - 1.0) / (1.0 + (2.0 * beta - 1.0) * tau) * y
            }
        }
    }

    /// True when the drift does not depend on `tau` (face weights cacheable).
    pub fn is_autonomous(&self) -> bool {
        let beta = self.bm.beta();
        match self.frame {
            Frame::PhysicalComoving => beta == 0.0 || beta == 1.0,
            Frame::Diffusive => beta == 0.0 || beta == 0.5,
            Frame::SuperCritical => beta == 1.0,
        }
    }

    /// Physical time corresponding to the frame time.
    pub fn physical_time(&self, tau: f64) -> f64 {
        match self.frame {
            Frame::PhysicalComoving => tau,
            _ => self.bm.t_of_tau(tau).unwrap_or(f64::NAN),
        }
    }

    /// Default truncation length `40 * max(frame scale, support)`.
    pub fn default_length(&self, support: f64) -> f64 {
        let (c, beta, d) = (self.bm.c(), self.bm.beta(), self.bm.d());
        let scale = match self.frame {
            Frame::Diffusive => d.sqrt(),
            Frame::SuperCritical => d / (c * beta),
            Frame::PhysicalComoving => {
                if beta == 1.0 {
                    (d / c).max(d.sqrt())
                } else {
                    d.sqrt()
                }
            }
        };
        40.0 * scale.max(support)
    }
}

/// One recorded state of a run.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub tau: f64,
    /// Physical time of the snapshot (equals `tau` in the co-moving frame).
    pub t: f64,
    pub field: DensityField,
    /// Mass in the trailing 5% of cells.
    pub tail_mass: f64,
    /// Set when the tail mass exceeds `1e-8 * M` -- the truncation length is
    /// too small for faithful far-field behavior.
    pub tail_warning: bool,
}

/// Snapshots of one run, in schedule order.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Snapshot dump: header `tau,t,y,w`, one block of rows per snapshot,
/// 17-significant-digit floats.
pub fn write_snapshots_csv<W: Write>(traj: &Trajectory, out: &mut W) -> io::Result<()> {
    writeln!(out, "tau,t,y,w")?;
    for s in &traj.snapshots {
        let g = s.field.grid();
        for (i, w) in s.field.values().iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                s.tau,
                s.t,
                g.center(i),
                w
            )?;
        }
    }
    Ok(())
}

/// Bernoulli function `B(p) = p / (e^p - 1)`, with the Taylor branch that
/// removes the 0/0 at small `|p|`.
#[inline]
pub fn bernoulli(p: f64) -> f64 {
    if p.abs() < 1e-5 {
        1.0 - 0.5 * p + p * p / 12.0
    } else {
        p / p.exp_m1()
    }
}

/// Backward-Euler integrator with exponentially fitted fluxes.
pub struct Solver {
    problem: FpProblem,
    grid: Grid,
    w: Vec<f64>,
    tau: f64,
    mass0: f64,
    steps: u64,
    // Face weights B(P_j), B(-P_j) for interior faces j = 1..n-1, stored at
    // [j]; entries [0] unused. Cached across steps for autonomous drifts.
    w_bp: Vec<f64>,
    w_bm: Vec<f64>,
    weights_tau: f64,
    // assembly / solve scratch
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    cp: Vec<f64>,
    dp: Vec<f64>,
    wnew: Vec<f64>,
}

impl Solver {
    /// Initialize from compact initial data; cell averages are exact
    /// subinterval integrals of the data.
    pub fn new(problem: FpProblem, grid: Grid, init: &CompactInitialData) -> Result<Self> {
        if init.support() > grid.length() {
            return Err(CoreError::SupportExceedsDomain {
                support: init.support(),
                length: grid.length(),
            });
        }
        let h = grid.h();
        let w: Vec<f64> = (0..grid.n())
            .map(|i| init.integral(grid.face(i), grid.face(i + 1)) / h)
            .collect();
        if let Some(bad) = w.iter().find(|v| !(**v >= 0.0)) {
            return Err(CoreError::NegativeDensity(format!(
                "initial cell average {bad}"
            )));
        }
        Self::from_cells(problem, grid, w)
    }

    /// Initialize from an existing field on the same grid.
    pub fn from_field(problem: FpProblem, field: &DensityField) -> Result<Self> {
        Self::from_cells(problem, *field.grid(), field.values().to_vec())
    }

    fn from_cells(problem: FpProblem, grid: Grid, w: Vec<f64>) -> Result<Self> {
        let mass0 = grid.h() * w.iter().sum::<f64>();
        if !(mass0 > 0.0) {
            return Err(CoreError::invalid("init", "total mass must be positive"));
        }
        let n = grid.n();
        Ok(Self {
            problem,
            grid,
            w,
            tau: 0.0,
            mass0,
            steps: 0,
            w_bp: vec![0.0; n],
            w_bm: vec![0.0; n],
            weights_tau: f64::NAN,
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            cp: vec![0.0; n],
            dp: vec![0.0; n],
            wnew: vec![0.0; n],
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn problem(&self) -> &FpProblem {
        &self.problem
    }

    pub fn mass(&self) -> f64 {
        self.mass0
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Current state as a density field with the bookkept mass.
    pub fn field(&self) -> DensityField {
        DensityField::from_values(self.grid, self.w.clone())
            .expect("solver state is a valid density")
    }

    /// Largest admissible step at the current time:
    /// `min(h^2/(2D), h/max|a|)`.
    pub fn stable_dtau(&self) -> f64 {
        let h = self.grid.h();
        let dd = self.problem.diffusivity();
        let mut amax: f64 = 0.0;
        for j in 1..self.grid.n() {
            amax = amax.max(self.problem.drift(self.tau, self.grid.face(j)).abs());
        }
        let diffusive_cap = h * h / (2.0 * dd);
        if amax > 0.0 {
            diffusive_cap.min(h / amax)
        } else {
            diffusive_cap
        }
    }

    fn refresh_weights(&mut self, tau_target: f64) {
        if self.problem.is_autonomous() && self.weights_tau.is_finite() {
            return;
        }
        if self.weights_tau == tau_target {
            return;
        }
        let h = self.grid.h();
        let dd = self.problem.diffusivity();
        for j in 1..self.grid.n() {
            let a = self.problem.drift(tau_target, self.grid.face(j));
            let p = a * h / dd;
            let bp = bernoulli(p);
            self.w_bp[j] = bp;
            self.w_bm[j] = bp + p; // B(-p) = B(p) + p, exactly
        }
        self.weights_tau = tau_target;
    }

    /// One backward-Euler step of size `dtau`; the drift is frozen at the
    /// implicit target time.
    pub fn step(&mut self, dtau: f64) -> Result<()> {
        let target = self.tau + dtau;
        self.step_to(dtau, target)
    }

    fn step_to(&mut self, dtau: f64, tau_target: f64) -> Result<()> {
        if !(dtau > 0.0) || !dtau.is_finite() {
            return Err(CoreError::invalid(
                "dtau",
                format!("must be > 0, got {dtau}"),
            ));
        }
        self.refresh_weights(tau_target);
        let n = self.grid.n();
        let h = self.grid.h();
        let nu = dtau * self.problem.diffusivity() / (h * h);
        for i in 0..n {
            let right = if i + 1 < n { self.w_bp[i + 1] } else { 0.0 };
            let left = if i > 0 { self.w_bm[i] } else { 0.0 };
            self.diag[i] = 1.0 + nu * (right + left);
            self.upper[i] = if i + 1 < n {
                -nu * self.w_bm[i + 1]
            } else {
                0.0
            };
            self.lower[i] = if i > 0 { -nu * self.w_bp[i] } else { 0.0 };
        }
        tridiag::solve_into(
            &self.lower,
            &self.diag,
            &self.upper,
            &self.w,
            &mut self.cp,
            &mut self.dp,
            &mut self.wnew,
        )
        .map_err(|e| {
            CoreError::TridiagonalSolve(format!(
                "{e} (frame {}, tau {:.6e}, dtau {:.3e})",
                self.problem.frame().name(),
                self.tau,
                dtau
            ))
        })?;
        std::mem::swap(&mut self.w, &mut self.wnew);
        self.tau = tau_target;
        self.steps += 1;
        Ok(())
    }

    /// Advance through `schedule` (strictly increasing frame times, the
    /// first entry at or after the current time), emitting one snapshot per
    /// entry by exact landing. `dtau_cap` further limits the step size.
    pub fn run(&mut self, schedule: &[f64], dtau_cap: Option<f64>) -> Result<Trajectory> {
        if schedule.is_empty() {
            return Err(CoreError::invalid("schedule", "must be nonempty"));
        }
        for w in schedule.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CoreError::invalid(
                    "schedule",
                    "must be strictly increasing",
                ));
            }
        }
        if schedule[0] < self.tau {
            return Err(CoreError::invalid(
                "schedule",
                format!("starts at {} before current time {}", schedule[0], self.tau),
            ));
        }
        if let Some(cap) = dtau_cap {
            if !(cap > 0.0) {
                return Err(CoreError::invalid("dtau_cap", "must be > 0"));
            }
        }
        let mut snapshots = Vec::with_capacity(schedule.len());
        for &target in schedule {
            while self.tau < target {
                let cap = self
                    .stable_dtau()
                    .min(dtau_cap.unwrap_or(f64::INFINITY));
                let remaining = target - self.tau;
                if remaining <= cap {
                    self.step_to(remaining, target)?; // exact landing
                } else {
                    self.step(cap)?;
                }
            }
            snapshots.push(self.snapshot()?);
        }
        Ok(Trajectory { snapshots })
    }

    fn snapshot(&self) -> Result<Snapshot> {
        if let Some(bad) = self.w.iter().find(|v| !(**v >= 0.0)) {
            return Err(CoreError::NegativeDensity(format!(
                "cell average {bad} at tau {:.6e}",
                self.tau
            )));
        }
        let field = DensityField::from_values(self.grid, self.w.clone())?;
        let drift = (field.recompute_mass() - self.mass0).abs() / self.mass0;
        if drift > 1e-13 * (self.steps.max(1) as f64) {
            return Err(CoreError::MassMismatch {
                field: field.recompute_mass(),
                reference: self.mass0,
            });
        }
        let tail = field.tail_mass(TAIL_FRACTION);
        Ok(Snapshot {
            tau: self.tau,
            t: self.problem.physical_time(self.tau),
            field,
            tail_mass: tail,
            tail_warning: tail > TAIL_WARN_REL * self.mass0,
        })
    }

    /// The scheme-exact zero-flux state for the drift frozen at `tau`,
    /// normalized to `mass`. Per-face ratio `B(P)/B(-P)`, the discrete
    /// counterpart of `exp(-int a/D)`.
    pub fn discrete_steady_state(
        problem: &FpProblem,
        grid: &Grid,
        tau: f64,
        mass: f64,
    ) -> Result<DensityField> {
        let h = grid.h();
        let dd = problem.diffusivity();
        let mut w = vec![0.0; grid.n()];
        w[0] = 1.0;
        for j in 1..grid.n() {
            let p = problem.drift(tau, grid.face(j)) * h / dd;
            let bp = bernoulli(p);
            w[j] = w[j - 1] * (bp / (bp + p));
        }
        let total = h * w.iter().sum::<f64>();
        for v in &mut w {
            *v *= mass / total;
        }
        DensityField::from_values(*grid, w)
    }
}
