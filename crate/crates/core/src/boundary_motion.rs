//! The moving-wall law `b(t) = c[(1+t)^beta - 1]`, its derived drift
//! coefficients, and the maps between the physical frame and the
//! self-similar frames.
//!
//! Two rescaled frames are used downstream:
//!
//! - the diffusive frame (`beta <= 1/2`): `tau = log sqrt(1+t)`,
//!   `y = x / sqrt(1+t)`, amplitude `1/sqrt(1+t)`;
//! - the wall-speed frame (`beta > 1/2`): `tau = [(1+t)^{2beta-1} - 1]/(2beta-1)`,
//!   `y = (1+t)^{beta-1} x`, amplitude `(1+t)^{beta-1} = b'(t)/(c beta)`.
//!
//! All maps are pure closed-form evaluations; no caching.

use crate::error::{CoreError, Result};

/// Wall-speed classification. The split at `beta = 1/2` separates walls that
/// are outrun by diffusive spreading from walls that confine it; `beta = 1`
/// is the distinguished linear case with an exact kernel; `beta > 1` is
/// admitted for exploration only (no certified convergence statement).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 <= beta < 1/2`
    SubCritical,
    /// `beta = 1/2`
    Critical,
    /// `1/2 < beta < 1`
    SuperCritical,
    /// `beta = 1`
    Linear,
    /// `beta > 1`
    Exploratory,
}

impl Regime {
    /// True for the regimes whose rescaled drift grows at most linearly and
    /// carries a certified long-time statement (`beta <= 1`).
    pub fn certified(self) -> bool {
        !matches!(self, Regime::Exploratory)
    }
}

/// The wall law `b(t) = c[(1+t)^beta - 1]` together with the diffusivity of
/// the medium. Pure value type; freely shareable between threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMotion {
    c: f64,
    beta: f64,
    d: f64,
}

impl BoundaryMotion {
    pub fn new(c: f64, beta: f64, d: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(CoreError::invalid("c", format!("must be > 0, got {c}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(CoreError::invalid(
                "beta",
                format!("must be >= 0, got {beta}"),
            ));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(CoreError::invalid("d", format!("must be > 0, got {d}")));
        }
        Ok(Self { c, beta, d })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Regime classification; exact comparisons on the stored exponent
    /// (beta is user input, never a computed quantity).
    pub fn regime(&self) -> Regime {
        if self.beta < 0.5 {
            Regime::SubCritical
        } else if self.beta == 0.5 {
            Regime::Critical
        } else if self.beta < 1.0 {
            Regime::SuperCritical
        } else if self.beta == 1.0 {
            Regime::Linear
        } else {
            Regime::Exploratory
        }
    }

    /// Wall position `b(t) = c[(1+t)^beta - 1]`; nondecreasing, `b(0) = 0`.
    pub fn position(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        if self.beta == 0.0 {
            return Ok(0.0);
        }
        if self.beta == 1.0 {
            return Ok(self.c * t);
        }
        Ok(self.c * (self.beta * t.ln_1p()).exp_m1())
    }

    /// Wall speed `b'(t) = c beta (1+t)^{beta-1}`.
    pub fn speed(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        Ok(self.c * self.beta * ((self.beta - 1.0) * t.ln_1p()).exp())
    }

    /// Drift offset of the diffusive frame, `psi(tau) = 2 c beta e^{tau(2beta-1)}`.
    /// Constant `c` at `beta = 1/2`, identically zero at `beta = 0`.
    pub fn psi(&self, tau: f64) -> Result<f64> {
        check_nonnegative("tau", tau)?;
        if self.beta > 0.5 {
            return Err(CoreError::WrongRegime {
                required: "beta <= 1/2 (diffusive frame)",
                beta: self.beta,
            });
        }
        Ok(2.0 * self.c * self.beta * (tau * (2.0 * self.beta - 1.0)).exp())
    }

    /// Drift slope of the wall-speed frame,
    /// `eta(tau) = (beta-1)/(1 + (2beta-1) tau)`; carries the sign of
    /// `beta - 1` and vanishes as `tau -> inf`.
    pub fn eta(&self, tau: f64) -> Result<f64> {
        check_nonnegative("tau", tau)?;
        if self.beta <= 0.5 {
            return Err(CoreError::WrongRegime {
                required: "beta > 1/2 (wall-speed frame)",
                beta: self.beta,
            });
        }
        Ok((self.beta - 1.0) / (1.0 + (2.0 * self.beta - 1.0) * tau))
    }

    /// Rescaled time of the frame selected by the regime.
    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        Ok(if self.beta <= 0.5 {
            0.5 * t.ln_1p()
        } else if self.beta == 1.0 {
            t
        } else {
            let p = 2.0 * self.beta - 1.0;
            (p * t.ln_1p()).exp_m1() / p
        })
    }

    /// Inverse of [`Self::tau_of_t`].
    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        check_nonnegative("tau", tau)?;
        Ok(if self.beta <= 0.5 {
            (2.0 * tau).exp_m1()
        } else if self.beta == 1.0 {
            tau
        } else {
            let p = 2.0 * self.beta - 1.0;
            ((p * tau).ln_1p() / p).exp_m1()
        })
    }

    /// The self-similar transform `v(t,x) = f(t) w(g(t), f(t) x)` for this
    /// wall law.
    pub fn scaling_map(&self) -> ScalingMap {
        ScalingMap { bm: *self }
    }
}

/// Amplitude/space/time rescaling between the physical frame and the
/// regime's self-similar frame. `f(0) = 1`, `g(0) = 0`, `g` strictly
/// increasing; in the linear regime the transform is the identity.
#[derive(Debug, Clone, Copy)]
pub struct ScalingMap {
    bm: BoundaryMotion,
}

impl ScalingMap {
    pub fn boundary(&self) -> &BoundaryMotion {
        &self.bm
    }

    /// Amplitude factor `f(t)`: `1/sqrt(1+t)` below the critical exponent,
    /// `b'(t)/(c beta) = (1+t)^{beta-1}` above it, identically 1 at `beta = 1`.
    pub fn amplitude(&self, t: f64) -> f64 {
        if self.bm.beta <= 0.5 {
            1.0 / (1.0 + t).sqrt()
        } else if self.bm.beta == 1.0 {
            1.0
        } else {
            ((self.bm.beta - 1.0) * t.ln_1p()).exp()
        }
    }

    /// Rescaled time `g(t)`.
    pub fn rescaled_time(&self, t: f64) -> Result<f64> {
        self.bm.tau_of_t(t)
    }

    /// Physical time from rescaled time.
    pub fn physical_time(&self, tau: f64) -> Result<f64> {
        self.bm.t_of_tau(tau)
    }

    /// Rescaled coordinate `y = f(t) x`.
    pub fn rescale_coord(&self, t: f64, x: f64) -> f64 {
        self.amplitude(t) * x
    }
}

fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(CoreError::invalid(name, format!("must be >= 0, got {v}")));
    }
    Ok(())
}
