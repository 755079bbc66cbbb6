//! Regime-dependent stationary / self-similar limit shapes with exact mass
//! normalization.
//!
//! In the rescaled frames the limit density is `W(y) = W(0) e^{-Phi(y)/D}`
//! with a quadratic potential below the critical exponent (Gaussian shape),
//! quadratic-plus-linear at it (Gaussian times exponential), and linear above
//! it (pure exponential, stationary in the physical frame when `beta = 1`).
//! `W(0)` is fixed so that the total half-line mass equals `M`; the critical
//! normalization uses the erfc closed form obtained by completing the
//! square, so that equal-mass comparisons against solver fields are exact.

use crate::boundary_motion::{BoundaryMotion, Regime};
use crate::error::{CoreError, Result};
use crate::kernels::erfc;

const SQRT_PI: f64 = 1.772453850905516;

/// A mass-normalized limit profile for one wall law.
#[derive(Debug, Clone, Copy)]
pub struct Profile {
    bm: BoundaryMotion,
    regime: Regime,
    mass: f64,
    w0: f64,
}

impl Profile {
    pub fn new(c: f64, beta: f64, d: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(CoreError::invalid(
                "mass",
                format!("must be > 0, got {mass}"),
            ));
        }
        let bm = BoundaryMotion::new(c, beta, d)?;
        let regime = bm.regime();
        let w0 = match regime {
            Regime::SubCritical => mass / (SQRT_PI * d.sqrt()),
            Regime::Critical => {
                mass / (SQRT_PI * d.sqrt() * (c * c / (4.0 * d)).exp() * erfc(c / (2.0 * d.sqrt())))
            }
            // Exponential shape, rate c*beta/d; covers the linear case and
            // extends verbatim to the exploratory exponents.
            Regime::SuperCritical | Regime::Linear | Regime::Exploratory => mass * c * beta / d,
        };
        Ok(Self {
            bm,
            regime,
            mass,
            w0,
        })
    }

    pub fn for_boundary(bm: &BoundaryMotion, mass: f64) -> Result<Self> {
        Self::new(bm.c(), bm.beta(), bm.d(), mass)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Amplitude `W(0)`.
    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn boundary(&self) -> &BoundaryMotion {
        &self.bm
    }

    /// Decay rate of the exponential shapes (`c beta / d`), if applicable.
    fn exp_rate(&self) -> f64 {
        self.bm.c() * self.bm.beta() / self.bm.d()
    }

    /// Shape value without the domain check; the formulas extend smoothly to
    /// y < 0, which the finite-difference residual tests use.
    pub(crate) fn eval_raw(&self, y: f64) -> f64 {
        let (c, d) = (self.bm.c(), self.bm.d());
        match self.regime {
            Regime::SubCritical => self.w0 * (-y * y / (4.0 * d)).exp(),
            Regime::Critical => self.w0 * (-y * y / (4.0 * d) - c * y / (2.0 * d)).exp(),
            _ => self.w0 * (-self.exp_rate() * y).exp(),
        }
    }

    /// Profile value at `y >= 0`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(CoreError::invalid("y", format!("must be >= 0, got {y}")));
        }
        Ok(self.eval_raw(y))
    }

    /// Exact `int_a^b W(y) dy` (clipped at 0).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(0.0);
        if b <= a {
            return 0.0;
        }
        let (c, d) = (self.bm.c(), self.bm.d());
        let s = 2.0 * d.sqrt();
        match self.regime {
            Regime::SubCritical => self.w0 * SQRT_PI * d.sqrt() * (erfc(a / s) - erfc(b / s)),
            Regime::Critical => {
                self.w0
                    * SQRT_PI
                    * d.sqrt()
                    * (c * c / (4.0 * d)).exp()
                    * (erfc((a + c) / s) - erfc((b + c) / s))
            }
            _ => {
                let k = self.exp_rate();
                self.w0 / k * ((-k * a).exp() - (-k * b).exp())
            }
        }
    }

    /// Exact tail mass `int_l^inf W(y) dy`.
    pub fn tail_mass(&self, l: f64) -> f64 {
        let l = l.max(0.0);
        let (c, d) = (self.bm.c(), self.bm.d());
        let s = 2.0 * d.sqrt();
        match self.regime {
            Regime::SubCritical => self.w0 * SQRT_PI * d.sqrt() * erfc(l / s),
            Regime::Critical => {
                self.w0 * SQRT_PI * d.sqrt() * (c * c / (4.0 * d)).exp() * erfc((l + c) / s)
            }
            _ => {
                let k = self.exp_rate();
                self.w0 / k * (-k * l).exp()
            }
        }
    }

    /// Physical-frame self-similar approximant `f(t) W(f(t) x)` with the
    /// amplitude of the regime's scaling map. Mass in `x` equals `M` for
    /// every `t`; `t`-independent (and equal to the stationary profile) in
    /// the linear regime.
    pub fn physical_approximant(&self, t: f64, x: f64) -> f64 {
        let f = self.bm.scaling_map().amplitude(t);
        f * self.eval_raw(f * x)
    }

    /// Diffusion coefficient `D` of the frame this profile is stationary in.
    pub fn frame_diffusivity(&self) -> f64 {
        match self.regime {
            Regime::SubCritical | Regime::Critical => 2.0 * self.bm.d(),
            _ => self.bm.d(),
        }
    }

    /// Drift `Phi'(y)` of the stationary problem `D W'' + (Phi' W)' = 0`.
    pub fn potential_gradient(&self, y: f64) -> f64 {
        let c = self.bm.c();
        match self.regime {
            Regime::SubCritical => y,
            Regime::Critical => y + c,
            _ => c * self.bm.beta(),
        }
    }

    /// Uniform convexity constant of `-log W` where it exists: `1/(2d)` for
    /// the Gaussian-type shapes, `None` for the exponential ones (the
    /// potential degenerates to linear).
    pub fn log_convexity(&self) -> Option<f64> {
        match self.regime {
            Regime::SubCritical | Regime::Critical => Some(1.0 / (2.0 * self.bm.d())),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::quadrature;

    #[test]
    fn amplitude_normalizations() {
        // unit-rate exponential has unit mass
        let p = Profile::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((p.w0() - 1.0).abs() < 1e-14);
        // half-Gaussian: int_0^inf e^{-y^2/4} dy = sqrt(pi)
        let p = Profile::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((p.w0() - 1.0 / SQRT_PI).abs() < 1e-14);
        // critical, c=2, d=1, M=1; frozen 40-digit quadrature of
        // 1 / int_0^inf e^{-y^2/4 - y} dy.
        let p = Profile::new(2.0, 0.5, 1.0, 1.0).unwrap();
        let want = 1.3194837571173956;
        assert!((p.w0() - want).abs() < 1e-12 * want, "w0 {}", p.w0());
        assert!(Profile::new(1.0, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn mass_by_quadrature() {
        for &(c, beta, d, m) in &[
            (1.0, 0.0, 1.0, 1.0),
            (1.0, 0.25, 0.5, 2.0),
            (2.0, 0.5, 1.0, 1.0),
            (1.0, 0.75, 1.0, 3.0),
            (0.5, 1.0, 2.0, 1.0),
        ] {
            let p = Profile::new(c, beta, d, m).unwrap();
            let y_max = 40.0 * d.sqrt().max(d / (c * beta.max(0.25)));
            let grid_mass =
                quadrature::integrate(|y| p.eval_raw(y), 0.0, y_max, 1e-12).value;
            let total = grid_mass + p.tail_mass(y_max);
            assert!(
                (total - m).abs() < 1e-10 * m,
                "c={c} beta={beta}: mass {total} want {m}"
            );
        }
    }

    #[test]
    fn eval_examples() {
        let p = Profile::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.eval(0.0).unwrap(), p.w0());
        assert!((p.eval(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        assert!(p.eval(-0.1).is_err());
        // critical shape = sub-critical shape * e^{-cy/(2d)} * amplitude ratio
        let crit = Profile::new(2.0, 0.5, 1.0, 1.0).unwrap();
        let sub = Profile::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let y = 1.3;
        let lhs = crit.eval(y).unwrap();
        let rhs = sub.eval(y).unwrap() * (-2.0 * y / 2.0).exp() * (crit.w0() / sub.w0());
        assert!((lhs - rhs).abs() < 1e-14 * lhs.max(rhs));
    }

    #[test]
    fn profile_integral_matches_quadrature() {
        for &(c, beta, d) in &[(1.0, 0.0, 1.0), (2.0, 0.5, 1.0), (1.0, 0.75, 2.0)] {
            let p = Profile::new(c, beta, d, 1.0).unwrap();
            for &(a, b) in &[(0.0, 1.0), (0.5, 3.7), (2.0, 9.0)] {
                let q = quadrature::integrate(|y| p.eval_raw(y), a, b, 1e-13).value;
                let e = p.integral(a, b);
                assert!((q - e).abs() < 1e-11, "({a},{b}): {q} vs {e}");
            }
        }
    }

    #[test]
    fn physical_approximant_examples() {
        // linear regime: t-independent, equals the stationary profile
        let p = Profile::new(1.0, 1.0, 1.0, 1.0).unwrap();
        for &t in &[0.0, 10.0, 1000.0] {
            let v = p.physical_approximant(t, 0.7);
            assert!((v - (-0.7f64).exp()).abs() < 1e-14);
        }
        // beta = 0, t = 3: amplitude 1/2 at x = 0
        let p = Profile::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((p.physical_approximant(3.0, 0.0) - p.w0() / 2.0).abs() < 1e-15);
        // mass in x equals M for every t (change of variables is exact;
        // check by quadrature)
        for &(beta, t) in &[(0.0, 10.0), (0.5, 100.0), (0.75, 1000.0)] {
            let p = Profile::new(1.0, beta, 1.0, 1.0).unwrap();
            let f = p.boundary().scaling_map().amplitude(t);
            let x_max = 40.0f64.max(10.0 / f.min(1.0)) / f.min(1.0);
            let m = quadrature::integrate(|x| p.physical_approximant(t, x), 0.0, x_max, 1e-9)
                .value
                + p.tail_mass(f * x_max);
            assert!((m - 1.0).abs() < 1e-8, "beta={beta} t={t}: mass {m}");
        }
    }

    #[test]
    fn stationary_ode_residual() {
        // D W'' + (Phi' W)' = 0, finite differences, relative residual <= 1e-6
        for &(c, beta, d) in &[
            (1.0, 0.0, 1.0),
            (1.0, 0.25, 1.0),
            (2.0, 0.5, 1.0),
            (1.0, 0.75, 0.5),
            (1.0, 1.0, 1.0),
        ] {
            let p = Profile::new(c, beta, d, 1.0).unwrap();
            let dd = p.frame_diffusivity();
            for &y in &[0.5, 1.0, 2.0, 4.0] {
                let h = 1e-4 * (1.0 + y);
                let wpp = (p.eval_raw(y + h) - 2.0 * p.eval_raw(y) + p.eval_raw(y - h)) / (h * h);
                let flux = |z: f64| p.potential_gradient(z) * p.eval_raw(z);
                let dflux = (flux(y + h) - flux(y - h)) / (2.0 * h);
                let res = dd * wpp + dflux;
                let scale = (dd * wpp).abs().max(dflux.abs()).max(1e-300);
                assert!(
                    res.abs() / scale < 1e-6,
                    "c={c} beta={beta} y={y}: residual {res} scale {scale}"
                );
            }
            // zero boundary flux: D W'(0) + Phi'(0) W(0) = 0
            let h = 1e-6;
            let w1 = (p.eval_raw(h) - p.eval_raw(-h)) / (2.0 * h);
            let res0 = dd * w1 + p.potential_gradient(0.0) * p.w0();
            assert!(res0.abs() <= 1e-6 * p.w0().max(dd * w1.abs()));
        }
    }

    #[test]
    fn strictly_decreasing_shape() {
        for &(c, beta, d) in &[(1.0, 0.0, 1.0), (2.0, 0.5, 1.0), (1.0, 1.0, 1.0)] {
            let p = Profile::new(c, beta, d, 1.0).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..1000 {
                let v = p.eval_raw(k as f64 * 0.02);
                assert!(v < prev || v == 0.0);
                prev = v;
            }
        }
    }
}
