//! Closed-form fundamental solutions and exact solution evaluation for the
//! linearly moving wall, plus compactly supported initial data.
//!
//! In the co-moving frame of a wall at `b(t) = ct` the density solves a
//! constant-drift diffusion problem on the half-line with the flux-balance
//! condition `-d v_x = c v` at `x = 0`. Its fundamental solution is
//!
//! ```text
//! H(t,x,xi) = G(t, x+ct-xi) + G(t, x+ct+xi) e^{c xi/d}
//!           + (c/(2d)) e^{-cx/d} erfc((xi+x-ct) / (2 sqrt(dt)))
//! ```
//!
//! where `G` is the free heat kernel. The erfc term is the closed form of
//! the tail integral `(c/d) int_xi^inf G(t, x+ct+w) e^{cw/d} dw`; the
//! integral form is kept in-repo as a quadrature oracle
//! ([`robin_drift_kernel_integral_form`]) so the closed form can be checked
//! against it rather than assumed.

pub mod erfc;
pub mod quadrature;

use crate::error::{CoreError, Result};
use crate::fv_solver::Grid;
pub use erfc::erfc;
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const SQRT_4PI: f64 = 3.544907701811032;

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(CoreError::invalid(name, format!("must be > 0, got {v}")));
    }
    Ok(())
}

fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(CoreError::invalid(name, format!("must be >= 0, got {v}")));
    }
    Ok(())
}

/// Free heat kernel `G(t,X) = e^{-X^2/(4dt)} / sqrt(4 pi d t)`.
pub fn gauss_kernel(t: f64, x: f64, d: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("d", d)?;
    Ok((-x * x / (4.0 * d * t)).exp() / (SQRT_4PI * (d * t).sqrt()))
}

/// Half-line heat kernel with a reflecting (zero-flux) wall at the origin:
/// `H(t,z,xi) = G(t,z-xi) + G(t,z+xi)`.
pub fn neumann_kernel(t: f64, z: f64, xi: f64, d: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_nonnegative("z", z)?;
    check_nonnegative("xi", xi)?;
    Ok(gauss_kernel(t, z - xi, d)? + gauss_kernel(t, z + xi, d)?)
}

/// Fundamental solution of the co-moving linear-wall problem (drift `c`,
/// flux-balance wall at `x = 0`). Strictly positive; unit mass in `x`.
pub fn robin_drift_kernel(t: f64, x: f64, xi: f64, c: f64, d: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_nonnegative("x", x)?;
    check_nonnegative("xi", xi)?;
    check_positive("c", c)?;
    check_positive("d", d)?;
    Ok(robin_kernel_unchecked(t, x, xi, c, d))
}

pub(crate) fn robin_kernel_unchecked(t: f64, x: f64, xi: f64, c: f64, d: f64) -> f64 {
    let norm = SQRT_4PI * (d * t).sqrt();
    let a1 = x + c * t - xi;
    let g1 = (-a1 * a1 / (4.0 * d * t)).exp() / norm;
    // Exponents combined before exponentiation: e^{c xi/d} alone overflows
    // for large xi while the product stays bounded.
    let a2 = x + c * t + xi;
    let g2 = (c * xi / d - a2 * a2 / (4.0 * d * t)).exp() / norm;
    let tail = c / (2.0 * d) * (-c * x / d).exp() * erfc((xi + x - c * t) / (2.0 * (d * t).sqrt()));
    g1 + g2 + tail
}

/// Quadrature oracle for the kernel: evaluates the tail term in its integral
/// form `(c/d) int_xi^inf G(t, x+ct+w) e^{cw/d} dw` instead of the erfc
/// closed form. Intended for validation, not production use.
pub fn robin_drift_kernel_integral_form(
    t: f64,
    x: f64,
    xi: f64,
    c: f64,
    d: f64,
    abs_tol: f64,
) -> Result<f64> {
    check_positive("t", t)?;
    check_nonnegative("x", x)?;
    check_nonnegative("xi", xi)?;
    check_positive("c", c)?;
    check_positive("d", d)?;
    let norm = SQRT_4PI * (d * t).sqrt();
    let a1 = x + c * t - xi;
    let g1 = (-a1 * a1 / (4.0 * d * t)).exp() / norm;
    let a2 = x + c * t + xi;
    let g2 = (c * xi / d - a2 * a2 / (4.0 * d * t)).exp() / norm;
    // The integrand peaks at w = ct - x and decays like a Gaussian of width
    // 2 sqrt(dt) around it.
    let peak = (c * t - x).max(xi);
    let hi = peak + 16.0 * (d * t).sqrt();
    let integrand = |w: f64| {
        let aw = x + c * t + w;
        (c * w / d - aw * aw / (4.0 * d * t)).exp() / norm
    };
    let tail = c / d
        * quadrature::integrate_segmented(
            integrand,
            &[xi, xi.max((c * t - x).max(xi)), hi],
            abs_tol,
        )
        .value;
    Ok(g1 + g2 + tail)
}

/// Bounded, compactly supported, nonnegative initial data on the half-line.
///
/// Carries exact subinterval integrals where the shape allows it (indicator,
/// truncated Gaussian bump, piecewise-linear table), falling back to
/// adaptive quadrature for custom evaluators; the finite-volume solver uses
/// these for exact cell averages.
#[derive(Clone)]
pub struct CompactInitialData {
    kind: InitKind,
    support: f64,
    sup_norm: f64,
    mass: f64,
}

#[derive(Clone)]
enum InitKind {
    Indicator {
        x0: f64,
        x1: f64,
        height: f64,
    },
    GaussianBump {
        center: f64,
        width: f64,
        amplitude: f64,
        lo: f64,
        hi: f64,
    },
    Table {
        pts: Arc<Vec<(f64, f64)>>,
    },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for CompactInitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompactInitialData")
            .field("support", &self.support)
            .field("sup_norm", &self.sup_norm)
            .field("mass", &self.mass)
            .finish()
    }
}

impl CompactInitialData {
    /// Indicator of `[x0, x1]` scaled to total mass `mass`.
    pub fn indicator(x0: f64, x1: f64, mass: f64) -> Result<Self> {
        check_nonnegative("x0", x0)?;
        check_positive("mass", mass)?;
        if !(x1 > x0) {
            return Err(CoreError::invalid(
                "x1",
                format!("must exceed x0 = {x0}, got {x1}"),
            ));
        }
        let height = mass / (x1 - x0);
        Ok(Self {
            kind: InitKind::Indicator { x0, x1, height },
            support: x1,
            sup_norm: height,
            mass,
        })
    }

    /// Gaussian bump `~ e^{-(x-center)^2/(2 width^2)}` truncated to
    /// `[max(0, center - 5 width), center + 5 width]` and scaled to `mass`.
    pub fn gaussian_bump(center: f64, width: f64, mass: f64) -> Result<Self> {
        check_nonnegative("center", center)?;
        check_positive("width", width)?;
        check_positive("mass", mass)?;
        let lo = (center - 5.0 * width).max(0.0);
        let hi = center + 5.0 * width;
        // Truncated mass of the unit-amplitude bump, via erfc.
        let s = width * std::f64::consts::SQRT_2;
        let raw = width * (std::f64::consts::PI / 2.0).sqrt()
            * (erfc((lo - center) / s) - erfc((hi - center) / s));
        let amplitude = mass / raw;
        Ok(Self {
            kind: InitKind::GaussianBump {
                center,
                width,
                amplitude,
                lo,
                hi,
            },
            support: hi,
            sup_norm: amplitude,
            mass,
        })
    }

    /// Piecewise-linear data from sorted `(x, value)` pairs; the last `x` is
    /// the support bound.
    pub fn from_table(pts: Vec<(f64, f64)>) -> Result<Self> {
        if pts.len() < 2 {
            return Err(CoreError::invalid("pts", "need at least two points"));
        }
        for w in pts.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(CoreError::invalid("pts", "x values must be increasing"));
            }
        }
        if pts.iter().any(|&(x, v)| x < 0.0 || v < 0.0 || !v.is_finite()) {
            return Err(CoreError::NegativeDensity(
                "table contains negative or non-finite values".into(),
            ));
        }
        let support = pts.last().unwrap().0;
        let sup_norm = pts.iter().map(|&(_, v)| v).fold(0.0, f64::max);
        // Trapezoid rule is exact for piecewise-linear data.
        let mass: f64 = pts
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if !(mass > 0.0) {
            return Err(CoreError::invalid("pts", "total mass must be positive"));
        }
        Ok(Self {
            kind: InitKind::Table { pts: Arc::new(pts) },
            support,
            sup_norm,
            mass,
        })
    }

    /// Custom evaluator supported on `[0, support]`; mass by quadrature,
    /// sup-norm and nonnegativity by a dense scan.
    pub fn from_fn<F>(f: F, support: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_positive("support", support)?;
        let mut sup_norm: f64 = 0.0;
        for k in 0..=4096 {
            let x = support * k as f64 / 4096.0;
            let v = f(x);
            if v < 0.0 || !v.is_finite() {
                return Err(CoreError::NegativeDensity(format!(
                    "initial data evaluates to {v} at x = {x}"
                )));
            }
            sup_norm = sup_norm.max(v);
        }
        let mass = quadrature::integrate_checked(&f, 0.0, support, 1e-10)?;
        if !(mass > 0.0) {
            return Err(CoreError::invalid("f", "total mass must be positive"));
        }
        Ok(Self {
            kind: InitKind::Custom { f: Arc::new(f) },
            support,
            sup_norm,
            mass,
        })
    }

    /// Point value; zero outside `[0, support]`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.support {
            return 0.0;
        }
        match &self.kind {
            InitKind::Indicator { x0, x1, height } => {
                if x >= *x0 && x <= *x1 {
                    *height
                } else {
                    0.0
                }
            }
            InitKind::GaussianBump {
                center,
                width,
                amplitude,
                lo,
                hi,
            } => {
                if x < *lo || x > *hi {
                    0.0
                } else {
                    amplitude * (-(x - center) * (x - center) / (2.0 * width * width)).exp()
                }
            }
            InitKind::Table { pts } => {
                if x < pts[0].0 {
                    return 0.0;
                }
                let idx = pts.partition_point(|&(px, _)| px <= x);
                if idx == 0 || idx >= pts.len() {
                    return pts.last().map(|&(_, v)| v).unwrap_or(0.0);
                }
                let (x0, v0) = pts[idx - 1];
                let (x1, v1) = pts[idx];
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
            InitKind::Custom { f } => f(x),
        }
    }

    /// Integral over `[a, b]` (clipped to the support); exact for the
    /// structured shapes, adaptive quadrature for custom evaluators.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(0.0);
        let b = b.min(self.support);
        if b <= a {
            return 0.0;
        }
        match &self.kind {
            InitKind::Indicator { x0, x1, height } => {
                let lo = a.max(*x0);
                let hi = b.min(*x1);
                height * (hi - lo).max(0.0)
            }
            InitKind::GaussianBump {
                center,
                width,
                amplitude,
                lo,
                hi,
            } => {
                let lo = a.max(*lo);
                let hi = b.min(*hi);
                if hi <= lo {
                    return 0.0;
                }
                let s = width * std::f64::consts::SQRT_2;
                amplitude
                    * width
                    * (std::f64::consts::PI / 2.0).sqrt()
                    * (erfc((lo - center) / s) - erfc((hi - center) / s))
            }
            InitKind::Table { pts } => {
                // Exact integral of the piecewise-linear interpolant.
                let mut acc = 0.0;
                for w in pts.windows(2) {
                    let (x0, v0) = w[0];
                    let (x1, v1) = w[1];
                    let lo = a.max(x0);
                    let hi = b.min(x1);
                    if hi <= lo {
                        continue;
                    }
                    let val = |x: f64| v0 + (v1 - v0) * (x - x0) / (x1 - x0);
                    acc += 0.5 * (val(lo) + val(hi)) * (hi - lo);
                }
                acc
            }
            InitKind::Custom { f } => quadrature::integrate(&**f, a, b, 1e-12).value,
        }
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Total mass `int_0^inf v0`.
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Whole-line extension of compact initial data such that the constant-drift
/// heat flow of the extension satisfies the flux-balance wall condition for
/// all positive times. For `x < 0`:
/// `e^{-cx/d} [ v0(-x) + (c/d) int_0^{-x} v0 ]`; continuous at `x = 0`.
pub struct ExtendedInitialData<'a> {
    v0: &'a CompactInitialData,
    c: f64,
    d: f64,
}

pub fn extend_initial_data(
    v0: &CompactInitialData,
    c: f64,
    d: f64,
) -> Result<ExtendedInitialData<'_>> {
    check_positive("c", c)?;
    check_positive("d", d)?;
    Ok(ExtendedInitialData { v0, c, d })
}

impl ExtendedInitialData<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.v0.eval(x)
        } else {
            (-self.c * x / self.d).exp()
                * (self.v0.eval(-x) + self.c / self.d * self.v0.integral(0.0, -x))
        }
    }
}

/// Exact co-moving solution for the linearly moving wall: adaptive
/// quadrature of the drifted Robin kernel against the initial data, with
/// absolute error target `1e-10`.
pub fn exact_solution_linear(
    v0: &CompactInitialData,
    t: f64,
    x: f64,
    c: f64,
    d: f64,
) -> Result<f64> {
    check_positive("t", t)?;
    check_nonnegative("x", x)?;
    check_positive("c", c)?;
    check_positive("d", d)?;
    let r = v0.support();
    let integrand = |xi: f64| robin_kernel_unchecked(t, x, xi, c, d) * v0.eval(xi);
    // The moving image of x lands at xi = x + ct; isolate it when inside.
    let peak = x + c * t;
    let res = if peak > 0.0 && peak < r {
        quadrature::integrate_segmented(integrand, &[0.0, peak, r], 1e-10)
    } else {
        quadrature::integrate(integrand, 0.0, r, 1e-10)
    };
    if !res.converged && res.error > 1e-10 {
        return Err(CoreError::QuadratureNonConvergence {
            achieved: res.error,
            target: 1e-10,
        });
    }
    Ok(res.value)
}

/// Tabulate the exact linear-wall solution at the cell midpoints of `grid`.
/// Runs data-parallel when the `parallel` feature is enabled; results are
/// identical to [`tabulate_solution_linear_serial`].
pub fn tabulate_solution_linear(
    v0: &CompactInitialData,
    t: f64,
    grid: &Grid,
    c: f64,
    d: f64,
) -> Result<Vec<f64>> {
    #[cfg(feature = "parallel")]
    {
        (0..grid.n())
            .into_par_iter()
            .map(|i| exact_solution_linear(v0, t, grid.center(i), c, d))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        tabulate_solution_linear_serial(v0, t, grid, c, d)
    }
}

/// Sequential fallback for [`tabulate_solution_linear`].
pub fn tabulate_solution_linear_serial(
    v0: &CompactInitialData,
    t: f64,
    grid: &Grid,
    c: f64,
    d: f64,
) -> Result<Vec<f64>> {
    (0..grid.n())
        .map(|i| exact_solution_linear(v0, t, grid.center(i), c, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kernel_examples() {
        // sqrt(4 pi d t) = 1 at t = 1/pi, d = 1/4
        let v = gauss_kernel(1.0 / std::f64::consts::PI, 0.0, 0.25).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let a = gauss_kernel(0.7, 1.3, 2.0).unwrap();
        let b = gauss_kernel(0.7, -1.3, 2.0).unwrap();
        assert_eq!(a, b);
        let w = gauss_kernel(1.0, 2.0, 1.0).unwrap();
        assert!((w - (-1.0f64).exp() / SQRT_4PI).abs() < 1e-15);
        assert!(gauss_kernel(0.0, 1.0, 1.0).is_err());
        assert!(gauss_kernel(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gauss_kernel_unit_mass() {
        let cases: &[(f64, f64)] = &[(0.3, 1.0), (2.0, 0.5)];
        for &(t, d) in cases {
            let w = 2.0 * (d * t).sqrt();
            let m = quadrature::integrate(|x| gauss_kernel(t, x, d).unwrap(), -14.0 * w, 14.0 * w, 1e-11)
                .value;
            assert!((m - 1.0).abs() < 1e-10, "mass {m}");
        }
    }

    #[test]
    fn neumann_kernel_identities() {
        let (t, d) = (0.8, 1.0);
        // coincident images at xi = 0
        let v = neumann_kernel(t, 1.1, 0.0, d).unwrap();
        assert!((v - 2.0 * gauss_kernel(t, 1.1, d).unwrap()).abs() < 1e-15);
        // symmetry in (z, xi)
        let a = neumann_kernel(t, 0.4, 1.9, d).unwrap();
        let b = neumann_kernel(t, 1.9, 0.4, d).unwrap();
        assert!((a - b).abs() < 1e-15);
        // value at the wall
        let w = neumann_kernel(1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((w - 2.0 / SQRT_4PI).abs() < 1e-15);
        // unit mass over the half-line
        for &xi in &[0.0, 0.7, 2.5] {
            let m = quadrature::integrate(
                |z| neumann_kernel(t, z, xi, d).unwrap(),
                0.0,
                xi + 16.0 * (d * t).sqrt(),
                1e-11,
            )
            .value;
            assert!((m - 1.0).abs() < 1e-10);
        }
        // zero flux at the wall (centered difference through the reflection)
        for &xi in &[0.5, 1.7] {
            let h = 1e-6;
            let num = (neumann_kernel(t, h, xi, d).unwrap()
                - gauss_kernel(t, -h - xi, d).unwrap()
                - gauss_kernel(t, -h + xi, d).unwrap())
                / (2.0 * h);
            assert!(num.abs() < 1e-6, "flux {num}");
        }
    }

    #[test]
    fn robin_kernel_reference_value() {
        // Frozen 40-digit quadrature of the integral form at (1,0,0,1,1):
        // 2 e^{-1/4}/sqrt(4 pi) + erfc(-1/2)/2.
        let want = 1.1996412283742457;
        let got = robin_drift_kernel(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "got {got}");
    }

    #[test]
    fn robin_kernel_matches_integral_form() {
        for &t in &[0.3, 1.0, 2.5] {
            for &x in &[0.0, 0.9, 3.0] {
                for &xi in &[0.0, 1.2, 4.0] {
                    let a = robin_drift_kernel(t, x, xi, 1.3, 0.7).unwrap();
                    let b =
                        robin_drift_kernel_integral_form(t, x, xi, 1.3, 0.7, 1e-12).unwrap();
                    assert!(
                        (a - b).abs() < 1e-10,
                        "t={t} x={x} xi={xi}: closed {a} vs integral {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn robin_kernel_neumann_limit() {
        // c -> 0+: the drift and wall terms vanish, e^{c xi/d} -> 1.
        for &(x, xi) in &[(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)] {
            let a = robin_drift_kernel(1.0, x, xi, 1e-6, 1.0).unwrap();
            let b = neumann_kernel(1.0, x, xi, 1.0).unwrap();
            assert!((a - b).abs() < 1e-6, "x={x} xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn robin_kernel_unit_mass() {
        let cases: &[(f64, f64, f64, f64)] = &[
            (0.5, 0.0, 1.0, 1.0),
            (2.0, 1.5, 1.0, 1.0),
            (0.7, 1.3, 1.4, 0.6),
            (1.0, 0.3, 0.5, 2.0),
        ];
        for &(t, xi, c, d) in cases {
            let hi = c * t + xi + 16.0 * (d * t).sqrt() + 45.0 * d / c;
            let m = quadrature::integrate(
                |x| robin_kernel_unchecked(t, x, xi, c, d),
                0.0,
                hi,
                1e-10,
            )
            .value;
            assert!((m - 1.0).abs() < 1e-8, "mass {m} at t={t} xi={xi} c={c} d={d}");
        }
    }

    #[test]
    fn robin_kernel_wall_flux_balance() {
        // d dH/dx + c H = 0 at x = 0; centered difference with Richardson.
        let cases: &[(f64, f64, f64, f64)] = &[(0.4, 0.8, 1.0, 1.0), (1.5, 0.0, 2.0, 0.5), (0.9, 2.2, 0.7, 1.3)];
        for &(t, xi, c, d) in cases {
            let f = |x: f64| robin_kernel_unchecked(t, x, xi, c, d);
            let h = 1e-4 * (d * t).sqrt().max(0.3);
            let d1 = (f(h) - f(-h)) / (2.0 * h);
            let d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
            let deriv = (4.0 * d2 - d1) / 3.0;
            let res = d * deriv + c * f(0.0);
            let scale = (d * deriv).abs().max((c * f(0.0)).abs());
            assert!(res.abs() / scale < 1e-6, "residual {res} scale {scale}");
        }
    }

    #[test]
    fn robin_kernel_semigroup() {
        let (c, d): (f64, f64) = (1.0, 1.0);
        let cases: &[(f64, f64, f64, f64)] = &[(0.3, 0.7, 0.3, 0.0), (1.0, 1.0, 1.5, 0.8)];
        for &(s, t, x, xi) in cases {
            let hi = c * (s + t) + x + xi + 16.0 * (d * (s + t)).sqrt() + 45.0 * d / c;
            let conv = quadrature::integrate(
                |eta| robin_kernel_unchecked(s, x, eta, c, d) * robin_kernel_unchecked(t, eta, xi, c, d),
                0.0,
                hi,
                1e-9,
            )
            .value;
            let direct = robin_kernel_unchecked(s + t, x, xi, c, d);
            assert!(
                (conv - direct).abs() < 1e-6,
                "semigroup: {conv} vs {direct}"
            );
        }
    }

    #[test]
    fn indicator_data() {
        let v0 = CompactInitialData::indicator(0.0, 1.0, 1.0).unwrap();
        assert_eq!(v0.eval(0.5), 1.0);
        assert_eq!(v0.eval(1.0), 1.0); // closed interval
        assert_eq!(v0.eval(1.5), 0.0);
        assert!((v0.mass() - 1.0).abs() < 1e-15);
        assert!((v0.integral(0.25, 2.0) - 0.75).abs() < 1e-15);
        assert!(CompactInitialData::indicator(1.0, 1.0, 1.0).is_err());
        assert!(CompactInitialData::indicator(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_bump_mass_is_exact() {
        let v0 = CompactInitialData::gaussian_bump(2.0, 0.3, 1.7).unwrap();
        let m = quadrature::integrate(|x| v0.eval(x), 0.0, v0.support(), 1e-12).value;
        assert!((m - 1.7).abs() < 1e-10, "mass {m}");
        assert!((v0.mass() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn table_data_round_trip() {
        let v0 =
            CompactInitialData::from_table(vec![(0.0, 1.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        assert!((v0.eval(0.5) - 1.5).abs() < 1e-15);
        assert!((v0.mass() - (1.5 + 2.0)).abs() < 1e-15);
        assert!((v0.integral(0.0, 3.0) - v0.mass()).abs() < 1e-15);
        assert!(CompactInitialData::from_table(vec![(0.0, 1.0), (1.0, -0.5)]).is_err());
    }

    #[test]
    fn from_fn_rejects_negative_values() {
        let r = CompactInitialData::from_fn(|x| 1.0 - x, 2.0);
        assert!(matches!(r, Err(CoreError::NegativeDensity(_))));
    }

    #[test]
    fn extension_examples() {
        let v0 = CompactInitialData::indicator(0.0, 1.0, 1.0).unwrap();
        let ext = extend_initial_data(&v0, 1.0, 1.0).unwrap();
        // identity on the half-line
        assert_eq!(ext.eval(0.7), 1.0);
        assert_eq!(ext.eval(4.0), 0.0);
        // hand value at x = -2: e^2 (0 + 1*1) = e^2
        let want = 7.38905609893065;
        assert!((ext.eval(-2.0) - want).abs() < 1e-12 * want);
        // continuity at the wall
        let eps = 1e-12;
        assert!((ext.eval(-eps) - ext.eval(0.0)).abs() < 1e-9);
        assert_eq!(ext.eval(0.0), v0.eval(0.0));
    }

    #[test]
    fn exact_solution_preserves_stationary_profile() {
        // v0 = truncated-and-renormalized stationary exponential; the flow
        // must hold it fixed up to quadrature + truncation error.
        let (c, d): (f64, f64) = (1.0, 1.0);
        let r = 40.0 * d / c;
        let kappa = 1.0 / (1.0 - (-c * r / d).exp());
        let v0 =
            CompactInitialData::from_fn(move |x| kappa * c / d * (-c * x / d).exp(), r).unwrap();
        for &t in &[1.0, 5.0] {
            for &x in &[0.0, 0.5, 1.7, 3.0] {
                let sol = exact_solution_linear(&v0, t, x, c, d).unwrap();
                let v = c / d * (-c * x / d).exp();
                assert!((sol - v).abs() < 1e-7, "t={t} x={x}: {sol} vs {v}");
            }
        }
    }

    #[test]
    fn exact_solution_conserves_mass() {
        let v0 = CompactInitialData::indicator(0.0, 1.0, 1.0).unwrap();
        let (c, d): (f64, f64) = (1.0, 1.0);
        for &t in &[0.5, 2.0] {
            let hi = 1.0 + c * t + 16.0 * (d * t).sqrt() + 45.0 * d / c;
            let m = quadrature::integrate(
                |x| exact_solution_linear(&v0, t, x, c, d).unwrap(),
                0.0,
                hi,
                1e-8,
            )
            .value;
            assert!((m - 1.0).abs() < 1e-6, "t={t}: mass {m}");
        }
    }

    #[test]
    fn exact_solution_is_approximate_identity() {
        let v0 = CompactInitialData::gaussian_bump(2.0, 0.3, 1.0).unwrap();
        let (c, d): (f64, f64) = (1.0, 1.0);
        let t = 1e-4;
        let l1 = quadrature::integrate(
            |x| (exact_solution_linear(&v0, t, x, c, d).unwrap() - v0.eval(x)).abs(),
            0.0,
            6.0,
            1e-7,
        )
        .value;
        assert!(l1 < 0.05, "L1 distance {l1}");
    }

    #[test]
    fn exact_solution_nonnegative() {
        let v0 = CompactInitialData::indicator(0.5, 1.5, 2.0).unwrap();
        for &t in &[0.1, 1.0, 10.0] {
            for k in 0..30 {
                let x = k as f64 * 0.4;
                assert!(exact_solution_linear(&v0, t, x, 1.0, 1.0).unwrap() >= 0.0);
            }
        }
    }
}
