//! Entropy, Fisher information, distances, moments, functional-inequality
//! verdicts and convergence-rate fitting over solver or particle outputs.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - [`l1_distance_to_profile`] tabulates the reference by *exact cell
//!   averages* and adds the exact profile tail mass beyond the truncation
//!   length, so it measures the true half-line L1 distance between the
//!   piecewise-constant field and the profile. (Midpoint tabulation would
//!   introduce an `O(h^2)` mass-mismatch floor `~ M (a h / D)^2 / 24` that
//!   masks exponential convergence.)
//! - [`relative_entropy`] and [`fisher_information`] tabulate the reference
//!   at cell midpoints and rescale it to the field's discrete mass, which
//!   makes the discrete entropy a true Jensen form (nonnegative, zero iff
//!   equal) and the discrete Csiszar-Kullback inequality exact. A warning
//!   flag is raised when field and profile masses disagree beyond 1e-8
//!   relative.
//! - `0 log 0 = 0`; Fisher information masks cells below `1e-14 * max w`
//!   and reports how many were skipped.

use crate::error::{CoreError, Result};
use crate::fv_solver::{DensityField, Snapshot};
use crate::profiles::Profile;
use std::io::{self, Write};

/// Relative mass mismatch beyond which the entropy reference rescaling is
/// flagged.
const MASS_WARN_REL: f64 = 1e-8;
/// Fisher-information mask threshold relative to the field maximum.
const FISHER_MASK_REL: f64 = 1e-14;

/// Midpoint tabulation of the profile, rescaled to the field's discrete
/// mass. Returns `(values, pre_rescale_grid_mass)`.
fn midpoint_reference(field: &DensityField, profile: &Profile) -> (Vec<f64>, f64) {
    let g = field.grid();
    let mut vals: Vec<f64> = g.centers().map(|y| profile.eval_raw(y)).collect();
    let grid_mass = g.h() * vals.iter().sum::<f64>();
    let r = field.mass() / grid_mass;
    for v in &mut vals {
        *v *= r;
    }
    (vals, grid_mass)
}

/// `h * sum |w_i - avg_i(W)|` plus the exact profile tail mass beyond the
/// grid; the true L1 distance to the half-line profile.
pub fn l1_distance_to_profile(field: &DensityField, profile: &Profile) -> f64 {
    let g = field.grid();
    let h = g.h();
    let mut acc = 0.0;
    for (i, w) in field.values().iter().enumerate() {
        let avg = profile.integral(g.face(i), g.face(i + 1)) / h;
        acc += h * (w - avg).abs();
    }
    acc + profile.tail_mass(g.length())
}

/// L1 distance between two fields on the same grid.
pub fn l1_distance_fields(a: &DensityField, b: &DensityField) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(CoreError::GridMismatch(
            "fields live on different grids".into(),
        ));
    }
    Ok(a.grid().h()
        * a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

#[derive(Debug, Clone, Copy)]
pub struct EntropyResult {
    pub value: f64,
    /// Relative mismatch between field mass and profile mass.
    pub mass_mismatch: f64,
    /// Set when the mismatch exceeded 1e-8 and the reference rescaling is
    /// doing real work.
    pub renormalized_warning: bool,
}

/// Boltzmann relative entropy `h * sum w_i log(w_i / W_i)` against the
/// mass-matched midpoint tabulation; nonnegative up to rounding, zero iff
/// the field equals the tabulation.
pub fn relative_entropy(field: &DensityField, profile: &Profile) -> Result<EntropyResult> {
    if let Some(bad) = field.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(CoreError::NegativeDensity(format!("cell average {bad}")));
    }
    let (reference, _) = midpoint_reference(field, profile);
    let h = field.grid().h();
    let mut acc = 0.0;
    for (w, r) in field.values().iter().zip(&reference) {
        if *w > 0.0 {
            acc += w * (w / r).ln();
        }
    }
    let mass_mismatch = (field.mass() - profile.mass()).abs() / profile.mass();
    Ok(EntropyResult {
        value: h * acc,
        mass_mismatch,
        renormalized_warning: mass_mismatch > MASS_WARN_REL,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FisherResult {
    pub value: f64,
    /// Cells that did not contribute (below the mask or with an incomplete
    /// difference stencil).
    pub masked_cells: usize,
}

/// Discrete Fisher information `h * sum w_i (D_i log(w/W))^2` with centered
/// differences of the log-ratio (one-sided at the ends).
pub fn fisher_information(field: &DensityField, profile: &Profile) -> Result<FisherResult> {
    if let Some(bad) = field.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(CoreError::NegativeDensity(format!("cell average {bad}")));
    }
    let (reference, _) = midpoint_reference(field, profile);
    let w = field.values();
    let n = w.len();
    let h = field.grid().h();
    let wmax = w.iter().copied().fold(0.0, f64::max);
    let floor = FISHER_MASK_REL * wmax;
    let log_ratio: Vec<Option<f64>> = w
        .iter()
        .zip(&reference)
        .map(|(wi, ri)| {
            if *wi > floor && *ri > 0.0 {
                Some((wi / ri).ln())
            } else {
                None
            }
        })
        .collect();
    let mut acc = 0.0;
    let mut masked = 0usize;
    for i in 0..n {
        let grad = match (
            i.checked_sub(1).and_then(|j| log_ratio[j]),
            log_ratio[i],
            log_ratio.get(i + 1).copied().flatten(),
        ) {
            (Some(lm), Some(_), Some(lp)) => Some((lp - lm) / (2.0 * h)),
            (None, Some(l0), Some(lp)) if i == 0 => Some((lp - l0) / h),
            (Some(lm), Some(l0), None) if i + 1 == n => Some((l0 - lm) / h),
            _ => None,
        };
        match grad {
            Some(gv) => acc += w[i] * gv * gv,
            None => masked += 1,
        }
    }
    Ok(FisherResult {
        value: h * acc,
        masked_cells: masked,
    })
}

/// Outcome of a functional-inequality check `lhs <= rhs`.
#[derive(Debug, Clone, Copy)]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; the check passes when `slack >= -tol` with
    /// `tol = 1e-8 * max(|lhs|, |rhs|, 1)`.
    pub slack: f64,
    pub pass: bool,
}

impl InequalityVerdict {
    fn new(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        let tol = 1e-8 * lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            lhs,
            rhs,
            slack,
            pass: slack >= -tol,
        }
    }
}

/// Entropy--Fisher (log-Sobolev) verdict `H <= I/(2 rho)`; requires a
/// uniformly convex reference potential, i.e. the Gaussian-type profiles,
/// for which `rho = 1/(2d)` and the bound reads `H <= d I`.
pub fn check_log_sobolev(
    field: &DensityField,
    profile: &Profile,
    rho: f64,
) -> Result<InequalityVerdict> {
    if profile.log_convexity().is_none() {
        return Err(CoreError::WrongRegime {
            required: "a uniformly convex reference potential (beta <= 1/2)",
            beta: profile.boundary().beta(),
        });
    }
    if !(rho > 0.0) {
        return Err(CoreError::invalid("rho", format!("must be > 0, got {rho}")));
    }
    let h = relative_entropy(field, profile)?.value;
    let i = fisher_information(field, profile)?.value;
    Ok(InequalityVerdict::new(h, i / (2.0 * rho)))
}

/// Csiszar-Kullback verdict `|w - W|_1^2 <= 2 M H(w|W)` for equal-mass
/// densities; both sides use the mass-matched midpoint tabulation, for which
/// the discrete inequality is a theorem.
pub fn check_csiszar_kullback(
    field: &DensityField,
    profile: &Profile,
) -> Result<InequalityVerdict> {
    let mismatch = (field.mass() - profile.mass()).abs() / profile.mass();
    if mismatch > MASS_WARN_REL {
        return Err(CoreError::MassMismatch {
            field: field.mass(),
            reference: profile.mass(),
        });
    }
    let (reference, _) = midpoint_reference(field, profile);
    let h = field.grid().h();
    let l1: f64 = h * field
        .values()
        .iter()
        .zip(&reference)
        .map(|(w, r)| (w - r).abs())
        .sum::<f64>();
    let ent = relative_entropy(field, profile)?.value;
    Ok(InequalityVerdict::new(
        l1 * l1,
        2.0 * field.mass() * ent,
    ))
}

/// First moment `h * sum y_i w_i`.
pub fn first_moment(field: &DensityField) -> f64 {
    let g = field.grid();
    g.h() * field
        .values()
        .iter()
        .enumerate()
        .map(|(i, w)| g.center(i) * w)
        .sum::<f64>()
}

/// Wall value `w(0)` by quadratic extrapolation through the first three
/// cell midpoints (the zero-total-flux wall makes `w` genuinely curved
/// there, so the nearest cell average alone underestimates it).
pub fn boundary_value(field: &DensityField) -> f64 {
    let w = field.values();
    (15.0 * w[0] - 10.0 * w[1] + 3.0 * w[2]) / 8.0
}

/// Rate-law models for distance-vs-time data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    /// `dist = l (1+t)^p`
    Power,
    /// `dist = l log(1+t) (1+t)^p`
    PowerLog,
    /// `dist = l e^{-k t}`
    Exponential,
}

/// Least-squares fit of a rate law on the linearized model.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub model: RateModel,
    /// `p` for the power models (negative for decay); the decay constant
    /// `k > 0` for the exponential model.
    pub exponent: f64,
    pub prefactor: f64,
    /// True when the model carries the logarithmic correction.
    pub log_correction: bool,
    pub r_squared: f64,
    /// Time window actually used.
    pub window: (f64, f64),
    pub n_samples: usize,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Fit `model` to `(times, distances)`; needs >= 8 strictly positive
/// distances (and strictly positive times for the log-corrected model).
pub fn fit_rate(times: &[f64], distances: &[f64], model: RateModel) -> Result<RateFit> {
    if times.len() != distances.len() {
        return Err(CoreError::RateFit("times/distances length mismatch".into()));
    }
    if times.len() < 8 {
        return Err(CoreError::RateFit(format!(
            "need at least 8 samples, got {}",
            times.len()
        )));
    }
    if distances.iter().any(|d| !(*d > 0.0)) {
        return Err(CoreError::RateFit("distances must be strictly positive".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(CoreError::RateFit("times must be nonnegative".into()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = match model {
        RateModel::Power => (
            times.iter().map(|t| t.ln_1p()).collect(),
            distances.iter().map(|d| d.ln()).collect(),
        ),
        RateModel::PowerLog => {
            if times.iter().any(|t| !(*t > 0.0)) {
                return Err(CoreError::RateFit(
                    "the log-corrected model needs strictly positive times".into(),
                ));
            }
            (
                times.iter().map(|t| t.ln_1p()).collect(),
                times
                    .iter()
                    .zip(distances)
                    .map(|(t, d)| d.ln() - t.ln_1p().ln())
                    .collect(),
            )
        }
        RateModel::Exponential => (
            times.to_vec(),
            distances.iter().map(|d| d.ln()).collect(),
        ),
    };
    let (slope, intercept, r2) = linear_fit(&x, &y);
    let exponent = match model {
        RateModel::Exponential => -slope,
        _ => slope,
    };
    let (tmin, tmax) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });
    Ok(RateFit {
        model,
        exponent,
        prefactor: intercept.exp(),
        log_correction: model == RateModel::PowerLog,
        r_squared: r2,
        window: (tmin, tmax),
        n_samples: times.len(),
    })
}

/// Keep the samples inside the default fit window `[t_end/100, t_end]`
/// (skips early transients; the window is reported by the fit).
pub fn window_samples(times: &[f64], distances: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let t_end = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let t_min = t_end / 100.0;
    times
        .iter()
        .zip(distances)
        .filter(|(t, _)| **t >= t_min)
        .map(|(t, d)| (*t, *d))
        .unzip()
}

/// One diagnostics record per snapshot; `lsi_slack` is NaN where the
/// log-Sobolev check does not apply (non-convex reference potential).
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRow {
    pub tau: f64,
    pub t: f64,
    pub mass: f64,
    pub l1_to_profile: f64,
    pub entropy: f64,
    pub fisher: f64,
    pub first_moment: f64,
    pub boundary_value: f64,
    pub ck_slack: f64,
    pub lsi_slack: f64,
}

/// Full diagnostics for one snapshot against a reference profile.
pub fn diagnose_snapshot(snap: &Snapshot, profile: &Profile) -> Result<DiagnosticsRow> {
    let field = &snap.field;
    let entropy = relative_entropy(field, profile)?;
    let fisher = fisher_information(field, profile)?;
    let ck = check_csiszar_kullback(field, profile)?;
    let lsi_slack = match profile.log_convexity() {
        Some(rho) => check_log_sobolev(field, profile, rho)?.slack,
        None => f64::NAN,
    };
    Ok(DiagnosticsRow {
        tau: snap.tau,
        t: snap.t,
        mass: field.recompute_mass(),
        l1_to_profile: l1_distance_to_profile(field, profile),
        entropy: entropy.value,
        fisher: fisher.value,
        first_moment: first_moment(field),
        boundary_value: boundary_value(field),
        ck_slack: ck.slack,
        lsi_slack,
    })
}

/// Diagnostics CSV, one row per snapshot.
pub fn write_diagnostics_csv<W: Write>(rows: &[DiagnosticsRow], out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "tau,t,mass,l1_to_profile,entropy,fisher,first_moment,boundary_value,ck_slack,lsi_slack"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.tau,
            r.t,
            r.mass,
            r.l1_to_profile,
            r.entropy,
            r.fisher,
            r.first_moment,
            r.boundary_value,
            r.ck_slack,
            r.lsi_slack
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv_solver::Grid;

    fn profile(c: f64, beta: f64, d: f64, m: f64) -> Profile {
        Profile::new(c, beta, d, m).unwrap()
    }

    /// Field = exact cell averages of the profile.
    fn cell_average_field(p: &Profile, grid: Grid) -> DensityField {
        let h = grid.h();
        let vals: Vec<f64> = (0..grid.n())
            .map(|i| p.integral(grid.face(i), grid.face(i + 1)) / h)
            .collect();
        DensityField::from_values(grid, vals).unwrap()
    }

    /// Field = midpoint tabulation of the profile.
    fn midpoint_field(p: &Profile, grid: Grid) -> DensityField {
        let vals: Vec<f64> = grid.centers().map(|y| p.eval_raw(y)).collect();
        DensityField::from_values(grid, vals).unwrap()
    }

    /// Midpoint tabulation rescaled to carry exactly the profile mass.
    fn midpoint_field_normalized(p: &Profile, grid: Grid) -> DensityField {
        let f = midpoint_field(p, grid);
        let r = p.mass() / f.mass();
        let vals: Vec<f64> = f.values().iter().map(|v| v * r).collect();
        DensityField::from_values(grid, vals).unwrap()
    }

    fn uniform_on_unit(grid: Grid) -> DensityField {
        let h = grid.h();
        let vals: Vec<f64> = (0..grid.n())
            .map(|i| {
                let (a, b) = (grid.face(i), grid.face(i + 1));
                ((b.min(1.0) - a.min(1.0)).max(0.0)) / h
            })
            .collect();
        DensityField::from_values(grid, vals).unwrap()
    }

    #[test]
    fn l1_of_own_tabulation_is_zero() {
        let p = profile(1.0, 0.0, 1.0, 1.0);
        let grid = Grid::new(512, 40.0).unwrap();
        let f = cell_average_field(&p, grid);
        assert!(l1_distance_to_profile(&f, &p) < 1e-14);
    }

    #[test]
    fn l1_uniform_vs_unit_exponential_is_two_over_e() {
        // closed form: int_0^1 (1 - e^{-y}) + int_1^inf e^{-y} = 2/e
        let p = profile(1.0, 1.0, 1.0, 1.0);
        let grid = Grid::new(2000, 20.0).unwrap();
        let f = uniform_on_unit(grid);
        let got = l1_distance_to_profile(&f, &p);
        let want = 0.7357588823428846;
        assert!((got - want).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn l1_fields_triangle_inequality() {
        let grid = Grid::new(64, 8.0).unwrap();
        let mk = |seed: u64| {
            let vals: Vec<f64> = (0..64)
                .map(|i| ((i as f64 * 0.61 + seed as f64).sin().abs()) + 0.05)
                .collect();
            DensityField::from_values(grid, vals).unwrap()
        };
        let (a, b, c) = (mk(1), mk(2), mk(3));
        let ab = l1_distance_fields(&a, &b).unwrap();
        let bc = l1_distance_fields(&b, &c).unwrap();
        let ac = l1_distance_fields(&a, &c).unwrap();
        assert!(ac <= ab + bc + 1e-14);
        let other = Grid::new(32, 8.0).unwrap();
        let small = DensityField::from_values(other, vec![1.0; 32]).unwrap();
        assert!(l1_distance_fields(&a, &small).is_err());
    }

    #[test]
    fn entropy_of_own_tabulation_is_zero() {
        let p = profile(2.0, 0.5, 1.0, 1.0);
        let grid = Grid::new(1024, 40.0).unwrap();
        let f = midpoint_field(&p, grid);
        let e = relative_entropy(&f, &p).unwrap();
        assert!(e.value.abs() < 1e-10, "entropy {}", e.value);
    }

    #[test]
    fn entropy_uniform_vs_unit_exponential() {
        // continuum value: int_0^1 1 * log(1/e^{-y}) dy = 1/2; the discrete
        // mass-matching shifts it by ~4e-6 on this grid.
        let p = profile(1.0, 1.0, 1.0, 1.0);
        let grid = Grid::new(2000, 20.0).unwrap();
        let f = uniform_on_unit(grid);
        let e = relative_entropy(&f, &p).unwrap();
        assert!((e.value - 0.5).abs() < 1e-5, "entropy {}", e.value);
        assert!(e.value >= 0.0);
    }

    #[test]
    fn entropy_is_nonnegative_for_perturbed_fields() {
        let p = profile(1.0, 0.5, 1.0, 1.0);
        let grid = Grid::new(512, 40.0).unwrap();
        let base = midpoint_field(&p, grid);
        for phase in 0..5 {
            let vals: Vec<f64> = base
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * (1.0 + 0.4 * ((i as f64 * 0.13 + phase as f64).sin())))
                .collect();
            let f = DensityField::from_values(grid, vals).unwrap();
            let e = relative_entropy(&f, &p).unwrap();
            assert!(e.value >= -1e-10, "entropy {}", e.value);
        }
    }

    #[test]
    fn fisher_of_own_tabulation_is_zero() {
        let p = profile(1.0, 0.0, 1.0, 1.0);
        let grid = Grid::new(512, 40.0).unwrap();
        let f = midpoint_field(&p, grid);
        let fi = fisher_information(&f, &p).unwrap();
        assert!(fi.value.abs() < 1e-8, "fisher {}", fi.value);
    }

    #[test]
    fn fisher_masks_compact_data() {
        let p = profile(1.0, 0.0, 1.0, 1.0);
        let grid = Grid::new(512, 40.0).unwrap();
        let f = uniform_on_unit(grid);
        let fi = fisher_information(&f, &p).unwrap();
        assert!(fi.masked_cells > 400, "masked {}", fi.masked_cells);
        assert!(fi.value.is_finite());
    }

    #[test]
    fn log_sobolev_verdicts() {
        let p = profile(1.0, 0.5, 1.0, 1.0);
        let rho = p.log_convexity().unwrap();
        let grid = Grid::new(1024, 40.0).unwrap();
        let f = midpoint_field(&p, grid);
        let v = check_log_sobolev(&f, &p, rho).unwrap();
        assert!(v.pass);
        // a smooth perturbation still satisfies H <= d I
        let vals: Vec<f64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v * (1.0 + 0.3 * (grid.center(i) * 0.7).sin()))
            .collect();
        let f2 = DensityField::from_values(grid, vals).unwrap();
        let v2 = check_log_sobolev(&f2, &p, rho).unwrap();
        assert!(v2.pass, "slack {}", v2.slack);
        // rejected for the exponential shapes
        let sup = profile(1.0, 0.75, 1.0, 1.0);
        assert!(check_log_sobolev(&f, &sup, rho).is_err());
    }

    #[test]
    fn csiszar_kullback_verdicts() {
        let p = profile(1.0, 1.0, 1.0, 1.0);
        let grid = Grid::new(2000, 20.0).unwrap();
        let f = uniform_on_unit(grid);
        let v = check_csiszar_kullback(&f, &p).unwrap();
        // lhs ~ (2/e)^2 = 0.5414, rhs ~ 2 * 1 * 1/2 = 1
        assert!(v.pass);
        assert!((v.lhs - 0.5414).abs() < 1e-2);
        assert!((v.rhs - 1.0).abs() < 1e-3);
        // equal-mass requirement
        let heavy = profile(1.0, 1.0, 1.0, 2.0);
        assert!(matches!(
            check_csiszar_kullback(&f, &heavy),
            Err(CoreError::MassMismatch { .. })
        ));
        // identical inputs: 0 <= 0
        let tab = midpoint_field_normalized(&p, grid);
        let v0 = check_csiszar_kullback(&tab, &p).unwrap();
        assert!(v0.pass && v0.lhs.abs() < 1e-12);
    }

    #[test]
    fn first_moment_of_exponential_profile() {
        // mean of the rate-k exponential is M/k = M d/(c beta)
        let p = profile(1.0, 0.75, 1.0, 1.3);
        let grid = Grid::new(16384, 30.0).unwrap();
        let f = midpoint_field(&p, grid);
        let want = 1.3 * 1.0 / 0.75;
        let got = first_moment(&f) * 1.3 / f.mass(); // normalize tab mass to M
        assert!((got - want).abs() < 1e-6, "moment {got} want {want}");
    }

    #[test]
    fn boundary_value_extrapolates_wall_density() {
        let p = profile(1.0, 1.0, 1.0, 1.0);
        let grid = Grid::new(4096, 40.0).unwrap();
        let f = midpoint_field(&p, grid);
        let got = boundary_value(&f);
        assert!(
            (got - p.w0()).abs() < 1e-4 * p.w0(),
            "wall value {got} vs {}",
            p.w0()
        );
    }

    #[test]
    fn rate_fit_synthetic_power() {
        let times: Vec<f64> = (0..12).map(|k| 2.0f64.powi(k)).collect();
        let dists: Vec<f64> = times.iter().map(|t| 5.0 / (1.0 + t).sqrt()).collect();
        let fit = fit_rate(&times, &dists, RateModel::Power).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-12);
        assert!((fit.prefactor - 5.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_fit_synthetic_exponential() {
        let times: Vec<f64> = (1..=10).map(|k| k as f64 * 0.7).collect();
        let dists: Vec<f64> = times.iter().map(|t| 2.0 * (-3.0 * t).exp()).collect();
        let fit = fit_rate(&times, &dists, RateModel::Exponential).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-12);
        assert!((fit.prefactor - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rate_fit_synthetic_power_log() {
        let times: Vec<f64> = (1..=10).map(|k| 3.0f64.powi(k)).collect();
        let dists: Vec<f64> = times
            .iter()
            .map(|t| (1.0 + t).ln() / (1.0 + t).powf(0.25))
            .collect();
        let fit = fit_rate(&times, &dists, RateModel::PowerLog).unwrap();
        assert!((fit.exponent + 0.25).abs() < 1e-10);
        assert!(fit.log_correction);
    }

    #[test]
    fn rate_fit_rejections() {
        let t: Vec<f64> = (0..7).map(|k| k as f64 + 1.0).collect();
        let d = vec![1.0; 7];
        assert!(fit_rate(&t, &d, RateModel::Power).is_err()); // too few
        let t8: Vec<f64> = (0..8).map(|k| k as f64 + 1.0).collect();
        let mut d8 = vec![1.0; 8];
        d8[3] = 0.0;
        assert!(fit_rate(&t8, &d8, RateModel::Power).is_err()); // nonpositive
    }

    #[test]
    fn window_skips_transient() {
        let times: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let dists = vec![1.0; 101];
        let (t, _) = window_samples(&times, &dists);
        assert_eq!(t.first().copied(), Some(1.0));
        assert_eq!(t.last().copied(), Some(100.0));
    }
}
