//! Confluence `x = z/α`, `α → ∞` along `arg α = ±π/2`: rescaled Gauss data
//! converge to Kummer data.
//!
//! Powers use `α^μ = exp(μ(ln|α| + i arg α))` and
//! `(−α)^μ = exp(μ(ln|α| + i(arg α + π)))`. Rescaled matrices are assembled
//! entrywise in log form, since individual factors overflow for `|α| ≳ 300`.

use crate::batch::{par_map, Exec};
use crate::closed_form_monodromy::{gauss_connection_log, kummer_connection, kummer_monodromy, kummer_stokes, Connection, LogMat2};
use crate::local_frames::{gauss_frame, kummer_frame_zero, BranchedComplex, DomainKind, DomainSpec};
use crate::ode_systems::SingularityLabel;
use crate::scalar_special::pochhammer;
use crate::{c, Error, Mat2, Params, Result, C64};
use std::f64::consts::PI;

/// Diagonal scaling matrices of the confluence limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingKind {
    /// `diag((−α)^{β−γ}, −(−α)^{−β})`
    DInfMinus,
    /// `diag(α^{γ−β}, −α^{β})`, a left factor
    D1,
    /// `diag(α^{γ−1}, 1)`
    D0,
    /// `diag((−α)^{γ−β}, −(−α)^{β})`, the inverse of `DInfMinus`
    DInfLeft,
}

fn ln_alpha(alpha: &BranchedComplex) -> C64 {
    alpha.ln()
}

fn ln_minus_alpha(alpha: &BranchedComplex) -> C64 {
    alpha.ln() + c(0.0, PI)
}

/// Logarithms of the diagonal entries.
pub fn scaling_log(kind: ScalingKind, alpha: &BranchedComplex, p: &Params) -> [C64; 2] {
    let (b, g) = (p.beta, p.gamma_);
    let ipi = c(0.0, PI);
    let (la, lm) = (ln_alpha(alpha), ln_minus_alpha(alpha));
    match kind {
        ScalingKind::DInfMinus => [(b - g) * lm, ipi - b * lm],
        ScalingKind::D1 => [(g - b) * la, ipi + b * la],
        ScalingKind::D0 => [(g - 1.0) * la, c(0.0, 0.0)],
        ScalingKind::DInfLeft => [(g - b) * lm, ipi + b * lm],
    }
}

pub fn scaling(kind: ScalingKind, alpha: &BranchedComplex, p: &Params) -> Mat2 {
    let [l0, l1] = scaling_log(kind, alpha, p);
    Mat2::diag(l0.exp(), l1.exp())
}

/// The five limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    /// `D1 C^{1∞} DInfMinus → S̃0` along `arg α = +π/2`
    S0Limit,
    /// `D1 C^{1∞} DInfMinus → S̃−1` along `arg α = −π/2`
    Sm1Limit,
    /// `D0 C^{0∞} DInfMinus → C̃^{0∞}` along `arg α = −π/2`
    C0InfLimit,
    /// `DInfLeft M0 DInfMinus → M̃0` along `arg α = −π/2`
    M0Limit,
    /// `DInfLeft M∞ M1 DInfMinus → M̃∞` along `arg α = −π/2`
    MInfLimit,
}

impl LimitKind {
    pub const ALL: [LimitKind; 5] = [LimitKind::S0Limit, LimitKind::Sm1Limit, LimitKind::C0InfLimit, LimitKind::M0Limit, LimitKind::MInfLimit];

    /// The ray along which the limit is taken.
    pub fn arg_alpha(self) -> f64 {
        match self {
            LimitKind::S0Limit => 0.5 * PI,
            _ => -0.5 * PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LimitKind::S0Limit => "S0",
            LimitKind::Sm1Limit => "Sm1",
            LimitKind::C0InfLimit => "C0Inf",
            LimitKind::M0Limit => "M0",
            LimitKind::MInfLimit => "MInf",
        }
    }

    /// Kummer-side limit value.
    pub fn target(self, p: &Params) -> Result<Mat2> {
        let (s0, sm1) = kummer_stokes(p);
        Ok(match self {
            LimitKind::S0Limit => s0,
            LimitKind::Sm1Limit => sm1,
            LimitKind::C0InfLimit => kummer_connection(p)?,
            LimitKind::M0Limit => kummer_monodromy(p)?.m0t,
            LimitKind::MInfLimit => kummer_monodromy(p)?.m_inf(),
        })
    }
}

impl std::str::FromStr for LimitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LimitKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown limit '{s}' (expected S0, Sm1, C0Inf, M0 or MInf)")))
    }
}

fn check_ray(alpha: &BranchedComplex) -> Result<()> {
    let a = alpha.arg_choice;
    if (a - 0.5 * PI).abs() > 1e-12 && (a + 0.5 * PI).abs() > 1e-12 {
        return Err(Error::Domain(format!("arg alpha must be ±π/2, got {a}")));
    }
    Ok(())
}

/// `D1 C^{1∞} DInfMinus` or `D0 C^{0∞} DInfMinus` in log form.
fn scaled_log(which: LimitKind, alpha: &BranchedComplex, base: &Params) -> Result<LogMat2> {
    let p = base.with_alpha(alpha.value);
    let right = scaling_log(ScalingKind::DInfMinus, alpha, &p);
    let (conn, left) = match which {
        LimitKind::C0InfLimit => (Connection::C0Inf, ScalingKind::D0),
        _ => (Connection::C1Inf, ScalingKind::D1),
    };
    Ok(gauss_connection_log(conn, &p)?.scaled(scaling_log(left, alpha, &p), right))
}

/// The finite-α rescaled connection matrix of `S0Limit`, `Sm1Limit` or `C0InfLimit`.
/// The ray is not enforced here, so the same product can be evaluated on both rays.
pub fn scaled_connection(which: LimitKind, alpha: &BranchedComplex, base: &Params) -> Result<Mat2> {
    check_ray(alpha)?;
    match which {
        LimitKind::S0Limit | LimitKind::Sm1Limit | LimitKind::C0InfLimit => Ok(scaled_log(which, alpha, base)?.exp()),
        _ => Err(Error::Domain("not a connection limit".into())),
    }
}

/// The finite-α rescaled monodromy of `M0Limit` or `MInfLimit`.
///
/// With `X = D0 C^{0∞} DInfMinus` and `Y = D1 C^{1∞} DInfMinus`, the products are
/// `X⁻¹ e^{2πiΘ0} X` and `e^{2πiΘ∞} Y⁻¹ e^{2πiΘ1} Y`. The second is expanded so that
/// each term is one exponential of a sum of logs: `e^{2πiα}` alone overflows.
pub fn scaled_monodromy(which: LimitKind, alpha: &BranchedComplex, base: &Params) -> Result<Mat2> {
    check_ray(alpha)?;
    let p = base.with_alpha(alpha.value);
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let tpi = c(0.0, 2.0 * PI);
    match which {
        LimitKind::M0Limit => {
            let x = scaled_log(LimitKind::C0InfLimit, alpha, base)?.exp();
            let e0 = Mat2::diag((tpi * (1.0 - g)).exp(), c(1.0, 0.0));
            let inv = x.inverse().ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
            Ok(inv * e0 * x)
        }
        LimitKind::MInfLimit => {
            let ly = scaled_log(LimitKind::Sm1Limit, alpha, base)?.0;
            let e = |z: C64| z.exp();
            let det = e(ly[0][0] + ly[1][1]) - e(ly[0][1] + ly[1][0]);
            let mut m = Mat2::ZERO;
            for j in 0..2 {
                m[(0, j)] = (e(tpi * (g - b) + ly[1][1] + ly[0][j]) - e(tpi * a + ly[0][1] + ly[1][j])) / det;
                m[(1, j)] = (tpi * b).exp() * (e(ly[0][0] + ly[1][j]) - e(tpi * (g - a - b) + ly[1][0] + ly[0][j])) / det;
            }
            Ok(m)
        }
        _ => Err(Error::Domain("not a monodromy limit".into())),
    }
}

/// Finite-α value for any limit kind.
pub fn limit_value(which: LimitKind, alpha: &BranchedComplex, base: &Params) -> Result<Mat2> {
    match which {
        LimitKind::M0Limit | LimitKind::MInfLimit => scaled_monodromy(which, alpha, base),
        _ => scaled_connection(which, alpha, base),
    }
}

/// Magnitudes swept along a fixed ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySweep {
    pub arg_alpha: f64,
    pub magnitudes: Vec<f64>,
    pub params_base: Params,
}

/// `10^2, 10^2.5, 10^3, 10^3.5, 10^4, 10^5`.
pub fn default_magnitudes() -> Vec<f64> {
    [2.0, 2.5, 3.0, 3.5, 4.0, 5.0].iter().map(|e| 10f64.powf(*e)).collect()
}

impl RaySweep {
    pub fn new(arg_alpha: f64, magnitudes: Vec<f64>, params_base: Params) -> Result<Self> {
        let s = RaySweep { arg_alpha, magnitudes, params_base };
        s.validate()?;
        Ok(s)
    }

    /// Default sweep along the ray belonging to `which`.
    pub fn default_for(which: LimitKind, params_base: Params) -> Self {
        RaySweep { arg_alpha: which.arg_alpha(), magnitudes: default_magnitudes(), params_base }
    }

    fn validate(&self) -> Result<()> {
        if self.magnitudes.iter().any(|m| m.is_nan() || *m <= 0.0) {
            return Err(Error::Domain("magnitudes must be positive".into()));
        }
        if self.magnitudes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("magnitudes must be strictly increasing".into()));
        }
        if (self.arg_alpha.abs() - 0.5 * PI).abs() > 1e-12 {
            return Err(Error::Domain("sweeps run along arg alpha = ±π/2".into()));
        }
        Ok(())
    }

    pub fn alpha(&self, magnitude: f64) -> BranchedComplex {
        BranchedComplex::polar(magnitude, self.arg_alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub target: Mat2,
    /// `(|α|, ‖value − target‖_F)` pairs.
    pub per_magnitude_errors: Vec<(f64, f64)>,
    /// Least-squares slope of `log err` against `log |α|`.
    pub fitted_rate: f64,
    /// Root-mean-square residual of that fit, in decades.
    pub fit_residual: f64,
}

impl LimitReport {
    pub fn is_monotone(&self) -> bool {
        self.per_magnitude_errors.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn terminal_error(&self) -> f64 {
        self.per_magnitude_errors.last().map(|e| e.1).unwrap_or(f64::NAN)
    }
}

/// Least-squares line through `(log10 x, log10 y)`: `(slope, rms residual)`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::FitDegenerate("need at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && y.is_finite())) {
        return Err(Error::FitDegenerate("errors must be positive and finite".into()));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.log10(), y.log10())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitDegenerate("all magnitudes coincide".into()));
    }
    let slope = sxy / sxx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Ok((slope, rms))
}

/// Errors against `target` over the sweep, with a fitted convergence rate.
pub fn limit_sweep(which: LimitKind, sweep: &RaySweep, target: &Mat2) -> Result<LimitReport> {
    limit_sweep_with(Exec::best(), which, sweep, target)
}

pub fn limit_sweep_with(exec: Exec, which: LimitKind, sweep: &RaySweep, target: &Mat2) -> Result<LimitReport> {
    sweep.validate()?;
    let (lo, hi) = (sweep.magnitudes.first(), sweep.magnitudes.last());
    match (lo, hi) {
        (Some(lo), Some(hi)) if sweep.magnitudes.len() >= 4 && hi / lo >= 999.0 => {}
        _ => return Err(Error::FitDegenerate("a sweep needs at least 4 magnitudes over 3 decades".into())),
    }
    let vals = par_map(exec, &sweep.magnitudes, |&m| limit_value(which, &sweep.alpha(m), &sweep.params_base));
    let mut errs = Vec::with_capacity(vals.len());
    for (m, v) in sweep.magnitudes.iter().zip(vals) {
        errs.push((*m, (v? - *target).norm_fro()));
    }
    let (fitted_rate, fit_residual) = loglog_fit(&errs)?;
    Ok(LimitReport { target: *target, per_magnitude_errors: errs, fitted_rate, fit_residual })
}

/// Point at which the scalar solutions are normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationAt {
    One,
    Infinity,
}

/// `k·n − 1` for the normalisation pairs, with `k` the canonical diagonal entry
/// of the scaling matrices (`K∞ = DInfMinus`, `K1 = D1⁻¹`): e.g. `k_{1,∞}(−α)^{γ−β} − 1`.
/// Each power is evaluated on its own branch, so the residual is at rounding level.
pub fn scalar_normalization_residual(j: u8, at: NormalizationAt, alpha: &BranchedComplex, p: &Params) -> Result<C64> {
    check_ray(alpha)?;
    let (b, g) = (p.beta, p.gamma_);
    let (la, lm) = (ln_alpha(alpha), ln_minus_alpha(alpha));
    let (k, n) = match (j, at) {
        (1, NormalizationAt::Infinity) => (((b - g) * lm).exp(), ((g - b) * lm).exp()),
        (2, NormalizationAt::Infinity) => (-(-b * lm).exp(), -(b * lm).exp()),
        (1, NormalizationAt::One) => (((b - g) * la).exp(), ((g - b) * la).exp()),
        (2, NormalizationAt::One) => (-(-b * la).exp(), -(b * la).exp()),
        _ => return Err(Error::Domain(format!("j must be 1 or 2, got {j}"))),
    };
    Ok(k * n - 1.0)
}

/// Term ratios that drive the coefficient limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermRatio {
    /// `αⁿ / (α+1−β)ₙ − 1`
    Infinity,
    /// `(z−α)ⁿ / (α+β+1−γ)ₙ − (−1)ⁿ`
    One,
}

pub fn term_ratio_residual(kind: TermRatio, n: usize, alpha: C64, z: C64, p: &Params) -> C64 {
    let (b, g) = (p.beta, p.gamma_);
    match kind {
        TermRatio::Infinity => alpha.powu(n as u32) / pochhammer(alpha + 1.0 - b, n) - 1.0,
        TermRatio::One => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            (z - alpha).powu(n as u32) / pochhammer(alpha + b + 1.0 - g, n) - sign
        }
    }
}

/// `‖Y^{(0)}(z/α) α^{Θ0} − Ỹ^{(0)}(z)‖_F` for `z` in `ω0(α)`.
pub fn fuchsian_limit_check(z: &BranchedComplex, alpha: &BranchedComplex, base: &Params) -> Result<f64> {
    if z.norm() >= alpha.norm() {
        return Err(Error::Domain(format!("|z| = {} must be below |alpha| = {}", z.norm(), alpha.norm())));
    }
    let p = base.with_alpha(alpha.value);
    let x = z.div(alpha);
    let y0 = gauss_frame(SingularityLabel::Zero, &x, &p, 1e-15)?.matrix;
    let scale = Mat2::diag(alpha.powc(1.0 - p.gamma_), c(1.0, 0.0));
    let yt = kummer_frame_zero(z, &p, 1e-15)?.matrix;
    Ok((y0 * scale - yt).norm_fro())
}

/// Membership in `σ_α(α)`, `σ_∞(α)` or `𝒮̃_k`; `domain.alpha` is overridden by `alpha`.
pub fn sector_membership(domain: DomainSpec, z: &BranchedComplex, alpha: C64) -> bool {
    match domain.kind {
        DomainKind::SectorAlpha | DomainKind::SectorInf => DomainSpec { alpha: Some(alpha), ..domain }.contains(z),
        _ => domain.contains(z),
    }
}
