//! Local fundamental matrices with explicit argument bookkeeping.
//!
//! Every complex power `w^μ` is `exp(μ(ln|w| + i·arg))` with the argument
//! carried as data. Gauss frames take `x` with `arg x ∈ [−π, π)`; the local
//! variables `1−x` and `−x` use the same half-open principal window.

use crate::hyper_series::{f11, f20_truncated, f21, SeriesValue};
use crate::ode_systems::{residue_frame, Family, SingularityLabel};
use crate::scalar_special::pochhammer;
use crate::{c, Error, Mat2, Params, Result, C64};
use std::f64::consts::PI;

/// A complex number together with the argument that fixes its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedComplex {
    pub value: C64,
    pub arg_choice: f64,
}

/// Argument in the half-open window `[−π, π)`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a >= PI {
        a - 2.0 * PI
    } else {
        a
    }
}

impl BranchedComplex {
    /// Fails unless `|value|·e^{i·arg}` reproduces `value`.
    pub fn new(value: C64, arg_choice: f64) -> Result<Self> {
        let r = C64::from_polar(value.norm(), arg_choice);
        if (r - value).norm() > 1e-12 * value.norm().max(1e-300) {
            return Err(Error::Domain(format!("argument {arg_choice} does not match {value}")));
        }
        Ok(BranchedComplex { value, arg_choice })
    }

    pub fn polar(r: f64, arg: f64) -> Self {
        BranchedComplex { value: C64::from_polar(r, arg), arg_choice: arg }
    }

    pub fn principal(z: C64) -> Self {
        BranchedComplex { value: z, arg_choice: principal_arg(z) }
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    pub fn ln(&self) -> C64 {
        c(self.value.norm().ln(), self.arg_choice)
    }

    pub fn powc(&self, mu: C64) -> C64 {
        (mu * self.ln()).exp()
    }

    /// The point `value + dz` on the same sheet, reached along the segment.
    pub fn shifted(&self, dz: C64) -> Self {
        let v = self.value + dz;
        let darg = (v / self.value).arg();
        BranchedComplex { value: v, arg_choice: self.arg_choice + darg }
    }

    /// `self / w` with arguments subtracted.
    pub fn div(&self, w: &BranchedComplex) -> Self {
        BranchedComplex { value: self.value / w.value, arg_choice: self.arg_choice - w.arg_choice }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Omega0,
    Omega1,
    OmegaInf,
    OmegaHat1,
    OmegaHatInf,
    OmegaTilde0,
    /// Σ̃_k = {−π/2 < arg z − kπ < 3π/2}
    SigmaTilde,
    /// Closed-off sector 𝒮̃_k = {η − π/2 < arg z − kπ < 3π/2 − η}
    ScriptS,
    SectorAlpha,
    SectorInf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub k: i32,
    pub alpha: Option<C64>,
    pub eta: f64,
}

pub const DEFAULT_ETA: f64 = PI / 6.0;

impl DomainSpec {
    pub fn of(kind: DomainKind) -> Self {
        DomainSpec { kind, k: 0, alpha: None, eta: DEFAULT_ETA }
    }

    pub fn sheet(kind: DomainKind, k: i32) -> Self {
        DomainSpec { kind, k, alpha: None, eta: DEFAULT_ETA }
    }

    pub fn with_alpha(kind: DomainKind, alpha: C64) -> Self {
        DomainSpec { kind, k: 0, alpha: Some(alpha), eta: DEFAULT_ETA }
    }

    pub fn contains(&self, z: &BranchedComplex) -> bool {
        let (v, th) = (z.value, z.arg_choice);
        let in_window = |a: f64, lo: f64, hi: f64| a >= lo && a < hi;
        let open = |a: f64, lo: f64, hi: f64| a > lo && a < hi;
        let kpi = self.k as f64 * PI;
        let eta = self.eta;
        match self.kind {
            DomainKind::Omega0 => v.norm() < 1.0 && in_window(th, -PI, PI),
            DomainKind::Omega1 => (1.0 - v).norm() < 1.0,
            DomainKind::OmegaInf | DomainKind::OmegaHatInf => v.norm() > 1.0,
            DomainKind::OmegaHat1 => v.norm() > 0.0 && (1.0 - v.inv()).norm() < 1.0 && in_window(th, -PI, PI),
            DomainKind::OmegaTilde0 => v.norm() > 0.0 && in_window(th, -1.5 * PI, 0.5 * PI),
            DomainKind::SigmaTilde => v.norm() > 0.0 && open(th - kpi, -0.5 * PI, 1.5 * PI),
            DomainKind::ScriptS => v.norm() > 0.0 && open(th - kpi, eta - 0.5 * PI, 1.5 * PI - eta),
            DomainKind::SectorAlpha | DomainKind::SectorInf => {
                let Some(a) = self.alpha else { return false };
                if v.norm() == 0.0 {
                    return false;
                }
                let q = v / a;
                let arg_q = th - a.arg();
                let arg_one = principal_arg(1.0 - q);
                let ok_one = open(arg_one, eta - PI, PI - eta);
                if self.kind == DomainKind::SectorAlpha {
                    (1.0 - a / v).norm() < a.norm_sqr() && open(arg_q, eta - PI, PI - eta) && ok_one
                } else {
                    open(arg_q - PI, eta - PI, PI - eta) && ok_one
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameValue {
    pub matrix: Mat2,
    pub err_estimate: f64,
    /// Entrywise error estimates; `err_estimate` is their maximum.
    pub entry_err: [[f64; 2]; 2],
    pub domain: DomainSpec,
}

// Y = L · G · diag(m0, m1) with entrywise series errors propagated.
fn assemble(l: Mat2, g: [[SeriesValue; 2]; 2], scal: [[C64; 2]; 2], m: [C64; 2], domain: DomainSpec) -> FrameValue {
    let mut gm = Mat2::ZERO;
    let mut ge = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gm[(i, j)] = scal[i][j] * g[i][j].value;
            ge[i][j] = scal[i][j].norm() * g[i][j].err_estimate;
        }
    }
    let mat = l * gm * Mat2::diag(m[0], m[1]);
    let mut entry_err = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            entry_err[i][j] = (0..2).map(|k| l[(i, k)].norm() * ge[k][j]).sum::<f64>() * m[j].norm();
        }
    }
    let err_estimate = entry_err.iter().flatten().cloned().fold(0.0, f64::max);
    FrameValue { matrix: mat, err_estimate, entry_err, domain }
}

fn one() -> C64 {
    c(1.0, 0.0)
}

fn require(dom: DomainSpec, x: &BranchedComplex) -> Result<()> {
    if dom.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{} (arg {}) is outside {:?}", x.value, x.arg_choice, dom.kind)))
    }
}

/// Canonical Gauss frame `Y^{(k)}` at `x`.
pub fn gauss_frame(label: SingularityLabel, x: &BranchedComplex, p: &Params, tol: f64) -> Result<FrameValue> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let (r, _) = residue_frame(label, p, Family::Gauss)?;
    let xv = x.value;
    match label {
        SingularityLabel::Zero => {
            let dom = DomainSpec::of(DomainKind::Omega0);
            require(dom, x)?;
            let s = [
                [one(), xv * a * (g - b) / (g * (g - 1.0))],
                [xv * (a + 1.0 - g) * (1.0 - b) / ((1.0 - g) * (2.0 - g)), one()],
            ];
            let gs = [
                [f21(a + 1.0 - g, b - g, 1.0 - g, xv, tol)?, f21(a + 1.0, b, g + 1.0, xv, tol)?],
                [f21(a + 2.0 - g, b + 1.0 - g, 3.0 - g, xv, tol)?, f21(a, b - 1.0, g - 1.0, xv, tol)?],
            ];
            Ok(assemble(r, gs, s, [x.powc(1.0 - g), one()], dom))
        }
        SingularityLabel::One => {
            let dom = DomainSpec::of(DomainKind::Omega1);
            require(dom, x)?;
            let u = BranchedComplex::principal(1.0 - xv);
            let uv = u.value;
            let s = [
                [one(), uv * a * (a + 1.0 - g) / ((a + b - g) * (a + b + 1.0 - g))],
                [uv * (b - 1.0) * (b - g) / ((a + b - g - 1.0) * (a + b - g)), one()],
            ];
            let gs = [
                [f21(g - a - 1.0, g - b, g - a - b, uv, tol)?, f21(a + 1.0, b, a + b + 2.0 - g, uv, tol)?],
                [f21(g - a, g + 1.0 - b, g + 2.0 - a - b, uv, tol)?, f21(a, b - 1.0, a + b - g, uv, tol)?],
            ];
            Ok(assemble(r, gs, s, [u.powc(g - a - b), one()], dom))
        }
        SingularityLabel::Infinity => {
            let dom = DomainSpec::of(DomainKind::OmegaInf);
            require(dom, x)?;
            let w = xv.inv();
            let mx = BranchedComplex::principal(-xv);
            let k21 = a * (b - 1.0) * (b - g) * (g - a - 1.0)
                / ((a - b) * (a + 1.0 - b) * (a + 1.0 - b) * (a + 2.0 - b));
            let s = [[one(), -w], [k21 * w, one()]];
            let gs = [
                [f21(a, a + 1.0 - g, a + 1.0 - b, w, tol)?, f21(b, b + 1.0 - g, b + 1.0 - a, w, tol)?],
                [f21(a + 1.0, a + 2.0 - g, a + 3.0 - b, w, tol)?, f21(b - 1.0, b - g, b - a - 1.0, w, tol)?],
            ];
            Ok(assemble(r, gs, s, [mx.powc(-a), mx.powc(1.0 - b)], dom))
        }
    }
}

/// The same frames at `One` or `Infinity`, written in the variables that survive the
/// substitution `x = z/α`: powers of `1 − 1/x` resp. `1/x` times
/// `x^{−Θ∞−Θ1}(1−x)^{Θ1}` resp. `(−x)^{−Θ∞−Θ1}(1−x)^{Θ1}`.
pub fn gauss_frame_rewritten(label: SingularityLabel, x: &BranchedComplex, p: &Params, tol: f64) -> Result<FrameValue> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let xv = x.value;
    let omx = BranchedComplex::principal(1.0 - xv);
    match label {
        SingularityLabel::Infinity => {
            let dom = DomainSpec::of(DomainKind::OmegaHatInf);
            require(dom, x)?;
            let (r, _) = residue_frame(label, p, Family::Gauss)?;
            let w = xv.inv();
            let mx = BranchedComplex::principal(-xv);
            let k21 = a * (1.0 - b) * (b - g) * (a + 1.0 - g)
                / ((a - b) * (a + 1.0 - b) * (a + 1.0 - b) * (a + 2.0 - b));
            let s = [[one(), -w], [k21 * w, one()]];
            let gs = [
                [f21(1.0 - b, g - b, a + 1.0 - b, w, tol)?, f21(b, b + 1.0 - g, b + 1.0 - a, w, tol)?],
                [f21(2.0 - b, g + 1.0 - b, a + 3.0 - b, w, tol)?, f21(b - 1.0, b - g, b - a - 1.0, w, tol)?],
            ];
            let m = [mx.powc(b - g) * omx.powc(g - a - b), mx.powc(1.0 - b)];
            Ok(assemble(r, gs, s, m, dom))
        }
        SingularityLabel::One => {
            let dom = DomainSpec::of(DomainKind::OmegaHat1);
            require(dom, x)?;
            let u = 1.0 - xv.inv();
            // R1·ĝ_{n,1} summed: the leading matrix is absorbed into the series.
            let r22 = (a + 1.0 - g) / ((b - 1.0) * (b - g));
            let s = [[one(), xv.inv()], [xv.inv() / a, r22]];
            let gs = [
                [f21(1.0 - b, g - b, g + 1.0 - a - b, u, tol)?, f21(b, b + 1.0 - g, a + b + 1.0 - g, u, tol)?],
                [f21(2.0 - b, g + 1.0 - b, g + 1.0 - a - b, u, tol)?, f21(b - 1.0, b - g, a + b + 1.0 - g, u, tol)?],
            ];
            let m = [x.powc(b - g) * omx.powc(g - a - b), x.powc(1.0 - b)];
            Ok(assemble(Mat2::IDENTITY, gs, s, m, dom))
        }
        SingularityLabel::Zero => Err(Error::Domain("no rewritten frame at zero".into())),
    }
}

// (x)_m (y)_m / ((z)_m m!), zero for m < 0
fn q3(x: C64, y: C64, z: C64, m: i64) -> C64 {
    if m < 0 {
        return c(0.0, 0.0);
    }
    let m = m as usize;
    pochhammer(x, m) * pochhammer(y, m) / (pochhammer(z, m) * factorial(m))
}

// (x)_m (y)_m / m!, zero for m < 0
fn q2(x: C64, y: C64, m: i64) -> C64 {
    if m < 0 {
        return c(0.0, 0.0);
    }
    let m = m as usize;
    pochhammer(x, m) * pochhammer(y, m) / factorial(m)
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Coefficient `h_{n,∞}` of the formal Kummer frame at infinity.
pub fn coeff_h_inf(n: usize, p: &Params) -> Mat2 {
    let (b, g) = (p.beta, p.gamma_);
    let n = n as i64;
    let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
    Mat2::new(
        q2(1.0 - b, g - b, n),
        q2(b, b + 1.0 - g, n - 1) * sgn,
        (1.0 - b) * (b - g) * q2(2.0 - b, g + 1.0 - b, n - 1),
        q2(b - 1.0, b - g, n) * sgn,
    )
}

/// Coefficient `ĝ_{n,∞}` of the rewritten Gauss frame at infinity.
pub fn coeff_ghat_inf(n: usize, p: &Params) -> Result<Mat2> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let den = (a - b) * (a + 1.0 - b) * (a + 1.0 - b) * (a + 2.0 - b);
    if den.norm() < crate::RESONANCE_TOL {
        return Err(Error::Degenerate("(alpha-beta)(alpha+1-beta)^2(alpha+2-beta) vanishes".into()));
    }
    let k = a * (1.0 - b) * (b - g) * (a + 1.0 - g) / den;
    let n = n as i64;
    Ok(Mat2::new(
        q3(1.0 - b, g - b, a + 1.0 - b, n),
        -q3(b, b + 1.0 - g, b + 1.0 - a, n - 1),
        k * q3(2.0 - b, g + 1.0 - b, a + 3.0 - b, n - 1),
        q3(b - 1.0, b - g, b - a - 1.0, n),
    ))
}

/// Coefficient `ĝ_{n,1}` of the rewritten Gauss frame at one, normalised so that
/// `ĝ_{0,1} = I` and `Y^{(1)} = R1 Σ ĝ_{n,1} (1−1/x)^n x^{−Θ∞−Θ1}(1−x)^{Θ1}`.
pub fn coeff_ghat_one(n: usize, p: &Params) -> Result<Mat2> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let (r1, _) = residue_frame(SingularityLabel::One, p, Family::Gauss)?;
    let n = n as i64;
    let r22 = (a + 1.0 - g) / ((b - 1.0) * (b - g));
    let full = Mat2::new(
        q3(1.0 - b, g - b, g + 1.0 - a - b, n),
        q3(b, b + 1.0 - g, a + b + 1.0 - g, n) - q3(b, b + 1.0 - g, a + b + 1.0 - g, n - 1),
        (q3(2.0 - b, g + 1.0 - b, g + 1.0 - a - b, n) - q3(2.0 - b, g + 1.0 - b, g + 1.0 - a - b, n - 1)) / a,
        r22 * q3(b - 1.0, b - g, a + b + 1.0 - g, n),
    );
    let inv = r1.inverse().ok_or_else(|| Error::Degenerate("R1 is singular".into()))?;
    Ok(inv * full)
}

/// Kummer frame `Ỹ^{(0)} = R̃0 H0(z) z^{Θ̃0}` on `arg z ∈ [−3π/2, π/2)`.
pub fn kummer_frame_zero(z: &BranchedComplex, p: &Params, tol: f64) -> Result<FrameValue> {
    let (b, g) = (p.beta, p.gamma_);
    let dom = DomainSpec::of(DomainKind::OmegaTilde0);
    require(dom, z)?;
    let (r, _) = residue_frame(SingularityLabel::Zero, p, Family::Kummer)?;
    let zv = z.value;
    let s = [
        [one(), zv * (g - b) / (g * (g - 1.0))],
        [zv * (1.0 - b) / ((1.0 - g) * (2.0 - g)), one()],
    ];
    let hs = [
        [f11(b - g, 1.0 - g, zv, tol)?, f11(b, g + 1.0, zv, tol)?],
        [f11(b + 1.0 - g, 3.0 - g, zv, tol)?, f11(b - 1.0, g - 1.0, zv, tol)?],
    ];
    Ok(assemble(r, hs, s, [z.powc(1.0 - g), one()], dom))
}

/// Truncated formal frame `R̃∞ (Σ h_{n,∞} z^{−n}) diag(e^z z^{β−γ}, z^{1−β})`.
///
/// `n_max = None` truncates each entry optimally. Outside `0 ≤ arg z − kπ ≤ π` the
/// error estimate includes the Stokes-switched multiple of the other column. The argument of `z` selects
/// the sheet; the domain tag records the sector Σ̃_k containing it (the larger
/// `k` where two sectors overlap).
pub fn kummer_formal_frame(z: &BranchedComplex, p: &Params, n_max: Option<usize>) -> Result<FrameValue> {
    formal_frame(z, p, n_max, None)
}

/// As [`kummer_formal_frame`], with the error estimate taken relative to the
/// true frame `Ỹ^(∞,k)`; `z` must lie in `Σ̃_k`.
pub fn kummer_formal_frame_on(k: i32, z: &BranchedComplex, p: &Params, n_max: Option<usize>) -> Result<FrameValue> {
    require(DomainSpec::sheet(DomainKind::SigmaTilde, k), z)?;
    formal_frame(z, p, n_max, Some(k))
}

fn formal_frame(z: &BranchedComplex, p: &Params, n_max: Option<usize>, sheet: Option<i32>) -> Result<FrameValue> {
    let (b, g) = (p.beta, p.gamma_);
    let (r, _) = residue_frame(SingularityLabel::Infinity, p, Family::Kummer)?;
    let zv = z.value;
    let w = zv.inv();
    let nm1 = n_max.map(|n| n.saturating_sub(1));
    // with N = 0 only h_0 = I survives
    let off = if n_max == Some(0) { 0.0 } else { 1.0 };
    let s = [[one(), -w * off], [(1.0 - b) * (b - g) * w * off, one()]];
    let hs = [
        [f20_truncated(1.0 - b, g - b, w, n_max)?, f20_truncated(b, b + 1.0 - g, -w, nm1)?],
        [f20_truncated(2.0 - b, g + 1.0 - b, w, nm1)?, f20_truncated(b - 1.0, b - g, -w, n_max)?],
    ];
    let m = [zv.exp() * z.powc(b - g), z.powc(1.0 - b)];
    let k = match sheet {
        Some(k) => k,
        None => {
            let k = ((z.arg_choice + 0.5 * PI) / PI).floor() as i32 - 1;
            if DomainSpec::sheet(DomainKind::SigmaTilde, k + 1).contains(z) { k + 1 } else { k }
        }
    };
    let mut f = assemble(r, hs, s, m, DomainSpec::sheet(DomainKind::SigmaTilde, k));
    // e^z and the powers lose about |exponent| ulps
    let lz = z.ln();
    let expo = [zv.norm() + ((b - g) * lz).norm(), ((1.0 - b) * lz).norm()];
    for i in 0..2 {
        for (j, e) in expo.iter().enumerate() {
            f.entry_err[i][j] += 4.0 * f64::EPSILON * (1.0 + e) * f.matrix[(i, j)].norm();
        }
    }
    f.err_estimate = f.entry_err.iter().flatten().cloned().fold(0.0, f64::max);
    add_stokes_switch(&mut f, z.arg_choice - k as f64 * PI, k, p);
    Ok(f)
}

// Magnitude of the off-diagonal entry of S̃_j: S̃_{j+2} is S̃_j conjugated by
// e^{2πiΘ̃∞}, which rescales the entry by e^{±2π Im(2β−γ−1)}.
fn stokes_magnitude(j: i32, p: &Params) -> f64 {
    let (s0, sm1) = crate::closed_form_monodromy::kummer_stokes(p);
    let (base, m) = if j.rem_euclid(2) == 0 { (s0[(0, 1)], j / 2) } else { (sm1[(1, 0)], (j + 1) / 2) };
    let drift = (2.0 * PI * (2.0 * p.beta - p.gamma_ - 1.0).im).abs();
    base.norm() * (drift * m.abs() as f64).exp()
}

// Each column of Ỹ^(∞,k) carries an exponentially small multiple of the other
// column beyond the Stokes ray on which it dominates. There the smallest term no
// longer bounds the error, so the switched multiple is added to the estimate.
fn add_stokes_switch(f: &mut FrameValue, theta: f64, k: i32, p: &Params) {
    // even k: column 0 dominates on θ = 0 and column 1 on θ = π; odd k swaps them
    let (low, high) = if k.rem_euclid(2) == 0 { (0, 1) } else { (1, 0) };
    let switched = if theta < 0.0 {
        Some((low, stokes_magnitude(k - 1, p)))
    } else if theta > PI {
        Some((high, stokes_magnitude(k, p)))
    } else {
        None
    };
    if let Some((col, s)) = switched {
        for i in 0..2 {
            f.entry_err[i][col] += s * (f.matrix[(i, 1 - col)].norm() + f.entry_err[i][1 - col]);
        }
        f.err_estimate = f.entry_err.iter().flatten().cloned().fold(0.0, f64::max);
    }
}

/// Relative finite-difference residual `‖Y' − A Y‖ / ‖Y‖` of a frame at a point.
pub fn frame_residual(
    frame: impl Fn(&BranchedComplex) -> Result<Mat2>,
    system: impl Fn(C64) -> Result<Mat2>,
    x: &BranchedComplex,
) -> Result<f64> {
    let h = 1e-4 * x.norm().clamp(1e-2, 1.0);
    // fourth-order central difference
    let f = |d: f64| frame(&x.shifted(c(d, 0.0)));
    let dy = (f(-2.0 * h)? - f(2.0 * h)? + (f(h)? - f(-h)?).scale(c(8.0, 0.0))).scale(c(1.0 / (12.0 * h), 0.0));
    let y = frame(x)?;
    let a = system(x.value)?;
    // columns may differ in scale by many orders; compare column by column
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        let r0 = dy[(0, j)] - a[(0, 0)] * y[(0, j)] - a[(0, 1)] * y[(1, j)];
        let r1 = dy[(1, j)] - a[(1, 0)] * y[(0, j)] - a[(1, 1)] * y[(1, j)];
        let scale = y[(0, j)].norm().max(y[(1, j)].norm()) * (1.0 + a.norm_max());
        worst = worst.max(r0.norm().max(r1.norm()) / scale);
    }
    Ok(worst)
}
