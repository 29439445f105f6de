//! Mellin–Barnes integrals for ₂F₁ continuation and for the Kummer function φ.
//!
//! The contour is the vertical line `Re s = re_offset`, optionally with
//! semicircular detours. Poles that end up on the wrong side of the realised
//! contour are accounted for by adding their residues, so any line that misses
//! the poles gives the same value as the separating contour.

use crate::local_frames::{principal_arg, BranchedComplex, DomainKind, DomainSpec};
use crate::ode_systems::psi_lift_kummer;
use crate::scalar_special::{gamma, is_nonpositive_integer, log_gamma, recip_gamma};
use crate::{c, Error, Mat2, Params, Result, C64};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Which side of the detour the contour bulges to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Semicircular detour of the vertical line around `re_offset + i·center_im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indentation {
    pub center_im: f64,
    pub radius: f64,
    pub bulge: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub re_offset: f64,
    /// Truncation height: the contour runs over `|Im s| ≤ t_max`.
    pub t_max: f64,
    pub indentation: Vec<Indentation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbValue {
    pub value: C64,
    /// Quadrature plus truncation estimate.
    pub err_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PoleType {
    /// Must lie to the left of the contour.
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Pole {
    at: C64,
    kind: PoleType,
    /// Residue of the integrand.
    residue: C64,
}

/// An integrand with its pole families and exponential decay rate.
struct Integrand<'a> {
    log_f: Box<dyn Fn(C64) -> Result<C64> + 'a>,
    poles: Vec<Pole>,
    decay: f64,
}

impl Integrand<'_> {
    fn eval(&self, s: C64) -> C64 {
        match (self.log_f)(s) {
            Ok(l) => l.exp(),
            Err(_) => c(f64::NAN, f64::NAN),
        }
    }
}

// Pole families: poles of each family that could sit on the wrong side of a
// contour with |Re s| ≲ 10 are generated explicitly.
const FAMILY_LEN: usize = 24;

fn gauss_integrand(p: &Params, x: &BranchedComplex) -> Result<Integrand<'static>> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    for (name, v) in [("alpha", a), ("beta", b)] {
        if is_nonpositive_integer(v) {
            return Err(Error::Separation(format!("{name} = {v} is a nonpositive integer")));
        }
    }
    if (x.value).norm() == 0.0 {
        return Err(Error::Domain("x = 0".into()));
    }
    let mx = -x.value;
    let lmx = c(mx.norm().ln(), principal_arg(mx));
    let log_f = move |s: C64| -> Result<C64> { Ok(log_gamma(a + s)? + log_gamma(b + s)? + log_gamma(-s)? - log_gamma(g + s)? + s * lmx) };
    let mut poles = Vec::new();
    for n in 0..FAMILY_LEN {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let inv_fact = recip_gamma(c(nf + 1.0, 0.0));
        // s = n from Γ(−s)
        let s = c(nf, 0.0);
        let r = -sign * inv_fact * gamma(a + s).unwrap_or_default() * gamma(b + s).unwrap_or_default() * recip_gamma(g + s) * (s * lmx).exp();
        poles.push(Pole { at: s, kind: PoleType::Right, residue: r });
        for (u, v) in [(a, b), (b, a)] {
            let s = -u - nf;
            let r = sign * inv_fact * gamma(v + s).unwrap_or_default() * gamma(-s).unwrap_or_default() * recip_gamma(g + s) * (s * lmx).exp();
            poles.push(Pole { at: s, kind: PoleType::Left, residue: r });
        }
    }
    let decay = PI - principal_arg(mx).abs();
    Ok(Integrand { log_f: Box::new(log_f), poles, decay })
}

fn kummer_integrand(beta: C64, gamma_: C64, z: &BranchedComplex) -> Result<Integrand<'static>> {
    let (b, g) = (beta, gamma_);
    let b1 = b + 1.0 - g;
    for (name, v) in [("beta", b), ("beta+1-gamma", b1)] {
        if is_nonpositive_integer(v) {
            return Err(Error::Separation(format!("{name} = {v} is a nonpositive integer")));
        }
    }
    if z.value.norm() == 0.0 {
        return Err(Error::Domain("z = 0".into()));
    }
    let lz = z.ln();
    let norm = log_gamma(b)? + log_gamma(b1)?;
    let log_f = move |s: C64| -> Result<C64> { Ok(log_gamma(s)? + log_gamma(b - s)? + log_gamma(b1 - s)? - norm + (s - b) * lz) };
    let rn = (-norm).exp();
    let mut poles = Vec::new();
    for n in 0..FAMILY_LEN {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let inv_fact = recip_gamma(c(nf + 1.0, 0.0));
        let s = c(-nf, 0.0);
        let r = sign * inv_fact * gamma(b - s).unwrap_or_default() * gamma(b1 - s).unwrap_or_default() * rn * ((s - b) * lz).exp();
        poles.push(Pole { at: s, kind: PoleType::Left, residue: r });
        for (u, v) in [(b, b1), (b1, b)] {
            let s = u + nf;
            let r = -sign * inv_fact * gamma(s).unwrap_or_default() * gamma(v - s).unwrap_or_default() * rn * ((s - b) * lz).exp();
            poles.push(Pole { at: s, kind: PoleType::Right, residue: r });
        }
    }
    let decay = 1.5 * PI - z.arg_choice.abs();
    Ok(Integrand { log_f: Box::new(log_f), poles, decay })
}

fn check_separable(poles: &[Pole]) -> Result<()> {
    for l in poles.iter().filter(|q| q.kind == PoleType::Left) {
        for r in poles.iter().filter(|q| q.kind == PoleType::Right) {
            if (l.at - r.at).norm() < 1e-12 {
                return Err(Error::Separation(format!("left and right poles coincide at {}", l.at)));
            }
        }
    }
    Ok(())
}

/// Abscissa: the midpoint of the pole-free strip if there is one, otherwise
/// the point of [−2.5, 2.5] farthest from every pole.
fn pick_offset(poles: &[Pole]) -> f64 {
    let max_left = poles.iter().filter(|q| q.kind == PoleType::Left).map(|q| q.at.re).fold(f64::NEG_INFINITY, f64::max);
    let min_right = poles.iter().filter(|q| q.kind == PoleType::Right).map(|q| q.at.re).fold(f64::INFINITY, f64::min);
    if max_left < min_right {
        return 0.5 * (max_left + min_right);
    }
    let dist = |x: f64| poles.iter().map(|q| (q.at - c(x, q.at.im.clamp(-1e9, 1e9))).norm().max((q.at.re - x).abs())).fold(f64::INFINITY, f64::min);
    let mut best = (0.0, dist(0.0));
    for k in -250..=250 {
        let x = k as f64 * 0.01;
        let d = dist(x);
        if d > best.1 + 1e-12 {
            best = (x, d);
        }
    }
    best.0
}

/// Smallest power-of-two height past which the neglected tails fall below `tol`.
fn pick_height(f: &Integrand, re_offset: f64, tol: f64) -> Result<f64> {
    if f.decay <= 0.0 {
        return Err(Error::Domain(format!("argument outside the convergence wedge (decay rate {})", f.decay)));
    }
    let mut t = 8.0;
    while t <= 4096.0 {
        if tail_bound(f, re_offset, t) < tol {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::Truncation { suggested_t: t })
}

// |f| beyond the truncation decays like e^{−κ|t|}; the tail integral is about |f(T)|/κ.
fn tail_bound(f: &Integrand, re_offset: f64, t: f64) -> f64 {
    let up = f.eval(c(re_offset, t)).norm();
    let dn = f.eval(c(re_offset, -t)).norm();
    (up + dn) / (2.0 * PI * f.decay) * 2.0
}

impl ContourSpec {
    pub fn line(re_offset: f64, t_max: f64) -> Self {
        ContourSpec { re_offset, t_max, indentation: Vec::new() }
    }

    /// Automatic contour for `mb_gauss` at tolerance `tol`.
    pub fn for_gauss(p: &Params, x: &BranchedComplex, tol: f64) -> Result<Self> {
        let f = gauss_integrand(p, x)?;
        check_separable(&f.poles)?;
        let re = pick_offset(&f.poles);
        Ok(ContourSpec::line(re, pick_height(&f, re, tol)?))
    }

    /// Automatic contour for `phi_kummer` at tolerance `tol`.
    pub fn for_kummer(beta: C64, gamma_: C64, z: &BranchedComplex, tol: f64) -> Result<Self> {
        let f = kummer_integrand(beta, gamma_, z)?;
        check_separable(&f.poles)?;
        let re = pick_offset(&f.poles);
        Ok(ContourSpec::line(re, pick_height(&f, re, tol)?))
    }

    fn validate(&self) -> Result<()> {
        if self.t_max.is_nan() || self.t_max <= 0.0 || !self.re_offset.is_finite() {
            return Err(Error::InvalidPath("contour needs finite offset and positive height".into()));
        }
        let mut ind = self.indentation.clone();
        ind.sort_by(|a, b| a.center_im.total_cmp(&b.center_im));
        for w in ind.windows(2) {
            if w[0].center_im + w[0].radius > w[1].center_im - w[1].radius {
                return Err(Error::InvalidPath("indentations overlap".into()));
            }
        }
        if ind.iter().any(|d| d.radius <= 0.0 || d.center_im.abs() + d.radius > self.t_max) {
            return Err(Error::InvalidPath("indentation radius must be positive and inside the truncation".into()));
        }
        Ok(())
    }

    /// Which side of the realised contour a point falls on.
    fn side_of(&self, s: C64) -> Side {
        for d in &self.indentation {
            if (s - c(self.re_offset, d.center_im)).norm() < d.radius {
                return match d.bulge {
                    Side::Right => Side::Left,
                    Side::Left => Side::Right,
                };
            }
        }
        if s.re < self.re_offset {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Parametrised pieces `u ∈ [0, 1] ↦ s(u)`, traversed upward.
    fn pieces(&self) -> Vec<Piece> {
        let mut ind = self.indentation.clone();
        ind.sort_by(|a, b| a.center_im.total_cmp(&b.center_im));
        let mut out = Vec::new();
        let mut lo = -self.t_max;
        for d in &ind {
            push_lines(&mut out, self.re_offset, lo, d.center_im - d.radius);
            let center = c(self.re_offset, d.center_im);
            // from angle −π/2 up to +π/2 through the bulge side
            let (t0, t1) = match d.bulge {
                Side::Right => (-0.5 * PI, 0.5 * PI),
                Side::Left => (1.5 * PI, 0.5 * PI),
            };
            out.push(Piece::Arc { center, radius: d.radius, t0, t1 });
            lo = d.center_im + d.radius;
        }
        push_lines(&mut out, self.re_offset, lo, self.t_max);
        out
    }
}

fn push_lines(out: &mut Vec<Piece>, re: f64, lo: f64, hi: f64) {
    // unit panels so the adaptive queue starts well resolved
    let n = ((hi - lo).ceil() as usize).max(1);
    for k in 0..n {
        let a = lo + (hi - lo) * k as f64 / n as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
        out.push(Piece::Line { re, a, b });
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Line { re: f64, a: f64, b: f64 },
    Arc { center: C64, radius: f64, t0: f64, t1: f64 },
}

impl Piece {
    fn split(&self) -> (Piece, Piece) {
        match *self {
            Piece::Line { re, a, b } => {
                let m = 0.5 * (a + b);
                (Piece::Line { re, a, b: m }, Piece::Line { re, a: m, b })
            }
            Piece::Arc { center, radius, t0, t1 } => {
                let m = 0.5 * (t0 + t1);
                (Piece::Arc { center, radius, t0, t1: m }, Piece::Arc { center, radius, t0: m, t1 })
            }
        }
    }

    /// Point and ds/du for u ∈ [−1, 1].
    fn at(&self, u: f64) -> (C64, C64) {
        match *self {
            Piece::Line { re, a, b } => {
                let h = 0.5 * (b - a);
                (c(re, 0.5 * (a + b) + h * u), c(0.0, h))
            }
            Piece::Arc { center, radius, t0, t1 } => {
                let h = 0.5 * (t1 - t0);
                let th = 0.5 * (t0 + t1) + h * u;
                let e = C64::from_polar(radius, th);
                (center + e, c(0.0, h) * e)
            }
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(C64) -> C64, piece: &Piece) -> (C64, f64) {
    let mut k = c(0.0, 0.0);
    let mut g = c(0.0, 0.0);
    for i in 0..8 {
        let pts: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for &sgn in pts {
            let (s, ds) = piece.at(sgn * XGK[i]);
            let v = f(s) * ds;
            k += v * WGK[i];
            if i % 2 == 1 {
                g += v * WG[i / 2];
            }
        }
    }
    let err = (k - g).norm();
    if !err.is_finite() || !k.re.is_finite() || !k.im.is_finite() {
        return (k, f64::INFINITY);
    }
    (k, err)
}

struct Panel {
    piece: Piece,
    value: C64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss–Kronrod on the contour pieces, returning ∫ f ds.
fn integrate(f: &dyn Fn(C64) -> C64, pieces: Vec<Piece>, tol: f64) -> Result<(C64, f64)> {
    let mut heap: BinaryHeap<Panel> = pieces
        .into_iter()
        .map(|piece| {
            let (value, err) = gk15(f, &piece);
            Panel { piece, value, err }
        })
        .collect();
    for _ in 0..50_000 {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        if total_err <= tol {
            break;
        }
        let worst = heap.pop().expect("non-empty panel queue");
        if !worst.err.is_finite() {
            return Err(Error::Separation("integrand is singular on the contour".into()));
        }
        let (a, b) = worst.piece.split();
        for piece in [a, b] {
            let (value, err) = gk15(f, &piece);
            heap.push(Panel { piece, value, err });
        }
    }
    let total_err: f64 = heap.iter().map(|p| p.err).sum();
    let value = heap.iter().map(|p| p.value).sum();
    if total_err.is_nan() || total_err > tol {
        return Err(Error::NoConvergence { tol, terms: heap.len(), bound: total_err });
    }
    Ok((value, total_err))
}

fn evaluate(f: &Integrand, contour: &ContourSpec, tol: f64) -> Result<MbValue> {
    contour.validate()?;
    check_separable(&f.poles)?;
    for q in &f.poles {
        let on_line = (q.at.re - contour.re_offset).abs() < 1e-9 && q.at.im.abs() <= contour.t_max;
        let shielded = contour.indentation.iter().any(|d| (q.at - c(contour.re_offset, d.center_im)).norm() < d.radius * 0.999);
        if on_line && !shielded {
            return Err(Error::Separation(format!("pole at {} lies on the contour", q.at)));
        }
    }
    let tail = tail_bound(f, contour.re_offset, contour.t_max);
    if tail > tol {
        let mut t = contour.t_max;
        while tail_bound(f, contour.re_offset, t) > tol && t < 1e5 {
            t *= 2.0;
        }
        return Err(Error::Truncation { suggested_t: t });
    }
    let g = |s: C64| f.eval(s);
    let (integral, qerr) = integrate(&g, contour.pieces(), 0.5 * tol)?;
    let mut value = integral / c(0.0, 2.0 * PI);
    for q in &f.poles {
        match (q.kind, contour.side_of(q.at)) {
            (PoleType::Left, Side::Right) => value += q.residue,
            (PoleType::Right, Side::Left) => value -= q.residue,
            _ => {}
        }
    }
    Ok(MbValue { value, err_estimate: qerr / (2.0 * PI) + tail })
}

/// `(1/2πi) ∫ Γ(α+s)Γ(β+s)Γ(−s)/Γ(γ+s) (−x)^s ds`, with `arg(−x)` principal.
pub fn mb_gauss(p: &Params, x: &BranchedComplex, contour: &ContourSpec, tol: f64) -> Result<MbValue> {
    let f = gauss_integrand(p, x)?;
    evaluate(&f, contour, tol)
}

/// `φ(β, γ; z)` as a Mellin–Barnes integral; `arg z` is taken from `z`.
pub fn phi_kummer(beta: C64, gamma_: C64, z: &BranchedComplex, contour: &ContourSpec, tol: f64) -> Result<MbValue> {
    let f = kummer_integrand(beta, gamma_, z)?;
    evaluate(&f, contour, tol)
}

/// `mb_gauss` with an automatically chosen contour.
pub fn mb_gauss_auto(p: &Params, x: &BranchedComplex, tol: f64) -> Result<MbValue> {
    mb_gauss(p, x, &ContourSpec::for_gauss(p, x, 0.1 * tol)?, tol)
}

/// `phi_kummer` with an automatically chosen contour.
pub fn phi_kummer_auto(beta: C64, gamma_: C64, z: &BranchedComplex, tol: f64) -> Result<MbValue> {
    phi_kummer(beta, gamma_, z, &ContourSpec::for_kummer(beta, gamma_, z, 0.1 * tol)?, tol)
}

/// A solution matrix assembled from φ, with entrywise error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueFrame {
    pub matrix: Mat2,
    pub entry_err: [[f64; 2]; 2],
}

/// `(y, y')` for `y = φ(b, g; w)` with `w = e^{iθ} z`, using `φ' = −b φ(b+1, g+1)`.
fn phi_with_derivative(b: C64, g: C64, w: &BranchedComplex, dw: C64, tol: f64) -> Result<(MbValue, MbValue)> {
    let y = phi_kummer_auto(b, g, w, tol)?;
    let d = phi_kummer_auto(b + 1.0, g + 1.0, w, tol)?;
    let f = -b * dw;
    Ok((y, MbValue { value: f * d.value, err_estimate: f.norm() * d.err_estimate }))
}

/// The true solutions on `Σ̃_k`, `k ∈ {−1, 0}`, lifted to a matrix:
/// `ỹ1 = e^{±iπ(β−γ)} e^z φ(γ−β, γ; e^{∓iπ} z)` and `ỹ2 = −φ(β, γ; z)`
/// (upper signs for `k = 0`).
pub fn kummer_true_frame(k: i32, p: &Params, z: &BranchedComplex, tol: f64) -> Result<TrueFrame> {
    let (b, g) = (p.beta, p.gamma_);
    let sgn = match k {
        0 => 1.0,
        -1 => -1.0,
        _ => return Err(Error::Domain(format!("true frames exist for k = -1, 0; got {k}"))),
    };
    if !DomainSpec::sheet(DomainKind::SigmaTilde, k).contains(z) {
        return Err(Error::Domain(format!("arg {} is outside the sector of index {k}", z.arg_choice)));
    }
    let w = BranchedComplex { value: -z.value, arg_choice: z.arg_choice - sgn * PI };
    let (u, up) = phi_with_derivative(g - b, g, &w, c(-1.0, 0.0), tol)?;
    let pre = (c(0.0, sgn * PI) * (b - g) + z.value).exp();
    let y1 = pre * u.value;
    let y1p = y1 + pre * up.value;
    // rounding of e^z grows with |z|
    let e1 = pre.norm() * u.err_estimate + 4.0 * f64::EPSILON * (1.0 + z.norm()) * y1.norm();
    let e1p = e1 + pre.norm() * up.err_estimate;
    let (v, vp) = phi_with_derivative(b, g, z, c(1.0, 0.0), tol)?;
    let (y2, y2p) = (-v.value, -vp.value);
    let col = |y: C64, yp: C64, e: f64, ep: f64| -> Result<(C64, f64)> {
        let psi = psi_lift_kummer(y, yp, z.value, p)?;
        // ψ is linear in (y, y'); bound each term
        let den = ((b - 1.0) * (b - g)).norm();
        Ok((psi, ((z.value + b - g).norm() * e + z.norm() * ep) / den))
    };
    let (p1, pe1) = col(y1, y1p, e1, e1p)?;
    let (p2, pe2) = col(y2, y2p, v.err_estimate, vp.err_estimate)?;
    Ok(TrueFrame { matrix: Mat2::new(y1, y2, p1, p2), entry_err: [[e1, v.err_estimate], [pe1, pe2]] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueKind {
    /// Power series Σ Γ(α+n)Γ(β+n)/(Γ(γ+n) n!) xⁿ from the poles of Γ(−s).
    LeftGauss,
    /// The (−x)^{−α−n} and (−x)^{−β−n} families.
    RightGauss,
    /// The convergent zⁿ and z^{n+1−γ} families of φ.
    RightKummer,
}

/// Partial residue sums over `n = 0..=n_max`; a negative `n_max` gives 0.
///
/// Each sum is signed so that, as `n_max → ∞`, it converges to the integral
/// whenever the corresponding series converges.
pub fn residue_sum(kind: ResidueKind, p: &Params, x: &BranchedComplex, n_max: i64) -> Result<C64> {
    if n_max < 0 {
        return Ok(c(0.0, 0.0));
    }
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let mut total = c(0.0, 0.0);
    match kind {
        ResidueKind::LeftGauss => {
            let mut t = gamma(a)? * gamma(b)? * recip_gamma(g);
            for n in 0..=n_max {
                total += t;
                let nf = n as f64;
                t = t * (a + nf) * (b + nf) / ((g + nf) * (nf + 1.0)) * x.value;
            }
        }
        ResidueKind::RightGauss => {
            let mx = -x.value;
            let lmx = c(mx.norm().ln(), principal_arg(mx));
            let inv = (-lmx).exp();
            for (u, v) in [(a, b), (b, a)] {
                // Res at s = −u − n: (−1)ⁿ/n! Γ(v−u−n) Γ(u+n) / Γ(γ−u−n) (−x)^{−u−n}
                let mut t = gamma(v - u)? * gamma(u)? * recip_gamma(g - u) * (-u * lmx).exp();
                for n in 0..=n_max {
                    total += t;
                    let nf = n as f64;
                    t = -t * (u + nf) * (g - u - nf - 1.0) / ((nf + 1.0) * (v - u - nf - 1.0)) * inv;
                }
            }
        }
        ResidueKind::RightKummer => {
            let b1 = b + 1.0 - g;
            let z = x.value;
            let mut t1 = gamma(1.0 - g)? * recip_gamma(b1);
            let mut t2 = gamma(g - 1.0)? * recip_gamma(b) * x.powc(1.0 - g);
            for n in 0..=n_max {
                total += t1 + t2;
                let nf = n as f64;
                t1 = t1 * (b + nf) * z / ((nf + 1.0) * (g + nf));
                t2 = t2 * (b1 + nf) * z / ((nf + 1.0) * (2.0 - g + nf));
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper_series::{f11, f20_asymptotic, f21};
    use crate::local_frames::kummer_formal_frame_on;
    use std::f64::consts::FRAC_PI_3;

    fn pg() -> Params {
        Params::new(c(0.3, 0.0), c(1.1, 0.0), c(0.6, 0.0))
    }

    fn bk() -> (C64, C64) {
        (c(1.0 / 3.0, 0.0), c(0.25, 0.0))
    }

    fn prefactored_f21(p: &Params, x: C64) -> C64 {
        gamma(p.alpha).unwrap() * gamma(p.beta).unwrap() * recip_gamma(p.gamma_) * f21(p.alpha, p.beta, p.gamma_, x, 1e-16).unwrap().value
    }

    #[test]
    fn inside_disk() {
        let p = pg();
        for x in [c(-0.4, 0.0), c(0.4, 0.2), c(0.1, -0.7)] {
            let v = mb_gauss_auto(&p, &BranchedComplex::principal(x), 1e-12).unwrap();
            assert!((v.value - prefactored_f21(&p, x)).norm() < 1e-9, "{x}");
        }
    }

    #[test]
    fn outside_disk_two_terms() {
        let p = pg();
        let (a, b, g) = (p.alpha, p.beta, p.gamma_);
        let x = c(-3.0, 0.0);
        let mx = BranchedComplex::principal(-x);
        let term = |u: C64, v: C64| {
            gamma(u).unwrap() * gamma(v - u).unwrap() * recip_gamma(g - u) * mx.powc(-u) * f21(u, u + 1.0 - g, u + 1.0 - v, x.inv(), 1e-16).unwrap().value
        };
        let want = term(a, b) + term(b, a);
        let v = mb_gauss_auto(&p, &BranchedComplex::principal(x), 1e-12).unwrap();
        assert!((v.value - want).norm() < 1e-8);
        let rs = residue_sum(ResidueKind::RightGauss, &p, &BranchedComplex::principal(x), 300).unwrap();
        assert!((rs - want).norm() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = pg();
        let x = c(0.4, 0.9);
        let v = mb_gauss_auto(&p, &BranchedComplex::principal(x), 1e-13).unwrap().value;
        let w = mb_gauss_auto(&p, &BranchedComplex::principal(x.conj()), 1e-13).unwrap().value;
        assert!((v - w.conj()).norm() < 1e-12);
    }

    #[test]
    fn shifting_the_line_across_poles() {
        // poles of Γ(−s) at 0, 1 and of Γ(α+s) at −0.3: each line picks up residues
        let p = pg();
        let x = BranchedComplex::principal(c(-0.4, 0.1));
        let want = prefactored_f21(&p, x.value);
        for re in [-0.7, -0.15, 0.5, 1.5] {
            let v = mb_gauss(&p, &x, &ContourSpec::line(re, 60.0), 1e-12).unwrap();
            assert!((v.value - want).norm() < 1e-10, "Re s = {re}");
        }
    }

    #[test]
    fn indentation_matches_line() {
        let p = pg();
        let x = BranchedComplex::principal(c(-0.4, 0.1));
        let plain = mb_gauss(&p, &x, &ContourSpec::line(-0.15, 60.0), 1e-12).unwrap().value;
        let mut bent = ContourSpec::line(0.0, 60.0);
        bent.indentation.push(Indentation { center_im: 0.0, radius: 0.1, bulge: Side::Right });
        let v = mb_gauss(&p, &x, &bent, 1e-12).unwrap().value;
        assert!((v - plain).norm() < 1e-10);
        // bulging the other way puts the pole at 0 on the wrong side, which is corrected
        bent.indentation[0].bulge = Side::Left;
        let v = mb_gauss(&p, &x, &bent, 1e-12).unwrap().value;
        assert!((v - plain).norm() < 1e-10);
    }

    #[test]
    fn doubling_the_height() {
        let p = pg();
        let x = BranchedComplex::principal(c(-3.0, 0.5));
        let t = ContourSpec::for_gauss(&p, &x, 1e-10).unwrap();
        let v1 = mb_gauss(&p, &x, &t, 1e-10).unwrap();
        let t2 = ContourSpec { t_max: 2.0 * t.t_max, ..t.clone() };
        let v2 = mb_gauss(&p, &x, &t2, 1e-10).unwrap();
        assert!((v1.value - v2.value).norm() <= v1.err_estimate + v2.err_estimate);
    }

    #[test]
    fn contour_errors() {
        let p = pg();
        let x = BranchedComplex::principal(c(-0.4, 0.0));
        assert!(matches!(mb_gauss(&p, &x, &ContourSpec::line(0.0, 60.0), 1e-10), Err(Error::Separation(_))));
        assert!(matches!(mb_gauss(&p, &x, &ContourSpec::line(-0.15, 2.0), 1e-10), Err(Error::Truncation { .. })));
        assert!(mb_gauss(&p, &x, &ContourSpec::line(-0.15, -1.0), 1e-10).is_err());
        let bad = Params::new(c(0.3, 0.0), c(-1.0, 0.0), c(0.6, 0.0));
        assert!(matches!(mb_gauss_auto(&bad, &x, 1e-10), Err(Error::Separation(_))));
    }

    #[test]
    fn phi_connection_reduction() {
        let (b, g) = bk();
        let z = BranchedComplex::polar(1.5, -FRAC_PI_3);
        let y1 = z.powc(1.0 - g) * f11(b + 1.0 - g, 2.0 - g, z.value, 1e-16).unwrap().value;
        let y2 = f11(b, g, z.value, 1e-16).unwrap().value;
        let want = gamma(g - 1.0).unwrap() * recip_gamma(b) * y1 + gamma(1.0 - g).unwrap() * recip_gamma(b + 1.0 - g) * y2;
        let v = phi_kummer_auto(b, g, &z, 1e-12).unwrap();
        assert!((v.value - want).norm() < 1e-8);
        let rs = residue_sum(ResidueKind::RightKummer, &Params::kummer(b, g), &z, 200).unwrap();
        assert!((rs - want).norm() < 1e-12);
    }

    #[test]
    fn phi_asymptotic_reduction() {
        let (b, g) = bk();
        let z = BranchedComplex::polar(40.0, 0.0);
        let v = phi_kummer_auto(b, g, &z, 1e-14).unwrap();
        let s = f20_asymptotic(b, b + 1.0 - g, -z.value.inv()).unwrap();
        // at |z| = 40 the smallest term is below rounding, so the quadrature error counts too
        let zb = z.powc(b);
        assert!((zb * v.value - s.value).norm() < s.err_estimate + zb.norm() * v.err_estimate);
        // at |z| = 8 the smallest term dominates
        let z = BranchedComplex::polar(8.0, 0.3);
        let v = phi_kummer_auto(b, g, &z, 1e-14).unwrap();
        let s = f20_asymptotic(b, b + 1.0 - g, -z.value.inv()).unwrap();
        let d = (z.powc(b) * v.value - s.value).norm();
        assert!(d < s.err_estimate && s.err_estimate > 1e-6);
    }

    // z y'' + (γ − z) y' − β y by a fourth-order stencil
    fn kummer_ode_residual(y: impl Fn(C64) -> C64, z: C64, b: C64, g: C64) -> f64 {
        let h = 1e-2;
        let f = |k: f64| y(z + h * k);
        let d1 = (f(-2.0) - f(2.0) + 8.0 * (f(1.0) - f(-1.0))) / (12.0 * h);
        let d2 = (-f(-2.0) - f(2.0) + 16.0 * (f(1.0) + f(-1.0)) - 30.0 * f(0.0)) / (12.0 * h * h);
        (z * d2 + (g - z) * d1 - b * f(0.0)).norm() / f(0.0).norm()
    }

    #[test]
    fn true_solutions_solve_kummer() {
        let (b, g) = bk();
        let p = Params::kummer(b, g);
        let z0 = BranchedComplex::polar(3.0, 0.5);
        for j in 0..2 {
            let y = |z: C64| {
                let bz = BranchedComplex { value: z, arg_choice: z0.arg_choice + (z / z0.value).arg() };
                kummer_true_frame(0, &p, &bz, 1e-14).unwrap().matrix[(0, j)]
            };
            assert!(kummer_ode_residual(y, z0.value, b, g) < 1e-6, "column {j}");
        }
    }

    #[test]
    fn true_frame_matches_formal_frame() {
        let (b, g) = bk();
        let p = Params::kummer(b, g);
        for (k, arg) in [(0, 1.0), (-1, -2.0)] {
            let z = BranchedComplex::polar(50.0, arg);
            let t = kummer_true_frame(k, &p, &z, 1e-13).unwrap();
            let f = kummer_formal_frame_on(k, &z, &p, None).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let d = (t.matrix[(i, j)] - f.matrix[(i, j)]).norm();
                    assert!(d <= t.entry_err[i][j] + f.entry_err[i][j], "k={k} ({i},{j})");
                }
            }
        }
        assert!(kummer_true_frame(1, &p, &BranchedComplex::polar(50.0, 2.0), 1e-13).is_err());
        assert!(kummer_true_frame(0, &p, &BranchedComplex::polar(50.0, -2.0), 1e-13).is_err());
    }

    #[test]
    fn left_gauss_partial_sums() {
        let p = pg();
        let x = c(0.3, -0.2);
        let mut want = c(0.0, 0.0);
        for n in 0..=6usize {
            let t = gamma(p.alpha + n as f64).unwrap() * gamma(p.beta + n as f64).unwrap() * recip_gamma(p.gamma_ + n as f64)
                / gamma(c(n as f64 + 1.0, 0.0)).unwrap()
                * x.powu(n as u32);
            want += t;
        }
        let got = residue_sum(ResidueKind::LeftGauss, &p, &BranchedComplex::principal(x), 6).unwrap();
        assert!((got - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn first_kummer_residues() {
        let (b, g) = bk();
        let p = Params::kummer(b, g);
        let z = BranchedComplex::polar(2.0, 0.4);
        let want = gamma(1.0 - g).unwrap() * recip_gamma(b + 1.0 - g) + gamma(g - 1.0).unwrap() * recip_gamma(b) * z.powc(1.0 - g);
        assert!((residue_sum(ResidueKind::RightKummer, &p, &z, 0).unwrap() - want).norm() < 1e-14);
        for kind in [ResidueKind::LeftGauss, ResidueKind::RightGauss, ResidueKind::RightKummer] {
            assert_eq!(residue_sum(kind, &p.with_alpha(c(0.3, 0.0)), &z, -1).unwrap(), c(0.0, 0.0));
        }
    }
}
