//! Numerical analytic continuation: adaptive Dormand–Prince 5(4) integration of
//! `Y' = A Y` along piecewise line/arc paths, parameterised by arclength.

use crate::local_frames::{
    gauss_frame, gauss_frame_rewritten, kummer_formal_frame, kummer_frame_zero, BranchedComplex, FrameValue,
};
use crate::ode_systems::{gauss_residues, kummer_residue, Family, SingularityLabel};
use crate::{c, Error, Mat2, Params, Result, C64, DEFAULT_TOL};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Arc of `center + radius·e^{iθ}` for θ from `theta0` to `theta1` (either direction).
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn start(&self) -> C64 {
        self.at(0.0).0
    }

    pub fn end(&self) -> C64 {
        self.at(self.length()).0
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    /// Point and unit-speed derivative at arclength `s`.
    pub fn at(&self, s: f64) -> (C64, C64) {
        match *self {
            Segment::Line { from, to } => {
                let len = (to - from).norm();
                if len == 0.0 {
                    return (from, c(0.0, 0.0));
                }
                let d = (to - from) / len;
                (from + d * s, d)
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                let dir = (theta1 - theta0).signum();
                let th = theta0 + dir * s / radius;
                let e = C64::from_polar(1.0, th);
                (center + e * radius, c(0.0, dir) * e)
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, theta0, theta1 } => Segment::Arc { center, radius, theta0: theta1, theta1: theta0 },
        }
    }

    fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                if l2 == 0.0 {
                    return (p - from).norm();
                }
                let t = (((p - from) * d.conj()).re / l2).clamp(0.0, 1.0);
                (p - (from + d * t)).norm()
            }
            Segment::Arc { .. } => {
                let n = 2048;
                let len = self.length();
                (0..=n).map(|k| (self.at(len * k as f64 / n as f64).0 - p).norm()).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
    pub max_step: f64,
    pub tol: f64,
    pub clearance: f64,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>) -> Self {
        PathSpec { segments, max_step: 0.5, tol: DEFAULT_TOL, clearance: 1e-3 }
    }

    pub fn line(from: C64, to: C64) -> Self {
        PathSpec::new(vec![Segment::Line { from, to }])
    }

    pub fn then_line(mut self, to: C64) -> Self {
        let from = self.end();
        self.segments.push(Segment::Line { from, to });
        self
    }

    /// Continue along the circle about `center` through the current end point,
    /// turning by `dtheta` (positive is anticlockwise).
    pub fn then_arc(mut self, center: C64, dtheta: f64) -> Self {
        let from = self.end();
        let radius = (from - center).norm();
        let theta0 = (from - center).arg();
        self.segments.push(Segment::Arc { center, radius, theta0, theta1: theta0 + dtheta });
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn start(&self) -> C64 {
        self.segments.first().map(|s| s.start()).unwrap_or(c(0.0, 0.0))
    }

    pub fn end(&self) -> C64 {
        self.segments.last().map(|s| s.end()).unwrap_or(c(0.0, 0.0))
    }

    pub fn reversed(&self) -> PathSpec {
        PathSpec { segments: self.segments.iter().rev().map(|s| s.reversed()).collect(), ..self.clone() }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    fn validate(&self, family: Family) -> Result<()> {
        if self.tol <= 0.0 || self.max_step <= 0.0 {
            return Err(Error::InvalidPath("tolerance and max_step must be positive".into()));
        }
        for w in self.segments.windows(2) {
            let gap = (w[0].end() - w[1].start()).norm();
            if gap > 1e-12 * (1.0 + w[0].end().norm()) {
                return Err(Error::InvalidPath(format!("segments do not join (gap {gap:e})")));
            }
        }
        let sing: &[C64] = match family {
            Family::Gauss => &[c(0.0, 0.0), c(1.0, 0.0)],
            Family::Kummer => &[c(0.0, 0.0)],
        };
        for (i, s) in self.segments.iter().enumerate() {
            for &p in sing {
                let d = s.distance_to(p);
                if d < self.clearance {
                    return Err(Error::InvalidPath(format!("segment {i} passes within {d:e} of singular point {p}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportResult {
    pub matrix: Mat2,
    pub step_count: usize,
    pub err_estimate: f64,
}

#[derive(Clone, Copy)]
enum Coeffs {
    Gauss(Mat2, Mat2),
    Kummer(Mat2),
}

impl Coeffs {
    fn new(family: Family, p: &Params) -> Result<Self> {
        Ok(match family {
            Family::Gauss => {
                let (a0, a1) = gauss_residues(p)?;
                Coeffs::Gauss(a0, a1)
            }
            Family::Kummer => Coeffs::Kummer(kummer_residue(p)?),
        })
    }

    #[inline]
    fn eval(&self, z: C64) -> Mat2 {
        match *self {
            Coeffs::Gauss(a0, a1) => a0.scale(z.inv()) + a1.scale((z - 1.0).inv()),
            Coeffs::Kummer(a0) => {
                let mut m = a0.scale(z.inv());
                m[(0, 0)] += 1.0;
                m
            }
        }
    }
}

// Dormand–Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin(terms: &[(f64, &Mat2)]) -> Mat2 {
    let mut out = Mat2::ZERO;
    for (w, m) in terms {
        if *w != 0.0 {
            out = out + m.scale(c(*w, 0.0));
        }
    }
    out
}

// Column-wise relative error norm.
fn err_norm(err: &Mat2, y: &Mat2, tol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        let e = err[(0, j)].norm().max(err[(1, j)].norm());
        let s = y[(0, j)].norm().max(y[(1, j)].norm());
        worst = worst.max(e / (tol * s + 1e-300));
    }
    worst
}

fn transport_segment(seg: &Segment, idx: usize, coeffs: &Coeffs, y0: Mat2, path: &PathSpec, steps: &mut usize, err: &mut f64) -> Result<Mat2> {
    let len = seg.length();
    if len == 0.0 {
        return Ok(y0);
    }
    let f = |s: f64, y: &Mat2| {
        let (z, dz) = seg.at(s);
        coeffs.eval(z).scale(dz) * *y
    };
    let mut y = y0;
    let mut s = 0.0;
    let mut h = path.max_step.min(len).min(0.05);
    let mut k1 = f(s, &y);
    while s < len {
        if s + h > len {
            h = len - s;
        }
        let k2 = f(s + h / 5.0, &(y + lin(&[(h * A21, &k1)])));
        let k3 = f(s + 3.0 * h / 10.0, &(y + lin(&[(h * A31, &k1), (h * A32, &k2)])));
        let k4 = f(s + 4.0 * h / 5.0, &(y + lin(&[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)])));
        let k5 = f(s + 8.0 * h / 9.0, &(y + lin(&[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)])));
        let k6 = f(s + h, &(y + lin(&[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)])));
        let y_new = y + lin(&[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
        let k7 = f(s + h, &y_new);
        let e = lin(&[(h * E1, &k1), (h * E3, &k3), (h * E4, &k4), (h * E5, &k5), (h * E6, &k6), (h * E7, &k7)]);
        let en = err_norm(&e, &y_new, path.tol);
        *steps += 1;
        if *steps > 2_000_000 {
            return Err(Error::StepBudget { segment: idx });
        }
        if en <= 1.0 {
            s += h;
            y = y_new;
            k1 = k7;
            *err += en * path.tol;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(path.max_step);
        if h < 1e-13 * len.max(1.0) && s < len {
            return Err(Error::StepCollapse { segment: idx, at: s });
        }
    }
    Ok(y)
}

/// Continue `y0` along `path` as a solution of the chosen system.
pub fn transport(path: &PathSpec, family: Family, p: &Params, y0: Mat2) -> Result<TransportResult> {
    path.validate(family)?;
    let coeffs = Coeffs::new(family, p)?;
    let mut y = y0;
    let mut steps = 0;
    let mut err = 0.0;
    for (i, seg) in path.segments.iter().enumerate() {
        y = transport_segment(seg, i, &coeffs, y, path, &mut steps, &mut err)?;
    }
    Ok(TransportResult { matrix: y, step_count: steps, err_estimate: err })
}

/// A frame evaluable at a point, used as the start or end of a continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameSpec {
    Gauss(SingularityLabel, BranchedComplex),
    GaussRewritten(SingularityLabel, BranchedComplex),
    KummerZero(BranchedComplex),
    /// Formal frame at infinity with optimal truncation; the argument picks the sheet.
    KummerFormal(BranchedComplex),
}

impl FrameSpec {
    pub fn point(&self) -> C64 {
        match self {
            FrameSpec::Gauss(_, x) | FrameSpec::GaussRewritten(_, x) | FrameSpec::KummerZero(x) | FrameSpec::KummerFormal(x) => x.value,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            FrameSpec::Gauss(..) | FrameSpec::GaussRewritten(..) => Family::Gauss,
            _ => Family::Kummer,
        }
    }

    pub fn evaluate(&self, p: &Params) -> Result<FrameValue> {
        match self {
            FrameSpec::Gauss(l, x) => gauss_frame(*l, x, p, 1e-15),
            FrameSpec::GaussRewritten(l, x) => gauss_frame_rewritten(*l, x, p, 1e-15),
            FrameSpec::KummerZero(z) => kummer_frame_zero(z, p, 1e-15),
            FrameSpec::KummerFormal(z) => kummer_formal_frame(z, p, None),
        }
    }
}

/// Evaluate `from` at the path start, transport it, and express the result in
/// the `to` frame at the path end: returns `C` with `continued = to · C`.
pub fn numeric_connection(from: &FrameSpec, to: &FrameSpec, path: &PathSpec, p: &Params) -> Result<Mat2> {
    let near = |a: C64, b: C64| (a - b).norm() <= 1e-12 * (1.0 + a.norm());
    if !near(from.point(), path.start()) || !near(to.point(), path.end()) {
        return Err(Error::InvalidPath("frame points do not match the path end points".into()));
    }
    let y0 = from.evaluate(p)?.matrix;
    let moved = transport(path, from.family(), p, y0)?.matrix;
    let target = to.evaluate(p)?.matrix;
    solve_frame(&target, &moved)
}

fn solve_frame(target: &Mat2, moved: &Mat2) -> Result<Mat2> {
    let cond = target.cond_fro();
    if cond > 1e8 {
        return Err(Error::IllConditioned { cond });
    }
    Ok(target.inverse().ok_or(Error::IllConditioned { cond })? * *moved)
}

/// Default radius of the circle on which Stokes data are compared.
pub const STOKES_MEET_RADIUS: f64 = 2.0;

/// Path from the bisector seed of Σ̃_k at radius `r` inward to the meeting circle
/// and along it to argument `meet_arg`.
fn sector_path(k: i32, r: f64, meet_arg: f64, tol: f64) -> (BranchedComplex, PathSpec) {
    let th = k as f64 * PI + 0.5 * PI;
    let seed = BranchedComplex::polar(r, th);
    let inner = C64::from_polar(STOKES_MEET_RADIUS, th);
    let path = PathSpec::line(seed.value, inner).then_arc(c(0.0, 0.0), meet_arg - th).with_tol(tol).with_max_step(1.0);
    (seed, path)
}

/// Stokes matrix `S̃_k` with `Ỹ^{(∞,k+1)} = Ỹ^{(∞,k)} S̃_k`, from formal seeds at `|z| = seed_r`.
pub fn numeric_stokes(k: i32, p: &Params, seed_r: f64) -> Result<Mat2> {
    let meet = k as f64 * PI + PI;
    let (s_a, path_a) = sector_path(k, seed_r, meet, 1e-13);
    let (s_b, path_b) = sector_path(k + 1, seed_r, meet, 1e-13);
    let run = |seed: BranchedComplex, path: PathSpec| -> Result<Mat2> {
        let y0 = kummer_formal_frame(&seed, p, None)?.matrix;
        Ok(transport(&path, Family::Kummer, p, y0)?.matrix)
    };
    let (ya, yb) = crate::batch::join(|| run(s_a, path_a), || run(s_b, path_b));
    solve_frame(&ya?, &yb?)
}

/// Default seed radius for formal frames.
pub const SEED_R: f64 = 200.0;

/// Ỹ^{(∞,0)} continued from its bisector seed to `z = r0 > 0`.
fn kummer_inf0_at(p: &Params, seed_r: f64, r0: f64) -> Result<Mat2> {
    let seed = BranchedComplex::polar(seed_r, 0.5 * PI);
    let path = PathSpec::line(seed.value, c(0.0, r0)).then_arc(c(0.0, 0.0), -0.5 * PI).with_tol(1e-13).with_max_step(1.0);
    let y0 = kummer_formal_frame(&seed, p, None)?.matrix;
    Ok(transport(&path, Family::Kummer, p, y0)?.matrix)
}

/// `C̃^{0∞}` by continuation of the formal seed on the positive imaginary axis to `z = 1/2`.
pub fn numeric_kummer_connection(p: &Params, seed_r: f64) -> Result<Mat2> {
    let moved = kummer_inf0_at(p, seed_r, 0.5)?;
    let target = kummer_frame_zero(&BranchedComplex::polar(0.5, 0.0), p, 1e-15)?.matrix;
    solve_frame(&target, &moved)
}

/// `C^{0∞}` or `C^{1∞}` for the Gauss equation: `Y^{(∞)}` is continued from
/// `x = 2i` (or `1 + 2i`) down to `x = i/2` (or `1 + i/2`) and expressed in the
/// local frame there, so `Y^{(∞)} = Y^{(k)} C^{k∞}` in the upper half-plane.
pub fn numeric_gauss_connection(from: SingularityLabel, p: &Params) -> Result<Mat2> {
    let (near, far) = match from {
        SingularityLabel::Zero => (c(0.0, 0.5), c(0.0, 2.0)),
        SingularityLabel::One => (c(1.0, 0.5), c(1.0, 2.0)),
        SingularityLabel::Infinity => return Ok(Mat2::IDENTITY),
    };
    let path = PathSpec::line(far, near).with_tol(1e-13);
    numeric_connection(
        &FrameSpec::Gauss(SingularityLabel::Infinity, BranchedComplex::principal(far)),
        &FrameSpec::Gauss(from, BranchedComplex::principal(near)),
        &path,
        p,
    )
}

/// Base point of the Gauss monodromy loops.
pub const GAUSS_BASE: f64 = -2.0;
/// Radius of the loops about 0 and 1.
pub const LOOP_RADIUS: f64 = 0.4;

/// Anticlockwise loop based at `x = −2` around the given Gauss singular point.
/// The loop about infinity encircles both finite points clockwise.
pub fn gauss_loop(label: SingularityLabel) -> PathSpec {
    let base = c(GAUSS_BASE, 0.0);
    let path = match label {
        SingularityLabel::Zero => PathSpec::line(base, c(-LOOP_RADIUS, 0.0))
            .then_arc(c(0.0, 0.0), 2.0 * PI)
            .then_line(base),
        SingularityLabel::One => PathSpec::line(base, c(1.0, LOOP_RADIUS))
            .then_arc(c(1.0, 0.0), 2.0 * PI)
            .then_line(base),
        SingularityLabel::Infinity => PathSpec::line(base, c(-1.5, 0.0)).then_arc(c(0.5, 0.0), -2.0 * PI).then_line(base),
    };
    path.with_tol(1e-13)
}

/// Monodromy of the reference frame along the default loop: `Y^{(∞)}` at `x = −2`
/// for Gauss, `Ỹ^{(∞,0)}` at `z = 1/2` for Kummer (loop of radius 1/2 about 0).
pub fn numeric_monodromy(family: Family, label: SingularityLabel, p: &Params) -> Result<Mat2> {
    match family {
        Family::Gauss => {
            let base = gauss_frame(SingularityLabel::Infinity, &BranchedComplex::principal(c(GAUSS_BASE, 0.0)), p, 1e-15)?.matrix;
            let moved = transport(&gauss_loop(label), Family::Gauss, p, base)?.matrix;
            solve_frame(&base, &moved)
        }
        Family::Kummer => {
            let base = kummer_inf0_at(p, SEED_R, 0.5)?;
            let lp = PathSpec::new(vec![Segment::Arc { center: c(0.0, 0.0), radius: 0.5, theta0: 0.0, theta1: 2.0 * PI }]).with_tol(1e-13);
            let moved = transport(&lp, Family::Kummer, p, base)?.matrix;
            let m0 = solve_frame(&base, &moved)?;
            match label {
                SingularityLabel::Zero => Ok(m0),
                _ => m0.inverse().ok_or(Error::IllConditioned { cond: f64::INFINITY }),
            }
        }
    }
}
