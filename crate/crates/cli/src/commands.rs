//! The experiments behind each command.

use crate::config::{Command, FrameChoice, RunConfig};
use crate::report::{Recorded, Report, Value};
use hypconf::batch::{par_map, Exec};
use hypconf::closed_form_monodromy::{gauss_connection, gauss_monodromy, kummer_connection, kummer_monodromy, kummer_stokes, Connection};
use hypconf::confluence_lab::{limit_sweep_with, limit_value, LimitKind};
use hypconf::continuation_oracle::{numeric_gauss_connection, numeric_kummer_connection, numeric_monodromy, numeric_stokes, SEED_R};
use hypconf::hyper_series::f21;
use hypconf::local_frames::{frame_residual, gauss_frame, gauss_frame_rewritten, kummer_formal_frame, kummer_frame_zero, BranchedComplex, FrameValue};
use hypconf::mellin_barnes::{mb_gauss_auto, phi_kummer_auto};
use hypconf::ode_systems::{gauss_system, kummer_system, Family, SingularityLabel};
use hypconf::sampling::Sampler;
use hypconf::scalar_special::{gamma, recip_gamma};
use hypconf::{Mat2, Params, C64};
use std::f64::consts::FRAC_PI_2;

/// A numerical failure inside an experiment (series or integrator gave up).
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeError(pub String);

impl std::fmt::Display for ComputeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn ctx(what: &str) -> impl FnOnce(hypconf::Error) -> ComputeError + '_ {
    move |e| ComputeError(format!("{what}: {e}"))
}

type Out<T> = Result<T, ComputeError>;

const FRAME_TOL: f64 = 1e-15;

pub fn run(cfg: &RunConfig) -> Out<Report> {
    let mut rep = Report::new(cfg.command.name(), cfg.params, cfg.replay_settings());
    let p = cfg.params.unwrap_or_else(|| Params::kummer(C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    match &cfg.command {
        Command::Eval { family, frame, at } => eval(cfg, &mut rep, &p, *family, *frame, at)?,
        Command::Connection { family: Family::Gauss } => {
            let c0 = gauss_connection(Connection::C0Inf, &p).map_err(ctx("C0Inf"))?;
            let c1 = gauss_connection(Connection::C1Inf, &p).map_err(ctx("C1Inf"))?;
            let c01 = gauss_connection(Connection::C01, &p).map_err(ctx("C01"))?;
            let n0 = numeric_gauss_connection(SingularityLabel::Zero, &p).map_err(ctx("continuation to 0"))?;
            let n1 = numeric_gauss_connection(SingularityLabel::One, &p).map_err(ctx("continuation to 1"))?;
            for (n, m) in [("C0Inf", c0), ("C1Inf", c1), ("C01", c01), ("C0Inf numeric", n0), ("C1Inf numeric", n1)] {
                rep.push(n, Value::Matrix(m));
            }
            rep.check("oracle C0Inf", "C0Inf against continuation, relative distance", n0.rel_dist(&c0), cfg.tol("oracle"));
            rep.check("oracle C1Inf", "C1Inf against continuation, relative distance", n1.rel_dist(&c1), cfg.tol("oracle"));
            rep.check("composition", "C0Inf C1Inf^-1 = C01 residual", composition_residual(&p)?, cfg.tol("composition"));
        }
        Command::Connection { family: Family::Kummer } => {
            let ct = kummer_connection(&p).map_err(ctx("Kummer connection"))?;
            let nt = numeric_kummer_connection(&p, SEED_R).map_err(ctx("continuation to 0"))?;
            rep.push("C0Inf", Value::Matrix(ct));
            rep.push("C0Inf numeric", Value::Matrix(nt));
            rep.check("oracle C0Inf", "Kummer C0Inf against continuation, relative distance", nt.rel_dist(&ct), cfg.tol("oracle"));
        }
        Command::Stokes => {
            let (s0, sm1) = kummer_stokes(&p);
            let (n0, nm1) = hypconf::batch::join(|| numeric_stokes(0, &p, SEED_R), || numeric_stokes(-1, &p, SEED_R));
            let n0 = n0.map_err(ctx("Stokes continuation k = 0"))?;
            let nm1 = nm1.map_err(ctx("Stokes continuation k = -1"))?;
            let km = kummer_monodromy(&p).map_err(ctx("Kummer monodromy"))?;
            for (n, m) in [("S0", s0), ("Sm1", sm1), ("S0 numeric", n0), ("Sm1 numeric", nm1)] {
                rep.push(n, Value::Matrix(m));
            }
            rep.check("oracle S0", "S0 against continuation, relative distance", n0.rel_dist(&s0), cfg.tol("oracle"));
            rep.check("oracle Sm1", "Sm1 against continuation, relative distance", nm1.rel_dist(&sm1), cfg.tol("oracle"));
            rep.check("cyclic", "Kummer cyclic relation residual", km.cyclic_residual(), cfg.tol("cyclic"));
        }
        Command::Monodromy { family: Family::Gauss } => {
            let g = gauss_monodromy(&p).map_err(ctx("Gauss monodromy"))?;
            let labels = [(SingularityLabel::Zero, "M0", g.m0), (SingularityLabel::One, "M1", g.m1), (SingularityLabel::Infinity, "MInf", g.m_inf)];
            for (_, n, m) in labels {
                rep.push(n, Value::Matrix(m));
            }
            rep.check("cyclic", "Gauss cyclic relation residual", g.cyclic_residual(), cfg.tol("cyclic"));
            let numeric = par_map(Exec::best(), &labels, |(l, _, _)| numeric_monodromy(Family::Gauss, *l, &p));
            for ((_, n, m), nm) in labels.iter().zip(numeric) {
                let nm = nm.map_err(ctx("monodromy continuation"))?;
                rep.check(format!("oracle {n}"), format!("{n} against continuation, relative distance"), nm.rel_dist(m), cfg.tol("oracle"));
            }
        }
        Command::Monodromy { family: Family::Kummer } => {
            let k = kummer_monodromy(&p).map_err(ctx("Kummer monodromy"))?;
            for (n, m) in [("M0", k.m0t), ("S0", k.s0), ("Sm1", k.sm1), ("ThetaInf", k.theta_inf), ("MInf", k.m_inf())] {
                rep.push(n, Value::Matrix(m));
            }
            rep.check("cyclic", "Kummer cyclic relation residual", k.cyclic_residual(), cfg.tol("cyclic"));
            let nm = numeric_monodromy(Family::Kummer, SingularityLabel::Zero, &p).map_err(ctx("monodromy continuation"))?;
            rep.check("oracle M0", "Kummer M0 against continuation, relative distance", nm.rel_dist(&k.m0t), cfg.tol("oracle"));
        }
        Command::ConfluenceSweep { target, sweep } => {
            let t = target.target(&p).map_err(ctx("limit target"))?;
            let r = limit_sweep_with(Exec::best(), *target, sweep, &t).map_err(ctx("sweep"))?;
            rep.push("target", Value::Matrix(t));
            rep.push("errors", Value::Series(r.per_magnitude_errors.clone()));
            rep.push("fitted_rate", Value::Real(r.fitted_rate));
            rep.push("fit_residual", Value::Real(r.fit_residual));
            rep.check("rate", format!("{} limit: distance of the fitted rate from -1", target.name()), (r.fitted_rate + 1.0).abs(), cfg.tol("rate"));
        }
        Command::MbCheck { family, at } => mb_check(cfg, &mut rep, &p, *family, at)?,
        Command::VerifyAll { seed, draws } => verify_all(cfg, &mut rep, *seed, *draws)?,
    }
    Ok(rep)
}

fn eval(cfg: &RunConfig, rep: &mut Report, p: &Params, family: Family, frame: FrameChoice, at: &BranchedComplex) -> Out<()> {
    let f = |x: &BranchedComplex| -> hypconf::Result<FrameValue> {
        match frame {
            FrameChoice::Gauss(l) => gauss_frame(l, x, p, FRAME_TOL),
            FrameChoice::GaussRewritten(l) => gauss_frame_rewritten(l, x, p, FRAME_TOL),
            FrameChoice::KummerZero => kummer_frame_zero(x, p, FRAME_TOL),
            FrameChoice::KummerFormal => kummer_formal_frame(x, p, None),
        }
    };
    let v = f(at).map_err(ctx("frame"))?;
    rep.push("frame", Value::Matrix(v.matrix));
    rep.push("err_estimate", Value::Real(v.err_estimate));
    rep.push("domain", Value::Text(format!("{:?} k={}", v.domain.kind, v.domain.k)));
    let system = |x: C64| match family {
        Family::Gauss => gauss_system(p, x),
        Family::Kummer => kummer_system(p, x),
    };
    let res = frame_residual(|x| Ok(f(x)?.matrix), system, at).map_err(ctx("frame residual"))?;
    rep.check("frame-residual", "frame does not solve its system: relative residual", res, cfg.tol("frame-residual"));
    Ok(())
}

fn composition_residual(p: &Params) -> Out<f64> {
    let c0 = gauss_connection(Connection::C0Inf, p).map_err(ctx("C0Inf"))?;
    let c1 = gauss_connection(Connection::C1Inf, p).map_err(ctx("C1Inf"))?;
    let c01 = gauss_connection(Connection::C01, p).map_err(ctx("C01"))?;
    let inv = c1.inverse().ok_or_else(|| ComputeError("C1Inf is singular".into()))?;
    Ok((c0 * inv - c01).norm_max() / ((1.0 + c01.norm_max()) * c1.cond_fro()))
}

/// Barnes integral at `x` and its series reference: `ΓαΓβ/Γγ · ₂F₁` inside the unit
/// disk, the two-term connection formula outside.
fn gauss_mb_pair(p: &Params, x: C64) -> Out<(C64, C64, f64)> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let e = ctx;
    let v = mb_gauss_auto(p, &BranchedComplex::principal(x), 1e-12).map_err(e("Barnes integral"))?;
    let want = if x.norm() < 1.0 {
        gamma(a).map_err(e("gamma"))? * gamma(b).map_err(e("gamma"))? * recip_gamma(g) * f21(a, b, g, x, 1e-16).map_err(e("2F1"))?.value
    } else {
        let mx = BranchedComplex::principal(-x);
        let term = |u: C64, w: C64| -> Out<C64> {
            Ok(gamma(u).map_err(e("gamma"))? * gamma(w - u).map_err(e("gamma"))? * recip_gamma(g - u) * mx.powc(-u)
                * f21(u, u + 1.0 - g, u + 1.0 - w, x.inv(), 1e-16).map_err(e("2F1"))?.value)
        };
        term(a, b)? + term(b, a)?
    };
    Ok((v.value, want, v.err_estimate))
}

fn mb_check(cfg: &RunConfig, rep: &mut Report, p: &Params, family: Family, at: &BranchedComplex) -> Out<()> {
    let (got, want, est) = match family {
        Family::Gauss => gauss_mb_pair(p, at.value)?,
        Family::Kummer => {
            // second column of Ỹ^(∞,0) is −(φ, ·)
            let ct = kummer_connection(p).map_err(ctx("Kummer connection"))?;
            let row = kummer_frame_zero(at, p, FRAME_TOL).map_err(ctx("Kummer frame at 0"))?.matrix * ct;
            let v = phi_kummer_auto(p.beta, p.gamma_, at, 1e-12).map_err(ctx("Barnes integral"))?;
            (v.value, -row[(0, 1)], v.err_estimate)
        }
    };
    rep.push("integral", Value::Complex(got));
    rep.push("reference", Value::Complex(want));
    rep.push("err_estimate", Value::Real(est));
    rep.check("mb", "Barnes integral against series reference, relative difference", (got - want).norm() / want.norm().max(1.0), cfg.tol("mb"));
    Ok(())
}

const VERIFY_CHECKS: [(&str, &str); 6] = [
    ("cyclic", "cyclic relation residual"),
    ("composition", "C0Inf C1Inf^-1 = C01 residual"),
    ("oracle", "C0Inf against continuation, relative distance"),
    ("scaled-cyclic", "rescaled cyclic relation at |alpha| = 1e3, relative residual"),
    ("frame-residual", "local frame ODE residual"),
    ("mb", "Barnes integral against 2F1, relative difference"),
];

fn verify_draw(p: &Params, q: &Params) -> Out<[f64; 6]> {
    let e = ctx;
    let cyc = gauss_monodromy(p).map_err(e("Gauss monodromy"))?.cyclic_residual().max(kummer_monodromy(q).map_err(e("Kummer monodromy"))?.cyclic_residual());
    let comp = composition_residual(p)?;
    let c0 = gauss_connection(Connection::C0Inf, p).map_err(e("C0Inf"))?;
    let oracle = numeric_gauss_connection(SingularityLabel::Zero, p).map_err(e("continuation"))?.rel_dist(&c0);
    let a = BranchedComplex::polar(1e3, -FRAC_PI_2);
    let mi = limit_value(LimitKind::MInfLimit, &a, q).map_err(e("rescaled MInf"))?;
    let m0 = limit_value(LimitKind::M0Limit, &a, q).map_err(e("rescaled M0"))?;
    let scaled = (mi * m0 - Mat2::IDENTITY).norm_max() / (mi.norm_max() * m0.norm_max());
    let x = BranchedComplex::principal(C64::new(0.3, 0.2));
    let z = BranchedComplex::principal(C64::new(1.0, 0.5));
    let fr = frame_residual(|x| Ok(gauss_frame(SingularityLabel::Zero, x, p, FRAME_TOL)?.matrix), |x| gauss_system(p, x), &x)
        .map_err(e("Gauss frame residual"))?
        .max(frame_residual(|z| Ok(kummer_frame_zero(z, q, FRAME_TOL)?.matrix), |z| kummer_system(q, z), &z).map_err(e("Kummer frame residual"))?);
    let (got, want, _) = gauss_mb_pair(p, C64::new(0.4, 0.3))?;
    let mb = (got - want).norm() / want.norm().max(1.0);
    Ok([cyc, comp, oracle, scaled, fr, mb])
}

fn verify_all(cfg: &RunConfig, rep: &mut Report, seed: u64, draws: usize) -> Out<()> {
    let mut s = Sampler::new(seed);
    let pairs: Vec<(Params, Params)> = (0..draws).map(|_| (s.gauss(), s.kummer())).collect();
    let outcomes = par_map(Exec::best(), &pairs, |(p, q)| verify_draw(p, q));
    let mut worst = [(0.0f64, 0usize); 6];
    for (i, o) in outcomes.into_iter().enumerate() {
        let o = o.map_err(|e| ComputeError(format!("draw {i}: {e}")))?;
        for (w, v) in worst.iter_mut().zip(o) {
            // NaN counts as worst
            if v.is_nan() || v > w.0 {
                *w = (v, i);
            }
        }
    }
    rep.push("seed", Value::Real(seed as f64));
    for (i, (p, q)) in pairs.iter().enumerate() {
        rep.push(format!("draw {i} gauss"), Value::Params(*p));
        rep.push(format!("draw {i} kummer"), Value::Params(*q));
    }
    for ((name, what), (v, i)) in VERIFY_CHECKS.iter().zip(worst) {
        rep.check(*name, format!("{what} (worst over {draws} draws, at draw {i})"), v, cfg.tol(name));
    }
    Ok(())
}

/// Re-run a recorded report and compare residuals bit for bit.
pub fn replay(recorded: &Recorded, cfg: &RunConfig) -> Out<Report> {
    let fresh = run(cfg)?;
    let mut rep = Report::new("replay", cfg.params, recorded.config.clone());
    rep.push("replayed", Value::Text(recorded.command.clone()));
    if fresh.residuals.len() != recorded.residuals.len() {
        rep.check("count", "number of residuals differs from the report", f64::INFINITY, 0.0);
        return Ok(rep);
    }
    for ((name, old), new) in recorded.residuals.iter().zip(&fresh.residuals) {
        let same = match old {
            Some(o) => o.to_bits() == new.value.to_bits(),
            None => !new.value.is_finite(),
        } && *name == new.name;
        let diff = if same { 0.0 } else { old.map_or(f64::INFINITY, |o| (o - new.value).abs()).max(f64::MIN_POSITIVE) };
        rep.check(format!("replay {name}"), format!("{name} differs from the recorded value by"), diff, 0.0);
    }
    Ok(rep)
}
