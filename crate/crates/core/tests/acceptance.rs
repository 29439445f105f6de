//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//! Each criterion also has a wall-clock budget that counts towards its verdict.

use hypconf::closed_form_monodromy::{gauss_connection, gauss_monodromy, kummer_connection, kummer_monodromy, kummer_stokes, Connection};
use hypconf::confluence_lab::{fuchsian_limit_check, limit_sweep, scaled_connection, LimitKind, RaySweep};
use hypconf::continuation_oracle::{numeric_gauss_connection, numeric_kummer_connection, numeric_stokes, SEED_R};
use hypconf::hyper_series::f21;
use hypconf::local_frames::{
    coeff_ghat_inf, coeff_ghat_one, coeff_h_inf, frame_residual, gauss_frame, gauss_frame_rewritten, kummer_formal_frame_on,
    kummer_frame_zero, BranchedComplex,
};
use hypconf::mellin_barnes::{kummer_true_frame, mb_gauss_auto, phi_kummer_auto};
use hypconf::ode_systems::{gauss_system, kummer_system, SingularityLabel};
use hypconf::sampling::Sampler;
use hypconf::scalar_special::{gamma, recip_gamma};
use hypconf::{Mat2, Params, C64};
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

type Outcome = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn kummer_ref() -> Params {
    Params::kummer(c(1.0 / 3.0, 0.0), c(0.25, 0.0))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cyclic_relations() -> Outcome {
    let mut s = Sampler::new(20_240_601);
    let (mut wg, mut wk) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        wg = wg.max(gauss_monodromy(&s.gauss()).map_err(err)?.cyclic_residual());
        wk = wk.max(kummer_monodromy(&s.kummer()).map_err(err)?.cyclic_residual());
    }
    Ok((wg < 1e-10 && wk < 1e-10, format!("200 draws: Gauss max {wg:.2e}, Kummer max {wk:.2e} (< 1e-10)")))
}

fn gauss_oracle() -> Outcome {
    let mut s = Sampler::new(5);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let p = s.gauss();
        for (lab, con) in [(SingularityLabel::Zero, Connection::C0Inf), (SingularityLabel::One, Connection::C1Inf)] {
            let n = numeric_gauss_connection(lab, &p).map_err(err)?;
            worst = worst.max(n.rel_dist(&gauss_connection(con, &p).map_err(err)?));
        }
    }
    Ok((worst < 1e-6, format!("5 points: max relative Frobenius distance {worst:.2e} (< 1e-6)")))
}

fn kummer_oracle() -> Outcome {
    let points = [kummer_ref(), Params::kummer(c(0.7, 0.2), c(1.4, -0.1)), Params::kummer(c(1.6, -0.3), c(0.55, 0.35))];
    let mut worst = 0.0f64;
    for p in &points {
        let (s0, sm1) = kummer_stokes(p);
        worst = worst.max(numeric_stokes(0, p, SEED_R).map_err(err)?.rel_dist(&s0));
        worst = worst.max(numeric_stokes(-1, p, SEED_R).map_err(err)?.rel_dist(&sm1));
        worst = worst.max(numeric_kummer_connection(p, SEED_R).map_err(err)?.rel_dist(&kummer_connection(p).map_err(err)?));
    }
    Ok((worst < 1e-6, format!("3 points, seeds at |z| = {SEED_R}: max relative distance {worst:.2e} (< 1e-6)")))
}

fn confluence_limits() -> Outcome {
    let p = kummer_ref();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in LimitKind::ALL {
        let r = limit_sweep(k, &RaySweep::default_for(k, p), &k.target(&p).map_err(err)?).map_err(err)?;
        let good = r.is_monotone() && (-1.3..=-0.7).contains(&r.fitted_rate) && r.terminal_error() < 1e-3;
        ok &= good;
        parts.push(format!("{} slope {:.3} end {:.1e}", k.name(), r.fitted_rate, r.terminal_error()));
    }
    Ok((ok, parts.join("; ")))
}

fn opposite_rays() -> Outcome {
    let p = kummer_ref();
    let (s0, sm1) = kummer_stokes(&p);
    let up = scaled_connection(LimitKind::S0Limit, &BranchedComplex::polar(100.0, FRAC_PI_2), &p).map_err(err)?;
    let down = scaled_connection(LimitKind::S0Limit, &BranchedComplex::polar(100.0, -FRAC_PI_2), &p).map_err(err)?;
    let (e21, e12) = (up[(1, 0)].norm(), down[(0, 1)].norm());
    // the same product swept along both rays
    let k = LimitKind::S0Limit;
    let mags = RaySweep::default_for(k, p).magnitudes;
    let ru = limit_sweep(k, &RaySweep::new(FRAC_PI_2, mags.clone(), p).map_err(err)?, &s0).map_err(err)?;
    let rd = limit_sweep(k, &RaySweep::new(-FRAC_PI_2, mags, p).map_err(err)?, &sm1).map_err(err)?;
    let ok = e21 < 1e-10 && e12 < 1e-10 && ru.terminal_error() < 1e-3 && rd.terminal_error() < 1e-3;
    Ok((
        ok,
        format!(
            "|α| = 100: (2,1) on +π/2 {e21:.1e}, (1,2) on −π/2 {e12:.1e}; limits S̃0 {:.1e}, S̃−1 {:.1e}",
            ru.terminal_error(),
            rd.terminal_error()
        ),
    ))
}

fn mellin_barnes() -> Outcome {
    let p = Params::new(c(0.3, 0.0), c(1.1, 0.0), c(0.6, 0.0));
    let (a, b, g) = (p.alpha, p.beta, p.gamma_);
    let pref = gamma(a).map_err(err)? * gamma(b).map_err(err)? * recip_gamma(g);
    let mut inside = 0.0f64;
    for x in [c(-0.4, 0.0), c(0.5, 0.3), c(-0.2, -0.8), c(0.0, 0.9)] {
        let v = mb_gauss_auto(&p, &BranchedComplex::principal(x), 1e-12).map_err(err)?;
        inside = inside.max((v.value - pref * f21(a, b, g, x, 1e-16).map_err(err)?.value).norm());
    }
    let mut outside = 0.0f64;
    for x in [c(-3.0, 0.0), c(2.0, 1.5), c(-1.5, -2.0), c(0.5, -1.4)] {
        let mx = BranchedComplex::principal(-x);
        let term = |u: C64, v: C64| -> Result<C64, String> {
            Ok(gamma(u).map_err(err)? * gamma(v - u).map_err(err)? * recip_gamma(g - u) * mx.powc(-u)
                * f21(u, u + 1.0 - g, u + 1.0 - v, x.inv(), 1e-16).map_err(err)?.value)
        };
        let want = term(a, b)? + term(b, a)?;
        let v = mb_gauss_auto(&p, &BranchedComplex::principal(x), 1e-12).map_err(err)?;
        outside = outside.max((v.value - want).norm());
    }
    // φ against the first row of Ỹ^(0) C̃^{0∞}: ỹ2^(∞,0) = −φ
    let q = kummer_ref();
    let ct = kummer_connection(&q).map_err(err)?;
    let mut kum = 0.0f64;
    for z in [BranchedComplex::polar(1.5, -PI / 3.0), BranchedComplex::polar(0.7, 1.2), BranchedComplex::polar(4.0, 0.2), BranchedComplex::polar(2.5, -1.4)] {
        let row = kummer_frame_zero(&z, &q, 1e-15).map_err(err)?.matrix * ct;
        let phi = phi_kummer_auto(q.beta, q.gamma_, &z, 1e-12).map_err(err)?;
        kum = kum.max((phi.value + row[(0, 1)]).norm());
    }
    Ok((
        inside < 1e-9 && outside < 1e-8 && kum < 1e-8,
        format!("inside {inside:.1e} (< 1e-9), outside {outside:.1e} (< 1e-8), Kummer {kum:.1e} (< 1e-8)"),
    ))
}

// 10 points across Σ̃_k, 0.3 rad inside its edges, |z| from 40 to 85
fn sector_points(k: i32) -> Vec<BranchedComplex> {
    (0..10)
        .map(|i| {
            let th = k as f64 * PI - FRAC_PI_2 + 0.3 + (2.0 * PI - 0.6) * i as f64 / 9.0;
            BranchedComplex::polar(40.0 + 5.0 * i as f64, th)
        })
        .collect()
}

fn asymptotic_seeding() -> Outcome {
    let p = kummer_ref();
    let mut worst = 0.0f64;
    for k in [-1, 0] {
        for z in sector_points(k) {
            let f = kummer_formal_frame_on(k, &z, &p, None).map_err(err)?;
            let t = kummer_true_frame(k, &p, &z, 1e-13).map_err(err)?;
            for i in 0..2 {
                for j in 0..2 {
                    let d = (f.matrix[(i, j)] - t.matrix[(i, j)]).norm();
                    worst = worst.max(d / (f.entry_err[i][j] + t.entry_err[i][j]));
                }
            }
        }
    }
    Ok((worst < 1.0, format!("20 points: max |formal − true| / reported error = {worst:.12} (margin {:.1e})", 1.0 - worst)))
}

fn frame_residuals() -> Outcome {
    let pg = Params::new(c(0.31, 0.1), c(1.27, -0.2), c(0.48, 0.05));
    let pk = kummer_ref();
    let gs = |x: C64| gauss_system(&pg, x);
    let ks = |z: C64| kummer_system(&pk, z);
    let mut worst = 0.0f64;
    let mut take = |r: hypconf::Result<f64>| -> Result<(), String> {
        worst = worst.max(r.map_err(err)?);
        Ok(())
    };
    let pr = BranchedComplex::principal;
    for x in [c(0.25, 0.0), c(-0.5, 0.3), c(0.1, -0.8)] {
        take(frame_residual(|x| Ok(gauss_frame(SingularityLabel::Zero, x, &pg, 1e-15)?.matrix), gs, &pr(x)))?;
    }
    for x in [c(0.6, 0.2), c(1.5, -0.3), c(1.0, 0.8)] {
        take(frame_residual(|x| Ok(gauss_frame(SingularityLabel::One, x, &pg, 1e-15)?.matrix), gs, &pr(x)))?;
    }
    for x in [c(-2.0, 1.5), c(3.0, 0.5), c(0.2, -1.6)] {
        take(frame_residual(|x| Ok(gauss_frame(SingularityLabel::Infinity, x, &pg, 1e-15)?.matrix), gs, &pr(x)))?;
        take(frame_residual(|x| Ok(gauss_frame_rewritten(SingularityLabel::Infinity, x, &pg, 1e-15)?.matrix), gs, &pr(x)))?;
    }
    for x in [c(1.2, 0.1), c(1.5, -0.5), c(0.9, 0.4)] {
        take(frame_residual(|x| Ok(gauss_frame_rewritten(SingularityLabel::One, x, &pg, 1e-15)?.matrix), gs, &pr(x)))?;
    }
    for z in [BranchedComplex::polar(0.5, -PI), BranchedComplex::polar(2.0, 0.3), BranchedComplex::polar(5.0, -1.3 * PI)] {
        take(frame_residual(|z| Ok(kummer_frame_zero(z, &pk, 1e-15)?.matrix), ks, &z))?;
    }
    for k in [-1, 0] {
        for z in [BranchedComplex::polar(60.0, k as f64 * PI + 0.5), BranchedComplex::polar(80.0, k as f64 * PI + 2.5)] {
            take(frame_residual(|z| Ok(kummer_formal_frame_on(k, z, &pk, None)?.matrix), ks, &z))?;
            take(frame_residual(|z| Ok(kummer_true_frame(k, &pk, z, 1e-14)?.matrix), ks, &z))?;
        }
    }
    Ok((worst < 1e-6, format!("8 frame kinds, 30 points: max relative residual {worst:.2e} (< 1e-6)")))
}

fn coefficient_limits() -> Outcome {
    let p = kummer_ref();
    let mut worst = 0.0f64;
    let one = c(1.0, 0.0);
    for a in [c(0.0, 1e5), c(0.0, -1e5)] {
        let pa = p.with_alpha(a);
        for n in 0..=5usize {
            let h = coeff_h_inf(n, &p);
            let gi = Mat2::diag(one, a) * coeff_ghat_inf(n, &pa).map_err(err)? * Mat2::diag(one, a.inv());
            let g1 = Mat2::diag(one, -a) * coeff_ghat_one(n, &pa).map_err(err)? * Mat2::diag(one, -a.inv());
            worst = worst.max((gi.scale(a.powu(n as u32)) - h).norm_max());
            worst = worst.max((g1.scale((-a).powu(n as u32)) - h).norm_max());
        }
    }
    Ok((worst < 1e-3, format!("n ≤ 5, α = ±10^5 i: max entry error {worst:.2e} (< 1e-3)")))
}

fn fuchsian_point() -> Outcome {
    let p = kummer_ref();
    let alpha = BranchedComplex::polar(1e4, -FRAC_PI_2);
    let zs = [
        BranchedComplex::polar(0.5, -FRAC_PI_2),
        BranchedComplex::polar(0.4, 0.3),
        BranchedComplex::polar(0.3, -PI),
        BranchedComplex::polar(0.2, -1.4 * PI),
        BranchedComplex::polar(0.1, 0.45 * PI),
    ];
    let mut worst = 0.0f64;
    for z in &zs {
        worst = worst.max(fuchsian_limit_check(z, &alpha, &p).map_err(err)?);
    }
    Ok((worst < 1e-3, format!("5 points, |α| = 10^4: max {worst:.2e} (< 1e-3)")))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 10] = [
        ("cyclic relations", 5.0, cyclic_relations),
        ("Gauss oracle equivalence", 20.0, gauss_oracle),
        ("Kummer oracle equivalence", 20.0, kummer_oracle),
        ("confluence limits", 5.0, confluence_limits),
        ("opposite-ray dichotomy", 2.0, opposite_rays),
        ("Mellin-Barnes reductions", 30.0, mellin_barnes),
        ("asymptotic seeding soundness", 10.0, asymptotic_seeding),
        ("frame ODE residuals", 5.0, frame_residuals),
        ("coefficient limits", 1.0, coefficient_limits),
        ("Fuchsian-point limit", 2.0, fuchsian_point),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let (ok, detail) = match out {
            Ok((ok, d)) => (ok && secs < *budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail} [{secs:.2} s, budget {budget} s]", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
