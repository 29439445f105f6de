//! Hypergeometric series engines.
//!
//! Convergent series stop once a rigorous geometric majorant certifies the
//! tail; the reported error adds a rounding allowance of `ε·Σ|tₙ|`, which
//! matters when terms cancel (e.g. ₁F₁ at large negative argument).

use crate::{c, Error, Result, C64, TERM_CAP};

pub use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub err_estimate: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    fn exact(value: C64, terms_used: usize) -> Self {
        SeriesValue { value, err_estimate: 0.0, terms_used }
    }
}

// Upper bound of |p + m| / |q + m| over m >= n, given n + Re q > 0.
fn ratio_sup(p: C64, q: C64, n: f64) -> f64 {
    let num = n + p.norm();
    let den = n + q.re;
    (num / den).max(1.0)
}

// Shared driver: term_{n+1} = term_n * step(n), tail majorant rate(n) for m >= n.
fn sum_series(
    step: impl Fn(usize) -> C64,
    rate: impl Fn(usize) -> Option<f64>,
    tol: f64,
    cap: usize,
) -> Result<SeriesValue> {
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut bound = f64::INFINITY;
    for n in 0..cap {
        term *= step(n);
        if term.norm() == 0.0 {
            // terminating series
            return Ok(SeriesValue {
                value: sum,
                err_estimate: f64::EPSILON * abs_sum,
                terms_used: n + 1,
            });
        }
        sum += term;
        abs_sum += term.norm();
        if let Some(r) = rate(n + 1) {
            if r < 1.0 {
                bound = term.norm() * r / (1.0 - r);
                if bound <= tol * sum.norm().max(1.0) {
                    return Ok(SeriesValue {
                        value: sum,
                        err_estimate: bound + 4.0 * f64::EPSILON * abs_sum,
                        terms_used: n + 2,
                    });
                }
            }
        }
    }
    Err(Error::NoConvergence { tol, terms: cap, bound })
}

/// Gauss series ₂F₁(a, b; c; x) for |x| < 1.
///
/// Tolerance is relative once the partial sum exceeds one in modulus.
pub fn f21(a: C64, b: C64, cc: C64, x: C64, tol: f64) -> Result<SeriesValue> {
    f21_capped(a, b, cc, x, tol, TERM_CAP)
}

pub fn f21_capped(a: C64, b: C64, cc: C64, x: C64, tol: f64, cap: usize) -> Result<SeriesValue> {
    if x.norm() >= 1.0 {
        return Err(Error::Domain(format!("f21 needs |x| < 1, got |x| = {}", x.norm())));
    }
    if crate::scalar_special::is_nonpositive_integer(cc) {
        return Err(Error::Domain(format!("f21 lower parameter c = {cc} is a nonpositive integer")));
    }
    if x.norm() == 0.0 {
        return Ok(SeriesValue::exact(c(1.0, 0.0), 1));
    }
    let ax = x.norm();
    sum_series(
        |n| {
            let nf = n as f64;
            x * (a + nf) * (b + nf) / ((cc + nf) * (nf + 1.0))
        },
        |n| {
            let nf = n as f64;
            if nf + cc.re <= 0.0 {
                return None;
            }
            Some(ax * ratio_sup(a, cc, nf) * ratio_sup(b, c(1.0, 0.0), nf))
        },
        tol,
        cap,
    )
}

/// Kummer series ₁F₁(a; c; z), entire in z.
pub fn f11(a: C64, cc: C64, z: C64, tol: f64) -> Result<SeriesValue> {
    if crate::scalar_special::is_nonpositive_integer(cc) {
        return Err(Error::Domain(format!("f11 lower parameter c = {cc} is a nonpositive integer")));
    }
    if z.norm() == 0.0 {
        return Ok(SeriesValue::exact(c(1.0, 0.0), 1));
    }
    let az = z.norm();
    sum_series(
        |n| {
            let nf = n as f64;
            z * (a + nf) / ((cc + nf) * (nf + 1.0))
        },
        |n| {
            let nf = n as f64;
            if nf + cc.re <= 0.0 {
                return None;
            }
            Some(az * ratio_sup(a, cc, nf) / (nf + 1.0))
        },
        tol,
        TERM_CAP,
    )
}

/// Optimally truncated ₂F₀(a, b; w) = Σ (a)ₙ(b)ₙ wⁿ / n!.
///
/// Summation stops before the first term that fails to decrease in modulus;
/// that term's modulus is the error estimate.
pub fn f20_asymptotic(a: C64, b: C64, w: C64) -> Result<SeriesValue> {
    f20_truncated(a, b, w, None)
}

/// ₂F₀ truncated after `n_max` terms (or optimally when `None`).
pub fn f20_truncated(a: C64, b: C64, w: C64, n_max: Option<usize>) -> Result<SeriesValue> {
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    for n in 0..TERM_CAP {
        let nf = n as f64;
        let next = term * (a + nf) * (b + nf) * w / (nf + 1.0);
        if next.norm() == 0.0 {
            return Ok(SeriesValue { value: sum, err_estimate: 0.0, terms_used: n + 1 });
        }
        match n_max {
            Some(m) if n >= m => {
                return Ok(SeriesValue {
                    value: sum,
                    err_estimate: next.norm() + f64::EPSILON * abs_sum,
                    terms_used: n + 1,
                })
            }
            Some(_) => {}
            None => {
                if next.norm() >= term.norm() {
                    if n == 0 {
                        return Err(Error::DivergentImmediately { t0: term.norm(), t1: next.norm() });
                    }
                    return Ok(SeriesValue {
                        value: sum,
                        err_estimate: next.norm() + f64::EPSILON * abs_sum,
                        terms_used: n + 1,
                    });
                }
            }
        }
        term = next;
        sum += term;
        abs_sum += term.norm();
    }
    Err(Error::NoConvergence { tol: 0.0, terms: TERM_CAP, bound: term.norm() })
}
