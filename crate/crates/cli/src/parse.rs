//! Number syntax shared by flags and config files.
//!
//! Reals are decimals or rationals `p/q`. Complex numbers are `re[,im]` or
//! `mag@argdeg`; the polar form also fixes the branch of the argument.

use hypconf::local_frames::BranchedComplex;
use hypconf::C64;

pub fn real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (num(p)?, num(q)?);
            if q == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            p / q
        }
        None => num(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    s.strip_prefix('+').unwrap_or(s).parse::<f64>().map_err(|_| format!("cannot read '{s}' as a number"))
}

/// A point with its branch: polar input keeps the given argument, Cartesian
/// input takes the principal one.
pub fn point(s: &str) -> Result<BranchedComplex, String> {
    if let Some((m, a)) = s.split_once('@') {
        let (m, a) = (real(m)?, real(a)?);
        if m < 0.0 {
            return Err(format!("negative modulus in '{s}'"));
        }
        return Ok(BranchedComplex::polar(m, a.to_radians()));
    }
    let (re, im) = match s.split_once(',') {
        Some((r, i)) => (real(r)?, real(i)?),
        None => (real(s)?, 0.0),
    };
    Ok(BranchedComplex::principal(C64::new(re, im)))
}

pub fn complex(s: &str) -> Result<C64, String> {
    point(s).map(|p| p.value)
}

/// Comma-separated list of reals.
pub fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(real).collect()
}
