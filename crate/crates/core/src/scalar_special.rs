//! Complex gamma-family functions.
//!
//! `log_gamma` uses the g = 7, n = 9 Lanczos approximation on `Re z >= 1/2` and
//! the reflection formula elsewhere. `ln sin(πz)` is evaluated through its
//! dominant exponential so that arguments with large imaginary part do not
//! overflow; this is what makes `|α| ~ 10^5` on the imaginary axis usable.

use crate::{c, Error, Result, C64};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// True when `z` is exactly a nonpositive integer.
pub fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Distance from `z` to the nearest integer.
pub fn dist_to_integer(z: C64) -> f64 {
    (z - c(z.re.round(), 0.0)).norm()
}

fn log_gamma_right(z: C64) -> C64 {
    let zm = z - 1.0;
    let mut x = c(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    (zm + 0.5) * t.ln() - t + LN_SQRT_2PI + x.ln()
}

/// `ln sin(πz)` modulo 2πi, stable for large `|Im z|`.
pub fn ln_sin_pi(z: C64) -> C64 {
    let i = c(0.0, 1.0);
    if z.im.abs() < 1.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
        -i * PI * z + c(0.0, 0.5).ln() + (c(1.0, 0.0) - (i * 2.0 * PI * z).exp()).ln()
    } else {
        // sin(πz) = (-i/2) e^{iπz} (1 - e^{-2iπz})
        i * PI * z + c(0.0, -0.5).ln() + (c(1.0, 0.0) - (-i * 2.0 * PI * z).exp()).ln()
    }
}

/// Logarithm of Γ(z).
///
/// For `Re z >= 1/2` this is the analytic branch continued from the positive
/// axis; on the reflected half-plane it agrees with it modulo `2πi`, so
/// `exp(log_gamma(z)) = Γ(z)` everywhere.
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { what: "z".into(), at: z });
    }
    if z.re >= 0.5 {
        Ok(log_gamma_right(z))
    } else {
        Ok(LN_PI - ln_sin_pi(z) - log_gamma_right(1.0 - z))
    }
}

pub fn gamma(z: C64) -> Result<C64> {
    log_gamma(z).map(|l| l.exp())
}

/// 1/Γ(z), exactly zero at the poles of Γ.
pub fn recip_gamma(z: C64) -> C64 {
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => c(0.0, 0.0),
    }
}

/// Rising factorial (a)_n by direct product.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    let mut p = c(1.0, 0.0);
    for k in 0..n {
        p *= a + k as f64;
    }
    p
}

/// `e^w − 1` without cancellation for small `w`.
pub fn exp_m1(w: C64) -> C64 {
    if w.norm() < 1e-5 {
        w * (1.0 + w * (0.5 + w / 6.0))
    } else {
        w.exp() - 1.0
    }
}

/// `a^{c−b} Γ(a+b)/Γ(a+c) − 1`, which is O(1/|a|) as `|a| → ∞` in `|arg a| < π`.
pub fn gamma_ratio_limit_residual(a: C64, b: C64, cc: C64) -> Result<C64> {
    let lb = log_gamma(a + b).map_err(|_| Error::Pole { what: "a+b".into(), at: a + b })?;
    let lc = log_gamma(a + cc).map_err(|_| Error::Pole { what: "a+c".into(), at: a + cc })?;
    let w = (cc - b) * a.ln() + (lb - lc);
    Ok(exp_m1(w))
}


#[cfg(test)]
mod tests {
    use super::oracle::gamma_ref;
    use super::*;
    use proptest::prelude::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn trivial_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half - c(0.572_364_942_924_700_1, 0.0)).norm() < 1e-14);
        assert_eq!(recip_gamma(c(-1.0, 0.0)), c(0.0, 0.0));
        assert!((recip_gamma(c(2.0, 0.0)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn pole_is_an_error() {
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole { .. })));
        assert!(log_gamma(c(-3.0, 1e-12)).is_ok());
    }

    #[test]
    fn oracle_agrees_at_4_plus_3i() {
        let z = c(4.0, 3.0);
        assert!(rel(gamma(z).unwrap(), gamma_ref(z)) < 1e-13);
        // reference value (50-digit evaluation)
        let frozen = c(-1.129_428_493_532_054_1, -1.511_251_952_289_956_2);
        assert!(rel(gamma(z).unwrap(), frozen) < 1e-13);
    }

    #[test]
    fn oracle_agrees_on_grid() {
        for i in -20..=20 {
            for j in -20..=20 {
                let z = c(0.37 + 2.5 * i as f64, 0.21 + 2.5 * j as f64);
                if z.norm() > 100.0 {
                    continue;
                }
                let a = log_gamma(z).unwrap().exp();
                let b = gamma_ref(z);
                if b.norm() < 1e-300 || !b.is_finite() {
                    continue;
                }
                // reflection loses about |z| ulps
                assert!(rel(a, b) < 1e-14 * z.norm().max(10.0), "z = {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn recip_consistent_with_log_gamma() {
        let z = c(0.3, 0.7);
        assert!(rel(recip_gamma(z), (-log_gamma(z).unwrap()).exp()) < 1e-13);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(c(0.3, 0.2), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(1.0, 0.0), 4), c(24.0, 0.0));
        let a = c(0.5, 1.0);
        let via_gamma = gamma_ref(a + 6.0) / gamma_ref(a);
        assert!(rel(pochhammer(a, 6), via_gamma) < 1e-12);
    }

    #[test]
    fn ratio_residual_examples() {
        let a = c(0.0, 0.0);
        assert_eq!(gamma_ratio_limit_residual(c(3.0, 1.0), a, a).unwrap(), c(0.0, 0.0));
        let r3 = gamma_ratio_limit_residual(c(0.0, 1e3), c(0.2, 0.0), c(0.9, 0.0)).unwrap().norm();
        let r4 = gamma_ratio_limit_residual(c(0.0, 1e4), c(0.2, 0.0), c(0.9, 0.0)).unwrap().norm();
        assert!(r3 < 1e-2);
        assert!((r3 / r4 - 10.0).abs() < 0.5, "{r3} {r4}");
        let big = C64::from_polar(1e6, PI / 4.0);
        let r = gamma_ratio_limit_residual(big, c(1.0, 0.0), c(0.0, 0.0)).unwrap().norm();
        assert!(r < 3e-6);
    }

    #[test]
    fn large_imaginary_arguments_do_not_overflow() {
        for &t in &[1e3, 1e4, 1e5] {
            let z = c(0.0, -t);
            let l = log_gamma(z).unwrap();
            assert!(l.is_finite());
            // Γ(z)Γ(1−z) = π / sin(πz) in logs
            let s = l + log_gamma(1.0 - z).unwrap() + ln_sin_pi(z) - LN_PI;
            let k = (s.im / (2.0 * PI)).round();
            assert!((s - c(0.0, 2.0 * PI * k)).norm() < 1e-9 * t.ln(), "{s}");
        }
    }

    #[test]
    fn csc_limit_decays_geometrically() {
        let i = c(0.0, 1.0);
        let dev = |t: f64| {
            let a = c(0.0, -t);
            ((i * PI * a).exp() / (a * PI).sin() - 2.0 * i).norm()
        };
        // deviation is 2i e^{−2πt}/(1 − e^{−2πt})
        let q = (-2.0 * PI).exp();
        let (d1, d2, d3) = (dev(1.0), dev(2.0), dev(3.0));
        assert!((d2 / d1 / q - 1.0).abs() < 0.01 && (d3 / d2 / q - 1.0).abs() < 1e-4, "{d1} {d2} {d3}");
        assert_eq!(dev(10.0), 0.0);
    }

    proptest! {
        #[test]
        fn reflection(re in -8.0f64..8.0, im in -3.0f64..3.0) {
            let a = c(re, im);
            prop_assume!(dist_to_integer(a) > 1e-2);
            let v = gamma(a).unwrap() * (a * PI).sin() * gamma(1.0 - a).unwrap() / PI;
            prop_assert!((v - 1.0).norm() < 1e-11);
        }

        #[test]
        fn recurrence(re in -8.0f64..8.0, im in -3.0f64..3.0) {
            let a = c(re, im);
            prop_assume!(dist_to_integer(a) > 1e-2);
            let lhs = gamma(a + 1.0).unwrap();
            let rhs = a * gamma(a).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }
    }
}
