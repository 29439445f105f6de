//! Double-double arithmetic for the few scalar factors whose rounding is
//! amplified by ill-conditioned monodromy products.

use crate::C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
const HALF_PI: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123_233_995_736_766e-17 };
const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub(crate) fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn scale2(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        quick_two_sum(p, e)
    }

    pub(crate) fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f(k)).scale2(-10);
        // e^r − 1 by Taylor, then (1+s)² − 1 = s(2 + s) ten times
        let mut term = r;
        let mut s = r;
        for n in 2..=14 {
            term = term * r / Dd::from(n as f64);
            s = s + term;
        }
        for _ in 0..10 {
            s = s * (s + Dd::from(2.0));
        }
        (s + Dd::ONE).scale2(k as i32)
    }

    pub(crate) fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI.mul_f(k);
        let r2 = r * r;
        let (mut s, mut c) = (r, Dd::ONE);
        let (mut ts, mut tc) = (r, Dd::ONE);
        for n in 1..=15 {
            let nf = 2.0 * n as f64;
            ts = -(ts * r2 / Dd::from(nf * (nf + 1.0)));
            tc = -(tc * r2 / Dd::from((nf - 1.0) * nf));
            s = s + ts;
            c = c + tc;
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let p = self.hi * y.hi;
        let e = self.hi.mul_add(y.hi, -p) + (self.hi * y.lo + self.lo * y.hi);
        quick_two_sum(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y.mul_f(q1);
        let q2 = r.hi / y.hi;
        let r = r - y.mul_f(q2);
        let q3 = r.hi / y.hi;
        quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    pub(crate) fn from(z: C64) -> Cdd {
        Cdd { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    pub(crate) fn real(x: f64) -> Cdd {
        Cdd { re: Dd::from(x), im: Dd::ZERO }
    }

    pub(crate) fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub(crate) fn exp(self) -> Cdd {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Cdd { re: m * c, im: m * s }
    }

    /// `e^{iπz}`.
    pub(crate) fn exp_ipi(self) -> Cdd {
        Cdd { re: -(PI * self.im), im: PI * self.re }.exp()
    }

    /// `sin(πz)`.
    pub(crate) fn sin_pi(self) -> Cdd {
        let (s, c) = (PI * self.re).sin_cos();
        let ep = (PI * self.im).exp();
        let em = (-(PI * self.im)).exp();
        let half = Dd::from(0.5);
        Cdd { re: s * (ep + em) * half, im: c * (ep - em) * half }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, w: Cdd) -> Cdd {
        Cdd { re: self.re + w.re, im: self.im + w.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, w: Cdd) -> Cdd {
        Cdd { re: self.re - w.re, im: self.im - w.im }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, w: Cdd) -> Cdd {
        Cdd { re: self.re * w.re - self.im * w.im, im: self.re * w.im + self.im * w.re }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, w: Cdd) -> Cdd {
        let d = w.re * w.re + w.im * w.im;
        Cdd { re: (self.re * w.re + self.im * w.im) / d, im: (self.im * w.re - self.re * w.im) / d }
    }
}
