//! Seeded random parameter draws for property checks and the CLI.

use crate::{c, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Box for random draws: real parts in `re`, imaginary parts in `im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Default for DrawBox {
    fn default() -> Self {
        DrawBox { re: (0.1, 2.0), im: (-0.5, 0.5) }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    bx: DrawBox,
    tol: f64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), bx: DrawBox::default(), tol: 1e-3 }
    }

    pub fn with_box(mut self, bx: DrawBox) -> Self {
        self.bx = bx;
        self
    }

    fn draw(&mut self) -> num_complex::Complex64 {
        let re = self.rng.gen_range(self.bx.re.0..=self.bx.re.1);
        let im = self.rng.gen_range(self.bx.im.0..=self.bx.im.1);
        c(re, im)
    }

    /// Non-resonant Gauss parameters also admissible for the 2×2 system.
    pub fn gauss(&mut self) -> Params {
        loop {
            let p = Params::new(self.draw(), self.draw(), self.draw());
            if p.check_gauss_nonresonant(self.tol).is_ok() && p.check_gauss_system(self.tol).is_ok() {
                return p;
            }
        }
    }

    /// Non-resonant Kummer parameters (α = 0).
    pub fn kummer(&mut self) -> Params {
        loop {
            let p = Params::kummer(self.draw(), self.draw());
            if p.check_kummer_nonresonant(self.tol).is_ok() && p.check_kummer_system(self.tol).is_ok() {
                return p;
            }
        }
    }
}
