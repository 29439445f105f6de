use crate::scalar_special::dist_to_integer;
use crate::{Error, Result, C64};

/// Equation parameters (α, β, γ). Kummer mode ignores α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub alpha: C64,
    pub beta: C64,
    pub gamma_: C64,
}

impl Params {
    pub fn new(alpha: C64, beta: C64, gamma_: C64) -> Self {
        Params { alpha, beta, gamma_ }
    }

    /// Kummer-only parameters; α is set to zero.
    pub fn kummer(beta: C64, gamma_: C64) -> Self {
        Params { alpha: C64::new(0.0, 0.0), beta, gamma_ }
    }

    pub fn with_alpha(&self, alpha: C64) -> Self {
        Params { alpha, ..*self }
    }

    /// γ, γ−α−β and α−β must keep distance `tol` from the integers.
    pub fn check_gauss_nonresonant(&self, tol: f64) -> Result<()> {
        let (a, b, g) = (self.alpha, self.beta, self.gamma_);
        for (name, v) in [("gamma", g), ("gamma-alpha-beta", g - a - b), ("alpha-beta", a - b)] {
            if dist_to_integer(v) < tol {
                return Err(Error::Resonant(format!("{name} = {v} is within {tol:e} of an integer")));
            }
        }
        Ok(())
    }

    pub fn check_kummer_nonresonant(&self, tol: f64) -> Result<()> {
        if dist_to_integer(self.gamma_) < tol {
            return Err(Error::Resonant(format!("gamma = {} is within {tol:e} of an integer", self.gamma_)));
        }
        Ok(())
    }

    /// α ≠ 0, β ∉ {1, γ}, α ≠ β − 1: the matrix system of the Gauss equation exists.
    pub fn check_gauss_system(&self, tol: f64) -> Result<()> {
        let (a, b, g) = (self.alpha, self.beta, self.gamma_);
        for (name, v) in [("alpha", a), ("beta-1", b - 1.0), ("beta-gamma", b - g), ("alpha+1-beta", a + 1.0 - b)] {
            if v.norm() < tol {
                return Err(Error::Degenerate(format!("{name} vanishes")));
            }
        }
        Ok(())
    }

    /// β ∉ {1, γ}: the matrix system of the Kummer equation exists.
    pub fn check_kummer_system(&self, tol: f64) -> Result<()> {
        let (b, g) = (self.beta, self.gamma_);
        for (name, v) in [("beta-1", b - 1.0), ("beta-gamma", b - g)] {
            if v.norm() < tol {
                return Err(Error::Degenerate(format!("{name} vanishes")));
            }
        }
        Ok(())
    }
}
