use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable selecting the default tolerance profile
/// (`default` or `strict`).
pub const TOLERANCE_PROFILE_ENV: &str = "ANNULUS_OPS_TOLERANCE_PROFILE";

/// Named sets of default tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToleranceProfile {
    Default,
    Strict,
}

impl ToleranceProfile {
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "" | "default" => Ok(Self::Default),
            "strict" => Ok(Self::Strict),
            other => Err(Error::InvalidParams(format!(
                "unknown tolerance profile {other:?} (expected default or strict)"
            ))),
        }
    }

    /// Reads [`TOLERANCE_PROFILE_ENV`]; unset means `Default`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_PROFILE_ENV) {
            Ok(v) => Self::from_name(&v),
            Err(_) => Ok(Self::Default),
        }
    }

    /// `(tol_rank, tol_id, tol_spec)`.
    pub fn tolerances(self) -> (f64, f64, f64) {
        match self {
            Self::Default => (1e-9, 1e-8, 1e-8),
            Self::Strict => (1e-11, 1e-10, 1e-10),
        }
    }
}

/// The annulus modulus `r` and the numerical tolerances used everywhere.
///
/// * `tol_rank`: relative singular-value cutoff for kernels and rank.
/// * `tol_id`: operator-norm cutoff for identity residuals.
/// * `tol_spec`: slack for spectral membership tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusParams {
    pub r: f64,
    pub tol_rank: f64,
    pub tol_id: f64,
    pub tol_spec: f64,
}

impl AnnulusParams {
    pub fn new(r: f64) -> Result<Self> {
        Self::with_profile(r, ToleranceProfile::Default)
    }

    pub fn with_profile(r: f64, profile: ToleranceProfile) -> Result<Self> {
        let (tol_rank, tol_id, tol_spec) = profile.tolerances();
        Self::with_tolerances(r, tol_rank, tol_id, tol_spec)
    }

    pub fn with_tolerances(r: f64, tol_rank: f64, tol_id: f64, tol_spec: f64) -> Result<Self> {
        let p = Self {
            r,
            tol_rank,
            tol_id,
            tol_spec,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidParams(format!("r = {} is not in (0, 1)", self.r)));
        }
        for (name, t) in [
            ("tol_rank", self.tol_rank),
            ("tol_id", self.tol_id),
            ("tol_spec", self.tol_spec),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParams(format!("{name} = {t} is not in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Same tolerances, different modulus.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::with_tolerances(r, self.tol_rank, self.tol_id, self.tol_spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = AnnulusParams::new(0.5).unwrap();
        assert_eq!((p.tol_rank, p.tol_id, p.tol_spec), (1e-9, 1e-8, 1e-8));
    }

    #[test]
    fn rejects_bad_modulus_and_tolerances() {
        assert!(AnnulusParams::new(0.0).is_err());
        assert!(AnnulusParams::new(1.0).is_err());
        assert!(AnnulusParams::new(f64::NAN).is_err());
        assert!(AnnulusParams::with_tolerances(0.5, 0.0, 1e-8, 1e-8).is_err());
        assert!(AnnulusParams::with_tolerances(0.5, 1e-9, 1.5, 1e-8).is_err());
    }

    #[test]
    fn profiles() {
        assert_eq!(ToleranceProfile::from_name("strict").unwrap(), ToleranceProfile::Strict);
        assert!(ToleranceProfile::from_name("lenient").is_err());
        let p = AnnulusParams::with_profile(0.5, ToleranceProfile::Strict).unwrap();
        assert!(p.tol_id < 1e-8);
    }
}
