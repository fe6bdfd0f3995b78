//! Tolerance-based predicates: contraction, normality, A_r-unitary,
//! A_r-isometry, A_r-contraction candidate, and atom typing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decompose;
use crate::error::{Error, Result};
use crate::linops::{eigenvalues, ComplexMatrix};
use crate::params::AnnulusParams;

/// Atom type of an A_r-contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLabel {
    /// A_r-unitary.
    #[serde(rename = "t_u")]
    Tu,
    /// Completely non-unitary A_r-contraction.
    #[serde(rename = "t_c")]
    Tc,
    #[serde(rename = "non_atom")]
    NonAtom,
}

/// Unitary (`u`) versus r-times-unitary (`r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitaryTypeLabel {
    #[serde(rename = "u")]
    U,
    #[serde(rename = "r")]
    R,
}

/// Fundamental c.n.u. type: pure A_r-isometry or c.n.i. A_r-contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CnuLabel {
    #[serde(rename = "t_p")]
    Tp,
    #[serde(rename = "t_cni")]
    Tcni,
    #[serde(rename = "non_fundamental")]
    NonFundamental,
}

impl AtomLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tu => "t_u",
            Self::Tc => "t_c",
            Self::NonAtom => "non_atom",
        }
    }
}

impl UnitaryTypeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::U => "u",
            Self::R => "r",
        }
    }
}

impl CnuLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tp => "t_p",
            Self::Tcni => "t_cni",
            Self::NonFundamental => "non_fundamental",
        }
    }
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for UnitaryTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for CnuLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn gram(t: &ComplexMatrix) -> ComplexMatrix {
    &t.adjoint() * t
}

/// `|| T*T - T T* ||`.
pub fn normality_defect(t: &ComplexMatrix) -> f64 {
    (&gram(t) - &(t * &t.adjoint())).norm()
}

/// `|| (I - T*T)(T*T - r^2 I) ||`.
pub fn ar_unitary_residual(t: &ComplexMatrix, r: f64) -> f64 {
    let n = t.dim();
    let g = gram(t);
    let id = ComplexMatrix::identity(n);
    let left = &id - &g;
    let right = &g - &id.scale(r * r);
    (&left * &right).norm()
}

/// `|| -V*^2 V^2 + (1 + r^2) V*V - r^2 I ||`.
pub fn ar_isometry_residual(v: &ComplexMatrix, r: f64) -> f64 {
    ar_isometry_defect(v, r).norm()
}

/// The operator `-V*^2 V^2 + (1 + r^2) V*V - r^2 I`.
pub fn ar_isometry_defect(v: &ComplexMatrix, r: f64) -> ComplexMatrix {
    let n = v.dim();
    let v2 = v * v;
    let r2 = r * r;
    let a = gram(&v2).scale(-1.0);
    let b = gram(v).scale(1.0 + r2);
    let c = ComplexMatrix::identity(n).scale(r2);
    &(&a + &b) - &c
}

pub fn is_contraction(t: &ComplexMatrix, tol_id: f64) -> bool {
    t.norm() <= 1.0 + tol_id
}

pub fn is_normal(t: &ComplexMatrix, tol_id: f64) -> bool {
    let nrm = t.norm();
    normality_defect(t) <= tol_id * nrm * nrm
}

pub fn is_ar_unitary(t: &ComplexMatrix, p: &AnnulusParams) -> bool {
    is_normal(t, p.tol_id) && ar_unitary_residual(t, p.r) <= p.tol_id
}

/// Ratio `sigma_min / sigma_max`, or `Err(SingularOperator)` when it does not
/// exceed `tol_rank`.
pub(crate) fn check_invertible(t: &ComplexMatrix, tol_rank: f64) -> Result<()> {
    let sv = t.singular_values()?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    if smax == 0.0 || smin <= tol_rank * smax {
        return Err(Error::SingularOperator(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    Ok(())
}

/// A_r-isometry test for an invertible operator.
pub fn is_ar_isometry(v: &ComplexMatrix, p: &AnnulusParams) -> Result<bool> {
    check_invertible(v, p.tol_rank)?;
    Ok(ar_isometry_residual(v, p.r) <= p.tol_id)
}

/// Reason a matrix fails the candidate conditions, if it does.
pub fn candidate_violation(t: &ComplexMatrix, p: &AnnulusParams) -> Result<Option<String>> {
    for z in eigenvalues(t)? {
        let m = z.norm();
        if m < p.r - p.tol_spec || m > 1.0 + p.tol_spec {
            return Ok(Some(format!("eigenvalue {z} has modulus {m} outside [r, 1]")));
        }
    }
    let sv = t.singular_values()?;
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    if smax > 1.0 + p.tol_id {
        return Ok(Some(format!("operator norm {smax} exceeds 1")));
    }
    if smin < p.r - p.tol_id {
        return Ok(Some(format!("smallest singular value {smin} is below r")));
    }
    Ok(None)
}

/// Necessary conditions for the closed annulus to be a spectral set: spectrum
/// in the closed annulus, `||T|| <= 1` and `||r T^{-1}|| <= 1`. Sufficiency is
/// not certified.
pub fn is_ar_contraction_candidate(t: &ComplexMatrix, p: &AnnulusParams) -> Result<bool> {
    Ok(candidate_violation(t, p)?.is_none())
}

pub(crate) fn require_candidate(t: &ComplexMatrix, p: &AnnulusParams) -> Result<()> {
    match candidate_violation(t, p)? {
        None => Ok(()),
        Some(why) => Err(Error::NotACandidate(why)),
    }
}

/// `t_u` for an A_r-unitary, `t_c` when the canonical split has no A_r-unitary
/// part, `non_atom` otherwise.
pub fn classify_atom(t: &ComplexMatrix, p: &AnnulusParams) -> Result<AtomLabel> {
    require_candidate(t, p)?;
    if is_ar_unitary(t, p) {
        return Ok(AtomLabel::Tu);
    }
    let split = decompose::canonical_ar_contraction(t, p)?;
    if split.dim_of("u") + split.dim_of("r") == 0 {
        Ok(AtomLabel::Tc)
    } else {
        Ok(AtomLabel::NonAtom)
    }
}

pub fn classify_unitary_type(u: &ComplexMatrix, p: &AnnulusParams) -> Result<UnitaryTypeLabel> {
    if !is_ar_unitary(u, p) {
        return Err(Error::NotArUnitary(ar_unitary_residual(u, p.r)));
    }
    let g = gram(u);
    let id = ComplexMatrix::identity(u.dim());
    if (&g - &id).norm() <= p.tol_id {
        Ok(UnitaryTypeLabel::U)
    } else if (&g - &id.scale(p.r * p.r)).norm() <= p.tol_id {
        Ok(UnitaryTypeLabel::R)
    } else {
        Err(Error::MixedType)
    }
}
