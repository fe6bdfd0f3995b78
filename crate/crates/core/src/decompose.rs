//! Single-operator orthogonal decompositions: the unitary / r-times-unitary
//! split of an A_r-unitary, the Wold split of an A_r-isometry, the canonical
//! split of an A_r-contraction and the Levan split of a c.n.u. one.
//!
//! The infinite intersections `∩_k Ker(...)` are evaluated as a running
//! intersection over powers `k = 1, 2, ...` that stops at the first `k` where
//! the dimension does not drop. For contractions this is exact: once two
//! consecutive terms agree, all later ones do.

use serde::Serialize;

use crate::classify::{
    self, ar_isometry_defect, ar_isometry_residual, check_invertible, AtomLabel, CnuLabel,
};
use crate::error::{Error, Result};
use crate::linops::{
    complement, intersect, largest_reducing_within, null_space_scaled, orthonormalize,
    spectral_norm, ComplexMatrix, Mat, Subspace,
};
use crate::params::AnnulusParams;

/// One labelled part of an orthogonal decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct SplitPart {
    pub label: String,
    #[serde(skip)]
    pub space: Subspace,
    /// Identity residual of the compression for labels that carry one
    /// (`u`, `r`, `p`, `iso`); `None` for `c` and `cni`.
    pub label_residual: Option<f64>,
    /// `max(||P⊥ T P||, ||P⊥ T* P||)`.
    pub reduction_residual: f64,
}

impl SplitPart {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Ordered orthogonal decomposition of the ambient space.
#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub parts: Vec<SplitPart>,
    pub r_used: f64,
}

impl SplitReport {
    pub fn part(&self, label: &str) -> Option<&SplitPart> {
        self.parts.iter().find(|p| p.label == label)
    }

    /// Dimension of the part with `label`, 0 when absent.
    pub fn dim_of(&self, label: &str) -> usize {
        self.part(label).map_or(0, SplitPart::dim)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(SplitPart::dim).collect()
    }

    pub fn ambient_dim(&self) -> usize {
        self.parts.first().map_or(0, |p| p.space.ambient_dim())
    }

    /// Largest pairwise overlap `||P_j P_i||` between distinct parts.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.parts.iter().enumerate() {
            for b in &self.parts[i + 1..] {
                worst = worst.max(a.space.overlap(&b.space));
            }
        }
        worst
    }
}

#[derive(Clone, Copy)]
enum Defect {
    /// `I - P*P`
    Isometric,
    /// `I - P P*`
    CoIsometric,
    /// both
    Unitary,
}

/// `∩_{k>=1} Ker(defect(T^k))`, run until the dimension repeats.
fn isometric_chain(t: &Mat, defect: Defect, tol_rank: f64) -> Result<Subspace> {
    let n = t.nrows();
    let id = Mat::identity(n, n);
    let mut basis = id.clone();
    let mut power = id.clone();
    let cap = n + 2;
    for _ in 0..cap {
        let dim = basis.ncols();
        if dim == 0 {
            break;
        }
        power = &power * t;
        if spectral_norm(&power) < 1e-300 {
            return Ok(Subspace::zero(n));
        }
        let stacked = match defect {
            Defect::Isometric => (&id - power.adjoint() * &power) * &basis,
            Defect::CoIsometric => (&id - &power * power.adjoint()) * &basis,
            Defect::Unitary => {
                let a = (&id - power.adjoint() * &power) * &basis;
                let b = (&id - &power * power.adjoint()) * &basis;
                let mut s = Mat::zeros(2 * n, dim);
                s.rows_mut(0, n).copy_from(&a);
                s.rows_mut(n, n).copy_from(&b);
                s
            }
        };
        let coeffs = null_space_scaled(&stacked, tol_rank, 1.0)?;
        if coeffs.ncols() == dim {
            return Ok(Subspace::from_frame_unchecked(basis));
        }
        basis = orthonormalize(&(&basis * coeffs));
    }
    if basis.ncols() == 0 {
        return Ok(Subspace::zero(n));
    }
    Err(Error::Stall(cap))
}

fn r_inverse(t: &ComplexMatrix, p: &AnnulusParams) -> Result<ComplexMatrix> {
    Ok(t.inverse(p.tol_rank)?.scale(p.r))
}

/// Identity residual for the labelled compression of `t` onto `space`.
fn label_residual(t: &ComplexMatrix, space: &Subspace, label: &str, r: f64) -> Option<f64> {
    if space.is_zero() {
        return match label {
            "c" | "cni" => None,
            _ => Some(0.0),
        };
    }
    let a = ComplexMatrix::from_mat_unchecked(crate::linops::compress(t.as_matrix(), space.basis()));
    let k = a.dim();
    let id = ComplexMatrix::identity(k);
    let both = |target: &ComplexMatrix| {
        let g1 = &a.adjoint() * &a;
        let g2 = &a * &a.adjoint();
        (&g1 - target).norm().max((&g2 - target).norm())
    };
    match label {
        "u" => Some(both(&id)),
        "r" => Some(both(&id.scale(r * r))),
        "p" | "iso" => Some(ar_isometry_residual(&a, r)),
        _ => None,
    }
}

fn make_report(t: &ComplexMatrix, p: &AnnulusParams, parts: Vec<(&str, Subspace)>) -> SplitReport {
    let parts = parts
        .into_iter()
        .map(|(label, space)| SplitPart {
            label: label.to_string(),
            label_residual: label_residual(t, &space, label, p.r),
            reduction_residual: space.reduction_residual(t),
            space,
        })
        .collect();
    SplitReport {
        parts,
        r_used: p.r,
    }
}

fn check_exhaustive(report: &SplitReport, n: usize) -> Result<()> {
    let total: usize = report.dims().iter().sum();
    if total != n {
        return Err(Error::NumericalFailure(format!(
            "parts have total dimension {total}, ambient dimension is {n}"
        )));
    }
    Ok(())
}

/// `H = H_u ⊕ H_r` for an A_r-unitary: `T` is unitary on `H_u` and
/// `r T^{-1}` is unitary on `H_r`.
pub fn split_ar_unitary(t: &ComplexMatrix, p: &AnnulusParams) -> Result<SplitReport> {
    if !classify::is_ar_unitary(t, p) {
        return Err(Error::NotArUnitary(classify::ar_unitary_residual(t, p.r)));
    }
    let hu = isometric_chain(t.as_matrix(), Defect::Isometric, p.tol_rank)?;
    let s = r_inverse(t, p)?;
    let hr = isometric_chain(s.as_matrix(), Defect::Isometric, p.tol_rank)?;
    let report = make_report(t, p, vec![("u", hu), ("r", hr)]);
    check_exhaustive(&report, t.dim())?;
    Ok(report)
}

/// Wold split `H = H_u ⊕ H_r ⊕ H_p` of an A_r-isometry, with `H_u` and `H_r`
/// the co-isometric kernels of `V^k` and `(r V^{-1})^k`. `H_p` is the
/// complement of `H_u ⊕ H_r`.
pub fn wold_ar_isometry(v: &ComplexMatrix, p: &AnnulusParams) -> Result<SplitReport> {
    if !classify::is_ar_isometry(v, p)? {
        return Err(Error::NotArIsometry(ar_isometry_residual(v, p.r)));
    }
    let hu = isometric_chain(v.as_matrix(), Defect::CoIsometric, p.tol_rank)?;
    let s = r_inverse(v, p)?;
    let hr = isometric_chain(s.as_matrix(), Defect::CoIsometric, p.tol_rank)?;
    let ha = hu.sum(&hr, p.tol_rank)?;
    let hp = complement(&ha);
    let report = make_report(v, p, vec![("u", hu), ("r", hr), ("p", hp)]);
    check_exhaustive(&report, v.dim())?;
    Ok(report)
}

fn range_span(t: &Mat, tol_rank: f64) -> Result<Subspace> {
    let n = t.nrows();
    let id = Mat::identity(n, n);
    let mut cols = Mat::zeros(n, n * (n + 1));
    let mut power = id.clone();
    for k in 0..=n {
        cols.columns_mut(k * n, n)
            .copy_from(&(&id - &power * power.adjoint()));
        power = &power * t;
    }
    Subspace::span(&cols, tol_rank)
}

/// The pure part computed the other way round, as
/// `∨_k Ran(I - V^k V*^k) ∩ ∨_k Ran(I - (rV^{-1})^k (rV^{-1})*^k)`.
pub fn wold_pure_range_form(v: &ComplexMatrix, p: &AnnulusParams) -> Result<Subspace> {
    if !classify::is_ar_isometry(v, p)? {
        return Err(Error::NotArIsometry(ar_isometry_residual(v, p.r)));
    }
    let hp1 = range_span(v.as_matrix(), p.tol_rank)?;
    let s = r_inverse(v, p)?;
    let hp2 = range_span(s.as_matrix(), p.tol_rank)?;
    intersect(&hp1, &hp2, p.tol_rank)
}

/// Canonical split `H = H_u ⊕ H_r ⊕ H_c` of an A_r-contraction candidate:
/// `T` restricted to `H_u ⊕ H_r` is an A_r-unitary and `T` on `H_c` is c.n.u.
pub fn canonical_ar_contraction(t: &ComplexMatrix, p: &AnnulusParams) -> Result<SplitReport> {
    classify::require_candidate(t, p)?;
    check_invertible(t, p.tol_rank)?;
    let hu = isometric_chain(t.as_matrix(), Defect::Unitary, p.tol_rank)?;
    let s = r_inverse(t, p)?;
    let hr = isometric_chain(s.as_matrix(), Defect::Unitary, p.tol_rank)?;
    let ha = hu.sum(&hr, p.tol_rank)?;
    let hc = complement(&ha);
    let report = make_report(t, p, vec![("u", hu), ("r", hr), ("c", hc)]);
    check_exhaustive(&report, t.dim())?;
    Ok(report)
}

/// Levan split `H = H_1 ⊕ H_2` of a c.n.u. A_r-contraction: `H_1` is the
/// largest reducing subspace inside `Ker(-T*^2 T^2 + (1 + r^2) T*T - r^2 I)`
/// (labelled `iso`), `H_2` its complement (`cni`).
pub fn levan_split(t: &ComplexMatrix, p: &AnnulusParams) -> Result<SplitReport> {
    if classify::classify_atom(t, p)? != AtomLabel::Tc {
        return Err(Error::NotCnu);
    }
    let q = ar_isometry_defect(t, p.r);
    let k = Subspace::from_frame_unchecked(null_space_scaled(q.as_matrix(), p.tol_rank, 1.0)?);
    let h1 = largest_reducing_within(std::slice::from_ref(t), &k, p.tol_rank)?;
    let h2 = complement(&h1);
    let report = make_report(t, p, vec![("iso", h1), ("cni", h2)]);
    check_exhaustive(&report, t.dim())?;
    Ok(report)
}

/// Fundamental type of a c.n.u. A_r-contraction.
pub fn classify_fundamental(t: &ComplexMatrix, p: &AnnulusParams) -> Result<CnuLabel> {
    let split = levan_split(t, p)?;
    let iso = split.dim_of("iso");
    Ok(if iso == t.dim() {
        CnuLabel::Tp
    } else if iso == 0 {
        CnuLabel::Tcni
    } else {
        CnuLabel::NonFundamental
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn p(r: f64) -> AnnulusParams {
        AnnulusParams::new(r).unwrap()
    }

    fn cyclic(n: usize) -> ComplexMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[((j + 1) % n) * n + j] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix::from_row_major(n, &data).unwrap()
    }

    fn jordan() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.0, 0.7]]).unwrap()
    }

    #[test]
    fn unitary_split_sorts_by_modulus() {
        let t = ComplexMatrix::diagonal(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
        ]);
        let s = split_ar_unitary(&t, &p(0.5)).unwrap();
        assert!(s.part("u").unwrap().space.distance(&Subspace::coordinate(4, &[0, 1])) < 1e-12);
        assert!(s.part("r").unwrap().space.distance(&Subspace::coordinate(4, &[2, 3])) < 1e-12);
    }

    #[test]
    fn unitary_split_block_dims() {
        let t = ComplexMatrix::direct_sum(&[cyclic(3), cyclic(2).scale(0.5)]);
        let s = split_ar_unitary(&t, &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![3, 2]);
        assert!(s.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn unitary_split_rejects_non_unitary() {
        let t = ComplexMatrix::diagonal_real(&[1.0, 0.7]);
        assert_eq!(split_ar_unitary(&t, &p(0.5)).unwrap_err().kind(), "NotArUnitary");
    }

    #[test]
    fn wold_examples() {
        let s = wold_ar_isometry(&ComplexMatrix::diagonal_real(&[1.0, 0.5]), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![1, 1, 0]);
        let err = wold_ar_isometry(&ComplexMatrix::diagonal_real(&[0.7, 0.7]), &p(0.5)).unwrap_err();
        assert_eq!(err.kind(), "NotArIsometry");
    }

    #[test]
    fn wold_range_form_agrees_on_unitaries() {
        let t = ComplexMatrix::direct_sum(&[cyclic(3), cyclic(2).scale(0.5)]);
        let hp = wold_pure_range_form(&t, &p(0.5)).unwrap();
        let s = wold_ar_isometry(&t, &p(0.5)).unwrap();
        assert_eq!(hp.dim(), 0);
        assert!(hp.distance(&s.part("p").unwrap().space) < 1e-10);
    }

    #[test]
    fn canonical_examples() {
        let s = canonical_ar_contraction(&ComplexMatrix::diagonal_real(&[1.0, 0.7]), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![1, 0, 1]);
        assert!(s.part("u").unwrap().space.distance(&Subspace::coordinate(2, &[0])) < 1e-12);

        let t = ComplexMatrix::direct_sum(&[cyclic(3).scale(0.5), cyclic(2)]);
        let s = canonical_ar_contraction(&t, &p(0.5)).unwrap();
        assert_eq!(s.dim_of("c"), 0);
        assert_eq!(s.dims(), vec![2, 3, 0]);
    }

    #[test]
    fn canonical_rejects_non_candidate() {
        let t = ComplexMatrix::diagonal_real(&[1.0, 0.3]);
        assert_eq!(canonical_ar_contraction(&t, &p(0.5)).unwrap_err().kind(), "NotACandidate");
    }

    #[test]
    fn levan_examples() {
        let s = levan_split(&jordan(), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![0, 2]);
        assert_eq!(classify_fundamental(&jordan(), &p(0.5)).unwrap(), CnuLabel::Tcni);
        // an A_r-isometry is never c.n.u. in finite dimensions
        let v = ComplexMatrix::diagonal_real(&[1.0, 0.5]);
        assert_eq!(levan_split(&v, &p(0.5)).unwrap_err(), Error::NotCnu);
    }

    #[test]
    fn one_dimensional_inputs() {
        let s = split_ar_unitary(&ComplexMatrix::diagonal_real(&[-1.0]), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![1, 0]);
        let s = canonical_ar_contraction(&ComplexMatrix::diagonal_real(&[0.5]), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![0, 1, 0]);
        let s = canonical_ar_contraction(&ComplexMatrix::diagonal_real(&[0.8]), &p(0.5)).unwrap();
        assert_eq!(s.dims(), vec![0, 0, 1]);
    }
}
