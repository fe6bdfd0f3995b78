//! Brehmer positivity operators `S(u)`, the alternating binomial sums
//! `Delta_m^k`, and the identity `Delta_m^k = (1 - r^2)^{|k| - m} S(u)` that
//! holds for tuples of A_r-isometries.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::classify;
use crate::error::{Error, Result};
use crate::linops::{check_dim, ComplexMatrix, Mat};
use crate::params::AnnulusParams;

/// Largest exponent accepted in a [`MultiIndex`].
pub const MAX_EXPONENT: u32 = 30;

/// A nonempty subset of the component indices `0..n` (0-based), kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubsetMask {
    n: usize,
    members: Vec<usize>,
}

impl SubsetMask {
    pub fn new(n: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidParams("subset must be nonempty".into()));
        }
        if let Some(&m) = members.iter().find(|&&m| m >= n) {
            return Err(Error::InvalidParams(format!("subset member {m} out of range 0..{n}")));
        }
        Ok(Self { n, members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// 1-based label such as `{1,3}`.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.members.iter().map(|m| (m + 1).to_string()).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// All nonempty subsets of `0..n`, by increasing size then
    /// lexicographically.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out: Vec<Self> = (1u64..(1u64 << n))
            .map(|mask| Self {
                n,
                members: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
            })
            .collect();
        out.sort_by(|a, b| a.members.len().cmp(&b.members.len()).then(a.members.cmp(&b.members)));
        out
    }
}

/// Positive exponents `(k_1, ..., k_m)`, one per subset member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::BadMultiIndex("empty multi-index".into()));
        }
        if let Some(&bad) = k.iter().find(|&&x| x == 0 || x > MAX_EXPONENT) {
            return Err(Error::BadMultiIndex(format!(
                "exponent {bad} outside 1..={MAX_EXPONENT}"
            )));
        }
        Ok(Self(k))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

fn check_ops(ops: &[ComplexMatrix]) -> Result<usize> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParams("empty operator tuple".into()))?;
    let n = first.dim();
    for t in ops {
        check_dim(n, t.dim())?;
    }
    Ok(n)
}

/// `S(u) = Σ_{v ⊆ u} (-1)^{|v|} (T^{e(v)})* T^{e(v)}` with
/// `T^{e(v)} = Π_{j ∈ v} T_j`; the empty set contributes `+I`.
pub fn szego_operator(ops: &[ComplexMatrix], u: &SubsetMask) -> Result<ComplexMatrix> {
    let n = check_ops(ops)?;
    check_dim(ops.len(), u.n)?;
    let members = u.members();
    let mut acc = Mat::identity(n, n);
    for mask in 1u64..(1u64 << members.len()) {
        let mut prod = Mat::identity(n, n);
        let mut size = 0;
        for (bit, &j) in members.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                prod = &prod * ops[j].as_matrix();
                size += 1;
            }
        }
        let term = prod.adjoint() * &prod;
        if size % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(ComplexMatrix::from_mat_unchecked(acc))
}

/// `Δ_m^k = Σ_{0 <= p_i <= k_i} (-1)^{Σp} Π C(k_i, p_i) (Π V_i^{p_i})* (Π V_i^{p_i})`
/// over the members of `subset`, summed in order of increasing `Σp`.
pub fn delta_mk(ops: &[ComplexMatrix], subset: &SubsetMask, k: &MultiIndex) -> Result<ComplexMatrix> {
    let n = check_ops(ops)?;
    check_dim(ops.len(), subset.n)?;
    let members = subset.members();
    let ks = k.as_slice();
    if ks.len() != members.len() {
        return Err(Error::BadMultiIndex(format!(
            "{} exponents for a subset of size {}",
            ks.len(),
            members.len()
        )));
    }
    // powers[i][p] = V_{members[i]}^p
    let powers: Vec<Vec<Mat>> = members
        .iter()
        .zip(ks)
        .map(|(&j, &kj)| {
            let mut v = Vec::with_capacity(kj as usize + 1);
            v.push(Mat::identity(n, n));
            for p in 1..=kj as usize {
                let next = &v[p - 1] * ops[j].as_matrix();
                v.push(next);
            }
            v
        })
        .collect();

    let mut indices: Vec<Vec<u32>> = vec![Vec::new()];
    for &kj in ks {
        indices = indices
            .into_iter()
            .flat_map(|prefix| {
                (0..=kj).map(move |p| {
                    let mut q = prefix.clone();
                    q.push(p);
                    q
                })
            })
            .collect();
    }
    indices.sort_by_key(|q| (q.iter().sum::<u32>(), q.clone()));

    let mut acc = Mat::zeros(n, n);
    for q in indices {
        let coeff: u128 = q.iter().zip(ks).map(|(&p, &kj)| binomial(kj, p)).product();
        let mut prod = Mat::identity(n, n);
        for (i, &p) in q.iter().enumerate() {
            prod = &prod * &powers[i][p as usize];
        }
        let term = prod.adjoint() * &prod * num_complex::Complex64::new(coeff as f64, 0.0);
        if q.iter().sum::<u32>() % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(ComplexMatrix::from_mat_unchecked(acc))
}

/// Minimum eigenvalue of `S(u)` for one subset.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetCheck {
    pub subset: String,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BrehmerReport {
    pub subsets: Vec<SubsetCheck>,
    pub passed: bool,
}

/// Smallest eigenvalue of the Hermitian part `(S + S*)/2`.
pub fn min_hermitian_eigenvalue(s: &ComplexMatrix) -> Result<f64> {
    let h = (s.as_matrix() + s.as_matrix().adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Checks `S(u) >= 0` for every nonempty `u`, in the order of
/// [`SubsetMask::all`]; passes iff every minimum eigenvalue is `>= -tol_id`.
pub fn check_brehmer(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<BrehmerReport> {
    check_ops(ops)?;
    let mut subsets = Vec::new();
    for u in SubsetMask::all(ops.len()) {
        let s = szego_operator(ops, &u)?;
        let scale = s.norm().max(1.0);
        let asym = (&s - &s.adjoint()).norm();
        if asym > 1e3 * f64::EPSILON * scale * s.dim() as f64 {
            return Err(Error::NumericalFailure(format!(
                "S{} is not Hermitian (asymmetry {asym:e})",
                u.label()
            )));
        }
        let min_eigenvalue = min_hermitian_eigenvalue(&s)?;
        subsets.push(SubsetCheck {
            subset: u.label(),
            min_eigenvalue,
            passed: min_eigenvalue >= -p.tol_id,
        });
    }
    let passed = subsets.iter().all(|c| c.passed);
    Ok(BrehmerReport { subsets, passed })
}

/// `||Δ_m^k - (1 - r^2)^{|k| - m} S(u)||` for a tuple of A_r-isometries.
pub fn check_bp_identity(
    ops: &[ComplexMatrix],
    subset: &SubsetMask,
    k: &MultiIndex,
    p: &AnnulusParams,
) -> Result<f64> {
    check_ops(ops)?;
    for t in ops {
        if !classify::is_ar_isometry(t, p)? {
            return Err(Error::NotArIsometry(classify::ar_isometry_residual(t, p.r)));
        }
    }
    let delta = delta_mk(ops, subset, k)?;
    let s = szego_operator(ops, subset)?;
    let exponent = k.total() as i32 - subset.len() as i32;
    let factor = (1.0 - p.r * p.r).powi(exponent);
    Ok((&delta - &s.scale(factor)).norm())
}
