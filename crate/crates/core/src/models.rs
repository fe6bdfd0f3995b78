//! Generators for concrete operators: finite A_r-unitaries, cyclic annulus
//! unitaries, the truncated weighted shift on `H^2_α`, the non doubly
//! commuting pair `(S_α, S_α^2)`, and planted block tuples with known
//! decompositions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Alphabet, TypeAssignment, TypeLabel};
use crate::linops::{eigenvalues, ComplexMatrix, Subspace};
use crate::params::AnnulusParams;

/// Deterministic generator used for every seeded construction.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Diagonal A_r-unitary `diag(eigs_unit, eigs_r)`.
pub fn gen_ar_unitary(
    eigs_unit: &[Complex64],
    eigs_r: &[Complex64],
    p: &AnnulusParams,
) -> Result<ComplexMatrix> {
    p.validate()?;
    if eigs_unit.is_empty() && eigs_r.is_empty() {
        return Err(Error::InvalidParams("no eigenvalues given".into()));
    }
    for z in eigs_unit {
        if !z.norm().is_finite() || (z.norm() - 1.0).abs() > p.tol_spec {
            return Err(Error::EigenvalueOffBoundary(format!("{z} (expected modulus 1)")));
        }
    }
    for z in eigs_r {
        if !z.norm().is_finite() || (z.norm() - p.r).abs() > p.tol_spec {
            return Err(Error::EigenvalueOffBoundary(format!("{z} (expected modulus {})", p.r)));
        }
    }
    let all: Vec<Complex64> = eigs_unit.iter().chain(eigs_r).copied().collect();
    Ok(ComplexMatrix::diagonal(&all))
}

/// `k x k` cyclic shift `e_j -> e_{j+1 mod k}`.
pub fn cyclic_shift(k: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(k, k);
    for j in 0..k {
        m[((j + 1) % k, j)] = c(1.0, 0.0);
    }
    ComplexMatrix::from_mat_unchecked(m)
}

/// `C_N ⊕ r C_M`.
pub fn gen_cyclic_annulus_unitary(n: usize, m: usize, p: &AnnulusParams) -> Result<ComplexMatrix> {
    p.validate()?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("cyclic block sizes must be at least 1".into()));
    }
    Ok(ComplexMatrix::direct_sum(&[cyclic_shift(n), cyclic_shift(m).scale(p.r)]))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_mat_unchecked(q)
}

/// Haar unitary drawn from `seed`.
pub fn haar_unitary_seeded(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary(n, &mut seeded_rng(seed))
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random A_r-unitary with `n_unit` eigenvalues on the unit circle and `n_r`
/// on the inner circle, conjugated by a Haar unitary.
pub fn random_ar_unitary<R: Rng + ?Sized>(
    n_unit: usize,
    n_r: usize,
    r: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let mut eigs: Vec<Complex64> = (0..n_unit).map(|_| random_phase(rng)).collect();
    eigs.extend((0..n_r).map(|_| random_phase(rng) * r));
    let q = haar_unitary(eigs.len(), rng);
    ComplexMatrix::diagonal(&eigs).conjugate_by(&q)
}

/// `count` A_r-unitaries of size `dim` diagonalised by one common Haar
/// unitary, hence doubly commuting.
pub fn random_commuting_ar_unitaries<R: Rng + ?Sized>(
    count: usize,
    dim: usize,
    r: f64,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let q = haar_unitary(dim, rng);
    (0..count)
        .map(|_| {
            let eigs: Vec<Complex64> = (0..dim)
                .map(|_| random_phase(rng) * if rng.random_bool(0.5) { 1.0 } else { r })
                .collect();
            ComplexMatrix::diagonal(&eigs).conjugate_by(&q)
        })
        .collect()
}

/// Random c.n.u. A_r-contraction candidate: upper triangular with eigenvalue
/// moduli in `[r + 0.2(1-r), 1 - 0.2(1-r)]` and a strictly upper part of norm
/// at most `0.1(1-r)`, conjugated by a Haar unitary. Its singular values lie
/// in `[r + 0.1(1-r), 1 - 0.1(1-r)]`.
pub fn random_cnu_candidate<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> ComplexMatrix {
    let gap = 1.0 - r;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let modulus = rng.random_range((r + 0.2 * gap)..=(1.0 - 0.2 * gap));
        m[(i, i)] = random_phase(rng) * modulus;
    }
    if n > 1 {
        let mut upper = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                upper[(i, j)] = c(re, im);
            }
        }
        let nrm = upper.norm();
        if nrm > 0.0 {
            let target = rng.random_range(0.02..=0.1) * gap;
            m += upper * c(target / nrm, 0.0);
        }
    }
    let q = haar_unitary(n, rng);
    ComplexMatrix::from_mat_unchecked(m).conjugate_by(&q)
}

/// Doubly commuting block `F_1 ⊗ ... ⊗ F_n` for one atom-type assignment:
/// component `i` acts as `I ⊗ F_i ⊗ I`, with `F_i` a diagonal A_r-unitary for
/// `t_u` and a c.n.u. candidate for `t_c`. `factor_dims[i]` is the size of
/// `F_i`.
pub fn random_atom_block<R: Rng + ?Sized>(
    labels: &[TypeLabel],
    factor_dims: &[usize],
    r: f64,
    rng: &mut R,
) -> Result<Vec<ComplexMatrix>> {
    if labels.len() != factor_dims.len() || labels.is_empty() {
        return Err(Error::InconsistentBlocks("labels and factor sizes differ in length".into()));
    }
    if factor_dims.contains(&0) {
        return Err(Error::InconsistentBlocks("factor size 0".into()));
    }
    let factors = labels
        .iter()
        .zip(factor_dims)
        .map(|(l, &d)| match l {
            TypeLabel::Tu => {
                let eigs: Vec<Complex64> = (0..d)
                    .map(|_| random_phase(rng) * if rng.random_bool(0.5) { 1.0 } else { r })
                    .collect();
                Ok(ComplexMatrix::diagonal(&eigs))
            }
            TypeLabel::Tc => Ok(random_cnu_candidate(d, r, rng)),
            other => Err(Error::InconsistentBlocks(format!(
                "atom block cannot carry label {}",
                other.as_str()
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..factors.len())
        .map(|i| {
            factors.iter().enumerate().fold(ComplexMatrix::identity(1), |acc, (j, f)| {
                if i == j {
                    acc.kron(f)
                } else {
                    acc.kron(&ComplexMatrix::identity(f.dim()))
                }
            })
        })
        .collect())
}

/// Basis window and parameters of the weighted shift model on `H^2_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardyModelSpec {
    pub alpha: f64,
    pub r: f64,
    pub n_min: i32,
    pub n_max: i32,
}

impl HardyModelSpec {
    pub fn new(alpha: f64, r: f64, n_min: i32, n_max: i32) -> Result<Self> {
        let spec = Self { alpha, r, n_min, n_max };
        spec.validate(3)?;
        Ok(spec)
    }

    pub fn len(&self) -> usize {
        (self.n_max as i64 - self.n_min as i64 + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self, needed: usize) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!("alpha = {} outside [0, 1)", self.alpha)));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidParams(format!("r = {} outside (0, 1)", self.r)));
        }
        if self.len() < needed {
            return Err(Error::WindowTooSmall { needed, got: self.len() });
        }
        Ok(())
    }

    /// `c_n = ||w_{α+n}||^2 = 1 + r^{2(α+n)}`.
    pub fn weight(&self, n: i32) -> f64 {
        1.0 + self.r.powf(2.0 * (self.alpha + n as f64))
    }

    /// Window indices `n_min..=n_max`.
    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.n_min..=self.n_max
    }

    /// Matrix row of basis index `n`.
    pub fn position(&self, n: i32) -> Option<usize> {
        (self.n_min..=self.n_max)
            .contains(&n)
            .then(|| (n - self.n_min) as usize)
    }
}

/// Truncated weighted shift with its squared basis norms.
#[derive(Clone, Debug)]
pub struct HardyShift {
    pub spec: HardyModelSpec,
    pub matrix: ComplexMatrix,
    /// `c_n` for `n` in the window, in index order.
    pub weights: Vec<f64>,
}

fn shift_matrix(spec: &HardyModelSpec, weights: &[f64]) -> ComplexMatrix {
    let len = spec.len();
    let mut m = DMatrix::zeros(len, len);
    for j in 0..len - 1 {
        m[(j + 1, j)] = c((weights[j + 1] / weights[j]).sqrt(), 0.0);
    }
    ComplexMatrix::from_mat_unchecked(m)
}

/// `V e_n = a_n e_{n+1}` with `a_n = sqrt(c_{n+1}/c_n)` and `V e_{n_max} = 0`,
/// where `e_n = w_{α+n} / ||w_{α+n}||`.
pub fn gen_hardy_shift(spec: &HardyModelSpec) -> Result<HardyShift> {
    spec.validate(3)?;
    let weights: Vec<f64> = spec.indices().map(|n| spec.weight(n)).collect();
    Ok(HardyShift {
        spec: *spec,
        matrix: shift_matrix(spec, &weights),
        weights,
    })
}

/// `r(α; n) = c_n / c_{n-1}`, the coefficient in `S_α^* w_{α+n} = r(α;n) w_{α+n-1}`.
pub fn sarason_ratio(alpha: f64, r: f64, n: i32) -> f64 {
    let w = |k: i32| 1.0 + r.powf(2.0 * (alpha + k as f64));
    w(n) / w(n - 1)
}

/// Coefficient of `w_{α-1}` in `(V_1 V_2^* - V_2^* V_1) w_α` for
/// `(V_1, V_2) = (S_α, S_α^2)`: `r(α;0) r(α;-1) - r(α;1) r(α;0)`.
pub fn sarason_w_coefficient(alpha: f64, r: f64) -> f64 {
    let q = |n| sarason_ratio(alpha, r, n);
    q(0) * q(-1) - q(1) * q(0)
}

/// A commuting pair on the truncated `H^2_α` window together with the
/// annulus parameter it is considered over.
#[derive(Clone, Debug)]
pub struct SarasonPair {
    pub spec: HardyModelSpec,
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    /// `r^2`.
    pub r_squared: f64,
    pub weights: Vec<f64>,
}

impl SarasonPair {
    /// The `w_{α-1}` coefficient of `(V_1 V_2^* - V_2^* V_1) w_α` read off the
    /// matrix: `D[-1, 0] * sqrt(c_0 / c_{-1})`.
    pub fn w_coefficient_from_matrix(&self) -> Result<f64> {
        let (Some(row), Some(col)) = (self.spec.position(-1), self.spec.position(0)) else {
            return Err(Error::InvalidParams("window must contain indices -1 and 0".into()));
        };
        let v2s = self.v2.adjoint();
        let d = &(&self.v1 * &v2s) - &(&v2s * &self.v1);
        Ok(d.get(row, col).re * (self.weights[col] / self.weights[row]).sqrt())
    }
}

/// `(V_1, V_2) = (S_α, S_α^2)` on the window, with annulus parameter `r^2`.
/// The window must have at least 5 indices.
pub fn gen_sarason_pair(spec: &HardyModelSpec) -> Result<SarasonPair> {
    spec.validate(5)?;
    let shift = gen_hardy_shift(spec)?;
    let v2 = &shift.matrix * &shift.matrix;
    Ok(SarasonPair {
        spec: *spec,
        v1: shift.matrix,
        v2,
        r_squared: spec.r * spec.r,
        weights: shift.weights,
    })
}

/// `(V_1, V_2) = (center I + scale S_α, V_1^2)`, requiring
/// `r^2 < center - scale` and `center + scale <= 1`. Unlike the nilpotent
/// truncation of `S_α`, both components are then invertible c.n.u.
/// A_{r^2}-contraction candidates, and they still fail to doubly commute.
pub fn gen_shifted_sarason_pair(spec: &HardyModelSpec, center: f64, scale: f64) -> Result<SarasonPair> {
    spec.validate(5)?;
    let r2 = spec.r * spec.r;
    if !(center.is_finite() && scale.is_finite() && scale > 0.0 && center - scale > r2 && center + scale <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "need scale > 0, center - scale > r^2 = {r2} and center + scale <= 1"
        )));
    }
    let shift = gen_hardy_shift(spec)?;
    let v1 = &ComplexMatrix::identity(spec.len()).scale(center) + &shift.matrix.scale(scale);
    let v2 = &v1 * &v1;
    Ok(SarasonPair {
        spec: *spec,
        v1,
        v2,
        r_squared: spec.r * spec.r,
        weights: shift.weights,
    })
}

/// One direct summand of a planted tuple: a matrix per component and the
/// label each component is expected to receive on it.
#[derive(Clone, Debug)]
pub struct PlantedBlock {
    pub ops: Vec<ComplexMatrix>,
    pub labels: Vec<TypeLabel>,
}

#[derive(Clone, Debug)]
pub struct PlantedSpec {
    pub blocks: Vec<PlantedBlock>,
    pub seed: u64,
}

/// Expected joint part for one assignment.
#[derive(Clone, Debug)]
pub struct ExpectedPart {
    pub assignment: TypeAssignment,
    pub space: Subspace,
}

impl ExpectedPart {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

#[derive(Clone, Debug)]
pub struct PlantedTuple {
    pub ops: Vec<ComplexMatrix>,
    pub conjugator: ComplexMatrix,
    pub alphabet: Alphabet,
    /// Image of each block's coordinate subspace.
    pub block_spaces: Vec<Subspace>,
    /// One entry per assignment, in lexicographic order.
    pub expected: Vec<ExpectedPart>,
}

impl PlantedTuple {
    pub fn expected_part(&self, labels: &[TypeLabel]) -> Option<&ExpectedPart> {
        self.expected.iter().find(|e| e.assignment.labels() == labels)
    }

    pub fn expected_dims(&self) -> Vec<usize> {
        self.expected.iter().map(ExpectedPart::dim).collect()
    }
}

/// Direct-sums the blocks per component and conjugates every component by
/// one Haar unitary drawn from `seed`.
pub fn gen_planted(spec: &PlantedSpec) -> Result<PlantedTuple> {
    let first = spec
        .blocks
        .first()
        .ok_or_else(|| Error::InconsistentBlocks("no blocks".into()))?;
    let n = first.ops.len();
    if n == 0 {
        return Err(Error::InconsistentBlocks("block with no components".into()));
    }
    let alphabet = first
        .labels
        .first()
        .ok_or_else(|| Error::InconsistentBlocks("block with no labels".into()))?
        .alphabet();
    let mut offsets = Vec::with_capacity(spec.blocks.len());
    let mut total = 0;
    for (b, block) in spec.blocks.iter().enumerate() {
        if block.ops.len() != n || block.labels.len() != n {
            return Err(Error::InconsistentBlocks(format!(
                "block {b} has {} operators and {} labels, expected {n}",
                block.ops.len(),
                block.labels.len()
            )));
        }
        let d = block.ops[0].dim();
        if block.ops.iter().any(|t| t.dim() != d) {
            return Err(Error::InconsistentBlocks(format!("block {b} mixes dimensions")));
        }
        if block.labels.iter().any(|l| l.alphabet() != alphabet) {
            return Err(Error::InconsistentBlocks(format!("block {b} mixes label alphabets")));
        }
        offsets.push(total);
        total += d;
    }

    let q = haar_unitary_seeded(total, spec.seed);
    let ops = (0..n)
        .map(|i| {
            let blocks: Vec<ComplexMatrix> = spec.blocks.iter().map(|b| b.ops[i].clone()).collect();
            ComplexMatrix::direct_sum(&blocks).conjugate_by(&q)
        })
        .collect();
    let coords = |b: usize| -> Vec<usize> { (offsets[b]..offsets[b] + spec.blocks[b].ops[0].dim()).collect() };
    let block_spaces = (0..spec.blocks.len())
        .map(|b| Subspace::coordinate(total, &coords(b)).image(&q))
        .collect();
    let expected = TypeAssignment::all(alphabet, n)
        .into_iter()
        .map(|assignment| {
            let idx: Vec<usize> = spec
                .blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| b.labels == assignment.labels())
                .flat_map(|(b, _)| coords(b))
                .collect();
            ExpectedPart {
                assignment,
                space: Subspace::coordinate(total, &idx).image(&q),
            }
        })
        .collect();
    Ok(PlantedTuple {
        ops,
        conjugator: q,
        alphabet,
        block_spaces,
        expected,
    })
}

/// Expected `(u, r, c)` dimensions of the canonical split of a planted single
/// operator: `t_c` blocks count towards `c`, and each eigenvalue of a `t_u`
/// block counts towards `u` or `r` by the nearer circle.
pub fn expected_canonical_dims(spec: &PlantedSpec, r: f64) -> Result<[usize; 3]> {
    let mut dims = [0usize; 3];
    for block in &spec.blocks {
        if block.ops.len() != 1 {
            return Err(Error::InconsistentBlocks("canonical dims need single-component blocks".into()));
        }
        match block.labels[0] {
            TypeLabel::Tu => {
                for z in eigenvalues(&block.ops[0])? {
                    if (z.norm() - 1.0).abs() <= (z.norm() - r).abs() {
                        dims[0] += 1;
                    } else {
                        dims[1] += 1;
                    }
                }
            }
            TypeLabel::Tc => dims[2] += block.ops[0].dim(),
            other => {
                return Err(Error::InconsistentBlocks(format!(
                    "canonical dims need atom labels, got {}",
                    other.as_str()
                )))
            }
        }
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify;
    use crate::decompose;
    use crate::family;

    fn p(r: f64) -> AnnulusParams {
        AnnulusParams::new(r).unwrap()
    }

    #[test]
    fn ar_unitary_examples() {
        let t = gen_ar_unitary(&[c(1.0, 0.0), c(0.0, 1.0)], &[c(0.5, 0.0)], &p(0.5)).unwrap();
        assert_eq!(t.to_row_major()[0], c(1.0, 0.0));
        assert_eq!(t.get(1, 1), c(0.0, 1.0));
        assert_eq!(t.get(2, 2), c(0.5, 0.0));
        assert_eq!(classify::ar_unitary_residual(&t, 0.5), 0.0);

        let u = gen_ar_unitary(&[c(-1.0, 0.0), c(0.0, -1.0)], &[], &p(0.5)).unwrap();
        assert_eq!(u.dim(), 2);
        assert!(classify::is_ar_unitary(&u, &p(0.5)));

        let err = gen_ar_unitary(&[c(0.9, 0.0)], &[], &p(0.5)).unwrap_err();
        assert_eq!(err.kind(), "EigenvalueOffBoundary");
        let err = gen_ar_unitary(&[], &[c(0.6, 0.0)], &p(0.5)).unwrap_err();
        assert_eq!(err.kind(), "EigenvalueOffBoundary");
    }

    #[test]
    fn cyclic_examples() {
        let t = gen_cyclic_annulus_unitary(3, 2, &p(0.5)).unwrap();
        assert_eq!(t.dim(), 5);
        assert_eq!(classify::normality_defect(&t), 0.0);
        assert!(classify::is_ar_unitary(&t, &p(0.5)));
        let split = decompose::split_ar_unitary(&t, &p(0.5)).unwrap();
        assert_eq!(split.dims(), vec![3, 2]);

        let t = gen_cyclic_annulus_unitary(1, 1, &p(0.3)).unwrap();
        assert_eq!(t.to_row_major(), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);

        let t = gen_cyclic_annulus_unitary(4, 3, &p(0.5)).unwrap();
        let mut eigs = eigenvalues(&t).unwrap();
        let mut roots: Vec<Complex64> = (0..4)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 4.0))
            .chain((0..3).map(|k| Complex64::from_polar(0.5, std::f64::consts::TAU * k as f64 / 3.0)))
            .collect();
        let key = |z: &Complex64| (z.norm() * 1e6).round() as i64 * 100_000 + (z.arg() * 1e4).round() as i64;
        eigs.sort_by_key(key);
        roots.sort_by_key(key);
        for (a, b) in eigs.iter().zip(&roots) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn haar_is_unitary_and_seeded() {
        let q = haar_unitary_seeded(6, 7);
        let err = (&(&q.adjoint() * &q) - &ComplexMatrix::identity(6)).norm();
        assert!(err < 1e-13);
        assert_eq!(q, haar_unitary_seeded(6, 7));
        assert_ne!(q, haar_unitary_seeded(6, 8));
    }

    #[test]
    fn cnu_candidates() {
        let mut rng = seeded_rng(3);
        for n in 1..6 {
            for &r in &[0.3, 0.5, 0.9] {
                let t = random_cnu_candidate(n, r, &mut rng);
                let prm = p(r);
                assert!(classify::is_ar_contraction_candidate(&t, &prm).unwrap());
                assert_eq!(classify::classify_atom(&t, &prm).unwrap(), classify::AtomLabel::Tc);
            }
        }
    }

    #[test]
    fn hardy_constants() {
        let spec = HardyModelSpec::new(0.0, 0.5, -5, 5).unwrap();
        let h = gen_hardy_shift(&spec).unwrap();
        let i0 = spec.position(0).unwrap();
        assert_eq!(h.weights[i0], 2.0);
        assert_eq!(h.weights[i0 + 1], 1.25);
        assert_eq!(h.matrix.get(i0 + 1, i0).re, 0.625f64.sqrt());
        assert_eq!(h.matrix.get(spec.len() - 1, spec.len() - 1), c(0.0, 0.0));
        for n in spec.indices() {
            let tele = spec.weight(n) - spec.weight(n + 1);
            let rhs = 0.5f64.powf(2.0 * n as f64) * 0.75;
            assert!((tele - rhs).abs() <= 1e-14 * rhs.max(1.0));
            let second = spec.weight(n + 2) - 1.25 * spec.weight(n + 1) + 0.25 * spec.weight(n);
            assert!(second.abs() <= 1e-14 * spec.weight(n));
        }
        let q = classify::ar_isometry_defect(&h.matrix, 0.5);
        for n in spec.n_min..=spec.n_max - 2 {
            let j = spec.position(n).unwrap();
            assert!(q.get(j, j).norm() <= 1e-12, "n = {n}: {}", q.get(j, j));
        }
        assert_eq!(
            HardyModelSpec::new(0.0, 0.5, 0, 1).unwrap_err(),
            Error::WindowTooSmall { needed: 3, got: 2 }
        );
    }

    #[test]
    fn sarason_ratios_follow_the_norm_formula() {
        assert!((sarason_ratio(0.0, 0.5, -1) - 5.0 / 17.0).abs() < 1e-15);
        assert!((sarason_ratio(0.0, 0.5, 0) - 0.4).abs() < 1e-15);
        assert!((sarason_ratio(0.0, 0.5, 1) - 0.625).abs() < 1e-15);
        let coeff = 0.4 * (5.0 / 17.0) - 0.625 * 0.4;
        assert!((sarason_w_coefficient(0.0, 0.5) - coeff).abs() < 1e-15);
    }

    #[test]
    fn sarason_pair_structure() {
        let spec = HardyModelSpec::new(0.0, 0.5, -5, 5).unwrap();
        let pair = gen_sarason_pair(&spec).unwrap();
        assert_eq!(pair.r_squared, 0.25);
        let comm = &(&pair.v1 * &pair.v2) - &(&pair.v2 * &pair.v1);
        assert!(comm.norm() <= 1e-13);
        let v2s = pair.v2.adjoint();
        let defect = &(&pair.v1 * &v2s) - &(&v2s * &pair.v1);
        assert!(defect.norm() >= 0.1);
        assert!(!family::is_doubly_commuting(&[pair.v1.clone(), pair.v2.clone()], 1e-8).unwrap());
        let from_matrix = pair.w_coefficient_from_matrix().unwrap();
        assert!((from_matrix - sarason_w_coefficient(0.0, 0.5)).abs() < 1e-12);

        let short = HardyModelSpec::new(0.0, 0.5, 0, 3).unwrap();
        assert_eq!(
            gen_sarason_pair(&short).unwrap_err(),
            Error::WindowTooSmall { needed: 5, got: 4 }
        );
    }

    #[test]
    fn shifted_sarason_pair_is_candidate() {
        let spec = HardyModelSpec::new(0.0, 0.5, -3, 3).unwrap();
        let pair = gen_shifted_sarason_pair(&spec, 0.8, 0.1).unwrap();
        let prm = p(pair.r_squared);
        assert!(classify::is_ar_contraction_candidate(&pair.v1, &prm).unwrap());
        assert!(classify::is_ar_contraction_candidate(&pair.v2, &prm).unwrap());
        let ops = [pair.v1.clone(), pair.v2.clone()];
        assert!(family::is_commuting(&ops, 1e-12).unwrap());
        assert!(!family::is_doubly_commuting(&ops, 1e-8).unwrap());
        assert_eq!(gen_shifted_sarason_pair(&spec, 0.3, 0.1).unwrap_err().kind(), "InvalidParams");
        assert_eq!(gen_shifted_sarason_pair(&spec, 0.95, 0.1).unwrap_err().kind(), "InvalidParams");
    }

    #[test]
    fn planted_canonical_dims() {
        let spec = PlantedSpec {
            blocks: vec![
                PlantedBlock { ops: vec![ComplexMatrix::diagonal_real(&[1.0])], labels: vec![TypeLabel::Tu] },
                PlantedBlock { ops: vec![ComplexMatrix::diagonal_real(&[0.7])], labels: vec![TypeLabel::Tc] },
            ],
            seed: 11,
        };
        assert_eq!(expected_canonical_dims(&spec, 0.5).unwrap(), [1, 0, 1]);
        let planted = gen_planted(&spec).unwrap();
        let split = decompose::canonical_ar_contraction(&planted.ops[0], &p(0.5)).unwrap();
        assert_eq!(split.dims(), vec![1, 0, 1]);
        assert!(split.part("u").unwrap().space.distance(&planted.block_spaces[0]) < 1e-8);
        assert_eq!(gen_planted(&spec).unwrap().conjugator, planted.conjugator);
    }

    #[test]
    fn planted_two_component_skeleton_matches_canonical_family() {
        use TypeLabel::*;
        let mut rng = seeded_rng(5);
        let mut blocks = Vec::new();
        for labels in [[Tu, Tu], [Tu, Tc], [Tc, Tc]] {
            let ops = random_atom_block(&labels, &[2, 1], 0.5, &mut rng).unwrap();
            blocks.push(PlantedBlock { ops, labels: labels.to_vec() });
        }
        let planted = gen_planted(&PlantedSpec { blocks, seed: 2 }).unwrap();
        assert_eq!(planted.expected_dims(), vec![2, 2, 0, 2]);
        let rep = family::canonical_family(&planted.ops, &p(0.5)).unwrap();
        assert_eq!(rep.dims(), planted.expected_dims());
        for (part, exp) in rep.parts.iter().zip(&planted.expected) {
            assert_eq!(part.assignment, exp.assignment);
            assert!(part.space.distance(&exp.space) < 1e-8);
        }
    }

    #[test]
    fn planted_rejects_inconsistent_blocks() {
        let spec = PlantedSpec {
            blocks: vec![
                PlantedBlock { ops: vec![ComplexMatrix::diagonal_real(&[1.0])], labels: vec![TypeLabel::Tu] },
                PlantedBlock { ops: vec![ComplexMatrix::diagonal_real(&[0.5])], labels: vec![TypeLabel::R] },
            ],
            seed: 0,
        };
        assert_eq!(gen_planted(&spec).unwrap_err().kind(), "InconsistentBlocks");
        let spec = PlantedSpec { blocks: vec![], seed: 0 };
        assert_eq!(gen_planted(&spec).unwrap_err().kind(), "InconsistentBlocks");
    }
}
