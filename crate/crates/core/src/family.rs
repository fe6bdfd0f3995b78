//! Joint decompositions of finite operator tuples.
//!
//! The `2^n` splits refine the space one component at a time: split by
//! component 1, compress every operator onto each part, split the
//! compressions by component 2, and so on. For doubly commuting tuples each
//! part produced for one component reduces all the others, so the
//! compressions are restrictions. Parts are emitted for every assignment in
//! lexicographic order, zero-dimensional ones included.

use std::fmt;

use serde::Serialize;

use crate::classify::{self, AtomLabel, UnitaryTypeLabel};
use crate::decompose::{self, SplitReport};
use crate::error::{Error, Result};
use crate::linops::{
    check_dim, complement, largest_reducing_within, null_space_scaled, orthonormalize,
    ComplexMatrix, Mat, Subspace,
};
use crate::params::AnnulusParams;

/// Largest supported tuple length.
pub const MAX_TUPLE_LEN: usize = 16;

/// Tag attached to the remainder of the commuting split.
pub const STRONGLY_CNU_TAG: &str = "strongly_cnu";

/// One symbol of a type assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeLabel {
    #[serde(rename = "t_u")]
    Tu,
    #[serde(rename = "t_c")]
    Tc,
    #[serde(rename = "u")]
    U,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "t_p")]
    Tp,
    #[serde(rename = "t_cni")]
    Tcni,
}

impl TypeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tu => "t_u",
            Self::Tc => "t_c",
            Self::U => "u",
            Self::R => "r",
            Self::Tp => "t_p",
            Self::Tcni => "t_cni",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "t_u" => Self::Tu,
            "t_c" => Self::Tc,
            "u" => Self::U,
            "r" => Self::R,
            "t_p" => Self::Tp,
            "t_cni" => Self::Tcni,
            other => return Err(Error::Parse(format!("unknown type label {other:?}"))),
        })
    }

    pub fn alphabet(self) -> Alphabet {
        match self {
            Self::Tu | Self::Tc => Alphabet::Atom,
            Self::U | Self::R => Alphabet::Unitary,
            Self::Tp | Self::Tcni => Alphabet::Levan,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three two-letter alphabets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `{t_u, t_c}`
    Atom,
    /// `{u, r}`
    Unitary,
    /// `{t_p, t_cni}`
    Levan,
}

impl Alphabet {
    /// The two symbols in lexicographic order.
    pub fn symbols(self) -> [TypeLabel; 2] {
        match self {
            Self::Atom => [TypeLabel::Tu, TypeLabel::Tc],
            Self::Unitary => [TypeLabel::U, TypeLabel::R],
            Self::Levan => [TypeLabel::Tp, TypeLabel::Tcni],
        }
    }
}

/// A map from component indices to one alphabet, e.g. `(t_u, t_c, t_u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct TypeAssignment {
    labels: Vec<TypeLabel>,
}

impl TypeAssignment {
    pub fn new(labels: Vec<TypeLabel>) -> Result<Self> {
        let Some(first) = labels.first() else {
            return Err(Error::InvalidParams("empty type assignment".into()));
        };
        let a = first.alphabet();
        if labels.iter().any(|l| l.alphabet() != a) {
            return Err(Error::InvalidParams("type assignment mixes alphabets".into()));
        }
        Ok(Self { labels })
    }

    /// All `2^n` assignments, lexicographic with the first component most
    /// significant.
    pub fn all(alphabet: Alphabet, n: usize) -> Vec<Self> {
        let [a, b] = alphabet.symbols();
        (0..1usize << n)
            .map(|mask| Self {
                labels: (0..n)
                    .map(|i| if mask >> (n - 1 - i) & 1 == 0 { a } else { b })
                    .collect(),
            })
            .collect()
    }

    pub fn labels(&self) -> &[TypeLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn count(&self, label: TypeLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// The assignment seen after reordering the tuple so that new component
    /// `i` is old component `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&j| self.labels[j]).collect(),
        }
    }
}

impl fmt::Display for TypeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(l.as_str())?;
        }
        f.write_str(")")
    }
}

/// One jointly reducing part of a family decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyPart {
    pub assignment: TypeAssignment,
    #[serde(skip)]
    pub space: Subspace,
    /// Per component: `max(||P⊥ T_i P||, ||P⊥ T_i* P||)`.
    pub reduction_residuals: Vec<f64>,
    /// Per component: whether the compression of `T_i` passes the predicate
    /// named by its label. Vacuously true for zero-dimensional parts.
    pub label_verified: Vec<bool>,
}

impl FamilyPart {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// The part of the commuting split that carries no joint reducing subspace
/// with `n - 1` A_r-unitary components.
#[derive(Clone, Debug, Serialize)]
pub struct Remainder {
    #[serde(skip)]
    pub space: Subspace,
    pub tag: &'static str,
    /// For each left-out component `l`: dimension of the largest joint
    /// reducing subspace of the remainder on which every other component is
    /// an A_r-unitary. All zeros when the remainder is strongly c.n.u.
    pub leave_one_out_dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub parts: Vec<FamilyPart>,
    pub remainder: Option<Remainder>,
    /// Dimension of the largest jointly reducing doubly commuting subspace
    /// (commuting split only).
    pub doubly_commuting_dim: Option<usize>,
    pub notes: Vec<String>,
}

impl FamilyReport {
    pub fn part(&self, assignment: &TypeAssignment) -> Option<&FamilyPart> {
        self.parts.iter().find(|p| &p.assignment == assignment)
    }

    pub fn part_by_labels(&self, labels: &[TypeLabel]) -> Option<&FamilyPart> {
        self.parts.iter().find(|p| p.assignment.labels() == labels)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(FamilyPart::dim).collect()
    }

    /// Sum of all part dimensions plus the remainder.
    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(FamilyPart::dim).sum::<usize>()
            + self.remainder.as_ref().map_or(0, |r| r.space.dim())
    }

    /// Largest pairwise overlap between distinct parts and the remainder.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut spaces: Vec<&Subspace> = self.parts.iter().map(|p| &p.space).collect();
        if let Some(r) = &self.remainder {
            spaces.push(&r.space);
        }
        let mut worst: f64 = 0.0;
        for (i, a) in spaces.iter().enumerate() {
            for b in &spaces[i + 1..] {
                worst = worst.max(a.overlap(b));
            }
        }
        worst
    }

    pub fn max_reduction_residual(&self) -> f64 {
        self.parts
            .iter()
            .flat_map(|p| p.reduction_residuals.iter().copied())
            .fold(0.0, f64::max)
    }
}

fn check_tuple(ops: &[ComplexMatrix]) -> Result<usize> {
    if ops.is_empty() {
        return Err(Error::InvalidParams("empty operator tuple".into()));
    }
    if ops.len() > MAX_TUPLE_LEN {
        return Err(Error::ExplicitCap(ops.len(), MAX_TUPLE_LEN));
    }
    let n = ops[0].dim();
    for t in ops {
        check_dim(n, t.dim())?;
    }
    Ok(n)
}

fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&(a * b) - &(b * a)).norm()
}

/// First pair `(i, j)`, `i < j`, with `||T_i T_j - T_j T_i||` above tolerance.
fn first_non_commuting(ops: &[ComplexMatrix], tol_id: f64) -> Option<(usize, usize)> {
    let norms: Vec<f64> = ops.iter().map(ComplexMatrix::norm).collect();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if commutator_norm(&ops[i], &ops[j]) > tol_id * norms[i] * norms[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// First pair `(i, j)`, `i < j`, that fails to commute or whose members fail
/// to commute with each other's adjoints.
fn first_non_doubly_commuting(ops: &[ComplexMatrix], tol_id: f64) -> Option<(usize, usize)> {
    let norms: Vec<f64> = ops.iter().map(ComplexMatrix::norm).collect();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let bound = tol_id * norms[i] * norms[j];
            if commutator_norm(&ops[i], &ops[j]) > bound
                || commutator_norm(&ops[i], &ops[j].adjoint()) > bound
            {
                return Some((i, j));
            }
        }
    }
    None
}

/// Pairwise commuting to tolerance, relative to `||T_i|| ||T_j||`.
pub fn is_commuting(ops: &[ComplexMatrix], tol_id: f64) -> Result<bool> {
    check_tuple(ops)?;
    Ok(first_non_commuting(ops, tol_id).is_none())
}

/// `T_i T_j = T_j T_i` and `T_i T_j* = T_j* T_i` for all `i != j`, to
/// tolerance relative to `||T_i|| ||T_j||`.
pub fn is_doubly_commuting(ops: &[ComplexMatrix], tol_id: f64) -> Result<bool> {
    check_tuple(ops)?;
    Ok(first_non_doubly_commuting(ops, tol_id).is_none())
}

/// Splits a compressed operator into the parts labelled by the first and
/// second alphabet symbol.
type Splitter<'a> = dyn Fn(&ComplexMatrix) -> Result<(Subspace, Subspace)> + 'a;

fn refine(
    ops: &[ComplexMatrix],
    alphabet: Alphabet,
    split: &Splitter<'_>,
) -> Result<Vec<(TypeAssignment, Subspace)>> {
    let n = ops[0].dim();
    let [first, second] = alphabet.symbols();
    let mut level: Vec<(Vec<TypeLabel>, Subspace)> = vec![(Vec::new(), Subspace::full(n))];
    for t in ops {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (prefix, space) in level {
            let with = |l: TypeLabel| {
                let mut v = prefix.clone();
                v.push(l);
                v
            };
            if space.is_zero() {
                next.push((with(first), Subspace::zero(n)));
                next.push((with(second), Subspace::zero(n)));
                continue;
            }
            let frame = Subspace::from_frame_unchecked(orthonormalize(space.basis()));
            let local = t.compress(&frame)?;
            let (a, b) = split(&local)?;
            next.push((with(first), frame.lift(&a)?));
            next.push((with(second), frame.lift(&b)?));
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .map(|(labels, space)| (TypeAssignment { labels }, space))
        .collect())
}

fn merged(report: &SplitReport, a: &str, b: &str, tol_rank: f64) -> Result<Subspace> {
    let pa = &report.part(a).expect("split has the label").space;
    let pb = &report.part(b).expect("split has the label").space;
    pa.sum(pb, tol_rank)
}

fn verify_label(t: &ComplexMatrix, label: TypeLabel, p: &AnnulusParams) -> bool {
    match label {
        TypeLabel::Tu => classify::is_ar_unitary(t, p),
        TypeLabel::Tc => matches!(classify::classify_atom(t, p), Ok(AtomLabel::Tc)),
        TypeLabel::U => matches!(classify::classify_unitary_type(t, p), Ok(UnitaryTypeLabel::U)),
        TypeLabel::R => matches!(classify::classify_unitary_type(t, p), Ok(UnitaryTypeLabel::R)),
        TypeLabel::Tp => {
            matches!(decompose::levan_split(t, p), Ok(s) if s.dim_of("iso") == t.dim())
        }
        TypeLabel::Tcni => {
            matches!(decompose::levan_split(t, p), Ok(s) if s.dim_of("iso") == 0)
        }
    }
}

fn annotate(
    ops: &[ComplexMatrix],
    p: &AnnulusParams,
    raw: Vec<(TypeAssignment, Subspace)>,
) -> Result<Vec<FamilyPart>> {
    raw.into_iter()
        .map(|(assignment, space)| {
            let reduction_residuals = ops.iter().map(|t| space.reduction_residual(t)).collect();
            let label_verified = if space.is_zero() {
                vec![true; ops.len()]
            } else {
                let frame = Subspace::from_frame_unchecked(orthonormalize(space.basis()));
                ops.iter()
                    .zip(assignment.labels())
                    .map(|(t, &l)| Ok(verify_label(&t.compress(&frame)?, l, p)))
                    .collect::<Result<Vec<bool>>>()?
            };
            Ok(FamilyPart {
                assignment,
                space,
                reduction_residuals,
                label_verified,
            })
        })
        .collect()
}

fn require_doubly_commuting(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<()> {
    match first_non_doubly_commuting(ops, p.tol_id) {
        Some((i, j)) => Err(Error::NotDoublyCommuting(i + 1, j + 1)),
        None => Ok(()),
    }
}

fn canonical_refine(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<Vec<(TypeAssignment, Subspace)>> {
    let split = |t: &ComplexMatrix| {
        let s = decompose::canonical_ar_contraction(t, p)?;
        Ok((merged(&s, "u", "r", p.tol_rank)?, s.part("c").unwrap().space.clone()))
    };
    refine(ops, Alphabet::Atom, &split)
}

fn collapse_note(parts: &[FamilyPart], label: TypeLabel, what: &str) -> String {
    let carrying = parts
        .iter()
        .filter(|q| q.assignment.count(label) > 0)
        .filter(|q| q.dim() > 0)
        .count();
    if carrying == 0 {
        format!("finite-dimensional collapse: every {label}-labelled part is {{0}} ({what} do not exist in finite dimensions)")
    } else {
        format!("{carrying} {label}-labelled part(s) are nonzero; {what} do not exist in finite dimensions, check tolerances")
    }
}

/// `2^n` canonical split of a doubly commuting tuple of A_r-contraction
/// candidates over the alphabet `{t_u, t_c}`.
pub fn canonical_family(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<FamilyReport> {
    check_tuple(ops)?;
    for (i, t) in ops.iter().enumerate() {
        if let Some(why) = classify::candidate_violation(t, p)? {
            return Err(Error::NotACandidate(format!("component {}: {why}", i + 1)));
        }
    }
    require_doubly_commuting(ops, p)?;
    let raw = canonical_refine(ops, p)?;
    Ok(FamilyReport {
        parts: annotate(ops, p, raw)?,
        remainder: None,
        doubly_commuting_dim: None,
        notes: Vec::new(),
    })
}

/// `2^n` Wold split of a doubly commuting tuple of A_r-isometries. The
/// `t_c` symbol marks pure parts.
pub fn wold_family(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<FamilyReport> {
    check_tuple(ops)?;
    for t in ops {
        if !classify::is_ar_isometry(t, p)? {
            return Err(Error::NotArIsometry(classify::ar_isometry_residual(t, p.r)));
        }
    }
    require_doubly_commuting(ops, p)?;
    let split = |t: &ComplexMatrix| {
        let s = decompose::wold_ar_isometry(t, p)?;
        Ok((merged(&s, "u", "r", p.tol_rank)?, s.part("p").unwrap().space.clone()))
    };
    let raw = refine(ops, Alphabet::Atom, &split)?;
    let parts = annotate_wold(ops, p, raw)?;
    let notes = vec![collapse_note(&parts, TypeLabel::Tc, "pure A_r-isometries")];
    Ok(FamilyReport {
        parts,
        remainder: None,
        doubly_commuting_dim: None,
        notes,
    })
}

// Wold parts carry t_c for "pure"; verify that as "A_r-isometry with no
// A_r-unitary part" rather than as a c.n.u. candidate.
fn annotate_wold(
    ops: &[ComplexMatrix],
    p: &AnnulusParams,
    raw: Vec<(TypeAssignment, Subspace)>,
) -> Result<Vec<FamilyPart>> {
    let mut parts = Vec::with_capacity(raw.len());
    for (assignment, space) in raw {
        let reduction_residuals = ops.iter().map(|t| space.reduction_residual(t)).collect();
        let mut label_verified = vec![true; ops.len()];
        if !space.is_zero() {
            let frame = Subspace::from_frame_unchecked(orthonormalize(space.basis()));
            for (i, (t, &l)) in ops.iter().zip(assignment.labels()).enumerate() {
                let a = t.compress(&frame)?;
                label_verified[i] = match l {
                    TypeLabel::Tu => classify::is_ar_unitary(&a, p),
                    _ => matches!(decompose::wold_ar_isometry(&a, p), Ok(s) if s.dim_of("p") == a.dim()),
                };
            }
        }
        parts.push(FamilyPart {
            assignment,
            space,
            reduction_residuals,
            label_verified,
        });
    }
    Ok(parts)
}

/// `2^n` split of a commuting tuple of A_r-unitaries over `{u, r}`.
pub fn unitary_family(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<FamilyReport> {
    check_tuple(ops)?;
    for t in ops {
        if !classify::is_ar_unitary(t, p) {
            return Err(Error::NotArUnitary(classify::ar_unitary_residual(t, p.r)));
        }
    }
    if let Some((i, j)) = first_non_commuting(ops, p.tol_id) {
        return Err(Error::NotCommuting(i + 1, j + 1));
    }
    let split = |t: &ComplexMatrix| {
        let s = decompose::split_ar_unitary(t, p)?;
        Ok((
            s.part("u").unwrap().space.clone(),
            s.part("r").unwrap().space.clone(),
        ))
    };
    let raw = refine(ops, Alphabet::Unitary, &split)?;
    Ok(FamilyReport {
        parts: annotate(ops, p, raw)?,
        remainder: None,
        doubly_commuting_dim: None,
        notes: Vec::new(),
    })
}

/// `2^n` Levan split of a doubly commuting tuple of c.n.u. A_r-contractions
/// over `{t_p, t_cni}`.
pub fn levan_family(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<FamilyReport> {
    check_tuple(ops)?;
    for t in ops {
        if classify::classify_atom(t, p)? != AtomLabel::Tc {
            return Err(Error::NotCnu);
        }
    }
    require_doubly_commuting(ops, p)?;
    let split = |t: &ComplexMatrix| {
        let s = decompose::levan_split(t, p)?;
        Ok((
            s.part("iso").unwrap().space.clone(),
            s.part("cni").unwrap().space.clone(),
        ))
    };
    let raw = refine(ops, Alphabet::Levan, &split)?;
    let parts = annotate(ops, p, raw)?;
    let notes = vec![collapse_note(&parts, TypeLabel::Tp, "pure A_r-isometries")];
    Ok(FamilyReport {
        parts,
        remainder: None,
        doubly_commuting_dim: None,
        notes,
    })
}

/// Largest joint reducing subspace on which the tuple doubly commutes: the
/// largest jointly reducing subspace inside `∩_{i != j} Ker(T_i T_j* - T_j* T_i)`.
pub fn doubly_commuting_part(ops: &[ComplexMatrix], tol_rank: f64) -> Result<Subspace> {
    let n = check_tuple(ops)?;
    let k = ops.len();
    if k < 2 {
        return Ok(Subspace::full(n));
    }
    let mut stacked = Mat::zeros(k * (k - 1) * n, n);
    let mut scale: f64 = 0.0;
    let mut row = 0;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let tj_star = ops[j].adjoint();
            let d = &(&ops[i] * &tj_star) - &(&tj_star * &ops[i]);
            scale = scale.max(ops[i].norm() * ops[j].norm());
            stacked.rows_mut(row, n).copy_from(d.as_matrix());
            row += n;
        }
    }
    let kernel = Subspace::from_frame_unchecked(null_space_scaled(&stacked, tol_rank, scale)?);
    largest_reducing_within(ops, &kernel, tol_rank)
}

/// For each left-out component, the largest joint reducing subspace of `space`
/// on which all other components act as A_r-unitaries.
fn leave_one_out_dims(ops: &[ComplexMatrix], space: &Subspace, p: &AnnulusParams) -> Result<Vec<usize>> {
    let n = space.ambient_dim();
    let id = ComplexMatrix::identity(n);
    let mut dims = Vec::with_capacity(ops.len());
    for left_out in 0..ops.len() {
        if space.is_zero() {
            dims.push(0);
            continue;
        }
        let mut blocks: Vec<Mat> = Vec::new();
        for (i, t) in ops.iter().enumerate() {
            if i == left_out {
                continue;
            }
            let g = &t.adjoint() * t;
            let nrm2 = t.norm().powi(2).max(f64::MIN_POSITIVE);
            let normality = (&g - &(t * &t.adjoint())).scale(1.0 / nrm2);
            let boundary = &(&id - &g) * &(&g - &id.scale(p.r * p.r));
            blocks.push(normality.as_matrix() * space.basis());
            blocks.push(boundary.as_matrix() * space.basis());
        }
        let within = if blocks.is_empty() {
            space.clone()
        } else {
            let mut stacked = Mat::zeros(blocks.len() * n, space.dim());
            for (b, m) in blocks.iter().enumerate() {
                stacked.rows_mut(b * n, n).copy_from(m);
            }
            let coeffs = null_space_scaled(&stacked, p.tol_rank, 1.0)?;
            Subspace::from_frame_unchecked(orthonormalize(&(space.basis() * coeffs)))
        };
        dims.push(largest_reducing_within(ops, &within, p.tol_rank)?.dim());
    }
    Ok(dims)
}

/// Commuting split into `n + 1` jointly reducing parts (all components
/// A_r-unitary, or exactly one c.n.u.) plus a strongly c.n.u. remainder.
/// Double commutativity is not required.
pub fn burdak_family(ops: &[ComplexMatrix], p: &AnnulusParams) -> Result<FamilyReport> {
    let n = check_tuple(ops)?;
    for (i, t) in ops.iter().enumerate() {
        if let Some(why) = classify::candidate_violation(t, p)? {
            return Err(Error::NotACandidate(format!("component {}: {why}", i + 1)));
        }
    }
    if let Some((i, j)) = first_non_commuting(ops, p.tol_id) {
        return Err(Error::NotCommuting(i + 1, j + 1));
    }
    let k = ops.len();
    let hdc = doubly_commuting_part(ops, p.tol_rank)?;

    let mut wanted: Vec<TypeAssignment> = vec![TypeAssignment {
        labels: vec![TypeLabel::Tu; k],
    }];
    for j in 0..k {
        let mut labels = vec![TypeLabel::Tu; k];
        labels[j] = TypeLabel::Tc;
        wanted.push(TypeAssignment { labels });
    }

    let mut kept: Vec<(TypeAssignment, Subspace)> = Vec::with_capacity(k + 1);
    if hdc.is_zero() {
        for a in wanted {
            kept.push((a, Subspace::zero(n)));
        }
    } else {
        let frame = Subspace::from_frame_unchecked(orthonormalize(hdc.basis()));
        let local_ops = ops
            .iter()
            .map(|t| t.compress(&frame))
            .collect::<Result<Vec<_>>>()?;
        let local = canonical_refine(&local_ops, p)?;
        for a in wanted {
            let (_, space) = local
                .iter()
                .find(|(b, _)| *b == a)
                .expect("canonical refinement emits every assignment");
            kept.push((a, frame.lift(space)?));
        }
    }

    let mut covered = Subspace::zero(n);
    for (_, s) in &kept {
        covered = covered.sum(s, p.tol_rank)?;
    }
    let rest = complement(&covered);
    let leave_one_out = leave_one_out_dims(ops, &rest, p)?;
    let notes = vec![
        "strong c.n.u. check of the remainder is a leave-one-out refinement spot-check, not a proof".to_string(),
    ];
    Ok(FamilyReport {
        parts: annotate(ops, p, kept)?,
        remainder: Some(Remainder {
            space: rest,
            tag: STRONGLY_CNU_TAG,
            leave_one_out_dims: leave_one_out,
        }),
        doubly_commuting_dim: Some(hdc.dim()),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn p(r: f64) -> AnnulusParams {
        AnnulusParams::new(r).unwrap()
    }

    fn d(x: &[f64]) -> ComplexMatrix {
        ComplexMatrix::diagonal_real(x)
    }

    fn cyclic(n: usize) -> ComplexMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[((j + 1) % n) * n + j] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix::from_row_major(n, &data).unwrap()
    }

    use TypeLabel::*;

    #[test]
    fn assignments_are_lexicographic() {
        let all = TypeAssignment::all(Alphabet::Atom, 2);
        let labels: Vec<Vec<TypeLabel>> = all.iter().map(|a| a.labels().to_vec()).collect();
        assert_eq!(labels, vec![vec![Tu, Tu], vec![Tu, Tc], vec![Tc, Tu], vec![Tc, Tc]]);
        assert!(TypeAssignment::new(vec![Tu, R]).is_err());
        assert!(TypeAssignment::new(vec![]).is_err());
        assert_eq!(TypeAssignment::new(vec![Tu, Tc]).unwrap().to_string(), "(t_u,t_c)");
    }

    #[test]
    fn doubly_commuting_examples() {
        assert!(is_doubly_commuting(&[d(&[1.0, 0.5]), d(&[0.3, 2.0])], 1e-8).unwrap());
        let c4 = cyclic(4);
        assert!(is_doubly_commuting(&[c4.clone(), c4.pow(2)], 1e-8).unwrap());
        let j = ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.0, 0.7]]).unwrap();
        assert!(is_commuting(&[j.clone(), j.pow(2)], 1e-8).unwrap());
        assert!(!is_doubly_commuting(&[j.clone(), j.pow(2)], 1e-8).unwrap());
        assert_eq!(
            is_doubly_commuting(&[d(&[1.0]), d(&[1.0, 1.0])], 1e-8).unwrap_err().kind(),
            "DimensionMismatch"
        );
    }

    #[test]
    fn canonical_family_sorts_diagonal_coordinates() {
        let t1 = d(&[1.0, 1.0, 0.7, 0.7]);
        let t2 = d(&[1.0, 0.7, 1.0, 0.7]);
        let rep = canonical_family(&[t1, t2], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![1, 1, 1, 1]);
        for (idx, part) in rep.parts.iter().enumerate() {
            assert!(part.space.distance(&Subspace::coordinate(4, &[idx])) < 1e-10);
            assert!(part.label_verified.iter().all(|&v| v));
        }
    }

    #[test]
    fn canonical_family_unitary_pair_has_single_part() {
        let rep = canonical_family(&[d(&[1.0, 0.5]), d(&[0.5, -1.0])], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![2, 0, 0, 0]);
    }

    #[test]
    fn canonical_family_rejects_non_doubly_commuting() {
        let j = ComplexMatrix::from_real_rows(&[&[0.8, 0.1], &[0.0, 0.8]]).unwrap();
        let err = canonical_family(&[j.clone(), j.pow(2)], &p(0.25)).unwrap_err();
        assert_eq!(err, Error::NotDoublyCommuting(1, 2));
    }

    #[test]
    fn unitary_family_examples() {
        let rep = unitary_family(&[d(&[1.0, 0.5]), d(&[0.5, 1.0])], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![0, 1, 1, 0]);
        assert!(rep.part_by_labels(&[U, R]).unwrap().space.distance(&Subspace::coordinate(2, &[0])) < 1e-12);
        assert!(rep.part_by_labels(&[R, U]).unwrap().space.distance(&Subspace::coordinate(2, &[1])) < 1e-12);

        let b = ComplexMatrix::direct_sum(&[cyclic(2), cyclic(2).scale(0.5)]);
        let rep = unitary_family(&[b.clone(), b], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![2, 0, 0, 2]);
    }

    #[test]
    fn wold_family_collapses() {
        let rep = wold_family(&[d(&[1.0, 0.5]), d(&[0.5, 0.5])], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![2, 0, 0, 0]);
        assert!(rep.notes[0].starts_with("finite-dimensional collapse"));
    }

    #[test]
    fn levan_family_collapses() {
        let j = ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.0, 0.7]]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let a = j.kron(&i2);
        let b = i2.kron(&j);
        let rep = levan_family(&[a, b], &p(0.5)).unwrap();
        assert_eq!(rep.dims(), vec![0, 0, 0, 4]);
        assert_eq!(rep.parts.len(), 4);
    }

    #[test]
    fn cap_on_tuple_length() {
        let ops = vec![d(&[1.0]); 17];
        assert_eq!(canonical_family(&ops, &p(0.5)).unwrap_err(), Error::ExplicitCap(17, 16));
    }

    #[test]
    fn burdak_on_doubly_commuting_input() {
        let t1 = d(&[1.0, 1.0, 0.7, 0.7]);
        let t2 = d(&[1.0, 0.7, 1.0, 0.7]);
        let rep = burdak_family(&[t1, t2], &p(0.5)).unwrap();
        assert_eq!(rep.doubly_commuting_dim, Some(4));
        assert_eq!(rep.dims(), vec![1, 1, 1]);
        let rem = rep.remainder.as_ref().unwrap();
        assert!(rem.space.distance(&Subspace::coordinate(4, &[3])) < 1e-10);
        assert_eq!(rem.leave_one_out_dims, vec![0, 0]);
        assert_eq!(rep.total_dim(), 4);
    }

    #[test]
    fn burdak_isolates_non_doubly_commuting_block() {
        let j = ComplexMatrix::from_real_rows(&[&[0.8, 0.1], &[0.0, 0.8]]).unwrap();
        let t1 = ComplexMatrix::direct_sum(&[d(&[1.0]), j.clone()]);
        let t2 = ComplexMatrix::direct_sum(&[d(&[0.25]), j.pow(2)]);
        let rep = burdak_family(&[t1, t2], &p(0.25)).unwrap();
        assert_eq!(rep.doubly_commuting_dim, Some(1));
        assert!(rep.parts[0].space.distance(&Subspace::coordinate(3, &[0])) < 1e-10);
        let rem = rep.remainder.unwrap();
        assert!(rem.space.distance(&Subspace::coordinate(3, &[1, 2])) < 1e-10);
    }
}
