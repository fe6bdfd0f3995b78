//! Command-line front end. Every command prints one JSON report (or writes it
//! to `--out`). Exit codes: 0 success, 1 structured error, 2 usage error,
//! 3 verdict failure under `--strict`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::brehmer::{self, MultiIndex, SubsetMask};
use crate::classify::{self, AtomLabel};
use crate::decompose::{self, SplitReport};
use crate::error::{Error, Result};
use crate::family::{self, FamilyReport};
use crate::io;
use crate::linops::{eigenvalues, ComplexMatrix, Subspace};
use crate::models::{self, HardyModelSpec, PlantedBlock, PlantedSpec};
use crate::params::{AnnulusParams, ToleranceProfile};
use crate::family::TypeLabel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;

/// Residual bound used for the subspace verdicts of `decompose` and `family`.
pub const SUBSPACE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "annulus-ops", version, about = "Operator decompositions relative to the annulus r < |z| < 1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Inner radius of the annulus, in (0, 1).
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long)]
    pub tol_id: Option<f64>,
    #[arg(long)]
    pub tol_spec: Option<f64>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path (for `gen`: prefix of the written files).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with code 3 when a verdict fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-matrix predicates and labels.
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Orthogonal decomposition of one operator.
    Decompose {
        kind: DecomposeKind,
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Joint decomposition of an operator tuple.
    Family {
        kind: FamilyKind,
        #[arg(num_args = 2.., required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write model operators as matrix files plus a `.meta.json` sidecar.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Brehmer positivity and the binomial-sum identity.
    Brehmer {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Largest exponent per component for the identity check; 0 skips it.
        #[arg(long, default_value_t = 3)]
        max_k: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecomposeKind {
    Unitary,
    Wold,
    Canonical,
    Levan,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Canonical,
    Wold,
    Unitary,
    Levan,
    Burdak,
}

#[derive(Debug, Subcommand)]
pub enum GenModel {
    /// Random A_r-unitary with the given numbers of outer and inner eigenvalues.
    ArUnitary {
        #[arg(long, default_value_t = 2)]
        unit: usize,
        #[arg(long, default_value_t = 1)]
        inner: usize,
        /// Conjugate the diagonal by a Haar unitary.
        #[arg(long)]
        conjugate: bool,
        #[command(flatten)]
        common: Common,
    },
    /// `C_N ⊕ r C_M` with cyclic shifts `C_k`.
    Cyclic {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated weighted shift on `H^2_α`.
    Hardy {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, num_args = 2, value_names = ["N_MIN", "N_MAX"], allow_negative_numbers = true, default_values_t = [-5, 5])]
        window: Vec<i32>,
        #[command(flatten)]
        common: Common,
    },
    /// The pair `(S_α, S_α^2)`, or `(c I + s S_α, (c I + s S_α)^2)` when
    /// `--center` is given.
    Sarason {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, num_args = 2, value_names = ["N_MIN", "N_MAX"], allow_negative_numbers = true, default_values_t = [-5, 5])]
        window: Vec<i32>,
        #[arg(long)]
        center: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[command(flatten)]
        common: Common,
    },
    /// `U ⊕ r U' ⊕ C` under a Haar conjugation: `unit` outer eigenvalues,
    /// `inner` inner eigenvalues, and a c.n.u. block of size `cnu`.
    Planted {
        #[arg(long, default_value_t = 2)]
        unit: usize,
        #[arg(long, default_value_t = 1)]
        inner: usize,
        #[arg(long, default_value_t = 2)]
        cnu: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Classify { common, .. }
            | Command::Decompose { common, .. }
            | Command::Family { common, .. }
            | Command::Brehmer { common, .. } => common,
            Command::Gen { model } => match model {
                GenModel::ArUnitary { common, .. }
                | GenModel::Cyclic { common, .. }
                | GenModel::Hardy { common, .. }
                | GenModel::Sarason { common, .. }
                | GenModel::Planted { common, .. } => common,
            },
        }
    }

    fn name(&self) -> String {
        match self {
            Command::Classify { .. } => "classify".into(),
            Command::Decompose { kind, .. } => format!("decompose {}", kind_name(*kind)),
            Command::Family { kind, .. } => format!("family {}", kind_name(*kind)),
            Command::Brehmer { .. } => "brehmer".into(),
            Command::Gen { model } => format!("gen {}", model.name()),
        }
    }
}

impl GenModel {
    fn name(&self) -> &'static str {
        match self {
            GenModel::ArUnitary { .. } => "ar-unitary",
            GenModel::Cyclic { .. } => "cyclic",
            GenModel::Hardy { .. } => "hardy",
            GenModel::Sarason { .. } => "sarason",
            GenModel::Planted { .. } => "planted",
        }
    }
}

fn kind_name<K: ValueEnum>(k: K) -> String {
    k.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// Tolerances: profile from the environment, then explicit flags.
pub fn resolve_params(common: &Common) -> Result<AnnulusParams> {
    let base = AnnulusParams::with_profile(common.r, ToleranceProfile::from_env()?)?;
    AnnulusParams::with_tolerances(
        common.r,
        common.tol_rank.unwrap_or(base.tol_rank),
        common.tol_id.unwrap_or(base.tol_id),
        common.tol_spec.unwrap_or(base.tol_spec),
    )
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub inputs: Vec<String>,
    pub params: AnnulusParams,
    pub result: T,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Verdict {
    fn from_failures(failures: Vec<String>) -> Self {
        Self {
            passed: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorReport {
    command: String,
    error: ErrorBody,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

/// Orthonormal basis as a row-major `rows x cols` complex array.
#[derive(Debug, Serialize)]
pub struct BasisJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl BasisJson {
    pub fn from_subspace(s: &Subspace) -> Self {
        let b: &DMatrix<Complex64> = s.basis();
        let mut data = Vec::with_capacity(b.nrows() * b.ncols());
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                data.push([b[(i, j)].re, b[(i, j)].im]);
            }
        }
        Self {
            rows: s.ambient_dim(),
            cols: s.dim(),
            data,
        }
    }
}

fn complex_pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct MatrixVerdicts {
    pub file: String,
    pub dim: usize,
    pub contraction: bool,
    pub normal: bool,
    pub ar_unitary: bool,
    /// `None` when the operator is singular.
    pub ar_isometry: Option<bool>,
    pub candidate: bool,
    pub candidate_violation: Option<String>,
    pub atom: Option<AtomLabel>,
    /// Error kind when no atom label could be assigned.
    pub atom_error: Option<&'static str>,
    /// `u`, `r`, or `mixed`; only for A_r-unitaries.
    pub unitary_type: Option<String>,
    pub normality_defect: f64,
    pub ar_unitary_residual: f64,
    pub ar_isometry_residual: f64,
    pub eigenvalues: Vec<[f64; 2]>,
}

pub fn classify_matrix(file: &str, t: &ComplexMatrix, p: &AnnulusParams) -> Result<MatrixVerdicts> {
    let ar_unitary = classify::is_ar_unitary(t, p);
    let ar_isometry = match classify::is_ar_isometry(t, p) {
        Ok(b) => Some(b),
        Err(Error::SingularOperator(_)) => None,
        Err(e) => return Err(e),
    };
    let candidate_violation = match classify::candidate_violation(t, p) {
        Ok(v) => v,
        Err(Error::SingularOperator(ratio)) => Some(format!("singular (sigma ratio {ratio:e})")),
        Err(e) => return Err(e),
    };
    let (atom, atom_error) = match classify::classify_atom(t, p) {
        Ok(a) => (Some(a), None),
        Err(e @ (Error::NotACandidate(_) | Error::SingularOperator(_))) => (None, Some(e.kind())),
        Err(e) => return Err(e),
    };
    let unitary_type = if ar_unitary {
        Some(match classify::classify_unitary_type(t, p) {
            Ok(l) => l.as_str().to_string(),
            Err(Error::MixedType) => "mixed".to_string(),
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    Ok(MatrixVerdicts {
        file: file.to_string(),
        dim: t.dim(),
        contraction: classify::is_contraction(t, p.tol_id),
        normal: classify::is_normal(t, p.tol_id),
        ar_unitary,
        ar_isometry,
        candidate: candidate_violation.is_none(),
        candidate_violation,
        atom,
        atom_error,
        unitary_type,
        normality_defect: classify::normality_defect(t),
        ar_unitary_residual: classify::ar_unitary_residual(t, p.r),
        ar_isometry_residual: classify::ar_isometry_residual(t, p.r),
        eigenvalues: complex_pairs(&eigenvalues(t)?),
    })
}

#[derive(Debug, Serialize)]
pub struct SplitPartJson {
    pub label: String,
    pub dim: usize,
    pub label_residual: Option<f64>,
    pub reduction_residual: f64,
    pub basis: BasisJson,
}

#[derive(Debug, Serialize)]
pub struct SplitJson {
    pub r_used: f64,
    pub dims: Vec<usize>,
    pub orthogonality_residual: f64,
    pub parts: Vec<SplitPartJson>,
}

impl SplitJson {
    pub fn from_report(rep: &SplitReport) -> Self {
        Self {
            r_used: rep.r_used,
            dims: rep.dims(),
            orthogonality_residual: rep.orthogonality_residual(),
            parts: rep
                .parts
                .iter()
                .map(|p| SplitPartJson {
                    label: p.label.clone(),
                    dim: p.dim(),
                    label_residual: p.label_residual,
                    reduction_residual: p.reduction_residual,
                    basis: BasisJson::from_subspace(&p.space),
                })
                .collect(),
        }
    }

    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.orthogonality_residual > SUBSPACE_TOL {
            out.push(format!("parts overlap by {:e}", self.orthogonality_residual));
        }
        for p in &self.parts {
            if p.reduction_residual > SUBSPACE_TOL {
                out.push(format!("part {} reduction residual {:e}", p.label, p.reduction_residual));
            }
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct FamilyPartJson {
    pub assignment: Vec<TypeLabel>,
    pub dim: usize,
    pub reduction_residuals: Vec<f64>,
    pub label_verified: Vec<bool>,
    pub basis: BasisJson,
}

#[derive(Debug, Serialize)]
pub struct RemainderJson {
    pub tag: &'static str,
    pub dim: usize,
    pub leave_one_out_dims: Vec<usize>,
    pub basis: BasisJson,
}

#[derive(Debug, Serialize)]
pub struct FamilyJson {
    pub dims: Vec<usize>,
    pub orthogonality_residual: f64,
    pub doubly_commuting_dim: Option<usize>,
    pub parts: Vec<FamilyPartJson>,
    pub remainder: Option<RemainderJson>,
    pub notes: Vec<String>,
}

impl FamilyJson {
    pub fn from_report(rep: &FamilyReport) -> Self {
        Self {
            dims: rep.dims(),
            orthogonality_residual: rep.orthogonality_residual(),
            doubly_commuting_dim: rep.doubly_commuting_dim,
            parts: rep
                .parts
                .iter()
                .map(|p| FamilyPartJson {
                    assignment: p.assignment.labels().to_vec(),
                    dim: p.dim(),
                    reduction_residuals: p.reduction_residuals.clone(),
                    label_verified: p.label_verified.clone(),
                    basis: BasisJson::from_subspace(&p.space),
                })
                .collect(),
            remainder: rep.remainder.as_ref().map(|r| RemainderJson {
                tag: r.tag,
                dim: r.space.dim(),
                leave_one_out_dims: r.leave_one_out_dims.clone(),
                basis: BasisJson::from_subspace(&r.space),
            }),
            notes: rep.notes.clone(),
        }
    }

    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.orthogonality_residual > SUBSPACE_TOL {
            out.push(format!("parts overlap by {:e}", self.orthogonality_residual));
        }
        for p in &self.parts {
            let label = format_assignment(&p.assignment);
            if p.reduction_residuals.iter().any(|&x| x > SUBSPACE_TOL) {
                out.push(format!("part {label} is not jointly reducing to {SUBSPACE_TOL:e}"));
            }
            if p.label_verified.iter().any(|ok| !ok) {
                out.push(format!("part {label} fails its label predicates"));
            }
        }
        if let Some(r) = &self.remainder {
            if r.leave_one_out_dims.iter().any(|&d| d > 0) {
                out.push(format!("remainder is not {}", r.tag));
            }
        }
        out
    }
}

fn format_assignment(labels: &[TypeLabel]) -> String {
    let inner: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
    format!("({})", inner.join(","))
}

#[derive(Debug, Serialize)]
pub struct BpEntry {
    pub subset: String,
    pub k: Vec<u32>,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct BpSection {
    pub applicable: bool,
    pub reason: Option<String>,
    pub entries: Vec<BpEntry>,
}

#[derive(Debug, Serialize)]
pub struct BrehmerJson {
    pub positivity: brehmer::BrehmerReport,
    pub bp_identity: Option<BpSection>,
}

fn multi_indices(m: usize, max_k: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=max_k).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn brehmer_report(ops: &[ComplexMatrix], max_k: u32, p: &AnnulusParams) -> Result<BrehmerJson> {
    if max_k > brehmer::MAX_EXPONENT {
        return Err(Error::BadMultiIndex(format!(
            "max-k {max_k} exceeds {}",
            brehmer::MAX_EXPONENT
        )));
    }
    let positivity = brehmer::check_brehmer(ops, p)?;
    let bp_identity = if max_k == 0 {
        None
    } else {
        let mut reason = None;
        for (i, t) in ops.iter().enumerate() {
            let ok = match classify::is_ar_isometry(t, p) {
                Ok(b) => b,
                Err(Error::SingularOperator(_)) => false,
                Err(e) => return Err(e),
            };
            if !ok {
                reason = Some(format!("component {} is not an A_r-isometry", i + 1));
                break;
            }
        }
        let mut entries = Vec::new();
        if reason.is_none() {
            for u in SubsetMask::all(ops.len()) {
                for k in multi_indices(u.len(), max_k) {
                    let mi = MultiIndex::new(k.clone())?;
                    entries.push(BpEntry {
                        subset: u.label(),
                        k,
                        residual: brehmer::check_bp_identity(ops, &u, &mi, p)?,
                    });
                }
            }
        }
        Some(BpSection {
            applicable: reason.is_none(),
            reason,
            entries,
        })
    };
    Ok(BrehmerJson {
        positivity,
        bp_identity,
    })
}

fn brehmer_failures(b: &BrehmerJson, p: &AnnulusParams) -> Vec<String> {
    let mut out: Vec<String> = b
        .positivity
        .subsets
        .iter()
        .filter(|s| !s.passed)
        .map(|s| format!("S{} has eigenvalue {:e}", s.subset, s.min_eigenvalue))
        .collect();
    if let Some(bp) = &b.bp_identity {
        for e in bp.entries.iter().filter(|e| e.residual > p.tol_id) {
            out.push(format!("identity residual {:e} on {} with k = {:?}", e.residual, e.subset, e.k));
        }
    }
    out
}

/// Expected classification of a generated matrix, recorded in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ExpectedLabels {
    pub file: String,
    /// Annulus parameter at which the labels hold.
    pub r: f64,
    pub candidate: bool,
    pub ar_unitary: bool,
    pub atom: Option<AtomLabel>,
    pub unitary_type: Option<String>,
    /// `(u, r, c)` dimensions of the canonical split, when it applies.
    pub canonical_dims: Option<[usize; 3]>,
}

#[derive(Debug, Serialize)]
pub struct GenMeta {
    pub model: &'static str,
    pub seed: u64,
    pub r: f64,
    pub files: Vec<String>,
    pub expected: Vec<ExpectedLabels>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[i32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `c_n = 1 + r^{2(α+n)}` over the window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Closed-form `r(α;0) r(α;-1) - r(α;1) r(α;0)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_coefficient: Option<f64>,
    /// The same coefficient read off the generated matrices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_coefficient_from_matrix: Option<f64>,
}

impl GenMeta {
    fn new(model: &'static str, seed: u64, r: f64) -> Self {
        Self {
            model,
            seed,
            r,
            files: Vec::new(),
            expected: Vec::new(),
            window: None,
            alpha: None,
            weights: None,
            r_squared: None,
            center: None,
            scale: None,
            w_coefficient: None,
            w_coefficient_from_matrix: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GenResult {
    pub files: Vec<String>,
    pub meta: String,
}

fn window_spec(alpha: f64, r: f64, window: &[i32]) -> Result<HardyModelSpec> {
    let [lo, hi] = window else {
        return Err(Error::InvalidParams("window needs two indices".into()));
    };
    if lo >= hi {
        return Err(Error::InvalidParams(format!("window [{lo}, {hi}] is empty or reversed")));
    }
    HardyModelSpec::new(alpha, r, *lo, *hi)
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn gen(model: &GenModel, p: &AnnulusParams) -> Result<(GenResult, GenMeta)> {
    let common = match model {
        GenModel::ArUnitary { common, .. }
        | GenModel::Cyclic { common, .. }
        | GenModel::Hardy { common, .. }
        | GenModel::Sarason { common, .. }
        | GenModel::Planted { common, .. } => common,
    };
    let prefix = common.out.clone().unwrap_or_else(|| PathBuf::from(model.name()));
    let mut meta = GenMeta::new(model.name(), common.seed, p.r);
    let mut rng = models::seeded_rng(common.seed);

    let mut outputs: Vec<(PathBuf, ComplexMatrix, ExpectedLabels)> = Vec::new();
    match model {
        GenModel::ArUnitary { unit, inner, conjugate, .. } => {
            let phase = |rng: &mut rand_chacha::ChaCha8Rng| {
                use rand::Rng;
                Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
            };
            let outer: Vec<Complex64> = (0..*unit).map(|_| phase(&mut rng)).collect();
            let inner_eigs: Vec<Complex64> = (0..*inner).map(|_| phase(&mut rng) * p.r).collect();
            let mut t = models::gen_ar_unitary(&outer, &inner_eigs, p)?;
            if *conjugate {
                t = t.conjugate_by(&models::haar_unitary(t.dim(), &mut rng));
            }
            let path = prefixed(&prefix, ".json");
            let unitary_type = match (*unit, *inner) {
                (_, 0) => Some("u".to_string()),
                (0, _) => Some("r".to_string()),
                _ => Some("mixed".to_string()),
            };
            let e = ExpectedLabels {
                file: path.display().to_string(),
                r: p.r,
                candidate: true,
                ar_unitary: true,
                atom: Some(AtomLabel::Tu),
                unitary_type,
                canonical_dims: Some([*unit, *inner, 0]),
            };
            outputs.push((path, t, e));
        }
        GenModel::Cyclic { n, m, .. } => {
            let t = models::gen_cyclic_annulus_unitary(*n, *m, p)?;
            let path = prefixed(&prefix, ".json");
            let e = ExpectedLabels {
                file: path.display().to_string(),
                r: p.r,
                candidate: true,
                ar_unitary: true,
                atom: Some(AtomLabel::Tu),
                unitary_type: Some("mixed".to_string()),
                canonical_dims: Some([*n, *m, 0]),
            };
            outputs.push((path, t, e));
        }
        GenModel::Hardy { alpha, window, .. } => {
            let spec = window_spec(*alpha, p.r, window)?;
            let h = models::gen_hardy_shift(&spec)?;
            let path = prefixed(&prefix, ".json");
            let e = ExpectedLabels {
                file: path.display().to_string(),
                r: p.r,
                candidate: false,
                ar_unitary: false,
                atom: None,
                unitary_type: None,
                canonical_dims: None,
            };
            meta.window = Some([spec.n_min, spec.n_max]);
            meta.alpha = Some(spec.alpha);
            meta.weights = Some(h.weights.clone());
            outputs.push((path, h.matrix, e));
        }
        GenModel::Sarason { alpha, window, center, scale, .. } => {
            let spec = window_spec(*alpha, p.r, window)?;
            let pair = match center {
                Some(c) => models::gen_shifted_sarason_pair(&spec, *c, *scale)?,
                None => models::gen_sarason_pair(&spec)?,
            };
            meta.window = Some([spec.n_min, spec.n_max]);
            meta.alpha = Some(spec.alpha);
            meta.weights = Some(pair.weights.clone());
            meta.r_squared = Some(pair.r_squared);
            if let Some(c) = center {
                meta.center = Some(*c);
                meta.scale = Some(*scale);
            } else {
                meta.w_coefficient = Some(models::sarason_w_coefficient(spec.alpha, spec.r));
                meta.w_coefficient_from_matrix = pair.w_coefficient_from_matrix().ok();
            }
            for (i, v) in [pair.v1, pair.v2].into_iter().enumerate() {
                let path = prefixed(&prefix, &format!("_{}.json", i + 1));
                let e = ExpectedLabels {
                    file: path.display().to_string(),
                    r: pair.r_squared,
                    candidate: center.is_some(),
                    ar_unitary: false,
                    atom: center.map(|_| AtomLabel::Tc),
                    unitary_type: None,
                    canonical_dims: center.map(|_| [0, 0, spec.len()]),
                };
                outputs.push((path, v, e));
            }
        }
        GenModel::Planted { unit, inner, cnu, .. } => {
            let mut blocks = Vec::new();
            if unit + inner > 0 {
                let eigs_u: Vec<Complex64> = (0..*unit)
                    .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / *unit as f64))
                    .collect();
                let eigs_r: Vec<Complex64> = (0..*inner)
                    .map(|k| Complex64::from_polar(p.r, std::f64::consts::TAU * (k as f64 + 0.25) / *inner as f64))
                    .collect();
                blocks.push(PlantedBlock {
                    ops: vec![models::gen_ar_unitary(&eigs_u, &eigs_r, p)?],
                    labels: vec![TypeLabel::Tu],
                });
            }
            if *cnu > 0 {
                blocks.push(PlantedBlock {
                    ops: vec![models::random_cnu_candidate(*cnu, p.r, &mut rng)],
                    labels: vec![TypeLabel::Tc],
                });
            }
            let spec = PlantedSpec { blocks, seed: common.seed };
            let planted = models::gen_planted(&spec)?;
            let dims = models::expected_canonical_dims(&spec, p.r)?;
            let path = prefixed(&prefix, ".json");
            let atom = match (unit + inner, *cnu) {
                (_, 0) => AtomLabel::Tu,
                (0, _) => AtomLabel::Tc,
                _ => AtomLabel::NonAtom,
            };
            let unitary_type = (*cnu == 0).then(|| match (*unit, *inner) {
                (_, 0) => "u".to_string(),
                (0, _) => "r".to_string(),
                _ => "mixed".to_string(),
            });
            let e = ExpectedLabels {
                file: path.display().to_string(),
                r: p.r,
                candidate: true,
                ar_unitary: *cnu == 0,
                atom: Some(atom),
                unitary_type,
                canonical_dims: Some(dims),
            };
            outputs.push((path, planted.ops[0].clone(), e));
        }
    }

    for (path, t, e) in outputs {
        io::write_matrix(&path, &t)?;
        meta.files.push(path.display().to_string());
        meta.expected.push(e);
    }
    let meta_path = prefixed(&prefix, ".meta.json");
    io::write_text(&meta_path, &io::to_json_string(&meta)?)?;
    Ok((
        GenResult {
            files: meta.files.clone(),
            meta: meta_path.display().to_string(),
        },
        meta,
    ))
}

fn read_all(files: &[PathBuf]) -> Result<Vec<ComplexMatrix>> {
    files.iter().map(|f| io::read_matrix(f)).collect()
}

fn display_paths(files: &[PathBuf]) -> Vec<String> {
    files.iter().map(|f| f.display().to_string()).collect()
}

fn render<T: Serialize>(command: String, inputs: Vec<String>, params: AnnulusParams, result: T, failures: Vec<String>) -> Result<(String, bool)> {
    let verdict = Verdict::from_failures(failures);
    let passed = verdict.passed;
    let text = io::to_json_string(&Report {
        command,
        inputs,
        params,
        result,
        verdict,
    })?;
    Ok((text, passed))
}

fn execute(cmd: &Command) -> Result<(String, bool)> {
    let p = resolve_params(cmd.common())?;
    let name = cmd.name();
    match cmd {
        Command::Classify { files, .. } => {
            let ops = read_all(files)?;
            let verdicts = files
                .iter()
                .zip(&ops)
                .map(|(f, t)| classify_matrix(&f.display().to_string(), t, &p))
                .collect::<Result<Vec<_>>>()?;
            let failures = verdicts
                .iter()
                .filter(|v| !v.candidate)
                .map(|v| format!("{} is not an A_r-contraction candidate", v.file))
                .collect();
            render(name, display_paths(files), p, verdicts, failures)
        }
        Command::Decompose { kind, file, .. } => {
            let t = io::read_matrix(file)?;
            let rep = match kind {
                DecomposeKind::Unitary => decompose::split_ar_unitary(&t, &p)?,
                DecomposeKind::Wold => decompose::wold_ar_isometry(&t, &p)?,
                DecomposeKind::Canonical => decompose::canonical_ar_contraction(&t, &p)?,
                DecomposeKind::Levan => decompose::levan_split(&t, &p)?,
            };
            let json = SplitJson::from_report(&rep);
            let failures = json.failures();
            render(name, display_paths(std::slice::from_ref(file)), p, json, failures)
        }
        Command::Family { kind, files, .. } => {
            if files.len() > family::MAX_TUPLE_LEN {
                return Err(Error::ExplicitCap(files.len(), family::MAX_TUPLE_LEN));
            }
            let ops = read_all(files)?;
            let rep = match kind {
                FamilyKind::Canonical => family::canonical_family(&ops, &p)?,
                FamilyKind::Wold => family::wold_family(&ops, &p)?,
                FamilyKind::Unitary => family::unitary_family(&ops, &p)?,
                FamilyKind::Levan => family::levan_family(&ops, &p)?,
                FamilyKind::Burdak => family::burdak_family(&ops, &p)?,
            };
            let json = FamilyJson::from_report(&rep);
            let failures = json.failures();
            render(name, display_paths(files), p, json, failures)
        }
        Command::Brehmer { files, max_k, .. } => {
            let ops = read_all(files)?;
            let json = brehmer_report(&ops, *max_k, &p)?;
            let failures = brehmer_failures(&json, &p);
            render(name, display_paths(files), p, json, failures)
        }
        Command::Gen { model } => {
            let (result, meta) = gen(model, &p)?;
            let failures = Vec::new();
            let inputs = vec![format!("seed={}", meta.seed)];
            render(name, inputs, p, result, failures)
        }
    }
}

/// Outcome of one invocation: exit code plus the text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command. Reports go to
/// stdout unless `--out` names a file (for non-`gen` commands).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let name = cli.command.name();
    let result = execute(&cli.command).and_then(|(text, passed)| {
        let out = cli.command.common().out.clone();
        match (&cli.command, out) {
            (Command::Gen { .. }, _) | (_, None) => Ok((text, passed)),
            (_, Some(path)) => {
                io::write_text(&path, &text)?;
                Ok((String::new(), passed))
            }
        }
    });
    match result {
        Ok((stdout, passed)) => {
            let strict = cli.command.common().strict;
            let code = if strict && !passed { EXIT_VERDICT } else { EXIT_OK };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let report = ErrorReport {
                command: name,
                error: ErrorBody {
                    kind: e.kind(),
                    message: e.to_string(),
                },
            };
            let stdout = io::to_json_string(&report).unwrap_or_else(|_| format!("{e}\n"));
            Outcome {
                code: EXIT_ERROR,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, m: &ComplexMatrix) -> String {
        let path = dir.join(name);
        io::write_matrix(&path, m).unwrap();
        path.display().to_string()
    }

    fn json(text: &str) -> serde_json::Value {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn classify_examples() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.json", &ComplexMatrix::diagonal_real(&[1.0, 0.5]));
        let j = ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.0, 0.7]]).unwrap();
        let b = write(dir.path(), "b.json", &j);
        let out = run(["annulus-ops", "classify", &a, &b, "--r", "0.5"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let v = json(&out.stdout);
        assert_eq!(v["result"][0]["ar_unitary"], true);
        assert_eq!(v["result"][0]["atom"], "t_u");
        assert_eq!(v["result"][1]["atom"], "t_c");
        assert_eq!(v["params"]["r"], 0.5);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"dim\": 2, \"data\": [").unwrap();
        let out = run(["annulus-ops", "classify", path.to_str().unwrap(), "--r", "0.5"]);
        assert_eq!(out.code, EXIT_ERROR);
        assert_eq!(json(&out.stdout)["error"]["kind"], "ParseError");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["annulus-ops", "classify", "x.json"]).code, EXIT_USAGE);
        assert_eq!(run(["annulus-ops", "classify", "x.json", "--r", "0.5", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(run(["annulus-ops", "--help"]).code, EXIT_OK);
    }

    #[test]
    fn flags_override_profile() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.json", &ComplexMatrix::diagonal_real(&[1.0]));
        let out = run(["annulus-ops", "classify", &a, "--r", "0.5", "--tol-id", "1e-6"]);
        let v = json(&out.stdout);
        assert_eq!(v["params"]["tol_id"], 1e-6);
        assert_eq!(v["params"]["tol_rank"], 1e-9);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(multi_indices(1, 3).len(), 3);
    }
}
