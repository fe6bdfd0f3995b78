//! C ABI for `annulus-ops`.
//!
//! Matrices and decompositions cross the boundary as opaque handles created
//! by `annulus_*_new`/`annulus_decompose`/`annulus_family` and released with
//! the matching `*_free`. Every fallible call returns an [`AnnulusStatus`];
//! on failure a message is available from [`annulus_last_error_message`] on
//! the same thread. Complex arrays are interleaved `re, im` doubles in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use annulus_ops::{brehmer, classify, decompose, family, io, models};
use annulus_ops::{AtomLabel, ComplexMatrix, Error, Subspace};
use num_complex::Complex64;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidMatrix = 2,
    DimensionMismatch = 3,
    InvalidParams = 4,
    NumericalFailure = 5,
    Stall = 6,
    SingularOperator = 7,
    NotArUnitary = 8,
    NotArIsometry = 9,
    NotACandidate = 10,
    NotCnu = 11,
    MixedType = 12,
    NotDoublyCommuting = 13,
    NotCommuting = 14,
    ExplicitCap = 15,
    BadMultiIndex = 16,
    EigenvalueOffBoundary = 17,
    WindowTooSmall = 18,
    InconsistentBlocks = 19,
    Parse = 20,
    Io = 21,
    BufferTooSmall = 22,
    IndexOutOfRange = 23,
    Panic = 99,
}

impl From<&Error> for AnnulusStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidMatrix(_) => Self::InvalidMatrix,
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::InvalidParams(_) => Self::InvalidParams,
            Error::NumericalFailure(_) => Self::NumericalFailure,
            Error::Stall(_) => Self::Stall,
            Error::SingularOperator(_) => Self::SingularOperator,
            Error::NotArUnitary(_) => Self::NotArUnitary,
            Error::NotArIsometry(_) => Self::NotArIsometry,
            Error::NotACandidate(_) => Self::NotACandidate,
            Error::NotCnu => Self::NotCnu,
            Error::MixedType => Self::MixedType,
            Error::NotDoublyCommuting(..) => Self::NotDoublyCommuting,
            Error::NotCommuting(..) => Self::NotCommuting,
            Error::ExplicitCap(..) => Self::ExplicitCap,
            Error::BadMultiIndex(_) => Self::BadMultiIndex,
            Error::EigenvalueOffBoundary(_) => Self::EigenvalueOffBoundary,
            Error::WindowTooSmall { .. } => Self::WindowTooSmall,
            Error::InconsistentBlocks(_) => Self::InconsistentBlocks,
            Error::Parse(_) => Self::Parse,
            Error::Io(_) => Self::Io,
        }
    }
}

/// Annulus radius and tolerances.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusParams {
    pub r: f64,
    pub tol_rank: f64,
    pub tol_id: f64,
    pub tol_spec: f64,
}

impl AnnulusParams {
    fn to_core(self) -> Result<annulus_ops::AnnulusParams, Failure> {
        Ok(annulus_ops::AnnulusParams::with_tolerances(
            self.r,
            self.tol_rank,
            self.tol_id,
            self.tol_spec,
        )?)
    }
}

/// Single-operator decomposition kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusDecomposeKind {
    Unitary = 0,
    Wold = 1,
    Canonical = 2,
    Levan = 3,
}

/// Joint decomposition kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusFamilyKind {
    Canonical = 0,
    Wold = 1,
    Unitary = 2,
    Levan = 3,
    Burdak = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusAtom {
    Tu = 0,
    Tc = 1,
    NonAtom = 2,
}

/// Opaque square complex matrix.
pub struct AnnulusMatrix {
    inner: ComplexMatrix,
}

/// Opaque result of a decomposition: labelled parts and, for the commuting
/// split, a remainder.
pub struct AnnulusDecomposition {
    parts: Vec<(CString, Subspace)>,
    remainder: Option<Subspace>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(AnnulusStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(AnnulusStatus::from(&e), format!("{}: {e}", e.kind()))
    }
}

fn fail(status: AnnulusStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AnnulusStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AnnulusStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            AnnulusStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(AnnulusStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(AnnulusStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(AnnulusStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn complexes(p: *const f64, count: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    let raw = slice(p, 2 * count, what)?;
    Ok(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

unsafe fn tuple(ops: *const *const AnnulusMatrix, n: usize) -> Result<Vec<ComplexMatrix>, Failure> {
    let handles = slice(ops, n, "ops")?;
    handles
        .iter()
        .enumerate()
        .map(|(i, &h)| Ok(deref(h, &format!("ops[{i}]"))?.inner.clone()))
        .collect()
}

fn boxed_matrix(m: ComplexMatrix) -> *mut AnnulusMatrix {
    Box::into_raw(Box::new(AnnulusMatrix { inner: m }))
}

fn write_interleaved(
    values: impl Iterator<Item = Complex64>,
    count: usize,
    out: *mut f64,
    len: usize,
) -> Result<(), Failure> {
    let needed = 2 * count;
    if len < needed {
        return Err(fail(
            AnnulusStatus::BufferTooSmall,
            format!("need {needed} doubles, buffer holds {len}"),
        ));
    }
    if needed == 0 {
        return Ok(());
    }
    if out.is_null() {
        return Err(fail(AnnulusStatus::NullPointer, "out is null"));
    }
    let dst = unsafe { std::slice::from_raw_parts_mut(out, needed) };
    for (pair, z) in dst.chunks_exact_mut(2).zip(values) {
        pair[0] = z.re;
        pair[1] = z.im;
    }
    Ok(())
}

fn write_basis(space: &Subspace, out: *mut f64, len: usize) -> Result<(), Failure> {
    let b = space.basis();
    let (rows, cols) = (b.nrows(), b.ncols());
    let values = (0..rows).flat_map(|i| (0..cols).map(move |j| b[(i, j)]));
    write_interleaved(values, rows * cols, out, len)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn annulus_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn annulus_status_name(status: AnnulusStatus) -> *const c_char {
    let s: &'static CStr = match status {
        AnnulusStatus::Ok => c"Ok",
        AnnulusStatus::NullPointer => c"NullPointer",
        AnnulusStatus::InvalidMatrix => c"InvalidMatrix",
        AnnulusStatus::DimensionMismatch => c"DimensionMismatch",
        AnnulusStatus::InvalidParams => c"InvalidParams",
        AnnulusStatus::NumericalFailure => c"NumericalFailure",
        AnnulusStatus::Stall => c"StallError",
        AnnulusStatus::SingularOperator => c"SingularOperator",
        AnnulusStatus::NotArUnitary => c"NotArUnitary",
        AnnulusStatus::NotArIsometry => c"NotArIsometry",
        AnnulusStatus::NotACandidate => c"NotACandidate",
        AnnulusStatus::NotCnu => c"NotCnu",
        AnnulusStatus::MixedType => c"MixedType",
        AnnulusStatus::NotDoublyCommuting => c"NotDoublyCommuting",
        AnnulusStatus::NotCommuting => c"NotCommuting",
        AnnulusStatus::ExplicitCap => c"ExplicitCapError",
        AnnulusStatus::BadMultiIndex => c"BadMultiIndex",
        AnnulusStatus::EigenvalueOffBoundary => c"EigenvalueOffBoundary",
        AnnulusStatus::WindowTooSmall => c"WindowTooSmall",
        AnnulusStatus::InconsistentBlocks => c"InconsistentBlocks",
        AnnulusStatus::Parse => c"ParseError",
        AnnulusStatus::Io => c"IoError",
        AnnulusStatus::BufferTooSmall => c"BufferTooSmall",
        AnnulusStatus::IndexOutOfRange => c"IndexOutOfRange",
        AnnulusStatus::Panic => c"Panic",
    };
    s.as_ptr()
}

/// Default tolerances for radius `r`, honouring the tolerance profile
/// environment variable. Falls back to the default profile if the variable
/// holds an unknown name.
#[no_mangle]
pub extern "C" fn annulus_params_default(r: f64) -> AnnulusParams {
    let profile = annulus_ops::ToleranceProfile::from_env().unwrap_or(annulus_ops::ToleranceProfile::Default);
    let (tol_rank, tol_id, tol_spec) = profile.tolerances();
    AnnulusParams { r, tol_rank, tol_id, tol_spec }
}

/// Creates a `dim x dim` matrix from `2 * dim * dim` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * dim * dim` readable doubles and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_new(
    dim: usize,
    data: *const f64,
    out: *mut *mut AnnulusMatrix,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let count = dim
            .checked_mul(dim)
            .ok_or_else(|| fail(AnnulusStatus::InvalidMatrix, "dim too large"))?;
        let entries = complexes(data, count, "data")?;
        *out = boxed_matrix(ComplexMatrix::from_row_major(dim, &entries)?);
        Ok(())
    })
}

/// Parses a matrix file body `{"dim": N, "data": [[re, im], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_from_json(
    json: *const c_char,
    out: *mut *mut AnnulusMatrix,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if json.is_null() {
            return Err(fail(AnnulusStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(AnnulusStatus::Parse, e.to_string()))?;
        *out = boxed_matrix(io::parse_matrix(text)?);
        Ok(())
    })
}

/// Serializes a matrix as a matrix file body. Release the string with
/// [`annulus_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_to_json(
    m: *const AnnulusMatrix,
    out: *mut *mut c_char,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let m = deref(m, "m")?;
        let text = io::matrix_to_json(&m.inner)?;
        *out = CString::new(text)
            .map_err(|e| fail(AnnulusStatus::Parse, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn annulus_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_free(m: *mut AnnulusMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for a null handle.
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_dim(m: *const AnnulusMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dim())
}

/// Copies the entries into `out` (`2 * dim * dim` doubles).
///
/// # Safety
/// `m` must be a live handle and `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn annulus_matrix_copy_data(
    m: *const AnnulusMatrix,
    out: *mut f64,
    len: usize,
) -> AnnulusStatus {
    guard(|| {
        let m = deref(m, "m")?;
        let n = m.inner.dim();
        write_interleaved(m.inner.to_row_major().into_iter(), n * n, out, len)
    })
}

unsafe fn predicate(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
    f: impl FnOnce(&ComplexMatrix, &annulus_ops::AnnulusParams) -> annulus_ops::Result<bool>,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = &deref(m, "m")?.inner;
        let p = deref(params, "params")?.to_core()?;
        *out = f(t, &p)?;
        Ok(())
    })
}

/// `||T|| <= 1 + tol_id`.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_is_contraction(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
) -> AnnulusStatus {
    predicate(m, params, out, |t, p| Ok(classify::is_contraction(t, p.tol_id)))
}

/// Normality to tolerance.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_is_normal(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
) -> AnnulusStatus {
    predicate(m, params, out, |t, p| Ok(classify::is_normal(t, p.tol_id)))
}

/// Normal with spectrum on the two boundary circles.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_is_ar_unitary(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
) -> AnnulusStatus {
    predicate(m, params, out, |t, p| Ok(classify::is_ar_unitary(t, p)))
}

/// Invertible and satisfying the A_r-isometry identity.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_is_ar_isometry(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
) -> AnnulusStatus {
    predicate(m, params, out, classify::is_ar_isometry)
}

/// Necessary spectral and norm conditions for an A_r-contraction.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_is_candidate(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut bool,
) -> AnnulusStatus {
    predicate(m, params, out, classify::is_ar_contraction_candidate)
}

/// Atom type of a candidate.
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_classify_atom(
    m: *const AnnulusMatrix,
    params: *const AnnulusParams,
    out: *mut AnnulusAtom,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = &deref(m, "m")?.inner;
        let p = deref(params, "params")?.to_core()?;
        *out = match classify::classify_atom(t, &p)? {
            AtomLabel::Tu => AnnulusAtom::Tu,
            AtomLabel::Tc => AnnulusAtom::Tc,
            AtomLabel::NonAtom => AnnulusAtom::NonAtom,
        };
        Ok(())
    })
}

fn decomposition(parts: Vec<(String, Subspace)>, remainder: Option<Subspace>) -> Result<*mut AnnulusDecomposition, Failure> {
    let parts = parts
        .into_iter()
        .map(|(label, s)| Ok((CString::new(label).map_err(|e| fail(AnnulusStatus::Parse, e.to_string()))?, s)))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Box::into_raw(Box::new(AnnulusDecomposition { parts, remainder })))
}

/// Orthogonal decomposition of one operator. Part labels: `u, r` (unitary),
/// `u, r, p` (Wold), `u, r, c` (canonical), `iso, cni` (Levan).
///
/// # Safety
/// `m` and `params` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_decompose(
    m: *const AnnulusMatrix,
    kind: AnnulusDecomposeKind,
    params: *const AnnulusParams,
    out: *mut *mut AnnulusDecomposition,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = &deref(m, "m")?.inner;
        let p = deref(params, "params")?.to_core()?;
        let rep = match kind {
            AnnulusDecomposeKind::Unitary => decompose::split_ar_unitary(t, &p)?,
            AnnulusDecomposeKind::Wold => decompose::wold_ar_isometry(t, &p)?,
            AnnulusDecomposeKind::Canonical => decompose::canonical_ar_contraction(t, &p)?,
            AnnulusDecomposeKind::Levan => decompose::levan_split(t, &p)?,
        };
        *out = decomposition(rep.parts.into_iter().map(|s| (s.label, s.space)).collect(), None)?;
        Ok(())
    })
}

/// Joint decomposition of `n` operators. Part labels look like `(t_u,t_c)`;
/// the commuting split also has a remainder.
///
/// # Safety
/// `ops` must point to `n` live handles; `params` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_family(
    ops: *const *const AnnulusMatrix,
    n: usize,
    kind: AnnulusFamilyKind,
    params: *const AnnulusParams,
    out: *mut *mut AnnulusDecomposition,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let ops = tuple(ops, n)?;
        let p = deref(params, "params")?.to_core()?;
        let rep = match kind {
            AnnulusFamilyKind::Canonical => family::canonical_family(&ops, &p)?,
            AnnulusFamilyKind::Wold => family::wold_family(&ops, &p)?,
            AnnulusFamilyKind::Unitary => family::unitary_family(&ops, &p)?,
            AnnulusFamilyKind::Levan => family::levan_family(&ops, &p)?,
            AnnulusFamilyKind::Burdak => family::burdak_family(&ops, &p)?,
        };
        *out = decomposition(
            rep.parts.into_iter().map(|part| (part.assignment.to_string(), part.space)).collect(),
            rep.remainder.map(|r| r.space),
        )?;
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_free(d: *mut AnnulusDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of labelled parts (the remainder is not counted).
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_part_count(d: *const AnnulusDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.parts.len())
}

/// Label of part `i`, valid while `d` is alive; null when out of range.
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_part_label(
    d: *const AnnulusDecomposition,
    i: usize,
) -> *const c_char {
    d.as_ref()
        .and_then(|d| d.parts.get(i))
        .map_or(ptr::null(), |(l, _)| l.as_ptr())
}

unsafe fn part<'a>(d: *const AnnulusDecomposition, i: usize) -> Result<&'a Subspace, Failure> {
    let d = deref(d, "d")?;
    d.parts
        .get(i)
        .map(|(_, s)| s)
        .ok_or_else(|| fail(AnnulusStatus::IndexOutOfRange, format!("part {i} of {}", d.parts.len())))
}

/// Ambient dimension and dimension of part `i`.
///
/// # Safety
/// `d` must be a live handle; `ambient` and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_part_dim(
    d: *const AnnulusDecomposition,
    i: usize,
    ambient: *mut usize,
    dim: *mut usize,
) -> AnnulusStatus {
    guard(|| {
        let s = part(d, i)?;
        *out_ptr(ambient, "ambient")? = s.ambient_dim();
        *out_ptr(dim, "dim")? = s.dim();
        Ok(())
    })
}

/// Orthonormal basis of part `i` as an `ambient x dim` row-major array of
/// interleaved doubles (`2 * ambient * dim` entries).
///
/// # Safety
/// `d` must be a live handle and `out` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_part_basis(
    d: *const AnnulusDecomposition,
    i: usize,
    out: *mut f64,
    len: usize,
) -> AnnulusStatus {
    guard(|| write_basis(part(d, i)?, out, len))
}

/// Dimension of the remainder; `has_remainder` is false for splits that
/// have none.
///
/// # Safety
/// `d` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_decomposition_remainder_dim(
    d: *const AnnulusDecomposition,
    has_remainder: *mut bool,
    dim: *mut usize,
) -> AnnulusStatus {
    guard(|| {
        let d = deref(d, "d")?;
        *out_ptr(has_remainder, "has_remainder")? = d.remainder.is_some();
        *out_ptr(dim, "dim")? = d.remainder.as_ref().map_or(0, Subspace::dim);
        Ok(())
    })
}

/// Brehmer positivity: writes the minimum eigenvalue of `S(u)` for each of
/// the `2^n - 1` nonempty subsets (by size, then lexicographic) into
/// `min_eigs` and sets `passed`.
///
/// # Safety
/// `ops` must point to `n` live handles; `min_eigs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn annulus_check_brehmer(
    ops: *const *const AnnulusMatrix,
    n: usize,
    params: *const AnnulusParams,
    min_eigs: *mut f64,
    len: usize,
    passed: *mut bool,
) -> AnnulusStatus {
    guard(|| {
        let ops = tuple(ops, n)?;
        let p = deref(params, "params")?.to_core()?;
        if n > family::MAX_TUPLE_LEN {
            return Err(Error::ExplicitCap(n, family::MAX_TUPLE_LEN).into());
        }
        let rep = brehmer::check_brehmer(&ops, &p)?;
        if len < rep.subsets.len() {
            return Err(fail(
                AnnulusStatus::BufferTooSmall,
                format!("need {} doubles, buffer holds {len}", rep.subsets.len()),
            ));
        }
        if min_eigs.is_null() {
            return Err(fail(AnnulusStatus::NullPointer, "min_eigs is null"));
        }
        let dst = std::slice::from_raw_parts_mut(min_eigs, rep.subsets.len());
        for (d, s) in dst.iter_mut().zip(&rep.subsets) {
            *d = s.min_eigenvalue;
        }
        *out_ptr(passed, "passed")? = rep.passed;
        Ok(())
    })
}

/// `||Δ_m^k - (1 - r^2)^{|k| - m} S(u)||` for the subset `members` (0-based,
/// `m` entries) and exponents `k` (`m` entries).
///
/// # Safety
/// `ops` must point to `n` live handles; `members` and `k` to `m` entries.
#[no_mangle]
pub unsafe extern "C" fn annulus_bp_identity_residual(
    ops: *const *const AnnulusMatrix,
    n: usize,
    members: *const usize,
    k: *const u32,
    m: usize,
    params: *const AnnulusParams,
    out: *mut f64,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let ops = tuple(ops, n)?;
        let p = deref(params, "params")?.to_core()?;
        let subset = brehmer::SubsetMask::new(n, slice(members, m, "members")?.to_vec())?;
        let k = brehmer::MultiIndex::new(slice(k, m, "k")?.to_vec())?;
        *out = brehmer::check_bp_identity(&ops, &subset, &k, &p)?;
        Ok(())
    })
}

/// Diagonal A_r-unitary from `n_unit` unimodular and `n_r` modulus-`r`
/// eigenvalues (interleaved doubles).
///
/// # Safety
/// `eigs_unit` must hold `2 * n_unit` doubles, `eigs_r` `2 * n_r`.
#[no_mangle]
pub unsafe extern "C" fn annulus_gen_ar_unitary(
    eigs_unit: *const f64,
    n_unit: usize,
    eigs_r: *const f64,
    n_r: usize,
    params: *const AnnulusParams,
    out: *mut *mut AnnulusMatrix,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = deref(params, "params")?.to_core()?;
        let u = complexes(eigs_unit, n_unit, "eigs_unit")?;
        let r = complexes(eigs_r, n_r, "eigs_r")?;
        *out = boxed_matrix(models::gen_ar_unitary(&u, &r, &p)?);
        Ok(())
    })
}

/// `C_N ⊕ r C_M`.
///
/// # Safety
/// `params` valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_gen_cyclic(
    n: usize,
    m: usize,
    params: *const AnnulusParams,
    out: *mut *mut AnnulusMatrix,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = deref(params, "params")?.to_core()?;
        *out = boxed_matrix(models::gen_cyclic_annulus_unitary(n, m, &p)?);
        Ok(())
    })
}

/// Truncated weighted shift on the window `n_min..=n_max`. When `weights` is
/// non-null it receives the `n_max - n_min + 1` squared norms `c_n`.
///
/// # Safety
/// `out` writable; `weights` null or holding `weights_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn annulus_gen_hardy_shift(
    alpha: f64,
    r: f64,
    n_min: i32,
    n_max: i32,
    weights: *mut f64,
    weights_len: usize,
    out: *mut *mut AnnulusMatrix,
) -> AnnulusStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec = models::HardyModelSpec::new(alpha, r, n_min, n_max)?;
        let h = models::gen_hardy_shift(&spec)?;
        if !weights.is_null() {
            if weights_len < h.weights.len() {
                return Err(fail(
                    AnnulusStatus::BufferTooSmall,
                    format!("need {} doubles, buffer holds {weights_len}", h.weights.len()),
                ));
            }
            std::slice::from_raw_parts_mut(weights, h.weights.len()).copy_from_slice(&h.weights);
        }
        *out = boxed_matrix(h.matrix);
        Ok(())
    })
}

/// `(S_α, S_α^2)` on the window; `r_squared` receives the annulus parameter
/// of the pair.
///
/// # Safety
/// All output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn annulus_gen_sarason_pair(
    alpha: f64,
    r: f64,
    n_min: i32,
    n_max: i32,
    v1: *mut *mut AnnulusMatrix,
    v2: *mut *mut AnnulusMatrix,
    r_squared: *mut f64,
) -> AnnulusStatus {
    guard(|| {
        let (v1, v2, r_squared) = (out_ptr(v1, "v1")?, out_ptr(v2, "v2")?, out_ptr(r_squared, "r_squared")?);
        let spec = models::HardyModelSpec { alpha, r, n_min, n_max };
        let pair = models::gen_sarason_pair(&spec)?;
        *r_squared = pair.r_squared;
        *v1 = boxed_matrix(pair.v1);
        *v2 = boxed_matrix(pair.v2);
        Ok(())
    })
}
