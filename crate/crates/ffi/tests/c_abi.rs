use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "annulus_ops.h"

int main(void) {
    double data[8] = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.0};
    AnnulusMatrix *m = NULL;
    if (annulus_matrix_new(2, data, &m) != ANNULUS_STATUS_OK) return 10;
    AnnulusParams p = annulus_params_default(0.5);

    bool unitary = true;
    if (annulus_is_ar_unitary(m, &p, &unitary) != ANNULUS_STATUS_OK || unitary) return 11;

    AnnulusDecomposition *d = NULL;
    if (annulus_decompose(m, ANNULUS_DECOMPOSE_KIND_CANONICAL, &p, &d) != ANNULUS_STATUS_OK) return 12;
    if (annulus_decomposition_part_count(d) != 3) return 13;
    size_t ambient = 0, dim = 0;
    annulus_decomposition_part_dim(d, 2, &ambient, &dim);
    if (ambient != 2 || dim != 1) return 14;
    if (strcmp(annulus_decomposition_part_label(d, 2), "c") != 0) return 15;
    annulus_decomposition_free(d);

    AnnulusDecomposition *w = NULL;
    AnnulusStatus s = annulus_decompose(m, ANNULUS_DECOMPOSE_KIND_WOLD, &p, &w);
    if (s != ANNULUS_STATUS_NOT_AR_ISOMETRY) return 16;
    if (strncmp(annulus_last_error_message(), "NotArIsometry", 13) != 0) return 17;
    if (strcmp(annulus_status_name(s), "NotArIsometry") != 0) return 18;

    annulus_matrix_free(m);
    printf("ok\n");
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header_dir() -> PathBuf {
    crate_dir().join("include")
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".to_string())
}

fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    profile_dir.join("libannulus_ops_ffi.a")
}

#[test]
fn header_is_generated() {
    let text = std::fs::read_to_string(header_dir().join("annulus_ops.h")).unwrap();
    for needle in [
        "typedef struct AnnulusMatrix AnnulusMatrix;",
        "typedef struct AnnulusDecomposition AnnulusDecomposition;",
        "ANNULUS_STATUS_OK = 0",
        "annulus_family(",
        "annulus_check_brehmer(",
        "annulus_is_candidate(",
    ] {
        assert!(text.contains(needle), "header lacks {needle}");
    }
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let header = header_dir().join("annulus_ops.h");
    for lang in ["c", "c++"] {
        let status = Command::new(cc())
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .expect("C compiler available");
        assert!(status.success(), "header fails to compile as {lang}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    let bin = dir.join("probe");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc())
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "probe failed to compile");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "probe exit status");
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("c_abi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
