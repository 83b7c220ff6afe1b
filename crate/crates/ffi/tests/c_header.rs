use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "achcr.h"

int main(void) {
    AchcrAlgebra *alg = NULL;
    if (achcr_algebra_load("builtin:su2", &alg) != ACHCR_STATUS_OK) return 10;
    if (achcr_algebra_dimension(alg) != 1) return 11;
    char *report = NULL;
    if (achcr_solve(alg, 0, &report) != ACHCR_STATUS_OK) return 12;
    if (strstr(report, "\"obstruction\": {}") == NULL) return 13;
    achcr_string_free(report);
    achcr_algebra_free(alg);
    if (achcr_solve(NULL, 0, &report) != ACHCR_STATUS_NULL_POINTER) return 14;
    if (achcr_last_error() == NULL) return 15;
    char *a = NULL;
    if (achcr_sphere_coefficient(2, &a) != ACHCR_STATUS_OK) return 16;
    if (strcmp(a, "1/4") != 0) return 17;
    achcr_string_free(a);
    puts("ok");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("achcr.h").exists(), "header was not generated");
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let work = std::env::temp_dir().join(format!("achcr-c-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();

    let lib = target_dir().join("libachcr_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; checking syntax only", lib.display());
        let st = Command::new(&cc).arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(&include).arg(&src).status().unwrap();
        assert!(st.success());
        return;
    }
    let bin = work.join("main");
    let st = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success(), "C program failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}
