use std::path::Path;
use std::process::Command;

const PROGRAM: &str = r#"
#include "markov_elim.h"

int main(void) {
    MeScenario *s = NULL;
    MeModel *m = NULL;
    double p[4] = {0.4, 0.3, 1.0, 0.0};
    MeStatus st = me_scenario_preset("lambda", p, 4, &s);
    if (st == ME_STATUS_OK) st = me_model_build(s, ME_ORDER_MARKOV1, ME_CONDITION_MIN_TRACE_NORM, 0.0, &m);
    me_model_free(m);
    me_scenario_free(s);
    return st == ME_STATUS_OK ? 0 : 1;
}
"#;

#[test]
fn generated_header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler found; skipping");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("markov_elim.h").exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let out =
        Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"]).arg(&include).arg(&src).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
