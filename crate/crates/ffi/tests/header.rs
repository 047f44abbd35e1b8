//! The generated header must be valid C and C++.

use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/metasinr.h")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in ["ms_model_ppp", "ms_model_free", "ms_proposed_meta", "ms_beta_meta", "ms_exact_meta", "ms_nearest_only_meta", "ms_moment", "ms_simulate", "ms_sim_free", "ms_last_error_message", "MS_STATUS_CONVERGENCE", "typedef struct MsModel MsModel"] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles() {
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("use.c");
        std::fs::write(&src, "#include \"metasinr.h\"\nint main(void) { MsModel *m = 0; double v; (void)ms_proposed_meta(m, 1.0, 0.5, &v); ms_model_free(m); return 0; }\n").unwrap();
        let out = match Command::new(cc).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"]).arg(header().parent().unwrap()).arg(&src).output() {
            Ok(o) => o,
            Err(_) => {
                eprintln!("{cc} not found; skipping");
                continue;
            }
        };
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
