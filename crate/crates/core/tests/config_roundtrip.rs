//! The shipped configuration file and the TOML round trip.

use safescale_core::{Variant, WorkspaceConfig};
use std::path::PathBuf;

fn repo_config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_default_config_matches_the_builtin_scenario() {
    let path = repo_config("sim_default.toml");
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let cfg = WorkspaceConfig::from_toml_str(&text).unwrap();
    assert_eq!(cfg, WorkspaceConfig::default_scenario());
    // The file is generated by the gen_default_config example; fail loudly
    // if it drifts from what the library would emit.
    assert_eq!(text, cfg.to_toml_string().unwrap());
}

#[test]
fn save_and_load_through_the_filesystem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    let mut cfg = WorkspaceConfig::default_scenario();
    cfg.variant = Variant::BatchReplacement;
    cfg.rng_seed = 12345;
    cfg.save(&path).unwrap();
    let back = WorkspaceConfig::load(&path).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn loading_an_invalid_file_fails_with_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "rng_seed = \"not a number\"").unwrap();
    let err = WorkspaceConfig::load(&path).unwrap_err();
    assert!(err.to_string().starts_with("invalid config:"), "{err}");

    // Structurally valid TOML that violates the semantic rules.
    let mut cfg = WorkspaceConfig::default_scenario();
    cfg.safety.values[0] = 0.9; // not increasing
    let text = cfg.to_toml_string().unwrap();
    std::fs::write(&path, text).unwrap();
    assert!(WorkspaceConfig::load(&path).is_err());
}
