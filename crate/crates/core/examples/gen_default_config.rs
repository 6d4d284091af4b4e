//! Print the bundled reference scenario as TOML.
//!
//! The repository's `configs/sim_default.toml` is generated by this
//! example; regenerate it after changing the scenario:
//!
//! ```text
//! cargo run -p safescale-core --example gen_default_config > configs/sim_default.toml
//! ```

use safescale_core::WorkspaceConfig;

fn main() {
    let cfg = WorkspaceConfig::default_scenario();
    print!("{}", cfg.to_toml_string().expect("reference scenario serialises"));
}
