//! Command-line campaign runner for the noisy multi-objective benchmarks.
//!
//! The binary is a thin wrapper; everything it does is available here so the
//! integration tests can drive it directly.

pub mod analysis;
pub mod campaign;
pub mod config;
pub mod error;
pub mod hv;
pub mod plotdata;
pub mod posthoc;
pub mod stats;
pub mod tables;

pub use campaign::{run_campaign, CampaignReport, RunOptions};
pub use config::CampaignConfig;
pub use error::{CliError, CliResult};

/// Campaign configurations shipped with the tool, by name.
pub const BUILTIN_CONFIGS: [(&str, &str); 4] = [
    ("quick", include_str!("../../../configs/quick.json")),
    ("paper-n10", include_str!("../../../configs/paper-n10.json")),
    ("paper-n30", include_str!("../../../configs/paper-n30.json")),
    ("full", include_str!("../../../configs/full.json")),
];

pub fn builtin_config(name: &str) -> CliResult<CampaignConfig> {
    let (_, text) = BUILTIN_CONFIGS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = BUILTIN_CONFIGS.iter().map(|(n, _)| *n).collect();
        CliError::Usage(format!("unknown profile `{name}`; available: {}", names.join(", ")))
    })?;
    CampaignConfig::from_json(text, std::path::Path::new(&format!("<builtin {name}>")))
}
