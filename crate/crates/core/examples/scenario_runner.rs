//! Run every shipped scenario config through the library entry point.
//!
//! ```text
//! cargo run --release --example scenario_runner [output_root]
//! ```

use std::path::{Path, PathBuf};

use wavelab::scenario::{run, ScenarioConfig};

fn main() -> wavelab::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("output"), PathBuf::from);
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.sort();
    for path in paths {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario")
            .to_string();
        let mut config = ScenarioConfig::load(&path)?;
        config.output_dir = Some(root.join(&stem));
        match run(&config) {
            Ok(report) => {
                let metrics: Vec<String> = report
                    .metrics
                    .iter()
                    .map(|(k, v)| format!("{k}={v:.3e}"))
                    .collect();
                println!("{stem}: {}", metrics.join(" "));
            }
            Err(e) if e.is_numerical_halt() => println!("{stem}: halted: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
