//! Run the whole pipeline on the bundled fixture (or on a config given as
//! the first argument) and print the run report.
//!
//! ```text
//! cargo run --example run_pipeline
//! cargo run --example run_pipeline -- path/to/pipeline.toml /tmp/out
//! ```

use std::path::{Path, PathBuf};

use orgprofile::pipeline::{run_pipeline, PipelineConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let config_path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini/pipeline.toml"));
    let mut config = PipelineConfig::load(&config_path).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1);
    });
    config.output_dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("orgprofile-example"));

    match run_pipeline(&config) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            println!("\noutputs in {}", config.output_dir.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
