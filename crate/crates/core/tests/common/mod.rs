#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use orgprofile::pipeline::PipelineConfig;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini")
}

/// The mini fixture config with its output redirected to `out`.
pub fn mini_config(out: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&fixture_dir().join("pipeline.toml")).expect("fixture config");
    config.output_dir = out.to_path_buf();
    config
}

/// Copy the fixture tables into `dir` so a test can edit them.
pub fn copy_fixture(dir: &Path) -> PipelineConfig {
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
        }
    }
    PipelineConfig::load(&dir.join("pipeline.toml")).expect("copied config")
}

pub fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

pub const M: &str = "DEPT MATH ANAL";
pub const F: &str = "FAC SCI";
pub const O: &str = "DEPT OPT";
pub const C: &str = "DEPT COMP SCI & ARTIFICIAL INTELLIGENCE";
pub const E: &str = "ETS INGN INFORMAT";
pub const I: &str = "INST CARLOS I THEORET & COMPUTAT PHYS";
