//! Runs the complete file-based pipeline on the bundled three-root scenario
//! and prints the evaluation table, exactly as the command line would.
//!
//!     cargo run --example three_roots_pipeline

use std::path::Path;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/s3_wb.toml");
    let out = std::env::temp_dir().join("rootradar_three_roots");
    std::fs::create_dir_all(&out).expect("output dir");

    let code = rootradar::cli::run([
        "rootradar".to_string(),
        "pipeline".to_string(),
        "--config".to_string(),
        config.display().to_string(),
        "--out".to_string(),
        out.display().to_string(),
    ]);
    assert_eq!(code, 0, "pipeline failed");

    println!("\nartifacts in {}:", out.display());
    let mut names: Vec<_> = std::fs::read_dir(&out)
        .expect("read output dir")
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }
}
