//! Runs a bundled study config and the identity suite.

use std::path::PathBuf;

use semirv::harness::{run_config_file, selfcheck, RunOptions};

fn main() {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/erlang.json");
    let out_dir = std::env::temp_dir().join("semirv-example");
    let outcome = run_config_file(
        &config,
        &RunOptions {
            out_dir: out_dir.clone(),
            parallel: false,
            seed: None,
        },
    );
    for m in &outcome.messages {
        println!("{m}");
    }
    println!(
        "exit code {}, output in {}",
        outcome.exit_code,
        out_dir.display()
    );

    for c in selfcheck().checks {
        println!(
            "{} {} (worst {:.2e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst
        );
    }
}
