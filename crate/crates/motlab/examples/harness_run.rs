//! The command-line batches driven from code: a support batch, its plot, and
//! the files the binary would write.
//!
//! ```bash
//! cargo run --release -p motlab --example harness_run -- /tmp/motlab-demo
//! ```

use std::path::PathBuf;

use motlab::harness::{run, Command, CostSpec, ExperimentConfig};

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "motlab-demo".into()));
    let mut cfg = ExperimentConfig::new(Command::Support, 2, CostSpec::Power(1.9));
    cfg.trials = 50;
    let support = run(&cfg).unwrap();
    println!("{}", support.summary);
    let report = dir.join("support");
    support.write(&report).unwrap();

    cfg.command = Command::Plot;
    cfg.input = Some(report.with_extension("json"));
    let plot = run(&cfg).unwrap();
    println!("{}", plot.summary);
    for path in plot.write(&dir.join("plot")).unwrap() {
        println!("wrote {}", path.display());
    }
}
