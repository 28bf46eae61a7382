use clap::Parser;
use stvflow_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli.command) {
        let record = serde_json::to_string(&e.record()).expect("record serializes");
        eprintln!("{record}");
        std::process::exit(e.exit_code());
    }
}
