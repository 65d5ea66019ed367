use std::process::ExitCode;

use clap::Parser;
use dampedwig_cli::{
    cmd_phase_mean, cmd_spectrum, cmd_survival, cmd_validate, Cli, Command, RunConfig,
};

fn emit(rc: &RunConfig, text: &str) -> Result<(), String> {
    match &rc.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rc = match RunConfig::from_cli(&cli) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("dampedwig: {e}");
            return ExitCode::from(2);
        }
    };
    let (text, ok) = match rc.command {
        Command::Survival => (cmd_survival(&rc), true),
        Command::PhaseMean => (cmd_phase_mean(&rc), true),
        Command::Spectrum => (cmd_spectrum(&rc), true),
        Command::Validate => {
            let report = cmd_validate(&rc);
            if !report.passed() {
                eprintln!("dampedwig: failing checks: {}", report.failing().join(", "));
            }
            (Ok(report.text.clone()), report.passed())
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("dampedwig: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = emit(&rc, &text) {
        eprintln!("dampedwig: {e}");
        return ExitCode::FAILURE;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
