use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = scu_cli::Cli::parse();
    match scu_cli::run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
