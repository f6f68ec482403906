use clap::error::ErrorKind;
use clap::Parser;

use rotwave_cli::error::exit;
use rotwave_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::CONFIG,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}
