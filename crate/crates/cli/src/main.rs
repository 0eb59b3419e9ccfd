use clap::Parser;

fn main() {
    let cli = match interdep_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Err(err) = interdep_cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(interdep_cli::exit_code(&err));
    }
}
