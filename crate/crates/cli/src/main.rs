use clap::Parser;

fn main() {
    let cli = torbit_cli::config::Cli::parse();
    match torbit_cli::execute(cli) {
        Ok(status) => std::process::exit(if status.guard_present { 3 } else { 0 }),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
