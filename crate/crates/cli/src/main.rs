use clap::Parser;
use sqdisc::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = sqdisc::execute(&cli) {
        eprintln!("sqdisc: {e}");
        std::process::exit(e.exit_code());
    }
}
