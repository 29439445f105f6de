use clap::Parser;

fn main() {
    let cli = hypconf_cli::Cli::parse();
    std::process::exit(hypconf_cli::execute(&cli));
}
