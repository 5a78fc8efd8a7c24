use clap::Parser;

fn main() {
    let cli = hubbard_tiles_cli::Cli::parse();
    std::process::exit(hubbard_tiles_cli::run(cli));
}
