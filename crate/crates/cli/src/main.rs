use clap::Parser;

fn main() {
    let cli = qldpc_dc_cli::Cli::parse();
    if let Err(e) = qldpc_dc_cli::execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
