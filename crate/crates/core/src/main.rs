use cascadenet::cli;

fn main() {
    let parsed = match cli::parse(std::env::args_os()) {
        Ok(c) => c,
        Err(code) => std::process::exit(code),
    };
    let level = match parsed.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    std::process::exit(cli::execute(parsed));
}
