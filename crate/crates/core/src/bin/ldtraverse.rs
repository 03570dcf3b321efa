fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("LDTRAVERSE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let code = ldtraverse::cli::dispatch(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code.0);
}
