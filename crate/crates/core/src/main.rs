fn main() {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    std::process::exit(gkp_cluster::cli::main_with_env_args());
}
