fn main() { std::process::exit(gxbtc::cli::main()); }
