use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SR_LOG")).init();
    let code = strong_roommates::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
