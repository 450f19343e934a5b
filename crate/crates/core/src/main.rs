use std::process::ExitCode;

fn main() -> ExitCode {
    // randomized expression graphs recurse deeply
    let code = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(|| cgode::frontend::cli::run(std::env::args_os()))
        .expect("spawn worker thread")
        .join()
        .unwrap_or(101);
    ExitCode::from(code as u8)
}
