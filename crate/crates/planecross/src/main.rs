use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    let code = planecross::cli::main_with_args(std::env::args_os(), &mut stdout);
    ExitCode::from(code as u8)
}
