use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let registry = propbridge::corpus::registry();
    let code = propbridge::cli::main_with(
        &registry,
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
