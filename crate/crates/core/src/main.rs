use std::io::Write;
use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = panic::catch_unwind(|| {
        let mut out = stdout.lock();
        let mut err = stderr.lock();
        let code = segre_entangle::cli::run(std::env::args_os(), &mut out, &mut err);
        let _ = out.flush();
        code
    })
    .unwrap_or(1);
    ExitCode::from(code as u8)
}
