use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = imra::cli::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = imra::cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    if out.flush().is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
