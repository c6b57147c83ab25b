use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = slant_cli::run(std::env::args_os());
    if !outcome.stderr.is_empty() {
        eprint!("{}", outcome.stderr);
    }
    match &outcome.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.stdout) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
        }
    }
    ExitCode::from(outcome.code as u8)
}
