use std::io::Write;

fn main() {
    let (code, output) = floercone::cli::run(std::env::args());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(output.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
