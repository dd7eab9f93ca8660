use std::io::{self, Write};

fn main() {
    let mut stdout = io::stdout().lock();
    let code = hartmanlab_cli::run(std::env::args_os(), &mut stdout);
    let _ = stdout.flush();
    std::process::exit(code);
}
