use std::io;
use std::process::ExitCode;

use lagsum_core::cli::{self, NMAX_ENV};

fn main() -> ExitCode {
    let env_nmax = std::env::var(NMAX_ENV).ok();
    let code = cli::run(
        std::env::args_os(),
        env_nmax.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
