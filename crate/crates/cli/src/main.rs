use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let mut console = xsdbind_cli::Console {
        out: &mut out,
        err: &mut err,
    };
    let code = xsdbind_cli::run(std::env::args_os(), &mut console);
    ExitCode::from(code as u8)
}
