use std::process::ExitCode;

fn main() -> ExitCode {
    let result = alexandrov_cli::run(std::env::args_os().skip(1));
    if result.exit_code == alexandrov_cli::EXIT_OK {
        println!("{}", result.summary);
    } else {
        eprintln!("{}", result.summary);
    }
    ExitCode::from(result.exit_code as u8)
}
