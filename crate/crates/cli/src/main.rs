// SPDX-License-Identifier: MIT OR Apache-2.0

fn main() {
    let code = rledtw_cli::main_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
