use std::io;

fn main() {
    let code = weyl_cli::main_with(std::env::args(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
