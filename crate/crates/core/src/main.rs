fn main() {
    let out = heightbound::cli::run_args(std::env::args_os());
    if out.code == 0 {
        print!("{}", out.report);
    } else {
        eprint!("{}", out.report);
    }
    std::process::exit(out.code);
}
