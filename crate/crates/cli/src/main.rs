fn main() {
    std::process::exit(omdp_sense::run(std::env::args_os()));
}
