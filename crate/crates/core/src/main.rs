fn main() {
    std::process::exit(isoperilab::cli::main_exit());
}
