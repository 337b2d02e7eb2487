//! Run the self-check suite and print its report.
//!
//! cargo run --release --example validate [-- --quick]

use nh_entangle::validate::{run_validation, ValidateOptions};

fn main() {
    let quick = std::env::args().any(|a| a == "--quick");
    let report = run_validation(ValidateOptions {
        quick,
        use_printed_3q: false,
    });
    print!("{}", report.render());
    std::process::exit(if report.passed() { 0 } else { 1 });
}
