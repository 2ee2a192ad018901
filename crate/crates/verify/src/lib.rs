//! Home of the `acceptance` test target, which runs every acceptance
//! criterion and reports one line per criterion. The checks themselves live
//! in [`qmetro::harness`] so the CLI `verify` command shares them.

pub use qmetro::harness::{criteria, run_verify, VerifyReport};
