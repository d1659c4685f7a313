// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(sqzsync::cli::run(std::env::args_os()));
}
