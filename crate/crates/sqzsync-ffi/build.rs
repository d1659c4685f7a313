// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Generates `include/sqzsync.h` from the public extern surface.

use std::path::Path;

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("cargo sets the manifest dir");
    let header = Path::new(&crate_dir).join("include").join("sqzsync.h");
    std::fs::create_dir_all(header.parent().expect("header path has a parent"))
        .expect("include directory is writable");
    cbindgen::generate(&crate_dir)
        .expect("cbindgen parses the extern surface")
        .write_to_file(&header);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
