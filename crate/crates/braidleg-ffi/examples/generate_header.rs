//! Regenerate `include/braidleg.h` from the crate's public surface.
//!
//! ```text
//! cargo run -p braidleg-ffi --example generate_header --features generate-header
//! ```

fn main() {
    let crate_dir = env!("CARGO_MANIFEST_DIR");
    let config = cbindgen::Config::from_file(format!("{crate_dir}/cbindgen.toml"))
        .expect("cbindgen.toml parses");
    cbindgen::Builder::new()
        .with_crate(crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation succeeds")
        .write_to_file(format!("{crate_dir}/include/braidleg.h"));
    println!("wrote include/braidleg.h");
}
