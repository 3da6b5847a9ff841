use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    let bindings = cbindgen::Builder::new().with_crate(&crate_dir).with_config(config).generate().expect("generate C bindings");

    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("superanalysis.h");
    bindings.write_to_file(&out);
    bindings.write_to_file(crate_dir.join("include/superanalysis.h"));

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
