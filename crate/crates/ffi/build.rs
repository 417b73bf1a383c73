fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    let header = std::path::Path::new(&crate_dir).join("include/subwave.h");
    std::fs::create_dir_all(header.parent().unwrap()).unwrap();
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_include_guard("SUBWAVE_H")
        .with_cpp_compat(true)
        .with_documentation(true)
        .generate()
        .expect("cbindgen header generation")
        .write_to_file(header);
    println!("cargo:rerun-if-changed=src/lib.rs");
}
