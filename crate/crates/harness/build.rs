use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[path = "src/synth.rs"]
#[allow(dead_code)]
mod synth;

#[path = "src/fixtures.rs"]
#[allow(dead_code)]
mod fixtures;

use xsdbind_core::emit::{emit_parser_backend, write_generated};

fn main() {
    let manifest =
        PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("cargo sets CARGO_MANIFEST_DIR"));
    let out = PathBuf::from(env::var("OUT_DIR").expect("cargo sets OUT_DIR"));
    println!("cargo:rerun-if-changed=src/synth.rs");
    println!("cargo:rerun-if-changed=src/fixtures.rs");
    println!("cargo:rerun-if-changed=fixtures");

    let root = fixtures::fixtures_dir(&manifest);
    let mut modules = String::new();
    let mut registry = String::from("pub static PARSERS: &[GeneratedParser] = &[\n");
    for fx in fixtures::FIXTURES {
        let loaded = fx
            .load(&root)
            .unwrap_or_else(|e| panic!("fixture {}: {e}", fx.name));
        for variant in fx.variants() {
            let name = fixtures::parser_name(fx.name, variant.name);
            let model = variant
                .bind(&loaded, &name)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let artifacts = emit_parser_backend(&model).unwrap_or_else(|e| panic!("{name}: {e}"));
            let dir =
                write_generated(&out, &model, &artifacts).unwrap_or_else(|e| panic!("{name}: {e}"));
            let ir = dir.join("model.json");
            fs::write(&ir, model.to_json()).expect("write model");
            let m = dir.join("mod.rs");
            writeln!(
                modules,
                "#[path = {:?}]\npub mod {name};",
                m.display().to_string()
            )
            .unwrap();
            writeln!(
                modules,
                "fn {name}_parse(src: &str, mode: Mode) -> ParseResult<(Value, Vec<Warning>)> {{\n    let (root, w) = {name}::parse_document(src, mode)?;\n    Ok(({name}::ToValue::to_value(&root), w))\n}}"
            )
            .unwrap();
            writeln!(
                registry,
                "    GeneratedParser {{ name: {name:?}, fixture: {:?}, variant: {:?}, model_json: include_str!({:?}), generated_dir: {:?}, parse: {name}_parse }},",
                fx.name,
                variant.name,
                ir.display().to_string(),
                dir.display().to_string(),
            )
            .unwrap();
        }
    }
    registry.push_str("];\n");
    fs::write(out.join("generated.rs"), format!("{modules}\n{registry}")).expect("write registry");
}
