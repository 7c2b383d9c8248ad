#![allow(dead_code)]

pub mod gen;
pub mod oracle;
pub mod props;

use paloma::model::{ConstRef, ModelDefinition, SeqComponent};
use paloma::parser::load;

pub fn model_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

pub fn load_model(name: &str) -> ModelDefinition {
    let text = std::fs::read_to_string(model_path(name)).expect("model file");
    load(&text).expect("valid model").0
}

pub fn agent(def: &ModelDefinition, name: &str, loc: &str) -> SeqComponent {
    SeqComponent::constant(ConstRef::new(name, def.loc_by_name(loc).expect("declared location")))
}

pub fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}
