//! Browser bindings. Each operation takes model-file text and returns a JSON
//! string; the plain functions in [`ops`] carry the logic and run natively.

use wasm_bindgen::prelude::*;

pub mod ops;

#[wasm_bindgen(js_name = bundledModels)]
pub fn bundled_models() -> String {
    ops::bundled_models()
}

#[wasm_bindgen(js_name = bundledSource)]
pub fn bundled_source(name: &str) -> Result<String, JsError> {
    ops::bundled_source(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn noether(model: &str, field: &str, samples: usize, seed: u64) -> Result<String, JsError> {
    ops::noether(model, field, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pseudosymmetry(model: &str, field: &str, against: &str, samples: usize, seed: u64) -> Result<String, JsError> {
    ops::pseudosymmetry(model, field, against, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sectionDivergence)]
pub fn section_divergence(model: &str, law: &str, origin: &str, range: f64, step: f64) -> Result<String, JsError> {
    ops::section_divergence(model, law, origin, range, step).map_err(|e| JsError::new(&e))
}
