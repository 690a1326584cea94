//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON string.
//! The `*_json` functions hold the logic and run natively; the exported
//! wrappers only convert errors into JavaScript exceptions.

use serde_json::json;
use wasm_bindgen::prelude::*;

use w22_core::intermediate::{self, ModuleSpec};
use w22_core::lie::{self, BasisElement};
use w22_core::pbw::HighestWeightParams;
use w22_core::scalar::{self, Scalar};
use w22_core::verma;

/// Largest Verma level the page may ask for; level 6 already has 65 monomials.
pub const MAX_LEVEL: u32 = 6;
pub const MAX_WINDOW: i64 = 12;

fn rational(name: &str, text: &str) -> Result<Scalar, String> {
    scalar::parse(text.trim()).map_err(|e| format!("{name}: {e}"))
}

fn generator(name: &str, text: &str) -> Result<BasisElement, String> {
    text.trim().parse::<BasisElement>().map_err(|e| format!("{name}: {e}"))
}

pub fn bracket_json(left: &str, right: &str) -> Result<String, String> {
    let (l, r) = (generator("left", left)?, generator("right", right)?);
    let e = lie::bracket_basis(l, r);
    Ok(json!({ "left": l.to_string(), "right": r.to_string(), "text": e.to_string(), "element": e }).to_string())
}

pub fn verma_json(lambda: &str, c: &str, c0: &str, c1: &str, max_level: u32) -> Result<String, String> {
    if max_level == 0 || max_level > MAX_LEVEL {
        return Err(format!("max level must be between 1 and {MAX_LEVEL}"));
    }
    let p = HighestWeightParams::new(
        rational("lambda", lambda)?,
        rational("c", c)?,
        rational("c0", c0)?,
        rational("c1", c1)?,
    );
    let check = verma::is_verma_irreducible(&p, max_level as usize);
    let witness = check.witness.as_ref().map(|w| w.vector.to_element().to_string());
    Ok(json!({
        "dims": verma::character_dims(max_level as usize),
        "check": check,
        "witness_text": witness,
    })
    .to_string())
}

pub fn module_json(family: &str, a: &str, b: &str, window: i64) -> Result<String, String> {
    if !(2..=MAX_WINDOW).contains(&window) {
        return Err(format!("window must be between 2 and {MAX_WINDOW}"));
    }
    let spec = match family {
        "aab" => ModuleSpec::aab(rational("a", a)?, rational("b", b)?),
        "aa" => ModuleSpec::aa(rational("a", a)?),
        "ba" => ModuleSpec::ba(rational("a", a)?),
        "a-prime-000" => ModuleSpec::a_prime_000(),
        other => return Err(format!("unknown family {other:?}")),
    };
    let table = intermediate::action_table(&spec, window);
    let probe = intermediate::simplicity_probe(&spec, window).map_err(|e| e.to_string())?;
    let compat = intermediate::bracket_compatibility_check(&spec, window.min(4)).map_err(|e| e.to_string())?;
    let support: Vec<i64> = (-window..=window).filter(|i| intermediate::WeightModule::in_support(&spec, *i)).collect();
    Ok(json!({
        "name": spec.catalog_name(),
        "window": window,
        "support": support,
        "table": table,
        "probe": probe,
        "violations": compat.violations.len(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn bracket(left: &str, right: &str) -> Result<String, JsError> {
    bracket_json(left, right).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verma(lambda: &str, c: &str, c0: &str, c1: &str, max_level: u32) -> Result<String, JsError> {
    verma_json(lambda, c, c0, c1, max_level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn module(family: &str, a: &str, b: &str, window: i32) -> Result<String, JsError> {
    module_json(family, a, b, window as i64).map_err(|e| JsError::new(&e))
}
