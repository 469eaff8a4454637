//! wasm-bindgen entry points for the browser demo. Every function returns a
//! JSON string; failures come back as `{"error": "..."}`.

use pdeflat::curvature::flatness;
use pdeflat::duality::{dual_pde, SolutionFamily};
use pdeflat::fibration::{fibration_report, Group};
use pdeflat::jetframe::PdeSystem;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

fn report_value(sys: &PdeSystem) -> Value {
    serde_json::to_value(flatness(sys).to_doc()).expect("serializable report")
}

/// Flatness report for `y_{x_i x_j} = f_ij`.
#[wasm_bindgen]
pub fn check_system(f11: &str, f12: &str, f22: &str) -> String {
    match PdeSystem::parse(f11, f12, f22) {
        Ok(sys) => report_value(&sys).to_string(),
        Err(e) => error(e),
    }
}

/// Dual equation of the family `h(x1, x2, X1, X2, Y) = 0`. Empty inverse
/// strings mean no inverse was supplied.
#[wasm_bindgen]
pub fn dual_family(h: &str, inv_x1: &str, inv_x2: &str) -> String {
    let inverse = match (inv_x1.trim(), inv_x2.trim()) {
        ("", "") => None,
        (a, b) => Some((a, b)),
    };
    let fam = match SolutionFamily::parse(h, inverse) {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    match dual_pde(&fam) {
        Ok(d) => json!({
            "F11": d.f11.to_string(),
            "F12": d.f12.to_string(),
            "F22": d.f22.to_string(),
            "open": d.open,
            "dual_check": d.as_system().map(|s| report_value(&s)),
        })
        .to_string(),
        Err(e) => error(e),
    }
}

/// Subgroup and quotient dimensions plus sampled probes for `sl4`, `scale`
/// or `compact`.
#[wasm_bindgen]
pub fn fibration(group: &str, seed: u32, samples: u32) -> String {
    match group.parse::<Group>() {
        Ok(g) => serde_json::to_string(&fibration_report(g, seed.into(), samples.clamp(1, 2000) as usize))
            .unwrap_or_else(error),
        Err(e) => error(e),
    }
}
