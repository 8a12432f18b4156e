//! Browser bindings for the demo page in `www/`. Every export returns a JSON string.

use nsot_core::builtins::builtin_scenario;
use nsot_core::channel::binary_adder_mac;
use nsot_core::compose::{amplification_analysis, compose_mac, encoder_secrecy_violation};
use nsot_core::lp::GameSpec;
use nsot_core::ns_box::{check_ns, identity_decoder, lift_sender_box_mac, make_pr_box, AnyBox, BipartiteBox};
use nsot_core::prob::ConditionalPmf;
use nsot_core::protocols::{alice_view_invariance, evaluate_rabin, evaluate_scenario};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js(r: nsot_core::Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

pub fn amplification_json(epsilon: f64, n_max: u32) -> nsot_core::Result<String> {
    let curve = amplification_analysis(epsilon, n_max)?;
    Ok(json!({
        "epsilon": epsilon,
        "first_n_reaching_0_99_bits": curve.first_n_reaching(0.99),
        "rows": curve.rows,
    })
    .to_string())
}

/// `v * PR + (1 - v) * uniform`, its CHSH score, and what the receiver of the
/// binary adder learns when Bob's half copies the channel output.
pub fn pr_mixture_json(visibility: f64) -> nsot_core::Result<String> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(nsot_core::Error::Domain(format!("visibility {visibility} outside [0,1]")));
    }
    let pr = make_pr_box();
    let noise = ConditionalPmf::uniform(pr.law().output_axes().to_vec(), pr.law().input_axes().to_vec());
    let mixed = BipartiteBox::new(ConditionalPmf::mix(&[pr.law(), &noise], &[visibility, 1.0 - visibility])?)?;
    let chsh = GameSpec::chsh().value_of(&AnyBox::Bipartite(mixed.clone()))?;
    let ns = check_ns(&AnyBox::Bipartite(mixed.clone())).passed;
    let lifted = lift_sender_box_mac(&mixed, &identity_decoder(3))?;
    let leak = encoder_secrecy_violation(&compose_mac(&lifted, &binary_adder_mac())?)?;
    let uses =
        if leak.epsilon > 0.0 { amplification_analysis(leak.epsilon, 4096)?.first_n_reaching(0.99) } else { None };
    Ok(json!({
        "visibility": visibility,
        "chsh": chsh,
        "non_signaling": ns,
        "epsilon": leak.epsilon,
        "argmax_pair": leak.argmax_pair,
        "uses_for_0_99_bits": uses,
    })
    .to_string())
}

pub fn protocol_json(name: &str) -> nsot_core::Result<String> {
    let s = builtin_scenario(name)?;
    if s.pairs.is_empty() {
        return Ok(json!({"scenario": name, "rabin": evaluate_rabin(&s)?}).to_string());
    }
    Ok(json!({
        "scenario": name,
        "evaluation": evaluate_scenario(&s)?,
        "sender_view_invariance": alice_view_invariance(&s)?,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn amplification(epsilon: f64, n_max: u32) -> Result<String, JsError> {
    js(amplification_json(epsilon, n_max))
}

#[wasm_bindgen]
pub fn pr_mixture(visibility: f64) -> Result<String, JsError> {
    js(pr_mixture_json(visibility))
}

#[wasm_bindgen]
pub fn protocol(name: &str) -> Result<String, JsError> {
    js(protocol_json(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn curve_rows() {
        let v = parse(amplification_json(0.5, 3).unwrap());
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        assert_eq!(v["rows"][1]["tv"], 0.75);
        assert!(amplification_json(0.0, 3).is_err());
    }

    #[test]
    fn mixture_endpoints() {
        let full = parse(pr_mixture_json(1.0).unwrap());
        assert!((full["chsh"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(full["non_signaling"], true);
        assert!(full["epsilon"].as_f64().unwrap() > 0.0);
        let none = parse(pr_mixture_json(0.0).unwrap());
        assert!((none["chsh"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(pr_mixture_json(1.5).is_err());
    }

    #[test]
    fn protocols() {
        let v = parse(protocol_json("pr_ot").unwrap());
        assert_eq!(v["evaluation"]["perfect"]["sfa"], true);
        let r = parse(protocol_json("rabin_ot").unwrap());
        assert_eq!(r["rabin"]["receive_probability"], 0.5);
        assert!(protocol_json("nope").is_err());
    }
}
