use serde::Serialize;

use super::games::solve_over_ns;
use crate::channel::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::ns_box::{AnyBox, BoxShape, PartyStructure};
use crate::prob::{ravel, tuples, volume};

/// Largest number of view subsets enumerated.
pub const MAX_SIGN_PATTERNS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distinguishability {
    pub value: f64,
    pub optimizer: AnyBox,
    /// View outcomes `(y, j)` where the first input tuple is favored.
    pub favored: Vec<Vec<usize>>,
    pub patterns: usize,
}

/// Coefficients of `P(y, j | i)` in the box entries after composing with `w`.
fn view_coefficients(shape: &BoxShape, w: &Channel, inputs: (usize, usize), y: usize, j: usize) -> Vec<(usize, f64)> {
    let block = volume(&shape.outputs);
    let mut out = Vec::new();
    for x in tuples(&shape.outputs[..2]) {
        let wy = w.get(&[y], &x);
        if wy != 0.0 {
            let inp = ravel(&[inputs.0, inputs.1, y], &shape.inputs);
            out.push((inp * block + ravel(&[x[0], x[1], j], &shape.outputs), wy));
        }
    }
    out
}

/// Largest total variation between the receiver's views `(Y, J)` at two sender
/// input tuples, over every non-signaling box of `shape` composed with `w`.
pub fn max_distinguishability(
    shape: &BoxShape,
    w: &Channel,
    pair: ((usize, usize), (usize, usize)),
) -> Result<Distinguishability> {
    if shape.structure != PartyStructure::TripartiteMac || w.kind() != ChannelKind::Mac {
        return Err(Error::structural("distinguishability search needs a tripartite MAC shape and a MAC channel"));
    }
    let ws = w.law();
    if ws.input_sizes() != shape.outputs[..2] || ws.output_sizes()[0] != shape.inputs[2] {
        return Err(Error::structural(format!(
            "channel {:?}->{:?} does not fit shape {shape}",
            ws.input_sizes(),
            ws.output_sizes()
        )));
    }
    let ((a1, a2), (b1, b2)) = pair;
    if a1.max(b1) >= shape.inputs[0] || a2.max(b2) >= shape.inputs[1] {
        return Err(Error::structural(format!("input pair {pair:?} is outside shape {shape}")));
    }
    let view: Vec<Vec<usize>> = tuples(&[shape.inputs[2], shape.outputs[2]]).collect();
    if view.len() >= 16 {
        return Err(Error::resource(format!("{} view outcomes give more than 2^16 sign patterns", view.len())));
    }
    let patterns = 1usize << view.len();
    let n = volume(&shape.outputs) * volume(&shape.inputs);
    let mut best: Option<Distinguishability> = None;
    for mask in 0..patterns {
        let mut c = vec![0.0; n];
        for (bit, v) in view.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                for (idx, coef) in view_coefficients(shape, w, (a1, a2), v[0], v[1]) {
                    c[idx] += coef;
                }
                for (idx, coef) in view_coefficients(shape, w, (b1, b2), v[0], v[1]) {
                    c[idx] -= coef;
                }
            }
        }
        let (sol, optimizer, _) = solve_over_ns(shape, &c)?;
        if best.as_ref().is_none_or(|b| sol.value > b.value + 1e-12) {
            let favored = view.iter().enumerate().filter(|(bit, _)| mask >> bit & 1 == 1).map(|(_, v)| v.clone());
            best =
                Some(Distinguishability { value: sol.value.max(0.0), optimizer, favored: favored.collect(), patterns });
        }
    }
    Ok(best.expect("at least the empty pattern is solved"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::binary_adder_mac;
    use crate::compose::{compose_mac, encoder_secrecy_violation};
    use crate::lp::ns_membership;
    use crate::ns_box::{identity_mac_box, TripartiteMacBox};

    fn adder_shape() -> BoxShape {
        BoxShape::new(PartyStructure::TripartiteMac, vec![2, 2, 2], vec![2, 2, 3]).unwrap()
    }

    #[test]
    fn adder_extremes() {
        let s = adder_shape();
        let w = binary_adder_mac();
        let d = max_distinguishability(&s, &w, ((0, 0), (1, 1))).unwrap();
        assert!((d.value - 1.0).abs() < 1e-7);
        assert!(ns_membership(d.optimizer.law(), &s).unwrap().passed);
        let same = max_distinguishability(&s, &w, ((1, 0), (1, 0))).unwrap();
        assert!(same.value.abs() < 1e-9);
        assert_eq!(same.patterns, 64);
    }

    #[test]
    fn bounds_the_identity_chain() {
        let b: TripartiteMacBox = identity_mac_box(3);
        let sys = compose_mac(&b, &binary_adder_mac()).unwrap();
        let eps = encoder_secrecy_violation(&sys).unwrap();
        let pair = ((0, 1), (1, 0));
        let d = max_distinguishability(&b.shape(), &binary_adder_mac(), pair).unwrap();
        let tv = eps.per_pair.iter().find(|p| p.inputs_a == vec![0, 1] && p.inputs_b == vec![1, 0]).unwrap().tv;
        assert!(d.value >= tv - 1e-9);
    }

    #[test]
    fn bad_inputs() {
        let w = binary_adder_mac();
        assert!(matches!(
            max_distinguishability(&BoxShape::binary_bipartite(), &w, ((0, 0), (1, 1))),
            Err(Error::Structural(_))
        ));
        assert!(matches!(max_distinguishability(&adder_shape(), &w, ((0, 2), (1, 1))), Err(Error::Structural(_))));
    }
}
