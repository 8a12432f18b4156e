use super::checks::check_bipartite_ns;
use super::types::{AnyBox, BipartiteBox, BoxShape, PartyStructure, TripartiteBcBox, TripartiteMacBox};
use crate::error::{Error, Result};
use crate::prob::{Alphabet, ConditionalPmf};

/// Binary bipartite box with uniform outputs and `x1 ^ x2 = f(i1, i2)`.
pub fn xor_box(f: impl Fn(usize, usize) -> usize) -> BipartiteBox {
    let s = BoxShape::binary_bipartite();
    let law = ConditionalPmf::from_fn(s.output_axes(), s.input_axes(), |o, i| {
        if (o[0] ^ o[1]) == f(i[0], i[1]) & 1 {
            0.5
        } else {
            0.0
        }
    })
    .expect("xor box is normalized");
    BipartiteBox::new(law).expect("canonical shape")
}

/// The PR box: `x1 ^ x2 = i1 * i2` with uniform marginals.
pub fn make_pr_box() -> BipartiteBox {
    xor_box(|a, b| a & b)
}

/// `x1 ^ x2 = i1 * i2 ^ 1`.
pub fn make_anti_pr_box() -> BipartiteBox {
    xor_box(|a, b| (a & b) ^ 1)
}

/// Product of single-party parts `P_k(o_k | i_k)` in party order.
pub fn product_law(parts: &[&ConditionalPmf]) -> Result<ConditionalPmf> {
    let mut iter = parts.iter();
    let first = iter.next().ok_or_else(|| Error::structural("product of zero parts"))?;
    for p in parts {
        if p.output_axes().len() != 1 || p.input_axes().len() != 1 {
            return Err(Error::structural("each product part must have one output and one input axis"));
        }
    }
    // Give every part distinct axis names before tensoring.
    let rename = |p: &ConditionalPmf, k: usize| p.rename(&[&format!("o{k}")], &[&format!("i{k}")]);
    let mut law = rename(first, 0)?;
    for (k, p) in iter.enumerate() {
        law = law.tensor(&rename(p, k + 1)?)?;
    }
    Ok(law)
}

pub fn make_product_box(parts: &[&ConditionalPmf], structure: PartyStructure) -> Result<AnyBox> {
    if parts.len() != structure.parties() {
        return Err(Error::structural(format!(
            "{} product needs {} parts, got {}",
            structure.as_str(),
            structure.parties(),
            parts.len()
        )));
    }
    AnyBox::new(structure, product_law(parts)?)
}

pub fn make_product_mac(parts: [&ConditionalPmf; 3]) -> Result<TripartiteMacBox> {
    TripartiteMacBox::new(product_law(&parts)?)
}

pub fn make_product_bc(parts: [&ConditionalPmf; 3]) -> Result<TripartiteBcBox> {
    TripartiteBcBox::new(product_law(&parts)?)
}

/// Uniform single-party part `P(o | i) = 1/|O|`.
pub fn uniform_part(outputs: usize, inputs: usize) -> ConditionalPmf {
    ConditionalPmf::uniform(vec![Alphabet::new("o", outputs)], vec![Alphabet::new("i", inputs)])
}

/// Deterministic single-party part `o = map[i]`.
pub fn deterministic_part(outputs: usize, map: &[usize]) -> Result<ConditionalPmf> {
    ConditionalPmf::deterministic(vec![Alphabet::new("o", outputs)], vec![Alphabet::new("i", map.len())], |i| {
        vec![map[i[0]]]
    })
}

/// A deterministic local box of the given shape with `o_k = maps[k][i_k]`.
pub fn local_deterministic(shape: &BoxShape, maps: &[Vec<usize>]) -> Result<ConditionalPmf> {
    if maps.len() != shape.structure.parties() {
        return Err(Error::structural("one map per party required"));
    }
    for (k, m) in maps.iter().enumerate() {
        if m.len() != shape.inputs[k] || m.iter().any(|&o| o >= shape.outputs[k]) {
            return Err(Error::structural(format!("map for party {k} does not fit the shape")));
        }
    }
    ConditionalPmf::deterministic(shape.output_axes(), shape.input_axes(), |i| {
        maps.iter().zip(i).map(|(m, &ik)| m[ik]).collect()
    })
}

/// Uniform product box of the given shape.
pub fn uniform_box(shape: &BoxShape) -> ConditionalPmf {
    ConditionalPmf::uniform(shape.output_axes(), shape.input_axes())
}

/// `x1 = i1`, `x2 = i2`, `j = y` with `|J| = |Y| = y_size`.
pub fn identity_mac_box(y_size: usize) -> TripartiteMacBox {
    let shape =
        BoxShape::new(PartyStructure::TripartiteMac, vec![2, 2, y_size], vec![2, 2, y_size]).expect("valid shape");
    TripartiteMacBox::new(local_deterministic(&shape, &[vec![0, 1], vec![0, 1], (0..y_size).collect()]).unwrap())
        .expect("canonical shape")
}

/// `x = i`, `j1 = y1`, `j2 = y2` over binary alphabets.
pub fn identity_bc_box() -> TripartiteBcBox {
    let shape = BoxShape::binary_bc();
    TripartiteBcBox::new(local_deterministic(&shape, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap())
        .expect("canonical shape")
}

/// Senders share `senders`; the receiver applies `bob_decoder(j | y)` independently.
pub fn lift_sender_box_mac(senders: &BipartiteBox, bob_decoder: &ConditionalPmf) -> Result<TripartiteMacBox> {
    if bob_decoder.output_axes().len() != 1 || bob_decoder.input_axes().len() != 1 {
        return Err(Error::structural("receiver decoder must map one axis Y to one axis J"));
    }
    let report = check_bipartite_ns(senders);
    if !report.passed {
        return Err(Error::domain(format!(
            "sender box is signaling (violates {})",
            report.violated_families().join(", ")
        )));
    }
    let dec = bob_decoder.rename(&["J"], &["Y"])?;
    TripartiteMacBox::new(senders.law().tensor(&dec)?)
}

/// Decoder `j = y`.
pub fn identity_decoder(y_size: usize) -> ConditionalPmf {
    ConditionalPmf::deterministic(vec![Alphabet::new("J", y_size)], vec![Alphabet::new("Y", y_size)], |y| y.to_vec())
        .expect("identity is deterministic")
}

/// Decoder `j = 0` on a binary `J`.
pub fn constant_decoder(y_size: usize) -> ConditionalPmf {
    ConditionalPmf::deterministic(vec![Alphabet::binary("J")], vec![Alphabet::new("Y", y_size)], |_| vec![0])
        .expect("constant is deterministic")
}

/// Signaling vertex: party `l` outputs `i_k mod |O_l|`, every other output is 0.
/// It violates exactly family `k` whenever `|I_k|, |O_l| >= 2`.
pub fn copy_box(shape: &BoxShape, k: usize, l: usize) -> Result<ConditionalPmf> {
    let n = shape.structure.parties();
    if k >= n || l >= n || k == l {
        return Err(Error::structural(format!("copy box needs distinct parties below {n}")));
    }
    let ol = shape.outputs[l];
    ConditionalPmf::deterministic(shape.output_axes(), shape.input_axes(), |i| {
        (0..n).map(|m| if m == l { i[k] % ol } else { 0 }).collect()
    })
}
