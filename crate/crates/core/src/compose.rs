//! Boxes composed with channels along the one-way causal chain, receiver
//! views, encoder distinguishability, leakage and amplification curves.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::ns_box::{
    check_ns_law, input_dependence, PartyStructure, TripartiteBcBox, TripartiteMacBox, TrivialityVerdict, Witness,
};
use crate::prob::{
    binary_entropy, format_tuple, mutual_information, tuples, tv_tensorized, tv_vectors, Alphabet, ConditionalPmf,
    JointPmf,
};

/// Which receiver's observations form the view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewKind {
    /// `(Y, J)` for a MAC; `(Y1, Y2, J1, J2)` for a BC.
    Receiver,
    /// `(Y1, J1)` of a BC.
    Receiver1,
    /// `(Y2, J2)` of a BC.
    Receiver2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposedSystem {
    structure: PartyStructure,
    box_law: ConditionalPmf,
    channel: Channel,
    /// One joint per encoder input tuple, in lexicographic input order.
    joints: Vec<(Vec<usize>, JointPmf)>,
}

fn sizes_match(a: &[Alphabet], b: &[Alphabet]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.size == y.size)
}

impl ComposedSystem {
    fn build(structure: PartyStructure, box_law: &ConditionalPmf, channel: &Channel) -> Result<Self> {
        let tol = box_law.tolerance();
        let (n_x, n_enc) = match structure {
            PartyStructure::TripartiteMac => (2, 2),
            PartyStructure::TripartiteBc => (1, 1),
            PartyStructure::Bipartite => return Err(Error::structural("a bipartite box has no receiver")),
        };
        let outs = box_law.output_axes();
        let ins = box_law.input_axes();
        let (x_axes, j_axes) = match structure {
            PartyStructure::TripartiteMac => (&outs[..2], &outs[2..]),
            _ => (&outs[..1], &outs[1..]),
        };
        let y_axes = &ins[n_enc..];
        if !sizes_match(x_axes, channel.law().input_axes()) {
            return Err(Error::structural("box sender outputs do not match the channel inputs"));
        }
        if !sizes_match(y_axes, channel.law().output_axes()) {
            return Err(Error::structural("box receiver inputs do not match the channel outputs"));
        }
        let report = check_ns_law(box_law, structure);
        if !report.passed {
            return Err(Error::domain(format!(
                "box is signaling (violates {})",
                report.violated_families().join(", ")
            )));
        }
        let x_idx: Vec<usize> = (0..n_x).collect();
        let y_idx: Vec<usize> = (n_enc..ins.len()).collect();
        let dep = input_dependence(box_law, &x_idx, &y_idx);
        if dep.gap > tol {
            return Err(Error::domain(format!(
                "sender outputs depend on the channel output (gap {} between inputs {} and {})",
                dep.gap,
                format_tuple(&dep.inputs_a),
                format_tuple(&dep.inputs_b)
            )));
        }

        let x_sizes: Vec<usize> = x_axes.iter().map(|a| a.size).collect();
        let y_sizes: Vec<usize> = y_axes.iter().map(|a| a.size).collect();
        let j_sizes: Vec<usize> = j_axes.iter().map(|a| a.size).collect();
        let enc_sizes: Vec<usize> = ins[..n_enc].iter().map(|a| a.size).collect();
        let axes: Vec<Alphabet> = x_axes.iter().chain(channel.law().output_axes()).chain(j_axes).cloned().collect();
        let mut joints = Vec::new();
        for enc in tuples(&enc_sizes) {
            let mut values = Vec::new();
            for x in tuples(&x_sizes) {
                for y in tuples(&y_sizes) {
                    let w = channel.get(&y, &x);
                    let box_in: Vec<usize> = enc.iter().chain(&y).copied().collect();
                    for j in tuples(&j_sizes) {
                        let box_out: Vec<usize> = x.iter().chain(&j).copied().collect();
                        values.push(box_law.get(&box_out, &box_in) * w);
                    }
                }
            }
            let mass: f64 = values.iter().sum();
            if (mass - 1.0).abs() > tol {
                return Err(Error::domain(format!(
                    "composed mass {mass} at encoder input {} breaks the causal chain",
                    format_tuple(&enc)
                )));
            }
            joints.push((enc, JointPmf::from_parts_unchecked(axes.clone(), values, tol)));
        }
        Ok(ComposedSystem { structure, box_law: box_law.clone(), channel: channel.clone(), joints })
    }

    pub fn structure(&self) -> PartyStructure {
        self.structure
    }

    pub fn box_law(&self) -> &ConditionalPmf {
        &self.box_law
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn tolerance(&self) -> f64 {
        self.box_law.tolerance()
    }

    /// Encoder input axes: `(I1, I2)` or `(I)`.
    pub fn encoder_axes(&self) -> Vec<Alphabet> {
        let n = if self.structure == PartyStructure::TripartiteMac { 2 } else { 1 };
        self.box_law.input_axes()[..n].to_vec()
    }

    /// Per encoder input, the joint over `(X1, X2, Y, J)` or `(X, Y1, Y2, J1, J2)`.
    pub fn joints(&self) -> &[(Vec<usize>, JointPmf)] {
        &self.joints
    }

    pub fn joint(&self, encoder_inputs: &[usize]) -> Result<&JointPmf> {
        self.joints
            .iter()
            .find(|(e, _)| e == encoder_inputs)
            .map(|(_, j)| j)
            .ok_or_else(|| Error::structural(format!("no encoder input {}", format_tuple(encoder_inputs))))
    }

    pub fn view_axes(&self, view: ViewKind) -> Result<&'static [&'static str]> {
        match (self.structure, view) {
            (PartyStructure::TripartiteMac, ViewKind::Receiver) => Ok(&["Y", "J"]),
            (PartyStructure::TripartiteBc, ViewKind::Receiver) => Ok(&["Y1", "Y2", "J1", "J2"]),
            (PartyStructure::TripartiteBc, ViewKind::Receiver1) => Ok(&["Y1", "J1"]),
            (PartyStructure::TripartiteBc, ViewKind::Receiver2) => Ok(&["Y2", "J2"]),
            _ => Err(Error::structural(format!("view {view:?} does not exist for this system"))),
        }
    }

    /// Receiver view distribution for every encoder input.
    pub fn views(&self, view: ViewKind) -> Result<Vec<(Vec<usize>, JointPmf)>> {
        let keep = self.view_axes(view)?;
        // view axes appear in the joint as (Y.., J..), which is also the view order
        self.joints.iter().map(|(e, j)| Ok((e.clone(), j.marginalize(keep)?))).collect()
    }

    /// `P(j | inputs, y, x) = P(x, j | inputs, y) / P(x | inputs)`.
    pub fn decoding_law(&self, encoder_inputs: &[usize], y: &[usize], x: &[usize]) -> Result<JointPmf> {
        let n_x = x.len();
        let box_in: Vec<usize> = encoder_inputs.iter().chain(y).copied().collect();
        let expected_x = if self.structure == PartyStructure::TripartiteMac { 2 } else { 1 };
        if n_x != expected_x || box_in.len() != self.box_law.input_axes().len() {
            return Err(Error::structural("decoding point does not match the box axes"));
        }
        let j_axes = self.box_law.output_axes()[n_x..].to_vec();
        let j_sizes: Vec<usize> = j_axes.iter().map(|a| a.size).collect();
        let entries: Vec<f64> = tuples(&j_sizes)
            .map(|j| {
                let out: Vec<usize> = x.iter().chain(&j).copied().collect();
                self.box_law.get(&out, &box_in)
            })
            .collect();
        let sender: f64 = entries.iter().sum();
        if sender <= self.tolerance() {
            return Err(Error::NullEvent {
                event: format!("sender outputs {} at encoder inputs {}", format_tuple(x), format_tuple(encoder_inputs)),
                mass: sender,
            });
        }
        Ok(JointPmf::from_parts_unchecked(j_axes, entries.iter().map(|e| e / sender).collect(), self.tolerance()))
    }

    /// Sender-output marginal `P(x | inputs)`, read at the first channel output.
    pub fn sender_marginal(&self, encoder_inputs: &[usize], x: &[usize]) -> f64 {
        let y0 = vec![0; self.channel.law().output_axes().len()];
        let box_in: Vec<usize> = encoder_inputs.iter().chain(&y0).copied().collect();
        let j_sizes: Vec<usize> = self.box_law.output_axes()[x.len()..].iter().map(|a| a.size).collect();
        tuples(&j_sizes)
            .map(|j| {
                let out: Vec<usize> = x.iter().chain(&j).copied().collect();
                self.box_law.get(&out, &box_in)
            })
            .sum()
    }
}

pub fn compose_mac(b: &TripartiteMacBox, w: &Channel) -> Result<ComposedSystem> {
    if w.kind() != ChannelKind::Mac {
        return Err(Error::structural("a MAC box needs a multiple-access channel"));
    }
    ComposedSystem::build(PartyStructure::TripartiteMac, b.law(), w)
}

pub fn compose_bc(b: &TripartiteBcBox, w: &Channel) -> Result<ComposedSystem> {
    if w.kind() != ChannelKind::Bc {
        return Err(Error::structural("a BC box needs a broadcast channel"));
    }
    ComposedSystem::build(PartyStructure::TripartiteBc, b.law(), w)
}

/// `(i1, i2) -> P(y, j)` for a composed MAC system.
pub fn bob_view_mac(sys: &ComposedSystem) -> Result<BTreeMap<Vec<usize>, JointPmf>> {
    Ok(sys.views(ViewKind::Receiver)?.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTv {
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub epsilon: f64,
    pub argmax_pair: (Vec<usize>, Vec<usize>),
    pub per_pair: Vec<PairTv>,
    pub universal_secrecy: bool,
}

pub fn encoder_secrecy_violation(sys: &ComposedSystem) -> Result<LeakageReport> {
    encoder_secrecy_violation_for(sys, ViewKind::Receiver)
}

/// Total variation between receiver views for every unordered pair of
/// distinct encoder inputs.
pub fn encoder_secrecy_violation_for(sys: &ComposedSystem, view: ViewKind) -> Result<LeakageReport> {
    let views = sys.views(view)?;
    let mut per_pair = Vec::new();
    for (a, (ea, va)) in views.iter().enumerate() {
        for (eb, vb) in views.iter().skip(a + 1).map(|(e, v)| (e, v)) {
            per_pair.push(PairTv {
                inputs_a: ea.clone(),
                inputs_b: eb.clone(),
                tv: tv_vectors(va.values(), vb.values()).min(1.0),
            });
        }
    }
    let mut epsilon = 0.0;
    let mut argmax_pair = (views[0].0.clone(), views[0].0.clone());
    for p in &per_pair {
        if p.tv > epsilon {
            epsilon = p.tv;
            argmax_pair = (p.inputs_a.clone(), p.inputs_b.clone());
        }
    }
    Ok(LeakageReport { epsilon, argmax_pair, per_pair, universal_secrecy: epsilon <= sys.tolerance() })
}

/// Resource-level classification: the composed receiver view `P(y, j | inputs)`
/// either depends on the encoder inputs or it does not. The value is
/// `I(inputs ; view)` under `input_dist`.
pub fn classify_resource(sys: &ComposedSystem, input_dist: &JointPmf) -> Result<TrivialityVerdict> {
    let enc_axes = sys.encoder_axes();
    let names: Vec<&str> = input_dist.axes().iter().map(|a| a.name.as_str()).collect();
    let expected: Vec<&str> = enc_axes.iter().map(|a| a.name.as_str()).collect();
    if names != expected || !sizes_match(input_dist.axes(), &enc_axes) {
        return Err(Error::structural(format!("input distribution axes {names:?} do not match {expected:?}")));
    }
    if input_dist.values().iter().any(|&v| v <= sys.tolerance()) {
        return Err(Error::domain("input distribution lacks full support"));
    }
    let views = sys.views(ViewKind::Receiver)?;
    let view_axes = views[0].1.axes().to_vec();
    let view_len = views[0].1.values().len();
    let mut values = Vec::with_capacity(views.len() * view_len);
    for (e, v) in &views {
        let pe = input_dist.get(e);
        values.extend(v.values().iter().map(|x| pe * x));
    }
    let axes: Vec<Alphabet> = enc_axes.iter().chain(&view_axes).cloned().collect();
    let joint = JointPmf::from_parts_unchecked(axes, values, sys.tolerance());
    let view_names: Vec<&str> = view_axes.iter().map(|a| a.name.as_str()).collect();
    let mi = mutual_information(&joint, &expected, &view_names, &[])?;
    let trivial = mi <= sys.tolerance();
    let witness = if trivial {
        None
    } else {
        let mut best: Option<Witness> = None;
        for (a, (ea, va)) in views.iter().enumerate() {
            for (eb, vb) in views.iter().skip(a + 1).map(|(e, v)| (e, v)) {
                for (o, (pa, pb)) in tuples(&va.sizes()).zip(va.values().iter().zip(vb.values())) {
                    let gap = (pa - pb).abs();
                    if best.as_ref().is_none_or(|w| gap > w.gap) {
                        best = Some(Witness { inputs_a: ea.clone(), inputs_b: eb.clone(), outputs: o, gap });
                    }
                }
            }
        }
        best
    };
    Ok(TrivialityVerdict { trivial, mi_value: mi, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationRow {
    pub n: u32,
    pub tv: f64,
    pub pe: f64,
    pub correct: f64,
    pub mi_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplificationCurve {
    pub epsilon: f64,
    pub rows: Vec<AmplificationRow>,
}

impl AmplificationCurve {
    /// Smallest `n` whose information reaches `bits`.
    pub fn first_n_reaching(&self, bits: f64) -> Option<u32> {
        self.rows.iter().find(|r| r.mi_bits >= bits).map(|r| r.n)
    }
}

/// Closed-form distinguishing curve for `n` independent uses of a kernel
/// whose single-use views differ by `epsilon` in total variation.
pub fn amplification_analysis(epsilon: f64, n_max: u32) -> Result<AmplificationCurve> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain(format!("epsilon {epsilon} outside (0,1]")));
    }
    if n_max == 0 {
        return Err(Error::domain("n_max must be positive"));
    }
    let rows = (1..=n_max)
        .map(|n| {
            let tv = tv_tensorized(epsilon, n);
            let pe = 0.5 * (1.0 - tv);
            let mi = 1.0 - binary_entropy(pe.clamp(0.0, 1.0)).expect("pe in [0, 1/2]");
            AmplificationRow { n, tv, pe, correct: 1.0 - pe, mi_bits: mi }
        })
        .collect();
    Ok(AmplificationCurve { epsilon, rows })
}

/// `ceil(log 0.02 / log(1 - eps)) + 5`.
pub fn amplification_n_bound(epsilon: f64) -> u32 {
    if epsilon >= 1.0 {
        return 5;
    }
    ((0.02f64).ln() / (1.0 - epsilon).ln()).ceil().max(0.0) as u32 + 5
}

/// Deterministic sender encoder `(m_i0, m_i1) -> input`, indexed `m_i0 * |M_i1| + m_i1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairEncoder {
    pub message_sizes: (usize, usize),
    pub table: Vec<usize>,
}

impl PairEncoder {
    pub fn new(message_sizes: (usize, usize), table: Vec<usize>) -> Result<Self> {
        if table.len() != message_sizes.0 * message_sizes.1 {
            return Err(Error::structural(format!(
                "encoder table has {} entries for {} message pairs",
                table.len(),
                message_sizes.0 * message_sizes.1
            )));
        }
        Ok(PairEncoder { message_sizes, table })
    }

    pub fn from_fn(message_sizes: (usize, usize), f: impl Fn(usize, usize) -> usize) -> Self {
        let table = tuples(&[message_sizes.0, message_sizes.1]).map(|m| f(m[0], m[1])).collect();
        PairEncoder { message_sizes, table }
    }

    pub fn encode(&self, m0: usize, m1: usize) -> usize {
        self.table[m0 * self.message_sizes.1 + m1]
    }
}

const MAX_MESSAGE_TUPLES: usize = 16;

/// Exact `I(unselected messages ; receiver view)` for one round.
///
/// `message_dist` has two axes per sender, `(M_i0, M_i1)`, in sender order,
/// and `selection[i]` names the file sender `i`'s receiver wants.
pub fn leakage_mi(
    sys: &ComposedSystem,
    encoders: &[PairEncoder],
    message_dist: &JointPmf,
    selection: &[usize],
) -> Result<f64> {
    let enc_axes = sys.encoder_axes();
    if encoders.len() != enc_axes.len() || selection.len() != enc_axes.len() {
        return Err(Error::structural("one encoder and one selection bit per sender required"));
    }
    let m_sizes = message_dist.sizes();
    if m_sizes.len() != 2 * encoders.len() {
        return Err(Error::structural("message distribution needs two axes per sender"));
    }
    for (k, e) in encoders.iter().enumerate() {
        if (m_sizes[2 * k], m_sizes[2 * k + 1]) != e.message_sizes {
            return Err(Error::structural(format!("encoder {k} message sizes do not match the distribution")));
        }
        if e.message_sizes.0 * e.message_sizes.1 > MAX_MESSAGE_TUPLES {
            return Err(Error::resource(format!("sender {k} has more than {MAX_MESSAGE_TUPLES} message tuples")));
        }
        if e.table.iter().any(|&t| t >= enc_axes[k].size) {
            return Err(Error::structural(format!("encoder {k} emits an out-of-range input")));
        }
        if selection[k] > 1 {
            return Err(Error::structural("selection bits must be 0 or 1"));
        }
    }
    let views: BTreeMap<Vec<usize>, JointPmf> = sys.views(ViewKind::Receiver)?.into_iter().collect();
    let view_axes = views.values().next().expect("at least one input").axes().to_vec();
    let mut values = Vec::new();
    for (flat, m) in tuples(&m_sizes).enumerate() {
        let pm = message_dist.values()[flat];
        let enc: Vec<usize> = encoders.iter().enumerate().map(|(k, e)| e.encode(m[2 * k], m[2 * k + 1])).collect();
        values.extend(views[&enc].values().iter().map(|v| pm * v));
    }
    let axes: Vec<Alphabet> = message_dist.axes().iter().chain(&view_axes).cloned().collect();
    let joint = JointPmf::from_parts_unchecked(axes, values, sys.tolerance());
    let unselected: Vec<&str> =
        selection.iter().enumerate().map(|(k, &z)| message_dist.axes()[2 * k + (1 - z)].name.as_str()).collect();
    let view_names: Vec<&str> = view_axes.iter().map(|a| a.name.as_str()).collect();
    mutual_information(&joint, &unselected, &view_names, &[])
}

/// Axes `M10, M11, M20, M21` (or `M0, M1` for one sender) with the given sizes.
pub fn message_axes(sizes: &[(usize, usize)]) -> Vec<Alphabet> {
    if sizes.len() == 1 {
        return vec![Alphabet::new("M0", sizes[0].0), Alphabet::new("M1", sizes[0].1)];
    }
    sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &(a, b))| [Alphabet::new(format!("M{}0", k + 1), a), Alphabet::new(format!("M{}1", k + 1), b)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::*;
    use crate::ns_box::*;
    use approx::assert_abs_diff_eq;

    fn uniform_x_product() -> TripartiteMacBox {
        let u = uniform_part(2, 2);
        let j = uniform_part(2, 3);
        make_product_mac([&u, &u, &j]).unwrap()
    }

    #[test]
    fn identity_box_is_a_deterministic_chain() {
        let sys = compose_mac(&identity_mac_box(3), &binary_adder_mac()).unwrap();
        let j = sys.joint(&[0, 1]).unwrap();
        assert_eq!(j.get(&[0, 1, 1, 1]), 1.0);
        let views = bob_view_mac(&sys).unwrap();
        assert_eq!(views[&vec![0, 1]].get(&[1, 1]), 1.0);
        let r = encoder_secrecy_violation(&sys).unwrap();
        assert_eq!(r.epsilon, 1.0);
        assert_eq!(r.argmax_pair, (vec![0, 0], vec![0, 1]));
    }

    #[test]
    fn uniform_product_gives_binomial_y() {
        let sys = compose_mac(&uniform_x_product(), &binary_adder_mac()).unwrap();
        for (_, j) in sys.joints() {
            let y = j.marginalize(&["Y"]).unwrap();
            assert_eq!(y.values(), &[0.25, 0.5, 0.25]);
        }
        let r = encoder_secrecy_violation(&sys).unwrap();
        assert!(r.universal_secrecy);
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn pr_lift_on_adder() {
        let lifted = lift_sender_box_mac(&make_pr_box(), &identity_decoder(3)).unwrap();
        let sys = compose_mac(&lifted, &binary_adder_mac()).unwrap();
        let y = |e: &[usize]| sys.joint(e).unwrap().marginalize(&["Y"]).unwrap().values().to_vec();
        // anti-correlated outputs at i1 i2 = 1, correlated otherwise
        assert_eq!(y(&[1, 1]), vec![0.0, 1.0, 0.0]);
        assert_eq!(y(&[0, 0]), vec![0.5, 0.0, 0.5]);
        assert_eq!(encoder_secrecy_violation(&sys).unwrap().epsilon, 1.0);
    }

    #[test]
    fn decoding_law_recomposes() {
        let lifted = lift_sender_box_mac(&make_pr_box(), &identity_decoder(3)).unwrap();
        let sys = compose_mac(&lifted, &binary_adder_mac()).unwrap();
        for t in tuples(&[2, 2, 3, 2, 2]) {
            let (e, y, x) = (&t[..2], &t[2..3], &t[3..]);
            let sender = sys.sender_marginal(e, x);
            match sys.decoding_law(e, y, x) {
                Ok(law) => {
                    assert_eq!(law.get(&[y[0]]), 1.0);
                    for j in 0..3 {
                        let out = [x[0], x[1], j];
                        let inp = [e[0], e[1], y[0]];
                        assert!((law.get(&[j]) * sender - lifted.get(&out, &inp)).abs() < 1e-12);
                    }
                }
                Err(Error::NullEvent { .. }) => assert_eq!(sender, 0.0),
                Err(other) => panic!("{other}"),
            }
        }
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let u = uniform_part(2, 2);
        let b = make_product_mac([&u, &u, &u]).unwrap();
        assert!(matches!(compose_mac(&b, &binary_adder_mac()), Err(Error::Structural(_))));
    }

    #[test]
    fn bc_compositions() {
        let id = product_bc(&identity_channel(2), &identity_channel(2)).unwrap();
        let sys = compose_bc(&identity_bc_box(), &id).unwrap();
        assert_eq!(sys.joint(&[1]).unwrap().get(&[1, 1, 1, 1, 1]), 1.0);
        let r1 = encoder_secrecy_violation_for(&sys, ViewKind::Receiver1).unwrap();
        assert_eq!(r1.epsilon, 1.0);

        let u = uniform_part(2, 2);
        let prod =
            make_product_bc([&u, &deterministic_part(2, &[0, 1]).unwrap(), &deterministic_part(2, &[0, 1]).unwrap()])
                .unwrap();
        let bsc = binary_symmetric_channel(0.1).unwrap();
        let sys = compose_bc(&prod, &product_bc(&bsc, &bsc).unwrap()).unwrap();
        let v = sys.views(ViewKind::Receiver1).unwrap();
        assert_eq!(v[0].1, v[1].1);
        assert!(encoder_secrecy_violation(&sys).unwrap().universal_secrecy);
    }

    #[test]
    fn amplification_examples() {
        let c = amplification_analysis(1.0, 1).unwrap();
        assert_eq!(c.rows[0], AmplificationRow { n: 1, tv: 1.0, pe: 0.0, correct: 1.0, mi_bits: 1.0 });
        let c = amplification_analysis(0.5, 2).unwrap();
        assert_abs_diff_eq!(c.rows[1].tv, 0.75);
        assert_abs_diff_eq!(c.rows[1].pe, 0.125);
        assert_abs_diff_eq!(c.rows[1].mi_bits, 0.456435556800403, epsilon = 1e-12);
        assert!(matches!(amplification_analysis(0.0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn amplification_threshold_at_half() {
        let c = amplification_analysis(0.5, 64).unwrap();
        // independent scan of H2(0.5 * 0.5^n) <= 0.01
        let h2 = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let scan = (1..=64).find(|&n| h2(0.5 * 0.5f64.powi(n)) <= 0.01).unwrap() as u32;
        assert_eq!(c.first_n_reaching(0.99), Some(scan));
        assert_eq!(scan, 10);
    }

    #[test]
    fn identity_box_leaks_the_sum_of_unselected_files() {
        let sys = compose_mac(&identity_mac_box(3), &binary_adder_mac()).unwrap();
        let sel = [0, 1];
        let enc: Vec<PairEncoder> =
            sel.iter().map(|&z| PairEncoder::from_fn((2, 2), move |m0, m1| if z == 0 { m1 } else { m0 })).collect();
        let dist = JointPmf::uniform(message_axes(&[(2, 2), (2, 2)]));
        let leak = leakage_mi(&sys, &enc, &dist, &sel).unwrap();
        // Y = m11 + m20 is a binomial(2, 1/2) variable
        assert_abs_diff_eq!(leak, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn trivial_box_leaks_nothing() {
        let sys = compose_mac(&uniform_x_product(), &binary_adder_mac()).unwrap();
        let enc = vec![PairEncoder::from_fn((2, 2), |a, _| a), PairEncoder::from_fn((2, 2), |_, b| b)];
        let dist = JointPmf::uniform(message_axes(&[(2, 2), (2, 2)]));
        assert_eq!(leakage_mi(&sys, &enc, &dist, &[1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn oversized_message_space_is_a_resource_error() {
        let sys = compose_mac(&identity_mac_box(3), &binary_adder_mac()).unwrap();
        let enc = vec![PairEncoder::from_fn((8, 4), |a, _| a % 2), PairEncoder::from_fn((2, 2), |a, _| a)];
        let dist = JointPmf::uniform(message_axes(&[(8, 4), (2, 2)]));
        assert!(matches!(leakage_mi(&sys, &enc, &dist, &[0, 0]), Err(Error::Resource(_))));
    }
}
