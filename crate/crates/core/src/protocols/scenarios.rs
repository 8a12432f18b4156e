use serde::Serialize;

use super::model::{ErasureTransfer, FilePair, Party, ProtocolScenario, ScenarioBuilder, VarId};
use crate::channel::{binary_adder_mac, erasure_channel, weighted_adder_mac, Channel};
use crate::compose::compose_mac;
use crate::error::{Error, Result};
use crate::ns_box::{
    identity_mac_box, lift_sender_box_mac, local_deterministic, make_pr_box, BipartiteBox, BoxShape, PartyStructure,
    TripartiteMacBox,
};
use crate::prob::{tuples, Alphabet, ConditionalPmf};

/// A public symbol computed by one party from its own view.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub from: Party,
    pub reads: Vec<String>,
    pub table: Vec<usize>,
    /// Alphabet size; defaults to one more than the largest table entry.
    pub size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DecoderSpec {
    MaximumLikelihood,
    /// Receiver map from `reads` to the flat index of `(estimate 1, estimate 2)`.
    Table {
        reads: Vec<String>,
        table: Vec<usize>,
    },
}

/// Two senders, one receiver, one box use and one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct MacScenario {
    pub k: [u32; 2],
    /// Encoder truth tables over `(m_i0, m_i1)`, indexed `m_i0 * 2^k_i + m_i1`.
    pub encoders: [Vec<usize>; 2],
    pub mac_box: TripartiteMacBox,
    pub channel: Channel,
    pub transcript: Vec<TranscriptEntry>,
    pub decoder: DecoderSpec,
}

const MAX_BITS: u32 = 2;

/// Split a MAC box into its causal halves: the sender kernel `P(x1, x2 | i1, i2)`
/// and the receiver decoding law `P(j | i1, i2, y, x1, x2)`. The decoding law is
/// uniform wherever the sender outputs have probability zero.
pub fn causal_split(b: &TripartiteMacBox) -> Result<(ConditionalPmf, ConditionalPmf)> {
    let law = b.law();
    let axes = law.output_axes();
    let ins = law.input_axes();
    let nj = axes[2].size;
    let sender_at =
        |x: &[usize], i: &[usize]| -> f64 { (0..nj).map(|j| law.get(&[x[0], x[1], j], &[i[0], i[1], 0])).sum() };
    let sender = ConditionalPmf::from_fn(axes[..2].to_vec(), ins[..2].to_vec(), |x, i| sender_at(x, i))?;
    let dec_inputs = vec![ins[0].clone(), ins[1].clone(), ins[2].clone(), axes[0].clone(), axes[1].clone()];
    let decoder = ConditionalPmf::from_fn(vec![axes[2].clone()], dec_inputs, |j, t| {
        let m = sender_at(&t[3..], &t[..2]);
        if m <= law.tolerance() {
            1.0 / nj as f64
        } else {
            law.get(&[t[3], t[4], j[0]], &t[..3]) / m
        }
    })?;
    Ok((sender, decoder))
}

fn file_size(k: u32) -> Result<usize> {
    if k == 0 {
        return Err(Error::validation("message length must be at least 1 bit"));
    }
    if k > MAX_BITS {
        return Err(Error::resource(format!("messages longer than {MAX_BITS} bits are not enumerated")));
    }
    Ok(1 << k)
}

pub fn mac_scenario(name: &str, setup: &MacScenario) -> Result<ProtocolScenario> {
    // shape and non-signaling validation
    compose_mac(&setup.mac_box, &setup.channel)?;
    let law = setup.mac_box.law();
    let mut b = ScenarioBuilder::new(name);
    let sizes = [file_size(setup.k[0])?, file_size(setup.k[1])?];
    let mut files: Vec<[VarId; 2]> = Vec::new();
    for s in 0..2 {
        let f0 = b.var(format!("m{}0", s + 1), sizes[s], Party::Sender(s))?;
        let f1 = b.var(format!("m{}1", s + 1), sizes[s], Party::Sender(s))?;
        b.uniform(&[f0, f1]);
        files.push([f0, f1]);
    }
    let z: Vec<VarId> = (0..2).map(|s| b.var(format!("z{}", s + 1), 2, Party::Receiver(0))).collect::<Result<_>>()?;
    b.uniform(&z);
    let i_sizes = [law.input_axes()[0].size, law.input_axes()[1].size];
    let mut inputs = Vec::new();
    for s in 0..2 {
        let table = &setup.encoders[s];
        if table.len() != sizes[s] * sizes[s] {
            return Err(Error::validation(format!(
                "encoder {} needs {} entries, has {}",
                s + 1,
                sizes[s] * sizes[s],
                table.len()
            )));
        }
        let i = b.var(format!("i{}", s + 1), i_sizes[s], Party::Sender(s))?;
        b.function_table(Party::Sender(s), i, &files[s], table.clone());
        inputs.push(i);
    }
    let (sender_kernel, decoding) = causal_split(&setup.mac_box)?;
    let out = law.output_axes();
    let x1 = b.var("x1", out[0].size, Party::Sender(0))?;
    let x2 = b.var("x2", out[1].size, Party::Sender(1))?;
    b.kernel(&[x1, x2], &inputs, sender_kernel);
    let y = b.var("y", law.input_axes()[2].size, Party::Receiver(0))?;
    b.kernel(&[y], &[x1, x2], setup.channel.law().clone());
    let j = b.var("j", out[2].size, Party::Receiver(0))?;
    b.kernel(&[j], &[inputs[0], inputs[1], y, x1, x2], decoding);
    for (n, entry) in setup.transcript.iter().enumerate() {
        let size = entry.size.unwrap_or_else(|| entry.table.iter().max().map_or(1, |m| m + 1));
        let reads: Vec<VarId> = entry.reads.iter().map(|r| b.lookup(r)).collect::<Result<_>>()?;
        let c = b.var(format!("c{n}"), size, Party::Public)?;
        b.function_table(entry.from, c, &reads, entry.table.clone());
    }
    let estimates: [Option<VarId>; 2] = match &setup.decoder {
        DecoderSpec::MaximumLikelihood => [None, None],
        DecoderSpec::Table { reads, table } => {
            let reads: Vec<VarId> = reads.iter().map(|r| b.lookup(r)).collect::<Result<_>>()?;
            if let Some(bad) = table.iter().find(|&&t| t >= sizes[0] * sizes[1]) {
                return Err(Error::validation(format!("decoder emits out-of-range estimate {bad}")));
            }
            let e1 = b.var("est1", sizes[0], Party::Receiver(0))?;
            let e2 = b.var("est2", sizes[1], Party::Receiver(0))?;
            b.function_table(Party::Receiver(0), e1, &reads, table.iter().map(|t| t / sizes[1]).collect());
            b.function_table(Party::Receiver(0), e2, &reads, table.iter().map(|t| t % sizes[1]).collect());
            [Some(e1), Some(e2)]
        }
    };
    for s in 0..2 {
        b.pair(FilePair {
            sender: s,
            files: files[s],
            choice: z[s],
            receiver: 0,
            bits: setup.k[s],
            estimate: estimates[s],
        });
    }
    b.build()
}

/// MAC scenario whose box is a sender-shared bipartite box lifted with an
/// independent receiver decoder.
pub fn bipartite_sender_scenario(
    senders: &BipartiteBox,
    decoder: &ConditionalPmf,
    channel: &Channel,
    encoders: [Vec<usize>; 2],
    transcript: Vec<TranscriptEntry>,
    k: [u32; 2],
) -> Result<ProtocolScenario> {
    let lifted = lift_sender_box_mac(senders, decoder)?;
    mac_scenario(
        "bipartite_senders",
        &MacScenario {
            k,
            encoders,
            mac_box: lifted,
            channel: channel.clone(),
            transcript,
            decoder: DecoderSpec::MaximumLikelihood,
        },
    )
}

/// Encoder table `f(m0, m1)` over `k`-bit files.
pub fn encoder_table(k: u32, f: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let n = 1usize << k;
    tuples(&[n, n]).map(|m| f(m[0], m[1])).collect()
}

/// One PR box use: the sender inputs `m0 ^ m1` and announces `m0 ^ x1`; the
/// receiver inputs `z` and outputs `c ^ x2`.
pub fn pr_ot_scenario() -> ProtocolScenario {
    let build = || -> Result<ProtocolScenario> {
        let mut b = ScenarioBuilder::new("pr_ot");
        let alice = Party::Sender(0);
        let bob = Party::Receiver(0);
        let m0 = b.var("m0", 2, alice)?;
        let m1 = b.var("m1", 2, alice)?;
        b.uniform(&[m0, m1]);
        let z = b.var("z", 2, bob)?;
        b.uniform(&[z]);
        let i1 = b.var("i1", 2, alice)?;
        b.function(alice, i1, &[m0, m1], |m| m[0] ^ m[1]);
        let x1 = b.var("x1", 2, alice)?;
        let x2 = b.var("x2", 2, bob)?;
        b.kernel(&[x1, x2], &[i1, z], make_pr_box().into_law());
        let c = b.var("c", 2, Party::Public)?;
        b.function(alice, c, &[m0, x1], |t| t[0] ^ t[1]);
        let out = b.var("out", 2, bob)?;
        b.function(bob, out, &[c, x2], |t| t[0] ^ t[1]);
        b.pair(FilePair { sender: 0, files: [m0, m1], choice: z, receiver: 0, bits: 1, estimate: Some(out) });
        b.build()
    };
    build().expect("builtin scenario is valid")
}

/// One bit through an erasure channel with erasure probability one half.
pub fn rabin_ot_scenario() -> ProtocolScenario {
    let build = || -> Result<ProtocolScenario> {
        let mut b = ScenarioBuilder::new("rabin_ot");
        let m = b.var("m", 2, Party::Sender(0))?;
        b.uniform(&[m]);
        let y = b.var("y", 3, Party::Receiver(0))?;
        b.kernel(&[y], &[m], erasure_channel(0.5)?.law().clone());
        let flag = b.var("erased", 2, Party::Hidden)?;
        b.function(Party::Hidden, flag, &[y], |t| usize::from(t[0] == 2));
        b.erasure(ErasureTransfer { sender: 0, message: m, output: y, flag });
        b.build()
    };
    build().expect("builtin scenario is valid")
}

fn bob_scenario(name: &str, leaky: bool) -> ProtocolScenario {
    let parity = |s: usize| TranscriptEntry {
        from: Party::Sender(s),
        reads: vec![format!("m{}0", s + 1), format!("m{}1", s + 1)],
        table: vec![0, 1, 1, 0],
        size: Some(2),
    };
    let mut transcript = vec![parity(0), parity(1)];
    if leaky {
        transcript.push(TranscriptEntry {
            from: Party::Receiver(0),
            reads: vec!["z1".into()],
            table: vec![0, 1],
            size: Some(2),
        });
    }
    let setup = MacScenario {
        k: [1, 1],
        encoders: [encoder_table(1, |m0, _| m0), encoder_table(1, |m0, _| m0)],
        mac_box: identity_mac_box(3),
        channel: binary_adder_mac(),
        transcript,
        decoder: DecoderSpec::MaximumLikelihood,
    };
    mac_scenario(name, &setup).expect("builtin scenario is valid")
}

/// Every public symbol is computed by a sender from its own variables.
pub fn bob_clean_scenario() -> ProtocolScenario {
    bob_scenario("bob_clean", false)
}

/// As [`bob_clean_scenario`], but the receiver also broadcasts `z1`.
pub fn bob_leaky_scenario() -> ProtocolScenario {
    bob_scenario("bob_leaky", true)
}

/// Local identity box with both files as the encoder input, over a
/// collision-free adder `y = x1 + 4 x2`, so the receiver sees every file.
pub fn plaintext_adder_scenario() -> ProtocolScenario {
    let shape = BoxShape::new(PartyStructure::TripartiteMac, vec![4, 4, 1], vec![4, 4, 16]).expect("valid shape");
    let law = local_deterministic(&shape, &[vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![0; 16]]).expect("fits shape");
    let setup = MacScenario {
        k: [1, 1],
        encoders: [encoder_table(1, |a, b| 2 * a + b), encoder_table(1, |a, b| 2 * a + b)],
        mac_box: TripartiteMacBox::new(law).expect("canonical"),
        channel: weighted_adder_mac(4, 4, 4).expect("valid adder"),
        transcript: vec![],
        decoder: DecoderSpec::MaximumLikelihood,
    };
    mac_scenario("plaintext_adder", &setup).expect("builtin scenario is valid")
}

/// A single transfer where nothing is communicated and the receiver always
/// outputs file value 0.
pub fn null_scenario(k: u32) -> Result<ProtocolScenario> {
    let n = file_size(k)?;
    let mut b = ScenarioBuilder::new("null");
    let m0 = b.var("m0", n, Party::Sender(0))?;
    let m1 = b.var("m1", n, Party::Sender(0))?;
    b.uniform(&[m0, m1]);
    let z = b.var("z", 2, Party::Receiver(0))?;
    b.uniform(&[z]);
    let c = b.var("c", 1, Party::Public)?;
    b.function(Party::Sender(0), c, &[], |_| 0);
    let out = b.var("out", n, Party::Receiver(0))?;
    b.function(Party::Receiver(0), out, &[], |_| 0);
    b.pair(FilePair { sender: 0, files: [m0, m1], choice: z, receiver: 0, bits: k, estimate: Some(out) });
    b.build()
}

/// Receiver maps `j = y` and `j = 0`, by name.
pub fn named_decoder(name: &str, y_size: usize) -> Result<ConditionalPmf> {
    let outputs = |n| vec![Alphabet::new("J", n)];
    let inputs = vec![Alphabet::new("Y", y_size)];
    match name {
        "identity" => ConditionalPmf::deterministic(outputs(y_size), inputs, |y| y.to_vec()),
        "constant" => ConditionalPmf::deterministic(outputs(1), inputs, |_| vec![0]),
        other => Err(Error::validation(format!("unknown receiver decoder {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{constant_channel, identity_channel};
    use crate::ns_box::{constant_decoder, identity_decoder, make_product_box};
    use crate::protocols::{alice_view_invariance, enumerate, evaluate_rabin, evaluate_scenario};

    #[test]
    fn pr_ot_is_perfect() {
        let s = pr_ot_scenario();
        let e = evaluate_scenario(&s).unwrap();
        assert_eq!(e.correctness_error, 0.0);
        assert!(e.sfa_leakage_bits <= 1e-12 && e.sfb_leakage_bits <= 1e-12);
        assert_eq!(e.perfect, crate::protocols::PerfectFlags { correctness: true, sfa: true, sfb: true });
    }

    #[test]
    fn pr_ot_outputs_the_chosen_file_on_every_path() {
        let s = pr_ot_scenario();
        let (m0, m1, z, out) = (s.var("m0").unwrap(), s.var("m1").unwrap(), s.var("z").unwrap(), s.var("out").unwrap());
        let paths = enumerate(&s).unwrap().paths;
        assert_eq!(paths.len(), 16);
        for (a, _) in &paths {
            assert_eq!(a[out], if a[z] == 0 { a[m0] } else { a[m1] });
        }
        // (m0, m1, z) = (1, 0, 1) yields 0 for both box outcomes
        let hits: Vec<_> = paths.iter().filter(|(a, _)| a[m0] == 1 && a[m1] == 0 && a[z] == 1).collect();
        assert_eq!(hits.len(), 2);
        assert!(hits.iter().all(|(a, _)| a[out] == 0));
    }

    #[test]
    fn rabin_receives_half_the_time() {
        let r = evaluate_rabin(&rabin_ot_scenario()).unwrap();
        assert_eq!(r.receive_probability, 0.5);
        assert_eq!(r.sender_erasure_leakage_bits, 0.0);
        assert_eq!(r.decode_error_given_receipt, 0.0);
        assert!(evaluate_scenario(&rabin_ot_scenario()).is_err());
    }

    #[test]
    fn plaintext_adder_is_correct_but_leaks() {
        let e = evaluate_scenario(&plaintext_adder_scenario()).unwrap();
        assert!(e.correctness_error.abs() < 1e-12);
        assert!((e.sfa_leakage_bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn null_protocol() {
        for k in 1..=2 {
            let e = evaluate_scenario(&null_scenario(k).unwrap()).unwrap();
            assert!((e.correctness_error - (1.0 - 0.5f64.powi(k as i32))).abs() < 1e-12);
            assert_eq!(e.sfa_leakage_bits, 0.0);
            assert_eq!(e.sfb_leakage_bits, 0.0);
        }
    }

    #[test]
    fn bob_security_dichotomy() {
        for inv in alice_view_invariance(&bob_clean_scenario()).unwrap() {
            assert_eq!(inv.max_tv, 0.0);
        }
        let leaky = alice_view_invariance(&bob_leaky_scenario()).unwrap();
        assert!(leaky.iter().all(|inv| inv.max_tv == 1.0));
        assert!(alice_view_invariance(&pr_ot_scenario()).unwrap().iter().all(|i| i.max_tv < 1e-12));
    }

    #[test]
    fn bipartite_sender_configurations() {
        let adder = binary_adder_mac();
        let constant = |_: usize, _: usize| 0;
        let s = bipartite_sender_scenario(
            &make_pr_box(),
            &constant_decoder(3),
            &adder,
            [encoder_table(1, constant), encoder_table(1, constant)],
            vec![],
            [1, 1],
        )
        .unwrap();
        assert_eq!(evaluate_scenario(&s).unwrap().sfa_leakage_bits, 0.0);

        let plain = |m0: usize, _: usize| m0;
        let s = bipartite_sender_scenario(
            &make_pr_box(),
            &identity_decoder(3),
            &adder,
            [encoder_table(1, plain), encoder_table(1, plain)],
            vec![],
            [1, 1],
        )
        .unwrap();
        assert!(evaluate_scenario(&s).unwrap().sfa_leakage_bits > 1e-3);
    }

    #[test]
    fn local_senders_match_the_unassisted_baseline() {
        let id = crate::ns_box::deterministic_part(2, &[0, 1]).unwrap();
        let senders = match make_product_box(&[&id, &id], PartyStructure::Bipartite).unwrap() {
            crate::ns_box::AnyBox::Bipartite(b) => b,
            _ => unreachable!(),
        };
        let enc = || [encoder_table(1, |a, _| a), encoder_table(1, |_, b| b)];
        let assisted =
            bipartite_sender_scenario(&senders, &identity_decoder(3), &binary_adder_mac(), enc(), vec![], [1, 1])
                .unwrap();
        let baseline =
            bipartite_sender_scenario(&senders, &constant_decoder(3), &binary_adder_mac(), enc(), vec![], [1, 1])
                .unwrap();
        let (a, b) = (evaluate_scenario(&assisted).unwrap(), evaluate_scenario(&baseline).unwrap());
        assert!((a.sfa_leakage_bits - b.sfa_leakage_bits).abs() < 1e-12);
        assert!((a.correctness_error - b.correctness_error).abs() < 1e-12);
    }

    #[test]
    fn transcript_reading_outside_the_view_is_rejected() {
        let setup = MacScenario {
            k: [1, 1],
            encoders: [encoder_table(1, |a, _| a), encoder_table(1, |a, _| a)],
            mac_box: identity_mac_box(3),
            channel: binary_adder_mac(),
            transcript: vec![TranscriptEntry {
                from: Party::Sender(0),
                reads: vec!["z1".into()],
                table: vec![0, 1],
                size: None,
            }],
            decoder: DecoderSpec::MaximumLikelihood,
        };
        assert!(matches!(mac_scenario("bad", &setup), Err(Error::Validation(_))));
        let _ = (identity_channel(2), constant_channel(2));
    }
}
