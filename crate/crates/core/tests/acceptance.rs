//! Exit criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::time::{Duration, Instant};

use nsot_core::builtins::{builtin_box, builtin_scenario};
use nsot_core::channel::{binary_adder_mac, noisy_adder_mac, Channel};
use nsot_core::compose::{
    amplification_analysis, classify_resource, compose_mac, encoder_secrecy_violation, ComposedSystem,
};
use nsot_core::lp::{local_game_value, ns_game_value, GameSpec};
use nsot_core::ns_box::sampling::BoxSampler;
use nsot_core::ns_box::{
    check_ns_law, check_ns_via_mi_law, copy_box, make_pr_box, make_product_box, uniform_inputs, uniform_part, AnyBox,
    BoxShape, PartyStructure, TripartiteMacBox,
};
use nsot_core::prob::{
    binary_entropy, mutual_information, tv_tensorized, tv_vectors, Alphabet, ConditionalPmf, JointPmf,
};
use nsot_core::protocols::{
    alice_view_invariance, evaluate_rabin, evaluate_scenario, mac_scenario, DecoderSpec, MacScenario,
    SecurityEvaluation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const LP_TOL: f64 = 1e-7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

// ---------------------------------------------------------------- corpora

struct Labeled {
    law: ConditionalPmf,
    structure: PartyStructure,
    planted: Option<usize>,
}

fn shapes() -> Vec<BoxShape> {
    vec![
        BoxShape::binary_bipartite(),
        BoxShape::default_mac(),
        BoxShape::binary_bc(),
        "bipartite:3,2,2,3".parse().unwrap(),
    ]
}

fn verification_corpus() -> Vec<Labeled> {
    let mut out = Vec::new();
    let ns = |law: ConditionalPmf, structure| Labeled { law, structure, planted: None };
    out.push(ns(make_pr_box().into_law(), PartyStructure::Bipartite));
    for shape in shapes() {
        let st = shape.structure;
        let parts: Vec<ConditionalPmf> =
            (0..st.parties()).map(|k| uniform_part(shape.outputs[k], shape.inputs[k])).collect();
        let refs: Vec<&ConditionalPmf> = parts.iter().collect();
        out.push(ns(make_product_box(&refs, st).unwrap().law().clone(), st));
        for k in 0..st.parties() {
            for l in (0..st.parties()).filter(|&l| l != k) {
                out.push(Labeled { law: copy_box(&shape, k, l).unwrap(), structure: st, planted: Some(k) });
            }
        }
        let mut sampler = BoxSampler::new(shape, 1).unwrap();
        for s in sampler.corpus(6, 6) {
            out.push(Labeled { law: s.law, structure: st, planted: s.planted_family });
        }
    }
    out
}

/// Non-signaling MAC boxes with `|Y| = 3`, used with every canonical channel.
fn mac_corpus() -> Vec<TripartiteMacBox> {
    let mut out: Vec<TripartiteMacBox> =
        ["identity_mac", "product_uniform_mac", "pr_lift_identity", "pr_lift_constant"]
            .iter()
            .map(|n| match builtin_box(n).unwrap() {
                AnyBox::Mac(b) => b,
                _ => unreachable!(),
            })
            .collect();
    let mut sampler = BoxSampler::new(BoxShape::default_mac(), 3).unwrap();
    out.extend((0..60).map(|_| TripartiteMacBox::new(sampler.ns_mixture()).unwrap()));
    out
}

fn canonical_channels() -> Vec<(&'static str, Channel)> {
    vec![
        ("adder", binary_adder_mac()),
        ("noisy_adder:0.1", noisy_adder_mac(0.1).unwrap()),
        ("noisy_adder:0.25", noisy_adder_mac(0.25).unwrap()),
    ]
}

// ---------------------------------------------------------------- criteria

fn ns_verification() -> Outcome {
    let corpus = verification_corpus();
    let mut wrong = Vec::new();
    for (n, b) in corpus.iter().enumerate() {
        let r = check_ns_law(&b.law.clone().set_tolerance(TOL), b.structure);
        let expected: Vec<&str> = b.planted.iter().map(|&k| b.structure.prob_constraint_ids()[k]).collect();
        if r.violated_families() != expected {
            wrong.push(n);
        }
    }
    let planted = corpus.iter().filter(|b| b.planted.is_some()).count();
    outcome(
        corpus.len() >= 50 && wrong.is_empty(),
        format!("{} boxes ({planted} signaling), {} misclassified", corpus.len(), wrong.len()),
    )
}

fn formulation_equivalence() -> Outcome {
    let mut sampler = BoxSampler::new(BoxShape::default_mac(), 2).unwrap();
    let corpus = sampler.corpus(200, 100);
    let mut disagree = 0;
    for s in &corpus {
        let law = s.law.clone().set_tolerance(TOL);
        let prob = check_ns_law(&law, PartyStructure::TripartiteMac);
        let mi = check_ns_via_mi_law(&law, PartyStructure::TripartiteMac, &uniform_inputs(&law)).unwrap();
        if prob.passed != mi.passed {
            disagree += 1;
        }
    }
    outcome(disagree == 0, format!("{} sampled boxes, {disagree} disagreements", corpus.len()))
}

fn systems() -> Vec<(String, ComposedSystem)> {
    let mut out = Vec::new();
    for (i, b) in mac_corpus().iter().enumerate() {
        for (name, w) in canonical_channels() {
            out.push((format!("box {i} with {name}"), compose_mac(b, &w).unwrap()));
        }
    }
    out
}

fn secrecy_certificate() -> Outcome {
    let mut disagree = Vec::new();
    let mut trivial = 0;
    let all = systems();
    for (label, sys) in &all {
        let leak = encoder_secrecy_violation(sys).unwrap();
        let verdict = classify_resource(sys, &JointPmf::uniform(sys.encoder_axes())).unwrap();
        if verdict.trivial {
            trivial += 1;
        }
        if (leak.epsilon <= TOL) != verdict.trivial {
            disagree.push(label.clone());
        }
    }
    outcome(disagree.is_empty(), format!("{} systems ({trivial} trivial), {} disagreements", all.len(), disagree.len()))
}

fn product_tv(p: &[f64], q: &[f64], n: u32) -> f64 {
    // independent oracle: explicit product tensors
    let power = |v: &[f64]| {
        let mut out = vec![1.0];
        for _ in 0..n {
            out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        out
    };
    0.5 * power(p).iter().zip(power(q)).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn amplification_certificate() -> Outcome {
    let mut nontrivial = 0;
    let mut zero_eps = 0;
    let mut bound_misses = Vec::new();
    let mut tensor_misses = 0;
    let mut tensor_checks = 0;
    let mut worst_tensor_gap: f64 = 0.0;
    for (_, sys) in systems() {
        let verdict = classify_resource(&sys, &JointPmf::uniform(sys.encoder_axes())).unwrap();
        if verdict.trivial {
            continue;
        }
        nontrivial += 1;
        let leak = encoder_secrecy_violation(&sys).unwrap();
        let eps = leak.epsilon;
        if eps <= TOL {
            zero_eps += 1;
            continue;
        }
        let bound = if eps >= 1.0 { 5 } else { ((0.02f64).ln() / (1.0 - eps).ln()).ceil() as u32 + 5 };
        let curve = amplification_analysis(eps, bound).unwrap();
        if curve.first_n_reaching(0.99).is_none() {
            bound_misses.push(eps);
        }
        let views: std::collections::BTreeMap<_, _> =
            sys.views(nsot_core::compose::ViewKind::Receiver).unwrap().into_iter().collect();
        let (a, b) = &leak.argmax_pair;
        let (p, q) = (views[a].values(), views[b].values());
        for n in 1..=4 {
            tensor_checks += 1;
            let gap = (tv_tensorized(eps, n) - product_tv(p, q, n)).abs();
            worst_tensor_gap = worst_tensor_gap.max(gap);
            if gap > TOL {
                tensor_misses += 1;
            }
        }
    }
    let smallest_miss = bound_misses.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        nontrivial > 0 && zero_eps == 0 && bound_misses.is_empty() && tensor_misses == 0,
        format!(
            "{nontrivial} nontrivial systems; epsilon>tol: {}; n-bound misses: {} (smallest eps {}); tensorization: {tensor_misses}/{tensor_checks} off by >1e-9 (worst {worst_tensor_gap:.3e})",
            nontrivial - zero_eps,
            bound_misses.len(),
            if bound_misses.is_empty() { "-".to_string() } else { format!("{smallest_miss:.4}") },
        ),
    )
}

fn hypothesis_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut misses = 0;
    let mut worst: f64 = 0.0;
    let n_instances = 100;
    for _ in 0..n_instances {
        let k = rng.gen_range(2..=4);
        let draw = |rng: &mut ChaCha8Rng| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect::<Vec<f64>>()
        };
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        let joint = JointPmf::from_fn(vec![Alphabet::binary("B"), Alphabet::new("V", k)], |t| {
            0.5 * if t[0] == 0 { p[t[1]] } else { q[t[1]] }
        })
        .unwrap();
        let direct = mutual_information(&joint, &["B"], &["V"], &[]).unwrap();
        let formula = 1.0 - binary_entropy(0.5 * (1.0 - tv_vectors(&p, &q))).unwrap();
        let gap = (direct - formula).abs();
        worst = worst.max(gap);
        if gap > TOL {
            misses += 1;
        }
    }
    outcome(misses == 0, format!("{n_instances} instances, {misses} off by >1e-9 (worst {worst:.3e})"))
}

fn perfect(e: &SecurityEvaluation) -> bool {
    e.correctness_error == 0.0 && e.sfa_leakage_bits == 0.0 && e.sfb_leakage_bits == 0.0
}

fn pr_ot_perfection() -> Outcome {
    let e = evaluate_scenario(&builtin_scenario("pr_ot").unwrap()).unwrap();
    outcome(
        perfect(&e),
        format!("correctness {} sfa {} sfb {}", e.correctness_error, e.sfa_leakage_bits, e.sfb_leakage_bits),
    )
}

fn rabin() -> Outcome {
    let r = evaluate_rabin(&builtin_scenario("rabin_ot").unwrap()).unwrap();
    outcome(
        r.receive_probability == 0.5 && r.sender_erasure_leakage_bits == 0.0,
        format!("receive {} leakage {}", r.receive_probability, r.sender_erasure_leakage_bits),
    )
}

fn bob_dichotomy() -> Outcome {
    let clean = alice_view_invariance(&builtin_scenario("bob_clean").unwrap()).unwrap();
    let leaky = alice_view_invariance(&builtin_scenario("bob_leaky").unwrap()).unwrap();
    let clean_ok = clean.len() == 2 && clean.iter().all(|s| s.max_tv == 0.0);
    let leaky_ok = leaky.iter().any(|s| s.max_tv == 1.0);
    let fmt = |v: &[nsot_core::protocols::SenderInvariance]| {
        v.iter().map(|s| format!("{}", s.max_tv)).collect::<Vec<_>>().join(",")
    };
    outcome(clean_ok && leaky_ok, format!("clean [{}] leaky [{}]", fmt(&clean), fmt(&leaky)))
}

fn chsh_local_oracle() -> f64 {
    let mut best: f64 = 0.0;
    for a in 0..4usize {
        for b in 0..4usize {
            let mut wins = 0.0;
            for i1 in 0..2 {
                for i2 in 0..2 {
                    let (x1, x2) = ((a >> i1) & 1, (b >> i2) & 1);
                    if x1 ^ x2 == i1 & i2 {
                        wins += 0.25;
                    }
                }
            }
            best = best.max(wins);
        }
    }
    best
}

fn game_values() -> Outcome {
    let shape = BoxShape::binary_bipartite();
    let g = GameSpec::chsh();
    let local = local_game_value(&g, &shape).unwrap().value;
    let ns = ns_game_value(&g, &shape).unwrap();
    let pr = g.value_of(&make_pr_box().into()).unwrap();
    let oracle = chsh_local_oracle();
    outcome(
        (local - 0.75).abs() <= LP_TOL
            && (oracle - 0.75).abs() <= LP_TOL
            && (ns.value - 1.0).abs() <= LP_TOL
            && (pr - 1.0).abs() <= LP_TOL,
        format!("local {local} (enumeration {oracle}), ns {} (pr box {pr})", ns.value),
    )
}

fn fano_consistency() -> Outcome {
    let mut scenarios: Vec<_> = ["pr_ot", "bob_clean", "bob_leaky", "plaintext_adder", "null", "null:2"]
        .iter()
        .map(|n| builtin_scenario(n).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sampler = BoxSampler::new(BoxShape::default_mac(), 9).unwrap();
    for _ in 0..30 {
        let ml = rng.gen_bool(0.5);
        let mut table = |n: usize, hi: usize| (0..n).map(|_| rng.gen_range(0..hi)).collect::<Vec<usize>>();
        let decoder = if ml {
            DecoderSpec::MaximumLikelihood
        } else {
            DecoderSpec::Table { reads: vec!["y".into(), "j".into(), "z1".into(), "z2".into()], table: table(24, 4) }
        };
        let setup = MacScenario {
            k: [1, 1],
            encoders: [table(4, 2), table(4, 2)],
            mac_box: TripartiteMacBox::new(sampler.ns_mixture()).unwrap(),
            channel: binary_adder_mac(),
            transcript: vec![],
            decoder,
        };
        scenarios.push(mac_scenario("random", &setup).unwrap());
    }
    let mut checked = 0;
    let mut violations = 0;
    for s in &scenarios {
        let e = evaluate_scenario(s).unwrap();
        for r in &e.receivers {
            checked += 1;
            if r.residual_entropy > r.fano_bound + TOL {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{checked} receiver reports, {violations} violations"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome, Option<Duration>)> = vec![
        ("1 ns verification", ns_verification, Some(Duration::from_secs(1))),
        ("2 formulation equivalence", formulation_equivalence, Some(Duration::from_secs(10))),
        ("3 secrecy iff trivial resource", secrecy_certificate, None),
        ("4 nontrivial boxes amplify", amplification_certificate, None),
        ("5 hypothesis-testing identity", hypothesis_identity, None),
        ("6 pr box oblivious transfer", pr_ot_perfection, Some(Duration::from_secs(1))),
        ("7 rabin oblivious transfer", rabin, None),
        ("8 receiver-security dichotomy", bob_dichotomy, None),
        ("9 chsh game values", game_values, Some(Duration::from_secs(5))),
        ("10 fano consistency", fano_consistency, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let (mut o, took) = timed(run);
        if let Some(limit) = limit {
            if took > limit {
                o.pass = false;
                o.detail.push_str(&format!("; runtime {took:.2?} over {limit:?}"));
            }
        }
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name}: {} ({}; {took:.2?})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {failed} failing criteria");
    if failed > 0 {
        std::process::exit(1);
    }
}
