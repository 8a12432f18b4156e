use std::collections::BTreeMap;

use serde::Serialize;

use super::model::{Party, ProtocolScenario, Step, VarId};
use crate::error::{Error, Result};
use crate::prob::{entropy_vector, fano_bound, ravel, tuples, tv_vectors};

/// Hard cap on enumerated execution paths.
pub const MAX_PATHS: usize = 1 << 20;

/// Every execution path with positive probability, as full assignments.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub paths: Vec<(Vec<usize>, f64)>,
}

type Key = Vec<usize>;

pub fn enumerate(s: &ProtocolScenario) -> Result<Enumeration> {
    s.validate()?;
    let mut paths = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>, f64)> = vec![(0, vec![0; s.vars.len()], 1.0)];
    while let Some((idx, assign, p)) = stack.pop() {
        let Some(step) = s.steps.get(idx) else {
            if paths.len() >= MAX_PATHS {
                return Err(Error::resource(format!("more than {MAX_PATHS} execution paths")));
            }
            paths.push((assign, p));
            continue;
        };
        match step {
            Step::Prior { vars, law } => {
                let sizes: Vec<usize> = vars.iter().map(|&v| s.vars[v].size).collect();
                for (flat, t) in tuples(&sizes).enumerate().collect::<Vec<_>>().into_iter().rev() {
                    if law[flat] > 0.0 {
                        let mut next = assign.clone();
                        for (&v, &x) in vars.iter().zip(&t) {
                            next[v] = x;
                        }
                        stack.push((idx + 1, next, p * law[flat]));
                    }
                }
            }
            Step::Function { output, reads, table, .. } => {
                let sizes: Vec<usize> = reads.iter().map(|&r| s.vars[r].size).collect();
                let key: Vec<usize> = reads.iter().map(|&r| assign[r]).collect();
                let mut next = assign;
                next[*output] = table[ravel(&key, &sizes)];
                stack.push((idx + 1, next, p));
            }
            Step::Kernel { outputs, reads, law } => {
                let key: Vec<usize> = reads.iter().map(|&r| assign[r]).collect();
                let column = law.column(&key);
                let out_sizes = law.output_sizes();
                let branches: Vec<(Vec<usize>, f64)> =
                    tuples(&out_sizes).zip(column).filter(|(_, &q)| q > 0.0).map(|(o, &q)| (o, q)).collect();
                for (o, q) in branches.into_iter().rev() {
                    let mut next = assign.clone();
                    for (&v, &x) in outputs.iter().zip(&o) {
                        next[v] = x;
                    }
                    stack.push((idx + 1, next, p * q));
                }
            }
        }
        if stack.len() > MAX_PATHS {
            return Err(Error::resource(format!("more than {MAX_PATHS} pending execution paths")));
        }
    }
    Ok(Enumeration { paths })
}

fn project(a: &[usize], vars: &[VarId]) -> Key {
    vars.iter().map(|&v| a[v]).collect()
}

impl Enumeration {
    /// Law of a derived variable, keyed by its value.
    pub fn law(&self, f: impl Fn(&[usize]) -> Key) -> BTreeMap<Key, f64> {
        let mut out = BTreeMap::new();
        for (a, p) in &self.paths {
            *out.entry(f(a)).or_insert(0.0) += p;
        }
        out
    }

    pub fn probability(&self, f: impl Fn(&[usize]) -> bool) -> f64 {
        self.paths.iter().filter(|(a, _)| f(a)).fold(0.0, |acc, (_, p)| acc + p)
    }

    pub fn entropy(&self, f: impl Fn(&[usize]) -> Key) -> f64 {
        entropy_vector(&self.law(f).into_values().collect::<Vec<_>>())
    }

    /// `H(A | C)` for derived variables.
    pub fn conditional_entropy(&self, a: impl Fn(&[usize]) -> Key, c: impl Fn(&[usize]) -> Key) -> f64 {
        let ac = self.entropy(|x| {
            let mut k = a(x);
            k.extend(c(x));
            k
        });
        (ac - self.entropy(&c)).max(0.0)
    }

    /// `I(A ; B | C)` for derived variables, clamped at zero.
    pub fn mutual_information(
        &self,
        a: impl Fn(&[usize]) -> Key,
        b: impl Fn(&[usize]) -> Key,
        c: impl Fn(&[usize]) -> Key,
    ) -> f64 {
        let mut abc: BTreeMap<(Key, Key, Key), f64> = BTreeMap::new();
        for (x, p) in &self.paths {
            *abc.entry((a(x), b(x), c(x))).or_insert(0.0) += p;
        }
        let mut ac: BTreeMap<(Key, Key), f64> = BTreeMap::new();
        let mut bc: BTreeMap<(Key, Key), f64> = BTreeMap::new();
        let mut cc: BTreeMap<Key, f64> = BTreeMap::new();
        for ((ka, kb, kc), p) in &abc {
            *ac.entry((ka.clone(), kc.clone())).or_insert(0.0) += p;
            *bc.entry((kb.clone(), kc.clone())).or_insert(0.0) += p;
            *cc.entry(kc.clone()).or_insert(0.0) += p;
        }
        let mut total = 0.0;
        for ((ka, kb, kc), &p) in &abc {
            if p > 0.0 {
                let pac = ac[&(ka.clone(), kc.clone())];
                let pbc = bc[&(kb.clone(), kc.clone())];
                total += p * ((p * cc[kc]) / (pac * pbc)).log2();
            }
        }
        total.max(0.0)
    }

    /// Conditional law of `view` given each value of `cond`, as dense vectors
    /// over the union of observed view values.
    pub(crate) fn conditional_laws(
        &self,
        view: impl Fn(&[usize]) -> Key,
        cond: impl Fn(&[usize]) -> Key,
    ) -> BTreeMap<Key, Vec<f64>> {
        let mut support: BTreeMap<Key, usize> = BTreeMap::new();
        let mut joint: BTreeMap<(Key, Key), f64> = BTreeMap::new();
        for (x, p) in &self.paths {
            let v = view(x);
            let n = support.len();
            support.entry(v.clone()).or_insert(n);
            *joint.entry((cond(x), v)).or_insert(0.0) += p;
        }
        let mut out: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
        for ((c, v), p) in joint {
            let row = out.entry(c).or_insert_with(|| vec![0.0; support.len()]);
            row[support[&v]] += p;
        }
        for row in out.values_mut() {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= total);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLeakage {
    pub sender: usize,
    pub receiver: usize,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverReport {
    pub receiver: usize,
    /// `I(unselected files ; V)`.
    pub leakage_bits: f64,
    pub decode_error: f64,
    /// `H(selected files | V)`.
    pub residual_entropy: f64,
    pub selected_bits: u32,
    pub fano_bound: f64,
    /// `H(selected files | V without the choice bits)`.
    pub residual_without_choice: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderReport {
    pub sender: usize,
    /// `I(all choice bits ; U)`.
    pub leakage_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PerfectFlags {
    pub correctness: bool,
    pub sfa: bool,
    pub sfb: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityEvaluation {
    pub correctness_error: f64,
    pub sfa_leakage_bits: f64,
    pub sfb_leakage_bits: f64,
    pub perfect: PerfectFlags,
    pub pairs: Vec<PairLeakage>,
    pub receivers: Vec<ReceiverReport>,
    pub senders: Vec<SenderReport>,
}

/// Per-receiver estimate of the selected files under the decoder in force.
fn estimates(s: &ProtocolScenario, e: &Enumeration, receiver: usize) -> impl Fn(&[usize]) -> Key {
    let pairs: Vec<_> = s.pairs.iter().filter(|p| p.receiver == receiver).cloned().collect();
    let view = s.view_of(Party::Receiver(receiver));
    let ml: Option<BTreeMap<Key, Key>> = if pairs.iter().all(|p| p.estimate.is_some()) {
        None
    } else {
        let selected = selected_fn(&pairs);
        let mut scores: BTreeMap<Key, BTreeMap<Key, f64>> = BTreeMap::new();
        for (a, p) in &e.paths {
            *scores.entry(project(a, &view)).or_default().entry(selected(a)).or_insert(0.0) += p;
        }
        Some(
            scores
                .into_iter()
                .map(|(v, by_sel)| {
                    let mut best: Option<(Key, f64)> = None;
                    for (sel, p) in by_sel {
                        if best.as_ref().is_none_or(|(_, q)| p > *q) {
                            best = Some((sel, p));
                        }
                    }
                    (v, best.expect("observed view").0)
                })
                .collect(),
        )
    };
    move |a: &[usize]| match &ml {
        Some(table) => table[&project(a, &view)].clone(),
        None => pairs.iter().map(|p| a[p.estimate.expect("estimate present")]).collect(),
    }
}

fn selected_fn(pairs: &[super::model::FilePair]) -> impl Fn(&[usize]) -> Key + '_ {
    move |a: &[usize]| pairs.iter().map(|p| a[p.files[a[p.choice]]]).collect()
}

fn unselected_fn(pairs: &[super::model::FilePair]) -> impl Fn(&[usize]) -> Key + '_ {
    move |a: &[usize]| pairs.iter().map(|p| a[p.files[1 - a[p.choice]]]).collect()
}

/// Exact correctness, receiver-security and sender-security metrics.
pub fn evaluate_scenario(s: &ProtocolScenario) -> Result<SecurityEvaluation> {
    evaluate_scenario_with_tolerance(s, crate::prob::DEFAULT_TOLERANCE)
}

pub fn evaluate_scenario_with_tolerance(s: &ProtocolScenario, tol: f64) -> Result<SecurityEvaluation> {
    if s.pairs.is_empty() {
        return Err(Error::validation(format!("scenario {} declares no transfer pairs", s.name)));
    }
    let e = enumerate(s)?;
    evaluate_enumerated(s, &e, tol)
}

/// Metrics from an existing enumeration; flags compare against `tol`.
pub fn evaluate_enumerated(s: &ProtocolScenario, e: &Enumeration, tol: f64) -> Result<SecurityEvaluation> {
    let mut receivers = Vec::new();
    let mut pair_reports = Vec::new();
    let mut est_fns = Vec::new();
    for r in s.receivers() {
        let pairs: Vec<_> = s.pairs.iter().filter(|p| p.receiver == r).cloned().collect();
        let view = s.view_of(Party::Receiver(r));
        let choices: Vec<VarId> = pairs.iter().map(|p| p.choice).collect();
        let view_no_z: Vec<VarId> = view.iter().copied().filter(|v| !choices.contains(v)).collect();
        let v = |a: &[usize]| project(a, &view);
        let leak = e.mutual_information(unselected_fn(&pairs), v, |_| vec![]);
        for p in &pairs {
            let single = std::slice::from_ref(p);
            pair_reports.push(PairLeakage {
                sender: p.sender,
                receiver: r,
                bits: e.mutual_information(unselected_fn(single), v, |_| vec![]),
            });
        }
        let est = estimates(s, e, r);
        let sel = selected_fn(&pairs);
        let err = e.probability(|a| est(a) != sel(a)).clamp(0.0, 1.0);
        let bits: u32 = pairs.iter().map(|p| p.bits).sum();
        let residual = e.conditional_entropy(&sel, v);
        receivers.push(ReceiverReport {
            receiver: r,
            leakage_bits: leak,
            decode_error: err,
            residual_entropy: residual,
            selected_bits: bits,
            fano_bound: fano_bound(err, bits)?,
            residual_without_choice: e.conditional_entropy(&sel, |a| project(a, &view_no_z)),
        });
        est_fns.push((pairs.clone(), est));
    }
    let correctness_error =
        e.probability(|a| est_fns.iter().any(|(pairs, est)| est(a) != selected_fn(pairs)(a))).clamp(0.0, 1.0);

    let all_choices: Vec<VarId> = s.pairs.iter().map(|p| p.choice).collect();
    let senders: Vec<SenderReport> = s
        .senders()
        .into_iter()
        .map(|k| {
            let u = s.view_of(Party::Sender(k));
            SenderReport {
                sender: k,
                leakage_bits: e.mutual_information(|a| project(a, &all_choices), |a| project(a, &u), |_| vec![]),
            }
        })
        .collect();

    let sfa = receivers.iter().map(|r| r.leakage_bits).fold(0.0, f64::max);
    let sfb = senders.iter().map(|r| r.leakage_bits).fold(0.0, f64::max);
    Ok(SecurityEvaluation {
        correctness_error,
        sfa_leakage_bits: sfa,
        sfb_leakage_bits: sfb,
        perfect: PerfectFlags { correctness: correctness_error <= tol, sfa: sfa <= tol, sfb: sfb <= tol },
        pairs: pair_reports,
        receivers,
        senders,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderInvariance {
    pub sender: usize,
    /// Max over message tuples and choice pairs of `TV(P(U | m, z), P(U | m, z'))`.
    pub max_tv: f64,
    pub messages: Vec<usize>,
    pub choices: (Vec<usize>, Vec<usize>),
}

/// How much each sender's view distribution moves when only the choice bits change.
pub fn alice_view_invariance(s: &ProtocolScenario) -> Result<Vec<SenderInvariance>> {
    let e = enumerate(s)?;
    let files: Vec<VarId> = s.pairs.iter().flat_map(|p| p.files).collect();
    let choices: Vec<VarId> = s.pairs.iter().map(|p| p.choice).collect();
    let mut out = Vec::new();
    for k in s.senders() {
        let u = s.view_of(Party::Sender(k));
        let laws = e.conditional_laws(
            |a| project(a, &u),
            |a| {
                let mut key = project(a, &files);
                key.extend(project(a, &choices));
                key
            },
        );
        let mut by_messages: BTreeMap<Key, Vec<(Key, &Vec<f64>)>> = BTreeMap::new();
        for (key, law) in &laws {
            let (m, z) = key.split_at(files.len());
            by_messages.entry(m.to_vec()).or_default().push((z.to_vec(), law));
        }
        let mut best = SenderInvariance { sender: k, max_tv: 0.0, messages: vec![], choices: (vec![], vec![]) };
        for (m, rows) in &by_messages {
            for (i, (za, la)) in rows.iter().enumerate() {
                for (zb, lb) in &rows[i + 1..] {
                    let tv = tv_vectors(la, lb).min(1.0);
                    if tv > best.max_tv || best.messages.is_empty() {
                        best = SenderInvariance {
                            sender: k,
                            max_tv: tv.max(best.max_tv),
                            messages: m.clone(),
                            choices: (za.clone(), zb.clone()),
                        };
                    }
                }
            }
        }
        out.push(best);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RabinEvaluation {
    pub receive_probability: f64,
    /// `I(erasure flag ; sender view)`.
    pub sender_erasure_leakage_bits: f64,
    /// `Pr[output != message | not erased]`.
    pub decode_error_given_receipt: f64,
}

pub fn evaluate_rabin(s: &ProtocolScenario) -> Result<RabinEvaluation> {
    let t = s
        .erasures
        .first()
        .ok_or_else(|| Error::validation(format!("scenario {} declares no erasure transfer", s.name)))?;
    let e = enumerate(s)?;
    let received = e.probability(|a| a[t.flag] == 0);
    let u = s.view_of(Party::Sender(t.sender));
    let leak = e.mutual_information(|a| vec![a[t.flag]], |a| project(a, &u), |_| vec![]);
    let wrong = e.probability(|a| a[t.flag] == 0 && a[t.output] != a[t.message]);
    if received <= crate::prob::DEFAULT_TOLERANCE {
        return Err(Error::NullEvent { event: "message received".into(), mass: received });
    }
    Ok(RabinEvaluation {
        receive_probability: received,
        sender_erasure_leakage_bits: leak,
        decode_error_given_receipt: wrong / received,
    })
}
