use std::collections::BTreeMap;

use serde::Serialize;

use super::types::{AnyBox, BipartiteBox, PartyStructure, TripartiteBcBox, TripartiteMacBox};
use crate::error::{Error, Result};
use crate::prob::{mutual_information, ravel, tuples, ConditionalPmf, JointPmf};

/// Worst-case dependence of a marginal on a subset of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dependence {
    /// Largest absolute change of one marginal entry.
    pub gap: f64,
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
    /// The marginal entry (over the target outputs) where the gap occurs.
    pub outputs: Vec<usize>,
}

/// How much the marginal of `target_outputs` changes when only the inputs at
/// `varying_inputs` change, the other inputs held fixed.
pub fn input_dependence(law: &ConditionalPmf, target_outputs: &[usize], varying_inputs: &[usize]) -> Dependence {
    let out_sizes = law.output_sizes();
    let in_sizes = law.input_sizes();
    let target_sizes: Vec<usize> = target_outputs.iter().map(|&k| out_sizes[k]).collect();
    let target_len: usize = target_sizes.iter().product();

    // per group of fixed inputs: for each target output, (min, argmin, max, argmax)
    type Extremes = Vec<(f64, Vec<usize>, f64, Vec<usize>)>;
    let mut groups: BTreeMap<Vec<usize>, Extremes> = BTreeMap::new();
    let mut sub = vec![0; target_outputs.len()];
    for inp in tuples(&in_sizes) {
        let mut marginal = vec![0.0; target_len];
        for (flat, out) in tuples(&out_sizes).enumerate() {
            for (s, &k) in sub.iter_mut().zip(target_outputs) {
                *s = out[k];
            }
            marginal[ravel(&sub, &target_sizes)] += law.column(&inp)[flat];
        }
        let mut key = inp.clone();
        for &v in varying_inputs {
            key[v] = 0;
        }
        let entry =
            groups.entry(key).or_insert_with(|| marginal.iter().map(|&m| (m, inp.clone(), m, inp.clone())).collect());
        for (e, &m) in entry.iter_mut().zip(&marginal) {
            if m < e.0 {
                e.0 = m;
                e.1 = inp.clone();
            }
            if m > e.2 {
                e.2 = m;
                e.3 = inp.clone();
            }
        }
    }

    let mut best = Dependence {
        gap: 0.0,
        inputs_a: vec![0; in_sizes.len()],
        inputs_b: vec![0; in_sizes.len()],
        outputs: vec![0; target_outputs.len()],
    };
    for extremes in groups.values() {
        for (o, (lo, arg_lo, hi, arg_hi)) in tuples(&target_sizes).zip(extremes) {
            if hi - lo > best.gap {
                let (a, b) = if arg_lo < arg_hi { (arg_lo, arg_hi) } else { (arg_hi, arg_lo) };
                best = Dependence { gap: hi - lo, inputs_a: a.clone(), inputs_b: b.clone(), outputs: o };
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintViolation {
    pub constraint: String,
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
    pub outputs: Vec<usize>,
    /// Probability gap, or bits for the mutual-information form.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyValue {
    pub constraint: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NsCheckReport {
    pub passed: bool,
    /// `"max_abs_gap"` or `"mutual_information_bits"`.
    pub metric: &'static str,
    pub families: Vec<FamilyValue>,
    pub violations: Vec<ConstraintViolation>,
}

impl NsCheckReport {
    pub fn violated_families(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.constraint.as_str()).collect()
    }
}

fn others(n: usize, k: usize) -> Vec<usize> {
    (0..n).filter(|&m| m != k).collect()
}

/// Probability-level check: for each party `k`, the marginal of all other
/// outputs must not depend on input `k`.
pub fn check_ns_law(law: &ConditionalPmf, structure: PartyStructure) -> NsCheckReport {
    let tol = law.tolerance();
    let n = structure.parties();
    let mut families = Vec::new();
    let mut violations = Vec::new();
    for (k, id) in structure.prob_constraint_ids().iter().enumerate() {
        let dep = input_dependence(law, &others(n, k), &[k]);
        families.push(FamilyValue { constraint: id.to_string(), value: dep.gap });
        if dep.gap > tol {
            violations.push(ConstraintViolation {
                constraint: id.to_string(),
                inputs_a: dep.inputs_a,
                inputs_b: dep.inputs_b,
                outputs: dep.outputs,
                value: dep.gap,
            });
        }
    }
    NsCheckReport { passed: violations.is_empty(), metric: "max_abs_gap", families, violations }
}

pub fn check_bipartite_ns(b: &BipartiteBox) -> NsCheckReport {
    check_ns_law(b.law(), PartyStructure::Bipartite)
}

pub fn check_tripartite_mac_ns(b: &TripartiteMacBox) -> NsCheckReport {
    check_ns_law(b.law(), PartyStructure::TripartiteMac)
}

pub fn check_tripartite_bc_ns(b: &TripartiteBcBox) -> NsCheckReport {
    check_ns_law(b.law(), PartyStructure::TripartiteBc)
}

pub fn check_ns(b: &AnyBox) -> NsCheckReport {
    check_ns_law(b.law(), b.structure())
}

/// The uniform distribution over a law's input axes.
pub fn uniform_inputs(law: &ConditionalPmf) -> JointPmf {
    JointPmf::uniform(law.input_axes().to_vec())
}

fn check_input_dist(law: &ConditionalPmf, input_dist: &JointPmf) -> Result<()> {
    let names: Vec<&str> = input_dist.axes().iter().map(|a| a.name.as_str()).collect();
    let expected: Vec<&str> = law.input_axes().iter().map(|a| a.name.as_str()).collect();
    if names != expected || input_dist.sizes() != law.input_sizes() {
        return Err(Error::structural(format!(
            "input distribution axes {names:?} do not match box inputs {expected:?}"
        )));
    }
    if let Some(v) = input_dist.values().iter().find(|&&v| v <= law.tolerance()) {
        return Err(Error::domain(format!("input distribution lacks full support (entry {v})")));
    }
    Ok(())
}

fn names(law: &ConditionalPmf, outputs: &[usize], inputs: &[usize]) -> (Vec<String>, Vec<String>) {
    (
        outputs.iter().map(|&k| law.output_axes()[k].name.clone()).collect(),
        inputs.iter().map(|&k| law.input_axes()[k].name.clone()).collect(),
    )
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

/// Mutual-information check: for each party `k`,
/// `I(input_k ; other outputs | other inputs) = 0` under a full-support law.
pub fn check_ns_via_mi_law(
    law: &ConditionalPmf,
    structure: PartyStructure,
    input_dist: &JointPmf,
) -> Result<NsCheckReport> {
    check_input_dist(law, input_dist)?;
    let joint = law.joint_with(input_dist)?;
    let tol = law.tolerance();
    let n = structure.parties();
    let mut families = Vec::new();
    let mut violations = Vec::new();
    for (k, id) in structure.mi_constraint_ids().iter().enumerate() {
        let (outs, ins) = names(law, &others(n, k), &others(n, k));
        let own = law.input_axes()[k].name.as_str();
        let mi = mutual_information(&joint, &[own], &as_refs(&outs), &as_refs(&ins))?;
        families.push(FamilyValue { constraint: id.to_string(), value: mi });
        if mi > tol {
            let dep = input_dependence(law, &others(n, k), &[k]);
            violations.push(ConstraintViolation {
                constraint: id.to_string(),
                inputs_a: dep.inputs_a,
                inputs_b: dep.inputs_b,
                outputs: dep.outputs,
                value: mi,
            });
        }
    }
    Ok(NsCheckReport { passed: violations.is_empty(), metric: "mutual_information_bits", families, violations })
}

pub fn check_ns_via_mi(b: &AnyBox, input_dist: &JointPmf) -> Result<NsCheckReport> {
    check_ns_via_mi_law(b.law(), b.structure(), input_dist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
    pub outputs: Vec<usize>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialityVerdict {
    pub trivial: bool,
    pub mi_value: f64,
    pub witness: Option<Witness>,
}

fn classify(
    law: &ConditionalPmf,
    structure: PartyStructure,
    input_dist: &JointPmf,
    target_outputs: &[usize],
    varying_inputs: &[usize],
) -> Result<TrivialityVerdict> {
    let report = check_ns_law(law, structure);
    if !report.passed {
        return Err(Error::domain(format!(
            "triviality is undefined for a signaling box (violates {})",
            report.violated_families().join(", ")
        )));
    }
    check_input_dist(law, input_dist)?;
    let joint = law.joint_with(input_dist)?;
    let given: Vec<usize> = (0..law.input_axes().len()).filter(|i| !varying_inputs.contains(i)).collect();
    let (outs, vary) = names(law, target_outputs, varying_inputs);
    let (_, cond) = names(law, &[], &given);
    let mi = mutual_information(&joint, &as_refs(&vary), &as_refs(&outs), &as_refs(&cond))?;
    let trivial = mi <= law.tolerance();
    let witness = if trivial {
        None
    } else {
        let dep = input_dependence(law, target_outputs, varying_inputs);
        Some(Witness { inputs_a: dep.inputs_a, inputs_b: dep.inputs_b, outputs: dep.outputs, gap: dep.gap })
    };
    Ok(TrivialityVerdict { trivial, mi_value: mi, witness })
}

/// Box-level classification by `I(I1,I2 ; J | Y)`.
pub fn classify_triviality_mac(b: &TripartiteMacBox, input_dist: &JointPmf) -> Result<TrivialityVerdict> {
    classify(b.law(), PartyStructure::TripartiteMac, input_dist, &[2], &[0, 1])
}

/// Box-level classification by `I(I ; X,J1,J2 | Y1,Y2)`.
pub fn classify_triviality_bc(b: &TripartiteBcBox, input_dist: &JointPmf) -> Result<TrivialityVerdict> {
    classify(b.law(), PartyStructure::TripartiteBc, input_dist, &[0, 1, 2], &[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_box::constructors::*;
    use crate::ns_box::BoxShape;

    fn copy_bipartite() -> BipartiteBox {
        let s = BoxShape::binary_bipartite();
        BipartiteBox::new(ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![0, i[0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn pr_box_passes_exactly() {
        let r = check_bipartite_ns(&make_pr_box());
        assert!(r.passed);
        assert!(r.families.iter().all(|f| f.value == 0.0));
    }

    #[test]
    fn copy_box_violates_first_family() {
        let r = check_bipartite_ns(&copy_bipartite());
        assert!(!r.passed);
        assert_eq!(r.violated_families(), vec!["NS-prob1"]);
        assert_eq!(r.violations[0].value, 1.0);
    }

    #[test]
    fn mac_copy_of_sender_input_violates_ns1() {
        let s = BoxShape::default_mac();
        let b = TripartiteMacBox::new(
            ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![0, 0, i[0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(check_tripartite_mac_ns(&b).violated_families(), vec!["NS1"]);
    }

    #[test]
    fn bc_receiver_copy_violates_ns3() {
        let s = BoxShape::binary_bc();
        let b = TripartiteBcBox::new(
            ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![0, i[2], 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(check_tripartite_bc_ns(&b).violated_families(), vec!["NS3-BC"]);
    }

    #[test]
    fn mi_check_on_copy_box() {
        let s = BoxShape::default_mac();
        let law = ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![0, i[0], 0]).unwrap();
        let r = check_ns_via_mi_law(&law, PartyStructure::TripartiteMac, &uniform_inputs(&law)).unwrap();
        assert_eq!(r.violated_families(), vec!["NSM1"]);
        assert!((r.violations[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mi_check_needs_full_support() {
        let pr = AnyBox::from(make_pr_box());
        let dist = JointPmf::point_mass(pr.law().input_axes().to_vec(), &[0, 0]).unwrap();
        assert!(matches!(check_ns_via_mi(&pr, &dist), Err(Error::Domain(_))));
    }

    #[test]
    fn bc_copy_box_is_nontrivial_with_mi_h_of_i() {
        let s = BoxShape::binary_bc();
        let b = TripartiteBcBox::new(
            ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![i[0], i[1], i[2]]).unwrap(),
        )
        .unwrap();
        let v = classify_triviality_bc(&b, &uniform_inputs(b.law())).unwrap();
        assert!(!v.trivial);
        assert!((v.mi_value - 1.0).abs() < 1e-12);
        assert_eq!(v.witness.unwrap().gap, 1.0);
    }

    #[test]
    fn signaling_box_cannot_be_classified() {
        let s = BoxShape::default_mac();
        let b = TripartiteMacBox::new(
            ConditionalPmf::deterministic(s.output_axes(), s.input_axes(), |i| vec![0, 0, i[0] ^ i[1]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(classify_triviality_mac(&b, &uniform_inputs(b.law())), Err(Error::Domain(_))));
    }
}
