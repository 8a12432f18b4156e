use serde::{Deserialize, Serialize};

use super::joint::JointPmf;
use super::tensor::{
    check_entries, check_unique_names, format_tuple, ravel, sizes_of, tuples, volume, Alphabet, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};

/// A conditional law `P(outputs | inputs)` over finite alphabets.
///
/// Storage is row-major over `(inputs.., outputs..)`: the output distribution
/// for one input tuple is a contiguous block, so outputs vary fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConditional", into = "RawConditional")]
pub struct ConditionalPmf {
    output_axes: Vec<Alphabet>,
    input_axes: Vec<Alphabet>,
    values: Vec<f64>,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawConditional {
    pub output_axes: Vec<Alphabet>,
    #[serde(default)]
    pub input_axes: Vec<Alphabet>,
    pub values: Vec<f64>,
}

impl TryFrom<RawConditional> for ConditionalPmf {
    type Error = Error;

    fn try_from(raw: RawConditional) -> Result<Self> {
        ConditionalPmf::new(raw.output_axes, raw.input_axes, raw.values)
    }
}

impl From<ConditionalPmf> for RawConditional {
    fn from(p: ConditionalPmf) -> Self {
        RawConditional { output_axes: p.output_axes, input_axes: p.input_axes, values: p.values }
    }
}

impl ConditionalPmf {
    pub fn new(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(outputs, inputs, values, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>, values: Vec<f64>, tol: f64) -> Result<Self> {
        for a in outputs.iter().chain(&inputs) {
            a.validate()?;
        }
        check_unique_names(outputs.iter().chain(&inputs).map(|a| a.name.as_str()))?;
        let block = volume(&sizes_of(&outputs));
        let n_in = volume(&sizes_of(&inputs));
        if values.len() != block * n_in {
            return Err(Error::structural(format!(
                "conditional pmf expects {} values, got {}",
                block * n_in,
                values.len()
            )));
        }
        let values = check_entries(&values, tol)?;
        for (inp, chunk) in tuples(&sizes_of(&inputs)).zip(values.chunks(block)) {
            let mass: f64 = chunk.iter().sum();
            if (mass - 1.0).abs() > tol {
                return Err(Error::domain(format!("output mass {mass} at input {} is not 1", format_tuple(&inp))));
            }
        }
        Ok(ConditionalPmf { output_axes: outputs, input_axes: inputs, values, tol })
    }

    /// Build from `f(outputs, inputs)`.
    pub fn from_fn(
        outputs: Vec<Alphabet>,
        inputs: Vec<Alphabet>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::new();
        for inp in tuples(&sizes_of(&inputs)) {
            for out in tuples(&sizes_of(&outputs)) {
                values.push(f(&out, &inp));
            }
        }
        Self::new(outputs, inputs, values)
    }

    /// A deterministic law with `outputs = f(inputs)`.
    pub fn deterministic(
        outputs: Vec<Alphabet>,
        inputs: Vec<Alphabet>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let out_sizes = sizes_of(&outputs);
        let mut values = Vec::new();
        for inp in tuples(&sizes_of(&inputs)) {
            let target = f(&inp);
            if target.len() != out_sizes.len() || target.iter().zip(&out_sizes).any(|(&t, &s)| t >= s) {
                return Err(Error::structural(format!(
                    "deterministic map sends {} to out-of-range {}",
                    format_tuple(&inp),
                    format_tuple(&target)
                )));
            }
            let flat = ravel(&target, &out_sizes);
            values.extend((0..volume(&out_sizes)).map(|k| if k == flat { 1.0 } else { 0.0 }));
        }
        Self::new(outputs, inputs, values)
    }

    /// Uniform output law for every input.
    pub fn uniform(outputs: Vec<Alphabet>, inputs: Vec<Alphabet>) -> Self {
        let block = volume(&sizes_of(&outputs));
        let n = block * volume(&sizes_of(&inputs));
        ConditionalPmf {
            output_axes: outputs,
            input_axes: inputs,
            values: vec![1.0 / block as f64; n],
            tol: DEFAULT_TOLERANCE,
        }
    }

    pub fn set_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn output_axes(&self) -> &[Alphabet] {
        &self.output_axes
    }

    pub fn input_axes(&self) -> &[Alphabet] {
        &self.input_axes
    }

    pub fn output_sizes(&self) -> Vec<usize> {
        sizes_of(&self.output_axes)
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        sizes_of(&self.input_axes)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn block(&self) -> usize {
        volume(&self.output_sizes())
    }

    pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> f64 {
        let b = self.block();
        self.values[ravel(inputs, &self.input_sizes()) * b + ravel(outputs, &self.output_sizes())]
    }

    /// The output distribution at one input tuple, flat in output order.
    pub fn column(&self, inputs: &[usize]) -> &[f64] {
        let b = self.block();
        let start = ravel(inputs, &self.input_sizes()) * b;
        &self.values[start..start + b]
    }

    /// The output distribution at one input tuple as a joint over the outputs.
    pub fn fix_inputs(&self, inputs: &[usize]) -> JointPmf {
        JointPmf::from_parts_unchecked(self.output_axes.clone(), self.column(inputs).to_vec(), self.tol)
    }

    /// Joint law over `(outputs.., inputs..)` induced by an input distribution.
    pub fn joint_with(&self, input_dist: &JointPmf) -> Result<JointPmf> {
        let names: Vec<&str> = input_dist.axes().iter().map(|a| a.name.as_str()).collect();
        let expected: Vec<&str> = self.input_axes.iter().map(|a| a.name.as_str()).collect();
        if names != expected || input_dist.sizes() != self.input_sizes() {
            return Err(Error::structural(format!("input distribution axes {names:?} do not match {expected:?}")));
        }
        let out_sizes = self.output_sizes();
        let in_sizes = self.input_sizes();
        let all_sizes: Vec<usize> = out_sizes.iter().chain(&in_sizes).copied().collect();
        let mut values = Vec::with_capacity(volume(&all_sizes));
        for t in tuples(&all_sizes) {
            let (out, inp) = t.split_at(out_sizes.len());
            values.push(self.get(out, inp) * input_dist.get(inp));
        }
        let axes = self.output_axes.iter().chain(&self.input_axes).cloned().collect();
        Ok(JointPmf::from_parts_unchecked(axes, values, self.tol))
    }

    pub fn output_index(&self, name: &str) -> Result<usize> {
        self.output_axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::structural(format!("unknown output axis {name}")))
    }

    pub fn input_index(&self, name: &str) -> Result<usize> {
        self.input_axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::structural(format!("unknown input axis {name}")))
    }

    /// Same values with renamed axes (positional).
    pub fn rename(&self, outputs: &[&str], inputs: &[&str]) -> Result<Self> {
        if outputs.len() != self.output_axes.len() || inputs.len() != self.input_axes.len() {
            return Err(Error::structural("rename needs one name per axis"));
        }
        let o = self.output_axes.iter().zip(outputs).map(|(a, n)| a.renamed(*n)).collect();
        let i = self.input_axes.iter().zip(inputs).map(|(a, n)| a.renamed(*n)).collect();
        Self::with_tolerance(o, i, self.values.clone(), self.tol)
    }

    /// Entrywise convex combination of laws with identical axes.
    pub fn mix(parts: &[&ConditionalPmf], weights: &[f64]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::structural("mix of zero laws"))?;
        if parts.len() != weights.len() {
            return Err(Error::structural(format!("{} laws but {} weights", parts.len(), weights.len())));
        }
        let tol = first.tol;
        if weights.iter().any(|w| !w.is_finite() || *w < -tol) || (weights.iter().sum::<f64>() - 1.0).abs() > tol {
            return Err(Error::structural("mixture weights are not a probability vector"));
        }
        let mut values = vec![0.0; first.values.len()];
        for (p, &w) in parts.iter().zip(weights) {
            if p.output_axes != first.output_axes || p.input_axes != first.input_axes {
                return Err(Error::structural("mixed laws have different shapes"));
            }
            for (acc, v) in values.iter_mut().zip(&p.values) {
                *acc += w.max(0.0) * v;
            }
        }
        Self::with_tolerance(first.output_axes.clone(), first.input_axes.clone(), values, tol)
    }

    /// The law with outputs and inputs of `self` followed by those of `other`,
    /// assuming independence: `P(o, o' | i, i') = P(o|i) Q(o'|i')`.
    pub fn tensor(&self, other: &ConditionalPmf) -> Result<Self> {
        let outputs: Vec<Alphabet> = self.output_axes.iter().chain(&other.output_axes).cloned().collect();
        let inputs: Vec<Alphabet> = self.input_axes.iter().chain(&other.input_axes).cloned().collect();
        let (no, ni) = (self.output_axes.len(), self.input_axes.len());
        Self::from_fn(outputs, inputs, |o, i| self.get(&o[..no], &i[..ni]) * other.get(&o[no..], &i[ni..]))
            .map(|p| p.set_tolerance(self.tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outputs_vary_fastest() {
        let p = ConditionalPmf::new(vec![Alphabet::binary("Y")], vec![Alphabet::binary("X")], vec![0.9, 0.1, 0.2, 0.8])
            .unwrap();
        assert_eq!(p.get(&[1], &[0]), 0.1);
        assert_eq!(p.column(&[1]), &[0.2, 0.8]);
    }

    #[test]
    fn rejects_unnormalized_column() {
        let err =
            ConditionalPmf::new(vec![Alphabet::binary("Y")], vec![Alphabet::binary("X")], vec![0.9, 0.1, 0.2, 0.7])
                .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn empty_inputs_is_unconditional() {
        let p = ConditionalPmf::new(vec![Alphabet::binary("A")], vec![], vec![0.25, 0.75]).unwrap();
        assert_eq!(p.column(&[]), &[0.25, 0.75]);
    }

    #[test]
    fn json_roundtrip() {
        let p =
            ConditionalPmf::deterministic(vec![Alphabet::binary("Y")], vec![Alphabet::binary("X")], |i| vec![1 - i[0]])
                .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(!s.contains("tol"));
        let back: ConditionalPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn joint_with_uniform_inputs() {
        let p = ConditionalPmf::deterministic(vec![Alphabet::binary("Y")], vec![Alphabet::binary("X")], |i| vec![i[0]])
            .unwrap();
        let j = p.joint_with(&JointPmf::uniform(vec![Alphabet::binary("X")])).unwrap();
        assert_eq!(j.values(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(j.axes()[0].name, "Y");
    }
}
