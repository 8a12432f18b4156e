use serde::Serialize;

use crate::error::{Error, Result};
use crate::ns_box::BoxShape;
use crate::prob::{format_tuple, ravel, tuples, volume, ConditionalPmf};

/// One equality `sum coeff * x = rhs` over box entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    /// `"normalization"` or a non-signaling family identifier.
    pub family: String,
    pub label: String,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, c)| c * x[j]).sum::<f64>() - self.rhs
    }
}

/// Equalities describing the non-signaling polytope of a shape. Variables are
/// the box entries in storage order (inputs major, outputs fastest), each
/// bounded to `[0, 1]`; the upper bound follows from normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearSystem {
    #[serde(skip)]
    pub shape: BoxShape,
    pub variables: usize,
    pub equalities: Vec<Constraint>,
}

impl LinearSystem {
    pub fn variable_index(&self, outputs: &[usize], inputs: &[usize]) -> usize {
        ravel(inputs, &self.shape.inputs) * volume(&self.shape.outputs) + ravel(outputs, &self.shape.outputs)
    }

    /// Constraint families in row order, each listed once.
    pub fn families(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for c in &self.equalities {
            if !out.contains(&c.family.as_str()) {
                out.push(&c.family);
            }
        }
        out
    }

    pub fn dense(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let a = self
            .equalities
            .iter()
            .map(|c| {
                let mut row = vec![0.0; self.variables];
                for &(j, v) in &c.coeffs {
                    row[j] += v;
                }
                row
            })
            .collect();
        (a, self.equalities.iter().map(|c| c.rhs).collect())
    }

    /// Expected row count: one normalization row per input tuple plus, for
    /// each party, `(|I_k| - 1)` times the other inputs and other outputs.
    pub fn expected_rows(shape: &BoxShape) -> usize {
        let n = shape.outputs.len();
        let mut rows = volume(&shape.inputs);
        for k in 0..n {
            let rest_in: usize = (0..n).filter(|&m| m != k).map(|m| shape.inputs[m]).product();
            let rest_out: usize = (0..n).filter(|&m| m != k).map(|m| shape.outputs[m]).product();
            rows += (shape.inputs[k] - 1) * rest_in * rest_out;
        }
        rows
    }
}

pub fn build_ns_system(shape: &BoxShape) -> LinearSystem {
    let outs = &shape.outputs;
    let ins = &shape.inputs;
    let n = outs.len();
    let block = volume(outs);
    let index = |o: &[usize], i: &[usize]| ravel(i, ins) * block + ravel(o, outs);
    let in_names = shape.structure.input_names();
    let mut equalities = Vec::new();

    for i in tuples(ins) {
        equalities.push(Constraint {
            family: "normalization".into(),
            label: format!("inputs {}", format_tuple(&i)),
            coeffs: tuples(outs).map(|o| (index(&o, &i), 1.0)).collect(),
            rhs: 1.0,
        });
    }
    for (k, id) in shape.structure.prob_constraint_ids().iter().enumerate() {
        for i in tuples(ins).filter(|i| i[k] >= 1) {
            let mut base = i.clone();
            base[k] = 0;
            let rest_sizes: Vec<usize> = (0..n).filter(|&m| m != k).map(|m| outs[m]).collect();
            for rest in tuples(&rest_sizes) {
                let mut coeffs = Vec::with_capacity(2 * outs[k]);
                let mut o = vec![0; n];
                for own in 0..outs[k] {
                    let mut r = rest.iter();
                    for (m, slot) in o.iter_mut().enumerate() {
                        *slot = if m == k { own } else { *r.next().expect("rest covers other parties") };
                    }
                    coeffs.push((index(&o, &i), 1.0));
                    coeffs.push((index(&o, &base), -1.0));
                }
                equalities.push(Constraint {
                    family: id.to_string(),
                    label: format!(
                        "{}={} vs 0 at inputs {}, other outputs {}",
                        in_names[k],
                        i[k],
                        format_tuple(&i),
                        format_tuple(&rest)
                    ),
                    coeffs,
                    rhs: 0.0,
                });
            }
        }
    }
    LinearSystem { shape: shape.clone(), variables: block * volume(ins), equalities }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResidual {
    pub family: String,
    pub label: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub passed: bool,
    pub max_residual: f64,
    pub violations: Vec<RowResidual>,
}

impl MembershipReport {
    pub fn violated_families(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in &self.violations {
            if !out.contains(&v.family.as_str()) {
                out.push(&v.family);
            }
        }
        out
    }
}

pub(crate) fn check_dims(candidate: &ConditionalPmf, shape: &BoxShape) -> Result<()> {
    if candidate.output_sizes() != shape.outputs || candidate.input_sizes() != shape.inputs {
        return Err(Error::structural(format!(
            "candidate has sizes {:?}|{:?}, shape {shape} expects {:?}|{:?}",
            candidate.output_sizes(),
            candidate.input_sizes(),
            shape.outputs,
            shape.inputs
        )));
    }
    Ok(())
}

/// Evaluate every row of the NS system on `candidate`.
pub fn ns_membership(candidate: &ConditionalPmf, shape: &BoxShape) -> Result<MembershipReport> {
    check_dims(candidate, shape)?;
    let system = build_ns_system(shape);
    let tol = candidate.tolerance();
    let x = candidate.values();
    let mut max_residual: f64 = 0.0;
    let mut violations = Vec::new();
    for c in &system.equalities {
        let r = c.residual(x);
        max_residual = max_residual.max(r.abs());
        if r.abs() > tol {
            violations.push(RowResidual { family: c.family.clone(), label: c.label.clone(), residual: r });
        }
    }
    Ok(MembershipReport { passed: violations.is_empty(), max_residual, violations })
}

/// Turn an LP point into a box law, clearing rounding noise.
pub(crate) fn law_from_point(shape: &BoxShape, x: &[f64]) -> Result<ConditionalPmf> {
    let block = volume(&shape.outputs);
    let mut values: Vec<f64> = x.iter().map(|&v| if v.abs() < 1e-12 { 0.0 } else { v.max(0.0) }).collect();
    for col in values.chunks_mut(block) {
        let s: f64 = col.iter().sum();
        for v in col {
            *v /= s;
        }
    }
    ConditionalPmf::new(shape.output_axes(), shape.input_axes(), values)
}
