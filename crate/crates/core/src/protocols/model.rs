use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{tuples, volume, ConditionalPmf};

pub type VarId = usize;

/// Who holds a variable. Views are built from ownership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Sender(usize),
    Receiver(usize),
    /// Broadcast transcript symbols, in every party's view.
    Public,
    /// Analysis-only variables such as erasure flags; in nobody's view.
    Hidden,
}

impl Party {
    /// Whether this party observes variables owned by `owner`.
    pub fn sees(self, owner: Party) -> bool {
        match self {
            Party::Hidden => true,
            _ => owner == self || owner == Party::Public,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub size: usize,
    pub owner: Party,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// Independent randomness over `vars` with a flat row-major law.
    Prior { vars: Vec<VarId>, law: Vec<f64> },
    /// `output = table[reads]`, computed by `owner` from its own view.
    Function { owner: Party, output: VarId, reads: Vec<VarId>, table: Vec<usize> },
    /// A physical resource (box half or channel) with law `P(outputs | reads)`.
    Kernel { outputs: Vec<VarId>, reads: Vec<VarId>, law: ConditionalPmf },
}

/// One 1-out-of-2 transfer: `sender` holds `files`, `receiver` holds `choice`
/// and wants `files[choice]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilePair {
    pub sender: usize,
    pub files: [VarId; 2],
    pub choice: VarId,
    pub receiver: usize,
    pub bits: u32,
    /// Receiver-owned estimate; `None` selects the maximum-likelihood decoder.
    pub estimate: Option<VarId>,
}

/// A message pushed through an erasure channel, with a hidden erasure flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureTransfer {
    pub sender: usize,
    pub message: VarId,
    pub output: VarId,
    pub flag: VarId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolScenario {
    pub name: String,
    pub vars: Vec<Variable>,
    pub steps: Vec<Step>,
    pub pairs: Vec<FilePair>,
    pub erasures: Vec<ErasureTransfer>,
}

impl ProtocolScenario {
    pub fn var(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Variables in `party`'s view, in declaration order.
    pub fn view_of(&self, party: Party) -> Vec<VarId> {
        (0..self.vars.len()).filter(|&v| party.sees(self.vars[v].owner) && party != Party::Hidden).collect()
    }

    pub fn senders(&self) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.vars.iter().filter_map(|v| if let Party::Sender(s) = v.owner { Some(s) } else { None }).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn receivers(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.pairs.iter().map(|p| p.receiver).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Check that every variable is assigned exactly once, every read happens
    /// after its assignment, functions read only their owner's view and write
    /// only their owner's or public variables, and pairs are well formed.
    pub fn validate(&self) -> Result<()> {
        let mut assigned = vec![false; self.vars.len()];
        let check_var = |v: VarId| -> Result<()> {
            if v >= self.vars.len() {
                return Err(Error::validation(format!("step refers to unknown variable {v}")));
            }
            Ok(())
        };
        let name = |v: VarId| self.vars[v].name.as_str();
        for (idx, step) in self.steps.iter().enumerate() {
            let (reads, outputs): (&[VarId], Vec<VarId>) = match step {
                Step::Prior { vars, law } => {
                    let sizes: Vec<usize> = vars.iter().map(|&v| self.vars.get(v).map_or(0, |x| x.size)).collect();
                    if law.len() != volume(&sizes) {
                        return Err(Error::validation(format!("prior at step {idx} has the wrong length")));
                    }
                    if law.iter().any(|&p| p < 0.0) || (law.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                        return Err(Error::validation(format!("prior at step {idx} is not a distribution")));
                    }
                    (&[], vars.clone())
                }
                Step::Function { owner, output, reads, table } => {
                    for &r in reads.iter().chain(std::iter::once(output)) {
                        check_var(r)?;
                    }
                    if *owner != Party::Hidden {
                        if let Some(&r) = reads.iter().find(|&&r| !owner.sees(self.vars[r].owner)) {
                            return Err(Error::validation(format!("{owner:?} reads {} outside its view", name(r))));
                        }
                    }
                    let out_owner = self.vars[*output].owner;
                    if out_owner != *owner && out_owner != Party::Public {
                        return Err(Error::validation(format!("{owner:?} cannot write {}", name(*output))));
                    }
                    let sizes: Vec<usize> = reads.iter().map(|&r| self.vars[r].size).collect();
                    if table.len() != volume(&sizes) {
                        return Err(Error::validation(format!(
                            "table for {} needs {} entries, has {}",
                            name(*output),
                            volume(&sizes),
                            table.len()
                        )));
                    }
                    if let Some(bad) = table.iter().find(|&&t| t >= self.vars[*output].size) {
                        return Err(Error::validation(format!("table for {} emits out-of-range {bad}", name(*output))));
                    }
                    (reads.as_slice(), vec![*output])
                }
                Step::Kernel { outputs, reads, law } => {
                    for &r in reads.iter().chain(outputs) {
                        check_var(r)?;
                    }
                    let in_sizes: Vec<usize> = reads.iter().map(|&r| self.vars[r].size).collect();
                    let out_sizes: Vec<usize> = outputs.iter().map(|&r| self.vars[r].size).collect();
                    if law.input_sizes() != in_sizes || law.output_sizes() != out_sizes {
                        return Err(Error::validation(format!("kernel at step {idx} does not match its variables")));
                    }
                    (reads.as_slice(), outputs.clone())
                }
            };
            for &r in reads {
                if !assigned[r] {
                    return Err(Error::validation(format!("step {idx} reads {} before it is set", name(r))));
                }
            }
            for v in outputs {
                check_var(v)?;
                if std::mem::replace(&mut assigned[v], true) {
                    return Err(Error::validation(format!("{} is assigned twice", name(v))));
                }
            }
        }
        if let Some(v) = assigned.iter().position(|a| !a) {
            return Err(Error::validation(format!("{} is never assigned", name(v))));
        }
        for p in &self.pairs {
            for &f in &p.files {
                check_var(f)?;
                if self.vars[f].owner != Party::Sender(p.sender) {
                    return Err(Error::validation(format!("file {} is not held by its sender", name(f))));
                }
            }
            check_var(p.choice)?;
            if self.vars[p.choice].owner != Party::Receiver(p.receiver) || self.vars[p.choice].size != 2 {
                return Err(Error::validation(format!("choice {} must be a receiver-held bit", name(p.choice))));
            }
            if self.vars[p.files[0]].size != self.vars[p.files[1]].size {
                return Err(Error::validation("the two files of a pair must share an alphabet"));
            }
            if let Some(e) = p.estimate {
                check_var(e)?;
                if self.vars[e].owner != Party::Receiver(p.receiver) || self.vars[e].size != self.vars[p.files[0]].size
                {
                    return Err(Error::validation(format!("estimate {} must be a receiver-held file", name(e))));
                }
            }
        }
        Ok(())
    }
}

/// Incremental scenario construction with name-based variable lookup.
#[derive(Debug, Clone, Default)]
pub struct ScenarioBuilder {
    name: String,
    vars: Vec<Variable>,
    steps: Vec<Step>,
    pairs: Vec<FilePair>,
    erasures: Vec<ErasureTransfer>,
}

impl ScenarioBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ScenarioBuilder { name: name.into(), ..Default::default() }
    }

    pub fn var(&mut self, name: impl Into<String>, size: usize, owner: Party) -> Result<VarId> {
        let name = name.into();
        if size == 0 {
            return Err(Error::validation(format!("variable {name} has an empty alphabet")));
        }
        if self.vars.iter().any(|v| v.name == name) {
            return Err(Error::validation(format!("variable {name} declared twice")));
        }
        self.vars.push(Variable { name, size, owner });
        Ok(self.vars.len() - 1)
    }

    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::validation(format!("unknown variable {name:?}")))
    }

    pub fn size(&self, v: VarId) -> usize {
        self.vars[v].size
    }

    pub fn uniform(&mut self, vars: &[VarId]) {
        let n = volume(&vars.iter().map(|&v| self.vars[v].size).collect::<Vec<_>>());
        self.steps.push(Step::Prior { vars: vars.to_vec(), law: vec![1.0 / n as f64; n] });
    }

    pub fn prior(&mut self, vars: &[VarId], law: Vec<f64>) {
        self.steps.push(Step::Prior { vars: vars.to_vec(), law });
    }

    pub fn function_table(&mut self, owner: Party, output: VarId, reads: &[VarId], table: Vec<usize>) {
        self.steps.push(Step::Function { owner, output, reads: reads.to_vec(), table });
    }

    pub fn function(&mut self, owner: Party, output: VarId, reads: &[VarId], f: impl Fn(&[usize]) -> usize) {
        let sizes: Vec<usize> = reads.iter().map(|&r| self.vars[r].size).collect();
        let table = tuples(&sizes).map(|t| f(&t)).collect();
        self.function_table(owner, output, reads, table);
    }

    pub fn kernel(&mut self, outputs: &[VarId], reads: &[VarId], law: ConditionalPmf) {
        self.steps.push(Step::Kernel { outputs: outputs.to_vec(), reads: reads.to_vec(), law });
    }

    pub fn pair(&mut self, pair: FilePair) {
        self.pairs.push(pair);
    }

    pub fn erasure(&mut self, e: ErasureTransfer) {
        self.erasures.push(e);
    }

    pub fn build(self) -> Result<ProtocolScenario> {
        let s = ProtocolScenario {
            name: self.name,
            vars: self.vars,
            steps: self.steps,
            pairs: self.pairs,
            erasures: self.erasures,
        };
        s.validate()?;
        Ok(s)
    }
}
