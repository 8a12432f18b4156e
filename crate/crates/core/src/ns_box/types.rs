use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{Alphabet, ConditionalPmf, RawConditional};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartyStructure {
    Bipartite,
    TripartiteMac,
    TripartiteBc,
}

impl PartyStructure {
    pub fn output_names(self) -> &'static [&'static str] {
        match self {
            PartyStructure::Bipartite => &["X1", "X2"],
            PartyStructure::TripartiteMac => &["X1", "X2", "J"],
            PartyStructure::TripartiteBc => &["X", "J1", "J2"],
        }
    }

    pub fn input_names(self) -> &'static [&'static str] {
        match self {
            PartyStructure::Bipartite => &["I1", "I2"],
            PartyStructure::TripartiteMac => &["I1", "I2", "Y"],
            PartyStructure::TripartiteBc => &["I", "Y1", "Y2"],
        }
    }

    pub fn parties(self) -> usize {
        self.output_names().len()
    }

    /// Identifiers of the probability-level constraint families, one per party.
    pub fn prob_constraint_ids(self) -> &'static [&'static str] {
        match self {
            PartyStructure::Bipartite => &["NS-prob1", "NS-prob2"],
            PartyStructure::TripartiteMac => &["NS1", "NS2", "NS3"],
            PartyStructure::TripartiteBc => &["NS1-BC", "NS2-BC", "NS3-BC"],
        }
    }

    /// Identifiers of the mutual-information constraint families, one per party.
    pub fn mi_constraint_ids(self) -> &'static [&'static str] {
        match self {
            PartyStructure::Bipartite => &["bipartite-NS1", "bipartite-NS2"],
            PartyStructure::TripartiteMac => &["NSM1", "NSM2", "NSM3"],
            PartyStructure::TripartiteBc => &["NSM1-BC", "NSM2-BC", "NSM3-BC"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PartyStructure::Bipartite => "bipartite",
            PartyStructure::TripartiteMac => "tripartite_mac",
            PartyStructure::TripartiteBc => "tripartite_bc",
        }
    }
}

/// Party structure plus per-axis alphabet sizes, in canonical axis order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxShape {
    pub structure: PartyStructure,
    pub outputs: Vec<usize>,
    pub inputs: Vec<usize>,
}

impl BoxShape {
    pub fn new(structure: PartyStructure, outputs: Vec<usize>, inputs: Vec<usize>) -> Result<Self> {
        let n = structure.parties();
        if outputs.len() != n || inputs.len() != n {
            return Err(Error::structural(format!(
                "{} shape needs {n} output and {n} input sizes",
                structure.as_str()
            )));
        }
        if outputs.iter().chain(&inputs).any(|&s| s == 0) {
            return Err(Error::structural("alphabet sizes must be at least 1"));
        }
        Ok(BoxShape { structure, outputs, inputs })
    }

    pub fn binary_bipartite() -> Self {
        BoxShape { structure: PartyStructure::Bipartite, outputs: vec![2, 2], inputs: vec![2, 2] }
    }

    /// Binary senders and receiver output with a ternary channel output.
    pub fn default_mac() -> Self {
        BoxShape { structure: PartyStructure::TripartiteMac, outputs: vec![2, 2, 2], inputs: vec![2, 2, 3] }
    }

    pub fn binary_bc() -> Self {
        BoxShape { structure: PartyStructure::TripartiteBc, outputs: vec![2, 2, 2], inputs: vec![2, 2, 2] }
    }

    pub fn output_axes(&self) -> Vec<Alphabet> {
        self.structure.output_names().iter().zip(&self.outputs).map(|(n, &s)| Alphabet::new(*n, s)).collect()
    }

    pub fn input_axes(&self) -> Vec<Alphabet> {
        self.structure.input_names().iter().zip(&self.inputs).map(|(n, &s)| Alphabet::new(*n, s)).collect()
    }

    pub fn of(law: &ConditionalPmf, structure: PartyStructure) -> Result<Self> {
        BoxShape::new(structure, law.output_sizes(), law.input_sizes())
    }
}

impl FromStr for BoxShape {
    type Err = Error;

    /// `bipartite`, `mac` or `bc`, optionally followed by `:` and the
    /// comma-separated output sizes then input sizes.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, sizes) = match s.split_once(':') {
            Some((k, rest)) => (k.trim(), Some(rest)),
            None => (s.trim(), None),
        };
        let default = match kind {
            "bipartite" => BoxShape::binary_bipartite(),
            "mac" | "tripartite_mac" => BoxShape::default_mac(),
            "bc" | "tripartite_bc" => BoxShape::binary_bc(),
            other => return Err(Error::validation(format!("unknown shape kind {other:?}"))),
        };
        let Some(sizes) = sizes else { return Ok(default) };
        let parsed: Vec<usize> = sizes
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::validation(format!("bad size {t:?} in shape"))))
            .collect::<Result<_>>()?;
        let n = default.structure.parties();
        if parsed.len() != 2 * n {
            return Err(Error::validation(format!("shape {kind} needs {} sizes", 2 * n)));
        }
        BoxShape::new(default.structure, parsed[..n].to_vec(), parsed[n..].to_vec())
            .map_err(|e| Error::validation(e.to_string()))
    }
}

impl fmt::Display for BoxShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.structure {
            PartyStructure::Bipartite => "bipartite",
            PartyStructure::TripartiteMac => "mac",
            PartyStructure::TripartiteBc => "bc",
        };
        let sizes: Vec<String> = self.outputs.iter().chain(&self.inputs).map(|s| s.to_string()).collect();
        write!(f, "{kind}:{}", sizes.join(","))
    }
}

/// Rename the law's axes to the canonical names of `structure`.
fn canonical(law: ConditionalPmf, structure: PartyStructure) -> Result<ConditionalPmf> {
    let n = structure.parties();
    if law.output_axes().len() != n || law.input_axes().len() != n {
        return Err(Error::structural(format!(
            "{} box needs {n} output and {n} input axes, got {} and {}",
            structure.as_str(),
            law.output_axes().len(),
            law.input_axes().len()
        )));
    }
    law.rename(structure.output_names(), structure.input_names())
}

macro_rules! box_type {
    ($(#[$doc:meta])* $name:ident, $structure:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            law: ConditionalPmf,
        }

        impl $name {
            pub const STRUCTURE: PartyStructure = $structure;

            /// Wrap a law, renaming its axes to the canonical party names.
            pub fn new(law: ConditionalPmf) -> Result<Self> {
                Ok($name { law: canonical(law, $structure)? })
            }

            pub fn law(&self) -> &ConditionalPmf {
                &self.law
            }

            pub fn into_law(self) -> ConditionalPmf {
                self.law
            }

            pub fn shape(&self) -> BoxShape {
                BoxShape::of(&self.law, $structure).expect("canonical box has a valid shape")
            }

            pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> f64 {
                self.law.get(outputs, inputs)
            }

            pub fn with_tolerance(self, tol: f64) -> Self {
                $name { law: self.law.set_tolerance(tol) }
            }

            /// Entrywise convex combination of same-shape boxes.
            pub fn mix(boxes: &[&$name], weights: &[f64]) -> Result<Self> {
                let laws: Vec<&ConditionalPmf> = boxes.iter().map(|b| &b.law).collect();
                Ok($name { law: ConditionalPmf::mix(&laws, weights)? })
            }
        }
    };
}

box_type!(
    /// `P(x1, x2 | i1, i2)` shared by two senders.
    BipartiteBox,
    PartyStructure::Bipartite
);
box_type!(
    /// `P(x1, x2, j | i1, i2, y)` over a multiple-access channel.
    TripartiteMacBox,
    PartyStructure::TripartiteMac
);
box_type!(
    /// `P(x, j1, j2 | i, y1, y2)` over a broadcast channel.
    TripartiteBcBox,
    PartyStructure::TripartiteBc
);

/// A box of any party structure, as read from a box file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyBox {
    Bipartite(BipartiteBox),
    Mac(TripartiteMacBox),
    Bc(TripartiteBcBox),
}

impl AnyBox {
    pub fn new(structure: PartyStructure, law: ConditionalPmf) -> Result<Self> {
        Ok(match structure {
            PartyStructure::Bipartite => AnyBox::Bipartite(BipartiteBox::new(law)?),
            PartyStructure::TripartiteMac => AnyBox::Mac(TripartiteMacBox::new(law)?),
            PartyStructure::TripartiteBc => AnyBox::Bc(TripartiteBcBox::new(law)?),
        })
    }

    pub fn structure(&self) -> PartyStructure {
        match self {
            AnyBox::Bipartite(_) => PartyStructure::Bipartite,
            AnyBox::Mac(_) => PartyStructure::TripartiteMac,
            AnyBox::Bc(_) => PartyStructure::TripartiteBc,
        }
    }

    pub fn law(&self) -> &ConditionalPmf {
        match self {
            AnyBox::Bipartite(b) => b.law(),
            AnyBox::Mac(b) => b.law(),
            AnyBox::Bc(b) => b.law(),
        }
    }

    pub fn shape(&self) -> BoxShape {
        BoxShape::of(self.law(), self.structure()).expect("canonical box has a valid shape")
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        match self {
            AnyBox::Bipartite(b) => AnyBox::Bipartite(b.with_tolerance(tol)),
            AnyBox::Mac(b) => AnyBox::Mac(b.with_tolerance(tol)),
            AnyBox::Bc(b) => AnyBox::Bc(b.with_tolerance(tol)),
        }
    }
}

impl From<BipartiteBox> for AnyBox {
    fn from(b: BipartiteBox) -> Self {
        AnyBox::Bipartite(b)
    }
}

impl From<TripartiteMacBox> for AnyBox {
    fn from(b: TripartiteMacBox) -> Self {
        AnyBox::Mac(b)
    }
}

impl From<TripartiteBcBox> for AnyBox {
    fn from(b: TripartiteBcBox) -> Self {
        AnyBox::Bc(b)
    }
}

#[derive(Serialize, Deserialize)]
struct BoxFile {
    party_structure: PartyStructure,
    #[serde(flatten)]
    law: RawConditional,
}

impl Serialize for AnyBox {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoxFile { party_structure: self.structure(), law: self.law().clone().into() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnyBox {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = BoxFile::deserialize(d)?;
        let law = ConditionalPmf::try_from(file.law).map_err(serde::de::Error::custom)?;
        AnyBox::new(file.party_structure, law).map_err(serde::de::Error::custom)
    }
}
