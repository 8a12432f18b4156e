//! Discrete memoryless channels: point-to-point, multiple-access and broadcast.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{Alphabet, ConditionalPmf, RawConditional};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Dmc,
    Mac,
    Bc,
}

impl ChannelKind {
    fn output_names(self) -> &'static [&'static str] {
        match self {
            ChannelKind::Dmc | ChannelKind::Mac => &["Y"],
            ChannelKind::Bc => &["Y1", "Y2"],
        }
    }

    fn input_names(self) -> &'static [&'static str] {
        match self {
            ChannelKind::Dmc | ChannelKind::Bc => &["X"],
            ChannelKind::Mac => &["X1", "X2"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kind: ChannelKind,
    law: ConditionalPmf,
}

impl Channel {
    /// Wrap a law, renaming axes to `Y|X`, `Y|X1,X2` or `Y1,Y2|X`.
    pub fn new(kind: ChannelKind, law: ConditionalPmf) -> Result<Self> {
        let (outs, ins) = (kind.output_names(), kind.input_names());
        if law.output_axes().len() != outs.len() || law.input_axes().len() != ins.len() {
            return Err(Error::structural(format!(
                "{kind:?} channel needs {} output and {} input axes",
                outs.len(),
                ins.len()
            )));
        }
        Ok(Channel { kind, law: law.rename(outs, ins)? })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn law(&self) -> &ConditionalPmf {
        &self.law
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        Channel { kind: self.kind, law: self.law.set_tolerance(tol) }
    }

    pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> f64 {
        self.law.get(outputs, inputs)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    kind: ChannelKind,
    #[serde(flatten)]
    law: RawConditional,
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelFile { kind: self.kind, law: self.law.clone().into() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = ChannelFile::deserialize(d)?;
        let law = ConditionalPmf::try_from(file.law).map_err(serde::de::Error::custom)?;
        Channel::new(file.kind, law).map_err(serde::de::Error::custom)
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} probability {p} outside [0,1]")))
    }
}

/// Noiseless `y = x1 + weight * x2` over `x1 < q1`, `x2 < q2`.
pub fn weighted_adder_mac(q1: usize, q2: usize, weight: usize) -> Result<Channel> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::structural("adder inputs need nonempty alphabets"));
    }
    let ny = (q1 - 1) + weight * (q2 - 1) + 1;
    let law = ConditionalPmf::deterministic(
        vec![Alphabet::new("Y", ny)],
        vec![Alphabet::new("X1", q1), Alphabet::new("X2", q2)],
        |x| vec![x[0] + weight * x[1]],
    )?;
    Channel::new(ChannelKind::Mac, law)
}

/// Binary adder: `y = x1 + x2` in `{0, 1, 2}`.
pub fn binary_adder_mac() -> Channel {
    weighted_adder_mac(2, 2, 1).expect("binary adder is well formed")
}

/// Binary erasure channel. The erasure symbol is the last index, labeled `"erased"`.
pub fn erasure_channel(p: f64) -> Result<Channel> {
    check_probability(p, "erasure")?;
    let y = Alphabet::new("Y", 3).with_labels(vec!["0".into(), "1".into(), "erased".into()]);
    let law = ConditionalPmf::from_fn(vec![y], vec![Alphabet::binary("X")], |o, i| {
        if o[0] == 2 {
            p
        } else if o[0] == i[0] {
            1.0 - p
        } else {
            0.0
        }
    })?;
    Channel::new(ChannelKind::Dmc, law)
}

pub fn binary_symmetric_channel(p: f64) -> Result<Channel> {
    check_probability(p, "crossover")?;
    let law = ConditionalPmf::from_fn(vec![Alphabet::binary("Y")], vec![Alphabet::binary("X")], |o, i| {
        if o[0] == i[0] {
            1.0 - p
        } else {
            p
        }
    })?;
    Channel::new(ChannelKind::Dmc, law)
}

/// `y = x` over an alphabet of size `n`.
pub fn identity_channel(n: usize) -> Channel {
    let law = ConditionalPmf::deterministic(vec![Alphabet::new("Y", n)], vec![Alphabet::new("X", n)], |x| x.to_vec())
        .expect("identity is deterministic");
    Channel::new(ChannelKind::Dmc, law).expect("dmc shape")
}

/// `y = 0` for every input in an alphabet of size `n`.
pub fn constant_channel(n: usize) -> Channel {
    let law = ConditionalPmf::deterministic(vec![Alphabet::binary("Y")], vec![Alphabet::new("X", n)], |_| vec![0])
        .expect("constant is deterministic");
    Channel::new(ChannelKind::Dmc, law).expect("dmc shape")
}

/// `y = BSC_p(x1) + BSC_p(x2)` with independent flips.
pub fn noisy_adder_mac(p: f64) -> Result<Channel> {
    check_probability(p, "crossover")?;
    let flip = |out: usize, inp: usize| if out == inp { 1.0 - p } else { p };
    let law = ConditionalPmf::from_fn(
        vec![Alphabet::new("Y", 3)],
        vec![Alphabet::binary("X1"), Alphabet::binary("X2")],
        |o, x| {
            let mut total = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    if a + b == o[0] {
                        total += flip(a, x[0]) * flip(b, x[1]);
                    }
                }
            }
            total
        },
    )?;
    Channel::new(ChannelKind::Mac, law)
}

/// `P(y1, y2 | x) = P1(y1 | x) P2(y2 | x)`.
pub fn product_bc(c1: &Channel, c2: &Channel) -> Result<Channel> {
    if c1.kind != ChannelKind::Dmc || c2.kind != ChannelKind::Dmc {
        return Err(Error::structural("product broadcast channel needs two point-to-point channels"));
    }
    if c1.law.input_sizes() != c2.law.input_sizes() {
        return Err(Error::structural("component channels have different input alphabets"));
    }
    let y1 = c1.law.output_axes()[0].renamed("Y1");
    let y2 = c2.law.output_axes()[0].renamed("Y2");
    let x = c1.law.input_axes()[0].clone();
    let law = ConditionalPmf::from_fn(vec![y1, y2], vec![x], |o, i| c1.get(&o[..1], i) * c2.get(&o[1..], i))?;
    Channel::new(ChannelKind::Bc, law)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_entries() {
        let c = binary_adder_mac();
        assert_eq!(c.get(&[1], &[0, 1]), 1.0);
        assert_eq!(c.get(&[2], &[1, 1]), 1.0);
        assert_eq!(c.get(&[0], &[1, 0]), 0.0);
    }

    #[test]
    fn erasure_entries() {
        let c = erasure_channel(0.5).unwrap();
        assert_eq!(c.get(&[2], &[0]), 0.5);
        assert_eq!(c.law().output_axes()[0].labels.as_ref().unwrap()[2], "erased");
        let id = erasure_channel(0.0).unwrap();
        assert_eq!(id.get(&[1], &[1]), 1.0);
        let gone = erasure_channel(1.0).unwrap();
        assert_eq!(gone.get(&[2], &[1]), 1.0);
        assert!(matches!(erasure_channel(1.2), Err(Error::Domain(_))));
    }

    #[test]
    fn bsc_entries() {
        assert_eq!(binary_symmetric_channel(0.0).unwrap().get(&[0], &[0]), 1.0);
        let half = binary_symmetric_channel(0.5).unwrap();
        assert_eq!(half.law().column(&[0]), half.law().column(&[1]));
        assert_eq!(binary_symmetric_channel(0.1).unwrap().get(&[1], &[0]), 0.1);
    }

    #[test]
    fn product_bc_entries() {
        let c = product_bc(&binary_symmetric_channel(0.1).unwrap(), &binary_symmetric_channel(0.2).unwrap()).unwrap();
        assert!((c.get(&[0, 0], &[0]) - 0.72).abs() < 1e-15);
        let idc = product_bc(&identity_channel(2), &constant_channel(2)).unwrap();
        assert_eq!(idc.get(&[1, 0], &[1]), 1.0);
        assert!(product_bc(&identity_channel(2), &identity_channel(3)).is_err());
    }

    #[test]
    fn noisy_adder_reduces_to_adder() {
        assert_eq!(noisy_adder_mac(0.0).unwrap().law().values(), binary_adder_mac().law().values());
    }

    #[test]
    fn channel_file_roundtrip() {
        let c = erasure_channel(0.25).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.starts_with("{\"kind\":\"dmc\""));
        assert_eq!(serde_json::from_str::<Channel>(&text).unwrap(), c);
    }
}
