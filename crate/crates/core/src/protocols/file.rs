//! JSON scenario files.

use serde::Deserialize;

use super::model::{Party, ProtocolScenario};
use super::scenarios::{mac_scenario, named_decoder, DecoderSpec, MacScenario, TranscriptEntry};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::ns_box::{lift_sender_box_mac, AnyBox};

/// A box or channel given inline or by reference (builtin name or path).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Named(String),
    Inline(T),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub k1: u32,
    pub k2: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptLine {
    pub from: String,
    #[serde(default)]
    pub reads: Vec<String>,
    pub table: Vec<usize>,
    #[serde(default)]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DecoderField {
    Named(String),
    Table { reads: Vec<String>, table: Vec<usize> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub instance: Instance,
    pub encoders: Vec<Vec<usize>>,
    #[serde(rename = "box")]
    pub box_ref: Ref<AnyBox>,
    pub channel: Ref<Channel>,
    #[serde(default)]
    pub transcript: Vec<TranscriptLine>,
    #[serde(default)]
    pub decoder: Option<DecoderField>,
    /// Receiver decoder (`"identity"` or `"constant"`) used to lift a bipartite sender box.
    #[serde(default)]
    pub bob_decoder: Option<String>,
}

fn party(from: &str) -> Result<Party> {
    match from {
        "alice1" => Ok(Party::Sender(0)),
        "alice2" => Ok(Party::Sender(1)),
        "bob" => Ok(Party::Receiver(0)),
        other => Err(Error::validation(format!("transcript.from: unknown party {other:?}"))),
    }
}

impl ScenarioFile {
    /// Resolve references with the given lookups and build the scenario.
    pub fn into_scenario(
        self,
        name: &str,
        resolve_box: impl Fn(&str) -> Result<AnyBox>,
        resolve_channel: impl Fn(&str) -> Result<Channel>,
    ) -> Result<ProtocolScenario> {
        let channel = match self.channel {
            Ref::Named(n) => resolve_channel(&n)?,
            Ref::Inline(c) => c,
        };
        let boxed = match self.box_ref {
            Ref::Named(n) => resolve_box(&n)?,
            Ref::Inline(b) => b,
        };
        let mac_box = match boxed {
            AnyBox::Mac(b) => b,
            AnyBox::Bipartite(senders) => {
                let name = self
                    .bob_decoder
                    .as_deref()
                    .ok_or_else(|| Error::validation("bob_decoder: required for a bipartite box"))?;
                let y_size = channel.law().output_sizes()[0];
                lift_sender_box_mac(&senders, &named_decoder(name, y_size)?)?
            }
            AnyBox::Bc(_) => return Err(Error::validation("box: scenario files take MAC or bipartite boxes")),
        };
        let encoders: [Vec<usize>; 2] =
            self.encoders.try_into().map_err(|_| Error::validation("encoders: exactly two truth tables required"))?;
        let transcript = self
            .transcript
            .into_iter()
            .map(|t| Ok(TranscriptEntry { from: party(&t.from)?, reads: t.reads, table: t.table, size: t.size }))
            .collect::<Result<_>>()?;
        let decoder = match self.decoder {
            None => DecoderSpec::MaximumLikelihood,
            Some(DecoderField::Named(n)) if n == "ml" => DecoderSpec::MaximumLikelihood,
            Some(DecoderField::Named(n)) => return Err(Error::validation(format!("decoder: unknown decoder {n:?}"))),
            Some(DecoderField::Table { reads, table }) => DecoderSpec::Table { reads, table },
        };
        mac_scenario(
            name,
            &MacScenario { k: [self.instance.k1, self.instance.k2], encoders, mac_box, channel, transcript, decoder },
        )
    }
}
