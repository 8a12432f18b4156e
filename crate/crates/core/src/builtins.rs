//! Named boxes, channels, scenarios and games used by the command line and demo.

use crate::channel::{
    binary_adder_mac, binary_symmetric_channel, erasure_channel, identity_channel, noisy_adder_mac, product_bc, Channel,
};
use crate::error::{Error, Result};
use crate::lp::GameSpec;
use crate::ns_box::{
    constant_decoder, identity_bc_box, identity_decoder, identity_mac_box, lift_sender_box_mac, make_anti_pr_box,
    make_pr_box, uniform_box, AnyBox, BoxShape, PartyStructure,
};
use crate::protocols::{
    bob_clean_scenario, bob_leaky_scenario, null_scenario, plaintext_adder_scenario, pr_ot_scenario, rabin_ot_scenario,
    ProtocolScenario,
};

pub const BOX_NAMES: &[&str] = &[
    "pr",
    "anti_pr",
    "uniform_bipartite",
    "identity_mac",
    "product_uniform_mac",
    "pr_lift_identity",
    "pr_lift_constant",
    "identity_bc",
    "product_uniform_bc",
];
pub const CHANNEL_NAMES: &[&str] =
    &["adder", "erasure:<p>", "bsc:<p>", "noisy_adder:<p>", "identity:<n>", "identity_bc", "bsc_bc:<p>"];
pub const SCENARIO_NAMES: &[&str] =
    &["pr_ot", "rabin_ot", "bob_clean", "bob_leaky", "plaintext_adder", "null", "null:<k>"];
pub const GAME_NAMES: &[&str] = &["chsh"];

/// Strip an optional `builtin:` prefix.
pub fn strip_prefix(name: &str) -> &str {
    name.strip_prefix("builtin:").unwrap_or(name)
}

fn param<T: std::str::FromStr>(name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::validation(format!("builtin {name:?}: cannot parse parameter {raw:?}")))
}

fn unknown(kind: &str, name: &str, known: &[&str]) -> Error {
    Error::validation(format!("unknown builtin {kind} {name:?}; known: {}", known.join(", ")))
}

pub fn builtin_box(name: &str) -> Result<AnyBox> {
    let name = strip_prefix(name);
    Ok(match name {
        "pr" => make_pr_box().into(),
        "anti_pr" => make_anti_pr_box().into(),
        "uniform_bipartite" => AnyBox::new(PartyStructure::Bipartite, uniform_box(&BoxShape::binary_bipartite()))?,
        "identity_mac" => identity_mac_box(3).into(),
        "product_uniform_mac" => {
            let shape = BoxShape::new(PartyStructure::TripartiteMac, vec![2, 2, 2], vec![2, 2, 3])?;
            AnyBox::new(PartyStructure::TripartiteMac, uniform_box(&shape))?
        }
        "pr_lift_identity" => lift_sender_box_mac(&make_pr_box(), &identity_decoder(3))?.into(),
        "pr_lift_constant" => lift_sender_box_mac(&make_pr_box(), &constant_decoder(3))?.into(),
        "identity_bc" => identity_bc_box().into(),
        "product_uniform_bc" => AnyBox::new(PartyStructure::TripartiteBc, uniform_box(&BoxShape::binary_bc()))?,
        _ => return Err(unknown("box", name, BOX_NAMES)),
    })
}

pub fn builtin_channel(name: &str) -> Result<Channel> {
    let name = strip_prefix(name);
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    match (head, arg) {
        ("adder", None) => Ok(binary_adder_mac()),
        ("identity_bc", None) => product_bc(&identity_channel(2), &identity_channel(2)),
        ("erasure", Some(p)) => erasure_channel(param(name, p)?),
        ("bsc", Some(p)) => binary_symmetric_channel(param(name, p)?),
        ("noisy_adder", Some(p)) => noisy_adder_mac(param(name, p)?),
        ("identity", Some(n)) => {
            let n: usize = param(name, n)?;
            if n == 0 {
                return Err(Error::validation("builtin identity channel needs n >= 1"));
            }
            Ok(identity_channel(n))
        }
        ("bsc_bc", Some(p)) => {
            let c = binary_symmetric_channel(param(name, p)?)?;
            product_bc(&c, &c)
        }
        _ => Err(unknown("channel", name, CHANNEL_NAMES)),
    }
}

pub fn builtin_scenario(name: &str) -> Result<ProtocolScenario> {
    let name = strip_prefix(name);
    match name {
        "pr_ot" => Ok(pr_ot_scenario()),
        "rabin_ot" => Ok(rabin_ot_scenario()),
        "bob_clean" => Ok(bob_clean_scenario()),
        "bob_leaky" => Ok(bob_leaky_scenario()),
        "plaintext_adder" => Ok(plaintext_adder_scenario()),
        "null" => null_scenario(1),
        _ => match name.strip_prefix("null:") {
            Some(k) => null_scenario(param(name, k)?),
            None => Err(unknown("scenario", name, SCENARIO_NAMES)),
        },
    }
}

pub fn builtin_game(name: &str) -> Result<GameSpec> {
    match strip_prefix(name) {
        "chsh" => Ok(GameSpec::chsh()),
        other => Err(unknown("game", other, GAME_NAMES)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_box::check_ns;

    #[test]
    fn every_box_is_non_signaling() {
        for name in BOX_NAMES {
            let b = builtin_box(name).unwrap();
            assert!(check_ns(&b).passed, "{name}");
        }
        assert!(builtin_box("builtin:pr").is_ok());
        assert!(matches!(builtin_box("nope"), Err(Error::Validation(_))));
    }

    #[test]
    fn parameterized_channels() {
        assert_eq!(builtin_channel("erasure:0.5").unwrap(), erasure_channel(0.5).unwrap());
        assert_eq!(builtin_channel("builtin:bsc:0.1").unwrap(), binary_symmetric_channel(0.1).unwrap());
        assert!(builtin_channel("bsc_bc:0.2").is_ok());
        assert!(builtin_channel("identity_bc").is_ok());
        assert!(matches!(builtin_channel("bsc:x"), Err(Error::Validation(_))));
        assert!(matches!(builtin_channel("bsc:2"), Err(Error::Domain(_))));
        assert!(matches!(builtin_channel("bsc"), Err(Error::Validation(_))));
    }

    #[test]
    fn scenarios_and_games() {
        for name in ["pr_ot", "rabin_ot", "bob_clean", "bob_leaky", "plaintext_adder", "null", "null:2"] {
            assert!(builtin_scenario(name).is_ok(), "{name}");
        }
        assert!(builtin_game("chsh").is_ok());
        assert!(builtin_scenario("null:9").is_err());
    }
}
