use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::simplex::{maximize, LpSolution};
use super::system::{build_ns_system, law_from_point};
use crate::error::{Error, Result};
use crate::ns_box::{AnyBox, BoxShape, PartyStructure};
use crate::prob::{format_tuple, ravel, tuples, volume};

/// Largest LP the game solver accepts.
pub const MAX_LP_VARIABLES: usize = 10_000;

type Key = (Vec<usize>, Vec<usize>);

/// A nonlocal game: a law on the party inputs and a payoff per
/// `(inputs, outputs)`. Missing payoff entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    input_dist: Vec<f64>,
    payoff: BTreeMap<Key, f64>,
}

fn parse_tuple(s: &str) -> Option<Vec<usize>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// Parse `"(i1,i2)->(o1,o2)"`.
pub fn parse_payoff_key(key: &str) -> Result<Key> {
    let (a, b) = key
        .split_once("->")
        .ok_or_else(|| Error::validation(format!("payoff key {key:?} is not of the form (inputs)->(outputs)")))?;
    match (parse_tuple(a), parse_tuple(b)) {
        (Some(i), Some(o)) => Ok((i, o)),
        _ => Err(Error::validation(format!("payoff key {key:?} has a malformed tuple"))),
    }
}

impl GameSpec {
    pub fn new(input_dist: Vec<f64>, payoff: BTreeMap<Key, f64>) -> Result<Self> {
        if input_dist.is_empty() || input_dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::validation("game input_dist entries must lie in [0,1]"));
        }
        let total: f64 = input_dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("game input_dist sums to {total}, not 1")));
        }
        if let Some(v) = payoff.values().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("game payoff {v} is not finite")));
        }
        Ok(GameSpec { input_dist, payoff })
    }

    pub fn input_dist(&self) -> &[f64] {
        &self.input_dist
    }

    pub fn payoff(&self, inputs: &[usize], outputs: &[usize]) -> f64 {
        self.payoff.get(&(inputs.to_vec(), outputs.to_vec())).copied().unwrap_or(0.0)
    }

    /// Check that the game fits `shape`.
    pub fn check_shape(&self, shape: &BoxShape) -> Result<()> {
        if self.input_dist.len() != volume(&shape.inputs) {
            return Err(Error::structural(format!(
                "input_dist has {} entries, shape {shape} has {} input tuples",
                self.input_dist.len(),
                volume(&shape.inputs)
            )));
        }
        let fits = |t: &[usize], sizes: &[usize]| t.len() == sizes.len() && t.iter().zip(sizes).all(|(a, s)| a < s);
        for (i, o) in self.payoff.keys() {
            if !fits(i, &shape.inputs) || !fits(o, &shape.outputs) {
                return Err(Error::structural(format!(
                    "payoff entry {}->{} is outside shape {shape}",
                    format_tuple(i),
                    format_tuple(o)
                )));
            }
        }
        Ok(())
    }

    /// Objective coefficients over box entries in storage order.
    pub fn objective(&self, shape: &BoxShape) -> Vec<f64> {
        let mut c = vec![0.0; volume(&shape.inputs) * volume(&shape.outputs)];
        let block = volume(&shape.outputs);
        for ((i, o), &v) in &self.payoff {
            let ii = ravel(i, &shape.inputs);
            c[ii * block + ravel(o, &shape.outputs)] += self.input_dist[ii] * v;
        }
        c
    }

    /// Expected payoff of a box of the right shape.
    pub fn value_of(&self, b: &AnyBox) -> Result<f64> {
        let shape = b.shape();
        self.check_shape(&shape)?;
        Ok(self.objective(&shape).iter().zip(b.law().values()).map(|(c, p)| c * p).sum())
    }

    /// CHSH: uniform binary inputs, win iff `x1 xor x2 = i1 and i2`.
    pub fn chsh() -> Self {
        let mut payoff = BTreeMap::new();
        for t in tuples(&[2, 2, 2, 2]) {
            if t[2] ^ t[3] == t[0] & t[1] {
                payoff.insert((t[..2].to_vec(), t[2..].to_vec()), 1.0);
            }
        }
        GameSpec::new(vec![0.25; 4], payoff).expect("chsh is well formed")
    }
}

#[derive(Serialize, Deserialize)]
struct GameFile {
    input_dist: Vec<f64>,
    payoff: BTreeMap<String, f64>,
}

impl Serialize for GameSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let payoff =
            self.payoff.iter().map(|((i, o), &v)| (format!("{}->{}", format_tuple(i), format_tuple(o)), v)).collect();
        GameFile { input_dist: self.input_dist.clone(), payoff }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GameSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GameFile::deserialize(d)?;
        let mut payoff = BTreeMap::new();
        for (k, v) in file.payoff {
            let key = parse_payoff_key(&k).map_err(serde::de::Error::custom)?;
            if payoff.insert(key, v).is_some() {
                return Err(serde::de::Error::custom(format!("payoff key {k:?} repeats an entry")));
            }
        }
        GameSpec::new(file.input_dist, payoff).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalValue {
    pub value: f64,
    /// Response tables `x_k = strategy[k][i_k]` of an optimal strategy.
    pub strategy: Vec<Vec<usize>>,
}

/// Best expected payoff over deterministic local strategies.
pub fn local_game_value(g: &GameSpec, shape: &BoxShape) -> Result<LocalValue> {
    if shape.structure != PartyStructure::Bipartite {
        return Err(Error::domain("local game values are computed for bipartite shapes"));
    }
    if shape.inputs.iter().chain(&shape.outputs).any(|&s| s > 4) {
        return Err(Error::resource(format!("shape {shape} exceeds 4 symbols per axis for strategy enumeration")));
    }
    g.check_shape(shape)?;
    let strat_sizes = |k: usize| vec![shape.outputs[k]; shape.inputs[k]];
    let (s1, s2) = (strat_sizes(0), strat_sizes(1));
    let mut best = LocalValue { value: f64::NEG_INFINITY, strategy: Vec::new() };
    for f1 in tuples(&s1) {
        for f2 in tuples(&s2) {
            let mut v = 0.0;
            for (ii, i) in tuples(&shape.inputs).enumerate() {
                v += g.input_dist[ii] * g.payoff(&i, &[f1[i[0]], f2[i[1]]]);
            }
            if v > best.value {
                best = LocalValue { value: v, strategy: vec![f1.clone(), f2.clone()] };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NsValue {
    pub value: f64,
    pub optimizer: AnyBox,
    /// Objective of `optimizer` recomputed from its entries.
    pub optimizer_value: f64,
    /// Dual bound `b·y`, equal to `value` at optimality.
    pub dual_bound: f64,
}

pub(crate) fn solve_over_ns(shape: &BoxShape, objective: &[f64]) -> Result<(LpSolution, AnyBox, f64)> {
    let system = build_ns_system(shape);
    if system.variables > MAX_LP_VARIABLES {
        return Err(Error::resource(format!(
            "shape {shape} needs {} LP variables, limit {MAX_LP_VARIABLES}",
            system.variables
        )));
    }
    let (a, b) = system.dense();
    let sol = maximize(&a, &b, objective)?;
    let dual_bound = sol.dual.iter().zip(&b).map(|(y, b)| y * b).sum();
    let optimizer = AnyBox::new(shape.structure, law_from_point(shape, &sol.x)?)?;
    Ok((sol, optimizer, dual_bound))
}

/// Best expected payoff over the non-signaling polytope.
pub fn ns_game_value(g: &GameSpec, shape: &BoxShape) -> Result<NsValue> {
    g.check_shape(shape)?;
    let objective = g.objective(shape);
    let (sol, optimizer, dual_bound) = solve_over_ns(shape, &objective)?;
    let optimizer_value = objective.iter().zip(optimizer.law().values()).map(|(c, p)| c * p).sum();
    Ok(NsValue { value: sol.value, optimizer, optimizer_value, dual_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::ns_membership;
    use crate::ns_box::make_pr_box;

    fn constant_game(c: f64) -> GameSpec {
        let payoff = tuples(&[2, 2, 2, 2]).map(|t| ((t[..2].to_vec(), t[2..].to_vec()), c)).collect();
        GameSpec::new(vec![0.25; 4], payoff).unwrap()
    }

    #[test]
    fn chsh_values() {
        let s = BoxShape::binary_bipartite();
        let g = GameSpec::chsh();
        assert!((local_game_value(&g, &s).unwrap().value - 0.75).abs() < 1e-12);
        let ns = ns_game_value(&g, &s).unwrap();
        assert!((ns.value - 1.0).abs() < 1e-7);
        assert!((ns.dual_bound - ns.value).abs() < 1e-7);
        assert!((ns.optimizer_value - ns.value).abs() < 1e-7);
        assert!(ns_membership(ns.optimizer.law(), &s).unwrap().passed);
        assert_eq!(g.value_of(&make_pr_box().into()).unwrap(), 1.0);
    }

    #[test]
    fn constant_and_copy_games() {
        let s = BoxShape::binary_bipartite();
        let g = constant_game(0.3);
        assert!((local_game_value(&g, &s).unwrap().value - 0.3).abs() < 1e-12);
        assert!((ns_game_value(&g, &s).unwrap().value - 0.3).abs() < 1e-9);
        let payoff = tuples(&[2, 2, 2, 2]).filter(|t| t[2] == t[0]).map(|t| ((t[..2].to_vec(), t[2..].to_vec()), 1.0));
        let copy = GameSpec::new(vec![0.25; 4], payoff.collect()).unwrap();
        assert_eq!(local_game_value(&copy, &s).unwrap().value, 1.0);
    }

    #[test]
    fn game_file_roundtrip() {
        let text = r#"{"input_dist":[0.25,0.25,0.25,0.25],"payoff":{"(0,0)->(0,0)":1.0,"( 1 , 1 )->(1,0)":0.5}}"#;
        let g: GameSpec = serde_json::from_str(text).unwrap();
        assert_eq!(g.payoff(&[1, 1], &[1, 0]), 0.5);
        let back: GameSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GameSpec>(r#"{"input_dist":[0.5,0.6],"payoff":{}}"#).is_err());
        assert!(serde_json::from_str::<GameSpec>(r#"{"input_dist":[1.0],"payoff":{"0->1":1}}"#).is_err());
    }

    #[test]
    fn shape_checks() {
        let s = BoxShape::default_mac();
        assert!(matches!(ns_game_value(&GameSpec::chsh(), &s), Err(Error::Structural(_))));
        assert!(matches!(local_game_value(&GameSpec::chsh(), &s), Err(Error::Domain(_))));
        let big: BoxShape = "bipartite:5,2,2,2".parse().unwrap();
        assert!(matches!(local_game_value(&GameSpec::chsh(), &big), Err(Error::Resource(_))));
    }
}
