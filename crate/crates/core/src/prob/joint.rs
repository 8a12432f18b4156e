use serde::{Deserialize, Serialize};

use super::tensor::{
    check_entries, check_unique_names, format_tuple, ravel, sizes_of, tuples, volume, Alphabet, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};

/// A joint probability mass function over named axes. Values are stored
/// row-major in axis order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    values: Vec<f64>,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    axes: Vec<Alphabet>,
    values: Vec<f64>,
}

impl TryFrom<RawJoint> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        JointPmf::new(raw.axes, raw.values)
    }
}

impl From<JointPmf> for RawJoint {
    fn from(p: JointPmf) -> Self {
        RawJoint { axes: p.axes, values: p.values }
    }
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(axes, values, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(axes: Vec<Alphabet>, values: Vec<f64>, tol: f64) -> Result<Self> {
        for a in &axes {
            a.validate()?;
        }
        check_unique_names(axes.iter().map(|a| a.name.as_str()))?;
        let expected = volume(&sizes_of(&axes));
        if values.len() != expected {
            return Err(Error::structural(format!("joint pmf expects {expected} values, got {}", values.len())));
        }
        let values = check_entries(&values, tol)?;
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > tol.max(1e-12 * values.len() as f64) {
            return Err(Error::domain(format!("joint pmf has total mass {total}")));
        }
        Ok(JointPmf { axes, values, tol })
    }

    pub fn from_fn(axes: Vec<Alphabet>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let values = tuples(&sizes_of(&axes)).map(|t| f(&t)).collect();
        Self::new(axes, values)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Self {
        let n = volume(&sizes_of(&axes));
        JointPmf { axes, values: vec![1.0 / n as f64; n], tol: DEFAULT_TOLERANCE }
    }

    pub fn point_mass(axes: Vec<Alphabet>, at: &[usize]) -> Result<Self> {
        let sizes = sizes_of(&axes);
        if at.len() != sizes.len() || at.iter().zip(&sizes).any(|(&a, &s)| a >= s) {
            return Err(Error::structural(format!("point {} out of range", format_tuple(at))));
        }
        let flat = ravel(at, &sizes);
        Self::from_fn(axes, |t| if ravel(t, &sizes) == flat { 1.0 } else { 0.0 })
    }

    /// Product of independent joints, axes concatenated in argument order.
    pub fn product(parts: &[&JointPmf]) -> Result<Self> {
        let axes: Vec<Alphabet> = parts.iter().flat_map(|p| p.axes.iter().cloned()).collect();
        let mut values = vec![1.0];
        for p in parts {
            values = values.iter().flat_map(|&a| p.values.iter().map(move |&b| a * b)).collect();
        }
        Self::new(axes, values)
    }

    pub fn set_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sizes(&self) -> Vec<usize> {
        sizes_of(&self.axes)
    }

    pub fn get(&self, at: &[usize]) -> f64 {
        self.values[ravel(at, &self.sizes())]
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes.iter().position(|a| a.name == name).ok_or_else(|| Error::structural(format!("unknown axis {name}")))
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut pos: Vec<usize> = names.iter().map(|n| self.axis_index(n)).collect::<Result<_>>()?;
        pos.sort_unstable();
        if pos.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::structural("axis listed twice"));
        }
        Ok(pos)
    }

    /// Sum out every axis not in `keep`. Kept axes retain their original order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let pos = self.positions(keep)?;
        Ok(self.marginal_at(&pos))
    }

    pub(crate) fn marginal_at(&self, pos: &[usize]) -> JointPmf {
        let sizes = self.sizes();
        let kept_sizes: Vec<usize> = pos.iter().map(|&p| sizes[p]).collect();
        let mut values = vec![0.0; volume(&kept_sizes)];
        let mut sub = vec![0; pos.len()];
        for (flat, t) in tuples(&sizes).enumerate() {
            for (s, &p) in sub.iter_mut().zip(pos) {
                *s = t[p];
            }
            values[ravel(&sub, &kept_sizes)] += self.values[flat];
        }
        JointPmf { axes: pos.iter().map(|&p| self.axes[p].clone()).collect(), values, tol: self.tol }
    }

    /// Restrict to the event `axis = symbol` for each pair in `on`, drop those
    /// axes and renormalize.
    pub fn condition(&self, on: &[(&str, usize)]) -> Result<JointPmf> {
        let names: Vec<&str> = on.iter().map(|(n, _)| *n).collect();
        let pos = self.positions(&names)?;
        let mut fixed = vec![None; self.axes.len()];
        for (name, sym) in on {
            let p = self.axis_index(name)?;
            if *sym >= self.axes[p].size {
                return Err(Error::structural(format!("symbol {sym} out of range for axis {name}")));
            }
            fixed[p] = Some(*sym);
        }
        let keep: Vec<usize> = (0..self.axes.len()).filter(|p| !pos.contains(p)).collect();
        let sizes = self.sizes();
        let kept_sizes: Vec<usize> = keep.iter().map(|&p| sizes[p]).collect();
        let mut values = vec![0.0; volume(&kept_sizes)];
        for (flat, t) in tuples(&sizes).enumerate() {
            if t.iter().zip(&fixed).all(|(v, f)| f.is_none_or(|f| f == *v)) {
                let sub: Vec<usize> = keep.iter().map(|&p| t[p]).collect();
                values[ravel(&sub, &kept_sizes)] += self.values[flat];
            }
        }
        let mass: f64 = values.iter().sum();
        if mass <= self.tol {
            let event: Vec<String> = on.iter().map(|(n, s)| format!("{n}={s}")).collect();
            return Err(Error::NullEvent { event: event.join(","), mass });
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Ok(JointPmf { axes: keep.iter().map(|&p| self.axes[p].clone()).collect(), values, tol: self.tol })
    }

    /// Same values, axes renamed positionally.
    pub fn rename(&self, names: &[&str]) -> Result<JointPmf> {
        if names.len() != self.axes.len() {
            return Err(Error::structural("rename needs one name per axis"));
        }
        let axes = self.axes.iter().zip(names).map(|(a, n)| a.renamed(*n)).collect();
        JointPmf::with_tolerance(axes, self.values.clone(), self.tol)
    }

    pub(crate) fn from_parts_unchecked(axes: Vec<Alphabet>, values: Vec<f64>, tol: f64) -> Self {
        JointPmf { axes, values, tol }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(names: &[&str]) -> Vec<Alphabet> {
        names.iter().map(|n| Alphabet::binary(*n)).collect()
    }

    #[test]
    fn marginal_of_uniform_is_uniform() {
        let p = JointPmf::uniform(bits(&["A", "B"]));
        let m = p.marginalize(&["A"]).unwrap();
        assert_eq!(m.values(), &[0.5, 0.5]);
    }

    #[test]
    fn marginal_of_point_mass() {
        let p = JointPmf::point_mass(bits(&["A", "B"]), &[0, 1]).unwrap();
        let m = p.marginalize(&["B"]).unwrap();
        assert_eq!(m.values(), &[0.0, 1.0]);
    }

    #[test]
    fn marginalize_unknown_axis_is_structural() {
        let p = JointPmf::uniform(bits(&["A"]));
        assert!(matches!(p.marginalize(&["Q"]), Err(Error::Structural(_))));
    }

    #[test]
    fn condition_independent_bits() {
        let p = JointPmf::uniform(bits(&["A", "B"]));
        let c = p.condition(&[("A", 0)]).unwrap();
        assert_eq!(c.values(), &[0.5, 0.5]);
        assert_eq!(c.axes()[0].name, "B");
    }

    #[test]
    fn condition_correlated_bits() {
        let p = JointPmf::new(bits(&["A", "B"]), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c = p.condition(&[("A", 1)]).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
    }

    #[test]
    fn condition_on_null_event_carries_mass() {
        let p = JointPmf::point_mass(bits(&["A", "B"]), &[0, 0]).unwrap();
        match p.condition(&[("A", 1)]) {
            Err(Error::NullEvent { mass, .. }) => assert_eq!(mass, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(JointPmf::new(bits(&["A"]), vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(bits(&["A"]), vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(bits(&["A", "A"]), vec![0.25; 4]).is_err());
    }
}
