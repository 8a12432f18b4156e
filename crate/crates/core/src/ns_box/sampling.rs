//! Seeded random corpora of boxes: convex mixtures of deterministic local
//! vertices and PR-type vertices, plus signaling contaminations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constructors::{copy_box, local_deterministic};
use super::types::BoxShape;
use crate::error::{Error, Result};
use crate::prob::{tuples, ConditionalPmf};

const MAX_VERTICES: usize = 1 << 16;

/// Every deterministic local box `o_k = f_k(i_k)` of the shape.
pub fn deterministic_vertices(shape: &BoxShape) -> Result<Vec<ConditionalPmf>> {
    let per_party: Vec<Vec<Vec<usize>>> =
        shape.inputs.iter().zip(&shape.outputs).map(|(&ni, &no)| tuples(&vec![no; ni]).collect()).collect();
    let count: usize = per_party.iter().map(Vec::len).product();
    if count > MAX_VERTICES {
        return Err(Error::resource(format!("{count} deterministic vertices exceed {MAX_VERTICES}")));
    }
    let sizes: Vec<usize> = per_party.iter().map(Vec::len).collect();
    tuples(&sizes)
        .map(|pick| {
            let maps: Vec<Vec<usize>> = pick.iter().zip(&per_party).map(|(&p, opts)| opts[p].clone()).collect();
            local_deterministic(shape, &maps)
        })
        .collect()
}

/// Non-constant maps from an alphabet of size `n` onto `{0,1}`.
fn coarse_grainings(n: usize) -> Vec<Vec<usize>> {
    tuples(&vec![2; n]).filter(|g| g.iter().any(|&v| v != g[0])).collect()
}

/// PR-type vertices: a relabeled PR box between two parties with binary
/// outputs, `o_k ^ o_l = g_k(i_k) g_l(i_l) ^ a g_k ^ b g_l ^ c`, and every
/// remaining party deterministic local.
pub fn pr_vertices(shape: &BoxShape) -> Result<Vec<ConditionalPmf>> {
    let n = shape.structure.parties();
    let mut out = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            if shape.outputs[k] != 2 || shape.outputs[l] != 2 {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&m| m != k && m != l).collect();
            let rest_maps: Vec<Vec<Vec<usize>>> =
                rest.iter().map(|&m| tuples(&vec![shape.outputs[m]; shape.inputs[m]]).collect()).collect();
            let rest_sizes: Vec<usize> = rest_maps.iter().map(Vec::len).collect();
            for gk in coarse_grainings(shape.inputs[k]) {
                for gl in coarse_grainings(shape.inputs[l]) {
                    for abc in tuples(&[2, 2, 2]) {
                        for pick in tuples(&rest_sizes) {
                            if out.len() >= MAX_VERTICES {
                                return Err(Error::resource("too many PR-type vertices"));
                            }
                            let law = ConditionalPmf::from_fn(shape.output_axes(), shape.input_axes(), |o, i| {
                                let (x, y) = (gk[i[k]], gl[i[l]]);
                                let parity = (x & y) ^ (abc[0] & x) ^ (abc[1] & y) ^ abc[2];
                                if o[k] ^ o[l] != parity {
                                    return 0.0;
                                }
                                let local_ok = rest
                                    .iter()
                                    .zip(&pick)
                                    .zip(&rest_maps)
                                    .all(|((&m, &p), maps)| o[m] == maps[p][i[m]]);
                                if local_ok {
                                    0.5
                                } else {
                                    0.0
                                }
                            })?;
                            out.push(law);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Dirichlet(1, .., 1) weights.
fn flat_dirichlet(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// A labeled corpus member.
#[derive(Debug, Clone)]
pub struct SampledBox {
    pub law: ConditionalPmf,
    /// `Some(k)` for boxes contaminated by a copy vertex that signals through party `k`.
    pub planted_family: Option<usize>,
}

/// Seeded sampler over the vertex pool of one shape.
pub struct BoxSampler {
    shape: BoxShape,
    pool: Vec<ConditionalPmf>,
    rng: ChaCha8Rng,
}

impl BoxSampler {
    pub fn new(shape: BoxShape, seed: u64) -> Result<Self> {
        let mut pool = deterministic_vertices(&shape)?;
        pool.extend(pr_vertices(&shape)?);
        Ok(BoxSampler { shape, pool, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn shape(&self) -> &BoxShape {
        &self.shape
    }

    pub fn pool_size(&self) -> usize {
        self.pool.len()
    }

    /// Mixture of one to three pool vertices with flat Dirichlet weights.
    pub fn ns_mixture(&mut self) -> ConditionalPmf {
        let count = self.rng.gen_range(1..=3);
        let picks: Vec<&ConditionalPmf> =
            (0..count).map(|_| self.pool.choose(&mut self.rng).expect("non-empty pool")).collect();
        let weights = flat_dirichlet(&mut self.rng, count);
        ConditionalPmf::mix(&picks, &weights).expect("pool vertices share the shape")
    }

    /// `(1-w) * ns + w * copy` with `w` in `[0.2, 1]`, signaling through a random party.
    pub fn contaminated(&mut self) -> SampledBox {
        let n = self.shape.structure.parties();
        let candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|k| (0..n).map(move |l| (k, l)))
            .filter(|&(k, l)| k != l && self.shape.inputs[k] >= 2 && self.shape.outputs[l] >= 2)
            .collect();
        let base = self.ns_mixture();
        let &(k, l) = candidates.choose(&mut self.rng).expect("shape admits a copy vertex");
        let w = self.rng.gen_range(0.2..=1.0);
        let copy = copy_box(&self.shape, k, l).expect("valid parties");
        let law = ConditionalPmf::mix(&[&base, &copy], &[1.0 - w, w]).expect("same shape");
        SampledBox { law, planted_family: Some(k) }
    }

    pub fn corpus(&mut self, n_ns: usize, n_signaling: usize) -> Vec<SampledBox> {
        let mut out: Vec<SampledBox> =
            (0..n_ns).map(|_| SampledBox { law: self.ns_mixture(), planted_family: None }).collect();
        out.extend((0..n_signaling).map(|_| self.contaminated()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_box::checks::check_ns_law;

    #[test]
    fn vertex_counts() {
        let shape = BoxShape::default_mac();
        assert_eq!(deterministic_vertices(&shape).unwrap().len(), 128);
        assert_eq!(deterministic_vertices(&BoxShape::binary_bipartite()).unwrap().len(), 16);
        // bipartite: 2 * 2 coarse grainings, 8 parity offsets
        assert_eq!(pr_vertices(&BoxShape::binary_bipartite()).unwrap().len(), 32);
    }

    #[test]
    fn pr_vertices_are_ns() {
        let shape = BoxShape::default_mac();
        for v in pr_vertices(&shape).unwrap() {
            assert!(check_ns_law(&v, shape.structure).passed);
        }
    }

    #[test]
    fn sampler_is_seeded() {
        let mut a = BoxSampler::new(BoxShape::default_mac(), 7).unwrap();
        let mut b = BoxSampler::new(BoxShape::default_mac(), 7).unwrap();
        assert_eq!(a.ns_mixture(), b.ns_mixture());
    }

    #[test]
    fn contaminated_boxes_signal_through_the_planted_party() {
        let shape = BoxShape::binary_bc();
        let mut s = BoxSampler::new(shape.clone(), 3).unwrap();
        for _ in 0..20 {
            let b = s.contaminated();
            let r = check_ns_law(&b.law, shape.structure);
            let k = b.planted_family.unwrap();
            assert_eq!(r.violated_families(), vec![shape.structure.prob_constraint_ids()[k]]);
        }
    }
}
