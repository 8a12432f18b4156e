use super::joint::JointPmf;
use super::tensor::tuples;
use crate::error::{Error, Result};

/// Half the L1 distance between two flat probability vectors.
pub fn tv_vectors(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn tv_distance(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.axes() != q.axes() {
        return Err(Error::structural("total variation between pmfs with different axes"));
    }
    Ok(tv_vectors(p.values(), q.values()).min(1.0))
}

/// Shannon entropy in bits of a flat probability vector.
pub fn entropy_vector(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

pub fn entropy(p: &JointPmf) -> f64 {
    entropy_vector(p.values()).max(0.0)
}

fn disjoint_positions(p: &JointPmf, groups: &[&[&str]]) -> Result<Vec<Vec<usize>>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for g in groups {
        let mut pos = Vec::new();
        for name in g.iter() {
            let i = p.axis_index(name)?;
            if !seen.insert(i) {
                return Err(Error::structural(format!("axis {name} appears in two groups")));
            }
            pos.push(i);
        }
        pos.sort_unstable();
        out.push(pos);
    }
    Ok(out)
}

/// `H(target | given)` in bits.
pub fn conditional_entropy(p: &JointPmf, target: &[&str], given: &[&str]) -> Result<f64> {
    let pos = disjoint_positions(p, &[target, given])?;
    let mut both: Vec<usize> = pos[0].iter().chain(&pos[1]).copied().collect();
    both.sort_unstable();
    let h = entropy_vector(p.marginal_at(&both).values()) - entropy_vector(p.marginal_at(&pos[1]).values());
    Ok(h.max(0.0))
}

/// Conditional mutual information `I(A;B|C)` in bits, clamped at zero.
pub fn mutual_information(p: &JointPmf, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    let pos = disjoint_positions(p, &[a, b, given])?;
    let sizes = p.sizes();
    let union = |groups: &[&Vec<usize>]| {
        let mut v: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        v.sort_unstable();
        v
    };
    let abc = union(&[&pos[0], &pos[1], &pos[2]]);
    let ac = union(&[&pos[0], &pos[2]]);
    let bc = union(&[&pos[1], &pos[2]]);
    let m_abc = p.marginal_at(&abc);
    let m_ac = p.marginal_at(&ac);
    let m_bc = p.marginal_at(&bc);
    let m_c = p.marginal_at(&pos[2]);
    let project = |t: &[usize], from: &[usize], to: &[usize]| -> Vec<usize> {
        to.iter().map(|x| t[from.iter().position(|f| f == x).unwrap()]).collect()
    };
    let abc_sizes: Vec<usize> = abc.iter().map(|&i| sizes[i]).collect();
    let mut total = 0.0;
    for (flat, t) in tuples(&abc_sizes).enumerate() {
        let pabc = m_abc.values()[flat];
        if pabc <= 0.0 {
            continue;
        }
        let pac = m_ac.get(&project(&t, &abc, &ac));
        let pbc = m_bc.get(&project(&t, &abc, &bc));
        let pc = m_c.get(&project(&t, &abc, &pos[2]));
        total += pabc * ((pabc * pc) / (pac * pbc)).log2();
    }
    Ok(total.max(0.0))
}

pub fn binary_entropy(e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::domain(format!("binary entropy argument {e} outside [0,1]")));
    }
    Ok(entropy_vector(&[e, 1.0 - e]).clamp(0.0, 1.0))
}

/// Closed-form `1 - (1 - eps)^n`.
pub fn tv_tensorized(eps: f64, n: u32) -> f64 {
    1.0 - (1.0 - eps).powi(n as i32)
}

/// `H2(eps) + eps * k`.
pub fn fano_bound(eps: f64, k: u32) -> Result<f64> {
    Ok(binary_entropy(eps)? + eps * k as f64)
}

/// Minimal error probability for an equiprobable binary hypothesis `P` vs `Q`.
pub fn hypothesis_error(p: &[f64], q: &[f64]) -> f64 {
    0.5 * (1.0 - tv_vectors(p, q))
}

/// `I(B; V)` for an equiprobable bit `B` selecting the observation law `P` or `Q`.
pub fn hypothesis_information(p: &[f64], q: &[f64]) -> f64 {
    let mix: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let h_cond = 0.5 * entropy_vector(p) + 0.5 * entropy_vector(q);
    (entropy_vector(&mix) - h_cond).max(0.0)
}

/// Brute-force n-fold product of a flat pmf.
pub fn product_power(p: &[f64], n: u32) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect();
    }
    out
}
