use crate::dt::ContextFeatureTable;
use crate::error::{Error, Result};

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::contract("cosine of vectors with different dimensions"));
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::contract("cosine is undefined for a zero vector"));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Shared feature mass over total feature mass, with negative association
/// scores clamped to zero.
pub fn lin_similarity(u: &str, v: &str, rankings: &ContextFeatureTable) -> Result<f64> {
    let (iu, iv) = (rankings.lookup(u)?, rankings.lookup(v)?);
    let mass = |w| -> Vec<(u32, f64)> {
        let mut m: Vec<(u32, f64)> = rankings.ranking(w).iter().map(|&(f, s)| (f, s.max(0.0))).collect();
        m.sort_unstable_by_key(|p| p.0);
        m
    };
    let (mu, mv) = (mass(iu), mass(iv));
    let total: f64 = mu.iter().chain(&mv).map(|p| p.1).sum();
    if total <= 0.0 {
        return Err(Error::contract(format!(
            "lin similarity of '{u}' and '{v}' is undefined: no positive feature mass"
        )));
    }
    let (mut i, mut j, mut shared) = (0, 0, 0.0);
    while i < mu.len() && j < mv.len() {
        match mu[i].0.cmp(&mv[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += mu[i].1 + mv[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(shared / total)
}
