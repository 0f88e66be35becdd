use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(K³)). Returns `assign[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return vec![];
    }
    // 1-based potentials; p[col] is the row matched to col.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// Misclustering error under the best relabeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisclusterReport {
    /// `min_π |{i : τ(i) ≠ π(τ̂(i))}|`
    pub count: usize,
    /// `permutation[h]` is the true block matched to estimated cluster `h`.
    pub permutation: Vec<usize>,
    /// `confusion[t][h]`: vertices with true block `t` and estimated cluster `h`.
    pub confusion: Vec<Vec<usize>>,
}

pub fn confusion_table(tau: &[usize], tau_hat: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if tau.len() != tau_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} true labels vs {} estimated labels",
            tau.len(),
            tau_hat.len()
        )));
    }
    let mut table = vec![vec![0usize; k]; k];
    for (index, (&t, &h)) in tau.iter().zip(tau_hat).enumerate() {
        for label in [t, h] {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
        }
        table[t][h] += 1;
    }
    Ok(table)
}

/// Exact minimum number of disagreements over all label permutations,
/// via optimal assignment on the agreement table.
pub fn misclustering_count(tau: &[usize], tau_hat: &[usize], k: usize) -> Result<MisclusterReport> {
    let confusion = confusion_table(tau, tau_hat, k)?;
    // Rows: estimated clusters; columns: true blocks; maximize agreement.
    let cost: Vec<Vec<i64>> = (0..k)
        .map(|h| (0..k).map(|t| -(confusion[t][h] as i64)).collect())
        .collect();
    let permutation = min_cost_assignment(&cost);
    let agree: usize = permutation
        .iter()
        .enumerate()
        .map(|(h, &t)| confusion[t][h])
        .sum();
    Ok(MisclusterReport {
        count: tau.len() - agree,
        permutation,
        confusion,
    })
}
