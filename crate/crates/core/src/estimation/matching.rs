use crate::error::{Error, Result};
use crate::relu_model::ReluNetwork;

/// Sign-aware bijection from true neurons to estimated ones.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// `perm[i]` is the estimated neuron paired with true neuron `i`.
    pub perm: Vec<usize>,
    /// `+1` or `−1` per true neuron.
    pub signs: Vec<i8>,
    /// `‖signs[i]·θ̂_{perm[i]} − θᵢ*‖`.
    pub errors: Vec<f64>,
    pub max_error: f64,
    /// Sum of squared per-pair costs for the chosen assignment.
    pub cost: f64,
}

fn sq_dist(a: &[f64], b: &[f64], sign: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (sign * x - y).powi(2)).sum()
}

/// `min(‖θ̂−θ*‖², ‖θ̂+θ*‖²)` with the sign that attains it (`+` on ties).
pub fn neuron_pair_cost(est: &[f64], truth: &[f64]) -> (f64, i8) {
    let plus = sq_dist(est, truth, 1.0);
    let minus = sq_dist(est, truth, -1.0);
    if minus < plus {
        (minus, -1)
    } else {
        (plus, 1)
    }
}

/// Sum of `cost[i][perm[i]]` in row order.
pub fn assignment_cost(cost: &[Vec<f64>], perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
/// row/column potentials, `O(n³)`). Returns `perm` with row `i` assigned to
/// column `perm[i]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for c in 1..=n {
                if used[c] {
                    continue;
                }
                let reduced = cost[r - 1][c - 1] - u[r] - v[c];
                if reduced < minv[c] {
                    minv[c] = reduced;
                    way[c] = col0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for c in 0..=n {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for c in 1..=n {
        perm[owner[c] - 1] = c - 1;
    }
    perm
}

/// Pairs each true neuron with an estimated one, up to sign, minimizing the total
/// squared distance.
pub fn match_neurons(est: &ReluNetwork, truth: &ReluNetwork) -> Result<MatchResult> {
    if est.k() != truth.k() {
        return Err(Error::DimensionMismatch {
            expected: truth.k(),
            actual: est.k(),
        });
    }
    if est.d() != truth.d() {
        return Err(Error::DimensionMismatch {
            expected: truth.d(),
            actual: est.d(),
        });
    }
    let k = truth.k();
    let pairs: Vec<Vec<(f64, i8)>> = (0..k)
        .map(|i| (0..k).map(|j| neuron_pair_cost(est.row(j), truth.row(i))).collect())
        .collect();
    let cost: Vec<Vec<f64>> = pairs.iter().map(|row| row.iter().map(|(c, _)| *c).collect()).collect();
    let perm = min_cost_assignment(&cost);
    let signs: Vec<i8> = perm.iter().enumerate().map(|(i, &j)| pairs[i][j].1).collect();
    let errors: Vec<f64> = perm
        .iter()
        .zip(&signs)
        .enumerate()
        .map(|(i, (&j, &s))| sq_dist(est.row(j), truth.row(i), f64::from(s)).sqrt())
        .collect();
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(MatchResult {
        cost: assignment_cost(&cost, &perm),
        perm,
        signs,
        errors,
        max_error,
    })
}
