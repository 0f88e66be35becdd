//! Reference implementations used as oracles by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Deterministic uniform draws in [0, 1) (SplitMix64).
pub struct Uniform(pub u64);

impl Uniform {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, k: usize) -> usize {
        (self.next_u64() % k as u64) as usize
    }

    pub fn matrix(&mut self, n: usize, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
        DMatrix::from_fn(n, d, |_, _| lo + (hi - lo) * self.next_f64())
    }
}

// ---------------------------------------------------------------------------
// Clustering

/// SSE of a partition, with centroids accumulated as offsets from the first
/// member of each block and terms summed in vertex order.
pub fn partition_sse(points: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let (n, d) = points.shape();
    let mut first = vec![None; k];
    let mut count = vec![0usize; k];
    let mut acc = vec![vec![0.0; d]; k];
    for i in 0..n {
        let l = labels[i];
        let f = *first[l].get_or_insert(i);
        count[l] += 1;
        for j in 0..d {
            acc[l][j] += points[(i, j)] - points[(f, j)];
        }
    }
    let centroid =
        |l: usize, j: usize| points[(first[l].unwrap(), j)] + acc[l][j] / count[l] as f64;
    (0..n)
        .map(|i| {
            (0..d)
                .map(|j| (points[(i, j)] - centroid(labels[i], j)).powi(2))
                .sum::<f64>()
        })
        .sum()
}

/// Minimum SSE over all partitions of the rows into at most `k` blocks
/// (restricted growth strings).
pub fn best_partition_sse(points: &DMatrix<f64>, k: usize) -> f64 {
    let n = points.nrows();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    fn rec(
        i: usize,
        used: usize,
        k: usize,
        labels: &mut Vec<usize>,
        pts: &DMatrix<f64>,
        best: &mut f64,
    ) {
        if i == labels.len() {
            *best = best.min(partition_sse(pts, labels, used));
            return;
        }
        for l in 0..(used + 1).min(k) {
            labels[i] = l;
            rec(i + 1, used.max(l + 1), k, labels, pts, best);
        }
    }
    rec(0, 0, k, &mut labels, points, &mut best);
    best
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// `min_π |{i : τ(i) ≠ π(τ̂(i))}|` by enumerating all K! permutations.
pub fn brute_force_misclustering(tau: &[usize], tau_hat: &[usize], k: usize) -> usize {
    permutations(k)
        .iter()
        .map(|pi| {
            tau.iter()
                .zip(tau_hat)
                .filter(|(t, h)| **t != pi[**h])
                .count()
        })
        .min()
        .unwrap()
}

// ---------------------------------------------------------------------------
// Spectral

/// Number of eigenvalues of symmetric `m` below `x`, from the signs of the
/// pivots of an unpivoted LDLᵀ factorization of `m − xI`.
pub fn eigen_count_below(m: &DMatrix<f64>, x: f64) -> usize {
    let n = m.nrows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= x;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut p = a[(k, k)];
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / p;
            for j in k + 1..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    negatives
}

/// All eigenvalues of a small symmetric matrix, ascending, by bisection on
/// the inertia count.
pub fn bisection_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let r = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-r, r);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eigen_count_below(m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Maximum row norm by explicit loops.
pub fn scalar_two_to_infty(m: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.nrows() {
        let mut s = 0.0;
        for j in 0..m.ncols() {
            s += m[(i, j)] * m[(i, j)];
        }
        best = best.max(s.sqrt());
    }
    best
}

/// A random orthogonal matrix (QR of a Gaussian-ish matrix).
pub fn random_orthogonal(d: usize, rng: &mut Uniform) -> DMatrix<f64> {
    let g = rng.matrix(d, d, -1.0, 1.0);
    g.qr().q()
}

// ---------------------------------------------------------------------------
// Bounds

/// Δ and γn from the dense P: direct row sums and nalgebra's symmetric
/// eigendecomposition, distinct eigenvalues grouped at 1e-9 relative.
pub fn dense_constants(x: &DMatrix<f64>) -> (f64, f64, Vec<f64>) {
    let p = x * x.transpose();
    let n = p.nrows();
    let delta = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| p[(i, j)]).sum::<f64>())
        .fold(0.0, f64::max);
    let mut ev: Vec<f64> = p.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let top = ev[0];
    let mut distinct: Vec<f64> = Vec::new();
    for v in ev {
        let v = if v.abs() <= 1e-10 * top { 0.0 } else { v };
        match distinct.last() {
            Some(&last)
                if (last - v).abs() <= 1e-9 * last.abs().max(1e-300)
                    || (last == 0.0 && v == 0.0) => {}
            _ => distinct.push(v),
        }
    }
    let gamma_n = distinct
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    (delta, gamma_n, distinct)
}

/// Double-double arithmetic (about 32 significant digits).
#[derive(Clone, Copy, Debug)]
pub struct DD(pub f64, pub f64);

impl DD {
    pub fn from(x: f64) -> DD {
        DD(x, 0.0)
    }

    fn two_sum(a: f64, b: f64) -> DD {
        let s = a + b;
        let bb = s - a;
        DD(s, (a - (s - bb)) + (b - bb))
    }

    fn renorm(hi: f64, lo: f64) -> DD {
        let s = hi + lo;
        DD(s, lo - (s - hi))
    }

    pub fn add(self, o: DD) -> DD {
        let s = DD::two_sum(self.0, o.0);
        let t = DD::two_sum(self.1, o.1);
        let r = DD::renorm(s.0, s.1 + t.0);
        DD::renorm(r.0, r.1 + t.1)
    }

    pub fn neg(self) -> DD {
        DD(-self.0, -self.1)
    }

    pub fn sub(self, o: DD) -> DD {
        self.add(o.neg())
    }

    pub fn mul(self, o: DD) -> DD {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        DD::renorm(p, e + self.0 * o.1 + self.1 * o.0)
    }

    pub fn div(self, o: DD) -> DD {
        let q1 = self.0 / o.0;
        let r = self.sub(o.mul(DD::from(q1)));
        let q2 = r.0 / o.0;
        let r = r.sub(o.mul(DD::from(q2)));
        let q3 = r.0 / o.0;
        DD::from(q1).add(DD::from(q2)).add(DD::from(q3))
    }

    pub fn sqrt(self) -> DD {
        let y = DD::from(self.0.sqrt());
        let r = self.sub(y.mul(y));
        y.add(r.div(DD::from(2.0).mul(y)))
    }

    pub fn exp(self) -> DD {
        const LN2: DD = DD(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
        let k = (self.0 / LN2.0).round();
        let r = self.sub(LN2.mul(DD::from(k)));
        // exp(r) = exp(r / 2^10)^(2^10) with a Taylor series for the small part.
        let s = r.mul(DD::from(1.0 / 1024.0));
        let mut term = DD::from(1.0);
        let mut sum = DD::from(1.0);
        for i in 1..30 {
            term = term.mul(s).div(DD::from(i as f64));
            sum = sum.add(term);
        }
        for _ in 0..10 {
            sum = sum.mul(sum);
        }
        sum.mul(DD::from(2f64.powi(k as i32)))
    }

    pub fn ln(self) -> DD {
        let mut y = DD::from(self.0.ln());
        for _ in 0..3 {
            y = y.add(self.mul(y.neg().exp())).sub(DD::from(1.0));
        }
        y
    }

    pub fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}

/// `85 d Δ³ log(n/η) / (γn)^{7/2}` in double-double arithmetic.
pub fn beta_dd(d: usize, n: usize, eta: f64, delta: f64, gamma: f64) -> f64 {
    let delta = DD::from(delta);
    let gn = DD::from(gamma).mul(DD::from(n as f64));
    let log = DD::from(n as f64).div(DD::from(eta)).ln();
    let num = DD::from(85.0 * d as f64)
        .mul(delta)
        .mul(delta)
        .mul(delta)
        .mul(log);
    let den = gn.mul(gn).mul(gn).mul(gn.sqrt());
    num.div(den).to_f64()
}
