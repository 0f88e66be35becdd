use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::block::BlockModelSpec;
use crate::error::{Error, Result};
use crate::rng::rng_from;

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// Block proportions; rescaled to the requested vertex count.
    BlockSizes(Vec<usize>),
    /// Explicit labels; fixes n.
    Tau(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeFactors {
    Explicit(Vec<f64>),
    /// i.i.d. Uniform(lo, hi) per vertex.
    Uniform(f64, f64),
}

/// A block model template that can be instantiated at any vertex count.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub id: String,
    pub b: DMatrix<f64>,
    pub membership: Membership,
    pub degree_factors: Option<DegreeFactors>,
    /// Fixes the degree-factor draws; when absent they follow the trial seed.
    pub seed: Option<u64>,
    /// Embedding dimension override; defaults to the rank of B.
    pub d: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawMatrix {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawFactors {
    List(Vec<f64>),
    Uniform { uniform: [f64; 2] },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "B")]
    b: RawMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree_factors: Option<RawFactors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
}

impl ModelConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(s)?;
        let k = raw.k;
        let b = match raw.b {
            RawMatrix::Rows(rows) => {
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::InvalidModel(format!("B must be {k}x{k}")));
                }
                DMatrix::from_fn(k, k, |i, j| rows[i][j])
            }
            RawMatrix::Flat(v) => {
                if v.len() != k * k {
                    return Err(Error::InvalidModel(format!(
                        "B has {} entries, expected K*K = {}",
                        v.len(),
                        k * k
                    )));
                }
                DMatrix::from_row_slice(k, k, &v)
            }
        };
        let membership = match (raw.block_sizes, raw.tau) {
            (Some(s), None) => Membership::BlockSizes(s),
            (None, Some(t)) => Membership::Tau(t),
            (None, None) => Membership::BlockSizes(vec![1; k]),
            (Some(_), Some(_)) => {
                return Err(Error::InvalidModel(
                    "give either \"block_sizes\" or \"tau\", not both".into(),
                ))
            }
        };
        let degree_factors = raw.degree_factors.map(|f| match f {
            RawFactors::List(v) => DegreeFactors::Explicit(v),
            RawFactors::Uniform { uniform: [lo, hi] } => DegreeFactors::Uniform(lo, hi),
        });
        let cfg = ModelConfig {
            id: raw.id.unwrap_or_else(|| "custom".into()),
            b,
            membership,
            degree_factors,
            seed: raw.seed,
            d: raw.d,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        if cfg.id == "custom" {
            if let Some(stem) = path.file_stem() {
                cfg.id = stem.to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }

    /// A preset name (see [`presets::NAMES`]) or a path to a JSON file.
    pub fn load(preset_or_path: &str) -> Result<Self> {
        match presets::by_name(preset_or_path) {
            Some(cfg) => Ok(cfg),
            None => Self::from_path(preset_or_path),
        }
    }

    pub fn to_json(&self) -> String {
        let k = self.b.nrows();
        let raw = RawConfig {
            k,
            b: RawMatrix::Rows(
                (0..k)
                    .map(|i| (0..k).map(|j| self.b[(i, j)]).collect())
                    .collect(),
            ),
            block_sizes: match &self.membership {
                Membership::BlockSizes(s) => Some(s.clone()),
                Membership::Tau(_) => None,
            },
            tau: match &self.membership {
                Membership::Tau(t) => Some(t.clone()),
                Membership::BlockSizes(_) => None,
            },
            degree_factors: self.degree_factors.as_ref().map(|f| match f {
                DegreeFactors::Explicit(v) => RawFactors::List(v.clone()),
                DegreeFactors::Uniform(lo, hi) => RawFactors::Uniform {
                    uniform: [*lo, *hi],
                },
            }),
            seed: self.seed,
            id: Some(self.id.clone()),
            d: self.d,
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }

    pub fn k(&self) -> usize {
        self.b.nrows()
    }

    pub fn is_degree_corrected(&self) -> bool {
        self.degree_factors.is_some()
    }

    fn validate(&self) -> Result<()> {
        if let Membership::BlockSizes(s) = &self.membership {
            if s.len() != self.k() {
                return Err(Error::InvalidModel(format!(
                    "{} block sizes for K = {}",
                    s.len(),
                    self.k()
                )));
            }
            if s.iter().all(|&v| v == 0) {
                return Err(Error::InvalidModel("block sizes are all zero".into()));
            }
        }
        if let Some(DegreeFactors::Uniform(lo, hi)) = self.degree_factors {
            if !(lo > 0.0 && lo <= hi && hi < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "uniform degree factors need 0 < lo <= hi < 1, got [{lo}, {hi}]"
                )));
            }
        }
        // Instantiating at the natural size surfaces B errors early.
        let n = self.natural_n().max(self.k());
        self.build(n, 0).map(|_| ())
    }

    /// Vertex count implied by the config itself.
    pub fn natural_n(&self) -> usize {
        match &self.membership {
            Membership::BlockSizes(s) => s.iter().sum(),
            Membership::Tau(t) => t.len(),
        }
    }

    /// Instantiates the model at `n` vertices. `model_seed` drives random
    /// degree factors unless the config pins its own seed.
    pub fn build(&self, n: usize, model_seed: u64) -> Result<BlockModelSpec> {
        let tau = match &self.membership {
            Membership::Tau(t) => {
                if t.len() != n {
                    return Err(Error::param(
                        "n",
                        n,
                        format!("the model fixes tau with {} vertices", t.len()),
                    ));
                }
                t.clone()
            }
            Membership::BlockSizes(s) => {
                let sizes = scale_block_sizes(s, n)?;
                sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &c)| std::iter::repeat_n(k, c))
                    .collect()
            }
        };
        let factors = match &self.degree_factors {
            None => None,
            Some(DegreeFactors::Explicit(v)) => Some(v.clone()),
            Some(DegreeFactors::Uniform(lo, hi)) => {
                let mut rng = rng_from(self.seed.unwrap_or(model_seed));
                Some((0..n).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect())
            }
        };
        BlockModelSpec::new(self.b.clone(), tau, factors)
    }

    /// Embedding dimension for this model.
    pub fn embed_dim(&self, spec: &BlockModelSpec) -> usize {
        self.d.unwrap_or_else(|| spec.rank())
    }
}

/// Rescales block proportions to sum to `n` by largest remainder; ties go to
/// the lower block index. Every block keeps at least one vertex.
pub fn scale_block_sizes(proportions: &[usize], n: usize) -> Result<Vec<usize>> {
    let total: usize = proportions.iter().sum();
    if total == n {
        return Ok(proportions.to_vec());
    }
    let k = proportions.len();
    if n < k {
        return Err(Error::param(
            "n",
            n,
            format!("need at least K = {k} vertices"),
        ));
    }
    let mut sizes: Vec<usize> = proportions.iter().map(|&p| p * n / total).collect();
    let mut rem: Vec<(usize, usize)> = proportions
        .iter()
        .enumerate()
        .map(|(i, &p)| (p * n % total, i))
        .collect();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = n - sizes.iter().sum::<usize>();
    for &(_, i) in &rem {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::param(
            "n",
            n,
            format!("block {i} would be empty at this size"),
        ));
    }
    Ok(sizes)
}

/// Built-in models.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 4] = [
        "dense-two-block",
        "degree-corrected-two-block",
        "sparse-two-block",
        "single-block",
    ];

    /// Two equal blocks with latent positions `(0.5, ±0.4)`:
    /// B = [[0.41, 0.09], [0.09, 0.41]].
    pub fn dense_two_block() -> ModelConfig {
        ModelConfig {
            id: "dense-two-block".into(),
            b: DMatrix::from_row_slice(2, 2, &[0.41, 0.09, 0.09, 0.41]),
            membership: Membership::BlockSizes(vec![1, 1]),
            degree_factors: None,
            seed: None,
            d: None,
        }
    }

    /// Two equal blocks with unit directions `y1 = (1/5, 2√6/5)`,
    /// `y2 = (2√6/5, 1/5)` and degree factors i.i.d. Uniform(0.2, 0.5).
    pub fn degree_corrected_two_block() -> ModelConfig {
        let s = 2.0 * 6f64.sqrt() / 5.0;
        let cross = 2.0 * 0.2 * s;
        ModelConfig {
            id: "degree-corrected-two-block".into(),
            b: DMatrix::from_row_slice(2, 2, &[1.0, cross, cross, 1.0]),
            membership: Membership::BlockSizes(vec![1, 1]),
            degree_factors: Some(DegreeFactors::Uniform(0.2, 0.5)),
            seed: None,
            d: None,
        }
    }

    /// `c [[a, b], [b, a]]` with a = 3, b = 1, c = 1/4.
    pub fn sparse_two_block() -> ModelConfig {
        ModelConfig {
            id: "sparse-two-block".into(),
            b: DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]),
            membership: Membership::BlockSizes(vec![1, 1]),
            degree_factors: None,
            seed: None,
            d: None,
        }
    }

    /// Erdős–Rényi G(n, 0.3).
    pub fn single_block() -> ModelConfig {
        ModelConfig {
            id: "single-block".into(),
            b: DMatrix::from_element(1, 1, 0.3),
            membership: Membership::BlockSizes(vec![1]),
            degree_factors: None,
            seed: None,
            d: None,
        }
    }

    pub fn by_name(name: &str) -> Option<ModelConfig> {
        match name {
            "dense-two-block" => Some(dense_two_block()),
            "degree-corrected-two-block" => Some(degree_corrected_two_block()),
            "sparse-two-block" => Some(sparse_two_block()),
            "single-block" => Some(single_block()),
            _ => None,
        }
    }

    pub fn all() -> Vec<ModelConfig> {
        NAMES.iter().filter_map(|n| by_name(n)).collect()
    }
}
