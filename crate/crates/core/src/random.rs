//! Seeded random instances.
//!
//! Every generator is deterministic for a fixed seed (ChaCha8 stream).
//!
//! The super-subadditive generator is one concrete instantiation of the
//! property: `v_sup(C) = (Σ_{i∈C} w_i)·|C|` with `w_i ≥ 0` and
//! `v_sub(C) = −κ·|C|²` with `κ ≥ 0`. Any other pair of weakly super- and
//! subadditive families can be swapped in through [`Game::supersub`]'s
//! contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agents::AgentSet;
use crate::game::{Game, GameError, Value, MAX_TABLE_AGENTS};
use crate::graph::{Graph, GraphError};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("no connected G({n}, {p}) sample in {tries} tries; use a larger p")]
    RetriesExhausted { n: usize, p: f64, tries: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    Probability(f64),
}

/// Inclusive range of the drawn agent weights `w_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupParams {
    pub min_weight: Value,
    pub max_weight: Value,
}

/// Inclusive range of the drawn cost factor `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubParams {
    pub min_kappa: Value,
    pub max_kappa: Value,
}

impl Default for SupParams {
    fn default() -> Self {
        SupParams {
            min_weight: 0,
            max_weight: 10,
        }
    }
}

impl Default for SubParams {
    fn default() -> Self {
        SubParams {
            min_kappa: 0,
            max_kappa: 10,
        }
    }
}

/// Draws weights and a cost factor and returns the decomposed game.
pub fn make_supersub_game(
    n: usize,
    sup: SupParams,
    sub: SubParams,
    seed: u64,
) -> Result<Game, GameError> {
    if sup.min_weight < 0 || sup.min_weight > sup.max_weight {
        return Err(GameError::Param {
            field: "weight range",
            reason: format!("need 0 <= {} <= {}", sup.min_weight, sup.max_weight),
        });
    }
    if sub.min_kappa < 0 || sub.min_kappa > sub.max_kappa {
        return Err(GameError::Param {
            field: "kappa range",
            reason: format!("need 0 <= {} <= {}", sub.min_kappa, sub.max_kappa),
        });
    }
    let mut r = rng(seed);
    let weights = (0..n)
        .map(|_| r.gen_range(sup.min_weight..=sup.max_weight))
        .collect();
    let kappa = r.gen_range(sub.min_kappa..=sub.max_kappa);
    Game::supersub(weights, kappa)
}

/// A tabulated game with `v(C)` uniform in `[-10·|C|, 30·|C|]`.
pub fn random_table_game(n: usize, rng: &mut impl Rng) -> Result<Game, GameError> {
    if n == 0 || n > MAX_TABLE_AGENTS {
        return Err(GameError::AgentCount(n, MAX_TABLE_AGENTS));
    }
    let values = (1..1u64 << n)
        .map(|m| {
            let k = AgentSet::from_bits(m).len() as Value;
            rng.gen_range(-10 * k..=30 * k)
        })
        .collect();
    Game::from_table(n, values)
}

/// One `G(n, p)` sample (possibly disconnected).
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Result<Graph, GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::Probability(p));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::new(n, &edges)?)
}

/// Resamples `G(n, p)` until connected, at most `tries` times.
pub fn gnp_connected(
    n: usize,
    p: f64,
    tries: usize,
    rng: &mut impl Rng,
) -> Result<Graph, GenerateError> {
    for _ in 0..tries {
        let g = gnp(n, p, rng)?;
        if g.is_connected_graph() {
            return Ok(g);
        }
    }
    Err(GenerateError::RetriesExhausted { n, p, tries })
}
