//! Seeded instance generation.

use std::fmt;
use std::str::FromStr;

use csg_core::random::{
    gnp_connected, make_supersub_game, random_table_game, rng, GenerateError, SubParams, SupParams,
};
use csg_core::Graph;

use crate::instance::{GameSpec, Instance};

/// Resampling budget for `G(n, p)` until it comes out connected.
pub const GNP_TRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Path,
    Cycle,
    Star,
    Complete,
    Gnp(f64),
}

impl Model {
    /// The seven graph families of the verification matrix.
    pub const MATRIX: [Model; 7] = [
        Model::Path,
        Model::Cycle,
        Model::Star,
        Model::Complete,
        Model::Gnp(0.2),
        Model::Gnp(0.5),
        Model::Gnp(0.8),
    ];
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Path => f.write_str("path"),
            Model::Cycle => f.write_str("cycle"),
            Model::Star => f.write_str("star"),
            Model::Complete => f.write_str("complete"),
            Model::Gnp(p) => write!(f, "gnp:{p}"),
        }
    }
}

impl FromStr for Model {
    type Err = String;

    /// `path`, `cycle`, `star`, `complete` or `gnp:<p>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "path" => Ok(Model::Path),
            "cycle" => Ok(Model::Cycle),
            "star" => Ok(Model::Star),
            "complete" => Ok(Model::Complete),
            _ => {
                let p = s.strip_prefix("gnp:").ok_or_else(|| {
                    format!("unknown graph model '{s}' (path, cycle, star, complete, gnp:<p>)")
                })?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| format!("bad edge probability in '{s}'"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("edge probability {p} is outside [0, 1]"));
                }
                Ok(Model::Gnp(p))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GameKind {
    /// `v(C)` uniform in `[-10·|C|, 30·|C|]`.
    #[default]
    Table,
    SuperSub(SupParams, SubParams),
}

impl FromStr for GameKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(GameKind::Table),
            "supersub" => Ok(GameKind::SuperSub(
                SupParams::default(),
                SubParams::default(),
            )),
            _ => Err(format!("unknown game kind '{s}' (table, supersub)")),
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Table => "table",
            GameKind::SuperSub(..) => "supersub",
        })
    }
}

/// Deterministic in `(model, n, kind, seed)`. The graph is drawn before the
/// game from one stream.
pub fn gen_instance(
    model: Model,
    n: usize,
    kind: GameKind,
    seed: u64,
) -> Result<Instance, GenerateError> {
    let mut r = rng(seed);
    let graph = match model {
        Model::Path => Graph::path(n)?,
        Model::Cycle => Graph::cycle(n)?,
        Model::Star => Graph::star(n)?,
        Model::Complete => Graph::complete(n)?,
        Model::Gnp(p) => gnp_connected(n, p, GNP_TRIES, &mut r)?,
    };
    let spec = match kind {
        GameKind::Table => {
            let game = random_table_game(n, &mut r)?;
            GameSpec::Table(game.table().expect("tabulated").to_vec())
        }
        GameKind::SuperSub(sup, sub) => {
            let game = make_supersub_game(n, sup, sub, seed)?;
            let (w, k) = game.supersub_params().expect("decomposed");
            GameSpec::SuperSub {
                weights: w.to_vec(),
                kappa: k,
                seed,
            }
        }
    };
    Ok(Instance::new(graph, spec, None).expect("generated instances are valid"))
}
