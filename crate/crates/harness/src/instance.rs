//! Line-oriented instance files.
//!
//! ```text
//! csg 1
//! n 4
//! e 0 1
//! e 1 2
//! game table 3 1 7 2 0 5 9 1 1 1 1 1 1 1 12
//! root 2
//! ```
//!
//! `game table` lists `v(C)` for every bitmask `C = 1 .. 2^n − 1` in order.
//! `game supersub w <w_1 .. w_n> k <κ> seed <s>` describes the
//! super-subadditive family `(Σ w_i)·|C| − κ·|C|²`; the seed only records
//! where the parameters came from. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use csg_core::{Game, Graph, Value, MAX_AGENTS, MAX_TABLE_AGENTS};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {field}: {msg}")]
    Invalid {
        line: usize,
        field: String,
        msg: String,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn invalid(line: usize, field: impl Into<String>, msg: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        line,
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameSpec {
    /// `v(C)` for `C = 1 .. 2^n − 1`.
    Table(Vec<Value>),
    SuperSub {
        weights: Vec<Value>,
        kappa: Value,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub spec: GameSpec,
    pub root: Option<usize>,
    game: Game,
}

impl Instance {
    pub fn new(graph: Graph, spec: GameSpec, root: Option<usize>) -> Result<Self, InstanceError> {
        let n = graph.n();
        let game = match &spec {
            GameSpec::Table(values) => {
                if n > MAX_TABLE_AGENTS {
                    return Err(invalid(
                        0,
                        "n",
                        format!("table games allow at most {MAX_TABLE_AGENTS} agents"),
                    ));
                }
                Game::from_table(n, values.clone())
                    .map_err(|e| invalid(0, "game table", e.to_string()))?
            }
            GameSpec::SuperSub { weights, kappa, .. } => {
                if weights.len() != n {
                    return Err(invalid(
                        0,
                        "w",
                        format!("expected {n} weights, got {}", weights.len()),
                    ));
                }
                Game::supersub(weights.clone(), *kappa)
                    .map_err(|e| invalid(0, "game supersub", e.to_string()))?
            }
        };
        if let Some(r) = root {
            if r >= n {
                return Err(invalid(
                    0,
                    "root",
                    format!("agent {r} is out of range for n = {n}"),
                ));
            }
        }
        Ok(Instance {
            graph,
            spec,
            root,
            game,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn to_text(&self) -> String {
        write_instance(self)
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "csg {FORMAT_VERSION}");
    let _ = writeln!(s, "n {}", inst.n());
    for &(u, v) in inst.graph.edges() {
        let _ = writeln!(s, "e {u} {v}");
    }
    match &inst.spec {
        GameSpec::Table(values) => {
            s.push_str("game table");
            for v in values {
                let _ = write!(s, " {v}");
            }
        }
        GameSpec::SuperSub {
            weights,
            kappa,
            seed,
        } => {
            s.push_str("game supersub w");
            for w in weights {
                let _ = write!(s, " {w}");
            }
            let _ = write!(s, " k {kappa} seed {seed}");
        }
    }
    s.push('\n');
    if let Some(r) = inst.root {
        let _ = writeln!(s, "root {r}");
    }
    s
}

fn number<T: std::str::FromStr>(
    line: usize,
    field: &str,
    tok: Option<&str>,
) -> Result<T, InstanceError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {field}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("{field}: '{tok}' is not a valid number")))
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| syntax(1, "empty instance"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("csg") {
        return Err(syntax(ln, "expected header 'csg <version>'"));
    }
    let version: u32 = number(ln, "version", toks.next())?;
    if version != FORMAT_VERSION {
        return Err(invalid(
            ln,
            "version",
            format!("unsupported version {version}"),
        ));
    }

    let mut n: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut spec: Option<(usize, GameSpec)> = None;
    let mut root: Option<(usize, usize)> = None;

    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        match key {
            "n" => {
                if n.is_some() {
                    return Err(syntax(ln, "duplicate 'n' line"));
                }
                let v: usize = number(ln, "n", toks.next())?;
                if v == 0 || v > MAX_AGENTS {
                    return Err(invalid(
                        ln,
                        "n",
                        format!("must be in 1..={MAX_AGENTS}, got {v}"),
                    ));
                }
                n = Some((ln, v));
            }
            "e" => {
                let (_, nv) = n.ok_or_else(|| syntax(ln, "edge before 'n'"))?;
                let parts: Vec<&str> = toks.by_ref().collect();
                let label = format!("edge '{}'", parts.join(" "));
                let ends: Vec<usize> = parts.iter().filter_map(|t| t.parse().ok()).collect();
                let [u, v] = ends[..] else {
                    return Err(invalid(ln, &label, "expected two agent indices"));
                };
                if parts.len() != 2 {
                    return Err(invalid(ln, &label, "expected two agent indices"));
                }
                if u >= nv || v >= nv {
                    return Err(invalid(
                        ln,
                        &label,
                        format!("endpoint out of range for n = {nv}"),
                    ));
                }
                if u == v {
                    return Err(invalid(ln, &label, "self-loop"));
                }
                edges.push((u, v));
            }
            "game" => {
                if spec.is_some() {
                    return Err(syntax(ln, "duplicate 'game' line"));
                }
                let (_, nv) = n.ok_or_else(|| syntax(ln, "game before 'n'"))?;
                let kind = toks.next().ok_or_else(|| syntax(ln, "missing game kind"))?;
                let parsed = match kind {
                    "table" => {
                        let values = toks
                            .by_ref()
                            .map(|t| number::<Value>(ln, "table value", Some(t)))
                            .collect::<Result<Vec<_>, _>>()?;
                        if nv > MAX_TABLE_AGENTS {
                            return Err(invalid(
                                ln,
                                "game table",
                                format!("table games allow at most {MAX_TABLE_AGENTS} agents"),
                            ));
                        }
                        let expected = (1usize << nv) - 1;
                        if values.len() != expected {
                            return Err(invalid(
                                ln,
                                "game table",
                                format!("expected {expected} values, got {}", values.len()),
                            ));
                        }
                        GameSpec::Table(values)
                    }
                    "supersub" => {
                        if toks.next() != Some("w") {
                            return Err(syntax(ln, "expected 'w' after 'supersub'"));
                        }
                        let mut weights = Vec::new();
                        let mut next = toks.next();
                        while let Some(t) = next {
                            if t == "k" {
                                break;
                            }
                            weights.push(number::<Value>(ln, "weight", Some(t))?);
                            next = toks.next();
                        }
                        if next != Some("k") {
                            return Err(syntax(ln, "expected 'k <kappa>'"));
                        }
                        let kappa: Value = number(ln, "k", toks.next())?;
                        if toks.next() != Some("seed") {
                            return Err(syntax(ln, "expected 'seed <s>'"));
                        }
                        let seed: u64 = number(ln, "seed", toks.next())?;
                        if weights.len() != nv {
                            return Err(invalid(
                                ln,
                                "w",
                                format!("expected {nv} weights, got {}", weights.len()),
                            ));
                        }
                        if let Some(w) = weights.iter().find(|&&w| w < 0) {
                            return Err(invalid(
                                ln,
                                "w",
                                format!("weights must be non-negative, got {w}"),
                            ));
                        }
                        if kappa < 0 {
                            return Err(invalid(
                                ln,
                                "k",
                                format!("must be non-negative, got {kappa}"),
                            ));
                        }
                        GameSpec::SuperSub {
                            weights,
                            kappa,
                            seed,
                        }
                    }
                    other => return Err(syntax(ln, format!("unknown game kind '{other}'"))),
                };
                spec = Some((ln, parsed));
            }
            "root" => {
                let (_, nv) = n.ok_or_else(|| syntax(ln, "root before 'n'"))?;
                let r: usize = number(ln, "root", toks.next())?;
                if r >= nv {
                    return Err(invalid(
                        ln,
                        "root",
                        format!("agent {r} is out of range for n = {nv}"),
                    ));
                }
                root = Some((ln, r));
            }
            other => return Err(syntax(ln, format!("unknown directive '{other}'"))),
        }
        if let Some(t) = toks.next() {
            return Err(syntax(ln, format!("unexpected trailing token '{t}'")));
        }
    }

    let (n_line, n) = n.ok_or_else(|| syntax(ln, "missing 'n' line"))?;
    let (game_line, spec) = spec.ok_or_else(|| syntax(n_line, "missing 'game' line"))?;
    let graph = Graph::new(n, &edges).map_err(|e| invalid(n_line, "edges", e.to_string()))?;
    Instance::new(graph, spec, root.map(|r| r.1)).map_err(|e| match e {
        InstanceError::Invalid { field, msg, .. } => invalid(game_line, field, msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_CYCLE: &str =
        "csg 1\nn 4\ne 0 1\ne 0 3\ne 2 1\ne 2 3\ngame table 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15\n";

    #[test]
    fn four_cycle_table() {
        let inst = parse_instance(FOUR_CYCLE).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.graph.edges().len(), 4);
        assert!(inst.graph.has_edge(1, 2));
        assert_eq!(inst.game().value(csg_core::AgentSet::from_bits(0b1111)), 15);
        assert_eq!(inst.root, None);
        assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn out_of_range_edge_names_the_edge() {
        let text = "csg 1\nn 4\ne 0 5\ngame table 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(
            err,
            InstanceError::Invalid {
                line: 3,
                field: "edge '0 5'".into(),
                msg: "endpoint out of range for n = 4".into()
            }
        );
        let err = parse_instance("csg 1\nn 4\ne a5\n").unwrap_err();
        assert!(err.to_string().contains("edge 'a5'"), "{err}");
    }

    #[test]
    fn table_length_is_checked() {
        let err = parse_instance("csg 1\nn 2\ne 0 1\ngame table 1 2\n").unwrap_err();
        assert!(
            matches!(err, InstanceError::Invalid { line: 4, ref field, .. } if field == "game table")
        );
    }

    #[test]
    fn supersub_with_root_and_comments() {
        let text = "# generated\ncsg 1\n\nn 3\ne 0 1 # spine\ne 1 2\ngame supersub w 1 2 3 k 4 seed 99\nroot 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(
            inst.spec,
            GameSpec::SuperSub {
                weights: vec![1, 2, 3],
                kappa: 4,
                seed: 99
            }
        );
        assert_eq!(inst.root, Some(1));
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        for (text, line) in [
            ("", 1),
            ("csg 2\n", 1),
            ("csg 1\nn x\n", 2),
            ("csg 1\nn 2\nfoo\n", 3),
            ("csg 1\nn 2\nroot 0 7\n", 3),
            ("csg 1\nn 2\ngame supersub w 1 1 k 0 seed 3 4\n", 3),
            ("csg 1\nn 2\ngame supersub w 1 1 seed 3\n", 3),
            ("csg 1\nn 2\ne 0 1\n", 2),
        ] {
            match parse_instance(text).unwrap_err() {
                InstanceError::Syntax { line: l, .. } | InstanceError::Invalid { line: l, .. } => {
                    assert_eq!(l, line, "{text:?}")
                }
            }
        }
    }

    #[test]
    fn rejects_self_loop_and_negative_kappa() {
        assert!(parse_instance("csg 1\nn 2\ne 1 1\n").is_err());
        let err = parse_instance("csg 1\nn 1\ngame supersub w 0 k -1 seed 0\n").unwrap_err();
        assert!(matches!(err, InstanceError::Invalid { ref field, .. } if field == "k"));
    }
}
