//! JSON formats for games, graphs, splittings, edge utilities and results.
//!
//! All writers go through [`serde_json::Value`], whose maps are ordered,
//! so output keys are sorted and byte-identical across runs.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Game, GameShape, PlayerLabel};
use crate::graph::{Graph, Splitting};
use crate::hodge::{CliqueDecomposition, Decomposition, Potential, Residuals};
use crate::lsq::LocalTable;
use crate::separability::{EdgeUtilities, SeparableDecomposition, VerificationReport};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerJson {
    name: String,
    actions: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameJson {
    players: Vec<PlayerJson>,
    utilities: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    num_nodes: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplittingJson {
    groups: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeUtilitiesJson {
    graph: GraphJson,
    tables: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action_counts: Option<Vec<usize>>,
}

fn parse<T: DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Json(format!("malformed {what} JSON: {e}")))
}

fn field_error(what: &str, e: Error) -> Error {
    Error::Json(format!("invalid {what}: {e}"))
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn game_to_value(g: &Game) -> Value {
    let players: Vec<Value> = g
        .labels()
        .iter()
        .map(|l| json!({"name": l.name, "actions": l.actions}))
        .collect();
    json!({"players": players, "utilities": g.utilities()})
}

pub fn game_from_value(v: Value) -> Result<Game> {
    let raw: GameJson = serde_json::from_value(v).map_err(|e| Error::Json(format!("malformed game JSON: {e}")))?;
    game_from_raw(raw)
}

fn game_from_raw(raw: GameJson) -> Result<Game> {
    if raw.players.is_empty() {
        return Err(Error::Json("invalid game: field `players` is empty".into()));
    }
    let counts: Vec<usize> = raw.players.iter().map(|p| p.actions.len()).collect();
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(Error::Json(format!("invalid game: players[{i}].actions is empty")));
    }
    let shape = GameShape::new(counts).map_err(|e| field_error("game", e))?;
    let labels = raw
        .players
        .into_iter()
        .map(|p| PlayerLabel {
            name: p.name,
            actions: p.actions,
        })
        .collect();
    Game::with_labels(shape, raw.utilities, labels).map_err(|e| field_error("game", e))
}

pub fn parse_game(text: &str) -> Result<Game> {
    game_from_raw(parse("game", text)?)
}

pub fn game_to_json(g: &Game) -> String {
    to_pretty(&game_to_value(g))
}

pub fn graph_to_value(g: &Graph) -> Value {
    let edges: Vec<[usize; 2]> = g.edges().map(|(i, j)| [i, j]).collect();
    json!({"num_nodes": g.num_nodes(), "edges": edges})
}

fn graph_from_raw(raw: GraphJson) -> Result<Graph> {
    Graph::from_edges(raw.num_nodes, raw.edges.into_iter().map(|[i, j]| (i, j))).map_err(|e| field_error("graph", e))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    graph_from_raw(parse("graph", text)?)
}

pub fn graph_to_json(g: &Graph) -> String {
    to_pretty(&graph_to_value(g))
}

pub fn splitting_to_value(s: &Splitting) -> Value {
    json!({"groups": s.to_lists()})
}

pub fn parse_splitting(text: &str) -> Result<Splitting> {
    let raw: SplittingJson = parse("splitting", text)?;
    Ok(Splitting::from_lists(raw.groups))
}

pub fn splitting_to_json(s: &Splitting) -> String {
    to_pretty(&splitting_to_value(s))
}

fn parse_edge_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Json(format!("invalid edge utilities: table key `{key}` is not of the form \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Action counts default to the table dimensions; every player must then
/// touch at least one edge.
pub fn parse_edge_utilities(text: &str) -> Result<EdgeUtilities> {
    let raw: EdgeUtilitiesJson = parse("edge utilities", text)?;
    let graph = graph_from_raw(raw.graph)?;
    let mut tables = BTreeMap::new();
    for (key, table) in raw.tables {
        tables.insert(parse_edge_key(&key)?, table);
    }
    let counts = match raw.action_counts {
        Some(c) => c,
        None => {
            let mut counts = vec![None; graph.num_nodes()];
            for (&(i, j), table) in &tables {
                let n = graph.num_nodes();
                if i >= n || j >= n {
                    return Err(Error::Json(format!("invalid edge utilities: table ({i}, {j}) out of range")));
                }
                counts[i] = Some(table.len());
                counts[j] = Some(table.first().map_or(0, Vec::len));
            }
            counts
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    c.ok_or_else(|| {
                        Error::Json(format!(
                            "invalid edge utilities: player {i} touches no edge; give `action_counts`"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    EdgeUtilities::new(graph, counts, tables).map_err(|e| field_error("edge utilities", e))
}

pub fn edge_utilities_to_value(e: &EdgeUtilities) -> Value {
    let tables: BTreeMap<String, &Vec<Vec<f64>>> =
        e.tables().iter().map(|(&(i, j), t)| (format!("{i},{j}"), t)).collect();
    json!({
        "graph": graph_to_value(e.graph()),
        "tables": tables,
        "action_counts": e.action_counts(),
    })
}

pub fn edge_utilities_to_json(e: &EdgeUtilities) -> String {
    to_pretty(&edge_utilities_to_value(e))
}

pub fn residuals_to_value(r: &Residuals) -> Value {
    json!({
        "sum_check": r.sum_check,
        "non_strategic_check": r.non_strategic_check,
        "normalization_check": r.normalization_check,
        "potential_check": r.potential_check,
        "harmonic_check": r.harmonic_check,
        "solver_iterations": r.solver_iterations,
    })
}

pub fn decomposition_to_value(d: &Decomposition) -> Value {
    json!({
        "non_strategic": game_to_value(&d.non_strategic),
        "potential_part": game_to_value(&d.potential_part),
        "harmonic_part": game_to_value(&d.harmonic_part),
        "potential": d.potential.values(),
        "residuals": residuals_to_value(&d.residuals),
    })
}

pub fn decomposition_to_json(d: &Decomposition) -> String {
    to_pretty(&decomposition_to_value(d))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Json(format!("invalid decomposition: missing field `{key}`")))
}

fn get_f64(v: &Value, key: &str) -> Result<f64> {
    get(v, key)?
        .as_f64()
        .ok_or_else(|| Error::Json(format!("invalid decomposition: `{key}` is not a number")))
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let v: Value = parse("decomposition", text)?;
    let non_strategic = game_from_value(get(&v, "non_strategic")?.clone())?;
    let potential_part = game_from_value(get(&v, "potential_part")?.clone())?;
    let harmonic_part = game_from_value(get(&v, "harmonic_part")?.clone())?;
    let values: Vec<f64> = serde_json::from_value(get(&v, "potential")?.clone())
        .map_err(|e| Error::Json(format!("invalid decomposition: potential: {e}")))?;
    let potential = Potential::for_shape(non_strategic.shape(), values).map_err(|e| field_error("decomposition", e))?;
    let r = get(&v, "residuals")?;
    let residuals = Residuals {
        sum_check: get_f64(r, "sum_check")?,
        non_strategic_check: get_f64(r, "non_strategic_check")?,
        normalization_check: get_f64(r, "normalization_check")?,
        potential_check: get_f64(r, "potential_check")?,
        harmonic_check: get_f64(r, "harmonic_check")?,
        solver_iterations: get(r, "solver_iterations")?
            .as_u64()
            .ok_or_else(|| Error::Json("invalid decomposition: solver_iterations".into()))? as usize,
    };
    Ok(Decomposition {
        non_strategic,
        potential_part,
        harmonic_part,
        potential,
        residuals,
    })
}

fn table_to_value(t: &LocalTable) -> Value {
    json!({"players": t.players, "values": t.values})
}

pub fn separable_to_value(d: &SeparableDecomposition) -> Value {
    let players: Vec<Value> = d
        .players
        .iter()
        .map(|p| {
            json!({
                "base": table_to_value(&p.base),
                "groups": p.groups.iter().map(table_to_value).collect::<Vec<_>>(),
                "residual": p.residual,
            })
        })
        .collect();
    json!({"separable": true, "players": players, "residual": d.residual})
}

pub fn cliques_to_value(d: &CliqueDecomposition) -> Value {
    json!({
        "feasible": true,
        "tables": d.tables.iter().map(table_to_value).collect::<Vec<_>>(),
        "residual": d.residual,
    })
}

fn graph_entry(g: &Graph, name: &str) -> Value {
    json!({"graph": graph_to_value(g), "dot": g.to_dot(name)})
}

pub fn report_to_value(r: &VerificationReport) -> Value {
    let clauses: Vec<Value> = r
        .clauses
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "value": c.value}))
        .collect();
    json!({
        "statement": r.statement,
        "passed": r.passed(),
        "clauses": clauses,
        "graphs": {
            "game": graph_entry(&r.game_graph, "G_u"),
            "class": graph_entry(&r.class_graph, "G_class"),
            "reference": graph_entry(&r.reference_graph, "G_reference"),
            "non_strategic": graph_entry(&r.components.non_strategic, "G_nonstrategic"),
            "potential": graph_entry(&r.components.potential, "G_potential"),
            "harmonic": graph_entry(&r.components.harmonic, "G_harmonic"),
        },
        "residuals": residuals_to_value(&r.decomposition.residuals),
    })
}
