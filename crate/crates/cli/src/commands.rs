use std::fmt;
use std::io::Read;
use std::path::Path;

use gamedec::io::{self as gio, to_pretty};
use gamedec::random::{random_edge_utilities, rng_from_seed};
use gamedec::{
    build_pairwise_game, class_minimal_graph, clique_potential_decomposition, coordination_game, decompose,
    example_graph, exact_potential, generate_random, is_graphical, is_harmonic, is_non_strategic, is_normalized,
    is_s_separable, is_zero_sum, make_example_game, matching_pennies, minimal_graph, normalize, verify_corollary3,
    verify_corollary4, verify_theorem1, CliqueOutcome, Game, GameKind, GameShape, Graph, Separability, Tolerance,
};
use serde_json::json;

use crate::{Cli, Command, ExampleName, Extension, GameInput, Kind, Statement};

/// An input or usage error (exit code 2).
#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<gamedec::Error> for CliError {
    fn from(e: gamedec::Error) -> Self {
        CliError(e.to_string())
    }
}

pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, passed: true }
    }
}

fn read_text(path: Option<&Path>) -> Result<(String, String), CliError> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read_to_string(p)
            .map(|t| (t, p.display().to_string()))
            .map_err(|e| CliError(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<(String, String), CliError> {
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| CliError(format!("cannot read stdin: {e}")))?;
    Ok((text, "<stdin>".into()))
}

fn load<T>(path: Option<&Path>, parse: fn(&str) -> gamedec::Result<T>) -> Result<T, CliError> {
    let (text, name) = read_text(path)?;
    parse(&text).map_err(|e| CliError(format!("{name}: {e}")))
}

fn load_game(input: &GameInput) -> Result<Game, CliError> {
    let game = load(input.input.as_deref(), gio::parse_game)?;
    Ok(if input.normalized { normalize(&game) } else { game })
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    load(Some(path), gio::parse_graph)
}

fn tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    if !cli.tol.is_finite() || cli.tol < 0.0 {
        return Err(CliError(format!("--tol must be a finite non-negative number, got {}", cli.tol)));
    }
    Ok(Tolerance::relative(cli.tol))
}

fn player_names(g: &Game) -> Vec<String> {
    g.labels().iter().map(|l| l.name.clone()).collect()
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let t = tolerance(cli)?;
    match &cli.command {
        Command::MinimalGraph { game, dot } => {
            let u = load_game(game)?;
            let g = minimal_graph(&u, &t);
            Ok(Outcome::ok(if *dot {
                let name = if game.normalized { "G_class" } else { "G_u" };
                g.to_dot_labeled(name, Some(&player_names(&u)))
            } else {
                gio::graph_to_json(&g)
            }))
        }
        Command::Normalize { game } => {
            let u = load_game(game)?;
            Ok(Outcome::ok(gio::game_to_json(&normalize(&u))))
        }
        Command::Decompose { game, local_potentials } => {
            let u = load_game(game)?;
            let d = decompose(&u, &t)?;
            let mut value = gio::decomposition_to_value(&d);
            if *local_potentials {
                let g = class_minimal_graph(&u, &t).symmetric_closure();
                let local = match clique_potential_decomposition(&d.potential, u.shape(), &g, &t)? {
                    CliqueOutcome::Feasible(c) => gio::cliques_to_value(&c),
                    CliqueOutcome::Infeasible { residual } => json!({"feasible": false, "residual": residual}),
                };
                value["local_potentials"] = local;
            }
            let passed = d.is_certified(&u, &t);
            Ok(Outcome {
                output: to_pretty(&value),
                passed,
            })
        }
        Command::Check {
            game,
            potential,
            harmonic,
            zero_sum,
            non_strategic,
            is_normalized: normalized_flag,
            graphical,
            graph,
        } => {
            let u = load_game(game)?;
            let mut checks = serde_json::Map::new();
            if *potential {
                checks.insert("potential".into(), exact_potential(&u, &t).is_potential().into());
            }
            if *harmonic {
                checks.insert("harmonic".into(), is_harmonic(&u, &t).into());
            }
            if *zero_sum {
                checks.insert("zero_sum".into(), is_zero_sum(&u, &t).into());
            }
            if *non_strategic {
                checks.insert("non_strategic".into(), is_non_strategic(&u, &t).into());
            }
            if *normalized_flag {
                checks.insert("normalized".into(), is_normalized(&u, &t).into());
            }
            if *graphical {
                let g = load_graph(graph.as_ref().expect("clap enforces --graph"))?;
                checks.insert("graphical".into(), is_graphical(&u, &g, &t)?.into());
            }
            if checks.is_empty() {
                return Err(CliError(
                    "check needs at least one of --potential, --harmonic, --zero-sum, --non-strategic, --is-normalized, --graphical".into(),
                ));
            }
            let passed = checks.values().all(|v| v.as_bool() == Some(true));
            Ok(Outcome {
                output: to_pretty(&json!({"checks": checks, "passed": passed})),
                passed,
            })
        }
        Command::ExtendGraph {
            input,
            kind,
            splitting,
            dot,
            cliques,
        } => {
            let g = load(input.as_deref(), gio::parse_graph)?;
            let extended = match kind {
                Extension::Symmetric => g.symmetric_closure(),
                Extension::Triangle => g.triangle_extension(),
                Extension::Splitting => {
                    let s = load(splitting.as_deref(), gio::parse_splitting)?;
                    g.splitting_extension(&s)?
                }
            };
            Ok(Outcome::ok(if *cliques {
                to_pretty(&json!({"cliques": extended.maximal_cliques()?}))
            } else if *dot {
                extended.to_dot("G_extended")
            } else {
                gio::graph_to_json(&extended)
            }))
        }
        Command::Separable { game, splitting, graph } => {
            let u = load_game(game)?;
            let s = load(Some(splitting), gio::parse_splitting)?;
            let g = match graph {
                Some(p) => load_graph(p)?,
                None => minimal_graph(&u, &t),
            };
            Ok(match is_s_separable(&u, &s, &g, &t)? {
                Separability::Separable(d) => Outcome::ok(to_pretty(&gio::separable_to_value(&d))),
                Separability::NotSeparable { player, residual } => Outcome {
                    output: to_pretty(&json!({"separable": false, "player": player, "residual": residual})),
                    passed: false,
                },
            })
        }
        Command::Verify {
            statement,
            input,
            splitting,
        } => {
            let report = match statement {
                Statement::Theorem1 => {
                    let u = load(input.as_deref(), gio::parse_game)?;
                    let s = load(splitting.as_deref(), gio::parse_splitting)?;
                    verify_theorem1(&u, &s, &t)?
                }
                Statement::Corollary3 => {
                    let u = load(input.as_deref(), gio::parse_game)?;
                    verify_corollary3(&u, &t)?
                }
                Statement::Corollary4 => {
                    let e = load(input.as_deref(), gio::parse_edge_utilities)?;
                    verify_corollary4(&e, &t)?
                }
            };
            Ok(Outcome {
                output: to_pretty(&gio::report_to_value(&report)),
                passed: report.passed(),
            })
        }
        Command::Example { name, cost, graph } => {
            if !cost.is_finite() {
                return Err(CliError("--cost must be finite".into()));
            }
            let game = match name {
                ExampleName::MatchingPennies => matching_pennies(),
                ExampleName::Coordination => coordination_game(),
                ExampleName::Paper8Node => {
                    let g = match graph {
                        Some(p) => load_graph(p)?,
                        None => example_graph(),
                    };
                    make_example_game(&g, *cost)?
                }
            };
            Ok(Outcome::ok(gio::game_to_json(&game)))
        }
        Command::Random {
            kind,
            actions,
            seed,
            graph,
            edges,
        } => {
            let shape = GameShape::new(actions.clone())?;
            let g = graph.as_deref().map(load_graph).transpose()?;
            if *edges {
                if *kind != Kind::Pairwise {
                    return Err(CliError("--edges is only valid with --kind pairwise".into()));
                }
                let g = g.unwrap_or_else(|| Graph::complete(shape.num_players()));
                if g.num_nodes() != shape.num_players() {
                    return Err(CliError("graph size does not match --actions".into()));
                }
                let e = random_edge_utilities(&shape, &g, &mut rng_from_seed(*seed));
                debug_assert!(build_pairwise_game(&e).is_ok());
                return Ok(Outcome::ok(gio::edge_utilities_to_json(&e)));
            }
            let kind = match kind {
                Kind::Dense => GameKind::Dense,
                Kind::Graphical => GameKind::Graphical,
                Kind::Pairwise => GameKind::Pairwise,
                Kind::Potential => GameKind::Potential,
                Kind::Harmonic => GameKind::Harmonic,
                Kind::Nonstrategic => GameKind::NonStrategic,
            };
            let game = generate_random(kind, &shape, g.as_ref(), *seed)?;
            Ok(Outcome::ok(gio::game_to_json(&game)))
        }
    }
}

pub fn emit(cli: &Cli, output: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}
