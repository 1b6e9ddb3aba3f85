use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bseries_core::elementary::evaluate_bseries;
use bseries_core::pruning::{
    assignment_term, enumerate_assignments, enumerate_embeddings, is_subtree, prune_with,
};
use bseries_core::tree::enumerate_trees;
use bseries_core::verify::{verify_composition, verify_lemma1, verify_prop1};
use bseries_core::{
    compose, BSeries, PolynomialVectorField, PruningSemantics, Rational, Report, Tree,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bseries",
    version,
    about = "Exact rooted-tree and B-series computations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all trees up to an order with their symmetry and density.
    Trees {
        #[arg(long)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Tsv)]
        format: TableFormat,
    },
    /// Symmetry coefficient of a tree.
    Sigma { tree: String },
    /// Density of a tree.
    Gamma { tree: String },
    /// Whether TSUB embeds into T.
    Subtree { tsub: String, t: String },
    /// Every embedding of TSUB into T, one per line as vertex images in pre-order.
    Embeddings { tsub: String, t: String },
    /// Assignment matrices of TSUB into T with their pruning terms.
    Assignments { tsub: String, t: String },
    /// The pruning T \ TSUB.
    Prune {
        t: String,
        tsub: String,
        #[arg(long, value_enum, default_value_t = Method::Assignment)]
        method: Method,
    },
    /// Composition of two truncated series, printed as JSON.
    Compose {
        /// FILE, exact-flow, identity, random or random:SEED (class B)
        #[arg(long)]
        a: String,
        /// FILE, exact-flow, identity, random or random:SEED
        #[arg(long)]
        b: String,
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-series coefficients of a B-series applied to a vector field.
    Eval {
        #[arg(long)]
        series: String,
        #[arg(long)]
        field: PathBuf,
        /// Comma-separated rationals; defaults to the field file's y0
        #[arg(long)]
        y0: Option<String>,
        #[arg(long)]
        max_order: usize,
    },
    /// Exact coefficient checks of the composition identities.
    Verify {
        #[arg(value_enum)]
        identity: Identity,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        max_order: usize,
        /// Subtree for lemma1
        #[arg(long)]
        tsub: Option<String>,
        /// Number of extra arguments for prop1
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Test vectors for prop1 as "v1;v2;..." with comma-separated entries
        #[arg(long)]
        vectors: Option<String>,
        /// Seed of the random series used when --a or --b is not given
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        y0: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Assignment)]
        method: Method,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Assignment,
    Embedding,
}

impl From<Method> for PruningSemantics {
    fn from(m: Method) -> Self {
        match m {
            Method::Assignment => PruningSemantics::Assignment,
            Method::Embedding => PruningSemantics::Embedding,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Lemma1,
    Prop1,
    Theorem1,
}

/// Usage, parse and IO errors; always exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = std::result::Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((text, ok)) => {
            print!("{text}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn tree_arg(name: &str, text: &str) -> std::result::Result<Tree, Failure> {
    text.parse()
        .map_err(|e| Failure(format!("{name} {text:?}: {e}")))
}

fn rationals(name: &str, text: &str) -> std::result::Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<Rational>()
                .map_err(|_| Failure(format!("{name}: bad rational {:?}", s.trim())))
        })
        .collect()
}

fn load_field(
    path: &Path,
) -> std::result::Result<(PolynomialVectorField, Option<Vec<Rational>>), Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let field = PolynomialVectorField::from_json(&text)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let y0 = match value.get("y0") {
        None => None,
        Some(v) => {
            let items = v
                .as_array()
                .ok_or_else(|| Failure("\"y0\" must be an array".into()))?;
            let parsed = items
                .iter()
                .map(|x| {
                    x.as_str()
                        .and_then(|s| s.parse::<Rational>().ok())
                        .ok_or_else(|| Failure(format!("\"y0\": bad rational {x}")))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Some(parsed)
        }
    };
    Ok((field, y0))
}

fn resolve_y0(
    field: &PolynomialVectorField,
    from_file: Option<Vec<Rational>>,
    flag: Option<&str>,
) -> std::result::Result<Vec<Rational>, Failure> {
    let y0 = match flag {
        Some(text) => rationals("--y0", text)?,
        None => {
            from_file.unwrap_or_else(|| vec![Rational::from_integer(1.into()); field.dimension()])
        }
    };
    if y0.len() != field.dimension() {
        return Err(Failure(format!(
            "y0 has {} entries, field dimension is {}",
            y0.len(),
            field.dimension()
        )));
    }
    Ok(y0)
}

/// Series named on the command line. Random series are in class B when `class_b` is set.
fn load_series(
    source: &str,
    max_order: usize,
    class_b: bool,
) -> std::result::Result<BSeries, Failure> {
    Ok(match source {
        "exact-flow" => BSeries::exact_flow(max_order),
        "identity" => BSeries::identity(max_order),
        "random" => BSeries::random(1, max_order, class_b),
        _ => match source.strip_prefix("random:") {
            Some(seed) => {
                let seed = seed
                    .parse()
                    .map_err(|_| Failure(format!("bad seed in {source:?}")))?;
                BSeries::random(seed, max_order, class_b)
            }
            None => {
                let text = std::fs::read_to_string(source)
                    .map_err(|e| Failure(format!("{source}: {e}")))?;
                BSeries::from_json(&text)?
            }
        },
    })
}

fn coefficient_rows(rows: &[Vec<Rational>]) -> String {
    let mut out = String::new();
    for (k, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(Rational::to_string).collect();
        let _ = writeln!(out, "{k}\t{}", cells.join(" "));
    }
    out
}

fn report(r: Report) -> Outcome {
    Ok((format!("{r}\n"), r.equal))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Trees { max_order, format } => {
            let trees = enumerate_trees(max_order);
            let text = match format {
                TableFormat::Tsv => {
                    let mut out = String::from("order\ttree\tsigma\tgamma\n");
                    for t in &trees {
                        let _ =
                            writeln!(out, "{}\t{t}\t{}\t{}", t.order(), t.symmetry(), t.density());
                    }
                    out
                }
                TableFormat::Json => {
                    let rows: Vec<serde_json::Value> = trees
                        .iter()
                        .map(|t| {
                            serde_json::json!({
                                "order": t.order(),
                                "tree": t.to_string(),
                                "sigma": t.symmetry(),
                                "gamma": t.density(),
                            })
                        })
                        .collect();
                    format!("{}\n", serde_json::to_string_pretty(&rows)?)
                }
            };
            Ok((text, true))
        }
        Command::Sigma { tree } => Ok((format!("{}\n", tree_arg("TREE", &tree)?.symmetry()), true)),
        Command::Gamma { tree } => Ok((format!("{}\n", tree_arg("TREE", &tree)?.density()), true)),
        Command::Subtree { tsub, t } => {
            let (sub, t) = (tree_arg("TSUB", &tsub)?, tree_arg("T", &t)?);
            Ok((format!("{}\n", is_subtree(&sub, &t)), true))
        }
        Command::Embeddings { tsub, t } => {
            let (sub, t) = (tree_arg("TSUB", &tsub)?, tree_arg("T", &t)?);
            let text: String = enumerate_embeddings(&sub, &t)
                .iter()
                .map(|e| format!("{e}\n"))
                .collect();
            Ok((text, true))
        }
        Command::Assignments { tsub, t } => {
            let (sub, t) = (tree_arg("TSUB", &tsub)?, tree_arg("T", &t)?);
            let text: String = enumerate_assignments(&sub, &t)
                .iter()
                .map(|m| format!("{m}\t{}\n", assignment_term(&t, &sub, m)))
                .collect();
            Ok((text, true))
        }
        Command::Prune { t, tsub, method } => {
            let (t, sub) = (tree_arg("T", &t)?, tree_arg("TSUB", &tsub)?);
            Ok((format!("{}\n", prune_with(method.into(), &t, &sub)), true))
        }
        Command::Compose {
            a,
            b,
            max_order,
            out,
        } => {
            let a = load_series(&a, max_order, true)?;
            let b = load_series(&b, max_order, false)?;
            let text = format!("{}\n", compose(&a, &b, max_order)?.to_json());
            match out {
                Some(path) => {
                    std::fs::write(&path, text)
                        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                    Ok((String::new(), true))
                }
                None => Ok((text, true)),
            }
        }
        Command::Eval {
            series,
            field,
            y0,
            max_order,
        } => {
            let (field, file_y0) = load_field(&field)?;
            let y0 = resolve_y0(&field, file_y0, y0.as_deref())?;
            let a = load_series(&series, max_order, false)?;
            let y1 = evaluate_bseries(&a, &field, &y0, max_order)?;
            Ok((coefficient_rows(&y1.coefficients()), true))
        }
        Command::Verify {
            identity,
            field,
            max_order,
            tsub,
            n,
            vectors,
            seed,
            a,
            b,
            y0,
            method,
        } => {
            let (field, file_y0) = load_field(&field)?;
            let y0 = resolve_y0(&field, file_y0, y0.as_deref())?;
            let default_a = format!("random:{seed}");
            let a = load_series(a.as_deref().unwrap_or(&default_a), max_order, true)?;
            match identity {
                Identity::Lemma1 => {
                    let tsub = tsub.ok_or_else(|| Failure("lemma1 needs --tsub".into()))?;
                    let sub = tree_arg("--tsub", &tsub)?;
                    let r = match method {
                        Method::Assignment => verify_lemma1(&field, &a, &sub, &y0, max_order)?,
                        Method::Embedding => bseries_core::verify::verify_lemma1_with(
                            PruningSemantics::Embedding,
                            &field,
                            &a,
                            &sub,
                            &y0,
                            max_order,
                        )?,
                    };
                    report(r)
                }
                Identity::Prop1 => {
                    let vs = match vectors {
                        Some(text) => text
                            .split(';')
                            .map(|v| rationals("--vectors", v))
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                        // default: the j-th vector has every entry equal to j
                        None => (1..=n)
                            .map(|j| {
                                vec![Rational::from_integer((j as i64).into()); field.dimension()]
                            })
                            .collect(),
                    };
                    if vs.iter().any(|v| v.len() != field.dimension()) {
                        return Err(Failure(
                            "test vector length differs from field dimension".into(),
                        ));
                    }
                    report(verify_prop1(&field, &a, &vs, &y0, max_order)?)
                }
                Identity::Theorem1 => {
                    let default_b = format!("random:{}", seed + 1);
                    let b = load_series(b.as_deref().unwrap_or(&default_b), max_order, false)?;
                    report(verify_composition(&field, &a, &b, &y0, max_order)?)
                }
            }
        }
    }
}
