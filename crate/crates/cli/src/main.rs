use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use singular_lct::cluster::ClusterJson;
use singular_lct::corpus::{corpus, run_corpus};
use singular_lct::engine::{adapted_candidates, check_main_theorem, lct_via_term_ideals};
use singular_lct::enriques::{DiagramJson, EnriquesDiagram};
use singular_lct::error::Error;
use singular_lct::newton::term_ideal;
use singular_lct::poly::parse;
use singular_lct::rational::{display, int, join, parse_rational, to_fraction_string};
use singular_lct::resolution::{resolve_curve, Resolution};
use singular_lct::{BivariatePolynomial, MonomialIdeal, Rational, WeightedCluster};

const SCHEMA: &str = "singular-lct/1";

#[derive(Parser)]
#[command(name = "singular-lct", version, about = "Exact log canonical thresholds and jumping numbers of plane curves and monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print versioned JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Log canonical threshold of a curve, ideal, diagram or weighted cluster.
    Lct(Input),
    /// Resolve a curve and print its weighted cluster and Enriques diagram.
    Resolve {
        #[arg(long)]
        curve: String,
        /// Write the Enriques diagram as Graphviz source.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Newton polygon, facets and integral closure of a monomial ideal.
    Newton(Input),
    /// Log canonical threshold of a monomial ideal, with its multiplier ideal there.
    MonomialLct(Input),
    /// Jumping numbers up to a bound (at most 1 for curves).
    Jumping {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "1")]
        bound: String,
    },
    /// Unload a weighted cluster.
    Unload {
        #[command(flatten)]
        input: Input,
        /// Replace the weights, e.g. `4,2,0,2,1`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        weights: Option<Vec<i64>>,
    },
    /// The diagram of the curve x^p - y^q.
    Tpq {
        p: i64,
        q: i64,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Union of two diagrams given as JSON files.
    Union {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Enriques diagram of a curve, ideal or file, with its classification.
    Diagram {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Compare the cluster lct with the minimum over adapted term ideals;
    /// without input, runs the built-in corpus.
    CheckTheorem(Input),
    /// Run the built-in corpus and print a pass/fail table.
    Corpus,
}

#[derive(Args, Default)]
#[group(multiple = false)]
struct Input {
    /// A polynomial in x and y.
    #[arg(long)]
    curve: Option<String>,
    /// Monomial generators, e.g. "x^8, x^3y^2, y^4", or a polynomial whose terms generate.
    #[arg(long)]
    monomial: Option<String>,
    /// JSON file with a list of exponent pairs.
    #[arg(long, value_name = "FILE")]
    ideal: Option<PathBuf>,
    /// JSON file with an Enriques diagram.
    #[arg(long, value_name = "FILE")]
    diagram: Option<PathBuf>,
    /// JSON file with a weighted cluster.
    #[arg(long, value_name = "FILE")]
    cluster: Option<PathBuf>,
}

enum Source {
    Curve(String, BivariatePolynomial),
    Ideal(MonomialIdeal),
    Diagram(EnriquesDiagram),
    Cluster(WeightedCluster),
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

impl Input {
    fn source(&self) -> anyhow::Result<Option<Source>> {
        Ok(Some(if let Some(src) = &self.curve {
            Source::Curve(src.clone(), parse(src)?)
        } else if let Some(src) = &self.monomial {
            Source::Ideal(parse_monomials(src)?)
        } else if let Some(path) = &self.ideal {
            Source::Ideal(read_json(path)?)
        } else if let Some(path) = &self.diagram {
            let j: DiagramJson = read_json(path)?;
            Source::Diagram(j.to_diagram()?)
        } else if let Some(path) = &self.cluster {
            let j: ClusterJson = read_json(path)?;
            Source::Cluster(j.to_weighted()?)
        } else {
            return Ok(None);
        }))
    }

    fn require(&self) -> anyhow::Result<Source> {
        self.source()?
            .ok_or_else(|| usage("one of --curve, --monomial, --ideal, --diagram, --cluster is required"))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).into())
}

fn write_dot(path: Option<&PathBuf>, d: &EnriquesDiagram) -> anyhow::Result<()> {
    if let Some(path) = path {
        fs::write(path, d.to_dot()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Generators separated by commas, optionally in parentheses; every term of
/// every part is a generator.
fn parse_monomials(src: &str) -> anyhow::Result<MonomialIdeal> {
    let mut body = src.trim();
    if body.contains(',') {
        body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
    }
    let mut points = Vec::new();
    for part in body.split(',') {
        let f = parse(part)?;
        points.extend(term_ideal(&f)?.generators().iter().copied());
    }
    Ok(MonomialIdeal::new(points)?)
}

fn resolve(src: &str, f: &BivariatePolynomial) -> anyhow::Result<(Resolution, EnriquesDiagram)> {
    let r = resolve_curve(f)?;
    let d = r.diagram.clone().ok_or_else(|| anyhow!(Error::Precondition(format!("{src} is smooth at the origin"))))?;
    Ok((r, d))
}

fn diagram_of(source: Source) -> anyhow::Result<EnriquesDiagram> {
    Ok(match source {
        Source::Curve(src, f) => resolve(&src, &f)?.1,
        Source::Ideal(a) => singular_lct::monomial_diagram::staircase_to_diagram(&singular_lct::Staircase::of(a))?,
        Source::Diagram(d) => d,
        Source::Cluster(k) => EnriquesDiagram::from_weighted_cluster(&k)?,
    })
}

fn ideal_of(source: Source) -> anyhow::Result<MonomialIdeal> {
    match source {
        Source::Ideal(a) => Ok(a),
        Source::Curve(_, f) => Ok(term_ideal(&f)?),
        _ => Err(usage("expected --monomial, --ideal or --curve")),
    }
}

fn fractions(v: &[Rational]) -> Value {
    v.iter().map(to_fraction_string).collect()
}

fn pairs(a: &MonomialIdeal) -> Value {
    json!(a.pairs())
}

struct Output {
    text: String,
    json: Value,
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    let out = |text: String, json: Value| Ok(Output { text, json });
    match &cli.command {
        Command::Lct(input) => match input.require()? {
            Source::Curve(src, f) => {
                let r = resolve_curve(&f)?;
                match &r.diagram {
                    None => out("1".into(), json!({ "curve": src, "lct": "1" })),
                    Some(d) => {
                        let l = r.cluster.lct()?.value;
                        let term = lct_via_term_ideals(d)?;
                        out(display(&l), json!({ "curve": src, "lct": to_fraction_string(&l), "lct_via_term_ideals": to_fraction_string(&term) }))
                    }
                }
            }
            Source::Ideal(a) => {
                let l = a.lct()?;
                out(display(&l), json!({ "ideal": pairs(&a), "lct": to_fraction_string(&l) }))
            }
            Source::Diagram(d) => {
                let l = d.to_weighted_cluster().lct()?;
                out(display(&l.value), json!({ "lct": to_fraction_string(&l.value), "argmin": l.argmin.iter().map(|a| a + 1).collect::<Vec<_>>() }))
            }
            Source::Cluster(k) => {
                let l = k.lct()?;
                out(display(&l.value), json!({ "lct": to_fraction_string(&l.value), "argmin": l.argmin.iter().map(|a| a + 1).collect::<Vec<_>>() }))
            }
        },
        Command::Resolve { curve, dot } => {
            let f = parse(curve)?;
            let r = resolve_curve(&f)?;
            let Some(d) = &r.diagram else {
                return out(format!("{curve} is smooth at the origin"), json!({ "curve": curve, "cluster": null, "diagram": null }));
            };
            write_dot(dot.as_ref(), d)?;
            let weights = r.cluster.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ");
            let edges: String = d.tree.edges().iter().map(|e| e.letter()).collect();
            let text = format!("points: {}\nweights: {weights}\nedges: {edges}\nlct: {}", d.len(), display(&r.cluster.lct()?.value));
            out(text, json!({ "curve": curve, "cluster": ClusterJson::from(&r.cluster), "diagram": d.to_json() }))
        }
        Command::Newton(input) => {
            let a = ideal_of(input.require()?)?;
            let closure = a.integral_closure();
            let vertices: Vec<String> = a.newton_vertices().iter().map(|p| p.to_string()).collect();
            let facets = a.newton_facets();
            let facet_text: Vec<String> = facets.iter().map(|f| format!("{}m + {}n = {} (length {})", f.q, f.p, f.level, f.d)).collect();
            let lct = a.lct().ok();
            let mut text = format!(
                "ideal: {a}\nvertices: {}\nfacets: {}\nintegral closure: {closure}",
                vertices.join(" "),
                facet_text.join(", ")
            );
            if let Some(l) = &lct {
                text.push_str(&format!("\nlct: {}", display(l)));
            }
            out(text, json!({
                "ideal": pairs(&a),
                "vertices": a.newton_vertices(),
                "facets": facets,
                "integral_closure": pairs(&closure),
                "lct": lct.as_ref().map(to_fraction_string),
            }))
        }
        Command::MonomialLct(input) => {
            let a = ideal_of(input.require()?)?;
            let l = a.lct()?;
            let j = a.multiplier_ideal(&l)?;
            out(display(&l), json!({ "ideal": pairs(&a), "lct": to_fraction_string(&l), "multiplier_ideal_at_lct": pairs(&j) }))
        }
        Command::Jumping { input, bound } => {
            let bound = parse_rational(bound).map_err(|e| usage(e.to_string()))?;
            let (kind, values) = match input.require()? {
                Source::Ideal(a) => ("ideal", a.jumping_numbers(&bound)?),
                source => {
                    if bound > int(1) {
                        return Err(usage("--bound must be at most 1 for curves"));
                    }
                    let k = match source {
                        Source::Curve(_, f) => resolve_curve(&f)?.cluster,
                        Source::Diagram(d) => d.to_weighted_cluster(),
                        Source::Cluster(k) => k,
                        Source::Ideal(_) => unreachable!(),
                    };
                    let values = if k.is_empty() { Vec::new() } else { k.jumping_numbers(&bound)? };
                    ("curve", values)
                }
            };
            out(join(&values), json!({ "kind": kind, "bound": to_fraction_string(&bound), "jumping_numbers": fractions(&values) }))
        }
        Command::Unload { input, weights } => {
            let mut k = match input.require()? {
                Source::Curve(_, f) => resolve_curve(&f)?.cluster,
                Source::Diagram(d) => d.to_weighted_cluster(),
                Source::Cluster(k) => k,
                Source::Ideal(_) => return Err(usage("unload takes --curve, --diagram or --cluster")),
            };
            if let Some(w) = weights {
                k = WeightedCluster::new(k.cluster.clone(), w.clone())?;
            }
            let (u, steps) = k.unload_by(|v| v[0])?;
            let list = |v: &[i64]| v.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ");
            let branch = u.excesses();
            let text = format!("unloaded: {}\nbranch: {}\nsteps: {}", list(&u.weights), list(&branch), steps.len());
            out(text, json!({
                "cluster": ClusterJson::from(&u),
                "branch": branch,
                "steps": steps.iter().map(|s| s + 1).collect::<Vec<_>>(),
            }))
        }
        Command::Tpq { p, q, dot } => {
            let d = EnriquesDiagram::t_pq(*p, *q)?;
            write_dot(dot.as_ref(), &d)?;
            out(diagram_text(&d), json!({ "diagram": d.to_json() }))
        }
        Command::Union { first, second, dot } => {
            let a: DiagramJson = read_json(first)?;
            let b: DiagramJson = read_json(second)?;
            let d = a.to_diagram()?.union(&b.to_diagram()?)?;
            write_dot(dot.as_ref(), &d)?;
            out(diagram_text(&d), json!({ "diagram": d.to_json() }))
        }
        Command::Diagram { input, dot } => {
            let d = diagram_of(input.require()?)?;
            write_dot(dot.as_ref(), &d)?;
            let class = d.tree.classify();
            let free: Vec<String> =
                (0..d.len()).filter(|&i| class.free[i]).map(|i| format!("P{}", i + 1)).collect();
            let mut text = format!(
                "{}\nfree points: {}\nnon-degenerate: {}, binary: {}, unibranch: {}",
                diagram_text(&d),
                free.join(" "),
                class.non_degenerate,
                class.binary,
                class.unibranch
            );
            for w in &class.witnesses {
                text.push_str(&format!("\n  P{}: {}", w.vertex, w.reason));
            }
            out(text, json!({ "diagram": d.to_json(), "classification": class }))
        }
        Command::CheckTheorem(input) => match input.source()? {
            None => corpus_output(),
            Some(source) => {
                let d = diagram_of(source)?;
                let r = check_main_theorem(&d)?;
                let candidates = adapted_candidates(&d)?;
                let lines: Vec<String> = candidates
                    .iter()
                    .map(|c| format!("  P{}: {} -> {}", c.rho, c.staircase.ideal(), display(&c.lct)))
                    .collect();
                let text = format!(
                    "lct (cluster): {}\nlct (term ideals): {}\ncandidates:\n{}\nholds",
                    display(&r.lct_direct),
                    display(&r.lct_term),
                    lines.join("\n")
                );
                out(text, serde_json::to_value(&r)?)
            }
        },
        Command::Corpus => corpus_output(),
    }
}

fn diagram_text(d: &EnriquesDiagram) -> String {
    let mut lines = Vec::with_capacity(d.len());
    for i in 0..d.len() {
        let parent = match (d.tree.parent(i), d.tree.edge(i)) {
            (Some(p), Some(e)) => format!(" <-{}- P{}", e.letter(), p + 1),
            _ => String::new(),
        };
        lines.push(format!("P{} [{}]{parent}", i + 1, d.weights[i]));
    }
    lines.join("\n")
}

fn corpus_output() -> anyhow::Result<Output> {
    let entries = run_corpus(&corpus());
    let failed = entries.iter().filter(|e| !e.passed).count();
    let mut text = String::new();
    for e in &entries {
        let lct = e.lct_direct.as_ref().map(display).unwrap_or_else(|| "-".into());
        let status = if e.passed { "pass" } else { "FAIL" };
        text.push_str(&format!("{status}  {:<9} {:<32} {lct}", e.family, e.curve));
        if let Some(err) = &e.error {
            text.push_str(&format!("  {err}"));
        }
        text.push('\n');
    }
    text.push_str(&format!("{} curves, {} passed, {failed} failed", entries.len(), entries.len() - failed));
    if failed > 0 {
        bail!(Error::TheoremViolation(format!("{failed} corpus curves failed\n{text}")));
    }
    Ok(Output { text, json: json!({ "curves": entries, "passed": entries.len(), "failed": 0 }) })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        1
    } else if matches!(e.downcast_ref::<Error>(), Some(Error::TheoremViolation(_))) {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                let mut v = json!({ "schema": SCHEMA });
                if let (Value::Object(m), Value::Object(extra)) = (&mut v, o.json) {
                    m.extend(extra);
                }
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                println!("{}", o.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
