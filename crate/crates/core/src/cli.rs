//! The `omegarel` command line.
//!
//! Exit status: 0 on success, 1 when a requested λ-verdict is false, 2 on any
//! input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::colimit::{set_colimit_oracle, similarity_closure, top_classes, vague_colimit, Partition};
use crate::dataio::query::{answer_query, lambda_description, Dataset, QueryMap};
use crate::dataio::spec::{flavor_from_ops, DiagramSpec, LatticeDecl};
use crate::dataio::table::{column_values, read_distribution, read_header, write_relation};
use crate::dataio::read_lattice_table;
use crate::diagram::MultiDiagram;
use crate::error::{Error, Result};
use crate::lattice::{default_eps, make_lattice, parse_real, FiniteLattice, Flavor, Lattice, StdLattice};
use crate::lnn::{describe_snap, extract_formula, formula_model, network_to_diagram, LnnNetwork, Role};
use crate::omega::{check_similarity, lambda_similar, SimFactor};
use crate::relation::{Attribute, Domain};

#[derive(Debug, Parser)]
#[command(name = "omegarel", version, about = "Many-valued relations, vague limits and colimits")]
struct Cli {
    /// Built-in lattice: lukasiewicz, goedel, product or boolean (overrides the spec).
    #[arg(long, global = true)]
    lattice: Option<String>,
    /// Flavor such as `times=tensor,plus=join` (overrides the spec).
    #[arg(long, global = true)]
    flavor: Option<String>,
    /// Finite lattice table file (overrides --lattice and the spec).
    #[arg(long = "lattice-table", global = true)]
    lattice_table: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the vague limit of a diagram as a weighted table.
    Limit { spec: PathBuf },
    /// Commutativity degrees per source tuple and the verdicts.
    Commute {
        spec: PathBuf,
        /// Comma-separated source vertices (default: the spec's `sources`, else none).
        #[arg(long)]
        sources: Option<String>,
        /// Exit 1 unless the diagram is λ-commutative.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Print the block relation of the vague colimit.
    Colimit {
        spec: PathBuf,
        /// Apply the similarity closure first.
        #[arg(long)]
        closed: bool,
        /// Print the classical colimit partition (crisp single-vertex arrows only).
        #[arg(long)]
        oracle: bool,
    },
    /// Similarity degree of two distributions on spec vertices, or a check of the vertex similarities.
    Similar {
        spec: PathBuf,
        x: Option<PathBuf>,
        y: Option<PathBuf>,
    },
    /// Answer a query file against a diagram.
    Query { spec: PathBuf, query: PathBuf },
    /// Extract formulas from a network and optionally score a dataset.
    LnnExtract {
        net: PathBuf,
        /// Comma-separated grid points (default: the dataset's values plus 0 and 1, else 0,1/3,2/3,1).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        similarity: Option<PathBuf>,
        /// `column=wire` pairs, comma-separated (default: columns map to equally named wires).
        #[arg(long)]
        map: Option<String>,
    },
    /// λ-description degree of a dataset with respect to a diagram.
    Describe {
        spec: PathBuf,
        dataset: PathBuf,
        /// `column=vertex` pairs, comma-separated.
        #[arg(long)]
        map: String,
        #[arg(long)]
        similarity: Option<PathBuf>,
        /// Exit 1 unless the degree reaches λ.
        #[arg(long)]
        lambda: Option<String>,
    },
}

/// Runs the command line, writing to the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the command line with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(verdict) => {
            if verdict {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn pairs(s: &str) -> Result<Vec<(String, String)>> {
    list(s)
        .into_iter()
        .map(|p| {
            p.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::InvalidParameter(format!("expected `column=target`, got `{p}`")))
        })
        .collect()
}

fn spec_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Limit { spec }
        | Command::Commute { spec, .. }
        | Command::Colimit { spec, .. }
        | Command::Similar { spec, .. }
        | Command::Query { spec, .. }
        | Command::Describe { spec, .. } => Some(spec),
        Command::LnnExtract { .. } => None,
    }
}

/// Flags take precedence over the spec's `lattice` line; product is the default.
fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let spec = spec_path(&cli.command).map(DiagramSpec::load).transpose()?;
    let table = match (&cli.lattice_table, &cli.lattice, spec.as_ref().and_then(|s| s.lattice.as_ref())) {
        (Some(p), _, _) => Some(p.clone()),
        (None, None, Some(LatticeDecl::Table(p))) => Some(p.clone()),
        _ => None,
    };
    let ops = cli.flavor.clone().or_else(|| spec.as_ref().and_then(|s| s.flavor.clone()));
    if let Some(p) = table {
        let l: FiniteLattice = read_lattice_table(&p)?;
        let fl = flavor_from_ops(l, ops.as_deref())?;
        return execute(&cli.command, spec.as_ref(), fl, out, err);
    }
    let l = match (&cli.lattice, spec.as_ref().and_then(|s| s.lattice.as_ref())) {
        (Some(k), _) => make_lattice(k)?,
        (None, Some(LatticeDecl::Std(l))) => *l,
        _ => StdLattice::Product,
    };
    execute(&cli.command, spec.as_ref(), flavor_from_ops(l, ops.as_deref())?, out, err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn parse_lambda<L: Lattice>(l: &L, s: &Option<String>) -> Result<Option<L::Value>> {
    s.as_deref().map(|x| l.parse_value(x)).transpose()
}

fn execute<L: Lattice>(
    cmd: &Command,
    spec: Option<&DiagramSpec>,
    flavor: Flavor<L>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<bool> {
    let eps = default_eps();
    let l = flavor.lattice().clone();
    let diagram = || -> Result<MultiDiagram<L>> { spec.expect("spec command").build(flavor.clone()) };
    match cmd {
        Command::Limit { .. } => {
            write_relation(&diagram()?.vague_limit()?, &mut *out)?;
            Ok(true)
        }
        Command::Commute { sources, lambda, .. } => {
            let d = diagram()?;
            let lambda = parse_lambda(&l, lambda)?;
            let src: Vec<String> = match sources {
                Some(s) => list(s),
                None => d.sources().map(|s| s.to_vec()).unwrap_or_default(),
            };
            let src: Vec<&str> = src.iter().map(String::as_str).collect();
            let c = d.commutativity_degree(&src, eps)?;
            write_relation(&c.degrees, &mut *out)?;
            writeln!(out, "infimum: {}", l.format_degree(c.infimum)).map_err(io_err)?;
            writeln!(out, "commutative: {}", c.commutative).map_err(io_err)?;
            match lambda {
                Some(lam) => {
                    let ok = c.is_lambda_commutative(lam, eps);
                    writeln!(out, "{}-commutative: {ok}", l.format_value(lam)).map_err(io_err)?;
                    Ok(ok)
                }
                None => Ok(true),
            }
        }
        Command::Colimit { closed, oracle, .. } => {
            let d = diagram()?;
            let obj = vague_colimit(&d)?;
            for v in &obj.violations {
                writeln!(err, "warning: composite bound fails for {:?} then {:?}: {}", v.first, v.second, v.detail)
                    .map_err(io_err)?;
            }
            let rel = if *closed { similarity_closure(&obj.relation, &flavor)? } else { obj.relation.clone() };
            if *oracle {
                let part = set_colimit_oracle(&d)?;
                write_partition(&part, out)?;
                if *closed {
                    let agrees = top_classes(&obj, &rel) == part;
                    writeln!(out, "agrees with closed colimit: {agrees}").map_err(io_err)?;
                }
                return Ok(true);
            }
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["block_1", "tuple_1", "block_2", "tuple_2", "omega"])?;
            for row in obj.rows(&rel) {
                w.write_record(&row)?;
            }
            w.flush().map_err(io_err)?;
            Ok(true)
        }
        Command::Similar { x, y, .. } => {
            let d = diagram()?;
            let Some(x) = x else {
                for v in d.graph().vertices() {
                    let sim = d.object(v).expect("vertex").sim();
                    let report = match sim.factors().first() {
                        Some(SimFactor::Explicit(r)) => check_similarity(r, &flavor, eps)?,
                        _ => {
                            writeln!(out, "{v}: identity").map_err(io_err)?;
                            continue;
                        }
                    };
                    let show = |w: &Option<crate::omega::Witness>| w.as_ref().map_or("ok".to_string(), |w| format!("fails at {w}"));
                    writeln!(
                        out,
                        "{v}: reflexive {}, symmetric {}, transitive {}",
                        show(&report.reflexive),
                        show(&report.symmetric),
                        show(&report.transitive)
                    )
                    .map_err(io_err)?;
                }
                return Ok(true);
            };
            let vs = read_header(x)?;
            let vrefs: Vec<&str> = vs.iter().map(String::as_str).collect();
            let attrs = d.carrier_of(&vrefs)?;
            let sim = d.product_similarity(&vrefs)?;
            let xd = read_distribution(x, &l, &attrs)?;
            let yd = match y {
                Some(p) => read_distribution(p, &l, &attrs)?,
                None => xd.clone(),
            };
            let deg = lambda_similar(&xd, &yd, &sim, &flavor)?;
            writeln!(out, "{}", l.format_degree(deg)).map_err(io_err)?;
            Ok(true)
        }
        Command::Query { query, .. } => {
            let d = diagram()?;
            let q = QueryMap::load(query)?;
            write_relation(&answer_query(&d, &q)?, &mut *out)?;
            Ok(true)
        }
        Command::Describe { dataset, map, similarity, lambda, .. } => {
            let d = diagram()?;
            let lambda = parse_lambda(&l, lambda)?;
            let map = pairs(map)?;
            let attrs = dataset_attributes(dataset, &d.attributes(), &map)?;
            let data = Dataset::load(dataset, &l, &attrs, similarity.as_deref())?;
            let (ok, deg) = lambda_description(&d, &data, &map, lambda.unwrap_or_else(|| l.bottom()), eps)?;
            writeln!(out, "degree: {}", l.format_degree(deg)).map_err(io_err)?;
            if let Some(lam) = lambda {
                writeln!(out, "{}-description: {ok}", l.format_value(lam)).map_err(io_err)?;
            }
            Ok(ok)
        }
        Command::LnnExtract { net, grid, dataset, similarity, map } => {
            let text = std::fs::read_to_string(net).map_err(|e| Error::io(net, e))?;
            let network = LnnNetwork::from_json(&text)?;
            for (wire, f) in extract_formula(&network)? {
                writeln!(out, "{wire} = {f}").map_err(io_err)?;
            }
            let Some(dataset) = dataset else { return Ok(true) };
            let grid = match grid {
                Some(g) => list(g)
                    .iter()
                    .map(|x| parse_real(x).ok_or_else(|| Error::InvalidParameter(format!("bad grid point `{x}`"))))
                    .collect::<Result<Vec<f64>>>()?,
                None => default_grid(dataset)?,
            };
            let map = match map {
                Some(m) => pairs(m)?,
                None => read_header(dataset)?.into_iter().map(|c| (c.clone(), c)).collect(),
            };
            let model = formula_model(&network)?;
            let (d, snaps) = network_to_diagram(&model, &grid, &flavor)?;
            for s in &snaps {
                writeln!(err, "snap: {}", describe_snap(s)).map_err(io_err)?;
            }
            let wires: Vec<String> = network.wires.iter().filter(|w| w.role != Role::Hidden).map(|w| w.id.clone()).collect();
            let attrs = dataset_attributes(dataset, &d.attributes(), &map)?;
            if let Some((c, w)) = map.iter().find(|(_, w)| !wires.contains(w)) {
                return Err(Error::ColumnMismatch(format!("column `{c}` maps to `{w}`, which is not an input or output wire")));
            }
            let data = Dataset::load(dataset, &l, &attrs, similarity.as_deref())?;
            let (_, deg) = lambda_description(&d, &data, &map, l.bottom(), eps)?;
            writeln!(out, "fit: {}", l.format_degree(deg)).map_err(io_err)?;
            Ok(true)
        }
    }
}

/// Data column attributes, each with the domain of the attribute it maps to.
fn dataset_attributes(path: &Path, attrs: &[Attribute], map: &[(String, String)]) -> Result<Vec<Attribute>> {
    read_header(path)?
        .into_iter()
        .map(|c| {
            let (_, a) = map
                .iter()
                .find(|(k, _)| *k == c)
                .ok_or_else(|| Error::ColumnMismatch(format!("column `{c}` is not mapped")))?;
            let att = attrs.iter().find(|x| x.name == *a).ok_or_else(|| Error::UnknownAttribute(a.clone()))?;
            Ok(Attribute::new(c, att.domain.clone()))
        })
        .collect()
}

/// Every numeric value occurring in the dataset, plus 0 and 1.
fn default_grid(path: &Path) -> Result<Vec<f64>> {
    let mut g = vec![0.0, 1.0];
    for (c, vals) in column_values(path)? {
        for v in vals {
            let x = parse_real(&v).ok_or_else(|| Error::InvalidParameter(format!("column `{c}` holds non-numeric `{v}`")))?;
            if !g.iter().any(|y: &f64| (y - x).abs() <= 1e-9) {
                g.push(x);
            }
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Domain::numeric(&g)?;
    Ok(g)
}

fn write_partition(p: &Partition, out: &mut dyn Write) -> Result<()> {
    for class in p {
        let members: Vec<String> = class.iter().map(|(b, t)| format!("{b}:{t}")).collect();
        writeln!(out, "{{{}}}", members.join(" ")).map_err(io_err)?;
    }
    Ok(())
}
