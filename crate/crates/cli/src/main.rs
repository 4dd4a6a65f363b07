mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sg_harmonic::analysis::third_point::subedge_for_position;
use sg_harmonic::analysis::{
    classify_edge, count_zero_junctions, dsv_check, edges_by_side_length, integer_relations,
    junction_derivative, locate_extremum, simultaneous_monotone, third_point_of_subedge,
    DerivClass, Extremum, Monotonicity,
};
use sg_harmonic::gasket::{edge_samples, eval_dyadic, BoundaryValues, Edge, EdgePoint};
use sg_harmonic::suites::{run_suites, Suite, SuiteConfig};
use sg_harmonic::Rational;

use report::{exact_and_float, rational_json, Format, Report, Table};

const MAX_SCAN_DEPTH: u32 = 20;

#[derive(Parser)]
#[command(name = "sgh", version, about = "Exact harmonic functions on the Sierpinski gasket")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Value at a dyadic point or a sub-edge third point of an edge.
    Eval {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value = "bottom")]
        edge: Edge,
        /// Position along the edge: `k/2^m`, `3/8`, `0.375`, `1/3`, ...
        #[arg(long, value_parser = parse_point)]
        point: Rational,
    },
    /// Monotonicity of the three edge restrictions.
    Classify {
        #[command(flatten)]
        triple: Triple,
        /// Bracket depth for extrema of non-monotone edges.
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Exact samples at k/2^depth along an edge, as CSV.
    Scan {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value = "bottom")]
        edge: Edge,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Run verification suites.
    Verify {
        /// Suite name, repeatable; `all` runs every suite.
        #[arg(long = "suite", default_value = "all")]
        suites: Vec<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long = "m-max")]
        m_max: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        triple: OptionalTriple,
    },
    /// Junction points with a zero derivative class, and small integer
    /// relations among the boundary values.
    ZeroSearch {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Largest absolute coefficient in the relation search.
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
}

#[derive(Args)]
struct Triple {
    /// Value at p0.
    #[arg(short = 'a', long, allow_hyphen_values = true, value_name = "P/Q")]
    alpha: Rational,
    /// Value at p1.
    #[arg(short = 'b', long, allow_hyphen_values = true, value_name = "P/Q")]
    beta: Rational,
    /// Value at p2.
    #[arg(short = 'g', long, allow_hyphen_values = true, value_name = "P/Q")]
    gamma: Rational,
}

impl Triple {
    fn values(&self) -> BoundaryValues {
        BoundaryValues::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone())
    }
}

#[derive(Args)]
#[group(multiple = true, requires_all = ["alpha", "beta", "gamma"])]
struct OptionalTriple {
    /// Extra triple to check alongside the random ones (value at p0).
    #[arg(short = 'a', long, allow_hyphen_values = true, value_name = "P/Q")]
    alpha: Option<Rational>,
    #[arg(short = 'b', long, allow_hyphen_values = true, value_name = "P/Q")]
    beta: Option<Rational>,
    #[arg(short = 'g', long, allow_hyphen_values = true, value_name = "P/Q")]
    gamma: Option<Rational>,
}

impl OptionalTriple {
    fn values(&self) -> Option<BoundaryValues> {
        match (&self.alpha, &self.beta, &self.gamma) {
            (Some(a), Some(b), Some(g)) => Some(BoundaryValues::new(a.clone(), b.clone(), g.clone())),
            _ => None,
        }
    }
}

/// Accepts `k/2^m` besides the plain rational forms.
fn parse_point(s: &str) -> Result<Rational, String> {
    if let Some((k, pow)) = s.split_once("/2^") {
        let k: i64 = k.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let m: i32 = pow.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        let scale = Rational::frac(1, 2).pow(m).map_err(|e| e.to_string())?;
        return Ok(Rational::from(k) * scale);
    }
    s.parse::<Rational>().map_err(|e| e.to_string())
}

fn triple_json(bv: &BoundaryValues) -> Value {
    json!({
        "alpha": rational_json(&bv.alpha),
        "beta": rational_json(&bv.beta),
        "gamma": rational_json(&bv.gamma),
    })
}

enum Outcome {
    Success,
    VerificationFailed,
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_eval(bv: &BoundaryValues, edge: Edge, point: &Rational) -> Result<Report> {
    let mut report = Report::new(
        "eval",
        json!({ "triple": triple_json(bv), "edge": edge, "point": rational_json(point) }),
    );
    let value = if point.dyadic_parts().is_some() {
        eval_dyadic(bv, &EdgePoint::new(edge, point.clone()))?
    } else {
        let (cell, which) = subedge_for_position(point)
            .ok_or(sg_harmonic::Error::UnsupportedPoint(point.clone()))?;
        third_point_of_subedge(&edge.orient(bv), &cell, which)?.1
    };
    report.human.push(exact_and_float(&value));
    report.results = json!({ "value": rational_json(&value), "float": value.to_f64() });
    report.table = Some(Table {
        header: vec!["edge", "x_num", "x_den", "f_num", "f_den", "f_float"],
        rows: vec![vec![
            edge.to_string(),
            point.numer().to_string(),
            point.denom().to_string(),
            value.numer().to_string(),
            value.denom().to_string(),
            value.to_f64().to_string(),
        ]],
    });
    Ok(report)
}

fn extremum_text(ext: &Extremum) -> String {
    match ext {
        Extremum::Bracket { lo, hi, kind } => format!("{kind} in [{lo}, {hi}]"),
        Extremum::AtJunction { position, kind } => format!("{kind} at {position}"),
    }
}

fn cmd_classify(bv: &BoundaryValues, depth: u32) -> Result<Report> {
    let mut report = Report::new("classify", json!({ "triple": triple_json(bv), "depth": depth }));
    let mut edges = Vec::new();
    let mut rows = Vec::new();
    for edge in Edge::ALL {
        let class = classify_edge(bv, edge);
        let extremum = if class == Monotonicity::NonMonotone {
            Some(locate_extremum(bv, edge, depth.max(1))?)
        } else {
            None
        };
        let mut line = format!("{edge}: {class}");
        if let Some(ext) = &extremum {
            line.push_str(&format!(", {}", extremum_text(ext)));
        }
        report.human.push(line);
        rows.push(vec![
            edge.to_string(),
            class.to_string(),
            edge.side_length(bv).to_string(),
            extremum.as_ref().map(extremum_text).unwrap_or_default(),
        ]);
        edges.push(json!({
            "edge": edge,
            "class": class,
            "dsv": dsv_check(bv, edge),
            "side_length": rational_json(&edge.side_length(bv)),
            "extremum": extremum,
        }));
    }
    let simultaneous = if bv.is_constant() { None } else { Some(simultaneous_monotone(bv)?) };
    report.human.push(format!(
        "simultaneous: {}",
        simultaneous.map_or("n/a (constant)".to_string(), |s| s.to_string())
    ));
    let order = edges_by_side_length(bv);
    let order_text: Vec<String> = order.iter().map(|(e, len)| format!("{e} ({len})")).collect();
    report.human.push(format!("side lengths: {}", order_text.join(" >= ")));
    report.results = json!({
        "edges": edges,
        "simultaneous": simultaneous,
        "side_length_order": order.iter().map(|(e, _)| e).collect::<Vec<_>>(),
    });
    report.table = Some(Table { header: vec!["edge", "class", "side_length", "extremum"], rows });
    Ok(report)
}

/// Streams the CSV directly; other formats collect the rows first.
fn cmd_scan(bv: &BoundaryValues, edge: Edge, depth: u32, format: Format, out: &mut dyn Write) -> Result<()> {
    if depth > MAX_SCAN_DEPTH {
        return Err(sg_harmonic::Error::LevelTooLarge { max: MAX_SCAN_DEPTH, got: depth }.into());
    }
    let n = Rational::from(num_pow2(depth));
    let rows = edge_samples(bv, edge, depth).map(|(k, f)| {
        let x = Rational::from(k) / &n;
        [
            x.numer().to_string(),
            x.denom().to_string(),
            f.numer().to_string(),
            f.denom().to_string(),
            f.to_f64().to_string(),
        ]
    });
    match format {
        Format::Csv | Format::Human => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["x_num", "x_den", "f_num", "f_den", "f_float"])?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut report = Report::new(
                "scan",
                json!({ "triple": triple_json(bv), "edge": edge, "depth": depth }),
            );
            let samples: Vec<Value> = rows
                .map(|[xn, xd, fnum, fden, _]| json!({ "x": format!("{xn}/{xd}"), "f": format!("{fnum}/{fden}") }))
                .collect();
            report.results = json!({ "samples": samples });
            report.write(format, out)?;
        }
    }
    Ok(())
}

fn num_pow2(depth: u32) -> i64 {
    1i64 << depth
}

fn cmd_verify(suite_names: &[String], config: &SuiteConfig) -> Result<(Report, bool)> {
    let mut suites = Vec::new();
    for name in suite_names {
        if name.eq_ignore_ascii_case("all") {
            suites.extend(Suite::ALL);
        } else {
            suites.push(name.parse::<Suite>().map_err(|e| anyhow!(e))?);
        }
    }
    let mut report = Report::new(
        "verify",
        json!({
            "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "trials": config.trials,
            "depth": config.depth,
            "m_max": config.m_max,
            "seed": config.seed,
            "triple": config.triple.as_ref().map(triple_json),
        }),
    );
    report.suites = run_suites(&suites, config);
    let all_pass = report.suites.iter().all(|s| s.passed());
    for s in &report.suites {
        report.human.push(format!("{}: {}", s.name, s.status));
        report.human.extend(s.details.iter().map(|d| format!("  {d}")));
    }
    report.results = json!({ "passed": all_pass });
    report.table = Some(Table {
        header: vec!["suite", "status"],
        rows: report.suites.iter().map(|s| vec![s.name.clone(), s.status.to_string()]).collect(),
    });
    Ok((report, all_pass))
}

fn class_text(c: Option<DerivClass>) -> String {
    c.map_or("-".into(), |c| c.to_string())
}

fn cmd_zero_search(bv: &BoundaryValues, depth: u32, bound: i64) -> Result<Report> {
    let mut report = Report::new(
        "zero-search",
        json!({ "triple": triple_json(bv), "depth": depth, "bound": bound }),
    );
    let scan = count_zero_junctions(bv, depth)?;
    let relations = integer_relations(bv, bound);
    report.human.push(format!("zero junctions to depth {depth}: {}", scan.count));
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for p in &scan.points {
        let ep = p.as_edge_point();
        let classes = junction_derivative(bv, ep.edge, &ep.position)?;
        report.human.push(format!(
            "  {p}: left {}, right {}",
            class_text(classes.left),
            class_text(classes.right)
        ));
        rows.push(vec![p.to_string(), class_text(classes.left), class_text(classes.right)]);
        points.push(json!({ "point": p, "label": p.to_string(), "classes": classes }));
    }
    if relations.is_empty() {
        report.human.push(format!("no relation with |coefficients| <= {bound}"));
    }
    for [n, m, k] in &relations {
        report.human.push(format!("relation ({n}, {m}, {k}): {n}*alpha + {m}*beta + {k}*gamma = 0"));
    }
    report.results = json!({ "count": scan.count, "points": points, "relations": relations });
    report.table = Some(Table { header: vec!["point", "left", "right"], rows });
    Ok(report)
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut out = open_output(&cli.output)?;
    let outcome = match &cli.command {
        Command::Scan { triple, edge, depth } => {
            cmd_scan(&triple.values(), *edge, *depth, cli.format, &mut *out)?;
            Outcome::Success
        }
        Command::Eval { triple, edge, point } => {
            cmd_eval(&triple.values(), *edge, point)?.write(cli.format, &mut *out)?;
            Outcome::Success
        }
        Command::Classify { triple, depth } => {
            cmd_classify(&triple.values(), *depth)?.write(cli.format, &mut *out)?;
            Outcome::Success
        }
        Command::ZeroSearch { triple, depth, bound } => {
            cmd_zero_search(&triple.values(), *depth, *bound)?.write(cli.format, &mut *out)?;
            Outcome::Success
        }
        Command::Verify { suites, trials, depth, m_max, seed, triple } => {
            let config = SuiteConfig {
                trials: *trials,
                depth: *depth,
                m_max: *m_max,
                seed: *seed,
                triple: triple.values(),
            };
            let (report, passed) = cmd_verify(suites, &config)?;
            report.write(cli.format, &mut *out)?;
            if passed {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            }
        }
    };
    out.flush()?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
