use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use cantorval::achievement::{cantor_to_series, series_to_cantor, Multigeometric};
use cantorval::classify::{cantorval_measure, classify, region_scan, GridSpec};
use cantorval::gapcalc::family;
use cantorval::geometry::{children, gap, interval_j, overlap, TernaryCode};
use cantorval::oracle::{enumerate_difference_with, gap_catalog_crosscheck, measure_at_depth, Enumeration};
use cantorval::params::{rank_indices, ParamSequence};
use cantorval::scalar::{decimal, format_scalar, one_third};
use cantorval::verify::{all_passed, gap_properties, interval_properties};
use cantorval::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Exact constructions for central Cantor sets and their difference sets.
///
/// Sequences are given as JSON, inline or as a file path:
/// '{"prefix": ["1/2"], "period": ["1/15", "11/21"]}'.
///
/// Exit status: 0 success, 2 parse error, 3 precondition violated, 4 structural failure.
#[derive(Parser)]
#[command(name = "cantorval", version)]
struct Cli {
    /// Write the output to this file instead of stdout.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify C(a) − C(a) as an interval, finite union, Cantor set, Cantorval or unknown.
    Classify {
        #[arg(long)]
        seq: String,
    },
    /// Show one interval J_s with its children and gaps, or a gap family.
    Construct {
        #[arg(long)]
        seq: String,
        /// Ternary code of the interval, e.g. "021" (empty for J_∅).
        #[arg(long, default_value = "")]
        code: String,
        /// Dump the gap family rooted at G^side_code up to this rank instead.
        #[arg(long)]
        family_rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        side: u8,
    },
    /// Enumerate C_n(a) − C_n(a) exactly.
    Oracle {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Emit::Slice)]
        emit: Emit,
        /// Largest depth allowed.
        #[arg(long, default_value_t = cantorval::oracle::DEFAULT_DEPTH_CAP)]
        cap: usize,
        /// Run every partition on the calling thread.
        #[arg(long)]
        single_worker: bool,
    },
    /// Scan the period-2 region where the margin condition holds.
    RegionScan {
        /// a1 grid as start:end:steps.
        #[arg(long)]
        a1: String,
        /// a2 grid as start:end:steps.
        #[arg(long)]
        a2: String,
        /// Also write the CSV here (it goes to the output otherwise).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Lebesgue measure of a certified Cantorval, exact and in decimal.
    Measure {
        #[arg(long)]
        seq: String,
        /// Also compare the enumerated slice at depth k_N with the partial gap-mass sum.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Convert between multigeometric series and ratio sequences.
    Convert {
        /// Multigeometric series, e.g. '{"block": ["3", "2"], "q": "1/9"}'.
        #[arg(long, conflicts_with = "seq")]
        mg: Option<String>,
        /// Ratio sequence to turn into series terms.
        #[arg(long, requires = "terms")]
        seq: Option<String>,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Run the property suite and report each named property.
    Verify {
        #[arg(long)]
        seq: String,
        /// Longest code length for the interval properties.
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Ranks enumerated past each family root.
        #[arg(long, default_value_t = 3)]
        extra_ranks: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Slice,
    Gaps,
    Measure,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((text, status)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_input(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

fn load_seq(arg: &str) -> Result<ParamSequence> {
    ParamSequence::from_json(&read_input(arg)?)
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(String, u8)> {
    match command {
        Command::Classify { seq } => Ok((to_json(&classify(&load_seq(&seq)?)?), 0)),
        Command::Construct { seq, code, family_rank, side } => {
            let seq = load_seq(&seq)?;
            let code: TernaryCode = code.parse()?;
            match family_rank {
                Some(rank) => construct_family(&seq, &code, side, rank),
                None => construct_interval(&seq, &code),
            }
            .map(|v| (to_json(&v), 0))
        }
        Command::Oracle { seq, depth, emit, cap, single_worker } => {
            let seq = load_seq(&seq)?;
            let options = Enumeration { cap, parallel: !single_worker, ..Enumeration::default() };
            let slice = enumerate_difference_with(&seq, depth, options)?;
            let text = match emit {
                Emit::Slice => to_json(&slice),
                Emit::Gaps => to_json(&slice.gaps()),
                Emit::Measure => to_json(&json!({
                    "depth": depth,
                    "measure": format_scalar(&slice.measure()),
                    "parts": slice.part_count(),
                    "gaps": slice.gap_count(),
                })),
                Emit::Csv => {
                    let mut out = String::from("kind,l,r\n");
                    let union = slice.union();
                    let parts = union.parts().iter().map(|p| ("part", p));
                    let gaps = slice.gaps();
                    let mut rows: Vec<_> = parts.chain(gaps.iter().map(|g| ("gap", g))).collect();
                    rows.sort_by(|a, b| a.1.left.cmp(&b.1.left));
                    for (kind, iv) in rows {
                        out.push_str(&format!("{kind},{},{}\n", format_scalar(&iv.left), format_scalar(&iv.right)));
                    }
                    out
                }
            };
            Ok((text, 0))
        }
        Command::RegionScan { a1, a2, csv, svg } => {
            let (a1, a2): (GridSpec, GridSpec) = (a1.parse()?, a2.parse()?);
            let scan = region_scan(&a1, &a2);
            let table = scan.to_csv();
            if let Some(path) = &svg {
                write_file(path, &scan.to_svg())?;
            }
            match &csv {
                Some(path) => {
                    write_file(path, &table)?;
                    let summary = json!({
                        "nodes": scan.a1.len() * scan.a2.len(),
                        "inside": scan.count_inside(),
                    });
                    Ok((to_json(&summary), 0))
                }
                None => Ok((table, 0)),
            }
        }
        Command::Measure { seq, rank, digits } => {
            let seq = load_seq(&seq)?;
            let ranks = rank_indices(&seq, 0)?;
            let value = cantorval_measure(&seq, &ranks)?;
            let mut report = json!({
                "exact": format_scalar(&value),
                "decimal": decimal(&value, digits),
            });
            if let Some(rank) = rank {
                report["partial"] = serde_json::to_value(measure_at_depth(&seq, &ranks, rank)?).expect("serializable");
            }
            Ok((to_json(&report), 0))
        }
        Command::Convert { mg, seq, terms } => match (mg, seq, terms) {
            (Some(mg), _, _) => {
                let mg = Multigeometric::from_json(&read_input(&mg)?)?;
                let (r0, seq) = series_to_cantor(&mg)?;
                let spec = serde_json::to_value(&seq).expect("serializable");
                Ok((to_json(&json!({
                    "r0": format_scalar(&r0),
                    "prefix": spec["prefix"],
                    "period": spec["period"],
                })), 0))
            }
            (None, Some(seq), Some(count)) => {
                let terms: Vec<String> =
                    cantor_to_series(&load_seq(&seq)?, count)?.iter().map(format_scalar).collect();
                Ok((to_json(&json!({ "r0": "1", "terms": terms })), 0))
            }
            _ => Err(Error::Parse("convert needs --mg, or --seq with --terms".into())),
        },
        Command::Verify { seq, depth, extra_ranks } => {
            let seq = load_seq(&seq)?;
            let mut results = interval_properties(&seq, depth)?;
            let mut catalog = Value::Null;
            if seq.recurrently_above_third() && rank_indices(&seq, 0).is_ok() {
                results.extend(gap_properties(&seq, extra_ranks)?);
                let ranks = rank_indices(&seq, 0)?;
                let deepest = (1..).take_while(|&n| ranks.k(n) <= 9).last();
                if let (Some(rank), 0) = (deepest, ranks.k0) {
                    match gap_catalog_crosscheck(&seq, &ranks, rank) {
                        Ok(report) => {
                            let matches = report.matches;
                            catalog = serde_json::to_value(&report).expect("serializable");
                            if !matches {
                                results.push(cantorval::verify::PropertyResult {
                                    name: "gap-catalog".into(),
                                    passed: false,
                                    checked: 1,
                                    counterexample: report.into_result().err().map(|e| e.to_string()),
                                });
                            }
                        }
                        Err(Error::CertificateMissing) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            let passed = all_passed(&results);
            let report = json!({ "passed": passed, "properties": results, "catalog": catalog });
            Ok((to_json(&report), if passed { 0 } else { 4 }))
        }
    }
}

fn construct_interval(seq: &ParamSequence, code: &TernaryCode) -> Result<Value> {
    let j = interval_j(seq, code)?;
    let (c0, c1, c2) = children(seq, code)?;
    let next = seq.ratio(code.len() + 1)?;
    let (label, between) = if next > one_third() {
        ("gaps", [gap(seq, code, 0)?, gap(seq, code, 1)?])
    } else {
        ("overlaps", [overlap(seq, code, 0)?, overlap(seq, code, 1)?])
    };
    let mut value = json!({
        "code": code,
        "interval": j,
        "children": [c0, c1, c2],
    });
    value[label] = serde_json::to_value(between).expect("serializable");
    Ok(value)
}

fn construct_family(seq: &ParamSequence, code: &TernaryCode, side: u8, rank: usize) -> Result<Value> {
    if side > 1 {
        return Err(Error::Parse(format!("side must be 0 or 1, got {side}")));
    }
    let ranks = rank_indices(seq, 0)?;
    let fam = family(seq, &ranks, code, side, rank)?;
    let mut by_rank = Vec::new();
    for (n, gaps) in &fam.by_rank {
        let rows: Vec<Value> = gaps
            .iter()
            .map(|g| {
                let iv = g.interval(seq)?;
                Ok(json!({
                    "code": g.code,
                    "side": g.side,
                    "l": format_scalar(&iv.left),
                    "r": format_scalar(&iv.right),
                }))
            })
            .collect::<Result<_>>()?;
        by_rank.push(json!({ "rank": n, "gaps": rows }));
    }
    Ok(json!({ "origin": code, "side": side, "ranks": by_rank }))
}
