//! Single binary exposing the classification pipeline with deterministic,
//! machine-readable output.
//!
//! Exit codes: 0 success, 1 negative verdict (rejected signature, no
//! epimorphism, no witness), 2 undetermined under the node budget,
//! 3 input error.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sigsurf_core::classes::{conjugacy_classes, count_product_solutions, ConjugacyClassTable};
use sigsurf_core::eichler::surface_character;
use sigsurf_core::epi::{exists_epimorphism, SearchOptions, Verdict};
use sigsurf_core::group::{build_psl2, parse_permutation_group, FiniteGroup, GroupElement};
use sigsurf_core::signature::{classify, Classification, GroupId, Signature};
use sigsurf_core::spectrum::{reachable_genera, stable_upper_genus, witness_signature_for_genus};
use sigsurf_core::subgroups::SubgroupLattice;

#[derive(Parser)]
#[command(
    name = "sigsurf",
    about = "Classify orientation-preserving surface actions of PSL(2,7) and PSL(2,11)",
    version
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Node budget for epimorphism searches
    #[arg(long, global = true, default_value_t = sigsurf_core::epi::DEFAULT_BUDGET)]
    budget: u64,
    /// Worker cap for parallel phases (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ElementsAs {
    Index,
    Matrix,
}

#[derive(Subcommand)]
enum Command {
    /// Group-level queries
    Group {
        /// Group selector: psl2:<p> or a permutation-group file path
        group: String,
        #[command(subcommand)]
        what: GroupQuery,
    },
    /// Conjugacy class table
    Classes { group: String },
    /// Product-solution count for two or more classes (x_1 ... x_r = 1)
    Coeff {
        group: String,
        /// Class labels, e.g. 2A 4A 7A
        #[arg(required = true, num_args = 2..)]
        classes: Vec<String>,
    },
    /// Maximal subgroups with copy counts
    Maximal { group: String },
    /// Closed-form admissibility of a signature
    Classify {
        group: String,
        /// Signature, e.g. "(0;2,3,7)" or "h=0 2^1 3^1 7^1"
        signature: String,
    },
    /// Search for a surface-kernel epimorphism witness
    Epi {
        group: String,
        signature: String,
        /// Serialize witness entries as indices or payloads
        #[arg(long, value_enum, default_value_t = ElementsAs::Index)]
        elements: ElementsAs,
    },
    /// Reachable genera and gaps up to a bound
    Spectrum {
        group: String,
        /// Largest genus to examine
        #[arg(long)]
        max: u64,
    },
    /// Stable upper genus with certificate
    StableGenus { group: String },
    /// Witness signature table for a genus range (CSV)
    Table {
        group: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Fixed-point data and Eichler traces for a realizable signature
    Eichler {
        group: String,
        signature: String,
        /// Restrict output to one class label
        #[arg(long)]
        class: Option<String>,
    },
}

#[derive(Subcommand)]
enum GroupQuery {
    /// Order and element-order census
    Info,
}

enum Outcome {
    Success,
    Negative,
    Undetermined,
}

struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError(e.to_string())
    }
}

fn load_group(selector: &str) -> Result<FiniteGroup, CliError> {
    if let Some(p) = selector.strip_prefix("psl2:") {
        let p: u64 = p
            .parse()
            .map_err(|_| CliError(format!("invalid prime in group selector `{selector}`")))?;
        return Ok(build_psl2(p)?);
    }
    let text = std::fs::read_to_string(selector)
        .map_err(|e| CliError(format!("cannot read group file `{selector}`: {e}")))?;
    Ok(parse_permutation_group(&text)?)
}

fn parse_group_id(selector: &str) -> Result<GroupId, CliError> {
    GroupId::from_str(selector).map_err(|_| {
        CliError(format!(
            "`{selector}` is not a supported group id (expected psl2:7 or psl2:11)"
        ))
    })
}

fn parse_signature(text: &str) -> Result<Signature, CliError> {
    Signature::from_str(text).map_err(|e| CliError(e.to_string()))
}

/// JSON object form of a signature: {"h": int, "periods": [int...]}.
fn signature_json(sig: &Signature) -> Value {
    json!({"h": sig.orbifold_genus(), "periods": sig.periods()})
}

fn emit(value: &Value, plain: String, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("serializable")
        ),
        _ => print!("{plain}"),
    }
}

fn census_json(g: &FiniteGroup) -> Value {
    let census = g.order_census();
    Value::Object(
        census
            .iter()
            .map(|(o, n)| (o.to_string(), json!(n)))
            .collect(),
    )
}

fn cmd_group_info(group: &str, format: Format) -> Result<Outcome, CliError> {
    let g = load_group(group)?;
    let census = g.order_census();
    let mut plain = format!("group: {group}\norder: {}\n", g.order());
    let census_str = census
        .iter()
        .map(|(o, n)| format!("{o}^{n}"))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(plain, "element orders: {census_str}");
    emit(
        &json!({
            "group": group,
            "order": g.order(),
            "order_census": census_json(&g),
        }),
        plain,
        format,
    );
    Ok(Outcome::Success)
}

fn cmd_classes(group: &str, format: Format) -> Result<Outcome, CliError> {
    let g = load_group(group)?;
    let t = conjugacy_classes(&g);
    let mut plain = format!("group: {group}\nclasses: {}\n", t.len());
    let mut rows = Vec::new();
    for c in t.classes() {
        let _ = writeln!(
            plain,
            "{:<4} size {:>5}  order {:>3}  centralizer {:>5}  rep {}",
            c.label,
            c.size,
            g.element_order(c.rep),
            c.centralizer_order,
            g.element(c.rep)
        );
        rows.push(json!({
            "label": c.label,
            "size": c.size,
            "element_order": g.element_order(c.rep),
            "centralizer_order": c.centralizer_order,
            "representative": g.element(c.rep).to_string(),
        }));
    }
    emit(&json!({"group": group, "classes": rows}), plain, format);
    Ok(Outcome::Success)
}

fn class_ids(t: &ConjugacyClassTable, labels: &[String]) -> Result<Vec<usize>, CliError> {
    labels
        .iter()
        .map(|l| {
            t.id_by_label(l)
                .ok_or_else(|| CliError(format!("unknown class label `{l}`")))
        })
        .collect()
}

fn cmd_coeff(group: &str, labels: &[String], format: Format) -> Result<Outcome, CliError> {
    let g = load_group(group)?;
    let t = conjugacy_classes(&g);
    let cs = class_ids(&t, labels)?;
    let count = count_product_solutions(&g, &t, &cs);
    emit(
        &json!({
            "group": group,
            "classes": labels,
            "count": count.to_string(),
        }),
        format!("{count}\n"),
        format,
    );
    Ok(Outcome::Success)
}

fn cmd_maximal(group: &str, format: Format) -> Result<Outcome, CliError> {
    let g = load_group(group)?;
    let lat = SubgroupLattice::enumerate(&g)?;
    let fams = lat.maximal_families();
    let mut plain = String::new();
    let mut rows = Vec::new();
    for f in &fams {
        let fp = f
            .fingerprint
            .iter()
            .map(|(o, n)| format!("{o}^{n}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            plain,
            "order {:>5}  copies {:>4}  fingerprint {fp}",
            f.order, f.copies
        );
        rows.push(json!({
            "order": f.order,
            "copies": f.copies,
            "fingerprint": f.fingerprint.iter().map(|(o, n)| json!([o, n])).collect::<Vec<_>>(),
        }));
    }
    emit(&json!({"group": group, "maximal": rows}), plain, format);
    Ok(Outcome::Success)
}

fn cmd_classify(group: &str, signature: &str, format: Format) -> Result<Outcome, CliError> {
    let gid = parse_group_id(group)?;
    let sig = parse_signature(signature)?;
    match classify(gid, &sig) {
        Classification::Admissible(genus) => {
            emit(
                &json!({
                    "group": gid.to_string(),
                    "signature": signature_json(&sig),
                    "verdict": "admissible",
                    "genus": genus,
                }),
                format!("admissible genus={genus}\n"),
                format,
            );
            Ok(Outcome::Success)
        }
        Classification::Rejected(reason) => {
            emit(
                &json!({
                    "group": gid.to_string(),
                    "signature": signature_json(&sig),
                    "verdict": "rejected",
                    "reason": reason.code(),
                }),
                format!("rejected reason={}\n", reason.code()),
                format,
            );
            Ok(Outcome::Negative)
        }
    }
}

fn element_payload(g: &FiniteGroup, i: usize) -> Value {
    match g.element(i) {
        GroupElement::Matrix { m, .. } => json!([[m[0], m[1]], [m[2], m[3]]]),
        GroupElement::Perm(img) => json!(img.iter().map(|&x| x as u64).collect::<Vec<_>>()),
    }
}

fn cmd_epi(
    group: &str,
    signature: &str,
    elements: ElementsAs,
    budget: u64,
    jobs: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let g = load_group(group)?;
    let t = conjugacy_classes(&g);
    let sig = parse_signature(signature)?;
    let opts = SearchOptions {
        budget,
        jobs: jobs.max(1),
        group_id: group.to_string(),
        conjugacy_reduction: true,
    };
    let out = exists_epimorphism(&g, &t, &sig, &opts)?;
    let base = |verdict: &str| {
        json!({
            "group": group,
            "signature": signature_json(&sig),
            "verdict": verdict,
            "nodes_explored": out.nodes_explored,
            "budget": out.budget,
        })
    };
    match out.verdict {
        Verdict::Found(w) => {
            let serialize = |idxs: &[usize]| -> Value {
                match elements {
                    ElementsAs::Index => json!(idxs),
                    ElementsAs::Matrix => {
                        Value::Array(idxs.iter().map(|&i| element_payload(&g, i)).collect())
                    }
                }
            };
            let mut v = base("found");
            v.as_object_mut().unwrap().insert(
                "witness".to_string(),
                json!({
                    "alpha": serialize(&w.alpha),
                    "beta": serialize(&w.beta),
                    "c": serialize(&w.c),
                    "elements_as": match elements {
                        ElementsAs::Index => "index",
                        ElementsAs::Matrix => "matrix",
                    },
                }),
            );
            let mut plain = format!("found (nodes {})\n", out.nodes_explored);
            let fmt_list = |idxs: &[usize]| {
                idxs.iter()
                    .map(|&i| match elements {
                        ElementsAs::Index => i.to_string(),
                        ElementsAs::Matrix => g.element(i).to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(plain, "alpha: {}", fmt_list(&w.alpha));
            let _ = writeln!(plain, "beta:  {}", fmt_list(&w.beta));
            let _ = writeln!(plain, "c:     {}", fmt_list(&w.c));
            emit(&v, plain, format);
            Ok(Outcome::Success)
        }
        Verdict::NotFound => {
            emit(
                &base("not_found"),
                format!("not found (exhausted, nodes {})\n", out.nodes_explored),
                format,
            );
            Ok(Outcome::Negative)
        }
        Verdict::Undetermined => {
            emit(
                &base("undetermined"),
                format!("undetermined (budget {} exhausted)\n", out.budget),
                format,
            );
            Ok(Outcome::Undetermined)
        }
    }
}

fn cmd_spectrum(group: &str, max: u64, format: Format) -> Result<Outcome, CliError> {
    let gid = parse_group_id(group)?;
    let res = reachable_genera(gid, max)?;
    let mut plain = format!(
        "group: {gid}\ng_max: {max}\nminimum genus: {}\nreachable: {}\ngaps ({}):",
        gid.min_genus(),
        res.reachable.len(),
        res.gaps.len()
    );
    for chunk in res.gaps.chunks(16) {
        let _ = write!(
            plain,
            "\n  {}",
            chunk
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    let _ = writeln!(plain, "\nstable upper genus: {}", res.stable_upper_genus);
    emit(
        &json!({
            "group": gid.to_string(),
            "g_max": max,
            "min_genus": gid.min_genus(),
            "reachable_count": res.reachable.len(),
            "gaps": res.gaps,
            "stable_upper_genus": res.stable_upper_genus,
        }),
        plain,
        format,
    );
    Ok(Outcome::Success)
}

fn cmd_stable_genus(group: &str, format: Format) -> Result<Outcome, CliError> {
    let gid = parse_group_id(group)?;
    let (stable, cert) = stable_upper_genus(gid);
    emit(
        &json!({
            "group": gid.to_string(),
            "stable_upper_genus": stable,
            "unreachable_below": cert.unreachable_below,
            "window_length": cert.window_length,
            "window": cert.window.iter().map(|(g, s)| json!({
                "genus": g,
                "signature": s.to_string(),
            })).collect::<Vec<_>>(),
        }),
        format!("{stable}\n"),
        format,
    );
    Ok(Outcome::Success)
}

fn cmd_table(group: &str, from: u64, to: u64, format: Format) -> Result<Outcome, CliError> {
    let gid = parse_group_id(group)?;
    if from > to {
        return Err(CliError(format!("empty range {from}..{to}")));
    }
    let header: &[&str] = match gid {
        GroupId::Psl27 => &["genus", "h", "a2", "a3", "a4", "a7"],
        GroupId::Psl211 => &["genus", "h", "a2", "a3", "a5", "a6", "a11"],
    };
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for g in from..=to {
        let Ok(sig) = witness_signature_for_genus(gid, g) else {
            continue;
        };
        let ev = sigsurf_core::signature::to_exponent_vector(gid, &sig).expect("allowed periods");
        let mut row = vec![g, u64::from(ev.h)];
        row.extend(gid.allowed_periods().iter().map(|m| u64::from(ev.a[m])));
        rows.push(row);
    }
    match format {
        Format::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    Value::Object(
                        header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), json!(v)))
                            .collect(),
                    )
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "group": gid.to_string(),
                    "from": from,
                    "to": to,
                    "rows": json_rows,
                }))
                .expect("serializable")
            );
        }
        _ => {
            // CSV is the native shape for the table
            println!("{}", header.join(","));
            for row in &rows {
                println!(
                    "{}",
                    row.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
            }
        }
    }
    Ok(Outcome::Success)
}

fn rational_string(q: &num_rational::Ratio<num_bigint::BigInt>) -> String {
    q.to_string()
}

fn cmd_eichler(
    group: &str,
    signature: &str,
    class_filter: Option<&str>,
    budget: u64,
    jobs: usize,
    format: Format,
) -> Result<Outcome, CliError> {
    let sig = parse_signature(signature)?;
    let g = load_group(group)?;
    let t = conjugacy_classes(&g);
    let opts = SearchOptions {
        budget,
        jobs: jobs.max(1),
        group_id: group.to_string(),
        conjugacy_reduction: true,
    };
    let out = exists_epimorphism(&g, &t, &sig, &opts)?;
    let w = match out.verdict {
        Verdict::Found(w) => w,
        Verdict::NotFound => {
            emit(
                &json!({"group": group, "signature": signature_json(&sig), "verdict": "not_found"}),
                "not found: signature admits no action\n".to_string(),
                format,
            );
            return Ok(Outcome::Negative);
        }
        Verdict::Undetermined => {
            emit(
                &json!({"group": group, "signature": signature_json(&sig), "verdict": "undetermined"}),
                format!("undetermined (budget {budget} exhausted)\n"),
                format,
            );
            return Ok(Outcome::Undetermined);
        }
    };
    let chi = surface_character::<num_bigint::BigInt>(&g, &t, &sig, &w)?;
    if let Some(label) = class_filter {
        if t.id_by_label(label).is_none() {
            return Err(CliError(format!("unknown class label `{label}`")));
        }
    }
    let mut plain = format!("degree: {}\n", chi.degree);
    let mut values = Vec::new();
    for v in &chi.values {
        if class_filter.is_some_and(|l| l != v.class_label) {
            continue;
        }
        let re = v
            .value
            .real_part()
            .to_rational()
            .map(|q| rational_string(&q));
        let re = match re {
            Some(s) => s,
            None => {
                // real part of a cyclotomic need not be rational in general;
                // print the reduced coefficients instead
                format!("{}", v.value.real_part())
            }
        };
        let coeffs: Vec<String> = v.value.coeffs().iter().map(rational_string).collect();
        let _ = writeln!(
            plain,
            "{:<4} re={re} fixed_points={} conductor={} coeffs=[{}]",
            v.class_label,
            v.fixed_points,
            v.value.conductor(),
            coeffs.join(", ")
        );
        values.push(json!({
            "class": v.class_label,
            "re": re,
            "cyclotomic": coeffs,
            "conductor": v.value.conductor(),
            "fixed_points": v.fixed_points,
        }));
    }
    emit(
        &json!({
            "group": group,
            "signature": signature_json(&sig),
            "verdict": "found",
            "degree": chi.degree,
            "values": values,
        }),
        plain,
        format,
    );
    Ok(Outcome::Success)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Group { group, what } => match what {
            GroupQuery::Info => cmd_group_info(group, cli.format),
        },
        Command::Classes { group } => cmd_classes(group, cli.format),
        Command::Coeff { group, classes } => cmd_coeff(group, classes, cli.format),
        Command::Maximal { group } => cmd_maximal(group, cli.format),
        Command::Classify { group, signature } => cmd_classify(group, signature, cli.format),
        Command::Epi {
            group,
            signature,
            elements,
        } => cmd_epi(
            group, signature, *elements, cli.budget, cli.jobs, cli.format,
        ),
        Command::Spectrum { group, max } => cmd_spectrum(group, *max, cli.format),
        Command::StableGenus { group } => cmd_stable_genus(group, cli.format),
        Command::Table { group, from, to } => cmd_table(group, *from, *to, cli.format),
        Command::Eichler {
            group,
            signature,
            class,
        } => cmd_eichler(
            group,
            signature,
            class.as_deref(),
            cli.budget,
            cli.jobs,
            cli.format,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    if cli.jobs > 0 {
        // cap the worker pool used by parallel phases
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Ok(Outcome::Undetermined) => ExitCode::from(2),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
