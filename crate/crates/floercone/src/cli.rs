//! Command-line front end.
//!
//! Grammar:
//! `floercone <verb> [--knot NAME | --file PATH] [--n INT] [--spinc INT]
//! [--flavor hat|minus] [--r RAT] [--genus INT] [--format human|machine]`
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error. Machine output is
//! deterministic JSON with exact-fraction strings; rows are ordered by
//! (n, spinc, Alexander, Maslov).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cone::{self, Flavor};
use crate::contact;
use crate::data;
use crate::knot::{parse_knot_complex, KnotComplex};
use crate::rat::Rat;
use crate::report::GradedDims;

pub const MINUS_MASLOV_NOTE: &str =
    "maslov values carry the surgery-cone shifts; minus-flavor absolute normalization is conventional";

#[derive(Parser)]
#[command(
    name = "floercone",
    version,
    about = "Heegaard Floer homology of positive integer surgeries, dual-knot invariants, and contact surgery certificates",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlavorArg {
    Hat,
    Minus,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Hat => Flavor::Hat,
            FlavorArg::Minus => Flavor::Minus,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Name of a bundled complex (see `list-knots`).
    #[arg(long)]
    knot: Option<String>,
    /// Path to a complex in the bundled-data schema.
    #[arg(long)]
    file: Option<String>,
}

impl Source {
    fn describe(&self) -> String {
        self.knot
            .clone()
            .or_else(|| self.file.clone())
            .unwrap_or_default()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural invariant of a complex.
    Validate {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Hat Floer homology of n-surgery, per spin^c structure.
    HfSurgery {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        spinc: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Knot Floer homology of the dual knot of n-surgery.
    DualKnot {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        spinc: Option<i64>,
        #[arg(long, value_enum, default_value_t = FlavorArg::Hat)]
        flavor: FlavorArg,
        /// Truncation depth for the minus flavor (default 2*genus + n + 4).
        #[arg(long)]
        u_depth: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Top Alexander grading of the dual knot in spin^c = genus mod n.
    TopGrading {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Decide the top-grading injectivity criterion.
    CheckInjectivity {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Convert a rational contact surgery coefficient into a surgery chain.
    Plan {
        #[arg(long)]
        r: String,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Tightness certificate for smooth (-r)-surgery on a genus-g knot.
    Certify {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        r: String,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Enumerate the bundled data library.
    ListKnots {
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

/// Run the CLI on the given argv (including the program name). Returns the
/// exit code and the full output text.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return (code, e.to_string());
        }
    };
    match execute(cli.command) {
        Ok(out) => (0, out),
        Err(out) => (1, out),
    }
}

fn load_source(source: &Source) -> Result<KnotComplex, String> {
    if let Some(name) = &source.knot {
        return data::load(name).map_err(|e| format!("error: {e}\n"));
    }
    let path = source.file.as_ref().expect("clap enforces the group");
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("error: cannot read `{path}`: {e}\n"))?;
    parse_knot_complex(&text).map_err(|e| format!("error: {e}\n"))
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| format!("error: {e}\n"))
}

fn domain<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}\n")
}

fn spinc_range(n: i64, spinc: Option<i64>) -> Result<Vec<i64>, String> {
    // validates n before any per-label loop
    cone::ConeParams::new(n, 0, Flavor::Hat).map_err(domain)?;
    Ok(match spinc {
        Some(s) => vec![s.rem_euclid(n)],
        None => (0..n).collect(),
    })
}

fn execute(command: Command) -> Result<String, String> {
    match command {
        Command::Validate { source, format } => {
            let k = load_source(&source)?;
            let report = k.validate();
            let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            let out = match format {
                Format::Machine => {
                    let v = json!({
                        "command": "validate",
                        "name": k.name,
                        "valid": report.is_valid(),
                        "violations": violations,
                        "genus": k.genus(),
                        "generators": k.generator_count(),
                    });
                    format!("{v}\n")
                }
                Format::Human => {
                    if report.is_valid() {
                        format!(
                            "{}: valid ({} generators, genus {})\n",
                            k.name,
                            k.generator_count(),
                            k.genus()
                        )
                    } else {
                        let mut s = format!("{}: INVALID\n", k.name);
                        for v in &violations {
                            s.push_str(&format!("  - {v}\n"));
                        }
                        s
                    }
                }
            };
            if report.is_valid() {
                Ok(out)
            } else {
                Err(out)
            }
        }

        Command::HfSurgery {
            source,
            n,
            spinc,
            format,
        } => {
            let k = load_source(&source)?;
            let labels = spinc_range(n, spinc)?;
            let mut table = GradedDims::default();
            for &s in &labels {
                let dims = cone::hf_hat_surgery(&k, n, s).map_err(domain)?;
                table.merge(GradedDims::from_maslov_dims(Some(s), &dims));
            }
            match format {
                Format::Machine => {
                    let v = json!({
                        "command": "hf-surgery",
                        "knot": source.describe(),
                        "n": n,
                        "rows": table.rows(),
                        "total": table.total(),
                    });
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = format!(
                        "hat Floer homology of {}-surgery on {}\n",
                        n,
                        source.describe()
                    );
                    s.push_str("spinc  maslov  dim\n");
                    for row in table.rows() {
                        s.push_str(&format!(
                            "{:<6} {:<7} {}\n",
                            row.key.spinc.unwrap_or_default(),
                            row.key.maslov.unwrap_or_default().to_string(),
                            row.dim
                        ));
                    }
                    s.push_str(&format!("total dimension: {}\n", table.total()));
                    Ok(s)
                }
            }
        }

        Command::DualKnot {
            source,
            n,
            spinc,
            flavor,
            u_depth,
            format,
        } => {
            let k = load_source(&source)?;
            let flavor: Flavor = flavor.into();
            let labels = spinc_range(n, spinc)?;
            let mut table = GradedDims::default();
            let mut u_rank_rows = Vec::new();
            let mut cut: Option<Rat> = None;
            for &s in &labels {
                let dual = cone::hfk_dual(&k, n, s, flavor, u_depth).map_err(domain)?;
                table.merge(GradedDims::from_bigraded_dims(Some(s), &dual.dims));
                if let Some(ranks) = &dual.u_ranks {
                    for (&level, &rank) in ranks {
                        u_rank_rows.push(json!({
                            "spinc": s,
                            "alexander": level,
                            "rank": rank,
                        }));
                    }
                }
                cut = cut.max(dual.reported_j_cut);
            }
            match format {
                Format::Machine => {
                    let mut v = json!({
                        "command": "dual-knot",
                        "knot": source.describe(),
                        "n": n,
                        "flavor": match flavor { Flavor::Hat => "hat", Flavor::Minus => "minus" },
                        "rows": table.rows(),
                        "total": table.total(),
                    });
                    if flavor == Flavor::Minus {
                        v["u_ranks"] = json!(u_rank_rows);
                        v["reported_alexander_cut"] = json!(cut);
                        v["maslov_normalization"] = json!(MINUS_MASLOV_NOTE);
                    }
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = format!(
                        "dual-knot knot Floer homology ({:?} flavor), {}-surgery on {}\n",
                        flavor,
                        n,
                        source.describe()
                    );
                    s.push_str("spinc  alexander  maslov  dim\n");
                    for row in table.rows() {
                        s.push_str(&format!(
                            "{:<6} {:<10} {:<7} {}\n",
                            row.key.spinc.unwrap_or_default(),
                            row.key.alexander.unwrap_or_default().to_string(),
                            row.key.maslov.unwrap_or_default().to_string(),
                            row.dim
                        ));
                    }
                    if flavor == Flavor::Minus {
                        s.push_str("U-action ranks (alexander level -> level - 1):\n");
                        for row in &u_rank_rows {
                            s.push_str(&format!(
                                "  spinc {} level {}: rank {}\n",
                                row["spinc"],
                                row["alexander"].as_str().unwrap_or("?"),
                                row["rank"]
                            ));
                        }
                        if let Some(cut) = cut {
                            s.push_str(&format!("reported gradings above alexander {cut}\n"));
                        }
                        s.push_str(&format!("note: {MINUS_MASLOV_NOTE}\n"));
                    }
                    Ok(s)
                }
            }
        }

        Command::TopGrading { source, n, format } => {
            let k = load_source(&source)?;
            let top = cone::top_alexander(&k, n).map_err(domain)?;
            let spinc = i64::from(k.genus()).rem_euclid(n);
            match format {
                Format::Machine => {
                    let v = json!({
                        "command": "top-grading",
                        "knot": source.describe(),
                        "n": n,
                        "genus": k.genus(),
                        "spinc": spinc,
                        "top_alexander": top,
                    });
                    Ok(format!("{v}\n"))
                }
                Format::Human => Ok(format!(
                    "top Alexander grading of the dual knot ({}-surgery on {}, spinc {}): {}\n",
                    n,
                    source.describe(),
                    spinc,
                    top
                )),
            }
        }

        Command::CheckInjectivity { source, n, format } => {
            let k = load_source(&source)?;
            let verdict = cone::check_top_injectivity(&k, n).map_err(domain)?;
            match format {
                Format::Machine => {
                    let v = json!({
                        "command": "check-injectivity",
                        "knot": source.describe(),
                        "n": n,
                        "injective": verdict.injective,
                        "top_alexander": verdict.top_alexander,
                        "witness": verdict.witness.as_ref().map(|w| json!({
                            "src": w.src,
                            "dst": w.dst,
                            "u_power": w.u_power,
                        })),
                    });
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = format!(
                        "injectivity at top Alexander grading {} ({}-surgery on {}): {}\n",
                        verdict.top_alexander,
                        n,
                        source.describe(),
                        if verdict.injective { "injective" } else { "NOT injective" }
                    );
                    if let Some(w) = &verdict.witness {
                        s.push_str(&format!(
                            "witness arrow: {} -> U^{} {}\n",
                            w.src, w.u_power, w.dst
                        ));
                    }
                    Ok(s)
                }
            }
        }

        Command::Plan { r, format } => {
            let r = parse_rat(&r)?;
            let plan = if r.is_positive() {
                contact::dgs_positive(r)
            } else {
                contact::dgs_negative(r)
            }
            .map_err(domain)?;
            match format {
                Format::Machine => {
                    let v = json!({
                        "command": "plan",
                        "plan": plan,
                    });
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = format!("contact {} surgery plan\n", plan.contact_coefficient);
                    s.push_str(&format!(
                        "push-offs with contact +1: {}\n",
                        plan.pushoff_plus_count
                    ));
                    s.push_str(&format!(
                        "continued fraction: {:?}\n",
                        plan.cf_expansion
                    ));
                    for (i, c) in plan.chain.iter().enumerate() {
                        s.push_str(&format!(
                            "chain component {}: {} stabilizations, contact {}\n",
                            i + 1,
                            c.stabilizations,
                            c.contact_coefficient
                        ));
                    }
                    if plan.degenerate {
                        s.push_str("degenerate case: push-offs only, empty chain\n");
                    }
                    Ok(s)
                }
            }
        }

        Command::Certify { genus, r, format } => {
            let r = parse_rat(&r)?;
            let cert = contact::certify_tight(genus, r).map_err(domain)?;
            match format {
                Format::Machine => {
                    let v = json!({
                        "command": "certify",
                        "certificate": cert,
                    });
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = format!(
                        "tightness certificate: smooth -{} surgery, genus {}\n",
                        cert.r, cert.genus
                    );
                    s.push_str(&format!(
                        "base Legendrian: tb {}, rot {}\n",
                        cert.base_legendrian.tb, cert.base_legendrian.rot
                    ));
                    s.push_str(&format!(
                        "continued fraction: {:?}\n",
                        cert.plan.cf_expansion
                    ));
                    s.push_str(&format!(
                        "first surgery on: tb {}, rot {} (admissible: {})\n",
                        cert.first_surgery_legendrian.tb,
                        cert.first_surgery_legendrian.rot,
                        cert.admissibility
                    ));
                    s.push_str(&format!(
                        "n_effective {}, spinc {}, distinguished Alexander grading {}\n",
                        cert.n_effective, cert.spinc_label, cert.loss_alexander
                    ));
                    for w in &cert.warnings {
                        s.push_str(&format!("warning: {w}\n"));
                    }
                    Ok(s)
                }
            }
        }

        Command::ListKnots { format } => {
            let entries: Vec<_> = data::list()
                .iter()
                .map(|e| {
                    let k = data::load(e.name).expect("bundled entries parse");
                    (e, k.generator_count())
                })
                .collect();
            match format {
                Format::Machine => {
                    let rows: Vec<_> = entries
                        .iter()
                        .map(|(e, gens)| {
                            json!({
                                "name": e.name,
                                "file": e.file,
                                "genus": e.genus,
                                "class": e.class,
                                "flip_included": e.flip_included,
                                "generators": gens,
                            })
                        })
                        .collect();
                    let v = json!({ "command": "list-knots", "entries": rows });
                    Ok(format!("{v}\n"))
                }
                Format::Human => {
                    let mut s = String::from("name          genus  class      gens  flip\n");
                    for (e, gens) in entries {
                        s.push_str(&format!(
                            "{:<13} {:<6} {:<10} {:<5} {}\n",
                            e.name,
                            e.genus,
                            format!("{:?}", e.class).to_lowercase(),
                            gens,
                            e.flip_included
                        ));
                    }
                    Ok(s)
                }
            }
        }
    }
}
