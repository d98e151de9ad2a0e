//! `rgroups`: compute R-groups, sweep classifications, verify the
//! restriction and transfer sequences, run the oracle, and emit the atlas.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use rgroups_core::atlas::{
    self, attained_structures, build_atlas, characters_up_to, lattice_by_label, AtlasSection, ATLAS_TYPES,
    DEFAULT_ATLAS_MAX_DENOMINATOR,
};
use rgroups_core::character::{parse_character, Sublattice, WUCharacter};
use rgroups_core::error::Error;
use rgroups_core::oracle::{oracle_case, ORACLE_CAP};
use rgroups_core::rgroup::{compute_rgroup, verify_restriction_sequence, QParameters};
use rgroups_core::root_datum::{type_string, LatticeSpec, RootDatum};
use rgroups_core::root_system::CartanType;
use rgroups_core::stabilizer::BruteTable;
use rgroups_core::transfer::{catalogue, load_transfer_datum, orbit_collisions, verify_transfer_sequence};

#[derive(Parser)]
#[command(name = "rgroups", version, about = "R-groups of unramified characters over root data")]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Md,
    Json,
}

#[derive(clap::Args)]
struct DatumArgs {
    /// Cartan type: a series letter with --rank, "A3", a product "A1xB2", or "GL".
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// sc, ad, an intermediate label such as "Q+(0,1,0)", or a JSON file with generators.
    #[arg(long, default_value = "sc")]
    lattice: String,
    #[arg(long, default_value_t = 0)]
    central_rank: usize,
    /// A root datum JSON document; overrides --type/--rank/--lattice.
    #[arg(long)]
    datum: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// R-group of a single character.
    Compute {
        #[command(flatten)]
        datum: DatumArgs,
        /// Point coordinates, e.g. "1/2,0" or "1/2;tors=1".
        #[arg(long = "char")]
        character: String,
        /// JSON file with q parameters: {"orbits": {"1": false}}.
        #[arg(long)]
        q: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// R-groups of all orbit representatives up to a denominator.
    Classify {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value_t = 6)]
        max_denominator: u64,
        #[arg(long)]
        q: Option<PathBuf>,
        /// List every representative, not only the summary.
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Check an exact sequence; exits 1 if any check fails.
    Verify {
        #[command(subcommand)]
        which: VerifyCommand,
    },
    /// Compare the fast path with exhaustive search, one JSON line per character.
    Oracle {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value_t = 4)]
        max_denominator: u64,
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Classification tables for the standard list of types.
    Atlas {
        /// Comma-separated types (default: the standard list).
        #[arg(long, value_delimiter = ',')]
        types: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ATLAS_MAX_DENOMINATOR)]
        max_denominator: u64,
        /// Only the default q parameters.
        #[arg(long)]
        default_q_only: bool,
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Restriction to the derived group. CONFIG is a JSON file or one of
    /// gl2-sl2, gl3-sl3, gl4-sl4.
    Restriction {
        config: String,
        #[arg(long = "char")]
        character: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_denominator: u64,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Transfer to an inner form. CONFIG is a JSON file or a catalogue name.
    Transfer {
        config: String,
        #[arg(long = "char")]
        character: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_denominator: u64,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
}

/// Failure of a command: bad input (exit 2) or a failed check (exit 1).
enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_datum(args: &DatumArgs) -> Result<RootDatum, Failure> {
    if let Some(path) = &args.datum {
        return Ok(RootDatum::from_doc(&read_json(path)?)?);
    }
    let ty = args.ty.as_deref().ok_or_else(|| Failure::Input("--type or --datum is required".into()))?;
    let mut doc = json!({"type": ty, "central_free_rank": args.central_rank});
    if let Some(r) = args.rank {
        doc["rank"] = json!(r);
    }
    if !ty.eq_ignore_ascii_case("GL") {
        doc["char_lattice"] = lattice_doc(&args.lattice, ty, args.rank)?;
    }
    Ok(RootDatum::from_doc(&doc)?)
}

fn lattice_doc(lattice: &str, ty: &str, rank: Option<usize>) -> Result<Value, Failure> {
    match lattice {
        "sc" | "weight" | "P" => return Ok(json!("weight")),
        "ad" | "root" | "Q" => return Ok(json!("root")),
        _ => {}
    }
    let path = Path::new(lattice);
    if path.exists() {
        let v = read_json(path)?;
        return Ok(if v.is_array() { json!({ "generators": v }) } else { v });
    }
    let t = cartan_type(ty, rank)?;
    match lattice_by_label(t, lattice) {
        Some(LatticeSpec { kind: rgroups_core::root_datum::LatticeKind::Intermediate(rows), .. }) => Ok(json!({
            "generators": rows
                .iter()
                .map(|r| r.iter().map(|x| json!(rgroups_core::linalg::fmt_rat(x))).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })),
        _ => Err(Failure::Input(format!("unknown lattice {lattice:?} (expected sc, ad, a label, or a file)"))),
    }
}

fn cartan_type(ty: &str, rank: Option<usize>) -> Result<CartanType, Failure> {
    let s = match rank {
        Some(r) if ty.len() == 1 => format!("{ty}{r}"),
        _ => ty.to_string(),
    };
    Ok(s.parse()?)
}

fn load_q(datum: &RootDatum, path: Option<&PathBuf>) -> Result<QParameters, Failure> {
    match path {
        Some(p) => Ok(QParameters::from_json(datum.root_system(), &read_json(p)?)?),
        None => Ok(QParameters::new()),
    }
}

/// Runs `f` through the result cache when RGROUP_CACHE_DIR is set. The key
/// is the sha256 of the canonical serialization of `input`.
fn cached(input: &Value, f: impl FnOnce() -> CmdResult) -> CmdResult {
    let Some(dir) = std::env::var_os("RGROUP_CACHE_DIR") else {
        return f();
    };
    let canonical = serde_json::to_string(input).expect("serializable");
    let key = hex::encode(Sha256::digest(canonical.as_bytes()));
    let path = Path::new(&dir).join(format!("{key}.out"));
    if let Ok(hit) = fs::read_to_string(&path) {
        return Ok(hit);
    }
    let out = f()?;
    // caching is best effort
    if fs::create_dir_all(&dir).is_ok() {
        let _ = fs::write(&path, &out);
    }
    Ok(out)
}

fn render(format: Format, value: &Value, md: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Md => md(),
    }
}

fn cmd_compute(datum: &DatumArgs, character: &str, q: Option<&PathBuf>, format: Format) -> CmdResult {
    let d = load_datum(datum)?;
    let q = load_q(&d, q)?;
    let chi = parse_character(&d, character)?;
    let key = json!({"cmd": "compute", "datum": d.to_doc(), "char": chi.to_string(), "q": q.to_json(),
                     "format": format == Format::Json});
    cached(&key, || {
        let rs = d.root_system();
        let res = compute_rgroup(&d, &chi, &q)?;
        let mut v = res.to_json(rs);
        v["datum"] = d.to_doc();
        v["character"] = json!(chi.to_string());
        Ok(render(format, &v, || {
            let mut s = String::new();
            s += &format!("# R-group of {chi}\n\n");
            s += &format!("- datum: `{}`\n", serde_json::to_string(&d.to_doc()).expect("json"));
            s += &format!("- |W(chi)|: {}\n", res.w_chi.order);
            s += &format!("- |W°|: {}\n", res.w_circ.order);
            s += &format!("- Delta' positive roots: {}\n", res.delta_prime.iter().filter(|&&k| rs.is_positive(k)).count());
            s += &format!("- R: {}\n", res.structure);
            s += &format!("- commuting algebra dimension: {}\n", res.r_group.order);
            let words: Vec<String> = res.r_elements().iter().map(ToString::to_string).collect();
            s += &format!("- R elements: {}\n", words.join(", "));
            s
        }))
    })
}

fn classify_sections(datum: &DatumArgs, max_d: u64, q: Option<&PathBuf>) -> Result<Vec<AtlasSection>, Failure> {
    let ty = datum.ty.as_deref().ok_or_else(|| Failure::Input("classify needs --type".into()))?;
    let t = cartan_type(ty, datum.rank)?;
    let d = load_datum(datum)?;
    let q_params = load_q(&d, q)?;
    let q_label = if q_params.is_default() { "default".to_string() } else { "custom".to_string() };
    let entries = atlas::classify(t, &datum.lattice, d.spec().clone(), max_d, &q_params, &q_label)?;
    Ok(vec![AtlasSection {
        cartan_type: t,
        lattice: datum.lattice.clone(),
        q_label,
        max_denominator: max_d,
        entries,
    }])
}

fn cmd_classify(datum: &DatumArgs, max_d: u64, q: Option<&PathBuf>, full: bool, format: Format) -> CmdResult {
    let key = json!({"cmd": "classify", "type": datum.ty, "rank": datum.rank, "lattice": datum.lattice,
                     "central_rank": datum.central_rank, "max_d": max_d,
                     "q": q.map(|p| read_json(p).ok()), "full": full, "format": format == Format::Json});
    cached(&key, || {
        let sections = classify_sections(datum, max_d, q)?;
        let v = atlas::render_json(&sections, full);
        Ok(render(format, &v, || {
            let mut s = atlas::render_markdown(&sections, full);
            let structures = attained_structures(&sections[0].entries);
            s += &format!(
                "\nattained: 1{}\n",
                structures.iter().map(|g| format!(", {g}")).collect::<String>()
            );
            s
        }))
    })
}

fn restriction_config(config: &str) -> Result<Value, Failure> {
    if let Some(n) = config.strip_prefix("gl").and_then(|r| r.split_once("-sl")).and_then(|(a, b)| {
        let n: usize = a.parse().ok()?;
        (b.parse::<usize>().ok()? == n).then_some(n)
    }) {
        return Ok(json!({"datum": {"type": "GL", "rank": n}}));
    }
    read_json(Path::new(config))
}

fn characters(d: &RootDatum, listed: Option<&str>, from_config: Option<&Value>, max_d: u64) -> Result<Vec<WUCharacter>, Failure> {
    if let Some(s) = listed {
        return Ok(vec![parse_character(d, s)?]);
    }
    if let Some(Value::Array(list)) = from_config {
        return list
            .iter()
            .map(|v| {
                let s = v.as_str().ok_or_else(|| Failure::Input("characters must be strings".into()))?;
                Ok(parse_character(d, s)?)
            })
            .collect();
    }
    Ok(characters_up_to(d, max_d)?)
}

fn cmd_verify_restriction(config: &str, character: Option<&str>, max_d: u64, format: Format) -> CmdResult {
    let cfg = restriction_config(config)?;
    let d = RootDatum::from_doc(cfg.get("datum").ok_or_else(|| Failure::Input("config needs \"datum\"".into()))?)?;
    let sub = match cfg.get("sublattice") {
        Some(v) => Sublattice {
            generators: serde_json::from_value(v.clone()).map_err(|e| Failure::Input(format!("sublattice: {e}")))?,
        },
        None => Sublattice::coroot_lattice(d.rank()),
    };
    let q = match cfg.get("q") {
        Some(v) => QParameters::from_json(d.root_system(), v)?,
        None => QParameters::new(),
    };
    let chars = characters(&d, character, cfg.get("characters"), max_d)?;
    let reports = chars
        .iter()
        .map(|chi| verify_restriction_sequence(&d, &sub, chi, &q))
        .collect::<Result<Vec<_>, _>>()?;
    let rs = d.root_system();
    let passed = reports.iter().all(|r| r.passed());
    let v = json!({"config": config, "passed": passed, "reports": reports.iter().map(|r| r.to_json(rs)).collect::<Vec<_>>()});
    let out = render(format, &v, || {
        let mut s = format!("# Restriction sequence: {config}\n\n");
        s += "| chi | R(chi) | R(chi_flat) | hat W | checks |\n|---|---|---|---|---|\n";
        for r in &reports {
            let hw = r.hat_w.structure().map(|g| g.to_string()).unwrap_or_else(|e| e.to_string());
            let failed: Vec<&str> = r.checks.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.as_str()).collect();
            s += &format!(
                "| {} | {} | {} | {} | {} |\n",
                r.chi,
                r.r.structure,
                r.r_flat.structure,
                hw,
                if failed.is_empty() { "pass".to_string() } else { format!("FAIL: {}", failed.join(", ")) }
            );
        }
        s
    });
    if passed {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn cmd_verify_transfer(config: &str, character: Option<&str>, max_d: u64, format: Format) -> CmdResult {
    let path = Path::new(config);
    let (td, listed) = if path.exists() {
        let v = read_json(path)?;
        let listed = v.get("characters").cloned();
        let mut doc = v;
        if let Some(o) = doc.as_object_mut() {
            o.remove("characters");
        }
        (load_transfer_datum(&doc)?, listed)
    } else {
        (catalogue::load(config)?, None)
    };
    let chars = characters(&td.source, character, listed.as_ref(), max_d)?;
    let reports = chars.iter().map(|chi| verify_transfer_sequence(&td, chi)).collect::<Result<Vec<_>, _>>()?;
    let collisions = orbit_collisions(&td, &chars, 1_000_000)?;
    let passed = reports.iter().all(|r| r.passed());
    let v = json!({
        "datum": td.name,
        "passed": passed,
        "reports": reports.iter().map(|r| r.to_json(&td)).collect::<Vec<_>>(),
        "orbit_collisions": collisions
            .iter()
            .map(|(a, b, t)| json!({"first": a.to_string(), "second": b.to_string(), "target": t.to_string()}))
            .collect::<Vec<_>>(),
    });
    let out = render(format, &v, || {
        let mut s = format!("# Transfer sequence: {}\n\n", td.name);
        s += "| chi | chi* | R(chi) | R(chi*) | R(chi*)/R(chi) | inclusions | table |\n|---|---|---|---|---|---|---|\n";
        for r in &reports {
            let failed: Vec<&str> = r.inclusions.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.as_str()).collect();
            s += &format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                r.chi,
                r.chi_star,
                r.r.structure,
                r.r_star.structure,
                r.quotient.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into()),
                if failed.is_empty() { "pass".to_string() } else { format!("FAIL: {}", failed.join(", ")) },
                if r.table_check { "pass" } else { "FAIL" }
            );
        }
        for (a, b, t) in &collisions {
            s += &format!("\nsource orbits {a} and {b} both transfer to the orbit of {t}\n");
        }
        s
    });
    if passed {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn cmd_oracle(datum: &DatumArgs, max_d: u64, q: Option<&PathBuf>) -> CmdResult {
    let d = load_datum(datum)?;
    let q = load_q(&d, q)?;
    let table = BruteTable::new(&d, ORACLE_CAP)?;
    let chars = characters_up_to(&d, max_d)?;
    let name = format!("{}/{}", type_string(d.root_system()), if datum.datum.is_some() { "datum" } else { &datum.lattice });
    let mut out = String::new();
    let mut agree = true;
    for (i, chi) in chars.iter().enumerate() {
        let rep = oracle_case(&format!("{name}#{i} {chi}"), &table, &d, chi, &q)?;
        agree &= rep.agree;
        out += &rep.to_json_line();
        out.push('\n');
    }
    if agree {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn cmd_atlas(types: &[String], max_d: u64, default_q_only: bool, full: bool, format: Format) -> CmdResult {
    let names: Vec<String> =
        if types.is_empty() { ATLAS_TYPES.iter().map(ToString::to_string).collect() } else { types.to_vec() };
    let key = json!({"cmd": "atlas", "types": names, "max_d": max_d, "both_q": !default_q_only, "full": full,
                     "format": format == Format::Json});
    cached(&key, || {
        let ts = names.iter().map(|s| s.parse::<CartanType>()).collect::<Result<Vec<_>, _>>()?;
        let sections = build_atlas(&ts, max_d, !default_q_only)?;
        let v = atlas::render_json(&sections, full);
        Ok(render(format, &v, || atlas::render_markdown(&sections, full)))
    })
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Compute { datum, character, q, format } => cmd_compute(&datum, &character, q.as_ref(), format),
        Command::Classify { datum, max_denominator, q, full, format } => {
            cmd_classify(&datum, max_denominator, q.as_ref(), full, format)
        }
        Command::Verify { which } => match which {
            VerifyCommand::Restriction { config, character, max_denominator, format } => {
                cmd_verify_restriction(&config, character.as_deref(), max_denominator, format)
            }
            VerifyCommand::Transfer { config, character, max_denominator, format } => {
                cmd_verify_transfer(&config, character.as_deref(), max_denominator, format)
            }
        },
        Command::Oracle { datum, max_denominator, q } => cmd_oracle(&datum, max_denominator, q.as_ref()),
        Command::Atlas { types, max_denominator, default_q_only, full, format, output } => {
            let out = cmd_atlas(&types, max_denominator, default_q_only, full, format)?;
            match output {
                Some(path) => {
                    fs::write(&path, out).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(out),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(out)) => {
            let _ = stdout.write_all(out.as_bytes());
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
