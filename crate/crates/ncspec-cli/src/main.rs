use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncspec::commbridge::{embed_phi, exp_idempotence_check, exp_to_ncspec, exponential, spec, union_of_primes_bijection};
use ncspec::glueqcoh::{certify_ore, glue, qcoh_cocycle_check, qcoh_roundtrip, Side};
use ncspec::io::{self, Report, Status};
use ncspec::latspace::{build_semilattice, Semilattice};
use ncspec::rings::{hom_validate, RingDescriptor};
use ncspec::sheafspec::{check_functoriality, is_prim, ncspec, ncspec_morphism, non_prim_examples, recover_hom, same_morphism, RingedSpaceMorphism};
use ncspec::skewproj::{build_proj, gamma, serre_unit, SkewSpec};
use ncspec::{Error, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ncspec", version, about = "Noncommutative spectra of concrete rings")]
struct Cli {
    /// Output format. `dot` is available for `semilattice` and `ncspec`.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct RingArg {
    /// Ring description document.
    #[arg(long)]
    ring: PathBuf,
}

#[derive(Args)]
struct ProjArgs {
    /// Skew Laurent ring document giving the twisting table.
    #[arg(long)]
    ring: PathBuf,
    /// Graded module presentation document.
    #[arg(long)]
    module: PathBuf,
    /// Degree window, both ends inclusive.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [0, 4])]
    window: Vec<i64>,
    /// How far below zero chart exponents may go.
    #[arg(long = "box", default_value_t = 4)]
    box_bound: i64,
    /// Depth of the relation span used to decide membership.
    #[arg(long, default_value_t = 4)]
    k_max: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a ring document and check its well-formedness.
    RingValidate(RingArg),
    /// The localization semilattice L(R).
    Semilattice(RingArg),
    /// The spectrum NCSpec(R) with its basic opens and section rings.
    Ncspec(RingArg),
    /// The ringed-space morphism induced by a ring map.
    Morphism {
        #[arg(long)]
        morphism: PathBuf,
        /// A second map, composable after the first, to check functoriality.
        #[arg(long)]
        then: Option<PathBuf>,
    },
    /// Whether a morphism of spectra comes from a ring map.
    PrimCheck {
        #[arg(long, required_unless_present = "example", conflicts_with = "example")]
        morphism: Option<PathBuf>,
        /// One of the built-in morphisms that do not come from ring maps.
        #[arg(long)]
        example: Option<String>,
        /// Extra rings to test the pushout property against.
        #[arg(long)]
        probe: Vec<PathBuf>,
    },
    /// The prime spectrum of a finite commutative ring.
    Spec(RingArg),
    /// The embedding of Spec(R) into NCSpec(R).
    Embed(RingArg),
    /// The exponential space of Spec(R) and its identification with NCSpec(R).
    Exp(RingArg),
    /// Glue finite spectra along point bijections.
    Glue {
        #[arg(long)]
        datum: PathBuf,
    },
    /// Cocycle and round-trip checks for a module over a chart cover.
    QcohCheck {
        #[arg(long)]
        datum: PathBuf,
        /// Closure size bound for the Ore certificate of each chart.
        #[arg(long, default_value_t = 64)]
        ore_bound: usize,
    },
    /// Dimensions of global sections of twists on the skew projective space.
    ProjGamma(ProjArgs),
    /// The unit map from a graded module to its global sections.
    SerreCheck {
        #[command(flatten)]
        proj: ProjArgs,
        /// Multiplication depth used to decide torsion.
        #[arg(long, default_value_t = 6)]
        torsion_bound: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::RingValidate(_) => "ring-validate",
            Command::Semilattice(_) => "semilattice",
            Command::Ncspec(_) => "ncspec",
            Command::Morphism { .. } => "morphism",
            Command::PrimCheck { .. } => "prim-check",
            Command::Spec(_) => "spec",
            Command::Embed(_) => "embed",
            Command::Exp(_) => "exp",
            Command::Glue { .. } => "glue",
            Command::QcohCheck { .. } => "qcoh-check",
            Command::ProjGamma(_) => "proj-gamma",
            Command::SerreCheck { .. } => "serre-check",
        }
    }

    fn provenance(&self) -> Value {
        let path = |p: &Path| p.display().to_string();
        let proj = |a: &ProjArgs| json!({"ring": path(&a.ring), "module": path(&a.module), "window": a.window, "box": a.box_bound, "k_max": a.k_max});
        match self {
            Command::RingValidate(a) | Command::Semilattice(a) | Command::Ncspec(a) | Command::Spec(a) | Command::Embed(a) | Command::Exp(a) => json!({"ring": path(&a.ring)}),
            Command::Morphism { morphism, then } => json!({"morphism": path(morphism), "then": then.as_deref().map(path)}),
            Command::PrimCheck { morphism, example, probe } => json!({
                "morphism": morphism.as_deref().map(path),
                "example": example,
                "probes": probe.iter().map(|p| path(p)).collect::<Vec<_>>(),
            }),
            Command::Glue { datum } => json!({"datum": path(datum)}),
            Command::QcohCheck { datum, ore_bound } => json!({"datum": path(datum), "ore_bound": ore_bound}),
            Command::ProjGamma(a) => proj(a),
            Command::SerreCheck { proj: a, torsion_bound } => {
                let mut v = proj(a);
                v["torsion_bound"] = json!(torsion_bound);
                v
            }
        }
    }
}

/// What a subcommand produced: the report body plus optional renderings.
struct Outcome {
    status: Status,
    payload: Value,
    dot: Option<String>,
    text: Option<String>,
}

impl Outcome {
    fn checked(ok: bool, payload: Value) -> Self {
        Outcome { status: Status::from_bool(ok), payload, dot: None, text: None }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::ParseError { line: 0, column: 0, message: format!("{}: {e}", path.display()) })
}

fn ring(path: &Path) -> Result<RingDescriptor> {
    io::parse_ring(&read(path)?)
}

fn morphism_json(m: &RingedSpaceMorphism) -> Value {
    json!((0..m.source.len())
        .map(|p| json!({"point": m.source.point_label(p), "image": m.target.point_label(m.point_map[p])}))
        .collect::<Vec<_>>())
}

fn skew_spec(path: &Path) -> Result<SkewSpec> {
    match ring(path)? {
        RingDescriptor::SkewLaurent(s) => Ok(s),
        other => Err(Error::UnsupportedClass { op: "skew projective space".into(), ring: other.to_string() }),
    }
}

fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::RingValidate(a) => {
            let r = ring(&a.ring)?;
            r.validate()?;
            Ok(Outcome::checked(true, json!({"ring": io::ring_to_json(&r), "name": r.to_string()})))
        }
        Command::Semilattice(a) => match build_semilattice(&ring(&a.ring)?)? {
            Semilattice::Finite(l) => Ok(Outcome { status: Status::Pass, payload: l.to_json(), dot: Some(l.to_dot()), text: None }),
            Semilattice::Lazy(l) => Ok(Outcome::checked(true, json!({"ring": l.ring.to_string(), "materialized": false}))),
        },
        Command::Ncspec(a) => {
            let x = ncspec(&ring(&a.ring)?)?;
            Ok(Outcome { status: Status::Pass, payload: x.to_json(), dot: Some(x.to_dot()), text: None })
        }
        Command::Morphism { morphism, then } => {
            let theta = io::parse_hom(&read(morphism)?)?;
            let m = ncspec_morphism(&theta)?;
            let continuous = m.is_continuous();
            let commute = m.comaps_commute()?;
            let recovered = same_morphism(&ncspec_morphism(&recover_hom(&m))?, &m)?;
            let mut payload = json!({
                "points": morphism_json(&m),
                "continuous": continuous,
                "comaps_commute": commute,
                "recovers_ring_map": recovered,
            });
            let mut ok = continuous && commute && recovered;
            if let Some(p) = then {
                let f = check_functoriality(&theta, &io::parse_hom(&read(p)?)?)?;
                payload["functoriality_failures"] = json!(f.failures);
                ok &= f.passed();
            }
            Ok(Outcome::checked(ok, payload))
        }
        Command::PrimCheck { morphism, example, probe } => {
            let m = match (morphism, example) {
                (Some(p), _) => {
                    let h = io::parse_hom(&read(p)?)?;
                    hom_validate(&h)?;
                    ncspec_morphism(&h)?
                }
                (None, Some(name)) => non_prim_examples()?.into_iter().find(|(n, _)| n == name).map(|(_, m)| m).ok_or_else(|| Error::SchemaViolation {
                    path: "--example".into(),
                    message: format!("unknown example {name:?}"),
                })?,
                (None, None) => unreachable!("clap requires one of --morphism and --example"),
            };
            let probes: Vec<RingDescriptor> = probe.iter().map(|p| ring(p)).collect::<Result<_>>()?;
            let prim = is_prim(&m, Some(&probes))?;
            Ok(Outcome::checked(prim, json!({"points": morphism_json(&m), "prim": prim})))
        }
        Command::Spec(a) => {
            let r = ring(&a.ring)?;
            let sp = spec(&r)?;
            let u = union_of_primes_bijection(&r)?;
            let mut payload = sp.to_json();
            payload["unions_of_primes"] = json!(u.unions);
            payload["irreducible_closed_sets"] = json!(u.irreducible_closed);
            payload["bijective"] = json!(u.bijective);
            Ok(Outcome::checked(u.bijective, payload))
        }
        Command::Embed(a) => {
            let e = embed_phi(&ring(&a.ring)?)?;
            Ok(Outcome::checked(e.passed(), e.to_json()))
        }
        Command::Exp(a) => {
            let r = ring(&a.ring)?;
            let sp = spec(&r)?;
            let based = sp.based();
            let e = exponential(&based)?;
            let idempotent = exp_idempotence_check(&based)?;
            let nc = ncspec(&r)?;
            let iso = exp_to_ncspec(&sp, &e, &nc)?;
            let mut payload = e.to_json();
            payload["idempotent"] = json!(idempotent);
            payload["gamma"] = json!((0..e.len()).map(|c| json!({"class": e.label(c), "point": nc.point_label(iso.gamma[c])})).collect::<Vec<_>>());
            payload["bijective"] = json!(iso.bijective);
            payload["base_matches"] = json!(iso.base_matches);
            Ok(Outcome::checked(idempotent && iso.passed(), payload))
        }
        Command::Glue { datum } => {
            let g = glue(&io::parse_glue(&read(datum)?)?)?;
            Ok(Outcome::checked(true, g.to_json()))
        }
        Command::QcohCheck { datum, ore_bound } => {
            let d = io::parse_qcoh(&read(datum)?)?;
            let cocycle = qcoh_cocycle_check(&d)?;
            let lattice = &d.tilde.space.lattice;
            let ring = &d.tilde.space.ring;
            let mut charts = Vec::new();
            for &c in &d.charts {
                let cert = certify_ore(ring, &lattice.cells[c].representative, *ore_bound, Side::Right)?;
                charts.push(json!({"cell": lattice.cells[c].label, "closure_size": cert.closure_size, "witnesses": cert.witnesses.len()}));
            }
            let rt = qcoh_roundtrip(ring, &d.tilde.module)?;
            let payload = json!({
                "charts": charts,
                "cocycle": cocycle,
                "roundtrip": {
                    "module_size": rt.module_size,
                    "global_sections_size": rt.gamma_size,
                    "unit_bijective": rt.unit_bijective,
                    "reconstruction_matches": rt.reconstruction_matches,
                },
            });
            Ok(Outcome::checked(cocycle.passed() && rt.passed(), payload))
        }
        Command::ProjGamma(a) => {
            let s = skew_spec(&a.ring)?;
            let x = build_proj(&s)?;
            let m = io::parse_graded_module(&s, &read(&a.module)?)?;
            let t = gamma(&x, &m, (a.window[0], a.window[1]), a.k_max, a.box_bound)?;
            Ok(Outcome { status: Status::Pass, payload: t.to_json(), dot: None, text: Some(t.to_text()) })
        }
        Command::SerreCheck { proj: a, torsion_bound } => {
            let s = skew_spec(&a.ring)?;
            let x = build_proj(&s)?;
            let m = io::parse_graded_module(&s, &read(&a.module)?)?;
            let rep = serre_unit(&x, &m, (a.window[0], a.window[1]), a.k_max, a.box_bound, *torsion_bound)?;
            let decided = rep.degrees.iter().flat_map(|g| [g.kernel_torsion, g.cokernel_torsion]);
            let status = if rep.passed() {
                Status::Pass
            } else if decided.clone().any(|t| t == Some(false)) {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            Ok(Outcome { status, payload: rep.to_json(&m), dot: None, text: None })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let provenance = cli.command.provenance();
    let (report, dot, text) = match run(&cli.command) {
        Ok(o) => (Report::new(name, o.status, o.payload, provenance), o.dot, o.text),
        Err(e) => (Report::from_error(name, &e, provenance), None, None),
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("reports serialize"),
        Format::Dot => match dot {
            Some(d) if report.status == Status::Pass => d,
            Some(_) | None if report.error.is_some() => serde_json::to_string_pretty(&report.to_json()).expect("reports serialize"),
            _ => {
                eprintln!("ncspec: --format dot is not available for {name}");
                return ExitCode::from(2);
            }
        },
        Format::Text => {
            let body = text.unwrap_or_else(|| serde_json::to_string_pretty(&report.payload).expect("payloads serialize"));
            let mut out = format!("{name}: {}\n{body}", report.status.as_str());
            if let Some(e) = &report.error {
                out.push_str(&format!("\n{}: {}", e["name"].as_str().unwrap_or(""), e["message"].as_str().unwrap_or("")));
            }
            out
        }
    };
    // a closed pipe (for example `| head`) is not an error of the run
    let _ = writeln!(std::io::stdout().lock(), "{rendered}");
    match report.status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(1),
        Status::Inconclusive => ExitCode::from(3),
    }
}
