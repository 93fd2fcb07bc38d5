mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rigidsum::characters::{AdditiveCharacter, MultiplicativeCharacter};
use rigidsum::datum::{Datum, DatumKind};
use rigidsum::ff::{is_prime, Elem, Field};
use rigidsum::moduli::{self, DEFAULT_HECKE_CAP};
use rigidsum::notation::{format_elem, parse_config, parse_elem, parse_field, parse_index_list, parse_pair};
use rigidsum::parahoric::{
    conjecture_check, d_adjoint, dim_bun_doubled, parahoric_codim, weak_rigidity_condition, CartanType,
    ConjectureCase, ConjectureReport, ParahoricKind, RootSystemData,
};
use rigidsum::rigidity::{
    classify_rank2, conductor_report, datum_descriptors, parse_point_shorthand, rigidity_index,
    rigidity_index_via_euler, AdjointLocal, LocalMonodromy, RigidityError, RigidityInput,
};
use rigidsum::suite::{run_criterion, SuiteOptions, CRITERIA, DEFAULT_SEED};
use rigidsum::trace::{
    eigen_trace, hypergeom_trace_convolution, hypergeom_trace_direct, kloosterman_table,
    kloosterman_via_convolution, kummer_twist_search, verify_identity_with, weil_scan, ConvolutionMode,
    HypergeomSpec, IdentityOptions, TraceTable,
};

use output::{Emitter, Format, Header};

/// Flags that take no value; a config file enables them with `key=true`.
const SWITCHES: [&str; 2] = ["perturb-constant", "experimental-kummer"];

#[derive(Parser, Debug)]
#[command(name = "rigidsum", version, about = "Exact exponential sums, conductors and rigidity checks over finite fields")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Tolerance for floating point bound checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// File of key=value lines supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kloosterman sums Kl_n at every unit, with the Weil bound.
    Kloosterman {
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Additive twist as an element.
        #[arg(long, default_value = "1")]
        psi: String,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
    },
    /// Hypergeometric trace function with upper and lower characters.
    Hypergeom {
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "")]
        chis: String,
        #[arg(long, default_value = "")]
        rhos: String,
        #[arg(long, default_value = "1")]
        psi: String,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
    },
    /// Check the eigen trace against the hypergeometric side.
    VerifyIdentity {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, hide = true)]
        perturb_constant: bool,
        /// Search for a Kummer twist when the second character at 1 is nontrivial.
        #[arg(long)]
        experimental_kummer: bool,
    },
    /// Trace of Frobenius of the eigen local system.
    EigenTrace {
        #[command(flatten)]
        datum: DatumArgs,
    },
    /// Brute-force Hecke trace, compared with the eigen trace.
    HeckeOracle {
        #[command(flatten)]
        datum: DatumArgs,
    },
    /// Rigidity index from local conductor data.
    RigidityCheck {
        #[arg(long, default_value_t = 0)]
        genus: u32,
        /// Comma-separated point shorthands, e.g. `tame,tame:2,induced`.
        #[arg(long)]
        points: Option<String>,
        /// Full local descriptor; repeat once per point.
        #[arg(long)]
        descriptor: Vec<String>,
        /// Use the local data of a datum.
        #[arg(long)]
        datum: Option<DatumKind>,
        #[arg(long, default_value_t = 3)]
        dimad: u32,
        #[arg(long, default_value_t = 0)]
        h0: u32,
    },
    /// Match rank-two local data against the rigid shapes.
    ClassifyRank2 {
        #[arg(long)]
        descriptor: Vec<String>,
        #[arg(long)]
        datum: Option<DatumKind>,
        /// Residue characteristic.
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// Dimensions attached to parahoric subgroups.
    ParahoricDim {
        #[arg(long = "type")]
        cartan: String,
        /// One or more comma-separated parahoric kinds.
        #[arg(long)]
        parahoric: String,
        #[arg(long, default_value_t = 0)]
        genus: u32,
    },
    /// Compare level dimensions with adjoint conductors point by point.
    ConjectureCheck {
        /// `A`, `B`, `C`, `kloosterman` or `all`.
        #[arg(long)]
        case: String,
        /// Root system for the Kloosterman case; `all` for every type.
        #[arg(long = "type")]
        cartan: Option<String>,
    },
    /// Relevant bundles with level structure, per degree.
    EnumerateRelevant {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        dmin: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        dmax: i64,
        #[arg(long, default_value_t = 4)]
        split_cap: u32,
    },
    /// Weil bound over all primes (or prime powers) up to a limit.
    WeilScan {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 101)]
        qmax: u32,
        #[arg(long, default_value_t = 2)]
        qmin: u32,
        /// Include prime powers.
        #[arg(long)]
        powers: bool,
    },
    /// The numbered acceptance battery.
    Suite {
        #[arg(long, default_value_t = 9)]
        qmax: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 101)]
        weil_pmax: u32,
        /// Comma-separated criterion numbers.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Naive,
    Dft,
}

#[derive(Args, Debug)]
struct DatumArgs {
    #[arg(long)]
    datum: DatumKind,
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0,0")]
    chi0: String,
    #[arg(long, default_value = "0,0")]
    chi1: String,
    #[arg(long, default_value = "0,0")]
    chiinf: String,
    /// Two elements, e.g. `1,2` or `[1,0],[0,1]`.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value = "1")]
    psi: String,
}

enum Failure {
    Usage(String),
    Check(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut out = Emitter::new(cli.format);
    let result = dispatch(&cli, &mut out);
    out.finish();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("counterexample: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Append `--key value` for every config entry whose flag is not already on
/// the command line.
fn merge_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = args.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let entries = parse_config(&text).map_err(|e| format!("{path}: {e}"))?;
    for (key, value) in entries {
        let flag = format!("--{key}");
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present || key == "config" {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "1" | "yes" => argv.push(flag.into()),
                "false" | "0" | "no" => {}
                other => return Err(format!("{path}: {key} expects true or false, got {other:?}")),
            }
        } else {
            argv.push(format!("{flag}={value}").into());
        }
    }
    Ok(argv)
}

fn dispatch(cli: &Cli, out: &mut Emitter) -> Outcome {
    let table_command = matches!(
        cli.command,
        Command::Kloosterman { .. } | Command::Hypergeom { .. } | Command::EigenTrace { .. } | Command::HeckeOracle { .. }
    );
    if cli.format == Format::Csv && !table_command {
        return Err(usage("csv output is available for kloosterman, hypergeom, eigen-trace and hecke-oracle"));
    }
    let tol = cli.tolerance;
    match &cli.command {
        Command::Kloosterman { q, n, psi, method } => cmd_kloosterman(out, q, *n, psi, *method, tol),
        Command::Hypergeom {
            q,
            chis,
            rhos,
            psi,
            method,
        } => cmd_hypergeom(out, q, chis, rhos, psi, *method),
        Command::VerifyIdentity {
            datum,
            perturb_constant,
            experimental_kummer,
        } => cmd_verify(out, datum, *perturb_constant, *experimental_kummer),
        Command::EigenTrace { datum } => cmd_eigen(out, datum),
        Command::HeckeOracle { datum } => cmd_hecke(out, datum),
        Command::RigidityCheck {
            genus,
            points,
            descriptor,
            datum,
            dimad,
            h0,
        } => cmd_rigidity(out, *genus, points.as_deref(), descriptor, *datum, *dimad, *h0),
        Command::ClassifyRank2 { descriptor, datum, p } => cmd_classify(out, descriptor, *datum, *p),
        Command::ParahoricDim {
            cartan,
            parahoric,
            genus,
        } => cmd_parahoric(out, cartan, parahoric, *genus),
        Command::ConjectureCheck { case, cartan } => cmd_conjecture(out, case, cartan.as_deref()),
        Command::EnumerateRelevant {
            datum,
            dmin,
            dmax,
            split_cap,
        } => cmd_enumerate(out, datum, *dmin, *dmax, *split_cap),
        Command::WeilScan { n, qmax, qmin, powers } => cmd_weil(out, *n, *qmin, *qmax, *powers, tol),
        Command::Suite {
            qmax,
            seed,
            cases,
            weil_pmax,
            only,
        } => {
            let opts = SuiteOptions {
                qmax: *qmax,
                seed: *seed,
                cases: *cases,
                tolerance: tol,
                weil_pmax: *weil_pmax,
                ..SuiteOptions::default()
            };
            cmd_suite(out, &opts, only.as_deref())
        }
    }
}

fn psi_of(field: &Field, t: &str) -> Result<AdditiveCharacter, Failure> {
    let t = parse_elem(field, t.trim().trim_start_matches("psi:")).map_err(usage)?;
    if t.is_zero() {
        return Err(usage("the additive character must be nontrivial"));
    }
    Ok(AdditiveCharacter::new(field, t))
}

fn characters(field: &Field, list: &str) -> Result<Vec<MultiplicativeCharacter>, Failure> {
    Ok(parse_index_list(list)
        .map_err(usage)?
        .into_iter()
        .map(|a| MultiplicativeCharacter::new(field, a))
        .collect())
}

/// Two elements separated by a top-level comma.
fn parse_elem_pair(field: &Field, s: &str) -> Result<[Elem; 2], Failure> {
    let mut depth = 0;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let i = split.ok_or_else(|| usage(format!("expected two elements, got {s:?}")))?;
    Ok([
        parse_elem(field, &s[..i]).map_err(usage)?,
        parse_elem(field, &s[i + 1..]).map_err(usage)?,
    ])
}

fn build_datum(args: &DatumArgs, header: &mut Header) -> Result<(Field, Datum), Failure> {
    let field = parse_field(&args.q).map_err(usage)?;
    header.field(&field);
    header.set("datum", args.datum);
    let psi = parse_elem(&field, args.psi.trim().trim_start_matches("psi:")).map_err(usage)?;
    header.set("psi", format_elem(&field, psi));
    let pair = |s: &str| parse_pair(s).map_err(usage);
    let phi = |h: &mut Header| -> Result<[Elem; 2], Failure> {
        let s = args
            .phi
            .as_deref()
            .ok_or_else(|| usage(format!("datum {} needs --phi", args.datum)))?;
        let phi = parse_elem_pair(&field, s)?;
        h.set("phi", format!("{},{}", format_elem(&field, phi[0]), format_elem(&field, phi[1])));
        Ok(phi)
    };
    let datum = match args.datum {
        DatumKind::A => {
            let (c0, c1, ci) = (pair(&args.chi0)?, pair(&args.chi1)?, pair(&args.chiinf)?);
            header.set("chi0", &args.chi0);
            header.set("chi1", &args.chi1);
            header.set("chiinf", &args.chiinf);
            Datum::a(&field, c0, c1, ci)
        }
        DatumKind::B => {
            header.set("chi0", &args.chi0);
            let phi = phi(header)?;
            Datum::b(&field, pair(&args.chi0)?, phi)
        }
        DatumKind::C => {
            header.set("chi0", &args.chi0);
            header.set("chiinf", &args.chiinf);
            let phi = phi(header)?;
            Datum::c(&field, pair(&args.chi0)?, pair(&args.chiinf)?, phi)
        }
    };
    Ok((field, datum.with_psi(psi)))
}

fn describe(args: &DatumArgs, field: &Field) -> String {
    let mut s = format!("q={} datum={} chi0={}", field.q(), args.datum, args.chi0);
    if args.datum == DatumKind::A {
        s.push_str(&format!(" chi1={}", args.chi1));
    }
    if args.datum != DatumKind::B {
        s.push_str(&format!(" chiinf={}", args.chiinf));
    }
    if let Some(phi) = &args.phi {
        s.push_str(&format!(" phi={phi}"));
    }
    s
}

fn emit_table(out: &mut Emitter, table: &TraceTable, label: &str, extra: impl Fn(Elem) -> Value) {
    for (x, v) in table.iter() {
        out.point(label, table.field(), x, v, extra(x));
    }
}

fn cmd_kloosterman(out: &mut Emitter, q: &str, n: u32, psi: &str, method: Method, tol: f64) -> Outcome {
    let field = parse_field(q).map_err(usage)?;
    let psi = psi_of(&field, psi)?;
    let mut h = Header::new("kloosterman");
    h.field(&field);
    h.set("n", n);
    h.set("psi", format_elem(&field, psi.twist()));
    h.set("method", format!("{method:?}").to_lowercase());
    h.set("tolerance", tol);
    out.header(&h);
    let table = match method {
        Method::Direct => kloosterman_table(&field, &psi, n),
        Method::Naive => kloosterman_via_convolution(&field, &psi, n, ConvolutionMode::Naive),
        Method::Dft => kloosterman_via_convolution(&field, &psi, n, ConvolutionMode::Dft),
    }
    .map_err(usage)?;
    let bound = n as f64 * (field.q() as f64).powf((n as f64 - 1.0) / 2.0);
    let mut violation = None;
    for (x, v) in table.iter() {
        let ok = v.abs() <= bound + tol;
        if !ok && violation.is_none() {
            violation = Some(x);
        }
        out.point(&format!("Kl_{n}"), &field, x, v, json!({ "bound": bound, "within_bound": ok }));
    }
    match violation {
        Some(x) => Err(Failure::Check(format!("q={} n={n} x={}", field.q(), format_elem(&field, x)))),
        None => Ok(()),
    }
}

fn cmd_hypergeom(out: &mut Emitter, q: &str, chis: &str, rhos: &str, psi: &str, method: Method) -> Outcome {
    let field = parse_field(q).map_err(usage)?;
    let spec = HypergeomSpec::new(psi_of(&field, psi)?, characters(&field, chis)?, characters(&field, rhos)?);
    let mut h = Header::new("hypergeom");
    h.field(&field);
    h.set("chis", chis);
    h.set("rhos", rhos);
    h.set("psi", format_elem(&field, spec.psi.twist()));
    h.set("method", format!("{method:?}").to_lowercase());
    out.header(&h);
    let table = match method {
        Method::Direct => hypergeom_trace_direct(&field, &spec),
        Method::Naive => hypergeom_trace_convolution(&field, &spec, ConvolutionMode::Naive),
        Method::Dft => hypergeom_trace_convolution(&field, &spec, ConvolutionMode::Dft),
    }
    .map_err(usage)?;
    emit_table(out, &table, "H", |_| json!({}));
    Ok(())
}

fn cmd_verify(out: &mut Emitter, args: &DatumArgs, perturb: bool, kummer: bool) -> Outcome {
    let mut h = Header::new("verify-identity");
    let (field, datum) = build_datum(args, &mut h)?;
    if perturb {
        h.set("perturb-constant", true);
    }
    out.header(&h);
    let flags = json!({ "generic": datum.is_generic(), "det_condition": datum.det_condition() });
    if let Datum::A { chi1, .. } = &datum {
        if !chi1[1].is_trivial() {
            if !kummer {
                return Err(usage(
                    "datum A identity needs the second character at 1 trivial; pass --experimental-kummer to search for a twist",
                ));
            }
            let found = kummer_twist_search(&datum, &field).map_err(usage)?;
            out.record(json!({ "experimental": "kummer-twist", "candidates": found, "flags": flags }), || {
                format!("kummer-twist candidates: {}", found.len())
            });
            return Ok(());
        }
    }
    let report = verify_identity_with(&datum, &field, IdentityOptions { perturb_constant: perturb }).map_err(usage)?;
    let mut value = serde_json::to_value(&report).expect("serializable");
    if let Value::Object(o) = &mut value {
        o.insert("generic".into(), flags["generic"].clone());
        o.insert("det_condition".into(), flags["det_condition"].clone());
        o.insert("constant_text".into(), json!(report.constant.to_string()));
    }
    out.record(value, || {
        format!(
            "datum {} q={}: {} ({} points), constant {}",
            report.datum,
            report.q,
            if report.holds { "identity holds" } else { "identity FAILS" },
            report.points_checked,
            report.constant
        )
    });
    if report.holds {
        Ok(())
    } else {
        let x = Elem(report.witness.unwrap_or(0));
        Err(Failure::Check(format!("{} x={}", describe(args, &field), format_elem(&field, x))))
    }
}

fn cmd_eigen(out: &mut Emitter, args: &DatumArgs) -> Outcome {
    let mut h = Header::new("eigen-trace");
    let (field, datum) = build_datum(args, &mut h)?;
    out.header(&h);
    let table = eigen_trace(&datum, &field).map_err(usage)?;
    emit_table(out, &table, &args.datum.to_string(), |_| json!({}));
    Ok(())
}

fn hecke_cap() -> Result<u32, Failure> {
    match std::env::var("RIGIDSUM_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("RIGIDSUM_CAP must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_HECKE_CAP),
    }
}

fn cmd_hecke(out: &mut Emitter, args: &DatumArgs) -> Outcome {
    let mut h = Header::new("hecke-oracle");
    let (field, datum) = build_datum(args, &mut h)?;
    let cap = hecke_cap()?;
    h.set("cap", cap);
    out.header(&h);
    let hecke = moduli::hecke_trace_bruteforce_with_cap(&datum, &field, cap).map_err(usage)?;
    let eigen = eigen_trace(&datum, &field).map_err(usage)?;
    let mut mismatch = None;
    for (x, v) in hecke.iter() {
        let agrees = eigen.get(x) == Some(v);
        if !agrees && mismatch.is_none() {
            mismatch = Some(x);
        }
        out.point(&args.datum.to_string(), &field, x, v, json!({ "matches_eigen_trace": agrees }));
    }
    match mismatch {
        Some(x) => Err(Failure::Check(format!("{} x={}", describe(args, &field), format_elem(&field, x)))),
        None => Ok(()),
    }
}

fn parse_descriptors(list: &[String]) -> Result<Vec<LocalMonodromy>, Failure> {
    list.iter().map(|d| d.parse::<LocalMonodromy>().map_err(usage)).collect()
}

fn rigidity_failure(e: RigidityError) -> Failure {
    match e {
        RigidityError::OddIndex(_) | RigidityError::NotRealizable(_) => Failure::Check(e.to_string()),
        other => usage(other),
    }
}

fn cmd_rigidity(
    out: &mut Emitter,
    genus: u32,
    points: Option<&str>,
    descriptors: &[String],
    datum: Option<DatumKind>,
    dimad: u32,
    h0: u32,
) -> Outcome {
    let mut h = Header::new("rigidity-check");
    h.set("genus", genus);
    h.set("dimad", dimad);
    h.set("h0", h0);
    let sources = points.is_some() as u8 + !descriptors.is_empty() as u8 + datum.is_some() as u8;
    if sources != 1 {
        return Err(usage("give exactly one of --points, --descriptor or --datum"));
    }
    let (locals, per_point): (Vec<AdjointLocal>, Vec<Value>) = if let Some(list) = points {
        h.set("points", list);
        let locals: Vec<AdjointLocal> = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_point_shorthand(s).map_err(usage))
            .collect::<Result<_, _>>()?;
        let rows = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .zip(&locals)
            .map(|(s, l)| json!({ "point": s.trim(), "sw": l.sw, "a_std": null, "a_adj": l.a }))
            .collect();
        (locals, rows)
    } else {
        let descs = match datum {
            Some(k) => {
                h.set("datum", k);
                datum_descriptors(k)
            }
            None => parse_descriptors(descriptors)?,
        };
        for d in &descs {
            h.params.entry("descriptors".into()).or_default().push_str(&format!("{d} "));
        }
        let report = conductor_report(&descs).map_err(usage)?;
        let locals = report
            .points
            .iter()
            .map(|p| AdjointLocal { a: p.a_adj, sw: p.sw_adj })
            .collect();
        let rows = report
            .points
            .iter()
            .map(|p| json!({ "point": p.label, "sw": p.sw_std, "a_std": p.a_std, "sw_adj": p.sw_adj, "a_adj": p.a_adj }))
            .collect();
        (locals, rows)
    };
    if let Some(d) = h.params.get_mut("descriptors") {
        *d = d.trim_end().to_string();
    }
    out.header(&h);
    let input = RigidityInput {
        genus,
        points: locals,
        dim_ad: dimad,
        h0,
    };
    let report = rigidity_index(&input).map_err(rigidity_failure)?;
    let via_euler = rigidity_index_via_euler(&input).map_err(rigidity_failure)?;
    out.record(
        json!({
            "per_point": per_point,
            "index": report.index,
            "index_via_euler": via_euler,
            "euler_characteristic": report.euler_characteristic,
            "rigid": report.rigid,
        }),
        || {
            let pts: Vec<String> = per_point
                .iter()
                .map(|p| format!("{}: a_adj={} sw={}", p["point"].as_str().unwrap_or_default(), p["a_adj"], p["sw"]))
                .collect();
            format!(
                "{}\nindex {} (via Euler characteristic {}), {}",
                pts.join("\n"),
                report.index,
                via_euler,
                if report.rigid { "rigid" } else { "not rigid" }
            )
        },
    );
    if report.index != via_euler {
        return Err(Failure::Check(format!(
            "index {} differs from Euler-characteristic route {}",
            report.index, via_euler
        )));
    }
    Ok(())
}

fn cmd_classify(out: &mut Emitter, descriptors: &[String], datum: Option<DatumKind>, p: u32) -> Outcome {
    let mut h = Header::new("classify-rank2");
    h.set("p", p);
    let descs = match (datum, descriptors.is_empty()) {
        (Some(k), true) => {
            h.set("datum", k);
            datum_descriptors(k)
        }
        (None, false) => parse_descriptors(descriptors)?,
        _ => return Err(usage("give either --datum or at least one --descriptor")),
    };
    h.set(
        "descriptors",
        descs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
    );
    out.header(&h);
    let ty = classify_rank2(&descs, p).map_err(usage)?;
    out.record(json!({ "type": ty }), || format!("{ty:?}"));
    Ok(())
}

fn cmd_parahoric(out: &mut Emitter, cartan: &str, parahoric: &str, genus: u32) -> Outcome {
    let t: CartanType = cartan.parse().map_err(usage)?;
    let kinds: Vec<ParahoricKind> = parahoric
        .split(',')
        .map(|s| s.parse::<ParahoricKind>().map_err(usage))
        .collect::<Result<_, _>>()?;
    let g = RootSystemData::new(t);
    let mut h = Header::new("parahoric-dim");
    h.set("type", t);
    h.set("parahoric", parahoric);
    h.set("genus", genus);
    out.header(&h);
    let rows: Vec<Value> = kinds
        .iter()
        .map(|&k| json!({ "parahoric": k, "codim": parahoric_codim(&g, k), "d": d_adjoint(&g, k) }))
        .collect();
    let doubled = dim_bun_doubled(genus, &g, &kinds);
    out.record(
        json!({
            "type": t.to_string(),
            "rank": g.rank,
            "dim": g.dim,
            "positive_roots": g.num_pos_roots,
            "coxeter_number": g.coxeter_number,
            "points": rows,
            "dim_bun_doubled": doubled,
            "condition": weak_rigidity_condition(genus, &g, &kinds),
        }),
        || {
            let ds: Vec<String> = kinds.iter().map(|&k| format!("d({k})={}", d_adjoint(&g, k))).collect();
            format!("{t}: dim {} rank {}  {}  2 dim Bun = {doubled}", g.dim, g.rank, ds.join(" "))
        },
    );
    let (pos, r) = (g.num_pos_roots as u64, g.rank as u64);
    if d_adjoint(&g, ParahoricKind::Iwahori) != 2 * pos || d_adjoint(&g, ParahoricKind::IwahoriPlus) != 2 * (pos + r) {
        return Err(Failure::Check(format!("affine-root count disagrees with root data for {t}")));
    }
    Ok(())
}

fn cmd_conjecture(out: &mut Emitter, case: &str, cartan: Option<&str>) -> Outcome {
    let mut h = Header::new("conjecture-check");
    h.set("case", case);
    let types = |c: Option<&str>| -> Result<Vec<CartanType>, Failure> {
        match c {
            None | Some("all") => Ok(CartanType::catalogue()),
            Some(s) => Ok(vec![s.parse().map_err(usage)?]),
        }
    };
    let cases: Vec<ConjectureCase> = match case.trim() {
        "kloosterman" => {
            if let Some(c) = cartan {
                h.set("type", c);
            }
            types(cartan)?.into_iter().map(ConjectureCase::Kloosterman).collect()
        }
        "all" => {
            let mut v: Vec<ConjectureCase> = [DatumKind::A, DatumKind::B, DatumKind::C]
                .into_iter()
                .map(ConjectureCase::Datum)
                .collect();
            v.extend(types(None)?.into_iter().map(ConjectureCase::Kloosterman));
            v
        }
        other => vec![ConjectureCase::Datum(other.parse().map_err(usage)?)],
    };
    out.header(&h);
    let mut failed: Option<ConjectureReport> = None;
    for c in cases {
        let report = conjecture_check(c).map_err(usage)?;
        let value = serde_json::to_value(&report).expect("serializable");
        out.record(value, || {
            let pts: Vec<String> = report
                .points
                .iter()
                .map(|p| format!("{}: d={} a={}", p.point, p.d, p.a))
                .collect();
            format!("{}: {} [{}]", report.case, if report.matches { "match" } else { "MISMATCH" }, pts.join(", "))
        });
        if !report.matches && failed.is_none() {
            failed = Some(report);
        }
    }
    match failed {
        Some(r) => {
            let p = r.points.iter().find(|p| !p.matches).expect("mismatch");
            Err(Failure::Check(format!("{} at {}: d={} a={}", r.case, p.point, p.d, p.a)))
        }
        None => Ok(()),
    }
}

fn cmd_enumerate(out: &mut Emitter, args: &DatumArgs, dmin: i64, dmax: i64, split_cap: u32) -> Outcome {
    let mut h = Header::new("enumerate-relevant");
    let (field, datum) = build_datum(args, &mut h)?;
    h.set("dmin", dmin);
    h.set("dmax", dmax);
    h.set("split-cap", split_cap);
    out.header(&h);
    let generic = datum.is_generic();
    let mut bad = None;
    for d in dmin..=dmax {
        let orbits = moduli::relevant_orbits(&datum, d, split_cap).map_err(usage)?;
        let relevant: Vec<Value> = orbits
            .relevant
            .iter()
            .map(|o| {
                json!({
                    "splitting": [o.config.splitting.0, o.config.splitting.1],
                    "level": o.config.level,
                    "aut_order": o.aut_order,
                })
            })
            .collect();
        out.record(json!({ "d": d, "relevant": relevant, "generic": generic }), || {
            let items: Vec<String> = orbits
                .relevant
                .iter()
                .map(|o| {
                    let aut = o.aut_order.map_or("?".to_string(), |n| n.to_string());
                    format!("{} |Aut|={aut}", o.config)
                })
                .collect();
            format!("d={d}: {} relevant  {}", items.len(), items.join("; "))
        });
        if generic && orbits.relevant.len() != 1 && bad.is_none() {
            bad = Some((d, orbits.relevant.len()));
        }
    }
    match bad {
        Some((d, n)) => Err(Failure::Check(format!(
            "{} d={d}: {n} relevant points for generic parameters",
            describe(args, &field)
        ))),
        None => Ok(()),
    }
}

fn cmd_weil(out: &mut Emitter, n: u32, qmin: u32, qmax: u32, powers: bool, tol: f64) -> Outcome {
    let mut h = Header::new("weil-scan");
    h.set("n", n);
    h.set("qmin", qmin);
    h.set("qmax", qmax);
    h.set("powers", powers);
    h.set("tolerance", tol);
    out.header(&h);
    let mut fields = Vec::new();
    for q in qmin.max(2)..=qmax {
        let factors = rigidsum::ff::prime_factors(q as u64);
        if factors.len() != 1 || (!powers && !is_prime(q as u64)) {
            continue;
        }
        let p = factors[0];
        let k = (1..).find(|&k| p.pow(k) == q as u64).expect("prime power");
        fields.push(Field::new(p, k).map_err(usage)?);
    }
    let report = weil_scan(&fields, n, tol).map_err(usage)?;
    for row in &report.rows {
        out.record(serde_json::to_value(row).expect("serializable"), || {
            format!(
                "q={:<5} bound={:<12.4} max|Kl|={:<12.4} ratio={:.6}{}",
                row.q,
                row.bound,
                row.max_abs,
                row.max_ratio,
                if row.violations.is_empty() { "" } else { "  VIOLATED" }
            )
        });
    }
    match report.rows.iter().find(|r| !r.violations.is_empty()) {
        Some(r) => Err(Failure::Check(format!("q={} n={n} x={}", r.q, r.violations[0]))),
        None => Ok(()),
    }
}

fn cmd_suite(out: &mut Emitter, opts: &SuiteOptions, only: Option<&str>) -> Outcome {
    let ids: Vec<u32> = match only {
        Some(list) => parse_index_list(list)
            .map_err(usage)?
            .into_iter()
            .map(|i| u32::try_from(i).map_err(|_| usage(format!("no criterion {i}"))))
            .collect::<Result<_, _>>()?,
        None => CRITERIA.iter().map(|(i, _)| *i).collect(),
    };
    if let Some(i) = ids.iter().find(|i| !CRITERIA.iter().any(|(c, _)| c == *i)) {
        return Err(usage(format!("no criterion {i}")));
    }
    let mut h = Header::new("suite");
    h.set("qmax", opts.qmax);
    h.set("seed", opts.seed);
    h.set("cases", opts.cases);
    h.set("tolerance", opts.tolerance);
    h.set("weil-pmax", opts.weil_pmax);
    h.set("criteria", ids.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
    out.header(&h);
    let mut failed = Vec::new();
    for id in ids {
        let report = run_criterion(id, opts);
        out.record(serde_json::to_value(&report).expect("serializable"), || report.line());
        if !report.passed {
            failed.push(format!(
                "criterion {} ({}): {}",
                report.id,
                report.name,
                report.counterexample.clone().unwrap_or_default()
            ));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join("; ")))
    }
}
