use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use jellyfish::class_numbers::{self, hurwitz_h, hurwitz_h_formula};
use jellyfish::hypergeometric::{self, CharacterTable};
use jellyfish::legendre::{self, annotate_swarm, LegendreCurve};
use jellyfish::real_agm;
use jellyfish::swarm::{self, export, AdmissiblePair, MAX_SWARM_ORDER};
use jellyfish::{arith, Field, FieldElement, Swarm};

#[derive(Parser)]
#[command(name = "jellyfish", version, about = "AGM swarms over finite fields and the curves they organize")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field order q = p^m with q = 3 (mod 4).
    #[arg(long, conflicts_with_all = ["p", "m"])]
    q: Option<u64>,
    #[arg(long, requires = "m")]
    p: Option<u32>,
    #[arg(long, requires = "p")]
    m: Option<u32>,
}

impl FieldArgs {
    fn field(&self) -> Result<Field> {
        let field = match (self.q, self.p, self.m) {
            (Some(q), _, _) => Field::from_order(q)?,
            (None, Some(p), Some(m)) => Field::new(p, m)?,
            _ => bail!("select a field with --q, or with --p and --m"),
        };
        Ok(field)
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Node count, d(F_q), size histogram and, for p >= 7, curve data per jellyfish.
    Swarm {
        #[command(flatten)]
        field: FieldArgs,
        /// Print every jellyfish even when there are many.
        #[arg(long)]
        full: bool,
        /// Number of jellyfish listed without --full.
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// d(F_q) for every prime q = 3 (mod 4) up to the limit.
    Table {
        #[arg(long, default_value_t = 283)]
        limit: u64,
    },
    /// The AGM orbit of (a, b), given as integer encodings.
    Orbit {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
    /// Write the swarm as DOT or JSON.
    Export {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point count, group, j-invariant and 2-torsion data of E_lambda, or of
    /// the curve attached to the node (a, b).
    Curves {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: Option<u64>,
        #[arg(long, requires = "b")]
        a: Option<u64>,
        #[arg(long, requires = "a")]
        b: Option<u64>,
    },
    /// Compare H((4q - s^2)/4) with the number of j-invariants in each trace family.
    Schoof {
        #[command(flatten)]
        field: FieldArgs,
        /// Restrict to one trace.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<i64>,
    },
    /// Hurwitz class number H(N) as an exact rational.
    Hurwitz {
        #[arg(long = "N")]
        n: u64,
        /// Also show the reduced forms and the conductor formula.
        #[arg(long)]
        full: bool,
    },
    /// The character sum, Greene's 2F1 and the implied point count of E_lambda.
    Hyper {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: u64,
        /// Also evaluate the full character-sum definition.
        #[arg(long)]
        full: bool,
    },
    /// Euler's approximations p_1..p_n from the AGM of (sqrt 2, 1).
    Pi {
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, default_value_t = 40)]
        digits: u32,
    },
}

/// Text to print and whether every check it reports passed.
struct Outcome {
    text: String,
    ok: bool,
}

fn header(field: &Field) -> String {
    format!("# F_{} p={} m={} modulus {:?}\n", field.q(), field.p(), field.m(), field.modulus())
}

fn element(field: &Field, enc: u64, name: &str) -> Result<FieldElement> {
    field.elem(enc).with_context(|| format!("--{name} {enc} is not an element of F_{}", field.q()))
}

fn cmd_swarm(args: &FieldArgs, full: bool, limit: usize) -> Result<Outcome> {
    let field = args.field()?;
    let mut swarm = Swarm::build(&field)?;
    let mut out = header(&field);
    let stats = swarm.stats();
    writeln!(out, "nodes={} d={}", stats.node_count, stats.d)?;
    let hist: Vec<String> = stats.histogram.iter().map(|(n, c)| format!("{n}x{c}")).collect();
    writeln!(out, "sizes {}", hist.join(" "))?;
    if let Some(max) = stats.max_size {
        writeln!(out, "max_size={max}")?;
    }
    let verdict = swarm.verify_structure();
    writeln!(out, "structure {}", if verdict.is_ok() { "OK" } else { "FAIL" })?;
    if let Err(e) = &verdict {
        writeln!(out, "  {e}")?;
    }
    let mut ok = verdict.is_ok();
    if field.p() >= 7 && swarm.node_count() > 0 {
        match annotate_swarm(&mut swarm) {
            Ok(()) => {
                let shown = if full { swarm.d() } else { limit.min(swarm.d()) };
                for jf in &swarm.jellyfish()[..shown] {
                    let ann = jf.annotation.as_ref().expect("annotated");
                    let first = swarm.pair(jf.cycle[0]);
                    let mut js: Vec<u32> = ann.curves.iter().map(|c| c.j.encoding()).collect();
                    js.sort_unstable();
                    js.dedup();
                    writeln!(
                        out,
                        "jellyfish {} nodes={} cycle={} head={} trace={} group=Z/{}xZ/{} j={:?}",
                        jf.id,
                        jf.size(),
                        jf.cycle.len(),
                        first,
                        ann.trace,
                        ann.group.n1,
                        ann.group.n2,
                        js
                    )?;
                }
                if shown < swarm.d() {
                    writeln!(out, "... {} more (use --full)", swarm.d() - shown)?;
                }
            }
            Err(e) => {
                writeln!(out, "curves FAIL {e}")?;
                ok = false;
            }
        }
    }
    Ok(Outcome { text: out, ok })
}

fn cmd_table(limit: u64) -> Result<Outcome> {
    if limit > MAX_SWARM_ORDER as u64 {
        bail!("--limit {limit} exceeds {MAX_SWARM_ORDER}");
    }
    let mut out = String::from("q d\n");
    for q in (3..=limit).filter(|&q| q % 4 == 3 && arith::is_prime(q)) {
        let d = Swarm::build(&Field::from_order(q)?)?.d();
        writeln!(out, "{q} {d}")?;
    }
    Ok(Outcome { text: out, ok: true })
}

fn cmd_orbit(args: &FieldArgs, a: u64, b: u64) -> Result<Outcome> {
    let field = args.field()?;
    let start = AdmissiblePair::new(&field, element(&field, a, "a")?, element(&field, b, "b")?)?;
    let orbit = swarm::orbit(&field, start);
    let mut out = header(&field);
    let list = |pairs: &[AdmissiblePair]| pairs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "preperiod={} cycle={}", orbit.preperiod.len(), orbit.cycle.len())?;
    if !orbit.preperiod.is_empty() {
        writeln!(out, "tail {}", list(&orbit.preperiod))?;
    }
    writeln!(out, "cycle {}", list(&orbit.cycle))?;
    Ok(Outcome { text: out, ok: true })
}

fn cmd_export(args: &FieldArgs, format: Format, path: Option<&PathBuf>) -> Result<Outcome> {
    let field = args.field()?;
    let mut swarm = Swarm::build(&field)?;
    let body = match format {
        Format::Dot => export::to_dot(&swarm),
        Format::Json => {
            if field.p() >= 7 {
                annotate_swarm(&mut swarm)?;
            }
            let mut s = serde_json::to_string_pretty(&export::to_json(&swarm))?;
            s.push('\n');
            s
        }
    };
    match path {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            Ok(Outcome { text: format!("{}wrote {}\n", header(&field), path.display()), ok: true })
        }
        None => Ok(Outcome { text: body, ok: true }),
    }
}

fn describe_curve(out: &mut String, curve: &LegendreCurve) -> Result<bool> {
    let by_sum = curve.point_count();
    let group = curve.group_structure()?;
    writeln!(out, "lambda={} j={}", curve.lambda(), curve.j_invariant())?;
    writeln!(out, "N={} trace={} group=Z/{}xZ/{}", group.order, group.trace, group.n1, group.n2)?;
    let field = curve.field();
    let mut ok = by_sum == group.order;
    if field.phi(curve.lambda()) == 1 {
        match curve.two_sylow_shape() {
            Ok((s1, s2)) => writeln!(out, "2-sylow=Z/{s1}xZ/{s2}")?,
            Err(e) => {
                writeln!(out, "2-sylow FAIL {e}")?;
                ok = false;
            }
        }
    }
    let halvable: Vec<String> = [field.zero(), field.one(), curve.lambda()]
        .iter()
        .filter(|&&x| curve.halvable(jellyfish::CurvePoint::Affine { x, y: field.zero() }))
        .map(|x| format!("({x}, 0)"))
        .collect();
    writeln!(out, "halvable 2-torsion: {}", if halvable.is_empty() { "none".into() } else { halvable.join(" ") })?;
    Ok(ok)
}

fn cmd_curves(args: &FieldArgs, lambda: Option<u64>, a: Option<u64>, b: Option<u64>) -> Result<Outcome> {
    let field = args.field()?;
    let mut out = header(&field);
    let mut ok = true;
    match (lambda, a, b) {
        (Some(l), None, None) => {
            let curve = LegendreCurve::new(&field, element(&field, l, "lambda")?)?;
            ok &= describe_curve(&mut out, &curve)?;
        }
        (None, Some(a), Some(b)) => {
            let pair = AdmissiblePair::new(&field, element(&field, a, "a")?, element(&field, b, "b")?)?;
            let next = swarm::agm_step(&field, pair);
            writeln!(out, "node {pair} -> {next}")?;
            ok &= describe_curve(&mut out, &legendre::psi(&field, pair)?)?;
            writeln!(out, "2-isogeny codomain:")?;
            ok &= describe_curve(&mut out, &legendre::isogeny_codomain(&field, pair)?)?;
        }
        (None, None, None) => {
            writeln!(out, "lambda j N trace n1 n2")?;
            for l in field.elements().skip(2) {
                let s = LegendreCurve::new(&field, l)?.summary()?;
                writeln!(out, "{} {} {} {} {} {}", s.lambda, s.j, s.n, s.trace, s.n1, s.n2)?;
            }
        }
        _ => bail!("give either --lambda or both --a and --b"),
    }
    Ok(Outcome { text: out, ok })
}

fn cmd_schoof(args: &FieldArgs, only: Option<i64>) -> Result<Outcome> {
    let field = args.field()?;
    let mut swarm = Swarm::build(&field)?;
    annotate_swarm(&mut swarm)?;
    let mut report = class_numbers::verify_schoof_identity_on(&swarm)?;
    if let Some(s) = only {
        if !class_numbers::valid_traces(field.q() as u64).contains(&s) {
            bail!("s = {s} is not a nonzero trace with s^2 <= 4q and s = q + 1 (mod 8)");
        }
        report.rows.retain(|r| r.s == s);
    }
    let mut out = header(&field);
    if report.skipped_zero {
        writeln!(out, "# s = 0 skipped")?;
    }
    for r in &report.rows {
        writeln!(out, "{}, {}, {}, {}, {}", r.s, r.n, r.h, r.m, if r.ok { "OK" } else { "FAIL" })?;
    }
    if report.rows.is_empty() {
        writeln!(out, "# no valid traces")?;
    }
    Ok(Outcome { text: out, ok: report.passed() })
}

fn cmd_hurwitz(n: u64, full: bool) -> Result<Outcome> {
    let forms = hurwitz_h(n)?;
    let formula = hurwitz_h_formula(n)?;
    let mut out = format!("{forms}\n");
    if full {
        let f = class_numbers::factor_discriminant(n)?;
        writeln!(out, "-{n} = {} * {}^2, w = {}", f.d, f.f, f.w)?;
        for form in class_numbers::reduced_forms(-(n as i64), false)? {
            writeln!(out, "form {form}")?;
        }
        writeln!(out, "formula {formula}")?;
    }
    let ok = forms == formula;
    if !ok {
        writeln!(out, "FAIL conductor formula gives {formula}")?;
    }
    Ok(Outcome { text: out, ok })
}

fn cmd_hyper(args: &FieldArgs, lambda: u64, full: bool) -> Result<Outcome> {
    let field = args.field()?;
    let lam = element(&field, lambda, "lambda")?;
    let value = hypergeometric::greene_2f1_phi(&field, lam);
    let phi_m1 = field.phi(field.neg(field.one())) as i64;
    let q = field.q() as i64;
    let implied = q + 1 + phi_m1 * value.num;
    let mut out = header(&field);
    writeln!(out, "S={}", value.s)?;
    writeln!(out, "2F1={value}")?;
    writeln!(out, "N={implied}")?;
    let mut ok = true;
    if lam != field.zero() && lam != field.one() && field.p() >= 7 {
        let counted = LegendreCurve::new(&field, lam)?.point_count_enumerated() as i64;
        ok &= counted == implied;
        writeln!(out, "enumerated={counted} {}", if ok { "OK" } else { "FAIL" })?;
    }
    if full {
        let table = CharacterTable::new(&field);
        let v = table.greene_2f1_full(table.phi(), table.phi(), table.trivial(), lam);
        let dev = (v - Complex64::new(value.value(), 0.0)).norm();
        let im = if v.im.abs() < 1e-12 { 0.0 } else { v.im };
        writeln!(out, "full={:.12}{:+.12}i deviation={dev:.3e}", v.re, im)?;
        // the character-sum definition vanishes identically at 0
        if !lam.is_zero() {
            ok &= dev < hypergeometric::TOLERANCE;
        }
    }
    Ok(Outcome { text: out, ok })
}

fn cmd_pi(steps: usize, digits: u32) -> Result<Outcome> {
    let mut out = String::new();
    for n in 1..=steps {
        writeln!(out, "{}", real_agm::euler_pi(n, digits)?.to_decimal(digits))?;
    }
    Ok(Outcome { text: out, ok: true })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Swarm { field, full, limit } => cmd_swarm(field, *full, *limit),
        Command::Table { limit } => cmd_table(*limit),
        Command::Orbit { field, a, b } => cmd_orbit(field, *a, *b),
        Command::Export { field, format, out } => cmd_export(field, *format, out.as_ref()),
        Command::Curves { field, lambda, a, b } => cmd_curves(field, *lambda, *a, *b),
        Command::Schoof { field, s } => cmd_schoof(field, *s),
        Command::Hurwitz { n, full } => cmd_hurwitz(*n, *full),
        Command::Hyper { field, lambda, full } => cmd_hyper(field, *lambda, *full),
        Command::Pi { steps, digits } => cmd_pi(*steps, *digits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
