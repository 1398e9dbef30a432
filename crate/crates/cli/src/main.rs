use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crystalcone::cartan::{build_cartan, AdaptedSeq, LieType, SUPPORTED_TAGS};
use crystalcone::moncrys::{self, gen_crystal, LaurentMonomial};
use crystalcone::rank2::{self, Rank2Data};
use crystalcone::tableaux::{enumerate_tab, tableau_form, BoxType, Letter, Tableau};
use crystalcone::verify::{self, build_ineq_system, conjecture_check, image_levels, simplify, VerifyResult};
use crystalcone::zcrystal::{self, enumerate_image, ZSeq};

/// Monomial crystals, polyhedral realizations of B(∞) and their comparison.
#[derive(Parser, Debug)]
#[command(name = "crystalcone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate M_{s,k} from the seed X_{s,k}.
    Crystal(CrystalArgs),
    /// Tropicalized inequality system of the Langlands dual monomial crystals.
    Ineq(IneqArgs),
    /// Layers of the image of B(∞) in Z^∞.
    Binf(BinfArgs),
    /// Column tableaux of the boxes X^L and their linear forms.
    Tableaux(TableauxArgs),
    /// Weyl-orbit coefficients and Ξ_{s,i} for rank-2 types.
    Rank2(Rank2Args),
    /// Compare the inequality-defined set with the image of B(∞).
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Debug)]
struct Common {
    /// Type tag, e.g. A2, C3, D4, rank2:2,2, A1^1, A^1:3, D^2:3.
    #[arg(long = "type")]
    ty: String,
    /// `default`, or p bits overriding the default as "p:i,j=b;i,j=b".
    #[arg(long, default_value = "default")]
    iota: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrystalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    s: i64,
    /// BFS depth; finite types run to completion when omitted, others stop at 8.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct IneqArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    s_max: usize,
    /// Crystal depth; finite types run to completion when omitted, others stop at 8.
    #[arg(long)]
    depth: Option<usize>,
    /// Levels kept by --simplify (default s_max); coordinates above it are set to zero.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    simplify: bool,
}

#[derive(Args, Debug)]
struct BinfArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 6)]
    depth: usize,
}

#[derive(Args, Debug)]
struct TableauxArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    s: i64,
    /// Render barred letters with a combining overline instead of "~".
    #[arg(long)]
    unicode: bool,
}

#[derive(Args, Debug)]
struct Rank2Args {
    #[command(flatten)]
    common: Common,
    /// Color i of Ξ_{s,i}.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Largest m in the two families.
    #[arg(long, default_value_t = 3)]
    m_max: usize,
    /// Crystal depth used by --check-theorem-prev.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long)]
    check_theorem_prev: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Image depth.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Inequality crystal depth; full for finite types, twice the image depth otherwise.
    #[arg(long)]
    ineq_depth: Option<usize>,
    /// Window in levels; defaults to the levels spanned by the image.
    #[arg(long, alias = "window")]
    s_max: Option<usize>,
    /// Also compare Ξ′⁺ with Ξ′ for s ≤ s_max and every k.
    #[arg(long)]
    check_mainassump: bool,
    /// Rank-2 only: certify the distinguished monomials for both colors.
    #[arg(long)]
    check_theorem_prev: bool,
    /// Sample nodes of the image and of the monomial crystals and check the crystal axioms.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_type(tag: &str) -> Result<LieType> {
    tag.parse::<LieType>().map_err(|e| match e {
        crystalcone::Error::InvalidType(msg) if msg.contains("supported") => anyhow!("{msg}"),
        other => anyhow!("{other}; supported: {SUPPORTED_TAGS}"),
    })
}

fn parse_iota(cartan: crystalcone::cartan::CartanData, spec: &str) -> Result<AdaptedSeq> {
    let spec = spec.trim();
    if spec == "default" {
        return Ok(AdaptedSeq::default_for(cartan));
    }
    let body = spec.strip_prefix("p:").ok_or_else(|| anyhow!("--iota must be `default` or `p:i,j=b;…`"))?;
    let mut bits = Vec::new();
    for item in body.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (pair, b) = item.split_once('=').ok_or_else(|| anyhow!("bad iota entry {item:?}"))?;
        let (i, j) = pair.split_once(',').ok_or_else(|| anyhow!("bad iota entry {item:?}"))?;
        let (i, j, b): (usize, usize, u8) = (
            i.trim().parse().with_context(|| format!("bad index in {item:?}"))?,
            j.trim().parse().with_context(|| format!("bad index in {item:?}"))?,
            b.trim().parse().with_context(|| format!("bad bit in {item:?}"))?,
        );
        let colors = 1..=cartan.rank();
        if i == j || !colors.contains(&i) || !colors.contains(&j) || cartan.a(i, j) == 0 {
            bail!("p_{{{i},{j}}} is not an edge of the Dynkin diagram");
        }
        bits.push((i, j, b));
    }
    Ok(AdaptedSeq::with_overrides(cartan, bits)?)
}

fn setup(common: &Common) -> Result<(LieType, AdaptedSeq)> {
    let ty = parse_type(&common.ty)?;
    let seq = parse_iota(build_cartan(ty)?, &common.iota)?;
    Ok((ty, seq))
}

fn check_color(seq: &AdaptedSeq, k: usize) -> Result<()> {
    if !(1..=seq.rank()).contains(&k) {
        bail!("--k {k} outside 1..={}", seq.rank());
    }
    Ok(())
}

fn check_format(format: Format, allowed: &[Format]) -> Result<()> {
    if !allowed.contains(&format) {
        bail!("format {format:?} not available for this command");
    }
    Ok(())
}

fn default_depth(ty: LieType, depth: Option<usize>) -> usize {
    depth.unwrap_or(if ty.is_finite() { usize::MAX } else { 8 })
}

fn pretty_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_crystal(a: &CrystalArgs) -> Result<String> {
    let (ty, seq) = setup(&a.common)?;
    check_color(&seq, a.k)?;
    let m = gen_crystal(&seq, a.s, a.k, default_depth(ty, a.depth));
    Ok(match a.common.format {
        Format::Dot => m.to_dot(),
        Format::Json => pretty_json(&m.to_json())?,
        Format::Text => render_crystal(&m),
    })
}

/// One line per node: id, depth, monomial, outgoing edges as color->id.
fn render_crystal(m: &moncrys::MonomialCrystal) -> String {
    let mut out = String::new();
    for (idx, x) in m.nodes.iter().enumerate() {
        let edges: Vec<String> = m.edges.iter().filter(|e| e.0 == idx).map(|&(_, i, b)| format!("{i}->{b}")).collect();
        let edges = if edges.is_empty() { "-".to_string() } else { edges.join(" ") };
        let _ = writeln!(out, "{idx}\t{}\t{x}\t{edges}", m.depth_of[idx]);
    }
    out
}

fn cmd_ineq(a: &IneqArgs) -> Result<String> {
    check_format(a.common.format, &[Format::Text, Format::Json])?;
    let (ty, seq) = setup(&a.common)?;
    let depth = a.depth.or((!ty.is_finite()).then_some(8));
    let window = a.window.or(a.simplify.then_some(a.s_max));
    let system = build_ineq_system(&seq, a.s_max, depth, window)?;
    if a.simplify {
        let reduced = simplify(&system);
        return Ok(match a.common.format {
            Format::Json => pretty_json(&reduced)?,
            _ => reduced.render_text(),
        });
    }
    Ok(match a.common.format {
        Format::Json => pretty_json(&system.to_json())?,
        _ => system.render_text(),
    })
}

fn cmd_binf(a: &BinfArgs) -> Result<String> {
    check_format(a.common.format, &[Format::Text, Format::Json])?;
    let (ty, seq) = setup(&a.common)?;
    let layers = enumerate_image(&seq, a.depth);
    if a.common.format == Format::Json {
        return pretty_json(&json!({"type": ty, "depth": a.depth, "layers": layers}));
    }
    let mut out = String::new();
    for (d, layer) in layers.iter().enumerate() {
        let items: Vec<String> = layer.iter().map(ZSeq::pretty).collect();
        let _ = writeln!(out, "layer {d} ({}): {}", layer.len(), items.join(" "));
    }
    Ok(out)
}

fn overline(t: &Tableau) -> String {
    let body: Vec<String> = t
        .col
        .iter()
        .map(|l| match l {
            Letter::Bar(j) => j.to_string().chars().flat_map(|c| [c, '\u{0305}']).collect(),
            other => other.to_string(),
        })
        .collect();
    format!("[{}]^{}_{}", body.join(","), t.boxtype, t.s)
}

fn cmd_tableaux(a: &TableauxArgs) -> Result<String> {
    check_format(a.common.format, &[Format::Text, Format::Json])?;
    let (ty, seq) = setup(&a.common)?;
    check_color(&seq, a.k)?;
    let bt = BoxType::for_type(ty).ok_or_else(|| anyhow!("tableaux need a finite classical type, got {ty}"))?;
    let tabs = enumerate_tab(&seq, bt, a.k, a.s)?;
    let rows: Vec<(Tableau, String)> =
        tabs.into_iter().map(|t| Ok((t.clone(), tableau_form(&seq, &t)?.to_string()))).collect::<Result<_>>()?;
    if a.common.format == Format::Json {
        let items: Vec<_> = rows
            .iter()
            .map(|(t, f)| {
                Ok(json!({"tableau": t, "text": t.to_string(), "form": tableau_form(&seq, t)?, "form_text": f}))
            })
            .collect::<Result<_>>()?;
        return pretty_json(&json!({"type": ty, "boxtype": bt, "k": a.k, "s": a.s, "tableaux": items}));
    }
    let mut out = String::new();
    for (t, f) in &rows {
        let name = if a.unicode { overline(t) } else { t.to_string() };
        let _ = writeln!(out, "{name}\t{f}");
    }
    Ok(out)
}

fn rank2_data(ty: LieType) -> Result<Rank2Data> {
    match ty {
        LieType::Rank2 { a, b } => Ok(Rank2Data::new(a, b)?),
        LieType::A11 => Ok(Rank2Data::new(2, 2)?),
        other => bail!("rank2 needs a rank2:a,b or A1^1 type, got {other}"),
    }
}

fn cmd_rank2(a: &Rank2Args) -> Result<(String, u8)> {
    check_format(a.common.format, &[Format::Text, Format::Json])?;
    if a.common.iota != "default" {
        bail!("rank2 uses the default sequence (…,2,1,2,1)");
    }
    let data = rank2_data(parse_type(&a.common.ty)?)?;
    if !(1..=2).contains(&a.k) {
        bail!("--k must be 1 or 2");
    }
    let m_cap = data.order().map_or(a.m_max, |n| a.m_max.min((n - 1) / 2));
    let p = rank2::weyl_orbit_coeffs(data, a.k, m_cap)?;
    let xi = rank2::xi_rank2(data, a.s, a.k, m_cap)?;
    let prev =
        if a.check_theorem_prev { Some(rank2::theorem_prev_check(data, a.s as i64, a.k, a.depth)?) } else { None };
    let code = if prev.as_ref().is_some_and(|r| !r.passed()) { 3 } else { 0 };
    if a.common.format == Format::Json {
        let body = pretty_json(&json!({"a": data.a, "b": data.b, "coeffs": p, "xi": xi, "theorem_prev": prev}))?;
        return Ok((body, code));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# rank2:{},{} i={} s={}", data.a, data.b, a.k, a.s);
    for m in 0..p.even.len() {
        let (pi, pj) = p.even[m];
        let odd = p.odd.get(m).map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(out, "m={m} P_i={pi} P_i'={pj} odd={odd}");
    }
    for f in &xi {
        let _ = writeln!(out, "{f}");
    }
    if let Some(r) = prev {
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(
            out,
            "theorem-prev {verdict}: depth {}, certified {}, fractional {}",
            r.depth, r.certified, r.fractional
        );
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    Ok((out, code))
}

/// Counts and failures of the sampled axiom check.
fn sample_axioms(
    seq: &AdaptedSeq,
    image: &[BTreeSet<ZSeq>],
    s_max: usize,
    depth: usize,
    seed: u64,
) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<&ZSeq> = image.iter().flatten().collect();
    let mut ms: Vec<LaurentMonomial> = Vec::new();
    for s in 1..=s_max {
        for k in 1..=seq.rank() {
            ms.extend(gen_crystal(seq, s as i64, k, depth.min(8)).nodes);
        }
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for a in zs.choose_multiple(&mut rng, 250) {
        failures.extend(zcrystal::axiom_violations(seq, a));
        checked += 1;
    }
    for x in ms.choose_multiple(&mut rng, 250) {
        failures.extend(moncrys::axiom_violations(seq, x));
        checked += 1;
    }
    (checked, failures)
}

fn cmd_verify(a: &VerifyArgs) -> Result<(String, u8)> {
    check_format(a.common.format, &[Format::Text, Format::Json])?;
    let (ty, seq) = setup(&a.common)?;
    let s_max = a.s_max.unwrap_or_else(|| image_levels(&seq, a.depth).max(1));
    let ineq_depth = a.ineq_depth.or((!ty.is_finite()).then_some(2 * a.depth));
    let report = conjecture_check(&seq, s_max, ineq_depth, a.depth)?;
    let mut code = report.result.exit_code() as u8;
    let mut extra_fail = false;

    let mainassump: Vec<verify::MainAssumpReport> = if a.check_mainassump {
        let depth = ineq_depth.unwrap_or(usize::MAX);
        (1..=s_max)
            .flat_map(|s| (1..=seq.rank()).map(move |k| (s, k)))
            .map(|(s, k)| verify::check_mainassump(&seq, s, k, depth))
            .collect()
    } else {
        vec![]
    };
    extra_fail |= mainassump.iter().any(|r| !r.equal);

    let prev = if a.check_theorem_prev {
        let data = rank2_data(ty)?;
        let depth = ineq_depth.unwrap_or(2 * a.depth);
        (1..=2).map(|i| rank2::theorem_prev_check(data, 1, i, depth)).collect::<crystalcone::Result<Vec<_>>>()?
    } else {
        vec![]
    };
    extra_fail |= prev.iter().any(|r| !r.passed());

    let axioms = a.seed.map(|seed| {
        let image = enumerate_image(&seq, a.depth);
        (seed, sample_axioms(&seq, &image, s_max, ineq_depth.unwrap_or(8), seed))
    });
    extra_fail |= axioms.as_ref().is_some_and(|(_, (_, f))| !f.is_empty());
    if extra_fail && report.result != VerifyResult::Mismatch {
        code = VerifyResult::Mismatch.exit_code() as u8;
    }

    if a.common.format == Format::Json {
        let axioms_json = axioms.as_ref().map(|(seed, (n, f))| json!({"seed": seed, "checked": n, "failures": f}));
        let body = if a.check_mainassump || a.check_theorem_prev || a.seed.is_some() {
            pretty_json(&json!({
                "report": report,
                "mainassump": mainassump,
                "theorem_prev": prev,
                "axioms": axioms_json,
            }))?
        } else {
            pretty_json(&report)?
        };
        return Ok((body, code));
    }
    let mut out = report.render_text();
    for r in &mainassump {
        let _ = writeln!(
            out,
            "mainassump s={} k={}: {} (|Xi'| {}, |Xi'+| {}, closed {})",
            r.s,
            r.k,
            if r.equal { "equal" } else { "DIFFER" },
            r.sprime,
            r.positive_only,
            r.closed
        );
    }
    for r in &prev {
        let _ = writeln!(
            out,
            "theorem-prev i={}: {} (certified {}, fractional {})",
            r.i,
            if r.passed() { "pass" } else { "FAIL" },
            r.certified,
            r.fractional
        );
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    if let Some((seed, (n, f))) = &axioms {
        let _ = writeln!(out, "axioms (seed {seed}): {n} nodes, {} failures", f.len());
        for line in f.iter().take(10) {
            let _ = writeln!(out, "  {line}");
        }
    }
    Ok((out, code))
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (common, body, code) = match &cli.command {
        Command::Crystal(a) => (&a.common, cmd_crystal(a)?, 0),
        Command::Ineq(a) => (&a.common, cmd_ineq(a)?, 0),
        Command::Binf(a) => (&a.common, cmd_binf(a)?, 0),
        Command::Tableaux(a) => (&a.common, cmd_tableaux(a)?, 0),
        Command::Rank2(a) => {
            let (body, code) = cmd_rank2(a)?;
            (&a.common, body, code)
        }
        Command::Verify(a) => {
            let (body, code) = cmd_verify(a)?;
            (&a.common, body, code)
        }
    };
    emit(common, &body)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
