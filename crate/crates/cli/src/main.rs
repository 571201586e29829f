use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cubicfour::cubicdomain::{MonomialSet, Signature};
use cubicfour::diaggroup;
use cubicfour::enumerator::{self, ClassificationEntry, ClassifyConfig, Rejection, TheoremCheck};
use cubicfour::lattice::{canonical_group, AbelianGroupStructure};
use cubicfour::pauli::{self, CaseFamily, CaseReport, InvariantFamily, NegativeReport};
use cubicfour::smoothcert::{self, SmoothStatus, SmoothnessVerdict};
use cubicfour::Mode;

#[derive(Parser, Debug)]
#[command(name = "cubicfour", version, about = "Automorphism groups of smooth cubic fourfolds")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Comma-separated primes used for smoothness certification.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Diagonal symmetry group and closure of a monomial set.
    Group {
        /// Comma-separated monomials, e.g. "x0^3, x1^2*x2".
        set: String,
    },
    /// Closure of a monomial set under its diagonal symmetry group.
    Closure { set: String },
    /// Certify smoothness of the cubic forms in a file (one per line, `#` comments).
    Smooth { file: PathBuf },
    /// Enumerate admissible supports and classify their groups.
    Enumerate {
        /// Maximum monomials added to a skeleton during completion.
        #[arg(long, default_value_t = 4, conflicts_with = "unbounded")]
        max_added: usize,
        /// Complete without a depth limit.
        #[arg(long)]
        unbounded: bool,
        /// Write the classification here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a classification against the reference list of maximal groups.
    Theorem {
        /// Classification JSON from `enumerate --json` ("-" for stdin).
        file: PathBuf,
    },
    /// Invariant cubics of monomial-matrix groups; verifies the tabulated cases.
    Pauli {
        /// Case family (A1 A2 A3 B1 B2 B3 C D) or "all".
        #[arg(required_unless_present = "gens")]
        selector: Option<String>,
        /// Analyse a custom group instead, e.g. "P6*W6, W6^2".
        #[arg(long, conflicts_with = "selector")]
        gens: Option<String>,
        /// Largest root order in the D3 (x) P2 negative check.
        #[arg(long, default_value_t = 6)]
        max_d: u64,
    },
}

/// Resolved settings shared by every subcommand.
#[derive(Clone, Debug)]
struct RunConfig {
    primes: Option<Vec<u64>>,
    seed: u64,
    json: bool,
    jobs: Option<usize>,
    mode: Mode,
}

impl From<&GlobalOpts> for RunConfig {
    fn from(g: &GlobalOpts) -> Self {
        RunConfig {
            primes: g.primes.clone(),
            seed: g.seed,
            json: g.json,
            jobs: g.jobs,
            mode: if g.sequential { Mode::Sequential } else { Mode::Parallel },
        }
    }
}

/// Bad input rather than a failed check; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl fmt::Display) -> anyhow::Error {
    UsageError(msg.to_string()).into()
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig::from(&cli.global);
    let jobs = cfg.jobs;
    match cubicfour::par::with_threads(jobs, move || run(cli.command, &cfg)) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Group { set } => cmd_group(&set, cfg),
        Command::Closure { set } => cmd_closure(&set, cfg),
        Command::Smooth { file } => cmd_smooth(&file, cfg),
        Command::Enumerate { max_added, unbounded, output } => {
            cmd_enumerate((!unbounded).then_some(max_added), output.as_deref(), cfg)
        }
        Command::Theorem { file } => cmd_theorem(&file, cfg),
        Command::Pauli { selector, gens, max_d } => match gens {
            Some(g) => cmd_pauli_gens(&g, cfg),
            None => cmd_pauli(selector.as_deref().unwrap_or("all"), max_d, cfg),
        },
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn parse_set(text: &str) -> Result<MonomialSet> {
    text.parse::<MonomialSet>().map_err(|e| usage(format!("invalid monomial set: {e}")))
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn render_signature(s: &Signature) -> String {
    let parts: Vec<String> = s
        .exponents
        .iter()
        .map(|&c| match c {
            0 => "1".to_string(),
            1 => "w".to_string(),
            c => format!("w^{c}"),
        })
        .collect();
    format!("({}), w = exp(2 pi i/{})", parts.join(", "), s.modulus)
}

#[derive(Serialize)]
struct GroupReport {
    set: MonomialSet,
    invariant_factors: Vec<u64>,
    free_rank: usize,
    order: Option<u64>,
    generators: Vec<Signature>,
    closure: MonomialSet,
}

fn cmd_group(text: &str, cfg: &RunConfig) -> Result<Outcome> {
    let set = parse_set(text)?;
    let g = diaggroup::symmetry_group(&set).map_err(usage)?;
    let report = GroupReport {
        set,
        invariant_factors: g.structure.invariant_factors.clone(),
        free_rank: g.structure.free_rank,
        order: g.order(),
        generators: g.generator_signatures.clone(),
        closure: g.closure(),
    };
    if cfg.json {
        emit_json(&report)?;
    } else {
        println!("set:      {}", report.set);
        println!("group:    {}", g.structure);
        if g.has_continuous_symmetry() {
            println!("          continuous symmetry: no member of the family is smooth");
        }
        for s in &report.generators {
            println!("  gen     {}", render_signature(s));
        }
        println!("closure:  {}", report.closure);
    }
    Ok(Outcome::Pass)
}

fn cmd_closure(text: &str, cfg: &RunConfig) -> Result<Outcome> {
    let set = parse_set(text)?;
    let closure = diaggroup::closure(&set).map_err(usage)?;
    let added: Vec<String> = closure.iter().filter(|m| !set.contains(m)).map(|m| m.to_string()).collect();
    if cfg.json {
        emit_json(&serde_json::json!({ "set": set, "closure": closure, "added": added }))?;
    } else {
        println!("{closure}");
        if !added.is_empty() {
            println!("added: {}", added.join(", "));
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct FormVerdict {
    line: usize,
    form: String,
    #[serde(flatten)]
    verdict: SmoothnessVerdict,
}

#[derive(Serialize)]
struct SmoothReport {
    forms: Vec<FormVerdict>,
    /// Forms not certified smooth.
    total_singular: usize,
}

fn cmd_smooth(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let text = read_input(path)?;
    let primes = cfg.primes.clone().unwrap_or_else(|| smoothcert::DEFAULT_PRIMES.to_vec());
    let mut jobs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f = smoothcert::parse_polynomial(line, 6)
            .map_err(|e| usage(format!("{}:{}: {e}", path.display(), k + 1)))?;
        jobs.push((k + 1, line.to_string(), f));
    }
    if jobs.is_empty() {
        eprintln!("warning: {} contains no forms", path.display());
    }
    let verdicts = cubicfour::par::map(cfg.mode, &jobs, |(_, _, f)| smoothcert::certify_over_q(f, &primes));
    let mut forms = Vec::new();
    for ((line, form, _), v) in jobs.into_iter().zip(verdicts) {
        let verdict = v.map_err(usage)?;
        forms.push(FormVerdict { line, form, verdict });
    }
    let total_singular = forms.iter().filter(|f| !f.verdict.is_certified()).count();
    let report = SmoothReport { forms, total_singular };
    if cfg.json {
        emit_json(&report)?;
    } else {
        for f in &report.forms {
            let status = match &f.verdict.status {
                SmoothStatus::CertifiedSmooth { prime } => format!("smooth (certified mod {prime})"),
                SmoothStatus::SingularModulo { primes } => format!("singular mod {primes:?}"),
                SmoothStatus::Inconclusive { primes } => format!("inconclusive at {primes:?}"),
            };
            print!("line {:>4}: {status}", f.line);
            if let Some(w) = &f.verdict.witness {
                print!("  witness {w:?}");
            }
            println!();
        }
        println!("TotalSing = {}", report.total_singular);
        if report.total_singular == 0 {
            println!("all forms smooth");
        }
    }
    Ok(if report.total_singular == 0 { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize, Deserialize)]
struct EnumerateConfig {
    max_added: Option<usize>,
    primes: Vec<u64>,
    seeds_per_prime: usize,
    seed: u64,
}

/// Document written by `enumerate --json` and read by `theorem`.
#[derive(Serialize, Deserialize)]
struct EnumerateReport {
    config: EnumerateConfig,
    admissible_sets: usize,
    entries: Vec<ClassificationEntry>,
    #[serde(default)]
    rejected: Vec<Rejection>,
    #[serde(default)]
    maximal_groups: Vec<AbelianGroupStructure>,
}

fn cmd_enumerate(max_added: Option<usize>, output: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    let mut config = ClassifyConfig { max_added, seed: cfg.seed, mode: cfg.mode, ..Default::default() };
    if let Some(p) = &cfg.primes {
        config.primes = p.clone();
    }
    let c = enumerator::classify(&config)?;
    let maximal_groups = enumerator::maximal_groups(&c.entries);
    let report = EnumerateReport {
        config: EnumerateConfig {
            max_added,
            primes: config.primes.clone(),
            seeds_per_prime: config.seeds_per_prime,
            seed: config.seed,
        },
        admissible_sets: c.admissible_sets,
        entries: c.entries,
        rejected: c.rejected,
        maximal_groups,
    };
    if let Some(path) = output {
        let mut s = serde_json::to_string_pretty(&report)?;
        s.push('\n');
        fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if cfg.json && output.is_none() {
        emit_json(&report)?;
    } else {
        println!("admissible sets: {}", report.admissible_sets);
        println!("families:        {} certified, {} rejected", report.entries.len(), report.rejected.len());
        println!("maximal groups:");
        for g in &report.maximal_groups {
            println!("  {g}");
        }
    }
    Ok(Outcome::Pass)
}

fn cmd_theorem(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let text = read_input(path)?;
    let report: EnumerateReport =
        serde_json::from_str(&text).map_err(|e| usage(format!("not a classification document: {e}")))?;
    let mut groups: Vec<AbelianGroupStructure> = report.entries.iter().map(|e| e.group.shape()).collect();
    groups.extend(report.maximal_groups.iter().map(|g| canonical_group(&g.invariant_factors)));
    let check: TheoremCheck = enumerator::check_against_reference(&groups, &enumerator::reference_groups());
    if cfg.json {
        emit_json(&serde_json::json!({ "passed": check.passed(), "check": check }))?;
    } else {
        for g in &check.not_embedding {
            println!("not embedding into any reference group: {g}");
        }
        for g in &check.missing {
            println!("reference group not realized as maximal: {g}");
        }
        println!("{} maximal groups computed", check.computed.len());
        println!("{}", if check.passed() { "PASS" } else { "FAIL" });
    }
    Ok(if check.passed() { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct PauliReport {
    cases: Vec<CaseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_pauli6: Option<NegativeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d3p2_surjective: Option<NegativeReport>,
    passed: bool,
}

fn cmd_pauli(selector: &str, max_d: u64, cfg: &RunConfig) -> Result<Outcome> {
    let family = if selector.trim().eq_ignore_ascii_case("all") {
        None
    } else {
        Some(selector.parse::<CaseFamily>().map_err(usage)?)
    };
    let cases = pauli::verify_cases(family, cfg.seed, cfg.mode)?;
    let (full, d3p2) = if family.is_none() {
        (
            Some(pauli::check_full_pauli6(cfg.seed)?),
            Some(pauli::check_d3p2_surjective(max_d, cfg.seed, cfg.mode)?),
        )
    } else {
        (None, None)
    };
    let passed = cases.iter().all(|c| c.passed)
        && full.as_ref().is_none_or(|r| r.passed() && r.families == 0)
        && d3p2.as_ref().is_none_or(NegativeReport::passed);
    let report = PauliReport { cases, full_pauli6: full, d3p2_surjective: d3p2, passed };
    if cfg.json {
        emit_json(&report)?;
    } else {
        for c in &report.cases {
            let cert = c.certified_at.map_or("no smooth member".to_string(), |p| format!("smooth mod {p}"));
            println!(
                "{:<12} {:<22} families {:>2} (anchored {})  {:<16} {}",
                c.label,
                c.computed.to_string(),
                c.families,
                c.anchored,
                cert,
                if c.passed { "PASS" } else { "FAIL" }
            );
            if !c.group_ok {
                println!("             expected {}", c.expected);
            }
        }
        if let Some(r) = &report.full_pauli6 {
            println!("full P6: {} invariant families  {}", r.families, verdict(r.passed() && r.families == 0));
        }
        if let Some(r) = &report.d3p2_surjective {
            println!(
                "D3 (x) P2 onto P2: {} groups, {} families, {} smooth  {}",
                r.groups,
                r.families,
                r.smooth_found.len(),
                verdict(r.passed())
            );
        }
        println!("{}", verdict(report.passed));
    }
    Ok(if report.passed { Outcome::Pass } else { Outcome::Fail })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct CustomGroupReport {
    generators: Vec<String>,
    group: AbelianGroupStructure,
    reduction: Option<String>,
    families: Vec<CustomFamily>,
}

#[derive(Serialize)]
struct CustomFamily {
    #[serde(flatten)]
    family: InvariantFamily,
    dimension: usize,
    certification: SmoothnessVerdict,
}

fn cmd_pauli_gens(text: &str, cfg: &RunConfig) -> Result<Outcome> {
    let gens = text
        .split(',')
        .map(|w| pauli::parse_word(w.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let group = pauli::projective_group(&gens).map_err(usage)?;
    let reduction = pauli::reduction_case(&gens).ok().map(|r| r.to_string());
    let fams = pauli::invariant_cubics(&gens)?;
    let certs = cubicfour::par::map(cfg.mode, &fams, |f| f.certify(3, 4, cfg.seed));
    let mut families = Vec::new();
    for (family, c) in fams.into_iter().zip(certs) {
        families.push(CustomFamily { dimension: family.dimension(), family, certification: c? });
    }
    let report = CustomGroupReport {
        generators: text.split(',').map(|w| w.trim().to_string()).collect(),
        group: group.structure.shape(),
        reduction,
        families,
    };
    if cfg.json {
        emit_json(&report)?;
    } else {
        println!("group:     {} (order {})", report.group, group.order());
        if let Some(r) = &report.reduction {
            println!("reduction: {r}");
        }
        println!("invariant families: {}", report.families.len());
        for f in &report.families {
            let cert = match &f.certification.status {
                SmoothStatus::CertifiedSmooth { prime } => format!("smooth mod {prime}"),
                _ => "no smooth member found".to_string(),
            };
            println!(
                "  characters {:?}/{}  dim {}  {}  support {}",
                f.family.characters,
                f.family.root,
                f.dimension,
                cert,
                f.family.support()
            );
        }
    }
    Ok(Outcome::Pass)
}
