//! Command-line front-end: load JSON-described obligation systems, check and
//! enumerate derived obligations, run the verification suite, and search for
//! counterexamples to registered claims.
//!
//! Exit codes: 0 = accepted / all claims as expected, 1 = rejected / claim
//! failure, 2 = usage, IO, or parse error.

use std::collections::BTreeSet;
use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::formula::{models_of, parse_formula};
use crate::lab::{evaluate_claim, registry, run_paper_suite, system_pool, SUITE_RANDOM_SYSTEMS};
use crate::metric::Variant;
use crate::model::{Model, ModelSet, Vocabulary};
use crate::obligations::{
    check_hard_obligation, check_soft_obligation, derive_obligations, in_d_o, is_classical_consequence,
    is_independent, is_ui, CheckOptions, ObligationSystem,
};
use crate::quality::{best_elements, QualityRelation};
use crate::size::SizeSpec;

// ---------------------------------------------------------------------------
// The on-disk system format
// ---------------------------------------------------------------------------

/// A set of models given either as a formula over the declared variables or
/// as an explicit list of bitstrings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelsSpec {
    Formula(String),
    Bitstrings(Vec<String>),
}

/// The quality order: `"set"` / `"count"` derive it from the obligation
/// profiles; `{"explicit": [...]}` lists strictly ordered layers of
/// bitstrings, best layer first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QualitySpec {
    Named(String),
    Explicit { explicit: Vec<Vec<String>> },
}

impl Default for QualitySpec {
    fn default() -> Self {
        QualitySpec::Named("set".to_string())
    }
}

/// An optional notion of small exception sets for soft checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeFileSpec {
    Epsilon { epsilon: f64 },
    Ideal { ideal: Vec<String> },
}

/// The JSON description of an obligation system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    /// Ordered variable names.
    pub variables: Vec<String>,
    /// The working universe `U′`; defaults to all `2^n` models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe: Option<ModelsSpec>,
    /// Ordered named family of basic obligations, each over the full universe.
    pub obligations: serde_json::Map<String, Value>,
    #[serde(default)]
    pub quality: QualitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeFileSpec>,
}

/// A fully resolved system: extensional sets, quality order, optional size.
pub struct LoadedSystem {
    pub system: ObligationSystem,
    pub quality: QualityRelation,
    /// The distance variant the file suggests (`"count"` quality switches the
    /// default); flags may override it.
    pub default_variant: Variant,
    pub size: Option<SizeSpec<Model>>,
    pub file: SystemFile,
}

fn resolve_models(
    spec: &ModelsSpec,
    vocab: &Vocabulary,
    ambient: &ModelSet,
) -> Result<ModelSet, Box<dyn Error>> {
    match spec {
        ModelsSpec::Formula(text) => {
            let f = parse_formula(text, vocab)?;
            Ok(models_of(&f, ambient))
        }
        ModelsSpec::Bitstrings(strings) => {
            Ok(ModelSet::from_bitstrings(vocab.len(), strings.iter().map(String::as_str))?)
        }
    }
}

/// Resolve a parsed [`SystemFile`] into extensional structures.
pub fn resolve_system(file: SystemFile) -> Result<LoadedSystem, Box<dyn Error>> {
    let vocab = Vocabulary::new(file.variables.clone())?;
    let universe = vocab.universe();
    let restriction = match &file.universe {
        Some(spec) => resolve_models(spec, &vocab, &universe)?,
        None => universe.clone(),
    };
    let mut obligations = Vec::new();
    for (name, value) in &file.obligations {
        let spec: ModelsSpec = serde_json::from_value(value.clone())
            .map_err(|_| format!("obligation `{name}` must be a formula or a bitstring list"))?;
        obligations.push((name.clone(), resolve_models(&spec, &vocab, &universe)?));
    }
    let sets: Vec<ModelSet> = obligations.iter().map(|(_, s)| s.clone()).collect();
    let (quality, default_variant) = match &file.quality {
        QualitySpec::Named(name) => match name.as_str() {
            "set" => (QualityRelation::derived_set(&sets), Variant::Set),
            "count" => (QualityRelation::derived_count(&sets), Variant::Count),
            other => return Err(format!("unknown quality `{other}` (expected \"set\", \"count\", or explicit layers)").into()),
        },
        QualitySpec::Explicit { explicit } => {
            let layers: Vec<ModelSet> = explicit
                .iter()
                .map(|layer| ModelSet::from_bitstrings(vocab.len(), layer.iter().map(String::as_str)))
                .collect::<Result<_, _>>()?;
            (QualityRelation::explicit_layers(&layers)?, Variant::Set)
        }
    };
    let size = match &file.size {
        None => None,
        Some(SizeFileSpec::Epsilon { epsilon }) => Some(SizeSpec::Fraction(*epsilon)),
        Some(SizeFileSpec::Ideal { ideal }) => {
            let set = ModelSet::from_bitstrings(vocab.len(), ideal.iter().map(String::as_str))?;
            Some(SizeSpec::Ideal(set.iter().collect::<BTreeSet<Model>>()))
        }
    };
    if let Some(size) = &size {
        size.validate()?;
    }
    let system = ObligationSystem::new(vocab, restriction, obligations)?;
    Ok(LoadedSystem { system, quality, default_variant, size, file })
}

/// Load and resolve a system file from disk.
pub fn load_system(path: &Path) -> Result<LoadedSystem, Box<dyn Error>> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: SystemFile = serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    resolve_system(file)
}

/// A candidate obligation: a whitespace/comma-separated bitstring list, or
/// otherwise a formula evaluated over `U` and intersected with `U′`.
pub fn parse_candidate(text: &str, loaded: &LoadedSystem) -> Result<ModelSet, Box<dyn Error>> {
    let width = loaded.system.vocab().len();
    let tokens: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    let all_bitstrings = !tokens.is_empty()
        && tokens.iter().all(|t| t.chars().all(|c| c == '0' || c == '1') && t.len() == width);
    if all_bitstrings {
        Ok(ModelSet::from_bitstrings(width, tokens)?)
    } else {
        let f = parse_formula(text, loaded.system.vocab())?;
        Ok(models_of(&f, &loaded.system.universe()).intersection(loaded.system.restriction()))
    }
}

// ---------------------------------------------------------------------------
// Formula rendering for model sets
// ---------------------------------------------------------------------------

/// Prime implicants of `minterms` over `n` variables (Quine–McCluskey
/// combining step). Implicants are `(bits, care_mask)` pairs with uncared
/// bits zeroed.
fn prime_implicants(minterms: &BTreeSet<u32>, n: usize) -> BTreeSet<(u32, u32)> {
    let full: u32 = (1u32 << n) - 1;
    let mut current: BTreeSet<(u32, u32)> = minterms.iter().map(|&b| (b, full)).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let level: Vec<(u32, u32)> = current.iter().copied().collect();
        let mut next = BTreeSet::new();
        let mut combined = vec![false; level.len()];
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let (b1, m1) = level[i];
                let (b2, m2) = level[j];
                if m1 != m2 {
                    continue;
                }
                let d = b1 ^ b2;
                if d.count_ones() == 1 {
                    next.insert((b1 & !d, m1 & !d));
                    combined[i] = true;
                    combined[j] = true;
                }
            }
        }
        for (i, imp) in level.into_iter().enumerate() {
            if !combined[i] {
                primes.insert(imp);
            }
        }
        current = next;
    }
    primes
}

fn cube_literals(bits: u32, mask: u32, vocab: &Vocabulary) -> String {
    if mask == 0 {
        return "T".to_string();
    }
    let parts: Vec<String> = (0..vocab.len())
        .filter(|v| mask & (1 << v) != 0)
        .map(|v| {
            if bits & (1 << v) != 0 {
                vocab.name(v).to_string()
            } else {
                format!("~{}", vocab.name(v))
            }
        })
        .collect();
    parts.join(" & ")
}

/// A short exact description of `set` relative to `restriction`: a formula
/// whose models within `U′` are exactly `set` (models outside `U′` are
/// don't-cares). Falls back to a bitstring list above 12 variables.
pub fn describe_set(set: &ModelSet, restriction: &ModelSet, vocab: &Vocabulary) -> String {
    if set.is_empty() {
        return "F".to_string();
    }
    let n = vocab.len();
    if n > 12 {
        return set.to_string();
    }
    let required: BTreeSet<u32> = set.iter().map(|m| m.bits()).collect();
    let restricted: BTreeSet<u32> = restriction.iter().map(|m| m.bits()).collect();
    let mut minterms = required.clone();
    for b in 0u32..1 << n {
        if !restricted.contains(&b) {
            minterms.insert(b); // outside U′: free to cover
        }
    }
    let primes = prime_implicants(&minterms, n);
    let covers = |(b, m): (u32, u32), t: u32| t & m == b;
    let mut uncovered = required;
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .copied()
            .max_by_key(|&(b, m)| {
                let gain = uncovered.iter().filter(|&&t| covers((b, m), t)).count();
                (gain, std::cmp::Reverse(m.count_ones()), std::cmp::Reverse((m, b)))
            })
            .expect("every required minterm is itself an implicant");
        uncovered.retain(|&t| !covers(best, t));
        chosen.push(best);
    }
    let mut parts: Vec<String> =
        chosen.iter().map(|&(b, m)| cube_literals(b, m, vocab)).collect();
    parts.sort();
    if parts.len() == 1 {
        parts.pop().expect("nonempty")
    } else {
        parts
            .iter()
            .map(|p| if p.contains('&') { format!("({p})") } else { p.clone() })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

// ---------------------------------------------------------------------------
// Command definitions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Set,
    Count,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Set => Variant::Set,
            VariantArg::Count => Variant::Count,
        }
    }
}

#[derive(Debug, Args)]
struct CheckFlags {
    /// Distance/quality variant; defaults to the file's quality kind.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Also require ceteris paribus improvement (criterion 1.4).
    #[arg(long)]
    cp: bool,
    /// Drop the nontriviality requirement (allow X = U′).
    #[arg(long)]
    allow_trivial: bool,
}

impl CheckFlags {
    fn options(&self, loaded: &LoadedSystem) -> CheckOptions {
        CheckOptions {
            variant: self.variant.map(Variant::from).unwrap_or(loaded.default_variant),
            require_cp: self.cp,
            require_nontrivial: !self.allow_trivial,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "deon",
    version,
    about = "Derived obligations over finite propositional model universes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one candidate obligation against a system.
    Check {
        /// Path to a system JSON file.
        system: PathBuf,
        /// Candidate: a formula or a comma/space-separated bitstring list.
        candidate: String,
        #[command(flatten)]
        flags: CheckFlags,
        /// Run the soft check (requires a size notion, see --epsilon).
        #[arg(long)]
        soft: bool,
        /// Exception-fraction budget for --soft; overrides the file's size.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Check one candidate and dump every witness and system-level predicate.
    Explain {
        system: PathBuf,
        candidate: String,
        #[command(flatten)]
        flags: CheckFlags,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate all derived obligations of a system.
    Derive {
        system: PathBuf,
        #[command(flatten)]
        flags: CheckFlags,
        /// Cap on the number of emitted sets.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run the full claim registry against the reference results.
    VerifyPaper {
        /// Run a single claim instead of the whole registry.
        #[arg(long)]
        claim: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Emit JSON lines, one object per claim.
        #[arg(long)]
        json: bool,
    },
    /// Search for a counterexample to one registered claim.
    Search {
        /// Claim id, as listed by verify-paper.
        claim: String,
        /// Maximum variables in the sampled random systems.
        #[arg(long, default_value_t = 4)]
        vars: usize,
        /// Maximum obligations in the sampled random systems.
        #[arg(long, default_value_t = 4)]
        obligations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instance budget for the scan.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // clap prints; exits 0 for --help, 2 for usage errors
    };
    if let Ok(threads) = std::env::var("DEON_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn Error>> {
    match cli.command {
        Command::Check { system, candidate, flags, soft, epsilon, json } => {
            cmd_check(&system, &candidate, &flags, soft, epsilon, json)
        }
        Command::Explain { system, candidate, flags, json } => {
            cmd_explain(&system, &candidate, &flags, json)
        }
        Command::Derive { system, flags, limit, json } => cmd_derive(&system, &flags, limit, json),
        Command::VerifyPaper { claim, seed, json } => cmd_verify_paper(claim.as_deref(), seed, json),
        Command::Search { claim, vars, obligations, seed, budget } => {
            cmd_search(&claim, vars, obligations, seed, budget)
        }
    }
}

fn accept_code(accept: bool) -> ExitCode {
    if accept {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn candidate_json(x: &ModelSet, loaded: &LoadedSystem) -> Value {
    json!({
        "models": x.bitstrings(),
        "formula": describe_set(x, loaded.system.restriction(), loaded.system.vocab()),
    })
}

fn cmd_check(
    path: &Path,
    candidate: &str,
    flags: &CheckFlags,
    soft: bool,
    epsilon: Option<f64>,
    json_out: bool,
) -> Result<ExitCode, Box<dyn Error>> {
    let loaded = load_system(path)?;
    let x = parse_candidate(candidate, &loaded)?;
    let options = flags.options(&loaded);
    let formula = describe_set(&x, loaded.system.restriction(), loaded.system.vocab());
    if soft {
        let size = match epsilon {
            Some(eps) => SizeSpec::Fraction(eps),
            None => loaded.size.clone().ok_or(
                "soft check needs a size notion: add a \"size\" field to the file or pass --epsilon",
            )?,
        };
        let verdict = check_soft_obligation(&x, &loaded.system, &loaded.quality, &size, &options)?;
        if json_out {
            let out = json!({ "candidate": candidate_json(&x, &loaded), "verdict": verdict.to_json() });
            println!("{}", serde_json::to_string_pretty(&out)?);
        } else {
            println!("candidate X = {x}  ≡  {formula}");
            println!("{verdict}");
        }
        Ok(accept_code(verdict.accept()))
    } else {
        let verdict = check_hard_obligation(&x, &loaded.system, &loaded.quality, &options)?;
        if json_out {
            let out = json!({ "candidate": candidate_json(&x, &loaded), "verdict": verdict.to_json() });
            println!("{}", serde_json::to_string_pretty(&out)?);
        } else {
            println!("candidate X = {x}  ≡  {formula}");
            println!("{verdict}");
        }
        Ok(accept_code(verdict.accept()))
    }
}

fn cmd_explain(
    path: &Path,
    candidate: &str,
    flags: &CheckFlags,
    json_out: bool,
) -> Result<ExitCode, Box<dyn Error>> {
    let loaded = load_system(path)?;
    let x = parse_candidate(candidate, &loaded)?;
    let options = flags.options(&loaded);
    let sys = &loaded.system;
    let vocab = sys.vocab();
    let names = sys.obligation_names();

    let verdict = check_hard_obligation(&x, sys, &loaded.quality, &options)?;
    let best = best_elements(sys.restriction(), &loaded.quality)?;
    let independence = is_independent(sys)?;
    let ui = is_ui(&x, sys)?;
    let d_o = in_d_o(&x, sys)?;
    let classical = is_classical_consequence(&x, sys)?;
    let formula = describe_set(&x, sys.restriction(), vocab);

    if json_out {
        let out = json!({
            "system": {
                "variables": vocab.names(),
                "restriction": sys.restriction().bitstrings(),
                "obligations": names.iter().zip(sys.obligation_sets())
                    .map(|(n, s)| json!({"name": n, "models": s.bitstrings()}))
                    .collect::<Vec<_>>(),
                "independent": independence.is_none(),
                "missing_delta": independence.as_ref().map(|d| d.display_with(names)),
                "best": best.bitstrings(),
            },
            "candidate": candidate_json(&x, &loaded),
            "ui": { "holds": ui.holds, "canonical_candidate": ui.candidate.bitstrings() },
            "in_d_o": d_o.is_none(),
            "d_o_witness": d_o.as_ref().map(|w| json!({
                "delta": w.delta.display_with(names),
                "inside": w.inside.to_string(),
                "outside": w.outside.to_string(),
            })),
            "classical_consequence": classical,
            "verdict": verdict.to_json(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        let obls: Vec<String> = names
            .iter()
            .zip(sys.obligation_sets())
            .map(|(n, s)| format!("{n}={s}"))
            .collect();
        println!("system: vars=({}) U'={} obligations=[{}]", vocab.names().join(","), sys.restriction(), obls.join(" "));
        match &independence {
            None => println!("independent: yes"),
            Some(delta) => println!("independent: no (unrealized {})", delta.display_with(names)),
        }
        println!("best elements: {best}");
        println!("candidate X = {x}  ≡  {formula}");
        println!(
            "union of intersections: {} (canonical candidate {})",
            if ui.holds { "yes" } else { "no" },
            ui.candidate
        );
        match &d_o {
            None => println!("in D(O): yes"),
            Some(w) => println!(
                "in D(O): no ({}; inside {} outside {})",
                w.delta.display_with(names),
                w.inside,
                w.outside
            ),
        }
        println!("classical consequence: {}", if classical { "yes" } else { "no" });
        println!("{verdict}");
    }
    Ok(accept_code(verdict.accept()))
}

fn cmd_derive(
    path: &Path,
    flags: &CheckFlags,
    limit: Option<usize>,
    json_out: bool,
) -> Result<ExitCode, Box<dyn Error>> {
    let loaded = load_system(path)?;
    let options = flags.options(&loaded);
    let derivation = derive_obligations(&loaded.system, &loaded.quality, &options, limit)?;
    let restriction = loaded.system.restriction();
    let vocab = loaded.system.vocab();
    if json_out {
        let out = json!({
            "count": derivation.items.len(),
            "truncated": derivation.truncated,
            "candidates_checked": derivation.candidates_checked,
            "obligations": derivation.items.iter().map(|(x, v)| json!({
                "models": x.bitstrings(),
                "formula": describe_set(x, restriction, vocab),
                "ui": v.ui,
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (i, (x, v)) in derivation.items.iter().enumerate() {
            println!(
                "{}. {}  ≡  {}{}",
                i + 1,
                x,
                describe_set(x, restriction, vocab),
                if v.ui { "" } else { "  [not (ui)]" }
            );
        }
        println!(
            "{} derived obligation(s) ({} candidates checked{})",
            derivation.items.len(),
            derivation.candidates_checked,
            if derivation.truncated { ", limit reached" } else { "" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_paper(
    claim_filter: Option<&str>,
    seed: u64,
    json_out: bool,
) -> Result<ExitCode, Box<dyn Error>> {
    let reports = match claim_filter {
        None => run_paper_suite(seed),
        Some(id) => {
            let claims = registry();
            let claim = claims
                .iter()
                .find(|c| c.id == id)
                .ok_or_else(|| format!("unknown claim `{id}`"))?;
            let pool = system_pool(seed, SUITE_RANDOM_SYSTEMS, 4, 4);
            vec![evaluate_claim(claim, &pool, seed, None)]
        }
    };
    let mut all_ok = true;
    for r in &reports {
        all_ok &= r.ok;
        if json_out {
            println!("{}", r.to_json());
        } else {
            println!(
                "{:4} {:9?} {:48} instances={:<8} {} ms",
                if r.ok { "ok" } else { "FAIL" },
                r.status,
                r.claim,
                r.instances,
                r.elapsed_ms
            );
            if let (false, Some(cex)) = (r.ok, &r.counterexample) {
                println!("     {cex}");
            }
        }
    }
    if !json_out {
        println!(
            "{} claim(s): {} as expected, {} unexpected",
            reports.len(),
            reports.iter().filter(|r| r.ok).count(),
            reports.iter().filter(|r| !r.ok).count()
        );
    }
    Ok(accept_code(all_ok))
}

fn cmd_search(
    claim_id: &str,
    vars: usize,
    obligations: usize,
    seed: u64,
    budget: u64,
) -> Result<ExitCode, Box<dyn Error>> {
    if !(1..=8).contains(&vars) {
        return Err("--vars must be between 1 and 8".into());
    }
    if obligations > 8 {
        return Err("--obligations must be at most 8".into());
    }
    if budget == 0 {
        return Err("--budget must be positive".into());
    }
    let claims = registry();
    let claim = claims
        .iter()
        .find(|c| c.id == claim_id)
        .ok_or_else(|| format!("unknown claim `{claim_id}`"))?;
    let pool = system_pool(seed, SUITE_RANDOM_SYSTEMS, vars, obligations);
    let report = evaluate_claim(claim, &pool, seed, Some(budget));
    match &report.counterexample {
        Some(cex) => println!(
            "claim `{}` ({:?}): counterexample after {} instance(s)\n  {}",
            report.claim, report.status, report.instances, cex
        ),
        None => println!(
            "claim `{}` ({:?}): no counterexample within {} instance(s)",
            report.claim, report.status, report.instances
        ),
    }
    Ok(accept_code(report.ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indep_pq_file() -> SystemFile {
        serde_json::from_str(
            r#"{
                "variables": ["p", "q"],
                "obligations": {"p": "p", "q": "q"},
                "quality": "set"
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn system_files_resolve_and_round_trip() {
        let file = indep_pq_file();
        let loaded = resolve_system(file.clone()).unwrap();
        assert_eq!(loaded.system.restriction().len(), 4);
        assert_eq!(loaded.system.obligation_names(), ["p", "q"]);

        let text = serde_json::to_string(&file).unwrap();
        let reparsed: SystemFile = serde_json::from_str(&text).unwrap();
        let reloaded = resolve_system(reparsed).unwrap();
        assert_eq!(loaded.system, reloaded.system);
    }

    #[test]
    fn candidates_accept_formulas_and_bitstrings() {
        let loaded = resolve_system(indep_pq_file()).unwrap();
        let by_formula = parse_candidate("p", &loaded).unwrap();
        let by_bits = parse_candidate("10 11", &loaded).unwrap();
        assert_eq!(by_formula, by_bits);
        assert!(parse_candidate("p &", &loaded).is_err());
    }

    #[test]
    fn formulas_are_relativized_to_the_restriction() {
        let file: SystemFile = serde_json::from_str(
            r#"{
                "variables": ["p", "q"],
                "universe": ["10", "01"],
                "obligations": {"p": "p", "q": "q"}
            }"#,
        )
        .unwrap();
        let loaded = resolve_system(file).unwrap();
        let x = parse_candidate("p | q", &loaded).unwrap();
        assert_eq!(x.bitstrings(), ["01", "10"]);
    }

    #[test]
    fn described_formulas_are_exact_within_the_restriction() {
        let loaded = resolve_system(indep_pq_file()).unwrap();
        let u = loaded.system.universe();
        for bits in 0u32..16 {
            let set = ModelSet::from_models(
                2,
                u.iter().enumerate().filter(|(i, _)| bits & 1 << i != 0).map(|(_, m)| m),
            )
            .unwrap();
            if set.is_empty() {
                continue;
            }
            let text = describe_set(&set, loaded.system.restriction(), loaded.system.vocab());
            let f = parse_formula(&text, loaded.system.vocab()).unwrap();
            assert_eq!(models_of(&f, &u), set, "rendering `{text}` is exact");
        }
    }

    #[test]
    fn disjunctions_render_compactly() {
        let loaded = resolve_system(indep_pq_file()).unwrap();
        let set = ModelSet::from_bitstrings(2, ["01", "10", "11"]).unwrap();
        assert_eq!(
            describe_set(&set, loaded.system.restriction(), loaded.system.vocab()),
            "p | q"
        );
        let single = ModelSet::from_bitstrings(2, ["11"]).unwrap();
        assert_eq!(
            describe_set(&single, loaded.system.restriction(), loaded.system.vocab()),
            "p & q"
        );
    }

    #[test]
    fn explicit_quality_and_size_parse() {
        let file: SystemFile = serde_json::from_str(
            r#"{
                "variables": ["k", "o"],
                "obligations": {"no_kill": "~k", "no_offence": "~o"},
                "quality": {"explicit": [["00"], ["01"], ["11"], ["10"]]},
                "size": {"epsilon": 0.1}
            }"#,
        )
        .unwrap();
        let loaded = resolve_system(file).unwrap();
        assert_eq!(loaded.size, Some(SizeSpec::Fraction(0.1)));
        let best = best_elements(loaded.system.restriction(), &loaded.quality).unwrap();
        assert_eq!(best.bitstrings(), ["00"]);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(serde_json::from_str::<SystemFile>(r#"{"variables": ["p"]}"#).is_err());
        let bad_quality: SystemFile = serde_json::from_str(
            r#"{"variables": ["p"], "obligations": {"p": "p"}, "quality": "weird"}"#,
        )
        .unwrap();
        assert!(resolve_system(bad_quality).is_err());
        let bad_width: SystemFile = serde_json::from_str(
            r#"{"variables": ["p"], "obligations": {"p": ["10"]}}"#,
        )
        .unwrap();
        assert!(resolve_system(bad_width).is_err());
    }
}
