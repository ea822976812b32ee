use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use toricstack::bundles::{bundle_rank_check, sr_algebra, unit_monomial_freeness, CoefficientRingSpec};
use toricstack::fan::{is_complete, is_smooth, shelling_order, stacky_reduction, validate_fan, GroupData, StackyFan};
use toricstack::ktheory::{cell_basis, edge_and_tor, k0_presentation, wps_coarse_presentations, wps_presentation, RingPresentation};
use toricstack::lattice::quotient_group;
use toricstack::laurent::{
    groebner_with, koszul_tor, GroebnerBasis, GroebnerConfig, LaurentPoly, TermOrder, TorModule, TorResult,
};

use crate::input::{parse, FanFile, InputError};
use crate::report::{
    ints_json, poly_json, presentation_json, presentation_text, quotient_json, rank_json, relations_from_json, Check,
    Report,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Check the fan file and the fan's geometry.
    Validate,
    /// Summarize the fan, its group and its K₀.
    Analyze,
    /// Rewrite a beta-form stacky fan in subgroup form.
    Reduce,
    /// Presentation of K₀ of the quotient stack.
    K0,
    /// Presentation of torus-equivariant K₀ (Stanley–Reisner part only).
    Kt0,
    /// Weighted projective stack presentation.
    Wps,
    /// Koszul Tor table and the degree-zero comparison.
    Tor,
    /// Cell basis from a shelling order.
    Basis,
    /// Shelling order of the maximal cones.
    Order,
    /// Bundle algebra over a coefficient ring of units.
    Bundle,
}

impl Command {
    fn name(self) -> String {
        self.to_possible_value().unwrap().get_name().to_string()
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "toricstack", version, about = "Exact K-theory presentations of toric stacks")]
pub struct Cli {
    pub command: Command,
    /// Fan file (JSON). Optional for `wps` and `tor` when --weights is given.
    pub file: Option<PathBuf>,
    /// Emit the structured report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Seed for the randomized self-checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reduction steps allowed per Gröbner computation.
    #[arg(long)]
    pub step_budget: Option<u64>,
    /// Highest Tor degree computed.
    #[arg(long, default_value_t = 3)]
    pub smax: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Weights, comma separated (wps, tor).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<u32>>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Math(#[from] toricstack::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Math(e) if e.is_resource_limit() => 2,
            RunError::Math(e) if e.is_input_error() => 3,
            RunError::Math(_) => 1,
            RunError::Input(_) | RunError::Usage(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Input(InputError::Parse { .. }) => "ParseError",
            RunError::Input(InputError::Schema { .. }) => "SchemaError",
            RunError::Usage(_) => "UsageError",
            RunError::Math(e) if e.is_resource_limit() => "ResourceLimit",
            RunError::Math(_) => "MathematicalRejection",
        }
    }
}

type Outcome = Result<(Value, Vec<String>, Vec<Check>), RunError>;

/// Runs a command on the text of a fan file (if any). The report is
/// complete even when a verification fails; callers map that to exit 1.
pub fn run(cli: &Cli, input: Option<&str>) -> Result<Report, RunError> {
    let start = Instant::now();
    let file = input.map(parse).transpose()?;
    let cfg = cli.step_budget.map(GroebnerConfig::with_budget).unwrap_or_default();
    let weights = cli.weights.clone().or_else(|| file.as_ref().and_then(|f| f.weights.clone()));
    let need_file = || file.as_ref().ok_or_else(|| RunError::Usage(format!("`{}` needs a fan file", cli.command.name())));

    let (payload, text, verification) = match cli.command {
        Command::Validate => validate(need_file()?),
        Command::Analyze => analyze(need_file()?, &cfg),
        Command::Reduce => reduce(need_file()?),
        Command::K0 => k0(need_file()?, &cfg, cli.seed),
        Command::Kt0 => kt0(need_file()?, &cfg, cli.seed),
        Command::Wps => wps(weights.ok_or_else(|| RunError::Usage("`wps` needs --weights or a weights field".into()))?, &cfg, cli.seed),
        Command::Tor => match (&file, weights) {
            (None, Some(q)) => tor_weights(&q, cli.smax, &cfg),
            (Some(f), _) => tor(f, cli.smax, &cfg),
            (None, None) => Err(RunError::Usage("`tor` needs a fan file or --weights".into())),
        },
        Command::Basis => basis(need_file()?, &cfg),
        Command::Order => order(need_file()?),
        Command::Bundle => bundle(need_file()?, &cfg, cli.seed),
    }?;

    let digest_source = match input {
        Some(text) => text.as_bytes().to_vec(),
        None => format!("weights={:?}", cli.weights).into_bytes(),
    };
    Ok(Report {
        command: cli.command.name(),
        flags: json!({
            "seed": cli.seed,
            "step_budget": cli.step_budget,
            "smax": cli.smax,
            "weights": cli.weights,
        }),
        input_digest: format!("sha256:{}", hex::encode(Sha256::digest(&digest_source))),
        payload,
        verification,
        timing_ms: start.elapsed().as_millis(),
        text,
    })
}

/// Full command-line behaviour: returns the exit status and what would be
/// written to standard output and standard error.
pub fn execute(cli: &Cli) -> (i32, String, String) {
    let input = match &cli.file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => return (3, String::new(), format!("error: cannot read {}: {e}\n", path.display())),
        },
        None => None,
    };
    match run(cli, input.as_deref()) {
        Ok(report) => {
            let code = if report.passed() { 0 } else { 1 };
            let body = if cli.json { report.to_json() } else { report.to_text() };
            match &cli.out {
                Some(path) => match std::fs::write(path, &body) {
                    Ok(()) => (code, String::new(), String::new()),
                    Err(e) => (3, String::new(), format!("error: cannot write {}: {e}\n", path.display())),
                },
                None => (code, body, String::new()),
            }
        }
        Err(e) => {
            let stdout = if cli.json {
                let v = json!({"command": cli.command.name(), "error": {"kind": e.kind(), "message": e.to_string()}, "exit_status": e.exit_code()});
                serde_json::to_string_pretty(&v).unwrap() + "\n"
            } else {
                String::new()
            };
            (e.exit_code(), stdout, format!("error: {e}\n"))
        }
    }
}

fn one_based(xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|x| x + 1).collect()
}

fn rows_text(rows: &[Vec<num_bigint::BigInt>]) -> String {
    let shown: Vec<String> =
        rows.iter().map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
    if shown.is_empty() { "none".into() } else { shown.join(", ") }
}

fn group_kind(g: &GroupData) -> &'static str {
    match g {
        GroupData::Trivial => "trivial",
        GroupData::FullTorus => "full_torus",
        GroupData::Subgroup(_) => "subgroup",
        GroupData::Beta { .. } => "beta",
    }
}

fn validate(file: &FanFile) -> Outcome {
    let fan = file.fan();
    let rep = validate_fan(&fan);
    let failures: Vec<String> = rep.failures.iter().map(|f| f.to_string()).collect();
    let sf = file.stacky_fan()?;
    let mut text = vec![format!(
        "fan: {} rays, {} maximal cones in rank {}",
        fan.ray_count(),
        fan.max_cones().len(),
        fan.lattice_rank()
    )];
    let mut payload = json!({
        "lattice_rank": fan.lattice_rank(),
        "rays": fan.ray_count(),
        "max_cones": fan.max_cones().len(),
        "group": group_kind(&sf.group),
        "valid": rep.is_valid(),
        "failures": failures,
    });
    if rep.is_valid() {
        let (smooth, complete) = (is_smooth(&fan), is_complete(&fan));
        payload["smooth"] = json!(smooth);
        payload["complete"] = json!(complete);
        text.push(format!("smooth: {smooth}, complete: {complete}"));
    }
    text.extend(failures.iter().map(|f| format!("problem: {f}")));
    let detail = if rep.is_valid() { "no problems found".to_string() } else { failures.join("; ") };
    Ok((payload, text, vec![Check::new("fan_valid", rep.is_valid(), detail)]))
}

fn analyze(file: &FanFile, cfg: &GroebnerConfig) -> Outcome {
    let (mut payload, mut text, checks) = validate(file)?;
    if !checks[0].passed {
        return Ok((payload, text, checks));
    }
    let sf = file.stacky_fan()?;
    let red = stacky_reduction(&sf)?;
    let g = &red.group_characters;
    payload["group_characters"] = json!(g.to_string());
    payload["group_order"] = g.order().map_or(json!("INFINITE"), |o| crate::report::int_json(&o));
    text.push(format!("character group of G: {g}"));
    if is_smooth(&sf.fan) {
        let pres = k0_presentation(&sf)?;
        let q = pres.quotient_report(cfg)?;
        payload["k0_z_rank"] = rank_json(q.z_rank);
        payload["k0_free"] = json!(q.is_free);
        text.push(format!("K0: Z-rank {}, {}", q.z_rank, if q.is_free { "free" } else { "not shown free" }));
        if is_complete(&sf.fan) {
            let found = shelling_order(&sf.fan).is_ok();
            payload["shelling_order"] = json!(found);
            text.push(format!("shelling order: {}", if found { "found" } else { "none" }));
        }
    }
    Ok((payload, text, checks))
}

fn reduce(file: &FanFile) -> Outcome {
    let sf = file.stacky_fan()?;
    let red = stacky_reduction(&sf)?;
    let q = quotient_group(red.fan.lattice_rank(), &red.characters)?;
    let chars: Vec<Value> = red.characters.hermite_basis().row_vecs().iter().map(|r| ints_json(r)).collect();
    let mut payload = json!({
        "lattice_rank": red.fan.lattice_rank(),
        "rays": red.fan.rays().iter().map(|r| ints_json(r)).collect::<Vec<_>>(),
        "max_cones": red.fan.max_cones().iter().map(|c| one_based(c)).collect::<Vec<_>>(),
        "characters": chars,
        "tau": one_based(&red.tau),
        "quotient_group": q.group.to_string(),
        "group_characters": red.group_characters.to_string(),
    });
    let mut text = vec![
        format!("fan: {} rays, {} maximal cones in rank {}", red.fan.ray_count(), red.fan.max_cones().len(), red.fan.lattice_rank()),
        format!("characters M': {}", rows_text(&red.characters.hermite_basis().row_vecs())),
        format!("quotient group: {}", q.group),
    ];
    match red.image_and_kernel() {
        Ok((f_sub, h)) => {
            payload["split"] = json!({
                "image_characters": f_sub.hermite_basis().row_vecs().iter().map(|r| ints_json(r)).collect::<Vec<_>>(),
                "kernel_characters": h.to_string(),
            });
            text.push(format!("on the original variety: acting part {}, kernel {h}", quotient_group(sf.fan.lattice_rank(), &f_sub)?.group));
        }
        Err(e) => {
            payload["split"] = json!({"error": e.to_string()});
            text.push(format!("no split: {e}"));
        }
    }
    let ok = q.group == red.group_characters;
    Ok((payload, text, vec![Check::new("group_preserved", ok, format!("{} vs {}", q.group, red.group_characters))]))
}

/// Emits the relations as JSON, reads them back and compares the ideals.
fn round_trip(pres: &RingPresentation, gb: &GroebnerBasis, cfg: &GroebnerConfig) -> Result<Check, RunError> {
    let emitted = serde_json::to_string(&presentation_json(pres)["relations"]).expect("serializes");
    let reread: Value = serde_json::from_str(&emitted).expect("own output parses");
    let rels = match relations_from_json(&reread, pres.arity()) {
        Ok(r) => r,
        Err(e) => return Ok(Check::new("round_trip", false, e)),
    };
    let again = groebner_with(pres.arity(), &rels, gb.order().clone(), cfg)?;
    let ok = again.ideal_equal(gb);
    Ok(Check::new("round_trip", ok, format!("{} relations re-read", rels.len())))
}

/// Normal forms of seeded random elements agree under a shuffled basis and
/// are idempotent.
fn confluence(gb: &GroebnerBasis, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = gb.arity();
    let mut perm: Vec<usize> = (0..gb.len()).collect();
    perm.shuffle(&mut rng);
    let other = gb.permuted(&perm);
    let samples = 20;
    for _ in 0..samples {
        let mut p = LaurentPoly::zero(d);
        for _ in 0..4 {
            let e: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
            p = &p + &LaurentPoly::monomial(e, rng.gen_range(-5i64..=5));
        }
        let nf = gb.normal_form(&p);
        if other.normal_form(&p) != nf || gb.normal_form(&nf) != nf {
            return Check::new("normal_form_confluence", false, format!("disagreement on {p}"));
        }
    }
    Check::new("normal_form_confluence", true, format!("{samples} seeded elements (seed {seed})"))
}

fn presentation_outcome(pres: &RingPresentation, cfg: &GroebnerConfig, seed: u64) -> Outcome {
    let gb = pres.groebner(cfg)?;
    let q = gb.quotient_report();
    let mut payload = presentation_json(pres);
    payload["quotient"] = quotient_json(&q);
    let text = presentation_text(pres, Some(&q));
    let checks = vec![round_trip(pres, &gb, cfg)?, confluence(&gb, seed)];
    Ok((payload, text, checks))
}

fn k0(file: &FanFile, cfg: &GroebnerConfig, seed: u64) -> Outcome {
    presentation_outcome(&k0_presentation(&file.stacky_fan()?)?, cfg, seed)
}

fn kt0(file: &FanFile, cfg: &GroebnerConfig, seed: u64) -> Outcome {
    presentation_outcome(&k0_presentation(&StackyFan::full_torus(file.fan()))?, cfg, seed)
}

fn wps(q: Vec<u32>, cfg: &GroebnerConfig, seed: u64) -> Outcome {
    let pres = wps_presentation(&q)?;
    let (mut payload, mut text, mut checks) = presentation_outcome(&pres, cfg, seed)?;
    let (integral, rational) = wps_coarse_presentations(&q)?;
    let mut coarse = Vec::new();
    for p in [&integral, &rational] {
        let gb = p.groebner(cfg)?;
        let qr = gb.quotient_report();
        let mut v = presentation_json(p);
        v["quotient"] = quotient_json(&qr);
        coarse.push(v);
        text.push("coarse space:".into());
        text.extend(presentation_text(p, Some(&qr)).into_iter().map(|l| format!("  {l}")));
        checks.push(round_trip(p, &gb, cfg)?);
    }
    payload["weights"] = json!(q);
    payload["coarse"] = json!(coarse);
    Ok((payload, text, checks))
}

/// Beta inputs are brought to subgroup form on the original fan; that is
/// only possible when no part of the group acts trivially.
fn subgroup_form(sf: StackyFan) -> Result<StackyFan, RunError> {
    if !matches!(sf.group, GroupData::Beta { .. }) {
        return Ok(sf);
    }
    let (f_sub, h) = stacky_reduction(&sf)?.image_and_kernel()?;
    if !h.is_trivial() {
        return Err(toricstack::Error::NotSupported(format!("a subgroup with characters {h} acts trivially")).into());
    }
    Ok(StackyFan::new(sf.fan, GroupData::Subgroup(f_sub))?)
}

fn tor_table(tor: &TorResult) -> (Value, Vec<String>) {
    let mut text = Vec::new();
    let rows: Vec<Value> = tor
        .degrees
        .iter()
        .map(|d| {
            let z = d.z_rank.map(rank_json);
            let g = d.group.as_ref().map(|g| g.to_string());
            let shown = match (&g, d.z_rank) {
                (Some(g), _) => g.clone(),
                (None, Some(r)) => format!("Z-rank {r}"),
                (None, None) => "rank undetermined".into(),
            };
            text.push(format!("Tor_{}: {}{}", d.s, if d.is_zero() { "0" } else { "nonzero, " }, if d.is_zero() { String::new() } else { shown }));
            json!({"s": d.s, "zero": d.is_zero(), "z_rank": z, "group": g, "generators": d.generators.len()})
        })
        .collect();
    text.push(format!("regular sequence: {}", tor.regular_sequence));
    text.extend(tor.warnings.iter().map(|w| format!("warning: {w}")));
    (json!({"degrees": rows, "regular_sequence": tor.regular_sequence, "warnings": tor.warnings}), text)
}

fn tor(file: &FanFile, s_max: usize, cfg: &GroebnerConfig) -> Outcome {
    let sf = subgroup_form(file.stacky_fan()?)?;
    let rep = edge_and_tor(&sf, s_max, cfg)?;
    let (mut payload, mut text) = tor_table(&rep.tor);
    payload["tor0_relations"] = json!(rep.tor0_relations.iter().map(poly_json).collect::<Vec<_>>());
    payload["edge_equal"] = json!(rep.edge_equal);
    payload["degenerates"] = json!(rep.degenerates);
    text.push(format!("higher Tor vanishes through degree {s_max}: {}", rep.degenerates));
    let check = Check::new("edge_map", rep.edge_equal, "degree-zero homology against the K0 presentation");
    Ok((payload, text, vec![check]))
}

/// Koszul homology of `t − 1` on `ℤ[t^{±1}]/∏(1 − t^{qᵢ})`.
fn tor_weights(q: &[u32], s_max: usize, cfg: &GroebnerConfig) -> Outcome {
    let rel = wps_presentation(q)?.relations;
    let t = LaurentPoly::var(1, 0);
    let seq = [&t - &LaurentPoly::one(1)];
    let res = koszul_tor(1, &seq, &TorModule::Cyclic(rel.clone()), s_max, cfg)?;
    let (mut payload, mut text) = tor_table(&res);
    payload["module_relations"] = json!(rel.iter().map(poly_json).collect::<Vec<_>>());
    text.insert(0, format!("module: Z[t^±1]/({}), sequence: t - 1", rel[0].display_with(&["t".to_string()])));
    Ok((payload, text, Vec::new()))
}

fn order(file: &FanFile) -> Outcome {
    let fan = file.fan();
    let so = shelling_order(&fan)?;
    let verified = so.verify(&fan);
    let cones: Vec<Vec<usize>> = so.order.iter().map(|&c| one_based(&fan.max_cones()[c])).collect();
    let payload = json!({
        "order": one_based(&so.order),
        "cones": cones,
        "tau": so.tau.iter().map(|t| one_based(t)).collect::<Vec<_>>(),
        "tau_prime": so.tau_prime.iter().map(|t| one_based(t)).collect::<Vec<_>>(),
    });
    let text = so
        .order
        .iter()
        .enumerate()
        .map(|(i, &c)| format!("{}: cone {} {:?}, tau {:?}, tau' {:?}", i + 1, c + 1, cones[i], one_based(&so.tau[i]), one_based(&so.tau_prime[i])))
        .collect();
    let detail = verified.clone().err().unwrap_or_else(|| "all ordering conditions hold".into());
    Ok((payload, text, vec![Check::new("order_conditions", verified.is_ok(), detail)]))
}

fn basis(file: &FanFile, cfg: &GroebnerConfig) -> Outcome {
    let sf = subgroup_form(file.stacky_fan()?)?;
    let so = shelling_order(&sf.fan)?;
    let cb = cell_basis(&sf, &so, cfg)?;
    let names = LaurentPoly::default_names(sf.fan.ray_count());
    let payload = json!({
        "order": one_based(&so.order),
        "elements": cb.elements.iter().map(poly_json).collect::<Vec<_>>(),
        "element_strings": cb.elements.iter().map(|p| p.display_with(&names)).collect::<Vec<_>>(),
        "multipliers": cb.multipliers.iter().map(|p| p.display_with(&names)).collect::<Vec<_>>(),
        "mode": format!("{:?}", cb.report.mode),
        "products": cb.report.products,
        "quotient_rank": cb.report.quotient_rank,
        "determinant": crate::report::int_json(&cb.report.determinant),
    });
    let mut text = vec![format!("{} products in a quotient of rank {}", cb.report.products, cb.report.quotient_rank)];
    text.extend(cb.elements.iter().enumerate().map(|(i, p)| format!("b{}: {}", i + 1, p.display_with(&names))));
    text.push(format!("multipliers: {}", cb.multipliers.iter().map(|p| p.display_with(&names)).collect::<Vec<_>>().join(", ")));
    let checks = vec![Check::new("unimodular", true, format!("determinant {}", cb.report.determinant))];
    Ok((payload, text, checks))
}

fn bundle(file: &FanFile, cfg: &GroebnerConfig, seed: u64) -> Outcome {
    let section = file.bundle.as_ref().ok_or_else(|| RunError::Usage("`bundle` needs a bundle section".into()))?;
    let sf = subgroup_form(file.stacky_fan()?)?;
    let sub = sf.character_sublattice().expect("subgroup form");
    let units: Vec<&str> = section.units.iter().map(String::as_str).collect();
    let a = CoefficientRingSpec::parse(section.base_vars.clone(), &units)?;
    let bp = sr_algebra(&sf.fan, &sub, &a)?;
    let (mut payload, mut text, mut checks) = presentation_outcome(&bp.presentation, cfg, seed)?;
    let rank = bundle_rank_check(&bp, cfg)?;
    let free = unit_monomial_freeness(&a, bp.fan_arity, &bp.unit_relations)?;
    payload["a_free"] = json!(rank.a_free);
    payload["a_rank"] = rank_json(rank.a_rank);
    payload["expected_rank"] = rank_json(rank.expected_rank);
    payload["monomial_cosets"] = json!(free.cosets.to_string());
    text.push(format!("A-rank: {} ({}), expected {}", rank.a_rank, if rank.a_free { "free" } else { "not shown free" }, rank.expected_rank));
    text.push(format!("ray monomials modulo the unit relations: {}", free.cosets));
    checks.push(Check::new("rank_law", rank.matches_rank_law, format!("A-rank {} vs {}", rank.a_rank, rank.expected_rank)));
    // units set to 1 give back the fibre
    let d = bp.fan_arity;
    let fibre = k0_presentation(&sf)?;
    let lhs = groebner_with(d, &bp.specialize_units(), TermOrder::DegLex, cfg)?;
    let rhs = groebner_with(d, &fibre.relations, TermOrder::DegLex, cfg)?;
    checks.push(Check::new("fibre", lhs.ideal_equal(&rhs), "units set to 1 against the K0 presentation of the fibre"));
    Ok((payload, text, checks))
}
