//! `ingleton`: search finite groups for Ingleton-inequality violations.
//!
//! Reports go to stdout as JSON (or CSV tables with `--csv`); progress and
//! cache notes go to stderr so report bytes stay deterministic. Exit codes:
//! 0 success, 2 precondition errors, 3 resource caps.

mod cache;
mod report;

use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ingleton_core::family::{FamilyError, FamilyRegistry};
use ingleton_core::group::{CayleyGroup, GroupError, DEFAULT_ORDER_CAP};
use ingleton_core::ingleton::{
    condition_profile, group_vector, ingleton_entropy_slack, ingleton_integer_test,
    ingleton_r_slack, search_violations, IngletonError, SearchOutcome,
};
use ingleton_core::lattice::{all_subgroups, tuple_conjugacy_orbits, LatticeError, SubgroupLattice};
use ingleton_core::witness::{prime_power_scan, witness_report, WitnessError};
use ingleton_core::young::{
    coset_entropy_oracle, young_approx_entropy, young_subgroup_order, young_subgroup_vector,
    Distribution, YoungError,
};
use report::{big_i, big_u, csv_row, float, print_json};

#[derive(Parser)]
#[command(name = "ingleton", version, about = "Finite-group Ingleton violation search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit CSV tables instead of JSON (search and subgroups only).
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads for the search scan (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Group order, element orders, and subgroup census for a spec.
    Group { spec: String },
    /// Enumerate (and cache) the full subgroup lattice.
    Subgroups { spec: String },
    /// Scan all subgroup 4-tuples for Ingleton violations.
    Search {
        spec: String,
        /// Disable the condition-based pruning (same result, slower).
        #[arg(long)]
        no_prune: bool,
        /// Also report the count of ordered violating tuples.
        #[arg(long)]
        raw_count: bool,
    },
    /// Verify the explicit PGL(2,p) construction (--p) or run the full
    /// lattice scan over PGL(2,q) (--q).
    Witness {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
    },
    /// Group vector, both slack forms, and the exact test for four chosen
    /// subgroups (lattice indices from `subgroups`).
    Entropy {
        spec: String,
        #[arg(long)]
        subgroups: String,
    },
    /// Block-permutation entropy approximation for a rational distribution.
    Young {
        /// Comma-separated rationals, e.g. 1/2,1/4,1/4.
        #[arg(long)]
        dist: String,
        #[arg(long = "T")]
        t: u64,
    },
    /// Exact coset-label entropy versus the order formula.
    Oracle {
        spec: String,
        /// Up to five lattice indices.
        #[arg(long)]
        subgroups: String,
        /// 1-based positions into the subgroup list, e.g. 2,3.
        #[arg(long)]
        alpha: String,
    },
}

enum CliError {
    Precondition(String),
    Cap(String),
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Group(GroupError::TooLarge { .. }) => CliError::Cap(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<IngletonError> for CliError {
    fn from(e: IngletonError) -> Self {
        match e {
            IngletonError::SearchTooLarge { .. } => CliError::Cap(e.to_string()),
            IngletonError::Lattice(l) => l.into(),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::Group(GroupError::TooLarge { .. }) => CliError::Cap(e.to_string()),
            WitnessError::Proj(ingleton_core::projective::ProjError::Group(
                GroupError::TooLarge { .. },
            )) => CliError::Cap(e.to_string()),
            WitnessError::Lattice(LatticeError::TooLarge { .. }) => CliError::Cap(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<YoungError> for CliError {
    fn from(e: YoungError) -> Self {
        match e {
            YoungError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Precondition(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let registry = FamilyRegistry::standard();
    match cli.command {
        Command::Group { ref spec } => cmd_group(&registry, spec, cli.csv),
        Command::Subgroups { ref spec } => cmd_subgroups(&registry, spec, cli.csv),
        Command::Search {
            ref spec,
            no_prune,
            raw_count,
        } => cmd_search(&registry, spec, no_prune, raw_count, cli.csv, cli.workers),
        Command::Witness { p, q } => cmd_witness(p, q, cli.csv, cli.workers),
        Command::Entropy {
            ref spec,
            ref subgroups,
        } => cmd_entropy(&registry, spec, subgroups, cli.csv),
        Command::Young { ref dist, t } => cmd_young(dist, t, cli.csv),
        Command::Oracle {
            ref spec,
            ref subgroups,
            ref alpha,
        } => cmd_oracle(&registry, spec, subgroups, alpha, cli.csv),
    }
}

fn reject_csv(csv: bool) -> Result<(), CliError> {
    if csv {
        return Err(CliError::Precondition(
            "--csv is only available for the search and subgroups commands".into(),
        ));
    }
    Ok(())
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn build_group(registry: &FamilyRegistry, spec: &str) -> Result<CayleyGroup, CliError> {
    let started = Instant::now();
    let group = registry.build(spec, DEFAULT_ORDER_CAP)?;
    eprintln!(
        "group: {} of order {} in {:.2?}",
        group.spec(),
        group.order(),
        started.elapsed()
    );
    Ok(group)
}

fn load_or_build_lattice(group: &CayleyGroup) -> Result<SubgroupLattice, CliError> {
    let started = Instant::now();
    if let Some(lattice) = cache::load(group) {
        eprintln!(
            "lattice: {} subgroups from cache in {:.2?}",
            lattice.len(),
            started.elapsed()
        );
        return Ok(lattice);
    }
    let lattice = all_subgroups(group)?;
    match cache::store(group, &lattice) {
        Ok(path) => eprintln!(
            "lattice: {} subgroups in {:.2?}, cached at {}",
            lattice.len(),
            started.elapsed(),
            path.display()
        ),
        Err(e) => eprintln!(
            "lattice: {} subgroups in {:.2?}; cache write failed: {e}",
            lattice.len(),
            started.elapsed()
        ),
    }
    Ok(lattice)
}

fn order_histogram(values: impl Iterator<Item = usize>) -> Value {
    let mut counts: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    Value::Array(
        counts
            .into_iter()
            .map(|(order, count)| json!([order, count]))
            .collect(),
    )
}

fn cmd_group(registry: &FamilyRegistry, spec: &str, csv: bool) -> Result<(), CliError> {
    reject_csv(csv)?;
    let group = build_group(registry, spec)?;
    let lattice = load_or_build_lattice(&group)?;
    let histogram = order_histogram(group.elements().map(|x| group.element_order(x)));
    print_json(&json!({
        "schema_version": 1,
        "command": "group",
        "spec": group.spec(),
        "order": group.order(),
        "abelian": group.is_abelian(),
        "element_order_histogram": histogram,
        "subgroup_count": lattice.len(),
    }));
    Ok(())
}

fn subgroup_entry(group: &CayleyGroup, lattice: &SubgroupLattice, i: usize) -> Value {
    let generators: Vec<String> = lattice
        .generators(i)
        .iter()
        .map(|&x| group.label(x).to_string())
        .collect();
    json!({
        "index": i,
        "order": lattice.member(i).order(),
        "generators": generators,
    })
}

fn cmd_subgroups(registry: &FamilyRegistry, spec: &str, csv: bool) -> Result<(), CliError> {
    let group = build_group(registry, spec)?;
    let lattice = load_or_build_lattice(&group)?;
    if csv {
        println!("index,order,generators");
        for i in 0..lattice.len() {
            let gens: Vec<String> = lattice
                .generators(i)
                .iter()
                .map(|&x| group.label(x).to_string())
                .collect();
            println!(
                "{}",
                csv_row(&[
                    i.to_string(),
                    lattice.member(i).order().to_string(),
                    gens.join(" "),
                ])
            );
        }
        return Ok(());
    }
    print_json(&json!({
        "schema_version": 1,
        "command": "subgroups",
        "spec": group.spec(),
        "order": group.order(),
        "subgroup_count": lattice.len(),
        "count_by_order": order_histogram(lattice.members().iter().map(|m| m.order())),
    }));
    Ok(())
}

fn violations_json(
    group: &CayleyGroup,
    lattice: &SubgroupLattice,
    outcome: &SearchOutcome,
) -> Value {
    Value::Array(
        outcome
            .records
            .iter()
            .map(|r| {
                let subgroups: Vec<Value> = r
                    .indices
                    .iter()
                    .map(|&i| subgroup_entry(group, lattice, i))
                    .collect();
                json!({
                    "indices": r.indices,
                    "orders": r.indices.map(|i| lattice.member(i).order()),
                    "lhs": big_u(r.lhs),
                    "rhs": big_u(r.rhs),
                    "deficit": big_i(r.deficit),
                    "subgroups": subgroups,
                })
            })
            .collect(),
    )
}

fn cmd_search(
    registry: &FamilyRegistry,
    spec: &str,
    no_prune: bool,
    raw_count: bool,
    csv: bool,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let group = build_group(registry, spec)?;
    let lattice = load_or_build_lattice(&group)?;

    let started = Instant::now();
    let outcome = with_pool(workers, || search_violations(&group, &lattice, !no_prune))?;
    eprintln!(
        "search: {} canonical violations in {:.2?} (pruned: {}, tuples tested: {}, skipped: {})",
        outcome.canonical_count(),
        started.elapsed(),
        outcome.pruned,
        outcome.stats.tuples_tested,
        outcome
            .skipped_globally
            .map(|c| c.short_name())
            .unwrap_or("-"),
    );

    let tuples: Vec<[usize; 4]> = outcome.records.iter().map(|r| r.indices).collect();
    let orbit_count = tuple_conjugacy_orbits(&group, &lattice, &tuples)?.len();

    if csv {
        println!("i1,i2,i3,i4,order1,order2,order3,order4,lhs,rhs,deficit");
        for r in &outcome.records {
            let mut fields: Vec<String> = r.indices.iter().map(|i| i.to_string()).collect();
            fields.extend(r.indices.iter().map(|&i| lattice.member(i).order().to_string()));
            fields.push(r.lhs.to_string());
            fields.push(r.rhs.to_string());
            fields.push(r.deficit.to_string());
            println!("{}", csv_row(&fields));
        }
        return Ok(());
    }

    let mut body = json!({
        "schema_version": 1,
        "command": "search",
        "spec": group.spec(),
        "group_order": group.order(),
        "subgroup_count": lattice.len(),
        "canonical_count": outcome.canonical_count(),
        "conjugacy_orbit_count": orbit_count,
        "violations": violations_json(&group, &lattice, &outcome),
    });
    if raw_count {
        body.as_object_mut()
            .unwrap()
            .insert("raw_count".into(), json!(outcome.raw_count));
    }
    print_json(&body);
    Ok(())
}

fn cmd_witness(
    p: Option<u32>,
    q: Option<u32>,
    csv: bool,
    workers: Option<usize>,
) -> Result<(), CliError> {
    reject_csv(csv)?;
    match (p, q) {
        (Some(p), None) => {
            let r = witness_report(p, DEFAULT_ORDER_CAP)?;
            let relations: Value = r
                .relations
                .relations
                .iter()
                .map(|(name, ok)| json!([name, ok]))
                .collect();
            let matrices: Value = r
                .matrices
                .iter()
                .map(|(name, label)| json!([name, label]))
                .collect();
            print_json(&json!({
                "schema_version": 1,
                "command": "witness",
                "p": r.p,
                "t": r.t,
                "s": r.s,
                "k1": -1,
                "k3": 0,
                "k4": -2,
                "group_order": r.group_order,
                "matrices": matrices,
                "relations": relations,
                "element_orders": json!([r.relations.order_a, r.relations.order_b, r.relations.order_c]),
                "generation": r.generation,
                "explicit_forms": r.explicit_forms_ok,
                "flower": json!({
                    "core_order": r.flower.core_order,
                    "petal_size": r.flower.petal_size,
                    "petal_count": r.flower.petal_count,
                    "pairwise_trivial": r.flower.petals_pairwise_trivial,
                    "covers": r.flower.covers_ambient,
                    "ok": r.flower.ok,
                }),
                "subgroup_orders": r.subgroup_orders,
                "intersection_orders": json!({
                    "12": r.pair_orders[0], "13": r.pair_orders[1], "14": r.pair_orders[2],
                    "23": r.pair_orders[3], "24": r.pair_orders[4], "34": r.pair_orders[5],
                    "123": r.triple_orders[0], "124": r.triple_orders[1],
                }),
                "lhs": big_u(r.test.lhs),
                "rhs": big_u(r.test.rhs),
                "deficit": big_i(r.test.deficit),
                "deficit_formula": big_i(r.deficit_formula),
                "violated": r.violated,
                "first_failure": r.first_failure,
                "ok": r.ok,
            }));
            Ok(())
        }
        (None, Some(q)) => {
            let started = Instant::now();
            let scan = with_pool(workers, || prime_power_scan(q, DEFAULT_ORDER_CAP))?;
            eprintln!(
                "scan: PGL(2,{q}) with {} subgroups in {:.2?}",
                scan.subgroup_count,
                started.elapsed()
            );
            print_json(&json!({
                "schema_version": 1,
                "command": "witness-scan",
                "q": scan.q,
                "group_order": scan.group_order,
                "subgroup_count": scan.subgroup_count,
                "canonical_count": scan.outcome.canonical_count(),
                "raw_count": scan.outcome.raw_count,
                "violated": scan.outcome.canonical_count() > 0,
            }));
            Ok(())
        }
        _ => Err(CliError::Precondition(
            "witness needs exactly one of --p <odd prime> or --q <prime power>".into(),
        )),
    }
}

fn parse_index_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Precondition(format!("invalid {what} list entry {part:?}")))
        })
        .collect()
}

fn mask_label(mask: u32) -> String {
    (0..4)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect()
}

fn cmd_entropy(
    registry: &FamilyRegistry,
    spec: &str,
    subgroups: &str,
    csv: bool,
) -> Result<(), CliError> {
    reject_csv(csv)?;
    let group = build_group(registry, spec)?;
    let lattice = load_or_build_lattice(&group)?;
    let indices = parse_index_list(subgroups, "subgroup")?;
    if indices.len() != 4 {
        return Err(CliError::Precondition(format!(
            "entropy needs exactly 4 subgroup indices, got {}",
            indices.len()
        )));
    }
    for &i in &indices {
        if i >= lattice.len() {
            return Err(CliError::Precondition(format!(
                "subgroup index {i} out of range 0..{}",
                lattice.len()
            )));
        }
    }
    let subs = [
        lattice.member(indices[0]),
        lattice.member(indices[1]),
        lattice.member(indices[2]),
        lattice.member(indices[3]),
    ];
    let v = group_vector(&group, &subs)?;
    let test = ingleton_integer_test(&v)?;
    let hv = v.entropy_vector();
    let conditions: Vec<&str> = condition_profile(&group, subs)?
        .iter()
        .map(|c| c.short_name())
        .collect();

    let alpha_orders: Value = (1u32..16)
        .map(|mask| json!([mask_label(mask), v.order_of(mask)]))
        .collect();
    let entropies: Value = (1u32..16)
        .map(|mask| json!([mask_label(mask), float(hv[mask as usize - 1])]))
        .collect();

    print_json(&json!({
        "schema_version": 1,
        "command": "entropy",
        "spec": group.spec(),
        "group_order": group.order(),
        "subgroups": indices
            .iter()
            .map(|&i| subgroup_entry(&group, &lattice, i))
            .collect::<Value>(),
        "alpha_orders": alpha_orders,
        "entropies": entropies,
        "lhs": big_u(test.lhs),
        "rhs": big_u(test.rhs),
        "deficit": big_i(test.deficit),
        "violated": test.violated,
        "entropy_slack": float(ingleton_entropy_slack(&hv)),
        "r_slack": float(ingleton_r_slack(&hv)),
        "conditions": conditions,
    }));
    Ok(())
}

fn cmd_young(dist: &str, t: u64, csv: bool) -> Result<(), CliError> {
    reject_csv(csv)?;
    if t == 0 {
        return Err(CliError::Precondition("T must be positive".into()));
    }
    let d = Distribution::parse(dist)?;
    let approx = young_approx_entropy(&d, t)?;
    let exact = d.entropy_bits();
    let bound = (d.support() as f64 - 1.0) * ((t + 1) as f64).log2() / t as f64;
    let group_order = ingleton_core::young::factorial(t);
    let subgroup_order = young_subgroup_order(&d, t)?;

    let materialized = if t <= 8 {
        let v = young_subgroup_vector(&d, t)?;
        json!({
            "group_order": v.group_order(),
            "subgroup_order": v.order_of(1),
        })
    } else {
        Value::Null
    };

    print_json(&json!({
        "schema_version": 1,
        "command": "young",
        "distribution": d.masses().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "T": t,
        "approx_bits": float(approx),
        "entropy_bits": float(exact),
        "gap": float(exact - approx),
        "gap_bound": float(bound),
        "group_order": group_order.to_string(),
        "subgroup_order": subgroup_order.to_string(),
        "materialized_check": materialized,
    }));
    Ok(())
}

fn cmd_oracle(
    registry: &FamilyRegistry,
    spec: &str,
    subgroups: &str,
    alpha: &str,
    csv: bool,
) -> Result<(), CliError> {
    reject_csv(csv)?;
    let group = build_group(registry, spec)?;
    let lattice = load_or_build_lattice(&group)?;
    let indices = parse_index_list(subgroups, "subgroup")?;
    if indices.is_empty() || indices.len() > 5 {
        return Err(CliError::Precondition(format!(
            "oracle supports 1..=5 subgroups, got {}",
            indices.len()
        )));
    }
    for &i in &indices {
        if i >= lattice.len() {
            return Err(CliError::Precondition(format!(
                "subgroup index {i} out of range 0..{}",
                lattice.len()
            )));
        }
    }
    let positions = parse_index_list(alpha, "alpha")?;
    let mut mask = 0u32;
    for &pos in &positions {
        if pos == 0 || pos > indices.len() {
            return Err(CliError::Precondition(format!(
                "alpha position {pos} out of range 1..={}",
                indices.len()
            )));
        }
        mask |= 1 << (pos - 1);
    }
    if mask == 0 {
        return Err(CliError::Precondition("alpha must be nonempty".into()));
    }

    let subs: Vec<&ingleton_core::SubgroupSet> =
        indices.iter().map(|&i| lattice.member(i)).collect();
    let oracle = coset_entropy_oracle(&group, &subs, mask)?;
    let v = group_vector(&group, &subs)?;
    let formula = v.entropy_vector()[mask as usize - 1];

    print_json(&json!({
        "schema_version": 1,
        "command": "oracle",
        "spec": group.spec(),
        "subgroups": indices,
        "alpha": positions,
        "alpha_order": v.order_of(mask),
        "oracle_bits": float(oracle),
        "formula_bits": float(formula),
        "abs_error": float((oracle - formula).abs()),
    }));
    Ok(())
}
