use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use isodual_core::codes::{code_params, Distance, IsoDuality, DEFAULT_BUDGET};
use isodual_core::lifting::{
    compose_check, designed_distance, lift_code, rate_report, validate_lift, LiftPlan, RateReport,
    ValidationReport,
};
use isodual_core::places::Place;
use isodual_core::tower::{make_tower, PlaceId, Tower, TowerName};
use isodual_core::{Error, Result};

mod output;
mod recipe;

use output::{write_atomic, write_json};
use recipe::{DRecipe, GRecipe};

/// Iso-dual AG codes on the rational function field and their lifts through
/// recursive towers.
#[derive(Parser, Debug)]
#[command(name = "isodual", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a tower and write tower.json.
    Tower {
        #[arg(long)]
        name: TowerName,
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Build an AG code at level 0 or its lift to level 1.
    Code {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Parameter certificates and bound comparisons per level.
    Report {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
        /// Also check that lifting 0 -> 1 -> 2 agrees with 0 -> 2.
        #[arg(long)]
        compose: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    tower: TowerName,
    #[arg(long)]
    q: u32,
    /// Depth of the place-by-place analysis.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Evaluation places: split:all or split:first:<n>.
    #[arg(long = "d", default_value = "split:all")]
    d: String,
    /// <coeff>@inf,<coeff>@<alpha>,... (default ½(n-2)@inf).
    #[arg(long = "g")]
    g: Option<String>,
    /// Maximum number of codewords enumerated for exact distances.
    #[arg(long, env = "ISODUAL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunConfig {
    tower: TowerName,
    q: u32,
    depth: usize,
    d: DRecipe,
    g: GRecipe,
    budget: u64,
    out: PathBuf,
    seed: u64,
}

/// A run's tower together with its resolved divisors.
struct Setup {
    config: RunConfig,
    tower: Tower,
    d: Vec<Place>,
    g: isodual_core::places::Divisor0,
}

fn setup(run: &RunArgs, min_depth: usize) -> Result<Setup> {
    let desc = make_tower(run.tower, run.q)?;
    let depth = run.depth.max(min_depth);
    let tower = Tower::analyze(desc, depth)?;
    let d_recipe: DRecipe = run.d.parse()?;
    let d = d_recipe.select(&tower.evaluation_places(depth)?)?;
    let g_recipe = match &run.g {
        Some(s) => s.parse()?,
        None => GRecipe::default_for(d.len())?,
    };
    let g = g_recipe.divisor(tower.field())?;
    let config = RunConfig {
        tower: run.tower,
        q: run.q,
        depth,
        d: d_recipe,
        g: g_recipe,
        budget: run.budget,
        out: run.out.clone(),
        seed: run.seed,
    };
    Ok(Setup { config, tower, d, g })
}

fn cmd_tower(name: TowerName, q: u32, depth: usize, out: PathBuf) -> Result<()> {
    let tower = Tower::analyze(make_tower(name, q)?, depth)?;
    let dump = tower.dump()?;
    println!("{name} tower over F_{}, step degree {q}", dump.constant_field);
    println!("{:>5} {:>6} {:>6} {:>9} {:>7}", "level", "m", "genus", "deg Diff", "places");
    for l in &dump.levels {
        let check = match l.declared_genus {
            Some(g) if g as i64 == l.genus => " (matches closed formula)",
            Some(_) => " (DIFFERS from closed formula)",
            None => "",
        };
        println!(
            "{:>5} {:>6} {:>6} {:>9} {:>7}{check}",
            l.level, l.m, l.genus, l.diff_degree, l.places
        );
    }
    println!("split (computed to depth {depth}): {} places: {}", dump.split.len(), dump.split.join(" "));
    if tower.desc.declared_ramification_locus().is_some() {
        println!(
            "split locus outside the declared ramification locus: {} places",
            dump.declared_split.len()
        );
    }
    println!("ramified: {}", dump.ramified.join(" "));
    let declared = tower.places(depth).iter().filter(|n| n.source != isodual_core::tower::Source::Computed).count();
    if declared > 0 {
        println!("{declared} places at level {depth} carry declared data");
    }
    let path = out.join("tower.json");
    write_json(&path, &dump)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct CodeBundle<'a> {
    config: &'a RunConfig,
    level: usize,
    provenance: &'a Option<isodual_core::codes::Provenance>,
    lifted_g: Vec<(String, i64)>,
    genus: i64,
    params: isodual_core::codes::CodeParams,
    isoduality: &'a IsoDuality,
    permutation_equivalence: &'static str,
    validation: Option<&'a ValidationReport>,
    generator: Vec<Vec<u32>>,
}

fn cmd_code(run: &RunArgs, level: usize) -> Result<()> {
    if level > 1 {
        return Err(Error::Config(format!(
            "explicit codes stop at level 1; use `report` for level {level} certificates"
        )));
    }
    let s = setup(run, level.max(1))?;
    let t = &s.tower;
    let plan = LiftPlan::from_base(t, &s.d, &s.g, level)?;
    let validation = if level > 0 {
        let report = validate_lift(&plan)?;
        print!("lifting hypotheses:\n{report}");
        Some(report)
    } else {
        None
    };
    let lc = lift_code(&plan, s.config.seed)?;
    let n = lc.code.len();
    let designed = if level == 0 {
        n as i64 - t.degree(&lc.g)?
    } else {
        designed_distance(n as i64, lc.genus)
    };
    let count = (t.field().order() as f64).powi(lc.code.dim() as i32);
    if count <= s.config.budget as f64 && count > 1e5 {
        eprintln!("enumerating {count:.0} codewords");
    }
    let started = Instant::now();
    let distance = isodual_core::codes::min_distance(&lc.code, s.config.budget, designed, s.config.seed);
    let params = code_params(&lc.code, distance.clone());
    let iso = if lc.isoduality.witness().is_some() { "yes" } else { "no" };
    let line = match &distance {
        Distance::BoundOnly { designed, upper } => format!(
            "[{},{},≥{designed}] iso-dual: {iso} (distance bound-only{})",
            n,
            lc.code.dim(),
            upper.map_or(String::new(), |u| format!(", lightest sampled word {u}"))
        ),
        d => format!("[{},{},{d}] iso-dual: {iso}", n, lc.code.dim()),
    };
    println!("{line}");
    if let IsoDuality::Witness { x } = &lc.isoduality {
        println!("twist x = {x:?}");
    }
    eprintln!("distance computed in {:.2?}", started.elapsed());

    let stem = format!("{}-q{}-level{}", s.config.tower, s.config.q, level);
    let bundle = CodeBundle {
        config: &s.config,
        level,
        provenance: &lc.code.provenance,
        lifted_g: lc.g.terms().map(|(p, c)| (t.label(*p), c)).collect(),
        genus: lc.genus,
        params,
        isoduality: &lc.isoduality,
        permutation_equivalence: "not tested (diagonal twists only)",
        validation: validation.as_ref(),
        generator: lc.code.matrix_u32(),
    };
    let json = s.config.out.join(format!("{stem}.code.json"));
    write_json(&json, &bundle)?;
    write_atomic(&s.config.out.join(format!("{stem}.csv")), lc.code.to_csv().as_bytes())?;
    println!("wrote {}", json.display());
    Ok(())
}

#[derive(Serialize)]
struct ReportBundle<'a> {
    config: &'a RunConfig,
    report: &'a RateReport,
    composition: Option<isodual_core::lifting::ComposeResult>,
}

fn cmd_report(run: &RunArgs, max_level: usize, compose: bool) -> Result<()> {
    let s = setup(run, if compose { 2 } else { 1 })?;
    let t = &s.tower;
    let n = s.d.len() as i64;
    let deg_g = s.g.degree();
    let report = rate_report(&t.desc, Some(t), n, deg_g, max_level)?;
    println!(
        "{} q={} over F_{}: n = {n}, deg G = {deg_g}, gamma {} {}",
        report.tower,
        report.q,
        report.field_order,
        if report.gamma_is_bound { "<=" } else { "=" },
        report.gamma
    );
    println!(
        "{:>5} {:>6} {:>6} {:>6} {:>6} {:>8} {:>6} {:>5} {:>8} {:>9}",
        "level", "m", "n", "k", "genus", "kind", "d>=", "R", "delta>=", "delta_gam"
    );
    for r in &report.rows {
        let kind = serde_json::to_value(r.genus_kind)?;
        println!(
            "{:>5} {:>6} {:>6} {:>6} {:>6} {:>8} {:>6} {:>5} {:>8} {:>9}",
            r.level,
            r.m,
            r.n,
            r.k,
            r.genus,
            kind.as_str().unwrap_or(""),
            r.designed_d,
            r.rate.to_string(),
            r.delta.to_string(),
            r.delta_gamma.to_string()
        );
    }
    println!("limit: R = {}, delta >= {}", report.rate_limit, report.delta_limit);
    println!(
        "admissibility gamma <= n(1/2 - delta): {}",
        if report.admissible { "PASS" } else { "FAIL" }
    );
    for c in &report.comparisons {
        let v = c.value.map_or("-".to_string(), |v| v.to_string());
        println!("{:<20} {:>6}  {}", c.name, v, c.note);
    }
    let composition = if compose {
        let d: Vec<PlaceId> = s.d.iter().map(|p| t.place_id(p)).collect::<Result<_>>()?;
        let g = t.from_base_divisor(&s.g)?;
        let r = compose_check(t, (0, 1, 2), &d, &g)?;
        println!("composition identity: {}", if r.equal { "PASS" } else { "FAIL" });
        for (p, two, one) in &r.g_diffs {
            println!("  {p}: two-hop {two}, one-hop {one}");
        }
        Some(r)
    } else {
        None
    };
    let failed = composition.as_ref().is_some_and(|r| !r.equal);
    write_atomic(&s.config.out.join("report.csv"), report.to_csv().as_bytes())?;
    let bundle = ReportBundle {
        config: &s.config,
        report: &report,
        composition,
    };
    write_json(&s.config.out.join("report.json"), &bundle)?;
    println!("wrote {}", s.config.out.join("report.csv").display());
    if failed {
        return Err(Error::Inconsistency("composition identity failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tower { name, q, depth, out } => cmd_tower(name, q, depth, out),
        Command::Code { run, level } => cmd_code(&run, level),
        Command::Report { run, max_level, compose } => cmd_report(&run, max_level, compose),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration() { 2 } else { 1 })
        }
    }
}
