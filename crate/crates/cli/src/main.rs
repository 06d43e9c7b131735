use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypeca_engine::{history, FiringLog};
use hypeca_fitkit::fit_structure;
use hypeca_render::{layout_ball, render_frame, Highlight};
use hypeca_rules::{parse_rules, RuleTable, State};
use hypeca_structures::golden::GoldenStore;
use hypeca_structures::{
    assets_dir, check_expectations, inject, load_scenario, load_scenarios, Scenario, StructureKind, FAMILIES,
    STRUCTURE_LEVELS,
};
use hypeca_tiling::{adjacency_text, build_ball, CellId};
use hypeca_verify::Harness;

#[derive(Parser)]
#[command(name = "hypeca", version, about = "Railway circuits on the {8,3} tiling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a ball and write its adjacency list
    Tiling {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a rule file and report conflicts
    RulesCheck {
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Run a scenario and optionally write its trace
    Run {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Replay execution tables and behaviour checks
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        table: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Draw a structure on the Poincare disk
    Render {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 0)]
        time: usize,
        #[arg(long, default_value_t = 5)]
        levels: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover solved assets from the execution tables
    Fit {
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        #[arg(long)]
        asset_out: PathBuf,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(FAMILIES))]
    structure: String,
    /// Colour of the controller or sensor
    #[arg(long, value_parser = parse_state)]
    colour: Option<State>,
}

fn parse_state(s: &str) -> Result<State, String> {
    match s {
        "W" | "w" => Ok(State::W),
        "B" | "b" => Ok(State::B),
        _ => Err("expected W or B".into()),
    }
}

type Failure = Box<dyn std::error::Error>;

fn rules_at(path: &Path) -> Result<RuleTable, Failure> {
    Ok(parse_rules(&fs::read_to_string(path)?)?)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn scenario_for(target: &Target, name: &str) -> Result<Scenario, Failure> {
    let mut sc = load_scenario(&assets_dir(), &target.structure, name)?;
    if target.colour.is_some() {
        sc.kind = StructureKind::from_family(&target.structure, target.colour)
            .ok_or_else(|| format!("{} has no colour", target.structure))?;
    }
    Ok(sc)
}

/// Columns of the scenario's tables, in table order.
fn watch_cells(sc: &Scenario, store: Option<&GoldenStore>) -> Vec<CellId> {
    let mut cells: Vec<CellId> = Vec::new();
    if let Some(store) = store {
        for tag in &sc.golden {
            if let Some(g) = store.tables.get(tag) {
                for &c in &g.cells {
                    if !cells.contains(&c) {
                        cells.push(c);
                    }
                }
            }
        }
    }
    cells
}

fn run_cmd(target: &Target, name: &str, steps: Option<usize>, trace_out: Option<&Path>) -> Result<u8, Failure> {
    let dir = assets_dir();
    let mut sc = scenario_for(target, name)?;
    if let Some(n) = steps {
        sc.steps = n;
    }
    let table = rules_at(&dir.join("rules.txt"))?;
    let harness = Harness::load_with(&dir, table, &dir.join("golden"))?;
    let inst = harness.structure(sc.kind)?;
    let start = inject(&inst, &sc)?;
    let watch = watch_cells(&sc, Some(&harness.store));
    let (frames, log) = history(
        &harness.ball,
        &start,
        &inst.orientation,
        &harness.table,
        sc.steps,
        (!watch.is_empty()).then_some(watch.as_slice()),
    )?;
    println!("{} ({}): {} steps", sc.key(), sc.kind, sc.steps);
    let mut ok = true;
    for o in check_expectations(&inst, &sc, &frames) {
        ok &= o.passed;
        println!("  {} {}", if o.passed { "ok  " } else { "FAIL" }, o.expectation);
    }
    if let Some(path) = trace_out {
        write_trace(path, &log, &harness.table)?;
        println!("trace written to {}", path.display());
    }
    Ok(if ok { 0 } else { 1 })
}

fn write_trace(path: &Path, log: &FiringLog, table: &RuleTable) -> Result<(), Failure> {
    write_out(path, &log.to_tsv(table))
}

fn verify_cmd(table: Option<&str>) -> Result<u8, Failure> {
    let harness = Harness::load(&assets_dir())?;
    match table {
        Some(name) => {
            let outcome = harness.verify_table_named(name)?;
            let check = hypeca_verify::Check {
                category: "table",
                name: name.to_string(),
                outcome,
            };
            println!("{check}");
            Ok(if check.outcome.passed() { 0 } else { 1 })
        }
        None => {
            let report = harness.verify_all();
            print!("{}", report.to_text());
            Ok(report.exit_code() as u8)
        }
    }
}

fn render_cmd(target: &Target, scenario: Option<&str>, time: usize, levels: u32, out: &Path) -> Result<u8, Failure> {
    let dir = assets_dir();
    let harness = Harness::load(&dir)?;
    let kind = match scenario {
        Some(name) => scenario_for(target, name)?.kind,
        None => StructureKind::from_family(&target.structure, target.colour)
            .ok_or_else(|| format!("{} has no colour", target.structure))?,
    };
    let inst = harness.structure(kind)?;
    let config = match scenario {
        Some(name) => {
            let sc = scenario_for(target, name)?;
            let start = inject(&inst, &sc)?;
            let (frames, _) = history(&harness.ball, &start, &inst.orientation, &harness.table, time, Some(&[]))?;
            frames.last().cloned().unwrap_or(start)
        }
        None => inst.config.clone(),
    };
    let mut highlights = BTreeMap::new();
    for (name, p) in &inst.paths {
        let h = Highlight::for_path(name).unwrap_or(Highlight::Marked);
        for &c in p {
            highlights.entry(c).or_insert(h);
        }
    }
    let layout = layout_ball(&build_ball(levels.min(STRUCTURE_LEVELS)));
    write_out(out, &render_frame(&layout, &config, &highlights))?;
    println!("{} tiles written to {}", layout.len(), out.display());
    Ok(0)
}

fn fit_cmd(golden_dir: Option<&Path>, asset_out: &Path) -> Result<u8, Failure> {
    let dir = assets_dir();
    let golden_dir = golden_dir.map(Path::to_path_buf).unwrap_or_else(|| dir.join("golden"));
    let table = rules_at(&dir.join("rules.txt"))?;
    let store = GoldenStore::load(&golden_dir)?;
    let scenarios = load_scenarios(&dir)?;
    let ball = build_ball(STRUCTURE_LEVELS);
    let mut assets = Vec::new();
    for family in FAMILIES {
        let outcome = fit_structure(&ball, &table, family, &scenarios, &store)?;
        println!(
            "{family}: {} milestones, {} oriented cells, {} ambiguous, {} unconstrained",
            outcome.asset.black.len(),
            outcome.asset.orient.len(),
            outcome.asset.ambiguous.len(),
            outcome.asset.unconstrained.len()
        );
        assets.push(outcome.asset);
    }
    let harness = Harness::load_with(&dir, table, &golden_dir)?.with_assets(assets.clone());
    let report = harness.verify_all();
    if !report.passed() {
        for c in report.failures() {
            println!("{c}");
        }
        println!("closed-loop check failed; nothing written");
        return Ok(1);
    }
    fs::create_dir_all(asset_out)?;
    for a in &assets {
        write_out(&asset_out.join(format!("{}.txt", a.structure)), &a.to_text())?;
    }
    println!("closed loop reproduces every table; assets written to {}", asset_out.display());
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Tiling { levels, out } => {
            let ball = build_ball(levels);
            let text = adjacency_text(&ball);
            match out {
                Some(p) => {
                    write_out(&p, &text)?;
                    println!("{} cells, {} levels, written to {}", ball.len(), ball.levels(), p.display());
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::RulesCheck { rules } => {
            let path = rules.unwrap_or_else(|| assets_dir().join("rules.txt"));
            let table = rules_at(&path)?;
            let report = table.check_coherence();
            println!("{} rules, {} conflicts", table.len(), report.conflicts.len());
            for (a, b) in &report.conflicts {
                println!("  conflict: rule {a} and rule {b}");
            }
            Ok(if report.conflicts.is_empty() { 0 } else { 1 })
        }
        Command::Run {
            target,
            scenario,
            steps,
            trace_out,
        } => run_cmd(&target, &scenario, steps, trace_out.as_deref()),
        Command::Verify { table, all: _ } => verify_cmd(table.as_deref()),
        Command::Render {
            target,
            scenario,
            time,
            levels,
            out,
        } => render_cmd(&target, scenario.as_deref(), time, levels, &out),
        Command::Fit { golden_dir, asset_out } => fit_cmd(golden_dir.as_deref(), &asset_out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
