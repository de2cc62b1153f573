use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use combing::io::{
    constraints_from_json, ledger_csv, mask_string, rate_to_json, region_from_json, region_to_json,
    state_from_json, state_to_json, table_from_json, table_to_json, to_canonical_json,
    vertices_csv, RegionReport,
};
use combing::{
    best_rate_over_parties, breeding_schedule, build_region, build_table, caratheodory_decompose,
    greedy_comb, rate_lower_bound, region_overlap, standard_state, CombingRegion,
    EntanglementVector, MembershipMode, PureState, StateKind, SubsetEntropyTable, Violation,
};
use serde_json::{json, Value};

use crate::{Cli, Command, Format, Mode};

#[derive(Debug)]
pub enum CliError {
    Domain(combing::Error),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.name(),
            CliError::Io(_) => "Io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => e.fmt(f),
            CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<combing::Error> for CliError {
    fn from(e: combing::Error) -> Self {
        CliError::Domain(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

enum Input {
    State(PureState),
    Table(SubsetEntropyTable),
    Region(RegionReport),
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Input> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(combing::Error::from)?;
    let has = |k: &str| value.get(k).is_some();
    if has("amplitudes") {
        Ok(Input::State(state_from_json(&text, false)?))
    } else if has("entropies") {
        Ok(Input::Table(table_from_json(&text)?))
    } else if has("vertices_Fprime") {
        Ok(Input::Region(region_from_json(&text)?))
    } else {
        Err(combing::Error::Parse(format!(
            "{}: not a state, table, or region file",
            path.display()
        ))
        .into())
    }
}

fn load_state(path: &Path) -> Result<PureState> {
    match load(path)? {
        Input::State(s) => Ok(s),
        _ => {
            Err(combing::Error::Parse(format!("{}: expected a state file", path.display())).into())
        }
    }
}

fn require_default_alice(alice: usize) -> Result<()> {
    if alice != 0 {
        return Err(combing::Error::PartyMismatch(
            "--alice needs a state file; tables and regions fix Alice already".into(),
        )
        .into());
    }
    Ok(())
}

fn table_for(path: &Path, alice: usize) -> Result<SubsetEntropyTable> {
    match load(path)? {
        Input::State(s) => Ok(build_table(&s.with_alice(alice)?)?),
        Input::Table(t) => {
            require_default_alice(alice)?;
            Ok(t)
        }
        Input::Region(_) => {
            Err(combing::Error::Parse("this command needs a state or table file".into()).into())
        }
    }
}

fn report_for(path: &Path, alice: usize) -> Result<RegionReport> {
    match load(path)? {
        Input::Region(r) => {
            require_default_alice(alice)?;
            Ok(r)
        }
        _ => Ok(RegionReport::new(build_region(&table_for(path, alice)?)?)),
    }
}

fn region_for(path: &Path, alice: usize, tol: Option<f64>) -> Result<CombingRegion> {
    let region = report_for(path, alice)?.region;
    Ok(match tol {
        Some(t) => region.with_tol(t),
        None => region,
    })
}

/// Write to `out` through a temporary file in the same directory, or to
/// standard output.
fn emit(out: Option<&PathBuf>, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn canonical(value: &Value) -> Result<String> {
    Ok(to_canonical_json(value)?)
}

fn check_len(region: &CombingRegion, point: &[f64]) -> Result<()> {
    if point.len() != region.m() {
        return Err(combing::Error::DimensionMismatch {
            expected: region.m(),
            got: point.len(),
        }
        .into());
    }
    Ok(())
}

fn witness_json(w: &Violation, m: usize) -> Value {
    match w {
        Violation::Halfspace { subset, lhs, bound } => json!({
            "kind": "halfspace",
            "subset": mask_string(*subset, m),
            "lhs": lhs,
            "bound": bound,
        }),
        other => serde_json::to_value(other).unwrap_or(Value::Null),
    }
}

fn points(v: &[EntanglementVector]) -> Vec<Vec<f64>> {
    v.iter().map(|e| e.values().to_vec()).collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(args) => {
            let kind: StateKind = args.kind.parse()?;
            let state = standard_state(kind, args.m, args.local_dim, args.seed)?;
            emit(args.out.as_ref(), state_to_json(&state)?)
        }
        Command::Table(input) => {
            let table = table_for(&input.input, input.alice)?;
            emit(input.out.as_ref(), table_to_json(&table)?)
        }
        Command::Region { input, format } => {
            let report = report_for(&input.input, input.alice)?;
            let text = match format {
                Format::Json => region_to_json(&report)?,
                Format::Csv => vertices_csv(&report.region),
            };
            emit(input.out.as_ref(), text)
        }
        Command::Member { input, point, mode } => {
            let region = region_for(&input.input, input.alice, cli.tol)?;
            check_len(&region, point)?;
            let mode_enum = match mode {
                Mode::Exact => MembershipMode::ExactRegion,
                Mode::Down => MembershipMode::DownClosure,
            };
            let verdict = region.contains(&EntanglementVector(point.clone()), mode_enum);
            let body = json!({
                "inside": verdict.inside,
                "mode": match mode { Mode::Exact => "exact_region", Mode::Down => "down_closure" },
                "point": point,
                "witness": verdict.witness.as_ref().map(|w| witness_json(w, region.m())),
            });
            emit(input.out.as_ref(), canonical(&body)?)
        }
        Command::Volume(input) => {
            let report = report_for(&input.input, input.alice)?;
            let body = json!({
                "volume": report.volume,
                "dimension": report.dimension,
                "degenerate": report.degenerate,
            });
            emit(input.out.as_ref(), canonical(&body)?)
        }
        Command::Comb { input, order } => {
            let table = table_for(&input.input, input.alice)?;
            let order = order
                .clone()
                .unwrap_or_else(|| (1..=table.m()).rev().collect());
            let (vector, steps) = greedy_comb(&table, &order)?;
            let body = json!({
                "order": order,
                "vector": vector.values(),
                "s_A": table.s_a(),
                "steps": steps,
            });
            emit(input.out.as_ref(), canonical(&body)?)
        }
        Command::Decompose { input, point } => {
            let region = region_for(&input.input, input.alice, cli.tol)?;
            let d = caratheodory_decompose(&region, &EntanglementVector(point.clone()))?;
            let body = json!({
                "target": point,
                "vertices": points(&d.vertices),
                "weights": d.weights,
            });
            emit(input.out.as_ref(), canonical(&body)?)
        }
        Command::Ledger {
            input,
            point,
            n0,
            rounds,
            integer_block,
            format,
        } => {
            let region = region_for(&input.input, input.alice, cli.tol)?;
            let d = caratheodory_decompose(&region, &EntanglementVector(point.clone()))?;
            let report = breeding_schedule(&d, *n0, *rounds, *integer_block)?;
            let text = match format {
                Format::Csv => ledger_csv(&report),
                Format::Json => to_canonical_json(&report)?,
            };
            emit(input.out.as_ref(), text)
        }
        Command::Rate {
            source,
            target,
            alice,
            best,
            out,
        } => {
            let source = load_state(source)?;
            let target = load_state(target)?;
            let bound = if *best {
                best_rate_over_parties(&source, &target)?
            } else {
                rate_lower_bound(&source, &target, *alice)?
            };
            emit(out.as_ref(), rate_to_json(&bound, source.bob_count())?)
        }
        Command::Overlap { input, constraints } => {
            let region = region_for(&input.input, input.alice, cli.tol)?;
            let list = constraints_from_json(&read(constraints)?)?;
            let o = region_overlap(&region, &list)?;
            let body = json!({
                "feasible": o.feasible,
                "witness": o.witness.map(|w| w.values().to_vec()),
                "margin": o.margin,
            });
            emit(input.out.as_ref(), canonical(&body)?)
        }
    }
}
