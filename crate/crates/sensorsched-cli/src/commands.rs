use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use sensorsched::bandit::{tournament, PolicyRegistry, Scenario, SimSummary};
use sensorsched::cost::{CostFn, CostRegistry};
use sensorsched::dynamics::{boundary_fixed_points, christoffel_interval, itinerary_detail, threshold_word, ArmParams};
use sensorsched::index::{self, index_beta1, index_table, IndexRecord, LARGE_BETA};
use sensorsched::lqg::{lqg_grid_check, solve_lqg, LqgGridReport, LqgProblem, LqgSolution};
use sensorsched::oracle::{dp_cross_check, pcli_report, DPGrid, DpCrossCheck, PcliConfig, PcliReport};
use sensorsched::words::Word;

use crate::args::{ArmArgs, Format, IndexArgs, LqgArgs, SimulateArgs, VerifyArgs, WordArgs};
use crate::output::{emit, sig17, to_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] sensorsched::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{what}: {source}")]
    Json { what: String, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_internal() => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    emit(path.map(|p| p.as_path()), text).map_err(io_err(path.cloned().unwrap_or_else(|| "stdout".into())))
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    to_json(v).map_err(|source| CliError::Json { what: "serializing output".into(), source })
}

fn arm(a: &ArmArgs) -> Result<ArmParams> {
    let p = match (a.r, a.rho) {
        (Some(r), None) => ArmParams::new(r, a.a0, a.a1)?,
        (None, Some(rho)) => ArmParams::from_slope(rho, a.a0, a.a1)?,
        _ => return Err(CliError::Usage("give exactly one of --r and --rho".into())),
    };
    Ok(p.with_costs(a.c0, a.c1)?)
}

fn cost(spec: &str) -> Result<CostFn> {
    Ok(CostRegistry::builtin().parse(spec)?)
}

fn range(spec: &str, flag: &str) -> Result<Vec<f64>> {
    spec.split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("--{flag} expects numbers separated by ':', got `{spec}`")))
}

fn grid(spec: &str, flag: &str, log: bool) -> Result<Vec<f64>> {
    let v = range(spec, flag)?;
    let [lo, hi, n] = v[..] else {
        return Err(CliError::Usage(format!("--{flag} expects lo:hi:n, got `{spec}`")));
    };
    if !(n >= 2.0 && n.fract() == 0.0) {
        return Err(CliError::Usage(format!("--{flag}: point count must be an integer ≥ 2, got {n}")));
    }
    Ok(if log { index::log_grid(lo, hi, n as usize)? } else { index::linear_grid(lo, hi, n as usize)? })
}

pub const INDEX_HEADER: &str = "x,lambda,numerator,denominator,word,knife_edge";

/// x, λ, numerator, denominator, word, knife edge.
type IndexRow = (f64, f64, f64, f64, Option<Word>, bool);

fn index_csv(rows: &[IndexRow]) -> String {
    let mut out = format!("{INDEX_HEADER}\n");
    for (x, l, n, d, w, k) in rows {
        let w = w.as_ref().map(|w| w.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{w},{k}\n", sig17(*x), sig17(*l), sig17(*n), sig17(*d)));
    }
    out
}

pub fn index(a: &IndexArgs) -> Result<()> {
    let p = arm(&a.arm)?;
    let c = cost(&a.cost)?;
    let xs = match (&a.grid_log, &a.grid_lin, &a.x) {
        (Some(g), None, None) => grid(g, "grid-log", true)?,
        (None, Some(g), None) => grid(g, "grid-lin", false)?,
        (None, None, Some(x)) => x.clone(),
        _ => return Err(CliError::Usage("give one of --grid-log, --grid-lin or --x".into())),
    };
    if a.format == Format::Text {
        return Err(CliError::Usage("index writes csv or json".into()));
    }
    let text = if a.limit {
        let recs =
            xs.par_iter().map(|&x| index_beta1(&p, &c, x, a.periods)).collect::<sensorsched::Result<Vec<_>>>()?;
        match a.format {
            Format::Json => json(&recs)?,
            _ => index_csv(
                &recs
                    .iter()
                    .map(|r| (r.x, r.lambda, r.numerator, r.denominator, Some(r.word.clone()), false))
                    .collect::<Vec<_>>(),
            ),
        }
    } else {
        if a.beta > LARGE_BETA {
            eprintln!(
                "warning: beta = {} needs {} terms per sum; --limit gives the undiscounted index",
                a.beta,
                index::truncation_steps(a.beta, a.eps)
            );
        }
        let table = index_table(&p, &c, a.beta, &xs, a.eps)?;
        if !table.violations.is_empty() {
            eprintln!("warning: λ decreases at {} of {} grid points", table.violations.len(), xs.len());
        }
        match a.format {
            Format::Json => json(&table.records)?,
            _ => index_csv(
                &table
                    .records
                    .iter()
                    .map(|r: &IndexRecord| (r.x, r.lambda, r.numerator, r.denominator, r.word.clone(), r.knife_edge))
                    .collect::<Vec<_>>(),
            ),
        }
    };
    write_out(a.out.output.as_ref(), &text)
}

#[derive(Serialize)]
struct WordReport {
    x: f64,
    z: f64,
    itinerary: Word,
    knife_edges: Vec<usize>,
    threshold_word: Word,
    periodic: bool,
    interval: Option<(f64, f64)>,
}

pub fn word(a: &WordArgs) -> Result<()> {
    let p = arm(&a.arm)?;
    if !(a.x.is_finite() && a.x >= 0.0) {
        return Err(CliError::Usage(format!("--x must be finite and non-negative, got {}", a.x)));
    }
    let z = a.z.unwrap_or(a.x);
    let (itin, knife) = itinerary_detail(&p, a.x, z, a.len, true);
    let tw = threshold_word(&p, a.x, a.max_period)?;
    let interval = if !tw.periodic {
        None
    } else if tw.word.len() >= 2 {
        Some(christoffel_interval(&p, &tw.word)?)
    } else {
        let (y1, y0) = boundary_fixed_points(&p);
        Some(if tw.word.bit(0) { (0.0, y1) } else { (y0, f64::INFINITY) })
    };
    let rep = WordReport {
        x: a.x,
        z,
        itinerary: itin,
        knife_edges: knife,
        threshold_word: tw.word,
        periodic: tw.periodic,
        interval,
    };
    let text = match a.format {
        Format::Json => json(&rep)?,
        Format::Csv => return Err(CliError::Usage("word writes text or json".into())),
        Format::Text => {
            let knife = if rep.knife_edges.is_empty() {
                "none".to_string()
            } else {
                rep.knife_edges.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            };
            let mut t = format!("itinerary {}\nknife_edges {knife}\n", rep.itinerary);
            let kind = if rep.periodic { "periodic" } else { "uncertified" };
            t.push_str(&format!("threshold_word {} {kind}\n", rep.threshold_word));
            if let Some((lo, hi)) = rep.interval {
                t.push_str(&format!("interval {} {}\n", sig17(lo), sig17(hi)));
            }
            t
        }
    };
    write_out(a.out.output.as_ref(), &text)
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let raw = std::fs::read_to_string(&a.scenario).map_err(io_err(&a.scenario))?;
    let s: Scenario = serde_json::from_str(&raw)
        .map_err(|source| CliError::Json { what: format!("{}", a.scenario.display()), source })?;
    s.validate()?;
    let reg = PolicyRegistry::builtin();
    if let Some(bad) = a.policies.iter().find(|n| !reg.names().any(|k| k == n.as_str())) {
        let known = reg.names().collect::<Vec<_>>().join(", ");
        return Err(CliError::Usage(format!("unknown policy `{bad}` (known: {known})")));
    }
    let names: Vec<&str> = a.policies.iter().map(String::as_str).collect();
    let traces = tournament(&s, &names, &reg)?;
    if let Some(dir) = &a.trace_dir {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        for t in &traces {
            let path = dir.join(format!("{}.csv", t.summary.policy));
            std::fs::write(&path, t.to_csv()).map_err(io_err(&path))?;
        }
    }
    let summaries: Vec<&SimSummary> = traces.iter().map(|t| &t.summary).collect();
    write_out(a.out.output.as_ref(), &json(&summaries)?)
}

#[derive(Serialize)]
struct LqgOutput {
    #[serde(flatten)]
    solution: LqgSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<LqgGridReport>,
}

pub fn lqg(a: &LqgArgs) -> Result<()> {
    let prob = match &a.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(io_err(path))?;
            serde_json::from_str::<LqgProblem>(&raw)
                .map_err(|source| CliError::Json { what: format!("{}", path.display()), source })?
        }
        None => LqgProblem {
            a: a.a.unwrap_or_default(),
            b: a.b.unwrap_or_default(),
            d: a.d.unwrap_or_default(),
            f: a.f.unwrap_or_default(),
            beta: a.beta.unwrap_or_default(),
            sigma_x: a.sigma_x,
            sigma_y0: a.sigma_y0,
            sigma_y1: a.sigma_y1,
            c0: a.c0,
            c1: a.c1,
        },
    };
    prob.validate()?;
    let solution = solve_lqg(&prob)?;
    let check = if a.check { Some(lqg_grid_check(&prob, &solution, a.grid_points, 21)?) } else { None };
    let failed = check.as_ref().is_some_and(|c| !c.passed);
    write_out(a.out.output.as_ref(), &json(&LqgOutput { solution, check })?)?;
    if failed {
        return Err(sensorsched::Error::Internal("threshold policy is worse than the grid optimum".into()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    pcli: PcliReport,
    dp: Vec<DpCrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dp_skipped: Option<String>,
    passed: bool,
}

const DP_TOL: f64 = 1e-9;

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let p = arm(&a.arm)?;
    let c = cost(&a.cost)?;
    let r = range(&a.x_range, "x-range")?;
    let [x_lo, x_hi] = r[..] else {
        return Err(CliError::Usage(format!("--x-range expects lo:hi, got `{}`", a.x_range)));
    };
    let cfg = PcliConfig {
        x_lo,
        x_hi,
        work_samples: a.samples,
        grid_points: a.grid_points,
        seed: a.seed,
        ..PcliConfig::default()
    };
    let pcli = pcli_report(&p, &c, a.beta, &cfg)?;

    let (dp, dp_skipped) = match DPGrid::covering(&p, a.dp_points) {
        Ok(g) if a.dp_checks > 0 => {
            let (y1, y0) = boundary_fixed_points(&p);
            let k = a.dp_checks;
            let xs: Vec<f64> = (1..=k).map(|i| y1 + (y0 - y1) * i as f64 / (k + 1) as f64).collect();
            let checks = xs
                .par_iter()
                .map(|&x| dp_cross_check(&p, &c, a.beta, x, &g, DP_TOL))
                .collect::<sensorsched::Result<Vec<_>>>()?;
            (checks, None)
        }
        Ok(_) => (vec![], Some("no DP checks requested".to_string())),
        Err(e) => (vec![], Some(e.to_string())),
    };
    let broken = c.condition_c() && dp.iter().any(|d| !d.threshold_policies());
    let passed = pcli.passed && dp.iter().all(|d| d.passed && d.threshold_policies());
    write_out(a.out.output.as_ref(), &json(&VerifyReport { pcli, dp, dp_skipped, passed })?)?;
    if broken {
        return Err(sensorsched::Error::Internal("DP optimal policy is not a threshold policy".into()).into());
    }
    Ok(())
}
