use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use evograph_core::closedform::{bounds_report, default_delta, deleterious_upper_bound, moran_fixation};
use evograph_core::exactchain::exact_fixation;
use evograph_core::montecarlo::{estimate_fixation, estimate_one_to_two};
use evograph_core::trainkinetics::{expected_train_length, train_dp_oracle, train_length_bounds};
use evograph_core::{build_family, build_superstar, Error, GraphTopology, Placement, SimConfig, SuperstarSpec, UpdateRule};

use crate::args::{
    parse_placement, parse_rule, BoundsArgs, ExactArgs, Format, GraphArgs, OneToTwoArgs, OutputArgs, SimulateArgs,
    SweepArgs, SweepTask, TrainArgs,
};
use crate::grid::{parse_f64_grid, parse_list, parse_usize_grid};
use crate::report::{DpCheck, Params, Report, TBounds, CSV_COLUMNS};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::InvalidRegime { .. }) => 3,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(Error::InvalidRegime { .. }) => "invalid_regime",
            CliError::Core(_) => "invalid_parameter",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_line(&self) -> String {
        let message = match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        };
        let mut obj = serde_json::json!({ "error": self.kind(), "message": message.replace('\n', " ") });
        if let CliError::Core(Error::InvalidRegime { gamma }) = self {
            obj["gamma"] = serde_json::json!(gamma);
        }
        obj.to_string()
    }
}

type CliResult<T> = Result<T, CliError>;

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(report: &Report, out: &OutputArgs) -> CliResult<()> {
    let mut w = open_output(out.out.as_deref())?;
    match out.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, report).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(CSV_COLUMNS)?;
            c.write_record(report.csv_row())?;
            c.flush()?;
            return Ok(());
        }
    }
    w.flush()?;
    Ok(())
}

pub fn trainlen(a: &TrainArgs) -> CliResult<()> {
    emit(&trainlen_report(a.r, a.h)?, &a.output)
}

fn trainlen_report(r: f64, h: usize) -> CliResult<Report> {
    let params = Params { r: Some(r), h: Some(h), ..Params::default() };
    let mut rep = Report::new("trainlen", params);
    let t = expected_train_length(r, h)?;
    let dp = train_dp_oracle(r, h)?;
    rep.t = Some(t);
    rep.dp_check = Some(DpCheck { value: dp, agrees: (t - dp).abs() <= 1e-10 * t.max(1.0) });
    if r > 1.0 {
        let (lower, upper) = train_length_bounds(r, h)?;
        rep.t_bounds = Some(TBounds { lower, upper });
    }
    Ok(rep)
}

pub fn bounds(a: &BoundsArgs) -> CliResult<()> {
    emit(&bounds_job(a.r, a.b, a.l, a.h, a.delta)?, &a.output)
}

fn bounds_job(r: f64, b: usize, l: usize, h: usize, delta: Option<usize>) -> CliResult<Report> {
    let delta = delta.unwrap_or_else(|| default_delta(b));
    let params = Params { r: Some(r), b: Some(b), l: Some(l), h: Some(h), delta: Some(delta), ..Params::default() };
    let rep = Report::new("bounds", params);
    if r < 1.0 {
        return Ok(rep.with_deleterious(&deleterious_upper_bound(r, b, l, h, delta)?));
    }
    Ok(rep.with_bounds(&bounds_report(r, b, l, h, Some(delta))?))
}

fn build_graph(g: &GraphArgs) -> CliResult<(GraphTopology, Params)> {
    let mut params = Params::default();
    if let Some(path) = &g.graph {
        let text = std::fs::read_to_string(path)?;
        let graph = GraphTopology::from_json(&text)?;
        params.family = Some(format!("file:{}", path.display()));
        params.n = Some(graph.node_count());
        return Ok((graph, params));
    }
    let family = g.family.as_deref().ok_or_else(|| CliError::Usage("give --family or --graph".into()))?;
    let graph = if family == "superstar" {
        let (b, l, h) = match (g.b, g.l, g.h) {
            (Some(b), Some(l), Some(h)) => (b, l, h),
            _ => return Err(CliError::Usage("superstar needs --B, --L and --H".into())),
        };
        params.b = Some(b);
        params.l = Some(l);
        params.h = Some(h);
        build_superstar(SuperstarSpec::new(b, l, h)?)?
    } else {
        let n = g.n.ok_or_else(|| CliError::Usage(format!("family {family} needs --n")))?;
        build_family(family.parse()?, n)?
    };
    params.family = Some(family.to_string());
    params.n = Some(graph.node_count());
    Ok((graph, params))
}

pub fn exact(a: &ExactArgs) -> CliResult<()> {
    let (g, mut params) = build_graph(&a.graph)?;
    params.r = Some(a.r);
    params.rule = Some(a.rule.to_string());
    let x = exact_fixation(&g, a.r, a.rule)?;
    let moran = moran_fixation(a.r, g.node_count())?;
    emit(&Report::new("exact", params).with_exact(&x, moran), &a.output)
}

fn sim_config(r: f64, rule: UpdateRule, placement: Placement, seed: u64, max_steps: Option<u64>) -> SimConfig {
    let cfg = SimConfig::new(r).rule(rule).placement(placement).seed(seed);
    match max_steps {
        Some(m) => cfg.max_steps(m),
        None => cfg,
    }
}

fn run_params(mut params: Params, r: f64, rule: UpdateRule, placement: Placement, trials: u64, seed: u64, max_steps: Option<u64>) -> Params {
    params.r = Some(r);
    params.rule = Some(rule.to_string());
    params.placement = Some(placement.to_string());
    params.trials = Some(trials);
    params.seed = Some(seed);
    params.max_steps = max_steps;
    params
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let (g, params) = build_graph(&a.graph)?;
    let rep = simulate_job(&g, params, a.r, a.run.rule, a.placement, a.run.trials, a.run.seed, a.run.max_steps, a.output.timing)?;
    emit(&rep, &a.output)
}

#[allow(clippy::too_many_arguments)]
fn simulate_job(
    g: &GraphTopology,
    params: Params,
    r: f64,
    rule: UpdateRule,
    placement: Placement,
    trials: u64,
    seed: u64,
    max_steps: Option<u64>,
    timing: bool,
) -> CliResult<Report> {
    let cfg = sim_config(r, rule, placement, seed, max_steps);
    let est = estimate_fixation(g, &cfg, trials)?;
    let params = run_params(params, r, rule, placement, trials, seed, max_steps);
    Ok(Report::new("simulate", params).with_estimate(&est, timing))
}

pub fn one_to_two(a: &OneToTwoArgs) -> CliResult<()> {
    let rep = one_to_two_job(a.r, a.b, a.l, a.h, a.run.rule, a.placement, a.run.trials, a.run.seed, a.run.max_steps, a.output.timing)?;
    emit(&rep, &a.output)
}

#[allow(clippy::too_many_arguments)]
fn one_to_two_job(
    r: f64,
    b: usize,
    l: usize,
    h: usize,
    rule: UpdateRule,
    placement: Placement,
    trials: u64,
    seed: u64,
    max_steps: Option<u64>,
    timing: bool,
) -> CliResult<Report> {
    let g = build_superstar(SuperstarSpec::new(b, l, h)?)?;
    let cfg = sim_config(r, rule, placement, seed, max_steps);
    let est = estimate_one_to_two(&g, &cfg, trials)?;
    let base = Params { b: Some(b), l: Some(l), h: Some(h), n: Some(g.node_count()), family: Some("superstar".into()), ..Params::default() };
    let params = run_params(base, r, rule, placement, trials, seed, max_steps);
    Ok(Report::new("one-to-two", params).with_estimate(&est, timing))
}

/// One point of a sweep grid.
#[derive(Debug, Clone)]
struct Job {
    r: f64,
    b: Option<usize>,
    l: Option<usize>,
    h: Option<usize>,
    n: Option<usize>,
    rule: UpdateRule,
    placement: Placement,
}

fn optional_grid(text: Option<&str>) -> CliResult<Vec<Option<usize>>> {
    match text {
        None => Ok(vec![None]),
        Some(t) => Ok(parse_usize_grid(t).map_err(CliError::Usage)?.into_iter().map(Some).collect()),
    }
}

fn expand(a: &SweepArgs) -> CliResult<Vec<Job>> {
    let rs = parse_f64_grid(&a.r).map_err(CliError::Usage)?;
    let bs = optional_grid(a.b.as_deref())?;
    let ls = optional_grid(a.l.as_deref())?;
    let hs = optional_grid(a.h.as_deref())?;
    let ns = optional_grid(a.n.as_deref())?;
    let rules = parse_list(&a.rule, parse_rule).map_err(CliError::Usage)?;
    let placements = parse_list(&a.placement, parse_placement).map_err(CliError::Usage)?;
    let mut jobs = Vec::new();
    for &r in &rs {
        for &b in &bs {
            for &l in &ls {
                for &h in &hs {
                    for &n in &ns {
                        for &rule in &rules {
                            for &placement in &placements {
                                jobs.push(Job { r, b, l, h, n, rule, placement });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn need(v: Option<usize>, flag: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("this sweep needs --{flag}")))
}

/// Replica streams of job `i` start at `seed + i * 2^32`, far from other jobs.
fn job_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64) << 32)
}

fn run_job(a: &SweepArgs, job: &Job, index: usize) -> CliResult<Report> {
    let seed = job_seed(a.seed, index);
    match a.task {
        SweepTask::Trainlen => trainlen_report(job.r, need(job.h, "H")?),
        SweepTask::Bounds => bounds_job(job.r, need(job.b, "B")?, need(job.l, "L")?, need(job.h, "H")?, a.delta),
        SweepTask::OneToTwo => one_to_two_job(
            job.r,
            need(job.b, "B")?,
            need(job.l, "L")?,
            need(job.h, "H")?,
            job.rule,
            job.placement,
            a.trials,
            seed,
            a.max_steps,
            false,
        ),
        SweepTask::Simulate => {
            let graph = GraphArgs { family: a.family.clone(), n: job.n, b: job.b, l: job.l, h: job.h, graph: None };
            let (g, params) = build_graph(&graph)?;
            simulate_job(&g, params, job.r, job.rule, job.placement, a.trials, seed, a.max_steps, false)
        }
    }
}

fn task_name(t: SweepTask) -> &'static str {
    match t {
        SweepTask::Trainlen => "trainlen",
        SweepTask::Bounds => "bounds",
        SweepTask::Simulate => "simulate",
        SweepTask::OneToTwo => "one-to-two",
    }
}

/// Rows already present in a sweep output file.
fn completed_rows(path: &Path, format: Format) -> CliResult<usize> {
    if !path.exists() {
        return Ok(0);
    }
    let lines = BufReader::new(File::open(path)?)
        .lines()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .count();
    Ok(match format {
        Format::Csv => lines.saturating_sub(1),
        Format::Json => lines,
    })
}

pub fn sweep(a: &SweepArgs) -> CliResult<()> {
    let jobs = expand(a)?;
    if jobs.is_empty() {
        return Err(CliError::Usage("empty sweep grid".into()));
    }
    let done = match (&a.out, a.resume) {
        (Some(p), true) => completed_rows(p, a.format)?.min(jobs.len()),
        _ => 0,
    };
    eprintln!(
        "{}",
        serde_json::json!({ "task": task_name(a.task), "jobs": jobs.len(), "already_done": done })
    );
    let fresh = done == 0;
    let mut w: Box<dyn Write> = match &a.out {
        Some(p) if !fresh => Box::new(OpenOptions::new().append(true).open(p)?),
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    if fresh && a.format == Format::Csv {
        write_csv_line(&mut w, &CSV_COLUMNS.map(String::from))?;
    }
    for (i, job) in jobs.iter().enumerate().skip(done) {
        let report = match run_job(a, job, i) {
            Ok(r) => r,
            Err(CliError::Core(e)) => {
                // keep going; the row records why this point has no numbers
                let params = Params {
                    r: Some(job.r),
                    b: job.b,
                    l: job.l,
                    h: job.h,
                    n: job.n,
                    ..Params::default()
                };
                let mut rep = Report::new(task_name(a.task), params);
                rep.error = Some(CliError::Core(e).to_line());
                rep
            }
            Err(e) => return Err(e),
        };
        match a.format {
            Format::Csv => write_csv_line(&mut w, &report.csv_row())?,
            Format::Json => {
                serde_json::to_writer(&mut w, &report).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(w)?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn write_csv_line(w: &mut Box<dyn Write>, fields: &[String]) -> CliResult<()> {
    let mut c = csv::WriterBuilder::new().from_writer(Vec::new());
    c.write_record(fields)?;
    let bytes = c.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    w.write_all(&bytes)?;
    Ok(())
}
