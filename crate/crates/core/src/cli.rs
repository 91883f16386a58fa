//! Command-line driver: binds instances to experiments and writes CSV.
//!
//! Exit codes: 0 all checks passed, 1 a property was violated (a witness
//! row is printed), 2 usage error or unknown instance, 3 an expected limit
//! did not converge.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::axioms::verify_axioms;
use crate::csv::Table;
use crate::differential::{check_equivalence, check_op_differentiable, check_tangent_isomorphism, pansu_derivative};
use crate::error::{Error, Result};
use crate::instances::{build_instance, double_group, Group, Instance, PointMap, REGISTRY};
use crate::limit::{LimitConfig, ScaleSchedule, DEFAULT_CAUCHY_TOL};
use crate::metric::{gh_exact_small, gh_upper_bound, sample_profile, tangent_convergence_table, EXACT_SIZE_LIMIT};
use crate::point::{Point, Scale};
use crate::sampling::{box_point, rng, BaseSampling, TripleSampler};
use crate::tangent::{check_conical_group, TangentOps};
use crate::trees::{
    equivalent, eval_tree, normalize_with_steps, parse_assignment, parse_tree, render_tree, Status,
    WITNESS_CSV_HEADER,
};

#[derive(Parser, Debug)]
#[command(name = "dilatation", version, about = "Dilatation structures: symbolic identities and numerical limit checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the experiment subcommands.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Instance spec, e.g. `heisenberg:n=1`
    #[arg(long, default_value = "euclidean:n=3")]
    pub instance: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First scale; 0.1 by default, 0.01 for `tangent`
    #[arg(long)]
    pub eps_start: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub eps_ratio: f64,
    /// Number of scales; 10 by default, 16 for `tangent`
    #[arg(long)]
    pub eps_count: Option<usize>,
    /// Sample count; each subcommand documents its default
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Basepoint as comma-separated coordinates
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps_start {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidParameter(format!("--eps-start {e} not in (0, 1)")));
            }
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("--eps-ratio {} not in (0, 1)", self.eps_ratio)));
        }
        if self.samples == Some(0) {
            return Err(Error::InvalidParameter("--samples must be >= 1".into()));
        }
        Ok(())
    }

    fn schedule(&self) -> Result<ScaleSchedule> {
        self.schedule_or(0.1, 10)
    }

    fn schedule_or(&self, start: f64, count: usize) -> Result<ScaleSchedule> {
        ScaleSchedule::new(
            self.eps_start.unwrap_or(start),
            self.eps_ratio,
            self.eps_count.unwrap_or(count),
        )
    }

    fn limit_config(&self) -> Result<LimitConfig> {
        Ok(LimitConfig::new(self.schedule()?, DEFAULT_CAUCHY_TOL, true))
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn basepoint(&self, dim: usize) -> Result<Option<Point>> {
        let Some(text) = &self.point else {
            return Ok(None);
        };
        let p: Point = text.parse()?;
        if p.dim() != dim {
            return Err(Error::Dimension { expected: dim, got: p.dim() });
        }
        Ok(Some(p))
    }

    fn basepoint_or_origin(&self, dim: usize) -> Result<Point> {
        Ok(self.basepoint(dim)?.unwrap_or_else(|| Point::zeros(dim)))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symbolic operations on dilatation trees
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Axioms A0–A4 on sampled pairs at `--point`, the origin by default (default 100 samples)
    Verify(RunConfig),
    /// Tangent-convergence table (1/ε)|d − dˣ| over the schedule (default 20 points)
    Converge(RunConfig),
    /// Conical-group laws of the tangent operations at a point (default 20 samples)
    Tangent(RunConfig),
    /// Gromov–Hausdorff estimate between two metric profiles (default 20 points)
    Gh {
        #[command(flatten)]
        run: RunConfig,
        /// Second instance; defaults to the first
        #[arg(long)]
        other: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Scale of the second profile; defaults to `--eps`
        #[arg(long)]
        other_eps: Option<f64>,
    },
    /// Distance matrix of a metric profile (default 20 points)
    Profile {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Derivative of a named map along axis directions plus sampled ones (default 2)
    Pansu {
        #[command(flatten)]
        run: RunConfig,
        /// identity, square, chart:a=…, left-translation:g=…, right-translation:g=…
        #[arg(long)]
        map: String,
        /// Target instance; defaults to `--instance`
        #[arg(long)]
        other: Option<String>,
    },
    /// Equivalence of two structures on one space (default 10 samples)
    Equiv {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        other: String,
    },
    /// Differentiability of the group operation on the double group (default 20 samples)
    Opdiff(RunConfig),
}

#[derive(Subcommand, Debug)]
pub enum TreeCommand {
    /// Normal form of a tree
    Normalize {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two trees denote the same map
    Prove {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        /// Model used for refutation trials; euclidean:n=1 and heisenberg:n=1 when absent
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a tree in an instance
    Eval {
        #[arg(long)]
        tree: String,
        #[arg(long, default_value = "euclidean:n=1")]
        instance: String,
        /// Leaf values, e.g. `x=0;u=1`
        #[arg(long, allow_hyphen_values = true)]
        assign: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
    NoConvergence,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
            Outcome::NoConvergence => 3,
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code. CSV goes to `--out` or `stdout`; diagnostics go
/// to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli.command) {
        Ok((outcome, table, out)) => {
            let written = match out {
                Some(path) => File::create(&path).and_then(|f| table.write_to(f)),
                None => table.write_to(&mut *stdout),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            outcome.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::UnknownInstance(_) => {
                    let _ = writeln!(stderr, "known instances:");
                    for s in REGISTRY {
                        let _ = writeln!(stderr, "  {s}");
                    }
                    2
                }
                Error::LimitEvaluation { .. } => 3,
                _ => 2,
            }
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

type Executed = (Outcome, Table, Option<PathBuf>);

fn execute(cmd: Command) -> Result<Executed> {
    match cmd {
        Command::Tree(t) => tree(t),
        Command::Verify(run) => verify(run),
        Command::Converge(run) => converge(run),
        Command::Tangent(run) => tangent(run),
        Command::Gh {
            run,
            other,
            eps,
            other_eps,
        } => gh(run, other, eps, other_eps),
        Command::Profile { run, eps } => profile(run, eps),
        Command::Pansu { run, map, other } => pansu(run, &map, other),
        Command::Equiv { run, other } => equiv(run, &other),
        Command::Opdiff(run) => opdiff(run),
    }
}

fn instance(run: &RunConfig) -> Result<Instance> {
    run.validate()?;
    build_instance(&run.instance)
}

fn tree(cmd: TreeCommand) -> Result<Executed> {
    match cmd {
        TreeCommand::Normalize { tree, out } => {
            let t = parse_tree(&tree)?;
            let (nf, steps) = normalize_with_steps(&t);
            let mut table = Table::new(&["input", "normal_form", "rewrite_steps"]);
            table.push(vec![render_tree(&t), render_tree(&nf), steps.to_string()]);
            Ok((Outcome::Pass, table, out))
        }
        TreeCommand::Prove {
            lhs,
            rhs,
            instance,
            samples,
            seed,
            out,
        } => {
            let (l, r) = (parse_tree(&lhs)?, parse_tree(&rhs)?);
            let specs: Vec<String> = match instance {
                Some(s) => vec![s],
                None => vec!["euclidean:n=1".into(), "heisenberg:n=1".into()],
            };
            let models = specs
                .iter()
                .map(|s| build_instance(s).map(|i| i.ds))
                .collect::<Result<Vec<_>>>()?;
            let v = equivalent(&l, &r, &models, samples, seed)?;
            let mut table = Table::new(&["status", "rewrite_steps", "trials_run", "trials_skipped"]);
            table.push(vec![
                v.status.to_string(),
                v.rewrite_steps.to_string(),
                v.trials_run.to_string(),
                v.trials_skipped.to_string(),
            ]);
            if let Some(w) = &v.witness {
                table.push(WITNESS_CSV_HEADER.split(',').map(String::from).collect());
                table.push(vec![
                    w.instance.clone(),
                    w.eps.to_string(),
                    crate::trees::format_assignment(&w.assignment),
                    w.gap.to_string(),
                ]);
            }
            let outcome = match v.status {
                Status::Proved => Outcome::Pass,
                Status::Refuted => Outcome::Violation,
                Status::Unknown => Outcome::NoConvergence,
            };
            Ok((outcome, table, out))
        }
        TreeCommand::Eval {
            tree,
            instance,
            assign,
            eps,
            out,
        } => {
            let t = parse_tree(&tree)?;
            let inst = build_instance(&instance)?;
            let assignment: BTreeMap<String, Point> = parse_assignment(&assign)?;
            for (k, p) in &assignment {
                if p.dim() != inst.ds.dim() {
                    return Err(Error::InvalidParameter(format!(
                        "leaf `{k}` has {} coordinates, {} expects {}",
                        p.dim(),
                        instance,
                        inst.ds.dim()
                    )));
                }
            }
            let value = eval_tree(&t, inst.ds.as_ref(), &assignment, Scale::new(eps)?)?;
            let mut table = Table::new(&["tree", "epsilon", "value"]);
            table.push(vec![render_tree(&t), eps.to_string(), value.join(";")]);
            Ok((Outcome::Pass, table, out))
        }
    }
}

fn sampler(run: &RunConfig, dim: usize, default_count: usize) -> Result<TripleSampler> {
    let count = run.samples_or(default_count);
    Ok(match run.basepoint(dim)? {
        Some(p) => TripleSampler::at(p, 0.5, count, run.seed),
        None => TripleSampler::new(dim, count, run.seed),
    })
}

fn verify(run: RunConfig) -> Result<Executed> {
    let inst = instance(&run)?;
    let x = run.basepoint_or_origin(inst.ds.dim())?;
    let s = TripleSampler::at(x, 0.5, run.samples_or(100), run.seed);
    let report = verify_axioms(inst.ds.as_ref(), &s, &run.schedule()?);
    let mut table = report.to_table();
    let outcome = if report.exact_axioms_hold(run.tol) {
        Outcome::Pass
    } else {
        let worst = report
            .rows
            .iter()
            .filter(|r| matches!(r.quantity, "A1" | "A1-unit" | "A0-inverse" | "A2"))
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("rows exist");
        table.push(vec![
            "witness".into(),
            worst.quantity.into(),
            worst.value.to_string(),
            format!("eps={}", worst.eps),
            format!("seed={};samples={}", run.seed, s.count),
        ]);
        Outcome::Violation
    };
    Ok((outcome, table, run.out))
}

fn converge(run: RunConfig) -> Result<Executed> {
    let inst = instance(&run)?;
    let x = run.basepoint_or_origin(inst.ds.dim())?;
    let eps: Vec<f64> = run.schedule()?.scales().iter().map(|e| e.value()).collect();
    let rows = tangent_convergence_table(
        inst.ds.as_ref(),
        &x,
        &eps,
        run.samples_or(20),
        run.seed,
        &run.limit_config()?,
    )?;
    let mut table = Table::new(&["epsilon", "sup_defect", "defect_over_epsilon"]);
    for (e, d) in &rows {
        table.push(vec![e.to_string(), d.to_string(), (d / e).to_string()]);
    }
    let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let last = rows.last().map_or(0.0, |r| r.1);
    let outcome = if last <= run.tol || decreasing {
        Outcome::Pass
    } else {
        Outcome::NoConvergence
    };
    Ok((outcome, table, run.out))
}

fn tangent(run: RunConfig) -> Result<Executed> {
    let inst = instance(&run)?;
    let x = run.basepoint_or_origin(inst.ds.dim())?;
    let fine = LimitConfig::fine();
    let config = LimitConfig::new(
        run.schedule_or(fine.schedule.start().value(), fine.schedule.count())?,
        DEFAULT_CAUCHY_TOL,
        true,
    );
    let ops = TangentOps::new(inst.ds.clone(), x.clone(), config);
    let s = TripleSampler::at(x, 0.5, run.samples_or(20), run.seed);
    let report = check_conical_group(&ops, &s)?;
    let mut table = report.to_table();
    let outcome = match report.verdict(run.tol) {
        Some(true) => Outcome::Pass,
        None => Outcome::NoConvergence,
        Some(false) => {
            let worst = report
                .entries
                .iter()
                .max_by(|a, b| a.max_defect.total_cmp(&b.max_defect))
                .expect("entries exist");
            table.push(vec![
                "witness".into(),
                worst.property.into(),
                worst.max_defect.to_string(),
                format!("seed={};samples={}", run.seed, report.samples),
            ]);
            Outcome::Violation
        }
    };
    Ok((outcome, table, run.out))
}

fn gh(run: RunConfig, other: Option<String>, eps: f64, other_eps: Option<f64>) -> Result<Executed> {
    let inst = instance(&run)?;
    let second = match &other {
        Some(spec) => build_instance(spec)?,
        None => inst.clone(),
    };
    let dim = inst.ds.dim();
    if second.ds.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: second.ds.dim(),
        });
    }
    let x = run.basepoint_or_origin(dim)?;
    let resolution = run.samples_or(20);
    let p1 = sample_profile(inst.ds.as_ref(), &x, Scale::new(eps)?, resolution, run.seed)?;
    let p2 = sample_profile(
        second.ds.as_ref(),
        &x,
        Scale::new(other_eps.unwrap_or(eps))?,
        resolution,
        run.seed,
    )?;
    let upper = gh_upper_bound(&p1, &p2, run.seed);
    let mesh = p1.mesh().max(p2.mesh());
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec!["points".into(), format!("{};{}", p1.len(), p2.len())]);
    table.push(vec!["mesh".into(), mesh.to_string()]);
    table.push(vec!["upper_bound".into(), upper.to_string()]);
    if p1.len() + p2.len() <= EXACT_SIZE_LIMIT {
        table.push(vec!["exact".into(), gh_exact_small(&p1, &p2)?.to_string()]);
    }
    let outcome = if upper <= run.tol.max(2.0 * mesh) {
        Outcome::Pass
    } else {
        table.push(vec![
            "witness".into(),
            format!("upper_bound={upper};bound={}", run.tol.max(2.0 * mesh)),
        ]);
        Outcome::Violation
    };
    Ok((outcome, table, run.out))
}

fn profile(run: RunConfig, eps: f64) -> Result<Executed> {
    let inst = instance(&run)?;
    let x = run.basepoint_or_origin(inst.ds.dim())?;
    let p = sample_profile(inst.ds.as_ref(), &x, Scale::new(eps)?, run.samples_or(20), run.seed)?;
    Ok((Outcome::Pass, p.to_table(), run.out))
}

/// Builds a named map on the points of `inst`.
pub fn named_map(spec: &str, inst: &Instance) -> Result<PointMap> {
    let group = || {
        inst.group
            .clone()
            .ok_or_else(|| Error::InvalidParameter(format!("map `{spec}` needs a group instance")))
    };
    let element = |text: &str, g: &Group| -> Result<Point> {
        let p: Point = text.parse()?;
        if p.dim() != g.dim() {
            return Err(Error::Dimension {
                expected: g.dim(),
                got: p.dim(),
            });
        }
        Ok(p)
    };
    if spec == "identity" {
        return Ok(Arc::new(|p: &Point| p.clone()));
    }
    if spec == "square" {
        return Ok(Arc::new(|p: &Point| Point(p.0.iter().map(|t| t * t).collect())));
    }
    if let Some(a) = spec.strip_prefix("chart:a=") {
        let a: f64 = a
            .parse()
            .map_err(|_| Error::UnknownMap(spec.to_string()))?;
        return Ok(Arc::new(move |p: &Point| Point(p.0.iter().map(|t| t + a * t.sin()).collect())));
    }
    if let Some(g_text) = spec.strip_prefix("left-translation:g=") {
        let g = group()?;
        let h = element(g_text, &g)?;
        return Ok(Arc::new(move |p: &Point| g.mul(&h, p)));
    }
    if let Some(g_text) = spec.strip_prefix("right-translation:g=") {
        let g = group()?;
        let h = element(g_text, &g)?;
        return Ok(Arc::new(move |p: &Point| g.mul(p, &h)));
    }
    Err(Error::UnknownMap(spec.to_string()))
}

fn pansu(run: RunConfig, map: &str, other: Option<String>) -> Result<Executed> {
    let inst = instance(&run)?;
    let dst = match &other {
        Some(spec) => build_instance(spec)?,
        None => inst.clone(),
    };
    let f = named_map(map, &inst)?;
    let dim = inst.ds.dim();
    let x = run.basepoint_or_origin(dim)?;
    let mut directions: Vec<Point> = (0..dim)
        .map(|i| {
            let mut u = x.clone();
            u.0[i] += 1.0;
            u
        })
        .collect();
    let mut r = rng(run.seed);
    directions.extend((0..run.samples_or(2)).map(|_| box_point(&mut r, &x, 1.0)));
    let est = pansu_derivative(f.as_ref(), inst.ds.as_ref(), dst.ds.as_ref(), &x, &directions, &run.limit_config()?)?;
    let mut table = est.to_table();
    let outcome = match est.morphism_defect {
        None => Outcome::NoConvergence,
        Some(m) if m <= run.tol => Outcome::Pass,
        Some(m) => {
            table.push(vec![
                "witness".into(),
                format!("morphism_defect={m}"),
                format!("seed={}", run.seed),
            ]);
            Outcome::Violation
        }
    };
    Ok((outcome, table, run.out))
}

fn equiv(run: RunConfig, other: &str) -> Result<Executed> {
    let inst = instance(&run)?;
    let bar = build_instance(other)?;
    let dim = inst.ds.dim();
    if bar.ds.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: bar.ds.dim(),
        });
    }
    let s = sampler(&run, dim, 10)?;
    let config = run.limit_config()?;
    let report = check_equivalence(inst.ds.as_ref(), bar.ds.as_ref(), &s, &config)?;
    let mut table = report.to_table();
    let outcome = match report.verdict(run.tol) {
        Some(true) => {
            let x = match &s.base {
                BaseSampling::Fixed(p) => p.clone(),
                BaseSampling::Box { center, .. } => center.clone(),
            };
            let iso = check_tangent_isomorphism(inst.ds.as_ref(), bar.ds.as_ref(), &x, &s, &config)?;
            table.push(vec!["tangent-isomorphism".into(), iso.to_string()]);
            if iso <= run.tol {
                Outcome::Pass
            } else {
                table.push(vec!["witness".into(), format!("basepoint={}", x.join(";")), iso.to_string()]);
                Outcome::Violation
            }
        }
        Some(false) => match report.entries.iter().find_map(|e| e.growth.clone().map(|g| (e, g))) {
            Some((entry, growth)) => {
                let which = if entry.q_divergent { "Q" } else { "P" };
                for (e, v) in &growth.table {
                    table.push(vec![
                        format!("growth-{which}"),
                        entry.basepoint.join(";"),
                        e.to_string(),
                        v.join(";"),
                    ]);
                }
                Outcome::NoConvergence
            }
            None => {
                let worst = report
                    .entries
                    .iter()
                    .max_by(|a, b| a.q_defect.max(a.p_defect).total_cmp(&b.q_defect.max(b.p_defect)))
                    .expect("entries exist");
                table.push(vec![
                    "witness".into(),
                    worst.basepoint.join(";"),
                    worst.q_defect.to_string(),
                    worst.p_defect.to_string(),
                ]);
                Outcome::Violation
            }
        },
        None => Outcome::NoConvergence,
    };
    Ok((outcome, table, run.out))
}

fn opdiff(run: RunConfig) -> Result<Executed> {
    run.validate()?;
    let spec = run.instance.strip_prefix("double:").unwrap_or(&run.instance);
    let inst = build_instance(spec)?;
    let g = inst
        .group
        .clone()
        .ok_or_else(|| Error::InvalidParameter(format!("`{spec}` is not a group instance")))?;
    let dg = double_group(g.clone());
    let s = TripleSampler::new(g.dim(), run.samples_or(20), run.seed);
    let report = check_op_differentiable(&dg, &s, &run.schedule()?, &LimitConfig::fine())?;
    let mut table = report.to_table();
    let first_order = report.decay_ratios().iter().all(|&r| r >= 1.5);
    let outcome = if report.identity_defect <= run.tol && (report.max_defect() <= run.tol || first_order) {
        Outcome::Pass
    } else {
        let (e, d) = report
            .defects
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0.0, 0.0));
        table.push(vec!["witness".into(), format!("eps={e};defect={d}"), format!("seed={}", run.seed)]);
        Outcome::Violation
    };
    Ok((outcome, table, run.out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("dilatation").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn prove_prop_3() {
        let (code, out, _) = run_args(&[
            "tree",
            "prove",
            "--lhs",
            "(b (o x u) (o x (b x (o (o x u) y))))",
            "--rhs",
            "y",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("Proved"));
    }

    #[test]
    fn refutation_prints_witness() {
        let (code, out, _) = run_args(&[
            "tree",
            "prove",
            "--lhs",
            "(b x (o (b x (o (o x u) v)) w))",
            "--rhs",
            "(b x (o (o x u) (b x (o (o x v) w))))",
        ]);
        assert_eq!(code, 1, "{out}");
        assert!(out.contains("Refuted") && out.contains(WITNESS_CSV_HEADER));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        let (code, _, err) = run_args(&["verify", "--instance", "nowhere"]);
        assert_eq!(code, 2);
        assert!(err.contains("heisenberg:n=1"));
        assert_eq!(run_args(&["verify", "--eps-ratio", "1.5"]).0, 2);
        assert_eq!(run_args(&["tree", "normalize", "--tree", "(o x"]).0, 2);
    }

    #[test]
    fn eval_and_normalize() {
        let (code, out, _) = run_args(&["tree", "eval", "--tree", "(o x u)", "--assign", "x=0;u=-2", "--eps", "0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "tree,epsilon,value\n(o x u),0.5,-1\n");
        let (code, out, _) = run_args(&["tree", "normalize", "--tree", "(o x (b x u))"]);
        assert_eq!(code, 0);
        assert_eq!(out, "input,normal_form,rewrite_steps\n(o x (b x u)),u,1\n");
    }

    #[test]
    fn right_translation_diverges() {
        let (code, out, _) = run_args(&["pansu", "--instance", "heisenberg:n=1", "--map", "right-translation:g=1,0,0"]);
        assert_eq!(code, 3, "{out}");
        assert!(out.contains("divergent"));
        let (code, _, _) = run_args(&["pansu", "--instance", "heisenberg:n=1", "--map", "left-translation:g=1,0,0"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn square_map() {
        let (code, out, _) = run_args(&["pansu", "--instance", "euclidean:n=1", "--map", "square", "--point", "1"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("1,2,limit,3.0000000000"), "{out}");
    }

    #[test]
    fn equivalence_commands() {
        let (code, _, _) = run_args(&["equiv", "--instance", "euclidean:n=1", "--other", "chart-sine:a=0.1", "--point", "0", "--tol", "1e-3"]);
        assert_eq!(code, 0);
        let (code, out, _) = run_args(&["equiv", "--instance", "euclidean:n=2", "--other", "degenerate-plane"]);
        assert_eq!(code, 3);
        assert!(out.contains("growth-Q"));
    }

    #[test]
    fn group_commands() {
        assert_eq!(run_args(&["opdiff", "--instance", "heisenberg:n=1"]).0, 0);
        assert_eq!(run_args(&["opdiff", "--instance", "iso-heisenberg"]).0, 0);
        assert_eq!(run_args(&["tangent", "--instance", "heisenberg:n=1"]).0, 0);
        assert_eq!(run_args(&["opdiff", "--instance", "euclidean:n=2"]).0, 2);
    }

    #[test]
    fn metric_commands() {
        let (code, out, _) = run_args(&["profile", "--instance", "euclidean:n=1", "--samples", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,basepoint\n3,0\n"));
        assert_eq!(run_args(&["gh", "--instance", "heisenberg:n=1", "--samples", "12", "--other-eps", "0.25"]).0, 0);
        assert_eq!(
            run_args(&["converge", "--instance", "chart-sine:a=0.1", "--point", "1", "--eps-count", "4", "--samples", "8"]).0,
            0
        );
    }

    #[test]
    fn output_is_deterministic() {
        let args = ["verify", "--instance", "snowflake:alpha=0.5", "--samples", "30", "--seed", "3"];
        assert_eq!(run_args(&args).1, run_args(&args).1);
    }
}
