use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use nalgebra::DVector;
use ratio_lasso::experiments::plot::{energy_svg, spectrum_svg, stem_svg};
use ratio_lasso::experiments::{
    emit_plots, emit_report, parse_run_settings, recovery_error, run_benchmark,
    synthesize_instance, ExperimentConfig, ModelSelection, RunSettings,
};
use ratio_lasso::graph::{build_laplacian, save_edge_list, WeightedGraph};
use ratio_lasso::solvers::{energy, solve, trace_csv, TraceEntry};
use ratio_lasso::spectral::{eigendecompose, spectrum_csv};

/// Sparse recovery of graph signals with the l1 and l1/l2 Lasso models.
#[derive(Parser)]
#[command(name = "ratio-lasso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a community graph and write it as an edge list.
    GenGraph(Flags),
    /// Write the Laplacian spectrum of a graph as CSV and SVG.
    Spectrum(Flags),
    /// Recover a synthetic sparse spectrum from noisy measurements.
    Recover(Flags),
    /// Recover from measurements with a fraction removed (default 0.4).
    Inpaint(Flags),
    /// Sweep lambda over seeded trials and write the report and plots.
    Bench(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// JSON file with any of the flags below, keys spelled as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file to use instead of a generated graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    communities: Option<usize>,
    /// Fraction of each node's expected degree that leaves its community.
    #[arg(long)]
    mixing: Option<f64>,
    #[arg(long)]
    mean_degree: Option<f64>,
    /// Fraction of nonzero spectral coefficients.
    #[arg(long)]
    sparsity: Option<f64>,
    /// Standard deviation of the spectral noise.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated lambda values.
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long)]
    mask_fraction: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// l1, l1l2 or both.
    #[arg(long)]
    model: Option<ModelSelection>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    max_outer: Option<usize>,
    #[arg(long)]
    max_inner: Option<usize>,
    /// Relative energy change that stops the ratio solver.
    #[arg(long)]
    tol: Option<f64>,
}

impl Flags {
    /// Settings file (if any) overridden by the flags given.
    fn settings(self) -> Result<RunSettings> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let mut s = parse_run_settings(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                // relative paths in the file are relative to the file
                let base = path.parent().unwrap_or(Path::new(""));
                for p in [&mut s.graph, &mut s.out_dir].into_iter().flatten() {
                    if p.is_relative() {
                        *p = base.join(&*p);
                    }
                }
                s
            }
            None => RunSettings::default(),
        };
        let flags = RunSettings {
            graph: self.graph,
            nodes: self.nodes,
            communities: self.communities,
            mixing: self.mixing,
            mean_degree: self.mean_degree,
            sparsity: self.sparsity,
            sigma: self.sigma,
            lambda: self.lambda,
            lambda_grid: self.lambda_grid,
            mask_fraction: self.mask_fraction,
            trials: self.trials,
            seed: self.seed,
            model: self.model,
            out_dir: self.out_dir,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            tol: self.tol,
        };
        Ok(file.overridden_by(flags))
    }
}

fn out_dir(s: &RunSettings) -> Result<PathBuf> {
    let dir = s.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_graph(s: &RunSettings) -> Result<WeightedGraph> {
    Ok(s.graph_source().load()?)
}

fn gen_graph(s: RunSettings) -> Result<()> {
    if s.graph.is_some() {
        bail!("gen-graph generates a graph; --graph is an input for the other commands");
    }
    let g = load_graph(&s)?;
    let path = out_dir(&s)?.join("graph.edges");
    save_edge_list(&g, &path)?;
    println!(
        "wrote {} ({} nodes, {} edges, {} components)",
        path.display(),
        g.node_count(),
        g.edge_count(),
        g.component_count()
    );
    Ok(())
}

fn spectrum(s: RunSettings) -> Result<()> {
    let g = load_graph(&s)?;
    let basis = eigendecompose(&build_laplacian(&g))?;
    let dir = out_dir(&s)?;
    write(dir.join("spectrum.csv"), &spectrum_csv(&basis))?;
    let values: Vec<f64> = basis.spectrum().iter().copied().collect();
    write(dir.join("spectrum.svg"), &spectrum_svg(&values))?;
    Ok(())
}

fn recover(mut s: RunSettings, default_mask: f64) -> Result<()> {
    if default_mask == 0.0 && s.mask_fraction.is_some_and(|m| m > 0.0) {
        bail!("recover uses every measurement; use inpaint for --mask-fraction");
    }
    s.mask_fraction.get_or_insert(default_mask);
    if s.lambda.is_none() && s.lambda_grid.is_none() {
        s.lambda = Some(1.0);
    }
    let cfg: ExperimentConfig = s.experiment_config()?;
    let [lambda] = cfg.lambda_grid[..] else {
        bail!("recover and inpaint take a single --lambda");
    };
    let g = cfg.graph.load()?;
    let basis = eigendecompose(&build_laplacian(&g))?;
    let instance = synthesize_instance(&basis, &cfg.signal, cfg.mask_fraction)?;
    let problem = instance.problem(&basis, lambda)?;
    let dir = out_dir(&s)?;

    let mut columns: Vec<(String, DVector<f64>)> = vec![("truth".into(), instance.truth.clone())];
    let mut traces: Vec<(&str, Vec<TraceEntry>)> = Vec::new();
    for model in cfg.models() {
        let r = solve(model, &problem, &cfg.solver)?;
        let name = model.name();
        write(dir.join(format!("trace_{name}.csv")), &trace_csv(&r.trace))?;
        let title = format!("{name} model, lambda = {lambda}");
        write(
            dir.join(format!("recovery_{name}.svg")),
            &stem_svg(&instance.truth, &r.solution, &title),
        )?;
        let ratio = energy(&r.solution, &problem).map(|e| e.ratio).ok();
        match recovery_error(&r.solution, &instance.truth) {
            Ok(err) => println!(
                "{name}: error {:.6} (relative to truth {:.6}), l1/l2 {}, {} nonzeros, {} outer steps, {:?}, {:.3}s",
                err.over_estimate,
                err.over_truth,
                ratio.map_or("undefined".into(), |v| format!("{v:.4}")),
                r.solution.iter().filter(|v| **v != 0.0).count(),
                r.trace.len() - 1,
                r.stop_reason,
                r.wall_time.as_secs_f64()
            ),
            Err(e) => println!("{name}: {e}"),
        }
        columns.push((name.into(), r.solution));
        traces.push((name, r.trace));
    }

    let mut csv = String::from("index");
    for (name, _) in &columns {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for i in 0..basis.dim() {
        let _ = write!(csv, "{i}");
        for (_, v) in &columns {
            let _ = write!(csv, ",{}", v[i]);
        }
        csv.push('\n');
    }
    write(dir.join("solution.csv"), &csv)?;
    let views: Vec<(&str, &[TraceEntry])> =
        traces.iter().map(|(n, t)| (*n, t.as_slice())).collect();
    if let Some(svg) = energy_svg(&views) {
        write(dir.join("energy.svg"), &svg)?;
    }
    Ok(())
}

fn bench(s: RunSettings) -> Result<()> {
    let cfg = s.experiment_config()?;
    let report = run_benchmark(&cfg)?;
    let dir = out_dir(&s)?;
    for p in emit_report(&report, &dir)? {
        println!("wrote {}", p.display());
    }
    if let Some(artifacts) = &report.artifacts {
        for p in emit_plots(artifacts, &dir)? {
            println!("wrote {}", p.display());
        }
    }
    println!(
        "{} nodes, {} edges, mask fraction {}, {} trials",
        report.node_count, report.edge_count, report.mask_fraction, report.trials
    );
    for sm in &report.summaries {
        match (sm.best_lambda, sm.best_error, sm.best_error_over_truth) {
            (Some(l), Some(e), Some(r)) => println!(
                "{:>8}: best lambda {l:.4}, mean error {e:.4} (relative to truth {r:.4})",
                sm.model.name()
            ),
            _ => println!("{:>8}: no lambda without failed trials", sm.model.name()),
        }
    }
    if let Some(imp) = report.relative_improvement() {
        println!(
            "relative improvement of ratio over standard: {:.1}%",
            100.0 * imp
        );
    }
    if let Some(r) = report.timing.as_ref().and_then(|t| t.runtime_ratio) {
        println!("runtime ratio (ratio / standard): {r:.2}");
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenGraph(f) => gen_graph(f.settings()?),
        Command::Spectrum(f) => spectrum(f.settings()?),
        Command::Recover(f) => recover(f.settings()?, 0.0),
        Command::Inpaint(f) => recover(f.settings()?, 0.4),
        Command::Bench(f) => bench(f.settings()?),
    }
}
