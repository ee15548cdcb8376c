use std::fs;
use std::path::{Path, PathBuf};

use lqgcn_core::io::{
    check_dataset_shape, known_dataset, parse_affiliations, parse_attributes, parse_cover, parse_edge_list,
    write_affiliations, write_attributes, write_checkpoint, write_cover, write_edge_list, atomic_write,
    RunManifest,
};
use lqgcn_core::{
    build_features, indicator_attributes, make_planted, onmi, recall_best_match, threshold_assign, train as fit,
    BpEstimator, Cover, Error, FeatureMatrix, Graph, InputVariant, PlantedConfig, TrainConfig,
};

use crate::{reference, EvalArgs, ModelArgs, ReproArgs, SweepArgs, Switch, SynthArgs, TrainArgs};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::NonFinite(_) | Error::Diverged { .. } => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_DATA, message: format!("{}: {e}", path.display()) }
}

fn config_from(m: &ModelArgs, seed: u64) -> Result<TrainConfig, Failure> {
    let estimator = match m.samples {
        None => BpEstimator::Exact,
        Some(0) => return Err(Failure::usage("--samples must be positive")),
        Some(s) => BpEstimator::Sampled(s),
    };
    let cfg = TrainConfig {
        k: m.k,
        hidden: m.hidden,
        alpha: m.alpha,
        beta: m.beta,
        lr: m.lr,
        weight_decay: m.weight_decay,
        dropout: m.dropout,
        threshold: m.threshold,
        threshold_mode: m.threshold_mode.into(),
        max_iters: m.iters,
        seed,
        variant: m.variant.into(),
        outer: m.outer.into(),
        lq_enabled: matches!(m.lq, Switch::On),
        estimator,
        ..TrainConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Loaded graph, features and optional truth cover.
struct Dataset {
    graph: Graph,
    features: FeatureMatrix,
    truth: Option<Cover>,
}

fn load(edges: &Path, attrs: Option<&Path>, truth: Option<&Path>, input: InputVariant) -> Result<Dataset, Failure> {
    if matches!(input, InputVariant::X | InputVariant::U) && attrs.is_none() {
        return Err(Failure::usage(format!(
            "--input {} needs --attrs",
            if input == InputVariant::X { "x" } else { "u" }
        )));
    }
    let (graph, report) = parse_edge_list(edges)?;
    if report.self_loops > 0 {
        eprintln!("warning: dropped {} self-loop(s) from {}", report.self_loops, edges.display());
    }
    let attrs = match (input, attrs) {
        (InputVariant::G, Some(p)) => {
            eprintln!("warning: --input g ignores {}", p.display());
            None
        }
        (_, Some(p)) => Some(parse_attributes(p)?),
        (_, None) => None,
    };
    let features = build_features(&graph, attrs.as_ref(), input)?;
    let truth = truth.map(|p| parse_cover(p, Some(graph.n_nodes()))).transpose()?;
    Ok(Dataset { graph, features, truth })
}

fn print_scores(truth: &Cover, pred: &Cover) -> CmdResult {
    println!("onmi={:.6}", onmi(truth, pred)?);
    println!("recall={:.6}", recall_best_match(truth, pred)?);
    Ok(())
}

pub fn train(a: TrainArgs) -> CmdResult {
    let input: InputVariant = a.model.input.into();
    let cfg = config_from(&a.model, a.seed)?;
    let data = load(&a.edges, a.attrs.as_deref(), a.truth.as_deref(), input)?;
    fs::create_dir_all(&a.out).map_err(|e| io_failure(&a.out, e))?;

    let mut inputs: Vec<(&str, &Path)> = vec![("edges", &a.edges)];
    if input != InputVariant::G {
        if let Some(p) = &a.attrs {
            inputs.push(("attributes", p));
        }
    }
    if let Some(p) = &a.truth {
        inputs.push(("truth", p));
    }
    let out = |name: &str| a.out.join(name);
    let (aff, cover, log, ckpt, manifest_path) = (
        out("affiliations.tsv"),
        out("cover.txt"),
        out("train_log.jsonl"),
        out("checkpoint.txt"),
        out("manifest.json"),
    );
    let mut manifest = RunManifest::new(env!("CARGO_PKG_VERSION"), &cfg, input, &inputs)?;
    manifest.outputs = vec![aff.clone(), cover.clone(), log.clone(), ckpt.clone()];
    manifest.write(&manifest_path)?;

    let outcome = match fit(&data.graph, &data.features, &cfg) {
        Ok(o) => o,
        Err(Error::Diverged { iteration, reason, last_finite }) => {
            write_checkpoint(&ckpt, &last_finite)?;
            return Err(Failure {
                code: EXIT_NUMERIC,
                message: format!(
                    "training diverged at iteration {iteration}: {reason}; last finite parameters in {}",
                    ckpt.display()
                ),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let pred = threshold_assign(outcome.affiliations.as_dense(), cfg.threshold, cfg.threshold_mode);
    write_affiliations(&aff, &outcome.affiliations)?;
    write_cover(&cover, &pred)?;
    let mut buf = Vec::new();
    outcome.log.write_jsonl(&mut buf)?;
    atomic_write(&log, &buf)?;
    write_checkpoint(&ckpt, &outcome.params)?;

    eprintln!(
        "trained {} iterations (local modularity from {}); outputs in {}",
        outcome.log.records.len(),
        outcome.log.lq_switch().map_or("never".to_string(), |i| format!("iteration {i}")),
        a.out.display()
    );
    if let Some(truth) = &data.truth {
        print_scores(truth, &pred)?;
    }
    Ok(())
}

/// Reads both covers over a common node count.
fn covers_over_common_nodes(pred: &Path, truth: &Path, n: Option<usize>) -> Result<(Cover, Cover), Failure> {
    let p = parse_cover(pred, n)?;
    let t = parse_cover(truth, n)?;
    let n = n.unwrap_or(p.n_nodes().max(t.n_nodes()));
    Ok((
        Cover::new(n, p.communities().to_vec())?,
        Cover::new(n, t.communities().to_vec())?,
    ))
}

pub fn eval(a: EvalArgs) -> CmdResult {
    let (pred, truth) = covers_over_common_nodes(&a.pred, &a.truth, a.n)?;
    print_scores(&truth, &pred)
}

pub fn synth(a: SynthArgs) -> CmdResult {
    let cfg = PlantedConfig {
        n: a.n,
        k: a.k,
        overlap: a.overlap,
        strength: a.strength,
        background: a.eta,
    };
    let inst = make_planted(&cfg, a.seed)?;
    fs::create_dir_all(&a.out).map_err(|e| io_failure(&a.out, e))?;
    let x = FeatureMatrix::new(indicator_attributes(&inst.cover_true))?;
    let attrs: PathBuf = a.out.join(if a.sparse_attrs { "attrs.txt" } else { "attrs.csv" });
    write_edge_list(&a.out.join("edges.txt"), &inst.graph)?;
    write_attributes(&attrs, &x, a.sparse_attrs)?;
    write_cover(&a.out.join("truth.txt"), &inst.cover_true)?;
    eprintln!(
        "wrote {} nodes, {} edges, {} communities to {}",
        inst.graph.n_nodes(),
        inst.graph.n_edges(),
        inst.cover_true.len(),
        a.out.display()
    );
    Ok(())
}

pub fn sweep(a: SweepArgs) -> CmdResult {
    if a.thresholds.is_empty() {
        return Err(Failure::usage("--thresholds needs at least one value"));
    }
    if let Some(p) = a.thresholds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Failure::usage(format!("threshold {p} not in [0,1]")));
    }
    let f = parse_affiliations(&a.affiliations)?;
    let truth = parse_cover(&a.truth, Some(f.n_nodes()))?;
    for &p in &a.thresholds {
        let pred = threshold_assign(f.as_dense(), p, a.threshold_mode.into());
        println!(
            "p={p} onmi={:.6} recall={:.6}",
            onmi(&truth, &pred)?,
            recall_best_match(&truth, &pred)?
        );
    }
    Ok(())
}

pub fn repro(a: ReproArgs) -> CmdResult {
    let input: InputVariant = a.model.input.into();
    if a.seeds == 0 {
        return Err(Failure::usage("--seeds must be positive"));
    }
    config_from(&a.model, 0)?;
    let data = load(&a.edges, a.attrs.as_deref(), Some(&a.truth), input)?;
    let truth = data.truth.as_ref().expect("truth was requested");
    if let Some(shape) = known_dataset(&a.dataset) {
        if let (Some(attrs), InputVariant::X) = (&a.attrs, input) {
            let x = parse_attributes(attrs)?;
            if let Err(e) = check_dataset_shape(shape, &data.graph, &x, truth) {
                eprintln!("warning: {e}");
            }
        }
    }

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(a.seeds as usize);
    let mut scores: Vec<Option<Result<(f64, f64), Failure>>> = (0..a.seeds).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<_> = scores.chunks_mut(a.seeds.div_ceil(workers as u64) as usize).collect();
        let mut start = 0u64;
        for chunk in chunks {
            let first = start;
            start += chunk.len() as u64;
            let (data, model) = (&data, &a.model);
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    let seed = first + i as u64;
                    *slot = Some((|| {
                        let cfg = config_from(model, seed)?;
                        let out = fit(&data.graph, &data.features, &cfg)?;
                        let pred = threshold_assign(out.affiliations.as_dense(), cfg.threshold, cfg.threshold_mode);
                        let truth = data.truth.as_ref().expect("truth was requested");
                        Ok((onmi(truth, &pred)?, recall_best_match(truth, &pred)?))
                    })());
                }
            });
        }
    });
    let mut ok = Vec::new();
    for (seed, s) in scores.into_iter().enumerate() {
        match s.expect("every seed runs") {
            Ok(v) => ok.push(v),
            Err(f) => eprintln!("warning: seed {seed} failed: {}", f.message),
        }
    }
    if ok.is_empty() {
        return Err(Failure { code: EXIT_NUMERIC, message: "every seed failed".into() });
    }
    let n = ok.len() as f64;
    let mean_onmi = 100.0 * ok.iter().map(|v| v.0).sum::<f64>() / n;
    let mean_recall = 100.0 * ok.iter().map(|v| v.1).sum::<f64>() / n;
    let input_name = match input {
        InputVariant::X => "x",
        InputVariant::G => "g",
        InputVariant::U => "u",
    };
    println!("dataset={} input={input_name} seeds={}", a.dataset, ok.len());
    println!("onmi_mean={mean_onmi:.1}");
    println!("recall_mean={mean_recall:.1}");
    match reference::lookup(&a.dataset, input_name) {
        Some(r) => {
            println!("reference_onmi={:.1}", r.onmi);
            println!("reference_recall={:.1}", r.recall);
            let within = (mean_onmi - r.onmi).abs() <= 10.0;
            println!("onmi_within_10_points={within} (informational)");
        }
        None => println!("reference: none for this dataset/input"),
    }
    Ok(())
}
