use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write as _};

use anyhow::{bail, Context, Result};
use mixcat_core::clustering::{guthrie_clusters, soft_clusters};
use mixcat_core::corpus::parse_with;
use mixcat_core::eval::{break_even, sweep};
use mixcat_core::models::{binary_table, train as train_model};
use mixcat_core::{
    EmConfig, FrequencyTable, LabelPolicy, LabeledCorpus, Method, ModelFile, TrainSettings,
};

use crate::config::{parse_grid, required, Layer, RunConfig};

fn read_corpus(path: &str, policy: LabelPolicy, what: &str) -> Result<LabeledCorpus> {
    let file = File::open(path).with_context(|| format!("{what}: cannot open {path}"))?;
    parse_with(BufReader::new(file), policy).with_context(|| format!("{what}: {path}"))
}

fn emit(path: Option<&String>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("write: cannot write {path}"))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .context("write: stdout")
        }
    }
}

fn scheme_keys(method: Option<Method>) -> &'static [&'static str] {
    match method {
        Some(Method::Hcm) => &["gamma", "l", "m"],
        Some(Method::Fmm) => &["gamma", "eta", "iters", "tol"],
        _ => &[],
    }
}

fn guthrie(values: &Layer) -> Result<Option<(usize, usize)>> {
    match (values.l, values.m) {
        (Some(l), Some(m)) => Ok(Some((l, m))),
        (None, None) => Ok(None),
        _ => bail!("config: --l and --m must be given together"),
    }
}

fn settings(values: &Layer) -> Result<TrainSettings> {
    let method = *required(&values.method, "method")?;
    let mut settings = TrainSettings::new(method);
    settings.gamma = values.gamma;
    settings.guthrie = guthrie(values)?;
    if let Some(rule) = values.pool_rule {
        settings.pool_rule = rule;
    }
    if method == Method::Fmm {
        let em = EmConfig::default();
        settings.em = EmConfig {
            eta: values.eta.unwrap_or(em.eta),
            max_iterations: values.iters.unwrap_or(em.max_iterations),
            tolerance: values.tol.unwrap_or(em.tolerance),
            initial: None,
        };
    }
    settings.validate().context("config")?;
    Ok(settings)
}

pub fn counts(flags: &Layer, file: &Layer) -> Result<()> {
    let config = RunConfig::resolve("counts", flags, file, |_| vec!["train", "output"])?;
    let v = &config.values;
    let path = required(&v.train, "train")?;
    let corpus = read_corpus(path, LabelPolicy::Required, "read train corpus")?;
    let table = FrequencyTable::from_corpus(&corpus);
    emit(v.output.as_ref(), &(config.header() + &table.to_csv()))
}

pub fn clusters(flags: &Layer, file: &Layer) -> Result<()> {
    let config = RunConfig::resolve("clusters", flags, file, |merged| {
        let mut keys = vec!["train", "category", "gamma", "l", "m", "output"];
        if merged.category.is_some() {
            keys.push("pool-rule");
        }
        keys
    })?;
    let v = &config.values;
    let path = required(&v.train, "train")?;
    let scheme = guthrie(v)?;
    match (v.gamma, scheme) {
        (Some(_), Some(_)) => bail!("config: give either --gamma or --l/--m, not both"),
        (None, None) => bail!("config: missing --gamma or --l/--m"),
        (Some(g), None) if !(0.0..1.0).contains(&g) => {
            bail!("config: gamma must lie in [0, 1), got {g}")
        }
        (None, Some((l, m))) if l == 0 || m == 0 => bail!("config: L and M must be at least 1"),
        _ => {}
    }

    let corpus = read_corpus(path, LabelPolicy::Required, "read train corpus")?;
    let table = match &v.category {
        Some(category) => {
            let rule = v.pool_rule.unwrap_or_default();
            binary_table(&corpus, category, rule)
                .with_context(|| format!("count {category}"))?
                .0
        }
        None => FrequencyTable::from_corpus(&corpus),
    };
    let clustering = match (v.gamma, scheme) {
        (Some(gamma), _) => soft_clusters(&table, gamma),
        (_, Some((l, m))) => guthrie_clusters(&table, l, m),
        _ => unreachable!(),
    }
    .context("cluster")?;
    emit(
        v.output.as_ref(),
        &(config.header() + &clustering.to_text()),
    )
}

pub fn train(flags: &Layer, file: &Layer) -> Result<()> {
    let config = RunConfig::resolve("train", flags, file, |merged| {
        let mut keys = vec!["method", "category", "train", "pool-rule", "output"];
        keys.extend(scheme_keys(merged.method));
        if merged.method == Some(Method::Fmm) {
            keys.push("trace");
        }
        keys
    })?;
    let v = &config.values;
    let settings = settings(v)?;
    let category = required(&v.category, "category")?;
    let path = required(&v.train, "train")?;

    let corpus = read_corpus(path, LabelPolicy::Required, "read train corpus")?;
    let training =
        train_model(&corpus, category, &settings).with_context(|| format!("train {category}"))?;

    if let Some(trace) = &v.trace {
        let mut csv = config.header() + "side,iteration,log_likelihood\n";
        for (side, fit) in &training.em_fits {
            for (iteration, l) in &fit.trace {
                let _ = writeln!(csv, "{side},{iteration},{l}");
            }
        }
        emit(Some(trace), &csv)?;
    }

    let mut model = ModelFile::new(category, settings, training.model);
    model.config = Some(config.to_value());
    let json = model.to_json().context("save model")?;
    emit(v.output.as_ref(), &(json + "\n"))
}

pub fn classify(flags: &Layer, file: &Layer) -> Result<()> {
    let config = RunConfig::resolve("classify", flags, file, |_| {
        vec!["model", "input", "epsilon", "output"]
    })?;
    let v = &config.values;
    let model_path = required(&v.model, "model")?;
    let input = required(&v.input, "input")?;
    let epsilon = *required(&v.epsilon, "epsilon")?;
    if epsilon.is_nan() || epsilon < 0.0 {
        bail!("config: epsilon must be non-negative, got {epsilon}");
    }

    let text = std::fs::read_to_string(model_path)
        .with_context(|| format!("load model: cannot read {model_path}"))?;
    let model = ModelFile::from_json(&text).with_context(|| format!("load model: {model_path}"))?;
    let docs = read_corpus(input, LabelPolicy::Optional, "read input")?;

    let mut out = config.header() + "doc\toutcome\tscore\n";
    for (i, doc) in docs.documents.iter().enumerate() {
        let decision = model.model.classify(&doc.tokens, epsilon);
        let score = decision.score.map_or("NA".to_string(), |s| s.to_string());
        let _ = writeln!(out, "{}\t{}\t{score}", i + 1, decision.outcome);
    }
    emit(v.output.as_ref(), &out)
}

pub fn eval(flags: &Layer, file: &Layer) -> Result<()> {
    let config = RunConfig::resolve("eval", flags, file, |merged| {
        let mut keys = vec!["method", "train", "test", "grid", "pool-rule", "output"];
        keys.extend(scheme_keys(merged.method));
        keys
    })?;
    let v = &config.values;
    let settings = settings(v)?;
    let grid = parse_grid(required(&v.grid, "grid")?)?;
    let train_path = required(&v.train, "train")?;
    let test_path = required(&v.test, "test")?;

    let train_corpus = read_corpus(train_path, LabelPolicy::Required, "read train corpus")?;
    let test_corpus = read_corpus(test_path, LabelPolicy::Required, "read test corpus")?;
    let models = train_corpus
        .categories
        .iter()
        .map(|c| {
            train_model(&train_corpus, c, &settings)
                .map(|t| (c.clone(), t.model))
                .with_context(|| format!("train {c}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let curve = sweep(&models, &test_corpus, &grid).context("evaluate")?;

    let mut out = config.header() + &curve.to_csv();
    match break_even(&curve) {
        Some(be) => {
            if be.extrapolated {
                out.push_str("# no crossing on the grid; midpoint of the closest point\n");
            }
            let _ = writeln!(out, "break_even={}", be.value);
        }
        None => out.push_str("break_even=NA\n"),
    }
    emit(v.output.as_ref(), &out)
}
