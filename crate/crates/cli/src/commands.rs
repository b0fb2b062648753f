use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use som_core::anomaly::VERDICT_CSV_HEADER;
use som_core::dataio::NORMALIZER_FORMAT_VERSION;
use som_core::som::MAP_FORMAT_VERSION;
use som_core::{
    compute_umatrix, data_bounds, fit_normalizer, load_csv, split, train, write_verdicts_csv,
    Baseline, Data, Features, GridShape, KernelCutoff, Label, Map, NormMethod, Normalizer,
    Report, Schedule, TrainOptions, UMatrixFormat,
};

use crate::output::Staged;
use crate::{BaselineArgs, DetectArgs, EvalArgs, TrainArgs, UmatrixArgs};

pub fn version_text() -> String {
    format!(
        "som {}\nmap format {MAP_FORMAT_VERSION}\nnormalizer format {NORMALIZER_FORMAT_VERSION}\nverdict csv 1 ({VERDICT_CSV_HEADER})\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn sidecar(map: &Path, suffix: &str) -> PathBuf {
    let mut s = map.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn normalizer_path(map: &Path) -> PathBuf {
    sidecar(map, ".norm")
}

pub fn calibration_path(map: &Path) -> PathBuf {
    sidecar(map, ".calibrate.csv")
}

pub fn test_path(map: &Path) -> PathBuf {
    sidecar(map, ".test.csv")
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("cannot read {}", path.display()))
}

fn read_dataset(path: &Path, has_header: bool, label: Option<&str>) -> Result<Data> {
    load_csv(open(path)?, has_header, label).with_context(|| format!("in {}", path.display()))
}

/// Loads `path`, splitting off `label` only if the header actually has it.
fn read_maybe_labeled(path: &Path, has_header: bool, label: Option<&str>) -> Result<Data> {
    let label = match label {
        Some(name) if has_header => {
            let header = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let first = header.lines().next().unwrap_or("");
            first.split(',').any(|c| c.trim() == name).then_some(name)
        }
        _ => None,
    };
    read_dataset(path, has_header, label)
}

fn read_map(path: &Path) -> Result<Map> {
    Map::read_from(open(path)?).with_context(|| format!("cannot load map {}", path.display()))
}

fn read_normalizer(map_path: &Path) -> Result<Normalizer> {
    let path = normalizer_path(map_path);
    if !path.exists() {
        bail!(
            "normaliser {} not found; it is written by `som train` next to the map",
            path.display()
        );
    }
    Normalizer::read_from(open(&path)?)
        .with_context(|| format!("cannot load normaliser {}", path.display()))
}

fn check_dim(map: &Map, dim: Option<usize>, what: &Path) -> Result<()> {
    match dim {
        Some(d) if d != map.dim() => Err(anyhow!(
            "dimension mismatch: map expects {} features, {} has {d}",
            map.dim(),
            what.display()
        )),
        _ => Ok(()),
    }
}

fn normal_rows(data: &Data) -> Vec<Features> {
    match data.labels() {
        Some(labels) => data
            .vectors()
            .iter()
            .zip(labels)
            .filter(|(_, l)| **l == Label::Normal)
            .map(|(v, _)| v.clone())
            .collect(),
        None => data.vectors().to_vec(),
    }
}

fn parse_fractions(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("--split expects three comma-separated numbers, got '{s}'"))?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => bail!("--split expects three comma-separated numbers, got '{s}'"),
    }
}

fn build_schedule(args: &TrainArgs, shape: GridShape) -> Result<Schedule> {
    let mut s = Schedule::defaults(shape);
    if let Some(steps) = args.steps {
        s = s.with_total_steps(steps);
    }
    if let Some(o) = args.ordering_steps {
        s = s.with_ordering_steps(o)?;
    }
    if args.alpha_start.is_some() || args.alpha_mid.is_some() || args.alpha_end.is_some() {
        s = s.with_alphas(
            args.alpha_start.unwrap_or(s.alpha_start()),
            args.alpha_mid.unwrap_or(s.alpha_mid()),
            args.alpha_end.unwrap_or(s.alpha_end()),
        )?;
    }
    if args.sigma_start.is_some() || args.sigma_end.is_some() {
        s = s.with_sigmas(
            args.sigma_start.unwrap_or(s.sigma_start()),
            args.sigma_end.unwrap_or(s.sigma_end()),
        )?;
    }
    Ok(s)
}

pub fn report_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("steps: {}\n", report.steps));
    out.push_str(&format!("initial_qe: {}\n", report.initial_qe));
    out.push_str(&format!("final_qe: {}\n", report.final_qe));
    out.push_str(&format!("stopped_early: {}\n", report.stopped_early));
    out.push_str("qe_samples:\n");
    for (step, qe) in &report.qe_history {
        out.push_str(&format!("{step} {qe}\n"));
    }
    out
}

pub fn run_train(args: &TrainArgs) -> Result<()> {
    let has_header = !args.csv.no_header;
    let method: NormMethod = args.normalize.parse()?;
    let shape = GridShape::new(args.rows, args.cols)?;
    let schedule = build_schedule(args, shape)?;

    let data = read_dataset(&args.input, has_header, args.label_column.as_deref())?;
    let (train_part, cal_part, test_part) = match &args.split {
        Some(s) => split(&data, parse_fractions(s)?, args.seed)?,
        None => (data, Data::new(vec![])?, Data::new(vec![])?),
    };
    let train_rows = Data::new(normal_rows(&train_part))?;
    if train_rows.is_empty() {
        bail!("no rows to train on in {}", args.input.display());
    }

    let normalizer = fit_normalizer(&train_rows, method)?;
    let scaled = normalizer.apply(&train_rows)?;
    let vectors = scaled.vectors();
    let dim = scaled.dim().expect("non-empty");
    let mut map = Map::initialize(shape, dim, &data_bounds(vectors)?, args.seed)?;
    let options = TrainOptions {
        qe_sample_every: args.qe_every,
        early_stop_qe: args.early_stop_qe,
        cutoff: args.cutoff_sigmas.map_or(KernelCutoff::None, KernelCutoff::Sigmas),
        seed: Some(args.seed),
    };
    let report = train(&mut map, vectors, &schedule, &options)?;
    let text = report_text(&report);

    let mut staged = Staged::new();
    staged.write(&args.out, |w| Ok(map.write_to(w)?))?;
    staged.write(&normalizer_path(&args.out), |w| Ok(normalizer.write_to(w)?))?;
    if args.split.is_some() {
        for (part, path) in [(&cal_part, calibration_path(&args.out)), (&test_part, test_path(&args.out))] {
            let part = with_header(part)?;
            staged.write(&path, |w| Ok(part.write_csv(w)?))?;
        }
    }
    if let Some(path) = &args.report {
        staged.write(path, |w| Ok(w.write_all(text.as_bytes())?))?;
    }
    staged.commit()?;

    print!("{text}");
    for d in normalizer.degenerate_columns() {
        eprintln!("note: feature column {} is constant in the training data and scales to 0", d + 1);
    }
    Ok(())
}

/// Held-out partitions are always written with a header so that detect and
/// eval can locate their label column.
fn with_header(part: &Data) -> Result<Data> {
    if part.column_names().is_some() {
        return Ok(part.clone());
    }
    let Some(dim) = part.dim() else {
        return Ok(part.clone());
    };
    Ok(part
        .clone()
        .with_column_names((1..=dim).map(|i| format!("f{i}")).collect())?)
}

pub fn run_umatrix(args: &UmatrixArgs) -> Result<()> {
    if args.format.len() != args.out.len() {
        bail!(
            "{} --format values but {} --out paths; give one --out per --format",
            args.format.len(),
            args.out.len()
        );
    }
    let formats = args
        .format
        .iter()
        .map(|f| f.parse::<UMatrixFormat>())
        .collect::<som_core::Result<Vec<_>>>()?;
    let map = read_map(&args.map)?;
    let u = compute_umatrix(&map);

    let mut staged = Staged::new();
    for (format, path) in formats.iter().zip(&args.out) {
        let bytes = u.export(*format);
        staged.write(path, |w| Ok(w.write_all(&bytes)?))?;
    }
    staged.commit()?;
    println!(
        "u-matrix {}: min {} max {} median {}",
        u.shape(),
        u.min(),
        u.max(),
        u.median()
    );
    Ok(())
}

fn build_baseline(args: &BaselineArgs, has_header: bool, label: Option<&str>) -> Result<(Baseline, Normalizer)> {
    let map = read_map(&args.map)?;
    let normalizer = read_normalizer(&args.map)?;
    if normalizer.dim() != map.dim() {
        bail!(
            "normaliser has {} dimensions but the map has {}",
            normalizer.dim(),
            map.dim()
        );
    }
    let (cal_path, cal_header) = match &args.calibrate {
        Some(p) => (p.clone(), has_header),
        None => {
            let p = calibration_path(&args.map);
            if !p.exists() {
                bail!(
                    "no calibration data: pass --calibrate or train with --split to create {}",
                    p.display()
                );
            }
            (p, true)
        }
    };
    let cal = read_maybe_labeled(&cal_path, cal_header, label)?;
    check_dim(&map, cal.dim(), &cal_path)?;
    let cal = normalizer.apply(&Data::new(normal_rows(&cal))?)?;
    if cal.is_empty() {
        bail!("no normal rows to calibrate on in {}", cal_path.display());
    }
    let baseline = Baseline::calibrate(map, cal.vectors(), args.percentile)?;
    Ok((baseline, normalizer))
}

pub fn run_detect(args: &DetectArgs) -> Result<()> {
    let has_header = !args.csv.no_header;
    let label = args.label_column.as_deref();
    let input = read_maybe_labeled(&args.input, has_header, label)?;
    let (baseline, normalizer) = build_baseline(&args.baseline, has_header, label)?;
    check_dim(baseline.map(), input.dim(), &args.input)?;
    let scaled = normalizer.apply(&input)?;
    let verdicts = baseline.score_all(scaled.vectors())?;

    let mut staged = Staged::new();
    staged.write(&args.out, |w| Ok(write_verdicts_csv(w, &verdicts)?))?;
    staged.commit()?;

    let flagged = verdicts.iter().filter(|v| v.is_anomalous).count();
    let total = verdicts.len();
    println!("threshold: {} (percentile {}, {} calibration vectors)", baseline.threshold(), baseline.percentile(), baseline.calibration_size());
    println!("total: {total}");
    println!("anomalous: {flagged}");
    println!("rate: {:.4}", flagged as f64 / total as f64);
    Ok(())
}

pub fn run_eval(args: &EvalArgs) -> Result<()> {
    let input = read_dataset(&args.input, true, Some(&args.label_column))?;
    let (baseline, normalizer) = build_baseline(&args.baseline, true, Some(&args.label_column))?;
    check_dim(baseline.map(), input.dim(), &args.input)?;
    let scaled = normalizer.apply(&input)?;
    let summary = baseline.evaluate(&scaled.labeled().expect("loaded with a label column"))?;
    println!("{summary}");
    println!("TP,FP,TN,FN,detection_rate,false_positive_rate");
    println!("{}", summary.machine_line());
    Ok(())
}
