use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use splitlab::bounds::{all_bounds, BoundInputs};
use splitlab::fitting::{adjugate_kernel, fitting_generators, laplace_witnesses, FittingSummary};
use splitlab::lab::{
    balanced_fraction, check_field_size, enumerate_lines, histogram_csv, load_bundle,
    sample_jump_distribution, thread_pool, trial_rng, verify_conic_example, ExperimentConfig,
    LabError, LabResult, LinesReport,
};
use splitlab::restrict::{jump_report, RationalCurveMap, SplittingType};
use splitlab::sheaf::{chern, euler_tangent, schwarzenberger};
use splitlab::{with_prime_field, Error, FiniteField, Rational};

mod output;

use output::{Format, Record};

#[derive(Parser)]
#[command(name = "splitlab", version = env!("SPLITLAB_VERSION"))]
#[command(about = "Splitting types of bundles on P2 restricted to rational curves over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Out {
    /// Append records here instead of printing them.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Omit wall-clock time and runtime so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Splitting type and defect of one bundle on one curve.
    Splitting {
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long, default_value_t = 101)]
        field: u32,
        /// Curve file; a random curve of `--degree` is drawn when absent.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Histogram of the defect over random curves.
    Sample {
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, default_value_t = 101)]
        field: u32,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated defect thresholds such as `1,3/2`.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
        thresholds: Vec<Rational>,
        #[command(flatten)]
        out: Out,
    },
    /// Splitting on every line over the field.
    Lines {
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long, default_value_t = 7)]
        field: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Evaluate every bound whose inputs are given.
    Bounds {
        #[command(flatten)]
        inputs: BoundArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Rerun one of the worked examples and report whether it reproduces.
    VerifyExample {
        #[arg(value_enum)]
        example: Example,
        /// Largest curve degree; defaults to 6 for ramella and 3 for conic.
        #[arg(long)]
        degree: Option<u32>,
        /// Defaults to 101, or 7 for schwarzenberger.
        #[arg(long)]
        field: Option<u32>,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Fitting ideal generators of a presentation matrix.
    Fitting {
        #[arg(long)]
        bundle: String,
        #[arg(long, default_value_t = 101)]
        field: u32,
        /// Only this Fitting index; all indices by default.
        #[arg(long)]
        j: Option<usize>,
        /// Adjugate syzygy certificate from the first `R` rows.
        #[arg(long, value_name = "R")]
        certificate: Option<usize>,
        /// Laplace witnesses for all `(K+1)`-minors.
        #[arg(long, value_name = "K")]
        laplace: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Ramella,
    Schwarzenberger,
    Conic,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    dq: Option<i64>,
    #[arg(long)]
    e: Option<i64>,
    #[arg(long)]
    f: Option<i64>,
    #[arg(long, value_parser = parse_rational)]
    mu: Option<Rational>,
    #[arg(long)]
    g: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    rank: Option<i64>,
    #[arg(long)]
    dim_x: Option<i64>,
    /// Curve degree.
    #[arg(long)]
    d: Option<i64>,
    #[arg(long, value_parser = parse_rational)]
    a_value: Option<Rational>,
    #[arg(long)]
    dim_m: Option<i64>,
    /// Anticanonical degree of the curve; `3d` by default.
    #[arg(long)]
    kdeg: Option<i64>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a rational number"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match thread_pool().and_then(|pool| pool.install(|| run(cli.command))) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("splitlab: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(cmd: Command) -> LabResult<()> {
    let start = Instant::now();
    match cmd {
        Command::Splitting { bundle, field, curve, degree, seed, out } => {
            let config = json!({"bundle": bundle, "field_order": field, "curve_degree": degree,
                "curve_file": curve});
            let payload = with_prime_field!(field, F => splitting::<F>(&bundle, curve.as_ref(), degree, seed)?)?;
            Record::new("splitting", config, Some(seed), payload).emit(&out, start)
        }
        Command::Sample { bundle, degree, field, trials, seed, thresholds, out } => {
            let cfg = ExperimentConfig { bundle, curve_degree: degree, field_order: field, trials, seed, thresholds };
            cfg.validate()?;
            let h = with_prime_field!(field, F => {
                let pres = load_bundle::<F>(&cfg.bundle)?;
                sample_jump_distribution(&pres, &cfg)?
            })?;
            let payload = serde_json::to_value(&h).map_err(invariant)?;
            let record = Record::new("sample", to_value(&cfg)?, Some(seed), payload).with_csv(histogram_csv(&h));
            record.emit(&out, start)
        }
        Command::Lines { bundle, field, out } => {
            let report = with_prime_field!(field, F => enumerate_lines(&load_bundle::<F>(&bundle)?)?)?;
            let config = json!({"bundle": bundle, "field_order": field});
            let csv = lines_csv(&report);
            Record::new("lines", config, None, to_value(&report)?).with_csv(csv).emit(&out, start)
        }
        Command::Bounds { inputs, out } => {
            let inp = BoundInputs {
                dq: inputs.dq,
                e: inputs.e,
                f: inputs.f,
                mu: inputs.mu,
                g: inputs.g,
                k: inputs.k,
                rank: inputs.rank,
                dim_x: inputs.dim_x,
                d: inputs.d,
                a_value: inputs.a_value,
                dim_m: inputs.dim_m,
                kdeg: inputs.kdeg,
            };
            if inp == BoundInputs::default() {
                return Err(LabError::InvalidConfig("no bound inputs given".into()));
            }
            let report = all_bounds(&inp);
            Record::new("bounds", to_value(&inp)?, None, to_value(&report)?).emit(&out, start)
        }
        Command::VerifyExample { example, degree, field, trials, seed, out } => {
            let (config, payload) = verify(example, degree, field, trials, seed)?;
            Record::new("verify-example", config, Some(seed), payload).emit(&out, start)
        }
        Command::Fitting { bundle, field, j, certificate, laplace, out } => {
            let config = json!({"bundle": bundle, "field_order": field, "j": j,
                "certificate": certificate, "laplace": laplace});
            let payload = with_prime_field!(field, F => fitting::<F>(&bundle, j, certificate, laplace)?)?;
            Record::new("fitting", config, None, payload).emit(&out, start)
        }
    }
}

fn invariant(e: impl std::fmt::Display) -> LabError {
    LabError::Invariant(e.to_string())
}

fn to_value<T: serde::Serialize>(v: &T) -> LabResult<Value> {
    serde_json::to_value(v).map_err(invariant)
}

fn splitting<F: FiniteField>(bundle: &str, curve: Option<&PathBuf>, degree: u32, seed: u64) -> LabResult<Value> {
    let pres = load_bundle::<F>(bundle)?;
    check_field_size(&pres)?;
    let s = match curve {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::InvalidConfig(format!("cannot read curve {}: {e}", path.display())))?;
            RationalCurveMap::<F>::from_text(&text)?
        }
        None => random_curve(degree, seed)?,
    };
    let report = match jump_report(&pres, &s) {
        Err(Error::NotCertified) => return Err(LabError::Degenerate { uncertified: 1, total: 1 }),
        r => r?,
    };
    if !report.sum_rule || report.majorizes_expected == Some(false) {
        return Err(LabError::Invariant(format!("report on {s} breaks the sum rule or majorization")));
    }
    Ok(json!({"curve": s.to_string(), "curve_text": s.to_text(), "chern": to_value(&chern(&pres)?)?,
        "report": to_value(&report)?}))
}

/// First valid draw among the streams of `seed`.
fn random_curve<F: FiniteField>(degree: u32, seed: u64) -> LabResult<RationalCurveMap<F>> {
    if degree == 0 {
        return Err(LabError::InvalidConfig("curve degree must be positive".into()));
    }
    (0..1000)
        .find_map(|i| RationalCurveMap::random(degree, &mut trial_rng(seed, i)).ok())
        .ok_or_else(|| LabError::InvalidConfig("no valid curve in 1000 draws".into()))
}

fn lines_csv(r: &LinesReport) -> String {
    let mut out = String::from("a,b,c,splitting,mu,certified,jumping\n");
    for row in &r.lines {
        let [a, b, c] = row.line;
        let split = row.splitting.as_ref().map_or(String::new(), |s| s.parts().iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
        let mu = row.mu.map_or(String::new(), |m| m.to_string());
        out.push_str(&format!("{a},{b},{c},{split},{mu},{},{}\n", row.certified, row.jumping));
    }
    out
}

fn verify(example: Example, degree: Option<u32>, field: Option<u32>, trials: u64, seed: u64) -> LabResult<(Value, Value)> {
    if trials == 0 {
        return Err(LabError::InvalidConfig("need at least one trial".into()));
    }
    match example {
        Example::Ramella => {
            let (max_d, q) = (degree.unwrap_or(6), field.unwrap_or(101));
            let config = json!({"example": "ramella", "max_degree": max_d, "field_order": q, "trials": trials});
            let mut rows = Vec::new();
            let mut reproduced = true;
            for d in 1..=max_d {
                let cfg = ExperimentConfig {
                    bundle: "tangent".into(),
                    curve_degree: d,
                    field_order: q,
                    trials,
                    seed,
                    thresholds: vec![Rational::from_integer(1)],
                };
                let h = with_prime_field!(q, F => sample_jump_distribution(&euler_tangent::<F>(), &cfg)?)?;
                let frac = balanced_fraction(&h, 2, 3 * d as i64);
                reproduced &= frac >= 0.95;
                rows.push(json!({"d": d, "balanced": SplittingType::balanced(2, 3 * d as i64),
                    "balanced_fraction": frac, "certified": h.certified, "rejected": h.rejected,
                    "estimates": to_value(&h.estimates)?}));
            }
            Ok((config, json!({"degrees": rows, "reproduced": reproduced})))
        }
        Example::Schwarzenberger => {
            let q = field.unwrap_or(7);
            let config = json!({"example": "schwarzenberger", "bundle": "schwarzenberger:4,0", "field_order": q});
            let report = with_prime_field!(q, F => enumerate_lines(&schwarzenberger::<F>(4, 0)?)?)?;
            let all_30 = report
                .jumping_lines()
                .all(|r| r.splitting.as_ref().is_some_and(|s| s.parts() == [3, 0]));
            let conic_ok = report.conic.as_ref().is_some_and(|c| c.smooth && c.all_tangent && c.matches_jumping);
            let reproduced = report.jumping == q as usize + 1 && all_30 && conic_ok;
            Ok((config, json!({"lines": to_value(&report)?, "reproduced": reproduced})))
        }
        Example::Conic => {
            let (max_d, q) = (degree.unwrap_or(3), field.unwrap_or(101));
            let config = json!({"example": "conic", "max_degree": max_d, "field_order": q, "trials": trials});
            let reports = (1..=max_d)
                .map(|d| with_prime_field!(q, F => verify_conic_example::<F>(d, trials, seed)?))
                .collect::<LabResult<Vec<_>>>()?;
            let gaps: Vec<f64> = reports.iter().map(|r| r.gap).collect();
            let reproduced = gaps.first().is_some_and(|&g| g >= 0.0)
                && gaps.windows(2).all(|w| w[0] <= w[1])
                && gaps.last().is_some_and(|&g| g >= max_d as f64 / 2.0);
            Ok((config, json!({"degrees": to_value(&reports)?, "gaps": gaps, "reproduced": reproduced})))
        }
    }
}

fn fitting<F: FiniteField>(bundle: &str, j: Option<usize>, certificate: Option<usize>, laplace: Option<usize>) -> LabResult<Value> {
    let pres = load_bundle::<F>(bundle)?;
    let m = pres.matrix();
    let n = m.rows();
    let indices: Vec<usize> = match j {
        Some(j) => vec![j],
        None => (0..=n).collect(),
    };
    let ideals = indices
        .iter()
        .map(|&j| Ok(FittingSummary::from(&fitting_generators(m, n, j)?)))
        .collect::<LabResult<Vec<_>>>()?;
    let mut payload = Map::new();
    payload.insert("rows".into(), json!(n));
    payload.insert("cols".into(), json!(m.cols()));
    payload.insert("ideals".into(), to_value(&ideals)?);
    if let Some(r) = certificate {
        let rows: Vec<usize> = (0..r).collect();
        let cert = adjugate_kernel(m, r, &rows)?;
        if !cert.verify(m) {
            return Err(LabError::Invariant("adjugate vectors are not syzygies".into()));
        }
        payload.insert(
            "certificate".into(),
            json!({"selected_rows": cert.selected_rows, "selected_cols": cert.selected_cols,
                "det_a": cert.det_a.to_string(),
                "kernel_vectors": cert.kernel_vectors.iter()
                    .map(|v| v.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "text": cert.to_text(m.cols())}),
        );
    }
    if let Some(k) = laplace {
        let witnesses = laplace_witnesses(m, k)?;
        if !witnesses.iter().all(|w| w.verify(m)) {
            return Err(LabError::Invariant("Laplace expansion does not reproduce a minor".into()));
        }
        payload.insert("laplace_witnesses".into(), json!(witnesses.len()));
    }
    Ok(Value::Object(payload))
}
