//! One line per acceptance criterion; exits nonzero if any fails.

mod props;

use std::process::ExitCode;
use std::time::Instant;

use splitlab::bounds::{p2_relcanonical_bound, zeta_prime};
use splitlab::lab::{
    balanced_fraction, enumerate_lines, sample_jump_distribution, thread_pool, verify_conic_example,
    ExperimentConfig,
};
use splitlab::restrict::SplittingType;
use splitlab::sheaf::{conic_example_bundle, direct_sum, euler_tangent, is_stable_rank2, schwarzenberger};
use splitlab::{Rational, F101, F7};

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn show(r: Option<Rational>) -> String {
    r.map_or("irrational".into(), |x| x.to_string())
}

fn sharp_constant() -> Check {
    let half = Rational::new(1, 2);
    let b = p2_relcanonical_bound(2, 3, 3).map_err(|e| e.to_string())?;
    let z = zeta_prime(3, 3).map_err(|e| e.to_string())?;
    ensure(
        b.bound.value.exact == Some(half) && z.value.exact == Some(half),
        format!(
            "bound(2,3,3) = {}, zeta'(3,3) = {}",
            show(b.bound.value.exact),
            show(z.value.exact)
        ),
    )
}

fn tangent_config(d: u32, trials: u64, seed: u64, thresholds: Vec<Rational>) -> ExperimentConfig {
    ExperimentConfig {
        bundle: "tangent".into(),
        curve_degree: d,
        field_order: 101,
        trials,
        seed,
        thresholds,
    }
}

fn balanced_splitting() -> Check {
    let t = euler_tangent::<F101>();
    let mut worst = 1.0f64;
    let mut parts = Vec::new();
    for d in 1..=6u32 {
        let h = sample_jump_distribution(&t, &tangent_config(d, 2000, 20 + d as u64, vec![]))
            .map_err(|e| e.to_string())?;
        let frac = balanced_fraction(&h, 2, 3 * d as i64);
        worst = worst.min(frac);
        parts.push(format!("d={d}: {}={frac:.4}", SplittingType::balanced(2, 3 * d as i64)));
    }
    ensure(worst >= 0.95, parts.join(", "))
}

fn jumping_codimension() -> Check {
    let t = euler_tangent::<F101>();
    let cfg = tangent_config(2, 200_000, 3, vec![Rational::from_integer(1)]);
    let h = sample_jump_distribution(&t, &cfg).map_err(|e| e.to_string())?;
    let e = &h.estimates[0];
    let chat = e.chat.ok_or("no samples with mu >= 1")?;
    ensure(
        (0.4..=1.6).contains(&chat),
        format!(
            "mu >= 1 in {}/{} certified, c_hat = {chat:.4}, ci = [{:.4}, {:.4}]",
            e.hits,
            h.certified,
            e.ci_lo.unwrap_or(f64::NAN),
            e.ci_hi.unwrap_or(f64::NAN)
        ),
    )
}

fn schwarzenberger_lines() -> Check {
    let s = schwarzenberger::<F7>(4, 0).map_err(|e| e.to_string())?;
    let report = enumerate_lines(&s).map_err(|e| e.to_string())?;
    let all_30 = report
        .jumping_lines()
        .all(|r| r.splitting.as_ref().is_some_and(|t| t.parts() == [3, 0]));
    let conic = report.conic.as_ref().ok_or("no conic fitted")?;
    ensure(
        report.lines.len() == 57
            && report.uncertified == 0
            && report.jumping == 8
            && all_30
            && conic.smooth
            && conic.all_tangent
            && conic.matches_jumping,
        format!(
            "{} lines, {} jumping, all (3, 0): {all_30}, conic {} smooth={} tangents={} matches={}",
            report.lines.len(),
            report.jumping,
            conic.conic,
            conic.smooth,
            conic.tangent_lines,
            conic.matches_jumping
        ),
    )
}

fn conic_gaps() -> Check {
    let mut gaps = Vec::new();
    for d in 1..=3u32 {
        let r = verify_conic_example::<F101>(d, 2000, 5).map_err(|e| e.to_string())?;
        gaps.push((r.general.mean_mu, r.through_point.mean_mu, r.gap));
    }
    let g: Vec<f64> = gaps.iter().map(|x| x.2).collect();
    let detail = gaps
        .iter()
        .enumerate()
        .map(|(i, (a, b, gap))| format!("d={}: general {a:.3}, through p {b:.3}, gap {gap:.3}", i + 1))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(g[0] >= 0.0 && g[0] <= g[1] && g[1] <= g[2] && g[2] >= 1.5, detail)
}

fn stability_oracle() -> Check {
    let mut results = vec![("T", is_stable_rank2(&euler_tangent::<F101>()), true)];
    for d in 1..=3 {
        let e = conic_example_bundle::<F101>(d).map_err(|e| e.to_string())?;
        results.push(("conic", is_stable_rank2(&e), true));
    }
    results.push(("O+O", is_stable_rank2(&direct_sum::<F101>(&[0, 0])), false));
    results.push(("O(1)+O(-1)", is_stable_rank2(&direct_sum::<F101>(&[1, -1])), false));
    let ok = results.iter().all(|(_, got, want)| got.as_ref().ok() == Some(want));
    let detail = results
        .iter()
        .map(|(n, got, _)| format!("{n}: {got:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(ok, detail)
}

fn property_suites() -> Check {
    let mut failures = Vec::new();
    for (name, suite) in props::all_suites() {
        if let Err(e) = suite(props::CASES) {
            failures.push(format!("{name}: {e}"));
        }
    }
    let n = props::all_suites().len();
    if failures.is_empty() {
        Ok(format!("{n} suites x {} cases, no failures", props::CASES))
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        (1, "sharp constant 1/2", sharp_constant),
        (2, "balanced restrictions of T", balanced_splitting),
        (3, "jumping locus codimension", jumping_codimension),
        (4, "Schwarzenberger jumping lines", schwarzenberger_lines),
        (5, "conics through a point", conic_gaps),
        (6, "stability oracle", stability_oracle),
        (7, "property suites", property_suites),
    ];
    let mut failed = 0;
    let mut passed = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = pool.install(run);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => {
                passed.push(n);
                println!("criterion {n} PASS {name} ({secs:.1}s): {d}");
            }
            Err(d) => {
                failed += 1;
                println!("criterion {n} FAIL {name} ({secs:.1}s): {d}");
            }
        }
    }
    // The general theorems with inexplicit constants have no numeric target;
    // they are exercised only through the property suites and explicit bounds.
    let covered = passed.contains(&1) && passed.contains(&7);
    println!(
        "criterion 8 {} general theorems not reproducible numerically; covered by criteria 1 and 7",
        if covered { "PASS" } else { "FAIL" }
    );
    if !covered {
        failed += 1;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
