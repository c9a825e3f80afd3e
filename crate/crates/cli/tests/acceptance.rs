//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cliffsynth::guidance::{loss, loss_and_grad, train, GuidanceModel, ModelMeta, TrainConfig, DEFAULT_LAYER_DIMS};
use cliffsynth::oracle::{build_distance_table, gods_number, DistanceTable, OracleOptions};
use cliffsynth::rng::{self, domain};
use cliffsynth::search::{beam_synthesize, greedy_synthesize, verify_decomposition, GuidanceSource};
use cliffsynth::walker::{sample_batch, sample_walk, Scaling, WalkConfig};
use cliffsynth::{baseline_synthesize, clifford_group_size, MoveSet, PhaseMode, Tableau, WeightScheme};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn unit(n: usize) -> MoveSet {
    MoveSet::all_to_all(n, WeightScheme::Unit).unwrap()
}

fn cnot_count(n: usize) -> MoveSet {
    MoveSet::all_to_all(n, WeightScheme::CnotCount).unwrap()
}

fn group_size_law() -> Outcome {
    let two = clifford_group_size(2, true);
    let three = clifford_group_size(3, true);
    ensure(two == 11_520u32.into(), || format!("|Cl(2)| = {two}"))?;
    ensure(three == 92_897_280u32.into(), || format!("|Cl(3)| = {three}"))?;
    let ms = unit(2);
    ensure(ms.len() == 15, || format!("n=2 move set has {} moves", ms.len()))?;
    let table = ok(build_distance_table(&ms, PhaseMode::WithPhases, OracleOptions::default()))?;
    ensure(table.node_count() == 11_520, || format!("closure reached {} tableaus", table.node_count()))?;
    Ok(format!("|Cl(2)|={two}, |Cl(3)|={three}, n=2 closure={}", table.node_count()))
}

fn gods_number_n2() -> Outcome {
    let ms = unit(2);
    let mut parts = Vec::new();
    let mut modes_with_8 = Vec::new();
    for mode in [PhaseMode::WithPhases, PhaseMode::Phaseless] {
        let table = ok(build_distance_table(&ms, mode, OracleOptions::default()))?;
        let god = ok(gods_number(&table))?;
        let hist: Vec<String> = table.histogram().iter().map(|(d, c)| format!("{d}:{c}")).collect();
        println!("    n=2 {mode}: gods_number={god} histogram [{}]", hist.join(" "));
        if god == 8.0 {
            modes_with_8.push(mode.to_string());
        }
        parts.push(format!("{mode}={god}"));
    }
    ensure(!modes_with_8.is_empty(), || format!("no mode gives 8 ({})", parts.join(", ")))?;
    Ok(format!("{}; value 8 reproduced in mode {}", parts.join(", "), modes_with_8.join(",")))
}

fn moveset_counts() -> Outcome {
    let sizes: Vec<usize> = (2..=6).map(|n| unit(n).len()).collect();
    ensure(sizes == [15, 27, 42, 60, 81], || format!("sizes {sizes:?}"))?;
    Ok(format!("n=2..6 sizes {sizes:?}"))
}

fn soundness() -> Outcome {
    const PER_N: usize = 1000;
    const STEPS: usize = 60;
    let hamming = GuidanceSource::hamming();
    let mut solved = BTreeMap::new();
    for n in 2..=6 {
        let ms = cnot_count(n);
        for mode in [PhaseMode::WithPhases, PhaseMode::Phaseless] {
            let cfg = WalkConfig::new(n, Scaling::LogLinear, 4, mode);
            let (mut greedy_ok, mut beam_ok) = (0, 0);
            for i in 0..PER_N as u64 {
                let mut r = rng::stream(4, &[domain::BENCH_INSTANCES, n as u64, i, mode.has_phases() as u64]);
                let x = ok(sample_walk(&cfg, &ms, &mut r))?.tableau;
                let b = ok(baseline_synthesize(&x, &ms))?;
                ensure(verify_decomposition(&x, &b.gates), || format!("baseline failed to reproduce n={n} #{i}"))?;
                let g = ok(greedy_synthesize(&x, &ms, &hamming, STEPS, &mut r))?;
                if g.success {
                    greedy_ok += 1;
                    ensure(verify_decomposition(&x, &g.gates), || format!("greedy output wrong for n={n} #{i}"))?;
                }
                let bm = ok(beam_synthesize(&x, &ms, &hamming, 3, STEPS, &mut r))?;
                if bm.success {
                    beam_ok += 1;
                    ensure(verify_decomposition(&x, &bm.gates), || format!("beam output wrong for n={n} #{i}"))?;
                }
            }
            solved.insert((n, mode.to_string()), (greedy_ok, beam_ok));
        }
    }

    // Walk upper bounds against exact distances.
    let mut checked = 0;
    let cases: [(usize, PhaseMode, &str); 4] = [
        (1, PhaseMode::WithPhases, "unit"),
        (2, PhaseMode::WithPhases, "unit"),
        (2, PhaseMode::WithPhases, "cnot_count"),
        (3, PhaseMode::Phaseless, "unit"),
    ];
    for (n, mode, weights) in cases {
        let ms = if weights == "unit" { unit(n) } else { cnot_count(n) };
        let table = ok(build_distance_table(&ms, mode, OracleOptions { allow_large: true, ..Default::default() }))?;
        let mut cfg = WalkConfig::new(n, Scaling::LogLinear, 5, mode);
        if n == 1 {
            // log-linear scaling gives length 0 at one qubit.
            cfg.lmax_override = Some(12);
        }
        for i in 0..PER_N as u64 {
            let mut r = rng::stream(5, &[domain::DATASET, n as u64, i]);
            let s = ok(sample_walk(&cfg, &ms, &mut r))?;
            let d = ok(table.distance(&s.tableau))?;
            ensure(s.ub_distance >= d, || {
                format!("n={n} {mode} {weights}: walk bound {} < distance {d}", s.ub_distance)
            })?;
            checked += 1;
        }
    }
    let summary: Vec<String> = solved.iter().map(|((n, m), (g, b))| format!("n={n} {m} greedy {g}/beam {b}")).collect();
    println!("    hamming-guided successes (all verified): {}", summary.join("; "));
    Ok(format!("0 violations over {} searched instances and {checked} walk bounds", 10 * PER_N))
}

fn gradient_check() -> Outcome {
    let mut r = rng::stream(10, &[]);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let ms = cnot_count(3);
    let cfg = WalkConfig::new(3, Scaling::LogLinear, 77, PhaseMode::WithPhases);
    for b in 0..5 {
        let data = ok(sample_batch(&cfg, &ms, 128, b))?;
        let meta = ModelMeta {
            n: 3,
            phase_mode: PhaseMode::WithPhases,
            feature_layout_version: 1,
            moveset_fingerprint: ms.fingerprint(),
        };
        let m = ok(GuidanceModel::new(meta, &DEFAULT_LAYER_DIMS, &mut r))?;
        let (_, grad) = ok(loss_and_grad(&m, &data))?;
        let params = m.params();
        for _ in 0..10 {
            let i = r.gen_range(0..params.len());
            let mut probe = m.clone();
            let mut p = params.clone();
            p[i] = params[i] + h;
            ok(probe.set_params(&p))?;
            let up = ok(loss(&probe, &data))?;
            p[i] = params[i] - h;
            ok(probe.set_params(&p))?;
            let down = ok(loss(&probe, &data))?;
            let numeric = (up - down) / (2.0 * h);
            let rel = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-4, || format!("worst relative error {worst:.2e}"))?;
    Ok(format!("50 probes, worst relative error {worst:.2e}"))
}

fn learning_result() -> Outcome {
    let ms = cnot_count(3);
    let walk = WalkConfig::new(3, Scaling::LogLinear, 2024, PhaseMode::Phaseless);
    ensure(walk.lmax() == 48, || format!("L_max is {}", walk.lmax()))?;
    let mut cfg = TrainConfig::new(walk.clone());
    cfg.batch_size = 500;
    cfg.num_batches = 300;
    cfg.learning_rate = 1e-3;
    let (model, report) = ok(train(&cfg, &ms))?;
    let (first, last) = (report.losses[0], report.final_loss);

    let g = GuidanceSource::Learned(&model);
    let mut solved = 0;
    for i in 0..200u64 {
        let mut r = rng::stream(2024, &[domain::BENCH_INSTANCES, 3, i]);
        let x = ok(sample_walk(&walk, &ms, &mut r))?.tableau;
        let res = ok(beam_synthesize(&x, &ms, &g, 3, 200, &mut r))?;
        if res.success {
            ensure(verify_decomposition(&x, &res.gates), || format!("instance {i}: invalid decomposition"))?;
            solved += 1;
        }
    }
    let pct = 100.0 * solved as f64 / 200.0;
    let detail =
        format!("loss {first:.3} -> {last:.3} in {:.1?}; beam w=3 solved {solved}/200 ({pct:.1}%)", report.wall_time);
    ensure(last <= -0.3, || format!("final loss too high: {detail}"))?;
    ensure(last < first, || format!("no training progress: {detail}"))?;
    ensure(pct >= 90.0, || format!("success rate too low: {detail}"))?;
    Ok(detail)
}

fn ordinal_quality() -> Outcome {
    let ms = unit(2);
    let table = ok(build_distance_table(&ms, PhaseMode::WithPhases, OracleOptions::default()))?;
    let walk = WalkConfig::new(2, Scaling::LogLinear, 7, PhaseMode::WithPhases);
    let mut cfg = TrainConfig::new(walk);
    cfg.batch_size = 500;
    cfg.num_batches = 300;
    let (model, _) = ok(train(&cfg, &ms))?;

    let elements: Vec<Tableau> = ok(table.entries())?.into_iter().map(|(t, _)| t).collect();
    let mut r = rng::stream(7, &[domain::SEARCH]);
    let (mut left, mut right, mut ties) = (Vec::new(), Vec::new(), 0);
    let mut diffs = Vec::new();
    while left.len() < 10_000 {
        let t = &elements[r.gen_range(0..elements.len())];
        let m = &ms.moves()[r.gen_range(0..ms.len())];
        let u = ok(t.apply_gate(&m.gate))?;
        let dd = ok(table.distance(t))? - ok(table.distance(&u))?;
        if dd == 0.0 {
            ties += 1;
            continue;
        }
        diffs.push(dd);
        left.push(t.clone());
        right.push(u);
    }
    let gl = ok(model.evaluate(&left))?;
    let gr = ok(model.evaluate(&right))?;
    let pairs = diffs.len();
    let agree = (0..pairs).filter(|&i| gl[i] != gr[i] && (gl[i] - gr[i]).signum() == diffs[i].signum()).count();
    let frac = agree as f64 / pairs as f64;
    let detail = format!(
        "sign agreement {frac:.4} over {pairs} pairs with distinct distances ({ties} equal-distance pairs skipped)"
    );
    ensure(frac > 0.5, || detail.clone())?;
    Ok(detail)
}

fn check_greedy_on_exact(table: &DistanceTable, ms: &MoveSet, x: &Tableau, r: &mut impl Rng) -> Result<usize, String> {
    let g = GuidanceSource::Exact(table);
    let res = ok(greedy_synthesize(x, ms, &g, 8, r))?;
    ensure(res.success, || format!("greedy failed on\n{x}"))?;
    ensure(verify_decomposition(x, &res.gates), || "invalid decomposition".into())?;
    let mut y = ok(x.inverse())?;
    let mut d = ok(table.distance(&y))?;
    for m in &res.gates {
        y = ok(y.apply_gate(&m.gate))?;
        let next = ok(table.distance(&y))?;
        ensure(next == d - 1.0, || format!("step from distance {d} went to {next}"))?;
        d = next;
    }
    ensure(d == 0.0 && y.is_identity(), || "did not end at the identity".into())?;
    Ok(res.gates.len())
}

fn greedy_on_exact() -> Outcome {
    let ms = unit(2);
    let mut total = 0;
    let mut longest = 0;
    for mode in [PhaseMode::WithPhases, PhaseMode::Phaseless] {
        let table = ok(build_distance_table(&ms, mode, OracleOptions::default()))?;
        let mut r = rng::stream(8, &[mode.has_phases() as u64]);
        for (x, _) in ok(table.entries())? {
            longest = longest.max(check_greedy_on_exact(&table, &ms, &x, &mut r)?);
            total += 1;
        }
        let cfg = WalkConfig::new(2, Scaling::LogLinear, 8, mode);
        for _ in 0..1000 {
            let x = ok(sample_walk(&cfg, &ms, &mut r))?.tableau;
            longest = longest.max(check_greedy_on_exact(&table, &ms, &x, &mut r)?);
            total += 1;
        }
    }
    Ok(format!("{total}/{total} solved (every n=2 element in both modes plus 2000 walks), longest {longest} steps"))
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cliffsynth"))
        .arg("--out-dir")
        .arg(dir)
        .args(["--seed", "31"])
        .args(args)
        .env_remove("CLIFFSYNTH_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))
}

fn run_pipeline(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let walks = dir.join("walks_n2.txt");
    let model = dir.join("model_n2.json");
    cli(dir, &["gen-data", "--n", "2", "--count", "500"])?;
    cli(dir, &["train", "--n", "2", "--batches", "60", "--batch-size", "300", "--dataset", walks.to_str().unwrap()])?;
    std::fs::copy(dir.join("loss_n2.csv"), dir.join("loss_dataset.csv")).map_err(|e| e.to_string())?;
    cli(dir, &["train", "--n", "2", "--batches", "60", "--batch-size", "300"])?;
    cli(dir, &["synth", "--model", model.to_str().unwrap(), "--random-walk", "12"])?;
    cli(dir, &["synth", "--exact", "--n", "2", "--random-walk", "20", "--output", "exact_decomposition"])?;
    cli(dir, &["bench", "--n", "2", "--instances", "50"])?;
    cli(dir, &["gods-number", "--n", "1"])?;
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let bytes = std::fs::read(entry.path()).map_err(|e| e.to_string())?;
        files.insert(entry.file_name().to_string_lossy().into_owned(), bytes);
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_pipeline(a.path())?;
    let second = run_pipeline(b.path())?;
    let names: Vec<&String> = first.keys().collect();
    ensure(names == second.keys().collect::<Vec<_>>(), || "different file sets".into())?;
    for (name, bytes) in &first {
        ensure(&second[name] == bytes, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} output files byte-identical across two runs", first.len()))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 9] = [
        (1, "group-size law", group_size_law),
        (2, "God's number n=2", gods_number_n2),
        (3, "move-set counts", moveset_counts),
        (4, "soundness", soundness),
        (5, "gradient check", gradient_check),
        (6, "desk-scale learning", learning_result),
        (7, "ordinal quality", ordinal_quality),
        (8, "greedy on exact guidance", greedy_on_exact),
        (9, "determinism", determinism),
    ];
    let mut failed = 0;
    for (k, name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = Duration::as_secs_f64(&start.elapsed());
        match outcome {
            Ok(detail) => println!("PASS criterion {k} ({name}): {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {k} ({name}): {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
