//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segmin::algorithms::{alg_base, alg_log_d, Algorithm};
use segmin::bench::{run_bench, summarize, BenchConfig, Instance};
use segmin::decompose::ceil_log;
use segmin::exact::{
    brute_force_opt, check_limits, exact_opt, ExactLimits, BRUTE_FORCE_MAX_CELLS, BRUTE_FORCE_MAX_H,
};
use segmin::generators::{
    adversarial_witness, gen_adversarial, gen_gaussian, gen_harmonic, gen_random, GaussianParams,
};
use segmin::matrix::markers;
use segmin::row_solvers::{base4_constant, segment_row_base3, segment_row_base4, SweepSolver};
use segmin::{lower_bound, rho, verify, IntensityMatrix};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_rows(count: usize, max_len: usize, h: u64, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| rng.gen_range(0..=h)).collect()
        })
        .collect()
}

fn family_instances() -> Vec<(String, IntensityMatrix)> {
    let mut out = Vec::new();
    for b in 2..=4 {
        for k in 1..=3 {
            out.push((
                format!("adversarial-{b}-{k}"),
                gen_adversarial(b, k).unwrap(),
            ));
        }
    }
    for b in 2..=5 {
        for cols in 1..=4 {
            out.push((
                format!("harmonic-{b}-{cols}"),
                gen_harmonic(b, cols).unwrap(),
            ));
        }
    }
    for seed in 0..5 {
        out.push((
            format!("gaussian-{seed}"),
            gen_gaussian(&GaussianParams::new(30, 30, seed)).unwrap(),
        ));
    }
    out
}

/// 200 instances within the exact limits: every other one also inside the
/// brute-force domain.
fn sandwich_instances() -> Vec<IntensityMatrix> {
    let tiny = [
        (1, 6),
        (2, 3),
        (3, 2),
        (2, 4),
        (3, 4),
        (4, 3),
        (2, 6),
        (1, 12),
    ];
    (0..200u64)
        .map(|i| {
            if i % 2 == 0 {
                let (m, n) = tiny[(i / 2) as usize % tiny.len()];
                gen_random(m, n, 1 + (i / 2) % 3, 1000 + i).unwrap()
            } else {
                let m = 1 + (i as usize / 2) % 8;
                let n = 1 + (i as usize / 16) % 8;
                gen_random(m, n, 1 + i % 5, 1000 + i).unwrap()
            }
        })
        .collect()
}

struct Sandwich {
    t: IntensityMatrix,
    opt: usize,
}

fn solve_sandwich() -> Result<Vec<Sandwich>, String> {
    sandwich_instances()
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let out = exact_opt(&t, ExactLimits::default()).map_err(|e| format!("#{i}: {e}"))?;
            ensure(out.is_optimal(), || format!("#{i}: exact search timed out"))?;
            ensure(verify(&t, &out.segmentation).unwrap().is_ok(), || {
                format!("#{i}: exact segmentation does not verify")
            })?;
            Ok(Sandwich { opt: out.size(), t })
        })
        .collect()
}

fn correctness_universality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut instances: Vec<(String, IntensityMatrix)> = (0..500)
        .map(|i| {
            let m = rng.gen_range(1..=12);
            let n = rng.gen_range(1..=12);
            let h = rng.gen_range(0..=25);
            (format!("random-{i}"), gen_random(m, n, h, i).unwrap())
        })
        .collect();
    instances.extend(family_instances());
    let mut runs = 0;
    for (id, t) in &instances {
        for alg in Algorithm::ALL {
            let s = alg.run(t).map_err(|e| format!("{id} {alg}: {e}"))?;
            ensure(verify(t, &s).unwrap().is_ok(), || {
                format!("{id} {alg}: sum mismatch")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "{} instances, {runs} pipeline outputs verified",
        instances.len()
    ))
}

fn base3_row_bound() -> Outcome {
    let rows = random_rows(1000, 40, 2, 2);
    for r in &rows {
        let s = segment_row_base3(r).map_err(|e| e.to_string())?;
        s.check_against(r).map_err(|e| e.to_string())?;
        let rho = markers(r);
        ensure(s.count(1) <= rho / 2, || {
            format!("{r:?}: {} 1-segments, rho {rho}", s.count(1))
        })?;
        ensure(s.count(2) <= (rho + 2) / 4, || {
            format!("{r:?}: {} 2-segments, rho {rho}", s.count(2))
        })?;
    }
    Ok(format!("{} rows", rows.len()))
}

fn base4_row_bound() -> Outcome {
    let c = base4_constant();
    let rows = random_rows(1000, 60, 3, 3);
    let mut slack = [i64::MIN; 3];
    for r in &rows {
        let s = segment_row_base4(r).map_err(|e| e.to_string())?;
        s.check_against(r).map_err(|e| e.to_string())?;
        let rho = markers(r) as u64;
        for v in 1..=3u64 {
            let n = s.count(v) as u64;
            // n <= rho / (2v) + C, kept in integers.
            ensure(2 * v * n <= rho + 2 * v * c, || {
                format!("{r:?}: {n} segments of value {v}, rho {rho}")
            })?;
            let excess = (2 * v * n) as i64 - rho as i64;
            slack[v as usize - 1] = slack[v as usize - 1].max(excess.div_euclid(2 * v as i64));
        }
    }
    Ok(format!(
        "{} rows, C = {c}, largest observed excess per value {:?}",
        rows.len(),
        slack
    ))
}

fn oracle_sandwich(cases: &[Sandwich]) -> Outcome {
    let mut brute = 0;
    for (i, c) in cases.iter().enumerate() {
        let lb = lower_bound(&c.t);
        ensure(lb <= c.opt, || {
            format!("#{i}: lower bound {lb} above opt {}", c.opt)
        })?;
        for alg in Algorithm::ALL {
            let size = alg.run(&c.t).unwrap().size();
            ensure(c.opt <= size, || {
                format!("#{i}: {alg} size {size} below opt {}", c.opt)
            })?;
        }
        let (m, n) = c.t.dims();
        if m * n <= BRUTE_FORCE_MAX_CELLS && c.t.max_value() <= BRUTE_FORCE_MAX_H {
            let b = brute_force_opt(&c.t).unwrap();
            ensure(b == c.opt, || {
                format!("#{i}: brute force {b} vs exact {}", c.opt)
            })?;
            brute += 1;
        }
    }
    Ok(format!(
        "{} instances, {brute} cross-checked by brute force",
        cases.len()
    ))
}

fn base3_bound(cases: &[Sandwich]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, c) in cases.iter().enumerate() {
        let size = alg_base(&c.t, 3).unwrap().size();
        let k = ceil_log(c.t.max_value(), 3) as usize + 1;
        // size <= (3/2 opt + 1/2) k
        ensure(2 * size <= (3 * c.opt + 1) * k, || {
            format!("#{i}: size {size}, opt {}, k {k}", c.opt)
        })?;
        if c.opt > 0 {
            worst = worst.max(size as f64 / ((1.5 * c.opt as f64 + 0.5) * k as f64));
        }
    }
    Ok(format!(
        "{} instances, max size/bound {worst:.4}",
        cases.len()
    ))
}

fn log_d_bound(cases: &[Sandwich]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, c) in cases.iter().enumerate() {
        let size = alg_log_d(&c.t, &SweepSolver, 2).unwrap().size();
        let bound = 2 * (ceil_log(c.t.row_difference(), 2) as usize + 1) * c.opt;
        ensure(size <= bound, || format!("#{i}: size {size} above {bound}"))?;
        if bound > 0 {
            worst = worst.max(size as f64 / bound as f64);
        }
    }
    Ok(format!(
        "{} instances, max size/bound {worst:.4}",
        cases.len()
    ))
}

fn adversarial_family() -> Outcome {
    let mut exact_checked = Vec::new();
    for b in 2..=4u64 {
        for k in 1..=3u32 {
            let t = gen_adversarial(b, k).unwrap();
            let w = adversarial_witness(b, k).unwrap();
            ensure(
                w.size() == b as usize && verify(&t, &w).unwrap().is_ok(),
                || format!("b={b} k={k}: witness invalid"),
            )?;
            let lb = rho(&t).div_ceil(2);
            ensure(lb == b as usize, || {
                format!("b={b} k={k}: lower bound {lb}")
            })?;
            let size = alg_base(&t, b).unwrap().size();
            let expected = 2 * (b as usize - 1) * k as usize + 1;
            ensure(size == expected, || {
                format!("b={b} k={k}: alg_base size {size}, expected {expected}")
            })?;
            let limits = ExactLimits::default();
            if check_limits(&t, &limits).is_ok() {
                let out = exact_opt(&t, limits).unwrap();
                ensure(out.opt() == Some(b as usize), || {
                    format!("b={b} k={k}: exact gave {:?}", out.opt())
                })?;
                exact_checked.push(format!("({b},{k})"));
            }
        }
    }
    Ok(format!(
        "9 instances; exact optimum confirmed for {}",
        exact_checked.join(" ")
    ))
}

fn harmonic_family() -> Outcome {
    let mut parts = Vec::new();
    for (b, need) in [(3u64, 3usize), (4, 4)] {
        let t = gen_harmonic(b, 2).unwrap();
        let out = exact_opt(&t, ExactLimits::default()).map_err(|e| e.to_string())?;
        ensure(out.is_optimal(), || format!("b={b}: timed out"))?;
        ensure(out.size() >= need, || {
            format!("b={b}: opt {} < {need}", out.size())
        })?;
        parts.push(format!("b={b}: opt {} >= {need}", out.size()));
    }
    Ok(parts.join(", "))
}

fn gaussian_selection() -> Vec<(u64, IntensityMatrix)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < 30 {
        let t = gen_gaussian(&GaussianParams::new(50, 50, seed)).unwrap();
        if t.row_difference() <= 3 && (15..=25).contains(&t.max_value()) {
            out.push((seed, t));
        }
        seed += 1;
    }
    out
}

fn gaussian_dominance() -> Outcome {
    let selected = gaussian_selection();
    let mut wins = 0;
    let (mut r_logd, mut r_b3) = (0.0, 0.0);
    for (_, t) in &selected {
        let logd = alg_log_d(t, &SweepSolver, 2).unwrap().size();
        let b3 = alg_base(t, 3).unwrap().size();
        let lb = lower_bound(t) as f64;
        r_logd += logd as f64 / lb;
        r_b3 += b3 as f64 / lb;
        if logd < b3 {
            wins += 1;
        }
    }
    let n = selected.len() as f64;
    let msg = format!(
        "logd strictly smaller on {wins}/30; mean size/lower bound logd {:.4}, b3 {:.4}; seeds 0..{}",
        r_logd / n,
        r_b3 / n,
        selected.last().unwrap().0 + 1
    );
    ensure(wins * 100 >= 80 * selected.len(), || msg.clone())?;
    Ok(msg)
}

fn bench_determinism() -> Outcome {
    let mut instances: Vec<Instance> = gaussian_selection()
        .into_iter()
        .map(|(seed, matrix)| Instance {
            id: format!("gaussian-{seed:04}"),
            matrix,
        })
        .collect();
    instances.extend(
        sandwich_instances()
            .into_iter()
            .enumerate()
            .map(|(i, matrix)| Instance {
                id: format!("random-{i:04}"),
                matrix,
            }),
    );
    instances.extend(
        family_instances()
            .into_iter()
            .map(|(id, matrix)| Instance { id, matrix }),
    );
    let run = |threads| {
        let config = BenchConfig {
            threads: Some(threads),
            ..BenchConfig::default()
        };
        Ok::<_, String>(summarize(
            &run_bench(&instances, &config).map_err(|e| e.to_string())?,
        ))
    };
    let one = run(1)?;
    let many = run(4)?;
    ensure(one == many, || {
        "reports differ between 1 and 4 threads".into()
    })?;
    Ok(format!(
        "{} instances, {} report bytes identical across 1 and 4 threads",
        instances.len(),
        one.json.len() + one.csv.len() + one.text.len()
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sandwich = solve_sandwich();
    let with_cases = |f: fn(&[Sandwich]) -> Outcome| match &sandwich {
        Ok(cases) => f(cases),
        Err(e) => Err(format!("exact oracle failed: {e}")),
    };
    let results: Vec<(&str, Outcome)> = vec![
        (
            "1 pipelines verify on random and generated matrices",
            correctness_universality(),
        ),
        ("2 {0,1,2} row segment counts", base3_row_bound()),
        ("3 {0,1,2,3} row segment counts", base4_row_bound()),
        (
            "4 lower bound <= opt <= every pipeline, exact = brute force",
            with_cases(oracle_sandwich),
        ),
        ("5 base-3 pipeline guarantee", with_cases(base3_bound)),
        ("6 row-first pipeline guarantee", with_cases(log_d_bound)),
        ("7 adversarial family", adversarial_family()),
        ("8 harmonic family", harmonic_family()),
        (
            "9 gaussian instances favour the row-first pipeline",
            gaussian_dominance(),
        ),
        (
            "10 bench reports independent of thread count",
            bench_determinism(),
        ),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
