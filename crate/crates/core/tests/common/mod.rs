//! Checks shared by the integration tests and the acceptance report. Each
//! returns a short detail string on success and the reason on failure.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcrd::dsl::{classify, parse, pretty_print, DslErrorKind};
use pcrd::filter::{filter_and_select, FilterConfig};
use pcrd::llm::{Gateway, MockProvider};
use pcrd::network::{shortest_path, FreightTask, Hub, RoadEdge, TransportGraph};
use pcrd::pipeline::{replay_selection, run_pipeline, EnvSource, PipelineConfig, RunHooks, RunManifest};
use pcrd::sim::scenarios::single_edge_pair;
use pcrd::sim::{derive_deadline, ActionSpec, EnvConfig, EnvFactory, Objective, Scenario};
use pcrd::trainer::{evaluate_policy, random_baseline, rollout, train, FixedPolicy, RandomPolicy, TrainConfig};

pub type Check = Result<String, String>;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- filter

/// Straight transcription of the window means, population deviations,
/// regression sign and max-of-max selection with the late-mean fallback.
pub mod oracle {
    pub struct Flags {
        pub mean: bool,
        pub std: bool,
        pub slope: bool,
    }

    pub fn flags(j: &[f64], alpha: usize, beta: usize, v_th: f64) -> Flags {
        let l = j.len();
        let mut em = 0.0;
        for t in 1..=alpha {
            em += j[t - 1];
        }
        em /= alpha as f64;
        let mut lm = 0.0;
        for t in (l - beta + 1)..=l {
            lm += j[t - 1];
        }
        lm /= beta as f64;

        let mut ev = 0.0;
        for t in 1..=alpha {
            ev += (j[t - 1] - em) * (j[t - 1] - em);
        }
        ev = (ev / alpha as f64).sqrt();
        let mut lv = 0.0;
        for t in (l - beta + 1)..=l {
            lv += (j[t - 1] - lm) * (j[t - 1] - lm);
        }
        lv = (lv / beta as f64).sqrt();
        let std = if ev == 0.0 { lv == 0.0 } else { lv / ev < v_th };

        let mut lmean = 0.0;
        for t in 1..=l {
            lmean += t as f64;
        }
        lmean /= l as f64;
        let mut jm = 0.0;
        for t in 1..=l {
            jm += j[t - 1];
        }
        jm /= l as f64;
        let mut cov = 0.0;
        let mut var = 0.0;
        for t in 1..=l {
            cov += (t as f64 - lmean) * (j[t - 1] - jm);
        }
        for t in 1..=l {
            var += (t as f64 - lmean).powi(2);
        }
        cov /= l as f64;
        var /= l as f64;
        Flags {
            mean: em < lm,
            std,
            slope: cov / var > 0.0,
        }
    }

    pub fn select(curves: &[Vec<f64>], alpha: usize, beta: usize, v_th: f64) -> (usize, bool) {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in curves.iter().enumerate() {
            let f = flags(c, alpha, beta, v_th);
            if f.mean && f.std && f.slope {
                let m = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if best.is_none() || m > best.unwrap().1 {
                    best = Some((i, m));
                }
            }
        }
        if let Some((i, _)) = best {
            return (i, false);
        }
        let mut fb: Option<(usize, f64)> = None;
        for (i, c) in curves.iter().enumerate() {
            let lm = c[c.len() - beta..].iter().sum::<f64>() / beta as f64;
            if fb.is_none() || lm > fb.unwrap().1 {
                fb = Some((i, lm));
            }
        }
        (fb.unwrap().0, true)
    }
}

/// Ramps, plateaus, decays, noise and their mixtures.
pub fn random_curve(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let kind = rng.random_range(0..6);
    let scale = rng.random_range(0.1..500.0);
    let noise = if rng.random_bool(0.5) { rng.random_range(0.0..0.3) * scale } else { 0.0 };
    let knee = rng.random_range(5..len) as f64;
    let base = rng.random_range(-100.0..100.0);
    (1..=len)
        .map(|t| {
            let t = t as f64;
            let x = match kind {
                0 => base + scale * t / len as f64,
                1 => base + scale * t.min(knee) / knee,
                2 => base + scale * (-t / knee).exp(),
                3 => base,
                4 => base + scale * (1.0 - (-t / knee).exp()),
                _ => base - scale * t / len as f64,
            };
            x + noise * (rng.random::<f64>() - 0.5)
        })
        .collect()
}

pub fn filter_oracle(n: usize) -> Check {
    let cfg = FilterConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_901);
    let start = Instant::now();
    let curves: Vec<Vec<f64>> = (0..n).map(|_| random_curve(&mut rng, cfg.length)).collect();
    let mut disagreements = 0;
    let mut selections = 0;
    for group in curves.chunks(5) {
        let sel = filter_and_select(group, &cfg).map_err(|e| e.to_string())?;
        for (c, s) in group.iter().zip(&sel.stats) {
            let o = oracle::flags(c, cfg.alpha, cfg.beta, cfg.v_th);
            if (o.mean, o.std, o.slope) != (s.pass_mean, s.pass_std, s.pass_slope) {
                disagreements += 1;
            }
        }
        if oracle::select(group, cfg.alpha, cfg.beta, cfg.v_th) != (sel.best_index, sel.fallback) {
            disagreements += 1;
        }
        selections += 1;
    }
    let elapsed = start.elapsed();
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} curves, {selections} selections, 0 disagreements in {elapsed:.1?}"))
}

pub fn filter_examples() -> Check {
    use pcrd::filter::curve_stats;
    let cfg = FilterConfig::default();
    let curve = |f: fn(f64) -> f64| (1..=100).map(|t| f(t as f64)).collect::<Vec<_>>();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let consecutive_std = |n: f64| ((n * n - 1.0) / 12.0).sqrt();

    let c = curve_stats(&curve(|_| 5.0), &cfg).map_err(|e| e.to_string())?;
    ensure(!c.pass_mean && !c.pass_slope, || "constant curve should fail mean and slope".into())?;
    ensure(close(c.early_mean, 5.0) && close(c.late_mean, 5.0), || "constant means".into())?;

    let l = curve_stats(&curve(|t| t), &cfg).map_err(|e| e.to_string())?;
    ensure(l.pass_mean && l.pass_slope && !l.pass_std, || "J = t flags".into())?;
    ensure(close(l.early_mean, 10.5) && close(l.late_mean, 80.5), || "J = t means".into())?;
    ensure(close(l.early_std, consecutive_std(20.0)) && close(l.late_std, consecutive_std(40.0)), || {
        format!("J = t stds {} {}", l.early_std, l.late_std)
    })?;
    let ratio = l.late_std / l.early_std;
    ensure(close(ratio, consecutive_std(40.0) / consecutive_std(20.0)), || format!("ratio {ratio}"))?;

    let p = curve_stats(&curve(|t| t.min(60.0)), &cfg).map_err(|e| e.to_string())?;
    ensure(p.passes(), || "min(t, 60) should pass".into())?;
    ensure(close(p.late_std, 0.0) && close(p.early_std, 5.766281297335398), || "plateau stds".into())?;
    Ok(format!("constant fails mean/slope; J = t std ratio {ratio:.4}; min(t, 60) passes all"))
}

// ---------------------------------------------------------------- simulator

pub fn objective_pair() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let zero = pcrd::dsl::compile("term z weight 0: 0").unwrap();
    let mut out = Vec::new();
    for objective in [Objective::SingleObject, Objective::MultiObject] {
        let f = single_edge_pair(objective);
        let mut env = f.make().map_err(|e| e.to_string())?;
        let r = rollout(&mut env, &mut FixedPolicy(ActionSpec::SpeedMed), &zero, &mut rng, false)
            .map_err(|e| e.to_string())?;
        ensure(r.totals.d_p == 100.0, || format!("D_p = {}", r.totals.d_p))?;
        ensure(r.totals.t_d == 0.0, || format!("T_d = {}", r.totals.t_d))?;
        let want = if objective == Objective::SingleObject { 170.0 } else { 1.0 };
        ensure(r.objective == want, || format!("{objective:?} J = {}", r.objective))?;
        out.push(format!("{objective:?} J = {}", r.objective));
    }
    Ok(format!("D_p = 100, {}", out.join(", ")))
}

/// A connected random network of 2..=6 hubs with 1..=10 routed trucks.
pub fn random_factory(seed: u64) -> EnvFactory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6u32);
    let hubs = (0..n)
        .map(|id| Hub {
            id,
            name: format!("h{id}"),
            lat: 30.0,
            lon: 120.0 + f64::from(id),
            population: 1000,
        })
        .collect();
    let mut pairs = Vec::new();
    for id in 1..n {
        pairs.push((rng.random_range(0..id), id));
    }
    for _ in 0..rng.random_range(0..n) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && !pairs.contains(&(a, b)) && !pairs.contains(&(b, a)) {
            pairs.push((a, b));
        }
    }
    let edges = pairs
        .iter()
        .flat_map(|&(a, b)| {
            let km = (rng.random_range(200..1200) as f64) / 10.0;
            [
                RoadEdge {
                    from_hub: a,
                    to_hub: b,
                    length_km: km,
                },
                RoadEdge {
                    from_hub: b,
                    to_hub: a,
                    length_km: km,
                },
            ]
        })
        .collect();
    let graph = TransportGraph::new(hubs, edges).expect("valid random graph");
    let scenario = [Scenario::Wait, Scenario::Speed, Scenario::Mix][rng.random_range(0..3)];
    let config = EnvConfig::default().with_scenario(scenario, Objective::SingleObject);
    let trucks = rng.random_range(1..=10u32);
    let missions = (0..trucks)
        .map(|truck_id| {
            let origin = rng.random_range(0..n);
            let mut destination = rng.random_range(0..n);
            while destination == origin {
                destination = rng.random_range(0..n);
            }
            let route = shortest_path(&graph, origin, destination).expect("connected");
            let km = graph.route_length(&route).unwrap();
            let start_step = rng.random_range(1..=12);
            FreightTask {
                truck_id,
                origin,
                destination,
                start_step,
                deadline_step: derive_deadline(km, start_step, &config),
                route,
            }
        })
        .collect();
    EnvFactory::new(graph, missions, config)
}

pub struct RolloutAudit {
    pub max_dp_error: f64,
    pub max_km_error: f64,
    pub mask_violations: usize,
    pub unfinished: usize,
    pub actions: usize,
}

/// Random-policy rollouts with the trajectory recomputed independently.
pub fn audit_rollouts(count: u64) -> Result<RolloutAudit, String> {
    let zero = pcrd::dsl::compile("term z weight 0: 0").unwrap();
    let mut audit = RolloutAudit {
        max_dp_error: 0.0,
        max_km_error: 0.0,
        mask_violations: 0,
        unfinished: 0,
        actions: 0,
    };
    for seed in 0..count {
        let f = random_factory(seed);
        let mut env = f.make().map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let r = rollout(&mut env, &mut RandomPolicy, &zero, &mut rng, true).map_err(|e| e.to_string())?;
        let trucks = env.trucks();
        let slot_of = |id: u32| trucks.iter().position(|t| t.truck_id == id).unwrap();

        let mut position = vec![0.0; trucks.len()];
        let mut step_km = std::collections::BTreeMap::new();
        let mut members: std::collections::BTreeMap<(u32, u32), usize> = Default::default();
        for rec in &r.trajectory {
            let slot = slot_of(rec.truck_id);
            let t = &trucks[slot];
            let pos = t.route_position(&rec.location).ok_or("location off route")?;
            step_km.insert((rec.step, slot), pos - position[slot]);
            position[slot] = pos;
            if let Some(p) = rec.platoon_id {
                *members.entry((rec.step, p)).or_default() += 1;
            }
            audit.actions += 1;
            let over = rec.delay_before > t.delay_cap_minutes;
            if over && matches!(rec.action, ActionSpec::Wait | ActionSpec::SpeedLow) {
                audit.mask_violations += 1;
            }
        }
        let mut dp = 0.0;
        for rec in &r.trajectory {
            if let Some(p) = rec.platoon_id {
                if members[&(rec.step, p)] >= 2 {
                    dp += step_km[&(rec.step, slot_of(rec.truck_id))];
                }
            }
        }
        audit.max_dp_error = audit.max_dp_error.max((dp - r.totals.d_p).abs());
        let traveled: f64 = trucks.iter().map(|t| t.traveled_km).sum();
        let routes: f64 = trucks.iter().filter(|t| t.finished).map(|t| t.route_km()).sum();
        audit.unfinished += trucks.iter().filter(|t| !t.finished).count();
        audit.max_km_error = audit.max_km_error.max((traveled - routes).abs());
    }
    Ok(audit)
}

pub fn conservation(audit: &RolloutAudit) -> Check {
    ensure(audit.max_dp_error <= 1e-6, || format!("D_p error {}", audit.max_dp_error))?;
    ensure(audit.max_km_error <= 1e-9, || format!("km error {}", audit.max_km_error))?;
    ensure(audit.unfinished == 0, || format!("{} trucks unfinished", audit.unfinished))?;
    Ok(format!(
        "max D_p error {:.1e} km, max distance error {:.1e} km",
        audit.max_dp_error, audit.max_km_error
    ))
}

pub fn mask_soundness(audit: &RolloutAudit) -> Check {
    ensure(audit.mask_violations == 0, || format!("{} violations", audit.mask_violations))?;
    Ok(format!("0 violations in {} actions", audit.actions))
}

// ---------------------------------------------------------------- DSL

pub fn corpus() -> Vec<(String, String, PathBuf)> {
    let root = crate_dir().join("fixtures/dsl_corpus");
    let mut out = Vec::new();
    for class in ["valid", "syntax", "semantic", "runtime"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(root.join(class))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            out.push((class.to_string(), std::fs::read_to_string(&f).unwrap(), f));
        }
    }
    out
}

fn expected_label(class: &str) -> &'static str {
    match class {
        "valid" => "VALID",
        "syntax" => "SYNTAX",
        "semantic" => "SEMANTIC",
        _ => "RUNTIME",
    }
}

const FUZZ_TOKENS: &[&str] = &[
    "term", "weight", ":", "(", ")", ",", "?", "+", "-", "*", "/", "<", "<=", "==", "!=", "and", "or", "not",
    "min", "max", "clamp", "abs", "exp", "log", "tanh", "platoon_size", "delay_minutes", "in_platoon", "x", "1",
    "0", "2.5", "1e308", "\n", " ", "#", "term t weight 1:",
];

pub fn fuzz_input(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    match rng.random_range(0..3) {
        0 => {
            while s.len() < 1024 {
                s.push(char::from(rng.random_range(0x20u8..0x7f)));
            }
        }
        1 => {
            while s.len() < 1024 {
                s.push_str(FUZZ_TOKENS[rng.random_range(0..FUZZ_TOKENS.len())]);
                s.push(' ');
            }
        }
        _ => {
            s.push_str("term t weight 1: ");
            let open = rng.random_range(0..500);
            s.push_str(&"(".repeat(open));
            while s.len() < 1024 {
                s.push_str(FUZZ_TOKENS[rng.random_range(0..FUZZ_TOKENS.len())]);
            }
        }
    }
    let mut bytes = s.into_bytes();
    bytes.truncate(1024);
    String::from_utf8_lossy(&bytes).into_owned()
}

pub fn dsl_taxonomy() -> Check {
    let files = corpus();
    ensure(files.len() == 30, || format!("corpus has {} programs", files.len()))?;
    let mut wrong = Vec::new();
    for (class, text, path) in &files {
        let got = classify(text).label();
        if got != expected_label(class) {
            wrong.push(format!("{} -> {got}", path.display()));
        }
        if class == "valid" {
            let p = parse(text).map_err(|e| e.to_string())?;
            let again = parse(&pretty_print(&p)).map_err(|e| e.to_string())?;
            ensure(p == again, || format!("round trip differs for {}", path.display()))?;
        }
    }
    ensure(wrong.is_empty(), || wrong.join("; "))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    let mut slowest = Duration::ZERO;
    let mut kinds = [0usize; 4];
    for _ in 0..1000 {
        let input = fuzz_input(&mut rng);
        let start = Instant::now();
        let c = classify(&input);
        slowest = slowest.max(start.elapsed());
        kinds[match c.kind() {
            None => 0,
            Some(DslErrorKind::Syntax) => 1,
            Some(DslErrorKind::Semantic) => 2,
            Some(DslErrorKind::Runtime) => 3,
        }] += 1;
    }
    ensure(slowest < Duration::from_millis(10), || format!("slowest fuzz input {slowest:?}"))?;
    Ok(format!(
        "30/30 classified, round trip ok, fuzz slowest {slowest:.1?} (valid {}, syntax {}, semantic {}, runtime {})",
        kinds[0], kinds[1], kinds[2], kinds[3]
    ))
}

// ---------------------------------------------------------------- trainer

pub fn trainer_smoke() -> Check {
    use pcrd::sim::scenarios::line_scenario;
    let defaults = TrainConfig::default();
    ensure((defaults.epsilon_at(25_000) - 0.525).abs() <= 1e-9, || "epsilon(25000)".into())?;
    ensure(defaults.curve_length() == 100, || "curve length".into())?;
    let start = Instant::now();
    let factory = line_scenario(Objective::SingleObject);
    let program = pcrd::dsl::compile("term p weight 1.0: in_platoon").unwrap();
    let baseline = random_baseline(&factory, &program, 500, 99).map_err(|e| e.to_string())?;
    let mut wins = 0;
    let mut js = Vec::new();
    for seed in 0..5 {
        let cfg = TrainConfig { seed, ..defaults.clone() };
        let out = train(&factory, &program, &cfg).map_err(|e| e.to_string())?;
        let j = evaluate_policy(&factory, &out.q, &program, 10, seed + 1000).map_err(|e| e.to_string())?;
        if j >= 1.5 * baseline {
            wins += 1;
        }
        js.push(format!("{j:.0}"));
    }
    let elapsed = start.elapsed();
    ensure(wins >= 4, || format!("only {wins}/5 seeds beat 1.5x baseline {baseline:.1}: [{}]", js.join(", ")))?;
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{wins}/5 seeds >= 1.5x random ({baseline:.1}); greedy J [{}]; eps(25000) = 0.525; L = 100; {elapsed:.1?}",
        js.join(", ")
    ))
}

// ---------------------------------------------------------------- pipeline

pub fn mock_dir() -> PathBuf {
    crate_dir().join("fixtures/mock_run")
}

pub fn mock_gateway() -> Gateway {
    Gateway::new(Arc::new(MockProvider::from_dir(&mock_dir()).unwrap()), 1.0, 4)
}

pub fn small_pipeline(root: &Path) -> PipelineConfig {
    PipelineConfig {
        n_iter: 3,
        k: 2,
        m: 1,
        seed: 7,
        worker_count: 3,
        source: EnvSource::Line,
        train: TrainConfig {
            max_training_episodes: 200,
            eval_every_episodes: 2,
            eval_rollouts_per_point: 1,
            ..TrainConfig::default()
        },
        run_root: root.to_path_buf(),
        ..PipelineConfig::default()
    }
}

pub fn pipeline_shape() -> Check {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = small_pipeline(a.path());
    ensure(cfg.strategies.len() == 4, || "strategy set".into())?;
    let ma = run_pipeline(&cfg, &mock_gateway(), RunHooks::default()).map_err(|e| e.error_line())?;
    let mb = run_pipeline(&small_pipeline(b.path()), &mock_gateway(), RunHooks::default()).map_err(|e| e.error_line())?;
    ensure(ma.pool_sizes() == vec![2, 5, 5], || format!("pool sizes {:?}", ma.pool_sizes()))?;
    ensure(ma.counters.trainings == 12, || format!("trainings {}", ma.counters.trainings))?;
    ensure(ma.counters.generation_calls == 9, || format!("generation calls {}", ma.counters.generation_calls))?;
    ensure(ma.without_timings() == mb.without_timings(), || "manifests differ between runs".into())?;
    let run_dir = a.path().join(&ma.run_id);
    let on_disk = RunManifest::load(&run_dir).map_err(|e| e.error_line())?;
    ensure(on_disk == ma, || "persisted manifest differs".into())?;
    for it in &ma.iterations {
        let sel = it.selection.as_ref().ok_or("missing selection")?;
        let replay = replay_selection(&run_dir, it, &ma.config.filter).map_err(|e| e.error_line())?;
        ensure(replay == Some((sel.best_index, sel.fallback)), || {
            format!("iteration {} replay {replay:?} vs recorded {}", it.iteration, sel.best_index)
        })?;
    }
    Ok("pool sizes [2, 5, 5], 12 trainings, 9 generation calls, identical manifests, replay agrees".into())
}

// ---------------------------------------------------------------- defaults

pub fn config_snapshot() -> Check {
    let t = TrainConfig::default();
    let got = (
        t.max_training_episodes,
        t.batch_size,
        t.replay_capacity,
        t.gamma,
        t.learning_rate,
        t.epsilon_init,
        t.epsilon_min,
        t.epsilon_decay_env_steps,
        t.eval_every_episodes,
    );
    ensure(got == (4000, 24, 100, 0.99, 1e-3, 1.0, 0.05, 50_000, 40), || format!("train {got:?}"))?;
    let f = FilterConfig::default();
    ensure((f.alpha, f.beta, f.v_th, f.length) == (20, 40, 0.5, 100), || format!("filter {f:?}"))?;
    let p = PipelineConfig::default();
    ensure((p.n_iter, p.k, p.m) == (5, 4, 1), || format!("pipeline {} {} {}", p.n_iter, p.k, p.m))?;
    ensure(p.train == t && p.filter == f, || "pipeline embeds non-default sub-configs".into())?;
    Ok("4000, 24, 100, 0.99, 1e-3, 1.0, 0.05, 50000, 40; 20, 40, 0.5, 100; 5, 4, 1".into())
}
