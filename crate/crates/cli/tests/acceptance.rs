//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use cometlens::coalition::{coalition_summary, detect_coalitions, CoalitionEpisode};
use cometlens::interval::{build_timeline, find_parallel_pairs, Relation};
use cometlens::io::{parse_corpus, write_corpus, Format};
use cometlens::model::{objects_match, AnalysisConfig, Corpus, Granularity, Millis, ObjectRef, TimeInterval, Token};
use cometlens::segment::{actor_foci, partition, segment};
use cometlens::synth::{generate, scatter, ScatterSpec, ScheduleSegment, SynthSpec};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cometlens")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).env("COMETLENS_NO_COLOR", "1").output().expect("binary runs")
}

fn analyze_json(path: &Path, extra: &[&str]) -> Result<Value, String> {
    let p = path.to_str().expect("utf-8 path");
    let mut args = vec!["analyze", p, "--json"];
    args.extend_from_slice(extra);
    let out = run(&args);
    ensure!(out.status.success(), "analyze exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).map_err(|e| format!("report is not JSON: {e}"))
}

fn strs(v: &Value) -> Vec<&str> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_str).collect()).unwrap_or_default()
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

fn example1() -> Outcome {
    let t0 = Instant::now();
    let r = analyze_json(&fixture("example1.tsv"), &[])?;
    let pairs = r["pairs"].as_array().ok_or("no pairs")?;
    ensure!(pairs.len() == 1, "expected one pair, got {}", pairs.len());
    let p = &pairs[0];
    ensure!(p["pair"]["unit_a"] == "t2-1g" && p["pair"]["unit_b"] == "t2-1v", "unexpected units {}", p["pair"]);
    ensure!(p["verdict"] == "INTEGRATED", "verdict {}", p["verdict"]);
    ensure!(p["scope"] == "INDIVIDUAL", "scope {}", p["scope"]);
    ensure!(p["modality_relation"] == "REDUNDANT", "relation {}", p["modality_relation"]);
    ensure!(strs(&r["corpus"]["actors"]) == ["L"], "actors {}", r["corpus"]["actors"]);
    let took = within(Duration::from_secs(1), t0)?;
    Ok(format!("1 pair (L, INTEGRATED/INDIVIDUAL, REDUNDANT) in {took:.2?}"))
}

fn find_pair<'a>(r: &'a Value, a: &str, b: &str) -> Result<&'a Value, String> {
    r["pairs"]
        .as_array()
        .and_then(|ps| ps.iter().find(|p| p["pair"]["unit_a"] == a && p["pair"]["unit_b"] == b))
        .ok_or_else(|| format!("pair {a}/{b} missing"))
}

fn example2() -> Outcome {
    let t0 = Instant::now();
    let r = analyze_json(&fixture("example2.tsv"), &[])?;
    let ints: Vec<&Value> = r["episodes"].as_array().ok_or("no episodes")?.iter().filter(|e| e["label"] == "INT").collect();
    ensure!(ints.len() == 1, "expected one INT episode, got {}", ints.len());
    let blocks = ints[0]["partition"].as_array().ok_or("no partition")?;
    ensure!(blocks.len() == 1 && strs(&blocks[0]["actors"]) == ["C", "L"], "partition {}", ints[0]["partition"]);
    let lines12 = find_pair(&r, "t3-1", "t3-2")?;
    ensure!(lines12["modality_relation"] == "REDUNDANT", "lines 1-2: {}", lines12["modality_relation"]);
    let detail = find_pair(&r, "t3-1", "t3-3")?;
    ensure!(detail["modality_relation"] == "COMPLEMENTARY", "L graphical / C verbal: {}", detail["modality_relation"]);

    let out = run(&["episodes", fixture("example2.tsv").to_str().unwrap()]);
    ensure!(out.status.success(), "episodes exited {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(text.lines().filter(|l| l.contains("INT") && !l.contains("NON_INT")).count() == 1, "episodes text:\n{text}");
    let took = within(Duration::from_secs(1), t0)?;
    Ok(format!("INT {{C,L}}, lines 1-2 REDUNDANT, detailing COMPLEMENTARY in {took:.2?}"))
}

fn example3() -> Outcome {
    let t0 = Instant::now();
    let path = fixture("example3.tsv");
    let r = analyze_json(&path, &["--pattern", "COMPOSITE"])?;
    let span = &r["corpus"]["span"];
    ensure!(span["start"].as_f64() == Some(43671.0) && span["end"].as_f64() == Some(43718.0), "span {span}");
    let matches = r["patterns"][0]["matches"].as_array().ok_or("no pattern result")?;
    ensure!(!matches.is_empty(), "INT ... NON_INT ... INT not found");
    for m in matches {
        let labels = strs(&m["labels"]);
        ensure!(labels.first() == Some(&"INT") && labels.last() == Some(&"INT"), "match labels {labels:?}");
        ensure!(labels.contains(&"NON_INT"), "match without NON_INT: {labels:?}");
    }
    let cs = r["coalitions"].as_array().ok_or("no coalitions")?;
    ensure!(cs.len() == 1, "expected one coalition, got {}", cs.len());
    let c = &cs[0];
    ensure!(strs(&c["coalition_block"]) == ["C", "M"], "block {}", c["coalition_block"]);
    ensure!(c["coalition_focus"]["problem"] == "PB1", "focus {}", c["coalition_focus"]);
    let opp = c["opposed"].as_array().ok_or("no opposed")?;
    ensure!(opp.len() == 1 && strs(&opp[0]["actors"]) == ["L"], "opposed {}", c["opposed"]);
    ensure!(opp[0]["focus"]["problem"] == "PB2", "opposed focus {}", opp[0]["focus"]);
    ensure!(c["disalignment"] == "PROBLEM_SHIFT", "disalignment {}", c["disalignment"]);

    let space = analyze_json(&path, &["--granularity", "SPACE"])?;
    ensure!(space["coalitions"].as_array().is_some_and(Vec::is_empty), "SPACE coalitions {}", space["coalitions"]);
    let took = within(Duration::from_secs(1), t0)?;
    Ok(format!("{} composite match(es), {{C,M}}@PB1 vs {{L}}@PB2 PROBLEM_SHIFT, none at SPACE, in {took:.2?}", matches.len()))
}

/// All-pairs oracle: closed intervals meet when neither lies wholly before
/// the other; positive-length intervals that only touch are not overlapping.
fn brute_pairs(corpus: &Corpus, tol: u64) -> BTreeSet<(String, String, Relation, u64, u64)> {
    let us = corpus.units();
    let mut out = BTreeSet::new();
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            let (a, b) = (&us[i], &us[j]);
            let (s1, e1) = (a.interval.start().as_ms(), a.interval.end().as_ms());
            let (s2, e2) = (b.interval.start().as_ms(), b.interval.end().as_ms());
            let some_point = s1 == e1 || s2 == e2;
            let found = if (s1, e1) == (s2, e2) {
                Some((Relation::Simultaneous, s1, e1))
            } else if (s1 < e2 && s2 < e1) || (some_point && s1 <= e2 && s2 <= e1) {
                Some((Relation::Overlap, s1.max(s2), e1.min(e2)))
            } else {
                let (gs, ge) = if e1 <= s2 { (e1, s2) } else { (e2, s1) };
                (ge - gs <= tol).then_some((Relation::Near, gs, ge))
            };
            if let Some((rel, s, e)) = found {
                let (x, y) = if a.id <= b.id { (&a.id, &b.id) } else { (&b.id, &a.id) };
                out.insert((x.to_string(), y.to_string(), rel, s, e));
            }
        }
    }
    out
}

fn oracle() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut total = 0;
    for k in 0..100u64 {
        let mut spec = ScatterSpec::new(1000 + k, rng.gen_range(0..=200));
        spec.actors = rng.gen_range(1..=5);
        spec.span = Millis(rng.gen_range(1_000..=120_000));
        spec.max_duration = Millis(rng.gen_range(1..=8_000));
        spec.point_rate = [0.0, 0.05, 0.3][k as usize % 3];
        let corpus = scatter(&spec);
        let config = AnalysisConfig { gap_tolerance: Millis(rng.gen_range(0..=2_000)), ..AnalysisConfig::default() };
        let swept: BTreeSet<_> = find_parallel_pairs(&corpus, &config)
            .into_iter()
            .map(|p| (p.unit_a.to_string(), p.unit_b.to_string(), p.relation, p.shared.start().as_ms(), p.shared.end().as_ms()))
            .collect();
        let brute = brute_pairs(&corpus, config.gap_tolerance.as_ms());
        ensure!(swept == brute, "corpus {k} (seed {}): sweep {} pairs, oracle {}", spec.seed, swept.len(), brute.len());
        total += brute.len();
    }
    let took = within(Duration::from_secs(10), t0)?;
    Ok(format!("100 corpora, {total} pairs, exact set equality in {took:.2?}"))
}

const POOL: [&str; 8] = ["SOL:a@PB1", "SOL:b@PB1", "SOL:c@PB2", "SOL:d@PB3", "TASK:t1", "PROC:p1", "DAT@PB1", "GOAL"];

/// A random schedule of 20-40 s segments with at least one planted
/// coalition: two actors on one problem, the rest elsewhere.
fn trial_spec(trial: u64, jitter: Millis) -> SynthSpec {
    let mut rng = StdRng::seed_from_u64(trial);
    let actors: Vec<String> = ["A", "B", "C", "D"][..rng.gen_range(3..=4)].iter().map(|s| s.to_string()).collect();
    let n = rng.gen_range(3..=6);
    let planted = rng.gen_range(0..n);
    let mut schedule = Vec::new();
    let mut at = 0u64;
    for i in 0..n {
        let end = at + rng.gen_range(20_000..=40_000);
        let mut assign = BTreeMap::new();
        if i == planted {
            let mut order = actors.clone();
            for k in (1..order.len()).rev() {
                order.swap(k, rng.gen_range(0..=k));
            }
            let (pb, other) = if rng.gen_bool(0.5) { ("PB1", "SOL:c@PB2") } else { ("PB2", "SOL:a@PB1") };
            assign.insert(order[0].clone(), format!("SOL:x@{pb}"));
            assign.insert(order[1].clone(), format!("SOL:y@{pb}"));
            for a in &order[2..] {
                assign.insert(a.clone(), if rng.gen_bool(0.5) { other.to_string() } else { "TASK:t1".to_string() });
            }
        } else {
            for a in &actors {
                if rng.gen_bool(0.9) {
                    assign.insert(a.clone(), POOL[rng.gen_range(0..POOL.len())].to_string());
                }
            }
        }
        schedule.push(ScheduleSegment { start: Millis(at), end: Millis(end), assign });
        at = end;
    }
    SynthSpec {
        seed: 50_000 + trial,
        actors,
        span: Millis(at),
        schedule,
        unit_rate: rng.gen_range(20.0..80.0),
        modality_mix: 0.4,
        jitter,
        granularity: Granularity::Problem,
    }
}

fn iou(a: &TimeInterval, b: &TimeInterval) -> f64 {
    let inter = a.intersection(b).map_or(0, |i| i.duration().as_ms());
    let union = a.duration().as_ms() + b.duration().as_ms() - inter;
    if union == 0 {
        return 0.0;
    }
    inter as f64 / union as f64
}

/// Best IoU between a planted coalition and any contiguous run of detected
/// coalition episodes with the same membership, focus and opposition.
fn best_iou(planted: &CoalitionEpisode, detected: &[CoalitionEpisode]) -> f64 {
    let same = |c: &&CoalitionEpisode| {
        c.coalition_block == planted.coalition_block && c.coalition_focus == planted.coalition_focus && c.opposed == planted.opposed
    };
    let mut runs: Vec<TimeInterval> = Vec::new();
    for c in detected.iter().filter(same) {
        match runs.last_mut() {
            Some(r) if r.end() == c.interval.start() => *r = r.hull(&c.interval),
            _ => runs.push(c.interval),
        }
    }
    runs.iter().map(|r| iou(r, &planted.interval)).fold(0.0, f64::max)
}

fn recovery() -> Outcome {
    let t0 = Instant::now();
    let config = AnalysisConfig::default();
    let mut planted_total = 0;
    for trial in 0..200 {
        let (corpus, truth) = generate(&trial_spec(trial, Millis::ZERO)).map_err(|e| format!("trial {trial}: {e}"))?;
        let seg = segment(&corpus, &config).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(seg.episodes.len() == truth.episodes.len(), "trial {trial}: {} episodes, expected {}", seg.episodes.len(), truth.episodes.len());
        for (got, want) in seg.episodes.iter().zip(&truth.episodes) {
            ensure!(
                got.interval == want.interval && got.label == want.label && got.partition == want.partition,
                "trial {trial}: episode {:?} {} differs from planted {:?} {}",
                got.interval,
                got.label,
                want.interval,
                want.label
            );
        }
        let found = detect_coalitions(&seg.episodes);
        ensure!(found.len() == truth.coalitions.len(), "trial {trial}: {} coalitions, expected {}", found.len(), truth.coalitions.len());
        for (got, want) in found.iter().zip(&truth.coalitions) {
            ensure!(
                got.interval == want.interval
                    && got.coalition_block == want.coalition_block
                    && got.coalition_focus == want.coalition_focus
                    && got.opposed == want.opposed
                    && got.disalignment == want.disalignment,
                "trial {trial}: coalition {:?} differs from planted {:?}",
                got.interval,
                want.interval
            );
        }
        let summary = coalition_summary(&found, &corpus);
        ensure!(summary.total.count as usize == truth.coalitions.len(), "trial {trial}: summary count {}", summary.total.count);
        planted_total += truth.coalitions.len();
    }

    let mut ok = 0;
    let mut worst = 1.0f64;
    for trial in 0..200 {
        let (corpus, truth) = generate(&trial_spec(trial, config.gap_tolerance)).map_err(|e| format!("trial {trial}: {e}"))?;
        let seg = segment(&corpus, &config).map_err(|e| format!("trial {trial}: {e}"))?;
        let found = detect_coalitions(&seg.episodes);
        ensure!(!truth.coalitions.is_empty(), "trial {trial}: nothing planted");
        let score = truth.coalitions.iter().map(|p| best_iou(p, &found)).fold(1.0, f64::min);
        worst = worst.min(score);
        if score >= 0.9 {
            ok += 1;
        }
    }
    ensure!(ok * 100 >= 95 * 200, "jittered: {ok}/200 trials with IoU >= 0.9 (worst {worst:.3})");
    let took = within(Duration::from_secs(30), t0)?;
    Ok(format!(
        "zero jitter exact on 200 trials ({planted_total} coalitions); jitter 1 s: {ok}/200 trials IoU >= 0.9, worst {worst:.3}; {took:.2?}"
    ))
}

fn sample_object(rng: &mut StdRng) -> String {
    let inst = |rng: &mut StdRng| ["", ":x", ":y"][rng.gen_range(0..3)];
    let pb = |rng: &mut StdRng| ["PB1", "PB2"][rng.gen_range(0..2)];
    match rng.gen_range(0..6) {
        0 => format!("SOL:{}@{}", ["a", "b"][rng.gen_range(0..2)], pb(rng)),
        1 => {
            let p = if rng.gen_bool(0.5) { format!("@{}", pb(rng)) } else { String::new() };
            format!("DAT{p}{}", inst(rng))
        }
        k => format!("{}{}", ["OBJ", "PROC", "GOAL", "TASK"][k - 2], inst(rng)),
    }
}

/// Independent class label from the textual object form.
fn class_key(s: &str, level: Granularity) -> String {
    let cat = &s[..s.find([':', '@']).unwrap_or(s.len())];
    match level {
        Granularity::Instance => s.to_string(),
        Granularity::Space => match cat {
            "SOL" | "DAT" => "ps",
            "GOAL" | "TASK" => "group",
            _ => "domain",
        }
        .to_string(),
        Granularity::Problem => match cat {
            "SOL" => format!("sol {}", &s[s.find('@').unwrap() + 1..]),
            "DAT" => match s.find('@') {
                Some(at) => format!("dat {}", s[at + 1..].split(':').next().unwrap()),
                None => format!("dat-free {s}"),
            },
            _ => s.to_string(),
        },
    }
}

fn invariants() -> Outcome {
    let t0 = Instant::now();
    let levels = Granularity::ALL;

    // Equivalence relation and coarsening over sampled triples.
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..10_000 {
        let texts: Vec<String> = (0..3).map(|_| sample_object(&mut rng)).collect();
        let objs: Vec<ObjectRef> = texts.iter().map(|t| t.parse().expect("sampled object parses")).collect();
        let (a, b, c) = (&objs[0], &objs[1], &objs[2]);
        for level in levels {
            let m = |x: &ObjectRef, y: &ObjectRef| objects_match(x, y, level);
            ensure!(m(a, a), "not reflexive: {a} at {level:?}");
            ensure!(m(a, b) == m(b, a), "not symmetric: {a}, {b} at {level:?}");
            ensure!(!(m(a, b) && m(b, c)) || m(a, c), "not transitive: {a}, {b}, {c} at {level:?}");
            ensure!(m(a, b) == (class_key(&texts[0], level) == class_key(&texts[1], level)), "{a} vs {b} at {level:?} disagrees with oracle");
        }
        ensure!(!objects_match(a, b, Granularity::Instance) || objects_match(a, b, Granularity::Problem), "coarsening: {a}, {b}");
        ensure!(!objects_match(a, b, Granularity::Problem) || objects_match(a, b, Granularity::Space), "coarsening: {a}, {b}");
    }

    // Tiling and refinement on scatter and synth corpora.
    let mut corpora: Vec<Corpus> = (0..60).map(|k| scatter(&ScatterSpec::new(7000 + k, 5 + 3 * k as usize))).collect();
    corpora.extend((0..20).map(|t| generate(&trial_spec(900 + t, Millis(500))).expect("valid spec").0));
    for (n, corpus) in corpora.iter().enumerate() {
        let span = corpus.span().ok_or("empty corpus")?;
        for level in levels {
            let config = AnalysisConfig::default().with_granularity(level);
            let eps = segment(corpus, &config).map_err(|e| e.to_string())?.episodes;
            ensure!(eps.first().map(|e| e.interval.start()) == Some(span.start()), "corpus {n}: first episode misses span start");
            ensure!(eps.last().map(|e| e.interval.end()) == Some(span.end()), "corpus {n}: last episode misses span end");
            for w in eps.windows(2) {
                ensure!(w[0].interval.end() == w[1].interval.start(), "corpus {n} {level:?}: gap or overlap at {}", w[0].interval.end());
            }
            let sum: u64 = eps.iter().map(|e| e.duration().as_ms()).sum();
            ensure!(sum == span.duration().as_ms(), "corpus {n} {level:?}: durations {sum} != span {}", span.duration().as_ms());
        }
        let timeline = build_timeline(corpus).map_err(|e| e.to_string())?;
        for slice in &timeline.slices {
            let together = |level: Granularity| -> BTreeSet<(Token, Token)> {
                let blocks = partition(&actor_foci(corpus, &slice.active, level), level);
                blocks
                    .iter()
                    .flat_map(|b| b.actors.iter().flat_map(move |x| b.actors.iter().map(move |y| (x.clone(), y.clone()))))
                    .collect()
            };
            let (i, p, s) = (together(Granularity::Instance), together(Granularity::Problem), together(Granularity::Space));
            ensure!(i.is_subset(&p) && p.is_subset(&s), "corpus {n}: partition at {:?} not refined by finer level", slice.interval);
        }
    }

    // Round trip.
    let mut count = 0;
    for k in 0..500u64 {
        let corpus = if k % 5 == 4 {
            generate(&trial_spec(2000 + k, Millis(k % 3 * 400))).expect("valid spec").0
        } else {
            let mut spec = ScatterSpec::new(k, (k as usize * 7) % 250);
            spec.actors = 1 + k as usize % 4;
            scatter(&spec)
        };
        for format in [Format::Tsv, Format::Doc] {
            let bytes = write_corpus(&corpus, format);
            let (back, report) = parse_corpus(&bytes, format).map_err(|r| format!("corpus {k}: {:?}", r.errors.first()))?;
            ensure!(report.errors.is_empty(), "corpus {k}: {:?}", report.errors);
            ensure!(back == corpus, "corpus {k}: {format:?} round trip changed the corpus");
            ensure!(write_corpus(&back, format) == bytes, "corpus {k}: {format:?} rewrite differs");
        }
        count += 1;
    }
    let took = t0.elapsed();
    Ok(format!("10^4 triples clean, tiling/refinement on {} corpora, {count} round trips; {took:.2?}", corpora.len()))
}

fn determinism() -> Outcome {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut paths: Vec<PathBuf> = ["example1.tsv", "example2.tsv", "example3.tsv"].iter().map(|f| fixture(f)).collect();
    for k in 0..20u64 {
        let mut spec = ScatterSpec::new(300 + k, 20 + 9 * k as usize);
        spec.actors = 2 + k as usize % 3;
        let p = dir.path().join(format!("random{k}.tsv"));
        std::fs::write(&p, write_corpus(&scatter(&spec), Format::Tsv)).map_err(|e| e.to_string())?;
        paths.push(p);
    }
    for p in &paths {
        let s = p.to_str().unwrap();
        let args = ["analyze", s, "--json", "--pattern", "COMPOSITE"];
        let (a, b) = (run(&args), run(&args));
        ensure!(a.status.success(), "{s}: exit {:?} {}", a.status.code(), String::from_utf8_lossy(&a.stderr));
        ensure!(a.stdout == b.stdout, "{s}: two runs differ");
        ensure!(a.stdout.ends_with(b"}\n") && !a.stdout.ends_with(b"\n\n"), "{s}: missing single trailing newline");
    }
    let took = t0.elapsed();
    Ok(format!("{} inputs byte-identical across two runs; {took:.2?}", paths.len()))
}

fn main() {
    let criteria: [Check; 7] = [
        ("1 example-1 pair", example1),
        ("2 example-2 episode", example2),
        ("3 example-3 coalition", example3),
        ("4 pair oracle", oracle),
        ("5 synthetic recovery", recovery),
        ("6 invariant suite", invariants),
        ("7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
