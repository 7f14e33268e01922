use std::collections::BTreeSet;

use proptest::prelude::*;

use cometlens::classify::{classify_all, Verdict};
use cometlens::coalition::detect_coalitions;
use cometlens::interval::{build_timeline, find_parallel_pairs, Relation};
use cometlens::io::{parse_corpus, write_corpus, Format};
use cometlens::model::{objects_match, space_of, AnalysisConfig, Category, Granularity, Millis, ObjectRef, Space};
use cometlens::pattern::Pattern;
use cometlens::report::{analyze_with, RunReport};
use cometlens::segment::{segment, segment_with, Label};
use cometlens::stats::{co_occurrence, durations, transitions, TransitionScope};
use cometlens::synth::{scatter, ScatterSpec};
use cometlens::Execution;

/// Every object over two problems, two solutions and two instances.
fn all_objects() -> Vec<ObjectRef> {
    let mut texts = Vec::new();
    for pb in ["PB1", "PB2"] {
        for s in ["a", "b"] {
            texts.push(format!("SOL:{s}@{pb}"));
        }
    }
    for pb in ["", "@PB1", "@PB2"] {
        for i in ["", ":x", ":y"] {
            texts.push(format!("DAT{pb}{i}"));
        }
    }
    for cat in ["OBJ", "PROC", "GOAL", "TASK"] {
        for i in ["", ":x", ":y"] {
            texts.push(format!("{cat}{i}"));
        }
    }
    texts.iter().map(|t| t.parse().unwrap()).collect()
}

#[test]
fn objects_match_exhaustive() {
    let objs = all_objects();
    for level in Granularity::ALL {
        for a in &objs {
            assert!(objects_match(a, a, level), "{a} {level:?}");
            for b in &objs {
                assert_eq!(objects_match(a, b, level), objects_match(b, a, level), "{a} {b} {level:?}");
                for c in &objs {
                    if objects_match(a, b, level) && objects_match(b, c, level) {
                        assert!(objects_match(a, c, level), "{a} {b} {c} {level:?}");
                    }
                }
            }
        }
    }
    for a in &objs {
        for b in &objs {
            if objects_match(a, b, Granularity::Instance) {
                assert!(objects_match(a, b, Granularity::Problem));
            }
            if objects_match(a, b, Granularity::Problem) {
                assert!(objects_match(a, b, Granularity::Space));
            }
            if a.category() != b.category() {
                assert!(!objects_match(a, b, Granularity::Problem), "{a} {b}");
            }
        }
    }
}

#[test]
fn space_constant_per_category() {
    for a in all_objects() {
        let expect = match a.category() {
            Category::Sol | Category::Dat => Space::ProblemSolution,
            Category::Goal | Category::Task => Space::Group,
            Category::Obj | Category::Proc => Space::Domain,
        };
        assert_eq!(space_of(&a), expect);
    }
}

fn corpus_strategy() -> impl Strategy<Value = ScatterSpec> {
    (any::<u64>(), 1usize..120, 1usize..5, 1_000u64..60_000, 1u64..6_000, 0.0f64..0.3).prop_map(
        |(seed, units, actors, span, dur, points)| ScatterSpec {
            seed,
            units,
            actors,
            span: Millis(span),
            max_duration: Millis(dur),
            point_rate: points,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slices_bounded(spec in corpus_strategy()) {
        let c = scatter(&spec);
        let t = build_timeline(&c).unwrap();
        prop_assert!(t.slices.len() < 2 * c.len());
    }

    #[test]
    fn verdict_coverage_and_coarsening(spec in corpus_strategy()) {
        let c = scatter(&spec);
        let config = AnalysisConfig { include_near: true, ..AnalysisConfig::default() };
        let pairs = find_parallel_pairs(&c, &config);
        let classified = classify_all(&pairs, &c, &config, Execution::Sequential).unwrap();
        prop_assert_eq!(classified.len(), pairs.len());
        for (p, k) in pairs.iter().zip(&classified) {
            prop_assert_eq!(&k.pair, p);
            prop_assert!(p.unit_a < p.unit_b);
            if !k.levels.space {
                prop_assert!(!k.levels.problem && !k.levels.instance);
            }
            prop_assert_eq!(k.verdict == Verdict::Integrated, k.levels.problem);
        }
        let again = classify_all(&pairs, &c, &config, Execution::Parallel).unwrap();
        prop_assert_eq!(classified, again);
    }

    #[test]
    fn parsing_ignores_row_order(spec in corpus_strategy(), shuffle in any::<u64>()) {
        let c = scatter(&spec);
        let text = String::from_utf8(write_corpus(&c, Format::Tsv)).unwrap();
        let (head, rows): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#') || l.starts_with("unit_id\t"));
        let mut rows = rows;
        let mut state = shuffle;
        for i in (1..rows.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rows.swap(i, (state >> 33) as usize % (i + 1));
        }
        let permuted = format!("{}\n{}\n", head.join("\n"), rows.join("\n"));
        let (back, _) = parse_corpus(permuted.as_bytes(), Format::Tsv).unwrap();
        prop_assert_eq!(&back, &c);
        let config = AnalysisConfig::default();
        prop_assert_eq!(segment(&back, &config).unwrap(), segment(&c, &config).unwrap());
    }

    #[test]
    fn coalitions_sit_in_one_episode(spec in corpus_strategy()) {
        let c = scatter(&spec);
        for level in Granularity::ALL {
            let eps = segment(&c, &AnalysisConfig::default().with_granularity(level)).unwrap().episodes;
            for co in detect_coalitions(&eps) {
                let hits: Vec<_> = eps.iter().filter(|e| e.interval == co.interval).collect();
                prop_assert_eq!(hits.len(), 1);
                prop_assert_eq!(hits[0].label, Label::NonInt);
                prop_assert!(co.coalition_block.len() >= 2);
            }
        }
    }

    #[test]
    fn totals_reconcile(spec in corpus_strategy()) {
        let c = scatter(&spec);
        let config = AnalysisConfig::default();
        let pairs = find_parallel_pairs(&c, &config);
        let classified = classify_all(&pairs, &c, &config, Execution::Sequential).unwrap();
        let m = co_occurrence(&classified, &c, &config).unwrap();
        let near = pairs.iter().filter(|p| p.relation == Relation::Near).count() as u64;
        prop_assert_eq!(m.total + m.excluded_near, pairs.len() as u64);
        prop_assert_eq!(m.excluded_near, near);
        prop_assert_eq!(m.cells.iter().map(|x| x.count).sum::<u64>(), m.total);

        let verbal: Vec<_> = c.units().iter().filter(|u| u.channel().as_str() == "VERBAL").collect();
        match transitions(&c, TransitionScope::Pooled) {
            Ok(t) => prop_assert_eq!(t.matrices["POOLED"].total(), verbal.len() as u64 - 1),
            Err(e) => prop_assert!(verbal.is_empty(), "{}", e),
        }
        if let Ok(t) = transitions(&c, TransitionScope::PerActor) {
            let speakers: BTreeSet<_> = verbal.iter().map(|u| &u.actor).collect();
            let total: u64 = t.matrices.values().map(|m| m.total()).sum();
            prop_assert_eq!(total, (verbal.len() - speakers.len()) as u64);
        }

        let eps = segment(&c, &config).unwrap().episodes;
        let d = durations(&eps, &detect_coalitions(&eps));
        let count: u64 = Label::ALL.iter().map(|l| d.label(*l).count).sum();
        prop_assert_eq!(count, eps.len() as u64);
        prop_assert_eq!(d.total, c.span().unwrap().duration());
        let sum: u64 = Label::ALL.iter().map(|l| d.label(*l).total.as_ms()).sum();
        prop_assert_eq!(Millis(sum), d.total);
    }

    #[test]
    fn no_merge_no_warning(spec in corpus_strategy()) {
        let c = scatter(&spec);
        let s = segment(&c, &AnalysisConfig::default()).unwrap();
        prop_assert!(s.warnings.is_empty());
        let t = build_timeline(&c).unwrap();
        prop_assert!(s.episodes.len() <= t.slices.len());
    }
}

fn report(c: &cometlens::model::Corpus, exec: Execution) -> RunReport {
    let (_, parse) = parse_corpus(&write_corpus(c, Format::Tsv), Format::Tsv).unwrap();
    let patterns = [Pattern::parse("INT NON_INT").unwrap()];
    analyze_with(c, &parse, &AnalysisConfig::default(), &patterns, exec).unwrap()
}

#[test]
fn execution_paths_agree() {
    for seed in 0..12 {
        let c = scatter(&ScatterSpec::new(seed, 40 + 30 * seed as usize));
        let seq = report(&c, Execution::Sequential);
        let par = report(&c, Execution::Parallel);
        assert_eq!(seq.to_json(), par.to_json());
        assert!(seq.invariant_violations().is_empty(), "{:?}", seq.invariant_violations());
        let config = AnalysisConfig { min_episode_duration: Millis(700), ..AnalysisConfig::default() };
        assert_eq!(
            segment_with(&c, &config, Execution::Sequential).unwrap(),
            segment_with(&c, &config, Execution::Parallel).unwrap()
        );
    }
}

#[test]
fn point_units_pair_inside_closed_intervals() {
    let tsv = "unit_id\tactor\tmodality\tt_start\tt_end\tmodulation\taction\tobject\ttranscription\tobj1\tobj2\ttool\tarea
a\tL\tG\t10.000\t12.000\t-\tPoint\tSOL:a@PB1\t-\tP1\t-\thand\t-
p\tC\tG\t12.000\t12.000\t-\tPoint\tSOL:a@PB1\t-\tP1\t-\thand\t-
q\tC\tG\t12.800\t12.800\t-\tPoint\tSOL:a@PB1\t-\tP1\t-\thand\t-
r\tM\tG\t10.000\t10.000\t-\tPoint\tSOL:a@PB1\t-\tP1\t-\thand\t-
";
    let (c, _) = parse_corpus(tsv.as_bytes(), Format::Tsv).unwrap();
    let pairs = find_parallel_pairs(&c, &AnalysisConfig::default());
    let got: Vec<(&str, &str, Relation)> = pairs.iter().map(|p| (p.unit_a.as_str(), p.unit_b.as_str(), p.relation)).collect();
    assert_eq!(
        got,
        vec![("a", "p", Relation::Overlap), ("a", "q", Relation::Near), ("a", "r", Relation::Overlap), ("p", "q", Relation::Near)]
    );
}
