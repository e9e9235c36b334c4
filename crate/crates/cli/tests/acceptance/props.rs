//! Invariant suites driven by an explicit `TestRunner` with 1000 cases each.

use std::fs;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use subeval_cli::config::RunConfig;
use subeval_cli::pipeline::run_eval;
use subeval_core::align::SentenceAlignment;
use subeval_core::conformity::{
    length_conformity, reading_speed_conformity, ConformityThresholds, LengthAggregation, TimingMode,
};
use subeval_core::consistency::{
    char_ratio, line_count_consistency, lexical_consistency_maps, mean_lex_pair, structural_consistency,
    BlockIndexMap, Side,
};
use subeval_core::quality::{corpus_bleu, wer};
use subeval_core::subtitle::serialize_marked_text;
use subeval_core::{
    parse_marked_text, tokenize, Language, SubtitleBlock, SubtitleLine, Timing, TokenScheme, Utterance,
    UtterancePair,
};

const CASES: u32 = 1000;

type Blocks = Vec<Vec<Vec<String>>>;

fn word() -> impl Strategy<Value = String> {
    "[a-zA-Zéà0-9]{1,7}[,.?!:']{0,1}"
}

fn noisy_word() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9&;:'\"().,$%-]{1,8}"
}

fn blocks_of(w: impl Strategy<Value = String>) -> impl Strategy<Value = Blocks> {
    prop::collection::vec(prop::collection::vec(prop::collection::vec(w, 1..5), 1..3), 1..4)
}

fn marked(blocks: &Blocks) -> String {
    blocks
        .iter()
        .map(|b| b.iter().map(|l| l.join(" ")).collect::<Vec<_>>().join(" <eol> ") + " <eob>")
        .collect::<Vec<_>>()
        .join(" ")
}

fn utterance(id: &str, blocks: &Blocks, timings: Option<&[(u64, u64)]>) -> Utterance {
    let blocks = blocks
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let lines = b.iter().map(|l| SubtitleLine::new(l.join(" ")).unwrap()).collect();
            let timing = timings.map(|t| Timing::new(t[k].0, t[k].1).unwrap());
            SubtitleBlock::new(lines, timing).unwrap()
        })
        .collect();
    Utterance::new(id, blocks, None).unwrap()
}

fn run<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn parser_round_trip() -> Result<(), String> {
    run("parser round trip", prop::collection::vec(blocks_of(word()), 1..5), |doc| {
        let text: String = doc.iter().map(|u| marked(u) + "\n").collect();
        let parsed = parse_marked_text(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(serialize_marked_text(&parsed), text.clone());
        let again = parse_marked_text(&serialize_marked_text(&parsed)).unwrap();
        prop_assert_eq!(again, parsed);
        Ok(())
    })
}

fn break_conservation() -> Result<(), String> {
    let schemes = [
        TokenScheme::Whitespace,
        TokenScheme::Intl13a,
        TokenScheme::MtDetached(Language::English),
        TokenScheme::MtDetached(Language::French),
        TokenScheme::MtDetached(Language::German),
    ];
    run("break conservation", blocks_of(noisy_word()), |blocks| {
        let text = marked(&blocks);
        let expected: Vec<&str> = text.split_whitespace().filter(|w| *w == "<eob>" || *w == "<eol>").collect();
        for scheme in schemes {
            let toks = tokenize(&text, scheme);
            let breaks: Vec<&str> = toks.tokens.iter().filter(|t| t.is_break()).map(|t| t.surface()).collect();
            prop_assert_eq!(&breaks, &expected, "{:?}", scheme);
            prop_assert!(toks.tokens.iter().all(|t| !t.surface().is_empty()));
        }
        Ok(())
    })
}

fn timed_utterances() -> impl Strategy<Value = Vec<(Blocks, Vec<(u64, u64)>)>> {
    prop::collection::vec(
        blocks_of(word()).prop_flat_map(|b| {
            let n = b.len();
            (Just(b), prop::collection::vec((0u64..10_000, 1u64..6_000).prop_map(|(s, d)| (s, s + d)), n))
        }),
        1..6,
    )
}

fn rate_bounds() -> Result<(), String> {
    let strategy = (timed_utterances(), 1usize..60, 0usize..30, 0.5f64..40.0, 0.0f64..20.0);
    run("rate bounds and monotonicity", strategy, |(utts, cpl, dcpl, cps, dcps)| {
        let utts: Vec<Utterance> = utts.iter().map(|(b, t)| utterance("u", b, Some(t))).collect();
        let low = ConformityThresholds::new(cpl, cps).unwrap();
        let high = ConformityThresholds::new(cpl + dcpl, cps + dcps).unwrap();
        for agg in [LengthAggregation::PerLine, LengthAggregation::PerBlock] {
            let (a, b) = (length_conformity(&utts, &low, agg), length_conformity(&utts, &high, agg));
            prop_assert!(a.conforming <= a.total && b.conforming <= b.total);
            prop_assert!(a.conforming <= b.conforming);
            let v = a.value().unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let a = reading_speed_conformity(&utts, &low, TimingMode::PerBlock).unwrap();
        let b = reading_speed_conformity(&utts, &high, TimingMode::PerBlock).unwrap();
        prop_assert!(a.conforming <= b.conforming && b.conforming <= b.total);
        prop_assert!((0.0..=1.0).contains(&a.value().unwrap()));
        Ok(())
    })
}

fn block_map(sizes: &[usize]) -> BlockIndexMap {
    let text: Vec<String> = sizes.iter().map(|&n| vec!["w"; n].join(" ") + " <eob>").collect();
    BlockIndexMap::from_tokens(&tokenize(&text.join(" "), TokenScheme::Whitespace))
}

fn random_links(len_c: usize, len_s: usize) -> impl Strategy<Value = SentenceAlignment> {
    prop::collection::vec((0..len_c, 0..len_s), 0..(len_c + len_s)).prop_map(|v| v.into_iter().collect())
}

fn lex_identity() -> Result<(), String> {
    let sizes = prop::collection::vec(1usize..6, 1..4);
    let strategy = (sizes.clone(), sizes).prop_flat_map(|(c, s)| {
        let (lc, ls) = (c.iter().sum::<usize>(), s.iter().sum::<usize>());
        (Just(c), Just(s), random_links(lc, ls), random_links(lc, ls))
    });
    run("lex_pair identity", strategy, |(c, s, c2s, s2c)| {
        let (cm, sm) = (block_map(&c), block_map(&s));
        let p = lexical_consistency_maps("x", &cm, &sm, &c2s, &s2c, false).unwrap();
        let bad = |side| p.inconsistent_tokens.iter().filter(|t| t.side == side).count() as f64;
        let want_c = 1.0 - bad(Side::Caption) / cm.len() as f64;
        let want_s = 1.0 - bad(Side::Subtitle) / sm.len() as f64;
        prop_assert!((p.lex_c2s - want_c).abs() < 1e-12);
        prop_assert!((p.lex_s2c - want_s).abs() < 1e-12);
        prop_assert!((p.lex_pair - (want_c + want_s) / 2.0).abs() < 1e-12);
        Ok(())
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn permutation_invariance() -> Result<(), String> {
    let corpus = prop::collection::vec((blocks_of(word()), blocks_of(word())), 1..8);
    let strategy = corpus.prop_flat_map(|c| {
        let n = c.len();
        (Just(c), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    });
    run("permutation invariance", strategy, |(corpus, order)| {
        let metrics = |idx: &[usize]| {
            let pairs: Vec<UtterancePair> = idx
                .iter()
                .map(|&k| {
                    let id = k.to_string();
                    UtterancePair::new(utterance(&id, &corpus[k].0, None), utterance(&id, &corpus[k].1, None)).unwrap()
                })
                .collect();
            let caps: Vec<Utterance> = pairs.iter().map(|p| p.caption().clone()).collect();
            let subs: Vec<Utterance> = pairs.iter().map(|p| p.subtitle().clone()).collect();
            let lex: Vec<_> = pairs
                .iter()
                .map(|p| {
                    let scheme = TokenScheme::Whitespace;
                    let cm = BlockIndexMap::from_tokens(&tokenize(&p.caption().marked_text(), scheme));
                    let sm = BlockIndexMap::from_tokens(&tokenize(&p.subtitle().marked_text(), scheme));
                    let diag: SentenceAlignment = (0..cm.len().min(sm.len())).map(|i| (i, i)).collect();
                    lexical_consistency_maps(p.id(), &cm, &sm, &diag, &diag, false).unwrap()
                })
                .collect();
            let thresholds = ConformityThresholds::default();
            vec![
                structural_consistency(&pairs).unwrap(),
                line_count_consistency(&pairs).value().unwrap_or(-1.0),
                char_ratio(&pairs).unwrap(),
                length_conformity(&subs, &thresholds, LengthAggregation::PerLine).value().unwrap(),
                mean_lex_pair(&lex).unwrap(),
                wer(&subs, &caps).map(|w| w.wer).unwrap_or(-1.0),
                corpus_bleu(&subs, &caps, true).unwrap().score,
            ]
        };
        let identity: Vec<usize> = (0..corpus.len()).collect();
        let (a, b) = (metrics(&identity), metrics(&order));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(close(*x, *y), "{:?} vs {:?}", a, b);
        }
        Ok(())
    })
}

fn repeated_reports() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = prop::collection::vec((blocks_of(word()), blocks_of(word())), 1..6);
    let strategy = (corpus, any::<bool>(), 1usize..4);
    run("bit-identical reports", strategy, |(corpus, diagonal, iterations)| {
        let caps: String = corpus.iter().map(|(c, _)| marked(c) + "\n").collect();
        let subs: String = corpus.iter().map(|(_, s)| marked(s) + "\n").collect();
        let (cp, sp) = (dir.path().join("c.txt"), dir.path().join("s.txt"));
        fs::write(&cp, caps).unwrap();
        fs::write(&sp, subs).unwrap();
        let mut cfg = RunConfig::default();
        for (k, v) in [
            ("captions-hyp", cp.to_str().unwrap()),
            ("subtitles-hyp", sp.to_str().unwrap()),
            ("captions-ref", cp.to_str().unwrap()),
            ("subtitles-ref", sp.to_str().unwrap()),
            ("skip-segmentation", "true"),
            ("diagonal", if diagonal { "true" } else { "false" }),
            ("iterations", &iterations.to_string()),
        ] {
            cfg.set(k, v).map_err(|e| TestCaseError::fail(e.to_string()))?;
        }
        let once = run_eval(&cfg).map_err(|e| TestCaseError::fail(format!("{e:#}")))?.report;
        let twice = run_eval(&cfg).map_err(|e| TestCaseError::fail(format!("{e:#}")))?.report;
        prop_assert_eq!(once.to_json(), twice.to_json());
        prop_assert_eq!(once.to_tsv(), twice.to_tsv());
        Ok(())
    })
}

pub fn run_all() -> Result<String, String> {
    type Suite = fn() -> Result<(), String>;
    let suites: [(&str, Suite); 6] = [
        ("round-trip", parser_round_trip),
        ("breaks", break_conservation),
        ("rates", rate_bounds),
        ("lex-identity", lex_identity),
        ("permutation", permutation_invariance),
        ("repeat", repeated_reports),
    ];
    let mut done = Vec::new();
    for (name, suite) in suites {
        suite()?;
        done.push(name);
    }
    Ok(format!("{} suites x {CASES} cases: {}", done.len(), done.join(", ")))
}
