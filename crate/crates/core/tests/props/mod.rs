//! Randomized invariants over the public API. Each check runs `CASES`
//! generated inputs and returns the shrunk counterexample on failure.
//!
//! Shared between this crate's `properties` test target and the CLI
//! crate's acceptance harness.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gost_core::annotation::{AnnotatedDocument, MorphGender, MorphNumber, Token};
use gost_core::corpus::CorpusDoc;
use gost_core::extract::{self, Gazetteer, GrammaticalNumber, MentionCandidate, MentionSource, Span};
use gost_core::gender::{self, DocContext, Gender, GenderLexicon, MentionRef, ResolutionMethod};
use gost_core::graph::{CountryRole, KnowledgeGraph, OccupationKey, Percent, Source, StatisticsNode, SurveySource};
use gost_core::link::{EmbeddingStore, LinkConfig, Linker};
use gost_core::pipeline::{self, PipelineConfig, Resources};
use gost_core::stats::{self, DatasetMeta, PartialCounts};
use gost_core::text;
use gost_core::GenderLabel;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 256;

pub type Check = fn() -> Result<(), String>;

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() })
}

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- linking

fn vectors(
    n: std::ops::RangeInclusive<usize>,
    d: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Vec<Vec<f32>>, Vec<f32>)> {
    (n, d).prop_flat_map(|(n, d)| {
        (prop::collection::vec(prop::collection::vec(-1.0f32..1.0, d), n), prop::collection::vec(-1.0f32..1.0, d))
    })
}

struct Fixture {
    graph: KnowledgeGraph,
    store: EmbeddingStore,
}

fn code(i: usize) -> String {
    format!("{}", 1000 + i)
}

fn fixture(vs: &[Vec<f32>], dim: usize) -> Fixture {
    let mut graph = KnowledgeGraph::new();
    let mut store = EmbeddingStore::new(dim);
    for (i, v) in vs.iter().enumerate() {
        let desc = format!("occupation number {i}");
        graph.add_occupation("isco08", &code(i), "t", &desc).unwrap();
        store.insert(&desc, v.clone()).unwrap();
    }
    Fixture { graph, store }
}

fn oracle_cosine(u: &[f32], v: &[f32]) -> Option<f64> {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| f64::from(*a) * f64::from(*b)).sum();
    let nu: f64 = u.iter().map(|a| f64::from(*a).powi(2)).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| f64::from(*a).powi(2)).sum::<f64>().sqrt();
    (nu > 0.0 && nv > 0.0).then(|| dot / (nu * nv))
}

/// Index and score of the best vector by a plain scan; ties to the lowest index.
fn oracle_top1(vs: &[Vec<f32>], q: &[f32]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in vs.iter().enumerate() {
        if let Some(s) = oracle_cosine(q, v) {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    best
}

fn chosen_index(key: &OccupationKey) -> usize {
    key.code.parse::<usize>().unwrap() - 1000
}

/// (a) Top-1 retrieval equals a brute-force scan.
pub fn link_top1_matches_scan() -> Result<(), String> {
    check(vectors(10..=200, 4..=64), |(vs, q)| {
        prop_assume!(q.iter().any(|x| *x != 0.0));
        let f = fixture(&vs, q.len());
        let linker = Linker::new(&f.graph, Some(&f.store), LinkConfig::default());
        let got = linker.best_embedding_match(&q);
        let want = oracle_top1(&vs, &q);
        match (got, want) {
            (Some((key, score)), Some((i, best))) => {
                let j = chosen_index(&key);
                let chosen = oracle_cosine(&q, &vs[j]).unwrap();
                prop_assert!((score - chosen).abs() < 1e-9, "reported {score}, oracle {chosen}");
                prop_assert!(j == i || (best - chosen).abs() < 1e-12, "chose {j} ({chosen}), scan chose {i} ({best})");
            }
            (None, None) => {}
            (g, w) => prop_assert!(false, "linker {g:?} vs scan {w:?}"),
        }
        Ok(())
    })
}

/// (b) Scaling the query or every stored vector by a positive factor
/// leaves the chosen occupation unchanged.
pub fn link_scale_invariance() -> Result<(), String> {
    check((vectors(10..=100, 4..=32), 0.001f32..1000.0, 0.001f32..1000.0), |((vs, q), cq, cv)| {
        prop_assume!(q.iter().any(|x| *x != 0.0));
        let base = fixture(&vs, q.len());
        let linker = Linker::new(&base.graph, Some(&base.store), LinkConfig::default());
        let (k0, s0) = linker.best_embedding_match(&q).unwrap();

        let scaled_q: Vec<f32> = q.iter().map(|x| x * cq).collect();
        let scaled_vs: Vec<Vec<f32>> = vs.iter().map(|v| v.iter().map(|x| x * cv).collect()).collect();
        let scaled = fixture(&scaled_vs, q.len());
        let linker = Linker::new(&scaled.graph, Some(&scaled.store), LinkConfig::default());
        let (k1, s1) = linker.best_embedding_match(&scaled_q).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-5, "score moved from {s0} to {s1}");
        if k0 != k1 {
            // only a near-tie may flip under f32 rounding
            let a = oracle_cosine(&q, &vs[chosen_index(&k0)]).unwrap();
            let b = oracle_cosine(&q, &vs[chosen_index(&k1)]).unwrap();
            prop_assert!((a - b).abs() < 1e-5, "{k0} ({a}) became {k1} ({b})");
        }
        Ok(())
    })
}

const WORDS: &[&str] = &[
    "the",
    "doctor",
    "nurse",
    "nurses",
    "put",
    "cast",
    "on",
    "my",
    "leg",
    "while",
    "talking",
    "to",
    "about",
    "his",
    "new",
    "car",
    "γιατρός",
    "νοσοκόμα",
    "médecin",
    "infirmière",
];

fn sentence(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..max).prop_map(|w| w.join(" "))
}

fn surface() -> impl Strategy<Value = String> {
    (prop::sample::select(WORDS), prop::collection::vec(any::<prop::sample::Index>(), 0..3)).prop_map(|(w, edits)| {
        let mut chars: Vec<char> = w.chars().collect();
        for e in edits {
            if chars.len() > 1 {
                chars.remove(e.index(chars.len()));
            }
        }
        chars.into_iter().collect()
    })
}

/// (c) Raising a threshold never admits more: fuzzy grounding and linking.
pub fn threshold_monotonicity() -> Result<(), String> {
    check((sentence(12), surface(), 0.0f64..=1.0, 0.0f64..=1.0), |(text, surface, a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let at_hi = extract::verify_surface(&surface, &text, hi);
        let at_lo = extract::verify_surface(&surface, &text, lo);
        if let Some((span, _)) = at_hi {
            prop_assert_eq!(at_lo.map(|(s, _)| s), Some(span));
        }
        Ok(())
    })?;
    check((vectors(10..=60, 4..=16), -1.0f64..=1.0, -1.0f64..=1.0), |((vs, q), a, b)| {
        prop_assume!(q.iter().any(|x| *x != 0.0));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut f = fixture(&vs, q.len());
        f.store.insert("query", q.clone()).unwrap();
        let candidate = MentionCandidate {
            doc_id: "d".into(),
            title: String::new(),
            surface: "x".into(),
            description: "query".into(),
            span: Some(Span::new(0, 1)),
            source: MentionSource::External,
            occupation: None,
            number: GrammaticalNumber::Unknown,
        };
        let link = |t: f64| {
            Linker::new(&f.graph, Some(&f.store), LinkConfig { embedding_threshold: t, lexical_threshold: t })
                .link(&candidate)
                .map(|l| l.occupation)
        };
        if let Some(k) = link(hi) {
            prop_assert_eq!(link(lo), Some(k));
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- gender

const GENDER_WORDS: &[&str] = &[
    "the", "he", "she", "his", "her", "him", "they", "is", "was", "a", "nurse", "doctor", ",", ".", "and", "called",
    "waiter",
];

const DEPRELS: &[&str] = &["nsubj", "cop", "det", "poss", "nmod:poss", "appos", "attr", "obj", "root", "punct", ""];

#[derive(Clone, Debug)]
struct RandomTok {
    upos_pron: bool,
    gender: Option<u8>,
    number: Option<u8>,
    head: prop::sample::Index,
    root: bool,
    deprel: &'static str,
}

fn random_tok() -> impl Strategy<Value = RandomTok> {
    (
        any::<bool>(),
        prop::option::of(0u8..3),
        prop::option::of(0u8..2),
        any::<prop::sample::Index>(),
        any::<bool>(),
        prop::sample::select(DEPRELS),
    )
        .prop_map(|(upos_pron, gender, number, head, root, deprel)| RandomTok {
            upos_pron,
            gender,
            number,
            head,
            root,
            deprel,
        })
}

#[derive(Clone, Debug)]
struct CascadeCase {
    words: Vec<&'static str>,
    occupation: &'static str,
    position: prop::sample::Index,
    toks: Vec<RandomTok>,
    chains: Option<Vec<Vec<prop::sample::Index>>>,
    sentences: bool,
}

fn cascade_case() -> impl Strategy<Value = CascadeCase> {
    (
        prop::collection::vec(prop::sample::select(GENDER_WORDS), 0..14),
        prop::sample::select(&["waitress", "waiter", "nurse"][..]),
        any::<prop::sample::Index>(),
        prop::collection::vec(random_tok(), 16),
        prop::option::of(prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 1..4), 0..3)),
        any::<bool>(),
    )
        .prop_map(|(words, occupation, position, toks, chains, sentences)| CascadeCase {
            words,
            occupation,
            position,
            toks,
            chains,
            sentences,
        })
}

fn build_annotations(c: &CascadeCase) -> (String, Span, AnnotatedDocument) {
    let mut words = c.words.clone();
    let at = c.position.index(words.len() + 1);
    words.insert(at, c.occupation);
    let text = words.join(" ");
    let mention_start: usize = words[..at].iter().map(|w| w.len() + 1).sum();
    let mention = Span::new(mention_start, mention_start + c.occupation.len());

    let segs = text::segments(&text);
    let n = segs.len();
    let tokens: Vec<Token> = segs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = &c.toks[i % c.toks.len()];
            let mut head = r.head.index(n) as i64;
            if r.root || head == i as i64 {
                head = -1;
            }
            Token {
                i,
                start: s.start,
                end: s.end,
                surface: s.text(&text).to_string(),
                lemma: String::new(),
                upos: if r.upos_pron { "PRON".into() } else { "NOUN".into() },
                gender: r.gender.map(|g| [MorphGender::Masc, MorphGender::Fem, MorphGender::Neut][g as usize]),
                number: r.number.map(|g| [MorphNumber::Sing, MorphNumber::Plur][g as usize]),
                head,
                deprel: r.deprel.to_string(),
            }
        })
        .collect();
    let coref = c.chains.as_ref().map(|chains| {
        chains
            .iter()
            .map(|chain| chain.iter().map(|ix| segs[ix.index(n)]).map(|s| Span::new(s.start, s.end)).collect())
            .collect()
    });
    let sentences = if c.sentences { vec![Span::new(0, text.len())] } else { Vec::new() };
    let doc = AnnotatedDocument { doc_id: "p".into(), text: text.clone(), tokens, coref, sentences };
    (text, mention, doc)
}

fn cascade_lexicon() -> GenderLexicon {
    let mut lex = GenderLexicon::builtin();
    lex.add_noun("en", "waitress", Gender::Female, GrammaticalNumber::Singular);
    lex.add_noun("en", "waiter", Gender::Male, GrammaticalNumber::Singular);
    lex
}

/// (d) Whenever the occupation word settles the gender, no annotation
/// content can make a later case decide instead.
pub fn cascade_precedence() -> Result<(), String> {
    let lexicon = cascade_lexicon();
    check(cascade_case(), |c| {
        let (text, span, doc) = build_annotations(&c);
        prop_assert!(doc.validate().is_empty(), "generator produced invalid annotations: {:?}", doc.validate());
        let mentions = [MentionRef { span, number: GrammaticalNumber::Singular }];
        for annotations in [Some(&doc), None] {
            let ctx = DocContext { lang: "en", text: &text, annotations, mentions: &mentions };
            let r = gender::identify_gender(&mentions[0], &ctx, &lexicon);
            prop_assert_eq!(r, gender::identify_gender(&mentions[0], &ctx, &lexicon), "not deterministic");
            prop_assert_eq!(r.label() == GenderLabel::NotClear, r.method() == ResolutionMethod::Undetermined);
            if let Some(g) = gender::lexical_gender(&mentions[0], &ctx, &lexicon) {
                prop_assert_eq!(r.label(), GenderLabel::from(g));
                prop_assert_eq!(r.method(), ResolutionMethod::Lexical);
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- stats

const CODES: &[&str] = &["2", "22", "221", "2211", "2212", "222", "2221", "23", "231", "26", "261", "2611"];
const LANGS: &[&str] = &["en", "fr", "el"];

fn key(code: &str) -> OccupationKey {
    OccupationKey::isco(code).unwrap()
}

fn label(i: u8) -> GenderLabel {
    [GenderLabel::Male, GenderLabel::Female, GenderLabel::NotClear][i as usize]
}

fn resolutions() -> impl Strategy<Value = Vec<(usize, usize, u8)>> {
    prop::collection::vec((0..CODES.len(), 0..LANGS.len(), 0u8..3), 0..120)
}

fn accumulate(rs: &[(usize, usize, u8)]) -> PartialCounts {
    let keys: Vec<OccupationKey> = CODES.iter().map(|c| key(c)).collect();
    PartialCounts::accumulate(rs.iter().map(|&(c, l, g)| (&keys[c], LANGS[l], label(g))))
}

fn hierarchy() -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    for c in CODES {
        g.add_occupation("isco08", c, &format!("group {c}"), "").unwrap();
    }
    g
}

fn meta() -> DatasetMeta {
    DatasetMeta { title: "corpus".into(), description: String::new() }
}

/// (e) Any split of the resolutions into shards, merged in any order,
/// yields the same counts; the full pipeline output does not depend on
/// the shard count.
pub fn shard_merge() -> Result<(), String> {
    check(
        (resolutions(), prop::collection::vec(any::<prop::sample::Index>(), 0..8), any::<prop::sample::Index>()),
        |(rs, cuts, rotation)| {
            let whole = accumulate(&rs);
            let mut bounds: Vec<usize> = cuts.iter().map(|c| c.index(rs.len() + 1)).collect();
            bounds.extend([0, rs.len()]);
            bounds.sort();
            let mut parts: Vec<PartialCounts> = bounds.windows(2).map(|w| accumulate(&rs[w[0]..w[1]])).collect();
            let r = rotation.index(parts.len());
            parts.rotate_left(r);
            parts.reverse();
            let mut merged = PartialCounts::new();
            for p in &parts {
                merged.merge(p);
            }
            prop_assert_eq!(&merged, &whole);

            // (a + b) + c == a + (b + c)
            let third = rs.len() / 3;
            let (a, b, c) = (accumulate(&rs[..third]), accumulate(&rs[third..2 * third]), accumulate(&rs[2 * third..]));
            let mut left = a.clone();
            left.merge(&b);
            left.merge(&c);
            let mut bc = b.clone();
            bc.merge(&c);
            let mut right = a;
            right.merge(&bc);
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&left, &whole);
            Ok(())
        },
    )?;

    let templates = [
        "He is a nurse.",
        "She is a doctor.",
        "The doctor put the cast on my leg while talking to the nurses about his new car.",
        "The nurse called.",
        "The doctor came late. Her car broke.",
        "Nothing here.",
    ];
    let mut graph = hierarchy();
    graph.add_occupation("isco08", "2221", "Nursing professionals", "").ok();
    let (entries, _) = extract::parse_lexicon(
        "en\tdoctor\t221\tsingular\t-\nen\tnurse\t222\tsingular\t-\nen\tnurses\t222\tplural\t-\n",
    );
    let lexicon = GenderLexicon::with_entries(&entries);
    let (gazetteer, _) = Gazetteer::build(&graph, entries);
    let res = Resources {
        graph: &graph,
        gazetteer: &gazetteer,
        lexicon: &lexicon,
        store: None,
        annotations: None,
        external: None,
    };
    check((prop::collection::vec(0..templates.len(), 0..60), 2usize..=8), |(picks, shards)| {
        let docs: Vec<CorpusDoc> = picks
            .iter()
            .enumerate()
            .map(|(i, &t)| CorpusDoc { doc_id: format!("d{i}"), lang: "en".into(), text: templates[t].into() })
            .collect();
        let one = pipeline::analyze(&docs, res, PipelineConfig::default(), 1).unwrap();
        let many = pipeline::analyze(&docs, res, PipelineConfig::default(), shards).unwrap();
        prop_assert_eq!(one, many);
        Ok(())
    })
}

/// (f) A parent's roll-up counts equal the sum of the counts beneath it.
pub fn rollup_conservation() -> Result<(), String> {
    check((resolutions(), 1usize..=4), |(rs, level)| {
        let counts = accumulate(&rs);
        let mut graph = hierarchy();
        stats::finalize_dataset_stats(&counts, &meta(), &mut graph).unwrap();
        let rolled = stats::rollup(&graph, level).unwrap();
        prop_assert!(rolled.skipped.is_empty());

        let mut expected: BTreeMap<(OccupationKey, String), (u64, u64)> = BTreeMap::new();
        for (occ, lang, c) in counts.iter() {
            if c.male + c.female == 0 {
                continue;
            }
            if let Some(a) = occ.ancestor_at(level) {
                let e = expected.entry((a, lang.to_string())).or_default();
                e.0 += c.male;
                e.1 += c.female;
            }
        }
        let got: BTreeMap<(OccupationKey, String), (u64, u64)> = rolled
            .nodes
            .iter()
            .map(|n| ((n.occupation.clone(), n.context.clone()), (n.male_count.unwrap(), n.female_count.unwrap())))
            .collect();
        prop_assert_eq!(got, expected);
        Ok(())
    })
}

#[derive(Clone, Debug)]
struct RandomGraph {
    codes: Vec<String>,
    surveys: Vec<(usize, usize, i32, u32)>,
    datasets: Vec<(usize, usize, u64, u64, u64)>,
}

fn random_graph() -> impl Strategy<Value = RandomGraph> {
    (
        prop::collection::vec("[0-9]{1,4}", 1..20),
        prop::collection::vec((any::<usize>(), 0usize..4, 1990i32..2030, 0u32..=10_000), 0..20),
        prop::collection::vec((any::<usize>(), 0usize..3, 0u64..50, 0u64..50, 0u64..10), 0..20),
    )
        .prop_map(|(codes, surveys, datasets)| RandomGraph { codes, surveys, datasets })
}

fn materialize(r: &RandomGraph) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    for c in &r.codes {
        for l in 1..=c.len() {
            let _ = g.add_occupation("isco08", &c[..l], &format!("title \"{}\"", &c[..l]), "desc\twith tab");
        }
    }
    let occs: Vec<OccupationKey> = g.occupations().map(|n| n.key.clone()).collect();
    let survey = g
        .add_source(Source::Survey(SurveySource {
            title: "lfs".into(),
            description: "ünïcode".into(),
            period: "1990-2030".into(),
        }))
        .unwrap();
    let countries = ["GR", "FR", "UK", "DE"];
    for &(o, c, year, female) in &r.surveys {
        g.add_country(countries[c], CountryRole::Country).unwrap();
        let female = Percent::from_hundredths(female).unwrap();
        g.attach_statistics(StatisticsNode {
            occupation: occs[o % occs.len()].clone(),
            male_pct: female.complement(),
            female_pct: female,
            male_count: None,
            female_count: None,
            unclear_count: None,
            source: survey.clone(),
            context: countries[c].into(),
            year_from: Some(year),
            year_to: Some(year),
        })
        .unwrap();
    }
    let mut counts = PartialCounts::new();
    for &(o, l, m, f, u) in &r.datasets {
        let occ = &occs[o % occs.len()];
        for (n, lab) in [(m, GenderLabel::Male), (f, GenderLabel::Female), (u, GenderLabel::NotClear)] {
            for _ in 0..n {
                counts.record(occ, LANGS[l], lab);
            }
        }
    }
    stats::finalize_dataset_stats(&counts, &meta(), &mut g).unwrap();
    g
}

/// (g) Saving and loading a graph restores it exactly, and saving again is
/// byte-identical.
pub fn graph_round_trip() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("kg.jsonl");
    check(random_graph(), |r| {
        let g = materialize(&r);
        prop_assert!(g.validate().is_empty(), "{:?}", g.validate());
        g.save(&path).unwrap();
        let back = KnowledgeGraph::load(&path).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_jsonl(), std::fs::read_to_string(&path).unwrap());
        Ok(())
    })
}

/// (h) Every statistic the aggregation emits has percentages summing to
/// 100 and consistent with its counts.
pub fn percent_sum_invariant() -> Result<(), String> {
    check((resolutions(), 1usize..=4), |(rs, level)| {
        let mut graph = hierarchy();
        stats::finalize_dataset_stats(&accumulate(&rs), &meta(), &mut graph).unwrap();
        let rolled = stats::rollup(&graph, level).unwrap();
        for n in graph.statistics().chain(&rolled.nodes) {
            prop_assert_eq!(n.male_pct.hundredths() + n.female_pct.hundredths(), 10_000);
            prop_assert!(n.intrinsic_violations().is_empty(), "{:?}", n.intrinsic_violations());
            let (m, f) = (n.male_count.unwrap(), n.female_count.unwrap());
            prop_assert!(m + f > 0);
            let exact = 10_000.0 * m as f64 / (m + f) as f64;
            prop_assert!((f64::from(n.male_pct.hundredths()) - exact).abs() <= 0.5);
        }
        prop_assert!(graph.validate().is_empty());
        Ok(())
    })
}

// ---------------------------------------------------------------- fuzzy

fn oracle_levenshtein(a: &[char], b: &[char]) -> usize {
    // full (|a|+1) x (|b|+1) table
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// (i) `similarity` equals `1 - edit_distance / max_len` computed by an
/// independent dynamic program over characters.
pub fn similarity_matches_oracle() -> Result<(), String> {
    check(("[abcéσςΣ ]{0,12}", "[abcéσςΣ ]{0,12}"), |(a, b)| {
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let longest = ca.len().max(cb.len());
        let want = if longest == 0 { 1.0 } else { 1.0 - oracle_levenshtein(&ca, &cb) as f64 / longest as f64 };
        let got = extract::similarity(&a, &b);
        prop_assert!((got - want).abs() < 1e-12, "sim({a:?}, {b:?}) = {got}, oracle {want}");
        prop_assert!((extract::similarity(&b, &a) - got).abs() < 1e-12);
        Ok(())
    })
}

/// All checks in order, labelled (a) to (i).
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("a: top-1 link equals brute-force scan", link_top1_matches_scan),
        ("b: cosine scale invariance", link_scale_invariance),
        ("c: threshold monotonicity", threshold_monotonicity),
        ("d: lexical case precedence", cascade_precedence),
        ("e: shard merge associative and commutative", shard_merge),
        ("f: roll-up count conservation", rollup_conservation),
        ("g: graph save/load round trip", graph_round_trip),
        ("h: percent-sum invariant", percent_sum_invariant),
        ("i: similarity equals edit-distance oracle", similarity_matches_oracle),
    ]
}
