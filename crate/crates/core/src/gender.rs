//! Gender identification for linked occupation mentions.
//!
//! Three cases are tried in order and the first that yields a gender wins:
//!
//! 1. **Lexical**: the occupation word itself is gendered (`waitress`,
//!    `νοσοκόμη`), from the lexicon or the token's morphology annotation.
//! 2. **Direct pronoun**: a gendered pronoun is linked to the occupation by
//!    one dependency edge (`He is a nurse`). Without a parse, the surface
//!    patterns `PRON is/was DET OCC` and `PRON, OCC` stand in.
//! 3. **Coreference**: a gendered pronoun or word in the mention's
//!    coreference chain. Without chains, the nearest following gendered
//!    pronoun within the same or next sentence whose grammatical number
//!    agrees with the mention, unless another agreeing occupation mention
//!    sits in between.
//!
//! If none applies the mention is `NotClear` and is excluded from the
//! percentages downstream. Conflicting evidence inside one case yields no
//! answer for that case.

use std::collections::HashMap;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::annotation::{AnnotatedDocument, MorphGender, MorphNumber};
use crate::extract::{GazetteerEntry, GrammaticalNumber, Span};
use crate::text::{self, WordToken};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
}

impl From<Gender> for GenderLabel {
    fn from(g: Gender) -> Self {
        match g {
            Gender::Male => GenderLabel::Male,
            Gender::Female => GenderLabel::Female,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenderLabel {
    Male,
    Female,
    NotClear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResolutionMethod {
    Lexical,
    DirectPronoun,
    Coreference,
    Undetermined,
}

/// Outcome of the cascade. `NotClear` iff `Undetermined`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GenderResolution {
    label: GenderLabel,
    method: ResolutionMethod,
}

impl GenderResolution {
    pub fn determined(gender: Gender, method: ResolutionMethod) -> Self {
        assert_ne!(method, ResolutionMethod::Undetermined);
        GenderResolution { label: gender.into(), method }
    }

    pub fn not_clear() -> Self {
        GenderResolution { label: GenderLabel::NotClear, method: ResolutionMethod::Undetermined }
    }

    pub fn label(&self) -> GenderLabel {
        self.label
    }

    pub fn method(&self) -> ResolutionMethod {
        self.method
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenderedForm {
    pub gender: Gender,
    pub number: GrammaticalNumber,
}

#[derive(Clone, Debug, Default)]
struct LanguageTables {
    nouns: HashMap<String, GenderedForm>,
    pronouns: HashMap<String, GenderedForm>,
    copulas: Vec<String>,
    determiners: Vec<String>,
}

/// Gendered nouns and pronouns per language, keyed by case-folded form.
#[derive(Clone, Debug, Default)]
pub struct GenderLexicon {
    langs: HashMap<String, LanguageTables>,
}

const MS: GrammaticalNumber = GrammaticalNumber::Singular;
const PL: GrammaticalNumber = GrammaticalNumber::Plural;

// Third-person personal pronouns only; reflexives, relatives and forms shared
// with articles or across genders (fr "lui", el "τον"/"την"/"αυτού") are left out.
const BUILTIN_PRONOUNS: &[(&str, &str, Gender, GrammaticalNumber)] = &[
    ("en", "he", Gender::Male, MS),
    ("en", "him", Gender::Male, MS),
    ("en", "his", Gender::Male, MS),
    ("en", "she", Gender::Female, MS),
    ("en", "her", Gender::Female, MS),
    ("en", "hers", Gender::Female, MS),
    ("fr", "il", Gender::Male, MS),
    ("fr", "elle", Gender::Female, MS),
    ("fr", "ils", Gender::Male, PL),
    ("fr", "elles", Gender::Female, PL),
    ("el", "αυτός", Gender::Male, MS),
    ("el", "αυτόν", Gender::Male, MS),
    ("el", "αυτή", Gender::Female, MS),
    ("el", "αυτήν", Gender::Female, MS),
    ("el", "αυτής", Gender::Female, MS),
    ("el", "αυτοί", Gender::Male, PL),
    ("el", "αυτές", Gender::Female, PL),
];

const BUILTIN_COPULAS: &[(&str, &[&str])] =
    &[("en", &["is", "was"]), ("fr", &["est", "était"]), ("el", &["είναι", "ήταν"])];

const BUILTIN_DETERMINERS: &[(&str, &[&str])] =
    &[("en", &["a", "an", "the"]), ("fr", &["un", "une", "le", "la"]), ("el", &["ένας", "μια", "μία", "ο", "η"])];

impl GenderLexicon {
    /// Pronoun, copula and determiner tables for `en`, `fr` and `el`; no nouns.
    pub fn builtin() -> Self {
        let mut lex = GenderLexicon::default();
        for &(lang, form, gender, number) in BUILTIN_PRONOUNS {
            lex.tables(lang).pronouns.insert(text::fold(form), GenderedForm { gender, number });
        }
        for &(lang, forms) in BUILTIN_COPULAS {
            lex.tables(lang).copulas = forms.iter().map(|f| text::fold(f)).collect();
        }
        for &(lang, forms) in BUILTIN_DETERMINERS {
            lex.tables(lang).determiners = forms.iter().map(|f| text::fold(f)).collect();
        }
        lex
    }

    /// Built-in tables plus the gendered nouns of the given gazetteer entries.
    pub fn with_entries<'a>(entries: impl IntoIterator<Item = &'a GazetteerEntry>) -> Self {
        let mut lex = Self::builtin();
        for e in entries {
            if let Some(gender) = e.lexical_gender {
                lex.add_noun(&e.lang, &e.pattern, gender, e.number);
            }
        }
        lex
    }

    fn tables(&mut self, lang: &str) -> &mut LanguageTables {
        self.langs.entry(lang.to_string()).or_default()
    }

    pub fn add_noun(&mut self, lang: &str, form: &str, gender: Gender, number: GrammaticalNumber) {
        self.tables(lang).nouns.insert(text::fold(form), GenderedForm { gender, number });
    }

    pub fn has_language(&self, lang: &str) -> bool {
        self.langs.contains_key(lang)
    }

    pub fn noun(&self, lang: &str, form: &str) -> Option<GenderedForm> {
        self.langs.get(lang)?.nouns.get(&text::fold(form)).copied()
    }

    pub fn pronoun(&self, lang: &str, form: &str) -> Option<GenderedForm> {
        self.langs.get(lang)?.pronouns.get(&text::fold(form)).copied()
    }

    fn is_copula(&self, lang: &str, folded: &str) -> bool {
        self.langs.get(lang).is_some_and(|t| t.copulas.iter().any(|c| c == folded))
    }

    fn is_determiner(&self, lang: &str, folded: &str) -> bool {
        self.langs.get(lang).is_some_and(|t| t.determiners.iter().any(|c| c == folded))
    }
}

/// A linked mention as seen by the gender cascade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MentionRef {
    pub span: Span,
    pub number: GrammaticalNumber,
}

/// Everything the cascade may consult for one document.
#[derive(Clone, Copy, Debug)]
pub struct DocContext<'a> {
    pub lang: &'a str,
    pub text: &'a str,
    pub annotations: Option<&'a AnnotatedDocument>,
    /// All linked mentions of the document, for the ambiguous-antecedent check.
    pub mentions: &'a [MentionRef],
}

impl<'a> DocContext<'a> {
    fn sentences(&self) -> Vec<(usize, usize)> {
        match self.annotations {
            Some(a) if !a.sentences.is_empty() => a.sentences.iter().map(|s| (s.start, s.end)).collect(),
            _ => text::sentence_spans(self.text),
        }
    }

    fn sentence_index(&self, sentences: &[(usize, usize)], offset: usize) -> Option<usize> {
        sentences.iter().position(|&(s, e)| s <= offset && offset < e)
    }
}

fn morph_gender(g: Option<MorphGender>) -> Option<Gender> {
    match g? {
        MorphGender::Masc => Some(Gender::Male),
        MorphGender::Fem => Some(Gender::Female),
        MorphGender::Neut => None,
    }
}

/// Mention number, preferring the declared value and falling back to the
/// head token's morphology.
pub fn mention_number(
    span: Span,
    declared: GrammaticalNumber,
    annotations: Option<&AnnotatedDocument>,
) -> GrammaticalNumber {
    if declared != GrammaticalNumber::Unknown {
        return declared;
    }
    annotations.and_then(|a| a.head_token(span).and_then(|i| a.tokens[i].number)).map_or(
        GrammaticalNumber::Unknown,
        |n| match n {
            MorphNumber::Sing => GrammaticalNumber::Singular,
            MorphNumber::Plur => GrammaticalNumber::Plural,
        },
    )
}

/// Single gender if all items agree, `None` if empty or conflicting.
fn agreeing(genders: impl IntoIterator<Item = Gender>) -> Option<Gender> {
    let mut found = None;
    for g in genders {
        match found {
            None => found = Some(g),
            Some(f) if f != g => return None,
            Some(_) => {}
        }
    }
    found
}

/// Case 1: the occupation word itself carries gender.
pub fn lexical_gender(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> Option<Gender> {
    let surface = &ctx.text[mention.span.start..mention.span.end];
    let from_lexicon = lexicon.noun(ctx.lang, surface).map(|f| f.gender);
    let from_morph = ctx
        .annotations
        .and_then(|a| a.head_token(mention.span).map(|i| &a.tokens[i]))
        .and_then(|t| morph_gender(t.gender));
    match (from_lexicon, from_morph) {
        (Some(l), Some(m)) if l != m => {
            debug!("lexicon says {l:?} but morphology says {m:?} for {surface:?}; ignoring both");
            None
        }
        (_, Some(m)) => Some(m),
        (l, None) => l,
    }
}

fn pronoun_token_gender(tok: &crate::annotation::Token, lang: &str, lexicon: &GenderLexicon) -> Option<GenderedForm> {
    lexicon.pronoun(lang, &tok.surface).or_else(|| {
        (tok.upos == "PRON").then_some(())?;
        let gender = morph_gender(tok.gender)?;
        let number = match tok.number {
            Some(MorphNumber::Sing) => GrammaticalNumber::Singular,
            Some(MorphNumber::Plur) => GrammaticalNumber::Plural,
            None => GrammaticalNumber::Unknown,
        };
        Some(GenderedForm { gender, number })
    })
}

fn is_subject(deprel: &str) -> bool {
    deprel.starts_with("nsubj") || deprel.starts_with("csubj")
}

fn is_link_relation(deprel: &str) -> bool {
    is_subject(deprel) || matches!(deprel, "cop" | "det" | "det:poss" | "poss" | "nmod:poss" | "appos" | "attr")
}

/// Case 2: a gendered pronoun directly linked to the occupation.
pub fn pronoun_gender(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> Option<Gender> {
    match ctx.annotations {
        Some(a) if a.has_dependencies() => pronoun_gender_parsed(mention, ctx.lang, a, lexicon),
        _ => pronoun_gender_heuristic(mention, ctx, lexicon),
    }
}

fn pronoun_gender_parsed(
    mention: &MentionRef,
    lang: &str,
    doc: &AnnotatedDocument,
    lexicon: &GenderLexicon,
) -> Option<Gender> {
    let occ = doc.head_token(mention.span)?;
    let occ_tok = &doc.tokens[occ];
    let linked = doc.tokens.iter().enumerate().filter(|&(j, t)| {
        if j == occ || t.span().overlaps(&mention.span) {
            return false;
        }
        // pronoun depends on the occupation, or the occupation on the pronoun
        (t.head_index() == Some(occ) && is_link_relation(&t.deprel))
            || (occ_tok.head_index() == Some(j) && is_link_relation(&occ_tok.deprel))
            // copular clause parsed with the verb as head: PRON -nsubj-> be <-attr- OCC
            || (t.head_index().is_some()
                && t.head_index() == occ_tok.head_index()
                && is_subject(&t.deprel)
                && occ_tok.deprel == "attr")
    });
    agreeing(linked.filter_map(|(_, t)| pronoun_token_gender(t, lang, lexicon)).map(|f| f.gender))
}

fn pronoun_gender_heuristic(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> Option<Gender> {
    let sentences = ctx.sentences();
    let (s_start, s_end) =
        ctx.sentence_index(&sentences, mention.span.start).map(|i| sentences[i]).unwrap_or((0, ctx.text.len()));
    let sentence = &ctx.text[s_start..s_end];
    let segs: Vec<String> = text::segments(sentence).iter().map(|t| text::fold(t.text(sentence))).collect();
    let starts: Vec<usize> = text::segments(sentence).iter().map(|t| t.start + s_start).collect();
    let k = starts.iter().position(|&s| s == mention.span.start)?;

    let singular_pronoun = |i: usize| {
        lexicon.pronoun(ctx.lang, &segs[i]).filter(|f| f.number == GrammaticalNumber::Singular).map(|f| f.gender)
    };
    // PRON , [DET] OCC  and  PRON be [DET] OCC
    let j = k - usize::from(k >= 1 && lexicon.is_determiner(ctx.lang, &segs[k - 1]));
    if j >= 2 && (segs[j - 1] == "," || lexicon.is_copula(ctx.lang, &segs[j - 1])) {
        return singular_pronoun(j - 2);
    }
    None
}

/// Case 3: gender through coreference.
pub fn coref_gender(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> Option<Gender> {
    match ctx.annotations.and_then(|a| a.coref.as_ref().map(|c| (a, c))) {
        Some((doc, chains)) => {
            let chain = chains.iter().find(|c| c.iter().any(|s| s.overlaps(&mention.span)))?;
            let mut members: Vec<Span> = chain.iter().copied().filter(|s| !s.overlaps(&mention.span)).collect();
            members.sort();
            let genders = members.iter().filter_map(|&s| member_gender(s, ctx.lang, doc, lexicon));
            agreeing(genders)
        }
        None => coref_gender_heuristic(mention, ctx, lexicon),
    }
}

fn member_gender(span: Span, lang: &str, doc: &AnnotatedDocument, lexicon: &GenderLexicon) -> Option<Gender> {
    let surface = &doc.text[span.start..span.end];
    if let Some(f) = lexicon.pronoun(lang, surface).or_else(|| lexicon.noun(lang, surface)) {
        return Some(f.gender);
    }
    // multi-token member: its words individually
    let words = text::word_tokens(surface);
    agreeing(words.iter().filter_map(|w: &WordToken| {
        let w = w.text(surface);
        lexicon.pronoun(lang, w).or_else(|| lexicon.noun(lang, w)).map(|f| f.gender)
    }))
    .or_else(|| {
        agreeing(
            doc.tokens_in(span).filter_map(|i| pronoun_token_gender(&doc.tokens[i], lang, lexicon)).map(|f| f.gender),
        )
    })
}

fn coref_gender_heuristic(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> Option<Gender> {
    let sentences = ctx.sentences();
    let window_end = match ctx.sentence_index(&sentences, mention.span.start) {
        Some(i) => sentences.get(i + 1).unwrap_or(&sentences[i]).1,
        None => ctx.text.len(),
    };
    let after = &ctx.text[mention.span.end..window_end];
    let (offset, form) = text::word_tokens(after).into_iter().find_map(|t| {
        let f = lexicon.pronoun(ctx.lang, t.text(after))?;
        f.number.agrees_with(mention.number).then_some((mention.span.end + t.start, f))
    })?;
    let blocked = ctx.mentions.iter().any(|m| {
        m.span != mention.span
            && m.span.start >= mention.span.end
            && m.span.end <= offset
            && m.number.agrees_with(mention.number)
    });
    (!blocked).then_some(form.gender)
}

/// Runs the three cases in order; the first that answers decides.
pub fn identify_gender(mention: &MentionRef, ctx: &DocContext<'_>, lexicon: &GenderLexicon) -> GenderResolution {
    if let Some(g) = lexical_gender(mention, ctx, lexicon) {
        return GenderResolution::determined(g, ResolutionMethod::Lexical);
    }
    if let Some(g) = pronoun_gender(mention, ctx, lexicon) {
        return GenderResolution::determined(g, ResolutionMethod::DirectPronoun);
    }
    if let Some(g) = coref_gender(mention, ctx, lexicon) {
        return GenderResolution::determined(g, ResolutionMethod::Coreference);
    }
    GenderResolution::not_clear()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "The doctor put the cast on my leg while talking to the nurses about his new car.";

    fn lexicon() -> GenderLexicon {
        let mut lex = GenderLexicon::builtin();
        lex.add_noun("en", "waitress", Gender::Female, MS);
        lex.add_noun("en", "waiter", Gender::Male, MS);
        lex.add_noun("el", "νοσοκόμος", Gender::Male, MS);
        lex.add_noun("el", "νοσοκόμη", Gender::Female, MS);
        lex
    }

    fn find(text: &str, word: &str, number: GrammaticalNumber) -> MentionRef {
        let start = text.find(word).unwrap();
        MentionRef { span: Span::new(start, start + word.len()), number }
    }

    fn resolve(text: &str, lang: &str, mentions: &[MentionRef], i: usize) -> GenderResolution {
        let ctx = DocContext { lang, text, annotations: None, mentions };
        identify_gender(&mentions[i], &ctx, &lexicon())
    }

    #[test]
    fn case1_lexical() {
        let lex = lexicon();
        for (text, lang, word, expected) in [
            ("The waitress smiled.", "en", "waitress", Some(Gender::Female)),
            ("Η νοσοκόμη ήρθε.", "el", "νοσοκόμη", Some(Gender::Female)),
            ("Ο νοσοκόμος ήρθε.", "el", "νοσοκόμος", Some(Gender::Male)),
            ("The doctor smiled.", "en", "doctor", None),
        ] {
            let m = [find(text, word, MS)];
            let ctx = DocContext { lang, text, annotations: None, mentions: &m };
            assert_eq!(lexical_gender(&m[0], &ctx, &lex), expected, "{text}");
        }
    }

    #[test]
    fn case1_wins_over_later_evidence() {
        let text = "Ο νοσοκόμος ήρθε. Αυτή έφυγε.";
        let m = [find(text, "νοσοκόμος", MS)];
        let r = resolve(text, "el", &m, 0);
        assert_eq!((r.label(), r.method()), (GenderLabel::Male, ResolutionMethod::Lexical));
    }

    #[test]
    fn case2_heuristic_patterns() {
        for (text, expected) in [
            ("He is a nurse.", GenderLabel::Male),
            ("She is a nurse.", GenderLabel::Female),
            ("She was the nurse on duty.", GenderLabel::Female),
            ("He, nurse of the ward, waited.", GenderLabel::Male),
            ("She, a nurse from Lyon, waited.", GenderLabel::Female),
        ] {
            let m = [find(text, "nurse", MS)];
            let r = resolve(text, "en", &m, 0);
            assert_eq!((r.label(), r.method()), (expected, ResolutionMethod::DirectPronoun), "{text}");
        }
        let text = "The nurse called.";
        let m = [find(text, "nurse", MS)];
        assert_eq!(resolve(text, "en", &m, 0), GenderResolution::not_clear());
    }

    #[test]
    fn case3_heuristic_next_sentence() {
        let text = "Today the doctor came to the hospital 45 minutes late. Consequently, his first appointment had already left.";
        let m = [find(text, "doctor", MS)];
        let r = resolve(text, "en", &m, 0);
        assert_eq!((r.label(), r.method()), (GenderLabel::Male, ResolutionMethod::Coreference));
    }

    #[test]
    fn case3_window_is_two_sentences() {
        let text = "The doctor came. It rained. His car broke.";
        let m = [find(text, "doctor", MS)];
        assert_eq!(resolve(text, "en", &m, 0), GenderResolution::not_clear());
    }

    #[test]
    fn example_sentence_number_agreement() {
        let m = [find(EXAMPLE, "doctor", MS), find(EXAMPLE, "nurses", PL)];
        let doctor = resolve(EXAMPLE, "en", &m, 0);
        let nurses = resolve(EXAMPLE, "en", &m, 1);
        assert_eq!((doctor.label(), doctor.method()), (GenderLabel::Male, ResolutionMethod::Coreference));
        assert_eq!(nurses, GenderResolution::not_clear());
    }

    #[test]
    fn intervening_agreeing_mention_blocks() {
        let text = "The doctor talked to the nurse about his car.";
        let m = [find(text, "doctor", MS), find(text, "nurse", MS)];
        assert_eq!(resolve(text, "en", &m, 0), GenderResolution::not_clear());
        let r = resolve(text, "en", &m, 1);
        assert_eq!(r.label(), GenderLabel::Male);
    }

    #[test]
    fn french_plural_pronoun_agrees() {
        let text = "Les infirmières sont arrivées. Elles étaient fatiguées.";
        let m = [find(text, "infirmières", PL)];
        let r = resolve(text, "fr", &m, 0);
        assert_eq!((r.label(), r.method()), (GenderLabel::Female, ResolutionMethod::Coreference));
    }

    #[test]
    fn reflexive_and_relative_pronouns_are_ignored() {
        let text = "The doctor who hurt himself left.";
        let m = [find(text, "doctor", MS)];
        assert_eq!(resolve(text, "en", &m, 0), GenderResolution::not_clear());
    }
    fn annotated(line: &str) -> AnnotatedDocument {
        let d: AnnotatedDocument = serde_json::from_str(line).unwrap();
        assert!(d.validate().is_empty());
        d
    }

    fn resolve_annotated(doc: &AnnotatedDocument, mentions: &[MentionRef], i: usize) -> GenderResolution {
        let ctx = DocContext { lang: "en", text: &doc.text, annotations: Some(doc), mentions };
        identify_gender(&mentions[i], &ctx, &lexicon())
    }

    #[test]
    fn example_sentence_annotation_path() {
        let doc = annotated(include_str!("../../../fixtures/example1.annotations.jsonl"));
        let m = [find(EXAMPLE, "doctor", MS), find(EXAMPLE, "nurses", PL)];
        let doctor = resolve_annotated(&doc, &m, 0);
        assert_eq!((doctor.label(), doctor.method()), (GenderLabel::Male, ResolutionMethod::Coreference));
        assert_eq!(resolve_annotated(&doc, &m, 1), GenderResolution::not_clear());
    }

    #[test]
    fn empty_chain_list_disables_heuristic() {
        let mut doc = annotated(include_str!("../../../fixtures/example1.annotations.jsonl"));
        doc.coref = Some(Vec::new());
        let m = [find(EXAMPLE, "doctor", MS), find(EXAMPLE, "nurses", PL)];
        assert_eq!(resolve_annotated(&doc, &m, 0), GenderResolution::not_clear());
    }

    const HE_IS_A_NURSE: &str = r#"{"doc_id":"n","text":"He is a nurse.","tokens":[
        {"i":0,"start":0,"end":2,"surface":"He","lemma":"he","upos":"PRON","gender":"Masc","number":"Sing","head":3,"deprel":"nsubj"},
        {"i":1,"start":3,"end":5,"surface":"is","lemma":"be","upos":"AUX","head":3,"deprel":"cop"},
        {"i":2,"start":6,"end":7,"surface":"a","lemma":"a","upos":"DET","head":3,"deprel":"det"},
        {"i":3,"start":8,"end":13,"surface":"nurse","lemma":"nurse","upos":"NOUN","number":"Sing","head":-1,"deprel":"root"},
        {"i":4,"start":13,"end":14,"surface":".","lemma":".","upos":"PUNCT","head":3,"deprel":"punct"}],
        "coref":[],"sentences":[[0,14]]}"#;

    #[test]
    fn case2_dependency_edge() {
        let doc = annotated(HE_IS_A_NURSE);
        let m = [find(&doc.text, "nurse", MS)];
        let r = resolve_annotated(&doc, &m, 0);
        assert_eq!((r.label(), r.method()), (GenderLabel::Male, ResolutionMethod::DirectPronoun));
    }

    #[test]
    fn case2_copula_as_head() {
        // She -nsubj-> is <-attr- nurse
        let line = r#"{"doc_id":"s","text":"She is a nurse.","tokens":[
            {"i":0,"start":0,"end":3,"surface":"She","upos":"PRON","head":1,"deprel":"nsubj"},
            {"i":1,"start":4,"end":6,"surface":"is","upos":"AUX","head":-1,"deprel":"ROOT"},
            {"i":2,"start":7,"end":8,"surface":"a","upos":"DET","head":3,"deprel":"det"},
            {"i":3,"start":9,"end":14,"surface":"nurse","upos":"NOUN","head":1,"deprel":"attr"},
            {"i":4,"start":14,"end":15,"surface":".","upos":"PUNCT","head":1,"deprel":"punct"}],
            "coref":[]}"#;
        let doc = annotated(line);
        let m = [find(&doc.text, "nurse", MS)];
        let r = resolve_annotated(&doc, &m, 0);
        assert_eq!((r.label(), r.method()), (GenderLabel::Female, ResolutionMethod::DirectPronoun));
    }

    #[test]
    fn conflicting_chain_yields_none() {
        let text = "The doctor said he and she left.";
        let line = format!(r#"{{"doc_id":"c","text":"{text}","coref":[[[4,10],[16,18],[23,26]]]}}"#);
        let doc = annotated(&line);
        let m = [find(text, "doctor", MS)];
        assert_eq!(resolve_annotated(&doc, &m, 0), GenderResolution::not_clear());
    }

    #[test]
    fn morphology_against_lexicon() {
        let line = r#"{"doc_id":"w","text":"The waitress left.","tokens":[
            {"i":0,"start":0,"end":3,"surface":"The","upos":"DET"},
            {"i":1,"start":4,"end":12,"surface":"waitress","upos":"NOUN","gender":"Masc"},
            {"i":2,"start":13,"end":17,"surface":"left","upos":"VERB"},
            {"i":3,"start":17,"end":18,"surface":".","upos":"PUNCT"}]}"#;
        let mut doc = annotated(line);
        let m = [find(&doc.text, "waitress", MS)];
        let lex = lexicon();
        let ctx = DocContext { lang: "en", text: &doc.text.clone(), annotations: Some(&doc), mentions: &m };
        assert_eq!(lexical_gender(&m[0], &ctx, &lex), None);
        doc.tokens[1].gender = Some(MorphGender::Fem);
        let ctx = DocContext { lang: "en", text: &doc.text.clone(), annotations: Some(&doc), mentions: &m };
        assert_eq!(lexical_gender(&m[0], &ctx, &lex), Some(Gender::Female));
    }
}
