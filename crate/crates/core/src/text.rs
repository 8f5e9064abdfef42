//! Text helpers shared by the matchers: case folding with offset maps, word
//! tokens and sentence spans. All offsets are byte offsets into the original
//! UTF-8 text.

use unicode_segmentation::UnicodeSegmentation;

/// Lowercases one character for matching. Greek final sigma folds to `σ`
/// so that word-final and word-internal forms compare equal.
fn fold_char(c: char, out: &mut String) {
    for l in c.to_lowercase() {
        out.push(if l == 'ς' { 'σ' } else { l });
    }
}

/// Case-folded copy of `s`.
pub fn fold(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        fold_char(c, &mut out);
    }
    out
}

/// A folded copy of a text plus a map from folded byte offsets back to the
/// original ones.
#[derive(Debug, Clone)]
pub struct FoldedText {
    pub folded: String,
    // offsets[i] = original offset of the char that produced folded byte i;
    // one extra trailing entry for the end of text.
    offsets: Vec<usize>,
}

impl FoldedText {
    pub fn new(text: &str) -> Self {
        let mut folded = String::with_capacity(text.len());
        let mut offsets = Vec::with_capacity(text.len() + 1);
        for (i, c) in text.char_indices() {
            let before = folded.len();
            fold_char(c, &mut folded);
            offsets.extend(std::iter::repeat_n(i, folded.len() - before));
        }
        offsets.push(text.len());
        FoldedText { folded, offsets }
    }

    /// Original offset for a folded offset that lies on a folded char boundary.
    pub fn original(&self, folded_offset: usize) -> usize {
        self.offsets[folded_offset]
    }

    /// Original `[start, end)` for a folded span. The end maps to the start
    /// of the next original character.
    pub fn original_span(&self, start: usize, end: usize) -> (usize, usize) {
        (self.offsets[start], self.offsets[end])
    }
}

/// A word token: `[start, end)` into the text it was cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordToken {
    pub start: usize,
    pub end: usize,
}

impl WordToken {
    pub fn text<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

/// Unicode word segments containing at least one alphanumeric character.
pub fn word_tokens(text: &str) -> Vec<WordToken> {
    text.split_word_bound_indices()
        .filter(|(_, w)| w.chars().any(char::is_alphanumeric))
        .map(|(i, w)| WordToken { start: i, end: i + w.len() })
        .collect()
}

/// Unicode word segments, punctuation included, whitespace dropped.
pub fn segments(text: &str) -> Vec<WordToken> {
    text.split_word_bound_indices()
        .filter(|(_, w)| !w.trim().is_empty())
        .map(|(i, w)| WordToken { start: i, end: i + w.len() })
        .collect()
}

/// Sorted byte offsets that are Unicode word boundaries (including 0 and len).
pub fn word_boundaries(text: &str) -> Vec<usize> {
    let mut out: Vec<usize> = text.split_word_bound_indices().map(|(i, _)| i).collect();
    out.push(text.len());
    out
}

/// Unicode sentence spans, trailing whitespace trimmed.
pub fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    text.split_sentence_bound_indices()
        .filter_map(|(i, s)| {
            let trimmed = s.trim_end();
            (!trimmed.trim_start().is_empty()).then(|| (i, i + trimmed.len()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_maps_offsets_back() {
        let t = FoldedText::new("Ο ΝΟΣΟΚΌΜΟΣ ήρθε");
        assert!(t.folded.starts_with("ο νοσοκόμοσ"));
        let start = t.folded.find("νοσοκόμοσ").unwrap();
        let (s, e) = t.original_span(start, start + "νοσοκόμοσ".len());
        assert_eq!(&"Ο ΝΟΣΟΚΌΜΟΣ ήρθε"[s..e], "ΝΟΣΟΚΌΜΟΣ");
    }

    #[test]
    fn fold_handles_length_changing_lowercase() {
        // U+0130 lowercases to two chars.
        let text = "İstanbul doctor";
        let t = FoldedText::new(text);
        let start = t.folded.find("doctor").unwrap();
        let (s, e) = t.original_span(start, start + 6);
        assert_eq!(&text[s..e], "doctor");
    }

    #[test]
    fn tokens_and_sentences() {
        let text = "Today the doctor came. Consequently, his patient left.";
        let words: Vec<_> = word_tokens(text).iter().map(|t| t.text(text)).collect();
        assert_eq!(words[..3], ["Today", "the", "doctor"]);
        assert!(!words.contains(&","));
        assert_eq!(sentence_spans(text).len(), 2);
        assert_eq!(&text[sentence_spans(text)[0].0..sentence_spans(text)[0].1], "Today the doctor came.");
        assert!(word_boundaries("doctorate").iter().all(|&b| b == 0 || b == 9));
    }
}
