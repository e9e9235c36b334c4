//! Segment tokenizers. Input segments never contain break tokens.

use std::sync::OnceLock;

use regex::Regex;

use super::Language;

struct Rules13a {
    punct: Regex,
    period_comma_left: Regex,
    period_comma_right: Regex,
    digit_dash: Regex,
}

fn rules_13a() -> &'static Rules13a {
    static RULES: OnceLock<Rules13a> = OnceLock::new();
    RULES.get_or_init(|| Rules13a {
        // { | } ~  [ \ ] ^ _ `  space ! " # $ % &  ( ) * +  : ; < = > ? @  /
        punct: Regex::new(r"([\x7B-\x7E\x5B-\x60\x20-\x26\x28-\x2B\x3A-\x40\x2F])").unwrap(),
        period_comma_left: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_comma_right: Regex::new(r"([\.,])([^0-9])").unwrap(),
        digit_dash: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

/// The `13a` tokenizer: punctuation detached, periods and commas kept
/// inside numbers, dash split after a digit.
pub fn tokenize_13a_segment(segment: &str) -> Vec<String> {
    let rules = rules_13a();
    let mut norm = segment
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if norm.contains('&') {
        norm = norm
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let norm = format!(" {norm} ");
    let norm = rules.punct.replace_all(&norm, " $1 ");
    let norm = rules.period_comma_left.replace_all(&norm, "$1 $2 ");
    let norm = rules.period_comma_right.replace_all(&norm, " $1 $2");
    let norm = rules.digit_dash.replace_all(&norm, "$1 $2 ");
    norm.split_whitespace().map(str::to_string).collect()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Characters split off as their own token in every position.
fn is_special(c: char) -> bool {
    !(c.is_alphanumeric() || c.is_whitespace() || matches!(c, '.' | '`' | ',' | '-') || is_apostrophe(c))
}

/// Detached-punctuation tokenizer.
///
/// Splits off symbols and punctuation, keeps commas between digits, isolates
/// runs of dots, handles apostrophes per language (English `don't` → `don 't`,
/// French `l'homme` → `l' homme`, others split fully) and detaches a word-final
/// period unless the word is an acronym (`U.S.`) or the next word starts in
/// lowercase. No non-breaking-prefix lists are used.
pub fn tokenize_mt_segment(segment: &str, lang: Language) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in segment.split_whitespace() {
        let cleaned: String = word.chars().filter(|c| !c.is_control()).collect();
        split_word(&cleaned, lang, &mut tokens);
    }
    detach_final_periods(tokens)
}

fn split_word(word: &str, lang: Language, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    let mut buf = String::new();
    let flush = |buf: &mut String, out: &mut Vec<String>| {
        if !buf.is_empty() {
            out.push(std::mem::take(buf));
        }
    };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev = if i > 0 { Some(chars[i - 1]) } else { None };
        let next = chars.get(i + 1).copied();
        if is_special(c) {
            flush(&mut buf, out);
            out.push(c.to_string());
        } else if c == '.' {
            let run = chars[i..].iter().take_while(|&&d| d == '.').count();
            if run > 1 {
                flush(&mut buf, out);
                out.push(".".repeat(run));
                i += run;
                continue;
            }
            buf.push(c);
        } else if c == ',' {
            let numeric = |x: Option<char>| x.is_some_and(char::is_numeric);
            if numeric(prev) && numeric(next) {
                buf.push(c);
            } else {
                flush(&mut buf, out);
                out.push(",".into());
            }
        } else if is_apostrophe(c) {
            let alpha = |x: Option<char>| x.is_some_and(char::is_alphabetic);
            match lang {
                Language::English if (alpha(prev) && alpha(next)) || (prev.is_some_and(char::is_numeric) && next == Some('s')) => {
                    flush(&mut buf, out);
                    buf.push(c);
                }
                Language::French | Language::Italian if alpha(prev) && alpha(next) => {
                    buf.push(c);
                    flush(&mut buf, out);
                }
                _ => {
                    flush(&mut buf, out);
                    out.push(c.to_string());
                }
            }
        } else {
            buf.push(c);
        }
        i += 1;
    }
    flush(&mut buf, out);
}

fn detach_final_periods(tokens: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len() + 1);
    for (i, tok) in tokens.iter().enumerate() {
        let Some(pre) = tok.strip_suffix('.') else {
            out.push(tok.clone());
            continue;
        };
        if pre.is_empty() || pre.ends_with('.') {
            out.push(tok.clone());
            continue;
        }
        let acronym = pre.contains('.') && pre.chars().any(char::is_alphabetic);
        let lowercase_next = tokens
            .get(i + 1)
            .and_then(|n| n.chars().next())
            .is_some_and(char::is_lowercase);
        if acronym || lowercase_next {
            out.push(tok.clone());
        } else {
            out.push(pre.to_string());
            out.push(".".into());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mt(s: &str, lang: Language) -> Vec<String> {
        tokenize_mt_segment(s, lang)
    }

    #[test]
    fn thirteen_a_keeps_number_commas() {
        assert_eq!(tokenize_13a_segment("1,000 points."), vec!["1,000", "points", "."]);
        assert_eq!(tokenize_13a_segment("Hello, world!"), vec!["Hello", ",", "world", "!"]);
        assert_eq!(tokenize_13a_segment("3.5 (approx)"), vec!["3.5", "(", "approx", ")"]);
        assert_eq!(tokenize_13a_segment("1990-2000"), vec!["1990", "-", "2000"]);
        assert_eq!(tokenize_13a_segment("don't"), vec!["don't"]);
        assert_eq!(tokenize_13a_segment("&quot;hi&quot;"), vec!["\"", "hi", "\""]);
    }

    #[test]
    fn mt_french_example_block() {
        assert_eq!(mt("le capitalisme,", Language::French), vec!["le", "capitalisme", ","]);
        assert_eq!(
            mt("Enonçons clairement nos hypothèses : le capitalisme,", Language::French),
            vec!["Enonçons", "clairement", "nos", "hypothèses", ":", "le", "capitalisme", ","]
        );
        assert_eq!(mt("que la démocratie.", Language::French), vec!["que", "la", "démocratie", "."]);
    }

    #[test]
    fn mt_apostrophes() {
        assert_eq!(mt("don't", Language::English), vec!["don", "'t"]);
        assert_eq!(mt("the 1990's", Language::English), vec!["the", "1990", "'s"]);
        assert_eq!(mt("l'homme", Language::French), vec!["l'", "homme"]);
        assert_eq!(mt("l\u{2019}homme", Language::French), vec!["l\u{2019}", "homme"]);
        assert_eq!(mt("geht's", Language::German), vec!["geht", "'", "s"]);
        assert_eq!(mt("'quoted'", Language::English), vec!["'", "quoted", "'"]);
    }

    #[test]
    fn mt_numbers_dots_and_periods() {
        assert_eq!(mt("1,000.5 people, 3", Language::English), vec!["1,000.5", "people", ",", "3"]);
        assert_eq!(mt("wait... what?", Language::English), vec!["wait", "...", "what", "?"]);
        assert_eq!(mt("the U.S. Army", Language::English), vec!["the", "U.S.", "Army"]);
        assert_eq!(mt("Mr. smith", Language::English), vec!["Mr.", "smith"]);
        assert_eq!(mt("Done. Next", Language::English), vec!["Done", ".", "Next"]);
        assert_eq!(mt("e-mail «quote»", Language::French), vec!["e-mail", "«", "quote", "»"]);
    }
}
