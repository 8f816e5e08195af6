//! Text formats for chains (`@mc`) and automata (`@automaton nfa|nba`).
//!
//! Both formats are line oriented and whitespace separated; `#` starts a
//! comment that runs to the end of the line. The first non-blank line is the
//! header. Keyword lines may appear in any order after it.
//!
//! ```text
//! @mc
//! states a b
//! init a 1/2
//! init b 1/2
//! trans a a 1/2
//! trans a b 1/2
//! trans b a 1/2
//! trans b b 1/2
//! ```
//!
//! ```text
//! @automaton nba
//! alphabet a b
//! states d0 d1
//! initial d0
//! accepting d1
//! trans d0 a d1
//! trans d0 b d0
//! trans d1 a d1
//! trans d1 b d0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Automaton, MarkovChain, Mode};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, column: self.column, message: message.into() }
    }
}

/// Splits a document into non-empty token lines with 1-based positions.
fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(cut) => &raw[..cut],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut offset = 0;
        for piece in content.split_whitespace() {
            let start = offset + content[offset..].find(piece).unwrap_or(0);
            offset = start + piece.len();
            tokens.push(Token { text: piece, line: i + 1, column: content[..start].chars().count() + 1 });
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

fn expect_arity(line: &[Token<'_>], arity: usize) -> Result<()> {
    if line.len() != arity + 1 {
        let at = line.get(arity + 1).unwrap_or(&line[0]);
        return Err(at.error(format!(
            "`{}` takes {arity} argument{}, found {}",
            line[0].text,
            if arity == 1 { "" } else { "s" },
            line.len() - 1
        )));
    }
    Ok(())
}

fn declare<'a>(names: &mut Vec<String>, index: &mut HashMap<&'a str, usize>, tok: Token<'a>) -> Result<()> {
    if index.contains_key(tok.text) {
        return Err(tok.error(format!("`{}` declared twice", tok.text)));
    }
    index.insert(tok.text, names.len());
    names.push(tok.text.to_string());
    Ok(())
}

fn lookup(index: &HashMap<&str, usize>, tok: Token<'_>, what: &str) -> Result<usize> {
    index.get(tok.text).copied().ok_or_else(|| match what {
        "letter" => Error::UnknownLetter(tok.text.to_string()),
        _ => Error::UnknownState(tok.text.to_string()),
    })
}

fn probability(tok: Token<'_>) -> Result<Rational> {
    let value: Rational =
        tok.text.parse().map_err(|_| tok.error(format!("`{}` is not a probability (`p/q`, `0` or `1`)", tok.text)))?;
    if !tok.text.contains('/') && !(value.is_zero() || value.is_one()) {
        return Err(tok.error("integer probabilities must be 0 or 1"));
    }
    if !value.is_probability() {
        return Err(tok.error(format!("{} is outside [0,1]", tok.text)));
    }
    Ok(value)
}

fn header<'a>(lines: &'a [Vec<Token<'a>>], keyword: &str) -> Result<&'a [Token<'a>]> {
    let first = lines.first().ok_or(Error::Syntax {
        line: 1,
        column: 1,
        message: format!("empty document, expected `{keyword}` header"),
    })?;
    if first[0].text != keyword {
        return Err(first[0].error(format!("expected `{keyword}` header, found `{}`", first[0].text)));
    }
    Ok(first)
}

/// Parses and validates an `@mc` document.
pub fn parse_markov_chain(text: &str) -> Result<MarkovChain> {
    let lines = tokenize(text);
    let head = header(&lines, "@mc")?;
    expect_arity(head, 0)?;

    let mut names = Vec::new();
    let mut index = HashMap::new();
    for line in &lines[1..] {
        if line[0].text == "states" {
            for tok in &line[1..] {
                declare(&mut names, &mut index, *tok)?;
            }
        }
    }

    let n = names.len();
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut seen_trans = HashMap::new();
    let mut init = vec![Rational::zero(); n];
    let mut seen_init = vec![false; n];
    let mut labels: Vec<Option<String>> = vec![None; n];
    let mut any_label = false;

    for line in &lines[1..] {
        let kw = line[0];
        match kw.text {
            "states" => {}
            "init" => {
                expect_arity(line, 2)?;
                let s = lookup(&index, line[1], "state")?;
                if std::mem::replace(&mut seen_init[s], true) {
                    return Err(line[0].error(format!("duplicate `init {}`", line[1].text)));
                }
                init[s] = probability(line[2])?;
            }
            "trans" => {
                expect_arity(line, 3)?;
                let s = lookup(&index, line[1], "state")?;
                let t = lookup(&index, line[2], "state")?;
                if seen_trans.insert((s, t), ()).is_some() {
                    return Err(line[0].error(format!("duplicate `trans {} {}`", line[1].text, line[2].text)));
                }
                rows[s].push((t, probability(line[3])?));
            }
            "label" => {
                expect_arity(line, 2)?;
                let s = lookup(&index, line[1], "state")?;
                if labels[s].is_some() {
                    return Err(line[0].error(format!("duplicate `label {}`", line[1].text)));
                }
                if !crate::model::is_identifier(line[2].text) {
                    return Err(line[2].error("invalid letter"));
                }
                labels[s] = Some(line[2].text.to_string());
                any_label = true;
            }
            other => return Err(kw.error(format!("unknown keyword `{other}`"))),
        }
    }

    let labels = if any_label {
        let mut out = Vec::with_capacity(n);
        for (s, l) in labels.into_iter().enumerate() {
            out.push(l.ok_or_else(|| Error::MissingLabel(names[s].clone()))?);
        }
        Some(out)
    } else {
        None
    };
    MarkovChain::new(names, rows, init, labels)
}

/// Parses and validates an `@automaton` document.
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let lines = tokenize(text);
    let head = header(&lines, "@automaton")?;
    let mode = match head.get(1).map(|t| t.text) {
        Some("nfa") => Mode::Finite,
        Some("nba") => Mode::Buchi,
        Some(other) => return Err(head[1].error(format!("unknown mode `{other}`, expected `nfa` or `nba`"))),
        None => return Err(head[0].error("missing mode: expected `@automaton nfa` or `@automaton nba`")),
    };
    expect_arity(head, 1)?;

    let mut letters = Vec::new();
    let mut letter_index = HashMap::new();
    let mut states = Vec::new();
    let mut state_index = HashMap::new();
    for line in &lines[1..] {
        match line[0].text {
            "alphabet" => {
                for tok in &line[1..] {
                    declare(&mut letters, &mut letter_index, *tok)?;
                }
            }
            "states" => {
                for tok in &line[1..] {
                    declare(&mut states, &mut state_index, *tok)?;
                }
            }
            _ => {}
        }
    }

    let mut initial = Vec::new();
    let mut accepting = Vec::new();
    let mut transitions = Vec::new();
    for line in &lines[1..] {
        let kw = line[0];
        match kw.text {
            "alphabet" | "states" => {}
            "initial" => {
                for tok in &line[1..] {
                    initial.push(lookup(&state_index, *tok, "state")?);
                }
            }
            "accepting" => {
                for tok in &line[1..] {
                    accepting.push(lookup(&state_index, *tok, "state")?);
                }
            }
            "trans" => {
                expect_arity(line, 3)?;
                let p = lookup(&state_index, line[1], "state")?;
                let a = lookup(&letter_index, line[2], "letter")?;
                let q = lookup(&state_index, line[3], "state")?;
                transitions.push((p, a, q));
            }
            other => return Err(kw.error(format!("unknown keyword `{other}`"))),
        }
    }
    Automaton::new(mode, letters, states, initial, accepting, transitions)
}

fn probability_text(p: &Rational) -> String {
    if p.denom() == &1.into() {
        p.numer().to_string()
    } else {
        p.to_string()
    }
}

/// Canonical `@mc` text: declaration order, one fact per line.
pub fn write_markov_chain(chain: &MarkovChain) -> String {
    let mut out = String::from("@mc\n");
    let _ = writeln!(out, "states {}", chain.states().join(" "));
    for (s, p) in chain.init().iter().enumerate() {
        if !p.is_zero() {
            let _ = writeln!(out, "init {} {}", chain.state_name(s), probability_text(p));
        }
    }
    for s in 0..chain.len() {
        for (t, p) in chain.row(s) {
            let _ = writeln!(out, "trans {} {} {}", chain.state_name(s), chain.state_name(*t), probability_text(p));
        }
    }
    if let Some(labels) = chain.labels() {
        for (s, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "label {} {}", chain.state_name(s), l);
        }
    }
    out
}

/// Canonical `@automaton` text.
pub fn write_automaton(aut: &Automaton) -> String {
    let names = |set: &crate::model::StateSet| set.iter().map(|&q| aut.state_name(q)).collect::<Vec<_>>().join(" ");
    let mut out = format!("@automaton {}\n", aut.mode().keyword());
    let _ = writeln!(out, "alphabet {}", aut.alphabet().join(" "));
    let _ = writeln!(out, "states {}", aut.states().join(" "));
    let _ = writeln!(out, "initial {}", names(aut.initial()));
    let _ = writeln!(out, "accepting {}", names(aut.accepting()));
    for (p, a, q) in aut.transitions() {
        let _ = writeln!(out, "trans {} {} {}", aut.state_name(p), aut.letter_name(a), aut.state_name(q));
    }
    // keyword lines with no arguments are legal but noisy
    out.replace("initial \n", "initial\n").replace("accepting \n", "accepting\n")
}

impl std::str::FromStr for MarkovChain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_markov_chain(s)
    }
}

impl std::str::FromStr for Automaton {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_automaton(s)
    }
}
