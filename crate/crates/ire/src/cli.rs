//! Scheme text format (parser and formatter) and the command-line front end.
//!
//! A scheme document is a list of cycles in two-row notation `[g a d | d b]`
//! or general notation `(a.b a.e)`, optionally followed by a `LEN` block with
//! one rational length per label and a `PTS` block with one rational
//! coordinate per doubled symbol. Rationals are written `p/q` or as integer
//! literals.

use crate::canonical::{canonicalize, CanonicalForm};
use crate::circle::{
    default_max_time, dual_from_return_map, first_return_map, realize, ArcUnion, CircleRotation,
};
use crate::exact::{parse_rational, Rational};
use crate::induction::Transcript;
use crate::lengths::{
    cycle_system, endpoints_from_lengths, is_allowed, is_interval_exchange_scheme,
    is_positive_scheme, is_rotational, is_splittable, sample_positive_allowed, EndpointVector,
    FloatingIRE, LengthVector,
};
use crate::scheme::{Cycle, DoubledSymbol, Label, Marker, Scheme};
use clap::{Parser, Subcommand};
use num::Signed;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation(_) => 1,
        }
    }

    fn validation(msg: impl ToString) -> CliError {
        CliError::Validation(msg.to_string())
    }
}

/// A parsed scheme file: the scheme plus optional length and endpoint blocks.
#[derive(Debug, Clone)]
pub struct SchemeDocument {
    pub source: String,
    pub scheme: Scheme,
    pub lengths: Option<LengthVector>,
    pub endpoints: Option<EndpointVector>,
}

impl PartialEq for SchemeDocument {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme
            && self.lengths == other.lengths
            && self.endpoints == other.endpoints
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LBracket,
    RBracket,
    LParen,
    RParen,
    Pipe,
    Equals,
    Word(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut chars = line.char_indices().peekable();
        while let Some(&(col, c)) = chars.peek() {
            let spanned = |token| Spanned {
                token,
                line: lineno + 1,
                col: col + 1,
            };
            match c {
                ' ' | '\t' | '\r' => {
                    chars.next();
                }
                '[' => {
                    chars.next();
                    out.push(spanned(Token::LBracket));
                }
                ']' => {
                    chars.next();
                    out.push(spanned(Token::RBracket));
                }
                '(' => {
                    chars.next();
                    out.push(spanned(Token::LParen));
                }
                ')' => {
                    chars.next();
                    out.push(spanned(Token::RParen));
                }
                '|' => {
                    chars.next();
                    out.push(spanned(Token::Pipe));
                }
                '=' => {
                    chars.next();
                    out.push(spanned(Token::Equals));
                }
                c if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '/' || c == '-' => {
                    let mut word = String::new();
                    while let Some(&(_, c)) = chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '/' || c == '-'
                        {
                            word.push(c);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(spanned(Token::Word(word)));
                }
                other => {
                    return Err(CliError::Parse {
                        line: lineno + 1,
                        col: col + 1,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct TokenStream {
    tokens: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl TokenStream {
    fn new(text: &str) -> Result<TokenStream, CliError> {
        let tokens = lex(text)?;
        let end = (text.lines().count().max(1), 1);
        Ok(TokenStream {
            tokens,
            pos: 0,
            end,
        })
    }

    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl ToString) -> CliError {
        let (line, col) = self.peek().map(|s| (s.line, s.col)).unwrap_or(self.end);
        CliError::Parse {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn expect_word(&mut self, what: &str) -> Result<String, CliError> {
        match self.next() {
            Some(Spanned {
                token: Token::Word(w),
                ..
            }) => Ok(w),
            Some(s) => Err(CliError::Parse {
                line: s.line,
                col: s.col,
                msg: format!("expected {what}"),
            }),
            None => Err(self.error_here(format!("expected {what}, found end of input"))),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), CliError> {
        match self.next() {
            Some(s) if s.token == token => Ok(()),
            Some(s) => Err(CliError::Parse {
                line: s.line,
                col: s.col,
                msg: format!("expected {what}"),
            }),
            None => Err(self.error_here(format!("expected {what}, found end of input"))),
        }
    }
}

fn parse_label(word: &str, ts: &TokenStream) -> Result<Label, CliError> {
    Label::new(word).map_err(|e| ts.error_here(e))
}

fn parse_symbol(word: &str, ts: &TokenStream) -> Result<DoubledSymbol, CliError> {
    let (name, marker) = word
        .rsplit_once('.')
        .ok_or_else(|| ts.error_here(format!("expected `label.b` or `label.e`, got `{word}`")))?;
    let marker = match marker {
        "b" => Marker::Begin,
        "e" => Marker::End,
        other => {
            return Err(ts.error_here(format!("marker must be `b` or `e`, got `{other}`")));
        }
    };
    let label = parse_label(name, ts)?;
    Ok(DoubledSymbol { label, marker })
}

/// Parses a scheme document. Cycle elements must cover each mentioned label's
/// beginning and ending exactly once; `LEN` values must form a vector allowed
/// by the scheme; `PTS` values must satisfy the endpoint balance relations.
pub fn parse_scheme(text: &str) -> Result<SchemeDocument, CliError> {
    let mut ts = TokenStream::new(text)?;
    let mut cycles: Vec<Vec<DoubledSymbol>> = Vec::new();
    let mut len_entries: Option<Vec<(Label, Rational)>> = None;
    let mut pts_entries: Option<Vec<(DoubledSymbol, Rational)>> = None;
    while let Some(spanned) = ts.peek().cloned() {
        match &spanned.token {
            Token::LBracket => {
                ts.next();
                let mut top = Vec::new();
                let mut bottom = Vec::new();
                let mut in_bottom = false;
                loop {
                    match ts.next() {
                        Some(Spanned {
                            token: Token::Word(w),
                            ..
                        }) => {
                            let l = parse_label(&w, &ts)?;
                            if in_bottom {
                                bottom.push(l);
                            } else {
                                top.push(l);
                            }
                        }
                        Some(Spanned {
                            token: Token::Pipe,
                            line,
                            col,
                        }) => {
                            if in_bottom {
                                return Err(CliError::Parse {
                                    line,
                                    col,
                                    msg: "second `|` in a two-row cycle".to_string(),
                                });
                            }
                            in_bottom = true;
                        }
                        Some(Spanned {
                            token: Token::RBracket,
                            line,
                            col,
                        }) => {
                            if !in_bottom {
                                return Err(CliError::Parse {
                                    line,
                                    col,
                                    msg: "two-row cycle is missing `|`".to_string(),
                                });
                            }
                            break;
                        }
                        Some(s) => {
                            return Err(CliError::Parse {
                                line: s.line,
                                col: s.col,
                                msg: "expected a label, `|`, or `]`".to_string(),
                            })
                        }
                        None => return Err(ts.error_here("unclosed `[`")),
                    }
                }
                let cycle = Cycle::from_two_row(&top, &bottom).map_err(CliError::validation)?;
                cycles.push(cycle.elements().to_vec());
            }
            Token::LParen => {
                ts.next();
                let mut elements = Vec::new();
                loop {
                    match ts.next() {
                        Some(Spanned {
                            token: Token::Word(w),
                            ..
                        }) => elements.push(parse_symbol(&w, &ts)?),
                        Some(Spanned {
                            token: Token::RParen,
                            line,
                            col,
                        }) => {
                            if elements.is_empty() {
                                return Err(CliError::Parse {
                                    line,
                                    col,
                                    msg: "empty cycle".to_string(),
                                });
                            }
                            break;
                        }
                        Some(s) => {
                            return Err(CliError::Parse {
                                line: s.line,
                                col: s.col,
                                msg: "expected `label.b`, `label.e`, or `)`".to_string(),
                            })
                        }
                        None => return Err(ts.error_here("unclosed `(`")),
                    }
                }
                cycles.push(elements);
            }
            Token::Word(w) if w == "LEN" => {
                ts.next();
                let mut entries = Vec::new();
                while matches!(
                    ts.peek(),
                    Some(Spanned {
                        token: Token::Word(_),
                        ..
                    })
                ) {
                    let name = ts.expect_word("a label")?;
                    let label = parse_label(&name, &ts)?;
                    ts.expect(Token::Equals, "`=`")?;
                    let value = ts.expect_word("a rational")?;
                    let value = parse_rational(&value).map_err(|e| ts.error_here(e))?;
                    entries.push((label, value));
                }
                len_entries = Some(entries);
            }
            Token::Word(w) if w == "PTS" => {
                ts.next();
                let mut entries = Vec::new();
                while matches!(
                    ts.peek(),
                    Some(Spanned {
                        token: Token::Word(_),
                        ..
                    })
                ) {
                    let name = ts.expect_word("a doubled symbol")?;
                    let sym = parse_symbol(&name, &ts)?;
                    ts.expect(Token::Equals, "`=`")?;
                    let value = ts.expect_word("a rational")?;
                    let value = parse_rational(&value).map_err(|e| ts.error_here(e))?;
                    entries.push((sym, value));
                }
                pts_entries = Some(entries);
            }
            _ => {
                return Err(ts.error_here("expected a cycle, `LEN`, or `PTS`"));
            }
        }
    }
    if cycles.is_empty() {
        let ts = TokenStream::new(text)?;
        return Err(ts.error_here("document contains no cycles"));
    }
    let scheme = Scheme::from_cycles(&cycles).map_err(CliError::validation)?;
    let lengths = match len_entries {
        None => None,
        Some(entries) => {
            let mut map = BTreeMap::new();
            for (l, v) in entries {
                if !scheme.contains_label(&l) {
                    return Err(CliError::validation(format!(
                        "unknown label `{l}` in LEN block"
                    )));
                }
                if map.insert(l.clone(), v).is_some() {
                    return Err(CliError::validation(format!("duplicate length for `{l}`")));
                }
            }
            let v = LengthVector::new(map);
            match is_allowed(&scheme, &v) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(CliError::validation(
                        "lengths are not allowed by the scheme",
                    ))
                }
                Err(e) => return Err(CliError::validation(e)),
            }
            Some(v)
        }
    };
    let endpoints = match pts_entries {
        None => None,
        Some(entries) => {
            let mut map = BTreeMap::new();
            for (s, v) in entries {
                if !scheme.contains_label(&s.label) {
                    return Err(CliError::validation(format!(
                        "unknown label `{}` in PTS block",
                        s.label
                    )));
                }
                if map.insert(s.clone(), v).is_some() {
                    return Err(CliError::validation(format!(
                        "duplicate coordinate for `{s}`"
                    )));
                }
            }
            let x = EndpointVector::new(map);
            crate::lengths::lengths_from_endpoints(&scheme, &x).map_err(CliError::validation)?;
            Some(x)
        }
    };
    Ok(SchemeDocument {
        source: text.to_string(),
        scheme,
        lengths,
        endpoints,
    })
}

/// Canonical text for a scheme: two-row notation per cycle where possible,
/// general notation otherwise, cycles in their canonical order.
pub fn format_scheme(s: &Scheme) -> String {
    let mut out = String::new();
    for (i, cycle) in s.cycles().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match cycle.two_row() {
            Ok((top, bottom)) => {
                out.push('[');
                for (j, l) in top.iter().enumerate() {
                    if j > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{l}");
                }
                out.push_str(" |");
                for l in &bottom {
                    let _ = write!(out, " {l}");
                }
                out.push(']');
            }
            Err(_) => {
                let _ = write!(out, "{cycle}");
            }
        }
    }
    out
}

/// Canonical text for a document: the scheme plus its optional blocks.
pub fn format_document(doc: &SchemeDocument) -> String {
    let mut out = format_scheme(&doc.scheme);
    if let Some(v) = &doc.lengths {
        out.push_str("\nLEN");
        for (l, val) in v.iter() {
            let _ = write!(out, " {l}={val}");
        }
    }
    if let Some(x) = &doc.endpoints {
        out.push_str("\nPTS");
        for (s, val) in x.iter() {
            let _ = write!(out, " {s}={val}");
        }
    }
    out.push('\n');
    out
}

/// Parses a rotation file: a `ROT L=<p/q> M=<p/q> X0=<p/q>` line and an
/// `ARCS [lo,hi) [lo,hi) ...` line.
pub fn parse_rotation_file(text: &str) -> Result<(CircleRotation, ArcUnion), CliError> {
    let mut length = None;
    let mut shift = None;
    let mut base = None;
    let mut arcs: Option<Vec<(Rational, Rational)>> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| CliError::Parse {
            line: lineno + 1,
            col: 1,
            msg,
        };
        if let Some(rest) = line.strip_prefix("ROT") {
            for part in rest.split_whitespace() {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, got `{part}`")))?;
                let value = parse_rational(value).map_err(|e| err(e.to_string()))?;
                match key {
                    "L" => length = Some(value),
                    "M" => shift = Some(value),
                    "X0" => base = Some(value),
                    other => return Err(err(format!("unknown rotation field `{other}`"))),
                }
            }
        } else if let Some(rest) = line.strip_prefix("ARCS") {
            let mut list = Vec::new();
            for part in rest.split_whitespace() {
                let inner = part
                    .strip_prefix('[')
                    .and_then(|p| p.strip_suffix(')'))
                    .ok_or_else(|| err(format!("expected `[lo,hi)`, got `{part}`")))?;
                let (lo, hi) = inner
                    .split_once(',')
                    .ok_or_else(|| err(format!("expected `[lo,hi)`, got `{part}`")))?;
                let lo = parse_rational(lo).map_err(|e| err(e.to_string()))?;
                let hi = parse_rational(hi).map_err(|e| err(e.to_string()))?;
                list.push((lo, hi));
            }
            arcs = Some(list);
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }
    let length = length.ok_or_else(|| CliError::validation("missing L in ROT line"))?;
    let shift = shift.ok_or_else(|| CliError::validation("missing M in ROT line"))?;
    let base = base.ok_or_else(|| CliError::validation("missing X0 in ROT line"))?;
    let rot = CircleRotation::new(length, shift, base).map_err(CliError::validation)?;
    let raw = arcs.ok_or_else(|| CliError::validation("missing ARCS line"))?;
    let arcs = ArcUnion::new(&rot, &raw).map_err(CliError::validation)?;
    Ok((rot, arcs))
}

// ---------------------------------------------------------------------------
// Command-line interface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "ire",
    about = "Interval rearrangement ensembles: schemes, duality, induction, canonical forms, and circle realizations",
    disable_help_subcommand = true
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Dump interval-chain coordinates for external plotting.
    #[arg(long, global = true)]
    emit_plot_data: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report cycles, twists, positivity, rotationality, splittability, and
    /// the dual of a scheme file.
    Check { file: PathBuf },
    /// Print the dual scheme.
    Dual { file: PathBuf },
    /// Transform a rotational interval exchange into canonical form.
    Canonicalize {
        file: PathBuf,
        /// Write the transcript to this file instead of stdout.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Realize a rotational interval exchange as a circle first-return map.
    Realize { file: PathBuf },
    /// Compute the first return map of a rotation file onto its arcs.
    FirstReturn {
        file: PathBuf,
        /// Horizon for return times; defaults to four circle lengths over the
        /// shortest arc.
        #[arg(long)]
        max_time: Option<u64>,
    },
    /// Realize an exchange and check that the induced first-return map is
    /// shift equivalent to it.
    VerifyRoundtrip { file: PathBuf },
}

/// Runs the command line. Returns the process exit code: 0 on success, 1 on
/// validation failure, 2 on parse error.
pub fn run<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let mut full = vec!["ire".to_string()];
    full.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&full) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))
}

fn load_document(path: &Path) -> Result<SchemeDocument, CliError> {
    parse_scheme(&read_file(path)?)
}

/// The exchange a document denotes: its given lengths, or a sampled positive
/// allowed vector when the file has no `LEN` block.
fn document_exchange(doc: &SchemeDocument) -> Result<FloatingIRE, CliError> {
    let lengths = match &doc.lengths {
        Some(v) => v.clone(),
        None => sample_positive_allowed(&doc.scheme).map_err(|_| {
            CliError::validation("scheme allows no positive lengths and the file has no LEN block")
        })?,
    };
    FloatingIRE::new(doc.scheme.clone(), lengths).map_err(CliError::validation)
}

fn rational_str(r: &Rational) -> String {
    r.to_string()
}

/// A non-positivity witness: a balance row whose nonzero coefficients all
/// share one sign, forcing a zero sum of lengths.
fn zero_sum_witness(s: &Scheme) -> Option<String> {
    for row in cycle_system(s).rows() {
        if row.is_empty() {
            continue;
        }
        let all_neg = row.values().all(|c| c.is_negative());
        let all_pos = row.values().all(|c| c.is_positive());
        if all_neg || all_pos {
            let terms: Vec<String> = row
                .iter()
                .map(|(v, c)| {
                    let mag = if all_neg { -c.clone() } else { c.clone() };
                    if mag == Rational::from_integer(1.into()) {
                        v.clone()
                    } else {
                        format!("{mag}*{v}")
                    }
                })
                .collect();
            return Some(format!("{} = 0", terms.join(" + ")));
        }
    }
    None
}

fn json_labels(labels: &[Label]) -> Value {
    Value::Array(labels.iter().map(|l| json!(l.to_string())).collect())
}

fn cycle_json(c: &Cycle) -> Value {
    match c.two_row() {
        Ok((top, bottom)) => json!({
            "two_row": { "top": json_labels(&top), "bottom": json_labels(&bottom) },
            "twist": c.twist_number(),
        }),
        Err(_) => json!({
            "elements": c.elements().iter().map(|e| json!(e.to_string())).collect::<Vec<_>>(),
            "twist": c.twist_number(),
        }),
    }
}

fn dispatch<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    let emit = |out: &mut W, value: &Value| -> Result<(), CliError> {
        writeln!(out, "{value}").map_err(CliError::validation)
    };
    match &cli.command {
        Command::Check { file } => {
            let doc = load_document(file)?;
            let s = &doc.scheme;
            let dual = s.dual();
            let positive = is_positive_scheme(s);
            let interval_exchange = is_interval_exchange_scheme(s);
            let rotational = is_rotational(s);
            let witness = if interval_exchange && !rotational {
                zero_sum_witness(&dual)
            } else {
                None
            };
            let split = if s.is_zero_twist() {
                is_splittable(s)
            } else {
                None
            };
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "check",
                    "scheme": format_scheme(s),
                    "cycles": s.cycles().iter().map(cycle_json).collect::<Vec<_>>(),
                    "twist_total_pair": s.twist_total_pair(),
                    "irreducible": s.is_irreducible(),
                    "positive": positive,
                    "interval_exchange": interval_exchange,
                    "rotational": rotational,
                    "dual_zero_sum_witness": witness,
                    "splittable": split.map(|c| json!({
                        "cycle": c.cycle.to_string(),
                        "arc_first": c.arc_first.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                        "arc_second": c.arc_second.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                        "side_first": c.side_first.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                        "side_second": c.side_second.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                    })),
                    "dual": format_scheme(&dual),
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "scheme: {}", format_scheme(s)).map_err(CliError::validation)?;
                for c in s.cycles() {
                    writeln!(out, "cycle: {c} twist={}", c.twist_number())
                        .map_err(CliError::validation)?;
                }
                writeln!(out, "twist_total_pair: {}", s.twist_total_pair())
                    .map_err(CliError::validation)?;
                writeln!(out, "irreducible: {}", s.is_irreducible())
                    .map_err(CliError::validation)?;
                writeln!(out, "positive: {positive}").map_err(CliError::validation)?;
                writeln!(out, "interval_exchange: {interval_exchange}")
                    .map_err(CliError::validation)?;
                writeln!(out, "rotational: {rotational}").map_err(CliError::validation)?;
                if let Some(w) = &witness {
                    writeln!(out, "dual_zero_sum_witness: {w}").map_err(CliError::validation)?;
                }
                match &split {
                    Some(c) => {
                        writeln!(
                            out,
                            "splittable: cycle={} sides={{{}}} / {{{}}}",
                            c.cycle,
                            c.side_first
                                .iter()
                                .map(Label::to_string)
                                .collect::<Vec<_>>()
                                .join(","),
                            c.side_second
                                .iter()
                                .map(Label::to_string)
                                .collect::<Vec<_>>()
                                .join(","),
                        )
                        .map_err(CliError::validation)?;
                    }
                    None => writeln!(out, "splittable: none").map_err(CliError::validation)?,
                }
                writeln!(out, "dual: {}", format_scheme(&dual)).map_err(CliError::validation)?;
            }
            if cli.emit_plot_data {
                if let Ok(ire) = document_exchange(&doc) {
                    let x = endpoints_from_lengths(s, ire.lengths(), &BTreeMap::new())
                        .map_err(CliError::validation)?;
                    for (i, c) in s.cycles().iter().enumerate() {
                        let coords: Vec<String> = c
                            .elements()
                            .iter()
                            .map(|e| rational_str(x.get(e)))
                            .collect();
                        writeln!(out, "PLOT {i} {}", coords.join(" "))
                            .map_err(CliError::validation)?;
                    }
                }
            }
            Ok(())
        }
        Command::Dual { file } => {
            let doc = load_document(file)?;
            let dual = doc.scheme.dual();
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "dual",
                    "scheme": format_scheme(&doc.scheme),
                    "dual": format_scheme(&dual),
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "{}", format_scheme(&dual)).map_err(CliError::validation)?;
            }
            Ok(())
        }
        Command::Canonicalize { file, transcript } => {
            let doc = load_document(file)?;
            let ire = document_exchange(&doc)?;
            let (form, t) = canonicalize(&ire).map_err(CliError::validation)?;
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "canonicalize",
                    "canonical": canonical_json(&form),
                    "transcript": t.to_string(),
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "{form}").map_err(CliError::validation)?;
            }
            match transcript {
                Some(path) => {
                    std::fs::write(path, t.to_string()).map_err(CliError::validation)?;
                }
                None if !cli.json => {
                    write!(out, "{t}").map_err(CliError::validation)?;
                }
                None => {}
            }
            Ok(())
        }
        Command::Realize { file } => {
            let doc = load_document(file)?;
            let ire = document_exchange(&doc)?;
            let (rot, arcs) = realize(&ire).map_err(CliError::validation)?;
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "realize",
                    "rotation": { "L": rational_str(rot.length()), "M": rational_str(rot.shift()), "X0": rational_str(rot.base()) },
                    "arcs": arcs.arcs().iter().map(|(lo, hi)| json!([rational_str(lo), rational_str(hi)])).collect::<Vec<_>>(),
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "{rot}").map_err(CliError::validation)?;
                writeln!(out, "{arcs}").map_err(CliError::validation)?;
            }
            Ok(())
        }
        Command::FirstReturn { file, max_time } => {
            let (rot, arcs) = parse_rotation_file(&read_file(file)?)?;
            let horizon = max_time.unwrap_or_else(|| default_max_time(&rot, &arcs));
            let res = first_return_map(&rot, &arcs, horizon).map_err(CliError::validation)?;
            let (dual, dual_lengths) = dual_from_return_map(&res).map_err(CliError::validation)?;
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "first-return",
                    "scheme": format_scheme(res.ire.scheme()),
                    "lengths": res.ire.lengths().iter().map(|(l, v)| (l.to_string(), rational_str(v))).collect::<BTreeMap<_, _>>(),
                    "endpoints": res.ire.endpoints().iter().map(|(s, v)| (s.to_string(), rational_str(v))).collect::<BTreeMap<_, _>>(),
                    "return_times": res.return_times.iter().map(|(l, t)| (l.to_string(), *t)).collect::<BTreeMap<_, _>>(),
                    "dual": format_scheme(&dual),
                    "dual_lengths": dual_lengths.iter().map(|(l, v)| (l.to_string(), rational_str(v))).collect::<BTreeMap<_, _>>(),
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "scheme: {}", format_scheme(res.ire.scheme()))
                    .map_err(CliError::validation)?;
                let len_line: Vec<String> = res
                    .ire
                    .lengths()
                    .iter()
                    .map(|(l, v)| format!("{l}={v}"))
                    .collect();
                writeln!(out, "LEN {}", len_line.join(" ")).map_err(CliError::validation)?;
                let pts_line: Vec<String> = res
                    .ire
                    .endpoints()
                    .iter()
                    .map(|(s, v)| format!("{s}={v}"))
                    .collect();
                writeln!(out, "PTS {}", pts_line.join(" ")).map_err(CliError::validation)?;
                let time_line: Vec<String> = res
                    .return_times
                    .iter()
                    .map(|(l, t)| format!("{l}={t}"))
                    .collect();
                writeln!(out, "TIMES {}", time_line.join(" ")).map_err(CliError::validation)?;
                writeln!(out, "DUAL {}", format_scheme(&dual)).map_err(CliError::validation)?;
                let dl: Vec<String> = dual_lengths
                    .iter()
                    .map(|(l, v)| format!("{l}={v}"))
                    .collect();
                writeln!(out, "DUAL_LEN {}", dl.join(" ")).map_err(CliError::validation)?;
            }
            Ok(())
        }
        Command::VerifyRoundtrip { file } => {
            let doc = load_document(file)?;
            let ire = document_exchange(&doc)?;
            let (rot, arcs) = realize(&ire).map_err(CliError::validation)?;
            let horizon = default_max_time(&rot, &arcs).max(1024);
            let res = first_return_map(&rot, &arcs, horizon).map_err(CliError::validation)?;
            let relabeling = crate::lengths::shift_equivalence(&ire, &res.ire.floating())
                .ok_or_else(|| {
                    CliError::validation("first return map is not shift equivalent to the input")
                })?;
            if cli.json {
                let value = json!({
                    "format": 1,
                    "command": "verify-roundtrip",
                    "rotation": { "L": rational_str(rot.length()), "M": rational_str(rot.shift()), "X0": rational_str(rot.base()) },
                    "arcs": arcs.arcs().iter().map(|(lo, hi)| json!([rational_str(lo), rational_str(hi)])).collect::<Vec<_>>(),
                    "relabeling": relabeling.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<BTreeMap<_, _>>(),
                    "equivalent": true,
                });
                emit(out, &value)?;
            } else {
                writeln!(out, "{rot}").map_err(CliError::validation)?;
                writeln!(out, "{arcs}").map_err(CliError::validation)?;
                let pairs: Vec<String> = relabeling
                    .iter()
                    .map(|(a, b)| format!("{a}->{b}"))
                    .collect();
                writeln!(out, "relabeling: {}", pairs.join(" ")).map_err(CliError::validation)?;
                writeln!(out, "roundtrip: ok").map_err(CliError::validation)?;
            }
            Ok(())
        }
    }
}

fn canonical_json(form: &CanonicalForm) -> Value {
    json!({
        "m": form.m(),
        "n": form.n(),
        "alpha": form.alphas().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "beta": form.betas().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "v_alpha": rational_str(form.v_alpha()),
        "v_beta": rational_str(form.v_beta()),
    })
}

/// Parses a transcript file (the `canonicalize --transcript` output).
pub fn parse_transcript(text: &str) -> Result<Transcript, CliError> {
    Transcript::parse(text).map_err(CliError::validation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn parses_two_row_notation() {
        let doc = parse_scheme("[a b | b a]").unwrap();
        let expected = Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])]).unwrap();
        assert_eq!(doc.scheme, expected);
    }

    #[test]
    fn parses_the_four_letter_example() {
        let doc = parse_scheme("[g a d | d b] [b | a g]").unwrap();
        let expected = crate::scheme::testutil::four_letter_rotational();
        assert_eq!(doc.scheme, expected);
    }

    #[test]
    fn parses_general_notation_and_blocks() {
        let doc = parse_scheme("(a.b a.e)\nLEN a=3/2").unwrap();
        assert_eq!(doc.scheme.alphabet().len(), 1);
        assert_eq!(
            doc.lengths.unwrap().get(&Label::new("a").unwrap()),
            &crate::exact::ratio(3, 2)
        );
    }

    #[test]
    fn reports_parse_errors_with_positions() {
        match parse_scheme("(a.b a.e") {
            Err(CliError::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_scheme("[a b | b a] [a | a]") {
            Err(CliError::Validation(_)) => {}
            other => panic!("expected validation error, got {other:?}"),
        }
        match parse_scheme("[a b | b a]\nLEN a=1 b=2 c=3") {
            Err(CliError::Validation(_)) => {}
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_disallowed_lengths() {
        let text = "[g a d | d b] [b | a g]\nLEN a=1 b=1 g=1 d=1";
        assert!(matches!(parse_scheme(text), Err(CliError::Validation(_))));
    }

    #[test]
    fn format_parse_round_trip() {
        let texts = [
            "[a b | b a]",
            "[g a d | d b] [b | a g]",
            "[a b | b a]\nLEN a=1 b=7/3",
        ];
        for text in texts {
            let doc = parse_scheme(text).unwrap();
            let formatted = format_document(&doc);
            let reparsed = parse_scheme(&formatted).unwrap();
            assert_eq!(doc, reparsed);
            assert_eq!(format_document(&reparsed), formatted);
        }
        // Twisted schemes round-trip through general notation.
        let twisted = parse_scheme("(a.b a.e b.b b.e)").unwrap();
        let formatted = format_document(&twisted);
        assert_eq!(parse_scheme(&formatted).unwrap(), twisted);
    }

    #[test]
    fn rotation_file_round_trip() {
        let (rot, arcs) = parse_rotation_file("ROT L=9 M=4 X0=-1\nARCS [-1,2)").unwrap();
        assert_eq!(rot.length(), &rat(9));
        assert_eq!(arcs.arcs().len(), 1);
        let text = format!("{rot}\n{arcs}\n");
        let (rot2, arcs2) = parse_rotation_file(&text).unwrap();
        assert_eq!(rot, rot2);
        assert_eq!(arcs, arcs2);
    }

    fn run_strings(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let mut path = std::env::temp_dir();
        path.push(format!("ire-cli-test-{}-{name}", std::process::id()));
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn check_reports_rotationality() {
        let path = write_temp("rot.scheme", "[g a d | d b] [b | a g]\n");
        let (code, out, _) = run_strings(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("rotational: true"));
        assert!(out.contains("splittable: none"));
    }

    #[test]
    fn check_prints_zero_sum_witness_for_blocked_duals() {
        let path = write_temp("blocked.scheme", "[a d | d b] [g b | a g]\n");
        let (code, out, _) = run_strings(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("rotational: false"));
        assert!(out.contains("dual_zero_sum_witness: d + g = 0"));
    }

    #[test]
    fn json_output_is_stable_under_reserialization() {
        let path = write_temp("json.scheme", "[g a d | d b] [b | a g]\n");
        let (code, out, _) = run_strings(&["check", "--json", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let value: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(value["format"], 1);
        assert_eq!(value.to_string(), out.trim());
    }

    #[test]
    fn parse_errors_exit_with_code_two() {
        let path = write_temp("bad.scheme", "(a.b a.e\n");
        let (code, _, err) = run_strings(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("parse error"));
    }

    #[test]
    fn first_return_command_reports_times_and_dual() {
        let path = write_temp("rotfile", "ROT L=9 M=4 X0=-1\nARCS [-1,2)\n");
        let (code, out, _) = run_strings(&["first-return", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("scheme: [i1 i2 | i2 i1]"));
        assert!(out.contains("TIMES i1=5 i2=2"));
        assert!(out.contains("DUAL [i2 i1 | i1 i2]"));
    }

    #[test]
    fn verify_roundtrip_succeeds_on_the_four_letter_exchange() {
        let path = write_temp(
            "roundtrip.scheme",
            "[g a d | d b] [b | a g]\nLEN a=1 b=2 g=1 d=1\n",
        );
        let (code, out, err) = run_strings(&["verify-roundtrip", path.to_str().unwrap()]);
        assert_eq!(code, 0, "stderr: {err}");
        assert!(out.contains("roundtrip: ok"));
    }

    #[test]
    fn canonicalize_command_emits_canon_and_transcript() {
        let path = write_temp(
            "canon.scheme",
            "[g a d | d b] [b | a g]\nLEN a=1 b=2 g=1 d=1\n",
        );
        let (code, out, _) = run_strings(&["canonicalize", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("CANON "));
        assert!(out.contains("STEP "));
        let parsed = parse_transcript(&out.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
        assert!(!parsed.is_empty());
    }
}
