//! Parser for pulse files.
//!
//! One event per line, `#` starts a comment, mnemonics and labels are
//! case-insensitive:
//!
//! ```text
//! rot     <A|C|H|S> <x|y|z|-x|-y> <angle-degrees>
//! jevolve <k>/2J
//! grad    z
//! refocus <A|C|H|S>
//! ```

use std::fmt;

use thiserror::Error;

use super::{angle_in_range, Axis, PulseEvent, PulseSequence};
use crate::spinmodel::Spin;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at line {line}, column {column}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnknownMnemonic(String),
    UnknownSpinLabel(String),
    UnknownAxis(String),
    MalformedAngle(String),
    AngleOutOfRange(String),
    MalformedDuration(String),
    GradientAxis(String),
    MissingOperand(&'static str),
    TrailingInput(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnknownMnemonic(s) => write!(f, "unknown mnemonic '{s}'"),
            UnknownSpinLabel(s) => write!(f, "unknown spin label '{s}'"),
            UnknownAxis(s) => write!(f, "unknown axis '{s}' (expected x, y, z, -x or -y)"),
            MalformedAngle(s) => write!(f, "malformed angle '{s}'"),
            AngleOutOfRange(s) => write!(f, "angle '{s}' outside (-360, 360]"),
            MalformedDuration(s) => {
                write!(
                    f,
                    "malformed duration '{s}' (expected <k>/2J, k a positive integer)"
                )
            }
            GradientAxis(s) => write!(f, "gradients are along z only, got '{s}'"),
            MissingOperand(what) => write!(f, "missing {what}"),
            TrailingInput(s) => write!(f, "unexpected trailing input '{s}'"),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    end_column: usize,
    tokens: std::vec::IntoIter<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.number,
            column,
            kind,
        }
    }

    fn next(&mut self, what: &'static str) -> Result<Token<'a>, ParseError> {
        let end = self.end_column;
        self.tokens
            .next()
            .ok_or_else(|| self.err(end, ParseErrorKind::MissingOperand(what)))
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.tokens.next() {
            Some(t) => Err(self.err(t.column, ParseErrorKind::TrailingInput(t.text.into()))),
            None => Ok(()),
        }
    }
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn spin(line: &Line<'_>, t: &Token<'_>) -> Result<Spin, ParseError> {
    match t.text.to_ascii_uppercase().as_str() {
        "A" | "H" => Ok(Spin::A),
        "S" | "C" => Ok(Spin::S),
        _ => Err(line.err(t.column, ParseErrorKind::UnknownSpinLabel(t.text.into()))),
    }
}

fn axis(line: &Line<'_>, t: &Token<'_>) -> Result<Axis, ParseError> {
    match t.text.to_ascii_lowercase().as_str() {
        "x" | "+x" => Ok(Axis::X),
        "-x" => Ok(Axis::MinusX),
        "y" | "+y" => Ok(Axis::Y),
        "-y" => Ok(Axis::MinusY),
        "z" | "+z" => Ok(Axis::Z),
        _ => Err(line.err(t.column, ParseErrorKind::UnknownAxis(t.text.into()))),
    }
}

fn angle(line: &Line<'_>, t: &Token<'_>) -> Result<f64, ParseError> {
    let value: f64 = t
        .text
        .parse()
        .map_err(|_| line.err(t.column, ParseErrorKind::MalformedAngle(t.text.into())))?;
    if !value.is_finite() {
        return Err(line.err(t.column, ParseErrorKind::MalformedAngle(t.text.into())));
    }
    if !angle_in_range(value) {
        return Err(line.err(t.column, ParseErrorKind::AngleOutOfRange(t.text.into())));
    }
    Ok(value)
}

fn duration(line: &Line<'_>, t: &Token<'_>) -> Result<u32, ParseError> {
    let bad = || line.err(t.column, ParseErrorKind::MalformedDuration(t.text.into()));
    let lower = t.text.to_ascii_lowercase();
    let k = lower.strip_suffix("/2j").ok_or_else(bad)?;
    if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    match k.parse::<u32>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(bad()),
    }
}

fn parse_line(mut line: Line<'_>) -> Result<Option<PulseEvent>, ParseError> {
    let Some(head) = line.tokens.next() else {
        return Ok(None);
    };
    let event = match head.text.to_ascii_lowercase().as_str() {
        "rot" => {
            let t = line.next("spin label")?;
            let target = spin(&line, &t)?;
            let t = line.next("rotation axis")?;
            let axis = axis(&line, &t)?;
            let t = line.next("rotation angle")?;
            let angle_deg = angle(&line, &t)?;
            PulseEvent::Rotation {
                target,
                axis,
                angle_deg,
            }
        }
        "jevolve" => {
            let t = line.next("duration")?;
            PulseEvent::JEvolution {
                half_periods: duration(&line, &t)?,
            }
        }
        "grad" => {
            let t = line.next("gradient axis")?;
            if !t.text.eq_ignore_ascii_case("z") {
                return Err(line.err(t.column, ParseErrorKind::GradientAxis(t.text.into())));
            }
            PulseEvent::GradientZ
        }
        "refocus" => {
            let t = line.next("spin label")?;
            PulseEvent::RefocusPiX {
                target: spin(&line, &t)?,
            }
        }
        _ => {
            return Err(line.err(
                head.column,
                ParseErrorKind::UnknownMnemonic(head.text.into()),
            ))
        }
    };
    line.finish()?;
    Ok(Some(event))
}

/// Parses a pulse file into a sequence (events in source order).
pub fn parse_sequence(text: &str) -> Result<PulseSequence, ParseError> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        let line = Line {
            number: idx + 1,
            end_column: code.trim_end().chars().count() + 1,
            tokens: tokenize(code).into_iter(),
        };
        if let Some(e) = parse_line(line)? {
            events.push(e);
        }
    }
    Ok(PulseSequence {
        name: String::new(),
        events,
    })
}
