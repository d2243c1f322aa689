//! Line-oriented text formats for instances and linear schemes.
//!
//! Instance:
//!
//! ```text
//! messages 6
//! channel_bits 1
//! user 1 demands 1 knows 3 4
//! ```
//!
//! Scheme (row bits run over the concatenated message-bit columns):
//!
//! ```text
//! channel_bits 3
//! msg_bits 1 1 1 1 1 1
//! composite 1,3,4 row 101100
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use icl_core::gf2::{BitVec, Gf2Matrix};
use icl_core::instance::{IndexCodingInstance, MessageId, MessageSet, SetDisplay, UserSpec};
use icl_core::scheme::{Composite, LinearScheme};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn directives(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(n, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        (!words.is_empty()).then_some((n + 1, words))
    })
}

fn number<T: std::str::FromStr>(line: usize, word: &str) -> Result<T, FormatError> {
    word.parse()
        .map_err(|_| err(line, format!("expected a number, found `{word}`")))
}

fn single<T: std::str::FromStr>(line: usize, words: &[&str]) -> Result<T, FormatError> {
    match words {
        [_, value] => number(line, value),
        _ => Err(err(line, format!("`{}` takes exactly one value", words[0]))),
    }
}

fn message(line: usize, word: &str) -> Result<MessageId, FormatError> {
    let id: u32 = number(line, word)?;
    if id == 0 {
        return Err(err(line, "message ids start at 1"));
    }
    Ok(MessageId(id))
}

pub fn parse_instance(text: &str) -> Result<IndexCodingInstance, FormatError> {
    let mut messages: Option<usize> = None;
    let mut channel_bits: Option<u64> = None;
    let mut users: BTreeMap<usize, UserSpec> = BTreeMap::new();
    let mut last_line = 0;
    for (line, words) in directives(text) {
        last_line = line;
        match words[0] {
            "messages" => messages = Some(single(line, &words)?),
            "channel_bits" => channel_bits = Some(single(line, &words)?),
            "user" => {
                let (j, spec) = parse_user(line, &words)?;
                if users.insert(j, spec).is_some() {
                    return Err(err(line, format!("user {j} defined twice")));
                }
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let messages = messages.ok_or_else(|| err(last_line, "missing `messages`"))?;
    let channel_bits = channel_bits.ok_or_else(|| err(last_line, "missing `channel_bits`"))?;
    if let Some((pos, (j, _))) = users
        .iter()
        .enumerate()
        .find(|(pos, (j, _))| **j != pos + 1)
    {
        return Err(err(
            last_line,
            format!(
                "users must be numbered 1..K without gaps; expected {} but found {j}",
                pos + 1
            ),
        ));
    }
    Ok(IndexCodingInstance::new(
        messages,
        users.into_values().collect(),
        channel_bits,
    ))
}

fn parse_user(line: usize, words: &[&str]) -> Result<(usize, UserSpec), FormatError> {
    let j: usize = number(line, words.get(1).copied().unwrap_or(""))?;
    if j == 0 {
        return Err(err(line, "user ids start at 1"));
    }
    if words.get(2) != Some(&"demands") {
        return Err(err(line, "expected `user <j> demands <i...> knows <i...>`"));
    }
    let rest = &words[3..];
    let split = rest
        .iter()
        .position(|w| *w == "knows")
        .ok_or_else(|| err(line, "missing `knows` (it may be followed by nothing)"))?;
    let demands = rest[..split]
        .iter()
        .map(|w| message(line, w))
        .collect::<Result<MessageSet, _>>()?;
    let knows = rest[split + 1..]
        .iter()
        .map(|w| message(line, w))
        .collect::<Result<MessageSet, _>>()?;
    Ok((j, UserSpec::new(demands, knows)))
}

pub fn write_instance(inst: &IndexCodingInstance) -> String {
    let mut out = String::new();
    writeln!(out, "messages {}", inst.num_messages()).unwrap();
    writeln!(out, "channel_bits {}", inst.channel_bits()).unwrap();
    for (j, u) in inst.users().iter().enumerate() {
        write!(out, "user {} demands", j + 1).unwrap();
        for m in &u.demands {
            write!(out, " {m}").unwrap();
        }
        out.push_str(" knows");
        for m in &u.knows {
            write!(out, " {m}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_scheme(text: &str) -> Result<LinearScheme, FormatError> {
    let mut channel_bits: Option<u64> = None;
    let mut msg_bits: Option<Vec<usize>> = None;
    // Supports in order of first appearance, with their rows.
    let mut composites: Vec<(MessageSet, Vec<BitVec>)> = Vec::new();
    let mut last_line = 0;
    for (line, words) in directives(text) {
        last_line = line;
        match words[0] {
            "channel_bits" => channel_bits = Some(single(line, &words)?),
            "msg_bits" => {
                msg_bits = Some(
                    words[1..]
                        .iter()
                        .map(|w| number(line, w))
                        .collect::<Result<_, _>>()?,
                )
            }
            "composite" => {
                let total: usize = msg_bits
                    .as_ref()
                    .ok_or_else(|| err(line, "`msg_bits` must precede composites"))?
                    .iter()
                    .sum();
                let (support, row) = parse_composite(line, &words, total)?;
                match composites.iter_mut().find(|(s, _)| *s == support) {
                    Some((_, rows)) => rows.push(row),
                    None => composites.push((support, vec![row])),
                }
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let channel_bits = channel_bits.ok_or_else(|| err(last_line, "missing `channel_bits`"))?;
    let msg_bits = msg_bits.ok_or_else(|| err(last_line, "missing `msg_bits`"))?;
    let total = msg_bits.iter().sum();
    let composites = composites
        .into_iter()
        .map(|(support, rows)| Composite {
            support,
            map: Gf2Matrix::from_rows(total, rows),
        })
        .collect();
    LinearScheme::new(msg_bits, channel_bits, composites).map_err(|e| err(last_line, e.to_string()))
}

fn parse_composite(
    line: usize,
    words: &[&str],
    total: usize,
) -> Result<(MessageSet, BitVec), FormatError> {
    let support = words
        .get(1)
        .ok_or_else(|| err(line, "missing composite support"))?
        .split(',')
        .filter(|w| !w.is_empty())
        .map(|w| message(line, w))
        .collect::<Result<MessageSet, _>>()?;
    if words.get(2) != Some(&"row") {
        return Err(err(line, "expected `composite <P> row <bits>`"));
    }
    let bits: String = words[3..].concat();
    let row = BitVec::parse(&bits).ok_or_else(|| err(line, "row bits must be 0 or 1"))?;
    if row.len() != total {
        return Err(err(
            line,
            format!("row has {} bits, expected {total}", row.len()),
        ));
    }
    Ok((support, row))
}

pub fn write_scheme(scheme: &LinearScheme) -> String {
    let mut out = String::new();
    writeln!(out, "channel_bits {}", scheme.channel_bits()).unwrap();
    out.push_str("msg_bits");
    for l in scheme.msg_bits() {
        write!(out, " {l}").unwrap();
    }
    out.push('\n');
    for c in scheme.composites() {
        let support = SetDisplay(&c.support).to_string();
        let support = support.trim_matches(|ch| ch == '{' || ch == '}');
        for row in c.map.rows() {
            writeln!(out, "composite {support} row {row}").unwrap();
        }
    }
    out
}
