//! Sectioned `key = value` run files.
//!
//! ```text
//! # comment
//! [grid]
//! d = 2
//! lx = 16.0
//! [u0]
//! kind = "gaussian"
//! center = [0.0, 3.0]
//! ```
//!
//! Values are numbers, booleans, strings (quoted, or bare words) and lists in
//! brackets. Every value remembers where it was written so that type errors
//! point back into the file.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::List(_) => "list",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: BTreeMap<String, Entry>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub sections: BTreeMap<String, Section>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

struct ValueParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl ValueParser<'_> {
    fn col(&self) -> usize {
        self.col0 + self.pos
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] == b' ' || self.src[self.pos] == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.peek() {
            None => Err(perr(self.line, self.col(), "expected a value")),
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(perr(self.line, self.col(), "expected ',' or ']' in list")),
                    }
                }
            }
            Some(b'"') => {
                let start = self.pos;
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.peek() {
                        None => return Err(perr(self.line, self.col0 + start, "unterminated string")),
                        Some(b'"') => {
                            self.pos += 1;
                            return Ok(Value::Str(s));
                        }
                        Some(b'\\') if self.src.get(self.pos + 1).is_some() => {
                            s.push(self.src[self.pos + 1] as char);
                            self.pos += 2;
                        }
                        Some(_) => {
                            // copy one UTF-8 scalar
                            let rest = std::str::from_utf8(&self.src[self.pos..]).map_err(|_| perr(self.line, self.col(), "invalid UTF-8"))?;
                            let c = rest.chars().next().unwrap();
                            s.push(c);
                            self.pos += c.len_utf8();
                        }
                    }
                }
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c == b',' || c == b']' || c == b' ' || c == b'\t' {
                        break;
                    }
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| perr(self.line, self.col0 + start, "invalid UTF-8"))?;
                Ok(match word {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    "inf" => Value::Num(f64::INFINITY),
                    _ => match word.parse::<f64>() {
                        Ok(v) => Value::Num(v),
                        Err(_) if word.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') => {
                            return Err(perr(self.line, self.col0 + start, format!("malformed number '{word}'")));
                        }
                        Err(_) => Value::Str(word.to_string()),
                    },
                })
            }
        }
    }
}

/// Strip a `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut prev = '\0';
    for (i, c) in line.char_indices() {
        match c {
            '"' if prev != '\\' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
        prev = c;
    }
    line
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = strip_comment(raw);
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = body.len() - body.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| perr(line, indent + trimmed.len() + 1, "expected ']' closing the section name"))?.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.') {
                    return Err(perr(line, indent + 2, format!("invalid section name '{name}'")));
                }
                if cfg.sections.contains_key(name) {
                    return Err(perr(line, indent + 1, format!("section [{name}] appears twice")));
                }
                cfg.sections.insert(name.to_string(), Section { name: name.to_string(), line, entries: BTreeMap::new() });
                current = Some(name.to_string());
                continue;
            }
            let eq = body.find('=').ok_or_else(|| perr(line, indent + 1, "expected 'key = value'"))?;
            let key = body[..eq].trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(perr(line, indent + 1, format!("invalid key '{key}'")));
            }
            let section = current.as_ref().ok_or_else(|| perr(line, indent + 1, "key outside of any section"))?;
            let vsrc = &body[eq + 1..];
            let mut p = ValueParser { src: vsrc.as_bytes(), pos: 0, line, col0: eq + 2 };
            p.skip_ws();
            let vcol = p.col();
            let value = p.value()?;
            p.skip_ws();
            if p.pos != vsrc.len() {
                return Err(perr(line, p.col(), "unexpected trailing input"));
            }
            let sec = cfg.sections.get_mut(section).unwrap();
            if sec.entries.contains_key(key) {
                return Err(perr(line, indent + 1, format!("key '{key}' set twice in [{section}]")));
            }
            sec.entries.insert(key.to_string(), Entry { value, line, col: vcol });
        }
        Ok(cfg)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }

    pub fn require(&self, name: &str) -> Result<&Section> {
        self.section(name).ok_or_else(|| perr(0, 0, format!("missing section [{name}]")))
    }
}

impl Section {
    fn missing(&self, key: &str) -> Error {
        perr(self.line, 1, format!("[{}] needs '{key}'", self.name))
    }

    fn wrong(e: &Entry, want: &str) -> Error {
        perr(e.line, e.col, format!("expected {want}, found {}", e.value.type_name()))
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Entry { value: Value::Num(v), .. }) => Ok(Some(*v)),
            Some(e) => Err(Self::wrong(e, "a number")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e @ Entry { value: Value::Num(v), .. }) => {
                if *v >= 0.0 && v.fract() == 0.0 && *v < 1e15 {
                    Ok(Some(*v as usize))
                } else {
                    Err(perr(e.line, e.col, format!("expected a non-negative integer, found {v}")))
                }
            }
            Some(e) => Err(Self::wrong(e, "an integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.opt_usize(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.opt_usize(key)?.unwrap_or(default))
    }

    pub fn opt_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Entry { value: Value::Bool(b), .. }) => Ok(Some(*b)),
            Some(e) => Err(Self::wrong(e, "true or false")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self.opt_bool(key)?.unwrap_or(default))
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<&str>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Entry { value: Value::Str(s), .. }) => Ok(Some(s)),
            Some(e) => Err(Self::wrong(e, "a string")),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.opt_str(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str> {
        Ok(self.opt_str(key)?.unwrap_or(default))
    }

    /// A number or a list of numbers.
    pub fn opt_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Entry { value: Value::Num(v), .. }) => Ok(Some(vec![*v])),
            Some(e @ Entry { value: Value::List(items), .. }) => items
                .iter()
                .map(|v| match v {
                    Value::Num(x) => Ok(*x),
                    other => Err(perr(e.line, e.col, format!("expected a list of numbers, found a {} item", other.type_name()))),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(e) => Err(Self::wrong(e, "a list of numbers")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.opt_f64_list(key)?.ok_or_else(|| self.missing(key))
    }

    /// An error located at `key`, or at the section header when the key is absent.
    pub fn error_at(&self, key: &str, msg: impl Into<String>) -> Error {
        match self.entries.get(key) {
            Some(e) => perr(e.line, e.col, msg),
            None => perr(self.line, 1, msg),
        }
    }

    /// Reject keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        for (k, e) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(perr(e.line, 1, format!("unknown key '{k}' in [{}]", self.name)));
            }
        }
        Ok(())
    }
}
