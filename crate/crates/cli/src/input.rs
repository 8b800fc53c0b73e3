//! String sources: an inline argument, `@path`, or `-` for stdin.

use std::fs;
use std::io::{self, BufRead, Read};

use anyhow::{bail, Context, Result};
use uoppm::{parse_string, IndetString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Inline(String),
    File(String),
    Stdin,
}

impl Source {
    pub fn new(arg: &str) -> Source {
        if arg == "-" {
            Source::Stdin
        } else if let Some(path) = arg.strip_prefix('@') {
            Source::File(path.to_string())
        } else {
            Source::Inline(arg.to_string())
        }
    }

    pub fn read_raw(&self) -> Result<String> {
        match self {
            Source::Inline(s) => Ok(s.clone()),
            Source::File(path) => {
                fs::read_to_string(path).with_context(|| format!("reading {path}"))
            }
            Source::Stdin => {
                let mut s = String::new();
                io::stdin()
                    .read_to_string(&mut s)
                    .context("reading stdin")?;
                Ok(s)
            }
        }
    }

    pub fn read_string(&self) -> Result<IndetString> {
        let raw = self.read_raw()?;
        let body = strip_comments(&raw);
        parse_string(&body).with_context(|| format!("parsing {}", self.describe()))
    }

    pub fn describe(&self) -> String {
        match self {
            Source::Inline(_) => "inline string".into(),
            Source::File(path) => path.clone(),
            Source::Stdin => "stdin".into(),
        }
    }
}

/// Drops `#` lines; the remaining lines form one string.
pub fn strip_comments(raw: &str) -> String {
    raw.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Reads both strings, refusing to take them both from stdin.
pub fn read_pair(pattern: &str, text: &str) -> Result<(IndetString, IndetString)> {
    let (p, t) = (Source::new(pattern), Source::new(text));
    if p == Source::Stdin && t == Source::Stdin {
        bail!("pattern and text cannot both come from stdin");
    }
    Ok((p.read_string()?, t.read_string()?))
}

/// Calls `f` for each string line of `reader`, skipping comments and blanks.
pub fn for_each_line(
    reader: impl BufRead,
    mut f: impl FnMut(IndetString) -> Result<()>,
) -> Result<()> {
    for (n, line) in reader.lines().enumerate() {
        let line = line.context("reading stdin")?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let s = parse_string(trimmed).with_context(|| format!("stdin line {}", n + 1))?;
        f(s)?;
    }
    Ok(())
}
