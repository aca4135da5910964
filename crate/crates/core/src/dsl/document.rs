use std::fmt;

use super::{DslError, ErrorKind, Pos};

/// `key = value` with optional trailing flags (`key = "expr" low`).
#[derive(Clone, Debug)]
pub struct Entry {
    pub key: String,
    pub key_pos: Pos,
    pub value: String,
    /// Position of the first character of the value (inside quotes).
    pub value_pos: Pos,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Section {
    pub name: String,
    pub pos: Pos,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(src: &str) -> Result<Self, DslError> {
        let mut doc = Document::default();
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let chars: Vec<char> = raw.chars().collect();
            let content = strip_comment(&chars);
            let first = content.iter().position(|c| !c.is_whitespace());
            let Some(first) = first else { continue };
            let pos = Pos { line, col: first + 1 };
            let text: String = content[first..].iter().collect();
            let text = text.trim_end();
            if text.starts_with('[') {
                let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) else {
                    return Err(DslError::new(ErrorKind::Syntax, pos, "unterminated section header"));
                };
                let name = name.trim();
                if name.is_empty() {
                    return Err(DslError::new(ErrorKind::Syntax, pos, "empty section name"));
                }
                doc.sections.push(Section {
                    name: name.to_string(),
                    pos,
                    entries: Vec::new(),
                });
                continue;
            }
            let Some(section) = doc.sections.last_mut() else {
                return Err(DslError::new(ErrorKind::Syntax, pos, "entry before any section header"));
            };
            section.entries.push(entry(&content, first, line)?);
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

/// Positions are ignored.
impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.value == other.value && self.flags == other.flags
    }
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.entries == other.entries
    }
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = \"{}\"", self.key, self.value)?;
        for flag in &self.flags {
            write!(f, " {flag}")?;
        }
        Ok(())
    }
}

/// Canonical text: quoted values, one blank line between sections, no comments.
impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{}]", s.name)?;
            for e in &s.entries {
                writeln!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

fn strip_comment(chars: &[char]) -> Vec<char> {
    let mut quoted = false;
    for (i, c) in chars.iter().enumerate() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return chars[..i].to_vec(),
            _ => {}
        }
    }
    chars.to_vec()
}

fn entry(chars: &[char], start: usize, line: usize) -> Result<Entry, DslError> {
    let at = |i: usize| Pos { line, col: i + 1 };
    let Some(eq) = chars.iter().position(|c| *c == '=') else {
        return Err(DslError::new(ErrorKind::Syntax, at(start), "expected `key = value`"));
    };
    let key: String = chars[start..eq].iter().collect::<String>().trim().to_string();
    if key.is_empty() || !key.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '^') {
        return Err(DslError::new(ErrorKind::Syntax, at(start), format!("invalid key `{key}`")));
    }
    let mut i = eq + 1;
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    if i == chars.len() {
        return Err(DslError::new(ErrorKind::Syntax, at(i), "missing value"));
    }
    let (value, value_pos, rest) = if chars[i] == '"' {
        let Some(close) = chars[i + 1..].iter().position(|c| *c == '"') else {
            return Err(DslError::new(ErrorKind::Syntax, at(i), "unterminated string"));
        };
        let end = i + 1 + close;
        (chars[i + 1..end].iter().collect::<String>(), at(i + 1), end + 1)
    } else {
        (chars[i..].iter().collect::<String>().trim_end().to_string(), at(i), chars.len())
    };
    let flags = chars[rest.min(chars.len())..]
        .iter()
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect();
    Ok(Entry {
        key,
        key_pos: at(start),
        value,
        value_pos,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_entries_flags() {
        let src = "# header\n[surface]\norder = 2  # comment\n\n[metric]\n  g11 = \"f # not a comment\" low\n";
        let doc = Document::parse(src).unwrap();
        assert_eq!(doc.sections.len(), 2);
        let e = &doc.section("metric").unwrap().entries[0];
        assert_eq!(e.key, "g11");
        assert_eq!(e.value, "f # not a comment");
        assert_eq!(e.value_pos, Pos { line: 6, col: 10 });
        assert_eq!(e.flags, vec!["low"]);
        assert_eq!(doc.section("surface").unwrap().entries[0].value, "2");
    }

    #[test]
    fn display_round_trips() {
        let src = "[a]\nk = 1 # c\nm = \"x * y\" low\n\n\n[b]\n";
        let doc = Document::parse(src).unwrap();
        let text = doc.to_string();
        assert_eq!(text, "[a]\nk = \"1\"\nm = \"x * y\" low\n\n[b]\n");
        assert_eq!(Document::parse(&text).unwrap(), doc);
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(Document::parse("x = 1").unwrap_err().pos.line, 1);
        assert_eq!(Document::parse("[a]\nnovalue").unwrap_err().pos, Pos { line: 2, col: 1 });
        assert!(Document::parse("[a]\nk = \"open").is_err());
        assert!(Document::parse("[a\n").is_err());
    }
}
