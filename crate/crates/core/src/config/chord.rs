use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modifier {
    Alt,
    Ctrl,
    Shift,
}

impl Modifier {
    fn token(self) -> &'static str {
        match self {
            Modifier::Alt => "<alt>",
            Modifier::Ctrl => "<ctrl>",
            Modifier::Shift => "<shift>",
        }
    }
}

/// A key chord such as `<alt>+f` or `<ctrl>+<shift>+<f1>`.
///
/// Parsing is case-insensitive; the canonical text form lists modifiers in
/// sorted order followed by the key, all lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Chord {
    modifiers: BTreeSet<Modifier>,
    key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid key chord {0:?}: expected (<ctrl>|<alt>|<shift>)*+<key>")]
pub struct BadChord(pub String);

impl Chord {
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn modifiers(&self) -> impl Iterator<Item = Modifier> + '_ {
        self.modifiers.iter().copied()
    }

    pub fn has_modifiers(&self) -> bool {
        !self.modifiers.is_empty()
    }
}

impl FromStr for Chord {
    type Err = BadChord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.is_empty() {
            return Err(BadChord(s.to_string()));
        }
        // Split on '+' but keep a literal "+" key (e.g. "<ctrl>++").
        let mut parts: Vec<String> = Vec::new();
        let mut rest = lower.as_str();
        while !rest.is_empty() {
            match rest.find('+') {
                Some(0) if parts.is_empty() || rest.len() == 1 => {
                    parts.push("+".into());
                    rest = &rest[1..];
                    rest = rest.strip_prefix('+').unwrap_or(rest);
                }
                Some(i) => {
                    parts.push(rest[..i].trim().to_string());
                    rest = &rest[i + 1..];
                    if rest.is_empty() {
                        return Err(BadChord(s.to_string()));
                    }
                }
                None => {
                    parts.push(rest.trim().to_string());
                    rest = "";
                }
            }
        }
        let mut modifiers = BTreeSet::new();
        let mut key: Option<String> = None;
        for part in parts {
            let m = match part.as_str() {
                "<alt>" => Some(Modifier::Alt),
                "<ctrl>" => Some(Modifier::Ctrl),
                "<shift>" => Some(Modifier::Shift),
                _ => None,
            };
            match m {
                Some(m) => {
                    if key.is_some() {
                        return Err(BadChord(s.to_string()));
                    }
                    modifiers.insert(m);
                }
                None => {
                    let valid = !part.is_empty()
                        && (part.chars().count() == 1
                            || (part.starts_with('<') && part.ends_with('>') && part.len() > 2));
                    if !valid || key.is_some() {
                        return Err(BadChord(s.to_string()));
                    }
                    key = Some(part);
                }
            }
        }
        match key {
            Some(key) => Ok(Chord { modifiers, key }),
            None => Err(BadChord(s.to_string())),
        }
    }
}

impl TryFrom<String> for Chord {
    type Error = BadChord;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Chord> for String {
    fn from(c: Chord) -> Self {
        c.to_string()
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modifiers {
            write!(f, "{}+", m.token())?;
        }
        f.write_str(&self.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_sorts_modifiers() {
        let c: Chord = "<Shift>+<ALT>+F".parse().unwrap();
        assert_eq!(c.to_string(), "<alt>+<shift>+f");
        assert_eq!(c, "<alt>+<shift>+f".parse().unwrap());
    }

    #[test]
    fn plain_and_named_keys() {
        assert_eq!("<left>".parse::<Chord>().unwrap().key(), "<left>");
        assert_eq!("<space>".parse::<Chord>().unwrap().to_string(), "<space>");
        assert_eq!("<ctrl>++".parse::<Chord>().unwrap().key(), "+");
    }

    #[test]
    fn rejects_modifier_only_and_garbage() {
        for bad in ["", "<alt>", "<alt>+", "alt+f", "<alt>+fx", "f+<alt>"] {
            assert!(bad.parse::<Chord>().is_err(), "{bad} should not parse");
        }
    }
}
