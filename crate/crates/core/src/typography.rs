//! Typographic normalization: ligatures, small capitals and Unicode spaces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Unicode space separators other than U+0020.
pub const UNICODE_SPACES: [char; 17] = [
    '\u{00A0}', '\u{1680}', '\u{2000}', '\u{2001}', '\u{2002}', '\u{2003}', '\u{2004}',
    '\u{2005}', '\u{2006}', '\u{2007}', '\u{2008}', '\u{2009}', '\u{200A}', '\u{202F}',
    '\u{205F}', '\u{3000}', '\u{180E}',
];

pub fn is_unicode_space(c: char) -> bool {
    UNICODE_SPACES.contains(&c)
}

/// How many ASCII spaces each Unicode space becomes. Unlisted separators
/// count as one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthTable(BTreeMap<char, usize>);

impl Default for WidthTable {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        for c in UNICODE_SPACES {
            map.insert(c, 1);
        }
        // em quad, em space, ideographic space
        map.insert('\u{2001}', 2);
        map.insert('\u{2003}', 2);
        map.insert('\u{3000}', 2);
        // Mongolian vowel separator is no longer a space
        map.insert('\u{180E}', 0);
        WidthTable(map)
    }
}

impl WidthTable {
    pub fn width(&self, c: char) -> usize {
        self.0.get(&c).copied().unwrap_or(1)
    }

    pub fn set(&mut self, c: char, width: usize) {
        self.0.insert(c, width);
    }

    pub fn entries(&self) -> impl Iterator<Item = (char, usize)> + '_ {
        self.0.iter().map(|(&c, &w)| (c, w))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("bad width table key {0:?}: expected U+XXXX or a single character")]
pub struct WidthKeyError(String);

fn parse_key(key: &str) -> Result<char, WidthKeyError> {
    let hex = key.strip_prefix("U+").or_else(|| key.strip_prefix("u+"));
    if let Some(hex) = hex {
        return u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| WidthKeyError(key.to_string()));
    }
    let mut it = key.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(WidthKeyError(key.to_string())),
    }
}

impl Serialize for WidthTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, usize> = self
            .0
            .iter()
            .map(|(c, w)| (format!("U+{:04X}", *c as u32), *w))
            .collect();
        map.serialize(s)
    }
}

/// Entries given in config override the defaults; the rest keep theirs.
impl<'de> Deserialize<'de> for WidthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, usize>::deserialize(d)?;
        let mut table = WidthTable::default();
        for (k, w) in raw {
            let c = parse_key(&k).map_err(serde::de::Error::custom)?;
            table.set(c, w);
        }
        Ok(table)
    }
}

impl fmt::Display for WidthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(c, w)| format!("U+{:04X}={}", *c as u32, w)).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn ligature(c: char) -> Option<&'static str> {
    Some(match c {
        '\u{FB00}' => "ff",
        '\u{FB01}' => "fi",
        '\u{FB02}' => "fl",
        '\u{FB03}' => "ffi",
        '\u{FB04}' => "ffl",
        '\u{FB05}' | '\u{FB06}' => "st",
        '\u{0132}' => "IJ",
        '\u{0133}' => "ij",
        _ => return None,
    })
}

pub fn small_capital(c: char) -> Option<char> {
    Some(match c {
        'ᴀ' => 'a',
        'ʙ' => 'b',
        'ᴄ' => 'c',
        'ᴅ' => 'd',
        'ᴇ' => 'e',
        'ꜰ' => 'f',
        'ɢ' => 'g',
        'ʜ' => 'h',
        'ɪ' => 'i',
        'ᴊ' => 'j',
        'ᴋ' => 'k',
        'ʟ' => 'l',
        'ᴍ' => 'm',
        'ɴ' => 'n',
        'ᴏ' => 'o',
        'ᴘ' => 'p',
        'ꞯ' => 'q',
        'ʀ' => 'r',
        'ꜱ' => 's',
        'ᴛ' => 't',
        'ᴜ' => 'u',
        'ᴠ' => 'v',
        'ᴡ' => 'w',
        'ʏ' => 'y',
        'ᴢ' => 'z',
        _ => return None,
    })
}

/// Expands ligatures, folds small capitals to lowercase and replaces Unicode
/// spaces with ASCII spaces per `table`. Everything else passes through.
pub fn normalize_typography(text: &str, table: &WidthTable) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        push_normalized(c, table, &mut out);
    }
    out
}

pub(crate) fn push_normalized(c: char, table: &WidthTable, out: &mut String) {
    if let Some(s) = ligature(c) {
        out.push_str(s);
    } else if let Some(l) = small_capital(c) {
        out.push(l);
    } else if is_unicode_space(c) {
        out.extend(std::iter::repeat_n(' ', table.width(c)));
    } else {
        out.push(c);
    }
}

/// Whitespace canonicalization applied to corpus bodies: CRLF and lone CR
/// become LF, tabs expand to `tab_width` spaces and Unicode spaces become
/// ASCII spaces. Ligatures and letters are left alone.
pub fn canonicalize_whitespace(text: &str, table: &WidthTable, tab_width: usize) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\r' => {
                if chars.peek() == Some(&'\n') {
                    chars.next();
                }
                out.push('\n');
            }
            '\t' => out.extend(std::iter::repeat_n(' ', tab_width)),
            c if is_unicode_space(c) => out.extend(std::iter::repeat_n(' ', table.width(c))),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ligatures_expand() {
        let t = WidthTable::default();
        assert_eq!(normalize_typography("\u{FB01}ne \u{FB04}", &t), "fine ffl");
        assert_eq!(normalize_typography("\u{0133}s", &t), "ijs");
    }

    #[test]
    fn small_caps_fold() {
        let t = WidthTable::default();
        assert_eq!(normalize_typography("ᴛʜᴇ END", &t), "the END");
    }

    #[test]
    fn em_space_is_two() {
        let t = WidthTable::default();
        assert_eq!(normalize_typography("a\u{2003}b\u{00A0}c", &t), "a  b c");
    }

    #[test]
    fn canonicalize_line_endings_and_tabs() {
        let t = WidthTable::default();
        assert_eq!(canonicalize_whitespace("a\r\nb\rc\td", &t, 4), "a\nb\nc    d");
        assert_eq!(canonicalize_whitespace("\u{FB01}", &t, 4), "\u{FB01}");
    }

    #[test]
    fn width_table_round_trips_through_serde() {
        let mut t = WidthTable::default();
        t.set('\u{2002}', 3);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"U+2002\":3"));
        let back: WidthTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let partial: WidthTable = serde_json::from_str(r#"{"U+00A0": 4}"#).unwrap();
        assert_eq!(partial.width('\u{00A0}'), 4);
        assert_eq!(partial.width('\u{2003}'), 2);
        assert!(serde_json::from_str::<WidthTable>(r#"{"nope": 1}"#).is_err());
    }
}
