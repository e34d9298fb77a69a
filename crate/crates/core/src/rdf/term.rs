use std::fmt;

use super::vocab::{rdf, xsd};
use super::RdfError;

/// An absolute IRI.
///
/// Construction rejects empty strings, whitespace, characters that cannot
/// appear inside an `<...>` IRIREF, and strings without a scheme separator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if is_valid_iri(&value) {
            Ok(Iri(value))
        } else {
            Err(RdfError::InvalidIri(value))
        }
    }

    /// For compile-time constants known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(is_valid_iri(value), "invalid static IRI {value}");
        Iri(value.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The fragment after the last `#`, or else the segment after the last `/`.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        if let Some(idx) = s.rfind('#') {
            return &s[idx + 1..];
        }
        match s.rfind('/') {
            Some(idx) => &s[idx + 1..],
            None => s.rsplit(':').next().unwrap_or(s),
        }
    }
}

impl serde::Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Iri::new(s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_valid_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    colon > 0
        && !s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        let valid = !label.is_empty()
            && !label.ends_with('.')
            && label
                .chars()
                .enumerate()
                .all(|(i, c)| c.is_alphanumeric() || c == '_' || (i > 0 && (c == '-' || c == '.')));
        if valid {
            Ok(BlankNode(label))
        } else {
            Err(RdfError::InvalidBlankNode(label))
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(xsd::STRING),
            language: None,
        }
    }

    /// A typed literal; numeric and boolean lexicals are checked against
    /// their datatype's grammar.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, RdfError> {
        let lexical = lexical.into();
        if datatype.as_str() == rdf::LANG_STRING {
            return Err(RdfError::InvalidLiteral {
                lexical,
                datatype: datatype.as_str().to_string(),
            });
        }
        if !lexical_matches(&lexical, datatype.as_str()) {
            return Err(RdfError::InvalidLiteral {
                lexical,
                datatype: datatype.as_str().to_string(),
            });
        }
        Ok(Literal {
            lexical,
            datatype,
            language: None,
        })
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, RdfError> {
        let tag = tag.into();
        let valid = tag.split('-').enumerate().all(|(i, part)| {
            !part.is_empty()
                && if i == 0 {
                    part.chars().all(|c| c.is_ascii_alphabetic())
                } else {
                    part.chars().all(|c| c.is_ascii_alphanumeric())
                }
        });
        if !valid {
            return Err(RdfError::InvalidLanguageTag(tag));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(rdf::LANG_STRING),
            language: Some(tag),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// True for `xsd:string` and language-tagged strings.
    pub fn is_string_like(&self) -> bool {
        matches!(self.datatype.as_str(), xsd::STRING | rdf::LANG_STRING)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_string(&self.lexical))?;
        match &self.language {
            Some(tag) => write!(f, "@{tag}"),
            None if self.datatype.as_str() == xsd::STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Checks a lexical form against the canonical grammar of numeric and
/// boolean XSD datatypes. Other datatypes accept any lexical.
pub fn lexical_matches(lexical: &str, datatype: &str) -> bool {
    match datatype {
        xsd::BOOLEAN => matches!(lexical, "true" | "false" | "1" | "0"),
        xsd::DECIMAL => is_decimal(lexical),
        xsd::DOUBLE | xsd::FLOAT => is_double(lexical),
        d if xsd::INTEGER_TYPES.contains(&d) => is_integer(lexical),
        _ => true,
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

pub(crate) fn is_integer(s: &str) -> bool {
    all_digits(strip_sign(s))
}

pub(crate) fn is_decimal(s: &str) -> bool {
    let body = strip_sign(s);
    match body.split_once('.') {
        None => all_digits(body),
        Some((int, frac)) => {
            (int.is_empty() || all_digits(int))
                && (frac.is_empty() || all_digits(frac))
                && !(int.is_empty() && frac.is_empty())
        }
    }
}

pub(crate) fn is_double(s: &str) -> bool {
    if matches!(s, "INF" | "+INF" | "-INF" | "NaN") {
        return true;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(idx) => (&s[..idx], Some(&s[idx + 1..])),
        None => (s, None),
    };
    is_decimal(mantissa) && exponent.is_none_or(is_integer)
}

/// Any node that can appear in a triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// N-Triples style string form, used as the canonical sort key.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl Triple {
    /// Fails if the subject is a literal.
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Result<Self, RdfError> {
        let subject = subject.into();
        if subject.is_literal() {
            return Err(RdfError::LiteralSubject(subject.to_string()));
        }
        Ok(Triple {
            subject,
            predicate,
            object: object.into(),
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme_and_no_whitespace() {
        assert!(Iri::new("http://ex.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("no-scheme").is_err());
        assert!(Iri::new("http://ex.org/a b").is_err());
        assert!(Iri::new(":x").is_err());
        assert!(Iri::new("http://ex.org/<a>").is_err());
    }

    #[test]
    fn local_names() {
        assert_eq!(Iri::new("http://ex.org/ns#Step").unwrap().local_name(), "Step");
        assert_eq!(Iri::new("http://ex.org/kg/Step_1").unwrap().local_name(), "Step_1");
        assert_eq!(Iri::new("urn:isbn").unwrap().local_name(), "isbn");
    }

    #[test]
    fn numeric_grammars() {
        for ok in ["1", "+1", "-0", "007"] {
            assert!(is_integer(ok), "{ok}");
        }
        for bad in ["", "1.0", "one", "+", "1e3"] {
            assert!(!is_integer(bad), "{bad}");
        }
        for ok in ["1", "1.", ".5", "-1.25"] {
            assert!(is_decimal(ok), "{ok}");
        }
        for bad in [".", "1e3", "abc"] {
            assert!(!is_decimal(bad), "{bad}");
        }
        for ok in ["1", "1.5E3", "-.5e-2", "INF", "NaN", "120"] {
            assert!(is_double(ok), "{ok}");
        }
        for bad in ["high", "1e", "e3", "1.5E3.0"] {
            assert!(!is_double(bad), "{bad}");
        }
    }

    #[test]
    fn typed_literal_rejects_bad_lexical() {
        let int = Iri::new(xsd::INTEGER).unwrap();
        assert!(Literal::typed("12", int.clone()).is_ok());
        assert!(Literal::typed("one", int).is_err());
        let b = Iri::new(xsd::BOOLEAN).unwrap();
        assert!(Literal::typed("yes", b).is_err());
    }

    #[test]
    fn literal_subject_rejected() {
        let p = Iri::new("http://ex.org/p").unwrap();
        assert!(Triple::new(Literal::string("x"), p.clone(), Literal::string("y")).is_err());
    }

    #[test]
    fn display_escapes() {
        let l = Literal::string("a \"b\"\n");
        assert_eq!(l.to_string(), "\"a \\\"b\\\"\\n\"");
        let l = Literal::lang("chat", "fr").unwrap();
        assert_eq!(l.to_string(), "\"chat\"@fr");
    }
}
