//! SWML reading and canonical writing.
//!
//! The canonical form is UTF-8 with an XML declaration, two-space
//! indentation, a fixed attribute order, placements in draw order and a
//! trailing newline. Writing the same document twice yields the same bytes.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::model::{Column, DocumentMeta, GlyphPlacement, Sign, SignDocument, SignSource, SIGN_SPACE};
use super::SwmlError;
use crate::iswa::GlyphId;

pub const SWML_VERSION: &str = "1.0";

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

#[derive(Debug)]
enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, SwmlError> {
        self.attr(key).ok_or_else(|| {
            SwmlError::SchemaViolation(format!("<{}> lacks required attribute {key:?}", self.name))
        })
    }

    fn only_attrs(&self, allowed: &[&str]) -> Result<(), SwmlError> {
        match self.attrs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(SwmlError::SchemaViolation(format!(
                "<{}> has unexpected attribute {k:?}",
                self.name
            ))),
            None => Ok(()),
        }
    }

    /// Child elements, rejecting non-whitespace text.
    fn elements(&self) -> Result<Vec<&Element>, SwmlError> {
        let mut out = Vec::new();
        for child in &self.children {
            match child {
                Node::Element(e) => out.push(e),
                Node::Text(t) if t.trim().is_empty() => {}
                Node::Text(t) => {
                    return Err(SwmlError::SchemaViolation(format!(
                        "unexpected text {t:?} inside <{}>",
                        self.name
                    )))
                }
            }
        }
        Ok(out)
    }

    fn text(&self) -> Result<String, SwmlError> {
        let mut s = String::new();
        for child in &self.children {
            match child {
                Node::Text(t) => s.push_str(t),
                Node::Element(e) => {
                    return Err(SwmlError::SchemaViolation(format!(
                        "<{}> may only hold text, found <{}>",
                        self.name, e.name
                    )))
                }
            }
        }
        Ok(s)
    }
}

fn malformed(e: impl std::fmt::Display) -> SwmlError {
    SwmlError::MalformedDocument(e.to_string())
}

fn open_element(start: &BytesStart<'_>, reader: &Reader<&[u8]>) -> Result<Element, SwmlError> {
    let name = std::str::from_utf8(start.name().as_ref()).map_err(malformed)?.to_string();
    let mut attrs = Vec::new();
    for attr in start.attributes().with_checks(true) {
        let attr = attr.map_err(malformed)?;
        let key = std::str::from_utf8(attr.key.as_ref()).map_err(malformed)?.to_string();
        let value = attr
            .decode_and_unescape_value(reader.decoder())
            .map_err(malformed)?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

fn parse_tree(bytes: &[u8]) -> Result<Element, SwmlError> {
    let text = std::str::from_utf8(bytes).map_err(|e| malformed(format!("not UTF-8: {e}")))?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let attach = |stack: &mut Vec<Element>, root: &mut Option<Element>, el: Element| {
        match stack.last_mut() {
            Some(parent) => {
                parent.children.push(Node::Element(el));
                Ok(())
            }
            None if root.is_none() => {
                *root = Some(el);
                Ok(())
            }
            None => Err(malformed("more than one root element")),
        }
    };

    loop {
        match reader.read_event().map_err(malformed)? {
            Event::Start(start) => {
                if stack.is_empty() && root.is_some() {
                    return Err(malformed("more than one root element"));
                }
                stack.push(open_element(&start, &reader)?);
            }
            Event::Empty(start) => {
                let el = open_element(&start, &reader)?;
                attach(&mut stack, &mut root, el)?;
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| malformed("unbalanced end tag"))?;
                attach(&mut stack, &mut root, el)?;
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(malformed)?.into_owned();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(s)),
                    None if s.trim().is_empty() => {}
                    None => return Err(malformed("text outside the root element")),
                }
            }
            Event::CData(c) => {
                let s = std::str::from_utf8(&c).map_err(malformed)?.to_string();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(s)),
                    None => return Err(malformed("CDATA outside the root element")),
                }
            }
            Event::Decl(decl) => {
                if let Some(enc) = decl.encoding() {
                    let enc = enc.map_err(malformed)?;
                    if !enc.eq_ignore_ascii_case(b"utf-8") {
                        return Err(malformed("only UTF-8 encoding is supported"));
                    }
                }
            }
            Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(malformed("unexpected end of input inside an element"));
    }
    root.ok_or_else(|| malformed("no root element"))
}

fn parse_u32_attr(el: &Element, key: &str, default: Option<u32>) -> Result<u32, SwmlError> {
    let raw = match (el.attr(key), default) {
        (Some(v), _) => v,
        (None, Some(d)) => return Ok(d),
        (None, None) => return el.required(key).map(|_| 0),
    };
    let bad = || SwmlError::BadCoordinate {
        attribute: key.to_string(),
        value: raw.to_string(),
    };
    if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    raw.parse().map_err(|_| bad())
}

fn parse_glyph(el: &Element) -> Result<GlyphPlacement, SwmlError> {
    el.only_attrs(&["code", "x", "y", "z"])?;
    if !el.elements()?.is_empty() {
        return Err(SwmlError::SchemaViolation("<glyph> must be empty".into()));
    }
    let code = el.required("code")?;
    let glyph = GlyphId::parse(code).map_err(|source| SwmlError::BadCode {
        code: code.to_string(),
        source,
    })?;
    let x = parse_u32_attr(el, "x", None)?;
    let y = parse_u32_attr(el, "y", None)?;
    for (key, v) in [("x", x), ("y", y)] {
        if v >= SIGN_SPACE {
            return Err(SwmlError::BadCoordinate {
                attribute: key.into(),
                value: v.to_string(),
            });
        }
    }
    let z = parse_u32_attr(el, "z", Some(0))?;
    Ok(GlyphPlacement { glyph, x, y, z })
}

fn parse_sign(el: &Element) -> Result<Sign, SwmlError> {
    el.only_attrs(&["id", "source"])?;
    let sign_id = el.required("id")?.to_string();
    if sign_id.is_empty() {
        return Err(SwmlError::SchemaViolation("empty sign id".into()));
    }
    let source = match el.attr("source") {
        Some(s) => s.parse().map_err(SwmlError::SchemaViolation)?,
        None => SignSource::Editor,
    };
    let mut gloss_labels = Vec::new();
    let mut placements = Vec::new();
    for child in el.elements()? {
        match child.name.as_str() {
            "gloss" if placements.is_empty() => {
                child.only_attrs(&[])?;
                gloss_labels.push(child.text()?);
            }
            "glyph" => placements.push(parse_glyph(child)?),
            other => {
                return Err(SwmlError::SchemaViolation(format!(
                    "unexpected <{other}> in <sign>"
                )))
            }
        }
    }
    if placements.is_empty() {
        return Err(SwmlError::SchemaViolation(format!("sign {sign_id:?} has no <glyph>")));
    }
    Ok(Sign {
        sign_id,
        placements,
        gloss_labels,
        source,
    })
}

fn parse_meta(el: &Element) -> Result<DocumentMeta, SwmlError> {
    el.only_attrs(&["title", "lang", "author", "created", "modified"])?;
    if !el.elements()?.is_empty() {
        return Err(SwmlError::SchemaViolation("<doc-meta> must be empty".into()));
    }
    let get = |k| el.attr(k).map(String::from);
    Ok(DocumentMeta {
        title: get("title"),
        language: get("lang"),
        author: get("author"),
        created: get("created"),
        modified: get("modified"),
    })
}

/// Reads an SWML document. Codes are checked for syntax only; whether they
/// exist in a catalog is left to the caller.
pub fn parse_swml(bytes: &[u8]) -> Result<SignDocument, SwmlError> {
    let root = parse_tree(bytes)?;
    if root.name != "swml" {
        return Err(SwmlError::SchemaViolation(format!(
            "root element must be <swml>, found <{}>",
            root.name
        )));
    }
    root.only_attrs(&["version"])?;
    let version = root.required("version")?;
    if version != SWML_VERSION {
        return Err(SwmlError::SchemaViolation(format!(
            "unsupported SWML version {version:?}"
        )));
    }
    let children = root.elements()?;
    let (meta_el, rest) = children
        .split_first()
        .filter(|(first, _)| first.name == "doc-meta")
        .ok_or_else(|| SwmlError::SchemaViolation("<doc-meta> must come first".into()))?;
    let meta = parse_meta(meta_el)?;
    let mut columns = Vec::new();
    for el in rest {
        if el.name != "column" {
            return Err(SwmlError::SchemaViolation(format!(
                "unexpected <{}> in <swml>",
                el.name
            )));
        }
        el.only_attrs(&[])?;
        let mut signs = Vec::new();
        for s in el.elements()? {
            if s.name != "sign" {
                return Err(SwmlError::SchemaViolation(format!(
                    "unexpected <{}> in <column>",
                    s.name
                )));
            }
            signs.push(parse_sign(s)?);
        }
        if signs.is_empty() {
            return Err(SwmlError::SchemaViolation("<column> without <sign>".into()));
        }
        columns.push(Column { signs });
    }
    let doc = SignDocument { meta, columns };
    // duplicate ids and the like
    doc.check().map_err(|e| match e {
        SwmlError::InvariantViolation(m) => SwmlError::SchemaViolation(m),
        other => other,
    })?;
    Ok(doc)
}

fn escape_attr(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

fn escape_text(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

/// Writes the canonical byte form.
pub fn serialize_swml(doc: &SignDocument) -> Result<Vec<u8>, SwmlError> {
    doc.check()?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<swml version=\"{SWML_VERSION}\">");
    out.push_str("  <doc-meta");
    let m = &doc.meta;
    for (key, value) in [
        ("title", &m.title),
        ("lang", &m.language),
        ("author", &m.author),
        ("created", &m.created),
        ("modified", &m.modified),
    ] {
        if let Some(v) = value {
            let _ = write!(out, " {key}=\"");
            escape_attr(&mut out, v);
            out.push('"');
        }
    }
    out.push_str("/>\n");
    for column in &doc.columns {
        out.push_str("  <column>\n");
        for sign in &column.signs {
            out.push_str("    <sign id=\"");
            escape_attr(&mut out, &sign.sign_id);
            let _ = writeln!(out, "\" source=\"{}\">", sign.source);
            for gloss in &sign.gloss_labels {
                out.push_str("      <gloss>");
                escape_text(&mut out, gloss);
                out.push_str("</gloss>\n");
            }
            let mut placements = sign.placements.clone();
            placements.sort_by_key(GlyphPlacement::draw_key);
            for p in placements {
                let _ = writeln!(
                    out,
                    "      <glyph code=\"{}\" x=\"{}\" y=\"{}\" z=\"{}\"/>",
                    p.glyph, p.x, p.y, p.z
                );
            }
            out.push_str("    </sign>\n");
        }
        out.push_str("  </column>\n");
    }
    out.push_str("</swml>\n");
    Ok(out.into_bytes())
}
