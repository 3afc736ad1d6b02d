//! JSON style documents.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

use super::StylePipeline;
use crate::error::{Error, Result};
use crate::filters::{FilterBlock, FilterKind};

pub const STYLE_SCHEMA_VERSION: u64 = 1;

/// Published JSON schema for style documents.
pub const STYLE_SCHEMA: &str = include_str!("../../assets/schemas/style.schema.json");

const BUNDLED: [&str; 4] = [
    include_str!("../../assets/styles/ink-lines.json"),
    include_str!("../../assets/styles/tinted-flow.json"),
    include_str!("../../assets/styles/poster-color.json"),
    include_str!("../../assets/styles/hatched.json"),
];

#[derive(Serialize)]
struct BlockDoc<'a> {
    kind: &'static str,
    params: &'a BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct StyleDoc<'a> {
    schema_version: u64,
    name: &'a str,
    background: Vec<BlockDoc<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    foreground: Option<Vec<BlockDoc<'a>>>,
    line_color: [u8; 3],
}

fn block_docs(chain: &[FilterBlock]) -> Vec<BlockDoc<'_>> {
    chain
        .iter()
        .map(|b| BlockDoc {
            kind: b.kind().name(),
            params: b.params(),
        })
        .collect()
}

/// Canonical document text: fixed field order, every parameter spelled out.
pub fn serialize(p: &StylePipeline) -> String {
    let doc = StyleDoc {
        schema_version: STYLE_SCHEMA_VERSION,
        name: &p.name,
        background: block_docs(&p.background),
        foreground: p.foreground.as_deref().map(block_docs),
        line_color: p.line_color,
    };
    serde_json::to_string_pretty(&doc).expect("style serializes")
}

fn parse_block(v: &Value, loc: &str) -> Result<FilterBlock> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse(loc, "block must be an object"))?;
    for key in obj.keys() {
        if key != "kind" && key != "params" {
            return Err(Error::parse(loc, format!("unknown field `{key}`")));
        }
    }
    let name = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse(loc, "missing string field `kind`"))?;
    let kind = FilterKind::from_name(name)
        .ok_or_else(|| Error::parse(loc, format!("unknown filter kind `{name}`")))?;
    let mut block = FilterBlock::new(kind);
    match obj.get("params") {
        None | Some(Value::Null) => {}
        Some(Value::Object(params)) => {
            for (pname, pv) in params {
                let ploc = format!("{loc}.params.{pname}");
                let value = pv
                    .as_f64()
                    .ok_or_else(|| Error::parse(&ploc, "parameter must be a number"))?;
                block.set(pname, value).map_err(|e| match e {
                    Error::InvalidArgument(m) => Error::parse(&ploc, m),
                    other => other,
                })?;
            }
        }
        Some(_) => return Err(Error::parse(format!("{loc}.params"), "must be an object")),
    }
    Ok(block)
}

fn parse_chain(v: &Value, loc: &str) -> Result<Vec<FilterBlock>> {
    v.as_array()
        .ok_or_else(|| Error::parse(loc, "must be an array of blocks"))?
        .iter()
        .enumerate()
        .map(|(i, b)| parse_block(b, &format!("{loc}[{i}]")))
        .collect()
}

fn parse_color(v: &Value) -> Result<[u8; 3]> {
    let loc = "line_color";
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::parse(loc, "must be an array of three integers"))?;
    let mut out = [0u8; 3];
    for (i, c) in arr.iter().enumerate() {
        out[i] = c
            .as_u64()
            .filter(|&c| c <= 255)
            .ok_or_else(|| Error::parse(format!("{loc}[{i}]"), "must be an integer in [0,255]"))?
            as u8;
    }
    Ok(out)
}

fn parse_object(obj: &Map<String, Value>) -> Result<StylePipeline> {
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "schema_version" | "name" | "background" | "foreground" | "line_color"
        ) {
            return Err(Error::parse(key.as_str(), "unknown field"));
        }
    }
    match obj.get("schema_version").and_then(Value::as_u64) {
        Some(STYLE_SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(Error::parse(
                "schema_version",
                format!("unsupported version {v}, expected {STYLE_SCHEMA_VERSION}"),
            ))
        }
        None => return Err(Error::parse("schema_version", "missing or not an integer")),
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("name", "missing or not a string"))?;
    let background = match obj.get("background") {
        Some(v) => parse_chain(v, "background")?,
        None => Vec::new(),
    };
    let foreground = match obj.get("foreground") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_chain(v, "foreground")?),
    };
    let line_color = match obj.get("line_color") {
        Some(v) => parse_color(v)?,
        None => [0, 0, 0],
    };
    Ok(StylePipeline {
        name: name.to_string(),
        background,
        foreground,
        line_color,
    })
}

/// Parses a style from an already decoded JSON value.
pub fn parse_value(v: &Value) -> Result<StylePipeline> {
    parse_object(
        v.as_object()
            .ok_or_else(|| Error::parse("$", "style must be a JSON object"))?,
    )
}

/// Parses a style document. Missing parameters take their defaults; channel
/// validity is checked separately by `validate`.
pub fn parse(text: &str) -> Result<StylePipeline> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    parse_value(&v)
}

/// The four bundled styles.
pub fn bundled_styles() -> Vec<StylePipeline> {
    BUNDLED
        .iter()
        .map(|text| parse(text).expect("bundled style parses"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::validate;

    #[test]
    fn bundled_styles_round_trip_and_validate() {
        let styles = bundled_styles();
        assert_eq!(styles.len(), 4);
        for s in &styles {
            assert!(validate(s).is_empty(), "{}: {:?}", s.name, validate(s));
            let text = serialize(s);
            assert_eq!(&parse(&text).unwrap(), s);
            assert_eq!(serialize(&parse(&text).unwrap()), text);
        }
    }

    #[test]
    fn unknown_kind_names_its_block() {
        let err = parse(r#"{"schema_version":1,"name":"x","background":[{"kind":"ToGray"},{"kind":"Foo"}]}"#)
            .unwrap_err();
        match err {
            Error::Parse { location, message } => {
                assert_eq!(location, "background[1]");
                assert!(message.contains("Foo"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_foreground_and_defaults() {
        let p = parse(r#"{"schema_version":1,"name":"x","background":[{"kind":"Gaussian"}]}"#).unwrap();
        assert!(p.foreground.is_none());
        assert_eq!(p.background[0].get("sigma"), 2.0);
        assert_eq!(p.line_color, [0, 0, 0]);
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse("{"), Err(Error::Parse { .. })));
        assert!(parse(r#"{"name":"x"}"#).is_err());
        assert!(parse(r#"{"schema_version":2,"name":"x"}"#).is_err());
        let e = parse(r#"{"schema_version":1,"name":"x","background":[{"kind":"XDoG","params":{"p":99}}]}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "background[0].params.p"));
        assert!(parse(r#"{"schema_version":1,"name":"x","line_color":[0,0,300]}"#).is_err());
    }

    #[test]
    fn schema_is_valid_json() {
        let v: Value = serde_json::from_str(STYLE_SCHEMA).unwrap();
        assert_eq!(v["type"], "object");
    }
}
