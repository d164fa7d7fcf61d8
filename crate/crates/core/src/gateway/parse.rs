//! Parsers that pull scores out of free-text completions.

use super::GatewayError;
use crate::corpus::EmpathyLabel;
use crate::features::SubfactorVector;
use crate::subfactors::SubfactorRegistry;

/// Return the first standalone integer token in {1,2,3}, ignoring
/// surrounding prose. A token is a maximal ASCII digit run with no adjacent
/// alphanumeric character, so "10" never parses as 1 and "1st" is skipped.
pub fn parse_empathy_score(text: &str) -> Result<EmpathyLabel, GatewayError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let standalone = (start == 0 || !bytes[start - 1].is_ascii_alphanumeric())
                && (i >= bytes.len() || !bytes[i].is_ascii_alphanumeric());
            if standalone && i - start == 1 {
                let value = bytes[start] - b'0';
                if (1..=3).contains(&value) {
                    return Ok(EmpathyLabel::new(value).expect("validated range"));
                }
            }
        } else {
            i += 1;
        }
    }
    Err(GatewayError::Unparseable {
        what: "empathy score".into(),
        message: format!("no standalone integer in 1..=3 in {text:?}"),
    })
}

/// Extract the first balanced JSON object embedded in free text.
pub fn extract_json_object(text: &str) -> Result<serde_json::Value, GatewayError> {
    let start = text.find('{').ok_or_else(|| GatewayError::Unparseable {
        what: "structured output".into(),
        message: "no JSON object found".into(),
    })?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, ch) in text[start..].char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    let candidate = &text[start..start + offset + ch.len_utf8()];
                    return serde_json::from_str(candidate).map_err(|e| {
                        GatewayError::Unparseable {
                            what: "structured output".into(),
                            message: e.to_string(),
                        }
                    });
                }
            }
            _ => {}
        }
    }
    Err(GatewayError::Unparseable {
        what: "structured output".into(),
        message: "unbalanced JSON object".into(),
    })
}

/// Parse a structured subfactor-scoring completion.
///
/// All 15 registry names must be present (matched case-insensitively after
/// trimming); values must be integers and are clamped to [1,10] with a
/// recorded warning. Output follows registry order.
pub fn parse_subfactor_scores(
    text: &str,
    registry: &SubfactorRegistry,
) -> Result<(SubfactorVector, Vec<String>), GatewayError> {
    let value = extract_json_object(text)?;
    let object = value.as_object().ok_or_else(|| GatewayError::Unparseable {
        what: "subfactor scores".into(),
        message: "top-level JSON value is not an object".into(),
    })?;

    // normalize keys once: trimmed, lowercased
    let mut normalized: Vec<(String, &serde_json::Value)> = object
        .iter()
        .map(|(k, v)| (k.trim().to_lowercase(), v))
        .collect();
    normalized.sort_by(|a, b| a.0.cmp(&b.0));

    let mut warnings = Vec::new();
    let mut values = Vec::with_capacity(registry.subfactors().len());
    for subfactor in registry.subfactors() {
        let needle = subfactor.name.trim().to_lowercase();
        let found = normalized
            .iter()
            .find(|(k, _)| *k == needle)
            .map(|(_, v)| *v)
            .ok_or_else(|| GatewayError::MissingSubfactor {
                name: subfactor.name.clone(),
            })?;
        let raw = found
            .as_i64()
            .ok_or_else(|| GatewayError::NonIntegerSubfactor {
                name: subfactor.name.clone(),
                value: found.to_string(),
            })?;
        let clamped = raw.clamp(1, 10);
        if clamped != raw {
            warnings.push(format!(
                "subfactor {:?}: value {raw} clamped to {clamped}",
                subfactor.name
            ));
        }
        values.push(clamped as u8);
    }
    let vector = SubfactorVector::new(values).map_err(|e| GatewayError::Unparseable {
        what: "subfactor scores".into(),
        message: e.to_string(),
    })?;
    Ok((vector, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subfactors::{RegistryVersion, SubfactorRegistry};

    #[test]
    fn parses_bare_and_embedded_scores() {
        assert_eq!(parse_empathy_score("2").unwrap().value(), 2);
        assert_eq!(
            parse_empathy_score("Score: 3. The response validates feelings.")
                .unwrap()
                .value(),
            3
        );
        assert_eq!(parse_empathy_score("I'd say 1 out of 3.").unwrap().value(), 1);
    }

    #[test]
    fn rejects_out_of_range_and_non_standalone() {
        assert!(parse_empathy_score("4").is_err());
        assert!(parse_empathy_score("10").is_err());
        assert!(parse_empathy_score("score3x").is_err());
        assert!(parse_empathy_score("no digits at all").is_err());
        assert!(parse_empathy_score("").is_err());
    }

    #[test]
    fn roundtrips_every_label() {
        for label in EmpathyLabel::ALL {
            assert_eq!(parse_empathy_score(&label.to_string()).unwrap(), label);
        }
    }

    fn registry() -> SubfactorRegistry {
        SubfactorRegistry::builtin(RegistryVersion::V2).unwrap()
    }

    fn full_object(registry: &SubfactorRegistry, value: i64) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for name in registry.names() {
            map.insert(name.to_string(), serde_json::json!(value));
        }
        serde_json::Value::Object(map)
    }

    #[test]
    fn parses_well_formed_subfactor_object() {
        let registry = registry();
        let text = format!("Here you go:\n{}", full_object(&registry, 7));
        let (vector, warnings) = parse_subfactor_scores(&text, &registry).unwrap();
        assert_eq!(vector.values().len(), 15);
        assert!(vector.values().iter().all(|&v| v == 7));
        assert!(warnings.is_empty());
    }

    #[test]
    fn clamps_out_of_range_values_with_warning() {
        let registry = registry();
        let mut object = full_object(&registry, 5);
        let first = registry.names()[0].to_string();
        object[&first] = serde_json::json!(12);
        let (vector, warnings) = parse_subfactor_scores(&object.to_string(), &registry).unwrap();
        assert_eq!(vector.values()[0], 10);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("clamped"));
    }

    #[test]
    fn missing_key_is_named() {
        let registry = registry();
        let mut object = full_object(&registry, 5);
        let dropped = registry.names()[3].to_string();
        object.as_object_mut().unwrap().remove(&dropped);
        let err = parse_subfactor_scores(&object.to_string(), &registry).unwrap_err();
        match err {
            GatewayError::MissingSubfactor { name } => assert_eq!(name, dropped),
            other => panic!("expected MissingSubfactor, got {other}"),
        }
    }

    #[test]
    fn keys_match_case_insensitively() {
        let registry = registry();
        let mut map = serde_json::Map::new();
        for name in registry.names() {
            map.insert(format!("  {}  ", name.to_uppercase()), serde_json::json!(4));
        }
        let text = serde_json::Value::Object(map).to_string();
        let (vector, _) = parse_subfactor_scores(&text, &registry).unwrap();
        assert!(vector.values().iter().all(|&v| v == 4));
    }

    #[test]
    fn non_integer_values_are_rejected() {
        let registry = registry();
        let mut object = full_object(&registry, 5);
        let first = registry.names()[0].to_string();
        object[&first] = serde_json::json!("high");
        assert!(matches!(
            parse_subfactor_scores(&object.to_string(), &registry).unwrap_err(),
            GatewayError::NonIntegerSubfactor { .. }
        ));
        object[&first] = serde_json::json!(6.5);
        assert!(matches!(
            parse_subfactor_scores(&object.to_string(), &registry).unwrap_err(),
            GatewayError::NonIntegerSubfactor { .. }
        ));
    }

    #[test]
    fn extract_json_handles_braces_in_strings() {
        let text = "noise {\"a\": \"has { brace\", \"b\": 2} trailing";
        let value = extract_json_object(text).unwrap();
        assert_eq!(value["b"], 2);
    }
}
