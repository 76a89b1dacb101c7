//! JSON game files: `{"n": <int>, "v": [<rat>, ...]}`.
//!
//! Entry `m` of `v` is the value of the coalition with mask `m`. A `<rat>`
//! is either a JSON integer or a string in canonical `p` / `p/q` form.

use num_traits::ToPrimitive;
use serde_json::{Map, Number, Value};

use super::{Game, GameError, MAX_PLAYERS};
use crate::rational::{self, ParseRationalError, Rational};

pub fn parse_game(text: &[u8]) -> Result<Game, GameError> {
    let doc: Value = serde_json::from_slice(text).map_err(|e| GameError::Json(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| GameError::Json("top level must be an object".into()))?;
    if let Some(key) = obj.keys().find(|k| *k != "n" && *k != "v") {
        return Err(GameError::Json(format!("unexpected field {key:?}")));
    }
    let n = obj
        .get("n")
        .ok_or_else(|| GameError::Json("missing field \"n\"".into()))?
        .as_u64()
        .ok_or_else(|| GameError::Json("\"n\" must be a non-negative integer".into()))?;
    let n = usize::try_from(n).unwrap_or(usize::MAX);
    if n == 0 || n > MAX_PLAYERS {
        return Err(GameError::PlayerCount(n));
    }
    let entries = obj
        .get("v")
        .ok_or_else(|| GameError::Json("missing field \"v\"".into()))?
        .as_array()
        .ok_or_else(|| GameError::Json("\"v\" must be an array".into()))?;
    let expected = 1usize << n;
    if entries.len() != expected {
        return Err(GameError::WrongLength {
            n,
            expected,
            got: entries.len(),
        });
    }
    let values = entries
        .iter()
        .map(parse_entry)
        .collect::<Result<Vec<_>, _>>()?;
    Game::new(n, values)
}

fn parse_entry(entry: &Value) -> Result<Rational, GameError> {
    match entry {
        Value::Number(num) => match num.as_i64() {
            Some(i) => Ok(rational::int(i)),
            None => Err(ParseRationalError {
                text: num.to_string(),
                reason: "JSON numbers must be integers; write fractions as \"p/q\"",
            }
            .into()),
        },
        Value::String(s) => Ok(rational::parse_rational(s)?),
        other => Err(ParseRationalError {
            text: other.to_string(),
            reason: "expected an integer or a \"p/q\" string",
        }
        .into()),
    }
}

/// Canonical compact form followed by a newline.
pub fn serialize_game(game: &Game) -> Vec<u8> {
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(game.players()));
    obj.insert(
        "v".into(),
        Value::Array(game.values().iter().map(rational_to_json).collect()),
    );
    let mut out = serde_json::to_vec(&Value::Object(obj)).expect("game serializes");
    out.push(b'\n');
    out
}

pub(crate) fn rational_to_json(value: &Rational) -> Value {
    if value.is_integer() {
        if let Some(i) = value.numer().to_i64() {
            return Value::Number(Number::from(i));
        }
    }
    Value::String(rational::format_rational(value))
}
