//! Text formats shared by the command-line tool: operator JSON, the
//! convention block attached to every report, and `k=v` / point lists.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::models::Params;
use crate::operator::CurvatureOperator;
use crate::twoform::{COORDINATE_LABELS, SD_ASD_LABELS};

/// Parses `{"basis": "coordinate" | "sd-asd", "matrix": [[..6..] x6]}`.
/// Errors carry the line and column reported by the JSON parser.
pub fn parse_operator_json(text: &str) -> Result<CurvatureOperator, Error> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            strip_position(&e.to_string())
        ))
    })
}

fn strip_position(msg: &str) -> &str {
    msg.find(" at line ").map_or(msg, |i| &msg[..i])
}

/// Basis ordering, orientation and normalizations used by every report.
pub fn convention() -> Value {
    json!({
        "coordinateBasis": COORDINATE_LABELS,
        "sdAsdBasis": SD_ASD_LABELS,
        "orientation": "e1^e2^e3^e4 > 0; *(e1^e2) = e3^e4",
        "sec": "sec(X,Y) = <R(X^Y), X^Y> / |X^Y|^2; unit round S^4 has R = Identity",
        "qForm": "q(psi+, psi-) = <psi+ + psi-, R(psi+ + psi-)> = 2 sec",
        "scalarCurvature": "s = 2 tr R",
        "weylNorm": "Frobenius norm of the traceless 3x3 blocks W+, W-"
    })
}

/// `{"command": .., "convention": {..}, "result": ..}`.
pub fn envelope<T: Serialize>(command: &str, result: &T) -> Result<Value, Error> {
    let body = serde_json::to_value(result).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(json!({
        "command": command,
        "convention": convention(),
        "result": body,
    }))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn parse_real(raw: &str, what: &str) -> Result<f64, Error> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what}: '{raw}' is not finite")));
    }
    Ok(v)
}

/// Parses `k=v` pairs into named parameters; keys must be distinct.
pub fn parse_params<S: AsRef<str>>(pairs: &[S]) -> Result<Params, Error> {
    let mut out = Params::new();
    for pair in pairs {
        let pair = pair.as_ref();
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("parameter '{pair}' is not of the form k=v")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("parameter '{pair}' has an empty name")));
        }
        let v = parse_real(v, k)?;
        if out.insert(k.to_string(), v).is_some() {
            return Err(Error::Parse(format!("parameter '{k}' given twice")));
        }
    }
    Ok(out)
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .enumerate()
        .map(|(i, raw)| parse_real(raw, &format!("entry {}", i + 1)))
        .collect()
}

/// Parses `x1,x2,x3,x4`.
pub fn parse_point(text: &str) -> Result<[f64; 4], Error> {
    let v = parse_reals(text)?;
    <[f64; 4]>::try_from(v.as_slice()).map_err(|_| Error::Parse(format!("point needs 4 coordinates, got {}", v.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Basis;
    use nalgebra::Matrix6;

    const IDENTITY: &str = r#"{"basis": "coordinate", "matrix": [
        [1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],
        [0,0,0,1,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]]}"#;

    #[test]
    fn parses_operator() {
        let op = parse_operator_json(IDENTITY).unwrap();
        assert_eq!(op.basis(), Basis::Coordinate);
        assert_eq!(*op.matrix(), Matrix6::identity());
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(parse_operator_json(&text).unwrap(), op);
        let sd = IDENTITY.replace("coordinate", "sd-asd");
        assert_eq!(parse_operator_json(&sd).unwrap().basis(), Basis::SdAsd);
    }

    #[test]
    fn reports_position_of_errors() {
        let bad = "{\"basis\": \"coordinate\",\n  \"matrix\": [[1,2,3]]}";
        match parse_operator_json(bad) {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line 2, column"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_operator_json("{\"basis\": \"polar\", \"matrix\": []}").is_err());
        assert!(parse_operator_json(&IDENTITY.replace('}', ", \"extra\": 1}")).is_err());
        assert!(parse_operator_json("").is_err());
    }

    #[test]
    fn params_and_points() {
        let p = parse_params(&["a=-1", "b = 2.5"]).unwrap();
        assert_eq!(p["a"], -1.0);
        assert_eq!(p["b"], 2.5);
        assert!(parse_params(&["a"]).is_err());
        assert!(parse_params(&["a=1", "a=2"]).is_err());
        assert!(parse_params(&["=1"]).is_err());
        assert!(parse_params(&["a=inf"]).is_err());
        assert_eq!(parse_point("1,2,3,4.5").unwrap(), [1.0, 2.0, 3.0, 4.5]);
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("1,2,x,4").is_err());
    }

    #[test]
    fn envelope_has_convention() {
        let v = envelope("test", &json!({"x": 1})).unwrap();
        assert_eq!(v["convention"]["coordinateBasis"][5], "e3^e4");
        assert_eq!(v["result"]["x"], 1);
    }
}
