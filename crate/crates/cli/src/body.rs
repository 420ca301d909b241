//! Body descriptors: `ball:N`, `cube:N`, `simplex:N`, interval products such as
//! `[-1,1]x[0,1]`, inline JSON shapes, or a path to a JSON file.

use std::path::Path;

use whitney_core::{ConvexBody, Shape};

use crate::CliError;

fn dim_suffix(kind: &str, rest: &str) -> Result<usize, CliError> {
    match rest.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(CliError::Usage(format!("'{kind}:{rest}' needs a positive dimension"))),
    }
}

fn interval_product(src: &str) -> Result<ConvexBody<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("cannot read '{src}' as a product of intervals: {why}"));
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut rest = src.trim();
    loop {
        rest = rest.trim_start();
        let inner_end = rest.find(']').ok_or_else(|| bad("missing ']'"))?;
        if !rest.starts_with('[') {
            return Err(bad("each factor must look like [a,b]"));
        }
        let inner = &rest[1..inner_end];
        let (a, b) = inner.split_once(',').ok_or_else(|| bad("expected 'a,b' inside brackets"))?;
        let a: f64 = a.trim().parse().map_err(|_| bad("malformed lower end"))?;
        let b: f64 = b.trim().parse().map_err(|_| bad("malformed upper end"))?;
        lower.push(a);
        upper.push(b);
        rest = rest[inner_end + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix('x')
            .or_else(|| rest.strip_prefix('×'))
            .or_else(|| rest.strip_prefix('*'))
            .ok_or_else(|| bad("factors are joined by 'x'"))?;
    }
    Ok(ConvexBody::cuboid(lower, upper)?)
}

/// Reads a body descriptor.
pub fn parse_body(src: &str) -> Result<ConvexBody<f64>, CliError> {
    let s = src.trim();
    if let Some((kind, rest)) = s.split_once(':') {
        match kind {
            "ball" => return Ok(ConvexBody::unit_ball(dim_suffix(kind, rest)?)),
            "cube" => return Ok(ConvexBody::hypercube(dim_suffix(kind, rest)?)),
            "simplex" => return Ok(ConvexBody::standard_simplex(dim_suffix(kind, rest)?)),
            _ => {}
        }
    }
    if s.starts_with('[') {
        return interval_product(s);
    }
    let json = if s.starts_with('{') {
        s.to_string()
    } else if Path::new(s).is_file() {
        std::fs::read_to_string(s).map_err(|e| CliError::Usage(format!("cannot read body file '{s}': {e}")))?
    } else {
        return Err(CliError::Usage(format!(
            "unknown body '{s}': use ball:N, cube:N, simplex:N, [a,b]x[c,d], JSON or a JSON file"
        )));
    };
    let shape: Shape<f64> =
        serde_json::from_str(&json).map_err(|e| CliError::Usage(format!("invalid body JSON: {e}")))?;
    Ok(ConvexBody::new(shape)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_bodies() {
        assert_eq!(parse_body("ball:3").unwrap(), ConvexBody::unit_ball(3));
        assert_eq!(parse_body("cube:2").unwrap(), ConvexBody::hypercube(2));
        assert_eq!(parse_body("simplex:2").unwrap(), ConvexBody::standard_simplex(2));
        assert!(parse_body("ball:0").is_err());
    }

    #[test]
    fn interval_products() {
        let k = parse_body("[-1,1] x [0, 1]").unwrap();
        assert_eq!(k, ConvexBody::cuboid(vec![-1.0, 0.0], vec![1.0, 1.0]).unwrap());
        assert_eq!(parse_body("[0,2]").unwrap().dim(), 1);
        assert!(parse_body("[1,0]").is_err());
        assert!(parse_body("[0,1]+[0,1]").is_err());
    }

    #[test]
    fn json_shapes() {
        let k = parse_body(r#"{"shape":"ball","center":[0,0],"radius":2}"#).unwrap();
        assert_eq!(k, ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap());
        assert!(parse_body(r#"{"shape":"ball"}"#).is_err());
    }
}
