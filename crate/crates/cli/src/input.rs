use std::fs;
use std::io::{self, Read};
use std::path::Path;

use facet_volumes::linalg::Point;
use serde::de::DeserializeOwned;

use crate::CliError;

pub fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_source(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Vertices as a JSON array of arrays, or one vertex per line (or per `;`)
/// with coordinates separated by whitespace or commas. `#` starts a comment.
pub fn parse_vertices(text: &str) -> Result<Vec<Point>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Json {
            Bare(Vec<Point>),
            Wrapped { vertices: Vec<Point> },
        }
        let parsed: Json =
            serde_json::from_str(trimmed).map_err(|e| CliError::Usage(format!("vertex JSON: {e}")))?;
        return Ok(match parsed {
            Json::Bare(v) | Json::Wrapped { vertices: v } => v,
        });
    }
    let mut out = Vec::new();
    for line in text.split(['\n', ';']) {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let coords = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("not a number: {t:?}")))
            })
            .collect::<Result<Point, _>>()?;
        out.push(coords);
    }
    if out.is_empty() {
        return Err(CliError::Usage("no vertices given".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_and_inline() {
        let v = parse_vertices("0 0\n4,0\n\n# comment\n0 3  # tail\n").unwrap();
        assert_eq!(v, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 3.0]]);
        assert_eq!(parse_vertices("0 0; 4 0; 0 3").unwrap(), v);
    }

    #[test]
    fn json_forms() {
        let v = parse_vertices("[[0,0],[1,0],[0,1]]").unwrap();
        assert_eq!(v.len(), 3);
        let w = parse_vertices(r#"{"vertices": [[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_vertices("0 x").is_err());
        assert!(parse_vertices("  \n").is_err());
    }
}
