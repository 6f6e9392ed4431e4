use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;
use crate::error::Result;

/// One row of the long-format CSV shared by every study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub study: String,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub replication: Option<usize>,
    pub parameter: String,
    pub component: Option<usize>,
    pub value: f64,
}

impl LongRow {
    pub fn new(study: &str, parameter: impl Into<String>, value: f64) -> Self {
        Self {
            study: study.into(),
            n: None,
            k: None,
            replication: None,
            parameter: parameter.into(),
            component: None,
            value,
        }
    }

    pub fn cell(mut self, n: usize, k: usize, replication: usize) -> Self {
        self.n = Some(n);
        self.k = Some(k);
        self.replication = Some(replication);
        self
    }

    pub fn component(mut self, c: usize) -> Self {
        self.component = Some(c);
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    kind: &'a str,
    result: &'a T,
}

/// Paths written by [`write_artifacts`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub json: PathBuf,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Write through a temporary sibling and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// JSON document `{schema_version, kind, result}` with a trailing newline.
pub fn to_json<T: Serialize>(kind: &str, result: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        result,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(rows: &[LongRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Write `<stem>.json`, `<stem>.csv` and optionally `<stem>.svg` in `dir`.
pub fn write_artifacts<T: Serialize>(
    dir: &Path,
    stem: &str,
    kind: &str,
    result: &T,
    rows: &[LongRow],
    svg: Option<&str>,
) -> Result<Artifacts> {
    let json = dir.join(format!("{stem}.json"));
    let csv = dir.join(format!("{stem}.csv"));
    write_atomic(&json, to_json(kind, result)?.as_bytes())?;
    write_atomic(&csv, to_csv(rows)?.as_bytes())?;
    let svg = match svg {
        Some(s) => {
            let p = dir.join(format!("{stem}.svg"));
            write_atomic(&p, s.as_bytes())?;
            Some(p)
        }
        None => None,
    };
    Ok(Artifacts { json, csv, svg })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_quoting() {
        let rows = vec![
            LongRow::new("s", "weight", 0.5).cell(10, 2, 0).component(1),
            LongRow::new("s", "a,b", 1.0),
        ];
        let csv = to_csv(&rows).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "study,n,k,replication,parameter,component,value");
        assert_eq!(lines[1], "s,10,2,0,weight,1,0.5");
        assert_eq!(lines[2], "s,,,,\"a,b\",,1.0");
    }

    #[test]
    fn json_envelope_is_versioned() {
        let s = to_json("demo", &vec![1, 2]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["kind"], "demo");
        assert_eq!(v["result"][1], 2);
    }
}
