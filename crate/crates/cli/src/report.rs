use serde::Serialize;
use std::path::Path;

/// Resolved run configuration embedded in every report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<crate::source::Generator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<crate::source::Generator>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_file: Option<String>,
    /// Tangential preset, `file` for tags from the mesh file, or `none`.
    pub gt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cochain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    /// Seconds since the Unix epoch; omitted with `--no-timestamp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub report: R,
}

pub fn envelope<R: Serialize>(config: &RunConfig, report: R, timestamp: bool) -> String {
    let ts = timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let env = Envelope {
        tool: "kml",
        version: env!("CARGO_PKG_VERSION"),
        command: &config.command,
        config,
        timestamp: ts,
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

/// One CSV row per mesh. The column set is fixed; inapplicable values are empty.
#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub mesh: String,
    pub h: f64,
    pub cells: usize,
    pub vertices: usize,
    pub c_p_0: Option<f64>,
    pub c_p_1: Option<f64>,
    pub c_p_2: Option<f64>,
    pub c_p_3: Option<f64>,
    pub maxwell: Option<f64>,
    pub korn_standard: Option<f64>,
    pub korn_tangential: Option<f64>,
    pub korn_irrotational: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub sharp: Option<f64>,
    /// Harmonic dimensions joined by `;`.
    pub harmonic_dims: String,
}

pub const CSV_HEADER: &[&str] = &[
    "mesh",
    "h",
    "cells",
    "vertices",
    "c_p_0",
    "c_p_1",
    "c_p_2",
    "c_p_3",
    "maxwell",
    "korn_standard",
    "korn_tangential",
    "korn_irrotational",
    "c1",
    "c2",
    "sharp",
    "harmonic_dims",
];

impl CsvRow {
    pub fn new(mesh: String, r: &kml_core::spectra::ConstantsReport) -> Self {
        let cp = |q: usize| r.poincare.get(q).copied().flatten();
        Self {
            mesh,
            h: r.mesh_size,
            cells: r.cells,
            vertices: r.vertices,
            c_p_0: cp(0),
            c_p_1: cp(1),
            c_p_2: cp(2),
            c_p_3: cp(3),
            maxwell: r.maxwell,
            korn_standard: r.korn_standard,
            korn_tangential: r.korn_tangential,
            korn_irrotational: r.korn_irrotational,
            c1: r.c1,
            c2: r.c2,
            sharp: r.sharp,
            harmonic_dims: r
                .harmonic_dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// Writes rows with a header, to a file (appending, header only when new) or to a string.
pub fn write_csv(rows: &[CsvRow], path: Option<&Path>) -> Result<Option<String>, crate::error::CliError> {
    match path {
        Some(p) => {
            let fresh = !p.exists() || std::fs::metadata(p)?.len() == 0;
            let file = std::fs::OpenOptions::new().create(true).append(true).open(p)?;
            let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(None)
        }
        None => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| crate::error::CliError::Io(e.into_error()))?;
            Ok(Some(String::from_utf8(bytes).expect("csv is utf-8")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mesh: &str) -> CsvRow {
        CsvRow {
            mesh: mesh.into(),
            h: 0.5,
            cells: 8,
            vertices: 9,
            c_p_0: Some(0.2),
            c_p_1: None,
            c_p_2: None,
            c_p_3: None,
            maxwell: None,
            korn_standard: None,
            korn_tangential: None,
            korn_irrotational: None,
            c1: None,
            c2: None,
            sharp: None,
            harmonic_dims: "0;0;1".into(),
        }
    }

    #[test]
    fn csv_header_written_once() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rows.csv");
        write_csv(&[row("a")], Some(&p)).unwrap();
        write_csv(&[row("b")], Some(&p)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("a,0.5,8,9,0.2,,"));
    }

    #[test]
    fn csv_to_string_has_header() {
        let s = write_csv(&[row("a")], None).unwrap().unwrap();
        assert!(s.starts_with(&CSV_HEADER.join(",")));
    }

    #[test]
    fn envelope_timestamp_toggle() {
        let config = RunConfig {
            command: "betti".into(),
            gt: "none".into(),
            ..Default::default()
        };
        let with: serde_json::Value = serde_json::from_str(&envelope(&config, 1, true)).unwrap();
        let without = envelope(&config, 1, false);
        assert!(with["timestamp"].is_u64());
        assert!(!without.contains("timestamp"));
        assert!(without.ends_with("}\n"));
    }
}
