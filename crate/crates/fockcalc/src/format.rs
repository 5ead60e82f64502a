//! The JSON coefficient file format.
//!
//! ```json
//! {"kind":"kernel","d1":1,"d2":1,"max_degree":2,
//!  "entries":[{"alpha":[1],"beta":[1],"re":1.0,"im":0.0}]}
//! ```
//!
//! A kernel's `alpha` indexes the output variable `z ∈ ℂ^{d2}` and `beta` the
//! input variable `w ∈ ℂ^{d1}`. Square kernels may give a single `d`.
//! Entries are written in (degree, lexicographic) order.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use fock_core::{Complex64, KernelCoeffs, MultiIndex, SeriesCoeffs};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Coeffs {
    Series(SeriesCoeffs),
    Kernel(KernelCoeffs),
}

/// Parsed contents of a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffFile {
    pub max_degree: u32,
    pub coeffs: Coeffs,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireFile {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d2: Option<usize>,
    max_degree: u32,
    entries: Vec<WireEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEntry {
    alpha: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<u32>>,
    re: f64,
    im: f64,
}

impl CoeffFile {
    pub fn series(max_degree: u32, s: SeriesCoeffs) -> Self {
        CoeffFile { max_degree, coeffs: Coeffs::Series(s) }
    }

    pub fn kernel(max_degree: u32, k: KernelCoeffs) -> Self {
        CoeffFile { max_degree, coeffs: Coeffs::Kernel(k) }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let wire: WireFile = serde_json::from_str(text).map_err(|e| CliError::schema(format!("invalid coefficient file: {e}")))?;
        from_wire(wire)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_wire()).expect("coefficient files serialize");
        text.push('\n');
        text
    }

    pub fn into_kernel(self) -> CliResult<(u32, KernelCoeffs)> {
        match self.coeffs {
            Coeffs::Kernel(k) => Ok((self.max_degree, k)),
            Coeffs::Series(_) => Err(CliError::schema("expected a kernel file, found a series")),
        }
    }

    pub fn into_series(self) -> CliResult<(u32, SeriesCoeffs)> {
        match self.coeffs {
            Coeffs::Series(s) => Ok((self.max_degree, s)),
            Coeffs::Kernel(_) => Err(CliError::schema("expected a series file, found a kernel")),
        }
    }

    fn to_wire(&self) -> WireFile {
        match &self.coeffs {
            Coeffs::Series(s) => WireFile {
                kind: "series".into(),
                d: Some(s.dim()),
                d1: None,
                d2: None,
                max_degree: self.max_degree,
                entries: s
                    .iter()
                    .map(|(a, v)| WireEntry { alpha: a.entries().to_vec(), beta: None, re: v.re, im: v.im })
                    .collect(),
            },
            Coeffs::Kernel(k) => WireFile {
                kind: "kernel".into(),
                d: None,
                d1: Some(k.dim_in()),
                d2: Some(k.dim_out()),
                max_degree: self.max_degree,
                entries: k
                    .iter()
                    .map(|((a, b), v)| WireEntry {
                        alpha: a.entries().to_vec(),
                        beta: Some(b.entries().to_vec()),
                        re: v.re,
                        im: v.im,
                    })
                    .collect(),
            },
        }
    }
}

fn index(entries: Vec<u32>, dim: usize, max_degree: u32, name: &str) -> CliResult<MultiIndex> {
    if entries.len() != dim {
        return Err(CliError::schema(format!("{name} has {} entries, expected {dim}", entries.len())));
    }
    let m = MultiIndex::new(entries).map_err(|e| CliError::schema(e.to_string()))?;
    if m.degree() > max_degree {
        return Err(CliError::schema(format!("{name} = {m:?} exceeds max_degree {max_degree}")));
    }
    Ok(m)
}

fn value(e: &WireEntry) -> CliResult<Complex64> {
    if !(e.re.is_finite() && e.im.is_finite()) {
        return Err(CliError::schema("coefficient values must be finite"));
    }
    Ok(Complex64::new(e.re, e.im))
}

fn positive(dim: Option<usize>, name: &str) -> CliResult<usize> {
    match dim {
        Some(d) if d >= 1 => Ok(d),
        Some(_) => Err(CliError::schema(format!("{name} must be positive"))),
        None => Err(CliError::schema(format!("missing field {name}"))),
    }
}

fn from_wire(wire: WireFile) -> CliResult<CoeffFile> {
    let n = wire.max_degree;
    match wire.kind.as_str() {
        "series" => {
            if wire.d1.is_some() || wire.d2.is_some() {
                return Err(CliError::schema("series files take a single field d"));
            }
            let d = positive(wire.d, "d")?;
            let mut seen = BTreeSet::new();
            let mut s = SeriesCoeffs::new(d);
            for e in wire.entries {
                if e.beta.is_some() {
                    return Err(CliError::schema("series entries have no beta"));
                }
                let v = value(&e)?;
                let a = index(e.alpha, d, n, "alpha")?;
                if !seen.insert(a.clone()) {
                    return Err(CliError::schema(format!("duplicate entry {a:?}")));
                }
                s.insert(a, v).map_err(|e| CliError::schema(e.to_string()))?;
            }
            Ok(CoeffFile::series(n, s))
        }
        "kernel" => {
            let (d1, d2) = match (wire.d, wire.d1, wire.d2) {
                (Some(_), None, None) => {
                    let d = positive(wire.d, "d")?;
                    (d, d)
                }
                (None, d1, d2) => (positive(d1, "d1")?, positive(d2, "d2")?),
                _ => return Err(CliError::schema("give either d or both d1 and d2")),
            };
            let mut seen = BTreeSet::new();
            let mut k = KernelCoeffs::new(d2, d1);
            for e in wire.entries {
                let v = value(&e)?;
                let beta = e.beta.ok_or_else(|| CliError::schema("kernel entries need beta"))?;
                let a = index(e.alpha, d2, n, "alpha")?;
                let b = index(beta, d1, n, "beta")?;
                if !seen.insert((a.clone(), b.clone())) {
                    return Err(CliError::schema(format!("duplicate entry ({a:?}, {b:?})")));
                }
                k.insert(a, b, v).map_err(|e| CliError::schema(e.to_string()))?;
            }
            Ok(CoeffFile::kernel(n, k))
        }
        other => Err(CliError::schema(format!("unknown kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;

    #[test]
    fn round_trip_is_canonical() {
        let text = r#"{"kind":"kernel","d":1,"max_degree":3,
            "entries":[{"alpha":[2],"beta":[0],"re":0.5,"im":-1.0},{"alpha":[0],"beta":[1],"re":1.0,"im":0.0}]}"#;
        let f = CoeffFile::parse(text).unwrap();
        let out = f.to_json();
        assert!(out.find("\"beta\": [\n        1").unwrap() < out.find("\"alpha\": [\n        2").unwrap());
        assert_eq!(CoeffFile::parse(&out).unwrap(), f);
        assert_eq!(CoeffFile::parse(&out).unwrap().to_json(), out);
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            r#"{"kind":"series","d":1,"max_degree":1,"entries":[{"alpha":[2],"re":1,"im":0}]}"#,
            r#"{"kind":"series","d":1,"max_degree":3,"entries":[{"alpha":[2],"re":1,"im":0},{"alpha":[2],"re":1,"im":0}]}"#,
            r#"{"kind":"series","d":2,"max_degree":3,"entries":[{"alpha":[2],"re":1,"im":0}]}"#,
            r#"{"kind":"kernel","d":1,"max_degree":3,"entries":[{"alpha":[2],"re":1,"im":0}]}"#,
            r#"{"kind":"matrix","d":1,"max_degree":3,"entries":[]}"#,
            r#"{"kind":"series","d":1,"max_degree":3,"entries":[],"extra":1}"#,
            r#"{"kind":"series","d":0,"max_degree":3,"entries":[]}"#,
            "not json",
        ];
        for text in cases {
            let err = CoeffFile::parse(text).unwrap_err();
            assert_eq!(err.kind, ErrorKind::Schema, "{text}");
        }
    }

    #[test]
    fn rectangular_kernels_keep_their_dimensions() {
        let text = r#"{"kind":"kernel","d1":2,"d2":1,"max_degree":2,
            "entries":[{"alpha":[1],"beta":[0,1],"re":1,"im":0}]}"#;
        let (_, k) = CoeffFile::parse(text).unwrap().into_kernel().unwrap();
        assert_eq!((k.dim_out(), k.dim_in()), (1, 2));
    }
}
