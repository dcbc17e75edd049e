//! JSON file formats. Every rational is a `"num/den"` string so values
//! survive a round trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use noncross_core::constructions::{Certificate, CertificateKind, Step};
use noncross_core::exactnum::Rat;
use noncross_core::geometry::{Metadata, Point, PointSet, Structure};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PointJson {
    pub label: String,
    pub x: String,
    pub y: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MetadataJson {
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub deltas: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PointSetJson {
    pub points: Vec<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StructureJson {
    Path { order: Vec<String> },
    Cycle { order: Vec<String> },
    Matching { pairs: Vec<[String; 2]> },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct StepJson {
    pub label: String,
    pub y: String,
    pub delta: String,
    pub provenance: String,
    pub anchors: Vec<String>,
    pub targets: Vec<String>,
    pub rivals: Vec<String>,
    pub divisor: u32,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CertificateJson {
    pub kind: String,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub steps: Vec<StepJson>,
    pub claimed_optimum: StructureJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    Rat::from_str(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

pub fn point_set_to_json(ps: &PointSet) -> PointSetJson {
    PointSetJson {
        points: ps
            .points()
            .iter()
            .map(|p| PointJson { label: p.label.clone(), x: p.x.to_string(), y: p.y.to_string() })
            .collect(),
        metadata: ps.metadata.as_ref().map(|m| MetadataJson {
            construction: m.construction.clone(),
            k: m.k,
            epsilon: m.epsilon.as_ref().map(|e| e.to_string()),
            deltas: m.deltas.iter().map(|d| d.to_string()).collect(),
        }),
    }
}

pub fn point_set_from_json(j: &PointSetJson) -> Result<PointSet> {
    let pts = j
        .points
        .iter()
        .map(|p| Ok(Point::new(p.label.clone(), parse_rat(&p.x)?, parse_rat(&p.y)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut ps = PointSet::new(pts).map_err(|e| anyhow!("{e}"))?;
    if let Some(m) = &j.metadata {
        ps = ps.with_metadata(Metadata {
            construction: m.construction.clone(),
            k: m.k,
            epsilon: m.epsilon.as_deref().map(parse_rat).transpose()?,
            deltas: m.deltas.iter().map(|d| parse_rat(d)).collect::<Result<_>>()?,
        });
    }
    Ok(ps)
}

pub fn structure_to_json(ps: &PointSet, s: &Structure) -> StructureJson {
    let l = |i: &usize| ps.label(*i).to_string();
    match s {
        Structure::Path(o) => StructureJson::Path { order: o.iter().map(l).collect() },
        Structure::Cycle(o) => StructureJson::Cycle { order: o.iter().map(l).collect() },
        Structure::Matching(m) => StructureJson::Matching { pairs: m.iter().map(|(a, b)| [l(a), l(b)]).collect() },
    }
}

pub fn structure_from_json(ps: &PointSet, j: &StructureJson) -> Result<Structure> {
    fn refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    let s = match j {
        StructureJson::Path { order } => ps.path(&refs(order)),
        StructureJson::Cycle { order } => ps.cycle(&refs(order)),
        StructureJson::Matching { pairs } => {
            let p: Vec<(&str, &str)> = pairs.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
            ps.matching(&p)
        }
    };
    s.map_err(|e| anyhow!("{e}"))
}

pub fn certificate_to_json(ps: &PointSet, c: &Certificate) -> CertificateJson {
    CertificateJson {
        kind: c.kind.name().to_string(),
        k: c.k,
        epsilon: c.epsilon.as_ref().map(|e| e.to_string()),
        steps: c
            .steps
            .iter()
            .map(|s| StepJson {
                label: s.label.clone(),
                y: s.y.to_string(),
                delta: s.delta.to_string(),
                provenance: s.provenance.clone(),
                anchors: s.anchors.clone(),
                targets: s.targets.clone(),
                rivals: s.rivals.clone(),
                divisor: s.divisor,
            })
            .collect(),
        claimed_optimum: structure_to_json(ps, &c.claimed_optimum),
        note: c.note.clone(),
    }
}

pub fn certificate_from_json(ps: &PointSet, j: &CertificateJson) -> Result<Certificate> {
    let kind = CertificateKind::from_name(&j.kind).ok_or_else(|| anyhow!("unknown certificate kind {:?}", j.kind))?;
    let steps = j
        .steps
        .iter()
        .map(|s| {
            Ok(Step {
                label: s.label.clone(),
                y: parse_rat(&s.y)?,
                delta: parse_rat(&s.delta)?,
                provenance: s.provenance.clone(),
                anchors: s.anchors.clone(),
                targets: s.targets.clone(),
                rivals: s.rivals.clone(),
                divisor: s.divisor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate {
        kind,
        k: j.k,
        epsilon: j.epsilon.as_deref().map(parse_rat).transpose()?,
        steps,
        claimed_optimum: structure_from_json(ps, &j.claimed_optimum)?,
        note: j.note.clone(),
    })
}

/// A structure file, or a certificate whose claimed optimum is used.
pub fn read_expected(path: &Path, ps: &PointSet) -> Result<Structure> {
    let v: serde_json::Value = read_json(path)?;
    if let Some(c) = v.get("claimed_optimum") {
        let j: StructureJson = serde_json::from_value(c.clone())?;
        return structure_from_json(ps, &j);
    }
    let j: StructureJson =
        serde_json::from_value(v).with_context(|| format!("{} is not a structure", path.display()))?;
    structure_from_json(ps, &j)
}

/// A JSON array of `"num/den"` strings or integers.
pub fn read_values(path: &Path) -> Result<Vec<Rat>> {
    let v: Vec<serde_json::Value> = read_json(path)?;
    v.iter()
        .map(|x| match x {
            serde_json::Value::String(s) => parse_rat(s),
            serde_json::Value::Number(n) => {
                n.as_i64().map(Rat::from_int).ok_or_else(|| anyhow!("{n} is not an integer"))
            }
            other => bail!("unexpected value {other}"),
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    point_set_from_json(&read_json(path)?)
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
