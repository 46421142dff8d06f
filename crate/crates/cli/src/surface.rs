use std::path::Path;

use anyhow::{bail, Context, Result};
use maxsurf::catalog::{get_catalog_surface, CatalogEntry, NAMES};
use maxsurf::weierstrass::{ParamDomain, SurfaceKind, WeierstrassData};
use maxsurf::{Complex64, LVec3};
use serde::{Deserialize, Serialize};

/// On-disk surface description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub kind: SurfaceKind,
    pub domain: ParamDomain,
    pub g: String,
    pub phi3: String,
    pub basepoint: [f64; 2],
    pub base_value: [f64; 3],
}

impl SurfaceFile {
    pub fn from_data(d: &WeierstrassData) -> Self {
        let b = d.base_value;
        Self {
            kind: d.kind,
            domain: d.domain.clone(),
            g: d.g.source().to_string(),
            phi3: d.f.source().to_string(),
            basepoint: [d.basepoint.re, d.basepoint.im],
            base_value: [b.x1, b.x2, b.x3],
        }
    }

    pub fn build(&self) -> maxsurf::Result<WeierstrassData> {
        WeierstrassData::from_text(
            self.kind,
            self.domain.clone(),
            &self.g,
            &self.phi3,
            Complex64::new(self.basepoint[0], self.basepoint[1]),
            LVec3::new(self.base_value[0], self.base_value[1], self.base_value[2]),
        )
    }
}

pub struct Loaded {
    pub name: String,
    pub data: WeierstrassData,
    pub entry: Option<CatalogEntry>,
}

/// A catalog name or the path of a JSON surface file.
pub fn load(spec: &str) -> Result<Loaded> {
    if NAMES.contains(&spec) {
        let entry = get_catalog_surface(spec)?;
        return Ok(Loaded {
            name: spec.to_string(),
            data: entry.data.clone(),
            entry: Some(entry),
        });
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!(
            "'{spec}' is neither a catalog surface ({}) nor a file",
            NAMES.join(", ")
        );
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
    let file: SurfaceFile = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
    let data = file.build().with_context(|| format!("invalid surface in {spec}"))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "surface".into());
    Ok(Loaded {
        name,
        data,
        entry: None,
    })
}
