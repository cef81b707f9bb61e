//! Line-oriented JSON files.
//!
//! A complex file starts with a header object `{"n": .., "vertex_map": ..}`
//! followed by one `{"s": [v0, ..]}` object per line. Vertex ids in `s` are
//! external ids; when they are not dense they are remapped to `0..n` and the
//! sorted external ids are kept as the vertex map.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_complex, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertex_map: Option<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct Line {
    s: Vec<u64>,
}

/// Parses a complex file. Files are declarations of record: unless
/// `autoclose` is set, every face must be listed.
pub fn parse_complex(text: &str, autoclose: bool) -> Result<SimplicialComplex> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Header = serde_json::from_str(lines.next().ok_or(Error::EmptyInput)?)?;
    let raw: Vec<Vec<u64>> = lines
        .map(|l| serde_json::from_str::<Line>(l).map(|l| l.s))
        .collect::<std::result::Result<_, _>>()?;

    let (vertex_map, n) = match header.vertex_map {
        Some(map) => {
            let n = map.len();
            (Some(map), n)
        }
        None if raw.iter().flatten().all(|&v| (v as usize) < header.n) => (None, header.n),
        None => {
            let ids: BTreeSet<u64> = raw.iter().flatten().copied().collect();
            let map: Vec<u64> = ids.into_iter().collect();
            let n = map.len();
            (Some(map), n)
        }
    };

    let lookup: Option<HashMap<u64, usize>> = vertex_map
        .as_ref()
        .map(|m| m.iter().enumerate().map(|(i, &v)| (v, i)).collect());
    let to_internal = |v: u64| -> Result<usize> {
        match &lookup {
            Some(map) => map
                .get(&v)
                .copied()
                .ok_or_else(|| Error::Parse(format!("vertex {v} missing from vertex_map"))),
            None => Ok(v as usize),
        }
    };
    let simplices = raw
        .iter()
        .map(|s| {
            let vs = s.iter().map(|&v| to_internal(v)).collect::<Result<Vec<_>>>()?;
            Simplex::new(vs)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut k = build_complex(&simplices, autoclose)?;
    if k.n > n {
        return Err(Error::Parse(format!("header n = {n} but vertex {} used", k.n - 1)));
    }
    k.n = n;
    Ok(k.with_vertex_map(vertex_map))
}

/// Canonical serialization: header, then simplices layer by layer in index
/// order.
pub fn write_complex(k: &SimplicialComplex) -> String {
    let header = Header {
        n: k.n(),
        vertex_map: k.vertex_map().map(<[u64]>::to_vec),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for s in k.simplices() {
        let ext = s
            .vertices()
            .iter()
            .map(|&v| k.vertex_map().map_or(v as u64, |m| m[v]))
            .collect();
        out.push_str(&serde_json::to_string(&Line { s: ext }).expect("line serializes"));
        out.push('\n');
    }
    out
}

pub fn load_complex(path: impl AsRef<Path>, autoclose: bool) -> Result<SimplicialComplex> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_complex(&text, autoclose)
}

pub fn save_complex(path: impl AsRef<Path>, k: &SimplicialComplex) -> Result<()> {
    fs::write(path, write_complex(k))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    k1: String,
    k2: String,
}

/// Loads the two complexes named by a filtration manifest
/// `{"k1": path, "k2": path}`; relative paths resolve against the manifest's
/// directory.
pub fn load_filtration(manifest: impl AsRef<Path>, autoclose: bool) -> Result<(SimplicialComplex, SimplicialComplex)> {
    let manifest = manifest.as_ref();
    let m: Manifest = serde_json::from_str(&fs::read_to_string(manifest)?)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    Ok((
        load_complex(base.join(&m.k1), autoclose)?,
        load_complex(base.join(&m.k2), autoclose)?,
    ))
}

/// On-disk chain: `coeffs` holds `[index, numerator, denominator]` with
/// 1-based indices into layer `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub r: usize,
    pub coeffs: Vec<(usize, i64, i64)>,
}

pub fn chain_file_from_str(text: &str) -> Result<ChainFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn chain_file_to_string(c: &ChainFile) -> String {
    serde_json::to_string(c).expect("chain serializes")
}
