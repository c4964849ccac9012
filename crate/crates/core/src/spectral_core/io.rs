//! Field files: 8-byte magic `HSFIELD1`, a little-endian u64 header length, the JSON
//! header, then interleaved (re, im) f64 samples in row-major order.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use super::field::{BoundaryField, DomainTag, Representation, SampledField, YExtent};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"HSFIELD1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub grid: Grid,
    pub domain_tag: DomainTag,
    pub representation: Representation,
    #[serde(default = "default_extent")]
    pub y_extent: YExtent,
    #[serde(default)]
    pub times: Vec<f64>,
    pub shape: Vec<usize>,
}

fn default_extent() -> YExtent {
    YExtent::Half
}

/// Either kind of field, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyField {
    Boundary(BoundaryField),
    Volume(SampledField),
}

fn encode(header: &FieldHeader, values: &[C64], out: &mut impl Write) -> Result<()> {
    let json = serde_json::to_vec(header).map_err(|e| Error::Format(e.to_string()))?;
    out.write_all(MAGIC)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(values.len() * 16);
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn write_boundary(path: &Path, f: &BoundaryField) -> Result<()> {
    let header = FieldHeader {
        grid: f.grid.clone(),
        domain_tag: DomainTag::BoundarySpacetime,
        representation: f.repr,
        y_extent: YExtent::Half,
        times: Vec::new(),
        shape: boundary_shape(&f.grid),
    };
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    encode(&header, &f.values, &mut file)
}

pub fn write_volume(path: &Path, f: &SampledField) -> Result<()> {
    let mut shape = vec![f.grid.nx; f.grid.m()];
    shape.push(f.ny_len());
    shape.push(f.nt_len());
    let header = FieldHeader {
        grid: f.grid.clone(),
        domain_tag: f.tag,
        representation: f.repr,
        y_extent: f.extent,
        times: f.times.clone(),
        shape,
    };
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    encode(&header, &f.values, &mut file)
}

fn boundary_shape(g: &Grid) -> Vec<usize> {
    let mut s = vec![g.nx; g.m()];
    s.push(g.nt);
    s
}

pub fn read_bytes(bytes: &[u8]) -> Result<AnyField> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing HSFIELD1 magic".into()));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if bytes.len() < 16 + hlen {
        return Err(Error::Format("truncated header".into()));
    }
    let header: FieldHeader = serde_json::from_slice(&bytes[16..16 + hlen]).map_err(|e| Error::Format(e.to_string()))?;
    header.grid.validate()?;
    let body = &bytes[16 + hlen..];
    let count: usize = header.shape.iter().product();
    if body.len() != count * 16 {
        return Err(Error::Format(format!("expected {} samples, found {} bytes", count, body.len())));
    }
    let values: Vec<C64> = body
        .chunks_exact(16)
        .map(|c| C64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    match header.domain_tag {
        DomainTag::BoundarySpacetime => {
            if header.shape != boundary_shape(&header.grid) {
                return Err(Error::Shape("boundary shape does not match grid".into()));
            }
            Ok(AnyField::Boundary(BoundaryField::new(&header.grid, header.representation, values)?))
        }
        tag => {
            let f = SampledField {
                grid: header.grid,
                tag,
                extent: header.y_extent,
                repr: header.representation,
                times: header.times,
                values,
            };
            f.check()?;
            Ok(AnyField::Volume(f))
        }
    }
}

pub fn read_field(path: &Path) -> Result<AnyField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    read_bytes(&bytes)
}
