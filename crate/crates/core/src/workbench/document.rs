use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complexes::{self, CochainComplex};
use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::gradedlinalg::{GradedDims, Scalar};
use crate::torsion::ChiralityOp;

type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// On-disk description of a complex with optional chirality.
///
/// Matrices are lists of rows, each entry a `[re, im]` pair; differential j
/// has shape `dims[j+1] × dims[j]`, chirality block j has shape
/// `dims[d-j] × dims[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub d: usize,
    pub dims: Vec<usize>,
    pub differential: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chirality: Option<Vec<JsonMatrix>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

fn to_json_matrix(m: &Mat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_json_matrix(rows: &JsonMatrix, shape: (usize, usize), what: &str) -> Result<Mat> {
    let bad = || Error::Parse(format!("{what} must have shape {}x{}", shape.0, shape.1));
    if rows.len() != shape.0 {
        return Err(bad());
    }
    let mut m = Mat::from_element(shape.0, shape.1, Scalar::new(0.0, 0.0));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(bad());
        }
        for (j, z) in row.iter().enumerate() {
            if !z[0].is_finite() || !z[1].is_finite() {
                return Err(Error::Parse(format!("{what} has a non-finite entry")));
            }
            m[(i, j)] = Scalar::new(z[0], z[1]);
        }
    }
    Ok(m)
}

fn write_number(out: &mut String, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Parse("cannot serialize a non-finite number".into()));
    }
    write!(out, "{x:.16e}").expect("write to string");
    Ok(())
}

fn write_matrix(out: &mut String, m: &JsonMatrix) -> Result<()> {
    out.push('[');
    for (i, row) in m.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, z) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push('[');
            write_number(out, z[0])?;
            out.push(',');
            write_number(out, z[1])?;
            out.push(']');
        }
        out.push(']');
    }
    out.push(']');
    Ok(())
}

fn write_list<T>(out: &mut String, items: &[T], mut f: impl FnMut(&mut String, &T) -> Result<()>) -> Result<()> {
    out.push('[');
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        f(out, it)?;
    }
    out.push(']');
    Ok(())
}

impl ComplexDocument {
    pub fn from_complex(c: &CochainComplex, g: Option<&ChiralityOp>, metadata: BTreeMap<String, String>) -> Self {
        ComplexDocument {
            d: c.d(),
            dims: c.dims().dims().to_vec(),
            differential: c.partials().iter().map(to_json_matrix).collect(),
            chirality: g.map(|g| g.blocks().iter().map(to_json_matrix).collect()),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Canonical text: fixed key order, no whitespace, every number with 17
    /// significant digits. Parsing and re-serializing reproduces it byte for
    /// byte.
    pub fn to_canonical_json(&self) -> Result<String> {
        let mut out = String::new();
        write!(out, "{{\"d\":{},\"dims\":", self.d).expect("write to string");
        write_list(&mut out, &self.dims, |o, n| {
            write!(o, "{n}").expect("write to string");
            Ok(())
        })?;
        out.push_str(",\"differential\":");
        write_list(&mut out, &self.differential, write_matrix)?;
        if let Some(ch) = &self.chirality {
            out.push_str(",\"chirality\":");
            write_list(&mut out, ch, write_matrix)?;
        }
        out.push_str(",\"metadata\":{");
        for (i, (k, v)) in self.metadata.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let ks = serde_json::to_string(k).map_err(|e| Error::Parse(e.to_string()))?;
            let vs = serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))?;
            write!(out, "{ks}:{vs}").expect("write to string");
        }
        out.push_str("}}");
        Ok(out)
    }

    /// Builds and validates the complex (and chirality, when present).
    pub fn to_complex(&self) -> Result<(CochainComplex, Option<ChiralityOp>)> {
        let dims = GradedDims::new(self.d, self.dims.clone())?;
        if self.differential.len() != self.d {
            return Err(Error::Parse(format!(
                "expected {} differentials, got {}",
                self.d,
                self.differential.len()
            )));
        }
        let partial = (0..self.d)
            .map(|j| {
                from_json_matrix(
                    &self.differential[j],
                    (dims.dim(j + 1), dims.dim(j)),
                    &format!("differential {j}"),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let c = CochainComplex::new(dims.clone(), partial)?;
        complexes::validate(&c)?;
        let g = match &self.chirality {
            None => None,
            Some(blocks) => {
                if blocks.len() != self.d + 1 {
                    return Err(Error::Parse(format!("expected {} chirality blocks", self.d + 1)));
                }
                let gm = (0..=self.d)
                    .map(|j| {
                        from_json_matrix(
                            &blocks[j],
                            (dims.dim(self.d - j), dims.dim(j)),
                            &format!("chirality {j}"),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(ChiralityOp::new(&dims, gm)?)
            }
        };
        Ok((c, g))
    }
}
