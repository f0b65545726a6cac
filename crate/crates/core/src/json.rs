//! JSON schemas for algebras, GMAs, bilinear maps and linear maps.
//!
//! Parsing reports the JSON path of the first offending value, e.g.
//! `A.mult[1][0][2]: residue 7 is not in [0, 5)`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, LinearMapRep};
use crate::field::PrimeField;
use crate::morita::{Bimodule, Gma, MoritaContext, Pairing};
use crate::traces::BilinearMapRep;

type Tensor3 = Vec<Vec<Vec<i64>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: u64,
    pub dim: usize,
    pub unit: Vec<i64>,
    /// `mult[i][j][k]`: coefficient of `e_k` in `e_i e_j`.
    pub mult: Tensor3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub dim: usize,
    /// `left[i][m][k]`: coefficient of `u_k` in `x_i · u_m`.
    pub left: Tensor3,
    /// `right[m][j][k]`: coefficient of `u_k` in `u_m · y_j`.
    pub right: Tensor3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmaSpec {
    pub p: u64,
    #[serde(rename = "A")]
    pub a: AlgebraSpec,
    #[serde(rename = "B")]
    pub b: AlgebraSpec,
    #[serde(rename = "M")]
    pub m: ModuleSpec,
    #[serde(rename = "N")]
    pub n: ModuleSpec,
    #[serde(rename = "phiMN")]
    pub phi: Tensor3,
    #[serde(rename = "psiNM")]
    pub psi: Tensor3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearSpec {
    pub dim: usize,
    /// `tensor[i][j]`: coordinates of `q(e_i, e_j)`.
    pub tensor: Tensor3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMapSpec {
    pub source_dim: usize,
    pub target_dim: usize,
    /// Column-major: `matrix[j]` is the image of basis `j`.
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct SpecError {
    /// Dotted JSON path, empty for the document root.
    pub path: String,
    pub message: String,
}

impl SpecError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        let path = path.into();
        SpecError {
            path: if path.is_empty() { "(root)".to_string() } else { path },
            message: message.into(),
        }
    }
}

fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SpecError::new(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn residue(path: &str, v: i64, field: PrimeField) -> Result<u32, SpecError> {
    let p = field.modulus();
    if v < 0 || v >= p as i64 {
        return Err(SpecError::new(path, format!("residue {v} is not in [0, {p})")));
    }
    Ok(v as u32)
}

fn vector(path: &str, data: &[i64], len: usize, field: PrimeField) -> Result<Vec<u32>, SpecError> {
    if data.len() != len {
        return Err(SpecError::new(
            path,
            format!("expected {len} entries, found {}", data.len()),
        ));
    }
    data.iter()
        .enumerate()
        .map(|(i, &v)| residue(&format!("{path}[{i}]"), v, field))
        .collect()
}

fn matrix(path: &str, data: &[Vec<i64>], shape: (usize, usize), field: PrimeField) -> Result<Vec<u32>, SpecError> {
    if data.len() != shape.0 {
        return Err(SpecError::new(
            path,
            format!("expected {} entries, found {}", shape.0, data.len()),
        ));
    }
    let mut out = Vec::with_capacity(shape.0 * shape.1);
    for (i, row) in data.iter().enumerate() {
        out.extend(vector(&format!("{path}[{i}]"), row, shape.1, field)?);
    }
    Ok(out)
}

/// Flattens `data[i][j][k]` to `(i*d1 + j)*d2 + k` after checking shape and
/// residues.
fn tensor(path: &str, data: &Tensor3, shape: (usize, usize, usize), field: PrimeField) -> Result<Vec<u32>, SpecError> {
    if data.len() != shape.0 {
        return Err(SpecError::new(
            path,
            format!("expected {} entries, found {}", shape.0, data.len()),
        ));
    }
    let mut out = Vec::with_capacity(shape.0 * shape.1 * shape.2);
    for (i, slab) in data.iter().enumerate() {
        out.extend(matrix(&format!("{path}[{i}]"), slab, (shape.1, shape.2), field)?);
    }
    Ok(out)
}

fn field_of(path: &str, p: u64) -> Result<PrimeField, SpecError> {
    PrimeField::new(p).map_err(|e| SpecError::new(path, e.to_string()))
}

fn unflatten3(data: &[u32], shape: (usize, usize, usize)) -> Tensor3 {
    (0..shape.0)
        .map(|i| {
            (0..shape.1)
                .map(|j| {
                    let start = (i * shape.1 + j) * shape.2;
                    data[start..start + shape.2].iter().map(|&v| v as i64).collect()
                })
                .collect()
        })
        .collect()
}

impl AlgebraSpec {
    pub fn from_algebra(alg: &Algebra) -> Self {
        let d = alg.dim();
        AlgebraSpec {
            p: alg.field().modulus() as u64,
            dim: d,
            unit: alg.unit().iter().map(|&v| v as i64).collect(),
            mult: unflatten3(alg.structure_constants(), (d, d, d)),
        }
    }

    /// Shapes and residues only; axioms are left to [`Algebra::validate`].
    pub fn to_algebra(&self, path: &str) -> Result<Algebra, SpecError> {
        let field = field_of(&join(path, "p"), self.p)?;
        let d = self.dim;
        let unit = vector(&join(path, "unit"), &self.unit, d, field)?;
        let mult = tensor(&join(path, "mult"), &self.mult, (d, d, d), field)?;
        Algebra::new(field, d, mult, unit).map_err(|e| SpecError::new(path, e.to_string()))
    }
}

impl ModuleSpec {
    fn from_bimodule(m: &Bimodule) -> Self {
        ModuleSpec {
            dim: m.dim(),
            left: unflatten3(m.left_tensor(), (m.left_dim(), m.dim(), m.dim())),
            right: unflatten3(m.right_tensor(), (m.dim(), m.right_dim(), m.dim())),
        }
    }

    fn to_bimodule(
        &self,
        path: &str,
        left_dim: usize,
        right_dim: usize,
        field: PrimeField,
    ) -> Result<Bimodule, SpecError> {
        let d = self.dim;
        let left = tensor(&join(path, "left"), &self.left, (left_dim, d, d), field)?;
        let right = tensor(&join(path, "right"), &self.right, (d, right_dim, d), field)?;
        Bimodule::new(left_dim, right_dim, d, left, right).map_err(|e| SpecError::new(path, e.to_string()))
    }
}

impl GmaSpec {
    pub fn from_gma(g: &Gma) -> Self {
        let c = g.context();
        let (da, db, dm, dn) = (c.a.dim(), c.b.dim(), c.m.dim(), c.n.dim());
        GmaSpec {
            p: g.field().modulus() as u64,
            a: AlgebraSpec::from_algebra(&c.a),
            b: AlgebraSpec::from_algebra(&c.b),
            m: ModuleSpec::from_bimodule(&c.m),
            n: ModuleSpec::from_bimodule(&c.n),
            phi: unflatten3(c.phi.tensor(), (dm, dn, da)),
            psi: unflatten3(c.psi.tensor(), (dn, dm, db)),
        }
    }

    /// Checks shapes and residues and assembles the flat algebra; the
    /// Morita axioms are left to [`Gma::validate`].
    pub fn to_gma(&self) -> Result<Gma, SpecError> {
        let field = field_of("p", self.p)?;
        for (name, spec) in [("A", &self.a), ("B", &self.b)] {
            if spec.p != self.p {
                return Err(SpecError::new(
                    join(name, "p"),
                    format!("modulus {} differs from p = {}", spec.p, self.p),
                ));
            }
        }
        let a = self.a.to_algebra("A")?;
        let b = self.b.to_algebra("B")?;
        let (da, db, dm, dn) = (a.dim(), b.dim(), self.m.dim, self.n.dim);
        let m = self.m.to_bimodule("M", da, db, field)?;
        let n = self.n.to_bimodule("N", db, da, field)?;
        let phi = Pairing::new(dm, dn, da, tensor("phiMN", &self.phi, (dm, dn, da), field)?)
            .map_err(|e| SpecError::new("phiMN", e.to_string()))?;
        let psi = Pairing::new(dn, dm, db, tensor("psiNM", &self.psi, (dn, dm, db), field)?)
            .map_err(|e| SpecError::new("psiNM", e.to_string()))?;
        Gma::from_context(MoritaContext { a, b, m, n, phi, psi }).map_err(|e| SpecError::new("", e.to_string()))
    }
}

impl BilinearSpec {
    pub fn from_bilinear(q: &BilinearMapRep) -> Self {
        let d = q.dim();
        BilinearSpec {
            dim: d,
            tensor: unflatten3(q.tensor(), (d, d, d)),
        }
    }

    pub fn to_bilinear(&self, field: PrimeField, expected_dim: usize) -> Result<BilinearMapRep, SpecError> {
        if self.dim != expected_dim {
            return Err(SpecError::new(
                "dim",
                format!("expected {expected_dim}, found {}", self.dim),
            ));
        }
        let d = self.dim;
        Ok(BilinearMapRep::new(
            field,
            d,
            tensor("tensor", &self.tensor, (d, d, d), field)?,
        ))
    }
}

impl LinearMapSpec {
    pub fn from_map(l: &LinearMapRep) -> Self {
        LinearMapSpec {
            source_dim: l.source_dim(),
            target_dim: l.target_dim(),
            matrix: l
                .columns()
                .into_iter()
                .map(|c| c.into_iter().map(|v| v as i64).collect())
                .collect(),
        }
    }

    pub fn to_map(&self, field: PrimeField, source_dim: usize, target_dim: usize) -> Result<LinearMapRep, SpecError> {
        if self.source_dim != source_dim {
            return Err(SpecError::new(
                "source_dim",
                format!("expected {source_dim}, found {}", self.source_dim),
            ));
        }
        if self.target_dim != target_dim {
            return Err(SpecError::new(
                "target_dim",
                format!("expected {target_dim}, found {}", self.target_dim),
            ));
        }
        let flat = matrix("matrix", &self.matrix, (source_dim, target_dim), field)?;
        Ok(LinearMapRep::from_column_major(field, source_dim, target_dim, &flat))
    }
}

pub fn parse_algebra(text: &str) -> Result<Algebra, SpecError> {
    from_str::<AlgebraSpec>(text)?.to_algebra("")
}

pub fn parse_gma(text: &str) -> Result<Gma, SpecError> {
    from_str::<GmaSpec>(text)?.to_gma()
}

/// A bilinear map on the flat algebra of a GMA with the given field and dimension.
pub fn parse_bilinear(text: &str, field: PrimeField, dim: usize) -> Result<BilinearMapRep, SpecError> {
    from_str::<BilinearSpec>(text)?.to_bilinear(field, dim)
}

pub fn parse_linear_map(
    text: &str,
    field: PrimeField,
    source_dim: usize,
    target_dim: usize,
) -> Result<LinearMapRep, SpecError> {
    from_str::<LinearMapSpec>(text)?.to_map(field, source_dim, target_dim)
}

pub fn gma_to_json(g: &Gma) -> String {
    serde_json::to_string_pretty(&GmaSpec::from_gma(g)).expect("plain data serializes")
}

pub fn algebra_to_json(alg: &Algebra) -> String {
    serde_json::to_string_pretty(&AlgebraSpec::from_algebra(alg)).expect("plain data serializes")
}

pub fn bilinear_to_json(q: &BilinearMapRep) -> String {
    serde_json::to_string_pretty(&BilinearSpec::from_bilinear(q)).expect("plain data serializes")
}

pub fn linear_map_to_json(l: &LinearMapRep) -> String {
    serde_json::to_string_pretty(&LinearMapSpec::from_map(l)).expect("plain data serializes")
}
