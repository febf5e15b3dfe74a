//! JSON interchange formats.
//!
//! All files are UTF-8 JSON. Complex numbers are `[re, im]` pairs and
//! matrices are nested row-major arrays of such pairs. Summand and patch
//! indices are 1-based in files and 0-based in memory.

use crate::cech::{
    AlgebraAtlas, AlgebraOverlap, AlgebraTripleOverlap, CechAtlas, CechSample, Overlap,
    TripleOverlap,
};
use crate::fields::FieldConfig;
use crate::ko::KOSignature;
use crate::krajewski::KrajewskiData;
use crate::lattice::Lattice;
use crate::triple::AlgebraElement;
use crate::CMat64;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Data(#[from] crate::krajewski::DataError),
    #[error(transparent)]
    Ko(#[from] crate::ko::KOError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error(transparent)]
    Field(#[from] crate::fields::FieldError),
}

fn invalid(field: &str, message: impl Into<String>) -> IoError {
    IoError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Row-major matrix of `[re, im]` entries.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat64) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_json(j: &JsonMatrix, field: &str) -> Result<CMat64, IoError> {
    let rows = j.len();
    if rows == 0 {
        return Err(invalid(field, "matrix has no rows"));
    }
    let cols = j[0].len();
    if cols == 0 || j.iter().any(|r| r.len() != cols) {
        return Err(invalid(field, "matrix rows have inconsistent lengths"));
    }
    let mut m = CMat64::zeros(rows, cols);
    for (r, row) in j.iter().enumerate() {
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(invalid(field, format!("non-finite entry at ({r}, {c})")));
            }
            m[(r, c)] = Complex::new(re, im);
        }
    }
    Ok(m)
}

/// On-disk form of `KrajewskiData` plus an optional Dirac matrix.
#[derive(Debug, Serialize, Deserialize)]
pub struct TripleSpecFile {
    /// Summand dimensions `N_i`.
    pub dims: Vec<usize>,
    /// 1-based `[i, j]` pairs, repeated for multiplicity.
    pub pairs: Vec<[usize; 2]>,
    /// KO-dimension, 0..=7.
    pub ko: u8,
    /// Signs aligned with sorted slot order.
    pub grading: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirac: Option<JsonMatrix>,
}

impl TripleSpecFile {
    pub fn from_data(data: &KrajewskiData, dirac: Option<&CMat64>) -> Self {
        TripleSpecFile {
            dims: data.dims.clone(),
            pairs: data
                .pairs
                .iter()
                .map(|&(i, j)| [i + 1, j + 1])
                .collect(),
            ko: data.ko.n,
            grading: data.grading.clone(),
            dirac: dirac.map(matrix_to_json),
        }
    }

    pub fn into_data(self) -> Result<(KrajewskiData, Option<CMat64>), IoError> {
        let n = self.dims.len();
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for &[i, j] in &self.pairs {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(invalid(
                    "pairs",
                    format!("pair [{i}, {j}] out of range for {n} summands (1-based)"),
                ));
            }
            pairs.push((i - 1, j - 1));
        }
        let ko = KOSignature::from_dimension(self.ko)?;
        let data = KrajewskiData {
            dims: self.dims,
            pairs,
            ko,
            grading: self.grading,
        };
        data.validate()?;
        let dirac = match &self.dirac {
            Some(j) => {
                let m = matrix_from_json(j, "dirac")?;
                let want = data.dim_h();
                if m.nrows() != want || m.ncols() != want {
                    return Err(invalid(
                        "dirac",
                        format!("expected {want}x{want}, got {}x{}", m.nrows(), m.ncols()),
                    ));
                }
                Some(m)
            }
            None => None,
        };
        Ok((data, dirac))
    }
}

pub fn parse_triple_spec(text: &str) -> Result<(KrajewskiData, Option<CMat64>), IoError> {
    serde_json::from_str::<TripleSpecFile>(text)?.into_data()
}

pub fn triple_spec_to_string(data: &KrajewskiData, dirac: Option<&CMat64>) -> String {
    serde_json::to_string_pretty(&TripleSpecFile::from_data(data, dirac)).expect("serializable")
}

/// On-disk field configuration: lattice header plus row-major per-site
/// samples.
#[derive(Debug, Serialize, Deserialize)]
pub struct FieldConfigFile {
    /// Sites per axis.
    pub lattice: Vec<usize>,
    pub spacing: f64,
    pub dim_h: usize,
    /// `b[site][axis]`, row-major site order.
    pub b: Vec<Vec<JsonMatrix>>,
    /// `phi[site]`.
    pub phi: Vec<JsonMatrix>,
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default)]
    pub weyl_sq: Vec<f64>,
    #[serde(default)]
    pub euler: Vec<f64>,
}

impl FieldConfigFile {
    pub fn from_config(cfg: &FieldConfig<f64>) -> Self {
        FieldConfigFile {
            lattice: cfg.lattice.shape().to_vec(),
            spacing: cfg.lattice.spacing(),
            dim_h: cfg.dim_h,
            b: cfg
                .b
                .iter()
                .map(|bx| bx.iter().map(matrix_to_json).collect())
                .collect(),
            phi: cfg.phi.iter().map(matrix_to_json).collect(),
            s: cfg.s.clone(),
            weyl_sq: cfg.weyl_sq.clone(),
            euler: cfg.euler.clone(),
        }
    }

    pub fn into_config(self) -> Result<FieldConfig<f64>, IoError> {
        let lattice = Lattice::new(self.lattice, self.spacing)?;
        let n = lattice.n_sites();
        let scalars = |v: Vec<f64>, field: &str| -> Result<Vec<f64>, IoError> {
            if v.is_empty() {
                Ok(vec![0.0; n])
            } else if v.len() == n {
                Ok(v)
            } else {
                Err(invalid(field, format!("{} entries for {n} sites", v.len())))
            }
        };
        let b = self
            .b
            .iter()
            .map(|bx| {
                bx.iter()
                    .map(|m| matrix_from_json(m, "b"))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let phi = self
            .phi
            .iter()
            .map(|m| matrix_from_json(m, "phi"))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = FieldConfig {
            lattice,
            b,
            phi,
            s: scalars(self.s, "s")?,
            weyl_sq: scalars(self.weyl_sq, "weyl_sq")?,
            euler: scalars(self.euler, "euler")?,
            dim_h: self.dim_h,
        };
        cfg.check_shapes()?;
        Ok(cfg)
    }
}

pub fn parse_field_config(text: &str) -> Result<FieldConfig<f64>, IoError> {
    serde_json::from_str::<FieldConfigFile>(text)?.into_config()
}

pub fn field_config_to_string(cfg: &FieldConfig<f64>) -> String {
    serde_json::to_string_pretty(&FieldConfigFile::from_config(cfg)).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasSampleFile {
    /// 1-based sample-point index.
    pub point: usize,
    pub g: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_i: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_j: Option<Vec<JsonMatrix>>,
    /// For algebra-valued cocycles: one block per summand instead of `g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<JsonMatrix>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasOverlapFile {
    /// 1-based patch indices.
    pub i: usize,
    pub j: usize,
    pub samples: Vec<AtlasSampleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasTripleFile {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// Per sample: 1-based point index and the three transition elements,
    /// each either a matrix or (for algebra atlases) a block list.
    pub samples: Vec<AtlasTripleSampleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasTripleSampleFile {
    pub point: usize,
    pub g_ij: serde_json::Value,
    pub g_jk: serde_json::Value,
    pub g_ki: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasFile {
    pub n_patches: usize,
    pub overlaps: Vec<AtlasOverlapFile>,
    #[serde(default)]
    pub triples: Vec<AtlasTripleFile>,
}

fn patch_index(x: usize, n: usize, field: &str) -> Result<usize, IoError> {
    if x == 0 || x > n {
        return Err(invalid(
            field,
            format!("patch index {x} out of range for {n} patches (1-based)"),
        ));
    }
    Ok(x - 1)
}

fn point_index(x: usize, field: &str) -> Result<usize, IoError> {
    if x == 0 {
        return Err(invalid(field, "sample-point indices are 1-based"));
    }
    Ok(x - 1)
}

fn value_matrix(v: &serde_json::Value, field: &str) -> Result<CMat64, IoError> {
    let j: JsonMatrix = serde_json::from_value(v.clone())?;
    matrix_from_json(&j, field)
}

fn value_blocks(
    v: &serde_json::Value,
    dims: &[usize],
    field: &str,
) -> Result<AlgebraElement<f64>, IoError> {
    let js: Vec<JsonMatrix> = serde_json::from_value(v.clone())?;
    blocks_to_element(&js, dims, field)
}

/// Parse one block per summand into an algebra element.
pub fn blocks_to_element(
    js: &[JsonMatrix],
    dims: &[usize],
    field: &str,
) -> Result<AlgebraElement<f64>, IoError> {
    if js.len() != dims.len() {
        return Err(invalid(
            field,
            format!("{} blocks for {} summands", js.len(), dims.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(js.len());
    for (k, j) in js.iter().enumerate() {
        let m = matrix_from_json(j, field)?;
        if m.nrows() != dims[k] || m.ncols() != dims[k] {
            return Err(invalid(
                field,
                format!("block {k} is {}x{}, summand has dimension {}", m.nrows(), m.ncols(), dims[k]),
            ));
        }
        blocks.push(m);
    }
    Ok(AlgebraElement { blocks })
}

impl AtlasFile {
    pub fn into_atlas(self) -> Result<CechAtlas<f64>, IoError> {
        let n = self.n_patches;
        let opt_dirs = |o: &Option<Vec<JsonMatrix>>, field: &str| -> Result<Option<Vec<CMat64>>, IoError> {
            match o {
                None => Ok(None),
                Some(v) => Ok(Some(
                    v.iter()
                        .map(|m| matrix_from_json(m, field))
                        .collect::<Result<Vec<_>, _>>()?,
                )),
            }
        };
        let overlaps = self
            .overlaps
            .iter()
            .map(|ov| {
                let samples = ov
                    .samples
                    .iter()
                    .map(|s| {
                        Ok(CechSample {
                            point: point_index(s.point, "samples.point")?,
                            g: matrix_from_json(&s.g, "samples.g")?,
                            dg: opt_dirs(&s.dg, "samples.dg")?,
                            omega_i: opt_dirs(&s.omega_i, "samples.omega_i")?,
                            omega_j: opt_dirs(&s.omega_j, "samples.omega_j")?,
                        })
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(Overlap {
                    i: patch_index(ov.i, n, "overlaps.i")?,
                    j: patch_index(ov.j, n, "overlaps.j")?,
                    samples,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let triples = self
            .triples
            .iter()
            .map(|t| {
                let samples = t
                    .samples
                    .iter()
                    .map(|s| {
                        Ok((
                            point_index(s.point, "triples.samples.point")?,
                            value_matrix(&s.g_ij, "triples.samples.g_ij")?,
                            value_matrix(&s.g_jk, "triples.samples.g_jk")?,
                            value_matrix(&s.g_ki, "triples.samples.g_ki")?,
                        ))
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(TripleOverlap {
                    i: patch_index(t.i, n, "triples.i")?,
                    j: patch_index(t.j, n, "triples.j")?,
                    k: patch_index(t.k, n, "triples.k")?,
                    samples,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(CechAtlas {
            n_patches: n,
            overlaps,
            triples,
        })
    }

    /// Interpret overlap samples as algebra-valued: each sample must carry
    /// `blocks`, and triple-overlap entries must be block lists.
    pub fn into_algebra_atlas(self, dims: &[usize]) -> Result<AlgebraAtlas<f64>, IoError> {
        let n = self.n_patches;
        let overlaps = self
            .overlaps
            .iter()
            .map(|ov| {
                let samples = ov
                    .samples
                    .iter()
                    .map(|s| {
                        let blocks = s.blocks.as_ref().ok_or_else(|| {
                            invalid("samples.blocks", "algebra atlas sample lacks `blocks`")
                        })?;
                        Ok((
                            point_index(s.point, "samples.point")?,
                            blocks_to_element(blocks, dims, "samples.blocks")?,
                        ))
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(AlgebraOverlap {
                    i: patch_index(ov.i, n, "overlaps.i")?,
                    j: patch_index(ov.j, n, "overlaps.j")?,
                    samples,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let triples = self
            .triples
            .iter()
            .map(|t| {
                let samples = t
                    .samples
                    .iter()
                    .map(|s| {
                        Ok((
                            point_index(s.point, "triples.samples.point")?,
                            value_blocks(&s.g_ij, dims, "triples.samples.g_ij")?,
                            value_blocks(&s.g_jk, dims, "triples.samples.g_jk")?,
                            value_blocks(&s.g_ki, dims, "triples.samples.g_ki")?,
                        ))
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(AlgebraTripleOverlap {
                    i: patch_index(t.i, n, "triples.i")?,
                    j: patch_index(t.j, n, "triples.j")?,
                    k: patch_index(t.k, n, "triples.k")?,
                    samples,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(AlgebraAtlas {
            n_patches: n,
            overlaps,
            triples,
        })
    }

    pub fn from_atlas(a: &CechAtlas<f64>) -> Self {
        let dirs = |o: &Option<Vec<CMat64>>| o.as_ref().map(|v| v.iter().map(matrix_to_json).collect());
        AtlasFile {
            n_patches: a.n_patches,
            overlaps: a
                .overlaps
                .iter()
                .map(|ov| AtlasOverlapFile {
                    i: ov.i + 1,
                    j: ov.j + 1,
                    samples: ov
                        .samples
                        .iter()
                        .map(|s| AtlasSampleFile {
                            point: s.point + 1,
                            g: matrix_to_json(&s.g),
                            dg: dirs(&s.dg),
                            omega_i: dirs(&s.omega_i),
                            omega_j: dirs(&s.omega_j),
                            blocks: None,
                        })
                        .collect(),
                })
                .collect(),
            triples: a
                .triples
                .iter()
                .map(|t| AtlasTripleFile {
                    i: t.i + 1,
                    j: t.j + 1,
                    k: t.k + 1,
                    samples: t
                        .samples
                        .iter()
                        .map(|(pt, a, b, c)| AtlasTripleSampleFile {
                            point: pt + 1,
                            g_ij: serde_json::to_value(matrix_to_json(a)).unwrap(),
                            g_jk: serde_json::to_value(matrix_to_json(b)).unwrap(),
                            g_ki: serde_json::to_value(matrix_to_json(c)).unwrap(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_atlas(text: &str) -> Result<CechAtlas<f64>, IoError> {
    serde_json::from_str::<AtlasFile>(text)?.into_atlas()
}

pub fn parse_algebra_atlas(text: &str, dims: &[usize]) -> Result<AlgebraAtlas<f64>, IoError> {
    serde_json::from_str::<AtlasFile>(text)?.into_algebra_atlas(dims)
}

pub fn atlas_to_string(a: &CechAtlas<f64>) -> String {
    serde_json::to_string_pretty(&AtlasFile::from_atlas(a)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krajewski::electrodynamics;
    use crate::matrix::max_abs;

    fn ed_dirac() -> CMat64 {
        let mut d = CMat64::zeros(4, 4);
        d[(0, 1)] = Complex::new(0.3, -0.1);
        d[(1, 0)] = Complex::new(0.3, 0.1);
        d[(2, 3)] = Complex::new(0.3, 0.1);
        d[(3, 2)] = Complex::new(0.3, -0.1);
        d
    }

    #[test]
    fn triple_spec_roundtrip() {
        let data = electrodynamics();
        let d = ed_dirac();
        let text = triple_spec_to_string(&data, Some(&d));
        let (data2, d2) = parse_triple_spec(&text).unwrap();
        assert_eq!(data.dims, data2.dims);
        assert_eq!(data.pairs, data2.pairs);
        assert_eq!(data.ko.n, data2.ko.n);
        assert_eq!(data.grading, data2.grading);
        assert_eq!(max_abs(&(d - d2.unwrap())), 0.0);
    }

    #[test]
    fn one_based_pairs_in_files() {
        let text = triple_spec_to_string(&electrodynamics(), None);
        let file: TripleSpecFile = serde_json::from_str(&text).unwrap();
        assert!(file.pairs.contains(&[1, 2]));
        assert!(file.pairs.iter().all(|&[i, j]| i >= 1 && j >= 1));
    }

    #[test]
    fn bad_indices_rejected() {
        let text = r#"{"dims":[1,1],"pairs":[[0,2]],"ko":0,"grading":[1]}"#;
        let err = parse_triple_spec(text).unwrap_err();
        assert!(matches!(err, IoError::Invalid { .. }), "{err}");
        let text = r#"{"dims":[1,1],"pairs":[[1,3]],"ko":0,"grading":[1]}"#;
        assert!(parse_triple_spec(text).is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = parse_triple_spec("{ not json").unwrap_err();
        assert!(matches!(err, IoError::Json(_)));
    }

    #[test]
    fn wrong_dirac_shape_rejected() {
        let data = electrodynamics();
        let d = CMat64::zeros(3, 3);
        let text = triple_spec_to_string(&data, Some(&d));
        assert!(parse_triple_spec(&text).is_err());
    }

    #[test]
    fn field_config_roundtrip() {
        let lat = Lattice::new(vec![3, 3], 0.5).unwrap();
        let mut cfg = FieldConfig::<f64>::zero(lat, 2);
        cfg.b[4][1][(0, 1)] = Complex::new(0.2, -0.7);
        cfg.phi[2][(1, 1)] = Complex::new(1.5, 0.0);
        cfg.s[0] = 0.3;
        let text = field_config_to_string(&cfg);
        let cfg2 = parse_field_config(&text).unwrap();
        assert_eq!(cfg2.lattice.shape(), &[3, 3]);
        assert_eq!(cfg2.lattice.spacing(), 0.5);
        assert_eq!(max_abs(&(&cfg.b[4][1] - &cfg2.b[4][1])), 0.0);
        assert_eq!(max_abs(&(&cfg.phi[2] - &cfg2.phi[2])), 0.0);
        assert_eq!(cfg2.s[0], 0.3);
        assert_eq!(cfg2.weyl_sq.len(), 9);
    }

    #[test]
    fn empty_gravity_scalars_default_to_zero() {
        let lat = Lattice::new(vec![3], 1.0).unwrap();
        let cfg = FieldConfig::<f64>::zero(lat, 1);
        let mut file = FieldConfigFile::from_config(&cfg);
        file.s.clear();
        file.weyl_sq.clear();
        file.euler.clear();
        let text = serde_json::to_string(&file).unwrap();
        let cfg2 = parse_field_config(&text).unwrap();
        assert_eq!(cfg2.s, vec![0.0; 3]);
    }

    #[test]
    fn atlas_roundtrip_with_connection_data() {
        let g = CMat64::from_element(1, 1, Complex::new(0.6, 0.8));
        let a = CechAtlas {
            n_patches: 2,
            overlaps: vec![Overlap {
                i: 0,
                j: 1,
                samples: vec![CechSample {
                    point: 0,
                    g: g.clone(),
                    dg: Some(vec![CMat64::from_element(1, 1, Complex::new(0.0, 0.1))]),
                    omega_i: Some(vec![CMat64::zeros(1, 1)]),
                    omega_j: Some(vec![CMat64::from_element(1, 1, Complex::new(0.0, 0.2))]),
                }],
            }],
            triples: vec![TripleOverlap {
                i: 0,
                j: 1,
                k: 1,
                samples: vec![(0, g.clone(), g.adjoint(), CMat64::identity(1, 1))],
            }],
        };
        let text = atlas_to_string(&a);
        let a2 = parse_atlas(&text).unwrap();
        assert_eq!(a2.n_patches, 2);
        assert_eq!(a2.overlaps[0].i, 0);
        assert_eq!(max_abs(&(&a2.overlaps[0].samples[0].g - &g)), 0.0);
        let dg = a2.overlaps[0].samples[0].dg.as_ref().unwrap();
        assert_eq!(dg[0][(0, 0)], Complex::new(0.0, 0.1));
        let (_, gij, _, _) = &a2.triples[0].samples[0];
        assert_eq!(max_abs(&(gij - &g)), 0.0);
    }

    #[test]
    fn algebra_atlas_parses_blocks() {
        let text = r#"{
            "n_patches": 2,
            "overlaps": [{
                "i": 1, "j": 2,
                "samples": [{"point": 1, "g": [[[1.0, 0.0]]],
                             "blocks": [[[[0.0, 1.0]]], [[[1.0, 0.0]]]]}]
            }],
            "triples": []
        }"#;
        let atlas = parse_algebra_atlas(text, &[1, 1]).unwrap();
        let (pt, u) = &atlas.overlaps[0].samples[0];
        assert_eq!(*pt, 0);
        assert_eq!(u.blocks[0][(0, 0)], Complex::new(0.0, 1.0));
        assert_eq!(u.blocks[1][(0, 0)], Complex::new(1.0, 0.0));
        // Wrong block count rejected.
        assert!(parse_algebra_atlas(text, &[1, 1, 1]).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = serde_json::from_str::<TripleSpecFile>("{\n  \"dims\": [1,\n").unwrap_err();
        assert!(err.line() >= 2);
    }
}
