//! JSON exchange formats.
//!
//! - matrix: `{"dims":[dA,dB],"re":[[..]],"im":[[..]]}` (row-major, `dA·dB` rows); local
//!   operators use `dims = [d, 1]`
//! - decomposition: `{"dims":[dA,dB],"terms":[{"p":..,"v_re":[..],"v_im":[..],"w_re":[..],"w_im":[..]}]}`
//! - Holevo channel: `{"elements":[{"F":matrix,"rho":matrix}],"dims":[dA,dB]}`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holevo::{HolevoChannel, HolevoElement};
use crate::separability::{ProductDecomposition, ProductTerm};
use crate::tensor::{CMatrix, CVector, Dims, HermitianOp, C64};

/// Largest accepted total dimension, to keep untrusted input bounded.
pub const MAX_DIM: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub p: f64,
    pub v_re: Vec<f64>,
    pub v_im: Vec<f64>,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub dims: [usize; 2],
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    #[serde(rename = "F")]
    pub povm: MatrixJson,
    pub rho: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolevoJson {
    pub elements: Vec<ElementJson>,
    pub dims: [usize; 2],
}

fn checked_dims(dims: [usize; 2]) -> Result<Dims> {
    let [a, b] = dims;
    if a == 0 || b == 0 || a.checked_mul(b).is_none_or(|n| n > MAX_DIM) {
        return Err(Error::range(format!("dims {dims:?} outside 1..={MAX_DIM} total")));
    }
    Ok(Dims::new(a, b))
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::invalid("non-finite number"))
    }
}

impl MatrixJson {
    pub fn from_matrix(dims: Dims, m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        MatrixJson {
            dims: [dims.a, dims.b],
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_op(x: &HermitianOp) -> Self {
        Self::from_matrix(x.dims(), x.matrix())
    }

    pub fn to_matrix(&self) -> Result<(Dims, CMatrix)> {
        let dims = checked_dims(self.dims)?;
        let n = dims.total();
        if self.re.len() != n || self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(Error::dims(format!("matrix entries are not {n}x{n}")));
        }
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(finite(self.re[i][j])?, finite(self.im[i][j])?);
            }
        }
        Ok((dims, m))
    }

    pub fn to_op(&self) -> Result<HermitianOp> {
        let (dims, m) = self.to_matrix()?;
        HermitianOp::new(dims, m)
    }
}

fn complex_vec(re: &[f64], im: &[f64], len: usize) -> Result<CVector> {
    if re.len() != len || im.len() != len {
        return Err(Error::dims(format!("vector components are not of length {len}")));
    }
    let mut v = CVector::zeros(len);
    for k in 0..len {
        v[k] = C64::new(finite(re[k])?, finite(im[k])?);
    }
    Ok(v)
}

impl DecompositionJson {
    pub fn from_decomposition(dec: &ProductDecomposition) -> Self {
        let d = dec.dims();
        DecompositionJson {
            dims: [d.a, d.b],
            terms: dec
                .terms()
                .iter()
                .map(|t| TermJson {
                    p: t.weight,
                    v_re: t.v.iter().map(|z| z.re).collect(),
                    v_im: t.v.iter().map(|z| z.im).collect(),
                    w_re: t.w.iter().map(|z| z.re).collect(),
                    w_im: t.w.iter().map(|z| z.im).collect(),
                })
                .collect(),
        }
    }

    pub fn to_decomposition(&self) -> Result<ProductDecomposition> {
        let dims = checked_dims(self.dims)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let v = complex_vec(&t.v_re, &t.v_im, dims.a)?;
            let w = complex_vec(&t.w_re, &t.w_im, dims.b)?;
            if v.norm() == 0.0 || w.norm() == 0.0 {
                return Err(Error::invalid("zero factor vector"));
            }
            terms.push(ProductTerm::new(finite(t.p)?, v, w));
        }
        ProductDecomposition::new(dims, terms)
    }
}

impl HolevoJson {
    pub fn from_channel(ch: &HolevoChannel) -> Self {
        let d = ch.dims();
        HolevoJson {
            dims: [d.a, d.b],
            elements: ch
                .elements()
                .iter()
                .map(|el| ElementJson {
                    povm: MatrixJson::from_matrix(Dims::new(d.a, 1), &el.povm),
                    rho: MatrixJson::from_matrix(Dims::new(d.b, 1), &el.state),
                })
                .collect(),
        }
    }

    pub fn to_channel(&self) -> Result<HolevoChannel> {
        let dims = checked_dims(self.dims)?;
        let mut elements = Vec::with_capacity(self.elements.len());
        for el in &self.elements {
            let (_, povm) = el.povm.to_matrix()?;
            let (_, state) = el.rho.to_matrix()?;
            elements.push(HolevoElement { povm, state });
        }
        HolevoChannel::new(dims, elements)
    }
}

pub fn parse_matrix(json: &str) -> Result<HermitianOp> {
    serde_json::from_str::<MatrixJson>(json)?.to_op()
}

pub fn parse_decomposition(json: &str) -> Result<ProductDecomposition> {
    serde_json::from_str::<DecompositionJson>(json)?.to_decomposition()
}

pub fn parse_holevo(json: &str) -> Result<HolevoChannel> {
    serde_json::from_str::<HolevoJson>(json)?.to_channel()
}

pub fn matrix_to_json(x: &HermitianOp) -> String {
    serde_json::to_string(&MatrixJson::from_op(x)).expect("matrix serializes")
}

pub fn decomposition_to_json(dec: &ProductDecomposition) -> String {
    serde_json::to_string(&DecompositionJson::from_decomposition(dec)).expect("decomposition serializes")
}

pub fn holevo_to_json(ch: &HolevoChannel) -> String {
    serde_json::to_string(&HolevoJson::from_channel(ch)).expect("channel serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holevo::{discretize_covariant, CovariantFamily, Sampling};
    use crate::separability::choi_critical_decomposition;
    use crate::tensor::max_entangled_projector;

    #[test]
    fn matrix_round_trip() {
        let x = max_entangled_projector(3);
        let back = parse_matrix(&matrix_to_json(&x)).unwrap();
        assert!(back.frobenius_distance(&x) < 1e-15);
    }

    #[test]
    fn decomposition_round_trip() {
        let dec = choi_critical_decomposition();
        let back = parse_decomposition(&decomposition_to_json(&dec)).unwrap();
        assert!(back.assemble().frobenius_distance(&dec.assemble()) < 1e-15);
    }

    #[test]
    fn holevo_round_trip() {
        let ch = discretize_covariant(CovariantFamily::WernerT { d: 2 }, 8, 1, Sampling::Orbit).unwrap();
        let back = parse_holevo(&holevo_to_json(&ch)).unwrap();
        assert_eq!(back.len(), ch.len());
        assert!(back.choi().frobenius_distance(&ch.choi()) < 1e-15);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_matrix("{").is_err());
        assert!(parse_matrix(r#"{"dims":[1,1],"re":[[1.0]],"im":[[0.5]]}"#).is_err());
        assert!(parse_matrix(r#"{"dims":[2,1],"re":[[1.0]],"im":[[0.0]]}"#).is_err());
        assert!(parse_matrix(r#"{"dims":[100000,100000],"re":[],"im":[]}"#).is_err());
        assert!(parse_matrix(r#"{"dims":[1,1],"re":[[1.0]],"im":[[0.0]]}"#).is_ok());
        assert!(parse_decomposition(r#"{"dims":[1,1],"terms":[{"p":-1,"v_re":[1],"v_im":[0],"w_re":[1],"w_im":[0]}]}"#).is_err());
    }
}
