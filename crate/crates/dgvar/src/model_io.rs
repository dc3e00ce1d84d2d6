//! JSON model files. Matrices may be given dense (row-major) or as a
//! diagonal shorthand; the distribution is "normal" or {"t": {"nu": ...}}.

use serde::{Deserialize, Serialize};

use crate::error::{DgvarError, Result};
use crate::linalg::Mat;
use crate::spectral::{DeltaGammaModel, Dist};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    pub p: usize,
    pub sigma: MatrixRepr,
    pub delta: Vec<f64>,
    pub gamma: MatrixRepr,
    #[serde(default)]
    pub theta: f64,
    pub dt: f64,
    pub dist: DistRepr,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixRepr {
    Diag { diag: Vec<f64> },
    Dense(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum DistRepr {
    Normal,
    T { nu: f64 },
}

impl MatrixRepr {
    fn to_mat(&self, p: usize, field: &str) -> Result<Mat> {
        match self {
            MatrixRepr::Diag { diag } => {
                if diag.len() != p {
                    return Err(DgvarError::InvalidModel(format!(
                        "{field}.diag: expected {p} entries, got {}",
                        diag.len()
                    )));
                }
                Ok(Mat::diag(diag))
            }
            MatrixRepr::Dense(vals) => {
                if vals.len() != p * p {
                    return Err(DgvarError::InvalidModel(format!(
                        "{field}: expected {} row-major entries, got {}",
                        p * p,
                        vals.len()
                    )));
                }
                Ok(Mat::from_row_major(p, vals))
            }
        }
    }

    fn from_mat(m: &Mat) -> Self {
        let p = m.rows();
        let mut off_diag = false;
        for i in 0..p {
            for j in 0..p {
                if i != j && m[(i, j)] != 0.0 {
                    off_diag = true;
                }
            }
        }
        if off_diag {
            let mut vals = Vec::with_capacity(p * p);
            for i in 0..p {
                for j in 0..p {
                    vals.push(m[(i, j)]);
                }
            }
            MatrixRepr::Dense(vals)
        } else {
            MatrixRepr::Diag {
                diag: (0..p).map(|i| m[(i, i)]).collect(),
            }
        }
    }
}

impl ModelFile {
    pub fn to_model(&self) -> Result<DeltaGammaModel> {
        if self.delta.len() != self.p {
            return Err(DgvarError::InvalidModel(format!(
                "delta: expected {} entries, got {}",
                self.p,
                self.delta.len()
            )));
        }
        let model = DeltaGammaModel {
            sigma: self.sigma.to_mat(self.p, "sigma")?,
            delta: self.delta.clone(),
            gamma_matrix: self.gamma.to_mat(self.p, "gamma")?,
            theta: self.theta,
            dt: self.dt,
            dist: match self.dist {
                DistRepr::Normal => Dist::Normal,
                DistRepr::T { nu } => Dist::StudentT { nu },
            },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_model(model: &DeltaGammaModel) -> Self {
        ModelFile {
            p: model.dim(),
            sigma: MatrixRepr::from_mat(&model.sigma),
            delta: model.delta.clone(),
            gamma: MatrixRepr::from_mat(&model.gamma_matrix),
            theta: model.theta,
            dt: model.dt,
            dist: match model.dist {
                Dist::Normal => DistRepr::Normal,
                Dist::StudentT { nu } => DistRepr::T { nu },
            },
        }
    }
}

pub fn parse_model(json: &str) -> Result<DeltaGammaModel> {
    let file: ModelFile =
        serde_json::from_str(json).map_err(|e| DgvarError::InvalidModel(e.to_string()))?;
    file.to_model()
}

pub fn write_model(model: &DeltaGammaModel) -> String {
    // serde_json emits the shortest representation that round-trips f64
    // exactly, so read-back is bit-identical.
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_dense_and_diag() {
        let m = parse_model(
            r#"{"p":2,"sigma":{"diag":[1.0,2.0]},"delta":[1.0,0.0],
                "gamma":[1.0,0.5,0.5,0.0],"dt":1.0,"dist":"normal"}"#,
        )
        .unwrap();
        assert_eq!(m.sigma[(1, 1)], 2.0);
        assert_eq!(m.gamma_matrix[(0, 1)], 0.5);
        assert_eq!(m.theta, 0.0);
        assert_eq!(m.dist, Dist::Normal);
    }

    #[test]
    fn parse_t_dist() {
        let m = parse_model(
            r#"{"p":1,"sigma":[4.0],"delta":[1.0],"gamma":{"diag":[0.0]},
                "dt":0.5,"theta":2.0,"dist":{"t":{"nu":6.0}}}"#,
        )
        .unwrap();
        assert_eq!(m.dist, Dist::StudentT { nu: 6.0 });
        assert_eq!(m.theta, 2.0);
    }

    #[test]
    fn dimension_errors_name_the_field() {
        let err = parse_model(
            r#"{"p":2,"sigma":{"diag":[1.0]},"delta":[1.0,0.0],
                "gamma":{"diag":[0.0,0.0]},"dt":1.0,"dist":"normal"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sigma"));

        let err = parse_model(
            r#"{"p":2,"sigma":{"diag":[1.0,1.0]},"delta":[1.0,0.0],
                "gamma":[1.0,0.0,0.0],"dt":1.0,"dist":"normal"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn round_trip_bit_exact() {
        let m = parse_model(
            r#"{"p":2,"sigma":[2.0,0.30000000000000004,0.30000000000000004,1.0],
                "delta":[0.1,-0.2],"gamma":[1.0,0.5,0.5,-0.3],"dt":0.0396825,
                "theta":-1.25e-7,"dist":{"t":{"nu":6.0}}}"#,
        )
        .unwrap();
        let json = write_model(&m);
        let m2 = parse_model(&json).unwrap();
        assert_eq!(m.delta, m2.delta);
        assert_eq!(m.theta.to_bits(), m2.theta.to_bits());
        assert_eq!(m.dt.to_bits(), m2.dt.to_bits());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.sigma[(i, j)].to_bits(), m2.sigma[(i, j)].to_bits());
                assert_eq!(
                    m.gamma_matrix[(i, j)].to_bits(),
                    m2.gamma_matrix[(i, j)].to_bits()
                );
            }
        }
    }
}
