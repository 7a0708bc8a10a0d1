use serde::{Deserialize, Serialize};

use super::SvmError;

/// Kernel function and its parameters.
///
/// The polynomial kernel is `(gamma * <u, v> + coef0)^degree`; the usual
/// completion when only gamma is known is degree 3 and coef0 0, see
/// [`KernelConfig::poly`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelConfig {
    Linear,
    Poly { gamma: f64, degree: u32, coef0: f64 },
    Rbf { gamma: f64 },
}

impl KernelConfig {
    pub fn poly(gamma: f64) -> Self {
        KernelConfig::Poly {
            gamma,
            degree: 3,
            coef0: 0.0,
        }
    }

    pub fn rbf(gamma: f64) -> Self {
        KernelConfig::Rbf { gamma }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelConfig::Linear => "linear",
            KernelConfig::Poly { .. } => "poly",
            KernelConfig::Rbf { .. } => "rbf",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            KernelConfig::Linear => None,
            KernelConfig::Poly { gamma, .. } | KernelConfig::Rbf { gamma } => Some(gamma),
        }
    }

    /// Returns a copy with gamma replaced; linear kernels are unchanged.
    pub fn with_gamma(self, gamma: f64) -> Self {
        match self {
            KernelConfig::Linear => self,
            KernelConfig::Poly { degree, coef0, .. } => KernelConfig::Poly { gamma, degree, coef0 },
            KernelConfig::Rbf { .. } => KernelConfig::Rbf { gamma },
        }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        match *self {
            KernelConfig::Linear => Ok(()),
            KernelConfig::Poly { gamma, degree, coef0 } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(SvmError::InvalidConfig(format!("gamma must be positive, got {gamma}")));
                }
                if degree < 1 {
                    return Err(SvmError::InvalidConfig("degree must be at least 1".into()));
                }
                if !coef0.is_finite() {
                    return Err(SvmError::InvalidConfig("coef0 must be finite".into()));
                }
                Ok(())
            }
            KernelConfig::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(SvmError::InvalidConfig(format!("gamma must be positive, got {gamma}")))
                }
            }
        }
    }

    /// Evaluates the kernel on two equally sized vectors.
    pub fn eval(&self, u: &[f64], v: &[f64]) -> Result<f64, SvmError> {
        if u.len() != v.len() {
            return Err(SvmError::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelConfig::Linear => dot(u, v),
            KernelConfig::Poly { gamma, degree, coef0 } => (gamma * dot(u, v) + coef0).powi(degree as i32),
            KernelConfig::Rbf { gamma } => {
                let sq: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * sq).exp()
            }
        }
    }
}

/// Kernel evaluation as a free function.
pub fn kernel_eval(cfg: &KernelConfig, u: &[f64], v: &[f64]) -> Result<f64, SvmError> {
    cfg.eval(u, v)
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Full Gram matrix, row-major.
pub(crate) fn gram_matrix(kernel: &KernelConfig, x: &[&[f64]]) -> Vec<f64> {
    let n = x.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = kernel.eval_unchecked(x[i], x[j]);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    gram
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let rbf = KernelConfig::rbf(0.5);
        assert_eq!(rbf.eval(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(KernelConfig::Linear.eval(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        // <u, v> = 10
        let k = KernelConfig::poly(0.006).eval(&[2.0, 1.0], &[4.0, 2.0]).unwrap();
        assert!((k - 2.16e-4).abs() < 1e-18);
        assert!(matches!(
            KernelConfig::Linear.eval(&[1.0], &[1.0, 2.0]),
            Err(SvmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(KernelConfig::rbf(0.0).validate().is_err());
        assert!(KernelConfig::rbf(-1.0).validate().is_err());
        assert!(KernelConfig::Poly {
            gamma: 1.0,
            degree: 0,
            coef0: 0.0
        }
        .validate()
        .is_err());
        assert!(KernelConfig::poly(0.006).validate().is_ok());
    }

    #[test]
    fn kernel_serde_shape() {
        let json = serde_json::to_string(&KernelConfig::poly(0.006)).unwrap();
        assert_eq!(json, r#"{"kind":"poly","gamma":0.006,"degree":3,"coef0":0.0}"#);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn kernels() -> impl Strategy<Value = KernelConfig> {
            prop_oneof![
                Just(KernelConfig::Linear),
                (0.001f64..2.0, 1u32..4, -1.0f64..1.0).prop_map(|(gamma, degree, coef0)| KernelConfig::Poly {
                    gamma,
                    degree,
                    coef0
                }),
                (0.001f64..2.0).prop_map(KernelConfig::rbf),
            ]
        }

        proptest! {
            #[test]
            fn symmetric(k in kernels(), pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6)) {
                let (u, v): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                prop_assert_eq!(k.eval(&u, &v).unwrap(), k.eval(&v, &u).unwrap());
            }

            #[test]
            fn rbf_gram_unit_diagonal(gamma in 0.001f64..2.0, pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..6)) {
                let k = KernelConfig::rbf(gamma);
                let rows: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
                let g = gram_matrix(&k, &rows);
                let n = rows.len();
                for i in 0..n {
                    prop_assert_eq!(g[i * n + i], 1.0);
                    for j in 0..n {
                        prop_assert_eq!(g[i * n + j], g[j * n + i]);
                    }
                }
            }
        }
    }
}
