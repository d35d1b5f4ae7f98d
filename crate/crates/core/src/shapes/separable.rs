use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::model::{stream_rng, ShapeFamily};
use crate::error::{Error, Result};

/// Spatial basis function `h_k`.
pub type Basis = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
/// Parameter function `g_k`.
pub type Coef = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Number of random `(x, theta)` pairs checked at construction.
pub const SELF_CHECK_PAIRS: usize = 1000;
/// Largest accepted gap between the factorized and the reference ODF.
pub const SELF_CHECK_TOL: f64 = 1e-12;

/// An ODF written as `h(x)^T g(theta)` with `K` spatial basis functions.
#[derive(Clone)]
pub struct SeparableODF {
    names: Vec<String>,
    h: Vec<Basis>,
    g: Vec<Coef>,
    param_dim: usize,
}

impl fmt::Debug for SeparableODF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableODF").field("names", &self.names).field("param_dim", &self.param_dim).finish()
    }
}

impl SeparableODF {
    /// Builds a decomposition and checks it against `reference` at
    /// [`SELF_CHECK_PAIRS`] random points drawn from `[-5, 5]^2` and
    /// `params` (one range per parameter coordinate).
    pub fn new(
        h: Vec<(String, Basis)>,
        g: Vec<Coef>,
        params: &[(f64, f64)],
        reference: impl Fn([f64; 2], &[f64]) -> f64,
    ) -> Result<Self> {
        if h.is_empty() || h.len() != g.len() {
            return Err(Error::DimMismatch { expected: h.len().max(1), got: g.len() });
        }
        let (names, h) = h.into_iter().unzip();
        let s = Self { names, h, g, param_dim: params.len() };
        let mut rng = stream_rng(0x5e9a_ab1e, 0);
        for _ in 0..SELF_CHECK_PAIRS {
            let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let theta: Vec<f64> = params.iter().map(|&(a, b)| rng.random_range(a..b)).collect();
            let (got, want) = (s.eval(x, &theta), reference(x, &theta));
            if (got - want).abs() > SELF_CHECK_TOL * (1.0 + want.abs()) {
                return Err(Error::NotSeparable(format!(
                    "factorization disagrees at x={x:?}, theta={theta:?}: {got} vs {want}"
                )));
            }
        }
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn h(&self, x: [f64; 2]) -> Vec<f64> {
        self.h.iter().map(|f| f(x)).collect()
    }

    pub fn g(&self, theta: &[f64]) -> Vec<f64> {
        self.g.iter().map(|f| f(theta)).collect()
    }

    pub fn eval(&self, x: [f64; 2], theta: &[f64]) -> f64 {
        self.h.iter().zip(&self.g).map(|(h, g)| h(x) * g(theta)).sum()
    }

    /// `h(x)^T v`, e.g. with `v = E g(Theta)` to get the expected ODF.
    pub fn eval_with(&self, x: [f64; 2], v: &[f64]) -> Result<f64> {
        if v.len() != self.k() {
            return Err(Error::DimMismatch { expected: self.k(), got: v.len() });
        }
        Ok(self.h.iter().zip(v).map(|(h, c)| h(x) * c).sum())
    }
}

/// Named spatial basis function.
pub fn basis(name: &str, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> (String, Basis) {
    (name.to_string(), Arc::new(f))
}

/// Parameter function.
pub fn coef(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Coef {
    Arc::new(f)
}

/// Factorization of the family's ODF.
///
/// * ball: `h = (|x - c|, -1)`, `g = (1, theta)`
/// * half-plane: `h = (x1, -1)`, `g = (1, theta)`
/// * upper half-plane: `h = (x1, -x2)`, `g = (sin theta, cos theta)`
///
/// Other families are not separable.
pub fn separable_decomposition(family: &ShapeFamily) -> Result<SeparableODF> {
    let reference = |fam: ShapeFamily| {
        move |x: [f64; 2], t: &[f64]| fam.instantiate(t).expect("parameter in range").odf(x)
    };
    match family {
        ShapeFamily::Ball { center } => {
            let c = *center;
            SeparableODF::new(
                vec![basis("|x-c|", move |x| (x[0] - c[0]).hypot(x[1] - c[1])), basis("-1", |_| -1.0)],
                vec![coef(|_| 1.0), coef(|t| t[0])],
                &[(0.01, 5.0)],
                reference(family.clone()),
            )
        }
        ShapeFamily::HalfPlane => SeparableODF::new(
            vec![basis("x1", |x| x[0]), basis("-1", |_| -1.0)],
            vec![coef(|_| 1.0), coef(|t| t[0])],
            &[(-5.0, 5.0)],
            reference(family.clone()),
        ),
        ShapeFamily::UpperHalfPlane => SeparableODF::new(
            vec![basis("x1", |x| x[0]), basis("-x2", |x| -x[1])],
            vec![coef(|t| t[0].sin()), coef(|t| t[0].cos())],
            &[(-std::f64::consts::FRAC_PI_2 + 1e-9, std::f64::consts::FRAC_PI_2)],
            reference(family.clone()),
        ),
        other => Err(Error::NotSeparable(format!("{other:?}"))),
    }
}

/// Symmetric positive semidefinite `K x K` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix(DMatrix<f64>);

impl CovMatrix {
    pub const TOL: f64 = 1e-9;

    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadConfig("covariance has non-finite entries".into()));
        }
        if (&m - m.transpose()).amax() > Self::TOL {
            return Err(Error::BadConfig("covariance is not symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(m.clone()).eigenvalues.min();
        if m.nrows() > 0 && min_eig < -Self::TOL {
            return Err(Error::BadConfig(format!("covariance is not PSD (eigenvalue {min_eig})")));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimMismatch { expected: k, got: bad.len() });
        }
        Self::new(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
    }

    pub fn zeros(k: usize) -> Self {
        Self(DMatrix::zeros(k, k))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    /// Sample covariance of vectors of equal length.
    pub fn sample(vectors: &[Vec<f64>]) -> Result<Self> {
        let n = vectors.len();
        if n < 2 {
            return Err(Error::EmptyInput);
        }
        let k = vectors[0].len();
        let data = DMatrix::from_fn(n, k, |i, j| vectors[i][j]);
        let mean = data.row_mean();
        let centered = DMatrix::from_fn(n, k, |i, j| data[(i, j)] - mean[j]);
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        Self::new((&cov + cov.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `h(x)^T C h(y)`: covariance of the random ODF values at `x` and `y`.
pub fn separable_covariance(decomp: &SeparableODF, cov: &CovMatrix, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    if cov.dim() != decomp.k() {
        return Err(Error::DimMismatch { expected: decomp.k(), got: cov.dim() });
    }
    let hx = nalgebra::DVector::from_vec(decomp.h(x));
    let hy = nalgebra::DVector::from_vec(decomp.h(y));
    Ok(hx.dot(&(cov.matrix() * hy)))
}
