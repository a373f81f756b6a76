use serde::{Deserialize, Serialize};

use crate::corekit::{Field, Weight, Window};
use crate::tfa::modulation_norm;
use crate::{Error, Result, C64};

/// Highest total degree `j + k` accepted in a nonlinearity.
pub const MAX_DEGREE: usize = 9;

/// One monomial `c · u^j ū^k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub j: usize,
    pub k: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Monomial {
    pub fn coef(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// `F(u) = Σ c_{jk} u^j ū^k` with `c_{00} = 0` and total degree at most [`MAX_DEGREE`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct AnalyticNonlinearity {
    terms: Vec<Monomial>,
}

impl TryFrom<Vec<Monomial>> for AnalyticNonlinearity {
    type Error = Error;
    fn try_from(terms: Vec<Monomial>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<AnalyticNonlinearity> for Vec<Monomial> {
    fn from(f: AnalyticNonlinearity) -> Self {
        f.terms
    }
}

impl AnalyticNonlinearity {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        for m in &terms {
            if m.j + m.k == 0 {
                return Err(Error::InvalidParameter("F(0) must vanish: constant term not allowed".into()));
            }
            if m.j + m.k > MAX_DEGREE {
                return Err(Error::InvalidParameter(format!("degree {} above {MAX_DEGREE}", m.j + m.k)));
            }
            if !(m.re.is_finite() && m.im.is_finite()) {
                return Err(Error::NonFinite("nonlinearity coefficient"));
            }
        }
        Ok(Self { terms })
    }

    /// `F ≡ 0`.
    pub fn zero() -> Self {
        Self::default()
    }

    /// `g |u|² u`.
    pub fn cubic(g: f64) -> Self {
        Self { terms: vec![Monomial { j: 2, k: 1, re: g, im: 0.0 }] }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|m| m.coef() == C64::new(0.0, 0.0))
    }

    /// Every term has the form `c |u|^{2k} u` with real `c`, so `|u|` is conserved by `u' = -iF(u)`.
    pub fn is_gauge_real(&self) -> bool {
        self.terms.iter().all(|m| m.j == m.k + 1 && m.im == 0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|m| m.j + m.k).max().unwrap_or(0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let zc = z.conj();
        self.terms.iter().map(|m| m.coef() * z.powu(m.j as u32) * zc.powu(m.k as u32)).sum()
    }
}

/// Pointwise `F(u)`.
#[allow(non_snake_case)]
pub fn apply_F(f: &AnalyticNonlinearity, u: &Field) -> Field {
    u.map(|_, z| f.eval(z))
}

/// Measured algebra constant `max ‖fg‖_{M¹} / (‖f‖_{M¹} ‖g‖_{M¹})` over a corpus of pairs.
pub fn algebra_constant(pairs: &[(Field, Field)], g: &Window) -> Result<f64> {
    let m1 = |f: &Field| modulation_norm(f, 1.0, 1.0, &Weight::UNIT, g);
    let mut c: f64 = 0.0;
    for (a, b) in pairs {
        let (na, nb) = (m1(a)?, m1(b)?);
        if na > 0.0 && nb > 0.0 {
            c = c.max(m1(&a.mul(b))? / (na * nb));
        }
    }
    Ok(c)
}
