use serde::{Deserialize, Serialize};

use super::shift::PhasePoint;

/// Closed-form moderate weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModerateForm {
    /// `⟨z⟩^s`, any real `s`.
    Phase { s: f64 },
    /// `⟨x⟩^s`.
    Spatial { s: f64 },
    /// `⟨ξ⟩^s`.
    Frequency { s: f64 },
}

/// Phase-space weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// `v_r(z) = ⟨z⟩^r = (1 + |z|²)^{r/2}`, `r ≥ 0`.
    Polynomial { r: f64 },
    /// `m` with `m(z + w) ≤ c · v_n(z) · m(w)`.
    Moderate { form: ModerateForm, c: f64, n: f64 },
}

fn bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

impl Weight {
    pub const UNIT: Weight = Weight::Polynomial { r: 0.0 };

    pub fn polynomial(r: f64) -> Self {
        Weight::Polynomial { r: r.max(0.0) }
    }

    /// A moderate weight with its sharp Peetre constants `(2^{|s|/2}, |s|)`.
    pub fn moderate(form: ModerateForm) -> Self {
        let s = match form {
            ModerateForm::Phase { s } | ModerateForm::Spatial { s } | ModerateForm::Frequency { s } => s,
        };
        Weight::Moderate { form, c: 2f64.powf(s.abs() / 2.0), n: s.abs() }
    }

    pub fn eval(&self, z: PhasePoint) -> f64 {
        weight_eval(self, z)
    }

    /// The submultiplicative weight `v` this weight is moderate with respect to, and its constant.
    pub fn moderating(&self) -> (Weight, f64) {
        match *self {
            Weight::Polynomial { r } => (*self, 2f64.powf(r / 2.0)),
            Weight::Moderate { c, n, .. } => (Weight::Polynomial { r: n }, c),
        }
    }
}

/// Evaluates the weight at `z`.
pub fn weight_eval(w: &Weight, z: PhasePoint) -> f64 {
    match *w {
        Weight::Polynomial { r } => (1.0 + z.x * z.x + z.xi * z.xi).powf(r / 2.0),
        Weight::Moderate { form, .. } => match form {
            ModerateForm::Phase { s } => (1.0 + z.x * z.x + z.xi * z.xi).powf(s / 2.0),
            ModerateForm::Spatial { s } => bracket(z.x).powf(s),
            ModerateForm::Frequency { s } => bracket(z.xi).powf(s),
        },
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn values() {
        let v2 = Weight::polynomial(2.0);
        assert_eq!(v2.eval(PhasePoint::ORIGIN), 1.0);
        assert!((v2.eval(PhasePoint::new(3.0, 4.0)) - 26.0).abs() < 1e-12);
        let v1 = Weight::polynomial(1.0);
        assert!((v1.eval(PhasePoint::new(1.0, 0.0)) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn submultiplicative_and_moderate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let weights = [
            Weight::polynomial(1.0),
            Weight::polynomial(3.0),
            Weight::moderate(ModerateForm::Phase { s: -2.0 }),
            Weight::moderate(ModerateForm::Spatial { s: 1.5 }),
            Weight::moderate(ModerateForm::Frequency { s: -1.0 }),
        ];
        for w in weights {
            let (v, c) = w.moderating();
            for _ in 0..100 {
                let z = PhasePoint::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
                let u = PhasePoint::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
                let lhs = w.eval(z + u);
                assert!(lhs <= c * v.eval(z) * w.eval(u) * (1.0 + 1e-12), "{w:?}");
            }
        }
    }
}
