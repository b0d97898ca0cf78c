//! Named sequence/operator models and the JSON catalog the CLI consumes.
//!
//! A model bundles a window generator with a default single-site coupling, so
//! spectral and transport routines can ask for "the potential of preset X at
//! coupling lambda over range R, phase j of m" without re-deriving windows at
//! every call site.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{
    ContinuedFraction, EndpointVariant, GeneratorsError, SturmianParams, Substitution,
};
use crate::schrodinger::{potential_from_sampling, Potential, SamplingFunction, SchrodingerError};
use crate::words::Window;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Generators(#[from] GeneratorsError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
}

/// What generates the symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// V = 0.
    Free,
    /// Constant potential.
    Constant { value: f64 },
    /// Sturmian coding of the golden rotation.
    GoldenSturmian,
    /// Sturmian coding with explicit continued fraction coefficients.
    Sturmian { coefficients: Vec<u64> },
    /// Substitution fixed point, rules as `"1->10, 0->1"`.
    SubstitutionRules { rules: String, seed: u32 },
    /// Independent draws from a value list, seeded.
    IidRandom { seed: u64 },
}

/// A model with its coupling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialModel {
    pub name: String,
    pub kind: ModelKind,
    /// Coupling applied through g(0) = 0, g(s != 0) = lambda (or +-lambda for
    /// the random model).
    pub lambda: f64,
}

impl PotentialModel {
    pub fn preset(name: &str, lambda: f64) -> Result<Self, ModelError> {
        let kind = match name {
            "free" => ModelKind::Free,
            "fibonacci" | "golden_sturmian" => ModelKind::GoldenSturmian,
            "silver_sturmian" => ModelKind::Sturmian {
                coefficients: vec![2; 60],
            },
            "thue_morse" => ModelKind::SubstitutionRules {
                rules: "1->10, 0->01".into(),
                seed: 1,
            },
            "period_doubling" => ModelKind::SubstitutionRules {
                rules: "1->10, 0->11".into(),
                seed: 1,
            },
            "rudin_shapiro" => ModelKind::SubstitutionRules {
                rules: "1->12, 2->13, 3->42, 4->43".into(),
                seed: 1,
            },
            "tribonacci" => ModelKind::SubstitutionRules {
                rules: "1->12, 2->13, 3->1".into(),
                seed: 1,
            },
            "random" => ModelKind::IidRandom { seed: 0x5eed },
            other => return Err(ModelError::Unknown(other.to_string())),
        };
        Ok(PotentialModel {
            name: name.to_string(),
            kind,
            lambda,
        })
    }

    /// Symbol window for one phase out of `phase_count`.
    ///
    /// Rotation models move the phase around the circle; substitution models
    /// shift the sampling origin along a long fixed point; the random model
    /// reseeds per phase.
    pub fn window(
        &self,
        phase: usize,
        phase_count: usize,
        from: i64,
        to: i64,
    ) -> Result<Window, ModelError> {
        assert!(phase < phase_count.max(1));
        let len = (to - from).max(1) as usize;
        match &self.kind {
            ModelKind::Free | ModelKind::Constant { .. } => {
                Ok(Window::from_labels(from, &vec![0u32; len]).expect("nonempty"))
            }
            ModelKind::GoldenSturmian => {
                let phi = phase as f64 / phase_count.max(1) as f64;
                let p = SturmianParams::golden(phi, EndpointVariant::LeftClosed);
                Ok(p.window(from, to)?)
            }
            ModelKind::Sturmian { coefficients } => {
                let phi = phase as f64 / phase_count.max(1) as f64;
                let cf = ContinuedFraction::from_coefficients(coefficients)?;
                let p = SturmianParams::new(cf, phi, EndpointVariant::LeftClosed)?;
                Ok(p.window(from, to)?)
            }
            ModelKind::SubstitutionRules { rules, seed } => {
                let sub = Substitution::from_str_rules(rules)?;
                // carve phase-shifted windows out of one long fixed point
                let stride = (len / 2).max(64);
                let offset = phase * stride;
                let total = offset + 2 * len + 64;
                let fp = sub.fixed_point_window(*seed, total)?;
                let sub_window = fp
                    .subwindow(1 + offset as i64, 1 + offset as i64 + len as i64)
                    .expect("fixed point long enough");
                Ok(sub_window.re_anchored(from))
            }
            ModelKind::IidRandom { seed } => {
                let mut state = seed
                    .wrapping_add(phase as u64)
                    .wrapping_mul(0x9e3779b97f4a7c15)
                    .wrapping_add(0x6a09e667f3bcc909);
                let labels: Vec<u32> = (0..len)
                    .map(|_| {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        ((state >> 23) & 1) as u32
                    })
                    .collect();
                Ok(Window::from_labels_with_alphabet(
                    from,
                    &labels,
                    crate::words::Alphabet::binary(),
                )
                .expect("binary labels"))
            }
        }
    }

    /// The sampling function pairing with this model's windows.
    pub fn sampling(&self) -> SamplingFunction {
        match &self.kind {
            ModelKind::Free => SamplingFunction::single_site(&[0.0]),
            ModelKind::Constant { value } => SamplingFunction::single_site(&[*value]),
            ModelKind::IidRandom { .. } => {
                // symmetric two-valued disorder +-lambda
                SamplingFunction::single_site(&[-self.lambda, self.lambda])
            }
            ModelKind::SubstitutionRules { rules, .. } => {
                let sub = Substitution::from_str_rules(rules).expect("preset rules parse");
                let m = sub.alphabet().size();
                // g(first symbol) = 0, all others = lambda
                let mut values = vec![self.lambda; m];
                values[0] = 0.0;
                SamplingFunction::single_site(&values)
            }
            _ => SamplingFunction::coupling(self.lambda),
        }
    }

    /// Potential over `[from, to)` for one phase.
    pub fn potential(
        &self,
        phase: usize,
        phase_count: usize,
        from: i64,
        to: i64,
    ) -> Result<Potential, ModelError> {
        let f = self.sampling();
        let (m, nf) = f.window_extent();
        let w = self.window(phase, phase_count, from - m as i64, to + nf as i64)?;
        Ok(potential_from_sampling(&w, &f, from, to)?)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sampling().sup_norm()
    }
}

/// Catalog of named presets, serializable for the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelCatalog {
    pub schema_version: u32,
    pub models: Vec<CatalogEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: ModelKind,
    pub description: String,
}

pub fn default_catalog() -> ModelCatalog {
    let entry = |name: &str, description: &str| {
        let kind = PotentialModel::preset(name, 1.0).unwrap().kind;
        CatalogEntry {
            name: name.to_string(),
            kind,
            description: description.to_string(),
        }
    };
    ModelCatalog {
        schema_version: 1,
        models: vec![
            entry("free", "zero potential"),
            entry(
                "fibonacci",
                "golden-rotation Sturmian coding (Fibonacci sequence)",
            ),
            entry("golden_sturmian", "alias of fibonacci"),
            entry(
                "silver_sturmian",
                "rotation with continued fraction (2, 2, 2, ...)",
            ),
            entry("thue_morse", "Thue-Morse substitution 1->10, 0->01"),
            entry(
                "period_doubling",
                "period doubling substitution 1->10, 0->11",
            ),
            entry(
                "rudin_shapiro",
                "Rudin-Shapiro substitution on four symbols",
            ),
            entry("tribonacci", "tribonacci substitution 1->12, 2->13, 3->1"),
            entry("random", "independent +-lambda disorder (seeded)"),
        ],
    }
}
