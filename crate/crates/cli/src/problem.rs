//! Problem files: one JSON document per problem, tagged by `kind`.

use serde::{Deserialize, Serialize};

use kappa_core::{RationalFunction, SearchConfig, C64};

pub const PROBLEM_SCHEMA_VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type Complex = [f64; 2];

pub fn to_c64(v: &Complex) -> C64 {
    C64::new(v[0], v[1])
}

pub fn from_c64(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn to_c64_vec(v: &[Complex]) -> Vec<C64> {
    v.iter().map(to_c64).collect()
}

/// Rational function by ascending coefficient lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalSpec {
    pub num: Vec<Complex>,
    pub den: Vec<Complex>,
}

impl RationalSpec {
    pub fn build(&self) -> kappa_core::Result<RationalFunction> {
        RationalFunction::new(to_c64_vec(&self.num), to_c64_vec(&self.den))
    }

    pub fn from_function(f: &RationalFunction) -> Self {
        Self {
            num: f.numerator().iter().map(|z| from_c64(*z)).collect(),
            den: f.denominator().iter().map(|z| from_c64(*z)).collect(),
        }
    }
}

/// Boundary data on the real line: a rational function or nodal samples on the mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LineSpec {
    Rational(RationalSpec),
    Samples(Vec<Complex>),
}

/// `solve: true` or a search configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolveRequest {
    Flag(bool),
    Config(SolveConfig),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,
    /// Declare the data infeasible when the certificate exceeds this count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_kappa: Option<usize>,
}

impl SolveRequest {
    pub fn config(&self) -> Option<SolveConfig> {
        match self {
            SolveRequest::Flag(false) => None,
            SolveRequest::Flag(true) => Some(SolveConfig::default()),
            SolveRequest::Config(c) => Some(c.clone()),
        }
    }
}

impl SolveConfig {
    pub fn search(&self, seed_override: Option<u64>) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            seed: seed_override.or(self.seed).unwrap_or(d.seed),
            starts: self.starts.unwrap_or(d.starts),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            ..d
        }
    }
}

/// Settings every problem kind may carry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub schema_version: Option<u32>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub trunc: Option<usize>,
    pub solve: Option<SolveRequest>,
}

// Each kind repeats the shared settings: serde cannot combine `flatten` with
// `deny_unknown_fields`.
macro_rules! problem_struct {
    ($name:ident { $($(#[$m:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$m])* pub $field: $ty,)*
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub schema_version: Option<u32>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub tol: Option<f64>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub grid: Option<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub trunc: Option<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub solve: Option<SolveRequest>,
        }

        impl $name {
            pub fn settings(&self) -> Settings {
                Settings {
                    schema_version: self.schema_version,
                    tol: self.tol,
                    grid: self.grid,
                    trunc: self.trunc,
                    solve: self.solve.clone(),
                }
            }
        }
    };
}

problem_struct!(PickProblem { z: Vec<Complex>, w: Vec<Complex> });
problem_struct!(CfProblem { w: Vec<Complex> });
problem_struct!(SarasonProblem {
    zeros: Vec<Complex>,
    /// `R` in the model-space basis, row by row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<Vec<Complex>>>,
    /// Alternatively `R = φ(T)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symbol: Option<RationalSpec>,
});
problem_struct!(NudelmanProblem { a: Vec<Vec<Complex>>, b: Vec<Complex>, c: Vec<Complex> });
problem_struct!(BoundaryDiskProblem {
    b: RationalSpec,
    c: RationalSpec,
    /// Arcs `[start, end]` in radians; the full circle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arcs: Option<Vec<[f64; 2]>>,
    /// Number of monomials in the test basis.
    basis: usize,
});
problem_struct!(LoewnerProblem {
    intervals: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    panels: Option<usize>,
    f0: LineSpec,
});
problem_struct!(DualLoewnerProblem {
    intervals: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    panels: Option<usize>,
    g0: LineSpec,
});
problem_struct!(HankelProblem {
    s: RationalSpec,
    /// Hankel matrix size.
    size: usize,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    Pick(PickProblem),
    Cf(CfProblem),
    Sarason(SarasonProblem),
    Nudelman(NudelmanProblem),
    BoundaryDisk(BoundaryDiskProblem),
    Loewner(LoewnerProblem),
    LoewnerReal(LoewnerProblem),
    DualLoewner(DualLoewnerProblem),
    Hankel(HankelProblem),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Pick(_) => "pick",
            Problem::Cf(_) => "cf",
            Problem::Sarason(_) => "sarason",
            Problem::Nudelman(_) => "nudelman",
            Problem::BoundaryDisk(_) => "boundary-disk",
            Problem::Loewner(_) => "loewner",
            Problem::LoewnerReal(_) => "loewner-real",
            Problem::DualLoewner(_) => "dual-loewner",
            Problem::Hankel(_) => "hankel",
        }
    }

    pub fn settings(&self) -> Settings {
        match self {
            Problem::Pick(p) => p.settings(),
            Problem::Cf(p) => p.settings(),
            Problem::Sarason(p) => p.settings(),
            Problem::Nudelman(p) => p.settings(),
            Problem::BoundaryDisk(p) => p.settings(),
            Problem::Loewner(p) | Problem::LoewnerReal(p) => p.settings(),
            Problem::DualLoewner(p) => p.settings(),
            Problem::Hankel(p) => p.settings(),
        }
    }
}

fn path_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> String {
    let path = e.path().to_string();
    let path = if path == "." { "<root>".to_string() } else { path };
    format!("{path}: {}", e.inner())
}

fn body<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, String> {
    serde_path_to_error::deserialize(v).map_err(path_error)
}

/// Parses a problem, reporting the field path of the first violation.
pub fn parse(text: &str) -> Result<Problem, String> {
    // Internally tagged enums buffer their content and lose the field path, so the
    // tag is dispatched by hand.
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut v: serde_json::Value = serde_path_to_error::deserialize(de).map_err(path_error)?;
    let obj = v.as_object_mut().ok_or("<root>: expected a JSON object")?;
    let kind = match obj.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err("kind: expected a string".into()),
        None => return Err("kind: missing field".into()),
    };
    let problem = match kind.as_str() {
        "pick" => Problem::Pick(body(v)?),
        "cf" => Problem::Cf(body(v)?),
        "sarason" => Problem::Sarason(body(v)?),
        "nudelman" => Problem::Nudelman(body(v)?),
        "boundary-disk" => Problem::BoundaryDisk(body(v)?),
        "loewner" => Problem::Loewner(body(v)?),
        "loewner-real" => Problem::LoewnerReal(body(v)?),
        "dual-loewner" => Problem::DualLoewner(body(v)?),
        "hankel" => Problem::Hankel(body(v)?),
        other => return Err(format!("kind: unknown problem kind `{other}`")),
    };
    match problem.settings().schema_version {
        None | Some(PROBLEM_SCHEMA_VERSION) => Ok(problem),
        Some(v) => Err(format!("schema_version: unsupported version {v} (expected {PROBLEM_SCHEMA_VERSION})")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_pick() {
        let p = parse(r#"{"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "solve": true}"#).unwrap();
        let Problem::Pick(p) = p else { panic!("wrong kind") };
        assert_eq!(p.w, vec![[2.0, 0.0]]);
        assert_eq!(p.solve, Some(SolveRequest::Flag(true)));
    }

    #[test]
    fn unknown_field_is_rejected_with_path() {
        let e = parse(r#"{"kind": "cf", "w": [[0, 0]], "wx": 1}"#).unwrap_err();
        assert!(e.contains("wx"), "{e}");
        let e = parse(r#"{"kind": "cf", "w": [[0, 0], [1]]}"#).unwrap_err();
        assert!(e.starts_with("w[1]"), "{e}");
        let e = parse(r#"{"kind": "hankel", "s": {"num": [[1, 0]], "den": [[1, 0]], "extra": 0}, "size": 4}"#).unwrap_err();
        assert!(e.starts_with("s"), "{e}");
    }

    #[test]
    fn unknown_kind_and_version() {
        assert!(parse(r#"{"kind": "nope"}"#).is_err());
        let e = parse(r#"{"kind": "cf", "w": [], "schema_version": 9}"#).unwrap_err();
        assert!(e.starts_with("schema_version"));
    }

    #[test]
    fn line_spec_forms() {
        let p = parse(
            r#"{"kind": "loewner", "intervals": [[-1, 1]], "panels": 4, "f0": {"rational": {"num": [[0,0],[1,0]], "den": [[1,0]]}}}"#,
        )
        .unwrap();
        assert_eq!(p.kind(), "loewner");
        let p = parse(r#"{"kind": "dual-loewner", "intervals": [[-1, 1]], "g0": {"samples": [[1, 0], [1, 0]]}}"#).unwrap();
        assert_eq!(p.kind(), "dual-loewner");
    }
}
