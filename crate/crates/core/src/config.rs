//! Experiment configuration files (JSON).
//!
//! Parsing collects every problem in the document before giving up, and each
//! problem names the offending field with a dotted path such as
//! `geometry.interface`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::geometry::{CoreShellGeometry, GeometryKind, Mesh};
use crate::operators::{DiffractionOperator, DiffusionField};
use crate::reactions::{Consumption, ReactionTerm};
use crate::solvers::{InitialCondition, Scheme, SolveConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Missing { path: PathBuf, source: std::io::Error },

    #[error("malformed config: {0}")]
    Malformed(#[from] serde_json::Error),

    #[error("{} invalid field(s):\n  {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n  "))]
    Invalid(Vec<FieldError>),
}

impl ConfigError {
    /// Field paths of all validation failures.
    pub fn fields(&self) -> Vec<&str> {
        match self {
            Self::Invalid(errs) => errs.iter().map(|e| e.field.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub directory: PathBuf,
    pub snapshot_stride: usize,
}

/// Parameters of the studies behind `converge`, `regularize`, `depend` and `certify`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    pub mode_counts: Vec<usize>,
    pub widths: Vec<f64>,
    pub pairs: usize,
    pub perturbation: f64,
    pub refinements: usize,
    pub samples: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            mode_counts: vec![4, 8, 16, 32, 64],
            widths: vec![0.2, 0.1, 0.05, 0.025],
            pairs: 10,
            perturbation: 1e-3,
            refinements: 3,
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: CoreShellGeometry,
    pub diffusion: DiffusionField,
    pub reaction: ReactionTerm,
    pub elements: usize,
    pub solve: SolveConfig,
    pub output: OutputOptions,
    pub seed: u64,
    pub study: StudyOptions,
}

impl ExperimentConfig {
    pub fn mesh(&self) -> crate::Result<Mesh> {
        Mesh::with_elements(&self.geometry, self.elements)
    }

    pub fn operator(&self) -> crate::Result<DiffractionOperator> {
        DiffractionOperator::assemble(&self.mesh()?, &self.diffusion)
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Missing { path: path.into(), source })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let doc: Value = serde_json::from_str(text)?;
    let mut r = Reader::default();
    let root = r.root(&doc);
    let cfg = build(&mut r, root);
    match cfg {
        Some(cfg) if r.errors.is_empty() => Ok(cfg),
        _ => Err(ConfigError::Invalid(r.errors)),
    }
}

#[derive(Default)]
struct Reader {
    errors: Vec<FieldError>,
}

type Obj = Map<String, Value>;

impl Reader {
    fn fail(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError { field: field.into(), message: message.into() });
    }

    fn root<'a>(&mut self, doc: &'a Value) -> Option<&'a Obj> {
        let obj = doc.as_object();
        if obj.is_none() {
            self.fail("$", "top level must be an object");
        }
        obj
    }

    fn block<'a>(&mut self, parent: Option<&'a Obj>, name: &str, required: bool) -> Option<&'a Obj> {
        let v = parent?.get(name);
        match v {
            Some(Value::Object(o)) => Some(o),
            Some(_) => {
                self.fail(name, "must be an object");
                None
            }
            None => {
                if required {
                    self.fail(name, "missing block");
                }
                None
            }
        }
    }

    fn number(&mut self, obj: Option<&Obj>, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let field = format!("{path}.{key}");
        let Some(obj) = obj else { return default };
        match obj.get(key) {
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.fail(field, format!("expected a finite number, got {v}"));
                    None
                }
            },
            None if default.is_some() => default,
            None => {
                self.fail(field, "missing");
                None
            }
        }
    }

    fn count(&mut self, obj: Option<&Obj>, path: &str, key: &str, default: Option<u64>) -> Option<u64> {
        let field = format!("{path}.{key}");
        let Some(obj) = obj else { return default };
        match obj.get(key) {
            Some(v) => {
                let n = v.as_u64();
                if n.is_none() {
                    self.fail(field, format!("expected a non-negative integer, got {v}"));
                }
                n
            }
            None if default.is_some() => default,
            None => {
                self.fail(field, "missing");
                None
            }
        }
    }

    fn string<'a>(&mut self, obj: Option<&'a Obj>, path: &str, key: &str, default: Option<&'a str>) -> Option<&'a str> {
        let field = format!("{path}.{key}");
        let Some(obj) = obj else { return default };
        match obj.get(key) {
            Some(Value::String(s)) => Some(s),
            Some(v) => {
                self.fail(field, format!("expected a string, got {v}"));
                None
            }
            None if default.is_some() => default,
            None => {
                self.fail(field, "missing");
                None
            }
        }
    }

    fn numbers(&mut self, obj: Option<&Obj>, path: &str, key: &str) -> Option<Option<Vec<f64>>> {
        let field = format!("{path}.{key}");
        let Some(v) = obj.and_then(|o| o.get(key)) else { return Some(None) };
        let parsed: Option<Vec<f64>> =
            v.as_array().and_then(|a| a.iter().map(|x| x.as_f64().filter(|x| x.is_finite())).collect());
        if parsed.is_none() {
            self.fail(field, "expected an array of finite numbers");
            return None;
        }
        Some(parsed)
    }

    fn require(&mut self, ok: bool, field: &str, message: impl Into<String>) -> bool {
        if !ok {
            self.fail(field, message);
        }
        ok
    }
}

fn build(r: &mut Reader, root: Option<&Obj>) -> Option<ExperimentConfig> {
    let geometry = geometry_block(r, root);
    let diffusion = diffusion_block(r, root);
    let reaction = reaction_block(r, root);
    let solve = r.block(root, "solve", true);
    let output = r.block(root, "output", false);

    let t_final = r.number(solve, "solve", "t_final", None);
    let dt = r.number(solve, "solve", "dt", None);
    let modes = r.count(solve, "solve", "modes", Some(1));
    let elements = r.count(solve, "solve", "elements", None);
    let scheme = match r.string(solve, "solve", "scheme", Some("imex_euler")) {
        Some("imex_euler") => Some(Scheme::ImexEuler),
        Some("exponential_euler") => Some(Scheme::ExponentialEuler),
        Some(other) => {
            r.fail("solve.scheme", format!("unknown scheme {other:?} (imex_euler | exponential_euler)"));
            None
        }
        None => None,
    };
    if let Some(t) = t_final {
        r.require(t > 0.0, "solve.t_final", format!("must be positive, got {t}"));
    }
    if let Some(h) = dt {
        if r.require(h > 0.0, "solve.dt", format!("must be positive, got {h}")) {
            if let Some(t) = t_final.filter(|t| *t > 0.0) {
                r.require(h <= t, "solve.dt", format!("{h} exceeds t_final = {t}"));
            }
        }
    }
    if let Some(m) = modes {
        r.require(m >= 1, "solve.modes", "must be at least 1");
    }

    let mesh = match (geometry.as_ref(), elements) {
        (Some(g), Some(n)) => match Mesh::with_elements(g, n as usize) {
            Ok(m) => Some(m),
            Err(e) => {
                r.fail("solve.elements", e.to_string());
                None
            }
        },
        _ => None,
    };
    if let (Some(mesh), Some(m)) = (&mesh, modes) {
        r.require(
            m as usize <= mesh.free_count(),
            "solve.modes",
            format!("{m} exceeds the {} interior degrees of freedom", mesh.free_count()),
        );
    }

    let initial = initial_block(r, root, mesh.as_ref());

    let directory = r.string(output, "output", "directory", Some("out")).map(PathBuf::from);
    let snapshot_stride = r.count(output, "output", "snapshot_stride", Some(0));

    let seed = match root.and_then(|o| o.get("seed")) {
        None => Some(0),
        Some(v) => {
            let s = v.as_u64();
            if s.is_none() {
                r.fail("seed", format!("expected a non-negative integer, got {v}"));
            }
            s
        }
    };

    let study = study_block(r, root);

    if let Some(d) = &diffusion {
        if let (Some(g), true) = (&geometry, d.width() > 0.0) {
            let (lo, hi) = (g.interface() - d.width() / 2.0, g.interface() + d.width() / 2.0);
            r.require(
                lo > 0.0 && hi < g.outer_extent(),
                "diffusion.epsilon",
                format!("ramp [{lo}, {hi}] leaves the domain"),
            );
        }
    }

    let solve = SolveConfig {
        t_final: t_final?,
        dt: dt?,
        modes: modes? as usize,
        scheme: scheme?,
        initial: initial?,
        snapshot_stride: snapshot_stride? as usize,
    };
    Some(ExperimentConfig {
        geometry: geometry?,
        diffusion: diffusion?,
        reaction: reaction?,
        elements: elements? as usize,
        solve,
        output: OutputOptions { directory: directory?, snapshot_stride: snapshot_stride? as usize },
        seed: seed?,
        study: study?,
    })
}

fn geometry_block(r: &mut Reader, root: Option<&Obj>) -> Option<CoreShellGeometry> {
    let b = r.block(root, "geometry", true);
    let kind = match r.string(b, "geometry", "kind", None) {
        Some("interval") => Some(GeometryKind::Interval),
        Some("radial") => Some(GeometryKind::Radial),
        Some(other) => {
            r.fail("geometry.kind", format!("unknown kind {other:?} (interval | radial)"));
            None
        }
        None => None,
    };
    let default_dim = match kind {
        Some(GeometryKind::Interval) => Some(1),
        _ => None,
    };
    let dimension = r.count(b, "geometry", "dimension", default_dim);
    let interface = r.number(b, "geometry", "interface", None);
    let outer = r.number(b, "geometry", "outer_extent", None);

    match (kind, dimension) {
        (Some(GeometryKind::Interval), Some(d)) => {
            r.require(d == 1, "geometry.dimension", format!("interval geometry needs dimension 1, got {d}"));
        }
        (Some(GeometryKind::Radial), Some(d)) => {
            r.require(
                d == 2 || d == 3,
                "geometry.dimension",
                format!("radial geometry needs dimension 2 or 3, got {d}"),
            );
        }
        _ => {}
    }
    let outer_ok = outer.map(|o| r.require(o > 0.0, "geometry.outer_extent", format!("must be positive, got {o}")));
    if let Some(g) = interface {
        if r.require(g > 0.0, "geometry.interface", format!("must be positive, got {g}")) {
            if let (Some(o), Some(true)) = (outer, outer_ok) {
                r.require(g < o, "geometry.interface", format!("{g} must lie strictly inside (0, {o})"));
            }
        }
    }
    let before = r.errors.len();
    let geometry = CoreShellGeometry::new(kind?, u32::try_from(dimension?).ok()?, interface?, outer?);
    match geometry {
        Ok(g) => Some(g),
        Err(e) => {
            if r.errors.len() == before {
                r.fail("geometry", e.to_string());
            }
            None
        }
    }
}

fn diffusion_block(r: &mut Reader, root: Option<&Obj>) -> Option<DiffusionField> {
    let b = r.block(root, "diffusion", true);
    let b1 = r.number(b, "diffusion", "b1", None);
    let b2 = r.number(b, "diffusion", "b2", None);
    let eps = r.number(b, "diffusion", "epsilon", Some(0.0));
    let mut ok = true;
    for (name, v) in [("diffusion.b1", b1), ("diffusion.b2", b2)] {
        if let Some(v) = v {
            ok &= r.require(v > 0.0, name, format!("must be positive, got {v}"));
        }
    }
    if let Some(e) = eps {
        ok &= r.require(e >= 0.0, "diffusion.epsilon", format!("must be non-negative, got {e}"));
    }
    if !ok {
        return None;
    }
    match DiffusionField::regularized(b1?, b2?, eps?) {
        Ok(d) => Some(d),
        Err(e) => {
            r.fail("diffusion", e.to_string());
            None
        }
    }
}

fn reaction_block(r: &mut Reader, root: Option<&Obj>) -> Option<ReactionTerm> {
    let b = r.block(root, "reaction", true);
    let kind = r.string(b, "reaction", "kind", None)?;
    let needs_c0 = !matches!(kind, "zero" | "constant_source");
    let c0 = r.number(b, "reaction", "c0", if needs_c0 { None } else { Some(1.0) });
    if let Some(c) = c0 {
        r.require(c > 0.0, "reaction.c0", format!("must be positive, got {c}"));
    }
    let consumption = match kind {
        "zero" => Some(Consumption::Zero),
        "constant_source" => r.number(b, "reaction", "s", None).map(|s| Consumption::ConstantSource { s }),
        "michaelis_menten" | "substrate_inhibition" => {
            let v_max = r.number(b, "reaction", "v_max", None);
            let k_m = r.number(b, "reaction", "k_m", None);
            if let Some(v) = v_max {
                r.require(v >= 0.0, "reaction.v_max", format!("must be non-negative, got {v}"));
            }
            if let Some(k) = k_m {
                r.require(k > 0.0, "reaction.k_m", format!("must be positive, got {k}"));
            }
            let (v_max, k_m) = (v_max?, k_m?);
            Some(if kind == "michaelis_menten" {
                Consumption::MichaelisMenten { v_max, k_m }
            } else {
                Consumption::SubstrateInhibition { v_max, k_m }
            })
        }
        "tabulated" => {
            let points: Option<Vec<[f64; 2]>> = b.and_then(|o| o.get("points")).and_then(|p| {
                p.as_array()?
                    .iter()
                    .map(|pt| {
                        let a = pt.as_array()?;
                        match a.as_slice() {
                            [v, g] => Some([v.as_f64()?, g.as_f64()?]),
                            _ => None,
                        }
                    })
                    .collect()
            });
            if points.is_none() {
                r.fail("reaction.points", "expected an array of [v, g] pairs");
            }
            let lipschitz = match b.and_then(|o| o.get("lipschitz")) {
                None => Some(None),
                Some(v) => match v.as_f64() {
                    Some(l) => Some(Some(l)),
                    None => {
                        r.fail("reaction.lipschitz", format!("expected a number, got {v}"));
                        None
                    }
                },
            };
            Some(Consumption::Tabulated { points: points?, lipschitz: lipschitz? })
        }
        other => {
            r.fail(
                "reaction.kind",
                format!("unknown kind {other:?} (zero | constant_source | michaelis_menten | substrate_inhibition | tabulated)"),
            );
            None
        }
    };
    let before = r.errors.len();
    match ReactionTerm::new(consumption?, c0?) {
        Ok(t) => Some(t),
        Err(e) => {
            if r.errors.len() == before {
                r.fail("reaction", e.to_string());
            }
            None
        }
    }
}

fn initial_block(r: &mut Reader, root: Option<&Obj>, mesh: Option<&Mesh>) -> Option<InitialCondition> {
    let b = r.block(root, "initial", false);
    if b.is_none() && root.is_some_and(|o| !o.contains_key("initial")) {
        return Some(InitialCondition::Zero);
    }
    match r.string(b, "initial", "kind", None)? {
        "zero" => Some(InitialCondition::Zero),
        "mode" => {
            let j = r.count(b, "initial", "j", None)? as usize;
            if !r.require(j >= 1, "initial.j", "mode index is 1-based") {
                return None;
            }
            if let Some(m) = mesh {
                if !r.require(
                    j <= m.free_count(),
                    "initial.j",
                    format!("{j} exceeds {} available modes", m.free_count()),
                ) {
                    return None;
                }
            }
            Some(InitialCondition::Mode { j })
        }
        "table" => {
            let values = r.numbers(b, "initial", "values")?;
            let Some(values) = values else {
                r.fail("initial.values", "missing");
                return None;
            };
            if let Some(m) = mesh {
                if !r.require(
                    values.len() == m.node_count(),
                    "initial.values",
                    format!("expected {} nodal values, got {}", m.node_count(), values.len()),
                ) {
                    return None;
                }
            }
            Some(InitialCondition::Table { values })
        }
        other => {
            r.fail("initial.kind", format!("unknown kind {other:?} (zero | mode | table)"));
            None
        }
    }
}

fn study_block(r: &mut Reader, root: Option<&Obj>) -> Option<StudyOptions> {
    let b = r.block(root, "study", false);
    let d = StudyOptions::default();
    let mode_counts = match b.and_then(|o| o.get("mode_counts")) {
        None => Some(d.mode_counts.clone()),
        Some(v) => {
            let parsed: Option<Vec<usize>> =
                v.as_array().and_then(|a| a.iter().map(|x| x.as_u64().map(|n| n as usize)).collect());
            match parsed {
                Some(p) if !p.is_empty() && p[0] >= 1 && p.windows(2).all(|w| w[0] < w[1]) => Some(p),
                _ => {
                    r.fail("study.mode_counts", "expected a non-empty, strictly ascending list of positive integers");
                    None
                }
            }
        }
    };
    let widths = match r.numbers(b, "study", "widths") {
        Some(None) => Some(d.widths.clone()),
        Some(Some(w)) => {
            if w.is_empty() || w.iter().any(|x| *x <= 0.0) || w.windows(2).any(|p| p[1] >= p[0]) {
                r.fail("study.widths", "expected a non-empty, strictly descending list of positive widths");
                None
            } else {
                Some(w)
            }
        }
        _ => None,
    };
    let pairs = r.count(b, "study", "pairs", Some(d.pairs as u64));
    let perturbation = r.number(b, "study", "perturbation", Some(d.perturbation));
    if let Some(p) = perturbation {
        r.require(p > 0.0, "study.perturbation", format!("must be positive, got {p}"));
    }
    let refinements = r.count(b, "study", "refinements", Some(d.refinements as u64));
    if let Some(n) = refinements {
        r.require((1..=12).contains(&n), "study.refinements", format!("must be between 1 and 12, got {n}"));
    }
    let samples = r.count(b, "study", "samples", Some(d.samples as u64));
    Some(StudyOptions {
        mode_counts: mode_counts?,
        widths: widths?,
        pairs: pairs? as usize,
        perturbation: perturbation?,
        refinements: refinements? as usize,
        samples: samples? as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "geometry": {"kind": "interval", "dimension": 1, "interface": 0.5, "outer_extent": 1.0},
        "diffusion": {"b1": 4.0, "b2": 1.0},
        "reaction": {"kind": "michaelis_menten", "v_max": 1.0, "k_m": 0.5, "c0": 1.0},
        "initial": {"kind": "zero"},
        "solve": {"t_final": 1.0, "dt": 0.01, "modes": 8, "elements": 64}
    }"#;

    #[test]
    fn minimal_config() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.elements, 64);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.solve.scheme, Scheme::ImexEuler);
        assert_eq!(cfg.diffusion.width(), 0.0);
        assert_eq!(cfg.output.directory, PathBuf::from("out"));
        assert_eq!(cfg.study, StudyOptions::default());
    }

    #[test]
    fn names_every_bad_field() {
        let text = MINIMAL.replace("\"interface\": 0.5", "\"interface\": 1.5").replace("\"dt\": 0.01", "\"dt\": 0");
        let err = parse_config_str(&text).unwrap_err();
        let fields = err.fields();
        assert!(fields.contains(&"geometry.interface"), "{err}");
        assert!(fields.contains(&"solve.dt"), "{err}");
    }

    #[test]
    fn malformed_and_missing() {
        assert!(matches!(parse_config_str("{ not json"), Err(ConfigError::Malformed(_))));
        assert!(matches!(parse_config("/nonexistent/config.json"), Err(ConfigError::Missing { .. })));
        let err = parse_config_str("{}").unwrap_err();
        for f in ["geometry", "diffusion", "reaction", "solve"] {
            assert!(err.fields().contains(&f), "{err}");
        }
    }

    #[test]
    fn constant_source_without_c0() {
        let text = MINIMAL.replace(
            r#"{"kind": "michaelis_menten", "v_max": 1.0, "k_m": 0.5, "c0": 1.0}"#,
            r#"{"kind": "constant_source", "s": 1.0}"#,
        );
        let cfg = parse_config_str(&text).unwrap();
        assert!(cfg.reaction.is_test_only());
    }

    #[test]
    fn rejects_too_many_modes_and_short_tables() {
        let text = MINIMAL
            .replace("\"modes\": 8", "\"modes\": 64")
            .replace(r#"{"kind": "zero"}"#, r#"{"kind": "table", "values": [0, 0, 0]}"#);
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.fields().contains(&"solve.modes"), "{err}");
        assert!(err.fields().contains(&"initial.values"), "{err}");
    }
}
