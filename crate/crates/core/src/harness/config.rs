//! Run configuration and its TOML schema.
//!
//! ```toml
//! geometry = "interval"        # or "radial"
//! dimension = 3                # radial only
//! tau = 1.0                    # interval only; the ball always uses 1
//!
//! [diffusion]
//! family = "integrable_power"  # constant (c) | integrable_power (p) | critical_power (n)
//! p = 2.0
//!
//! [grid]
//! n_cells = 256
//!
//! [time]
//! t_end = 1.0
//! dt_init = 1e-6
//! dt_min = 1e-12
//! dt_max = 1e-2
//! cfl_safety = 0.45
//! u_blowup_threshold = 1e6     # default: 1e6 × mean density
//! max_steps = 10000000         # optional
//!
//! [init]
//! mass = 1.0                   # m on the interval, mean density M on the ball
//! u = "bump"                   # bump | cosine | constant | plateau | concentrated
//! width = 0.1
//! placement = "right"          # left | right | center (with `center = x`)
//! profile = "plateau"          # plateau | smooth
//! v = "admissible"             # admissible | constant | match_u | cosine | elliptic
//! v_lambda = 0.5
//!
//! [diagnostics]
//! q = 3.0
//! cadence = 10
//! lambda_exponent = "printed"  # printed | derived
//! istotne_exponent = "printed" # printed | linear
//! ```

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use crate::diagnostics::{IstotneVariant, JensenExponent};
use crate::fv::{Mesh, TimeControls};
use crate::initdata::{
    bump_1d, cosine_1d, radial_concentrated, radial_plateau, v0_admissible, v0_elliptic,
    BumpRecipe, Placement, Profile,
};
use crate::kinetics::{DiffusionFamily, DiffusionSpec};
use crate::KsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("inconsistent configuration: {0}")]
    Consistency(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    #[serde(rename = "interval")]
    Interval1D,
    #[serde(rename = "radial")]
    RadialBall(u32),
}

impl Geometry {
    pub fn label(&self) -> &'static str {
        match self {
            Geometry::Interval1D => "interval",
            Geometry::RadialBall(_) => "radial",
        }
    }

    pub fn mesh(&self, n_cells: usize) -> Mesh {
        match *self {
            Geometry::Interval1D => Mesh::interval(n_cells),
            Geometry::RadialBall(n) => Mesh::radial(n_cells, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitU {
    Bump(BumpRecipe),
    /// `mean(1 + amplitude·cos(mode·π·x))`, rescaled to the exact mass.
    Cosine {
        mean: f64,
        amplitude: f64,
        mode: u32,
    },
    Constant {
        value: f64,
    },
    /// Ball plateau on `r ≤ width`, rounded to whole shells.
    Plateau {
        mean_density: f64,
        width: f64,
    },
    /// Widest ball plateau with `M_2 ≤ target_m2`.
    Concentrated {
        mean_density: f64,
        target_m2: f64,
    },
}

impl InitU {
    /// `m` on the interval, `M` on the ball.
    pub fn mass(&self) -> f64 {
        match *self {
            InitU::Bump(r) => r.mass,
            InitU::Cosine { mean, .. } => mean,
            InitU::Constant { value } => value,
            InitU::Plateau { mean_density, .. } | InitU::Concentrated { mean_density, .. } => {
                mean_density
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitV {
    /// Constant inside the interval admissibility window, a fraction `lambda` in.
    Admissible {
        lambda: f64,
    },
    Constant {
        value: f64,
    },
    MatchU,
    Cosine {
        mean: f64,
        amplitude: f64,
        mode: u32,
    },
    /// `(1 - Δ)⁻¹u₀ + shift`, so that `v_t(0) = -shift`.
    Elliptic {
        shift: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub tau: f64,
    pub spec: DiffusionSpec,
    pub n_cells: usize,
    pub controls: TimeControls,
    pub init_u: InitU,
    pub init_v: InitV,
    /// Moment exponent of the interval diagnostics.
    pub q: f64,
    pub diag_cadence: usize,
    pub max_steps: Option<u64>,
    pub lambda_exponent: JensenExponent,
    pub istotne_variant: IstotneVariant,
}

fn cfg_err(e: KsError) -> ConfigError {
    ConfigError::Consistency(e.to_string())
}

impl RunConfig {
    /// Interval defaults around a diffusivity, mass and moment exponent.
    pub fn interval(spec: DiffusionSpec, mass: f64, q: f64) -> Self {
        Self {
            geometry: Geometry::Interval1D,
            tau: 1.0,
            spec,
            n_cells: 256,
            controls: TimeControls {
                u_blowup_threshold: 1e6 * mass,
                ..TimeControls::default()
            },
            init_u: InitU::Bump(BumpRecipe {
                mass,
                width: 0.1,
                placement: Placement::RightEnd,
                profile: Profile::Plateau,
            }),
            init_v: InitV::Admissible { lambda: 0.5 },
            q,
            diag_cadence: 10,
            max_steps: None,
            lambda_exponent: JensenExponent::default(),
            istotne_variant: IstotneVariant::default(),
        }
    }

    /// Ball defaults in dimension `n` with the critical diffusivity.
    pub fn radial(n: u32, mean_density: f64) -> Result<Self, ConfigError> {
        let spec = DiffusionSpec::critical_power(n).map_err(cfg_err)?;
        Ok(Self {
            geometry: Geometry::RadialBall(n),
            tau: 1.0,
            spec,
            n_cells: 256,
            controls: TimeControls {
                u_blowup_threshold: 1e6 * mean_density,
                ..TimeControls::default()
            },
            init_u: InitU::Plateau {
                mean_density,
                width: 0.1,
            },
            init_v: InitV::Constant {
                value: mean_density,
            },
            q: 3.0,
            diag_cadence: 10,
            max_steps: None,
            lambda_exponent: JensenExponent::default(),
            istotne_variant: IstotneVariant::default(),
        })
    }

    /// `m` on the interval, `M` on the ball.
    pub fn mass(&self) -> f64 {
        self.init_u.mass()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.controls.validate().map_err(cfg_err)?;
        if self.n_cells < 2 {
            return Err(ConfigError::Consistency(format!(
                "need at least 2 cells, got {}",
                self.n_cells
            )));
        }
        if self.diag_cadence == 0 {
            return Err(ConfigError::Consistency(
                "diagnostic cadence must be positive".into(),
            ));
        }
        match (self.geometry, self.spec.family) {
            (Geometry::Interval1D, DiffusionFamily::CriticalPower { n }) => {
                return Err(ConfigError::Consistency(format!(
                    "critical_power n = {n} requires the radial geometry with dimension {n}"
                )))
            }
            (Geometry::RadialBall(n), DiffusionFamily::CriticalPower { n: k }) if k != n => {
                return Err(ConfigError::Consistency(format!(
                    "critical_power n = {k} requires dimension {k}, got {n}"
                )))
            }
            (Geometry::RadialBall(_), DiffusionFamily::IntegrablePower { .. }) => {
                return Err(ConfigError::Consistency(
                    "integrable_power requires the interval geometry".into(),
                ))
            }
            (Geometry::RadialBall(n), _) if n < 3 => {
                return Err(ConfigError::Consistency(format!(
                    "dimension must be at least 3, got {n}"
                )))
            }
            _ => {}
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(ConfigError::Consistency(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if matches!(self.geometry, Geometry::RadialBall(_)) && self.tau != 1.0 {
            return Err(ConfigError::Consistency(
                "the radial system has tau = 1".into(),
            ));
        }
        if matches!(self.geometry, Geometry::Interval1D) && !(self.q > 2.0) {
            return Err(ConfigError::Consistency(format!(
                "q must exceed 2, got {}",
                self.q
            )));
        }
        let interval = self.geometry == Geometry::Interval1D;
        let u_ok = match self.init_u {
            InitU::Bump(_) => interval,
            InitU::Plateau { .. } | InitU::Concentrated { .. } => !interval,
            InitU::Cosine { .. } | InitU::Constant { .. } => true,
        };
        if !u_ok {
            return Err(ConfigError::Consistency(format!(
                "initial density {:?} does not fit the {} geometry",
                self.init_u,
                self.geometry.label()
            )));
        }
        if !interval && matches!(self.init_v, InitV::Admissible { .. }) {
            return Err(ConfigError::Consistency(
                "v = \"admissible\" applies to the interval only".into(),
            ));
        }
        Ok(())
    }

    /// Initial `(u, v)` on the configured grid.
    pub fn initial_fields(&self) -> crate::Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n_cells;
        let mesh = self.geometry.mesh(n);
        let scale = |mut f: Vec<f64>, mean: f64| {
            let target = mean * mesh.volumes.iter().sum::<f64>();
            let actual = mesh.integrate(&f);
            f.iter_mut().for_each(|x| *x *= target / actual);
            f
        };
        let u = match (self.init_u, self.geometry) {
            (InitU::Bump(r), _) => bump_1d(&r, n)?,
            (
                InitU::Cosine {
                    mean,
                    amplitude,
                    mode,
                },
                _,
            ) => scale(cosine_1d(mean, amplitude, mode, n)?, mean),
            (InitU::Constant { value }, _) => vec![value; n],
            (
                InitU::Plateau {
                    mean_density,
                    width,
                },
                Geometry::RadialBall(d),
            ) => {
                let cells = ((width * n as f64).round() as usize).clamp(1, n);
                radial_plateau(mean_density, d, cells, n)?
            }
            (
                InitU::Concentrated {
                    mean_density,
                    target_m2,
                },
                Geometry::RadialBall(d),
            ) => radial_concentrated(mean_density, d, target_m2, n)?,
            (other, g) => {
                return Err(KsError::Input(format!("{other:?} does not fit {g:?}")));
            }
        };
        let v = match self.init_v {
            InitV::Admissible { lambda } => v0_admissible(self.mass(), self.q, lambda, n)?,
            InitV::Constant { value } => vec![value; n],
            InitV::MatchU => u.clone(),
            InitV::Elliptic { shift } => v0_elliptic(&mesh, &u, shift)?,
            InitV::Cosine {
                mean,
                amplitude,
                mode,
            } => scale(cosine_1d(mean, amplitude, mode, n)?, mean),
        };
        Ok((u, v))
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    check_keys(&doc)?;
    let r = Reader { doc: &doc };

    let geometry = match r.str("", "geometry")?.as_deref() {
        Some("interval") | None => Geometry::Interval1D,
        Some("radial") => Geometry::RadialBall(r.uint("", "dimension")?.unwrap_or(3) as u32),
        Some(other) => {
            return Err(invalid(
                "geometry",
                format!("expected interval or radial, got {other}"),
            ))
        }
    };
    if geometry == Geometry::Interval1D && r.get("", "dimension").is_some() {
        return Err(ConfigError::Consistency(
            "dimension applies to the radial geometry only".into(),
        ));
    }
    let mass = r.float("init", "mass")?.unwrap_or(1.0);
    let spec = parse_spec(&r, geometry)?;
    let mut cfg = match geometry {
        Geometry::Interval1D => RunConfig::interval(spec, mass, 3.0),
        Geometry::RadialBall(n) => {
            let mut c = RunConfig::radial(n.max(3), mass)?;
            c.geometry = geometry;
            c
        }
    };
    cfg.spec = spec;
    if let Some(t) = r.float("", "tau")? {
        cfg.tau = t;
    }
    if let Some(n) = r.uint("grid", "n_cells")? {
        cfg.n_cells = n as usize;
    }
    let c = &mut cfg.controls;
    for (key, slot) in [
        ("t_end", &mut c.t_end),
        ("dt_init", &mut c.dt_init),
        ("dt_min", &mut c.dt_min),
        ("dt_max", &mut c.dt_max),
        ("cfl_safety", &mut c.cfl_safety),
        ("u_blowup_threshold", &mut c.u_blowup_threshold),
    ] {
        if let Some(x) = r.float("time", key)? {
            *slot = x;
        }
    }
    cfg.max_steps = r.uint("time", "max_steps")?;

    cfg.init_u = parse_init_u(&r, geometry, mass)?;
    cfg.init_v = match r.str("init", "v")?.as_deref() {
        None if geometry == Geometry::Interval1D => InitV::Admissible {
            lambda: r.float("init", "v_lambda")?.unwrap_or(0.5),
        },
        None => InitV::Constant {
            value: r.float("init", "v_value")?.unwrap_or(mass),
        },
        Some("admissible") => InitV::Admissible {
            lambda: r.float("init", "v_lambda")?.unwrap_or(0.5),
        },
        Some("constant") => InitV::Constant {
            value: r.float("init", "v_value")?.unwrap_or(mass),
        },
        Some("match_u") => InitV::MatchU,
        Some("elliptic") => InitV::Elliptic {
            shift: match (r.float("init", "v_shift")?, geometry) {
                (Some(s), _) => s,
                // halfway into the admissibility window by default
                (None, Geometry::Interval1D) => {
                    let q = r.float("diagnostics", "q")?.unwrap_or(3.0);
                    r.float("init", "v_lambda")?.unwrap_or(0.5) * mass / (2.0 * (q + 1.0))
                }
                (None, Geometry::RadialBall(_)) => 0.0,
            },
        },
        Some("cosine") => InitV::Cosine {
            mean: r.float("init", "v_value")?.unwrap_or(mass),
            amplitude: r.float("init", "v_amplitude")?.unwrap_or(0.1),
            mode: r.uint("init", "v_mode")?.unwrap_or(1) as u32,
        },
        Some(other) => return Err(invalid("init.v", format!("unknown v profile {other}"))),
    };

    if let Some(q) = r.float("diagnostics", "q")? {
        cfg.q = q;
    }
    if let Some(k) = r.uint("diagnostics", "cadence")? {
        cfg.diag_cadence = k as usize;
    }
    cfg.lambda_exponent = match r.str("diagnostics", "lambda_exponent")?.as_deref() {
        None | Some("printed") => JensenExponent::Printed,
        Some("derived") => JensenExponent::Derived,
        Some(other) => return Err(invalid("diagnostics.lambda_exponent", other.to_string())),
    };
    cfg.istotne_variant = match r.str("diagnostics", "istotne_exponent")?.as_deref() {
        None | Some("printed") => IstotneVariant::Printed,
        Some("linear") => IstotneVariant::Linear,
        Some(other) => return Err(invalid("diagnostics.istotne_exponent", other.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_spec(r: &Reader, geometry: Geometry) -> Result<DiffusionSpec, ConfigError> {
    let family = r.str("diffusion", "family")?;
    let spec = match family.as_deref() {
        Some("constant") => DiffusionSpec::constant(r.float("diffusion", "c")?.unwrap_or(1.0)),
        Some("integrable_power") => {
            DiffusionSpec::integrable_power(r.float("diffusion", "p")?.unwrap_or(2.0))
        }
        Some("critical_power") => {
            let default = match geometry {
                Geometry::RadialBall(n) => n as u64,
                Geometry::Interval1D => 3,
            };
            DiffusionSpec::critical_power(r.uint("diffusion", "n")?.unwrap_or(default) as u32)
        }
        None => match geometry {
            Geometry::Interval1D => DiffusionSpec::integrable_power(2.0),
            Geometry::RadialBall(n) => DiffusionSpec::critical_power(n),
        },
        Some(other) => {
            return Err(invalid(
                "diffusion.family",
                format!("unknown family {other}"),
            ))
        }
    }
    .map_err(|e| invalid("diffusion", e.to_string()))?;
    Ok(match r.bool("diffusion", "quadrature")? {
        Some(true) => spec.with_quadrature(),
        _ => spec,
    })
}

fn parse_init_u(r: &Reader, geometry: Geometry, mass: f64) -> Result<InitU, ConfigError> {
    let interval = geometry == Geometry::Interval1D;
    let width = r.float("init", "width")?.unwrap_or(0.1);
    let kind = r.str("init", "u")?;
    Ok(match kind.as_deref() {
        None if interval => bump(r, mass, width)?,
        None => InitU::Plateau {
            mean_density: mass,
            width,
        },
        Some("bump") => bump(r, mass, width)?,
        Some("cosine") => InitU::Cosine {
            mean: mass,
            amplitude: r.float("init", "amplitude")?.unwrap_or(0.1),
            mode: r.uint("init", "mode")?.unwrap_or(1) as u32,
        },
        Some("constant") => InitU::Constant { value: mass },
        Some("plateau") => InitU::Plateau {
            mean_density: mass,
            width,
        },
        Some("concentrated") => InitU::Concentrated {
            mean_density: mass,
            target_m2: r.float("init", "target_m2")?.ok_or_else(|| {
                invalid("init.target_m2", "required for concentrated data".into())
            })?,
        },
        Some(other) => return Err(invalid("init.u", format!("unknown u profile {other}"))),
    })
}

fn bump(r: &Reader, mass: f64, width: f64) -> Result<InitU, ConfigError> {
    let placement = match r.str("init", "placement")?.as_deref() {
        None | Some("right") => Placement::RightEnd,
        Some("left") => Placement::LeftEnd,
        Some("center") => Placement::Center(r.float("init", "center")?.unwrap_or(0.5)),
        Some(other) => return Err(invalid("init.placement", other.to_string())),
    };
    let profile = match r.str("init", "profile")?.as_deref() {
        None | Some("plateau") => Profile::Plateau,
        Some("smooth") => Profile::Smooth,
        Some(other) => return Err(invalid("init.profile", other.to_string())),
    };
    Ok(InitU::Bump(BumpRecipe {
        mass,
        width,
        placement,
        profile,
    }))
}

const TOP: &[&str] = &[
    "geometry",
    "dimension",
    "tau",
    "diffusion",
    "grid",
    "time",
    "init",
    "diagnostics",
];
const SECTIONS: &[(&str, &[&str])] = &[
    ("diffusion", &["family", "c", "p", "n", "quadrature"]),
    ("grid", &["n_cells"]),
    (
        "time",
        &[
            "t_end",
            "dt_init",
            "dt_min",
            "dt_max",
            "cfl_safety",
            "u_blowup_threshold",
            "max_steps",
        ],
    ),
    (
        "init",
        &[
            "mass",
            "u",
            "width",
            "placement",
            "center",
            "profile",
            "amplitude",
            "mode",
            "target_m2",
            "v",
            "v_lambda",
            "v_value",
            "v_amplitude",
            "v_mode",
            "v_shift",
        ],
    ),
    (
        "diagnostics",
        &["q", "cadence", "lambda_exponent", "istotne_exponent"],
    ),
];

fn check_keys(doc: &Table) -> Result<(), ConfigError> {
    let mut unknown = BTreeSet::new();
    for (key, value) in doc {
        if !TOP.contains(&key.as_str()) {
            unknown.insert(key.clone());
            continue;
        }
        if let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| s == key) {
            match value {
                Value::Table(t) => {
                    for k in t.keys().filter(|k| !allowed.contains(&k.as_str())) {
                        unknown.insert(format!("{key}.{k}"));
                    }
                }
                _ => return Err(invalid(key, "expected a section".into())),
            }
        }
    }
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::UnknownKeys(unknown.into_iter().collect()))
    }
}

fn invalid(key: &str, msg: String) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        msg,
    }
}

struct Reader<'a> {
    doc: &'a Table,
}

impl Reader<'_> {
    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        if section.is_empty() {
            self.doc.get(key)
        } else {
            self.doc.get(section)?.as_table()?.get(key)
        }
    }

    fn name(section: &str, key: &str) -> String {
        if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        }
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(invalid(
                &Self::name(section, key),
                format!("expected a number, got {other}"),
            )),
        }
    }

    fn uint(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(other) => Err(invalid(
                &Self::name(section, key),
                format!("expected a nonnegative integer, got {other}"),
            )),
        }
    }

    fn str(&self, section: &str, key: &str) -> Result<Option<String>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(invalid(
                &Self::name(section, key),
                format!("expected a string, got {other}"),
            )),
        }
    }

    fn bool(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(invalid(
                &Self::name(section, key),
                format!("expected true or false, got {other}"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
geometry = "interval"
tau = 1

[diffusion]
family = "integrable_power"
p = 2

[init]
mass = 1

[diagnostics]
q = 3
"#;

    #[test]
    fn minimal_document_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.geometry, Geometry::Interval1D);
        assert_eq!(cfg.spec, DiffusionSpec::integrable_power(2.0).unwrap());
        assert_eq!(cfg.n_cells, 256);
        assert_eq!(cfg.q, 3.0);
        assert_eq!(cfg.controls.dt_min, 1e-12);
        assert_eq!(cfg.controls.u_blowup_threshold, 1e6);
        assert_eq!(cfg.init_v, InitV::Admissible { lambda: 0.5 });
        assert!(matches!(cfg.init_u, InitU::Bump(b) if b.placement == Placement::RightEnd));
        let (u, v) = cfg.initial_fields().unwrap();
        assert_eq!(u.len(), 256);
        assert!((v[0] - 1.0625).abs() < 1e-15);
    }

    #[test]
    fn critical_power_on_interval_is_inconsistent() {
        let doc = MINIMAL.replace(
            "family = \"integrable_power\"\np = 2",
            "family = \"critical_power\"\nn = 3",
        );
        assert!(matches!(
            parse_config(&doc),
            Err(ConfigError::Consistency(_))
        ));
    }

    #[test]
    fn duplicate_key_is_named() {
        let doc = format!("{MINIMAL}\n[grid]\nn_cells = 10\nn_cells = 20\n");
        let err = parse_config(&doc).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("n_cells"), "{err}");
    }

    #[test]
    fn unknown_keys_are_listed() {
        let doc = format!("colour = 1\n{MINIMAL}\n[grid]\nn_cels = 10\n");
        match parse_config(&doc).unwrap_err() {
            ConfigError::UnknownKeys(k) => {
                assert_eq!(k, vec!["colour".to_string(), "grid.n_cels".to_string()])
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn radial_defaults() {
        let cfg =
            parse_config("geometry = \"radial\"\ndimension = 4\n[init]\nmass = 2.0\n").unwrap();
        assert_eq!(cfg.geometry, Geometry::RadialBall(4));
        assert_eq!(cfg.spec, DiffusionSpec::critical_power(4).unwrap());
        assert_eq!(cfg.controls.u_blowup_threshold, 2e6);
        assert!(parse_config("geometry = \"radial\"\ntau = 2\n").is_err());
        assert!(parse_config(
            "geometry = \"radial\"\n[diffusion]\nfamily = \"integrable_power\"\n"
        )
        .is_err());
    }
}
