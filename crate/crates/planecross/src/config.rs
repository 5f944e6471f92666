//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! t = 2000
//! regime = const:1          # or log:0.184
//! replications = 10000
//! master_seed = 42
//! plane = 0,0,1             # normal of the projection plane
//! separation = 0.785398     # radians, two-plane suite
//! grid_resolution = 64      # existence scan
//! max_planes = 10           # find-plane suite
//! region = disk:0.31        # or rect:u_min,u_max,v_min,v_max
//! control = false           # two-plane: independent graphs per plane
//! allow_dense = false       # skip the t·r³ < 0.1 guard
//! radius = 0.0001           # explicit radius, bypasses the regime
//! ```

use std::fmt;
use std::path::Path;

use planecross_core::geometry::{Point2, Region2, SpherePoint, Vec3};
use planecross_core::rgg::{is_sparse, SPARSE_LIMIT};
use planecross_core::theory::{radius_for_regime, RegimeSpec};
use planecross_core::BallWindow;

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub t: f64,
    pub regime: RegimeSpec,
    pub replications: u64,
    pub master_seed: u64,
    pub plane: Option<SpherePoint>,
    pub separation: Option<f64>,
    pub grid_resolution: Option<usize>,
    pub max_planes: Option<u32>,
    pub region: Option<Region2>,
    /// Two-plane suite: sample an independent graph for the second plane.
    pub control: bool,
    /// Accept `t·r³ ≥ 0.1`.
    pub allow_dense: bool,
    /// Use this radius instead of the regime's.
    pub radius: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(t: f64, regime: RegimeSpec) -> Self {
        ExperimentConfig {
            t,
            regime,
            replications: 1000,
            master_seed: 0,
            plane: None,
            separation: None,
            grid_resolution: None,
            max_planes: None,
            region: None,
            control: false,
            allow_dense: false,
            radius: None,
        }
    }

    pub fn window(&self) -> BallWindow {
        BallWindow::unit_volume()
    }

    /// Connection radius: the explicit override if present, otherwise the
    /// regime's radius at `t`.
    pub fn connection_radius(&self) -> Result<f64, ConfigError> {
        match self.radius {
            Some(r) if r > 0.0 && r.is_finite() => Ok(r),
            Some(r) => Err(ConfigError::invalid(
                "radius",
                format!("must be positive, got {r}"),
            )),
            None => radius_for_regime(self.t, self.regime)
                .map_err(|e| ConfigError::invalid("regime", e.to_string())),
        }
    }

    /// Checks everything that does not depend on the suite.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(ConfigError::invalid(
                "t",
                format!("must be non-negative and finite, got {}", self.t),
            ));
        }
        self.regime
            .validate()
            .map_err(|e| ConfigError::invalid("regime", e.to_string()))?;
        if self.replications < 1 {
            return Err(ConfigError::invalid("replications", "must be at least 1"));
        }
        if let Some(s) = self.separation {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&s) {
                return Err(ConfigError::invalid(
                    "separation",
                    format!("must lie in [0, π/2], got {s}"),
                ));
            }
        }
        if self.grid_resolution == Some(0) {
            return Err(ConfigError::invalid(
                "grid_resolution",
                "must be at least 1",
            ));
        }
        if self.max_planes == Some(0) {
            return Err(ConfigError::invalid("max_planes", "must be at least 1"));
        }
        if let Some(region) = &self.region {
            region
                .validate()
                .map_err(|e| ConfigError::invalid("region", e.to_string()))?;
        }
        let r = self.connection_radius()?;
        if !self.allow_dense && !is_sparse(self.t, r) {
            return Err(ConfigError::invalid(
                "regime",
                format!(
                    "t·r³ = {:.4} is not below {SPARSE_LIMIT}; the graph is not sparse (override with allow_dense)",
                    self.t * r * r * r
                ),
            ));
        }
        Ok(())
    }

    /// Parses the flat key-value format. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut t = None;
        let mut regime = None;
        let mut cfg = ExperimentConfig::new(0.0, RegimeSpec::Constant(1.0));
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno + 1,
                text: raw.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "t" => t = Some(parse_f64(key, value)?),
                "regime" => regime = Some(parse_regime(value)?),
                "replications" => cfg.replications = parse_int(key, value)?,
                "master_seed" => cfg.master_seed = parse_int(key, value)?,
                "plane" => cfg.plane = Some(parse_plane(value)?),
                "separation" => cfg.separation = Some(parse_f64(key, value)?),
                "grid_resolution" => cfg.grid_resolution = Some(parse_int(key, value)?),
                "max_planes" => cfg.max_planes = Some(parse_int(key, value)?),
                "region" => cfg.region = Some(parse_region(value)?),
                "control" => cfg.control = parse_bool(key, value)?,
                "allow_dense" => cfg.allow_dense = parse_bool(key, value)?,
                "radius" => cfg.radius = Some(parse_f64(key, value)?),
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        cfg.t = t.ok_or(ConfigError::Missing("t"))?;
        cfg.regime = regime.ok_or(ConfigError::Missing("regime"))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Serializes back to the key-value format; [`parse`](Self::parse)
    /// reads it back to an equal config.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("t", format!("{:?}", self.t));
        put("regime", format_regime(&self.regime));
        put("replications", self.replications.to_string());
        put("master_seed", self.master_seed.to_string());
        if let Some(p) = self.plane {
            let v = p.vec();
            put("plane", format!("{:?},{:?},{:?}", v.x, v.y, v.z));
        }
        if let Some(s) = self.separation {
            put("separation", format!("{s:?}"));
        }
        if let Some(g) = self.grid_resolution {
            put("grid_resolution", g.to_string());
        }
        if let Some(m) = self.max_planes {
            put("max_planes", m.to_string());
        }
        if let Some(r) = &self.region {
            put("region", format_region(r));
        }
        put("control", self.control.to_string());
        put("allow_dense", self.allow_dense.to_string());
        if let Some(r) = self.radius {
            put("radius", format!("{r:?}"));
        }
        out
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_key_values())
    }
}

pub fn format_regime(r: &RegimeSpec) -> String {
    match r {
        RegimeSpec::Constant(c) => format!("const:{c:?}"),
        RegimeSpec::Log(c) => format!("log:{c:?}"),
    }
}

pub fn format_region(r: &Region2) -> String {
    match *r {
        Region2::Disk { center, radius } if center == Point2::default() => {
            format!("disk:{radius:?}")
        }
        Region2::Disk { center, radius } => {
            format!("disk:{radius:?}@{:?},{:?}", center.u, center.v)
        }
        Region2::Rect {
            u_min,
            u_max,
            v_min,
            v_max,
        } => format!("rect:{u_min:?},{u_max:?},{v_min:?},{v_max:?}"),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| ConfigError::invalid(key, format!("not a number: {value:?}")))
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse::<T>()
        .map_err(|_| ConfigError::invalid(key, format!("not a non-negative integer: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError::invalid(
            key,
            format!("not a boolean: {value:?}"),
        )),
    }
}

fn parse_list(key: &str, value: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse_f64(key, p.trim()))
        .collect::<Result<_, _>>()?;
    if parts.len() != n {
        return Err(ConfigError::invalid(
            key,
            format!("expected {n} comma-separated numbers, got {value:?}"),
        ));
    }
    Ok(parts)
}

/// `const:<c>` or `log:<c'>`.
pub fn parse_regime(value: &str) -> Result<RegimeSpec, ConfigError> {
    let (kind, param) = value.split_once(':').ok_or_else(|| {
        ConfigError::invalid(
            "regime",
            format!("expected const:<c> or log:<c'>, got {value:?}"),
        )
    })?;
    let p = parse_f64("regime", param.trim())?;
    let spec = match kind.trim() {
        "const" => RegimeSpec::Constant(p),
        "log" => RegimeSpec::Log(p),
        other => {
            return Err(ConfigError::invalid(
                "regime",
                format!("unknown regime kind {other:?}"),
            ))
        }
    };
    spec.validate()
        .map_err(|e| ConfigError::invalid("regime", e.to_string()))?;
    Ok(spec)
}

/// `x,y,z`; normalized onto the sphere.
pub fn parse_plane(value: &str) -> Result<SpherePoint, ConfigError> {
    let v = parse_list("plane", value, 3)?;
    SpherePoint::from_direction(Vec3::new(v[0], v[1], v[2]))
        .map_err(|_| ConfigError::invalid("plane", "normal must be a nonzero finite vector"))
}

/// `disk:<radius>`, `disk:<radius>@<u>,<v>` or `rect:<u_min>,<u_max>,<v_min>,<v_max>`.
pub fn parse_region(value: &str) -> Result<Region2, ConfigError> {
    let region = if let Some(rest) = value.strip_prefix("disk:") {
        let (radius, center) = match rest.split_once('@') {
            Some((r, c)) => {
                let c = parse_list("region", c, 2)?;
                (r, Point2::new(c[0], c[1]))
            }
            None => (rest, Point2::default()),
        };
        Region2::Disk {
            center,
            radius: parse_f64("region", radius.trim())?,
        }
    } else if let Some(rest) = value.strip_prefix("rect:") {
        let v = parse_list("region", rest, 4)?;
        Region2::Rect {
            u_min: v[0],
            u_max: v[1],
            v_min: v[2],
            v_max: v[3],
        }
    } else {
        return Err(ConfigError::invalid(
            "region",
            format!("expected disk:<r> or rect:a,b,c,d, got {value:?}"),
        ));
    };
    region
        .validate()
        .map_err(|e| ConfigError::invalid("region", e.to_string()))?;
    Ok(region)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# distribution run
t = 2000
regime = const:1
replications = 100
master_seed = 42
plane = 1, 1, 1
region = disk:0.31
max_planes = 5
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.t, 2000.0);
        assert_eq!(cfg.regime, RegimeSpec::Constant(1.0));
        assert_eq!(cfg.replications, 100);
        assert_eq!(cfg.master_seed, 42);
        assert!((cfg.plane.unwrap().vec().x - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(cfg.region, Some(Region2::centered_disk(0.31)));
        assert_eq!(cfg.max_planes, Some(5));
        cfg.validate().unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_key_values()).unwrap(), cfg);
    }

    #[test]
    fn unknown_and_missing_keys() {
        assert_eq!(
            ExperimentConfig::parse("t = 1\nregime = const:1\nreps = 3\n"),
            Err(ConfigError::UnknownKey("reps".into()))
        );
        assert_eq!(
            ExperimentConfig::parse("regime = const:1\n"),
            Err(ConfigError::Missing("t"))
        );
        assert!(matches!(
            ExperimentConfig::parse("t 5\n"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn regions_and_regimes() {
        assert_eq!(parse_regime("log:0.184").unwrap(), RegimeSpec::Log(0.184));
        assert!(parse_regime("const:-1").is_err());
        assert!(parse_regime("linear:1").is_err());
        assert_eq!(
            parse_region("rect:-1,1,0,0.5").unwrap(),
            Region2::Rect {
                u_min: -1.0,
                u_max: 1.0,
                v_min: 0.0,
                v_max: 0.5
            }
        );
        let off = parse_region("disk:0.2@0.1,-0.1").unwrap();
        assert_eq!(parse_region(&format_region(&off)).unwrap(), off);
        assert!(parse_region("rect:1,0,0,1").is_err());
        assert!(parse_region("circle:1").is_err());
        assert!(parse_plane("0,0,0").is_err());
        assert!(parse_plane("1,2").is_err());
    }

    #[test]
    fn sparse_guard_and_override() {
        let mut cfg = ExperimentConfig::new(2000.0, RegimeSpec::Constant(1.0));
        cfg.validate().unwrap();
        cfg.radius = Some(0.5);
        assert!(cfg.validate().is_err());
        cfg.allow_dense = true;
        cfg.validate().unwrap();
    }

    #[test]
    fn field_checks() {
        let mut cfg = ExperimentConfig::new(2000.0, RegimeSpec::Constant(1.0));
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        cfg.replications = 1;
        cfg.separation = Some(2.0);
        assert!(cfg.validate().is_err());
        cfg.separation = Some(0.0);
        cfg.validate().unwrap();
        cfg.max_planes = Some(0);
        assert!(cfg.validate().is_err());
        let log = ExperimentConfig::new(1.0, RegimeSpec::Log(0.1));
        assert!(log.validate().is_err());
    }
}
