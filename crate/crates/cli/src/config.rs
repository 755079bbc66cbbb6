//! Flat `key = value` experiment configuration with strict validation:
//! unknown keys are errors, every reported problem names its field.

use movingwall_core::kernels::CompactInitialData;
use movingwall_core::{BoundaryMotion, CoreError, FpProblem, Frame};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("field `{field}`: cannot parse `{value}` as {ty}")]
    Parse {
        field: &'static str,
        value: String,
        ty: &'static str,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

/// Initial-data specification.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// Indicator of `[x0, x1]` scaled to the configured mass.
    Indicator { x0: f64, x1: f64 },
    /// Truncated Gaussian bump scaled to the configured mass.
    Gaussian { center: f64, width: f64 },
    /// Piecewise-linear table from a CSV file of `x,value` rows.
    Table(PathBuf),
}

/// Which frame the solver runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameChoice {
    /// Pick the self-similar frame matching the regime.
    Auto,
    PhysicalComoving,
    Diffusive,
    WallSpeed,
}

/// Snapshot schedule in frame time.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    /// Explicit strictly increasing times.
    Explicit(Vec<f64>),
    /// `count` uniform intervals over `[0, horizon]` (snapshot at 0 included).
    Uniform(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub c: f64,
    pub beta: f64,
    pub d: f64,
    pub mass: f64,
    pub init: InitSpec,
    pub grid_n: usize,
    /// Truncation length; `None` picks the frame default.
    pub grid_l: Option<f64>,
    pub frame: FrameChoice,
    pub t_end: Option<f64>,
    pub tau_end: Option<f64>,
    pub schedule: ScheduleSpec,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub particles_n: usize,
    pub particle_dt: Option<f64>,
    pub trajectory_particles: usize,
    pub beta_list: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            beta: 0.5,
            d: 1.0,
            mass: 1.0,
            init: InitSpec::Indicator { x0: 0.0, x1: 1.0 },
            grid_n: 4096,
            grid_l: None,
            frame: FrameChoice::Auto,
            t_end: None,
            tau_end: None,
            schedule: ScheduleSpec::Uniform(40),
            seed: 42,
            out: None,
            particles_n: 100_000,
            particle_dt: None,
            trajectory_particles: 3,
            beta_list: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "c",
    "beta",
    "d",
    "mass",
    "init",
    "init_x0",
    "init_x1",
    "init_center",
    "init_width",
    "init_path",
    "grid_n",
    "grid_l",
    "frame",
    "t_end",
    "tau_end",
    "snapshots",
    "snapshot_count",
    "seed",
    "out",
    "particles_n",
    "dt",
    "trajectory_particles",
    "beta_list",
];

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: ln + 1,
                    text: line.to_string(),
                });
            };
            let key = k.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key));
            }
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        fn get_f64(
            map: &BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<Option<f64>, ConfigError> {
            map.get(key)
                .map(|v| {
                    v.parse::<f64>().map_err(|_| ConfigError::Parse {
                        field: key,
                        value: v.clone(),
                        ty: "a number",
                    })
                })
                .transpose()
        }
        fn get_usize(
            map: &BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<Option<usize>, ConfigError> {
            map.get(key)
                .map(|v| {
                    v.parse::<usize>().map_err(|_| ConfigError::Parse {
                        field: key,
                        value: v.clone(),
                        ty: "a nonnegative integer",
                    })
                })
                .transpose()
        }
        fn get_list(
            map: &BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<Option<Vec<f64>>, ConfigError> {
            map.get(key)
                .map(|v| {
                    v.split(',')
                        .map(|p| {
                            p.trim().parse::<f64>().map_err(|_| ConfigError::Parse {
                                field: key,
                                value: p.trim().to_string(),
                                ty: "a number",
                            })
                        })
                        .collect::<Result<Vec<f64>, _>>()
                })
                .transpose()
        }

        let defaults = Self::default();
        let c = get_f64(&map, "c")?.unwrap_or(defaults.c);
        let beta = get_f64(&map, "beta")?.unwrap_or(defaults.beta);
        let d = get_f64(&map, "d")?.unwrap_or(defaults.d);
        let mass = get_f64(&map, "mass")?.unwrap_or(defaults.mass);
        if !(c > 0.0) {
            return Err(ConfigError::Invalid {
                field: "c",
                reason: format!("must be > 0, got {c}"),
            });
        }
        if !(beta >= 0.0) {
            return Err(ConfigError::Invalid {
                field: "beta",
                reason: format!("must be >= 0, got {beta}"),
            });
        }
        if !(d > 0.0) {
            return Err(ConfigError::Invalid {
                field: "d",
                reason: format!("must be > 0, got {d}"),
            });
        }
        if !(mass > 0.0) {
            return Err(ConfigError::Invalid {
                field: "mass",
                reason: format!("must be > 0, got {mass}"),
            });
        }

        let init = match map.get("init").map(String::as_str) {
            None | Some("indicator") => InitSpec::Indicator {
                x0: get_f64(&map, "init_x0")?.unwrap_or(0.0),
                x1: get_f64(&map, "init_x1")?.unwrap_or(1.0),
            },
            Some("gaussian") => InitSpec::Gaussian {
                center: get_f64(&map, "init_center")?.unwrap_or(2.0),
                width: get_f64(&map, "init_width")?.unwrap_or(0.3),
            },
            Some("table") => {
                let p = map.get("init_path").ok_or(ConfigError::Invalid {
                    field: "init_path",
                    reason: "required when init = table".into(),
                })?;
                InitSpec::Table(PathBuf::from(p))
            }
            Some(other) => {
                return Err(ConfigError::Invalid {
                    field: "init",
                    reason: format!("expected indicator|gaussian|table, got `{other}`"),
                })
            }
        };

        let frame = match map.get("frame").map(String::as_str) {
            None | Some("auto") => FrameChoice::Auto,
            Some("physical") => FrameChoice::PhysicalComoving,
            Some("diffusive") => FrameChoice::Diffusive,
            Some("wall-speed") => FrameChoice::WallSpeed,
            Some(other) => {
                return Err(ConfigError::Invalid {
                    field: "frame",
                    reason: format!("expected auto|physical|diffusive|wall-speed, got `{other}`"),
                })
            }
        };

        let t_end = get_f64(&map, "t_end")?;
        let tau_end = get_f64(&map, "tau_end")?;
        if t_end.is_some() && tau_end.is_some() {
            return Err(ConfigError::Invalid {
                field: "t_end",
                reason: "give either t_end or tau_end, not both".into(),
            });
        }

        let schedule = match (map.get("snapshots"), get_usize(&map, "snapshot_count")?) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid {
                    field: "snapshots",
                    reason: "give either snapshots or snapshot_count, not both".into(),
                })
            }
            (Some(_), None) => {
                let times = get_list(&map, "snapshots")?.unwrap();
                if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::Invalid {
                        field: "snapshots",
                        reason: "must be a nonempty strictly increasing list".into(),
                    });
                }
                ScheduleSpec::Explicit(times)
            }
            (None, Some(k)) => {
                if k == 0 {
                    return Err(ConfigError::Invalid {
                        field: "snapshot_count",
                        reason: "must be >= 1".into(),
                    });
                }
                ScheduleSpec::Uniform(k)
            }
            (None, None) => defaults.schedule.clone(),
        };

        let grid_n = get_usize(&map, "grid_n")?.unwrap_or(defaults.grid_n);
        if grid_n < 16 {
            return Err(ConfigError::Invalid {
                field: "grid_n",
                reason: format!("need at least 16 cells, got {grid_n}"),
            });
        }
        let grid_l = get_f64(&map, "grid_l")?;
        if let Some(l) = grid_l {
            if !(l > 0.0) {
                return Err(ConfigError::Invalid {
                    field: "grid_l",
                    reason: format!("must be > 0, got {l}"),
                });
            }
        }

        let seed = get_usize(&map, "seed")?.map(|v| v as u64).unwrap_or(defaults.seed);
        let particles_n = get_usize(&map, "particles_n")?.unwrap_or(defaults.particles_n);
        if particles_n == 0 {
            return Err(ConfigError::Invalid {
                field: "particles_n",
                reason: "must be >= 1".into(),
            });
        }
        let particle_dt = get_f64(&map, "dt")?;
        if let Some(v) = particle_dt {
            if !(v > 0.0) {
                return Err(ConfigError::Invalid {
                    field: "dt",
                    reason: format!("must be > 0, got {v}"),
                });
            }
        }
        let trajectory_particles =
            get_usize(&map, "trajectory_particles")?.unwrap_or(defaults.trajectory_particles);

        let beta_list = match get_list(&map, "beta_list")? {
            Some(l) => {
                if l.is_empty() {
                    return Err(ConfigError::Invalid {
                        field: "beta_list",
                        reason: "must be nonempty".into(),
                    });
                }
                if let Some(b) = l.iter().find(|b| !(**b >= 0.0)) {
                    return Err(ConfigError::Invalid {
                        field: "beta_list",
                        reason: format!("entries must be >= 0, got {b}"),
                    });
                }
                l
            }
            None => defaults.beta_list.clone(),
        };

        Ok(Self {
            c,
            beta,
            d,
            mass,
            init,
            grid_n,
            grid_l,
            frame,
            t_end,
            tau_end,
            schedule,
            seed,
            out: map.get("out").map(PathBuf::from),
            particles_n,
            particle_dt,
            trajectory_particles,
            beta_list,
        })
    }

    pub fn boundary(&self) -> Result<BoundaryMotion, ConfigError> {
        Ok(BoundaryMotion::new(self.c, self.beta, self.d)?)
    }

    /// Resolve the frame choice for this exponent.
    pub fn problem(&self) -> Result<FpProblem, ConfigError> {
        let bm = self.boundary()?;
        Ok(match self.frame {
            FrameChoice::Auto => FpProblem::auto(bm),
            FrameChoice::PhysicalComoving => FpProblem::physical_comoving(bm),
            FrameChoice::Diffusive => FpProblem::diffusive(bm)?,
            FrameChoice::WallSpeed => FpProblem::super_critical(bm)?,
        })
    }

    /// Materialize the initial data, scaled to the configured mass.
    pub fn initial_data(&self) -> Result<CompactInitialData, ConfigError> {
        Ok(match &self.init {
            InitSpec::Indicator { x0, x1 } => CompactInitialData::indicator(*x0, *x1, self.mass)?,
            InitSpec::Gaussian { center, width } => {
                CompactInitialData::gaussian_bump(*center, *width, self.mass)?
            }
            InitSpec::Table(path) => {
                let text = std::fs::read_to_string(path)?;
                let mut pts = Vec::new();
                for (ln, raw) in text.lines().enumerate() {
                    let line = raw.trim();
                    if line.is_empty() || line.starts_with('#') || line.starts_with("x,") {
                        continue;
                    }
                    let mut parts = line.split(',');
                    let parse = |s: Option<&str>| -> Result<f64, ConfigError> {
                        s.and_then(|v| v.trim().parse::<f64>().ok())
                            .ok_or_else(|| ConfigError::Invalid {
                                field: "init_path",
                                reason: format!("line {}: expected `x,value`", ln + 1),
                            })
                    };
                    let x = parse(parts.next())?;
                    let v = parse(parts.next())?;
                    pts.push((x, v));
                }
                // rescale the table to the configured mass
                let raw = CompactInitialData::from_table(pts.clone())?;
                let r = self.mass / raw.mass();
                for p in &mut pts {
                    p.1 *= r;
                }
                CompactInitialData::from_table(pts)?
            }
        })
    }

    /// Frame-time horizon: `tau_end` directly, or `t_end` through the
    /// frame's time map (identity in the co-moving frame).
    pub fn horizon(&self, problem: &FpProblem) -> Result<f64, ConfigError> {
        let bm = problem.boundary();
        match (self.tau_end, self.t_end) {
            (Some(tau), None) => Ok(tau),
            (None, Some(t)) => Ok(match problem.frame() {
                Frame::PhysicalComoving => t,
                _ => bm.tau_of_t(t)?,
            }),
            (None, None) => Ok(match problem.frame() {
                Frame::PhysicalComoving => 30.0,
                Frame::Diffusive => 6.0,
                Frame::SuperCritical => bm.tau_of_t(1.0e4)?,
            }),
            (Some(_), Some(_)) => unreachable!("rejected at parse time"),
        }
    }

    /// Concrete snapshot schedule over `[0, horizon]`.
    pub fn schedule_times(&self, horizon: f64) -> Vec<f64> {
        match &self.schedule {
            ScheduleSpec::Explicit(times) => times.clone(),
            ScheduleSpec::Uniform(k) => (0..=*k).map(|j| horizon * j as f64 / *k as f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::parse("beta = 0.5\n").unwrap();
        assert_eq!(cfg.beta, 0.5);
        assert_eq!(cfg.grid_n, 4096);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.init, InitSpec::Indicator { x0: 0.0, x1: 1.0 });
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = ExperimentConfig::parse("betta = 0.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("betta"), "{msg}");
    }

    #[test]
    fn negative_beta_is_rejected_naming_the_field() {
        let err = ExperimentConfig::parse("beta = -1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("beta"), "{msg}");
        assert!(msg.contains("-1"), "{msg}");
    }

    #[test]
    fn comments_blanks_and_spacing_are_tolerated() {
        let cfg = ExperimentConfig::parse(
            "# experiment\n\n  c   =  2.0 \nbeta=1\nsnapshots = 1, 2, 4\n",
        )
        .unwrap();
        assert_eq!(cfg.c, 2.0);
        assert_eq!(
            cfg.schedule,
            ScheduleSpec::Explicit(vec![1.0, 2.0, 4.0])
        );
    }

    #[test]
    fn conflicting_keys_are_rejected() {
        assert!(ExperimentConfig::parse("t_end = 1\ntau_end = 2\n").is_err());
        assert!(ExperimentConfig::parse("snapshots = 1,2\nsnapshot_count = 3\n").is_err());
        assert!(ExperimentConfig::parse("c = 1\nc = 2\n").is_err());
        assert!(ExperimentConfig::parse("snapshots = 2,1\n").is_err());
    }

    #[test]
    fn bad_number_names_field_and_value() {
        let err = ExperimentConfig::parse("d = abc\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('d') && msg.contains("abc"), "{msg}");
    }
}
