//! Flat sectioned key=value run configuration.
//!
//! ```text
//! [ambient]
//! n = 3
//! epsilon = 0
//! # theta = ...        optional; defaults to (2 pi)^(n-1) for epsilon = 0
//! # genus = 2          n = 3 only; sets theta from the genus
//!
//! [initial]
//! mode = grid          grid | symmetric
//! s0 = 1.0
//! m = 64               grid points per axis (grid mode)
//! mode 1 0 0.1 0.0     Fourier mode: one wavenumber per axis, amp_cos, amp_sin
//! mode 0 1 0.05 0.0
//!
//! [solver]
//! t_end = 12.0
//! record_dt = 0.1
//! safety = 0.4         optional
//! rescale = auto       auto | true | false
//! min_h = 1e-8         optional
//!
//! [output]
//! trace = trace.csv    optional; stdout when omitted
//! ```
//!
//! Unknown keys and malformed lines are errors carrying their line number.

use imcflab::flow::FlowConfig;
use imcflab::{AmbientModel, Epsilon, FourierMode, GraphState};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "config line {}: {}", self.line, self.message)
        } else {
            write!(f, "config: {}", self.message)
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Grid,
    Symmetric,
}

#[derive(Debug)]
pub struct RunConfig {
    pub ambient: AmbientModel,
    pub init_mode: InitMode,
    pub s0: f64,
    pub grid_m: usize,
    pub modes: Vec<FourierMode>,
    pub solver: FlowConfig,
    pub trace_path: Option<PathBuf>,
    /// Resolved key=value summary embedded in the output CSV comment.
    pub resolved: String,
}

impl RunConfig {
    pub fn build_state(&self) -> Result<GraphState, imcflab::Error> {
        match self.init_mode {
            InitMode::Symmetric => GraphState::symmetric(self.ambient.clone(), self.s0),
            InitMode::Grid => {
                GraphState::from_modes(self.ambient.clone(), self.grid_m, self.s0, &self.modes)
            }
        }
    }
}

#[derive(Default)]
struct Raw {
    n: Option<(usize, f64)>,
    epsilon: Option<(usize, f64)>,
    theta: Option<(usize, f64)>,
    genus: Option<(usize, f64)>,
    mode: Option<(usize, String)>,
    s0: Option<(usize, f64)>,
    grid_m: Option<(usize, f64)>,
    fourier: Vec<(usize, String)>,
    t_end: Option<(usize, f64)>,
    record_dt: Option<(usize, f64)>,
    safety: Option<(usize, f64)>,
    rescale: Option<(usize, String)>,
    min_h: Option<(usize, f64)>,
    trace: Option<(usize, String)>,
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let mut section: Option<&str> = None;
    let mut raw = Raw::default();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(ConfigError {
                    line: lineno,
                    message: "unterminated section header".into(),
                })?
                .trim();
            section = match name {
                "ambient" | "initial" | "solver" | "output" => Some(match name {
                    "ambient" => "ambient",
                    "initial" => "initial",
                    "solver" => "solver",
                    _ => "output",
                }),
                _ => return err(lineno, format!("unknown section [{name}]")),
            };
            continue;
        }
        let Some(section) = section else {
            return err(lineno, "entry before any [section] header");
        };

        if let Some((key, value)) = line.split_once('=') {
            let key = key.trim();
            let value = value.trim().to_string();
            let lv = (lineno, value);
            let parse_f64 = |lv: &(usize, String)| -> Result<(usize, f64), ConfigError> {
                lv.1.parse::<f64>().map(|v| (lv.0, v)).map_err(|e| ConfigError {
                    line: lv.0,
                    message: format!("bad number {:?}: {e}", lv.1),
                })
            };
            let slot_taken = |line: usize, key: &str| -> Result<(), ConfigError> {
                err(line, format!("duplicate key `{key}`"))
            };
            match (section, key) {
                ("ambient", "n") => {
                    if raw.n.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("ambient", "epsilon") => {
                    if raw.epsilon.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("ambient", "theta") => {
                    if raw.theta.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("ambient", "genus") => {
                    if raw.genus.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("initial", "mode") => {
                    if raw.mode.replace(lv).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("initial", "s0") => {
                    if raw.s0.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("initial", "m") => {
                    if raw.grid_m.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("solver", "t_end") => {
                    if raw.t_end.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("solver", "record_dt") => {
                    if raw.record_dt.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("solver", "safety") => {
                    if raw.safety.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("solver", "rescale") => {
                    if raw.rescale.replace(lv).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("solver", "min_h") => {
                    if raw.min_h.replace(parse_f64(&lv)?).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                ("output", "trace") => {
                    if raw.trace.replace(lv).is_some() {
                        slot_taken(lineno, key)?;
                    }
                }
                (section, key) => {
                    return err(lineno, format!("unknown key `{key}` in section [{section}]"))
                }
            }
        } else if section == "initial" && line.starts_with("mode ") {
            raw.fourier.push((lineno, line.to_string()));
        } else {
            return err(lineno, format!("cannot parse entry {line:?}"));
        }
    }

    build(raw)
}

fn as_usize(slot: Option<(usize, f64)>, name: &str) -> Result<Option<(usize, usize)>, ConfigError> {
    match slot {
        None => Ok(None),
        Some((line, v)) => {
            if v.fract() != 0.0 || v < 0.0 {
                err(line, format!("{name} must be a non-negative integer"))
            } else {
                Ok(Some((line, v as usize)))
            }
        }
    }
}

fn require<T>(slot: Option<(usize, T)>, what: &str) -> Result<(usize, T), ConfigError> {
    slot.ok_or(ConfigError {
        line: 0,
        message: format!("missing required key `{what}`"),
    })
}

fn build(raw: Raw) -> Result<RunConfig, ConfigError> {
    let (n_line, n) = require(as_usize(raw.n, "n")?, "n")?;
    let (eps_line, eps_v) = require(raw.epsilon, "epsilon")?;
    if eps_v != 0.0 && eps_v != -1.0 {
        return err(eps_line, format!("epsilon must be 0 or -1, got {eps_v}"));
    }
    let epsilon = Epsilon::from_i32(eps_v as i32).expect("validated");

    let ambient = match (raw.theta, as_usize(raw.genus, "genus")?) {
        (Some((line, _)), Some(_)) => {
            return err(line, "theta and genus are mutually exclusive")
        }
        (None, Some((line, g))) => {
            let amb = AmbientModel::from_genus(g as u32)
                .map_err(|e| ConfigError {
                    line,
                    message: e.to_string(),
                })?;
            if amb.n() != n {
                return err(line, "genus models require n = 3");
            }
            if amb.epsilon() != epsilon {
                return err(
                    line,
                    format!(
                        "genus {g} implies epsilon = {}, config says {}",
                        amb.epsilon().as_i32(),
                        epsilon.as_i32()
                    ),
                );
            }
            amb
        }
        (Some((line, theta)), None) => AmbientModel::new(n, epsilon, theta, None)
            .map_err(|e| ConfigError {
                line,
                message: e.to_string(),
            })?,
        (None, None) => match epsilon {
            Epsilon::Flat => AmbientModel::flat_torus(n).map_err(|e| ConfigError {
                line: n_line,
                message: e.to_string(),
            })?,
            Epsilon::Hyperbolic => {
                return err(
                    eps_line,
                    "epsilon = -1 needs an explicit theta or a genus",
                )
            }
        },
    };

    let (mode_line, mode_str) = require(raw.mode, "mode")?;
    let init_mode = match mode_str.as_str() {
        "grid" => InitMode::Grid,
        "symmetric" => InitMode::Symmetric,
        other => return err(mode_line, format!("mode must be grid or symmetric, got {other:?}")),
    };
    let (_, s0) = require(raw.s0, "s0")?;

    let grid_m = match (init_mode, as_usize(raw.grid_m, "m")?) {
        (InitMode::Grid, Some((_, m))) => m,
        (InitMode::Grid, None) => return err(0, "grid mode requires `m` (points per axis)"),
        (InitMode::Symmetric, Some((line, _))) => {
            return err(line, "`m` is only meaningful in grid mode")
        }
        (InitMode::Symmetric, None) => 0,
    };

    let mut modes = Vec::new();
    for (line, text) in &raw.fourier {
        if init_mode == InitMode::Symmetric {
            return err(*line, "Fourier modes are only meaningful in grid mode");
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        // `mode` + one wavenumber per cross-section axis + two amplitudes
        let dim = ambient.dim();
        if fields.len() != 1 + dim + 2 {
            return err(
                *line,
                format!(
                    "mode line needs {} wavenumbers and 2 amplitudes, got {} fields",
                    dim,
                    fields.len() - 1
                ),
            );
        }
        let mut k = Vec::with_capacity(dim);
        for f in &fields[1..=dim] {
            k.push(f.parse::<i32>().map_err(|e| ConfigError {
                line: *line,
                message: format!("bad wavenumber {f:?}: {e}"),
            })?);
        }
        let amp_cos = fields[dim + 1].parse::<f64>().map_err(|e| ConfigError {
            line: *line,
            message: format!("bad amplitude {:?}: {e}", fields[dim + 1]),
        })?;
        let amp_sin = fields[dim + 2].parse::<f64>().map_err(|e| ConfigError {
            line: *line,
            message: format!("bad amplitude {:?}: {e}", fields[dim + 2]),
        })?;
        modes.push(FourierMode {
            k,
            amp_cos,
            amp_sin,
        });
    }

    let (_, t_end) = require(raw.t_end, "t_end")?;
    let (_, record_dt) = require(raw.record_dt, "record_dt")?;
    let mut solver = FlowConfig::new(t_end, record_dt);
    if let Some((_, s)) = raw.safety {
        solver.safety = s;
    }
    if let Some((_, h)) = raw.min_h {
        solver.min_h = h;
    }
    if let Some((line, r)) = raw.rescale {
        solver.rescale = match r.as_str() {
            "auto" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => {
                return err(line, format!("rescale must be auto, true or false, got {other:?}"))
            }
        };
    }
    solver.validate().map_err(|e| ConfigError {
        line: 0,
        message: e.to_string(),
    })?;

    let mode_summary: Vec<String> = modes
        .iter()
        .map(|m| {
            format!(
                "mode {} {} {}",
                m.k.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                m.amp_cos,
                m.amp_sin
            )
        })
        .collect();
    let resolved = format!(
        "n={} epsilon={} theta={} genus={} mode={} s0={} m={} modes=[{}] safety={} t_end={} record_dt={} rescale={} min_h={}",
        ambient.n(),
        ambient.epsilon().as_i32(),
        ambient.theta(),
        ambient
            .genus()
            .map_or("none".to_string(), |g| g.to_string()),
        match init_mode {
            InitMode::Grid => "grid",
            InitMode::Symmetric => "symmetric",
        },
        s0,
        grid_m,
        mode_summary.join("; "),
        solver.safety,
        solver.t_end,
        solver.record_dt,
        match solver.rescale {
            None => "auto",
            Some(true) => "true",
            Some(false) => "false",
        },
        solver.min_h
    );

    Ok(RunConfig {
        ambient,
        init_mode,
        s0,
        grid_m,
        modes,
        solver,
        trace_path: raw.trace.map(|(_, p)| PathBuf::from(p)),
        resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
[ambient]
n = 3
epsilon = 0

[initial]
mode = grid
s0 = 1.0
m = 16
mode 1 0 0.1 0.0
mode 0 1 0.05 0.0

[solver]
t_end = 1.0
record_dt = 0.5
";

    #[test]
    fn parses_the_reference_config() {
        let cfg = parse(GOOD).unwrap();
        assert_eq!(cfg.grid_m, 16);
        assert_eq!(cfg.modes.len(), 2);
        assert_eq!(cfg.modes[1].k, vec![0, 1]);
        assert!(cfg.build_state().is_ok());
    }

    #[test]
    fn unknown_key_reports_line() {
        let bad = GOOD.replace("s0 = 1.0", "s0 = 1.0\nwobble = 3");
        let e = parse(&bad).unwrap_err();
        assert_eq!(e.line, 8);
        assert!(e.message.contains("wobble"));
    }

    #[test]
    fn wrong_mode_arity_reports_line() {
        let bad = GOOD.replace("mode 1 0 0.1 0.0", "mode 1 0.1 0.0");
        let e = parse(&bad).unwrap_err();
        assert!(e.message.contains("wavenumbers"));
    }

    #[test]
    fn hyperbolic_needs_theta_or_genus() {
        let bad = GOOD
            .replace("epsilon = 0", "epsilon = -1")
            .replace("mode = grid", "mode = symmetric")
            .replace("m = 16\n", "")
            .replace("mode 1 0 0.1 0.0\n", "")
            .replace("mode 0 1 0.05 0.0\n", "");
        assert!(parse(&bad).is_err());
        let ok = bad.replace("epsilon = -1", "epsilon = -1\ngenus = 2");
        let cfg = parse(&ok).unwrap();
        assert_eq!(cfg.ambient.genus(), Some(2));
        assert!(cfg.build_state().is_ok());
    }

    #[test]
    fn symmetric_mode_rejects_grid_keys() {
        let bad = GOOD.replace("mode = grid", "mode = symmetric");
        let e = parse(&bad).unwrap_err();
        assert!(e.message.contains("grid mode"));
    }
}
