//! Run configuration: flat key-value settings, merged from a config file and
//! flags, then validated into a [`RunConfig`].

use crate::parse;
use hypconf::confluence_lab::{default_magnitudes, LimitKind, RaySweep};
use hypconf::local_frames::BranchedComplex;
use hypconf::ode_systems::{Family, SingularityLabel};
use hypconf::{Params, RESONANCE_TOL};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Raw settings, keyed by flag name. Tolerances use keys `tol.NAME`.
pub type Settings = BTreeMap<String, String>;

const KEYS: [&str; 14] = [
    "command", "family", "alpha", "beta", "gamma", "frame", "at", "target", "arg-alpha", "magnitudes", "seed", "draws", "format",
    "output",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

fn invalid(msg: impl Into<String>) -> ValidationError {
    ValidationError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl std::str::FromStr for Format {
    type Err = ValidationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(invalid(format!("unknown format '{s}' (expected json, csv or pretty)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameChoice {
    Gauss(SingularityLabel),
    /// Frames at 1 or ∞ in the variables that survive confluence.
    GaussRewritten(SingularityLabel),
    KummerZero,
    KummerFormal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Eval { family: Family, frame: FrameChoice, at: BranchedComplex },
    Connection { family: Family },
    Stokes,
    Monodromy { family: Family },
    ConfluenceSweep { target: LimitKind, sweep: RaySweep },
    MbCheck { family: Family, at: BranchedComplex },
    VerifyAll { seed: u64, draws: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Connection { .. } => "connection",
            Command::Stokes => "stokes",
            Command::Monodromy { .. } => "monodromy",
            Command::ConfluenceSweep { .. } => "confluence-sweep",
            Command::MbCheck { .. } => "mb-check",
            Command::VerifyAll { .. } => "verify-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Absent for `verify-all`, which draws its own.
    pub params: Option<Params>,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Every setting that was read, defaults included. Enough to rebuild the run.
    pub settings: Settings,
}

/// Tolerance names a command accepts, with defaults.
pub fn default_tolerances(command: &str, family: Family) -> &'static [(&'static str, f64)] {
    match (command, family) {
        ("eval", _) => &[("frame-residual", 1e-6)],
        ("connection", Family::Gauss) => &[("oracle", 1e-7), ("composition", 1e-11)],
        ("connection", Family::Kummer) => &[("oracle", 1e-6)],
        ("stokes", _) => &[("oracle", 1e-6), ("cyclic", 1e-10)],
        ("monodromy", Family::Gauss) => &[("oracle", 1e-7), ("cyclic", 1e-10)],
        ("monodromy", Family::Kummer) => &[("oracle", 1e-6), ("cyclic", 1e-10)],
        ("confluence-sweep", _) => &[("rate", 0.1)],
        ("mb-check", _) => &[("mb", 1e-8)],
        ("verify-all", _) => &[
            ("cyclic", 1e-10),
            ("composition", 1e-11),
            ("oracle", 1e-7),
            ("scaled-cyclic", 1e-9),
            ("frame-residual", 1e-6),
            ("mb", 1e-8),
        ],
        _ => &[],
    }
}

/// Read a TOML file of top-level keys, with tolerances in a `[tol]` table.
pub fn settings_from_file(path: &Path) -> Result<Settings, ValidationError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
    let mut out = Settings::new();
    for (k, v) in table {
        if k == "tol" {
            let toml::Value::Table(t) = v else { return Err(invalid("config key 'tol' must be a table")) };
            for (name, tv) in t {
                out.insert(format!("tol.{name}"), scalar(&tv).ok_or_else(|| invalid(format!("tol.{name} must be a number")))?);
            }
        } else {
            out.insert(k.clone(), scalar(&v).ok_or_else(|| invalid(format!("config key '{k}' must be a string or number")))?);
        }
    }
    Ok(out)
}

fn scalar(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(format!("{f:?}")),
        _ => None,
    }
}

/// Parse repeated `NAME=VALUE` tolerance flags into settings entries.
pub fn tolerance_flags(flags: &[String]) -> Result<Settings, ValidationError> {
    flags
        .iter()
        .map(|f| {
            let (n, v) = f.split_once('=').ok_or_else(|| invalid(format!("--tol expects NAME=VALUE, got '{f}'")))?;
            Ok((format!("tol.{}", n.trim()), v.trim().to_string()))
        })
        .collect()
}

struct Reader<'a> {
    raw: &'a Settings,
    used: Settings,
}

impl Reader<'_> {
    fn get(&mut self, key: &str, default: &str) -> String {
        let v = self.raw.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.used.insert(key.to_string(), v.clone());
        v
    }

    fn optional(&mut self, key: &str) -> Option<String> {
        let v = self.raw.get(key).cloned()?;
        self.used.insert(key.to_string(), v.clone());
        Some(v)
    }

    fn parsed<T>(&mut self, key: &str, default: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, ValidationError> {
        let s = self.get(key, default);
        f(&s).map_err(|e| invalid(format!("--{key}: {e}")))
    }
}

impl RunConfig {
    pub fn from_settings(raw: &Settings) -> Result<Self, ValidationError> {
        for k in raw.keys() {
            if !KEYS.contains(&k.as_str()) && !k.starts_with("tol.") {
                return Err(invalid(format!("unknown setting '{k}'")));
            }
        }
        let mut r = Reader { raw, used: Settings::new() };
        let command = r.optional("command").ok_or_else(|| invalid("no command given"))?;
        let fixed = match command.as_str() {
            "stokes" | "confluence-sweep" => Some(Family::Kummer),
            // draws both families; the tag only selects tolerance defaults
            "verify-all" => Some(Family::Gauss),
            _ => None,
        };
        let family = match fixed {
            Some(f) => {
                if let Some(given) = r.optional("family") {
                    if command == "verify-all" || given != "kummer" {
                        return Err(invalid(format!("--family {given} does not apply to {command}")));
                    }
                }
                f
            }
            None => match r.get("family", "gauss").as_str() {
                "gauss" => Family::Gauss,
                "kummer" => Family::Kummer,
                f => return Err(invalid(format!("unknown family '{f}' (expected gauss or kummer)"))),
            },
        };
        let mut params = None;
        if command != "verify-all" {
            let beta = r.parsed("beta", "1/3", parse::complex)?;
            let gamma = r.parsed("gamma", "1/4", parse::complex)?;
            let p = match family {
                Family::Gauss => Params::new(r.parsed("alpha", "2/3", parse::complex)?, beta, gamma),
                Family::Kummer => Params::kummer(beta, gamma),
            };
            check_params(&p, family)?;
            params = Some(p);
        }
        let cmd = match command.as_str() {
            "eval" => {
                let name = r.get("frame", "0");
                let (frame, default_at) = frame_choice(family, &name)?;
                let at = r.parsed("at", default_at, parse::point)?;
                Command::Eval { family, frame, at }
            }
            "connection" => Command::Connection { family },
            "stokes" => Command::Stokes,
            "monodromy" => Command::Monodromy { family },
            "confluence-sweep" => {
                let target: LimitKind = r.get("target", "S0").parse().map_err(|e| invalid(format!("--target: {e}")))?;
                let default_arg = format!("{}", target.arg_alpha().to_degrees().round());
                let arg_deg = r.parsed("arg-alpha", &default_arg, parse::real)?;
                let default_mags = default_magnitudes().iter().map(|m| format!("{m:e}")).collect::<Vec<_>>().join(",");
                let mags = r.parsed("magnitudes", &default_mags, parse::reals)?;
                let sweep = RaySweep::new(arg_deg.to_radians(), mags, params.expect("sweep has params"))
                    .map_err(|e| invalid(format!("sweep rejected: {e}")))?;
                Command::ConfluenceSweep { target, sweep }
            }
            "mb-check" => {
                let default_at = if family == Family::Gauss { "0.5,0.3" } else { "2.5@-80" };
                let at = r.parsed("at", default_at, parse::point)?;
                if family == Family::Gauss && (at.norm() - 1.0).abs() < 1e-6 {
                    return Err(invalid("mb-check: |x| = 1 is not covered (use a point inside or outside the unit circle)"));
                }
                Command::MbCheck { family, at }
            }
            "verify-all" => {
                let seed = r.parsed("seed", "7", |s| s.trim().parse::<u64>().map_err(|e| e.to_string()))?;
                let draws = r.parsed("draws", "50", |s| s.trim().parse::<usize>().map_err(|e| e.to_string()))?;
                if draws == 0 {
                    return Err(invalid("--draws must be positive"));
                }
                Command::VerifyAll { seed, draws }
            }
            other => return Err(invalid(format!("unknown command '{other}'"))),
        };
        let mut tolerances = BTreeMap::new();
        let defaults = default_tolerances(cmd.name(), family);
        for (name, v) in defaults {
            tolerances.insert(name.to_string(), *v);
        }
        for (k, v) in raw.iter().filter(|(k, _)| k.starts_with("tol.")) {
            let name = &k[4..];
            if !tolerances.contains_key(name) {
                let known: Vec<_> = defaults.iter().map(|d| d.0).collect();
                return Err(invalid(format!("{command} has no tolerance '{name}' (known: {})", known.join(", "))));
            }
            let t = parse::real(v).map_err(|e| invalid(format!("--tol {name}: {e}")))?;
            if t <= 0.0 {
                return Err(invalid(format!("--tol {name}: tolerances must be positive, got {t}")));
            }
            tolerances.insert(name.to_string(), t);
            r.used.insert(k.clone(), v.clone());
        }
        let format = r.get("format", "json").parse()?;
        let output_path = r.optional("output").map(PathBuf::from);
        Ok(RunConfig { command: cmd, params, tolerances, output_path, format, settings: r.used })
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Settings that determine the computed values; output options excluded.
    pub fn replay_settings(&self) -> Settings {
        self.settings.iter().filter(|(k, _)| *k != "output" && *k != "format").map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

fn check_params(p: &Params, family: Family) -> Result<(), ValidationError> {
    let r = match family {
        Family::Gauss => p.check_gauss_nonresonant(RESONANCE_TOL).and(p.check_gauss_system(RESONANCE_TOL)),
        Family::Kummer => p.check_kummer_nonresonant(RESONANCE_TOL).and(p.check_kummer_system(RESONANCE_TOL)),
    };
    r.map_err(|e| invalid(format!("parameter check failed: {e}")))
}

fn frame_choice(family: Family, name: &str) -> Result<(FrameChoice, &'static str), ValidationError> {
    use SingularityLabel::*;
    Ok(match (family, name) {
        (Family::Gauss, "0") => (FrameChoice::Gauss(Zero), "0.3,0.2"),
        (Family::Gauss, "1") => (FrameChoice::Gauss(One), "0.8,0.1"),
        (Family::Gauss, "inf") => (FrameChoice::Gauss(Infinity), "2.5,1"),
        (Family::Gauss, "hat1") => (FrameChoice::GaussRewritten(One), "1.5,0.3"),
        (Family::Gauss, "hatinf") => (FrameChoice::GaussRewritten(Infinity), "2.5,1"),
        (Family::Kummer, "0") => (FrameChoice::KummerZero, "1,0.5"),
        (Family::Kummer, "inf") => (FrameChoice::KummerFormal, "30@60"),
        (Family::Gauss, f) => return Err(invalid(format!("unknown Gauss frame '{f}' (expected 0, 1, inf, hat1 or hatinf)"))),
        (Family::Kummer, f) => return Err(invalid(format!("unknown Kummer frame '{f}' (expected 0 or inf)"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_are_recorded() {
        let c = RunConfig::from_settings(&settings(&[("command", "monodromy")])).unwrap();
        assert_eq!(c.command, Command::Monodromy { family: Family::Gauss });
        assert_eq!(c.settings["gamma"], "1/4");
        assert_eq!(c.tol("cyclic"), 1e-10);
        assert_eq!(c.format, Format::Json);
        // rebuilding from the recorded settings gives the same run
        assert_eq!(RunConfig::from_settings(&c.settings).unwrap(), c);
    }

    #[test]
    fn resonance_is_rejected_up_front() {
        let e = RunConfig::from_settings(&settings(&[("command", "connection"), ("gamma", "2")])).unwrap_err();
        assert!(e.0.contains("gamma") && e.0.contains("integer"), "{e}");
        let e = RunConfig::from_settings(&settings(&[("command", "stokes"), ("beta", "1")])).unwrap_err();
        assert!(e.0.contains("beta-1"), "{e}");
    }

    #[test]
    fn tolerance_rules() {
        let ok = RunConfig::from_settings(&settings(&[("command", "stokes"), ("tol.oracle", "1e-5")])).unwrap();
        assert_eq!(ok.tol("oracle"), 1e-5);
        assert!(RunConfig::from_settings(&settings(&[("command", "stokes"), ("tol.oracle", "0")])).is_err());
        assert!(RunConfig::from_settings(&settings(&[("command", "stokes"), ("tol.nope", "1")])).is_err());
        assert!(tolerance_flags(&["oracle".into()]).is_err());
        assert_eq!(tolerance_flags(&["cyclic=1e-9".into()]).unwrap()["tol.cyclic"], "1e-9");
    }

    #[test]
    fn sweep_settings() {
        let c = RunConfig::from_settings(&settings(&[("command", "confluence-sweep"), ("target", "s0"), ("arg-alpha", "+90")])).unwrap();
        let Command::ConfluenceSweep { target, sweep } = c.command else { panic!() };
        assert_eq!(target, LimitKind::S0Limit);
        assert!((sweep.arg_alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(sweep.magnitudes, default_magnitudes());
        let bad = RunConfig::from_settings(&settings(&[("command", "confluence-sweep"), ("arg-alpha", "45")]));
        assert!(bad.unwrap_err().0.contains("sweep rejected"));
        let bad = RunConfig::from_settings(&settings(&[("command", "confluence-sweep"), ("family", "gauss")]));
        assert!(bad.is_err());
    }

    #[test]
    fn frames_and_points() {
        let c = RunConfig::from_settings(&settings(&[("command", "eval"), ("family", "kummer"), ("frame", "inf")])).unwrap();
        let Command::Eval { frame, at, .. } = c.command else { panic!() };
        assert_eq!(frame, FrameChoice::KummerFormal);
        assert!((at.arg_choice - 60f64.to_radians()).abs() < 1e-15);
        assert!(RunConfig::from_settings(&settings(&[("command", "eval"), ("frame", "2")])).is_err());
        assert!(RunConfig::from_settings(&settings(&[("command", "mb-check"), ("at", "1@30")])).is_err());
        assert!(RunConfig::from_settings(&settings(&[("command", "eval"), ("colour", "red")])).is_err());
    }

    #[test]
    fn config_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "beta = \"1/3\"\ngamma = 0.25\ndraws = 3\n[tol]\ncyclic = 1e-9\n").unwrap();
        let s = settings_from_file(&path).unwrap();
        assert_eq!(s["gamma"], "0.25");
        assert_eq!(s["draws"], "3");
        assert_eq!(s["tol.cyclic"], "1e-9");
        std::fs::write(&path, "beta = [1, 2]\n").unwrap();
        assert!(settings_from_file(&path).is_err());
    }
}
