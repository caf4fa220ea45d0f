//! Scenario configuration: line-oriented `key = value` with `[section]`
//! headers, `#` comment lines, UTF-8. Unknown sections or keys are errors.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::phs::{BoundaryMode, DensityPoly, EnergySpec, InitialCondition, Preset, Profile, Scheme};

/// Everything a `run` needs, parsed and validated.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub preset: Preset,
    pub cells: Vec<usize>,
    pub lengths: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    pub boundary: BoundaryMode,
    pub out_dir: PathBuf,
    pub verify_every: usize,
    pub snapshot_every: usize,
    pub seed: u64,
    pub energy: EnergySpec,
    pub init: InitialCondition,
    pub kappa: f64,
    pub verify_stokes_dirac: bool,
    pub verify_lift: bool,
    pub verify_infogeo: bool,
    /// Test hook: perturb the lifted effort coordinates by this amplitude so
    /// the lift verification trips; 0 disables.
    pub corrupt_effort: f64,
}

#[derive(Debug, Default)]
struct RawConfig {
    entries: Vec<(String, String, String, usize)>, // (section, key, value, line)
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    let mut section = String::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unclosed section", lineno + 1)))?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        raw.entries.push((
            section.clone(),
            key.trim().to_string(),
            value.trim().to_string(),
            lineno + 1,
        ));
    }
    Ok(raw)
}

struct Entry {
    section: &'static str,
    key: &'static str,
    value: Option<String>,
}

struct Known {
    entries: Vec<Entry>,
}

impl Known {
    fn new() -> Known {
        let mut entries = Vec::new();
        for (section, key) in [
            ("run", "preset"),
            ("run", "dt"),
            ("run", "steps"),
            ("run", "scheme"),
            ("run", "boundary"),
            ("run", "out"),
            ("run", "verify_every"),
            ("run", "snapshot_every"),
            ("run", "seed"),
            ("mesh", "cells"),
            ("mesh", "lengths"),
            ("energy", "kind"),
            ("energy", "coeff_p"),
            ("energy", "coeff_q"),
            ("energy", "c2_p"),
            ("energy", "c2_q"),
            ("energy", "c4_p"),
            ("energy", "c4_q"),
            ("init", "profile"),
            ("init", "amplitude"),
            ("init", "modes"),
            ("init", "center"),
            ("init", "width"),
            ("contact", "kappa"),
            ("verify", "stokes_dirac"),
            ("verify", "lift"),
            ("verify", "infogeo"),
            ("debug", "corrupt_effort"),
        ] {
            entries.push(Entry {
                section,
                key,
                value: None,
            });
        }
        Known { entries }
    }

    fn absorb(&mut self, raw: RawConfig) -> Result<()> {
        for (section, key, value, line) in raw.entries {
            let slot = self
                .entries
                .iter_mut()
                .find(|e| e.section == section && e.key == key);
            match slot {
                Some(e) => {
                    if e.value.is_some() {
                        return Err(Error::Config(format!(
                            "line {line}: duplicate key {section}.{key}"
                        )));
                    }
                    e.value = Some(value);
                }
                None => {
                    return Err(Error::Config(format!(
                        "line {line}: unknown key {section}.{key}"
                    )))
                }
            }
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.section == section && e.key == key)
            .and_then(|e| e.value.as_deref())
    }
}

fn parse_field<T: std::str::FromStr>(value: &str, field: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("field {field}: cannot parse `{value}`")))
}

fn parse_list<T: std::str::FromStr>(value: &str, field: &str) -> Result<Vec<T>> {
    value
        .split_whitespace()
        .map(|tok| parse_field::<T>(tok, field))
        .collect()
}

fn positive(v: f64, field: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("field {field}: must be > 0, got {v}")))
    }
}

/// Parse and validate a scenario configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut known = Known::new();
    known.absorb(parse_raw(text)?)?;

    let preset_name = known
        .get("run", "preset")
        .ok_or_else(|| Error::Config("field run.preset: missing".into()))?;
    let preset = Preset::parse(preset_name)
        .map_err(|_| Error::Config(format!("field run.preset: unknown preset `{preset_name}`")))?;
    let sig = preset.signature();

    let cells: Vec<usize> = match known.get("mesh", "cells") {
        Some(v) => parse_list(v, "mesh.cells")?,
        None => vec![16; sig.n],
    };
    if cells.len() != sig.n {
        return Err(Error::Config(format!(
            "field mesh.cells: expected {} entries for {}, got {}",
            sig.n,
            preset.name(),
            cells.len()
        )));
    }
    if cells.iter().any(|&c| c == 0) {
        return Err(Error::Config("field mesh.cells: must be >= 1".into()));
    }
    let lengths: Vec<f64> = match known.get("mesh", "lengths") {
        Some(v) => parse_list(v, "mesh.lengths")?,
        None => vec![1.0; sig.n],
    };
    if lengths.len() != sig.n {
        return Err(Error::Config(format!(
            "field mesh.lengths: expected {} entries, got {}",
            sig.n,
            lengths.len()
        )));
    }
    for &l in &lengths {
        positive(l, "mesh.lengths")?;
    }

    let dt = positive(
        parse_field(known.get("run", "dt").unwrap_or("0.001"), "run.dt")?,
        "run.dt",
    )?;
    let steps: usize = parse_field(known.get("run", "steps").unwrap_or("100"), "run.steps")?;
    if steps == 0 {
        return Err(Error::Config("field run.steps: must be >= 1".into()));
    }
    let scheme = match known.get("run", "scheme").unwrap_or("rk4") {
        "rk4" => Scheme::Rk4,
        "midpoint" => Scheme::Midpoint,
        other => {
            return Err(Error::Config(format!(
                "field run.scheme: unknown scheme `{other}`"
            )))
        }
    };
    let boundary = match known.get("run", "boundary").unwrap_or("reflecting") {
        "reflecting" => BoundaryMode::Reflecting,
        "open" => BoundaryMode::Open,
        "absorbing" => BoundaryMode::Absorbing,
        other => {
            return Err(Error::Config(format!(
                "field run.boundary: unknown mode `{other}`"
            )))
        }
    };
    let out_dir = PathBuf::from(known.get("run", "out").unwrap_or("out"));
    let verify_every: usize = parse_field(
        known.get("run", "verify_every").unwrap_or("10"),
        "run.verify_every",
    )?;
    let snapshot_every: usize = parse_field(
        known.get("run", "snapshot_every").unwrap_or("0"),
        "run.snapshot_every",
    )?;
    let seed: u64 = parse_field(known.get("run", "seed").unwrap_or("1"), "run.seed")?;

    let energy = match known.get("energy", "kind").unwrap_or("quadratic") {
        "quadratic" => EnergySpec::Quadratic {
            c_p: positive(
                parse_field(
                    known.get("energy", "coeff_p").unwrap_or("0.5"),
                    "energy.coeff_p",
                )?,
                "energy.coeff_p",
            )?,
            c_q: positive(
                parse_field(
                    known.get("energy", "coeff_q").unwrap_or("0.5"),
                    "energy.coeff_q",
                )?,
                "energy.coeff_q",
            )?,
        },
        "density" => {
            if sig.n != 1 {
                return Err(Error::Config(
                    "field energy.kind: density requires a 1-d preset".into(),
                ));
            }
            EnergySpec::PointwiseDensity(DensityPoly {
                c2_p: parse_field(known.get("energy", "c2_p").unwrap_or("0.5"), "energy.c2_p")?,
                c2_q: parse_field(known.get("energy", "c2_q").unwrap_or("0.5"), "energy.c2_q")?,
                c4_p: parse_field(known.get("energy", "c4_p").unwrap_or("0"), "energy.c4_p")?,
                c4_q: parse_field(known.get("energy", "c4_q").unwrap_or("0"), "energy.c4_q")?,
            })
        }
        other => {
            return Err(Error::Config(format!(
                "field energy.kind: unknown kind `{other}`"
            )))
        }
    };

    let profile = match known.get("init", "profile").unwrap_or("sine") {
        "sine" => Profile::Sine,
        "gaussian" => Profile::Gaussian,
        "noise" => Profile::Noise,
        other => {
            return Err(Error::Config(format!(
                "field init.profile: unknown profile `{other}`"
            )))
        }
    };
    let init = InitialCondition {
        profile,
        amplitude: parse_field(
            known.get("init", "amplitude").unwrap_or("1"),
            "init.amplitude",
        )?,
        modes: parse_field(known.get("init", "modes").unwrap_or("1"), "init.modes")?,
        center: parse_field(known.get("init", "center").unwrap_or("0.5"), "init.center")?,
        width: positive(
            parse_field(known.get("init", "width").unwrap_or("0.08"), "init.width")?,
            "init.width",
        )?,
        seed,
    };

    let kappa: f64 = parse_field(known.get("contact", "kappa").unwrap_or("1"), "contact.kappa")?;
    let parse_bool = |v: Option<&str>, field: &str, default: bool| -> Result<bool> {
        match v {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => Err(Error::Config(format!(
                "field {field}: expected true or false, got `{other}`"
            ))),
        }
    };
    Ok(ScenarioConfig {
        preset,
        cells,
        lengths,
        dt,
        steps,
        scheme,
        boundary,
        out_dir,
        verify_every,
        snapshot_every,
        seed,
        energy,
        init,
        kappa,
        verify_stokes_dirac: parse_bool(known.get("verify", "stokes_dirac"), "verify.stokes_dirac", false)?,
        verify_lift: parse_bool(known.get("verify", "lift"), "verify.lift", true)?,
        verify_infogeo: parse_bool(known.get("verify", "infogeo"), "verify.infogeo", false)?,
        corrupt_effort: parse_field(
            known.get("debug", "corrupt_effort").unwrap_or("0"),
            "debug.corrupt_effort",
        )?,
    })
}
