use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{DEBYE, MICROMETER, NANOMETER, SPEED_OF_LIGHT};
use crate::dynamics::{PumpConfig, PumpRegime, EE, EG, GE, GG};
use crate::greens::{
    FabryPerotModel, FreeSpace, GreenProvider, GuideGeometry, Plasmon1DModel, Site, SlotScatterer,
    SlottedGuide, TabulatedGreenSet, DEFAULT_END_REFLECTION, DEFAULT_SLOT_REFLECTION,
    DEFAULT_SLOT_TRANSMISSION,
};
use crate::rates::{compute_rates, convert, QubitPair, RateMatrix, Unit};
use crate::{Error, Result};

use super::table::load_green_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    FreeSpace,
    InfiniteGuide,
    FiniteGuide,
    Slotted,
    Tabulated,
    /// Rates given directly in μeV.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    RatesSweep,
    Transient,
    Steady,
    SeparationSweep,
    PumpSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Ee,
    Eg,
    Ge,
    Gg,
}

impl InitialState {
    pub fn index(self) -> usize {
        match self {
            InitialState::Ee => EE,
            InitialState::Eg => EG,
            InitialState::Ge => GE,
            InitialState::Gg => GG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub position_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_phase_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_phase_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderSpec {
    pub kind: ProviderKind,
    /// Add the vacuum term to a structured provider.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_free_space: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_spp_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_length_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_pl_uev: Option<f64>,
    /// Dipole at which `gamma_pl_uev` holds; other dipoles scale as `d²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dipole_debye: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_end_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_end_phase_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<SlotSpec>>,
    /// Green-table path, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_aa_uev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_bb_uev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_ab_uev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_ab_uev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_thz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole_debye: Option<f64>,
    /// Dipole direction; normalized on use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_a_nm: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_b_nm: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing_uev: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    pub regimes: Vec<PumpRegime>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rabi_over_gamma_aa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_a_over_gamma_aa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_b_over_gamma_aa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_over_lambda_spp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_over_lambda_spp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_over_gamma_aa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_over_gamma_aa: Option<f64>,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub mode: RunMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_over_gamma_aa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub provider: ProviderSpec,
    pub qubits: QubitSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpSpec>,
    pub run: RunSpec,
}

pub const DEFAULT_TRANSIENT_HORIZON: f64 = 10.0;
pub const DEFAULT_STEADY_HORIZON: f64 = 50.0;
pub const DEFAULT_SAMPLES: usize = 1001;

fn missing(key: &str) -> Error {
    Error::Validation(format!("`{key}` is required"))
}

fn invalid(key: &str, why: impl std::fmt::Display) -> Error {
    Error::Validation(format!("`{key}` {why}"))
}

fn positive(key: &str, v: Option<f64>) -> Result<f64> {
    match v {
        None => Err(missing(key)),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(invalid(key, format_args!("must be positive and finite, got {x}"))),
    }
}

fn require_absent<T>(key: &str, v: &Option<T>, context: &str) -> Result<()> {
    match v {
        Some(_) => Err(invalid(key, format_args!("is not used by {context}"))),
        None => Ok(()),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Inverse of [`parse_scenario`].
pub fn serialize(scenario: &Scenario) -> Result<String> {
    toml::to_string(scenario).map_err(|e| Error::Validation(format!("cannot serialize scenario: {e}")))
}

/// Applies `key=value` overrides (dotted paths) to a scenario document and
/// parses the result. Values are read as TOML, falling back to a bare string.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<Scenario> {
    if overrides.is_empty() {
        return parse_scenario(text);
    }
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    for item in overrides {
        let (path, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("override `{item}` is not key=value")))?;
        let path = path.trim();
        let value = parse_value(raw.trim());
        set_path(&mut doc, path, value)?;
    }
    let text = toml::to_string(&doc).map_err(|e| Error::Validation(e.to_string()))?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| {
        Error::Validation(format!("override rejected: {}", e.message().trim()))
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(doc: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Validation(format!("malformed override key `{path}`")));
    }
    set_in_table(doc, &keys, value, path)
}

fn set_in_table(table: &mut toml::Table, keys: &[&str], value: toml::Value, path: &str) -> Result<()> {
    let (first, rest) = keys.split_first().expect("nonempty key path");
    if rest.is_empty() {
        table.insert(first.to_string(), value);
        return Ok(());
    }
    let entry = table
        .entry(first.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    set_in_value(entry, rest, value, path)
}

fn set_in_value(target: &mut toml::Value, keys: &[&str], value: toml::Value, path: &str) -> Result<()> {
    match target {
        toml::Value::Table(t) => set_in_table(t, keys, value, path),
        toml::Value::Array(items) => {
            let item = keys[0]
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| Error::Validation(format!("override `{path}`: `{}` is not a valid list index", keys[0])))?;
            if keys.len() == 1 {
                *item = value;
                Ok(())
            } else {
                set_in_value(item, &keys[1..], value, path)
            }
        }
        _ => Err(Error::Validation(format!("override `{path}` descends into a scalar"))),
    }
}

impl ProviderSpec {
    fn is_guide(&self) -> bool {
        matches!(
            self.kind,
            ProviderKind::InfiniteGuide | ProviderKind::FiniteGuide | ProviderKind::Slotted
        )
    }

    fn is_finite(&self) -> bool {
        match self.kind {
            ProviderKind::FiniteGuide => true,
            ProviderKind::Slotted => self.length_nm.is_some(),
            _ => false,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let p = &self.provider;
        let q = &self.qubits;
        let kind = format!("provider kind `{}`", kind_name(p.kind));

        if p.kind == ProviderKind::Direct {
            positive("provider.gamma_aa_uev", p.gamma_aa_uev)?;
            if p.gamma_bb_uev.is_some() {
                positive("provider.gamma_bb_uev", p.gamma_bb_uev)?;
            }
            for (key, v) in [("provider.gamma_ab_uev", p.gamma_ab_uev), ("provider.g_ab_uev", p.g_ab_uev)] {
                match v {
                    None => return Err(missing(key)),
                    Some(x) if !x.is_finite() => return Err(invalid(key, "must be finite")),
                    _ => {}
                }
            }
            self.direct_rates()?;
        } else {
            for (key, v) in [
                ("provider.gamma_aa_uev", &p.gamma_aa_uev),
                ("provider.gamma_bb_uev", &p.gamma_bb_uev),
                ("provider.gamma_ab_uev", &p.gamma_ab_uev),
                ("provider.g_ab_uev", &p.g_ab_uev),
            ] {
                require_absent(key, v, &kind)?;
            }
            positive("qubits.frequency_thz", q.frequency_thz)?;
            positive("qubits.dipole_debye", q.dipole_debye)?;
            if let Some(o) = q.orientation {
                if !(o.iter().all(|x| x.is_finite()) && o.iter().any(|x| *x != 0.0)) {
                    return Err(invalid("qubits.orientation", "must be a finite nonzero vector"));
                }
            }
        }

        if p.is_guide() {
            positive("provider.lambda_spp_nm", p.lambda_spp_nm)?;
            match p.prop_length_um {
                Some(l) if l > 0.0 => {}
                Some(l) => return Err(invalid("provider.prop_length_um", format_args!("must be positive, got {l}"))),
                None => return Err(missing("provider.prop_length_um")),
            }
            match p.gamma_pl_uev {
                Some(g) if g >= 0.0 && g.is_finite() => {}
                Some(g) => return Err(invalid("provider.gamma_pl_uev", format_args!("must be nonnegative, got {g}"))),
                None => return Err(missing("provider.gamma_pl_uev")),
            }
            if p.reference_dipole_debye.is_some() {
                positive("provider.reference_dipole_debye", p.reference_dipole_debye)?;
            }
        } else {
            for (key, present) in [
                ("provider.lambda_spp_nm", p.lambda_spp_nm.is_some()),
                ("provider.prop_length_um", p.prop_length_um.is_some()),
                ("provider.gamma_pl_uev", p.gamma_pl_uev.is_some()),
                ("provider.length_nm", p.length_nm.is_some()),
                ("provider.r_end_abs", p.r_end_abs.is_some()),
                ("provider.r_end_phase_deg", p.r_end_phase_deg.is_some()),
                ("provider.slots", p.slots.is_some()),
            ] {
                if present {
                    return Err(invalid(key, format_args!("is not used by {kind}")));
                }
            }
            if p.kind != ProviderKind::Tabulated {
                require_absent("provider.reference_dipole_debye", &p.reference_dipole_debye, &kind)?;
            }
        }
        if matches!(p.kind, ProviderKind::FreeSpace | ProviderKind::Direct) {
            require_absent("provider.include_free_space", &p.include_free_space, &kind)?;
        }

        if p.is_finite() {
            positive("provider.length_nm", p.length_nm)?;
            match p.r_end_abs {
                Some(r) if (0.0..=1.0).contains(&r) => {}
                Some(r) => return Err(invalid("provider.r_end_abs", format_args!("must lie in [0, 1], got {r}"))),
                None => {}
            }
        } else if p.is_guide() {
            require_absent("provider.length_nm", &p.length_nm, &kind)?;
            require_absent("provider.r_end_abs", &p.r_end_abs, "an infinite guide")?;
            require_absent("provider.r_end_phase_deg", &p.r_end_phase_deg, "an infinite guide")?;
        }
        match p.kind {
            ProviderKind::Slotted => {
                if p.slots.is_none() {
                    return Err(missing("provider.slots"));
                }
            }
            _ => require_absent("provider.slots", &p.slots, &kind)?,
        }
        match p.kind {
            ProviderKind::Tabulated => {
                if p.table.is_none() {
                    return Err(missing("provider.table"));
                }
                if q.site_a.is_none() {
                    return Err(missing("qubits.site_a"));
                }
                if q.site_b.is_none() {
                    return Err(missing("qubits.site_b"));
                }
            }
            _ => {
                require_absent("provider.table", &p.table, &kind)?;
                require_absent("qubits.site_a", &q.site_a, &kind)?;
                require_absent("qubits.site_b", &q.site_b, &kind)?;
            }
        }
        if !matches!(p.kind, ProviderKind::Tabulated | ProviderKind::Direct) {
            for (key, pos) in [("qubits.position_a_nm", q.position_a_nm), ("qubits.position_b_nm", q.position_b_nm)] {
                match pos {
                    None => return Err(missing(key)),
                    Some(v) if v.iter().any(|x| !x.is_finite()) => return Err(invalid(key, "must be finite")),
                    _ => {}
                }
            }
            if q.position_a_nm == q.position_b_nm {
                return Err(invalid("qubits.position_b_nm", "coincides with position_a_nm"));
            }
        } else {
            require_absent("qubits.position_a_nm", &q.position_a_nm, &kind)?;
            require_absent("qubits.position_b_nm", &q.position_b_nm, &kind)?;
        }
        if let Some(d) = q.dephasing_uev {
            if d.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return Err(invalid("qubits.dephasing_uev", "entries must be nonnegative"));
            }
        }
        if let Some(slots) = &p.slots {
            for (i, s) in slots.iter().enumerate() {
                let key = format!("provider.slots.{i}");
                if !s.position_nm.is_finite() {
                    return Err(invalid(&format!("{key}.position_nm"), "must be finite"));
                }
                for (name, v) in [("r_abs", s.r_abs), ("t_abs", s.t_abs)] {
                    if let Some(x) = v {
                        if !(0.0..=1.0).contains(&x) {
                            return Err(invalid(&format!("{key}.{name}"), format_args!("must lie in [0, 1], got {x}")));
                        }
                    }
                }
            }
        }

        self.validate_pump()?;
        self.validate_run()?;
        if p.kind != ProviderKind::Tabulated {
            // Catches geometry errors (domain, overlapping slots) at load time.
            self.green_provider(Path::new("."))?;
        }
        Ok(())
    }

    fn validate_pump(&self) -> Result<()> {
        let Some(pump) = &self.pump else { return Ok(()) };
        if pump.regimes.is_empty() {
            return Err(invalid("pump.regimes", "must list at least one regime"));
        }
        if pump.regimes.contains(&PumpRegime::Custom) {
            return Err(invalid("pump.regimes", "accepts symmetric, antisymmetric or asymmetric"));
        }
        for (i, r) in pump.regimes.iter().enumerate() {
            if pump.regimes[..i].contains(r) {
                return Err(invalid("pump.regimes", format_args!("lists `{}` twice", r.name())));
            }
        }
        if pump.rabi_over_gamma_aa.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(invalid("pump.rabi_over_gamma_aa", "entries must be nonnegative"));
        }
        for (key, v) in [
            ("pump.detuning_a_over_gamma_aa", pump.detuning_a_over_gamma_aa),
            ("pump.detuning_b_over_gamma_aa", pump.detuning_b_over_gamma_aa),
        ] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(invalid(key, "must be finite"));
            }
        }
        Ok(())
    }

    fn validate_run(&self) -> Result<()> {
        let run = &self.run;
        let timed = matches!(run.mode, RunMode::Transient | RunMode::Steady);
        if let Some(h) = run.horizon_over_gamma_aa {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid("run.horizon_over_gamma_aa", format_args!("must be positive, got {h}")));
            }
        }
        if let Some(n) = run.samples {
            if n < 2 {
                return Err(invalid("run.samples", "must be at least 2"));
            }
        }
        if !timed {
            require_absent("run.samples", &run.samples, "sweep modes")?;
        }
        let pump = self.pump.as_ref();
        let rabi_count = pump.map_or(0, |p| p.rabi_over_gamma_aa.len());
        match run.mode {
            RunMode::RatesSweep => {
                if self.provider.kind == ProviderKind::Direct || self.provider.kind == ProviderKind::Tabulated {
                    return Err(invalid("run.mode", "rates_sweep needs a position-resolved provider"));
                }
                require_absent("run.horizon_over_gamma_aa", &run.horizon_over_gamma_aa, "rates_sweep")?;
                require_absent("run.initial_state", &run.initial_state, "rates_sweep")?;
                require_absent("pump", &self.pump, "rates_sweep")?;
            }
            RunMode::Transient | RunMode::Steady => {
                require_absent("run.sweep", &run.sweep, "time-domain modes")?;
                if run.mode == RunMode::Steady && pump.is_none() {
                    return Err(missing("pump"));
                }
                if pump.is_some() && rabi_count == 0 {
                    return Err(missing("pump.rabi_over_gamma_aa"));
                }
            }
            RunMode::SeparationSweep => {
                if matches!(self.provider.kind, ProviderKind::Direct | ProviderKind::Tabulated) {
                    return Err(invalid("run.mode", "separation_sweep needs a position-resolved provider"));
                }
                if pump.is_none() {
                    return Err(missing("pump"));
                }
                if rabi_count != 1 {
                    return Err(invalid("pump.rabi_over_gamma_aa", "must hold exactly one value for a separation sweep"));
                }
            }
            RunMode::PumpSweep => {
                if pump.is_none() {
                    return Err(missing("pump"));
                }
                if rabi_count != 0 {
                    return Err(invalid("pump.rabi_over_gamma_aa", "is swept; set run.sweep instead"));
                }
            }
        }
        let sweeping = matches!(run.mode, RunMode::RatesSweep | RunMode::SeparationSweep | RunMode::PumpSweep);
        if !sweeping {
            return Ok(());
        }
        let sweep = run.sweep.as_ref().ok_or_else(|| missing("run.sweep"))?;
        let (lo_key, hi_key, lo, hi) = if run.mode == RunMode::PumpSweep {
            require_absent("run.sweep.min_over_lambda_spp", &sweep.min_over_lambda_spp, "pump_sweep")?;
            require_absent("run.sweep.max_over_lambda_spp", &sweep.max_over_lambda_spp, "pump_sweep")?;
            ("run.sweep.min_over_gamma_aa", "run.sweep.max_over_gamma_aa", sweep.min_over_gamma_aa, sweep.max_over_gamma_aa)
        } else {
            require_absent("run.sweep.min_over_gamma_aa", &sweep.min_over_gamma_aa, "separation sweeps")?;
            require_absent("run.sweep.max_over_gamma_aa", &sweep.max_over_gamma_aa, "separation sweeps")?;
            ("run.sweep.min_over_lambda_spp", "run.sweep.max_over_lambda_spp", sweep.min_over_lambda_spp, sweep.max_over_lambda_spp)
        };
        let lo = lo.ok_or_else(|| missing(lo_key))?;
        let hi = hi.ok_or_else(|| missing(hi_key))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid(lo_key, "and its maximum must be finite"));
        }
        if !(hi > lo) {
            return Err(invalid(hi_key, format_args!("({hi}) must exceed {lo_key} ({lo})")));
        }
        if sweep.points < 2 {
            return Err(invalid("run.sweep.points", "must be at least 2"));
        }
        if sweep.spacing == Spacing::Log && !(lo > 0.0) {
            return Err(invalid(lo_key, "must be positive for log spacing"));
        }
        if run.mode != RunMode::PumpSweep && lo < 0.0 {
            return Err(invalid(lo_key, "must be nonnegative"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.run.horizon_over_gamma_aa.unwrap_or(match self.run.mode {
            RunMode::Transient if self.pump.is_none() => DEFAULT_TRANSIENT_HORIZON,
            _ => DEFAULT_STEADY_HORIZON,
        })
    }

    pub fn samples(&self) -> usize {
        self.run.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn initial_state(&self) -> usize {
        self.run.initial_state.unwrap_or(InitialState::Eg).index()
    }

    /// Sweep abscissae, strictly increasing.
    pub fn sweep_points(&self) -> Vec<f64> {
        let Some(s) = &self.run.sweep else { return Vec::new() };
        let (lo, hi) = if self.run.mode == RunMode::PumpSweep {
            (s.min_over_gamma_aa.unwrap_or(0.0), s.max_over_gamma_aa.unwrap_or(0.0))
        } else {
            (s.min_over_lambda_spp.unwrap_or(0.0), s.max_over_lambda_spp.unwrap_or(0.0))
        };
        let n = s.points;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match s.spacing {
                    Spacing::Linear => lo + (hi - lo) * f,
                    Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * f).exp(),
                }
            })
            .collect()
    }

    pub fn omega(&self) -> Result<f64> {
        let f = positive("qubits.frequency_thz", self.qubits.frequency_thz)?;
        convert(f, Unit::Terahertz, Unit::RadPerSecond)
    }

    pub fn dipole(&self) -> Result<Vector3<f64>> {
        let d = positive("qubits.dipole_debye", self.qubits.dipole_debye)? * DEBYE;
        let o = self.qubits.orientation.unwrap_or([1.0, 0.0, 0.0]);
        Ok(Vector3::from(o).normalize() * d)
    }

    /// Dephasing rates in rad/s.
    pub fn dephasing(&self) -> Result<[f64; 2]> {
        let [a, b] = self.qubits.dephasing_uev.unwrap_or([0.0, 0.0]);
        Ok([
            convert(a, Unit::MicroElectronVolt, Unit::RadPerSecond)?,
            convert(b, Unit::MicroElectronVolt, Unit::RadPerSecond)?,
        ])
    }

    /// Characteristic length for separation sweeps: `λ_spp` for guides, the
    /// vacuum wavelength otherwise (metres).
    pub fn sweep_wavelength(&self) -> Result<f64> {
        match self.provider.lambda_spp_nm {
            Some(l) => Ok(l * NANOMETER),
            None => Ok(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.omega()?),
        }
    }

    pub fn sites(&self) -> (Site, Site) {
        let q = &self.qubits;
        match (&q.site_a, &q.site_b) {
            (Some(a), Some(b)) => (
                Site::new(a.clone(), Vector3::zeros()),
                Site::new(b.clone(), Vector3::zeros()),
            ),
            _ => {
                let pos = |p: Option<[f64; 3]>| Vector3::from(p.unwrap_or([0.0; 3])) * NANOMETER;
                (Site::new("a", pos(q.position_a_nm)), Site::new("b", pos(q.position_b_nm)))
            }
        }
    }

    pub fn qubit_pair(&self) -> Result<QubitPair> {
        let (a, b) = self.sites();
        let [ga, gb] = self.dephasing()?;
        QubitPair::new(self.omega()?, self.dipole()?, a, b)?.with_dephasing(ga, gb)
    }

    fn direct_rates(&self) -> Result<RateMatrix> {
        let p = &self.provider;
        let to_rad = |v: Option<f64>| convert(v.unwrap_or(0.0), Unit::MicroElectronVolt, Unit::RadPerSecond);
        let gaa = to_rad(p.gamma_aa_uev)?;
        let gbb = match p.gamma_bb_uev {
            Some(_) => to_rad(p.gamma_bb_uev)?,
            None => gaa,
        };
        RateMatrix::symmetric(gaa, gbb, to_rad(p.gamma_ab_uev)?, to_rad(p.g_ab_uev)?)
    }

    /// The structured (scattered) part of the reservoir, without the vacuum
    /// term. `None` for the free-space and direct kinds.
    pub fn green_provider(&self, base_dir: &Path) -> Result<Option<Box<dyn GreenProvider>>> {
        let p = &self.provider;
        let guide_base = || -> Result<Plasmon1DModel> {
            let model = Plasmon1DModel::new(
                p.lambda_spp_nm.unwrap_or(0.0) * NANOMETER,
                p.prop_length_um.unwrap_or(0.0) * MICROMETER,
                convert(p.gamma_pl_uev.unwrap_or(0.0), Unit::MicroElectronVolt, Unit::RadPerSecond)?,
            )?;
            match p.reference_dipole_debye {
                Some(d) => model.with_reference_dipole(d * DEBYE),
                None => Ok(model),
            }
        };
        let r_end = || {
            Complex64::from_polar(
                p.r_end_abs.unwrap_or(DEFAULT_END_REFLECTION.norm()),
                p.r_end_phase_deg
                    .unwrap_or(DEFAULT_END_REFLECTION.arg().to_degrees())
                    .to_radians(),
            )
        };
        let geometry = || -> Result<GuideGeometry> {
            let base = guide_base()?;
            Ok(if p.is_finite() {
                GuideGeometry::Finite(FabryPerotModel::new(base, p.length_nm.unwrap_or(0.0) * NANOMETER, r_end())?)
            } else {
                GuideGeometry::Infinite(base)
            })
        };
        Ok(match p.kind {
            ProviderKind::FreeSpace | ProviderKind::Direct => None,
            ProviderKind::InfiniteGuide => Some(Box::new(guide_base()?)),
            ProviderKind::FiniteGuide => match geometry()? {
                GuideGeometry::Finite(fp) => Some(Box::new(fp)),
                GuideGeometry::Infinite(m) => Some(Box::new(m)),
            },
            ProviderKind::Slotted => {
                let slots = p
                    .slots
                    .iter()
                    .flatten()
                    .map(|s| {
                        SlotScatterer::new(
                            s.position_nm * NANOMETER,
                            Complex64::from_polar(
                                s.r_abs.unwrap_or(DEFAULT_SLOT_REFLECTION.norm()),
                                s.r_phase_deg.unwrap_or(DEFAULT_SLOT_REFLECTION.arg().to_degrees()).to_radians(),
                            ),
                            Complex64::from_polar(
                                s.t_abs.unwrap_or(DEFAULT_SLOT_TRANSMISSION.norm()),
                                s.t_phase_deg.unwrap_or(DEFAULT_SLOT_TRANSMISSION.arg().to_degrees()).to_radians(),
                            ),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Box::new(SlottedGuide::new(geometry()?, slots)?))
            }
            ProviderKind::Tabulated => {
                let path: PathBuf = base_dir.join(p.table.as_deref().unwrap_or_default());
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let set: TabulatedGreenSet = load_green_table(&text)?;
                Some(Box::new(set))
            }
        })
    }

    fn include_free_space(&self) -> bool {
        match self.provider.kind {
            ProviderKind::FreeSpace => true,
            ProviderKind::Direct => false,
            ProviderKind::Tabulated => self.provider.include_free_space.unwrap_or(false),
            _ => self.provider.include_free_space.unwrap_or(true),
        }
    }

    /// Total rates (rad/s) seen by the pair, or the direct rates.
    pub fn rates(&self, provider: Option<&dyn GreenProvider>) -> Result<RateMatrix> {
        self.rates_with(provider, self.include_free_space())
    }

    /// Rates from the structured part only (vacuum excluded) where one exists.
    pub fn scattered_rates(&self, provider: Option<&dyn GreenProvider>) -> Result<RateMatrix> {
        self.rates_with(provider, provider.is_none())
    }

    fn rates_with(&self, provider: Option<&dyn GreenProvider>, vacuum: bool) -> Result<RateMatrix> {
        if self.provider.kind == ProviderKind::Direct {
            return self.direct_rates();
        }
        let pair = self.qubit_pair()?;
        match provider {
            Some(p) => compute_rates(&pair, p, vacuum),
            None => compute_rates(&pair, &FreeSpace, false),
        }
    }

    /// Pump configurations for the given Rabi magnitude (in units of `Γ_aa`).
    pub fn pump_configs(&self, rabi: f64) -> Vec<PumpConfig> {
        let Some(p) = &self.pump else { return Vec::new() };
        p.regimes
            .iter()
            .map(|r| {
                let base = match r {
                    PumpRegime::Symmetric => PumpConfig::symmetric(rabi),
                    PumpRegime::Antisymmetric => PumpConfig::antisymmetric(rabi),
                    _ => PumpConfig::asymmetric(rabi),
                };
                base.with_detuning(
                    p.detuning_a_over_gamma_aa.unwrap_or(0.0),
                    p.detuning_b_over_gamma_aa.unwrap_or(0.0),
                )
            })
            .collect()
    }

    /// Copy with qubit b moved to `z_a + dz` along the guide axis. Finite
    /// guides grow with the move and slots beyond the midpoint travel with b.
    pub fn with_separation(&self, dz_nm: f64) -> Result<Scenario> {
        let mut s = self.clone();
        let a = self.qubits.position_a_nm.ok_or_else(|| missing("qubits.position_a_nm"))?;
        let b = self.qubits.position_b_nm.ok_or_else(|| missing("qubits.position_b_nm"))?;
        let new_b = [b[0], b[1], a[2] + dz_nm];
        let shift = new_b[2] - b[2];
        s.qubits.position_b_nm = Some(new_b);
        if self.provider.is_finite() {
            let mid = 0.5 * (a[2] + b[2]);
            // Keeps an emitter sitting on the far end exactly on it.
            s.provider.length_nm = self.provider.length_nm.map(|l| new_b[2] + (l - b[2]));
            if let Some(slots) = &mut s.provider.slots {
                for slot in slots.iter_mut().filter(|slot| slot.position_nm > mid) {
                    slot.position_nm += shift;
                }
            }
        } else if let Some(slots) = &mut s.provider.slots {
            let mid = 0.5 * (a[2] + b[2]);
            for slot in slots.iter_mut().filter(|slot| slot.position_nm > mid) {
                slot.position_nm += shift;
            }
        }
        Ok(s)
    }
}

fn kind_name(kind: ProviderKind) -> &'static str {
    match kind {
        ProviderKind::FreeSpace => "free_space",
        ProviderKind::InfiniteGuide => "infinite_guide",
        ProviderKind::FiniteGuide => "finite_guide",
        ProviderKind::Slotted => "slotted",
        ProviderKind::Tabulated => "tabulated",
        ProviderKind::Direct => "direct",
    }
}
