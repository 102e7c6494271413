//! Run configuration: TOML ingestion, overrides and validation.
//!
//! Precedence, lowest first: built-in defaults, `INGHAM_RATES_TOL`, the
//! config file, command-line flags.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use ingham_core::kernels::{Kernel, KernelKind};
use ingham_core::quadrature::QuadratureSpec;
use ingham_core::rate_functions::{MonotoneFunction, Shape, Variant};
use ingham_core::semigroup::{EnvelopeShape, OrbitKind, Scenario, ScenarioFamily};
use ingham_core::verify::{corollary_orbit, geometric, linear};
use serde::Serialize;
use toml::{Table, Value};

pub const TOL_ENV: &str = "INGHAM_RATES_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    BoundTable,
    KernelCheck,
    Parseval,
    MollifierRate,
    AsymptoticRegularity,
    CompareDecay,
    RawBoundOracle,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::BoundTable,
        Experiment::KernelCheck,
        Experiment::Parseval,
        Experiment::MollifierRate,
        Experiment::AsymptoticRegularity,
        Experiment::CompareDecay,
        Experiment::RawBoundOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::BoundTable => "bound_table",
            Experiment::KernelCheck => "kernel_check",
            Experiment::Parseval => "parseval",
            Experiment::MollifierRate => "mollifier_rate",
            Experiment::AsymptoticRegularity => "asymptotic_regularity",
            Experiment::CompareDecay => "compare_decay",
            Experiment::RawBoundOracle => "raw_bound_oracle",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    fn uses_scenario(self) -> bool {
        matches!(
            self,
            Experiment::Parseval | Experiment::MollifierRate | Experiment::AsymptoticRegularity | Experiment::CompareDecay
        )
    }

    fn uses_kernel(self) -> bool {
        matches!(
            self,
            Experiment::KernelCheck | Experiment::Parseval | Experiment::MollifierRate | Experiment::AsymptoticRegularity
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub family: String,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub n_infinity: usize,
    pub n_zero: usize,
    pub re: f64,
    pub im: f64,
    pub omega: f64,
    pub orbit: String,
}

/// A closed-form rate function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceConfig {
    pub family: String,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConfig {
    pub variant: String,
    pub c: f64,
    pub envelope: String,
    pub fit_decades: f64,
    pub expect_monotone_ratio: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelConfig {
    pub name: String,
    pub r: f64,
    pub sharpness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => geometric(self.min, self.max, self.points),
            Spacing::Linear => linear(self.min, self.max, self.points),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalConfig {
    pub times: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MollifierConfig {
    pub radii: Vec<f64>,
    pub t_max: f64,
    pub t_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: Format,
}

/// Fully validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub scenario: ScenarioConfig,
    pub growth: SourceConfig,
    pub decay: SourceConfig,
    pub bound: BoundConfig,
    pub kernel: KernelConfig,
    pub grid: GridConfig,
    pub parseval: ParsevalConfig,
    pub mollifier: MollifierConfig,
    pub tolerances: ToleranceConfig,
    pub output: OutputConfig,
    /// Accepted for interface stability; every computation is deterministic.
    pub seed: Option<u64>,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        writeln!(f, "invalid configuration ({n} problem{}):", if n == 1 { "" } else { "s" })?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Parses `key=value` with the value read as a TOML literal, falling back to
/// a bare string.
pub fn parse_assignment(raw: &str) -> Result<(String, Value), String> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("override `{raw}` is not of the form key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(format!("override `{raw}` has an empty key"));
    }
    let value = value.trim();
    let parsed = toml::from_str::<Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

/// Sets a dotted key in a table, creating sections as needed.
pub fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), String> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields one part");
    let mut current = table;
    for part in parts {
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{part}` in `{key}` is not a section"))?;
    }
    current.insert(last.to_string(), value);
    Ok(())
}

/// Tolerances from the environment variable: `abs` or `abs,rel`.
pub fn env_tolerances(raw: &str) -> Result<(f64, Option<f64>), String> {
    let mut parts = raw.split(',').map(str::trim);
    let parse = |s: &str| -> Result<f64, String> {
        s.parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| format!("{TOL_ENV}=`{raw}`: need positive numbers `abs` or `abs,rel`"))
    };
    let abs = parse(parts.next().unwrap_or(""))?;
    let rel = parts.next().map(parse).transpose()?;
    if parts.next().is_some() {
        return Err(format!("{TOL_ENV}=`{raw}`: at most two values"));
    }
    Ok((abs, rel))
}

/// Parses config text on its own, with no overrides.
#[cfg(test)]
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let table: Table = toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("malformed config: {e}")]))?;
    resolve(table, None, None)
}

/// Reads a merged table into a validated configuration.
///
/// `experiment` (from the subcommand) wins over the table's `experiment`;
/// `env_tol` replaces the built-in tolerance defaults.
pub fn resolve(
    table: Table,
    experiment: Option<Experiment>,
    env_tol: Option<(f64, Option<f64>)>,
) -> Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut root = Reader::new("", Some(&table));
    let experiment = match experiment {
        Some(e) => Some(e),
        None => {
            let name = root.string("experiment", None, &mut errors);
            match name.as_deref().map(|n| (n, Experiment::parse(n))) {
                Some((_, Some(e))) => Some(e),
                Some((n, None)) => {
                    errors.push(format!(
                        "experiment: unknown `{n}` (expected one of {})",
                        Experiment::ALL.map(|e| e.name()).join(", ")
                    ));
                    None
                }
                None => {
                    errors.push("experiment: missing".into());
                    None
                }
            }
        }
    };
    let seed = root.integer("seed", None, &mut errors).map(|v| v as u64);
    let sections = [
        "scenario",
        "growth",
        "decay",
        "bound",
        "kernel",
        "grid",
        "parseval",
        "mollifier",
        "tolerances",
        "output",
    ];
    for key in table.keys() {
        if !sections.contains(&key.as_str()) && key != "experiment" && key != "seed" {
            errors.push(format!("unknown key `{key}`"));
        } else if sections.contains(&key.as_str()) && !table[key].is_table() {
            errors.push(format!("`{key}` must be a section"));
        }
    }
    let section = |name: &'static str| Reader::new(name, table.get(name).and_then(Value::as_table));

    // Unknown experiment: report structural problems only.
    let exp = experiment.unwrap_or(Experiment::BoundTable);
    let d = Defaults::for_experiment(exp);

    let mut s = section("scenario");
    let scenario = ScenarioConfig {
        family: s.string("family", Some(d.family), &mut errors).unwrap_or_default(),
        alpha: s.float("alpha", Some(1.0), &mut errors).unwrap_or(1.0),
        beta: s.float("beta", Some(2.0), &mut errors).unwrap_or(2.0),
        n: s.count("n", Some(d.n), &mut errors).unwrap_or(1),
        n_infinity: s.count("n_infinity", Some(10_000), &mut errors).unwrap_or(1),
        n_zero: s.count("n_zero", Some(1000), &mut errors).unwrap_or(1),
        re: s.float("re", Some(-1.0), &mut errors).unwrap_or(-1.0),
        im: s.float("im", Some(d.im), &mut errors).unwrap_or(0.0),
        omega: s.float("omega", Some(1.0), &mut errors).unwrap_or(1.0),
        orbit: s.string("orbit", Some("auto"), &mut errors).unwrap_or_default(),
    };
    s.finish(&mut errors);

    let source = |name: &'static str, errors: &mut Vec<String>| {
        let mut r = section(name);
        let cfg = SourceConfig {
            family: r.string("family", Some("power"), errors).unwrap_or_default(),
            alpha: r.float("alpha", Some(1.0), errors).unwrap_or(1.0),
            value: r.float("value", Some(1.0), errors).unwrap_or(1.0),
        };
        r.finish(errors);
        cfg
    };
    let growth = source("growth", &mut errors);
    let decay = source("decay", &mut errors);

    let mut b = section("bound");
    let variant = b.string("variant", Some(d.variant), &mut errors).unwrap_or_default();
    let k = b.count("k", None, &mut errors);
    let variant = match (k, variant.contains(':')) {
        (Some(_), true) => {
            errors.push("bound.k: give k either in bound.variant (`name:k`) or in bound.k, not both".into());
            variant
        }
        (Some(k), false) => format!("{variant}:{k}"),
        (None, _) => variant,
    };
    let parsed_variant = match variant.parse::<Variant>() {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("bound.variant: {e}"));
            None
        }
    };
    let default_c = parsed_variant.map(Variant::default_c).unwrap_or(1.0);
    let bound = BoundConfig {
        variant: parsed_variant.map(|v| variant_key(v)).unwrap_or(variant),
        c: b.float("c", Some(default_c), &mut errors).unwrap_or(default_c),
        envelope: b.string("envelope", Some("running_max"), &mut errors).unwrap_or_default(),
        fit_decades: b.float("fit_decades", Some(2.0), &mut errors).unwrap_or(2.0),
        expect_monotone_ratio: b.boolean("expect_monotone_ratio", Some(false), &mut errors).unwrap_or(false),
    };
    b.finish(&mut errors);

    let mut kr = section("kernel");
    let kernel = KernelConfig {
        name: kr.string("name", Some("tent"), &mut errors).unwrap_or_default(),
        r: kr.float("r", Some(1.0), &mut errors).unwrap_or(1.0),
        sharpness: kr
            .float("sharpness", Some(ingham_core::kernels::DEFAULT_BUMP_SHARPNESS), &mut errors)
            .unwrap_or(2.0),
    };
    kr.finish(&mut errors);

    let mut g = section("grid");
    let spacing = match g.string("spacing", Some(d.spacing), &mut errors).as_deref() {
        Some("log") | None => Spacing::Log,
        Some("linear") => Spacing::Linear,
        Some(other) => {
            errors.push(format!("grid.spacing: `{other}` is neither `log` nor `linear`"));
            Spacing::Log
        }
    };
    let grid = GridConfig {
        min: g.float("min", Some(d.grid.0), &mut errors).unwrap_or(d.grid.0),
        max: g.float("max", Some(d.grid.1), &mut errors).unwrap_or(d.grid.1),
        points: g.count("points", Some(d.grid.2), &mut errors).unwrap_or(d.grid.2),
        spacing,
    };
    g.finish(&mut errors);

    let mut p = section("parseval");
    let parseval = ParsevalConfig {
        times: p.floats("times", Some(&[0.0, 1.0, 5.0]), &mut errors).unwrap_or_default(),
        tolerance: p.float("tolerance", Some(1e-6), &mut errors).unwrap_or(1e-6),
    };
    p.finish(&mut errors);

    let mut m = section("mollifier");
    let mollifier = MollifierConfig {
        radii: m.floats("radii", Some(&[4.0, 8.0, 16.0, 32.0]), &mut errors).unwrap_or_default(),
        t_max: m.float("t_max", Some(20.0), &mut errors).unwrap_or(20.0),
        t_points: m.count("t_points", Some(191), &mut errors).unwrap_or(191),
    };
    m.finish(&mut errors);

    let (abs_default, rel_default) = match env_tol {
        Some((abs, rel)) => (abs, rel.unwrap_or(abs * 10.0)),
        None => {
            let spec = QuadratureSpec::<f64>::default();
            (spec.abs_tol, spec.rel_tol)
        }
    };
    let mut t = section("tolerances");
    let tolerances = ToleranceConfig {
        abs: t.float("abs", Some(abs_default), &mut errors).unwrap_or(abs_default),
        rel: t.float("rel", Some(rel_default), &mut errors).unwrap_or(rel_default),
        max_subdivisions: t.count("max_subdivisions", Some(4000), &mut errors).unwrap_or(4000),
    };
    t.finish(&mut errors);

    let mut o = section("output");
    let format = match o.string("format", Some("both"), &mut errors).as_deref() {
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some("both") | None => Format::Both,
        Some(other) => {
            errors.push(format!("output.format: `{other}` is not csv, json or both"));
            Format::Both
        }
    };
    let output = OutputConfig {
        path: PathBuf::from(o.string("path", Some(exp.name()), &mut errors).unwrap_or_default()),
        format,
    };
    o.finish(&mut errors);

    let Some(experiment) = experiment else {
        return Err(ConfigErrors(errors));
    };
    let mut config = RunConfig {
        experiment,
        scenario,
        growth,
        decay,
        bound,
        kernel,
        grid,
        parseval,
        mollifier,
        tolerances,
        output,
        seed,
    };
    config.resolve_orbit(parsed_variant);
    config.validate(parsed_variant, &mut errors);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errors))
    }
}

fn variant_key(v: Variant) -> String {
    match v.k() {
        Some(k) => format!("{}:{k}", v.name()),
        None => v.name().to_string(),
    }
}

/// Experiment-dependent defaults.
struct Defaults {
    family: &'static str,
    n: usize,
    im: f64,
    variant: &'static str,
    grid: (f64, f64, usize),
    spacing: &'static str,
}

impl Defaults {
    fn for_experiment(e: Experiment) -> Self {
        let base = Defaults {
            family: "single_mode",
            n: 1000,
            im: 0.0,
            variant: "infinity_smooth",
            grid: (10.0, 1e4, 61),
            spacing: "log",
        };
        match e {
            Experiment::BoundTable => base,
            Experiment::KernelCheck => Defaults {
                grid: (0.0, 2.0, 9),
                spacing: "linear",
                ..base
            },
            Experiment::Parseval => base,
            Experiment::MollifierRate => Defaults { im: 1.0, ..base },
            Experiment::AsymptoticRegularity => Defaults {
                family: "cluster_zero",
                grid: (10.0, 1e3, 41),
                ..base
            },
            Experiment::CompareDecay => Defaults {
                family: "cluster_infinity",
                n: 10_000,
                grid: (10.0, 1e3, 41),
                ..base
            },
            Experiment::RawBoundOracle => Defaults {
                grid: (1e2, 1e4, 21),
                ..base
            },
        }
    }
}

impl RunConfig {
    fn resolve_orbit(&mut self, variant: Option<Variant>) {
        if self.scenario.orbit != "auto" {
            return;
        }
        self.scenario.orbit = match (self.experiment, variant) {
            (Experiment::CompareDecay, Some(v)) => orbit_key(&corollary_orbit::<f64>(v)).to_string(),
            _ => "vector".into(),
        };
    }

    pub fn variant(&self) -> Variant {
        self.bound.variant.parse().expect("validated variant")
    }

    pub fn spec(&self) -> QuadratureSpec<f64> {
        QuadratureSpec {
            max_subdivisions: self.tolerances.max_subdivisions,
            ..QuadratureSpec::with_tolerances(self.tolerances.abs, self.tolerances.rel)
        }
    }

    pub fn envelope(&self) -> EnvelopeShape {
        match self.bound.envelope.as_str() {
            "concave_majorant" => EnvelopeShape::ConcaveMajorant,
            _ => EnvelopeShape::RunningMax,
        }
    }

    pub fn scenario(&self) -> ingham_core::Result<Scenario<f64>> {
        let s = &self.scenario;
        let family = match s.family.as_str() {
            "cluster_infinity" => ScenarioFamily::ClusterInfinity { alpha: s.alpha, n: s.n },
            "cluster_zero" => ScenarioFamily::ClusterZero { beta: s.beta, n: s.n },
            "combined" => ScenarioFamily::Combined {
                alpha: s.alpha,
                beta: s.beta,
                n_infinity: s.n_infinity,
                n_zero: s.n_zero,
            },
            _ => ScenarioFamily::SingleMode { re: s.re, im: s.im },
        };
        let orbit = match s.orbit.as_str() {
            "ainv" => OrbitKind::Ainv,
            "ar_omega" => OrbitKind::AROmega,
            "ar_omega_sq" => OrbitKind::AROmegaSq,
            _ => OrbitKind::Vector(None),
        };
        Scenario::new(family, orbit, s.omega)
    }

    pub fn kernel(&self) -> ingham_core::Result<Kernel<f64>> {
        let kind: KernelKind = self.kernel.name.parse()?;
        let base = match kind {
            KernelKind::Bump => Kernel::bump(self.kernel.sharpness)?,
            _ => Kernel::of_kind(kind)?,
        };
        base.scaled(self.kernel.r)
    }

    pub fn source(&self, shape: Shape) -> ingham_core::Result<MonotoneFunction<f64>> {
        let cfg = match shape {
            Shape::Growth => &self.growth,
            Shape::Decay => &self.decay,
        };
        match cfg.family.as_str() {
            "exponential" => MonotoneFunction::exponential(shape, cfg.alpha),
            "constant" => MonotoneFunction::constant(shape, cfg.value),
            _ => MonotoneFunction::power(shape, cfg.alpha),
        }
    }

    fn validate(&self, variant: Option<Variant>, errors: &mut Vec<String>) {
        let e = self.experiment;
        let families = ["single_mode", "cluster_infinity", "cluster_zero", "combined"];
        if !families.contains(&self.scenario.family.as_str()) {
            errors.push(format!(
                "scenario.family: unknown `{}` (expected one of {})",
                self.scenario.family,
                families.join(", ")
            ));
        } else if e.uses_scenario() {
            let orbits = ["ainv", "ar_omega", "ar_omega_sq", "vector"];
            if !orbits.contains(&self.scenario.orbit.as_str()) {
                errors.push(format!(
                    "scenario.orbit: unknown `{}` (expected auto or one of {})",
                    self.scenario.orbit,
                    orbits.join(", ")
                ));
            } else if let Err(err) = self.scenario() {
                errors.push(format!("scenario: {err}"));
            }
        }
        for (name, cfg) in [("growth", &self.growth), ("decay", &self.decay)] {
            if !["power", "exponential", "constant"].contains(&cfg.family.as_str()) {
                errors.push(format!("{name}.family: unknown `{}` (expected power, exponential or constant)", cfg.family));
            }
        }
        if matches!(e, Experiment::BoundTable | Experiment::RawBoundOracle) {
            for shape in [Shape::Growth, Shape::Decay] {
                if let Err(err) = self.source(shape) {
                    errors.push(format!("{}: {err}", if shape == Shape::Growth { "growth" } else { "decay" }));
                }
            }
        }
        if let Some(v) = variant {
            if matches!(e, Experiment::BoundTable | Experiment::CompareDecay | Experiment::RawBoundOracle) {
                if let Err(err) = v.check_c(self.bound.c) {
                    errors.push(format!("bound.c: {err}"));
                }
            }
            if e == Experiment::RawBoundOracle && !matches!(v, Variant::InfinityCk { .. } | Variant::InfinitySmooth) {
                errors.push(format!("bound.variant: raw_bound_oracle needs infinity_Ck or infinity_smooth, got {v}"));
            }
        }
        if !["running_max", "concave_majorant"].contains(&self.bound.envelope.as_str()) {
            errors.push(format!(
                "bound.envelope: unknown `{}` (expected running_max or concave_majorant)",
                self.bound.envelope
            ));
        }
        if !(self.bound.fit_decades > 0.0) {
            errors.push("bound.fit_decades: must be positive".into());
        }
        match self.kernel.name.parse::<KernelKind>() {
            Err(err) => errors.push(format!("kernel.name: {err}")),
            Ok(kind) if e.uses_kernel() => {
                if !(self.kernel.r > 0.0) || !self.kernel.r.is_finite() {
                    errors.push("kernel.r: must be positive and finite".into());
                }
                if e == Experiment::AsymptoticRegularity && kind == KernelKind::Fudge {
                    if let Err(err) = Kernel::<f64>::fudge().require_regular() {
                        errors.push(format!("kernel.name: {err}"));
                    }
                }
            }
            Ok(_) => {}
        }
        let g = &self.grid;
        let grid_used = !matches!(e, Experiment::Parseval | Experiment::MollifierRate);
        if grid_used {
            if g.points == 0 {
                errors.push("grid.points: must be at least 1".into());
            }
            if !(g.max >= g.min) || !g.min.is_finite() || !g.max.is_finite() {
                errors.push(format!("grid: need finite min <= max, got [{}, {}]", g.min, g.max));
            }
            if g.spacing == Spacing::Log && !(g.min > 0.0) {
                errors.push(format!("grid.min: log spacing needs min > 0, got {}", g.min));
            }
            let fitted = matches!(
                e,
                Experiment::BoundTable | Experiment::CompareDecay | Experiment::AsymptoticRegularity
            );
            if fitted && g.points < 5 {
                errors.push(format!("grid.points: slope fits need at least 5 points, got {}", g.points));
            }
            if matches!(e, Experiment::BoundTable | Experiment::RawBoundOracle) && g.min < 1.0 {
                errors.push(format!("grid.min: time grids start at t >= 1, got {}", g.min));
            }
        }
        if e == Experiment::Parseval {
            if self.parseval.times.is_empty() {
                errors.push("parseval.times: must be non-empty".into());
            }
            if !(self.parseval.tolerance > 0.0) {
                errors.push("parseval.tolerance: must be positive".into());
            }
        }
        if e == Experiment::MollifierRate {
            let r = &self.mollifier.radii;
            if r.is_empty() || r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().any(|v| !(*v > 0.0)) {
                errors.push("mollifier.radii: need a non-empty increasing list of positive radii".into());
            }
            if !(self.mollifier.t_max > 1.0) {
                errors.push("mollifier.t_max: must exceed 1".into());
            }
            if self.mollifier.t_points < 2 {
                errors.push("mollifier.t_points: need at least 2".into());
            }
        }
        if let Err(err) = self.spec().validate() {
            errors.push(format!("tolerances: {err}"));
        }
        if self.output.path.as_os_str().is_empty() {
            errors.push("output.path: must be non-empty".into());
        }
    }
}

fn orbit_key<T>(orbit: &OrbitKind<T>) -> &'static str {
    match orbit {
        OrbitKind::Ainv => "ainv",
        OrbitKind::AROmega => "ar_omega",
        OrbitKind::AROmegaSq => "ar_omega_sq",
        OrbitKind::Vector(_) => "vector",
    }
}

/// Typed access to one section that records which keys were read.
struct Reader<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: BTreeSet<String>,
}

impl<'a> Reader<'a> {
    fn new(name: &'static str, table: Option<&'a Table>) -> Self {
        Self {
            name,
            table,
            seen: BTreeSet::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        self.seen.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn float(&mut self, key: &str, default: Option<f64>, errors: &mut Vec<String>) -> Option<f64> {
        match self.get(key) {
            None => default,
            Some(Value::Float(v)) => Some(*v),
            Some(Value::Integer(v)) => Some(*v as f64),
            Some(other) => {
                errors.push(format!("{}: expected a number, got {}", self.path(key), other.type_str()));
                None
            }
        }
    }

    fn integer(&mut self, key: &str, default: Option<i64>, errors: &mut Vec<String>) -> Option<i64> {
        match self.get(key) {
            None => default,
            Some(Value::Integer(v)) => Some(*v),
            Some(Value::Float(v)) if v.fract() == 0.0 && v.abs() < 9e15 => Some(*v as i64),
            Some(other) => {
                errors.push(format!("{}: expected an integer, got {other}", self.path(key)));
                None
            }
        }
    }

    fn count(&mut self, key: &str, default: Option<usize>, errors: &mut Vec<String>) -> Option<usize> {
        let v = self.integer(key, default.map(|d| d as i64), errors)?;
        if v < 0 {
            errors.push(format!("{}: must be non-negative, got {v}", self.path(key)));
            return None;
        }
        Some(v as usize)
    }

    fn boolean(&mut self, key: &str, default: Option<bool>, errors: &mut Vec<String>) -> Option<bool> {
        match self.get(key) {
            None => default,
            Some(Value::Boolean(v)) => Some(*v),
            Some(other) => {
                errors.push(format!("{}: expected true or false, got {other}", self.path(key)));
                None
            }
        }
    }

    fn string(&mut self, key: &str, default: Option<&str>, errors: &mut Vec<String>) -> Option<String> {
        match self.get(key) {
            None => default.map(str::to_string),
            Some(Value::String(v)) => Some(v.clone()),
            Some(other) => {
                errors.push(format!("{}: expected a string, got {other}", self.path(key)));
                None
            }
        }
    }

    fn floats(&mut self, key: &str, default: Option<&[f64]>, errors: &mut Vec<String>) -> Option<Vec<f64>> {
        let path = self.path(key);
        match self.get(key) {
            None => default.map(<[f64]>::to_vec),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::Float(v) => out.push(*v),
                        Value::Integer(v) => out.push(*v as f64),
                        other => {
                            errors.push(format!("{path}: expected numbers, found {other}"));
                            return None;
                        }
                    }
                }
                Some(out)
            }
            Some(Value::Float(v)) => Some(vec![*v]),
            Some(Value::Integer(v)) => Some(vec![*v as f64]),
            Some(other) => {
                errors.push(format!("{path}: expected a list of numbers, got {other}"));
                None
            }
        }
    }

    /// Flags every key that was never read.
    fn finish(self, errors: &mut Vec<String>) {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !self.seen.contains(key) {
                    errors.push(format!("unknown key `{}`", self.path(key)));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "bound_table"

[growth]
family = "power"
alpha = 1

[bound]
variant = "infinity_smooth"
c = 0.45

[grid]
min = 10
max = 1e4
points = 60
spacing = "log"
"#;

    #[test]
    fn effective_config_round_trips() {
        for e in Experiment::ALL {
            let cfg = parse_config(&format!("experiment = \"{}\"", e.name())).unwrap();
            let text = toml::to_string(&cfg).unwrap();
            assert_eq!(parse_config(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn minimal_bound_table() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.experiment, Experiment::BoundTable);
        assert_eq!(cfg.variant(), Variant::InfinitySmooth);
        assert_eq!(cfg.grid.values().len(), 60);
        assert_eq!(cfg.bound.c, 0.45);
    }

    #[test]
    fn inadmissible_c_names_the_range() {
        let text = MINIMAL.replace("c = 0.45", "c = 0.7");
        let err = parse_config(&text).unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("c∈(0,1/2)")), "{err}");
    }

    #[test]
    fn fudge_rejected_for_regularity() {
        let err = parse_config("experiment = \"asymptotic_regularity\"\n[kernel]\nname = \"fudge\"\n").unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("fudge") && e.contains("inadmissible")), "{err}");
    }

    #[test]
    fn all_errors_are_collected() {
        let text = r#"
experiment = "compare_decay"
colour = "blue"
[bound]
variant = "infinity_smooth"
c = 2.0
typo = 1
[grid]
min = -1
points = 3
"#;
        let err = parse_config(text).unwrap_err();
        let joined = err.to_string();
        for needle in ["`colour`", "`bound.typo`", "bound.c", "grid.min", "grid.points"] {
            assert!(joined.contains(needle), "missing {needle} in {joined}");
        }
    }

    #[test]
    fn unknown_experiment() {
        let err = parse_config("experiment = \"plot\"").unwrap_err();
        assert!(err.0[0].contains("unknown `plot`"));
    }

    #[test]
    fn overrides_and_env() {
        let mut table: Table = toml::from_str(MINIMAL).unwrap();
        let (k, v) = parse_assignment("grid.points=80").unwrap();
        set_dotted(&mut table, &k, v).unwrap();
        let (k, v) = parse_assignment("kernel.name=bump").unwrap();
        set_dotted(&mut table, &k, v).unwrap();
        let cfg = resolve(table, None, Some(env_tolerances("1e-8").unwrap())).unwrap();
        assert_eq!(cfg.grid.points, 80);
        assert_eq!(cfg.kernel.name, "bump");
        assert_eq!(cfg.tolerances.abs, 1e-8);
        assert!(env_tolerances("abc").is_err());
        assert_eq!(env_tolerances("1e-7, 1e-6").unwrap(), (1e-7, Some(1e-6)));
    }

    #[test]
    fn compare_decay_orbit_follows_variant() {
        let cfg = resolve(Table::new(), Some(Experiment::CompareDecay), None).unwrap();
        assert_eq!(cfg.scenario.orbit, "ainv");
        let mut table = Table::new();
        set_dotted(&mut table, "bound.variant", Value::String("zero_smooth".into())).unwrap();
        set_dotted(&mut table, "scenario.family", Value::String("cluster_zero".into())).unwrap();
        let cfg = resolve(table, Some(Experiment::CompareDecay), None).unwrap();
        assert_eq!(cfg.scenario.orbit, "ar_omega");
        assert_eq!(cfg.bound.c, 0.9);
    }
}
