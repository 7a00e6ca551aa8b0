//! Run configuration: a line-oriented `[section]` / `key = value` format.
//!
//! ```text
//! [chart]
//! coordinates = x, y, z, t
//!
//! [params]
//! lambda = 1
//!
//! [action]
//! preset = em.torsion_nonzero
//!
//! [run]
//! battery = pfaff, torsion
//! seed = 7
//! ```
//!
//! Expressions are kept as written; list items are split at top-level
//! commas only, so `atan2(y, x)` stays whole.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use cartan::systems::preset_names;
use cartan::{parse_expr, Chart};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown preset `{name}` (see --list-presets)")]
    UnknownPreset { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Battery {
    Pfaff,
    Torsion,
    Thermo,
    Theorems,
    Periods,
    Fluid,
    Em,
    Topology,
}

impl Battery {
    pub const ALL: [Battery; 8] = [
        Battery::Pfaff,
        Battery::Torsion,
        Battery::Thermo,
        Battery::Theorems,
        Battery::Periods,
        Battery::Fluid,
        Battery::Em,
        Battery::Topology,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Battery::Pfaff => "pfaff",
            Battery::Torsion => "torsion",
            Battery::Thermo => "thermo",
            Battery::Theorems => "theorems",
            Battery::Periods => "periods",
            Battery::Fluid => "fluid",
            Battery::Em => "em",
            Battery::Topology => "topology",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }
}

/// Parse a comma-separated battery list; `all` selects everything.
pub fn parse_batteries(text: &str) -> Result<Vec<Battery>, String> {
    let mut out = BTreeSet::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            out.extend(Battery::ALL);
        } else {
            out.insert(Battery::from_name(item).ok_or_else(|| format!("unknown battery `{item}`"))?);
        }
    }
    if out.is_empty() {
        return Err("at least one battery must be selected".into());
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Preset(String),
    /// Components of a 1-form on the declared chart.
    Action(Vec<String>),
    Fluid {
        velocity: Vec<String>,
        pressure: String,
        viscosity: String,
    },
    Em {
        potential: Vec<String>,
        phi: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub name: String,
    pub field: Vec<String>,
    pub support: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub orientation: i8,
    /// One expression per chart coordinate, in the cube variables `s0, s1, ..`.
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainShape {
    Cells {
        degree: usize,
        cells: Vec<CellSpec>,
        closed: bool,
    },
    Circle {
        axes: Vec<String>,
        center: Vec<f64>,
        radius: f64,
        windings: u32,
    },
    Disk {
        axes: Vec<String>,
        center: Vec<f64>,
        radius: f64,
    },
    Sphere {
        axes: Vec<String>,
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        axes: Vec<String>,
        origin: Vec<f64>,
        sides: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub name: String,
    pub shape: ChainShape,
    pub order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologySpec {
    pub name: String,
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub from: String,
    pub to: String,
    pub pairs: Vec<(String, String)>,
    /// Expected continuity of the map, if asserted.
    pub expect: Option<bool>,
    /// Expected continuity of the inverse, if asserted.
    pub expect_inverse: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub batteries: Vec<Battery>,
    pub seed: u64,
    /// Zero-test threshold.
    pub tolerance: f64,
    pub samples: usize,
    /// Sampling box `[lo, hi]` in every coordinate.
    pub bounds: (f64, f64),
    pub out: Option<String>,
}

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_BOUNDS: (f64, f64) = (-1.5, 1.5);

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            batteries: Battery::ALL.to_vec(),
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
            samples: DEFAULT_SAMPLES,
            bounds: DEFAULT_BOUNDS,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub chart: Vec<String>,
    pub params: Vec<(String, f64)>,
    pub system: Option<SystemSpec>,
    pub processes: Vec<ProcessSpec>,
    pub chains: Vec<ChainSpec>,
    pub topologies: Vec<TopologySpec>,
    pub maps: Vec<MapSpec>,
    pub run: RunSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            chart: ["x", "y", "z", "t"].map(String::from).to_vec(),
            params: Vec::new(),
            system: None,
            processes: Vec::new(),
            chains: Vec::new(),
            topologies: Vec::new(),
            maps: Vec::new(),
            run: RunSpec::default(),
        }
    }
}

impl RunConfig {
    /// A configuration that only selects a preset.
    pub fn preset(name: &str) -> Self {
        Self {
            system: Some(SystemSpec::Preset(name.to_string())),
            ..Self::default()
        }
    }

    pub fn is_spacetime(&self) -> bool {
        self.chart == ["x", "y", "z", "t"]
    }
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    /// 1-based column of the first character of `value`.
    column: usize,
}

#[derive(Debug, Clone)]
struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: Vec<Entry>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn semantic(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Semantic {
        line,
        column,
        message: message.into(),
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c))
}

fn sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.chars().take_while(|c| c.is_whitespace()).count();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(inner) = rest.strip_suffix(']') else {
                return Err(syntax(line, indent + trimmed.chars().count(), "expected `]`"));
            };
            let mut words = inner.split_whitespace();
            let kind = words.next().unwrap_or("").to_string();
            let name = words.next().map(String::from);
            if words.next().is_some() || !is_name(&kind) || name.as_deref().is_some_and(|n| !is_name(n)) {
                return Err(syntax(line, indent + 2, "section header is `[kind]` or `[kind name]`"));
            }
            out.push(Section {
                kind,
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = raw.find('=') else {
            return Err(syntax(line, indent + 1, "expected `key = value`"));
        };
        let key = raw[..eq].trim().to_string();
        if !is_name(&key) {
            return Err(syntax(line, indent + 1, format!("invalid key `{key}`")));
        }
        let after = &raw[eq + 1..];
        let lead = after.chars().take_while(|c| c.is_whitespace()).count();
        let column = raw[..eq + 1].chars().count() + lead + 1;
        let value = after.trim().to_string();
        let Some(section) = out.last_mut() else {
            return Err(syntax(line, indent + 1, "entry before any section"));
        };
        section.entries.push(Entry {
            key,
            value,
            line,
            column,
        });
    }
    Ok(out)
}

/// Split at commas outside parentheses, returning trimmed items with their
/// 1-based columns.
fn split_top(value: &str, column: usize, sep: char) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let chars: Vec<char> = value.chars().collect();
    let mut push = |from: usize, to: usize| {
        let piece: String = chars[from..to].iter().collect();
        let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
        out.push((piece.trim().to_string(), column + from + lead));
    };
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                push(start, i);
                start = i + 1;
            }
            _ => {}
        }
    }
    push(start, chars.len());
    out
}

// --------------------------------------------------------------- parsing

struct Ctx {
    chart: Vec<String>,
    params: BTreeSet<String>,
}

impl Ctx {
    /// Parse an expression, reject undeclared identifiers and map errors
    /// back to file positions.
    fn expr(&self, text: &str, line: usize, column: usize, cube: Option<usize>) -> Result<String, ConfigError> {
        let chart = match cube {
            Some(p) => Chart::cube(p),
            None => Chart::new(self.chart.iter().cloned()).map_err(|e| semantic(line, column, e.to_string()))?,
        };
        let e = parse_expr(text, &chart).map_err(|e| match e {
            cartan::Error::Parse { column: c, message, .. } => syntax(line, column + c.saturating_sub(1), message),
            other => syntax(line, column, other.to_string()),
        })?;
        for p in e.parameters() {
            if !self.params.contains(&p) {
                let at = text.find(p.as_str()).map_or(column, |i| column + text[..i].chars().count());
                let what = match cube {
                    Some(p) => format!("cell coordinates s0..s{}", p.saturating_sub(1)),
                    None => format!("chart coordinates ({})", self.chart.join(", ")),
                };
                return Err(semantic(
                    line,
                    at,
                    format!("unknown identifier `{p}`: not among the {what} nor a declared parameter"),
                ));
            }
        }
        Ok(text.to_string())
    }

    fn exprs(&self, e: &Entry, count: Option<usize>, cube: Option<usize>) -> Result<Vec<String>, ConfigError> {
        let items = split_top(&e.value, e.column, ',');
        if let Some(n) = count {
            if items.len() != n {
                return Err(semantic(e.line, e.column, format!("expected {n} components, found {}", items.len())));
            }
        }
        items.iter().map(|(t, c)| self.expr(t, e.line, *c, cube)).collect()
    }

    fn axis(&self, name: &str, e: &Entry) -> Result<String, ConfigError> {
        if self.chart.iter().any(|c| c == name) {
            Ok(name.to_string())
        } else {
            Err(semantic(e.line, e.column, format!("`{name}` is not a chart coordinate")))
        }
    }
}

fn number(e: &Entry, text: &str, column: usize) -> Result<f64, ConfigError> {
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| syntax(e.line, column, format!("expected a number, found `{text}`")))
}

fn numbers(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    split_top(&e.value, e.column, ',').iter().map(|(t, c)| number(e, t, *c)).collect()
}

fn names(e: &Entry) -> Vec<String> {
    split_top(&e.value, e.column, ',')
        .into_iter()
        .map(|(t, _)| t)
        .filter(|t| !t.is_empty())
        .collect()
}

fn integer<T: std::str::FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value
        .parse()
        .map_err(|_| syntax(e.line, e.column, format!("expected an integer, found `{}`", e.value)))
}

fn boolean(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(syntax(e.line, e.column, "expected `true` or `false`")),
    }
}

fn continuity(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "continuous" => Ok(true),
        "discontinuous" => Ok(false),
        _ => Err(syntax(e.line, e.column, "expected `continuous` or `discontinuous`")),
    }
}

fn unknown_key(s: &Section, e: &Entry) -> ConfigError {
    semantic(e.line, 1, format!("unknown key `{}` in [{}]", e.key, s.kind))
}

fn single<'a>(s: &'a Section, key: &str) -> Result<Option<&'a Entry>, ConfigError> {
    let mut found = s.entries.iter().filter(|e| e.key == key);
    let first = found.next();
    if let Some(dup) = found.next() {
        return Err(semantic(dup.line, 1, format!("duplicate key `{key}`")));
    }
    Ok(first)
}

fn required<'a>(s: &'a Section, key: &str) -> Result<&'a Entry, ConfigError> {
    single(s, key)?.ok_or_else(|| semantic(s.line, 1, format!("[{}] needs `{key}`", s.kind)))
}

fn check_keys(s: &Section, allowed: &[&str]) -> Result<(), ConfigError> {
    match s.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        Some(e) => Err(unknown_key(s, e)),
        None => Ok(()),
    }
}

fn name_of(s: &Section) -> Result<String, ConfigError> {
    s.name
        .clone()
        .ok_or_else(|| syntax(s.line, 1, format!("[{}] needs a name, e.g. `[{} main]`", s.kind, s.kind)))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let secs = sections(text)?;
    let mut cfg = RunConfig::default();
    let mut seen = BTreeSet::new();
    for s in &secs {
        if matches!(s.kind.as_str(), "chart" | "params" | "action" | "run") && !seen.insert(s.kind.clone()) {
            return Err(semantic(s.line, 1, format!("duplicate section [{}]", s.kind)));
        }
        if !matches!(
            s.kind.as_str(),
            "chart" | "params" | "action" | "run" | "process" | "chain" | "topology" | "map"
        ) {
            return Err(semantic(s.line, 2, format!("unknown section [{}]", s.kind)));
        }
    }

    // Chart and parameters first: everything else is checked against them.
    if let Some(s) = secs.iter().find(|s| s.kind == "chart") {
        check_keys(s, &["coordinates"])?;
        let e = required(s, "coordinates")?;
        let coords = names(e);
        Chart::new(coords.iter().cloned()).map_err(|err| semantic(e.line, e.column, err.to_string()))?;
        cfg.chart = coords;
    }
    let mut declared = BTreeSet::new();
    if let Some(s) = secs.iter().find(|s| s.kind == "params") {
        for e in &s.entries {
            if cfg.chart.contains(&e.key) || e.key.starts_with('s') && e.key[1..].parse::<usize>().is_ok() {
                return Err(semantic(e.line, 1, format!("parameter `{}` shadows a coordinate", e.key)));
            }
            if !declared.insert(e.key.clone()) {
                return Err(semantic(e.line, 1, format!("duplicate parameter `{}`", e.key)));
            }
            cfg.params.push((e.key.clone(), number(e, &e.value, e.column)?));
        }
    }
    let ctx = Ctx {
        chart: cfg.chart.clone(),
        params: declared,
    };
    let dim = cfg.chart.len();
    let need_spacetime = |s: &Section| -> Result<(), ConfigError> {
        if cfg.chart != ["x", "y", "z", "t"] {
            return Err(semantic(s.line, 1, "this system needs the chart `x, y, z, t`"));
        }
        Ok(())
    };

    for s in &secs {
        match s.kind.as_str() {
            "action" => {
                check_keys(s, &["preset", "form", "velocity", "pressure", "viscosity", "potential", "phi"])?;
                let kinds = ["preset", "form", "velocity", "potential"]
                    .iter()
                    .filter(|k| s.entries.iter().any(|e| e.key == **k))
                    .count();
                if kinds != 1 {
                    return Err(semantic(
                        s.line,
                        1,
                        "[action] takes exactly one of `preset`, `form`, `velocity`, `potential`",
                    ));
                }
                cfg.system = Some(if let Some(e) = single(s, "preset")? {
                    if !preset_names().contains(&e.value.as_str()) {
                        return Err(ConfigError::UnknownPreset {
                            line: e.line,
                            name: e.value.clone(),
                        });
                    }
                    need_spacetime(s)?;
                    SystemSpec::Preset(e.value.clone())
                } else if let Some(e) = single(s, "form")? {
                    SystemSpec::Action(ctx.exprs(e, Some(dim), None)?)
                } else if let Some(e) = single(s, "velocity")? {
                    need_spacetime(s)?;
                    let scalar = |key: &str| -> Result<String, ConfigError> {
                        match single(s, key)? {
                            Some(e) => ctx.expr(&e.value, e.line, e.column, None),
                            None => Ok("0".into()),
                        }
                    };
                    SystemSpec::Fluid {
                        velocity: ctx.exprs(e, Some(3), None)?,
                        pressure: scalar("pressure")?,
                        viscosity: scalar("viscosity")?,
                    }
                } else {
                    need_spacetime(s)?;
                    let e = required(s, "potential")?;
                    let phi = match single(s, "phi")? {
                        Some(p) => ctx.expr(&p.value, p.line, p.column, None)?,
                        None => "0".into(),
                    };
                    SystemSpec::Em {
                        potential: ctx.exprs(e, Some(3), None)?,
                        phi,
                    }
                });
            }
            "process" => {
                check_keys(s, &["field", "support"])?;
                let e = required(s, "field")?;
                let support = match single(s, "support")? {
                    Some(p) => Some(ctx.expr(&p.value, p.line, p.column, None)?),
                    None => None,
                };
                cfg.processes.push(ProcessSpec {
                    name: name_of(s)?,
                    field: ctx.exprs(e, Some(dim), None)?,
                    support,
                });
            }
            "chain" => cfg.chains.push(parse_chain(s, &ctx)?),
            "topology" => {
                check_keys(s, &["points", "open"])?;
                let points = names(required(s, "points")?);
                let opens = s.entries.iter().filter(|e| e.key == "open").map(names).collect::<Vec<_>>();
                let check = cartan::finite_topology::is_topology(&points, &opens)
                    .map_err(|err| semantic(s.line, 1, err.to_string()))?;
                if let Some(defect) = check {
                    return Err(semantic(s.line, 1, format!("not a topology: {defect}")));
                }
                cfg.topologies.push(TopologySpec {
                    name: name_of(s)?,
                    points,
                    opens,
                });
            }
            "map" => {
                check_keys(s, &["from", "to", "pairs", "expect", "expect_inverse"])?;
                let pairs_entry = required(s, "pairs")?;
                let mut pairs = Vec::new();
                for (item, col) in split_top(&pairs_entry.value, pairs_entry.column, ',') {
                    let Some((a, b)) = item.split_once("->") else {
                        return Err(syntax(pairs_entry.line, col, "pairs are written `a -> y`"));
                    };
                    pairs.push((a.trim().to_string(), b.trim().to_string()));
                }
                cfg.maps.push(MapSpec {
                    name: name_of(s)?,
                    from: required(s, "from")?.value.clone(),
                    to: required(s, "to")?.value.clone(),
                    pairs,
                    expect: single(s, "expect")?.map(continuity).transpose()?,
                    expect_inverse: single(s, "expect_inverse")?.map(continuity).transpose()?,
                });
            }
            "run" => {
                check_keys(s, &["battery", "seed", "tolerance", "samples", "box", "out"])?;
                if let Some(e) = single(s, "battery")? {
                    cfg.run.batteries = parse_batteries(&e.value).map_err(|m| semantic(e.line, e.column, m))?;
                }
                if let Some(e) = single(s, "seed")? {
                    cfg.run.seed = integer(e)?;
                }
                if let Some(e) = single(s, "tolerance")? {
                    cfg.run.tolerance = number(e, &e.value, e.column)?;
                    if cfg.run.tolerance <= 0.0 {
                        return Err(semantic(e.line, e.column, "tolerance must be positive"));
                    }
                }
                if let Some(e) = single(s, "samples")? {
                    cfg.run.samples = integer(e)?;
                    if cfg.run.samples == 0 {
                        return Err(semantic(e.line, e.column, "samples must be positive"));
                    }
                }
                if let Some(e) = single(s, "box")? {
                    let b = numbers(e)?;
                    if b.len() != 2 || b[0] >= b[1] {
                        return Err(semantic(e.line, e.column, "box is `lo, hi` with lo < hi"));
                    }
                    cfg.run.bounds = (b[0], b[1]);
                }
                if let Some(e) = single(s, "out")? {
                    cfg.run.out = Some(e.value.clone());
                }
            }
            _ => {}
        }
    }

    // Cross-references between maps and topologies.
    for (m, s) in cfg.maps.iter().zip(secs.iter().filter(|s| s.kind == "map")) {
        let find = |n: &str| cfg.topologies.iter().find(|t| t.name == n);
        let (Some(from), Some(to)) = (find(&m.from), find(&m.to)) else {
            return Err(semantic(s.line, 1, format!("map `{}` refers to an undeclared topology", m.name)));
        };
        for (a, b) in &m.pairs {
            if !from.points.contains(a) || !to.points.contains(b) {
                return Err(semantic(s.line, 1, format!("pair `{a} -> {b}` uses an unknown point")));
            }
        }
        let covered: BTreeSet<&String> = m.pairs.iter().map(|(a, _)| a).collect();
        if covered.len() != from.points.len() || m.pairs.len() != from.points.len() {
            return Err(semantic(s.line, 1, format!("map `{}` must send every point exactly once", m.name)));
        }
    }
    let mut seen_names = BTreeSet::new();
    for n in cfg
        .processes
        .iter()
        .map(|p| format!("process {}", p.name))
        .chain(cfg.chains.iter().map(|c| format!("chain {}", c.name)))
        .chain(cfg.topologies.iter().map(|t| format!("topology {}", t.name)))
        .chain(cfg.maps.iter().map(|m| format!("map {}", m.name)))
    {
        if !seen_names.insert(n.clone()) {
            return Err(semantic(1, 1, format!("duplicate section [{n}]")));
        }
    }
    Ok(cfg)
}

fn parse_chain(s: &Section, ctx: &Ctx) -> Result<ChainSpec, ConfigError> {
    check_keys(
        s,
        &["shape", "degree", "cell", "closed", "axes", "center", "radius", "windings", "origin", "sides", "order"],
    )?;
    let shape_entry = required(s, "shape")?;
    let axes = |n: Option<usize>| -> Result<Vec<String>, ConfigError> {
        let e = required(s, "axes")?;
        let a = names(e).iter().map(|x| ctx.axis(x, e)).collect::<Result<Vec<_>, _>>()?;
        if n.is_some_and(|n| a.len() != n) {
            return Err(semantic(e.line, e.column, format!("expected {} axes", n.unwrap())));
        }
        Ok(a)
    };
    let point = |key: &str| -> Result<Vec<f64>, ConfigError> {
        let e = required(s, key)?;
        let v = numbers(e)?;
        if v.len() != ctx.chart.len() {
            return Err(semantic(e.line, e.column, format!("expected {} coordinates", ctx.chart.len())));
        }
        Ok(v)
    };
    let radius = || -> Result<f64, ConfigError> {
        let e = required(s, "radius")?;
        let r = number(e, &e.value, e.column)?;
        if r <= 0.0 {
            return Err(semantic(e.line, e.column, "radius must be positive"));
        }
        Ok(r)
    };
    let shape = match shape_entry.value.as_str() {
        "cells" => {
            let degree: usize = integer(required(s, "degree")?)?;
            let mut cells = Vec::new();
            for e in s.entries.iter().filter(|e| e.key == "cell") {
                let (orientation, body, col) = match e.value.split_once('|') {
                    Some((sign, rest)) => {
                        let o = match sign.trim() {
                            "+" | "+1" => 1,
                            "-" | "-1" => -1,
                            _ => return Err(syntax(e.line, e.column, "orientation prefix is `+ |` or `- |`")),
                        };
                        let skip = sign.chars().count() + 1;
                        (o, rest.to_string(), e.column + skip)
                    }
                    None => (1, e.value.clone(), e.column),
                };
                let sub = Entry {
                    key: e.key.clone(),
                    value: body,
                    line: e.line,
                    column: col,
                };
                cells.push(CellSpec {
                    orientation,
                    components: ctx.exprs(&sub, Some(ctx.chart.len()), Some(degree))?,
                });
            }
            if cells.is_empty() {
                return Err(semantic(s.line, 1, "a `cells` chain needs at least one `cell`"));
            }
            let closed = single(s, "closed")?.map(boolean).transpose()?.unwrap_or(false);
            ChainShape::Cells { degree, cells, closed }
        }
        "circle" => ChainShape::Circle {
            axes: axes(Some(2))?,
            center: point("center")?,
            radius: radius()?,
            windings: single(s, "windings")?.map(integer).transpose()?.unwrap_or(1),
        },
        "disk" => ChainShape::Disk {
            axes: axes(Some(2))?,
            center: point("center")?,
            radius: radius()?,
        },
        "sphere" => ChainShape::Sphere {
            axes: axes(Some(3))?,
            center: point("center")?,
            radius: radius()?,
        },
        "box" => {
            let a = axes(None)?;
            let e = required(s, "sides")?;
            let sides = numbers(e)?;
            if sides.len() != a.len() {
                return Err(semantic(e.line, e.column, "one side length per axis"));
            }
            ChainShape::Box {
                axes: a,
                origin: point("origin")?,
                sides,
            }
        }
        other => {
            return Err(semantic(
                shape_entry.line,
                shape_entry.column,
                format!("unknown shape `{other}` (cells, circle, disk, sphere, box)"),
            ))
        }
    };
    Ok(ChainSpec {
        name: name_of(s)?,
        shape,
        order: single(s, "order")?.map(integer).transpose()?,
    })
}

// ---------------------------------------------------------- serializing

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "[chart]\ncoordinates = {}", self.chart.join(", "))?;
        if !self.params.is_empty() {
            writeln!(out, "\n[params]")?;
            for (k, v) in &self.params {
                writeln!(out, "{k} = {v}")?;
            }
        }
        if let Some(sys) = &self.system {
            writeln!(out, "\n[action]")?;
            match sys {
                SystemSpec::Preset(p) => writeln!(out, "preset = {p}")?,
                SystemSpec::Action(c) => writeln!(out, "form = {}", c.join(", "))?,
                SystemSpec::Fluid {
                    velocity,
                    pressure,
                    viscosity,
                } => writeln!(
                    out,
                    "velocity = {}\npressure = {pressure}\nviscosity = {viscosity}",
                    velocity.join(", ")
                )?,
                SystemSpec::Em { potential, phi } => {
                    writeln!(out, "potential = {}\nphi = {phi}", potential.join(", "))?
                }
            }
        }
        for p in &self.processes {
            writeln!(out, "\n[process {}]\nfield = {}", p.name, p.field.join(", "))?;
            if let Some(s) = &p.support {
                writeln!(out, "support = {s}")?;
            }
        }
        for c in &self.chains {
            writeln!(out, "\n[chain {}]", c.name)?;
            match &c.shape {
                ChainShape::Cells { degree, cells, closed } => {
                    writeln!(out, "shape = cells\ndegree = {degree}\nclosed = {closed}")?;
                    for cell in cells {
                        let sign = if cell.orientation > 0 { "+" } else { "-" };
                        writeln!(out, "cell = {sign} | {}", cell.components.join(", "))?;
                    }
                }
                ChainShape::Circle {
                    axes,
                    center,
                    radius,
                    windings,
                } => writeln!(
                    out,
                    "shape = circle\naxes = {}\ncenter = {}\nradius = {radius}\nwindings = {windings}",
                    axes.join(", "),
                    join_f64(center)
                )?,
                ChainShape::Disk { axes, center, radius } => writeln!(
                    out,
                    "shape = disk\naxes = {}\ncenter = {}\nradius = {radius}",
                    axes.join(", "),
                    join_f64(center)
                )?,
                ChainShape::Sphere { axes, center, radius } => writeln!(
                    out,
                    "shape = sphere\naxes = {}\ncenter = {}\nradius = {radius}",
                    axes.join(", "),
                    join_f64(center)
                )?,
                ChainShape::Box { axes, origin, sides } => writeln!(
                    out,
                    "shape = box\naxes = {}\norigin = {}\nsides = {}",
                    axes.join(", "),
                    join_f64(origin),
                    join_f64(sides)
                )?,
            }
            if let Some(o) = c.order {
                writeln!(out, "order = {o}")?;
            }
        }
        for t in &self.topologies {
            writeln!(out, "\n[topology {}]\npoints = {}", t.name, t.points.join(", "))?;
            for o in &t.opens {
                if o.is_empty() {
                    writeln!(out, "open =")?;
                } else {
                    writeln!(out, "open = {}", o.join(", "))?;
                }
            }
        }
        let word = |b: bool| if b { "continuous" } else { "discontinuous" };
        for m in &self.maps {
            let pairs: Vec<String> = m.pairs.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
            writeln!(
                out,
                "\n[map {}]\nfrom = {}\nto = {}\npairs = {}",
                m.name,
                m.from,
                m.to,
                pairs.join(", ")
            )?;
            if let Some(e) = m.expect {
                writeln!(out, "expect = {}", word(e))?;
            }
            if let Some(e) = m.expect_inverse {
                writeln!(out, "expect_inverse = {}", word(e))?;
            }
        }
        let r = &self.run;
        let batteries: Vec<&str> = r.batteries.iter().map(|b| b.name()).collect();
        writeln!(
            out,
            "\n[run]\nbattery = {}\nseed = {}\ntolerance = {}\nsamples = {}\nbox = {}, {}",
            batteries.join(", "),
            r.seed,
            r.tolerance,
            r.samples,
            r.bounds.0,
            r.bounds.1
        )?;
        if let Some(o) = &r.out {
            writeln!(out, "out = {o}")?;
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_config() {
        let c = parse_config("[action]\npreset = em.plane_wave\n\n[run]\nbattery = pfaff\n").unwrap();
        assert_eq!(c.system, Some(SystemSpec::Preset("em.plane_wave".into())));
        assert_eq!(c.run.batteries, [Battery::Pfaff]);
        assert_eq!(c.run.seed, DEFAULT_SEED);
    }

    #[test]
    fn syntax_error_carries_location() {
        let err = parse_config("[action]\nform = z', 0, 0, 0\n").unwrap_err();
        match err {
            ConfigError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 9)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_coordinate_is_rejected() {
        let err = parse_config("[action]\nform = w, 0, 0, 0\n").unwrap_err();
        match err {
            ConfigError::Semantic { line, column, message } => {
                assert_eq!((line, column), (2, 8));
                assert!(message.contains("`w`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_preset_and_battery() {
        assert!(matches!(
            parse_config("[action]\npreset = nope\n"),
            Err(ConfigError::UnknownPreset { line: 2, .. })
        ));
        assert!(parse_config("[run]\nbattery = \n").is_err());
        assert!(parse_config("[run]\nbattery = magic\n").is_err());
    }

    #[test]
    fn top_level_split_keeps_function_arguments() {
        let c = parse_config("[params]\nk = 2\n\n[action]\nform = atan2(y, x), k*x, 0, sin(t)\n").unwrap();
        assert_eq!(
            c.system,
            Some(SystemSpec::Action(vec!["atan2(y, x)".into(), "k*x".into(), "0".into(), "sin(t)".into()]))
        );
    }

    #[test]
    fn round_trip_of_a_full_config() {
        let text = "\
[chart]
coordinates = x, y, z, t

[params]
nu = 0.1

[action]
velocity = sin(y), 0, nu*x
pressure = x^2/2

[process flow]
field = sin(y), 0, nu*x, 1
support = 1 + x^2

[chain loop]
shape = cells
degree = 1
closed = true
cell = + | cos(2*pi*s0), sin(2*pi*s0), 0, 0

[chain ring]
shape = circle
axes = x, y
center = 0.25, 0, 0, 0
radius = 0.5
windings = 2
order = 12

[topology a]
points = p, q
open =
open = p
open = p, q

[map m]
from = a
to = a
pairs = p -> p, q -> q
expect = continuous

[run]
battery = pfaff, thermo
seed = 9
tolerance = 1e-10
samples = 32
box = -1, 1
out = r.json
";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.to_string()).unwrap();
        assert_eq!(c, again);
    }
}
