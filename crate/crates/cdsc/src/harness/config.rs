//! Flat key-value experiment configuration with section headers. Unknown
//! keys and sections are hard errors; every run is fully determined by the
//! parsed config.
//!
//! ```text
//! [experiment]
//! kind = subthreshold
//!
//! [code]
//! family = 0.25 0.5        # or: preset = xzzx | pattern_file = p.txt
//!                          # or: unit_cell = YHY/IYI/HYI
//! [noise]
//! p_list = 0.18 0.2 0.22
//! eta = 100                # accepts the literal inf
//!
//! [run]
//! l_list = 9 13
//! decoder = tn
//! chi = 20
//! trials = 20000
//! seed = 1
//! out = subthreshold.csv
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::HarnessError;
use crate::code::{FamilyParams, Preset};
use crate::decode::DecoderKind;
use crate::noise::Bias;
use crate::pauli::{DeformationPattern, SingleQubitDeformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    LogicalRate,
    Threshold,
    Subthreshold,
    DprimeSweep,
    PhaseScan,
    Percolation,
    ClusterThreshold,
    SmallCodeSweep,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rate" | "logical_rate" => Some(ExperimentKind::LogicalRate),
            "threshold" => Some(ExperimentKind::Threshold),
            "subthreshold" => Some(ExperimentKind::Subthreshold),
            "dprime" | "dprime_sweep" => Some(ExperimentKind::DprimeSweep),
            "phase-scan" | "phase_scan" => Some(ExperimentKind::PhaseScan),
            "percolation" => Some(ExperimentKind::Percolation),
            "cluster-threshold" | "cluster_threshold" => Some(ExperimentKind::ClusterThreshold),
            "sweep3x3" | "small_code_sweep" => Some(ExperimentKind::SmallCodeSweep),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LogicalRate => "rate",
            ExperimentKind::Threshold => "threshold",
            ExperimentKind::Subthreshold => "subthreshold",
            ExperimentKind::DprimeSweep => "dprime",
            ExperimentKind::PhaseScan => "phase-scan",
            ExperimentKind::Percolation => "percolation",
            ExperimentKind::ClusterThreshold => "cluster-threshold",
            ExperimentKind::SmallCodeSweep => "sweep3x3",
        }
    }
}

/// How the code under test is specified.
#[derive(Debug, Clone)]
pub enum CodeSpec {
    Preset(Preset),
    Family(FamilyParams),
    PatternFile(String),
    UnitCell(Vec<Vec<SingleQubitDeformation>>),
}

impl CodeSpec {
    /// Resolves to a fixed pattern (presets, files, cells) or a family.
    pub fn resolve(&self, l: usize) -> Result<ResolvedCode, HarnessError> {
        match self {
            CodeSpec::Preset(p) => Ok(ResolvedCode::Fixed(crate::code::preset(*p, l))),
            CodeSpec::Family(f) => Ok(ResolvedCode::Family(*f)),
            CodeSpec::PatternFile(path) => {
                let text = std::fs::read_to_string(path)?;
                let rows: Vec<&str> = text.lines().filter(|r| !r.trim().is_empty()).collect();
                if rows.len() != l || rows.iter().any(|r| r.trim().len() != l) {
                    return Err(HarnessError::Config(format!(
                        "pattern file {path} does not describe an {l}x{l} lattice"
                    )));
                }
                let flat: String = rows.iter().map(|r| r.trim()).collect();
                let pattern = DeformationPattern::parse(&flat)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                Ok(ResolvedCode::Fixed(pattern))
            }
            CodeSpec::UnitCell(cell) => Ok(ResolvedCode::Fixed(crate::code::tiled_pattern(cell, l)?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CodeSpec::Preset(p) => p.name().to_string(),
            CodeSpec::Family(f) => format!("family({},{})", f.pi_xz, f.pi_yz),
            CodeSpec::PatternFile(path) => format!("file({path})"),
            CodeSpec::UnitCell(_) => "unit_cell".to_string(),
        }
    }

    pub fn family_params(&self) -> Option<FamilyParams> {
        match self {
            CodeSpec::Family(f) => Some(*f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ResolvedCode {
    Fixed(DeformationPattern),
    Family(FamilyParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderSpec {
    Exact,
    Tn,
}

/// A fully parsed experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub code: CodeSpec,
    pub l_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub eta: Bias,
    pub decoder: DecoderSpec,
    pub chi: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<String>,
    /// Percolation / increment-sweep realization count.
    pub realizations: usize,
    /// Cluster-method level list.
    pub cluster_levels: Vec<usize>,
    /// Bias list for sweeps over eta.
    pub eta_list: Vec<Bias>,
    /// Grid of family points for phase scans.
    pub family_grid: Vec<FamilyParams>,
}

impl ExperimentConfig {
    pub fn decoder_kind(&self) -> DecoderKind {
        match self.decoder {
            DecoderSpec::Exact => DecoderKind::Exact,
            DecoderSpec::Tn => DecoderKind::Tn { chi: self.chi },
        }
    }

    pub fn defaults(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            code: CodeSpec::Preset(Preset::Css),
            l_list: vec![3],
            p_list: vec![0.1],
            eta: Bias::Finite(0.5),
            decoder: DecoderSpec::Exact,
            chi: 20,
            trials: 20_000,
            seed: 1,
            out: None,
            realizations: 500,
            cluster_levels: vec![0, 1, 2],
            eta_list: Vec::new(),
            family_grid: Vec::new(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                current = line[1..line.len() - 1].trim().to_string();
                if !matches!(current.as_str(), "experiment" | "code" | "noise" | "run") {
                    return Err(HarnessError::Config(format!(
                        "line {}: unknown section [{current}]",
                        lineno + 1
                    )));
                }
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!(
                    "line {}: expected key = value, got '{line}'",
                    lineno + 1
                )));
            };
            if current.is_empty() {
                return Err(HarnessError::Config(format!(
                    "line {}: key outside any section",
                    lineno + 1
                )));
            }
            let prev = sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
            if prev.is_some() {
                return Err(HarnessError::Config(format!(
                    "line {}: duplicate key '{}' in [{current}]",
                    lineno + 1,
                    key.trim()
                )));
            }
        }

        let experiment = sections.get("experiment").cloned().unwrap_or_default();
        let kind_str = experiment
            .get("kind")
            .ok_or_else(|| HarnessError::Config("missing [experiment] kind".into()))?;
        let kind = ExperimentKind::parse(kind_str)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment kind '{kind_str}'")))?;
        check_keys("experiment", &experiment, &["kind"])?;

        let mut config = ExperimentConfig::defaults(kind);

        if let Some(code) = sections.get("code") {
            check_keys("code", code, &["preset", "family", "pattern_file", "unit_cell", "family_grid"])?;
            let mut specs: Vec<CodeSpec> = Vec::new();
            if let Some(name) = code.get("preset") {
                let preset = Preset::parse(name).ok_or_else(|| {
                    HarnessError::Config(format!("unknown preset '{name}' (css, xy, xzzx)"))
                })?;
                specs.push(CodeSpec::Preset(preset));
            }
            if let Some(pair) = code.get("family") {
                specs.push(CodeSpec::Family(parse_family(pair)?));
            }
            if let Some(path) = code.get("pattern_file") {
                specs.push(CodeSpec::PatternFile(path.clone()));
            }
            if let Some(cell) = code.get("unit_cell") {
                specs.push(CodeSpec::UnitCell(parse_unit_cell(cell)?));
            }
            if specs.len() > 1 {
                return Err(HarnessError::Config(
                    "[code] must specify exactly one of preset, family, pattern_file, unit_cell"
                        .into(),
                ));
            }
            if let Some(spec) = specs.pop() {
                config.code = spec;
            }
            if let Some(grid) = code.get("family_grid") {
                config.family_grid = grid
                    .split(';')
                    .map(|pair| parse_family(pair.trim()))
                    .collect::<Result<_, _>>()?;
            }
        }

        if let Some(noise) = sections.get("noise") {
            check_keys("noise", noise, &["p", "p_list", "eta", "eta_list"])?;
            if let Some(p) = noise.get("p") {
                config.p_list = vec![parse_num(p, "p")?];
            }
            if let Some(list) = noise.get("p_list") {
                config.p_list = parse_num_list(list, "p_list")?;
            }
            if let Some(eta) = noise.get("eta") {
                config.eta = Bias::parse(eta)?;
            }
            if let Some(list) = noise.get("eta_list") {
                config.eta_list = list
                    .split_whitespace()
                    .map(Bias::parse)
                    .collect::<Result<_, _>>()?;
            }
        }

        if let Some(run) = sections.get("run") {
            check_keys(
                "run",
                run,
                &["l", "l_list", "decoder", "chi", "trials", "seed", "out", "realizations", "cluster_levels"],
            )?;
            if let Some(l) = run.get("l") {
                config.l_list = vec![parse_usize(l, "l")?];
            }
            if let Some(list) = run.get("l_list") {
                config.l_list = list
                    .split_whitespace()
                    .map(|t| parse_usize(t, "l_list"))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(d) = run.get("decoder") {
                config.decoder = match d.as_str() {
                    "exact" => DecoderSpec::Exact,
                    "tn" => DecoderSpec::Tn,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "unknown decoder '{other}' (exact, tn)"
                        )))
                    }
                };
            }
            if let Some(chi) = run.get("chi") {
                config.chi = parse_usize(chi, "chi")?;
            }
            if let Some(trials) = run.get("trials") {
                config.trials = parse_usize(trials, "trials")?;
            }
            if let Some(seed) = run.get("seed") {
                config.seed = seed
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("bad seed '{seed}'")))?;
            }
            if let Some(out) = run.get("out") {
                config.out = Some(out.clone());
            }
            if let Some(r) = run.get("realizations") {
                config.realizations = parse_usize(r, "realizations")?;
            }
            if let Some(levels) = run.get("cluster_levels") {
                config.cluster_levels = levels
                    .split_whitespace()
                    .map(|t| parse_usize(t, "cluster_levels"))
                    .collect::<Result<_, _>>()?;
            }
        }

        Ok(config)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn check_keys(
    section: &str,
    map: &BTreeMap<String, String>,
    allowed: &[&str],
) -> Result<(), HarnessError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(HarnessError::Config(format!(
                "unknown key '{key}' in [{section}] (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn parse_num(s: &str, what: &str) -> Result<f64, HarnessError> {
    s.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad {what} value '{s}'")))
}

fn parse_num_list(s: &str, what: &str) -> Result<Vec<f64>, HarnessError> {
    let list: Vec<f64> = s
        .split_whitespace()
        .map(|t| parse_num(t, what))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(HarnessError::Config(format!("empty {what}")));
    }
    Ok(list)
}

fn parse_usize(s: &str, what: &str) -> Result<usize, HarnessError> {
    s.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad {what} value '{s}'")))
}

fn parse_family(s: &str) -> Result<FamilyParams, HarnessError> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(HarnessError::Config(format!(
            "family expects two probabilities, got '{s}'"
        )));
    }
    let pi_xz = parse_num(parts[0], "family pi_xz")?;
    let pi_yz = parse_num(parts[1], "family pi_yz")?;
    Ok(FamilyParams::new(pi_xz, pi_yz)?)
}

fn parse_unit_cell(s: &str) -> Result<Vec<Vec<SingleQubitDeformation>>, HarnessError> {
    let rows: Vec<Vec<SingleQubitDeformation>> = s
        .split('/')
        .map(|row| {
            row.trim()
                .chars()
                .map(SingleQubitDeformation::from_char)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) || rows[0].is_empty() {
        return Err(HarnessError::Config(
            "unit_cell rows must be non-empty and equal length".into(),
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
[experiment]
kind = subthreshold

[code]
family = 0.25 0.5

[noise]
p_list = 0.18 0.2
eta = 100   # moderate bias

[run]
l_list = 9 13
decoder = tn
chi = 20
trials = 5000
seed = 7
out = sub.csv
";
        let config = ExperimentConfig::parse(text).unwrap();
        assert_eq!(config.kind, ExperimentKind::Subthreshold);
        assert_eq!(config.l_list, vec![9, 13]);
        assert_eq!(config.p_list, vec![0.18, 0.2]);
        assert_eq!(config.eta, Bias::Finite(100.0));
        assert_eq!(config.decoder, DecoderSpec::Tn);
        assert_eq!(config.chi, 20);
        assert_eq!(config.trials, 5000);
        assert_eq!(config.seed, 7);
        assert_eq!(config.out.as_deref(), Some("sub.csv"));
        assert!(config.code.family_params().is_some());
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let text = "[experiment]\nkind = rate\n[run]\nbogus = 1\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "[experiment]\nkind = rate\n[mystery]\nx = 1\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "[experiment]\nkind = nonsense\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn duplicate_and_conflicting_keys_rejected() {
        let text = "[experiment]\nkind = rate\nkind = rate\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "[experiment]\nkind = rate\n[code]\npreset = css\nfamily = 0.1 0.1\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn eta_accepts_the_literal_inf() {
        let text = "[experiment]\nkind = rate\n[noise]\np = 0.3\neta = inf\n";
        let config = ExperimentConfig::parse(text).unwrap();
        assert!(config.eta.is_infinite());
    }

    #[test]
    fn unit_cell_parses_rows() {
        let text = "[experiment]\nkind = rate\n[code]\nunit_cell = YHY/IYI/HYI\n";
        let config = ExperimentConfig::parse(text).unwrap();
        match &config.code {
            CodeSpec::UnitCell(cell) => {
                assert_eq!(cell.len(), 3);
                assert_eq!(cell[0].len(), 3);
            }
            other => panic!("expected unit cell, got {other:?}"),
        }
    }
}
