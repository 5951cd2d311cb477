//! End-to-end driver behind the command-line tool: condition, solve, invert,
//! and emit a report with provenance.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::conditioning::{
    condition_circle, condition_line, condition_polydisk, phase_support_bracket, polydisk_generating_series,
    PowerMoments, Support, TrigMoments,
};
use crate::error::{Error, Result};
use crate::formats::{grid_to_csv, parse_moment_file, MomentFile, SCHEMA};
use crate::maxent::{
    circle_quadrature, fime_solve, trig_real_moments, Basis, DualSolution, FimeOptions, MaxentProblem, MaxentSolution,
};
use crate::raybeam::{phase_cutoff, sweep_rays, CutoffRule, Normalization, RayDirection, RayOptions};
use crate::transform::{invert_circle, invert_line, Domain, GridFunction, Inversion, LINE_SIGN, RANGE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Line,
    Circle,
    Polydisk,
    Raybeam,
}

impl std::str::FromStr for PipelineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown pipeline '{s}'")))
    }
}

/// Run configuration. Every field has a default so that a JSON config file
/// may override any subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub pipeline: PipelineKind,
    /// Output grid size `G` (power of two).
    pub grid: usize,
    /// Maxent tolerance on the unconditioned residual.
    pub tol: f64,
    /// Budget of single-coordinate FIME updates.
    pub max_sweeps: usize,
    pub pad: usize,
    pub delta: f64,
    /// Feed raw moments to maxent (negative control).
    pub skip_condition: bool,
    /// Gauss nodes for interval maxent problems.
    pub nodes: usize,
    /// Phase domain override for the line pipeline.
    pub phase_interval: Option<[f64; 2]>,
    /// Clip the recovered phase into its admissible range instead of
    /// failing with a range violation.
    pub clip_phase: bool,
    /// Ray directions (raybeam pipeline).
    pub directions: Vec<Vec<f64>>,
    pub normalization: Normalization,
    /// Push-forward order; defaults to the order of the moment file.
    pub ray_order: Option<u32>,
    /// Window widening for Radon slices.
    pub extension: usize,
    /// Per-ray phase domain rule.
    pub cutoff_rule: CutoffRule,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            pipeline: PipelineKind::Line,
            grid: 1024,
            tol: 1e-9,
            max_sweeps: 100_000,
            pad: 4,
            delta: 1.0,
            skip_condition: false,
            nodes: 256,
            phase_interval: None,
            clip_phase: false,
            directions: Vec::new(),
            normalization: Normalization::None,
            ray_order: None,
            extension: 8,
            cutoff_rule: CutoffRule::Heuristic,
            output_dir: None,
        }
    }
}

impl PipelineConfig {
    /// Overrides fields with those present in a JSON object.
    pub fn apply_json(&mut self, overrides: &str) -> Result<()> {
        let patch: Value = serde_json::from_str(overrides).map_err(|e| Error::Config(e.to_string()))?;
        let Value::Object(patch) = patch else {
            return Err(Error::Config("config file must hold a JSON object".into()));
        };
        let mut base = serde_json::to_value(&*self).map_err(|e| Error::Config(e.to_string()))?;
        if let Value::Object(map) = &mut base {
            map.extend(patch);
        }
        *self = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 || !self.grid.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(self.grid));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidDelta(self.delta));
        }
        if self.pad < 2 {
            return Err(Error::PadFactor { min: 2, got: self.pad });
        }
        Ok(())
    }

    fn fime(&self) -> FimeOptions {
        FimeOptions {
            tolerance: self.tol,
            max_updates: self.max_sweeps,
            delta: self.delta,
            ..Default::default()
        }
    }

    /// The configuration as recorded in provenance (output location excluded).
    fn provenance_view(&self) -> PipelineConfig {
        PipelineConfig {
            output_dir: None,
            ..self.clone()
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NotConverged,
    RangeViolation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
            Status::RangeViolation => 4,
        }
    }
}

/// Exit code for errors raised before a report exists.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::PhaseOutOfRange { .. } => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignOracle {
    pub line_sign: f64,
    /// Max deviation of the inverted β-jump from `(1/π)((1−x)/x)^β sin πβ`.
    pub beta_jump_max_error: f64,
    /// Whether `φ ≡ π/2` inverts to exactly `τ₀` on the circle.
    pub circle_uniform_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub config: PipelineConfig,
    pub config_sha256: String,
    pub sign_oracle: SignOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    #[serde(flatten)]
    pub dual: DualSolution,
    pub exponent_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub min_raw: f64,
    pub clipped: usize,
    pub negativity_flag: bool,
    pub mass: f64,
    pub phase_clipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeViolation {
    pub x: f64,
    pub value: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySummary {
    pub index: usize,
    pub direction: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    pub pushforward_moments: Vec<f64>,
    pub phase_moments: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<DualSolution>,
    pub phase_clipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

/// The `report.json` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub pipeline: PipelineKind,
    pub status: Status,
    pub conditioned: bool,
    pub input_kind: String,
    pub input_moments: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditioned_moments: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range_violation: Option<RangeViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<RaySummary>>,
    pub provenance: Provenance,
}

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    /// Data files; `report.json` is rendered separately.
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code()
    }

    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the artifacts and `report.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.name), &a.contents)?;
        }
        std::fs::write(dir.join("report.json"), self.report_json())?;
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Re-derives the inversion sign on a β-jump and the circle uniform check.
pub fn sign_oracle() -> SignOracle {
    let beta = 0.5;
    let step = GridFunction::from_fn(Domain::Interval { a: -1.0, b: 3.0 }, 256, |x| {
        if x > 0.0 && x < 1.0 {
            beta
        } else {
            0.0
        }
    })
    .expect("static grid");
    let inv = invert_line(&step, 4).expect("static inversion");
    let beta_jump_max_error = step
        .points()
        .iter()
        .zip(&inv.density.values)
        .filter(|(x, _)| **x > 0.05 && **x < 0.95)
        .map(|(x, r)| (r - ((1.0 - x) / x).powf(beta) * (PI * beta).sin() / PI).abs())
        .fold(0.0, f64::max);
    let half = GridFunction::new(Domain::Circle, vec![PI / 2.0; 64]).expect("static grid");
    let circle_uniform_exact = invert_circle(&half, 0.3)
        .map(|i| i.density.values.iter().all(|&v| v == 0.3))
        .unwrap_or(false);
    SignOracle {
        line_sign: LINE_SIGN,
        beta_jump_max_error,
        circle_uniform_exact,
    }
}

struct Builder {
    report: Report,
    artifacts: Vec<Artifact>,
}

impl Builder {
    fn csv(&mut self, name: &str, f: &GridFunction) {
        self.artifacts.push(Artifact {
            name: name.to_string(),
            contents: grid_to_csv(f),
        });
    }

    fn solver(&mut self, sol: &MaxentSolution) -> bool {
        self.report.solver = Some(SolverReport {
            dual: sol.dual.clone(),
            exponent_clamped: sol.clamped,
        });
        if !sol.dual.converged {
            self.report.status = Status::NotConverged;
        }
        sol.dual.converged
    }

    /// Checks `0 <= φ <= upper` (within tolerance); clips or records a violation.
    fn admit_phase(&mut self, phi: &mut GridFunction, upper: f64, clip: bool) -> Option<usize> {
        let mut clipped = 0;
        for j in 0..phi.len() {
            let v = phi.values[j];
            if v >= -RANGE_TOLERANCE && v <= upper + RANGE_TOLERANCE {
                continue;
            }
            if !clip {
                self.report.range_violation = Some(RangeViolation {
                    x: phi.point(j),
                    value: v,
                    upper,
                });
                self.report.status = Status::RangeViolation;
                return None;
            }
            phi.values[j] = v.clamp(0.0, upper);
            clipped += 1;
        }
        Some(clipped)
    }

    fn inversion(&mut self, inv: &Inversion, phase_clipped: usize) {
        self.report.inversion = Some(InversionReport {
            min_raw: inv.min_raw,
            clipped: inv.clipped,
            negativity_flag: inv.negativity_flag,
            mass: inv.density.integral(),
            phase_clipped,
        });
    }
}

/// Runs the configured pipeline on the bytes of a moment file.
///
/// Parse and validation failures are returned as errors; solver
/// non-convergence and phase range violations are reported through
/// [`Report::status`].
pub fn run_pipeline(config: &PipelineConfig, input: &[u8]) -> Result<Outcome> {
    config.validate()?;
    let text = std::str::from_utf8(input).map_err(|e| Error::Parse(e.to_string()))?;
    let file = parse_moment_file(text)?;
    let view = config.provenance_view();
    let config_json = serde_json::to_string(&view)?;
    let provenance = Provenance {
        input_sha256: sha256_hex(input),
        config_sha256: sha256_hex(config_json.as_bytes()),
        config: view,
        sign_oracle: sign_oracle(),
    };
    let input_moments = match &file {
        MomentFile::Power(p) => p.values.len(),
        MomentFile::Trig(t) => t.values.len(),
        MomentFile::Multi(m) => m.values.len(),
    };
    let mut b = Builder {
        report: Report {
            schema: SCHEMA,
            pipeline: config.pipeline,
            status: Status::Ok,
            conditioned: !config.skip_condition,
            input_kind: file.kind().to_string(),
            input_moments,
            conditioned_moments: None,
            phase_interval: None,
            solver: None,
            inversion: None,
            range_violation: None,
            rays: None,
            provenance,
        },
        artifacts: Vec::new(),
    };
    match (config.pipeline, file) {
        (PipelineKind::Line, MomentFile::Power(p)) => run_line(config, &p, &mut b)?,
        (PipelineKind::Circle, MomentFile::Trig(t)) => run_circle(config, &t, &mut b)?,
        (PipelineKind::Polydisk, MomentFile::Multi(m)) => {
            let series = if config.skip_condition {
                polydisk_generating_series(&m)?
            } else {
                condition_polydisk(&m)?
            };
            b.report.conditioned_moments = Some(serde_json::to_value(&series)?);
        }
        (PipelineKind::Raybeam, MomentFile::Multi(m)) => run_raybeam(config, &m, &mut b)?,
        (kind, file) => {
            return Err(Error::Config(format!(
                "pipeline {kind:?} cannot use '{}' moments",
                file.kind()
            )))
        }
    }
    Ok(Outcome {
        report: b.report,
        artifacts: b.artifacts,
    })
}

/// Maxent domain for the line pipeline: the explicit override, else the
/// containment bound `[a, b + γ_0]` for interval support, else `[0, T]` with
/// the moment cutoff heuristic. Conditioned and raw runs share the rule so
/// the negative control differs only in the conditioning step.
fn interval_domain(config: &PipelineConfig, target: &PowerMoments, raw: &PowerMoments) -> Result<(f64, f64)> {
    if let Some([a, b]) = config.phase_interval {
        return Ok((a, b));
    }
    if let (Support::Interval([a, _]), Some((end, _))) = (raw.support, phase_support_bracket(raw)?) {
        return Ok((a, end));
    }
    Ok((0.0, phase_cutoff(&target.values)?))
}

fn run_line(config: &PipelineConfig, raw: &PowerMoments, b: &mut Builder) -> Result<()> {
    let target = if config.skip_condition {
        raw.clone()
    } else {
        let phi = condition_line(raw)?;
        b.report.conditioned_moments = Some(serde_json::to_value(&phi.values)?);
        phi
    };
    let (lo, hi) = interval_domain(config, &target, raw)?;
    b.report.phase_interval = Some([lo, hi]);
    let problem = MaxentProblem::from_power_moments(&target.values, lo, hi, config.nodes)?;
    let sol = fime_solve(&problem, &config.fime())?;
    if !b.solver(&sol) {
        return Ok(());
    }
    let domain = Domain::Interval { a: lo, b: hi };
    let mut grid = GridFunction::from_fn(domain, config.grid, |x| sol.density_at(x))?;
    if config.skip_condition {
        b.csv("density.csv", &grid);
        return Ok(());
    }
    let Some(phase_clipped) = b.admit_phase(&mut grid, 1.0, config.clip_phase) else {
        b.csv("phase.csv", &grid);
        return Ok(());
    };
    let inv = invert_line(&grid, config.pad)?;
    b.inversion(&inv, phase_clipped);
    b.csv("phase.csv", &grid);
    b.csv("density.csv", &inv.density);
    Ok(())
}

fn run_circle(config: &PipelineConfig, raw: &TrigMoments, b: &mut Builder) -> Result<()> {
    let tau0 = raw.tau0()?;
    let target = if config.skip_condition {
        raw.clone()
    } else {
        let phi = condition_circle(raw)?;
        let pairs: Vec<[f64; 2]> = phi.values.iter().map(|c| [c.re, c.im]).collect();
        b.report.conditioned_moments = Some(serde_json::to_value(pairs)?);
        phi
    };
    let quad = circle_quadrature(config.grid)?;
    let problem = MaxentProblem::new(
        Basis::Trigonometric,
        target.order(),
        quad,
        trig_real_moments(&target.values),
    )?;
    let sol = fime_solve(&problem, &config.fime())?;
    if !b.solver(&sol) {
        return Ok(());
    }
    let mut grid = GridFunction::new(Domain::Circle, sol.density.clone())?;
    if config.skip_condition {
        b.csv("density.csv", &grid);
        return Ok(());
    }
    let Some(phase_clipped) = b.admit_phase(&mut grid, PI, config.clip_phase) else {
        b.csv("phase.csv", &grid);
        return Ok(());
    };
    let inv = invert_circle(&grid, tau0)?;
    b.inversion(&inv, phase_clipped);
    b.csv("phase.csv", &grid);
    b.csv("density.csv", &inv.density);
    Ok(())
}

fn run_raybeam(config: &PipelineConfig, m: &crate::conditioning::MultiMoments, b: &mut Builder) -> Result<()> {
    if config.directions.is_empty() {
        return Err(Error::Config("raybeam pipeline needs at least one direction".into()));
    }
    let directions = config
        .directions
        .iter()
        .map(|y| RayDirection::new(y.clone(), config.normalization))
        .collect::<Result<Vec<_>>>()?;
    let opts = RayOptions {
        order: config.ray_order.unwrap_or(m.order),
        grid: config.grid,
        nodes: config.nodes,
        pad: config.pad,
        extension: config.extension,
        cutoff: config.cutoff_rule,
        fime: config.fime(),
    };
    let mut summaries = Vec::new();
    for (i, (dir, res)) in directions.iter().zip(sweep_rays(m, &directions, &opts)).enumerate() {
        match res {
            Ok(slice) => {
                let name = format!("ray_{i:03}.csv");
                if !slice.solver.converged {
                    b.report.status = Status::NotConverged;
                }
                b.csv(&name, &slice.radon_values);
                summaries.push(RaySummary {
                    index: i,
                    direction: dir.y.clone(),
                    error: None,
                    cutoff: Some(slice.cutoff),
                    pushforward_moments: slice.pushforward_moments,
                    phase_moments: slice.phase_moments,
                    solver: Some(slice.solver),
                    phase_clipped: slice.phase_clipped,
                    file: Some(name),
                });
            }
            Err(e) => summaries.push(RaySummary {
                index: i,
                direction: dir.y.clone(),
                error: Some(e.to_string()),
                cutoff: None,
                pushforward_moments: Vec::new(),
                phase_moments: Vec::new(),
                solver: None,
                phase_clipped: 0,
                file: None,
            }),
        }
    }
    b.artifacts.push(Artifact {
        name: "rays.json".into(),
        contents: serde_json::to_string_pretty(&summaries)? + "\n",
    });
    b.report.rays = Some(summaries);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_overrides() {
        let mut c = PipelineConfig::default();
        c.apply_json(r#"{"grid": 256, "pipeline": "circle"}"#).unwrap();
        assert_eq!(c.grid, 256);
        assert_eq!(c.pipeline, PipelineKind::Circle);
        assert!(c.apply_json(r#"{"gird": 3}"#).is_err());
        assert!(c.apply_json("[1]").is_err());
    }

    #[test]
    fn config_validation() {
        let c = PipelineConfig {
            grid: 100,
            ..Default::default()
        };
        assert_eq!(c.validate(), Err(Error::GridNotPowerOfTwo(100)));
        let c = PipelineConfig {
            delta: 0.0,
            ..Default::default()
        };
        assert_eq!(c.validate(), Err(Error::InvalidDelta(0.0)));
    }

    #[test]
    fn oracle_self_check() {
        let o = sign_oracle();
        assert_eq!(o.line_sign, 1.0);
        assert!(o.beta_jump_max_error < 1e-9);
        assert!(o.circle_uniform_exact);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for_error(&Error::EmptyMoments), 2);
        assert_eq!(exit_code_for_error(&Error::Parse("x".into())), 2);
        assert_eq!(Status::NotConverged.exit_code(), 3);
        assert_eq!(Status::RangeViolation.exit_code(), 4);
    }

    #[test]
    fn mismatched_pipeline_and_kind() {
        let c = PipelineConfig {
            pipeline: PipelineKind::Circle,
            ..Default::default()
        };
        let r = run_pipeline(&c, br#"{"kind":"power","values":[1,0]}"#);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
