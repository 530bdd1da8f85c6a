//! Flat key=value run configuration with include support, plus the JSON run
//! manifest that makes outputs auditable.

use crate::{Error, Result};
use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

/// Benchmark problem selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Patch,
    SquareUdl,
    SquareNonuniform,
    Circular,
}

impl Problem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Problem::Patch => "patch",
            Problem::SquareUdl => "square_udl",
            Problem::SquareNonuniform => "square_nonuniform",
            Problem::Circular => "circular",
        }
    }
}

/// Boundary condition selector for the square benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    Clamped,
    HardSimplySupported,
}

impl BcKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BcKind::Clamped => "clamped",
            BcKind::HardSimplySupported => "hard_ss",
        }
    }
}

/// Mesh family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    Structured,
    Trapezoidal,
    Cvt,
}

impl MeshFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeshFamily::Structured => "structured",
            MeshFamily::Trapezoidal => "trapezoidal",
            MeshFamily::Cvt => "cvt",
        }
    }
}

/// Centralized tolerances; defaults are the acceptance values.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Tolerances {
    pub patch_error: f64,
    pub wbar_relative: f64,
    pub l2_slope: (f64, f64),
    pub h1_slope: (f64, f64),
    pub slope_pairwise: f64,
    pub equilibrium: f64,
    pub quadrature_refinement: f64,
    pub rank_eigenvalue: f64,
    pub appendix_b: f64,
    pub basis_gradient_fd: f64,
    pub solver_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            patch_error: 1e-9,
            wbar_relative: 0.01,
            l2_slope: (1.8, 2.3),
            h1_slope: (0.8, 1.3),
            slope_pairwise: 0.3,
            equilibrium: 1e-8,
            quadrature_refinement: 1e-8,
            rank_eigenvalue: 1e-9,
            appendix_b: 1e-10,
            basis_gradient_fd: 1e-6,
            solver_residual: 1e-10,
        }
    }
}

/// A parsed run configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunConfig {
    pub problem: Problem,
    pub bc: BcKind,
    pub thickness: Vec<f64>,
    pub mesh_family: MeshFamily,
    /// Element counts per refinement (structured/trapezoidal use the side
    /// count sqrt of these).
    pub mesh_elements: Vec<usize>,
    /// Optional node-count targets (CVT only); overrides `mesh_elements`.
    pub mesh_nodes: Option<Vec<usize>>,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Patch,
            bc: BcKind::Clamped,
            thickness: vec![0.01],
            mesh_family: MeshFamily::Cvt,
            mesh_elements: vec![64],
            mesh_nodes: None,
            youngs_modulus: 10.92e6,
            poisson_ratio: 0.3,
            output_dir: PathBuf::from("out"),
            seed: 42,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thickness.is_empty() || self.thickness.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Config("thickness values must be positive".into()));
        }
        if self.mesh_elements.is_empty() && self.mesh_nodes.is_none() {
            return Err(Error::Config("no mesh sizes requested".into()));
        }
        Ok(())
    }

    /// Parses flat `key = value` text. Lines starting with `#` are comments;
    /// `include = path` splices another file (relative to the including
    /// file). Later keys override earlier ones.
    pub fn from_str_with_base(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        apply_text(&mut cfg, text, base, 0)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_with_base(&text, path.parent())
    }

    /// Canonical flat text form; parsing it back reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem.as_str());
        let _ = writeln!(s, "bc = {}", self.bc.as_str());
        let _ = writeln!(s, "thickness = {}", join_f64(&self.thickness));
        let _ = writeln!(s, "mesh.family = {}", self.mesh_family.as_str());
        let _ = writeln!(s, "mesh.elements = {}", join_usize(&self.mesh_elements));
        if let Some(nodes) = &self.mesh_nodes {
            let _ = writeln!(s, "mesh.nodes = {}", join_usize(nodes));
        }
        let _ = writeln!(s, "material.e = {:e}", self.youngs_modulus);
        let _ = writeln!(s, "material.nu = {}", self.poisson_ratio);
        let _ = writeln!(s, "output = {}", self.output_dir.display());
        let _ = writeln!(s, "seed = {}", self.seed);
        let t = &self.tolerances;
        let _ = writeln!(s, "tolerance.patch_error = {:e}", t.patch_error);
        let _ = writeln!(s, "tolerance.wbar_relative = {}", t.wbar_relative);
        let _ = writeln!(s, "tolerance.l2_slope = {},{}", t.l2_slope.0, t.l2_slope.1);
        let _ = writeln!(s, "tolerance.h1_slope = {},{}", t.h1_slope.0, t.h1_slope.1);
        let _ = writeln!(s, "tolerance.slope_pairwise = {}", t.slope_pairwise);
        let _ = writeln!(s, "tolerance.equilibrium = {:e}", t.equilibrium);
        let _ = writeln!(
            s,
            "tolerance.quadrature_refinement = {:e}",
            t.quadrature_refinement
        );
        let _ = writeln!(s, "tolerance.rank_eigenvalue = {:e}", t.rank_eigenvalue);
        let _ = writeln!(s, "tolerance.appendix_b = {:e}", t.appendix_b);
        let _ = writeln!(s, "tolerance.basis_gradient_fd = {:e}", t.basis_gradient_fd);
        let _ = writeln!(s, "tolerance.solver_residual = {:e}", t.solver_residual);
        s
    }

    /// Stable hash of the canonical text form.
    pub fn hash_hex(&self) -> String {
        let mut h = DefaultHasher::new();
        self.to_text().hash(&mut h);
        format!("{:016x}", h.finish())
    }

    /// JSON manifest recording the config, its hash, the library version and
    /// every tolerance/design toggle that affects the outputs.
    pub fn manifest_json(&self) -> String {
        let manifest = serde_json::json!({
            "library": "polyplate",
            "version": env!("CARGO_PKG_VERSION"),
            "config_hash": self.hash_hex(),
            "config": self,
            "design": {
                "shear_sign_convention": "gamma = beta + grad w",
                "shear_correction": 5.0 / 6.0,
                "simply_supported": "hard (SS2): w = 0, beta_s = 0",
                "stiffness_quadrature_degree": crate::element::DEFAULT_QUADRATURE_DEGREE,
                "norm_quadrature_degree": crate::verify::NORM_QUADRATURE_DEGREE,
                "wbar_normalization": "100 w_c D_b / (q a^4)",
            },
        });
        serde_json::to_string_pretty(&manifest).expect("manifest serializes")
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn apply_text(cfg: &mut RunConfig, text: &str, base: Option<&Path>, depth: usize) -> Result<()> {
    if depth > 8 {
        return Err(Error::Config("include depth exceeds 8".into()));
    }
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            Error::Config(format!("line {}: invalid {what}: '{value}'", lineno + 1))
        };
        match key {
            "include" => {
                let path = match base {
                    Some(b) => b.join(value),
                    None => PathBuf::from(value),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("cannot include {}: {e}", path.display()))
                })?;
                apply_text(cfg, &text, path.parent(), depth + 1)?;
            }
            "problem" => {
                cfg.problem = match value {
                    "patch" => Problem::Patch,
                    "square_udl" => Problem::SquareUdl,
                    "square_nonuniform" => Problem::SquareNonuniform,
                    "circular" => Problem::Circular,
                    _ => return Err(bad("problem")),
                }
            }
            "bc" => {
                cfg.bc = match value {
                    "clamped" => BcKind::Clamped,
                    "hard_ss" => BcKind::HardSimplySupported,
                    _ => return Err(bad("bc")),
                }
            }
            "thickness" => cfg.thickness = parse_list(value).map_err(|_| bad("thickness"))?,
            "mesh.family" => {
                cfg.mesh_family = match value {
                    "structured" => MeshFamily::Structured,
                    "trapezoidal" => MeshFamily::Trapezoidal,
                    "cvt" => MeshFamily::Cvt,
                    _ => return Err(bad("mesh family")),
                }
            }
            "mesh.elements" => {
                cfg.mesh_elements = parse_list(value).map_err(|_| bad("mesh.elements"))?
            }
            "mesh.nodes" => {
                cfg.mesh_nodes = Some(parse_list(value).map_err(|_| bad("mesh.nodes"))?)
            }
            "material.e" => cfg.youngs_modulus = value.parse().map_err(|_| bad("material.e"))?,
            "material.nu" => cfg.poisson_ratio = value.parse().map_err(|_| bad("material.nu"))?,
            "output" => cfg.output_dir = PathBuf::from(value),
            "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
            _ if key.starts_with("tolerance.") => {
                apply_tolerance(&mut cfg.tolerances, key, value)
                    .ok_or_else(|| bad("tolerance"))?
            }
            _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, ()> {
    let items: std::result::Result<Vec<T>, _> = value
        .split(',')
        .map(|s| s.trim().parse::<T>())
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(()),
    }
}

fn apply_tolerance(t: &mut Tolerances, key: &str, value: &str) -> Option<()> {
    let pair = |v: &str| -> Option<(f64, f64)> {
        let (a, b) = v.split_once(',')?;
        Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
    };
    match key {
        "tolerance.patch_error" => t.patch_error = value.parse().ok()?,
        "tolerance.wbar_relative" => t.wbar_relative = value.parse().ok()?,
        "tolerance.l2_slope" => t.l2_slope = pair(value)?,
        "tolerance.h1_slope" => t.h1_slope = pair(value)?,
        "tolerance.slope_pairwise" => t.slope_pairwise = value.parse().ok()?,
        "tolerance.equilibrium" => t.equilibrium = value.parse().ok()?,
        "tolerance.quadrature_refinement" => t.quadrature_refinement = value.parse().ok()?,
        "tolerance.rank_eigenvalue" => t.rank_eigenvalue = value.parse().ok()?,
        "tolerance.appendix_b" => t.appendix_b = value.parse().ok()?,
        "tolerance.basis_gradient_fd" => t.basis_gradient_fd = value.parse().ok()?,
        "tolerance.solver_residual" => t.solver_residual = value.parse().ok()?,
        _ => return None,
    }
    Some(())
}
