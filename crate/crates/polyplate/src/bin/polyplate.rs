//! Command-line front end: mesh generation, single solves, benchmark runs
//! and the scripted verification suite.
//!
//! Exit codes: 0 on success, 1 when a requested check fails (or a solve
//! errors out), 2 on usage/config errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyplate::acceptance;
use polyplate::basis::PolygonBasis;
use polyplate::config::{BcKind, MeshFamily, Problem, RunConfig, Tolerances};
use polyplate::element::{ElementContext, PlateMaterial};
use polyplate::geometry::Point;
use polyplate::mesh::{
    generate_cvt_polygonal, generate_structured_quad, generate_trapezoidal, read_mesh, write_mesh,
    Domain, MeshKind, MeshSpec, PolyMesh, DEFAULT_LLOYD_ITERS,
};
use polyplate::report::{
    convergence_report, write_deflection_table, DeflectionRow, EXACT_WBAR_CLAMPED,
    EXACT_WBAR_SIMPLY_SUPPORTED,
};
use polyplate::system::{solve_plate, BoundaryCondition, BoundaryConditions};
use polyplate::verify::{
    circular_benchmark, cvt_series, patch_test, square_nonuniform_benchmark, square_udl_benchmark,
    table_mesh, SquareBc,
};
use polyplate::{Error, Result};

/// Polygonal Reissner-Mindlin plate solver and verification harness.
#[derive(Parser)]
#[command(name = "polyplate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Basis-function utilities.
    Basis {
        #[command(subcommand)]
        command: BasisCommand,
    },
    /// Element-level debugging utilities.
    Element {
        #[command(subcommand)]
        command: ElementCommand,
    },
    /// Solve one plate problem on a mesh file and dump the nodal solution.
    Solve(SolveArgs),
    /// Execute a configured run (patch test, deflection table or
    /// convergence study) and write its artifacts.
    Run(RunArgs),
    /// Time the deflection-table benchmark and check the reference bands.
    Bench(BenchArgs),
    /// Run the complete verification suite and print a pass/fail table.
    VerifyAll(VerifyArgs),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a mesh and write it in the plain-text format.
    Gen(MeshGenArgs),
}

#[derive(Subcommand)]
enum BasisCommand {
    /// Sample the serendipity basis of one polygon on a grid as CSV.
    Sample(BasisSampleArgs),
}

#[derive(Subcommand)]
enum ElementCommand {
    /// Dump the element stiffness matrix and its spectrum as CSV.
    Dump(ElementDumpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Square,
    Disk,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Structured,
    Trapezoidal,
    Cvt,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Clamped,
    HardSs,
}

impl BcArg {
    fn kind(self) -> BcKind {
        match self {
            BcArg::Clamped => BcKind::Clamped,
            BcArg::HardSs => BcKind::HardSimplySupported,
        }
    }

    fn condition(self) -> BoundaryCondition {
        match self {
            BcArg::Clamped => BoundaryCondition::Clamped,
            BcArg::HardSs => BoundaryCondition::HardSimplySupported,
        }
    }
}

#[derive(Args)]
struct MeshGenArgs {
    /// Domain shape.
    #[arg(long, value_enum, default_value = "square")]
    domain: DomainArg,
    /// Side length (square) or radius (disk).
    #[arg(long, default_value_t = 1.0)]
    size: f64,
    /// Mesh family.
    #[arg(long, value_enum, default_value = "cvt")]
    kind: KindArg,
    /// Elements per side (structured/trapezoidal) or total element target
    /// (cvt).
    #[arg(long)]
    n: usize,
    /// Random seed (cvt only).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output mesh file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BasisSampleArgs {
    /// Polygon file: one `x y` vertex per line, counter-clockwise.
    #[arg(long)]
    polygon: PathBuf,
    /// Grid resolution per direction over the bounding box.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ElementDumpArgs {
    /// Polygon file: one `x y` vertex per line, counter-clockwise.
    #[arg(long)]
    polygon: PathBuf,
    /// Plate thickness.
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    /// Young's modulus.
    #[arg(long, default_value_t = 10.92e6)]
    e: f64,
    /// Poisson's ratio.
    #[arg(long, default_value_t = 0.3)]
    nu: f64,
    /// Output directory for `stiffness.csv` and `spectrum.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Mesh file in the plain-text format.
    #[arg(long)]
    mesh: PathBuf,
    /// Boundary condition on the whole boundary.
    #[arg(long, value_enum, default_value = "clamped")]
    bc: BcArg,
    /// Plate thickness.
    #[arg(long)]
    h: f64,
    /// Young's modulus.
    #[arg(long, default_value_t = 10.92e6)]
    e: f64,
    /// Poisson's ratio.
    #[arg(long, default_value_t = 0.3)]
    nu: f64,
    /// Uniform transverse pressure.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Output CSV with nodal w, beta_x, beta_y (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (flat `key = value` text with `include`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem override.
    #[arg(long)]
    problem: Option<String>,
    /// Boundary-condition override.
    #[arg(long, value_enum)]
    bc: Option<BcArg>,
    /// Thickness override (repeatable).
    #[arg(long = "h")]
    thickness: Vec<f64>,
    /// Mesh override, `family:n1,n2,...` with side counts for
    /// structured/trapezoidal and element counts for cvt
    /// (e.g. `structured:8` or `cvt:64,256`).
    #[arg(long)]
    mesh: Option<String>,
    /// CVT node-count targets override (repeatable).
    #[arg(long = "nodes")]
    nodes: Vec<usize>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Boundary condition.
    #[arg(long, value_enum, default_value = "clamped")]
    bc: BcArg,
    /// Target node count of the CVT benchmark mesh.
    #[arg(long, default_value_t = 800)]
    nodes: usize,
    /// Thickness ratios to benchmark (repeatable).
    #[arg(long = "h", default_values_t = [1e-5, 0.1])]
    thickness: Vec<f64>,
    /// Random seed for the mesh.
    #[arg(long, default_value_t = 21)]
    seed: u64,
    /// Output CSV for the deflection table (stdout summary only when
    /// omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run a single criterion (1-10) instead of the whole suite.
    #[arg(long)]
    criterion: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mesh {
            command: MeshCommand::Gen(args),
        } => mesh_gen(&args),
        Command::Basis {
            command: BasisCommand::Sample(args),
        } => basis_sample(&args),
        Command::Element {
            command: ElementCommand::Dump(args),
        } => element_dump(&args),
        Command::Solve(args) => solve_command(&args),
        Command::Run(args) => run_command(&args),
        Command::Bench(args) => bench_command(&args),
        Command::VerifyAll(args) => verify_all(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::InvalidArgument(_) | Error::Parse { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

/// Output root: `POLYPLATE_OUT` prefixes relative output paths.
fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os("POLYPLATE_OUT") {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn mesh_gen(args: &MeshGenArgs) -> Result<ExitCode> {
    let domain = match args.domain {
        DomainArg::Square => Domain::UnitSquare { a: args.size },
        DomainArg::Disk => Domain::Disk { r: args.size },
    };
    let mesh = match args.kind {
        KindArg::Structured => match domain {
            Domain::UnitSquare { a } => generate_structured_quad(a, args.n)?,
            Domain::Disk { .. } => {
                return Err(Error::invalid_argument(
                    "structured meshes are only available on the square",
                ))
            }
        },
        KindArg::Trapezoidal => match domain {
            Domain::UnitSquare { a } => generate_trapezoidal(a, args.n, 0.3)?,
            Domain::Disk { .. } => {
                return Err(Error::invalid_argument(
                    "trapezoidal meshes are only available on the square",
                ))
            }
        },
        KindArg::Cvt => generate_cvt_polygonal(
            &MeshSpec {
                domain,
                kind: MeshKind::CvtPolygonal,
                target_elements: args.n,
                seed: args.seed,
            },
            DEFAULT_LLOYD_ITERS,
        )?,
    };
    let out = resolve_out(&args.out);
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_mesh(&mesh, &out)?;
    println!(
        "wrote {} ({} nodes, {} elements)",
        out.display(),
        mesh.num_nodes(),
        mesh.num_elements()
    );
    Ok(ExitCode::SUCCESS)
}

fn read_polygon(path: &Path) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid_argument(format!("cannot read {}: {e}", path.display())))?;
    let mut polygon = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.ok_or(Error::Parse {
                line: idx + 1,
                message: "expected `x y`".into(),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("bad coordinate: {e}"),
            })
        };
        let x = parse(it.next())?;
        let y = parse(it.next())?;
        polygon.push(Point::new(x, y));
    }
    Ok(polygon)
}

fn basis_sample(args: &BasisSampleArgs) -> Result<ExitCode> {
    if args.grid < 2 {
        return Err(Error::invalid_argument("grid must be at least 2"));
    }
    let polygon = read_polygon(&args.polygon)?;
    let basis = PolygonBasis::new(&polygon)?;
    let n = polygon.len();
    let (mut lo, mut hi) = (polygon[0], polygon[0]);
    for p in &polygon {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut csv = String::from("x,y");
    for i in 0..n {
        csv.push_str(&format!(",phi_{i}"));
    }
    for k in 0..n {
        csv.push_str(&format!(",psi_{k}"));
    }
    csv.push('\n');
    let steps = args.grid;
    for iy in 0..=steps {
        for ix in 0..=steps {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * ix as f64 / steps as f64,
                lo.y + (hi.y - lo.y) * iy as f64 / steps as f64,
            );
            let Ok(eval) = basis.eval(p) else {
                continue; // outside or on the boundary
            };
            csv.push_str(&format!("{:.17e},{:.17e}", p.x, p.y));
            for v in eval.vertex.iter().chain(eval.psi.iter()) {
                csv.push_str(&format!(",{v:.17e}"));
            }
            csv.push('\n');
        }
    }
    match &args.out {
        Some(path) => {
            let path = resolve_out(path);
            write_text(&path, &csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn element_dump(args: &ElementDumpArgs) -> Result<ExitCode> {
    let polygon = read_polygon(&args.polygon)?;
    let material = PlateMaterial::new(args.e, args.nu, args.h)?;
    let context = ElementContext::new(&polygon, &material)?;
    let stiffness = context.stiffness(&material, 4)?;
    let mut k_csv = String::new();
    for r in 0..stiffness.nrows() {
        let row: Vec<String> = (0..stiffness.ncols())
            .map(|c| format!("{:.17e}", stiffness[(r, c)]))
            .collect();
        k_csv.push_str(&row.join(","));
        k_csv.push('\n');
    }
    let mut eigen: Vec<f64> = stiffness
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigen.sort_by(f64::total_cmp);
    let mut s_csv = String::from("eigenvalue\n");
    for v in &eigen {
        s_csv.push_str(&format!("{v:.17e}\n"));
    }
    let dir = resolve_out(&args.out);
    std::fs::create_dir_all(&dir)?;
    write_text(&dir.join("stiffness.csv"), &k_csv)?;
    write_text(&dir.join("spectrum.csv"), &s_csv)?;
    let zeros = eigen
        .iter()
        .filter(|&&v| v.abs() < 1e-9 * eigen.last().copied().unwrap_or(1.0))
        .count();
    println!(
        "wrote {} (dofs {}, {} near-zero eigenvalues)",
        dir.display(),
        stiffness.nrows(),
        zeros
    );
    Ok(ExitCode::SUCCESS)
}

fn solve_command(args: &SolveArgs) -> Result<ExitCode> {
    let mesh = read_mesh(&args.mesh)?;
    let material = PlateMaterial::new(args.e, args.nu, args.h)?;
    let bcs = BoundaryConditions::uniform(&mesh, args.bc.condition());
    let q = args.q;
    let solution = solve_plate(&mesh, &material, &|_| q, &bcs)?;
    let mut csv = String::from("node,x,y,w,beta_x,beta_y\n");
    for (node, v) in mesh.vertices().iter().enumerate() {
        let (w, beta) = solution.node_values(node);
        csv.push_str(&format!(
            "{node},{:.17e},{:.17e},{w:.17e},{:.17e},{:.17e}\n",
            v.x, v.y, beta.x, beta.y
        ));
    }
    match &args.out {
        Some(path) => {
            let path = resolve_out(path);
            write_text(&path, &csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    let load = q * mesh.total_area();
    let reaction = solution.total_w_reaction();
    println!(
        "total load {load:.6e}, total w-reaction {reaction:.6e}, imbalance {:.3e}",
        (reaction + load).abs() / load.abs().max(1.0)
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_mesh_override(cfg: &mut RunConfig, text: &str) -> Result<()> {
    let (family, counts) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("mesh override `{text}`: expected family:n,...")))?;
    cfg.mesh_family = match family {
        "structured" => MeshFamily::Structured,
        "trapezoidal" => MeshFamily::Trapezoidal,
        "cvt" => MeshFamily::Cvt,
        other => return Err(Error::Config(format!("unknown mesh family `{other}`"))),
    };
    let mut elements = Vec::new();
    for tok in counts.split(',') {
        let n: usize = tok
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("mesh override `{text}`: {e}")))?;
        // Structured/trapezoidal sizes are side counts on the command line
        // (`structured:8` is an 8x8 mesh); the config stores element counts.
        elements.push(match cfg.mesh_family {
            MeshFamily::Cvt => n,
            _ => n * n,
        });
    }
    cfg.mesh_elements = elements;
    cfg.mesh_nodes = None;
    Ok(())
}

fn build_meshes(cfg: &RunConfig, domain: Domain) -> Result<Vec<PolyMesh>> {
    match cfg.mesh_family {
        MeshFamily::Cvt => {
            if let Some(nodes) = &cfg.mesh_nodes {
                nodes.iter().map(|&t| table_mesh(t, cfg.seed)).collect()
            } else {
                cvt_series(domain, &cfg.mesh_elements, cfg.seed)
            }
        }
        family => {
            if matches!(domain, Domain::Disk { .. }) {
                return Err(Error::Config(
                    "structured/trapezoidal meshes are only available on the square".into(),
                ));
            }
            cfg.mesh_elements
                .iter()
                .map(|&e| {
                    let n = (e as f64).sqrt().round() as usize;
                    match family {
                        MeshFamily::Structured => generate_structured_quad(1.0, n.max(1)),
                        _ => generate_trapezoidal(1.0, n.max(1), 0.3),
                    }
                })
                .collect()
        }
    }
}

fn wbar_targets(bc: BcKind) -> &'static [(f64, f64); 2] {
    match bc {
        BcKind::Clamped => &EXACT_WBAR_CLAMPED,
        BcKind::HardSimplySupported => &EXACT_WBAR_SIMPLY_SUPPORTED,
    }
}

fn run_command(args: &RunArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(problem) = &args.problem {
        cfg.problem = match problem.as_str() {
            "patch" => Problem::Patch,
            "square_udl" => Problem::SquareUdl,
            "square_nonuniform" => Problem::SquareNonuniform,
            "circular" => Problem::Circular,
            other => return Err(Error::Config(format!("unknown problem `{other}`"))),
        };
    }
    if let Some(bc) = args.bc {
        cfg.bc = bc.kind();
    }
    if !args.thickness.is_empty() {
        cfg.thickness = args.thickness.clone();
    }
    if let Some(mesh) = &args.mesh {
        parse_mesh_override(&mut cfg, mesh)?;
    }
    if !args.nodes.is_empty() {
        cfg.mesh_family = MeshFamily::Cvt;
        cfg.mesh_nodes = Some(args.nodes.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;

    let out_dir = resolve_out(&cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;
    write_text(&out_dir.join("manifest.json"), &cfg.manifest_json())?;
    write_text(&out_dir.join("run.cfg"), &cfg.to_text())?;

    let domain = match cfg.problem {
        Problem::Circular => Domain::Disk { r: 1.0 },
        _ => Domain::UnitSquare { a: 1.0 },
    };
    let meshes = build_meshes(&cfg, domain)?;
    for (i, mesh) in meshes.iter().enumerate() {
        write_mesh(mesh, out_dir.join(format!("mesh_{i}.txt")))?;
    }

    let mut failures = Vec::new();
    match cfg.problem {
        Problem::Patch => {
            let mut csv = String::from("mesh,nodes,h_over_a,l2,h1\n");
            for (i, mesh) in meshes.iter().enumerate() {
                for &h in &cfg.thickness {
                    let (l2, h1) = patch_test(mesh, h)?;
                    csv.push_str(&format!(
                        "{i},{},{h:e},{l2:.3e},{h1:.3e}\n",
                        mesh.num_nodes()
                    ));
                    println!("patch mesh {i} h/a {h:e}: L2 {l2:.3e}, H1 {h1:.3e}");
                    if l2 > cfg.tolerances.patch_error || h1 > cfg.tolerances.patch_error {
                        failures.push(format!(
                            "patch error {:.3e} exceeds {:.1e} on mesh {i} at h/a = {h:e}",
                            l2.max(h1),
                            cfg.tolerances.patch_error
                        ));
                    }
                }
            }
            write_text(&out_dir.join("patch.csv"), &csv)?;
        }
        Problem::SquareUdl => {
            let bc = match cfg.bc {
                BcKind::Clamped => SquareBc::Clamped,
                BcKind::HardSimplySupported => SquareBc::HardSimplySupported,
            };
            let mut rows = Vec::new();
            for mesh in &meshes {
                for &h in &cfg.thickness {
                    let w_bar = square_udl_benchmark(bc, h, mesh)?;
                    println!(
                        "square_udl {} nodes {}, h/a {h:e}: w_bar {w_bar:.4}",
                        cfg.bc.as_str(),
                        mesh.num_nodes()
                    );
                    rows.push(DeflectionRow {
                        nodes: mesh.num_nodes(),
                        h_over_a: h,
                        w_bar,
                    });
                    for &(href, exact) in wbar_targets(cfg.bc) {
                        if (h - href).abs() <= 1e-12 * href {
                            let rel = (w_bar - exact).abs() / exact;
                            if rel > cfg.tolerances.wbar_relative {
                                failures.push(format!(
                                    "w_bar = {w_bar:.4} deviates {:.2}% from {exact} at h/a = {href:e}",
                                    100.0 * rel
                                ));
                            }
                        }
                    }
                }
            }
            write_deflection_table(&rows, &out_dir.join("deflection.csv"))?;
        }
        Problem::SquareNonuniform | Problem::Circular => {
            let mut records = Vec::new();
            for &h in &cfg.thickness {
                let record = match cfg.problem {
                    Problem::SquareNonuniform => square_nonuniform_benchmark(h, &meshes)?,
                    _ => circular_benchmark(h, &meshes)?,
                };
                let (l2, h1) = record.slopes()?;
                println!("{}: L2 slope {l2:.2}, H1 slope {h1:.2}", record.label);
                let t = &cfg.tolerances;
                if !(t.l2_slope.0..=t.l2_slope.1).contains(&l2) {
                    failures.push(format!(
                        "L2 slope {l2:.2} outside [{}, {}] at h = {h:e}",
                        t.l2_slope.0, t.l2_slope.1
                    ));
                }
                if !(t.h1_slope.0..=t.h1_slope.1).contains(&h1) {
                    failures.push(format!(
                        "H1 slope {h1:.2} outside [{}, {}] at h = {h:e}",
                        t.h1_slope.0, t.h1_slope.1
                    ));
                }
                records.push(record);
            }
            convergence_report(&records, &out_dir)?;
        }
    }

    if failures.is_empty() {
        println!("all checks passed; artifacts in {}", out_dir.display());
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &failures {
            eprintln!("check failed: {f}");
        }
        Ok(ExitCode::from(1))
    }
}

fn bench_command(args: &BenchArgs) -> Result<ExitCode> {
    let bc = match args.bc {
        BcArg::Clamped => SquareBc::Clamped,
        BcArg::HardSs => SquareBc::HardSimplySupported,
    };
    let mesh = table_mesh(args.nodes, args.seed)?;
    println!(
        "benchmark mesh: {} nodes, {} elements",
        mesh.num_nodes(),
        mesh.num_elements()
    );
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for &h in &args.thickness {
        let start = std::time::Instant::now();
        let w_bar = square_udl_benchmark(bc, h, &mesh)?;
        let secs = start.elapsed().as_secs_f64();
        rows.push(DeflectionRow {
            nodes: mesh.num_nodes(),
            h_over_a: h,
            w_bar,
        });
        let mut note = String::new();
        for &(href, exact) in wbar_targets(args.bc.kind()) {
            if (h - href).abs() <= 1e-12 * href {
                let rel = (w_bar - exact).abs() / exact;
                note = format!(", reference {exact} ({:+.2}%)", 100.0 * rel);
                if rel > Tolerances::default().wbar_relative {
                    failures += 1;
                }
            }
        }
        println!("h/a {h:e}: w_bar {w_bar:.4}{note} [{secs:.2}s]");
    }
    if let Some(path) = &args.out {
        let path = resolve_out(path);
        write_deflection_table(&rows, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify_all(args: &VerifyArgs) -> Result<ExitCode> {
    let tol = Tolerances::default();
    let outcomes = match args.criterion {
        Some(id) => vec![acceptance::run_criterion(id, &tol)],
        None => acceptance::run_all(&tol),
    };
    let mut failed = 0usize;
    for out in &outcomes {
        println!("{}", out.summary_line());
        if !out.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} criteria passed", outcomes.len());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{failed} of {} criteria failed", outcomes.len());
        Ok(ExitCode::from(1))
    }
}
