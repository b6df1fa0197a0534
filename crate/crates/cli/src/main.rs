use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skelforge_cli::error::{invalid, CliResult};
use skelforge_cli::layout::WorkLayout;
use skelforge_cli::stages::{self, camera_seed, dsi_seed, load_toml, load_topology};
use skelforge_cli::{run_pipeline, Overrides, PipelineConfig};
use skelforge_core::{CameraIntrinsics, DsiParams, RcmParams, Vec3};

#[derive(Parser)]
#[command(name = "skelforge", version, about = "Skeleton animation to labeled stick-figure clips")]
struct Cli {
    /// Global seed; every stochastic stage derives its own seed from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coordinate sequence (JSON) to per-joint rotations.
    Convert {
        /// Topology document; the built-in 53-joint skeleton when omitted.
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Segment and densify a rotation sequence.
    Interpolate {
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        /// DSI parameters (TOML).
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Noisy, smoothed variants of an interpolated sequence.
    Variants {
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        /// Derive the stage seed from `--seed` and this id, as `run` does.
        /// Without it `--seed` is used directly.
        #[arg(long)]
        animation: Option<String>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Random camera walk around a scene origin.
    Camera {
        /// Scene origin as x,y,z.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        origin: Vec3,
        #[arg(long)]
        moves: Option<usize>,
        /// Camera parameters (TOML).
        #[arg(long)]
        params: Option<PathBuf>,
        /// With `--variant` and `--viewpoint`, derive the seed as `run` does.
        #[arg(long)]
        animation: Option<String>,
        #[arg(long, default_value_t = 0)]
        variant: usize,
        #[arg(long, default_value_t = 0)]
        viewpoint: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one rotation file through one camera trajectory.
    Render {
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        traj: PathBuf,
        /// Intrinsics (TOML); 640x480, focal 500 px when omitted.
        #[arg(long)]
        intrinsics: Option<PathBuf>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Render every planned clip from a work directory and write the manifest.
    Build {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        work: PathBuf,
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long)]
        intrinsics: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Whole pipeline from a configuration document.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the document's output root.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vec3::new(x, y, z)),
        _ => Err("expected three finite numbers x,y,z".into()),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Convert { topology, input, out } => {
            let topology = load_topology(topology.as_deref())?;
            let seq = stages::convert(&topology, &input, &out)?;
            println!("{} frames, {} joints -> {}", seq.frame_count(), seq.joint_count(), out.display());
        }
        Command::Interpolate { topology, input, params, out } => {
            let topology = load_topology(topology.as_deref())?;
            let params: DsiParams = load_toml(params.as_deref(), "interpolate")?;
            let s = stages::interpolate(&topology, &input, &params, &out)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} -> {} frames at {:.3} fps -> {}", s.source_frames, s.frames, s.fps, out.display());
        }
        Command::Variants { topology, input, params, count, animation, out_dir } => {
            let topology = load_topology(topology.as_deref())?;
            let mut params: DsiParams = load_toml(params.as_deref(), "variants")?;
            if let Some(c) = count {
                params.variants = c;
            }
            params.seed = match &animation {
                Some(id) => dsi_seed(seed, id),
                None => seed,
            };
            let (set, warnings) = stages::variants(&topology, &input, &params, &out_dir)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let (v, j, f, _) = set.shape();
            println!("{v} variants x {j} joints x {f} frames -> {}", out_dir.display());
        }
        Command::Camera { origin, moves, params, animation, variant, viewpoint, out } => {
            let mut params: RcmParams = load_toml(params.as_deref(), "camera")?;
            if let Some(m) = moves {
                params.moves = m;
            }
            params.seed = match &animation {
                Some(id) => camera_seed(seed, id, variant, viewpoint),
                None => seed,
            };
            let traj = stages::camera(origin, &params, &out)?;
            println!("{} poses -> {}", traj.poses.len(), out.display());
        }
        Command::Render { topology, input, traj, intrinsics, out_dir } => {
            let topology = load_topology(topology.as_deref())?;
            let intrinsics: CameraIntrinsics = load_toml(intrinsics.as_deref(), "render")?;
            let n = stages::render(&topology, &input, &traj, &intrinsics, &out_dir)?;
            println!("{n} frames -> {}", out_dir.display());
        }
        Command::Build { plan, work, topology, intrinsics, out } => {
            let topology = load_topology(topology.as_deref())?;
            let intrinsics: CameraIntrinsics = load_toml(intrinsics.as_deref(), "build")?;
            let manifest = stages::build(&plan, &WorkLayout::new(work), &topology, &intrinsics, &out)?;
            println!("{} clips -> {}", manifest.records.len(), out.display());
        }
        Command::Run { config, output } => {
            if !config.is_file() {
                return Err(invalid("config", format!("{} does not exist", config.display())));
            }
            let config = PipelineConfig::load(&config, &Overrides { seed: cli.seed, output })?;
            let out = run_pipeline(&config)?;
            print!("{}", out.report.summary());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
