use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jc_teleport::fisher::{Derivative, QfiEngine};
use jc_teleport::teleport::{Construction, PauliChannelMode, Protocol};

use jc_teleport_cli::config::{
    construction_from_str, derivative_from_str, engine_from_str, mode_from_str, parse_config,
    protocol_from_str, quantity_from_str, Overrides,
};
use jc_teleport_cli::csv::{emit_csv, format_csv};
use jc_teleport_cli::error::CliError;
use jc_teleport_cli::plot::emit_plot_script;
use jc_teleport_cli::presets::{resolve, PRESET_IDS};
use jc_teleport_cli::selftest;
use jc_teleport_cli::sweep::{run_channel_dump, run_sweep, Quantity, SweepSpec, TauGrid};

#[derive(Parser)]
#[command(
    name = "jctp",
    version,
    about = "Atom-field teleportation sweeps: channel coefficients, fidelities, quantum Fisher information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the channel coefficients over a tau grid
    Channel(ChannelArgs),
    /// Sweep teleportation fidelity over tau
    Teleport(SweepArgs),
    /// Sweep the quantum Fisher information of the output in theta over tau
    Qfi(SweepArgs),
    /// Run a named figure preset, writing CSV plus a gnuplot script
    Figure(FigureArgs),
    /// Run the built-in cross-check suite and print its report
    Selftest,
}

#[derive(Args)]
struct ChannelArgs {
    /// Fock reference index of the projected subspace
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Mean photon number of the field
    #[arg(long, default_value_t = 4.0)]
    nbar: f64,
    /// Detuning in coupling units
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    tau_start: f64,
    #[arg(long, default_value_t = 20.0)]
    tau_stop: f64,
    #[arg(long, default_value_t = 2000)]
    tau_count: usize,
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// key=value config file applied under the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// ftp (single copy) or stp (two copies)
    #[arg(long, value_parser = protocol_from_str)]
    protocol: Option<Protocol>,
    /// closed, overlap, or qfi; the subcommand sets the default
    #[arg(long, value_parser = quantity_from_str)]
    quantity: Option<Quantity>,
    /// Fock reference index of the projected subspace
    #[arg(long)]
    n: Option<u32>,
    /// Mean photon numbers, comma separated; each value is one series
    #[arg(long, value_delimiter = ',')]
    nbar: Option<Vec<f64>>,
    /// Detunings, comma separated; each value is one series
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    #[arg(long)]
    tau_start: Option<f64>,
    #[arg(long)]
    tau_stop: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    /// Input-state polar angle in radians, in [0, pi]
    #[arg(long)]
    theta: Option<f64>,
    /// Input-state relative phase in radians, in [0, 2 pi]
    #[arg(long)]
    phi: Option<f64>,
    /// QFI engine: matrix, spectral, or sld
    #[arg(long, value_parser = engine_from_str)]
    engine: Option<QfiEngine>,
    /// Derivative for the QFI: analytic, fd, or richardson
    #[arg(long, value_parser = derivative_from_str)]
    derivative: Option<Derivative>,
    /// Fidelity construction: closed (formula) or oracle (measurement pipeline)
    #[arg(long, value_parser = construction_from_str)]
    construction: Option<Construction>,
    /// Pauli correction bookkeeping for the oracle: hermitian or literal
    #[arg(long, value_parser = mode_from_str)]
    mode: Option<PauliChannelMode>,
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

impl SweepArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            protocol: self.protocol,
            quantity: self.quantity,
            n: self.n,
            nbar: self.nbar.clone(),
            delta: self.delta.clone(),
            tau_start: self.tau_start,
            tau_stop: self.tau_stop,
            tau_count: self.tau_count,
            theta: self.theta,
            phi: self.phi,
            engine: self.engine,
            derivative: self.derivative,
            construction: self.construction,
            mode: self.mode,
            output: self.output.clone(),
        }
    }
}

#[derive(Args)]
struct FigureArgs {
    /// Preset id, fig1a through fig10c
    id: String,
    /// Directory receiving <id>.csv and <id>.gp
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the preset tau window start
    #[arg(long)]
    tau_start: Option<f64>,
    /// Override the preset tau window stop
    #[arg(long)]
    tau_stop: Option<f64>,
    /// Override the preset tau point count
    #[arg(long)]
    tau_count: Option<usize>,
}

fn write_table(
    result: &jc_teleport_cli::sweep::SweepResult,
    output: Option<&PathBuf>,
) -> Result<(), CliError> {
    match output {
        Some(path) => emit_csv(result, path),
        None => {
            let text = format_csv(result);
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn run_sweep_command(args: &SweepArgs, default_quantity: Quantity) -> Result<(), CliError> {
    let mut spec = SweepSpec {
        quantity: default_quantity,
        ..SweepSpec::default()
    };
    let mut output = None;
    if let Some(path) = &args.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::from_io(e, path))?;
        let file = parse_config(&text)?;
        file.apply(&mut spec);
        output = file.output;
    }
    let flags = args.overrides();
    flags.apply(&mut spec);
    if let Some(path) = flags.output {
        output = Some(path);
    }
    let result = run_sweep(&spec)?;
    write_table(&result, output.as_ref())
}

fn run_figure(args: &FigureArgs) -> Result<(), CliError> {
    let mut preset = resolve(&args.id).ok_or_else(|| {
        CliError::Validation(format!(
            "unknown figure id {:?} (known: {} .. {})",
            args.id,
            PRESET_IDS[0],
            PRESET_IDS[PRESET_IDS.len() - 1]
        ))
    })?;
    if let Some(v) = args.tau_start {
        preset.spec.tau.start = v;
    }
    if let Some(v) = args.tau_stop {
        preset.spec.tau.stop = v;
    }
    if let Some(v) = args.tau_count {
        preset.spec.tau.count = v;
    }
    let mut result = run_sweep(&preset.spec)?;
    result.comments.insert(0, format!("preset: {}", preset.id));

    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::from_io(e, &args.out_dir))?;
    let csv_name = format!("{}.csv", preset.id);
    let csv_path = args.out_dir.join(&csv_name);
    let gp_path = args.out_dir.join(format!("{}.gp", preset.id));
    emit_csv(&result, &csv_path)?;
    emit_plot_script(&result, &csv_name, preset.style, &gp_path)?;
    println!("{}", csv_path.display());
    println!("{}", gp_path.display());
    Ok(())
}

fn run_selftest() -> Result<(), CliError> {
    let checks = selftest::run_all();
    let mut stdout = std::io::stdout();
    let ok = selftest::report(&checks, &mut stdout)
        .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Numeric("self-test failed".into()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Channel(a) => {
            let result = run_channel_dump(
                a.n,
                a.nbar,
                a.delta,
                TauGrid {
                    start: a.tau_start,
                    stop: a.tau_stop,
                    count: a.tau_count,
                },
            )?;
            write_table(&result, a.output.as_ref())
        }
        Command::Teleport(a) => run_sweep_command(&a, Quantity::FidelityClosed),
        Command::Qfi(a) => run_sweep_command(&a, Quantity::QfiTheta),
        Command::Figure(a) => run_figure(&a),
        Command::Selftest => run_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendering but fold usage errors into the
            // validation exit code; --help and --version stay success
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
