//! Command-line front end. Everything here is a thin shell over the library;
//! no algorithm lives in this file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::bench::{
    attach_ratio, emit_csv, emit_plotdata, preflight, run_detector_only,
    run_experiment_streamed, ExperimentConfig, MeanOps, ResultRow, CSV_HEADER,
};
use crate::channel::{IsiChannel, SectionalizedTrellis};
use crate::code::{build_encoder, load_alist_with_default_field, random_regular_code};
use crate::error::Result;
use crate::gf::FieldTable;

#[derive(Parser)]
#[command(
    name = "nbisi",
    about = "Joint detection/decoding of nonbinary LDPC codes over ISI channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep from a config file and write a CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional gnuplot-style two-column output.
        #[arg(long)]
        plotdata: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the sectionalized trellis of a channel/field combination.
    Trellis {
        /// Channel name (dicode, epr4, proakis-b) or comma-separated taps.
        #[arg(long)]
        channel: String,
        /// Bits per field symbol.
        #[arg(long)]
        field: u32,
        /// Also print every branch, not just the summary.
        #[arg(long)]
        dump: bool,
    },
    /// Measure the configured detector alone, without a code.
    Detect {
        #[arg(long)]
        config: PathBuf,
        /// Frames per sweep point.
        #[arg(long)]
        frames: u64,
        /// Symbols per frame.
        #[arg(long, default_value_t = 64)]
        sections: usize,
    },
    /// Compare the operation counts of two runs point by point.
    Complexity {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
    },
    /// Parity-check matrix utilities.
    #[command(subcommand)]
    Code(CodeCommand),
}

#[derive(Subcommand)]
enum CodeCommand {
    /// Generate a random regular 4-cycle-free code and write it as alist.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        col_weight: usize,
        #[arg(long)]
        row_weight: usize,
        /// Bits per field symbol.
        #[arg(long)]
        field: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a matrix for majority-logic decodability (exit 1 if it fails).
    Check { alist: PathBuf },
    /// Print size, rank, rate and weight statistics of a matrix.
    Info { alist: PathBuf },
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate {
            config,
            out,
            plotdata,
            threads,
            seed,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            preflight(&cfg)?;
            println!(
                "# label={} seed={} fingerprint={}",
                cfg.label,
                cfg.seed,
                cfg.fingerprint()
            );
            println!("{CSV_HEADER}");
            let report = with_pool(threads, || {
                run_experiment_streamed(&cfg, |row| println!("{}", csv_line(row)))
            })?;
            emit_csv(&report.rows, &out)?;
            if let Some(path) = plotdata {
                emit_plotdata(&[(report.label.clone(), report.rows.clone())], &path)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trellis {
            channel,
            field,
            dump,
        } => {
            let chan = IsiChannel::from_spec(&channel)?;
            let trellis = SectionalizedTrellis::new(&chan, field);
            println!(
                "channel taps: {:?}\nmemory L = {}\nsymbol bits m = {}\nstates: {}\nbranches per section: {}",
                chan.taps(),
                trellis.memory(),
                trellis.section_bits(),
                trellis.num_states(),
                trellis.num_branches()
            );
            if dump {
                println!("\nbranch  from  symbol  to    outputs");
                for b in trellis.branches() {
                    let id = trellis.branch_id(b.from, b.symbol);
                    let outs: Vec<String> = b.outputs.iter().map(|o| format!("{o:+.3}")).collect();
                    println!(
                        "{id:>6}  {:>4}  {:>6}  {:>4}  [{}]",
                        b.from,
                        b.symbol,
                        b.to,
                        outs.join(", ")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Detect {
            config,
            frames,
            sections,
        } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            println!("# detector={} sections={sections}", cfg.schedule.detector_label());
            println!("ebn0_db frames bit_errors symbol_errors ber ser");
            for row in run_detector_only(&cfg, sections, frames)? {
                println!(
                    "{} {} {} {} {} {}",
                    row.ebn0_db, row.frames, row.bit_errors, row.symbol_errors, row.ber, row.ser
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Complexity { config_a, config_b } => {
            let cfg_a = ExperimentConfig::from_file(&config_a)?;
            let cfg_b = ExperimentConfig::from_file(&config_b)?;
            preflight(&cfg_a)?;
            preflight(&cfg_b)?;
            println!("candidate: {} ({})", cfg_a.label, cfg_a.fingerprint());
            println!("baseline:  {} ({})", cfg_b.label, cfg_b.fingerprint());
            let a = run_experiment_streamed(&cfg_a, |_| {})?;
            let b = run_experiment_streamed(&cfg_b, |_| {})?;
            let mut rows = a.rows;
            attach_ratio(&mut rows, &b.rows)?;
            println!("\nebn0_db total_candidate total_baseline ratio");
            for (ra, rb) in rows.iter().zip(&b.rows) {
                println!(
                    "{} {} {} {:.6}",
                    ra.ebn0_db,
                    ra.mean_ops.total(),
                    rb.mean_ops.total(),
                    ra.ratio
                );
                for (name, ca, cb) in categories(&ra.mean_ops, &rb.mean_ops) {
                    println!("  {name:<9} {ca:>16.1} {cb:>16.1}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Code(code_cmd) => run_code(code_cmd),
    }
}

fn run_code(command: CodeCommand) -> Result<ExitCode> {
    match command {
        CodeCommand::Gen {
            n,
            col_weight,
            row_weight,
            field,
            seed,
            out,
        } => {
            let table = std::sync::Arc::new(FieldTable::with_default_poly(field)?);
            let code = random_regular_code(n, col_weight, row_weight, table, seed)?;
            code.save_alist(&out)?;
            println!(
                "wrote {} ({} x {} over GF({}), majority-logic decodable: {})",
                out.display(),
                code.num_rows(),
                code.num_cols(),
                code.field().q(),
                code.is_majority_logic_decodable()
            );
            Ok(ExitCode::SUCCESS)
        }
        CodeCommand::Check { alist } => {
            let code = load_alist_with_default_field(&alist)?;
            let ok = code.is_majority_logic_decodable();
            println!(
                "{}: {} x {} over GF({}), majority-logic decodable: {}",
                alist.display(),
                code.num_rows(),
                code.num_cols(),
                code.field().q(),
                ok
            );
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        CodeCommand::Info { alist } => {
            let code = load_alist_with_default_field(&alist)?;
            let enc = build_encoder(&code)?;
            let (n, rows) = (code.num_cols(), code.num_rows());
            let col_w: Vec<usize> = (0..n).map(|j| code.col(j).len()).collect();
            let row_w: Vec<usize> = (0..rows).map(|i| code.row(i).len()).collect();
            println!("{}:", alist.display());
            println!("  size: {rows} x {n} over GF({})", code.field().q());
            println!("  nonzero entries: {}", code.num_entries());
            println!("  rank: {}", enc.rank());
            println!(
                "  message symbols: {} (rate {:.4})",
                enc.message_len(),
                enc.message_len() as f64 / n as f64
            );
            println!(
                "  column weights: {}..{}",
                col_w.iter().min().unwrap(),
                col_w.iter().max().unwrap()
            );
            println!(
                "  row weights: {}..{}",
                row_w.iter().min().unwrap(),
                row_w.iter().max().unwrap()
            );
            println!(
                "  majority-logic decodable: {}",
                code.is_majority_logic_decodable()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::Error::Config(e.to_string()))?;
            pool.install(f)
        }
    }
}

fn csv_line(row: &ResultRow) -> String {
    let m = &row.mean_ops;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.ebn0_db,
        row.frames,
        row.bit_errors,
        row.ber,
        row.ser,
        row.fer,
        row.mean_iterations,
        m.int_add,
        m.int_cmp,
        m.field_ops,
        m.real_mul,
        m.real_add,
        m.real_div,
        row.ratio
    )
}

fn categories<'a>(
    a: &'a MeanOps,
    b: &'a MeanOps,
) -> impl Iterator<Item = (&'static str, f64, f64)> + 'a {
    [
        ("int_add", a.int_add, b.int_add),
        ("int_cmp", a.int_cmp, b.int_cmp),
        ("field_ops", a.field_ops, b.field_ops),
        ("real_mul", a.real_mul, b.real_mul),
        ("real_add", a.real_add, b.real_add),
        ("real_div", a.real_div, b.real_div),
    ]
    .into_iter()
}
