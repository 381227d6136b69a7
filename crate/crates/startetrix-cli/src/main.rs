//! Command-line front end: forward/inverse transforms between PGM mosaics
//! and SSQ subband containers, synthetic image generation, Dg-energy
//! analysis, rate-distortion sweeps, and a built-in invariant self-test.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O or data error, 4 self-test
//! invariant violation.

mod pgm;
mod ssq;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use startetrix::rate::{dg_energy, quantized_roundtrip, report_for, weight_divergence, RateReport};
use startetrix::{
    dc_matrix, forward, inverse, stt_forward_direct, synthesize, ArithmeticMode, BayerMosaic,
    Family, SynthKind, TransformSpec, Wavelet,
};

#[derive(Parser)]
#[command(
    name = "startetrix",
    version,
    about = "Spectral-spatial transforms for Bayer CFA-sampled raw images"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Forward-transform a PGM mosaic into an SSQ subband container.
    Forward {
        /// Transform family: ydgcbcr, ydgcocg, ydgcocg2, xstt1, xstt2.
        #[arg(long)]
        family: Family,
        /// Wavelet: haar, 5/3, 9/7.
        #[arg(long, default_value = "5/3")]
        wavelet: Wavelet,
        /// Enable edge-aware weighted prediction.
        #[arg(long)]
        edge_aware: bool,
        /// Edge-likeness exponent; defaults to 1 (integer) or 1/2 (real).
        #[arg(long)]
        gamma: Option<f64>,
        /// Division guard for the weights.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Arithmetic mode: integer (lossless) or real (lossy).
        #[arg(long, default_value = "integer")]
        mode: ArithmeticMode,
        /// Write each edge-aware stage's weight fraction as PREFIX-NN.pgm.
        #[arg(long, value_name = "PREFIX")]
        dump_weights: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Reconstruct a PGM mosaic from an SSQ container.
    Inverse { input: PathBuf, output: PathBuf },
    /// Report plain vs edge-aware Dg energy per spec (family:wavelet list).
    Analyze {
        /// Comma-separated specs, e.g. xstt1:5/3,xstt2:9/7.
        #[arg(long, value_delimiter = ',', required = true)]
        specs: Vec<String>,
        /// Edge-likeness exponent for the edge-aware run.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        input: PathBuf,
    },
    /// Rate-distortion sweep over dead-zone quantizer steps (real mode).
    Rd {
        /// Spec as family:wavelet or family:wavelet:edge.
        #[arg(long)]
        spec: String,
        /// Comma-separated quantizer steps.
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        input: PathBuf,
    },
    /// Generate a synthetic test mosaic.
    Synth {
        /// constant, ramp, diag-edge-45, diag-edge-135, h-stripes,
        /// v-stripes, or noise.
        #[arg(long)]
        kind: SynthKind,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 12)]
        bit_depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        output: PathBuf,
    },
    /// Run the built-in invariant checks (round trips, Star-Tetrix
    /// equivalence, DC matrices, weight neutrality).
    Selftest,
}

#[derive(Debug)]
enum CliError {
    Pgm(pgm::PgmError),
    Ssq(ssq::SsqError),
    Lib(startetrix::Error),
    Spec(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pgm(e) => write!(f, "{e}"),
            Self::Ssq(e) => write!(f, "{e}"),
            Self::Lib(e) => write!(f, "{e}"),
            Self::Spec(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<pgm::PgmError> for CliError {
    fn from(e: pgm::PgmError) -> Self {
        Self::Pgm(e)
    }
}
impl From<ssq::SsqError> for CliError {
    fn from(e: ssq::SsqError) -> Self {
        Self::Ssq(e)
    }
}
impl From<startetrix::Error> for CliError {
    fn from(e: startetrix::Error) -> Self {
        Self::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.cmd {
        Cmd::Forward {
            family,
            wavelet,
            edge_aware,
            gamma,
            epsilon,
            mode,
            dump_weights,
            input,
            output,
        } => cmd_forward(
            family,
            wavelet,
            edge_aware,
            gamma,
            epsilon,
            mode,
            dump_weights,
            &input,
            &output,
        ),
        Cmd::Inverse { input, output } => cmd_inverse(&input, &output),
        Cmd::Analyze {
            specs,
            gamma,
            input,
        } => cmd_analyze(&specs, gamma, &input),
        Cmd::Rd {
            spec,
            steps,
            gamma,
            input,
        } => cmd_rd(&spec, &steps, gamma, &input),
        Cmd::Synth {
            kind,
            size,
            bit_depth,
            seed,
            output,
        } => cmd_synth(kind, size, bit_depth, seed, &output),
        Cmd::Selftest => {
            return if selftest() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn print_rate(report: &RateReport) {
    println!("entropy_y={}", report.entropy[0]);
    println!("entropy_dg={}", report.entropy[1]);
    println!("entropy_c1={}", report.entropy[2]);
    println!("entropy_c2={}", report.entropy[3]);
    println!("bpp={}", report.bpp);
    println!("dg_energy={}", report.dg_energy);
}

#[allow(clippy::too_many_arguments)]
fn cmd_forward(
    family: Family,
    wavelet: Wavelet,
    edge_aware: bool,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    mode: ArithmeticMode,
    dump_weights: Option<PathBuf>,
    input: &Path,
    output: &Path,
) -> Result<(), CliError> {
    let mut spec = TransformSpec::new(family, wavelet, mode).with_edge_aware(edge_aware);
    if let Some(g) = gamma {
        spec = spec.with_gamma(g);
    }
    if let Some(e) = epsilon {
        spec = spec.with_epsilon(e);
    }
    let m = pgm::read_mosaic(input)?;
    let (s, log) = forward(&m, &spec)?;
    ssq::write_subbands(output, &s, &spec, m.width(), m.height())?;
    if let Some(prefix) = dump_weights {
        for (i, fraction) in log.fractions.iter().enumerate() {
            let path = prefix.with_file_name(format!(
                "{}-{i:02}.pgm",
                prefix.file_name().unwrap_or_default().to_string_lossy()
            ));
            let samples: Vec<u16> = fraction
                .values()
                .map(|v| (v * 65535.0).round().clamp(0.0, 65535.0) as u16)
                .collect();
            pgm::write_gray16(&path, fraction.width(), fraction.height(), &samples)?;
        }
    }
    println!("record=forward");
    println!("input={}", input.display());
    println!("output={}", output.display());
    println!("family={family}");
    println!("wavelet={}", wavelet.name());
    println!("edge_aware={edge_aware}");
    println!("mode={}", mode.name());
    println!("gamma={}", spec.gamma);
    println!("epsilon={}", spec.epsilon);
    println!("width={}", m.width());
    println!("height={}", m.height());
    println!("bit_depth={}", m.bit_depth());
    print_rate(&report_for(&s));
    println!();
    Ok(())
}

fn cmd_inverse(input: &Path, output: &Path) -> Result<(), CliError> {
    let (s, spec) = ssq::read_subbands(input)?;
    let m = inverse(&s, &spec)?;
    pgm::write_mosaic(output, &m)?;
    println!("record=inverse");
    println!("input={}", input.display());
    println!("output={}", output.display());
    println!("family={}", spec.family);
    println!("wavelet={}", spec.wavelet.name());
    println!("mode={}", spec.mode.name());
    println!("width={}", m.width());
    println!("height={}", m.height());
    println!();
    Ok(())
}

fn parse_base_spec(text: &str) -> Result<(Family, Wavelet, bool), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let (f, w, edge) = match parts.as_slice() {
        [f, w] => (f, w, false),
        [f, w, e] if *e == "edge" => (f, w, true),
        _ => {
            return Err(CliError::Spec(format!(
                "spec `{text}` must be family:wavelet or family:wavelet:edge"
            )))
        }
    };
    let family: Family = f.parse().map_err(CliError::Lib)?;
    let wavelet: Wavelet = w.parse().map_err(CliError::Lib)?;
    Ok((family, wavelet, edge))
}

fn cmd_analyze(specs: &[String], gamma: f64, input: &Path) -> Result<(), CliError> {
    let m = pgm::read_mosaic(input)?;
    for text in specs {
        let (family, wavelet, _) = parse_base_spec(text)?;
        let plain = TransformSpec::new(family, wavelet, ArithmeticMode::Integer);
        let weighted = plain.with_edge_aware(true).with_gamma(gamma);
        let (sp, _) = forward(&m, &plain)?;
        let (sw, _) = forward(&m, &weighted)?;
        let ep = dg_energy(&sp);
        let ew = dg_energy(&sw);
        let improvement = if ep == 0.0 {
            0.0
        } else {
            100.0 * (ew - ep) / ep
        };
        println!("record=analyze");
        println!("input={}", input.display());
        println!("family={family}");
        println!("wavelet={}", wavelet.name());
        println!("gamma={gamma}");
        println!("dg_energy_plain={ep}");
        println!("dg_energy_edge={ew}");
        println!("improvement_pct={improvement}");
        println!();
    }
    Ok(())
}

fn cmd_rd(
    spec_text: &str,
    steps: &[f64],
    gamma: Option<f64>,
    input: &Path,
) -> Result<(), CliError> {
    let (family, wavelet, edge) = parse_base_spec(spec_text)?;
    let mut spec = TransformSpec::new(family, wavelet, ArithmeticMode::Real).with_edge_aware(edge);
    if let Some(g) = gamma {
        spec = spec.with_gamma(g);
    }
    let m = pgm::read_mosaic(input)?;
    for &step in steps {
        let run = quantized_roundtrip(&m, &spec, step)?;
        println!("record=rd");
        println!("input={}", input.display());
        println!("family={family}");
        println!("wavelet={}", wavelet.name());
        println!("edge_aware={edge}");
        println!("gamma={}", spec.gamma);
        println!("step={step}");
        print_rate(&run.report);
        println!("psnr={}", run.report.psnr.unwrap_or(f64::NAN));
        if edge {
            let div = weight_divergence(&run.encoder_log, &run.decoder_log)?;
            println!("weight_divergence={div}");
        }
        println!();
    }
    Ok(())
}

fn cmd_synth(
    kind: SynthKind,
    size: usize,
    bit_depth: u32,
    seed: u64,
    output: &Path,
) -> Result<(), CliError> {
    let m = synthesize(kind, size, bit_depth, seed)?;
    pgm::write_mosaic(output, &m)?;
    println!("record=synth");
    println!("kind={}", kind.name());
    println!("size={size}");
    println!("bit_depth={bit_depth}");
    println!("seed={seed}");
    println!("output={}", output.display());
    println!();
    Ok(())
}

fn catalog() -> Vec<TransformSpec> {
    let mut specs = Vec::new();
    for family in Family::ALL {
        for wavelet in Wavelet::ALL {
            for edge in [false, true] {
                specs.push(
                    TransformSpec::new(family, wavelet, ArithmeticMode::Integer)
                        .with_edge_aware(edge),
                );
            }
        }
    }
    specs
}

fn random_mosaic(rng: &mut ChaCha8Rng) -> BayerMosaic {
    let w = 2 * rng.gen_range(2..=16);
    let h = 2 * rng.gen_range(2..=16);
    let bd = rng.gen_range(8..=14);
    let max = (1u32 << bd) - 1;
    BayerMosaic::from_fn(w, h, bd, |_, _| rng.gen_range(0..=max) as u16).unwrap()
}

fn selftest() -> bool {
    let mut ok = true;
    let mut check = |name: &str, result: Result<(), String>| match result {
        Ok(()) => println!("selftest {name}: ok"),
        Err(msg) => {
            ok = false;
            println!("selftest {name}: FAIL ({msg})");
        }
    };

    check("round-trip", {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut r = Ok(());
        'outer: for spec in catalog() {
            for _ in 0..4 {
                let m = random_mosaic(&mut rng);
                let restored = forward(&m, &spec)
                    .and_then(|(s, _)| inverse(&s, &spec))
                    .map_err(|e| e.to_string());
                match restored {
                    Ok(back) if back == m => {}
                    Ok(_) => {
                        r = Err(format!("{} round trip not bit-exact", spec.label()));
                        break 'outer;
                    }
                    Err(e) => {
                        r = Err(e);
                        break 'outer;
                    }
                }
            }
        }
        r
    });

    check("stt-equivalence", {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Integer);
        let mut r = Ok(());
        for _ in 0..10 {
            let m = random_mosaic(&mut rng);
            let (s, _) = forward(&m, &spec).unwrap();
            let d = stt_forward_direct(&m);
            if s.planes() != d.planes() {
                r = Err("type-I 5/3 differs from direct Star-Tetrix".into());
                break;
            }
        }
        r
    });

    check("dc-matrices", {
        let expect = [
            [0.25, 0.25, 0.25, 0.25],
            [-1.0, 1.0, 0.0, 0.0],
            [-0.5, -0.5, 1.0, 0.0],
            [-0.5, -0.5, 0.0, 1.0],
        ];
        let mut r = Ok(());
        for family in [Family::XsttI, Family::XsttII, Family::YDgCbCr] {
            let spec = TransformSpec::new(family, Wavelet::Haar, ArithmeticMode::Integer);
            let m = dc_matrix(&spec).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if (m[i][j] - expect[i][j]).abs() > 1e-12 {
                        r = Err(format!("{family} Haar DC matrix row {i} col {j}"));
                    }
                }
            }
        }
        r
    });

    check("weight-neutrality", {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut r = Ok(());
        'outer: for _ in 0..3 {
            let m = random_mosaic(&mut rng);
            for family in Family::ALL {
                let plain =
                    TransformSpec::new(family, Wavelet::FiveThree, ArithmeticMode::Integer);
                let weighted = plain.with_edge_aware(true).with_gamma(0.0);
                let (a, _) = forward(&m, &plain).unwrap();
                let (b, _) = forward(&m, &weighted).unwrap();
                if a.planes() != b.planes() {
                    r = Err(format!("{family}: gamma=0 output differs"));
                    break 'outer;
                }
            }
        }
        r
    });

    ok
}
