use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use selenc::aes::Nonce;
use selenc::harness::oracle_suite;
use selenc::pipeline::{
    cmd_bench, cmd_decrypt, cmd_encrypt, cmd_gen_test, cmd_inspect, estimate_passphrase_bits, DecryptRequest,
    EncryptRequest, GeneratorConfig, KeySource, PipelineError, StreamReport, DEFAULT_KDF_ITERATIONS, DEFAULT_PAYLOAD,
};
use selenc::selective::EncryptionPolicy;

/// Selective AES-128-CTR encryption of H.264 Annex B key-frame slices.
#[derive(Parser)]
#[command(name = "selenc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt the selected slices, writing the stream and a sidecar.
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value = "idr")]
        policy: EncryptionPolicy,
        /// 16 hex characters; random when omitted.
        #[arg(long, value_parser = parse_nonce)]
        nonce: Option<Nonce>,
    },
    /// Undo `encrypt` using its sidecar.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        key: KeyArgs,
    },
    /// Print one row per NAL unit.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic stream.
    GenTest {
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        gop: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        frames: u32,
        /// Slice RBSP size in bytes.
        #[arg(long, default_value_t = DEFAULT_PAYLOAD)]
        payload: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare selective and whole-stream encryption work.
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value = "idr")]
        policy: EncryptionPolicy,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct KeyArgs {
    /// 32 hex characters.
    #[arg(long, required_unless_present = "passphrase", conflicts_with = "passphrase")]
    key: Option<String>,
    #[arg(long)]
    passphrase: Option<String>,
    /// Passphrase stretching rounds [default: 10000].
    #[arg(long, requires = "passphrase", conflicts_with = "key")]
    kdf_iters: Option<u32>,
}

impl KeyArgs {
    fn source(self) -> KeySource {
        match (self.key, self.passphrase) {
            (Some(k), _) => KeySource::RawKey(k),
            (None, Some(text)) => {
                let est = estimate_passphrase_bits(&text);
                if est.weak {
                    eprintln!(
                        "warning: passphrase carries about {:.0} bits of entropy, well short of a 128-bit key",
                        est.bits
                    );
                }
                KeySource::Passphrase { text, iterations: self.kdf_iters.unwrap_or(DEFAULT_KDF_ITERATIONS) }
            }
            (None, None) => unreachable!("clap enforces one key argument"),
        }
    }
}

fn parse_nonce(s: &str) -> Result<Nonce, String> {
    let bytes = hex::decode(s).map_err(|e| e.to_string())?;
    let arr: [u8; 8] = bytes.try_into().map_err(|_| "nonce must be 16 hex characters".to_string())?;
    Ok(Nonce(arr))
}

fn summary(report: &StreamReport) -> String {
    format!(
        "{} NAL units, {} of {} slice payload bytes encrypted ({:.2}%), size change {:+} bytes",
        report.nal_count,
        report.selected_bytes,
        report.vcl_payload_bytes,
        100.0 * report.encrypted_fraction,
        report.size_delta.unwrap_or(0)
    )
}

fn run(cli: Cli) -> Result<bool, PipelineError> {
    match cli.command {
        Command::Encrypt { input, output, meta, key, policy, nonce } => {
            let report = cmd_encrypt(&EncryptRequest { input, output, meta, key: key.source(), policy, nonce })?;
            println!("{}", summary(&report));
        }
        Command::Decrypt { input, meta, output, key } => {
            let report = cmd_decrypt(&DecryptRequest { input, meta, output, key: key.source() })?;
            println!("{} NAL units restored", report.nal_count);
        }
        Command::Inspect { input, json } => {
            let report = cmd_inspect(&input)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_table());
            }
        }
        Command::GenTest { output, gop, frames, payload, seed } => {
            let data = cmd_gen_test(&output, &GeneratorConfig { gop, frames, payload_size: payload, seed })?;
            println!("wrote {} bytes to {}", data.len(), output.display());
        }
        Command::Bench { input, key, policy, json } => {
            let result = cmd_bench(&input, &key.source(), policy)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
            } else {
                print!("{}", result.to_text());
            }
        }
        Command::Selftest { seed } => {
            let report = oracle_suite(seed);
            print!("{}", report.to_text());
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("selenc: {e}");
            ExitCode::FAILURE
        }
    }
}
