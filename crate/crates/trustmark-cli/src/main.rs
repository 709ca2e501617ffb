//! Command-line driver for every role in the trust-marking lifecycle:
//! parameter ceremony, key generation, ring publication, token issuance and
//! revocation, submitter checks, chain embedding and extraction on the
//! simulated ledger, auditor opening and judging, benchmarks, and scripted
//! end-to-end runs.
//!
//! Exit codes: 0 success, 2 validation abort (the failing submitter step is
//! printed), 3 cryptographic failure, 4 missing data.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use trustmark::ars::{okgen, ukgen, AdmitterKeypair, AuditorKeypair, OpenProof, Ring};
use trustmark::crs::{self, aggregate_transcript, read_transcript, PublicParams, TranscriptEntry};
use trustmark::embed::{
    encode_token, estimate_fee, extract, link_and_submit, plan_case1, plan_case2, ChainProfile,
    ChunkPlan, EmbedMode, FeeModel, StorageKind, StorageRef,
};
use trustmark::error::Error as TmError;
use trustmark::group::GroupElement;
use trustmark::scenario::{e2e_scenario, ScenarioScript};
use trustmark::sim::{SimLedger, SimStorage};
use trustmark::token::{
    audit_judge, audit_open, issue_token, revoke_token, submitter_check, verify_revocation,
    AdmitterRegistry, ChainId, CheckOutcome, LinkSecret, TargetAddress, Token, TrustFlag,
};

#[derive(Parser)]
#[command(name = "trustmark", version, about = "Anonymous trust-marking toolkit")]
struct Cli {
    /// JSON config with ring shape, fee constants, and the registry path.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-party generation of trusted elements.
    Ceremony {
        #[command(subcommand)]
        action: CeremonyAction,
    },
    /// Generate admitter or auditor keys and register them.
    Keygen {
        #[command(subcommand)]
        role: KeygenRole,
    },
    /// Ring management.
    Ring {
        #[command(subcommand)]
        action: RingAction,
    },
    /// Issue a trust or untrust token.
    Issue(IssueArgs),
    /// Revoke a previously issued token.
    Revoke(RevokeArgs),
    /// Run the submitter checks on a token.
    Check(CheckArgs),
    /// Plan and submit a token to the simulated ledger.
    Embed(EmbedArgs),
    /// Recover a token from the simulated ledger.
    Extract(ExtractArgs),
    /// Open a token as its designated auditor.
    Open(OpenArgs),
    /// Judge an auditor's opening claim.
    Judge(JudgeArgs),
    /// Time the signature and commitment operations.
    Bench {
        #[arg(long, default_value_t = 30)]
        iterations: usize,
        /// Also dump the reports as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the scripted end-to-end lifecycle.
    E2e(E2eArgs),
}

#[derive(Subcommand)]
enum CeremonyAction {
    /// Produce a contribution for a labeled element; the secret exponent is
    /// discarded after the proof is formed.
    Contribute {
        #[arg(long)]
        label: String,
        #[arg(long, default_value = "anonymous")]
        contributor: String,
        /// Append to this JSON-lines transcript file.
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Verify every entry of a ceremony transcript.
    Verify {
        #[arg(long)]
        transcript: PathBuf,
        /// Restrict to one label.
        #[arg(long)]
        label: Option<String>,
    },
    /// Verify and fold all shares for a label.
    Aggregate {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        label: String,
    },
}

#[derive(Subcommand)]
enum KeygenRole {
    Admitter {
        #[arg(long)]
        out: PathBuf,
    },
    Auditor {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RingAction {
    /// Publish a ring of registered admitter keys; prints the ring id.
    Publish {
        /// Comma-separated hex public keys.
        #[arg(long, value_delimiter = ',')]
        members: Vec<String>,
    },
}

#[derive(Args)]
struct IssueArgs {
    /// Admitter key file (from `keygen admitter`).
    #[arg(long)]
    key: PathBuf,
    /// Ring id (hex) of a published ring containing the admitter.
    #[arg(long)]
    ring_id: String,
    /// Designated auditor public key (hex).
    #[arg(long)]
    auditor: String,
    #[arg(long, value_enum)]
    chain: ChainArg,
    /// Target address bytes, hex.
    #[arg(long)]
    address: String,
    #[arg(long, value_enum)]
    flag: FlagArg,
    /// Expiry, unix seconds.
    #[arg(long)]
    expiry: u64,
    /// Clock override, unix seconds (defaults to system time).
    #[arg(long)]
    now: Option<u64>,
    #[arg(long, default_value = "")]
    note: String,
    /// Output token file (binary).
    #[arg(long)]
    out: PathBuf,
    /// Where to store the linking secret needed for revocation.
    #[arg(long)]
    link_out: PathBuf,
    /// Seed the signing randomness for reproducible output.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the token as hex instead of raw bytes.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct RevokeArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    ring_id: String,
    #[arg(long)]
    auditor: String,
    #[arg(long, value_enum)]
    chain: ChainArg,
    #[arg(long)]
    address: String,
    #[arg(long, value_enum)]
    flag: FlagArg,
    /// Linking secret from the original issuance.
    #[arg(long)]
    link: PathBuf,
    /// Txid (hex) of the transaction carrying the original token.
    #[arg(long)]
    orig_txid: String,
    #[arg(long)]
    expiry: u64,
    #[arg(long)]
    now: Option<u64>,
    #[arg(long, default_value = "")]
    note: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the token as hex instead of raw bytes.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    token: PathBuf,
    #[arg(long)]
    now: Option<u64>,
    /// For revocations: the original token to verify the link against.
    #[arg(long)]
    original: Option<PathBuf>,
    /// Txid (hex) of the transaction carrying the original token.
    #[arg(long)]
    original_txid: Option<String>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    token: PathBuf,
    #[arg(long, value_enum)]
    chain: ChainArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "url")]
    storage_kind: StorageKindArg,
    /// Ledger state file; created if absent.
    #[arg(long)]
    ledger: PathBuf,
    /// Storage state file; created if absent (case2 only).
    #[arg(long)]
    storage: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    txid: String,
    #[arg(long)]
    ledger: PathBuf,
    #[arg(long)]
    storage: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Write the token as hex instead of raw bytes.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct OpenArgs {
    #[arg(long)]
    token: PathBuf,
    /// Auditor key file (from `keygen auditor`).
    #[arg(long)]
    auditor_key: PathBuf,
    #[arg(long)]
    proof_out: PathBuf,
}

#[derive(Args)]
struct JudgeArgs {
    #[arg(long)]
    token: PathBuf,
    /// Opening proof file (from `open`).
    #[arg(long)]
    proof: PathBuf,
}

#[derive(Args)]
struct E2eArgs {
    #[arg(long, value_enum)]
    chain: ChainArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "url")]
    storage_kind: StorageKindArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the transcript JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainArg {
    Btc,
    Eth,
    Nem,
}

impl From<ChainArg> for ChainId {
    fn from(c: ChainArg) -> ChainId {
        match c {
            ChainArg::Btc => ChainId::Btc,
            ChainArg::Eth => ChainId::Eth,
            ChainArg::Nem => ChainId::Nem,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FlagArg {
    Trust,
    Untrust,
}

impl From<FlagArg> for TrustFlag {
    fn from(f: FlagArg) -> TrustFlag {
        match f {
            FlagArg::Trust => TrustFlag::Trust,
            FlagArg::Untrust => TrustFlag::Untrust,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Case1,
    Case2,
}

impl From<ModeArg> for EmbedMode {
    fn from(m: ModeArg) -> EmbedMode {
        match m {
            ModeArg::Case1 => EmbedMode::Case1Full,
            ModeArg::Case2 => EmbedMode::Case2Digest,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StorageKindArg {
    Url,
    Ipfs,
}

impl From<StorageKindArg> for StorageKind {
    fn from(k: StorageKindArg) -> StorageKind {
        match k {
            StorageKindArg::Url => StorageKind::Url,
            StorageKindArg::Ipfs => StorageKind::IpfsPath,
        }
    }
}

/// Tool configuration: ring shape, fee constants, registry location.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
struct Config {
    n: usize,
    m: usize,
    /// Reference BTC remittance per confirmed transaction.
    btc_per_tx: f64,
    registry: PathBuf,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            n: 4,
            m: 2,
            btc_per_tx: 0.002,
            registry: PathBuf::from("registry.json"),
        }
    }
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Config> {
        match path {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                Ok(serde_json::from_str(&text)?)
            }
            None => Ok(Config::default()),
        }
    }

    fn params(&self) -> Result<PublicParams> {
        Ok(PublicParams::derive_deterministic(self.n, self.m)?)
    }

    fn profile(&self, chain: ChainId) -> ChainProfile {
        let mut profile = ChainProfile::default_for(chain);
        if let FeeModel::Btc { sat_per_tx } = &mut profile.fee {
            *sat_per_tx = (self.btc_per_tx * 1e8).round() as u64;
        }
        profile
    }

    fn registry(&self) -> Result<AdmitterRegistry> {
        if self.registry.exists() {
            let text = fs::read_to_string(&self.registry)?;
            Ok(AdmitterRegistry::from_json(&text)?)
        } else {
            Ok(AdmitterRegistry::default())
        }
    }

    fn save_registry(&self, registry: &AdmitterRegistry) -> Result<()> {
        fs::write(&self.registry, registry.to_json()?)?;
        Ok(())
    }
}

fn system_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => {
            let mut buf = [0u8; 32];
            rand::thread_rng().fill_bytes(&mut buf);
            ChaCha20Rng::from_seed(buf)
        }
    }
}

/// Reads a token file, accepting either raw bytes or their hex rendering.
fn read_token(path: &Path, pp: &PublicParams) -> Result<Token> {
    let bytes = fs::read(path).with_context(|| format!("reading token {}", path.display()))?;
    if let Ok(text) = std::str::from_utf8(&bytes) {
        if let Ok(decoded) = hex::decode(text.trim()) {
            if let Ok(token) = trustmark::embed::decode_token(&decoded, pp.n, pp.m) {
                return Ok(token);
            }
        }
    }
    Ok(trustmark::embed::decode_token(&bytes, pp.n, pp.m)?)
}

fn write_token_file(path: &Path, bytes: &[u8], as_hex: bool) -> Result<()> {
    if as_hex {
        fs::write(path, hex::encode(bytes))?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn parse_hex32(s: &str, what: &str) -> Result<[u8; 32]> {
    let bytes = hex::decode(s.trim()).with_context(|| format!("{what} is not hex"))?;
    bytes
        .try_into()
        .map_err(|_| anyhow!("{what} must be 32 bytes"))
}

fn resolve_ring(registry: &AdmitterRegistry, ring_id_hex: &str) -> Result<Ring> {
    let ring_id = parse_hex32(ring_id_hex, "ring id")?;
    registry
        .ring_by_id(&ring_id)
        .ok_or_else(|| anyhow!("ring {ring_id_hex} is not published in the registry"))
}

/// Exit code classes: validation 2, crypto 3, missing data 4.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(tm) = err.downcast_ref::<TmError>() {
        return match tm {
            TmError::Usage(_) | TmError::Encoding(_) | TmError::Io(_) => 2,
            TmError::MissingTx(_) | TmError::MissingStorage(_) => 4,
            TmError::DigestMismatch(_) => 3,
            TmError::LedgerRejected { .. } => 2,
        };
    }
    2
}

/// Failure that must map to the crypto exit code.
#[derive(Debug)]
struct CryptoFailure(String);

impl std::fmt::Display for CryptoFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CryptoFailure {}

/// Validation abort carrying the failing submitter step.
#[derive(Debug)]
struct ValidationAbort(String);

impl std::fmt::Display for ValidationAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ValidationAbort {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.downcast_ref::<CryptoFailure>().is_some() {
                3
            } else if err.downcast_ref::<ValidationAbort>().is_some() {
                2
            } else {
                classify(&err)
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ceremony { action } => ceremony(action),
        Command::Keygen { role } => keygen(&config, role),
        Command::Ring { action } => ring(&config, action),
        Command::Issue(args) => issue(&config, args),
        Command::Revoke(args) => revoke(&config, args),
        Command::Check(args) => check(&config, args),
        Command::Embed(args) => embed(&config, args),
        Command::Extract(args) => extract_cmd(&config, args),
        Command::Open(args) => open_cmd(&config, args),
        Command::Judge(args) => judge_cmd(&config, args),
        Command::Bench { iterations, json } => bench_cmd(&config, iterations, json),
        Command::E2e(args) => e2e_cmd(args),
    }
}

fn ceremony(action: CeremonyAction) -> Result<()> {
    match action {
        CeremonyAction::Contribute {
            label,
            contributor,
            transcript,
        } => {
            let mut rng = rng_from(None);
            let (contribution, _secret) = crs::contribute(label.as_bytes(), &mut rng)?;
            let entry = TranscriptEntry::new(&label, &contribution, &contributor);
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(&transcript)
                .with_context(|| format!("opening transcript {}", transcript.display()))?;
            crs::append_transcript_entry(&mut file, &entry)?;
            println!("contributed share {}", contribution.share.to_hex());
            Ok(())
        }
        CeremonyAction::Verify { transcript, label } => {
            let file = fs::File::open(&transcript)
                .with_context(|| format!("opening transcript {}", transcript.display()))?;
            let entries = read_transcript(std::io::BufReader::new(file))?;
            let mut checked = 0usize;
            for entry in &entries {
                if let Some(wanted) = &label {
                    if &entry.label != wanted {
                        continue;
                    }
                }
                let contribution = entry.contribution()?;
                if !crs::verify_contribution(entry.label.as_bytes(), &contribution) {
                    bail!(CryptoFailure(format!(
                        "contribution by {} for label {} failed verification",
                        entry.contributor_id, entry.label
                    )));
                }
                checked += 1;
            }
            println!("verified {checked} contributions");
            Ok(())
        }
        CeremonyAction::Aggregate { transcript, label } => {
            let file = fs::File::open(&transcript)
                .with_context(|| format!("opening transcript {}", transcript.display()))?;
            let entries = read_transcript(std::io::BufReader::new(file))?;
            let element = aggregate_transcript(&entries, &label)?;
            println!("{}", element.to_hex());
            Ok(())
        }
    }
}

fn keygen(config: &Config, role: KeygenRole) -> Result<()> {
    let pp = config.params()?;
    let mut rng = rng_from(None);
    let mut registry = config.registry()?;
    match role {
        KeygenRole::Admitter { out } => {
            let keypair: AdmitterKeypair = ukgen(&pp, &mut rng);
            fs::write(&out, serde_json::to_string_pretty(&keypair)?)?;
            registry.register_admitter(keypair.pk);
            config.save_registry(&registry)?;
            println!("{}", keypair.pk.to_hex());
        }
        KeygenRole::Auditor { out } => {
            let keypair: AuditorKeypair = okgen(&pp, &mut rng);
            fs::write(&out, serde_json::to_string_pretty(&keypair)?)?;
            registry.register_auditor(keypair.opk);
            config.save_registry(&registry)?;
            println!("{}", keypair.opk.to_hex());
        }
    }
    Ok(())
}

fn ring(config: &Config, action: RingAction) -> Result<()> {
    match action {
        RingAction::Publish { members } => {
            if members.is_empty() {
                bail!("ring needs at least one member");
            }
            let keys = members
                .iter()
                .map(|hex| GroupElement::from_hex(hex.trim()).map_err(|e| anyhow!("{e}")))
                .collect::<Result<Vec<_>>>()?;
            let ring = Ring::new(keys)?;
            let mut registry = config.registry()?;
            let ring_id = registry.publish_ring(&ring)?;
            config.save_registry(&registry)?;
            println!("{}", hex::encode(ring_id));
            Ok(())
        }
    }
}

fn issue(config: &Config, args: IssueArgs) -> Result<()> {
    let pp = config.params()?;
    let registry = config.registry()?;
    let key: AdmitterKeypair = serde_json::from_str(&fs::read_to_string(&args.key)?)?;
    let ring = resolve_ring(&registry, &args.ring_id)?;
    let auditor_pk = GroupElement::from_hex(&args.auditor).map_err(|e| anyhow!("{e}"))?;
    let address = hex::decode(args.address.trim()).context("address is not hex")?;
    let now = args.now.unwrap_or_else(system_now);
    let mut rng = rng_from(args.seed);
    let (token, link) = issue_token(
        &pp,
        &pp.commit_key(),
        &key,
        &ring,
        &auditor_pk,
        TargetAddress {
            chain: args.chain.into(),
            bytes: address,
        },
        args.flag.into(),
        args.expiry,
        &args.note,
        now,
        &mut rng,
    )?;
    write_token_file(&args.out, &encode_token(&token), args.hex)?;
    fs::write(&args.link_out, serde_json::to_string_pretty(&link)?)?;
    println!(
        "issued token ({} bytes) over ring {}",
        encode_token(&token).len(),
        hex::encode(token.ring_id)
    );
    Ok(())
}

fn revoke(config: &Config, args: RevokeArgs) -> Result<()> {
    let pp = config.params()?;
    let registry = config.registry()?;
    let key: AdmitterKeypair = serde_json::from_str(&fs::read_to_string(&args.key)?)?;
    let ring = resolve_ring(&registry, &args.ring_id)?;
    let auditor_pk = GroupElement::from_hex(&args.auditor).map_err(|e| anyhow!("{e}"))?;
    let address = hex::decode(args.address.trim()).context("address is not hex")?;
    let link: LinkSecret = serde_json::from_str(&fs::read_to_string(&args.link)?)?;
    let orig_txid = parse_hex32(&args.orig_txid, "orig txid")?;
    let now = args.now.unwrap_or_else(system_now);
    let mut rng = rng_from(args.seed);
    let token = revoke_token(
        &pp,
        &key,
        &ring,
        &auditor_pk,
        TargetAddress {
            chain: args.chain.into(),
            bytes: address,
        },
        args.flag.into(),
        &link,
        orig_txid,
        args.expiry,
        &args.note,
        now,
        &mut rng,
    )?;
    write_token_file(&args.out, &encode_token(&token), args.hex)?;
    println!(
        "revocation token written ({} bytes)",
        encode_token(&token).len()
    );
    Ok(())
}

fn check(config: &Config, args: CheckArgs) -> Result<()> {
    let pp = config.params()?;
    let registry = config.registry()?;
    let token = read_token(&args.token, &pp)?;
    let now = args.now.unwrap_or_else(system_now);
    match submitter_check(&pp, &token, &registry, now) {
        CheckOutcome::Accept => println!("ACCEPT"),
        CheckOutcome::Abort { step, reason } => {
            println!("ABORT step {step}: {reason}");
            bail!(ValidationAbort(format!("submitter step {step} failed")));
        }
    }
    if let Some(original_path) = &args.original {
        let original = read_token(original_path, &pp)?;
        let txid_hex = args
            .original_txid
            .as_deref()
            .ok_or_else(|| anyhow!("--original requires --original-txid"))?;
        let orig_txid = parse_hex32(txid_hex, "original txid")?;
        let ring = registry
            .ring_by_id(&token.ring_id)
            .ok_or_else(|| anyhow!("revocation ring not published"))?;
        let linked = verify_revocation(&pp, &pp.commit_key(), &token, &ring, &original, &orig_txid);
        println!("revocation link: {}", if linked { "1" } else { "0" });
        if !linked {
            bail!(CryptoFailure("revocation link did not verify".into()));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PlanReport<'a> {
    chain: &'a str,
    mode: EmbedMode,
    chunks: Vec<usize>,
    fee_quote: String,
    head_txid: String,
    storage_ref: Option<String>,
}

fn embed(config: &Config, args: EmbedArgs) -> Result<()> {
    let pp = config.params()?;
    let chain: ChainId = args.chain.into();
    let profile = config.profile(chain);
    let token = read_token(&args.token, &pp)?;
    let token_bytes = encode_token(&token);

    let mut ledger = if args.ledger.exists() {
        SimLedger::from_json(&fs::read_to_string(&args.ledger)?)?
    } else {
        SimLedger::new(profile.clone())
    };
    if ledger.profile.chain != chain {
        bail!(
            "ledger {} belongs to chain {}",
            args.ledger.display(),
            ledger.profile.chain.name()
        );
    }

    let (plan, storage_ref): (ChunkPlan, Option<StorageRef>) = match args.mode {
        ModeArg::Case1 => (plan_case1(&token_bytes, &profile)?, None),
        ModeArg::Case2 => {
            let storage_path = args
                .storage
                .as_ref()
                .ok_or_else(|| anyhow!("case2 requires --storage"))?;
            let mut storage = if storage_path.exists() {
                SimStorage::from_json(&fs::read_to_string(storage_path)?)?
            } else {
                SimStorage::new()
            };
            let reference = storage.put(&token_bytes, args.storage_kind.into());
            fs::write(storage_path, storage.to_json()?)?;
            (
                plan_case2(&token_bytes, &reference, &profile)?,
                Some(reference),
            )
        }
    };

    let fee = estimate_fee(&profile, &plan.chunks);
    let head = link_and_submit(&plan, &mut ledger)?;
    fs::write(&args.ledger, ledger.to_json()?)?;

    let report = PlanReport {
        chain: chain.name(),
        mode: plan.mode,
        chunks: plan.chunk_sizes(),
        fee_quote: fee.describe(),
        head_txid: hex::encode(head),
        storage_ref: storage_ref.map(|r| r.rendered()),
    };
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn extract_cmd(config: &Config, args: ExtractArgs) -> Result<()> {
    let pp = config.params()?;
    let txid = parse_hex32(&args.txid, "txid")?;
    let ledger = SimLedger::from_json(&fs::read_to_string(&args.ledger)?)?;
    let storage = match &args.storage {
        Some(path) if path.exists() => Some(SimStorage::from_json(&fs::read_to_string(path)?)?),
        _ => None,
    };
    let token = extract(&txid, &ledger, storage.as_ref(), pp.n, pp.m)?;
    write_token_file(&args.out, &encode_token(&token), args.hex)?;
    println!(
        "extracted token for {} address {}",
        token.msg.target.chain.name(),
        hex::encode(&token.msg.target.bytes)
    );
    Ok(())
}

fn open_cmd(config: &Config, args: OpenArgs) -> Result<()> {
    let pp = config.params()?;
    let registry = config.registry()?;
    let token = read_token(&args.token, &pp)?;
    let auditor: AuditorKeypair = serde_json::from_str(&fs::read_to_string(&args.auditor_key)?)?;
    let ring = registry
        .ring_by_id(&token.ring_id)
        .ok_or_else(|| anyhow!("token ring not published"))?;
    match audit_open(&pp, &token, &ring, &auditor.osk) {
        Some((pk, proof)) => {
            fs::write(&args.proof_out, hex::encode(proof.to_bytes()))?;
            println!("{}", pk.to_hex());
            Ok(())
        }
        None => bail!(CryptoFailure(
            "opening returned bottom: invalid token or non-designated auditor".into()
        )),
    }
}

fn judge_cmd(config: &Config, args: JudgeArgs) -> Result<()> {
    let pp = config.params()?;
    let registry = config.registry()?;
    let token = read_token(&args.token, &pp)?;
    let proof_hex = fs::read_to_string(&args.proof)?;
    let proof_bytes = hex::decode(proof_hex.trim()).context("proof is not hex")?;
    let proof = OpenProof::from_bytes(&proof_bytes)?;
    let ring = registry
        .ring_by_id(&token.ring_id)
        .ok_or_else(|| anyhow!("token ring not published"))?;
    let claimed = proof.signer_pk;
    if audit_judge(&pp, &token, &ring, &claimed, &proof) {
        println!("1");
        Ok(())
    } else {
        println!("0");
        bail!(CryptoFailure("judge rejected the opening claim".into()));
    }
}

fn bench_cmd(config: &Config, iterations: usize, json: bool) -> Result<()> {
    let pp = config.params()?;
    let reports = trustmark::bench::run_bench(&pp, iterations)?;
    for report in &reports {
        println!(
            "{:<20} mean {:>9.4} ms  median {:>9.4} ms  ({} iterations{})",
            report.op,
            report.mean_ms,
            report.median_ms,
            report.iterations,
            report
                .serialized_bytes
                .map(|b| format!(", {b} bytes"))
                .unwrap_or_default()
        );
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    }
    Ok(())
}

fn e2e_cmd(args: E2eArgs) -> Result<()> {
    let chain: ChainId = args.chain.into();
    let script = match args.mode {
        ModeArg::Case1 => ScenarioScript::case1(chain, args.seed),
        ModeArg::Case2 => ScenarioScript::case2(chain, args.storage_kind.into(), args.seed),
    };
    let transcript = e2e_scenario(&script)?;
    for step in &transcript.steps {
        let summary: Vec<String> = step
            .artifacts
            .iter()
            .map(|(k, v)| {
                if v.len() > 16 {
                    format!("{k}={}..", &v[..16])
                } else {
                    format!("{k}={v}")
                }
            })
            .collect();
        println!("{:<16} {}", step.name, summary.join(" "));
    }
    if let Some(out) = args.out {
        fs::write(&out, transcript.to_json()?)?;
        println!("transcript written to {}", out.display());
    }
    Ok(())
}
