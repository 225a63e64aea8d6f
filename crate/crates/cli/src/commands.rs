use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use listedit::codec::{
    apply_edits, derive_params, overall_rate, random_edit_script, ConcatCode, ConcatParams, DecodeReport,
    EditScript,
};
use listedit::edit_metric::{self, check_ball_size_bound, EditBallQuery};
use listedit::inner_code::capacity_experiment;
use listedit::outer_code::{OuterCode, OuterCodeSpec, RecoveryInput};
use listedit::pseudorandom::{exhaustive_outputs, measure_bias, xor_lemma_check_outputs, BiasedGeneratorSpec};
use listedit::sync::{
    derandomized_search, sample_sync, verify_sync_with, ConditionKind, SampleOutcome, SearchOutcome, SmallBiasSource,
    Strategy, SyncParams, SyncSequence, SyncStatus, SyncViolation, ViolationTallies,
};
use listedit::{rational, BitVector, Error, Rational};
use serde::{Deserialize, Serialize};

use crate::files::{emit, print_lines, read_bits, read_json, read_text, write_bits, write_json};
use crate::{Output, EXIT_CAP, EXIT_PRECONDITION, EXIT_REFUTED};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn precondition(error: anyhow::Error) -> Self {
        Failure { code: EXIT_PRECONDITION, error }
    }

    fn cap(error: anyhow::Error) -> Self {
        Failure { code: EXIT_CAP, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.chain().find_map(|e| e.downcast_ref::<Error>()) {
            Some(Error::CapExceeded { .. } | Error::ListOverflow { .. }) => EXIT_CAP,
            _ => EXIT_PRECONDITION,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn parse_bits(s: &str) -> Result<BitVector, String> {
    s.parse::<BitVector>().map_err(|e| e.to_string())
}

fn check_cap(what: &str, required: u128, cap: u128) -> Outcome {
    if required > cap {
        return Err(Failure::cap(anyhow!("{what} needs about {required} steps, cap is {cap}")));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct BallEnumerateArgs {
    #[arg(long, required = true, value_parser = parse_bits)]
    center: Option<BitVector>,
    #[arg(long, required = true)]
    radius: Option<usize>,
    /// Keep only members of this length.
    #[arg(long = "len", alias = "length")]
    length: Option<usize>,
    /// Maximum number of strings visited.
    #[arg(long, required = true)]
    cap: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize)]
struct BallOutput {
    center: BitVector,
    radius: usize,
    length: Option<usize>,
    size: usize,
    members: Vec<BitVector>,
}

pub fn ball_enumerate(args: BallEnumerateArgs) -> Outcome {
    let (Some(center), Some(radius), Some(cap)) = (args.center, args.radius, args.cap) else {
        return Err(Failure::precondition(anyhow!("ball needs --center, --radius and --cap")));
    };
    let mut q = EditBallQuery::new(center.clone(), radius);
    if let Some(n) = args.length {
        q = q.with_length(n);
    }
    let members = edit_metric::ball_enumerate(&q, cap)?;
    let out = BallOutput {
        center,
        radius,
        length: args.length,
        size: members.len(),
        members: members.into_iter().collect(),
    };
    match args.output.out.as_deref() {
        Some(p) => write_json(p, &out)?,
        None => print_lines(&out.members)?,
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct BallBoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_rational)]
    delta: Rational,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Largest string length swept exhaustively per center.
    #[arg(long)]
    max_len: usize,
    #[command(flatten)]
    output: Output,
}

pub fn ball_bound(args: BallBoundArgs) -> Outcome {
    check_cap("exhaustive ball count", args.n as u128, args.max_len as u128)?;
    let report = check_ball_size_bound(args.n, &args.delta, args.trials, args.seed)?;
    Ok(emit(args.output.out.as_deref(), &report)?)
}

#[derive(Args, Debug)]
pub struct BiasArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_rational)]
    eps: Rational,
    /// Sweep every seed and measure the bias exactly.
    #[arg(long, requires = "max_seed_bits")]
    exhaustive: bool,
    /// Also check the XOR-lemma distance bound (n <= 12).
    #[arg(long, requires = "exhaustive")]
    xor: bool,
    /// Largest seed length swept exhaustively.
    #[arg(long)]
    max_seed_bits: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize)]
struct BiasOutput {
    output_len: usize,
    #[serde(with = "rational::serde_str")]
    epsilon: Rational,
    seed_len: u64,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    bias: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xor_lemma: Option<listedit::pseudorandom::XorLemmaReport>,
}

pub fn bias(args: BiasArgs) -> Outcome {
    let spec = BiasedGeneratorSpec::new(args.n, args.eps)?;
    let mut out =
        BiasOutput { output_len: args.n, epsilon: args.eps, seed_len: spec.seed_len(), bias: None, pass: None, xor_lemma: None };
    if let (true, Some(cap)) = (args.exhaustive, args.max_seed_bits) {
        check_cap("seed sweep (bits)", spec.seed_len() as u128, cap as u128)?;
        let outputs = exhaustive_outputs(&spec)?;
        let bias = measure_bias(&outputs)?;
        let xor_lemma = args.xor.then(|| xor_lemma_check_outputs(&outputs)).transpose()?;
        out.pass = Some(bias <= args.eps && xor_lemma.as_ref().is_none_or(|x| x.pass));
        out.bias = Some(bias);
        out.xor_lemma = xor_lemma;
    }
    Ok(emit(args.output.out.as_deref(), &out)?)
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Sync parameters (JSON).
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    retries: usize,
    /// Verification work cap per attempt.
    #[arg(long)]
    cap: u128,
    /// Sequence file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SampleSummary {
    found: bool,
    seed: u64,
    attempts: usize,
    tallies: ViolationTallies,
    #[serde(skip_serializing_if = "Option::is_none")]
    hash: Option<String>,
}

pub fn sync_sample(args: SampleArgs) -> Outcome {
    let params: SyncParams = read_json(&args.params)?;
    match sample_sync(&params, args.seed, args.retries, args.cap)? {
        SampleOutcome::Found { sequence, attempts, tallies } => {
            std::fs::write(&args.out, sequence.to_json() + "\n").context("writing sequence")?;
            let summary = SampleSummary { found: true, seed: args.seed, attempts, tallies, hash: Some(sequence.hash()) };
            Ok(emit(None, &summary)?)
        }
        SampleOutcome::Failed { attempts, tallies } => {
            let summary = SampleSummary { found: false, seed: args.seed, attempts, tallies, hash: None };
            emit(None, &summary)?;
            Err(Failure::cap(anyhow!("no sync sequence within {attempts} attempts")))
        }
    }
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    params: PathBuf,
    /// Bias of the generator feeding the matrices.
    #[arg(long, value_parser = parse_rational)]
    eps: Rational,
    #[arg(long)]
    max_seed_bits: usize,
    #[arg(long)]
    cap: u128,
    #[arg(long)]
    out: PathBuf,
}

pub fn sync_search(args: SearchArgs) -> Outcome {
    let params: SyncParams = read_json(&args.params)?;
    let generator = BiasedGeneratorSpec::new(params.a * params.b, args.eps)?;
    let source = SmallBiasSource::new(&params, generator)?;
    match derandomized_search(&params, &source, args.max_seed_bits, args.cap)? {
        SearchOutcome::Found { sequence, seed } => {
            std::fs::write(&args.out, sequence.to_json() + "\n").context("writing sequence")?;
            Ok(emit(None, &serde_json::json!({ "found": true, "seed": seed, "hash": sequence.hash() }))?)
        }
        SearchOutcome::Exhausted { seeds_tried } => {
            emit(None, &serde_json::json!({ "found": false, "seeds_tried": seeds_tried }))?;
            Err(Failure::cap(anyhow!("no sync sequence among {seeds_tried} seeds")))
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum StrategyArg {
    Fast,
    Reference,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    sync: PathBuf,
    #[arg(long, value_enum, default_value = "fast")]
    strategy: StrategyArg,
    #[arg(long)]
    cap: u128,
    /// Witness file written on refutation (default: `<sync>.witness.json`).
    #[arg(long)]
    witness: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize, Deserialize)]
pub struct Witness {
    pub sync_hash: String,
    pub violation: SyncViolation,
    pub valid: bool,
}

#[derive(Serialize)]
struct VerifyOutput {
    hash: String,
    strategy: Strategy,
    verified: bool,
    violated: Vec<ConditionKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<PathBuf>,
}

fn default_witness(sync: &Path) -> PathBuf {
    let mut name = sync.as_os_str().to_owned();
    name.push(".witness.json");
    PathBuf::from(name)
}

pub fn sync_verify(args: VerifyArgs) -> Outcome {
    let seq = SyncSequence::from_json(&read_text(&args.sync)?)?;
    let strategy = match args.strategy {
        StrategyArg::Fast => Strategy::Fast,
        StrategyArg::Reference => Strategy::Reference,
    };
    let verdict = verify_sync_with(&seq.params, &seq.mats, strategy, args.cap)?;
    let violated = verdict.kinds();
    let hash = seq.hash();
    match verdict.into_result() {
        Ok(()) => {
            let out = VerifyOutput { hash, strategy, verified: true, violated, witness: None };
            Ok(emit(args.output.out.as_deref(), &out)?)
        }
        Err(violation) => {
            let path = args.witness.unwrap_or_else(|| default_witness(&args.sync));
            let valid = violation.revalidate(&seq.params, &seq.mats);
            write_json(&path, &Witness { sync_hash: hash.clone(), violation, valid })?;
            let out = VerifyOutput { hash, strategy, verified: false, violated, witness: Some(path.clone()) };
            emit(args.output.out.as_deref(), &out)?;
            Err(Failure { code: EXIT_REFUTED, error: anyhow!("sync sequence refuted; witness in {}", path.display()) })
        }
    }
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    radius: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long = "L", alias = "list-bound")]
    list_bound: usize,
    #[arg(long)]
    seed: u64,
    /// Cap on `trials · 2^(k+n)`.
    #[arg(long)]
    cap: u128,
    #[command(flatten)]
    output: Output,
}

pub fn capacity(args: CapacityArgs) -> Outcome {
    let work = (args.trials as u128).saturating_mul(1u128.checked_shl((args.k + args.n) as u32).unwrap_or(u128::MAX));
    check_cap("capacity experiment", work, args.cap)?;
    let report = capacity_experiment(args.k, args.n, args.radius, args.trials, args.list_bound, args.seed)?;
    Ok(emit(args.output.out.as_deref(), &report)?)
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[arg(long, value_parser = parse_rational)]
    gamma: Rational,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Also write operational parameters when they fit machine words.
    #[arg(long)]
    concat_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

pub fn params(args: ParamsArgs) -> Outcome {
    let derived = derive_params(args.gamma, args.n, args.c1)?;
    if let Some(p) = &args.concat_out {
        write_json(p, &derived.to_concat()?)?;
    }
    Ok(emit(args.output.out.as_deref(), &derived)?)
}

#[derive(Args, Debug)]
pub struct CodeFiles {
    /// Concatenated-code parameters (JSON).
    #[arg(long)]
    params: PathBuf,
    /// Verified sync sequence file.
    #[arg(long)]
    sync: PathBuf,
    /// Outer code specification (JSON).
    #[arg(long)]
    outer: PathBuf,
}

impl CodeFiles {
    fn load(&self) -> Result<ConcatCode, Failure> {
        let params: ConcatParams = read_json(&self.params)?;
        let seq = SyncSequence::from_json(&read_text(&self.sync)?)?;
        if !matches!(seq.status, SyncStatus::Verified) {
            return Err(Failure::precondition(anyhow!("{} is not a verified sync sequence", self.sync.display())));
        }
        let outer: OuterCodeSpec = read_json(&self.outer)?;
        Ok(ConcatCode::new(params, &seq, outer)?)
    }
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    code: CodeFiles,
    /// Message bitstring file.
    #[arg(long)]
    message: PathBuf,
    /// Codeword bitstring file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn encode(args: EncodeArgs) -> Outcome {
    let code = args.code.load()?;
    let message = read_bits(&args.message)?;
    let codeword = code.encode(&message)?.bits();
    match &args.out {
        Some(p) => write_bits(p, &codeword)?,
        None => println!("{codeword}"),
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the edit script with its seed.
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
pub struct CorruptRecord {
    pub seed: u64,
    pub budget: usize,
    pub input_len: usize,
    pub output_len: usize,
    pub script: EditScript,
}

pub fn corrupt(args: CorruptArgs) -> Outcome {
    let x = read_bits(&args.input)?;
    let script = random_edit_script(&x, args.budget, args.seed);
    let y = apply_edits(&x, &script)?;
    write_bits(&args.out, &y)?;
    let record = CorruptRecord { seed: args.seed, budget: args.budget, input_len: x.len(), output_len: y.len(), script };
    match &args.script {
        Some(p) => write_json(p, &record)?,
        None => emit(None, &serde_json::json!({ "seed": record.seed, "budget": record.budget, "output_len": record.output_len }))?,
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[command(flatten)]
    code: CodeFiles,
    #[arg(long)]
    received: PathBuf,
    /// Report file: output list plus decoder statistics.
    #[arg(long)]
    report: PathBuf,
    /// Largest outer message space swept, in bits.
    #[arg(long, default_value_t = 24)]
    max_message_bits: usize,
}

#[derive(Serialize, Deserialize)]
pub struct DecodeFile {
    pub sync_hash: String,
    pub messages: Vec<BitVector>,
    pub report: DecodeReport,
}

pub fn decode(args: DecodeArgs) -> Outcome {
    let code = args.code.load()?;
    check_cap("outer message sweep (bits)", code.message_bits() as u128, args.max_message_bits as u128)?;
    let y = read_bits(&args.received)?;
    let out = code.decode(&y)?;
    let outputs = out.messages.len();
    let file = DecodeFile { sync_hash: code.sync_hash().to_owned(), messages: out.messages, report: out.report };
    write_json(&args.report, &file)?;
    Ok(emit(None, &serde_json::json!({ "outputs": outputs, "report": args.report }))?)
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    /// Outer code specification (JSON).
    #[arg(long, alias = "outer")]
    spec: PathBuf,
    /// JSON array of boxes, each an array of hex symbols; `[]` is an emptied box.
    #[arg(long)]
    boxes: PathBuf,
    #[arg(long, value_parser = parse_rational)]
    alpha: Rational,
    #[command(flatten)]
    output: Output,
}

fn parse_symbol(s: &str) -> anyhow::Result<u64> {
    u64::from_str_radix(s, 16).with_context(|| format!("bad hex symbol {s:?}"))
}

fn hex_symbols(m: &[u64]) -> Vec<String> {
    m.iter().map(|s| format!("{s:x}")).collect()
}

pub fn recover(args: RecoverArgs) -> Outcome {
    let spec: OuterCodeSpec = read_json(&args.spec)?;
    let raw: Vec<Vec<String>> = read_json(&args.boxes)?;
    let boxes = raw
        .iter()
        .map(|b| b.iter().map(|s| parse_symbol(s)).collect::<anyhow::Result<_>>())
        .collect::<anyhow::Result<Vec<_>>>()?;
    let code = OuterCode::new(spec)?;
    let messages = code.list_recover(&RecoveryInput { boxes, alpha: args.alpha })?;
    let messages: Vec<Vec<String>> = messages.iter().map(|m| hex_symbols(m)).collect();
    Ok(emit(args.output.out.as_deref(), &serde_json::json!({ "messages": messages }))?)
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    outer: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[command(flatten)]
    output: Output,
}

pub fn rate(args: RateArgs) -> Outcome {
    let params: ConcatParams = read_json(&args.params)?;
    let outer: OuterCodeSpec = read_json(&args.outer)?;
    Ok(emit(args.output.out.as_deref(), &overall_rate(&params, &outer, args.c1)?)?)
}
