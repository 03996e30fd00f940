use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use linelab::alignment::{
    accumulate, contrast, detect_phase, ranked_offsets, statistic, window_for_depth,
    window_products, TraceVariant,
};
use linelab::alphabet::{
    digits_to_image, image_to_digits, parse_stream, serialize, split_words, WORD_LEN,
};
use linelab::balance::{balanced_profile, find_rejection_sets, j_profile_of, ProductMap};
use linelab::endec::{decode_stream, encode_stream};
use linelab::framework::{alu_width, build_maps, eq_base, BinMaps, CodeSpec, MapsDocument, RunLimits};
use linelab::linksim::{run_startup, LinkConfig};
use linelab::scrambler::{descramble_stream, scramble_stream, user_space_candidates};
use linelab::sidestream::{
    lfsr_period, measure_period, AnchorState, LfsrState, ProgressiveGenerator, ScramblerClock,
};

#[derive(Parser)]
#[command(name = "linelab", version, about = "Base-21 line coding toolkit")]
struct Cli {
    /// Emit CSV instead of JSON where a table makes sense.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, default_value_t = 5)]
    length: usize,
    /// lead,inner,trail
    #[arg(long, default_value = "1,3,2")]
    k_limits: String,
    /// lead,inner,trail or "free"
    #[arg(long, default_value = "free")]
    j_limits: String,
    /// Read the framework from a maps JSON file instead.
    #[arg(long)]
    maps: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ClockArgs {
    #[arg(long, default_value_t = 1)]
    lfsr_seed: u16,
    /// a3,a7
    #[arg(long, default_value = "1,1")]
    anchor: String,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity and equivalent base of a code.
    Capacity(CodeArgs),
    /// BFM, BCM and BPM of a code.
    Maps(CodeArgs),
    /// Word indices to a letter stream.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Whitespace-separated indices; stdin when absent.
        #[arg(long)]
        indices: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Letter stream to word indices.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        letters: Option<PathBuf>,
        /// Letters to skip before the first word.
        #[arg(long, default_value_t = 0)]
        phase: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Scramble a base-21 letter stream.
    Scramble {
        #[command(flatten)]
        clock: ClockArgs,
        #[arg(long)]
        letters: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Descramble a base-21 letter stream.
    Descramble {
        #[command(flatten)]
        clock: ClockArgs,
        #[arg(long)]
        letters: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// J-profile of a code, or per-position counts of a letter stream.
    Stats {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        letters: Option<PathBuf>,
    },
    /// Search rejection sets matching a delta BPM.
    Balance {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        target_delta: PathBuf,
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
    /// Word-boundary detection over a letter stream.
    Align {
        #[arg(long)]
        letters: Option<PathBuf>,
        #[arg(long, default_value = "JJ")]
        variant: String,
        /// Trellis step depth for the contrast diagnostic, 0 to skip.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=3))]
        depth: u8,
    },
    /// Randomized link startups.
    LinkSim {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 64)]
        payload_words: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Period of the binary LFSR or a progressive generator.
    RngPeriod {
        #[arg(long, default_value_t = 2)]
        modulus: u32,
        #[arg(long, default_value_t = 1)]
        lfsr_seed: u16,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
    },
    /// User/scrambler space splits `(2^u + 1) * 2^v <= n`.
    Spaces {
        #[arg(long, default_value_t = 21)]
        n: u64,
    },
}

enum Failure {
    Domain(linelab::Error),
    Io(String),
}

impl From<linelab::Error> for Failure {
    fn from(e: linelab::Error) -> Self {
        Failure::Domain(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| io_err(p, e)),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn load_maps(code: &CodeArgs) -> Result<BinMaps, Failure> {
    if let Some(p) = &code.maps {
        let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
        let doc: MapsDocument =
            serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
        return Ok(doc.into_maps()?);
    }
    let spec = CodeSpec::new(
        code.length,
        RunLimits::parse(&code.k_limits)?,
        RunLimits::parse(&code.j_limits)?,
    )?;
    Ok(build_maps(&spec)?)
}

fn parse_clock(c: &ClockArgs) -> Result<ScramblerClock, Failure> {
    let parts: Vec<&str> = c.anchor.split(',').map(str::trim).collect();
    let [a3, a7] = parts[..] else {
        return Err(linelab::Error::BadConfig(format!("anchor '{}' is not a3,a7", c.anchor)).into());
    };
    let num = |s: &str| {
        s.parse::<u8>()
            .map_err(|_| linelab::Error::BadConfig(format!("bad anchor value '{s}'")))
    };
    let anchors = AnchorState::new(num(a3)?, num(a7)?)?;
    Ok(ScramblerClock::new(LfsrState::new(c.lfsr_seed)?, anchors))
}

fn parse_indices(text: &str) -> Result<Vec<u64>, Failure> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Failure::Io(format!("not a word index: '{t}'")))
        })
        .collect()
}

fn indices_text(idx: &[u64]) -> String {
    idx.iter().map(|b| format!("{b}\n")).collect()
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn rows_csv(name: &str, m: &[Vec<u64>]) -> String {
    let mut out = String::new();
    for (i, row) in m.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&format!("{name},{},{}\n", BinMaps::row_label(i), cells.join(",")));
    }
    out
}

fn scramble_cmd(clock: &ClockArgs, letters: Option<&Path>, out: Option<&Path>, forward: bool) -> Outcome {
    let clk = parse_clock(clock)?;
    let stream = parse_stream(&read_input(letters)?)?;
    let digits = split_words(&stream, WORD_LEN)?
        .iter()
        .map(image_to_digits)
        .collect::<linelab::Result<Vec<_>>>()?;
    let (res, _) = if forward {
        scramble_stream(&digits, &clk)?
    } else {
        descramble_stream(&digits, &clk)?
    };
    let images: Vec<_> = res.into_iter().map(digits_to_image).collect();
    write_output(out, &serialize(&images).to_text(WORD_LEN))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Capacity(code) => {
            let m = load_maps(&code)?;
            let z = round2(eq_base(m.capacity, m.length()));
            if cli.csv {
                println!("length,capacity,eq_base,alu_width\n{},{},{z},{}", m.length(), m.capacity, alu_width(&m.spec));
            } else {
                print_json(&json!({"capacity": m.capacity, "eq_base": z}));
            }
        }
        Command::Maps(code) => {
            let m = load_maps(&code)?;
            if cli.csv {
                print!("{}{}{}", rows_csv("bfm", &m.bfm), rows_csv("bcm", &m.bcm), rows_csv("bpm", &m.bpm));
            } else {
                print_json(&serde_json::to_value(MapsDocument::from_maps(&m)).expect("serializable"));
            }
        }
        Command::Encode { code, indices, out } => {
            let m = load_maps(&code)?;
            let idx = parse_indices(&read_input(indices.as_deref())?)?;
            let s = encode_stream(&m, &idx)?;
            write_output(out.as_deref(), &s.to_text(m.length()))?;
        }
        Command::Decode { code, letters, phase, out } => {
            let m = load_maps(&code)?;
            let s = parse_stream(&read_input(letters.as_deref())?)?;
            let idx = decode_stream(&m, &s, phase)?;
            write_output(out.as_deref(), &indices_text(&idx))?;
        }
        Command::Scramble { clock, letters, out } => {
            scramble_cmd(&clock, letters.as_deref(), out.as_deref(), true)?;
        }
        Command::Descramble { clock, letters, out } => {
            scramble_cmd(&clock, letters.as_deref(), out.as_deref(), false)?;
        }
        Command::Stats { code, letters } => match letters {
            None => {
                let m = load_maps(&code)?;
                let p = j_profile_of(&m);
                let num: Vec<u64> = p.iter().map(|r| r.num).collect();
                let frac: Vec<f64> = p.iter().map(|r| r.to_f64()).collect();
                let mean = frac.iter().sum::<f64>() / frac.len() as f64;
                if cli.csv {
                    println!("position,j_count,capacity,fraction");
                    for (k, f) in frac.iter().enumerate() {
                        println!("{k},{},{},{f}", num[k], m.capacity);
                    }
                } else {
                    print_json(&json!({
                        "capacity": m.capacity, "j_counts": num, "j_profile": frac, "mean": mean
                    }));
                }
            }
            Some(path) => {
                let s = parse_stream(&read_input(Some(&path))?)?;
                let bank = accumulate(&s)?;
                print_json(&serde_json::to_value(bank).expect("serializable"));
            }
        },
        Command::Balance { code, target_delta, limit } => {
            let m = load_maps(&code)?;
            let text = fs::read_to_string(&target_delta).map_err(|e| io_err(&target_delta, e))?;
            let target: ProductMap = serde_json::from_str(&text)
                .map_err(|e| Failure::Io(format!("{}: {e}", target_delta.display())))?;
            let sets = find_rejection_sets(&m, &target, limit)?;
            let mut out = Vec::new();
            for s in &sets {
                let idx: Vec<u64> = s.indices().collect();
                out.push(json!({"rejected": idx, "profile": balanced_profile(&m, s)?}));
            }
            print_json(&json!({"found": sets.len(), "sets": out}));
        }
        Command::Align { letters, variant, depth } => {
            let v = TraceVariant::parse(&variant)?;
            let s = parse_stream(&read_input(letters.as_deref())?)?;
            let bank = accumulate(&s)?;
            let est = detect_phase(&bank, v)?;
            let mut doc = json!({
                "offset": est.offset,
                "decisive": est.decisive,
                "score": est.score,
                "ranked": ranked_offsets(&bank, v),
                "words": bank.words_observed,
            });
            if let Some(w) = window_for_depth(depth) {
                let products = window_products(&statistic(&bank, v, est.offset), w)?;
                doc["contrast"] = serde_json::to_value(contrast(&products)?).expect("serializable");
            }
            print_json(&doc);
        }
        Command::LinkSim { trials, payload_words, seed } => {
            let base = LinkConfig {
                payload_words,
                ..LinkConfig::default()
            };
            let mut reports = Vec::new();
            for t in 0..trials {
                reports.push(run_startup(&base.randomized(seed.wrapping_add(t)))?);
            }
            let normal = reports.iter().filter(|r| r.reached_normal).count();
            let errors: u64 = reports.iter().map(|r| r.post_sync_errors).sum();
            if cli.csv {
                println!("trial_seed,reached_normal,words_to_sync,post_sync_errors,detected_phase,clock_candidates");
                for r in &reports {
                    println!(
                        "{},{},{},{},{},{}",
                        r.trial_seed,
                        r.reached_normal,
                        r.words_to_sync,
                        r.post_sync_errors,
                        r.detected_phase.map_or(String::new(), |d| d.to_string()),
                        r.clock_candidates
                    );
                }
            } else {
                print_json(&json!({
                    "trials": trials, "reached_normal": normal, "post_sync_errors": errors,
                    "reports": reports,
                }));
            }
        }
        Command::RngPeriod { modulus, lfsr_seed, max_steps } => {
            let period = if modulus == 2 {
                lfsr_period(LfsrState::new(lfsr_seed)?, max_steps)?
            } else {
                measure_period(&ProgressiveGenerator::with_default_taps(modulus)?, max_steps)?
            };
            print_json(&json!({"modulus": modulus, "period": period}));
        }
        Command::Spaces { n } => {
            let c: Vec<Value> = user_space_candidates(n)
                .iter()
                .map(|s| json!({"u": s.u, "v": s.v, "value": s.value}))
                .collect();
            print_json(&json!({"n": n, "candidates": c}));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            let dbg = format!("{e:?}");
            let kind: String = dbg.chars().take_while(|c| c.is_alphanumeric()).collect();
            eprintln!("error: {kind}: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
