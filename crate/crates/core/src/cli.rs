//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 key
//! validation error. Diagnostics go to stderr; data goes to files or stdout.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{histogram256, keystream_histogram, MetricsReport};
use crate::cipher::{process_stream, Frame, ReseedMode};
use crate::error::{Error, KeyError};
use crate::io::{
    frame_file_name, list_frame_files, read_container, read_pnm, read_pnm_file, read_raw_frames,
    write_container, write_pnm, write_raw_frames, ContainerMode, CONTAINER_MAGIC,
};
use crate::keystream::{KeyMaterial, DEFAULT_BURN_IN};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_KEY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cpip",
    version,
    about = "Chaotic permutation cipher for images and raw video"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print key parameters, either random or derived from a 64-digit hex key.
    Keygen {
        #[arg(long, conflicts_with = "from_hex")]
        random: bool,
        #[arg(long, value_name = "HEX")]
        from_hex: Option<String>,
    },
    /// Encrypt a PNM image, a PNM frame sequence, or a raw planar video.
    Encrypt(EncryptArgs),
    /// Decrypt a container (or a ciphertext exported as PNM).
    Decrypt(DecryptArgs),
    /// Compare a plaintext image with its ciphertext.
    Analyze {
        #[arg(long)]
        plain: PathBuf,
        #[arg(long)]
        cipher: PathBuf,
        /// Write the key=value report here, with histogram CSVs alongside.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Histogram of raw logistic-map values.
    KeystreamHist {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long = "n", value_name = "N")]
        iterations: u64,
        #[arg(long)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct KeyArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: u64,
}

impl KeyArgs {
    fn key(&self) -> Result<KeyMaterial, KeyError> {
        KeyMaterial::from_decimal(&self.mu, &self.x0, self.burn_in)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReseedArg {
    Continuous,
    PerFrame,
}

impl From<ReseedArg> for ReseedMode {
    fn from(r: ReseedArg) -> Self {
        match r {
            ReseedArg::Continuous => ReseedMode::Continuous,
            ReseedArg::PerFrame => ReseedMode::PerFrame,
        }
    }
}

#[derive(Debug, Args)]
struct RawShape {
    /// Treat the input as raw planar frames of this width.
    #[arg(long, requires_all = ["height", "channels"])]
    width: Option<u32>,
    #[arg(long, requires = "width")]
    height: Option<u32>,
    #[arg(long, requires = "width", value_parser = clap::builder::PossibleValuesParser::new(["1", "3"]))]
    channels: Option<String>,
}

#[derive(Debug, Args)]
struct EncryptArgs {
    /// One PNM image, several PNM frames, a directory of frame-NNNNNN.pgm/ppm,
    /// or one raw file together with --width/--height/--channels.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    key: KeyArgs,
    #[arg(long, value_enum, default_value = "continuous")]
    reseed: ReseedArg,
    #[command(flatten)]
    raw: RawShape,
    /// Write the ciphertext as viewable PNM instead of a container.
    #[arg(long)]
    as_pnm: bool,
}

#[derive(Debug, Args)]
struct DecryptArgs {
    /// A container, a PNM ciphertext, or a directory of PNM ciphertext frames.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    key: KeyArgs,
    /// Keying of PNM ciphertext input; containers record their own.
    #[arg(long, value_enum)]
    reseed: Option<ReseedArg>,
    /// Write video frames as a directory of PNM files instead of raw planar data.
    #[arg(long)]
    as_pnm: bool,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<KeyError> for Failure {
    fn from(e: KeyError) -> Self {
        Failure::Data(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.into())
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Key(_) => EXIT_KEY,
        _ => EXIT_DATA,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Keygen {
            random: _,
            from_hex,
        } => keygen(from_hex),
        Command::Encrypt(args) => encrypt(args),
        Command::Decrypt(args) => decrypt(args),
        Command::Analyze {
            plain,
            cipher,
            report,
        } => analyze(&plain, &cipher, report.as_deref()),
        Command::KeystreamHist {
            key,
            iterations,
            bins,
            out,
        } => {
            let key = key.key()?;
            let counts = keystream_histogram(&key, iterations, bins)?;
            let mut csv = String::from("bin_low,bin_high,count\n");
            for (i, c) in counts.iter().enumerate() {
                let lo = i as f64 / bins as f64;
                let hi = (i + 1) as f64 / bins as f64;
                csv.push_str(&format!("{lo},{hi},{c}\n"));
            }
            fs::write(out, csv)?;
            Ok(())
        }
    }
}

fn keygen(from_hex: Option<String>) -> Result<(), Failure> {
    let hex_key = match from_hex {
        Some(h) => h,
        None => {
            // the only nondeterministic path in the tool
            let mut raw = [0u8; 32];
            getrandom::getrandom(&mut raw)
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
            hex::encode(raw)
        }
    };
    let key = KeyMaterial::from_hex(&hex_key)?;
    println!("{key}");
    Ok(())
}

/// Frames to encrypt and whether they form a video.
fn load_plaintext(args: &EncryptArgs) -> Result<(Vec<Frame>, bool), Failure> {
    if let Some(width) = args.raw.width {
        let [path] = args.inputs.as_slice() else {
            return Err(Failure::Usage(
                "raw input takes exactly one --in file".into(),
            ));
        };
        let height = args.raw.height.expect("clap requires height");
        let channels: u8 = args
            .raw
            .channels
            .as_deref()
            .expect("clap requires channels")
            .parse()
            .expect("validated by clap");
        let frames = read_raw_frames(&fs::read(path)?, width, height, channels)?;
        return Ok((frames, true));
    }
    match args.inputs.as_slice() {
        [one] if one.is_dir() => Ok((load_frame_dir(one)?, true)),
        [one] => Ok((vec![read_pnm_file(one)?], false)),
        many => {
            if many.iter().any(|p| p.is_dir()) {
                return Err(Failure::Usage(
                    "a directory input cannot be mixed with other inputs".into(),
                ));
            }
            let frames = many
                .iter()
                .map(|p| read_pnm_file(p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((frames, true))
        }
    }
}

fn load_frame_dir(dir: &Path) -> Result<Vec<Frame>, Error> {
    list_frame_files(dir)?
        .iter()
        .map(|p| read_pnm_file(p))
        .collect()
}

fn write_frame_dir(dir: &Path, frames: &[Frame]) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    for (i, f) in frames.iter().enumerate() {
        fs::write(dir.join(frame_file_name(i, f.channels())), write_pnm(f))?;
    }
    Ok(())
}

fn encrypt(args: EncryptArgs) -> Result<(), Failure> {
    let key = args.key.key()?;
    let (frames, video) = load_plaintext(&args)?;
    let reseed = ReseedMode::from(args.reseed);
    let cipher = process_stream(&frames, &key, reseed)?;
    let mode = ContainerMode::new(cipher[0].channels(), video)?;
    if args.as_pnm {
        if video {
            write_frame_dir(&args.out, &cipher)?;
        } else {
            fs::write(&args.out, write_pnm(&cipher[0]))?;
        }
    } else {
        fs::write(&args.out, write_container(&cipher, mode, reseed)?)?;
    }
    if video {
        eprintln!("encrypted {} frame(s)", cipher.len());
    }
    Ok(())
}

fn decrypt(args: DecryptArgs) -> Result<(), Failure> {
    let key = args.key.key()?;
    let (frames, video, reseed) = if args.input.is_dir() {
        let reseed = args.reseed.map_or(ReseedMode::Continuous, ReseedMode::from);
        (load_frame_dir(&args.input)?, true, reseed)
    } else {
        let bytes = fs::read(&args.input)?;
        if bytes.starts_with(&CONTAINER_MAGIC) {
            let c = read_container(&bytes)?;
            if let Some(r) = args.reseed {
                if ReseedMode::from(r) != c.reseed {
                    return Err(Failure::Usage(
                        "--reseed disagrees with the mode recorded in the container".into(),
                    ));
                }
            }
            (c.frames, c.mode.is_video(), c.reseed)
        } else {
            let reseed = args.reseed.map_or(ReseedMode::Continuous, ReseedMode::from);
            (vec![read_pnm(&bytes)?], false, reseed)
        }
    };
    let plain = process_stream(&frames, &key, reseed)?;
    if !video {
        fs::write(&args.out, write_pnm(&plain[0]))?;
    } else if args.as_pnm {
        write_frame_dir(&args.out, &plain)?;
    } else {
        fs::write(&args.out, write_raw_frames(&plain))?;
    }
    Ok(())
}

/// A single frame from a PNM file or a one-frame container.
fn load_single_frame(path: &Path) -> Result<Frame, Failure> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(&CONTAINER_MAGIC) {
        let mut c = read_container(&bytes)?;
        if c.frames.len() != 1 {
            return Err(Failure::Data(Error::Format(format!(
                "{}: analyze takes single images, container holds {} frames",
                path.display(),
                c.frames.len()
            ))));
        }
        Ok(c.frames.remove(0))
    } else {
        Ok(read_pnm(&bytes)?)
    }
}

fn analyze(plain: &Path, cipher: &Path, report: Option<&Path>) -> Result<(), Failure> {
    let plain = load_single_frame(plain)?;
    let cipher = load_single_frame(cipher)?;
    let metrics = MetricsReport::compute(&plain, &cipher)?;
    let kv = metrics.to_key_values();
    print!("{kv}");
    if let Some(path) = report {
        fs::write(path, &kv)?;
        for (label, frame) in [("plain", &plain), ("cipher", &cipher)] {
            for (c, plane) in frame.planes().enumerate() {
                let suffix = if frame.channels() == 1 {
                    format!("{label}.csv")
                } else {
                    format!("{label}.{}.csv", ["r", "g", "b"][c])
                };
                let mut name = path.as_os_str().to_owned();
                name.push(".");
                name.push(suffix);
                fs::write(PathBuf::from(name), histogram256(plane).to_csv())?;
            }
        }
    }
    Ok(())
}
