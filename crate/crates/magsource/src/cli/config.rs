//! Run configuration: flag parsing, `key=value` config files, precedence and
//! the canonical echo written into every CSV header.
//!
//! Three layers feed one [`RunConfig`]: built-in defaults, then an optional
//! config file (`--config path`, one `key=value` per line, `#` comments),
//! then command-line flags — later layers win. The *effective* configuration
//! (after defaults and the physical-to-`ε` reduction) is echoed as
//! `# key=value` lines into every CSV, and those lines re-fed as a config
//! file reproduce the run byte for byte. Output paths and worker counts are
//! deliberately not echoed: they do not influence the computed bytes.

use std::fmt;
use std::path::PathBuf;

use crate::fieldmaps::{Method, Quantity, Weighting};
use crate::scaling::{build_context, PhysicalParams};

/// What the binary has been asked to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    DensityMap,
    CurrentMap,
    FlowMap,
    Profile,
    Caustics,
    Spectrum,
    Trajectories,
    Selfcheck,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::DensityMap => "density-map",
            Subcommand::CurrentMap => "current-map",
            Subcommand::FlowMap => "flow-map",
            Subcommand::Profile => "profile",
            Subcommand::Caustics => "caustics",
            Subcommand::Spectrum => "spectrum",
            Subcommand::Trajectories => "trajectories",
            Subcommand::Selfcheck => "selfcheck",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "density-map" => Subcommand::DensityMap,
            "current-map" => Subcommand::CurrentMap,
            "flow-map" => Subcommand::FlowMap,
            "profile" => Subcommand::Profile,
            "caustics" => Subcommand::Caustics,
            "spectrum" => Subcommand::Spectrum,
            "trajectories" => Subcommand::Trajectories,
            "selfcheck" => Subcommand::Selfcheck,
            _ => return None,
        })
    }

    fn is_map(&self) -> bool {
        matches!(
            self,
            Subcommand::DensityMap | Subcommand::CurrentMap | Subcommand::FlowMap
        )
    }

    /// Subcommands evaluated at a single energy `ε`.
    fn needs_epsilon(&self) -> bool {
        self.is_map() || matches!(self, Subcommand::Profile | Subcommand::Trajectories)
    }
}

/// A fatal CLI problem, already split by exit code: configuration mistakes
/// exit 3, a Landau-level `ε` exits 2, file-system trouble exits 1.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags, config keys or values (exit 3).
    Usage(String),
    /// `ε` sits on a Landau level where the Green function diverges (exit 2).
    Threshold(String),
    /// Reading or writing an output or config file failed (exit 1).
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 3,
            CliError::Threshold(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Threshold(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<crate::fieldmaps::FieldmapsError> for CliError {
    fn from(e: crate::fieldmaps::FieldmapsError) -> Self {
        use crate::fieldmaps::FieldmapsError;
        use crate::quantum::QuantumError;
        match e {
            FieldmapsError::Quantum(q @ QuantumError::Threshold { .. }) => {
                CliError::Threshold(q.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// The resolved, effective run configuration. All per-subcommand defaults
/// have been applied; `epsilon` is `None` only for subcommands that do not
/// run at a single energy.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub epsilon: Option<f64>,
    pub method: Method,
    pub rho_min: f64,
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub width: u32,
    pub height: u32,
    pub supersample: u32,
    pub orbits: usize,
    pub ghosts: bool,
    pub weighting: Weighting,
    pub gamma: f64,
    pub absolute: Option<f64>,
    pub z: f64,
    pub rho: f64,
    pub samples: usize,
    pub quantity: Quantity,
    pub eps_min: f64,
    pub eps_max: f64,
    pub steps: usize,
    pub nu_max: u32,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn epsilon_required(&self) -> f64 {
        self.epsilon
            .expect("resolution guarantees ε for this subcommand")
    }

    /// The `# key=value` lines echoed into CSV headers: the subcommand first,
    /// then every content-determining key in alphabetical order. Paths and
    /// thread counts are omitted — they never change the computed bytes.
    pub fn echo_meta(&self) -> Vec<(String, String)> {
        let mut meta: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| meta.push((k.to_string(), v));
        match self.subcommand {
            Subcommand::DensityMap | Subcommand::CurrentMap | Subcommand::FlowMap => {
                if let Some(a) = self.absolute {
                    push("absolute", fmt_f64(a));
                }
                push("epsilon", fmt_f64(self.epsilon_required()));
                push("gamma", fmt_f64(self.gamma));
                push("ghosts", self.ghosts.to_string());
                push("method", self.method.label().to_string());
                push("orbits", self.orbits.to_string());
                push("px", format!("{}x{}", self.width, self.height));
                push("rho_max", fmt_f64(self.rho_max));
                push("rho_min", fmt_f64(self.rho_min));
                push("supersample", self.supersample.to_string());
                push("weighting", self.weighting.label().to_string());
                push("z_max", fmt_f64(self.z_max));
                push("z_min", fmt_f64(self.z_min));
            }
            Subcommand::Profile => {
                push("epsilon", fmt_f64(self.epsilon_required()));
                push("ghosts", self.ghosts.to_string());
                push("method", self.method.label().to_string());
                push("orbits", self.orbits.to_string());
                push("quantity", quantity_name(self.quantity).to_string());
                push("rho_max", fmt_f64(self.rho_max));
                push("rho_min", fmt_f64(self.rho_min));
                push("samples", self.samples.to_string());
                push("weighting", self.weighting.label().to_string());
                push("z", fmt_f64(self.z));
            }
            Subcommand::Spectrum => {
                push("eps_max", fmt_f64(self.eps_max));
                push("eps_min", fmt_f64(self.eps_min));
                push("steps", self.steps.to_string());
            }
            Subcommand::Caustics => {
                push("nu_max", self.nu_max.to_string());
                push("samples", self.samples.to_string());
            }
            Subcommand::Trajectories => {
                push("epsilon", fmt_f64(self.epsilon_required()));
                push("ghosts", self.ghosts.to_string());
                push("method", self.method.label().to_string());
                push("orbits", self.orbits.to_string());
                push("rho", fmt_f64(self.rho));
                push("z", fmt_f64(self.z));
            }
            Subcommand::Selfcheck => {}
        }
        let mut lines = vec![(
            "subcommand".to_string(),
            self.subcommand.name().to_string(),
        )];
        lines.extend(meta);
        lines
    }
}

/// Shortest decimal that round-trips to the same `f64`, so echoed values
/// re-parse exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Canonical CLI spelling of each samplable quantity.
pub fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Density => "density",
        Quantity::CurrentRho => "current-rho",
        Quantity::CurrentPhi => "current-phi",
        Quantity::CurrentZ => "current-z",
        Quantity::CurrentVector => "current-vector",
    }
}

fn quantity_from_name(s: &str) -> Option<Quantity> {
    Some(match s {
        "density" => Quantity::Density,
        "current-rho" => Quantity::CurrentRho,
        "current-phi" => Quantity::CurrentPhi,
        "current-z" => Quantity::CurrentZ,
        "current-vector" => Quantity::CurrentVector,
        _ => return None,
    })
}

fn method_from_name(s: &str) -> Option<Method> {
    Some(match s {
        "quantum" => Method::Quantum,
        "primitive" => Method::Primitive,
        "uniform" => Method::Uniform,
        _ => return None,
    })
}

/// Raw option store; `None` means "not given at this layer".
#[derive(Debug, Default, Clone)]
struct Settings {
    subcommand: Option<Subcommand>,
    epsilon: Option<f64>,
    charge: Option<f64>,
    mass: Option<f64>,
    bfield: Option<f64>,
    energy: Option<f64>,
    method: Option<Method>,
    rho_min: Option<f64>,
    rho_max: Option<f64>,
    z_min: Option<f64>,
    z_max: Option<f64>,
    px: Option<(u32, u32)>,
    supersample: Option<u32>,
    orbits: Option<usize>,
    ghosts: Option<bool>,
    weighting: Option<Weighting>,
    gamma: Option<f64>,
    absolute: Option<f64>,
    z: Option<f64>,
    rho: Option<f64>,
    samples: Option<usize>,
    quantity: Option<Quantity>,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
    steps: Option<usize>,
    nu_max: Option<u32>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("value for `{key}` is not a valid number: `{value}`"))
}

fn parse_px(value: &str) -> Result<(u32, u32), String> {
    let err = || format!("`px` must look like WIDTHxHEIGHT (e.g. 256x256), got `{value}`");
    let (w, h) = value.split_once('x').ok_or_else(err)?;
    let w: u32 = w.parse().map_err(|_| err())?;
    let h: u32 = h.parse().map_err(|_| err())?;
    if w == 0 || h == 0 {
        return Err(err());
    }
    Ok((w, h))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("value for `{key}` must be true or false, got `{value}`")),
    }
}

impl Settings {
    /// Apply one canonical `key=value` setting; both the config-file loader
    /// and the flag parser funnel through here.
    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "subcommand" => {
                self.subcommand = Some(
                    Subcommand::from_name(value)
                        .ok_or_else(|| format!("unknown subcommand `{value}`"))?,
                )
            }
            "epsilon" => self.epsilon = Some(parse_num(key, value)?),
            "charge" => self.charge = Some(parse_num(key, value)?),
            "mass" => self.mass = Some(parse_num(key, value)?),
            "bfield" => self.bfield = Some(parse_num(key, value)?),
            "energy" => self.energy = Some(parse_num(key, value)?),
            "method" => {
                self.method = Some(method_from_name(value).ok_or_else(|| {
                    format!("method must be quantum, primitive or uniform, got `{value}`")
                })?)
            }
            "rho_min" => self.rho_min = Some(parse_num(key, value)?),
            "rho_max" => self.rho_max = Some(parse_num(key, value)?),
            "z_min" => self.z_min = Some(parse_num(key, value)?),
            "z_max" => self.z_max = Some(parse_num(key, value)?),
            "px" => self.px = Some(parse_px(value)?),
            "supersample" => self.supersample = Some(parse_num(key, value)?),
            "orbits" => self.orbits = Some(parse_num(key, value)?),
            "ghosts" => self.ghosts = Some(parse_bool(key, value)?),
            "weighting" => {
                self.weighting = Some(match value {
                    "integrated" => Weighting::Integrated,
                    "raw" => Weighting::Raw,
                    _ => {
                        return Err(format!(
                            "weighting must be integrated or raw, got `{value}`"
                        ))
                    }
                })
            }
            "gamma" => self.gamma = Some(parse_num(key, value)?),
            "absolute" => self.absolute = Some(parse_num(key, value)?),
            "z" => self.z = Some(parse_num(key, value)?),
            "rho" => self.rho = Some(parse_num(key, value)?),
            "samples" => self.samples = Some(parse_num(key, value)?),
            "quantity" => {
                self.quantity = Some(quantity_from_name(value).ok_or_else(|| {
                    format!(
                        "quantity must be density, current-rho, current-phi, current-z \
                         or current-vector, got `{value}`"
                    )
                })?)
            }
            "eps_min" => self.eps_min = Some(parse_num(key, value)?),
            "eps_max" => self.eps_max = Some(parse_num(key, value)?),
            "steps" => self.steps = Some(parse_num(key, value)?),
            "nu_max" => self.nu_max = Some(parse_num(key, value)?),
            "threads" => self.threads = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown config key `{key}`")),
        }
        Ok(())
    }

    fn apply_file(&mut self, path: &PathBuf) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "{}: malformed line {}: `{line}` (expected key=value)",
                    path.display(),
                    i + 1
                ))
            })?;
            self.apply(key.trim(), value.trim()).map_err(|msg| {
                CliError::Usage(format!("{}: line {}: {msg}", path.display(), i + 1))
            })?;
        }
        Ok(())
    }

    /// Reduce to the single effective energy parameter. Exactly one of `ε`
    /// and the full physical set (charge, mass, bfield, energy) may be given.
    fn resolve_epsilon(&self) -> Result<Option<f64>, CliError> {
        let physical = [
            ("charge", self.charge),
            ("mass", self.mass),
            ("bfield", self.bfield),
            ("energy", self.energy),
        ];
        let given: Vec<&str> = physical
            .iter()
            .filter(|(_, v)| v.is_some())
            .map(|(n, _)| *n)
            .collect();
        if given.is_empty() {
            return Ok(self.epsilon);
        }
        if self.epsilon.is_some() {
            return Err(CliError::Usage(
                "give either --epsilon or the physical set \
                 (--charge --mass --bfield --energy), not both"
                    .into(),
            ));
        }
        if given.len() < 4 {
            let missing: Vec<&str> = physical
                .iter()
                .filter(|(_, v)| v.is_none())
                .map(|(n, _)| *n)
                .collect();
            return Err(CliError::Usage(format!(
                "incomplete physical parameter set: missing --{}",
                missing.join(", --")
            )));
        }
        let params = PhysicalParams {
            charge: self.charge.unwrap(),
            mass: self.mass.unwrap(),
            field: self.bfield.unwrap(),
            energy: self.energy.unwrap(),
        };
        let ctx = build_context(&params).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Some(ctx.epsilon))
    }

    fn resolve(self) -> Result<RunConfig, CliError> {
        let subcommand = self.subcommand.ok_or_else(|| {
            CliError::Usage("no subcommand given (on the command line or as subcommand= in the config file)".into())
        })?;
        let epsilon = self.resolve_epsilon()?;
        if subcommand.needs_epsilon() {
            match epsilon {
                None => {
                    return Err(CliError::Usage(format!(
                        "{} requires --epsilon or the physical parameter set",
                        subcommand.name()
                    )))
                }
                Some(e) if !(e > 0.0) || !e.is_finite() => {
                    return Err(CliError::Usage(format!(
                        "epsilon must be positive and finite, got {e}"
                    )))
                }
                Some(_) => {}
            }
        }
        let (width, height) = self.px.unwrap_or((256, 256));
        // Anti-aliasing default: dense interference fringes at large ε need
        // the box filter; below that one sample per pixel is faithful.
        let supersample = self.supersample.unwrap_or(match epsilon {
            Some(e) if e > 200.0 => 4,
            _ => 1,
        });
        let orbits = self.orbits.unwrap_or(match subcommand {
            Subcommand::Profile => 50_000,
            Subcommand::Trajectories => 40,
            _ => 500,
        });
        let samples = self.samples.unwrap_or(match subcommand {
            Subcommand::Caustics => 200,
            _ => 1001,
        });
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::Usage("threads must be >= 1".into()));
            }
        }
        Ok(RunConfig {
            subcommand,
            epsilon,
            method: self.method.unwrap_or(Method::Quantum),
            rho_min: self.rho_min.unwrap_or(0.0),
            rho_max: self.rho_max.unwrap_or(1.1),
            z_min: self.z_min.unwrap_or(-1.1),
            z_max: self.z_max.unwrap_or(3.3),
            width,
            height,
            supersample,
            orbits,
            ghosts: self.ghosts.unwrap_or(true),
            weighting: self.weighting.unwrap_or(Weighting::Integrated),
            gamma: self.gamma.unwrap_or(0.5),
            absolute: self.absolute,
            z: self.z.unwrap_or(3.3),
            rho: self.rho.unwrap_or(0.5),
            samples,
            quantity: self.quantity.unwrap_or(Quantity::Density),
            eps_min: self.eps_min.unwrap_or(1.5),
            eps_max: self.eps_max.unwrap_or(9.5),
            steps: self.steps.unwrap_or(400),
            nu_max: self.nu_max.unwrap_or(5),
            threads: self.threads,
            out: self.out,
            csv: self.csv,
        })
    }
}

/// Flags that take a value, mapped to their canonical config key.
const VALUE_FLAGS: &[(&str, &str)] = &[
    ("--epsilon", "epsilon"),
    ("--charge", "charge"),
    ("--mass", "mass"),
    ("--bfield", "bfield"),
    ("--energy", "energy"),
    ("--method", "method"),
    ("--rho-min", "rho_min"),
    ("--rho-max", "rho_max"),
    ("--z-min", "z_min"),
    ("--z-max", "z_max"),
    ("--px", "px"),
    ("--supersample", "supersample"),
    ("--orbits", "orbits"),
    ("--gamma", "gamma"),
    ("--absolute", "absolute"),
    ("--z", "z"),
    ("--rho", "rho"),
    ("--samples", "samples"),
    ("--quantity", "quantity"),
    ("--eps-min", "eps_min"),
    ("--eps-max", "eps_max"),
    ("--steps", "steps"),
    ("--nu-max", "nu_max"),
    ("--threads", "threads"),
    ("--out", "out"),
    ("--csv", "csv"),
];

pub const USAGE: &str = "\
magsource — fields of a monoenergetic point source in a uniform magnetic field

USAGE: magsource <subcommand> [flags]

SUBCOMMANDS
  density-map    particle density over a (rho, z) rectangle (P5 pgm + CSV)
  current-map    axial current j_z over a rectangle (P6 ppm, red/blue + CSV)
  flow-map       in-plane current direction/magnitude (P6 ppm + CSV)
  profile        radial cut at fixed z (CSV)
  caustics       caustic surface polylines (CSV)
  spectrum       total emitted current J/J_free over an energy range (CSV)
  trajectories   per-orbit table at one destination point (CSV)
  selfcheck      run the built-in invariant suite

ENERGY (exactly one form)
  --epsilon F                      dimensionless energy E/(hbar omega_L)
  --charge F --mass F --bfield F --energy F
                                   SI inputs (C, kg, T, J), reduced to epsilon

FIELD / SAMPLING
  --method quantum|primitive|uniform   evaluator (default quantum)
  --rho-min F --rho-max F          radial range (default 0..1.1)
  --z-min F --z-max F              axial range (default -1.1..3.3)
  --px WxH                         map resolution (default 256x256)
  --supersample N                  box-filter factor (default 4 if eps>200 else 1)
  --orbits N                       orbit cutoff (default 500; profile 50000)
  --no-ghosts                      drop complex ghost orbits
  --raw                            store q instead of 2*pi*rho*q
  --quantity NAME                  profile quantity: density, current-rho,
                                   current-phi, current-z, current-vector
  --z F                            profile/trajectory height (default 3.3)
  --rho F                          trajectory radius (default 0.5)
  --samples N                      profile samples (default 1001)
  --eps-min F --eps-max F --steps N   spectrum range (default 1.5..9.5, 400)
  --nu-max N                       caustic surfaces to emit (default 5)

OUTPUT
  --out PATH                       image file (maps only)
  --csv PATH                       CSV table
  --gamma F                        grayscale gamma (default 0.5)
  --absolute F                     normalize images to this value, not the max
  --config PATH                    key=value config file (flags override it)
  --threads N                      worker threads (MAGSOURCE_THREADS overrides)
  --help                           this text

EXIT CODES   0 ok · 1 I/O error · 2 epsilon on a Landau level · 3 bad usage
";

/// Outcome of argument parsing: either a resolved configuration or an early
/// exit (for `--help`).
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    Help,
}

/// Parse command-line arguments (without the program name), folding in an
/// optional config file. Precedence: defaults < file < flags.
pub fn parse_args(args: &[String]) -> Result<Parsed, CliError> {
    let mut positional: Option<&str> = None;
    let mut flag_settings: Vec<(&str, String)> = Vec::new();
    let mut config_path: Option<PathBuf> = None;

    let mut i = 0;
    while i < args.len() {
        let arg = args[i].as_str();
        if arg == "--help" || arg == "-h" {
            return Ok(Parsed::Help);
        } else if arg == "--no-ghosts" {
            flag_settings.push(("ghosts", "false".to_string()));
        } else if arg == "--raw" {
            flag_settings.push(("weighting", "raw".to_string()));
        } else if arg == "--config" {
            i += 1;
            let value = args.get(i).ok_or_else(|| {
                CliError::Usage(format!("flag --config needs a value\n\n{USAGE}"))
            })?;
            config_path = Some(PathBuf::from(value));
        } else if let Some((_, key)) = VALUE_FLAGS.iter().find(|(f, _)| *f == arg) {
            i += 1;
            let value = args.get(i).ok_or_else(|| {
                CliError::Usage(format!("flag {arg} needs a value\n\n{USAGE}"))
            })?;
            flag_settings.push((key, value.clone()));
        } else if arg.starts_with('-') {
            return Err(CliError::Usage(format!("unknown flag `{arg}`\n\n{USAGE}")));
        } else if positional.is_none() {
            positional = Some(arg);
        } else {
            return Err(CliError::Usage(format!(
                "unexpected argument `{arg}` (subcommand already given)\n\n{USAGE}"
            )));
        }
        i += 1;
    }

    let mut settings = Settings::default();
    if let Some(path) = &config_path {
        settings.apply_file(path)?;
    }
    if let Some(name) = positional {
        settings
            .apply("subcommand", name)
            .map_err(|msg| CliError::Usage(format!("{msg}\n\n{USAGE}")))?;
    }
    for (key, value) in flag_settings {
        settings
            .apply(key, &value)
            .map_err(CliError::Usage)?;
    }
    settings.resolve().map(|cfg| Parsed::Run(Box::new(cfg)))
}
