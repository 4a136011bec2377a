use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramsey_core::certificate::{Request, DEFAULT_SEED};
use ramsey_core::error::Error;
use ramsey_core::fraisse::catalog::Catalog;
use ramsey_core::fraisse::ClassSpec;
use ramsey_core::flows::{Side, Surrogate};
use ramsey_core::ramsey::{identity_tuple, DegreeBounds, JointTuple};
use ramsey_core::rational::parse_nonnegative;
use ramsey_core::structure::{build, FinStructure, Tuple};
use ramsey_core::text::parse_structure;

/// A mistake in the command line itself.
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(name = "ramsey", version, about = "Bounded verification of structural Ramsey properties")]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn common(&self) -> &Common {
        &self.common
    }
}

#[derive(Args, Debug)]
pub struct Common {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Certificate output path [default: <command>.cert].
    #[arg(long, global = true)]
    pub cert: Option<PathBuf>,
    /// Write timing and search counters here.
    #[arg(long, global = true)]
    pub stats: Option<PathBuf>,
    /// Catalog file with extra classes; overrides RAMSEY_CATALOG.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
}

/// Structures are given as a file holding one `structure` block, a size
/// (the class's only member of that size), or a name such as `K3`
/// (complete), `E2` (edgeless), `P3` (path), `C5` (cycle), `L4` (chain) or
/// `S2` (pure set).
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Checks heredity, joint embedding and amalgamation up to a size.
    CheckClass {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Builds a finite approximation of the class limit.
    BuildLimit {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        steps: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        horizon: usize,
    },
    /// Searches members up to a size for a C with C -> (B)^A_r.
    CheckErp {
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, value_parser = positive)]
        colors: usize,
        #[arg(long, default_value_t = 1, value_parser = positive)]
        degree: usize,
        #[arg(long, default_value_t = 6, value_parser = positive)]
        bound: usize,
    },
    /// Decides C -> (B)^A_r for fixed structures.
    Arrows {
        #[arg(long)]
        class: Option<String>,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        #[arg(long = "c")]
        c: String,
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, value_parser = positive)]
        colors: usize,
        #[arg(long, default_value_t = 1, value_parser = positive)]
        degree: usize,
    },
    /// Bounded search for the Ramsey degree of a tuple.
    Degree {
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        b_size: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        max_colors: usize,
        #[arg(long, default_value_t = 5, value_parser = positive)]
        c_size: usize,
    },
    /// One witness for several tuples, each with its own degree.
    JointDegree {
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        /// `<tuple>:<degree>`, for example `0,1:1`; repeatable.
        #[arg(long = "joint", required = true)]
        joint: Vec<String>,
        #[arg(long, value_parser = positive)]
        colors: usize,
        #[arg(long, default_value_t = 6, value_parser = positive)]
        bound: usize,
    },
    /// Sweeps every vector coloring for a balanced affine combination.
    CheckEcrp {
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
        #[arg(long = "c")]
        c: String,
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, value_parser = positive)]
        colors: usize,
        /// Exact rational such as `0`, `1/3`.
        #[arg(long, default_value = "0")]
        epsilon: String,
        #[arg(long, default_value_t = 1 << 20, value_parser = positive_u64)]
        guard: u64,
    },
    /// Counts expansions of a structure up to isomorphism.
    CountExpansions {
        #[arg(long)]
        base: String,
        /// The expanded class.
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
    },
    /// Expansion property for one structure, or on a window with `--window`.
    CheckExpansion {
        #[arg(long)]
        base: String,
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: Option<String>,
        #[arg(long, default_value_t = 5, value_parser = positive)]
        bound: usize,
        #[arg(long)]
        window: Option<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = SurrogateArg::Automorphisms)]
        surrogate: SurrogateArg,
        #[arg(long, default_value_t = 3)]
        max_subset: usize,
    },
    /// Orbits of expansions of a window restricted to its first n points.
    MinFlowWindow {
        #[arg(long)]
        base: String,
        #[arg(long)]
        class: String,
        #[arg(long)]
        window: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SurrogateArg::Automorphisms)]
        surrogate: SurrogateArg,
    },
    /// The inverse system of tuple copies in a window.
    OrbitSystem {
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        window: String,
        /// Repeatable; `-` is the empty tuple.
        #[arg(long = "tuple", required = true)]
        tuples: Vec<String>,
    },
    /// Re-checks a certificate.
    Verify { certificate: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
    TwoSided,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SurrogateArg {
    Automorphisms,
    PartialIsomorphisms,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
            SideArg::TwoSided => Side::TwoSided,
        }
    }
}

impl From<SurrogateArg> for Surrogate {
    fn from(s: SurrogateArg) -> Surrogate {
        match s {
            SurrogateArg::Automorphisms => Surrogate::WindowAutomorphisms,
            SurrogateArg::PartialIsomorphisms => Surrogate::PartialIsomorphisms,
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_tuple(s: &str) -> Result<Tuple, UsageError> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().or_else(|_| usage(format!("bad tuple `{s}`"))))
        .collect()
}

fn named(spec: &str) -> Option<FinStructure> {
    let (head, n) = spec.split_at(spec.char_indices().nth(1)?.0);
    let n: usize = n.parse().ok()?;
    Some(match head {
        "K" => build::complete_graph(n),
        "E" => build::edgeless(n),
        "P" => build::path(n),
        "C" => build::cycle(n),
        "L" => build::chain(n),
        "S" => build::pure_set(n),
        _ => return None,
    })
}

/// Reads a structure argument, checking membership when a class is given.
pub fn resolve(spec: &str, class: Option<&ClassSpec>, flag: &str) -> Result<FinStructure, ResolveError> {
    let path = std::path::Path::new(spec);
    let s = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| ResolveError::Usage(format!("cannot read {spec}: {e}")))?;
        parse_structure(&text)
            .map_err(|e| ResolveError::Data(format!("{spec}: {e}")))?
            .structure
    } else if let Ok(n) = spec.parse::<usize>() {
        let Some(k) = class else {
            return Err(ResolveError::Usage(format!("--{flag} {spec}: a size needs --class")));
        };
        let members = k.members_of_size(n).map_err(|e| ResolveError::Usage(e.to_string()))?;
        match members.as_slice() {
            [only] => only.clone(),
            [] => return Err(ResolveError::Usage(format!("--{flag}: `{}` has no member of size {n}", k.name()))),
            many => {
                return Err(ResolveError::Usage(format!(
                    "--{flag}: `{}` has {} members of size {n}; give a file or a name",
                    k.name(),
                    many.len()
                )))
            }
        }
    } else if let Some(s) = named(spec) {
        s
    } else {
        return Err(ResolveError::Usage(format!("--{flag}: `{spec}` is not a file, a size or a structure name")));
    };
    if let Some(k) = class {
        if !k.contains(&s) {
            return Err(ResolveError::Usage(format!("--{flag}: structure is not a member of `{}`", k.name())));
        }
    }
    Ok(s)
}

pub enum ResolveError {
    Usage(String),
    Data(String),
}

/// Turns a command into a request, resolving classes and structures.
pub fn to_request(cmd: &Command, catalog: &Catalog) -> Result<Request, crate::Failure> {
    use crate::Failure;
    let get = |name: &str| catalog.get(name).map_err(Failure::from);
    let res = |spec: &str, class: Option<&ClassSpec>, flag: &str| {
        resolve(spec, class, flag).map_err(|e| match e {
            ResolveError::Usage(m) => Failure::Usage(m),
            ResolveError::Data(m) => Failure::Data(m),
        })
    };
    let tuple_or_identity = |t: &Option<String>, a: &FinStructure| -> Result<Tuple, Failure> {
        Ok(match t {
            Some(t) => parse_tuple(t)?,
            None => identity_tuple(a),
        })
    };
    Ok(match cmd {
        Command::CheckClass { class, bound, seed } => {
            get(class)?;
            Request::CheckClass { class: class.clone(), bound: *bound, seed: *seed }
        }
        Command::BuildLimit { class, steps, horizon } => {
            get(class)?;
            Request::BuildLimit { class: class.clone(), steps: *steps, horizon: *horizon }
        }
        Command::CheckErp { class, a, b, tuple, colors, degree, bound } => {
            let k = get(class)?;
            let a = res(a, Some(&k), "a")?;
            Request::CheckErp {
                class: class.clone(),
                tuple: tuple_or_identity(tuple, &a)?,
                a,
                b: res(b, Some(&k), "b")?,
                colors: *colors,
                degree: *degree,
                bound: *bound,
            }
        }
        Command::Arrows { class, a, b, c, tuple, colors, degree } => {
            let k = class.as_deref().map(get).transpose()?;
            let a = res(a, k.as_deref(), "a")?;
            Request::Arrows {
                tuple: tuple_or_identity(tuple, &a)?,
                a,
                b: res(b, k.as_deref(), "b")?,
                c: res(c, k.as_deref(), "c")?,
                colors: *colors,
                degree: *degree,
            }
        }
        Command::Degree { class, a, tuple, b_size, max_colors, c_size } => {
            let k = get(class)?;
            let a = res(a, Some(&k), "a")?;
            Request::Degree {
                class: class.clone(),
                tuple: tuple_or_identity(tuple, &a)?,
                a,
                bounds: DegreeBounds { b_size: *b_size, colors: *max_colors, c_size: *c_size },
            }
        }
        Command::JointDegree { class, a, b, joint, colors, bound } => {
            let k = get(class)?;
            let tuples = joint
                .iter()
                .map(|j| {
                    let (t, d) = j
                        .rsplit_once(':')
                        .ok_or_else(|| UsageError(format!("--joint `{j}`: expected <tuple>:<degree>")))?;
                    let k = positive(d).map_err(|e| UsageError(format!("--joint `{j}`: {e}")))?;
                    Ok(JointTuple { tuple: parse_tuple(t)?, k })
                })
                .collect::<Result<Vec<_>, UsageError>>()?;
            Request::JointDegree {
                class: class.clone(),
                a: res(a, Some(&k), "a")?,
                tuples,
                b: res(b, Some(&k), "b")?,
                colors: *colors,
                bound: *bound,
            }
        }
        Command::CheckEcrp { class, a, b, c, tuple, colors, epsilon, guard } => {
            let k = get(class)?;
            let a = res(a, Some(&k), "a")?;
            let epsilon = parse_nonnegative(epsilon).map_err(|e| Failure::Usage(format!("--epsilon: {e}")))?;
            Request::CheckEcrp {
                class: class.clone(),
                tuple: tuple_or_identity(tuple, &a)?,
                a,
                b: res(b, Some(&k), "b")?,
                c: res(c, Some(&k), "c")?,
                colors: *colors,
                epsilon,
                guard: *guard,
            }
        }
        Command::CountExpansions { base, class, a } => {
            let k0 = get(base)?;
            get(class)?;
            Request::CountExpansions { base: base.clone(), expanded: class.clone(), a0: res(a, Some(&k0), "a")? }
        }
        Command::CheckExpansion { base, class, a, bound, window, side, surrogate, max_subset } => {
            let k0 = get(base)?;
            let k = get(class)?;
            match (a, window) {
                (Some(a), None) => Request::CheckExpansion {
                    base: base.clone(),
                    expanded: class.clone(),
                    a0: res(a, Some(&k0), "a")?,
                    bound: *bound,
                },
                (None, Some(w)) => Request::WindowExpansion {
                    base: base.clone(),
                    expanded: class.clone(),
                    window: res(w, Some(&k), "window")?,
                    side: (*side).into(),
                    surrogate: (*surrogate).into(),
                    max_subset: *max_subset,
                },
                _ => return Err(Failure::Usage("check-expansion takes exactly one of --a and --window".into())),
            }
        }
        Command::MinFlowWindow { base, class, window, n, surrogate } => {
            get(base)?;
            let k = get(class)?;
            Request::MinFlowWindow {
                base: base.clone(),
                expanded: class.clone(),
                window: res(window, Some(&k), "window")?,
                n: *n,
                surrogate: (*surrogate).into(),
            }
        }
        Command::OrbitSystem { class, window, tuples } => {
            let k = class.as_deref().map(get).transpose()?;
            Request::OrbitSystem {
                window: res(window, k.as_deref(), "window")?,
                tuples: tuples.iter().map(|t| parse_tuple(t)).collect::<Result<_, _>>()?,
            }
        }
        Command::Verify { .. } => unreachable!("handled before request building"),
    })
}
