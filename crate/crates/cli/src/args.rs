use clap::{Args, Parser, Subcommand, ValueEnum};
use josephson::rotation::Side;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "josephson", version, about = "Phase-lock areas, monodromy and adjacency points of the overdamped Josephson junction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotation number at one parameter point.
    Rotnum {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
    },
    /// Rotation numbers on a (b, a) grid.
    Scan {
        #[arg(long, default_value = "-1:5:61")]
        grid_b: Grid,
        #[arg(long, default_value = "0:6:31")]
        grid_a: Grid,
        #[arg(long, default_value_t = 2.0)]
        omega: f64,
        #[command(flatten)]
        common: Common,
    },
    /// One boundary curve of the tongue with rotation number r.
    Boundary {
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[arg(long, default_value = "minus", value_parser = parse_side)]
        side: Side,
        /// Sampled a values.
        #[arg(long, default_value = "0:10:21")]
        grid_a: Grid,
        #[arg(long, default_value_t = 2.0)]
        omega: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monodromy of the linear system around the origin.
    Monodromy {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = josephson::monodromy::DEFAULT_RADIUS)]
        radius: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Searches an a-interval for a point with trivial monodromy.
    AdjacencySeed {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value = "0:15")]
        a_range: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Adjacency chain generated from a seed.
    AdjacencyChain {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long)]
        seed_a: f64,
        #[arg(long)]
        seed_omega: f64,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Checks the Bessel solution of Painlevé 3 and its poles.
    PainleveVerify {
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        /// Mixing constant of J_b + y0·Y_b.
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Zero-curvature residual and isomonodromy drift of a Lax family.
    LaxVerify {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.5)]
        y0: f64,
        /// Constant C̃₁ of the family; 0 selects the reducible branch.
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = josephson::lax::DRIFT_RADIUS)]
        radius: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub omega: f64,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Absolute and relative tolerance of the integrator.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
        let n: usize = n.parse().map_err(|e| format!("bad count {n:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("need finite lo ≤ hi, got {lo}:{hi}"));
        }
        if n == 0 || (n == 1 && lo != hi) {
            return Err(format!("need at least two points for a non-degenerate range, got {n}"));
        }
        Ok(Grid { lo, hi, n })
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

/// `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let Some((lo, hi)) = s.split_once(':') else {
            return Err(format!("expected lo:hi, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("need finite lo < hi, got {lo}:{hi}"));
        }
        Ok(Range { lo, hi })
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse::<Side>().map_err(|e| e.to_string())
}
