//! Argument parsing and dispatch for the `w22` binary.
//!
//! [`run`] never touches the process: it returns the exit code together with
//! whatever belongs on stdout and stderr, so tests can drive it directly.

use std::ffi::OsString;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use w22_core::classify::{self, ExtType, Summary};
use w22_core::intermediate::{self, IndexedVector, ModuleSpec};
use w22_core::lie::{self, BasisElement};
use w22_core::pbw::{self, HighestWeightParams};
use w22_core::scalar::{self, Scalar};
use w22_core::verma;
use w22_core::Error;

#[derive(Debug, Parser)]
#[command(name = "w22", version, about = "Exact computations in the W-algebra W(2,2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "json")]
    pub output: Format,
    /// Exit with status 1 when the result reports a violation or an infeasible system.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct Highest {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub lambda: Scalar,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub c: Scalar,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub c0: Scalar,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub c1: Scalar,
    #[arg(long, default_value_t = 4)]
    pub max_level: usize,
}

impl Highest {
    fn params(&self) -> HighestWeightParams {
        HighestWeightParams::new(self.lambda.clone(), self.c.clone(), self.c0.clone(), self.c1.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Aab,
    Aa,
    Ba,
    #[value(name = "a-prime-000")]
    APrime000,
}

#[derive(Debug, Args)]
pub struct ModuleArgs {
    #[arg(long, value_enum, default_value = "aab")]
    pub family: FamilyArg,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub a: Option<Scalar>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub b: Option<Scalar>,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub window: i64,
}

impl ModuleArgs {
    fn spec(&self) -> Result<ModuleSpec, Failure> {
        let need_a =
            || self.a.clone().ok_or_else(|| Failure::Usage(format!("--a is required for --family {:?}", self.family)));
        let reject_b = || match self.b {
            Some(_) => Err(Failure::Usage(format!("--b does not apply to --family {:?}", self.family))),
            None => Ok(()),
        };
        Ok(match self.family {
            FamilyArg::Aab => ModuleSpec::aab(
                need_a()?,
                self.b.clone().ok_or_else(|| Failure::Usage("--b is required for --family aab".into()))?,
            ),
            FamilyArg::Aa => {
                reject_b()?;
                ModuleSpec::aa(need_a()?)
            }
            FamilyArg::Ba => {
                reject_b()?;
                ModuleSpec::ba(need_a()?)
            }
            FamilyArg::APrime000 => {
                if self.a.is_some() {
                    return Err(Failure::Usage("--a does not apply to --family a-prime-000".into()));
                }
                reject_b()?;
                ModuleSpec::a_prime_000()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtArg {
    Decomposable,
    ExtA,
    ExtB,
}

impl From<ExtArg> for ExtType {
    fn from(e: ExtArg) -> Self {
        match e {
            ExtArg::Decomposable => ExtType::Decomposable,
            ExtArg::ExtA => ExtType::ExtA,
            ExtArg::ExtB => ExtType::ExtB,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bracket of two generators.
    Bracket {
        #[arg(long, value_parser = generator, allow_hyphen_values = true)]
        left: BasisElement,
        #[arg(long, value_parser = generator, allow_hyphen_values = true)]
        right: BasisElement,
        #[command(flatten)]
        common: Common,
    },
    /// Jacobi identity over all basis triples with |index| <= window.
    Jacobi {
        #[arg(long, default_value_t = 6)]
        window: i64,
        #[command(flatten)]
        common: Common,
    },
    /// The element x(n) + n·e·I(n) of the Virasoro subalgebra Vir[e].
    VirEmbed {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        e: Scalar,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[command(flatten)]
        common: Common,
    },
    /// PBW normal form of a word of generators, e.g. --word x:1,x:-1.
    NormalOrder {
        #[arg(long, value_parser = generator, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        word: Vec<BasisElement>,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical basis of one Verma level.
    VermaBasis {
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Singular vectors of M(λ, c, c0, c1) up to a level.
    VermaSingular {
        #[command(flatten)]
        highest: Highest,
        #[command(flatten)]
        common: Common,
    },
    /// Bounded irreducibility verdict compared against the closed-form criterion.
    VermaCheck {
        #[command(flatten)]
        highest: Highest,
        #[command(flatten)]
        common: Common,
    },
    /// Action on an intermediate-series module: one vector, the table, or the compatibility check.
    ImAct {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, value_parser = generator, allow_hyphen_values = true, requires = "index")]
        generator: Option<BasisElement>,
        #[arg(long, allow_hyphen_values = true, requires = "generator")]
        index: Option<i64>,
        /// Check x(m)x(n) - x(n)x(m) = [x(m), x(n)] on the window instead.
        #[arg(long, conflicts_with = "generator")]
        check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Look for a proper invariant subspace inside the window.
    ImProbe {
        #[command(flatten)]
        module: ModuleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the scalar system for I(m) v_t = f(m,t) v_{m+t} over A(a,b).
    VerifyF {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        a: Scalar,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        b: Scalar,
        #[arg(long, default_value_t = 5)]
        window: i64,
        /// Print the full report instead of the summary.
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the 2×2 matrix system for I(i) over a module with two-dimensional weight spaces.
    VerifyMatrix {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        alpha: Scalar,
        #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "0")]
        beta1: Scalar,
        #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "0")]
        beta2: Scalar,
        #[arg(long, value_enum, default_value = "decomposable")]
        ext: ExtArg,
        #[arg(long, default_value_t = 4)]
        window: i64,
        /// Pin F[1,0](2,1) = α.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn rational(text: &str) -> Result<Scalar, String> {
    scalar::parse(text).map_err(|e| e.to_string())
}

fn generator(text: &str) -> Result<BasisElement, String> {
    text.parse::<BasisElement>().map_err(|e| e.to_string())
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::WindowTooSmall { .. } => Failure::Usage(format!("--window: {e}")),
            Error::RationalParse(_) | Error::GeneratorParse(_) | Error::InvalidParameter(_) => {
                Failure::Usage(e.to_string())
            }
            Error::InconsistentAction { .. } => Failure::Compute(e.to_string()),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, flagged: bool, strict: bool) -> Self {
        Self { code: if flagged && strict { 1 } else { 0 }, stdout, stderr: String::new() }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn tsv_unsupported(verb: &str) -> Failure {
    Failure::Usage(format!("--output tsv is only available for action tables and constraint systems, not {verb}"))
}

fn require_json(common: &Common, verb: &str) -> Result<(), Failure> {
    match common.output {
        Format::Json => Ok(()),
        Format::Tsv => Err(tsv_unsupported(verb)),
    }
}

pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Bracket { left, right, common } => {
            require_json(common, "bracket")?;
            Ok(Outcome::ok(json(&lie::bracket_basis(*left, *right)), false, common.strict))
        }
        Command::Jacobi { window, common } => {
            require_json(common, "jacobi")?;
            if *window < 0 {
                return Err(Failure::Usage("--window must be nonnegative".into()));
            }
            let r = lie::jacobi_check(*window);
            Ok(Outcome::ok(json(&r), !r.violations.is_empty(), common.strict))
        }
        Command::VirEmbed { e, n, common } => {
            require_json(common, "vir-embed")?;
            Ok(Outcome::ok(json(&lie::vir_embed(e, *n)), false, common.strict))
        }
        Command::NormalOrder { word, common } => {
            require_json(common, "normal-order")?;
            Ok(Outcome::ok(json(&pbw::normal_order(word)), false, common.strict))
        }
        Command::VermaBasis { level, common } => {
            require_json(common, "verma-basis")?;
            Ok(Outcome::ok(json(&verma::level_basis(*level)), false, common.strict))
        }
        Command::VermaSingular { highest, common } => {
            require_json(common, "verma-singular")?;
            let found = verma::find_singular(&highest.params(), highest.max_level);
            Ok(Outcome::ok(json(&found), false, common.strict))
        }
        Command::VermaCheck { highest, common } => {
            require_json(common, "verma-check")?;
            let r = verma::is_verma_irreducible(&highest.params(), highest.max_level);
            Ok(Outcome::ok(json(&r), r.disagreement.is_some(), common.strict))
        }
        Command::ImAct { module, generator, index, check, common } => {
            let spec = module.spec()?;
            if *check {
                require_json(common, "im-act --check")?;
                let r = intermediate::bracket_compatibility_check(&spec, module.window)?;
                return Ok(Outcome::ok(json(&r), !r.violations.is_empty(), common.strict));
            }
            if let (Some(g), Some(i)) = (generator, index) {
                require_json(common, "im-act --generator")?;
                let v = intermediate::act(&spec, *g, &IndexedVector::basis(*i));
                return Ok(Outcome::ok(json(&v), false, common.strict));
            }
            if module.window < 0 {
                return Err(Failure::Usage("--window must be nonnegative".into()));
            }
            let out = match common.output {
                Format::Json => json(&intermediate::action_table(&spec, module.window)),
                Format::Tsv => intermediate::action_table_tsv(&spec, module.window),
            };
            Ok(Outcome::ok(out, false, common.strict))
        }
        Command::ImProbe { module, common } => {
            require_json(common, "im-probe")?;
            let spec = module.spec()?;
            let v = intermediate::simplicity_probe(&spec, module.window)?;
            Ok(Outcome::ok(json(&v), false, common.strict))
        }
        Command::VerifyF { a, b, window, report, common } => {
            let sys = classify::build_f_system(a, b, *window)?;
            system_output(&sys, *report, common)
        }
        Command::VerifyMatrix { alpha, beta1, beta2, ext, window, normalize, report, common } => {
            let mut sys = classify::build_matrix_system(alpha, (beta1, beta2), (*ext).into(), *window)?;
            if *normalize {
                classify::normalize_glue_entry(&mut sys, alpha);
            }
            system_output(&sys, *report, common)
        }
    }
}

fn system_output(sys: &classify::ConstraintSystem, full: bool, common: &Common) -> Result<Outcome, Failure> {
    if common.output == Format::Tsv {
        return Ok(Outcome::ok(sys.to_triplets(), false, common.strict));
    }
    let s = classify::solve_linear(sys);
    let r = classify::report(sys, &s);
    let out = if full { json(&r) } else { json(&Summary::from(&r)) };
    Ok(Outcome::ok(out, r.infeasible, common.strict))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli.command) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Compute(msg)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w22(args: &str) -> Outcome {
        run(std::iter::once("w22").chain(args.split_whitespace()))
    }

    #[test]
    fn bracket_example() {
        let o = w22("bracket --left x:2 --right x:-2");
        assert_eq!(o.code, 0);
        assert_eq!(
            o.stdout,
            "{\"terms\":[{\"kind\":\"C\",\"coeff\":\"1/2\"},{\"kind\":\"X\",\"index\":0,\"coeff\":\"-4\"}]}\n"
        );
    }

    #[test]
    fn verma_check_example() {
        let o = w22("verma-check --lambda 1 --c 0 --c0 1 --c1 0 --max-level 4");
        assert_eq!(o.stdout, "{\"criterion_roots\":[],\"verdict\":\"no-singular-vector-up-to-4\"}\n");
    }

    #[test]
    fn verify_f_example() {
        let o = w22("verify-f --a 1/2 --b 1/3 --window 5");
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout, "{\"dimension\":1,\"c1_forced_zero\":true,\"quadratic_survivors\":0}\n");
    }

    #[test]
    fn usage_errors_exit_two_and_name_the_problem() {
        let o = w22("verify-f --a 0.5 --b 1/3");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("0.5") && o.stderr.contains("--a"), "{}", o.stderr);

        let o = w22("frobnicate --a 1");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("frobnicate"));

        let o = w22("verify-f --a 1 --b 0 --window 2");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("--window"));

        let o = w22("bracket --left y:2 --right x:1");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("y:2") && o.stderr.contains("--left"));

        let o = w22("im-probe --family aa --a 1 --b 2");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("--b"));

        let o = w22("jacobi --window 2 --output tsv");
        assert_eq!(o.code, 2);
    }

    #[test]
    fn strict_turns_findings_into_status_one() {
        let o = w22("verify-matrix --alpha 1/3 --ext ext-a --window 4 --normalize");
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("\"infeasible\":true"));
        let o = w22("verify-matrix --alpha 1/3 --ext ext-a --window 4 --normalize --strict");
        assert_eq!(o.code, 1);
        let o = w22("verma-check --lambda 0 --c 0 --c0 1 --c1 -8 --max-level 2 --strict");
        assert_eq!(o.code, 1);
        assert!(o.stdout.contains("disagreement"));
    }

    #[test]
    fn tsv_outputs() {
        let o = w22("im-act --family aa --a 1 --window 1 --output tsv");
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("kind\tindex\tsource\tcoeff\n"));
        let o = w22("verify-f --a 1 --b 0 --window 3 --output tsv");
        assert!(o.stdout.lines().all(|l| l.split('\t').count() == 3));
    }
}
