//! `ncprob` — batch front door for the exact noncommutative probability
//! library: every transform exposed as a subcommand over JSON documents
//! with string rationals. One document per stream; diagnostics go to
//! stderr; exit 0 on success, 2 on validation errors, 3 on precondition
//! errors.

mod docs;

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use docs::{FockDocument, GbfDocument, MeixnerDocument, SeriesDocument};
use ncprob::combinat::{MultiIndex, SetPartition};
use ncprob::cumulants::{self, words, FunctionalData};
use ncprob::scalar::{format_q, parse_q, Q};
use ncprob::{appell, fock, meixner, Error as CoreError};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ncprob", version, about = "Exact Boolean/free cumulant machinery")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OneIn {
    /// Input document (defaults to standard input).
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct ManyIn {
    /// Input documents, in order (repeatable).
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Moments -> Boolean cumulants.
    M2bc(OneIn),
    /// Boolean cumulants -> moments.
    Bc2m(OneIn),
    /// Moments -> free cumulants.
    M2fc(OneIn),
    /// Free cumulants -> moments.
    Fc2m(OneIn),
    /// Boolean convolution of two moment documents.
    Bconv(ManyIn),
    /// Free convolution of two moment documents.
    Fconv(ManyIn),
    /// Boolean convolution power.
    Bpow {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        t: String,
    },
    /// Free convolution power.
    Fpow {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        t: String,
    },
    /// Boolean product of univariate moment documents.
    Bprod(ManyIn),
    /// Free product of univariate moment documents.
    Fprod(ManyIn),
    /// Boolean Appell polynomial of a moment document at a word.
    Appell {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        word: String,
    },
    /// Univariate Appell property suite report.
    UniAppell {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        degree: usize,
    },
    /// Vacuum moments of level-matrix operator data.
    FockMoments {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// The same moments by Motzkin path enumeration.
    MotzkinMoments {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Moment series 1 + M by the matrix continued fraction.
    Cfrac {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        degree: usize,
    },
    /// MOPS orthogonality check for operator data.
    MopsCheck {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        degree: usize,
    },
    /// Boolean convolution power on operator data.
    BpowFock {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        t: String,
    },
    /// Boolean cumulants straight from operator data.
    FockCumulants {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// General Boolean Fock decomposition of symmetric matrices.
    GbfDecompose {
        #[command(flatten)]
        input: OneIn,
        /// Also report Boolean cumulants up to this degree.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Moments of the truncated extended Boolean Fock operator.
    EbfMoments {
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        t: String,
        #[arg(long)]
        degree: usize,
    },
    /// Free and Boolean Meixner PDE residual degrees.
    PdeCheck {
        #[command(flatten)]
        input: OneIn,
        /// Meixner parameter document.
        #[arg(long)]
        params: PathBuf,
    },
    /// The B_t map on a moment document.
    Bt {
        #[command(flatten)]
        input: OneIn,
        #[arg(long)]
        t: String,
    },
    /// The Boolean-to-free bijection on a moment document.
    Bp(OneIn),
    /// Two-atom Bernoulli moment document.
    Bernoulli {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        degree: usize,
    },
    /// Conditionally free convolution of two pairs (mu1 nu1 mu2 nu2).
    Cfree(ManyIn),
    /// Boolean Laha-Lukacs moment identity report.
    LahaLukacs {
        #[arg(long)]
        b: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: usize,
    },
    /// Boolean independence check for grouped variables.
    IndepCheck {
        #[command(flatten)]
        input: OneIn,
        /// Comma-separated block label per variable, e.g. "1,1,2".
        #[arg(long)]
        groups: String,
    },
}

enum CliError {
    Validation(String),
    Precondition(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Precondition(m) => CliError::Precondition(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Validation(m)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_input(path: &Option<PathBuf>) -> CliResult<String> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Validation(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Validation(format!("stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> CliResult<T> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("malformed document: {e}")))
}

fn read_doc_at<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    read_doc(&Some(path.clone()))
}

fn read_functional(path: &Option<PathBuf>) -> CliResult<FunctionalData> {
    let doc: SeriesDocument = read_doc(path)?;
    Ok(doc.to_functional()?)
}

fn read_fock(path: &Option<PathBuf>) -> CliResult<ncprob::FockData> {
    let doc: FockDocument = read_doc(path)?;
    Ok(doc.to_fock()?)
}

fn rational(flag: &str, value: &str) -> CliResult<Q> {
    parse_q(value).ok_or_else(|| CliError::Validation(format!("--{flag}: bad rational {value:?}")))
}

fn two<'a>(inputs: &'a [PathBuf], what: &str) -> CliResult<(&'a PathBuf, &'a PathBuf)> {
    if inputs.len() != 2 {
        return Err(CliError::Validation(format!("{what} takes exactly two --in documents")));
    }
    Ok((&inputs[0], &inputs[1]))
}

/// Moments of a fock-style evaluator, either one word or a full table.
fn moment_table<F>(
    d: usize,
    word: &Option<String>,
    degree: &Option<usize>,
    eval: F,
) -> CliResult<serde_json::Value>
where
    F: Fn(&MultiIndex) -> CliResult<Q>,
{
    match (word, degree) {
        (Some(w), None) => {
            let letters = docs::parse_word(d, w)?;
            let u = MultiIndex::new(d, letters).map_err(CoreError::from)?;
            Ok(json!({ "value": format_q(&eval(&u)?) }))
        }
        (None, Some(n)) => {
            let mut coeffs = std::collections::BTreeMap::new();
            for w in words(d, 1, *n) {
                let u = MultiIndex::new(d, w.clone()).map_err(CoreError::from)?;
                let v = eval(&u)?;
                if !num_traits::Zero::is_zero(&v) {
                    coeffs.insert(docs::key_of(&w), format_q(&v));
                }
            }
            Ok(serde_json::to_value(SeriesDocument { d, degree: *n, coeffs })
                .expect("document serializes"))
        }
        _ => Err(CliError::Validation("give exactly one of --word or --degree".into())),
    }
}

fn run(cmd: Cmd) -> CliResult<serde_json::Value> {
    match cmd {
        Cmd::M2bc(input) => {
            let phi = read_functional(&input.input)?;
            let eta = cumulants::moments_to_boolean_cumulants_gf(&phi);
            Ok(serde_json::to_value(SeriesDocument::from_series(&eta)).expect("serializes"))
        }
        Cmd::Bc2m(input) => {
            let doc: SeriesDocument = read_doc(&input.input)?;
            let phi = cumulants::boolean_cumulants_to_moments_gf(&doc.to_series()?)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::M2fc(input) => {
            let phi = read_functional(&input.input)?;
            let r = cumulants::moments_to_free_cumulants_gf(&phi);
            Ok(serde_json::to_value(SeriesDocument::from_series(&r)).expect("serializes"))
        }
        Cmd::Fc2m(input) => {
            let doc: SeriesDocument = read_doc(&input.input)?;
            let phi = cumulants::free_cumulants_to_moments_gf(&doc.to_series()?)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Bconv(inputs) => {
            let (a, b) = two(&inputs.inputs, "bconv")?;
            let phi = cumulants::boolean_convolve(
                &read_functional(&Some(a.clone()))?,
                &read_functional(&Some(b.clone()))?,
            )?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Fconv(inputs) => {
            let (a, b) = two(&inputs.inputs, "fconv")?;
            let phi = cumulants::free_convolve(
                &read_functional(&Some(a.clone()))?,
                &read_functional(&Some(b.clone()))?,
            )?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Bpow { input, t } => {
            let phi = cumulants::boolean_power(&read_functional(&input.input)?, &rational("t", &t)?);
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Fpow { input, t } => {
            let phi = cumulants::free_power(&read_functional(&input.input)?, &rational("t", &t)?);
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Bprod(inputs) => {
            let factors = inputs
                .inputs
                .iter()
                .map(|p| read_functional(&Some(p.clone())))
                .collect::<CliResult<Vec<_>>>()?;
            let phi = cumulants::boolean_product(&factors)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Fprod(inputs) => {
            let factors = inputs
                .inputs
                .iter()
                .map(|p| read_functional(&Some(p.clone())))
                .collect::<CliResult<Vec<_>>>()?;
            let phi = cumulants::free_product(&factors)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Appell { input, word } => {
            let phi = read_functional(&input.input)?;
            let letters = docs::parse_word(phi.d(), &word)?;
            let u = MultiIndex::new(phi.d(), letters).map_err(CoreError::from)?;
            let p = appell::boolean_appell(&phi, &u)?;
            Ok(serde_json::to_value(SeriesDocument::from_polynomial(&p)).expect("serializes"))
        }
        Cmd::UniAppell { input, degree } => {
            let phi = read_functional(&input.input)?;
            let report = appell::univariate_appell_suite(&phi, degree)?;
            let clauses: Vec<serde_json::Value> = report
                .clauses
                .iter()
                .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
                .collect();
            Ok(json!({ "all_pass": report.all_pass(), "clauses": clauses }))
        }
        Cmd::FockMoments { input, word, degree } => {
            let data = read_fock(&input.input)?;
            moment_table(data.d(), &word, &degree, |u| Ok(fock::fock_moments(&data, u)?))
        }
        Cmd::MotzkinMoments { input, word, degree } => {
            let data = read_fock(&input.input)?;
            moment_table(data.d(), &word, &degree, |u| Ok(fock::motzkin_moments(&data, u)?))
        }
        Cmd::Cfrac { input, degree } => {
            let data = read_fock(&input.input)?;
            let series = fock::continued_fraction_moments(&data, degree)?;
            Ok(serde_json::to_value(SeriesDocument::from_series(&series)).expect("serializes"))
        }
        Cmd::MopsCheck { input, degree } => {
            let data = read_fock(&input.input)?;
            Ok(json!({ "orthogonal": fock::mops_orthogonality_check(&data, degree)? }))
        }
        Cmd::BpowFock { input, t } => {
            let data = fock::boolean_power_fock(&read_fock(&input.input)?, &rational("t", &t)?);
            Ok(serde_json::to_value(FockDocument::from_fock(&data)).expect("serializes"))
        }
        Cmd::FockCumulants { input, word, degree } => {
            let data = read_fock(&input.input)?;
            moment_table(data.d(), &word, &degree, |u| {
                Ok(fock::boolean_cumulants_from_fock(&data, u)?)
            })
        }
        Cmd::GbfDecompose { input, degree } => {
            let doc: GbfDocument = read_doc(&input.input)?;
            let g = fock::general_boolean_fock_decompose(&doc.to_matrices()?, doc.omega)?;
            let lambda: Vec<String> = g.lambda.iter().map(format_q).collect();
            let xi: Vec<Vec<String>> =
                g.xi.iter().map(|v| v.iter().map(format_q).collect()).collect();
            let t: Vec<Vec<Vec<String>>> = g
                .t
                .iter()
                .map(|m| {
                    (0..m.n())
                        .map(|r| (0..m.n()).map(|c| format_q(&m.get(r, c))).collect())
                        .collect()
                })
                .collect();
            let mut out = json!({ "lambda": lambda, "xi": xi, "T": t });
            if let Some(n) = degree {
                let mut coeffs = std::collections::BTreeMap::new();
                for w in words(g.d(), 1, n) {
                    let v = g.boolean_cumulant(&w)?;
                    if !num_traits::Zero::is_zero(&v) {
                        coeffs.insert(docs::key_of(&w), format_q(&v));
                    }
                }
                out["cumulants"] =
                    serde_json::to_value(SeriesDocument { d: g.d(), degree: n, coeffs })
                        .expect("serializes");
            }
            Ok(out)
        }
        Cmd::EbfMoments { b, c, t, degree } => {
            let m = fock::extended_boolean_fock_moments(
                &rational("b", &b)?,
                &rational("c", &c)?,
                &rational("t", &t)?,
                degree,
            )?;
            let phi = FunctionalData::univariate(degree, &m)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::PdeCheck { input, params } => {
            let phi = read_functional(&input.input)?;
            let doc: MeixnerDocument = read_doc_at(&params)?;
            let p = doc.to_params()?;
            let free = meixner::free_pde_residual(&phi, &p)?;
            let boolean = meixner::boolean_pde_residual(&phi, &p)?;
            if !p.commutation_ok() {
                eprintln!("warning: parameters violate the commutation predicate");
            }
            Ok(json!({
                "free_min_degree": meixner::residual_min_degree(&free),
                "boolean_min_degree": meixner::residual_min_degree(&boolean),
                "commutation_ok": p.commutation_ok(),
                "i_plus_c_nonnegative": p.i_plus_c_nonnegative(),
            }))
        }
        Cmd::Bt { input, t } => {
            let phi =
                meixner::bt_transform_series(&read_functional(&input.input)?, &rational("t", &t)?)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Bp(input) => {
            let phi = meixner::bp_bijection_series(&read_functional(&input.input)?)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Bernoulli { beta, degree } => {
            let phi = meixner::bernoulli_functional(&rational("beta", &beta)?, degree)?;
            Ok(serde_json::to_value(SeriesDocument::from_functional(&phi)).expect("serializes"))
        }
        Cmd::Cfree(inputs) => {
            if inputs.inputs.len() != 4 {
                return Err(CliError::Validation(
                    "cfree takes four --in documents: mu1 nu1 mu2 nu2".into(),
                ));
            }
            let load = |p: &PathBuf| read_functional(&Some(p.clone()));
            let (mu1, nu1) = (load(&inputs.inputs[0])?, load(&inputs.inputs[1])?);
            let (mu2, nu2) = (load(&inputs.inputs[2])?, load(&inputs.inputs[3])?);
            let (mu, nu) = cumulants::cfree_convolve((&mu1, &nu1), (&mu2, &nu2))?;
            Ok(json!({
                "mu": SeriesDocument::from_functional(&mu),
                "nu": SeriesDocument::from_functional(&nu),
            }))
        }
        Cmd::LahaLukacs { b, alpha, n } => {
            let report =
                meixner::laha_lukacs_check(&rational("b", &b)?, &rational("alpha", &alpha)?, n)?;
            Ok(json!({
                "all_pass": report.all_pass(),
                "regression_identity": report.regression_identity,
                "cumulant_proportionality": report.cumulant_proportionality,
                "bernoulli_form": report.bernoulli_form,
            }))
        }
        Cmd::IndepCheck { input, groups } => {
            let phi = read_functional(&input.input)?;
            let labels: Vec<&str> = groups.split(',').collect();
            if labels.len() != phi.d() {
                return Err(CliError::Validation(format!(
                    "--groups has {} labels for {} variables",
                    labels.len(),
                    phi.d()
                )));
            }
            let mut blocks: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
            for (var, label) in labels.iter().enumerate() {
                blocks.entry(label).or_default().push(var + 1);
            }
            let partition = SetPartition::new(phi.d(), blocks.into_values().collect())
                .map_err(CoreError::from)?;
            Ok(json!({
                "independent": cumulants::check_boolean_independence(&phi, &partition)?
            }))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(value) => {
            use std::io::Write;
            // Ignore broken pipes so `ncprob ... | head` exits quietly.
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string_pretty(&value).expect("serializes")
            );
        }
        Err(CliError::Validation(m)) => {
            eprintln!("error: {m}");
            std::process::exit(2);
        }
        Err(CliError::Precondition(m)) => {
            eprintln!("precondition error: {m}");
            std::process::exit(3);
        }
    }
}
