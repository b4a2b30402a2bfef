use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use certiroot::JacobianMode;

#[derive(Parser, Debug)]
#[command(
    name = "certiroot",
    version,
    about = "Certified isolation of simple real roots of square systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Rewrites `--roi a,b c,d` as `--roi=a,b --roi=c,d` so that negative
/// bounds are not taken for flags. Every token containing a comma after
/// `--roi` belongs to it.
pub fn normalize_roi_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    // None outside a --roi run, Some(n) after n attached values
    let mut run: Option<usize> = None;
    for a in args {
        if a == "--roi" {
            if run == Some(0) {
                out.push("--roi".into());
            }
            run = Some(0);
            continue;
        }
        if let Some(n) = run {
            if a.contains(',') && !a.starts_with("--") {
                out.push(format!("--roi={a}"));
                run = Some(n + 1);
                continue;
            }
            if n == 0 {
                out.push("--roi".into());
            }
            run = None;
        }
        out.push(a);
    }
    if run == Some(0) {
        out.push("--roi".into());
    }
    out
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Isolate the roots in the region of interest.
    Isolate(IsolateArgs),
    /// Certify sure-success radii around roots and check them by trials.
    Diagnose(DiagnoseArgs),
    /// Isolate, then check the output against the roots given in the input.
    Verify(IsolateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// System file.
    pub input: PathBuf,
    /// Region of interest, one `lo,hi` pair per variable.
    #[arg(long, value_name = "LO,HI")]
    pub roi: Vec<String>,
    /// Working precision in bits (default from CERTIROOT_PRECISION, else 64).
    #[arg(long, value_name = "BITS")]
    pub precision: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct IsolateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "N")]
    pub max_depth: Option<u32>,
    #[arg(long, value_name = "jc|jcs")]
    pub jacobian_test: Option<JacobianMode>,
    /// Include predicate counts and the box trace in the output.
    #[arg(long)]
    pub stats: bool,
    /// Write a picture of the subdivision (two variables only).
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Root hint, `a,b,...`; adds to the `root =` lines of the input.
    #[arg(long = "root", allow_hyphen_values = true, value_name = "X1,X2,..")]
    pub roots: Vec<String>,
    /// Take root hints from an isolation run.
    #[arg(long)]
    pub auto_root: bool,
    /// Random probes for the exclusion estimate.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn roi_values_become_attached() {
        assert_eq!(
            normalize_roi_args(v("certiroot isolate f --roi -2,2 -1,3 --max-depth 2")),
            v("certiroot isolate f --roi=-2,2 --roi=-1,3 --max-depth 2")
        );
        assert_eq!(normalize_roi_args(v("x --roi=0,1 f")), v("x --roi=0,1 f"));
        assert_eq!(normalize_roi_args(v("x --roi 0,1 f")), v("x --roi=0,1 f"));
        // a dangling flag is left for clap to report
        assert_eq!(normalize_roi_args(v("x --roi")), v("x --roi"));
        assert_eq!(normalize_roi_args(v("x --roi f")), v("x --roi f"));
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::parse_from(normalize_roi_args(v(
            "certiroot isolate f.sys --roi -2,2 -2,2 --jacobian-test jcs --format text --precision 80",
        )));
        let Command::Isolate(a) = cli.command else { panic!() };
        assert_eq!(a.common.roi, vec!["-2,2", "-2,2"]);
        assert_eq!(a.jacobian_test, Some(JacobianMode::Jcs));
        assert_eq!(a.common.format, Format::Text);
        assert_eq!(a.common.precision, Some(80));
    }
}
