//! Case table and process helpers shared by the CLI test targets.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct Case {
    pub sub: &'static str,
    /// Input fixture under tests/golden, when the subcommand reads one.
    pub input: Option<&'static str>,
    pub extra: &'static [&'static str],
    /// Expected report under tests/golden.
    pub golden: &'static str,
    pub exit: i32,
}

/// Every subcommand appears at least once; exit-1 rows pin the mathematical
/// failure paths with their witnesses.
pub const CASES: &[Case] = &[
    Case {
        sub: "wfilt",
        input: Some("wfilt_jordan32.in.json"),
        extra: &[],
        golden: "wfilt_jordan32.report.json",
        exit: 0,
    },
    Case {
        sub: "relfilt",
        input: Some("relfilt_pure.in.json"),
        extra: &[],
        golden: "relfilt_pure.report.json",
        exit: 0,
    },
    Case {
        sub: "relfilt",
        input: Some("relfilt_obstructed.in.json"),
        extra: &[],
        golden: "relfilt_obstructed.report.json",
        exit: 1,
    },
    Case {
        sub: "psi",
        input: Some("psi_block.in.json"),
        extra: &[],
        golden: "psi_block.report.json",
        exit: 0,
    },
    Case {
        sub: "psi-weights",
        input: Some("psiw_sl2.in.json"),
        extra: &[],
        golden: "psiw_sl2.report.json",
        exit: 0,
    },
    Case {
        sub: "psi-weights",
        input: Some("psiw_violated.in.json"),
        extra: &[],
        golden: "psiw_violated.report.json",
        exit: 1,
    },
    Case {
        sub: "orbit-ck",
        input: Some("orbitck_tensor.in.json"),
        extra: &[],
        golden: "orbitck_tensor.report.json",
        exit: 0,
    },
    Case {
        sub: "orbit-ck",
        input: None,
        extra: &["--seed", "5"],
        golden: "orbitck_seed5.report.json",
        exit: 0,
    },
    Case {
        sub: "groupcoh",
        input: Some("groupcoh_z2.in.json"),
        extra: &["--check", "all", "--window", "1"],
        golden: "groupcoh_z2.report.json",
        exit: 0,
    },
    Case {
        sub: "liecoh",
        input: Some("liecoh_heis.in.json"),
        extra: &[],
        golden: "liecoh_heis.report.json",
        exit: 0,
    },
    Case {
        sub: "liecoh",
        input: Some("liecoh_sym3.in.json"),
        extra: &["--check", "all"],
        golden: "liecoh_sym3.report.json",
        exit: 0,
    },
    Case {
        sub: "kostant",
        input: Some("kostant_a1.in.json"),
        extra: &[],
        golden: "kostant_a1.report.json",
        exit: 0,
    },
    Case {
        sub: "fan-res",
        input: None,
        extra: &["--window", "2"],
        golden: "fanres_standard3.report.json",
        exit: 0,
    },
    Case {
        sub: "cech-check",
        input: Some("cech_chain.in.json"),
        extra: &[],
        golden: "cech_chain.report.json",
        exit: 0,
    },
    Case {
        sub: "cech-check",
        input: None,
        extra: &["--seed", "7"],
        golden: "cech_seed7.report.json",
        exit: 0,
    },
    Case {
        sub: "degenerate",
        input: Some("hilbert.datum.json"),
        extra: &["--check", "all"],
        golden: "hilbert.table.json",
        exit: 0,
    },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn bin_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_weft"))
}

/// Run one case with the report directed to `out`.
pub fn run_case(case: &Case, out: &Path) -> Output {
    let mut cmd = bin_cmd();
    cmd.arg(case.sub);
    if let Some(input) = case.input {
        let flag = if case.sub == "degenerate" { "--datum" } else { "--in" };
        cmd.arg(flag).arg(golden_dir().join(input));
    }
    cmd.args(case.extra);
    cmd.arg("--out").arg(out);
    cmd.output().expect("the binary runs to completion")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("the binary exits normally")
}
