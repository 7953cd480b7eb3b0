#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// `(golden file, arguments, exit code)` for every checked-in report.
pub const CASES: &[(&str, &[&str], i32)] = &[
    (
        "betti.json",
        &["betti", "--g", "1", "--Z", "i", "--w", "0.5+0.5i", "--seed", "3"],
        0,
    ),
    (
        "betti_g2.csv",
        &[
            "betti",
            "--g",
            "2",
            "--Z",
            "1.5i,0.2+0.1i;0.2+0.1i,i",
            "--w",
            "0.3+0.2i,-0.1+0.7i",
            "--D",
            "1,2",
            "--format",
            "csv",
        ],
        0,
    ),
    ("betti_scaling.json", &["betti", "--scaling", "--N", "2"], 0),
    ("betti_invalid.json", &["betti", "--Z", "-i"], 2),
    (
        "nondegeneracy_torsion.json",
        &[
            "nondegeneracy",
            "--family",
            "legendre",
            "--section",
            "two_torsion_0",
            "--lambda",
            "0.3",
        ],
        0,
    ),
    (
        "nondegeneracy_config.txt",
        &[
            "nondegeneracy",
            "--config",
            "tests/data/nondegeneracy.cfg",
            "--format",
            "text",
        ],
        0,
    ),
    (
        "nondegeneracy_excluded.json",
        &["nondegeneracy", "--section", "const_x2", "--lambda", "1.0"],
        2,
    ),
    (
        "height.json",
        &["height", "--curve", "A=0,B=-2", "--P", "3,5", "--tol", "1e-10"],
        0,
    ),
    (
        "height_budget.json",
        &[
            "height",
            "--curve",
            "A=0,B=-2",
            "--P",
            "3,5",
            "--tol",
            "1e-30",
            "--engine",
            "exact",
            "--digit-budget",
            "50",
        ],
        4,
    ),
    (
        "silverman_tate.json",
        &["silverman-tate", "--count", "6", "--tol", "1e-8"],
        0,
    ),
    (
        "siu.json",
        &[
            "siu", "--Fd", "100", "--MF", "10", "--d", "2", "--N", "1", "--c1", "4", "--kappa", "3/2", "--c", "5",
        ],
        0,
    ),
    (
        "count_cover.json",
        &[
            "count",
            "cover",
            "--rho",
            "2",
            "--R",
            "1",
            "--r",
            "1",
            "--points",
            "tests/data/points.csv",
        ],
        0,
    ),
    (
        "count_cover_random.csv",
        &[
            "count",
            "cover",
            "--rho",
            "3",
            "--R",
            "2",
            "--r",
            "0.7",
            "--samples",
            "40",
            "--seed",
            "11",
            "--format",
            "csv",
        ],
        0,
    ),
    (
        "count_split.json",
        &[
            "count",
            "split",
            "--heights",
            "tests/data/heights.csv",
            "--c0",
            "0.5",
            "--h",
            "2",
        ],
        0,
    ),
    (
        "count_vojta.txt",
        &["count", "vojta", "--rho", "2", "--format", "text"],
        0,
    ),
    ("count_hurwitz.json", &["count", "hurwitz", "--g", "3"], 0),
    ("count_hurwitz_invalid.json", &["count", "hurwitz", "--g", "1"], 2),
    (
        "count_dichotomy.json",
        &[
            "count",
            "dichotomy",
            "--curve",
            "A=0,B=-2",
            "--P",
            "3,5",
            "--multiples",
            "2",
            "--c3",
            "2",
            "--h-base",
            "3",
            "--c4",
            "3",
        ],
        0,
    ),
    (
        "alon_bound.json",
        &["alon", "bound", "--M", "3", "--degC", "2", "--degZ", "3"],
        0,
    ),
    (
        "alon_test.json",
        &[
            "alon",
            "test",
            "--M",
            "2",
            "--points",
            "1,0;1,1;1,2",
            "--poly",
            "x0_1*x1_0 - x0_0*x1_1",
        ],
        0,
    ),
    ("alon_grid.json", &["alon", "grid"], 0),
    (
        "intersect_number.json",
        &["intersect", "number", "--dims", "1,2", "--bundles", "1,1;2,1;0,3"],
        0,
    ),
    (
        "intersect_recurrence.json",
        &["intersect", "recurrence", "--l", "12", "--dprime", "5"],
        0,
    ),
    (
        "intersect_mf.json",
        &[
            "intersect",
            "mf",
            "--d",
            "2",
            "--n",
            "1",
            "--m",
            "2",
            "--l",
            "1",
            "--dprime",
            "1",
            "--a",
            "0,1=1;1,0=1",
        ],
        0,
    ),
    (
        "constants.json",
        &["constants", "--c0", "8", "--c1", "1", "--c2", "4=8"],
        0,
    ),
    (
        "unknown_flag.json",
        &["count", "hurwitz", "--g", "2", "--genus", "3"],
        2,
    ),
];

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    crate_dir().join("tests/golden").join(name)
}

/// Runs `bh` from the crate directory and returns stdout and the exit code.
pub fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_bh"))
        .args(args)
        .current_dir(crate_dir())
        .env_remove("BH_THREADS")
        .output()
        .expect("bh runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 report"),
        out.status.code().unwrap_or(-1),
    )
}

pub fn case(name: &str) -> (&'static [&'static str], i32) {
    let (_, args, code) = CASES
        .iter()
        .find(|(n, _, _)| *n == name)
        .unwrap_or_else(|| panic!("no case {name}"));
    (args, *code)
}
