//! Command implementations behind the `flatf` binary.
//!
//! Exit-code contract: 0 all checks pass / computation succeeded, 1 a check
//! or computation failed, 2 usage or input error. Logs go to standard
//! error; data goes to files and standard output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use flatf_core::problem::Problem;
use flatf_core::resultfile::{GbCacheFile, ResultFile};
use flatf_core::verifier::{self, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Cache directory resolution: the environment variable overrides both the
/// flag and the problem file's own option.
fn cache_dir(flag: Option<&str>, problem: &Problem) -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("FLATF_CACHE_DIR") {
        if !dir.is_empty() {
            return Some(PathBuf::from(dir));
        }
    }
    if let Some(dir) = flag {
        return Some(PathBuf::from(dir));
    }
    problem.cache_dir.as_ref().map(PathBuf::from)
}

fn load_problem(path: &Path) -> Result<Problem, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read `{}`: {}", path.display(), e);
        EXIT_USAGE
    })?;
    Problem::from_json(&text).map_err(|e| {
        eprintln!("error: invalid problem file `{}`: {}", path.display(), e);
        EXIT_USAGE
    })
}

pub fn cmd_compute(
    problem_path: &Path,
    out_path: Option<&Path>,
    max_level: Option<usize>,
    cache_flag: Option<&str>,
) -> i32 {
    let t0 = Instant::now();
    let mut problem = match load_problem(problem_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if let Some(level) = max_level {
        if level < 2 {
            eprintln!("error: --max-level must be at least 2");
            return EXIT_USAGE;
        }
        problem.max_level = level;
    }
    let hash = problem.content_hash();
    let cache = cache_dir(cache_flag, &problem);
    let cache_file = cache
        .as_ref()
        .map(|dir| dir.join(format!("{}.gb.json", hash)));

    // Try the cache; any failure falls back to a fresh computation.
    let mut cached_gb = None;
    if let Some(file) = &cache_file {
        if let Ok(text) = fs::read_to_string(file) {
            match GbCacheFile::from_json(&text).and_then(|c| {
                if c.problem_hash == hash {
                    c.into_basis()
                } else {
                    Err(flatf_core::resultfile::FileError::HashMismatch {
                        stored: c.problem_hash.clone(),
                        computed: hash.clone(),
                    })
                }
            }) {
                Ok(gb) => {
                    eprintln!("using cached basis from `{}`", file.display());
                    cached_gb = Some(gb);
                }
                Err(e) => {
                    eprintln!("warning: ignoring stale cache `{}`: {}", file.display(), e);
                }
            }
        }
    }

    let prepared = match cached_gb {
        Some(gb) => problem.prepare_with_gb(gb),
        None => problem.prepare(),
    };
    let (engine, provenance) = match prepared {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_FAIL;
        }
    };

    if engine.quotient.basis.identity_index().is_none() {
        eprintln!(
            "warning: no representative of the identity class; unit-law checks will be skipped"
        );
    }

    if let (Some(dir), Some(file)) = (&cache, &cache_file) {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!(
                "warning: cannot create cache dir `{}`: {}",
                dir.display(),
                e
            );
        } else {
            let cache_doc = GbCacheFile::from_basis(&problem, &engine.quotient.gb);
            if let Err(e) = fs::write(file, cache_doc.to_json()) {
                eprintln!("warning: cannot write cache `{}`: {}", file.display(), e);
            }
        }
    }

    let structure = match engine.run(problem.max_level) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_FAIL;
        }
    };

    let result = ResultFile::from_structure(&problem, provenance, &structure);
    let json = result.to_json();
    match out_path {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("error: cannot write `{}`: {}", path.display(), e);
                return EXIT_USAGE;
            }
            eprintln!(
                "dim J_S = {}, level {} computed in {:.3?}; result written to `{}`",
                structure.dim(),
                structure.level,
                t0.elapsed(),
                path.display()
            );
        }
        None => {
            println!("{}", json);
            eprintln!(
                "dim J_S = {}, level {} computed in {:.3?}",
                structure.dim(),
                structure.level,
                t0.elapsed()
            );
        }
    }
    EXIT_OK
}

fn parse_checks(spec: Option<&str>) -> Result<Vec<String>, i32> {
    let list = match spec {
        None => return Ok(vec!["fqm11".into(), "flatf".into()]),
        Some(s) => s,
    };
    let mut out = Vec::new();
    for name in list.split(',') {
        let name = name.trim();
        match name {
            "fqm11" | "flatf" | "unit" => out.push(name.to_string()),
            other => {
                eprintln!(
                    "error: unknown check `{}` (available: fqm11, flatf, unit)",
                    other
                );
                return Err(EXIT_USAGE);
            }
        }
    }
    if out.is_empty() {
        eprintln!("error: empty check list");
        return Err(EXIT_USAGE);
    }
    Ok(out)
}

fn print_report(report: &Report) {
    println!("{}", report);
}

pub fn cmd_verify(result_path: &Path, checks: Option<&str>) -> i32 {
    let checks = match parse_checks(checks) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let text = match fs::read_to_string(result_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read `{}`: {}", result_path.display(), e);
            return EXIT_USAGE;
        }
    };
    let file = match ResultFile::from_json(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: malformed result file: {}", e);
            return EXIT_USAGE;
        }
    };
    let problem = match file.verify_hash() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_USAGE;
        }
    };
    let structure = match file.into_structure(&problem) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot rebuild structure: {}", e);
            return EXIT_USAGE;
        }
    };

    let mut all_passed = true;
    for check in &checks {
        let report = match check.as_str() {
            "fqm11" => verifier::check_fqm11(&structure, structure.level),
            "flatf" => verifier::check_flat_f(&structure),
            "unit" => verifier::check_unit(&structure),
            _ => unreachable!(),
        };
        match report {
            Ok(r) => {
                print_report(&r);
                all_passed &= r.passed;
            }
            Err(e) => {
                eprintln!("error: check `{}` could not run: {}", check, e);
                return EXIT_USAGE;
            }
        }
    }
    if all_passed {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn cmd_axioms(problem_path: &Path, trials: u64, seed: u64) -> i32 {
    let problem = match load_problem(problem_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match verifier::check_dgbv_axioms(&problem.potential, problem.charges.as_ref(), trials, seed) {
        Ok(report) => {
            print_report(&report);
            if report.passed {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_USAGE
        }
    }
}

pub fn cmd_basis(problem_path: &Path) -> i32 {
    let problem = match load_problem(problem_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let (engine, provenance) = match problem.prepare() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_FAIL;
        }
    };
    let basis = &engine.quotient.basis;
    println!("dim J_S = {}", basis.dim());
    println!("completeness: {}", provenance.label());
    match basis.identity_index() {
        Some(e) => println!("identity index: {}", e),
        None => println!("identity index: none"),
    }
    for (i, rep) in basis.reps().iter().enumerate() {
        println!("u[{}] = {}", i, rep.to_string_with(&problem.variables));
    }
    EXIT_OK
}
