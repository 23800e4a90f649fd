//! Acceptance run: one pass/fail line per criterion, with its runtime
//! budget. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use revlab::runner::verify::*;
use revlab::runner::{Check, Level};
use revlab::{Error, Result};

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Vec<Check>>,
}

/// The reverse-operator matrix feeds criteria 1 and 5; it runs once.
fn theorem() -> Result<Vec<Check>> {
    static MATRIX: OnceLock<std::result::Result<Vec<Check>, String>> = OnceLock::new();
    MATRIX
        .get_or_init(|| {
            let mut out = Vec::new();
            for spec in theorem_instances(Level::Full).map_err(|e| e.to_string())? {
                out.extend(check_theorem_instance(&spec, false).map_err(|e| e.to_string())?);
            }
            Ok(out)
        })
        .clone()
        .map_err(Error::Config)
}

fn ghz_and_dominance() -> Result<Vec<Check>> {
    let mut out: Vec<Check> = theorem()?.into_iter().filter(|c| c.criterion == 5).collect();
    out.extend(check_ghz_certificate()?);
    Ok(out)
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "Chebyshev reverse residual <= RHS on the model x disturbance x q matrix",
            budget: secs(300),
            run: || Ok(theorem()?.into_iter().filter(|c| c.criterion == 1).collect()),
        },
        Criterion {
            id: 2,
            title: "filter F_R(0) = 1 and window sup <= 2exp(-2n0/xi), 50 params x 1e4 points",
            budget: secs(10),
            run: || Ok(check_filter_bounds(50, 10_000, 2)),
        },
        Criterion {
            id: 3,
            title: "Chebyshev growth bounds, n = 1..20, 1e4 samples per regime",
            budget: secs(10),
            run: || Ok(check_chebyshev_growth(10_000)),
        },
        Criterion {
            id: 4,
            title: "energy-tail bound on 20 random 2-local n = 8 chains",
            budget: secs(120),
            run: || check_energy_tail(20, 8, 4),
        },
        Criterion {
            id: 5,
            title: "GHZ(8) optimal residual >= 1/sqrt2 for q <= 7; optimal <= Chebyshev",
            budget: None,
            run: ghz_and_dominance,
        },
        Criterion {
            id: 6,
            title: "LMG exponents -1/3 and 4/3 (+- 0.05) over N = 256..4096",
            budget: secs(600),
            run: check_lmg_scaling,
        },
        Criterion {
            id: 7,
            title: "critical-exponent arithmetic, z = 1, eta = 1/4",
            budget: None,
            run: || Ok(check_exponent_arithmetic()),
        },
        Criterion {
            id: 8,
            title: "projector locality, n = 5, 100 seeded trials",
            budget: None,
            run: || check_projector_locality(100, 8),
        },
        Criterion {
            id: 9,
            title: "mean-field decomposition, hybrid exponent, product sum",
            budget: None,
            run: || check_meanfield(9),
        },
        Criterion {
            id: 10,
            title: "N_eff: product <= 1, GHZ(8) >= 8, TFI n = 12 <= 3",
            budget: None,
            run: || check_macroscopicity(Level::Full, 10),
        },
        Criterion {
            id: 11,
            title: "toric code degeneracies, indistinguishability, loop residual",
            budget: None,
            run: check_toric,
        },
    ];
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, note) = match &result {
            Ok(checks) => {
                for k in checks {
                    println!(
                        "    [{}] {} margin {:.3e} {}",
                        if k.pass { "pass" } else { "FAIL" },
                        k.name,
                        k.margin,
                        k.detail
                    );
                }
                let bad: Vec<_> = checks.iter().filter(|k| !k.pass).map(|k| k.name.clone()).collect();
                let in_time = c.budget.is_none_or(|b| elapsed <= b);
                let mut note = format!("{} checks", checks.len());
                if !bad.is_empty() {
                    note += &format!("; failed: {}", bad.join("; "));
                }
                if !in_time {
                    note += &format!("; over budget {:?}", c.budget.unwrap_or_default());
                }
                (!checks.is_empty() && bad.is_empty() && in_time, note)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!(
            "criterion {:>2}: {} ({:.1} s) {} [{}]",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.title,
            note
        );
        println!("{line}");
        lines.push(line);
        if !ok {
            failed.push(c.id);
        }
    }
    println!();
    for l in &lines {
        println!("{l}");
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
