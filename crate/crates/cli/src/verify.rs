//! Self-check suite run by `qpc verify`.

use num_bigint::BigInt;
use num_rational::BigRational;
use qpc_core::analytics::{reconstruct_p_from_pmu, success_probability_exact};
use qpc_core::bm::{sample_bm_with, InputState};
use qpc_core::optics::{certify_physical_bm, classify_patterns};
use qpc_core::{
    audit_soundness, bm_success_probability, bm_success_probability_exact, enumerate_exact_average,
    enumerate_profile, Apparatus, BellIndex, CodeParams,
};
use serde_json::json;

use crate::output::Report;
use crate::settings::{parse_exact, Settings};
use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 200_000;

struct Check {
    name: String,
    outcome: Result<String, String>,
}

fn codes_up_to(photons: u32) -> Vec<CodeParams> {
    (1..=photons)
        .flat_map(|n| (1..=photons / n).map(move |m| CodeParams::new(n, m).expect("positive")))
        .collect()
}

fn quarters() -> Vec<BigRational> {
    (0..=4).map(|i| BigRational::new(BigInt::from(i), BigInt::from(4))).collect()
}

fn optics() -> Result<String, String> {
    let table = classify_patterns().map_err(|e| e.to_string())?;
    certify_physical_bm(&table).map_err(|e| e.to_string())?;
    Ok(format!(
        "{} patterns, lossless efficiency {}",
        table.entries.len(),
        table.lossless_efficiency
    ))
}

fn enumeration(max_photons: u32) -> Result<String, String> {
    let codes = codes_up_to(max_photons);
    for &code in &codes {
        for eta in quarters() {
            let brute = enumerate_exact_average(code, &eta).map_err(|e| e.to_string())?;
            let closed = bm_success_probability_exact(code, &eta).map_err(|e| e.to_string())?;
            if brute != closed {
                return Err(format!("{code} at eta={eta}: {brute} != {closed}"));
            }
        }
    }
    Ok(format!("{} codes x 5 transmissions", codes.len()))
}

fn perfect(max_photons: u32) -> Result<String, String> {
    let codes = codes_up_to(max_photons.min(6));
    for &code in &codes {
        let profile = enumerate_profile(code, BellIndex::new(0, 0), Apparatus::Perfect).map_err(|e| e.to_string())?;
        for eta in quarters() {
            let brute = profile.probability(&eta).map_err(|e| e.to_string())?;
            let closed = success_probability_exact(Apparatus::Perfect, code, &eta).map_err(|e| e.to_string())?;
            if brute != closed {
                return Err(format!("{code} at eta={eta}: {brute} != {closed}"));
            }
        }
    }
    Ok(format!("{} codes", codes.len()))
}

fn reconstruction() -> Result<String, String> {
    let codes = [(2, 2), (3, 3), (3, 4), (5, 4), (7, 4), (10, 3)];
    let etas = ["0.3", "0.5", "0.75", "0.9", "0.99", "1"];
    for (n, m) in codes {
        let code = CodeParams::new(n, m).map_err(|e| e.to_string())?;
        for text in etas {
            let eta = parse_exact(text).expect("literal");
            let a = reconstruct_p_from_pmu(code, &eta).map_err(|e| e.to_string())?;
            let b = bm_success_probability_exact(code, &eta).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{code} at eta={text}"));
            }
        }
    }
    Ok("6 codes x 6 transmissions, exact".into())
}

fn monte_carlo(trials: u64, seed: u64) -> Vec<Check> {
    let code = CodeParams::new(6, 5).expect("valid");
    [0.5, 0.9]
        .into_iter()
        .map(|eta| {
            let outcome = (|| {
                let s = sample_bm_with(Apparatus::LinearOptics, code, InputState::Uniform, eta, trials, seed)
                    .map_err(|e| e.to_string())?;
                let expected = bm_success_probability(code, eta).map_err(|e| e.to_string())?;
                let detail = format!(
                    "estimate {:.6} expected {:.6} se {:.2e} misidentified {}",
                    s.estimate, expected, s.standard_error, s.misidentified
                );
                if s.misidentified == 0 && (s.estimate - expected).abs() <= 3.0 * s.standard_error {
                    Ok(detail)
                } else {
                    Err(detail)
                }
            })();
            Check {
                name: format!("monte-carlo (6,5) eta={eta}"),
                outcome,
            }
        })
        .collect()
}

fn soundness(max_photons: u32) -> Result<String, String> {
    let codes = codes_up_to(max_photons);
    let mut grids = 0;
    for &code in &codes {
        for idx in BellIndex::ALL {
            let report = audit_soundness(code, idx, Apparatus::LinearOptics).map_err(|e| e.to_string())?;
            if report.misidentified > 0 {
                return Err(format!("{code} {idx}: {} wrong successes", report.misidentified));
            }
            grids += report.grids;
        }
    }
    Ok(format!("{grids} outcome grids"))
}

pub fn run(s: &Settings, max_photons: u32) -> Result<Report, CliError> {
    if max_photons > qpc_core::bm::MAX_ENUMERATION_PHOTONS {
        return Err(CliError::Input(format!(
            "--max-photons must be at most {}",
            qpc_core::bm::MAX_ENUMERATION_PHOTONS
        )));
    }
    let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let mut checks = vec![
        Check {
            name: "optics oracle".into(),
            outcome: optics(),
        },
        Check {
            name: "enumeration vs closed form".into(),
            outcome: enumeration(max_photons),
        },
        Check {
            name: "perfect apparatus formula".into(),
            outcome: perfect(max_photons),
        },
        Check {
            name: "p from p_mu".into(),
            outcome: reconstruction(),
        },
    ];
    checks.extend(monte_carlo(trials, s.seed));
    checks.push(Check {
        name: "heralded failure soundness".into(),
        outcome: soundness(max_photons),
    });

    let mut report = Report::new(
        "verify",
        json!({"seed": s.seed, "trials": trials, "max_photons": max_photons}),
        &["check", "status", "detail"],
    );
    for check in checks {
        let (status, detail) = match check.outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                report.passed = false;
                ("FAIL", d)
            }
        };
        report.push(
            vec![check.name.clone(), status.into(), detail.clone()],
            json!({"check": check.name, "status": status, "detail": detail}),
        );
    }
    Ok(report)
}
