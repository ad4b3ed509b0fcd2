//! Mutated scenario files must always produce a value or a structured error.

use std::panic;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lorentz_lab::scenario::{run_scenario, ConstantsProfile, Scenario, ScenarioKind, REFERENCE_SUITE};
use lorentz_lab::PhysicalConstants;

const ODD_VALUES: &[&str] = &[
    "0", "-1", "1e308", "-1e308", "1e-320", "nan", "inf", "-inf", "2.5", "\"\"", "\"x\"", "[1, 2]", "{ a = 1 }",
    "true", "1979-05-27", "4096", "99999999999", "0.0", "-0.0", "\"lorentz\"", "\"mode\"", "=",
];

const ODD_LINES: &[&str] = &[
    "kind = \"boost\"", "kind = 7", "seed = -3", "seed = 1.5", "output = 3", "[section]", "x.y = 1", "= 3",
    "\"quoted key\" = 1", "v", "v = 1 = 2", "# comment", "", "\u{feff}kind = \"muon\"", "init = \"mode\"",
    "mode = 100", "sweep = 0", "levels = 9",
];

fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for _ in 0..rng.random_range(1..4) {
        let choice = rng.random_range(0..7);
        let len = lines.len();
        match choice {
            0 if len > 0 => {
                lines.remove(rng.random_range(0..len));
            }
            1 if len > 0 => {
                let i = rng.random_range(0..len);
                if let Some((key, _)) = lines[i].split_once('=') {
                    lines[i] = format!("{key}= {}", ODD_VALUES.choose(rng).unwrap());
                }
            }
            2 => {
                let at = rng.random_range(0..=len);
                lines.insert(at, ODD_LINES.choose(rng).unwrap().to_string());
            }
            3 if len > 0 => {
                let i = rng.random_range(0..len);
                let dup = lines[i].clone();
                lines.insert(i, dup);
            }
            4 if len > 0 => {
                let i = rng.random_range(0..len);
                let cut = rng.random_range(0..=lines[i].len());
                let cut = (0..=cut).rev().find(|&c| lines[i].is_char_boundary(c)).unwrap_or(0);
                lines[i].truncate(cut);
            }
            5 if len > 1 => {
                let (i, j) = (rng.random_range(0..len), rng.random_range(0..len));
                let (a, b) = (lines[i].split_once('='), lines[j].split_once('='));
                if let (Some((ka, va)), Some((kb, vb))) = (a, b) {
                    let (ka, va, kb, vb) = (ka.to_string(), va.to_string(), kb.to_string(), vb.to_string());
                    lines[i] = format!("{ka}={vb}");
                    lines[j] = format!("{kb}={va}");
                }
            }
            _ => {
                let kind = ScenarioKind::ALL.choose(rng).unwrap();
                lines.retain(|l| !l.trim_start().starts_with("kind"));
                lines.insert(0, format!("kind = \"{kind}\""));
            }
        }
    }
    lines.join("\n")
}

#[test]
fn mutated_scenarios_never_panic() {
    let k = PhysicalConstants::si();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut parsed, mut rejected, mut ran) = (0, 0, 0);
    for round in 0..4000 {
        let (_, base) = REFERENCE_SUITE[round % REFERENCE_SUITE.len()];
        let text = mutate(base, &mut rng);
        let outcome = panic::catch_unwind(|| match Scenario::parse(&text, &k) {
            Err(e) => {
                assert!(!e.to_string().is_empty());
                assert!((1..=3).contains(&e.exit_code()));
                (false, false)
            }
            // long simulations are covered elsewhere; parse-only here
            Ok(s) if matches!(s.kind, ScenarioKind::Chain | ScenarioKind::Covariance) => (true, false),
            Ok(s) => {
                if let Err(e) = run_scenario(&s, ConstantsProfile::Si) {
                    assert_eq!(e.exit_code(), 2, "{e}");
                }
                (true, true)
            }
        });
        match outcome {
            Ok((p, r)) => {
                parsed += p as usize;
                rejected += (!p) as usize;
                ran += r as usize;
            }
            Err(_) => panic!("panic on mutated scenario:\n{text}"),
        }
    }
    // ensure the corpus exercises both paths
    assert!(parsed > 100 && rejected > 100 && ran > 50, "parsed {parsed}, rejected {rejected}, ran {ran}");
}

#[test]
fn arbitrary_bytes_never_panic() {
    let k = PhysicalConstants::si();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let len = rng.random_range(0..200);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        let text = String::from_utf8_lossy(&bytes);
        assert!(panic::catch_unwind(|| Scenario::parse(&text, &k)).is_ok(), "panic on {text:?}");
    }
}
