//! Checks candidate g against the conditions of the matching regime:
//! critical (beta = 1 + k alpha) or supercritical.

use anisoflow::speed::{default_samples, validate_critical, validate_supercritical, GSpec, Regime, SpeedProfile};

fn main() -> anisoflow::Result<()> {
    let samples = default_samples();
    let cases = [
        (2.0, GSpec::Zero),
        (2.0, GSpec::Bump { epsilon: 0.5, p: 1.0 }),
        (2.0, GSpec::Monomial { l: 1 }),
        (3.0, GSpec::ExpFlat { p: 2.0 }),
        (3.0, GSpec::Monomial { l: 4 }),
        (3.0, GSpec::Monomial { l: 3 }),
    ];
    for (beta, g) in cases {
        let label = format!("{g:?}");
        let p = SpeedProfile::new(1, 1, 1.0, beta, g)?;
        let report = match p.regime() {
            Regime::Critical => validate_critical(&p, &samples),
            Regime::Supercritical => validate_supercritical(&p, &samples),
        };
        let failed: Vec<String> = report.failures.iter().map(|f| format!("{} (at r={:.3})", f.condition, f.location)).collect();
        println!(
            "beta={beta} {label:<40} {:?}: {}",
            p.regime(),
            if report.ok { "ok".to_string() } else { failed.join("; ") }
        );
    }
    Ok(())
}
