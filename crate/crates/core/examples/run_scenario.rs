//! Runs a shipped scenario through the library entry point and prints its checks and
//! artifact hashes. Pass a scenario name (default `interface_sweep`).

use regflux::scenario::{run_config, shipped_configs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "interface_sweep".into());
    let cfg = shipped_configs()?
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| format!("no shipped scenario named {name}"))?;
    let dir = std::env::temp_dir().join("regflux-example").join(&cfg.name);
    let out = run_config(&cfg, &dir, None)?;
    for c in &out.report.checks {
        let tol = c.tolerance.map_or(String::new(), |t| format!(" (≤ {t:e})"));
        println!(
            "{} {} = {:e}{tol}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value
        );
    }
    for a in &out.artifacts {
        println!("{} {:>9} {}", &a.sha256[..12], a.bytes, a.path);
    }
    println!("written to {}", out.out_dir.display());
    Ok(())
}
