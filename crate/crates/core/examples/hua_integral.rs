//! The matrix beta integral: closed form, a Monte Carlo cross-check, and its
//! large-k behaviour.

use siegel_lab::verify::hua_g2_k2_monte_carlo;
use siegel_lab::volumes::{hua_asymptotic_ratio, hua_beta};

fn main() -> siegel_lab::Result<()> {
    for k in [1, 2, 3, 5] {
        println!("g=1 k={k}: {:.12}", hua_beta(1, k)?);
    }
    let (mc, se) = hua_g2_k2_monte_carlo(1_000_000, 42);
    println!(
        "g=2 k=2: formula {:.8}, Monte Carlo {mc:.5} ± {se:.1e}",
        hua_beta(2, 2)?
    );
    for g in [1, 2, 3] {
        let r = hua_asymptotic_ratio(g, &[20, 40, 80, 160, 320])?;
        println!(
            "g={g}: k^(g(g+1)/4) * beta = {:?}",
            r.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()
        );
    }
    println!("sqrt(pi) = {:.5}", std::f64::consts::PI.sqrt());
    Ok(())
}
