//! Squeezed-probe sweeps written as CSV.

use qmetro::metrology::{noisy_scaling_sweep, sweep_grid, SweepOptions, SweepRecord};

use crate::error::{CliError, CliResult};
use crate::output::emit;
use crate::{SweepArgs, SweepScenario};

pub const HEADER: &str = "scenario,N,p,lambda,theta0,precision_inv,qfi,bound_sep,bound_bisep,bound_heisenberg";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(r: &SweepRecord) -> String {
    let fields = [r.p, r.lambda, r.theta0, r.precision_inv, r.qfi, r.bound_sep, r.bound_bisep, r.bound_heisenberg];
    let mut line = format!("{},{}", r.scenario, r.n);
    for f in fields {
        line.push(',');
        line.push_str(&float(f));
    }
    line
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 200);
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

fn describe(r: &SweepRecord) -> String {
    format!("record scenario={} N={} p={} lambda={}", r.scenario, r.n, r.p, float(r.lambda))
}

pub fn run(a: &SweepArgs) -> CliResult<()> {
    let ns = a.n.integers("N")?;
    let p = a
        .noise
        .depolarizing_p()
        .ok_or_else(|| CliError::usage("sweeps support only depolarizing noise"))?;
    let id = match a.scenario {
        SweepScenario::Frontier if p > 0.0 => {
            return Err(CliError::usage("the frontier is noiseless; use the squeezed sweep with --noise"))
        }
        SweepScenario::Frontier => "frontier",
        SweepScenario::Squeezed => "squeezed",
    };
    if let Some(&odd) = ns.iter().find(|&&n| n % 2 == 1) {
        return Err(CliError::usage(format!("squeezed probes need even N, got {odd}")));
    }
    let mut records = if a.optimize {
        let outcome = noisy_scaling_sweep(&ns, p, &SweepOptions::default())?;
        if let Some(e) = outcome.exponent {
            eprintln!("fitted exponent of the optimal precision in N: {e:.4}");
        }
        outcome.optimum
    } else {
        sweep_grid(&ns, p, &a.lambda.reals("lambda")?)?
    };
    for r in &mut records {
        r.scenario = id.into();
    }
    emit(a.out.as_deref(), &to_csv(&records))?;
    for r in &records {
        if let Some(v) = r.violation() {
            return Err(CliError::Invariant(format!("{}: {v}", describe(r))));
        }
    }
    Ok(())
}
