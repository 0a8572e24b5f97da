use gista::metrics::rms;
use gista::plant::{DisturbanceSpec, OracleAxisParams};
use gista::sim::{run_experiment, PlantConfig, RunOutcome, SimConfig};

fn check(kf: f64, gamma: f64, a: f64, f: f64, eps: f64, dt: f64) {
    let mut cfg = SimConfig::oracle_bench();
    cfg.dt = dt;
    cfg.controller.epsilon = eps;
    cfg.plant = PlantConfig::OracleAxis {
        params: OracleAxisParams { m: 1.0, gamma, k_f: kf },
        forcing: DisturbanceSpec { sin_amp: a, sin_freq: f, ..Default::default() },
    };
    cfg.n_iterations = 10;
    let log = match run_experiment(&cfg).unwrap() {
        RunOutcome::Complete(log) => log,
        RunOutcome::Diverged { info, .. } => {
            println!("kf={kf} gam={gamma} a={a} f={f} eps={eps:.0e} DIVERGED: {}", info.error);
            return;
        }
    };
    let mut errs = Vec::new();
    for (i, it) in log.iterations.iter().enumerate() {
        let ax = &it.axes[0];
        let diff: Vec<f64> = if i == 0 {
            ax.psi_truth.iter().map(|&p| -p).collect()
        } else {
            let prev = &log.iterations[i - 1].axes[0].u_ilc;
            prev.iter().zip(&ax.psi_truth).map(|(&u, &p)| -u - p).collect()
        };
        errs.push(rms(&diff).unwrap());
    }
    let ratio = errs.last().unwrap() / errs[0] * 100.0;
    let mono = (2..errs.len()).all(|i| errs[i] <= errs[i - 1]);
    let v: Vec<f64> = log.summary.rows.iter().map(|r| r.v1_terminal + r.v2_terminal).collect();
    let c6 = (1..v.len()).all(|i| v[i] <= 1.05 * v[i - 1]);
    let e6 = rms(&log.iterations[9].axes[0].e).unwrap();
    print!("kf={kf:4} gam={gamma:5} a={a:4} f={f:3} eps={eps:6.0e} dt={dt:5.0e} | err1={:7.2e} err10={:7.2e} {ratio:5.1}% mono={mono} c6={c6} rmse_e10={e6:8.2e} | ", errs[0], errs[9]);
    for e in &errs {
        print!(" {:6.2}", e);
    }
    println!();
}

fn main() {
    for (kf, a) in [(2.0, 3.0), (2.0, 4.0), (3.0, 4.5), (3.0, 6.0), (5.0, 8.0), (2.5, 4.0)] {
        check(kf, 0.0, a, 1.0, 5e-4, 1e-4);
    }
    println!();
    for (kf, a) in [(2.0, 3.0), (3.0, 4.5), (2.5, 4.0)] {
        check(kf, 2.0, a, 1.0, 5e-4, 1e-4);
        check(kf, 2.0, a, 1.0, 2e-3, 1e-4);
    }
}
