//! Reference scenarios shared by the acceptance suite, and a small reporter
//! that prints one verdict line per criterion.

use std::io::Write;

use fblec::{Link, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Collects the checks of one criterion and prints its verdict.
///
/// The line goes to the raw stderr handle so it shows up even when the test
/// harness captures output.
#[derive(Debug)]
pub struct Verdict {
    id: u32,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    pub fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
        ok
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Prints the verdict and panics if any check failed.
    pub fn finish(self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:>2} {status}  {}", self.id, self.title);
        for f in &self.failures {
            line.push_str(&format!("\n    failed: {f}"));
        }
        for n in &self.notes {
            line.push_str(&format!("\n    {n}"));
        }
        line.push('\n');
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(
            self.passed(),
            "criterion {} failed: {}",
            self.id,
            self.failures.join("; ")
        );
    }
}

/// `n` points evenly spaced in log₁₀ between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Two-node-per-unit-SNR collision scenario with `T_f = 1000`, `ρ = 2`,
/// `θ = 0.01`.
pub fn collision_scenario(n_nodes: u32) -> NetworkConfig {
    NetworkConfig::new(n_nodes, 2.0, 1000, 0.01).expect("valid scenario")
}

pub fn collision_link(n_nodes: u32) -> Link {
    Link::under_collision(&collision_scenario(n_nodes)).expect("valid link")
}

/// Random links with log-uniform SINR in [0.05, 10], log-uniform θ in
/// [1e-3, 0.2] and blocklength in [100, 2000).
pub fn random_links(seed: u64, count: usize) -> Vec<Link> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sinr = 10f64.powf(rng.gen_range(0.05f64.log10()..1.0));
            let theta = 10f64.powf(rng.gen_range(-3.0..0.2f64.log10()));
            let t = rng.gen_range(100..2000);
            Link::new(sinr, theta, t).expect("valid random link")
        })
        .collect()
}

/// Random error-probability targets, log-uniform in [1e-8, 0.3].
pub fn random_targets(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| 10f64.powf(rng.gen_range(-8.0..0.3f64.log10())))
        .collect()
}
