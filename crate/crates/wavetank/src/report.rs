//! Energy comparison tables and run-time accounting.

use std::time::Duration;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub label: String,
    pub e_drl: f64,
    pub e_base: f64,
    pub delta: f64,
    /// `ΔE / E0 × 100`.
    pub improvement_pct: f64,
}

impl EnergyRow {
    fn new(label: String, e_drl: f64, e_base: f64) -> Self {
        let delta = e_drl - e_base;
        let improvement_pct = if e_base != 0.0 { 100.0 * delta / e_base } else { 0.0 };
        EnergyRow { label, e_drl, e_base, delta, improvement_pct }
    }
}

/// Per-agent absorbed energy under the trained policy and the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub agents: Vec<EnergyRow>,
    pub total: EnergyRow,
}

impl EnergyReport {
    pub fn new(e_drl: &[f64], e_base: &[f64]) -> Self {
        let agents: Vec<EnergyRow> = e_drl
            .iter()
            .zip(e_base)
            .enumerate()
            .map(|(k, (&d, &b))| EnergyRow::new(format!("PA{}", k + 1), d, b))
            .collect();
        let total = EnergyRow::new(
            "total".into(),
            agents.iter().map(|r| r.e_drl).sum(),
            agents.iter().map(|r| r.e_base).sum(),
        );
        EnergyReport { agents, total }
    }

    /// Same data with the roles of trained and baseline runs exchanged.
    pub fn swapped(&self) -> Self {
        let d: Vec<f64> = self.agents.iter().map(|r| r.e_base).collect();
        let b: Vec<f64> = self.agents.iter().map(|r| r.e_drl).collect();
        EnergyReport::new(&d, &b)
    }
}

/// Wall time split of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RuntimeReport {
    pub sph: Duration,
    pub rl: Duration,
    pub io: Duration,
    pub total: Duration,
    pub particles: usize,
}

impl RuntimeReport {
    /// Fractions of `total` for SPH, RL and I/O.
    pub fn shares(&self) -> (f64, f64, f64) {
        let t = self.total.as_secs_f64();
        if t == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        (self.sph.as_secs_f64() / t, self.rl.as_secs_f64() / t, self.io.as_secs_f64() / t)
    }
}

/// Builds the report from measured SPH and I/O time and the wall total;
/// whatever the total does not attribute to those goes to RL when RL ran.
pub fn runtime_report(sph: Duration, io: Duration, total: Duration, rl_active: bool, particles: usize) -> RuntimeReport {
    let rest = total.saturating_sub(sph + io);
    if rl_active {
        RuntimeReport { sph, rl: rest, io, total, particles }
    } else {
        RuntimeReport { sph: sph + rest, rl: Duration::ZERO, io, total, particles }
    }
}
