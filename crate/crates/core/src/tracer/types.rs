use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub n_rays: u64,
    pub master_seed: u64,
    pub quantum_yield: f64,
    pub max_bounces: u32,
}

impl Default for TraceConfig {
    fn default() -> Self {
        crate::scenario::Scenario::default().trace
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_rays == 0 {
            return Err(Error::config("trace.n_rays", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.quantum_yield) {
            return Err(Error::config("trace.quantum_yield", "must lie in [0, 1]"));
        }
        if self.max_bounces == 0 {
            return Err(Error::config("trace.max_bounces", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
    pub wavelength: f64,
    pub emitted_count: u32,
    pub bounce_count: u32,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3, wavelength: f64) -> Self {
        Ray { origin, dir, wavelength, emitted_count: 0, bounce_count: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    Detector,
    WgLoss,
    QdLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Outcome {
    pub tag: Tag,
    /// Re-emitted by a dot at least once.
    pub emitted: bool,
}

/// Wavelength bands of the emitted-ray breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Band {
    /// λ ≤ 650 nm
    Visible,
    /// 650 < λ ≤ 800 nm
    Red,
    /// λ > 800 nm
    Infrared,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Visible, Band::Red, Band::Infrared];

    pub fn of(wavelength_nm: f64) -> Band {
        if wavelength_nm <= 650.0 {
            Band::Visible
        } else if wavelength_nm <= 800.0 {
            Band::Red
        } else {
            Band::Infrared
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::Visible => "<=650nm",
            Band::Red => "650-800nm",
            Band::Infrared => ">800nm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TagCounts {
    pub non_emitted: u64,
    pub emitted: u64,
}

impl TagCounts {
    fn add(&mut self, o: &TagCounts) {
        self.non_emitted += o.non_emitted;
        self.emitted += o.emitted;
    }

    pub fn total(&self) -> u64 {
        self.non_emitted + self.emitted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BandCounts {
    pub detector: u64,
    pub wg_loss: u64,
    pub qd_loss: u64,
}

impl BandCounts {
    pub fn total(&self) -> u64 {
        self.detector + self.wg_loss + self.qd_loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Diagnostics {
    /// Rays stopped by `max_bounces` (counted as WG loss).
    pub bounce_cap: u64,
    /// Rays aborted by a geometry inconsistency (counted as WG loss).
    pub geometry_errors: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OutcomeTally {
    pub detector: TagCounts,
    pub wg_loss: TagCounts,
    pub qd_loss: TagCounts,
    /// Emitted rays by final wavelength band, indexed by [`Band::index`].
    pub emitted_bands: [BandCounts; 3],
    pub diagnostics: Diagnostics,
}

impl OutcomeTally {
    pub fn record(&mut self, outcome: Outcome, wavelength_nm: f64) {
        let counts = match outcome.tag {
            Tag::Detector => &mut self.detector,
            Tag::WgLoss => &mut self.wg_loss,
            Tag::QdLoss => &mut self.qd_loss,
        };
        if outcome.emitted {
            counts.emitted += 1;
            let band = &mut self.emitted_bands[Band::of(wavelength_nm).index()];
            match outcome.tag {
                Tag::Detector => band.detector += 1,
                Tag::WgLoss => band.wg_loss += 1,
                Tag::QdLoss => band.qd_loss += 1,
            }
        } else {
            counts.non_emitted += 1;
        }
    }

    pub fn merge(&mut self, o: &OutcomeTally) {
        self.detector.add(&o.detector);
        self.wg_loss.add(&o.wg_loss);
        self.qd_loss.add(&o.qd_loss);
        for (a, b) in self.emitted_bands.iter_mut().zip(&o.emitted_bands) {
            a.detector += b.detector;
            a.wg_loss += b.wg_loss;
            a.qd_loss += b.qd_loss;
        }
        self.diagnostics.bounce_cap += o.diagnostics.bounce_cap;
        self.diagnostics.geometry_errors += o.diagnostics.geometry_errors;
    }

    pub fn count(&self, tag: Tag, emitted: bool) -> u64 {
        let c = match tag {
            Tag::Detector => self.detector,
            Tag::WgLoss => self.wg_loss,
            Tag::QdLoss => self.qd_loss,
        };
        if emitted {
            c.emitted
        } else {
            c.non_emitted
        }
    }

    pub fn total(&self) -> u64 {
        self.detector.total() + self.wg_loss.total() + self.qd_loss.total()
    }

    pub fn emitted_total(&self) -> u64 {
        self.detector.emitted + self.wg_loss.emitted + self.qd_loss.emitted
    }

    /// Fraction of first absorptions that ended non-radiatively.
    pub fn qd_loss_ratio(&self) -> f64 {
        let loss = self.qd_loss.non_emitted as f64;
        loss / (loss + self.emitted_total() as f64)
    }

    /// WG-loss fraction within the emitted (`true`) or non-emitted subset.
    pub fn wg_loss_fraction(&self, emitted: bool) -> f64 {
        let subset = if emitted { self.emitted_total() } else { self.total() - self.emitted_total() };
        self.count(Tag::WgLoss, emitted) as f64 / subset as f64
    }

    pub fn report(&self) -> OutcomeReport {
        let total = self.total();
        let pct = |n: u64| if total == 0 { 0.0 } else { 100.0 * n as f64 / total as f64 };
        let bands = Band::ALL.map(|b| {
            let c = self.emitted_bands[b.index()];
            BandReport {
                band: b.label(),
                total_pct: pct(c.total()),
                detector_pct: pct(c.detector),
                wg_loss_pct: pct(c.wg_loss),
                qd_loss_pct: pct(c.qd_loss),
            }
        });
        OutcomeReport {
            total,
            detector_pct: pct(self.detector.non_emitted),
            emission_pct: pct(self.emitted_total()),
            qd_loss_pct: pct(self.qd_loss.non_emitted),
            wg_loss_pct: pct(self.wg_loss.non_emitted),
            emitted_bands: bands,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandReport {
    pub band: &'static str,
    pub total_pct: f64,
    pub detector_pct: f64,
    pub wg_loss_pct: f64,
    pub qd_loss_pct: f64,
}

/// Stacked breakdown of a run: "Detector", "Emission", "QD loss" and
/// "WG loss" partition all rays; emitted rays are further split by band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub total: u64,
    pub detector_pct: f64,
    pub emission_pct: f64,
    pub qd_loss_pct: f64,
    pub wg_loss_pct: f64,
    pub emitted_bands: [BandReport; 3],
}

impl OutcomeReport {
    pub fn rows(&self) -> [(&'static str, f64); 4] {
        [
            ("Detector", self.detector_pct),
            ("Emission", self.emission_pct),
            ("QD loss", self.qd_loss_pct),
            ("WG loss", self.wg_loss_pct),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorRecord {
    pub wavelength_nm: f64,
    pub r_norm: f64,
    pub p_perp: f64,
    pub p_par: f64,
    pub emitted_count: u32,
}
