//! File formats: network/mixture configuration (JSON), sample windows
//! (CSV with a JSON sidecar for metadata), sweep results (CSV), and
//! generic JSON save/load for models, tags, and reports.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::MixtureSpec;
use crate::network::{build_canonical_cocycle, recover_gauges, CocycleNetwork, ScalingFamily};
use crate::spectral::{
    ObservationFunctional, SampleWindow, SectorSpec, SectorState, Tolerances, TransferMap,
};
use crate::stability::SweepRecord;

// ── Network configuration ──────────────────────────────────────────────────

/// On-disk description of a network problem. Either `lambda` (a scaling
/// matrix whose gauges are recovered against `reference`) or per-sector
/// `gauge` fields supply the time scales; `transfers` overrides the
/// canonical construction when present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub sectors: Vec<SectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfers: Option<Vec<TransferMap>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<SectorState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationFunctional>,
}

impl NetworkConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path, self)
    }

    /// Reference sector id: explicit field or the first sector.
    pub fn reference_id(&self) -> Result<u32> {
        self.reference
            .or_else(|| self.sectors.first().map(|s| s.id))
            .ok_or_else(|| Error::InvalidInput("config has no sectors".into()))
    }

    /// The scaling family, when a `lambda` matrix is present.
    pub fn scaling_family(&self) -> Result<Option<ScalingFamily>> {
        let Some(rows) = &self.lambda else {
            return Ok(None);
        };
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("lambda matrix is not square".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        ScalingFamily::new(m).map(Some)
    }

    /// Builds the transfer network. Explicit transfers win; otherwise
    /// gauges (recovered from `lambda` if needed) feed the canonical
    /// construction.
    pub fn build_network(&self, tol: &Tolerances) -> Result<CocycleNetwork> {
        if self.sectors.is_empty() {
            return Err(Error::InvalidInput("config has no sectors".into()));
        }
        if let Some(transfers) = &self.transfers {
            let net = CocycleNetwork::new(self.sectors.clone(), transfers.iter().cloned());
            let issues = net.validate(tol.eig);
            if !issues.is_empty() {
                return Err(Error::InvalidInput(issues.join("; ")));
            }
            return Ok(net);
        }
        let mut sectors = self.sectors.clone();
        if let Some(family) = self.scaling_family()? {
            if family.len() != sectors.len() {
                return Err(Error::InvalidInput(format!(
                    "lambda is {}x{} but there are {} sectors",
                    family.len(),
                    family.len(),
                    sectors.len()
                )));
            }
            let ref_id = self.reference_id()?;
            let ref_pos = sectors
                .iter()
                .position(|s| s.id == ref_id)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("reference sector {ref_id} not in config"))
                })?;
            let taus = recover_gauges(&family, ref_pos, tol.cocycle)?;
            for (s, tau) in sectors.iter_mut().zip(taus) {
                s.gauge = Some(tau);
            }
        }
        build_canonical_cocycle(&sectors, None, tol.eig)
    }

    /// Builds the full synthesis problem; requires states and observation.
    pub fn build_mixture(&self, tol: &Tolerances) -> Result<MixtureSpec> {
        let network = self.build_network(tol)?;
        if self.states.is_empty() {
            return Err(Error::InvalidInput("config has no states".into()));
        }
        let observation = self
            .observation
            .clone()
            .ok_or_else(|| Error::InvalidInput("config has no observation functional".into()))?;
        let spec = MixtureSpec {
            network,
            reference: self.reference_id()?,
            states: self.states.clone(),
            observation,
        };
        spec.validate(tol)?;
        Ok(spec)
    }
}

// ── Generic JSON ───────────────────────────────────────────────────────────

/// Pretty-prints any serializable value to a file, newline-terminated.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads any deserializable value from a JSON file.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

// ── Sample windows ─────────────────────────────────────────────────────────

/// Sidecar metadata stored next to a window CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSidecar {
    pub h: f64,
    pub noise_level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Path of the JSON sidecar belonging to a window CSV: same stem,
/// `.json` extension.
pub fn sidecar_path(csv_path: impl AsRef<Path>) -> PathBuf {
    csv_path.as_ref().with_extension("json")
}

/// Writes a window as CSV (`n,t,y_re,y_im`) plus its JSON sidecar.
pub fn write_window_csv(
    window: &SampleWindow,
    path: impl AsRef<Path>,
    seed: Option<u64>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "t", "y_re", "y_im"])?;
    for (n, v) in window.values.iter().enumerate() {
        w.write_record([
            n.to_string(),
            format!("{:.17e}", n as f64 * window.step),
            format!("{:.17e}", v.re),
            format!("{:.17e}", v.im),
        ])?;
    }
    w.flush()?;
    let sidecar = WindowSidecar {
        h: window.step,
        noise_level: window.noise_level,
        seed,
    };
    write_json(sidecar_path(path), &sidecar)
}

/// Reads a window CSV together with its sidecar.
pub fn read_window_csv(path: impl AsRef<Path>) -> Result<SampleWindow> {
    let path = path.as_ref();
    let sidecar: WindowSidecar = read_json(sidecar_path(path)).map_err(|e| {
        Error::InvalidInput(format!(
            "missing or unreadable sidecar {}: {e}",
            sidecar_path(path).display()
        ))
    })?;
    let mut rows: Vec<(usize, Complex64)> = Vec::new();
    let mut reader = csv::Reader::from_path(path)?;
    for record in reader.records() {
        let record = record?;
        if record.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "window row has {} fields, expected 4",
                record.len()
            )));
        }
        let parse = |idx: usize| -> Result<f64> {
            record[idx]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad number '{}': {e}", &record[idx])))
        };
        let n: usize = record[0]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad index '{}': {e}", &record[0])))?;
        rows.push((n, Complex64::new(parse(2)?, parse(3)?)));
    }
    rows.sort_by_key(|r| r.0);
    for (expect, &(n, _)) in rows.iter().enumerate() {
        if n != expect {
            return Err(Error::InvalidInput(format!(
                "window rows must cover 0..len contiguously; missing index {expect}"
            )));
        }
    }
    Ok(SampleWindow {
        step: sidecar.h,
        values: rows.into_iter().map(|r| r.1).collect(),
        noise_level: sidecar.noise_level,
    })
}

// ── Sweep results ──────────────────────────────────────────────────────────

/// Writes sweep records as CSV: `epsilon,trial,param_error,tag_ok,recon_ok`.
pub fn write_sweep_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epsilon", "trial", "param_error", "tag_ok", "recon_ok"])?;
    for rec in records {
        for trial in 0..rec.errors.len() {
            w.write_record([
                format!("{:e}", rec.epsilon),
                trial.to_string(),
                format!("{:.17e}", rec.errors[trial]),
                (rec.tag_ok[trial] as u8).to_string(),
                (rec.recon_ok[trial] as u8).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads sweep records back, grouping rows by their noise level in file
/// order.
pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut grouped: Vec<SweepRecord> = Vec::new();
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 5 {
            return Err(Error::InvalidInput(format!(
                "sweep row has {} fields, expected 5",
                record.len()
            )));
        }
        let epsilon: f64 = record[0]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad epsilon '{}': {e}", &record[0])))?;
        let error: f64 = record[2]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad error '{}': {e}", &record[2])))?;
        let tag_ok = record[3].trim() == "1";
        let recon_ok = record[4].trim() == "1";
        let key = epsilon.to_bits();
        let slot = *index.entry(key).or_insert_with(|| {
            grouped.push(SweepRecord {
                epsilon,
                errors: Vec::new(),
                tag_ok: Vec::new(),
                recon_ok: Vec::new(),
            });
            grouped.len() - 1
        });
        grouped[slot].errors.push(error);
        grouped[slot].tag_ok.push(tag_ok);
        grouped[slot].recon_ok.push(recon_ok);
    }
    Ok(grouped)
}
