//! Per-drop simulation.
//!
//! Each cell's gNB assigns its vehicles to orthogonal (slot, chunk)
//! resources over one transmission period. Cells reuse the same resources,
//! so a link's interferers are the vehicles of the other cells scheduled on
//! the transmitter's resource. Every assigned transmitter is simulated once
//! per period against all vehicles in communication range.
//!
//! Random streams per drop `d` of a run seeded with `seed`: `4d` places the
//! vehicles, `4d + 1` shuffles the schedule, `4d + 2` draws shadowing and
//! `4d + 3` draws reception uniforms. Keeping reception draws on their own
//! stream makes runs that differ only in BLER share every channel draw.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{dbm_to_mw, mw_to_dbm, noise_power_dbm, LinkBudget};
use crate::config::{RetxScheme, SimConfig, SinrCombining};
use crate::l2sm::{BlerTable, ReceptionDraw};
use crate::metrics::{prr_runtime, PrrSample, RunResult};
use crate::phy::ResourcePlan;
use crate::scenario::{generate_deployment, Deployment};
use crate::Error;

/// One orthogonal transmission opportunity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Resource {
    pub phase: usize,
    pub slot: u32,
    pub chunk: u32,
}

/// Slots of the period owned by one transmission phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseWindow {
    pub share: f64,
    pub start_slot: u32,
    pub slots: u32,
}

#[derive(Debug, Clone)]
pub struct CellSchedule {
    pub site: usize,
    /// Per phase, vehicles in resource order: entry `i` sits at
    /// `(start + i / chunks_per_slot, i % chunks_per_slot)`.
    order: Vec<Vec<usize>>,
    chunks_per_slot: Vec<u32>,
    /// Vehicles beyond the cell's capacity, ascending.
    pub dropped: Vec<usize>,
}

impl CellSchedule {
    pub fn assigned(&self) -> &[usize] {
        &self.order[0]
    }

    pub fn chunks_per_slot(&self, phase: usize) -> u32 {
        self.chunks_per_slot[phase]
    }
}

#[derive(Debug, Clone)]
pub struct SlotSchedule {
    pub windows: Vec<PhaseWindow>,
    pub cells: Vec<CellSchedule>,
    /// Resources per vehicle, one per phase; empty for dropped vehicles.
    holdings: Vec<Vec<Resource>>,
}

impl SlotSchedule {
    pub fn resources_of(&self, vehicle: usize) -> &[Resource] {
        &self.holdings[vehicle]
    }

    pub fn is_dropped(&self, vehicle: usize) -> bool {
        self.holdings[vehicle].is_empty()
    }

    /// Vehicle of `cell` scheduled on `res`, if any.
    pub fn occupant(&self, cell: usize, res: Resource) -> Option<usize> {
        let c = &self.cells[cell];
        let window = self.windows.get(res.phase)?;
        let cps = c.chunks_per_slot[res.phase];
        if res.slot < window.start_slot || res.chunk >= cps {
            return None;
        }
        let idx = (res.slot - window.start_slot) as usize * cps as usize + res.chunk as usize;
        c.order[res.phase].get(idx).copied()
    }

    /// Co-resource transmitters in the other cells for `tx`'s `phase`
    /// transmission, in site order.
    pub fn co_channel(&self, dep: &Deployment, tx: usize, phase: usize) -> Vec<usize> {
        let Some(&res) = self.holdings[tx].get(phase) else {
            return Vec::new();
        };
        let own = dep.serving[tx];
        (0..self.cells.len())
            .filter(|&c| c != own)
            .filter_map(|c| self.occupant(c, res))
            .collect()
    }
}

/// Assigns each cell's vehicles to resources over one period.
///
/// Vehicles are taken in random order; the first `plan.ue_supported` are
/// assigned and the rest dropped. Retransmission schemes give each assigned
/// vehicle one resource in each phase window, the second phase in an
/// independent random order. A phase window holds at least
/// `plan.ue_per_slot` chunks per slot; a window too short for the assigned
/// vehicles packs more per slot (higher MCS).
pub fn schedule_slots<R: Rng + ?Sized>(
    dep: &Deployment,
    plan: &ResourcePlan,
    retx: RetxScheme,
    tf_hz: f64,
    rng: &mut R,
) -> SlotSchedule {
    let period = plan.slots_per_period(tf_hz);
    let mut windows = Vec::new();
    let mut start = 0u32;
    for share in retx.phase_shares() {
        // tolerance keeps 100 * 0.7 from rounding up to 71
        let slots = ((period * share - 1e-9).ceil() as u32).max(1);
        windows.push(PhaseWindow {
            share,
            start_slot: start,
            slots,
        });
        start += slots;
    }

    let mut holdings = vec![Vec::new(); dep.vehicles.len()];
    let mut cells = Vec::with_capacity(dep.sites.len());
    for site in 0..dep.sites.len() {
        let mut members = dep.cell_members(site);
        members.shuffle(rng);
        let n = members.len().min(plan.ue_supported as usize);
        let mut dropped = members.split_off(n);
        dropped.sort_unstable();

        let mut order = Vec::with_capacity(windows.len());
        let mut chunks_per_slot = Vec::with_capacity(windows.len());
        for (phase, window) in windows.iter().enumerate() {
            let mut phase_order = members.clone();
            if phase > 0 {
                phase_order.shuffle(rng);
            }
            let needed = n.div_ceil(window.slots as usize) as u32;
            let cps = plan.ue_per_slot.max(needed).max(1);
            for (i, &v) in phase_order.iter().enumerate() {
                holdings[v].push(Resource {
                    phase,
                    slot: window.start_slot + i as u32 / cps,
                    chunk: i as u32 % cps,
                });
            }
            order.push(phase_order);
            chunks_per_slot.push(cps);
        }
        cells.push(CellSchedule {
            site,
            order,
            chunks_per_slot,
            dropped,
        });
    }
    SlotSchedule {
        windows,
        cells,
        holdings,
    }
}

/// `10 log10(S / (sum I + N))` with all powers in dBm.
pub fn sinr_db(rx_signal_dbm: f64, interferers_dbm: &[f64], noise_dbm: f64) -> f64 {
    let denom: f64 = interferers_dbm.iter().map(|&i| dbm_to_mw(i)).sum::<f64>() + dbm_to_mw(noise_dbm);
    mw_to_dbm(dbm_to_mw(rx_signal_dbm) / denom)
}

/// Averages two SINRs. The linear form is evaluated as
/// `hi + 10 log10((1 + 10^((lo - hi)/10)) / 2)`, which returns `x` exactly
/// for two equal inputs.
pub fn combine_sinr_db(x1: f64, x2: f64, mode: SinrCombining) -> f64 {
    match mode {
        SinrCombining::Linear => {
            let (hi, lo) = if x1 >= x2 { (x1, x2) } else { (x2, x1) };
            hi + 10.0 * ((1.0 + 10f64.powf((lo - hi) / 10.0)) / 2.0).log10()
        }
        SinrCombining::Db => (x1 + x2) / 2.0,
    }
}

/// One receiver's view of a message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RxRecord {
    pub rx: usize,
    /// SINR of the first transmission (or of the phase, for nonequal).
    pub sinr_db_1: f64,
    /// SINR of the retransmission, equal scheme only.
    pub sinr_db_2: Option<f64>,
    pub bler: f64,
    pub received: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxOutcome {
    pub tx: usize,
    pub dropped: bool,
    /// Receiver records per evaluated phase: one phase for the single and
    /// equal schemes, two for nonequal.
    pub phases: Vec<Vec<RxRecord>>,
}

impl TxOutcome {
    fn dropped(tx: usize) -> Self {
        Self {
            tx,
            dropped: true,
            phases: Vec::new(),
        }
    }

    pub fn sample(&self, phase: usize) -> PrrSample {
        let records = &self.phases[phase];
        PrrSample {
            tx: self.tx,
            m: records.len() as u32,
            n: records.iter().filter(|r| r.received).count() as u32,
        }
    }
}

/// How receptions are judged for the configured scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkMode {
    Single { mcs: u8 },
    Equal { mcs: u8, delta_db: f64, combining: SinrCombining },
    /// Initial transmission on the plain curves, retransmission shifted.
    Nonequal { mcs: [u8; 2], delta_db: f64 },
}

impl LinkMode {
    pub fn for_config(cfg: &SimConfig, plan: &ResourcePlan) -> Self {
        let shares = cfg.retx_scheme.phase_shares();
        match cfg.retx_scheme {
            RetxScheme::None => LinkMode::Single {
                mcs: plan.cqi.cqi_index,
            },
            RetxScheme::Equal => LinkMode::Equal {
                mcs: plan.phase_cqi(shares[0]).cqi_index,
                delta_db: cfg.l2sm_delta_db,
                combining: cfg.sinr_combining,
            },
            RetxScheme::Nonequal(_) => LinkMode::Nonequal {
                mcs: [plan.phase_cqi(shares[0]).cqi_index, plan.phase_cqi(shares[1]).cqi_index],
                delta_db: cfg.l2sm_delta_db,
            },
        }
    }

    pub fn phase_count(&self) -> usize {
        match self {
            LinkMode::Nonequal { .. } => 2,
            _ => 1,
        }
    }
}

/// Everything one drop needs to evaluate links.
pub struct DropSim<'a> {
    pub cfg: &'a SimConfig,
    pub dep: &'a Deployment,
    pub sched: &'a SlotSchedule,
    pub tables: &'a BlerTable,
    pub budget: LinkBudget,
    pub noise_dbm: f64,
    pub mode: LinkMode,
}

impl<'a> DropSim<'a> {
    pub fn new(
        cfg: &'a SimConfig,
        plan: &ResourcePlan,
        dep: &'a Deployment,
        sched: &'a SlotSchedule,
        tables: &'a BlerTable,
    ) -> Result<Self, Error> {
        Ok(Self {
            cfg,
            dep,
            sched,
            tables,
            budget: LinkBudget::from_config(cfg)?,
            noise_dbm: noise_power_dbm(
                cfg.noise_density_dbm_hz,
                plan.nprb_pssch,
                plan.numerology.scs_hz(),
                cfg.noise_figure_db,
            ),
            mode: LinkMode::for_config(cfg, plan),
        })
    }

    fn receivers(&self, tx: usize) -> Vec<usize> {
        self.dep.neighbors_in_range(tx, self.cfg.comm_range_m)
    }

    /// SINR at `rx` of `tx`'s transmission in `phase`, with fresh shadowing
    /// on the wanted and every interfering link.
    fn link_sinr<R: Rng + ?Sized>(&self, tx: usize, rx: usize, phase: usize, interferers: &[usize], rng: &mut R) -> f64 {
        let vehicles = &self.dep.vehicles;
        let receiver = &vehicles[rx];
        let signal = self.budget.sample(rng, vehicles[tx].distance_to(receiver)).rx_power_dbm;
        let interference: Vec<f64> = interferers
            .iter()
            .filter(|&&i| i != rx)
            .map(|&i| self.budget.sample(rng, vehicles[i].distance_to(receiver)).rx_power_dbm)
            .collect();
        debug_assert!(phase < self.sched.windows.len());
        sinr_db(signal, &interference, self.noise_dbm)
    }

    fn bler(&self, mcs: u8, sinr: f64, delta_db: f64) -> f64 {
        self.tables
            .lookup(mcs, sinr, delta_db)
            .expect("CQI index is a valid MCS")
    }

    /// Single transmission on the unshifted curves.
    pub fn simulate_tx<R1: Rng + ?Sized, R2: Rng + ?Sized>(&self, tx: usize, mcs: u8, chan: &mut R1, draws: &mut R2) -> TxOutcome {
        if self.sched.is_dropped(tx) {
            return TxOutcome::dropped(tx);
        }
        let interferers = self.sched.co_channel(self.dep, tx, 0);
        let records = self
            .receivers(tx)
            .into_iter()
            .map(|rx| {
                let sinr = self.link_sinr(tx, rx, 0, &interferers, chan);
                let bler = self.bler(mcs, sinr, 0.0);
                RxRecord {
                    rx,
                    sinr_db_1: sinr,
                    sinr_db_2: None,
                    bler,
                    received: ReceptionDraw::sample(bler, draws).received,
                }
            })
            .collect();
        TxOutcome {
            tx,
            dropped: false,
            phases: vec![records],
        }
    }

    /// Transmission plus blind retransmission in the second half-period.
    /// The two SINRs are averaged before a single lookup on the shifted
    /// curves.
    pub fn simulate_tx_equal_retx<R1: Rng + ?Sized, R2: Rng + ?Sized>(
        &self,
        tx: usize,
        mcs: u8,
        delta_db: f64,
        combining: SinrCombining,
        chan: &mut R1,
        draws: &mut R2,
    ) -> TxOutcome {
        if self.sched.is_dropped(tx) {
            return TxOutcome::dropped(tx);
        }
        let first = self.sched.co_channel(self.dep, tx, 0);
        let second = self.sched.co_channel(self.dep, tx, 1);
        let records = self
            .receivers(tx)
            .into_iter()
            .map(|rx| {
                let x1 = self.link_sinr(tx, rx, 0, &first, chan);
                let x2 = self.link_sinr(tx, rx, 1, &second, chan);
                let bler = self.bler(mcs, combine_sinr_db(x1, x2, combining), delta_db);
                RxRecord {
                    rx,
                    sinr_db_1: x1,
                    sinr_db_2: Some(x2),
                    bler,
                    received: ReceptionDraw::sample(bler, draws).received,
                }
            })
            .collect();
        TxOutcome {
            tx,
            dropped: false,
            phases: vec![records],
        }
    }

    /// Transmission in the long window and retransmission in the short one,
    /// judged independently. Each phase keeps its own records.
    pub fn simulate_tx_nonequal_retx<R1: Rng + ?Sized, R2: Rng + ?Sized>(
        &self,
        tx: usize,
        mcs: [u8; 2],
        delta_db: f64,
        chan: &mut R1,
        draws: &mut R2,
    ) -> TxOutcome {
        if self.sched.is_dropped(tx) {
            return TxOutcome::dropped(tx);
        }
        let receivers = self.receivers(tx);
        let phases = (0..2)
            .map(|phase| {
                let interferers = self.sched.co_channel(self.dep, tx, phase);
                let delta = if phase == 0 { 0.0 } else { delta_db };
                receivers
                    .iter()
                    .map(|&rx| {
                        let sinr = self.link_sinr(tx, rx, phase, &interferers, chan);
                        let bler = self.bler(mcs[phase], sinr, delta);
                        RxRecord {
                            rx,
                            sinr_db_1: sinr,
                            sinr_db_2: None,
                            bler,
                            received: ReceptionDraw::sample(bler, draws).received,
                        }
                    })
                    .collect()
            })
            .collect();
        TxOutcome {
            tx,
            dropped: false,
            phases,
        }
    }

    /// Dispatches on the configured scheme.
    pub fn simulate<R1: Rng + ?Sized, R2: Rng + ?Sized>(&self, tx: usize, chan: &mut R1, draws: &mut R2) -> TxOutcome {
        match self.mode {
            LinkMode::Single { mcs } => self.simulate_tx(tx, mcs, chan, draws),
            LinkMode::Equal {
                mcs,
                delta_db,
                combining,
            } => self.simulate_tx_equal_retx(tx, mcs, delta_db, combining, chan, draws),
            LinkMode::Nonequal { mcs, delta_db } => self.simulate_tx_nonequal_retx(tx, mcs, delta_db, chan, draws),
        }
    }
}

/// A PRR sample tagged with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracedSample {
    pub drop: u32,
    pub phase: usize,
    pub sample: PrrSample,
}

/// A run's result plus every per-message sample behind it.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub result: RunResult,
    pub samples: Vec<TracedSample>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs `cfg.drops` independent drops for `seed` and keeps the samples.
pub fn run_traced(cfg: &SimConfig, seed: u64, tables: &BlerTable) -> Result<RunTrace, Error> {
    cfg.validate()?;
    let cfg = &SimConfig {
        seed,
        ..cfg.clone()
    };
    let plan = ResourcePlan::for_config(cfg)?;
    let phases = LinkMode::for_config(cfg, &plan).phase_count();
    let mut per_phase: Vec<Vec<PrrSample>> = vec![Vec::new(); phases];
    let mut samples = Vec::new();

    for drop in 0..cfg.drops {
        let base = 4 * u64::from(drop);
        let dep = generate_deployment(cfg, &mut stream(seed, base));
        let sched = schedule_slots(&dep, &plan, cfg.retx_scheme, cfg.tf_hz, &mut stream(seed, base + 1));
        let sim = DropSim::new(cfg, &plan, &dep, &sched, tables)?;
        let mut chan = stream(seed, base + 2);
        let mut draws = stream(seed, base + 3);
        for cell in &sched.cells {
            for &tx in cell.assigned() {
                let outcome = sim.simulate(tx, &mut chan, &mut draws);
                for (phase, bucket) in per_phase.iter_mut().enumerate() {
                    let sample = outcome.sample(phase);
                    bucket.push(sample);
                    samples.push(TracedSample { drop, phase, sample });
                }
            }
        }
    }

    let counted = per_phase[0].iter().filter(|s| s.m > 0).count();
    let phase_prr = per_phase.iter().map(|s| prr_runtime(s)).collect();
    Ok(RunTrace {
        result: RunResult::new(cfg, plan.prr_max, phase_prr, counted),
        samples,
    })
}

/// Runs one (config, seed) pair.
pub fn run_drop(cfg: &SimConfig, seed: u64, tables: &BlerTable) -> Result<RunResult, Error> {
    run_traced(cfg, seed, tables).map(|t| t.result)
}
