//! Highway deployment: vehicles on a regular per-lane grid, gNB sites along
//! the road and the serving-cell relation between them.

use std::io::{self, Write};

use rand::Rng;
use serde::Serialize;

use crate::config::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    East,
    West,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::East => "east",
            Direction::West => "west",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vehicle {
    pub id: usize,
    pub lane: u32,
    pub direction: Direction,
    pub x_m: f64,
    pub y_m: f64,
}

impl Vehicle {
    pub fn distance_to(&self, other: &Vehicle) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnbSite {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone)]
pub struct Deployment {
    pub vehicles: Vec<Vehicle>,
    pub sites: Vec<GnbSite>,
    /// Serving site index per vehicle id.
    pub serving: Vec<usize>,
    pub ue_h: u32,
    pub ue_per_gnb: u32,
    /// Vehicle ids sorted by x, for range queries.
    by_x: Vec<usize>,
}

/// Vehicles that fit on one lane.
pub fn vehicles_per_lane(length_m: f64, ivd_m: f64) -> u32 {
    (length_m / ivd_m).floor() as u32
}

/// Nominal UE count of one cell: per-lane floor times lane count.
pub fn ue_per_gnb(isd_m: f64, ivd_m: f64, lanes: u32) -> u32 {
    vehicles_per_lane(isd_m, ivd_m) * lanes
}

/// Places the vehicles and sites. Each lane gets one uniform phase offset in
/// `[0, ivd)`; the grid spacing is exactly `ivd`.
pub fn generate_deployment<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Deployment {
    let per_lane = vehicles_per_lane(cfg.highway_length_m, cfg.ivd_m);
    let lanes = cfg.lanes();
    let mut vehicles = Vec::with_capacity((per_lane * lanes) as usize);
    for lane in 0..lanes {
        let direction = if lane < cfg.lanes_per_direction {
            Direction::East
        } else {
            Direction::West
        };
        let phase = rng.gen_range(0.0..cfg.ivd_m);
        let y_m = (f64::from(lane) + 0.5) * cfg.lane_width_m;
        for k in 0..per_lane {
            vehicles.push(Vehicle {
                id: vehicles.len(),
                lane,
                direction,
                x_m: phase + f64::from(k) * cfg.ivd_m,
                y_m,
            });
        }
    }

    // sites centred on the highway, on the median
    let n = cfg.num_gnb as usize;
    let centre = cfg.highway_length_m / 2.0;
    let sites: Vec<GnbSite> = (0..n)
        .map(|i| GnbSite {
            id: i,
            x_m: centre + (i as f64 - (n as f64 - 1.0) / 2.0) * cfg.isd_m,
            y_m: f64::from(cfg.lanes_per_direction) * cfg.lane_width_m,
            height_m: cfg.gnb_height_m,
        })
        .collect();

    Deployment::from_parts(
        vehicles,
        sites,
        per_lane * lanes,
        ue_per_gnb(cfg.isd_m, cfg.ivd_m, lanes),
    )
}

fn nearest_site(sites: &[GnbSite], x_m: f64) -> usize {
    sites
        .iter()
        .min_by(|a, b| {
            (a.x_m - x_m)
                .abs()
                .total_cmp(&(b.x_m - x_m).abs())
                .then(a.id.cmp(&b.id))
        })
        .map(|s| s.id)
        .expect("at least one site")
}

impl Deployment {
    /// Builds a deployment from explicit placements. Vehicle ids must equal
    /// their index; `sites` must be non-empty.
    pub fn from_parts(vehicles: Vec<Vehicle>, sites: Vec<GnbSite>, ue_h: u32, ue_per_gnb: u32) -> Self {
        assert!(!sites.is_empty(), "deployment needs at least one site");
        debug_assert!(vehicles.iter().enumerate().all(|(i, v)| v.id == i));
        let serving = vehicles.iter().map(|v| nearest_site(&sites, v.x_m)).collect();
        let mut by_x: Vec<usize> = (0..vehicles.len()).collect();
        by_x.sort_by(|&a, &b| vehicles[a].x_m.total_cmp(&vehicles[b].x_m).then(a.cmp(&b)));
        Self {
            vehicles,
            sites,
            serving,
            ue_h,
            ue_per_gnb,
            by_x,
        }
    }

    /// Vehicle ids served by `site`, ascending.
    pub fn cell_members(&self, site: usize) -> Vec<usize> {
        self.serving
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == site)
            .map(|(id, _)| id)
            .collect()
    }

    /// All other vehicles within `range_m` of `tx`, ascending by id.
    pub fn neighbors_in_range(&self, tx: usize, range_m: f64) -> Vec<usize> {
        let origin = &self.vehicles[tx];
        let lo = self
            .by_x
            .partition_point(|&id| self.vehicles[id].x_m < origin.x_m - range_m);
        let mut out: Vec<usize> = self.by_x[lo..]
            .iter()
            .copied()
            .take_while(|&id| self.vehicles[id].x_m <= origin.x_m + range_m)
            .filter(|&id| id != tx && origin.distance_to(&self.vehicles[id]) <= range_m)
            .collect();
        out.sort_unstable();
        out
    }

    /// Writes `id,lane,direction,x_m,y_m,serving_gnb` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "id,lane,direction,x_m,y_m,serving_gnb")?;
        for v in &self.vehicles {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{}",
                v.id,
                v.lane,
                v.direction.as_str(),
                v.x_m,
                v.y_m,
                self.serving[v.id]
            )?;
        }
        Ok(())
    }
}

/// Free-function form of [`Deployment::neighbors_in_range`].
pub fn neighbors_in_range(dep: &Deployment, tx: usize, range_m: f64) -> Vec<usize> {
    dep.neighbors_in_range(tx, range_m)
}
