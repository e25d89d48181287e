//! Ground-truth world registry and the radio environment map (REM) view of it.
//!
//! The world holds the true users and interferers. A [`RemPolicy`] degrades
//! what the satellite sees: snapshots refresh only every `update_interval_s`
//! (staleness), may cover only Q of the J interferers (partial knowledge),
//! and may displace each reported interferer position by a fixed ground
//! distance in a seeded-random bearing (localization error). Users are always
//! reported exactly; only interferer knowledge degrades.

use crate::error::{Error, Result};
use crate::geom::{ecef_to_arrival, ground_displace, ArrivalDirection, EcefPosition};
use crate::seeds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

const STREAM_BEARING: u64 = 0xbea7;
const STREAM_SUBSET: u64 = 0x5b5e;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    User,
    Interferer,
}

/// A fixed ground emitter known to the world registry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundNode {
    pub id: u32,
    pub role: NodeRole,
    pub position: EcefPosition,
    pub eirp_w: f64,
    pub carrier_hz: f64,
}

/// True state of the ground segment: K users and J interferers, static in
/// ECEF.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    users: Vec<GroundNode>,
    interferers: Vec<GroundNode>,
}

impl WorldState {
    pub fn new(nodes: Vec<GroundNode>) -> Result<Self> {
        let mut ids: Vec<u32> = nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidWorld("node ids must be unique".into()));
        }
        if nodes.iter().any(|n| !(n.eirp_w > 0.0)) {
            return Err(Error::InvalidWorld("node EIRPs must be positive".into()));
        }
        let users: Vec<GroundNode> = nodes
            .iter()
            .filter(|n| n.role == NodeRole::User)
            .copied()
            .collect();
        let interferers: Vec<GroundNode> = nodes
            .iter()
            .filter(|n| n.role == NodeRole::Interferer)
            .copied()
            .collect();
        if users.is_empty() {
            return Err(Error::InvalidWorld("world needs at least one user".into()));
        }
        Ok(Self { users, interferers })
    }

    pub fn users(&self) -> &[GroundNode] {
        &self.users
    }

    pub fn interferers(&self) -> &[GroundNode] {
        &self.interferers
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_interferers(&self) -> usize {
        self.interferers.len()
    }
}

/// How many interferers the REM knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownInterferers {
    All,
    Count(usize),
}

impl KnownInterferers {
    fn resolve(&self, total: usize) -> usize {
        match self {
            KnownInterferers::All => total,
            KnownInterferers::Count(q) => (*q).min(total),
        }
    }
}

/// REM fidelity policy: update interval, interferer coverage, and
/// localization error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemPolicy {
    pub update_interval_s: f64,
    pub known_interferers: KnownInterferers,
    pub position_error_km: f64,
    pub error_seed: u64,
    /// When set, the known-interferer subset is redrawn at every update
    /// instead of being the fixed lowest-id subset.
    pub random_subset: bool,
}

impl RemPolicy {
    pub fn new(
        update_interval_s: f64,
        known_interferers: KnownInterferers,
        position_error_km: f64,
        error_seed: u64,
    ) -> Result<Self> {
        if !(update_interval_s > 0.0) {
            return Err(Error::InvalidPolicy(format!(
                "update_interval_s = {update_interval_s} must be positive"
            )));
        }
        if !(position_error_km >= 0.0) {
            return Err(Error::InvalidPolicy(format!(
                "position_error_km = {position_error_km} must be non-negative"
            )));
        }
        Ok(Self {
            update_interval_s,
            known_interferers,
            position_error_km,
            error_seed,
            random_subset: false,
        })
    }

    /// Perfect view: snapshots equal the world at every query.
    pub fn perfect(update_interval_s: f64) -> Result<Self> {
        Self::new(update_interval_s, KnownInterferers::All, 0.0, 0)
    }
}

/// A node as reported by the REM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedNode {
    pub id: u32,
    pub position: EcefPosition,
    pub eirp_w: f64,
}

impl ReportedNode {
    fn exact(node: &GroundNode) -> Self {
        Self {
            id: node.id,
            position: node.position,
            eirp_w: node.eirp_w,
        }
    }
}

/// The REM's answer at a query instant: the latest update at or before it.
#[derive(Debug, Clone, PartialEq)]
pub struct RemSnapshot {
    pub timestamp_s: f64,
    pub reported_users: Vec<ReportedNode>,
    pub reported_interferers: Vec<ReportedNode>,
}

/// Returns the snapshot the REM serves at time `t`.
///
/// The snapshot is frozen per update index i = floor(t / dt): repeated
/// queries inside one interval are identical, and error bearings are drawn
/// from a generator keyed on (error_seed, node id, i) so they are stable per
/// node and update.
pub fn query(world: &WorldState, policy: &RemPolicy, t_s: f64) -> RemSnapshot {
    let update_index = (t_s / policy.update_interval_s).floor().max(0.0) as u64;
    let timestamp_s = update_index as f64 * policy.update_interval_s;

    let reported_users = world.users.iter().map(ReportedNode::exact).collect();

    let mut known: Vec<&GroundNode> = world.interferers.iter().collect();
    known.sort_by_key(|n| n.id);
    let q = policy.known_interferers.resolve(known.len());
    let selected: Vec<&GroundNode> = if q == known.len() {
        known
    } else if policy.random_subset {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive2(
            policy.error_seed,
            STREAM_SUBSET,
            update_index,
        ));
        let mut pool = known;
        // Partial Fisher-Yates: the first q slots become the draw.
        for slot in 0..q {
            let pick = rng.gen_range(slot..pool.len());
            pool.swap(slot, pick);
        }
        let mut chosen: Vec<&GroundNode> = pool.into_iter().take(q).collect();
        chosen.sort_by_key(|n| n.id);
        chosen
    } else {
        known.into_iter().take(q).collect()
    };

    let reported_interferers = selected
        .into_iter()
        .map(|node| {
            let mut reported = ReportedNode::exact(node);
            if policy.position_error_km > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive3(
                    policy.error_seed,
                    STREAM_BEARING,
                    node.id as u64,
                    update_index,
                ));
                let bearing = rng.gen_range(0.0..TAU);
                reported.position =
                    ground_displace(node.position, policy.position_error_km, bearing);
            }
            reported
        })
        .collect();

    RemSnapshot {
        timestamp_s,
        reported_users,
        reported_interferers,
    }
}

/// True and estimated arrival directions for a node whose reported position
/// may differ from the truth. The estimated direction is what the optimizer
/// sees; the true one is what evaluation uses.
pub fn perturbed_arrival(
    sat: EcefPosition,
    true_position: EcefPosition,
    reported_position: EcefPosition,
) -> Result<(ArrivalDirection, ArrivalDirection)> {
    let true_dir = ecef_to_arrival(sat, true_position)?;
    let estimated_dir = ecef_to_arrival(sat, reported_position)?;
    Ok((true_dir, estimated_dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{great_circle_distance_km, EARTH_RADIUS_KM};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn node(id: u32, role: NodeRole, lat: f64, lon: f64) -> GroundNode {
        GroundNode {
            id,
            role,
            position: EcefPosition::from_lat_lon(lat, lon, 0.0),
            eirp_w: 10.0,
            carrier_hz: 1.575e9,
        }
    }

    fn world_2x4() -> WorldState {
        WorldState::new(vec![
            node(0, NodeRole::User, 0.0, 0.0),
            node(1, NodeRole::User, 1.0, 1.0),
            node(10, NodeRole::Interferer, 0.5, 0.5),
            node(11, NodeRole::Interferer, -0.5, 0.7),
            node(12, NodeRole::Interferer, 0.3, -0.8),
            node(13, NodeRole::Interferer, -0.2, -0.4),
        ])
        .unwrap()
    }

    #[test]
    fn world_rejects_duplicate_ids_and_missing_users() {
        assert!(WorldState::new(vec![
            node(0, NodeRole::User, 0.0, 0.0),
            node(0, NodeRole::Interferer, 1.0, 1.0),
        ])
        .is_err());
        assert!(WorldState::new(vec![node(0, NodeRole::Interferer, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn perfect_policy_reports_world_exactly() {
        let world = world_2x4();
        let policy = RemPolicy::perfect(5.0).unwrap();
        let snap = query(&world, &policy, 12.3);
        assert_abs_diff_eq!(snap.timestamp_s, 10.0, epsilon = 1e-12);
        assert_eq!(snap.reported_users.len(), 2);
        assert_eq!(snap.reported_interferers.len(), 4);
        for (reported, truth) in snap.reported_interferers.iter().zip(world.interferers()) {
            assert_eq!(reported.position, truth.position);
            assert_eq!(reported.id, truth.id);
        }
    }

    #[test]
    fn partial_policy_reports_lowest_ids() {
        let world = world_2x4();
        let mut policy = RemPolicy::perfect(5.0).unwrap();
        policy.known_interferers = KnownInterferers::Count(2);
        let snap = query(&world, &policy, 0.0);
        assert_eq!(snap.reported_interferers.len(), 2);
        assert_eq!(snap.reported_interferers[0].id, 10);
        assert_eq!(snap.reported_interferers[1].id, 11);
    }

    #[test]
    fn random_subset_is_frozen_per_update() {
        let world = world_2x4();
        let mut policy = RemPolicy::new(5.0, KnownInterferers::Count(2), 0.0, 77).unwrap();
        policy.random_subset = true;
        let a = query(&world, &policy, 1.0);
        let b = query(&world, &policy, 4.9);
        assert_eq!(a, b);
        // Across many updates the subset varies.
        let mut seen_different = false;
        for i in 1..20 {
            let s = query(&world, &policy, 5.0 * i as f64);
            if s.reported_interferers != a.reported_interferers {
                seen_different = true;
            }
            assert_eq!(s.reported_interferers.len(), 2);
        }
        assert!(seen_different, "random subsets never changed across updates");
    }

    #[test]
    fn query_is_constant_within_an_update_interval() {
        let world = world_2x4();
        let policy = RemPolicy::new(5.0, KnownInterferers::All, 40.0, 3).unwrap();
        let a = query(&world, &policy, 5.0);
        let b = query(&world, &policy, 9.999);
        assert_eq!(a, b);
        let c = query(&world, &policy, 10.0);
        assert_ne!(a, c, "new interval should redraw error bearings");
    }

    #[test]
    fn position_error_displaces_by_exact_ground_distance() {
        let world = world_2x4();
        let policy = RemPolicy::new(5.0, KnownInterferers::All, 100.0, 5).unwrap();
        let snap = query(&world, &policy, 0.0);
        for (reported, truth) in snap.reported_interferers.iter().zip(world.interferers()) {
            let d = great_circle_distance_km(truth.position, reported.position);
            assert_relative_eq!(d, 100.0, max_relative = 1e-9);
        }
        // Users stay exact.
        for (reported, truth) in snap.reported_users.iter().zip(world.users()) {
            assert_eq!(reported.position, truth.position);
        }
    }

    #[test]
    fn zero_error_reproduces_truth() {
        let world = world_2x4();
        let policy = RemPolicy::new(1.0, KnownInterferers::All, 0.0, 5).unwrap();
        let snap = query(&world, &policy, 3.7);
        for (reported, truth) in snap.reported_interferers.iter().zip(world.interferers()) {
            assert_eq!(reported.position, truth.position);
        }
    }

    #[test]
    fn perturbed_arrival_identity_when_reported_equals_truth() {
        let sat = EcefPosition::from_lat_lon(0.0, 0.0, 800.0);
        let ground = EcefPosition::from_lat_lon(2.0, 1.0, 0.0);
        let (true_dir, est_dir) = perturbed_arrival(sat, ground, ground).unwrap();
        assert_eq!(true_dir, est_dir);
    }

    #[test]
    fn nadir_displacement_maps_to_flat_triangle_angle() {
        // 100 km ground displacement seen from 800 km overhead: the off-nadir
        // error is close to atan(100 / 800); the spherical drop keeps it
        // slightly above the flat-Earth value.
        let sat = EcefPosition::from_lat_lon(0.0, 0.0, 800.0);
        let ground = EcefPosition::from_lat_lon(0.0, 0.0, 0.0);
        let reported = ground_displace(ground, 100.0, 0.3);
        let (true_dir, est_dir) = perturbed_arrival(sat, ground, reported).unwrap();
        assert_abs_diff_eq!(true_dir.off_nadir_rad, 0.0, epsilon = 1e-12);
        let flat = (100.0_f64 / 800.0).atan();
        assert_relative_eq!(est_dir.off_nadir_rad, flat, max_relative = 0.02);
    }

    #[test]
    fn angle_error_shrinks_with_altitude() {
        let ground = EcefPosition::from_lat_lon(0.0, 0.0, 0.0);
        let reported = ground_displace(ground, 100.0, 0.0);
        let mut last = f64::INFINITY;
        for alt in [400.0, 800.0, 1600.0] {
            let sat = EcefPosition::from_lat_lon(0.0, 0.0, alt);
            let (_t, e) = perturbed_arrival(sat, ground, reported).unwrap();
            assert!(e.off_nadir_rad < last, "angle error failed to shrink at {alt} km");
            last = e.off_nadir_rad;
        }
    }

    #[test]
    fn q_larger_than_j_clamps_to_all() {
        let world = world_2x4();
        let policy = RemPolicy::new(5.0, KnownInterferers::Count(9), 0.0, 0).unwrap();
        let snap = query(&world, &policy, 0.0);
        assert_eq!(snap.reported_interferers.len(), 4);
    }

    #[test]
    fn timestamps_are_exact_interval_multiples() {
        let world = world_2x4();
        let policy = RemPolicy::perfect(0.7).unwrap();
        for i in 0..50 {
            let t = 0.7 * i as f64 + 0.35;
            let snap = query(&world, &policy, t);
            let ratio = snap.timestamp_s / 0.7;
            assert_abs_diff_eq!(ratio, ratio.round(), epsilon = 1e-9);
        }
    }

    #[test]
    fn displaced_latitude_scale_sanity() {
        // One degree of geocentric arc is about 111.2 km on the model sphere.
        assert_relative_eq!(
            EARTH_RADIUS_KM.to_radians(),
            111.194,
            max_relative = 1e-3
        );
    }
}
