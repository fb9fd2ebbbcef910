//! Bundled reference data: the three-limb example robot and its tabletop
//! reward table (the contents of `data/appendixB_tabletop.csv`).

use crate::graph::TransitionGraph;
use crate::rewards::{load_reward_table, RewardTable};
use crate::state_space::RobotSpec;

/// `data/appendixB_tabletop.csv`: measured transition rewards for the
/// three-limb robot on a smooth tabletop, one row per ordered state pair.
pub const TABLETOP_REWARDS_CSV: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/appendixB_tabletop.csv"));

/// `data/three_limb_robot.json`.
pub const THREE_LIMB_ROBOT_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/three_limb_robot.json"));

/// The reference robot: three binary friction subsystems, eight states.
pub fn three_limb_robot() -> RobotSpec {
    RobotSpec::from_json(THREE_LIMB_ROBOT_JSON).expect("bundled spec parses")
}

/// The bundled tabletop reward table (56 entries).
pub fn tabletop_rewards() -> RewardTable {
    load_reward_table(TABLETOP_REWARDS_CSV.as_bytes(), &three_limb_robot())
        .expect("bundled table parses")
        .table
        .with_surface("tabletop")
}

/// Complete transition graph of the reference robot with tabletop rewards.
pub fn tabletop_graph() -> TransitionGraph {
    TransitionGraph::complete(&three_limb_robot(), &tabletop_rewards())
        .expect("bundled data is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_covers_all_ordered_pairs() {
        let spec = three_limb_robot();
        let table = tabletop_rewards();
        assert_eq!(table.len(), 56);
        assert!(table.missing_pairs(&spec).is_empty());
        assert_eq!(table.surface(), Some("tabletop"));
    }

    #[test]
    fn bundled_graph_shape() {
        let graph = tabletop_graph();
        assert_eq!(graph.node_count(), 8);
        assert_eq!(graph.arc_count(), 56);
        assert_eq!(graph.enabled_arc_count(), 56);
    }
}
