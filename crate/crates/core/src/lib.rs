pub mod error;
pub mod beliefs;
pub mod cli;
pub mod counterexample;
pub mod distance;
pub mod exactlp;
pub mod fixtures;
pub mod game_value;
pub mod random;
pub mod structures;
pub mod weak_metric;

pub use error::{Error, Result};
pub use exactlp::{q, Rational};
pub use structures::{
    canonicalize, garble_p1, garble_p2, l1_distance, scalar_product, Garbling, InfoStructure, PayoffStructure,
    Player, Signal,
};
pub use game_value::{bayesian_value, best_response_value, decision_value, BehaviorStrategy, GameSolution};
pub use distance::{
    blackwell_compare_1p, compare, one_sided_deviation, transfer_strategy, value_distance, witness_payoff, Deviation,
    DistanceReport, Order, OrderCertificate,
};
pub use beliefs::{belief_partition, hierarchy_distribution, hierarchy_equal, Belief, HierarchyDistribution, TypePartition};
pub use weak_metric::{enumerate_payoff, weak_distance, PayoffEnumeration, WeakDistance};
