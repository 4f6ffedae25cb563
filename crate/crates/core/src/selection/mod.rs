//! Two-stage filter: Pearson redundancy removal, then mutual-information
//! relevance filtering, with the MI rank-and-pair diagnostic.

mod correlation;
mod filters;
mod info;
mod report;

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use filters::{
    mi_between, mi_rank_pair, mi_with_label, redundancy_filter, relevance_filter, RankPair, RedundancyDrop,
    RedundancyOutcome, RelevanceOutcome,
};
pub use info::{entropy, joint_entropy, mutual_information, mutual_information_from_entropies, DiscreteDistribution};
pub use report::{run_selection, SelectionConfig, SelectionReport};
