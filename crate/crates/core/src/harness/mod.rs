//! Statistical-query oracles, baseline learners, the sample-splitting distinguisher and the
//! advantage-transfer check.

pub mod distinguish;
pub mod hybrid;
pub mod learners;
pub mod sq;

pub use distinguish::{
    advantage_estimate, distinguish, hoeffding_bound, AdvantageReport, DistinguisherVerdict, Verdict,
};
pub use hybrid::{advantage_transfer, random_distribution, TransferReport};
pub use learners::{
    lifted_training_fits, train_lifted_ptf, train_ltf, ConstantLearner, Hypothesis, Learner, LiftedPtfLearner, LtfLearner,
    OracleLearner,
};
pub use sq::{
    HclweSource, LineLaw, NullSource, PancakeSource, Query, Source, SqAnswer, SqMode, SqOracle,
};
