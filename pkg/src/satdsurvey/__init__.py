"""satdsurvey: active-learning survey engine for relabeling self-admitted
technical debt corpora at minimal reading cost.

The library ranks unread comments by a classifier trained on prior
projects plus the reviewer's feedback, estimates how many debt comments
remain, and stops once a target share of the estimate has been confirmed.
"""

from .corpus import Comment, Corpus, binarize_labels, discover_corpora, leave_one_out, load_corpus
from .estimator import Estimate, EstimateInput, estimate_total, redistribute
from .harness import (
    RigConfig,
    RigResult,
    classify_only_recall,
    classify_only_table,
    cost,
    emit_report,
    overhead_percent,
    recall,
    run_standard_rig,
)
from .learners import (
    LinearModel,
    LogisticCurve,
    SvmConfig,
    TreeEnsemble,
    decision_function,
    ensemble_votes,
    fit_logistic,
    train_ensemble,
    train_linear_svm,
)
from .ranking import Ranking, normalize, rank_by_svm, rank_by_votes
from .stopping import (
    CormackRule,
    RetrievalCurve,
    RosRule,
    StoppingDecision,
    TargetRule,
    cormack_rule,
    kneedle,
    parse_stop_spec,
    ros_rule,
    target_rule,
)
from .survey import (
    IterationReport,
    SurveyConfig,
    SurveySession,
    new_session,
    replay_session,
    simulated_oracle,
)
from .textprep import Vocabulary, fit_vocabulary, tokenize, transform

__version__ = "0.1.0"
