"""Co-occurrence vector spaces, verb matrices learned against holistic
phrase vectors, unsupervised verb sense induction, and composition
benchmarks."""

from .compose import (
    MODEL_KINDS,
    CompositionModel,
    HolisticMissError,
    MissingResourceError,
    compose,
    pair_similarity,
)
from .config import (
    ConfigError,
    HolisticConfig,
    PathsConfig,
    PipelineConfig,
    config_hash,
    load_config,
    parse_config_text,
)
from .corpus import (
    CorpusFormatError,
    EmptyCorpusError,
    SemanticSpace,
    SpaceConfig,
    Token,
    Vocabulary,
    build_vocabulary,
    count_cooccurrences,
    normalize_rows,
    read_corpus,
    read_space_tsv,
    reduce_svd,
    svd_project,
    weight_lmi,
    write_space_tsv,
)
from .evaluation import (
    EvalReport,
    PhrasePair,
    SenseAnnotatedVerb,
    build_training_set,
    crossval_folds,
    read_phrase_sim_dataset,
    read_sense_dataset,
    run_similarity_task,
    run_supervised_task,
)
from .holistic import (
    HolisticPhraseSpace,
    PhraseInventory,
    RelationOccurrence,
    build_holistic_vectors,
    collect_phrases,
    read_relations,
)
from .metrics import (
    accuracy,
    avg_cosine,
    cosine,
    mrr,
    paired_significance,
    rank_of_correct,
    rho_contrast_significance,
    spearman_rho,
)
from .pipeline import (
    ArtifactLayout,
    HashMismatchError,
    MissingArtifactError,
    PipelineState,
    build_word_space,
    run_pipeline,
)
from .regression import (
    DivergenceError,
    RegressionConfig,
    SingularSystemError,
    TrainingSet,
    VerbMatrix,
    apply_verb,
    closed_form,
    gradient,
    loss,
    train_gd,
)
from .senses import (
    ClusterConfig,
    Dendrogram,
    SenseInventory,
    VerbOccurrence,
    assign_object,
    build_sense_inventory,
    hac_cluster,
    select_partition,
    variance_ratio,
)
from .synthetic import SyntheticSpec, generate_synthetic, write_synthetic

__version__ = "0.1.0"
