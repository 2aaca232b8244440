"""Writing evaluation model: encoder, attention branch, training, prediction."""

from .model import (  # noqa: F401
    Hyper,
    ModelConfig,
    Scaler,
    ScoringModel,
    round_half_up,
)
from .predict import RubricReport, TopFeature, predict, top_features  # noqa: F401
from .train import (  # noqa: F401
    TrainItem,
    TrainResult,
    checkpoint_from_dict,
    checkpoint_to_dict,
    dataset_mse,
    load_checkpoint,
    save_checkpoint,
    train,
)
