"""slotforge: turn slot-annotated call corpora into SFT datasets and score them.

Pipeline surface:

- :mod:`slotforge.corpus`          -- load/validate/split JSONL call corpora
- :mod:`slotforge.annotator`       -- whole-call annotation prompts + clients
- :mod:`slotforge.prompt_forge`    -- regular instruction examples
- :mod:`slotforge.reasoning_forge` -- chain-of-thought and hybrid datasets
- :mod:`slotforge.genparse`        -- lenient parsing of model generations
- :mod:`slotforge.slotmetrics`     -- partial-match precision/recall/F1
- :mod:`slotforge.adapter_sim`     -- frame-stacked MLP adapter reference model
- :mod:`slotforge.report`          -- run comparison and relative-gain tables
- :mod:`slotforge.cli`             -- the ``slotforge`` command
"""

__version__ = "0.1.0"

from ._kernels import KERNEL_BACKEND
from .corpus import Call, Turn, build_vocabulary, load_corpus, save_corpus, split_corpus
from .genparse import parse_generation
from .prompt_forge import ForgeConfig, InstructionExample, forge_regular_dataset
from .reasoning_forge import forge_hybrid_dataset, forge_reasoning_dataset
from .slotmetrics import MatchConfig, aggregate, harmonic_f1, score_dataset, score_example

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "Call",
    "Turn",
    "build_vocabulary",
    "load_corpus",
    "save_corpus",
    "split_corpus",
    "parse_generation",
    "ForgeConfig",
    "InstructionExample",
    "forge_regular_dataset",
    "forge_reasoning_dataset",
    "forge_hybrid_dataset",
    "MatchConfig",
    "aggregate",
    "harmonic_f1",
    "score_dataset",
    "score_example",
]
