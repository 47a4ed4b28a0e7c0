"""skope: lattice-based spoken-language processing for agglutinative languages.

Pipeline stages, each usable on its own:

- phonology: phoneme inventory, Yale tokenization, syllables, diphones
- decoder: diphone spotting sequences -> phoneme lattice
- lattice: phoneme lattices and confusion-matrix error simulation
- morph: trie-driven morphological/phonological analysis over lattices
- grammar / relax: categorial grammar with unordered argument sets,
  chart-parse oracle, and interactive relaxation parsing
- cli / report: the `skope` command line and its tabular/figure reports
"""

from .errors import (
    ConfigError,
    DecodeError,
    DictionaryError,
    LatticeError,
    LexiconError,
    PhonologyError,
    SkopeError,
)
from .phonology import (
    Diphone,
    DiphoneInventory,
    Phoneme,
    PhonemeInventory,
    Syllable,
    classify_diphone,
    enumerate_diphones,
    load_inventory,
    parse_yale,
    syllabify,
)
from .decoder import (
    DecodeResult,
    DecoderConfig,
    DiphoneRun,
    SpottingFrame,
    decode,
    group_runs,
    load_frames,
    merge_to_phonemes,
    prune_insertions,
)
from .lattice import (
    ConfusionMatrix,
    PhonemeLattice,
    SimConfig,
    chain_count,
    enumerate_chains,
    read_lattices,
    simulate,
    write_lattices,
)
from .morph import (
    CompiledDictionary,
    MorphAnalysis,
    MorphemeEntry,
    MorphemeLattice,
    PosTag,
    Verdict,
    analyze,
    build_dictionary,
    connect,
    enroll,
    load_dictionary_entries,
    load_pairs,
    render,
)
from .grammar import (
    Basic,
    Category,
    Complex,
    Lexicon,
    LexiconEntry,
    ParseTree,
    chart_parse,
    left_cancel,
    parse_category,
    right_cancel,
)
from .relax import (
    GrammarNode,
    RelaxResult,
    RelaxationParams,
    RelaxationState,
    decay,
    generation_positions,
    load_params,
    parse,
    relax_step,
    spread_down,
    spread_up,
)
from .table import TriangularTable

__version__ = "0.1.0"
