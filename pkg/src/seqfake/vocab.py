"""Manipulation label vocabularies and sequence tokenization rules.

A vocabulary holds an ordered list of manipulation labels plus five special
tokens. Label ids are 0..V-1 in list order; specials occupy the ids directly
above so that the decoder classifier can use indices 0..V (labels + EOS)
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_SEQ_LEN = 5

COMPONENT_LABELS = ("nose", "eye", "eyebrow", "lip", "hair")
ATTRIBUTE_LABELS = ("bangs", "eyeglasses", "beard", "smiling", "young")

TRACKS = {
    "components": COMPONENT_LABELS,
    "attributes": ATTRIBUTE_LABELS,
}


class VocabularyError(ValueError):
    """Unknown label name/id or malformed sequence."""


@dataclass(frozen=True)
class Vocabulary:
    """Ordered manipulation labels with reserved special-token ids.

    Immutable; safe to share across threads.
    """

    labels: tuple[str, ...]
    track: str = "components"
    name_to_id: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise VocabularyError(f"duplicate label names: {self.labels}")
        object.__setattr__(
            self, "name_to_id", {name: i for i, name in enumerate(self.labels)}
        )

    # Special-token ids live directly above the label ids.
    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def eos_id(self) -> int:
        return self.num_labels

    @property
    def sos_id(self) -> int:
        return self.num_labels + 1

    @property
    def nm_id(self) -> int:
        return self.num_labels + 2

    @property
    def cls_id(self) -> int:
        return self.num_labels + 3

    @property
    def enc_id(self) -> int:
        return self.num_labels + 4

    @property
    def num_ids(self) -> int:
        """Total id count including all specials."""
        return self.num_labels + 5

    @property
    def num_decoder_classes(self) -> int:
        """Classifier width of the autoregressive decoder: labels + EOS."""
        return self.num_labels + 1

    def id_of(self, name: str) -> int:
        try:
            return self.name_to_id[name]
        except KeyError:
            raise VocabularyError(f"unknown label {name!r}; have {list(self.labels)}")

    def name_of(self, label_id: int) -> str:
        if 0 <= label_id < self.num_labels:
            return self.labels[label_id]
        specials = {
            self.eos_id: "[EOS]",
            self.sos_id: "[SOS]",
            self.nm_id: "[NM]",
            self.cls_id: "[CLS]",
            self.enc_id: "[ENC]",
        }
        if label_id in specials:
            return specials[label_id]
        raise VocabularyError(f"id {label_id} out of range for vocabulary")

    def is_label(self, token_id: int) -> bool:
        return 0 <= token_id < self.num_labels

    def validate_sequence(self, ops: list[int] | tuple[int, ...]) -> None:
        """Check a raw op-id list against the sequence invariants."""
        if len(ops) > MAX_SEQ_LEN:
            raise VocabularyError(f"sequence length {len(ops)} exceeds {MAX_SEQ_LEN}")
        for t in ops:
            if not self.is_label(t):
                raise VocabularyError(f"id {t} is not a manipulation label")
        if len(set(ops)) != len(ops):
            raise VocabularyError(f"duplicate labels in sequence {ops}")

    def sequence_from_names(self, names: list[str] | tuple[str, ...]) -> "ManipulationSequence":
        return ManipulationSequence(tuple(self.id_of(n) for n in names), self)


@dataclass(frozen=True)
class ManipulationSequence:
    """Ordered manipulation op ids; length 0..5, no repeats, no specials.

    Length 0 denotes an unmanipulated original image.
    """

    ops: tuple[int, ...]
    vocab: Vocabulary

    def __post_init__(self):
        self.vocab.validate_sequence(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def names(self) -> list[str]:
        return [self.vocab.name_of(t) for t in self.ops]

    def display(self) -> str:
        """Hyphen-joined capitalized labels; "original" for the empty sequence."""
        if not self.ops:
            return "original"
        return "-".join(n.capitalize() for n in self.names())


def make_vocabulary(track: str) -> Vocabulary:
    """Default vocabulary for one of the two manipulation tracks."""
    if track not in TRACKS:
        raise VocabularyError(f"unknown track {track!r}; have {sorted(TRACKS)}")
    return Vocabulary(labels=TRACKS[track], track=track)


def tokenize_decoder(seq: ManipulationSequence) -> list[int]:
    """Frame a sequence for teacher forcing: [SOS, ops..., EOS]."""
    v = seq.vocab
    return [v.sos_id, *seq.ops, v.eos_id]


def tokenize_prefixed(seq: ManipulationSequence, prefix_id: int) -> list[int]:
    """Prefix a sequence with a summary token ([CLS] or [ENC])."""
    v = seq.vocab
    if prefix_id not in (v.cls_id, v.enc_id):
        raise VocabularyError(f"prefix id {prefix_id} must be CLS or ENC")
    return [prefix_id, *seq.ops]


def pad_fixed(ops: list[int] | tuple[int, ...], vocab: Vocabulary, n_fix: int = MAX_SEQ_LEN) -> list[int]:
    """Pad an op-id list with the no-manipulation class to exactly ``n_fix``."""
    ops = list(ops)
    if len(ops) > n_fix:
        raise VocabularyError(f"sequence length {len(ops)} exceeds fixed length {n_fix}")
    return ops + [vocab.nm_id] * (n_fix - len(ops))


def strip_nm(ops: list[int] | tuple[int, ...], vocab: Vocabulary) -> list[int]:
    """Remove trailing no-manipulation padding (inverse of pad_fixed)."""
    out = list(ops)
    while out and out[-1] == vocab.nm_id:
        out.pop()
    return out
