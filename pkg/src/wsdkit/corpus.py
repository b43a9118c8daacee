"""Sense-tagged lexical-sample corpus model and readers.

Each ambiguous target word ("lexelt", e.g. "art.n") owns its own training
and test instances, and everything downstream operates one lexelt at a
time. Two on-disk forms are supported: a canonical JSON Lines format that
round-trips exactly, and the lexical-sample XML distribution format, which
a converter turns into canonical files.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

log = logging.getLogger(__name__)

CANONICAL_FIELDS = ("lexelt", "id", "split", "senses", "tokens", "target_index")

_NUMBER_RE = re.compile(r"[+-]?\d+(?:[.,:/]\d+)*%?")


class CorpusFormatError(ValueError):
    """Malformed record in a corpus file; message names the line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CorpusValidationError(ValueError):
    """Structurally parseable data that violates a dataset invariant."""


@dataclass(frozen=True)
class TokenizerConfig:
    """Deterministic tokenizer settings; identical text + config always
    yields the identical token sequence. The same rules serve every
    language, only the tag differs."""

    language: str = "en"
    lowercase: bool = True
    strip_punctuation: bool = True
    keep_numbers: bool = True


DEFAULT_TOKENIZER = TokenizerConfig()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Split raw text into normalized tokens.

    Splits on whitespace; with ``lowercase`` every token is case-folded;
    with ``strip_punctuation`` leading/trailing punctuation is removed and
    tokens consisting solely of punctuation are dropped; with
    ``keep_numbers`` false, purely numeric tokens are dropped. Empty text
    yields an empty list.
    """
    tokens = []
    for piece in text.split():
        if config.lowercase:
            piece = piece.lower()
        if config.strip_punctuation:
            start, end = 0, len(piece)
            while start < end and _is_punct(piece[start]):
                start += 1
            while end > start and _is_punct(piece[end - 1]):
                end -= 1
            piece = piece[start:end]
        if not piece:
            continue
        if not config.keep_numbers and _NUMBER_RE.fullmatch(piece):
            continue
        tokens.append(piece)
    return tokens


@dataclass(frozen=True)
class Instance:
    """One sense-tagged occurrence of a target word.

    ``gold_senses`` is an ordered, duplicate-free tuple; the first entry is
    the primary sense used as the training label. Test instances may carry
    an empty tuple. ``target_index`` points at the ambiguous head word
    inside ``tokens``.
    """

    lexelt: str
    instance_id: str
    gold_senses: tuple[str, ...]
    tokens: tuple[str, ...]
    target_index: int

    def __post_init__(self):
        if not self.lexelt:
            raise CorpusValidationError("instance has empty lexelt")
        if not self.instance_id:
            raise CorpusValidationError("instance has empty id")
        if not 0 <= self.target_index < len(self.tokens):
            raise CorpusValidationError(
                f"instance {self.instance_id!r}: target_index {self.target_index} "
                f"out of range for {len(self.tokens)} tokens"
            )
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise CorpusValidationError(
                    f"instance {self.instance_id!r}: invalid token {tok!r}"
                )
        if len(set(self.gold_senses)) != len(self.gold_senses):
            raise CorpusValidationError(
                f"instance {self.instance_id!r}: duplicate gold senses"
            )

    @property
    def target(self) -> str:
        return self.tokens[self.target_index]


@dataclass(frozen=True)
class LexeltDataset:
    """Training and test instances for one lexelt.

    Every contained instance shares the lexelt, ids are unique, the train
    and test id sets are disjoint, and training instances carry at least
    one gold sense. Immutable after construction, safe to share across
    concurrent per-lexelt work.
    """

    lexelt: str
    train: tuple[Instance, ...] = field(default_factory=tuple)
    test: tuple[Instance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen: set[str] = set()
        for split_name, split in (("train", self.train), ("test", self.test)):
            for inst in split:
                if inst.lexelt != self.lexelt:
                    raise CorpusValidationError(
                        f"instance {inst.instance_id!r} has lexelt {inst.lexelt!r}, "
                        f"dataset is {self.lexelt!r}"
                    )
                if inst.instance_id in seen:
                    raise CorpusValidationError(
                        f"duplicate instance id {inst.instance_id!r} in {self.lexelt!r}"
                    )
                seen.add(inst.instance_id)
                if split_name == "train" and not inst.gold_senses:
                    raise CorpusValidationError(
                        f"training instance {inst.instance_id!r} has no gold sense"
                    )

    @property
    def senses(self) -> tuple[str, ...]:
        """Sense inventory observed in the training split, sorted."""
        return tuple(sorted({s for inst in self.train for s in inst.gold_senses}))


def _record_to_instance(record: dict, line: int) -> tuple[Instance, str]:
    try:
        lexelt = record["lexelt"]
        instance_id = record["id"]
        split = record["split"]
        senses = record["senses"]
        tokens = record["tokens"]
        target_index = record["target_index"]
    except KeyError as exc:
        raise CorpusFormatError(f"missing field {exc.args[0]!r}", line) from None
    if split not in ("train", "test"):
        raise CorpusFormatError(f"split must be 'train' or 'test', got {split!r}", line)
    if not isinstance(tokens, list) or not isinstance(senses, list):
        raise CorpusFormatError("'senses' and 'tokens' must be arrays", line)
    if not isinstance(target_index, int) or isinstance(target_index, bool):
        raise CorpusFormatError("'target_index' must be an integer", line)
    try:
        inst = Instance(
            lexelt=str(lexelt),
            instance_id=str(instance_id),
            gold_senses=tuple(str(s) for s in senses),
            tokens=tuple(str(t) for t in tokens),
            target_index=target_index,
        )
    except CorpusValidationError as exc:
        raise CorpusFormatError(str(exc), line) from None
    return inst, split


def read_canonical_all(path) -> list[LexeltDataset]:
    """Read a canonical JSON Lines file into one dataset per lexelt.

    Record order within each lexelt is preserved. Raises
    CorpusFormatError naming the offending line for malformed records and
    CorpusValidationError for duplicate instance ids.
    """
    grouped: dict[str, dict[str, list[Instance]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from None
            if not isinstance(record, dict):
                raise CorpusFormatError("record is not an object", lineno)
            inst, split = _record_to_instance(record, lineno)
            splits = grouped.setdefault(inst.lexelt, {"train": [], "test": []})
            splits[split].append(inst)
    return [
        LexeltDataset(lexelt, tuple(splits["train"]), tuple(splits["test"]))
        for lexelt, splits in grouped.items()
    ]


def read_canonical(path) -> LexeltDataset:
    """Read a canonical file holding a single lexelt's data."""
    datasets = read_canonical_all(path)
    if not datasets:
        name = Path(path).stem
        return LexeltDataset(lexelt=name or "unknown")
    if len(datasets) > 1:
        raise CorpusValidationError(
            f"{path}: expected one lexelt, found "
            f"{', '.join(ds.lexelt for ds in datasets)}; use read_canonical_all"
        )
    return datasets[0]


def _canonical_line(inst: Instance, split: str) -> str:
    record = {
        "lexelt": inst.lexelt,
        "id": inst.instance_id,
        "split": split,
        "senses": list(inst.gold_senses),
        "tokens": list(inst.tokens),
        "target_index": inst.target_index,
    }
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def write_canonical(datasets: LexeltDataset | Iterable[LexeltDataset], path) -> None:
    """Write datasets in canonical form: UTF-8 JSON Lines, LF endings."""
    if isinstance(datasets, LexeltDataset):
        datasets = [datasets]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ds in datasets:
            for inst in ds.train:
                fh.write(_canonical_line(inst, "train") + "\n")
            for inst in ds.test:
                fh.write(_canonical_line(inst, "test") + "\n")


def _context_parts(context: ET.Element) -> tuple[str, str | None, str]:
    """Split a context element's text at its first head element."""
    before: list[str] = [context.text or ""]
    after: list[str] = []
    head_text: str | None = None
    for child in context:
        if head_text is None and child.tag == "head":
            head_text = "".join(child.itertext())
            after.append(child.tail or "")
        else:
            bucket = before if head_text is None else after
            bucket.append("".join(child.itertext()))
            bucket.append(child.tail or "")
    return " ".join(before), head_text, " ".join(after)


def read_senseval_xml_all(
    path,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    split: str = "auto",
) -> tuple[list[LexeltDataset], int]:
    """Parse a lexical-sample XML document into datasets plus a skip count.

    The word inside each instance's head element becomes the token at
    ``target_index``; inline answer elements become the instance's gold
    senses, in document order. ``split`` is "train", "test", or "auto"
    (answered instances go to train, unanswered to test). Instances
    without a usable head are skipped with a warning; the second return
    value counts them.
    """
    if split not in ("train", "test", "auto"):
        raise ValueError(f"split must be 'train', 'test' or 'auto', got {split!r}")
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise CorpusFormatError(f"{path}: not well-formed XML ({exc})") from None
    lexelt_elems = [root] if root.tag == "lexelt" else list(root.iter("lexelt"))

    datasets = []
    skipped = 0
    for lex_elem in lexelt_elems:
        lexelt = lex_elem.get("item") or lex_elem.get("id") or "unknown"
        train: list[Instance] = []
        test: list[Instance] = []
        for inst_elem in lex_elem.iter("instance"):
            instance_id = inst_elem.get("id") or ""
            senses = []
            for ans in inst_elem.iter("answer"):
                sid = ans.get("senseid")
                if sid and sid not in senses:
                    senses.append(sid)
            context = inst_elem.find("context")
            if context is None:
                log.warning("%s: instance %r has no context, skipped", path, instance_id)
                skipped += 1
                continue
            before_text, head_text, after_text = _context_parts(context)
            head_tokens = tokenize(head_text, config) if head_text is not None else []
            if not head_tokens:
                log.warning(
                    "%s: instance %r has no usable head element, skipped",
                    path,
                    instance_id,
                )
                skipped += 1
                continue
            before = tokenize(before_text, config)
            tokens = before + head_tokens + tokenize(after_text, config)
            dest = split
            if dest == "auto":
                dest = "train" if senses else "test"
            if dest == "train" and not senses:
                log.warning(
                    "%s: instance %r has no answer but split is 'train', skipped",
                    path,
                    instance_id,
                )
                skipped += 1
                continue
            inst = Instance(
                lexelt=lexelt,
                instance_id=instance_id,
                gold_senses=tuple(senses),
                tokens=tuple(tokens),
                target_index=len(before),
            )
            (train if dest == "train" else test).append(inst)
        datasets.append(LexeltDataset(lexelt, tuple(train), tuple(test)))
    return datasets, skipped


def read_senseval_xml(
    path,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    split: str = "auto",
) -> LexeltDataset:
    """Parse a lexical-sample XML document holding a single lexelt."""
    datasets, _ = read_senseval_xml_all(path, config, split)
    if not datasets:
        return LexeltDataset(lexelt=Path(path).stem or "unknown")
    if len(datasets) > 1:
        raise CorpusValidationError(
            f"{path}: expected one lexelt, found "
            f"{', '.join(ds.lexelt for ds in datasets)}; use read_senseval_xml_all"
        )
    return datasets[0]
