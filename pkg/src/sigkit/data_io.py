"""TSV ingestion and report serialization.

Input schemas (UTF-8, tab-separated, header row required):

* scores       ``id  score_a  score_b``
* correctness  ``id  a  b``           with a, b in {0, 1}
* counts       ``id  a1..ak  b1..bk`` (k columns per side, k set by the
  header; the combiner decides what the columns mean)
* correlation  two prediction files ``id  pred`` plus one ``id  gold``,
  joined on id; the gold file's row order defines the example order

Every malformed row is reported with its 1-based line number; a file
with no data rows is an empty-sample error.  The SHA-256 of the raw
input bytes travels with the parsed data so reports can name exactly
what they were computed from.
"""

import hashlib
import io
import json
from dataclasses import dataclass

from . import __version__
from .errors import DataError, EmptySample, InvalidArgument
from .measures import Combiner, CorrelationSample, PairedScores, SufficientStats
from .normality import NormalityReport
from .numerics import Probability
from .significance import TestResult

__all__ = [
    "FORMS",
    "NormalitySummary",
    "Report",
    "combiner_from_name",
    "load_input",
    "render_report",
    "parse_report",
]

FORMS = ("scores", "counts", "correctness", "correlation")

_DIGEST_NOTE = "input_sha256="


def combiner_from_name(name, beta=1.0, num_idx=0, den_idx=1):
    """Build a Combiner from its CLI spelling."""
    if name == "mean":
        return Combiner("mean")
    if name == "accuracy":
        return Combiner("accuracy")
    if name == "precision":
        return Combiner("precision")
    if name == "recall":
        return Combiner("recall")
    if name == "f1":
        return Combiner("f_beta", beta=1.0)
    if name == "f_beta":
        return Combiner("f_beta", beta=float(beta))
    if name == "ratio":
        return Combiner("ratio", num_idx=int(num_idx), den_idx=int(den_idx))
    raise InvalidArgument(
        f"unknown combiner {name!r}; expected mean|accuracy|precision|recall"
        "|f1|f_beta|ratio"
    )


# ---------------------------------------------------------------------------
# TSV parsing


def _read_tsv(path):
    """Raw rows with line numbers, the header, and the byte digest."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    lines = text.splitlines()
    numbered = [
        (i + 1, line.split("\t"))
        for i, line in enumerate(lines)
        if line.strip() != ""
    ]
    if not numbered:
        raise EmptySample(f"{path}: file is empty")
    header = [h.strip() for h in numbered[0][1]]
    rows = numbered[1:]
    if not rows:
        raise EmptySample(f"{path}: no data rows after the header")
    return header, rows, digest


def _check_width(path, lineno, fields, expected):
    if len(fields) != expected:
        raise DataError(
            f"{path}:{lineno}: expected {expected} tab-separated fields, "
            f"got {len(fields)}"
        )


def _parse_float(path, lineno, text, column):
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"{path}:{lineno}: column {column!r} is not a number: {text!r}"
        ) from None
    return value


def _parse_count(path, lineno, text, column):
    try:
        value = int(text)
    except ValueError:
        raise DataError(
            f"{path}:{lineno}: column {column!r} is not an integer: {text!r}"
        ) from None
    if value < 0:
        raise DataError(f"{path}:{lineno}: column {column!r} is negative: {value}")
    return value


class _IdTracker:
    def __init__(self, path):
        self.path = path
        self.seen = {}
        self.ids = []

    def add(self, lineno, example_id):
        if example_id == "":
            raise DataError(f"{self.path}:{lineno}: empty id")
        if example_id in self.seen:
            raise DataError(
                f"{self.path}:{lineno}: duplicate id {example_id!r} "
                f"(first on line {self.seen[example_id]})"
            )
        self.seen[example_id] = lineno
        self.ids.append(example_id)


def _load_scores(path):
    header, rows, digest = _read_tsv(path)
    if header != ["id", "score_a", "score_b"]:
        raise DataError(
            f"{path}:1: scores header must be 'id<TAB>score_a<TAB>score_b', "
            f"got {header}"
        )
    tracker = _IdTracker(path)
    a, b = [], []
    for lineno, fields in rows:
        _check_width(path, lineno, fields, 3)
        tracker.add(lineno, fields[0].strip())
        a.append(_parse_float(path, lineno, fields[1].strip(), "score_a"))
        b.append(_parse_float(path, lineno, fields[2].strip(), "score_b"))
    return PairedScores(ids=tuple(tracker.ids), a=a, b=b), digest


def _load_correctness(path):
    header, rows, digest = _read_tsv(path)
    if header != ["id", "a", "b"]:
        raise DataError(
            f"{path}:1: correctness header must be 'id<TAB>a<TAB>b', got {header}"
        )
    tracker = _IdTracker(path)
    a, b = [], []
    for lineno, fields in rows:
        _check_width(path, lineno, fields, 3)
        tracker.add(lineno, fields[0].strip())
        for column, bucket in (("a", a), ("b", b)):
            value = fields[1 if column == "a" else 2].strip()
            if value not in ("0", "1"):
                raise DataError(
                    f"{path}:{lineno}: column {column!r} must be 0 or 1, "
                    f"got {value!r}"
                )
            bucket.append(int(value))
    from .significance import PairedOutcomeTable

    return PairedOutcomeTable.from_correctness(a, b), digest


def _load_counts(path, combiner):
    if combiner is None:
        raise InvalidArgument("counts input needs a combiner")
    header, rows, digest = _read_tsv(path)
    if header[0] != "id" or len(header) < 3 or (len(header) - 1) % 2 != 0:
        raise DataError(
            f"{path}:1: counts header must be 'id' plus an equal number of "
            f"columns per side, got {len(header)} columns"
        )
    k = (len(header) - 1) // 2
    try:
        combiner.check_arity(k)
    except InvalidArgument as exc:
        raise DataError(f"{path}: {exc}") from None
    tracker = _IdTracker(path)
    a_rows, b_rows = [], []
    for lineno, fields in rows:
        _check_width(path, lineno, fields, 1 + 2 * k)
        tracker.add(lineno, fields[0].strip())
        a_rows.append([
            _parse_count(path, lineno, fields[1 + j].strip(), header[1 + j])
            for j in range(k)
        ])
        b_rows.append([
            _parse_count(path, lineno, fields[1 + k + j].strip(), header[1 + k + j])
            for j in range(k)
        ])
    stats = SufficientStats(
        ids=tuple(tracker.ids), a_counts=a_rows, b_counts=b_rows, combiner=combiner
    )
    return stats, digest


def _load_value_file(path, value_name):
    header, rows, digest = _read_tsv(path)
    if len(header) != 2 or header[0] != "id":
        raise DataError(
            f"{path}:1: header must be 'id<TAB>{value_name}', got {header}"
        )
    tracker = _IdTracker(path)
    values = {}
    for lineno, fields in rows:
        _check_width(path, lineno, fields, 2)
        example_id = fields[0].strip()
        tracker.add(lineno, example_id)
        values[example_id] = _parse_float(path, lineno, fields[1].strip(), header[1])
    return tracker.ids, values, digest


def _load_correlation(path_a, path_b, gold_path):
    if path_b is None or gold_path is None:
        raise InvalidArgument(
            "correlation input needs both systems' prediction files and a gold file"
        )
    _, preds_a, digest_a = _load_value_file(path_a, "pred")
    _, preds_b, digest_b = _load_value_file(path_b, "pred")
    gold_ids, gold, digest_g = _load_value_file(gold_path, "gold")
    for label, preds, path in (("A", preds_a, path_a), ("B", preds_b, path_b)):
        missing = [i for i in gold_ids if i not in preds]
        if missing:
            raise DataError(
                f"{path}: system {label} is missing {len(missing)} gold id(s), "
                f"first {missing[0]!r}"
            )
        extra = set(preds) - set(gold_ids)
        if extra:
            raise DataError(
                f"{path}: system {label} has {len(extra)} id(s) not in the gold "
                f"file, e.g. {sorted(extra)[0]!r}"
            )
    gold_values = [gold[i] for i in gold_ids]
    sample_a = CorrelationSample([preds_a[i] for i in gold_ids], gold_values)
    sample_b = CorrelationSample([preds_b[i] for i in gold_ids], gold_values)
    combined = hashlib.sha256(
        (digest_a + digest_b + digest_g).encode("ascii")
    ).hexdigest()
    return (sample_a, sample_b), combined


def load_input(form, path, path_b=None, gold_path=None, combiner=None):
    """Parse input files for the given form; returns (data, sha256 hex).

    scores -> PairedScores; correctness -> PairedOutcomeTable; counts ->
    SufficientStats (requires ``combiner``); correlation -> a pair of
    CorrelationSamples (requires ``path_b`` and ``gold_path``; the
    digest covers all three files).
    """
    if form == "scores":
        return _load_scores(path)
    if form == "correctness":
        return _load_correctness(path)
    if form == "counts":
        return _load_counts(path, combiner)
    if form == "correlation":
        return _load_correlation(path, path_b, gold_path)
    raise InvalidArgument(f"form must be one of {FORMS}, got {form!r}")


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class NormalitySummary:
    """The slice of a normality report that reports carry."""

    statistic: float
    p_value: Probability
    passed: bool

    def __post_init__(self):
        object.__setattr__(self, "p_value", Probability(self.p_value))

    @classmethod
    def from_report(cls, report):
        if report is None:
            return None
        if isinstance(report, NormalityReport):
            return cls(
                statistic=report.statistic,
                p_value=report.p_value,
                passed=report.passed,
            )
        return report


@dataclass(frozen=True)
class Report:
    """A test result plus the context it was produced in."""

    result: TestResult
    measure_id: str | None = None
    basis: str | None = None
    normality: NormalitySummary | None = None
    input_sha256: str | None = None
    version: str = __version__

    def __post_init__(self):
        object.__setattr__(
            self, "normality", NormalitySummary.from_report(self.normality)
        )


def _report_payload(report):
    r = report.result
    notes = list(r.notes)
    if report.input_sha256 is not None:
        notes.append(_DIGEST_NOTE + report.input_sha256)
    normality = None
    if report.normality is not None:
        normality = {
            "statistic": report.normality.statistic,
            "p_value": float(report.normality.p_value),
            "pass": report.normality.passed,
        }
    return {
        "test": r.test_id,
        "measure": report.measure_id,
        "statistic": r.statistic,
        "p_value": float(r.p_value),
        "alpha": r.alpha,
        "reject": r.reject,
        "tail": r.tail,
        "n": r.n,
        "resamples": r.resamples,
        "seed": r.seed,
        "basis": report.basis,
        "normality": normality,
        "notes": notes,
        "version": report.version,
    }


def _render_text(report):
    r = report.result
    out = io.StringIO()
    verdict = "reject H0" if r.reject else "fail to reject H0"
    print(f"sigkit {report.version}", file=out)
    print(f"test:       {r.test_id}", file=out)
    if report.measure_id is not None:
        print(f"measure:    {report.measure_id}", file=out)
    print(f"statistic:  {r.statistic:g}", file=out)
    print(f"p-value:    {float(r.p_value):g}", file=out)
    print(f"decision:   {verdict} at alpha={r.alpha:g} ({r.tail})", file=out)
    print(f"n:          {r.n}", file=out)
    if r.resamples is not None:
        print(f"resamples:  {r.resamples} (seed {r.seed})", file=out)
    if report.basis is not None:
        print(f"basis:      {report.basis}", file=out)
    if report.normality is not None:
        nr = report.normality
        state = "pass" if nr.passed else "fail"
        print(
            f"normality:  K2={nr.statistic:g} p={float(nr.p_value):g} ({state})",
            file=out,
        )
    if r.notes:
        print(f"notes:      {'; '.join(r.notes)}", file=out)
    if report.input_sha256 is not None:
        print(f"input:      sha256 {report.input_sha256[:16]}...", file=out)
    return out.getvalue()


def render_report(report, fmt="json"):
    """Serialize a report to bytes, as the fixed JSON schema or text."""
    if fmt == "json":
        return (json.dumps(_report_payload(report), indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        return _render_text(report).encode("utf-8")
    raise InvalidArgument(f"format must be json or text, got {fmt!r}")


_REPORT_KEYS = {
    "test", "measure", "statistic", "p_value", "alpha", "reject", "tail",
    "n", "resamples", "seed", "basis", "normality", "notes", "version",
}


def parse_report(data):
    """Rebuild a Report from its JSON rendering (render_report inverse)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DataError(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or set(payload) != _REPORT_KEYS:
        raise DataError("JSON object does not match the report schema")
    notes = []
    digest = None
    for note in payload["notes"]:
        if note.startswith(_DIGEST_NOTE):
            digest = note[len(_DIGEST_NOTE):]
        else:
            notes.append(note)
    result = TestResult(
        test_id=payload["test"],
        statistic=payload["statistic"],
        p_value=payload["p_value"],
        tail=payload["tail"],
        n=payload["n"],
        alpha=payload["alpha"],
        reject=payload["reject"],
        resamples=payload["resamples"],
        seed=payload["seed"],
        notes=tuple(notes),
    )
    normality = None
    if payload["normality"] is not None:
        normality = NormalitySummary(
            statistic=payload["normality"]["statistic"],
            p_value=payload["normality"]["p_value"],
            passed=payload["normality"]["pass"],
        )
    return Report(
        result=result,
        measure_id=payload["measure"],
        basis=payload["basis"],
        normality=normality,
        input_sha256=digest,
        version=payload["version"],
    )
