"""Command-line front end.

Exit codes: 0 success, 1 usage or bad input, 2 model parse/validation
failure, 3 Viterbi eligibility failure, 4 resource cap exceeded, 5 I/O
failure. Data goes to stdout, diagnostics to stderr. JSON output is
single-line with insertion-ordered keys and floats rendered with 17
significant digits, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import model_io
from .errors import (
    DomainError,
    EligibilityError,
    InputError,
    ModelFormatError,
    ResourceLimitError,
    ShapeError,
    ValidationError,
)
from .inference import (
    DEFAULT_ENUM_CAP,
    brute_force_viterbi,
    enumerate_distribution,
    forward,
    sample_many,
    viterbi,
    viterbi_eligibility,
)
from .models import ClassicalMealyHMM, embed_classical, graph_view
from .quantum import measure_probabilities
from .single_register import to_hqmm
from .spectral import StringBasis, hankel_rank, hankel_tsv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_MODEL = 2
EXIT_INELIGIBLE = 3
EXIT_RESOURCE = 4
EXIT_IO = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# deterministic JSON

def _jsonify(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    if isinstance(value, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_jsonify(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_jsonify(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _matrix_json(mat) -> list:
    return model_io.matrix_to_json(mat)


# ---------------------------------------------------------------------------
# shared argument handling

def _load_model(source: str):
    if source.startswith("builtin:"):
        return model_io.builtin(source[len("builtin:"):])
    return model_io.load(source)


def _load_quantum(source: str):
    model = _load_model(source)
    if isinstance(model, ClassicalMealyHMM):
        return embed_classical(model)
    return model


def _split_sequence(text: str, sep: str) -> tuple[str, ...]:
    if text == "":
        return ()
    if sep == "":
        return tuple(text)
    return tuple(text.split(sep))


def _join_sequence(symbols, sep: str) -> str:
    return sep.join(symbols)


def _enum_cap() -> int:
    raw = os.environ.get("QHMM_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"QHMM_ENUM_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InputError("QHMM_ENUM_CAP must be positive")
    return cap


def _add_model_arg(sub):
    sub.add_argument("model", help="model file path, or builtin:NAME")


def _add_sep_arg(sub):
    sub.add_argument(
        "--sep",
        default="",
        help="symbol separator for sequences (default: one character per symbol)",
    )


# ---------------------------------------------------------------------------
# subcommands

def _cmd_validate(args) -> int:
    model = _load_model(args.model)
    n = len(model.states)
    kind = "hmm" if isinstance(model, ClassicalMealyHMM) else "qhmm"
    print(f"OK: {kind} with {n} states over alphabet {{{', '.join(model.alphabet)}}}")
    return EXIT_OK


def _cmd_forward(args) -> int:
    model = _load_quantum(args.model)
    symbols = _split_sequence(args.sequence, args.sep)
    result = forward(model, symbols)
    out = {
        "sequence": _join_sequence(symbols, args.sep),
        "prob": result.prob,
        "rho": _matrix_json(result.rho.matrix),
    }
    if args.measure:
        mu = model_io.load_measurement(args.measure)
        out["per_outcome"] = measure_probabilities(mu, result.rho)
    print(_jsonify(out))
    return EXIT_OK


def _cmd_viterbi(args) -> int:
    model = _load_quantum(args.model)
    symbols = _split_sequence(args.sequence, args.sep)
    if args.brute_force:
        result = brute_force_viterbi(model, symbols, cap=_enum_cap())
        method = "brute-force"
    else:
        result = viterbi(model, symbols)
        method = "trellis"
    out = {
        "sequence": _join_sequence(symbols, args.sep),
        "path": list(result.path),
        "prob": result.prob,
        "method": method,
        "eligible": viterbi_eligibility(model).eligible,
    }
    print(_jsonify(out))
    return EXIT_OK


def _cmd_sample(args) -> int:
    model = _load_quantum(args.model)
    if args.count < 1:
        raise InputError("--count must be at least 1")
    for symbols in sample_many(model, args.length, args.seed, args.count):
        print(_join_sequence(symbols, args.sep))
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    model = _load_quantum(args.model)
    dist = enumerate_distribution(model, args.length, cap=_enum_cap())
    total = 0.0
    for symbols, rho in dist.items():
        total += rho.trace
        label = _join_sequence(symbols, args.sep) if symbols else "ε"
        print(f"{label}\t{rho.trace:.17g}")
    print(f"# total\t{total:.17g}")
    return EXIT_OK


def _cmd_hankel(args) -> int:
    model = _load_model(args.model)
    if args.rank_only:
        print(hankel_rank(model, args.max_len, rel_tol=args.rel_tol))
        return EXIT_OK
    basis = StringBasis.up_to(model.alphabet, args.max_len)
    sys.stdout.write(hankel_tsv(model, basis, basis, sep=args.sep))
    return EXIT_OK


def _cmd_convert(args) -> int:
    model = _load_quantum(args.model)
    h = to_hqmm(model)
    out = {
        "kind": "single-register-hqmm",
        "quantum_dim": h.quantum_dim,
        "classical_dim": h.classical_dim,
        "dim": h.dim,
        "alphabet": list(model.alphabet),
        "initial": _matrix_json(h.initial.matrix),
        "operations": {
            sym: [_matrix_json(k) for k in h.ops[sym].kraus] for sym in model.alphabet
        },
        "terminal": [_matrix_json(k) for k in h.terminal.kraus],
    }
    print(_jsonify(out))
    return EXIT_OK


def _cmd_graph(args) -> int:
    model = _load_quantum(args.model)
    sys.stdout.write(graph_view(model).to_dot())
    return EXIT_OK


def _cmd_examples(args) -> int:
    for name in model_io.BUILTIN_NAMES:
        kind = "hmm" if isinstance(model_io.builtin(name), ClassicalMealyHMM) else "qhmm"
        print(f"{name}\t{kind}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qhmm",
        description="Quantum hidden Markov models built from transition operation matrices.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="check a model's stochasticity or column law")
    _add_model_arg(p)
    p.set_defaults(func=_cmd_validate)

    p = subs.add_parser("forward", help="forward state and probability of a sequence")
    _add_model_arg(p)
    p.add_argument("sequence", help="observation sequence (may be empty)")
    p.add_argument("--measure", help="measurement file applied to the forward state")
    _add_sep_arg(p)
    p.set_defaults(func=_cmd_forward)

    p = subs.add_parser("viterbi", help="most likely hidden state path")
    _add_model_arg(p)
    p.add_argument("sequence", help="observation sequence")
    p.add_argument(
        "--brute-force",
        action="store_true",
        help="exhaustive path search; works for ineligible models too",
    )
    _add_sep_arg(p)
    p.set_defaults(func=_cmd_viterbi)

    p = subs.add_parser("sample", help="draw observation sequences")
    _add_model_arg(p)
    p.add_argument("--length", type=int, required=True, help="symbols per sequence")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--count", type=int, default=1, help="number of sequences (default 1)")
    _add_sep_arg(p)
    p.set_defaults(func=_cmd_sample)

    p = subs.add_parser("enumerate", help="traces of all sequences of one length")
    _add_model_arg(p)
    p.add_argument("--length", type=int, required=True, help="sequence length to enumerate")
    _add_sep_arg(p)
    p.set_defaults(func=_cmd_enumerate)

    p = subs.add_parser("hankel", help="string-probability Hankel matrix or its rank")
    _add_model_arg(p)
    p.add_argument(
        "--max-len", type=int, required=True, help="row and column strings up to this length"
    )
    p.add_argument("--rank-only", action="store_true", help="print the numeric rank only")
    p.add_argument(
        "--rel-tol",
        type=float,
        default=1e-8,
        help="singular values below this fraction of the largest count as zero",
    )
    _add_sep_arg(p)
    p.set_defaults(func=_cmd_hankel)

    p = subs.add_parser("convert", help="rewrite the model in another representation")
    _add_model_arg(p)
    p.add_argument("--to", required=True, choices=["monras"], help="target representation")
    p.set_defaults(func=_cmd_convert)

    p = subs.add_parser("graph", help="transition graph in DOT format")
    _add_model_arg(p)
    p.set_defaults(func=_cmd_graph)

    p = subs.add_parser("examples", help="list bundled models")
    p.set_defaults(func=_cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFormatError, ValidationError, ShapeError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except EligibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: rerun with --brute-force", file=sys.stderr)
        return EXIT_INELIGIBLE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
