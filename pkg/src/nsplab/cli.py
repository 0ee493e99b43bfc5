"""Command-line workbench.

Every subcommand writes its primary output to ``--out`` (or stdout) and a
JSON run manifest next to it (``<out>.manifest.json``, or stderr when writing
to stdout).  Exit status: 0 success, 1 domain error or failed verification,
2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import time

import jsonschema

from . import learners
from .dfa import Dfa, depth_map, minimize, random_adfa
from .dot import to_dot
from .errors import NotFixedLengthError, NotPositiveError, NspLabError
from .labels import (
    NspExample,
    NspSample,
    dfa_digest,
    empirical_nsp_loss,
    nsp_label_vector,
    read_dataset,
    write_dataset,
)
from .padding import DEFAULT_VERIFY_BUDGET, PaddedDfa, pad_adfa, verify_padding
from .reduction import (
    DistributionSpec,
    LabeledExample,
    Sampler,
    lift_example,
    run_config,
    sample_positive,
)

DEFAULT_FORMAT = {
    "generate": "json", "pad": "json", "label": "jsonl", "lift": "jsonl", "learn": "json",
    "reduce": "json", "eval": "json", "export-dot": "dot", "verify": "json",
}


class UsageError(Exception):
    pass


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _file_digest(path) -> str:
    with open(path, "rb") as f:
        return _sha256(f.read())


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _read_dfa(path) -> Dfa:
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise NspLabError(f"{path}: parse error: {exc}") from exc
    try:
        return Dfa.from_dict(data)
    except ValueError as exc:
        raise NspLabError(f"{path}: not a valid DFA: {exc}") from exc


def _infer_length(dfa: Dfa) -> int:
    """Length of the accepted strings of a fixed-length DFA."""
    m = minimize(dfa)
    if not m.accepting:
        raise NspLabError("empty language: pass --n explicitly")
    for n in range(m.state_count):
        try:
            depth_map(m, n)
            return n
        except NotFixedLengthError:
            continue
    raise NotFixedLengthError("the DFA does not accept strings of one fixed length")


def cmd_generate(args):
    dfa = random_adfa(args.n, args.max_states, args.seed)
    return _dump(dfa.to_dict()), {"states": dfa.state_count, "n": args.n}, 0


def cmd_pad(args):
    a = _read_dfa(args.dfa)
    n = args.n if args.n is not None else _infer_length(a)
    padded = pad_adfa(a, n)
    result = {"n": n, "states": padded.dfa.state_count}
    status = 0
    if n <= args.budget:
        report = verify_padding(a, padded, args.budget)
        result["verification"] = report.to_dict()
        status = 0 if report.passed else 1
    else:
        result["verification"] = {"skipped": f"N = {n} exceeds enumeration budget {args.budget}"}
    return _dump(padded.to_dict()), result, status


def cmd_verify(args):
    with open(args.padded) as f:
        padded = PaddedDfa.from_dict(json.load(f))
    a = _read_dfa(args.source)
    report = verify_padding(a, padded, args.budget)
    return _dump(report.to_dict()), {"passed": report.passed}, 0 if report.passed else 1


def _write_sample(sample: NspSample) -> str:
    buf = io.StringIO()
    write_dataset(sample, buf)
    return buf.getvalue()


def cmd_label(args):
    target = _read_dfa(args.dfa)
    if args.strings:
        with open(args.strings) as f:
            xs = [line.strip() for line in f if line.strip()]
        bad = [x for x in xs if not target.accepts(x)]
        if bad:
            raise NotPositiveError(f"{bad[0]!r} is not in the target language (positive-only labelling)")
        sample = NspSample(
            [NspExample(x, nsp_label_vector(target, x)) for x in xs],
            {"target": dfa_digest(target), "distribution": {"kind": "explicit-file", "path": args.strings},
             "seed": args.seed, "m": len(xs)},
        )
    else:
        n = args.n if args.n is not None else _infer_length(target)
        d = DistributionSpec(args.distribution, n, args.seed, target=target)
        sample = sample_positive(target, d, args.m)
    return _write_sample(sample), {"examples": len(sample)}, 0


def _read_labeled(path) -> list:
    out = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("{"):
                rec = json.loads(line)
                out.append(LabeledExample(rec["u"], int(rec["y"])))
            else:
                parts = line.replace(",", " ").split()
                if len(parts) != 2:
                    raise NspLabError(f"{path}:{lineno}: expected 'u y'")
                out.append(LabeledExample(parts[0], int(parts[1])))
    return out


def cmd_lift(args):
    if args.examples:
        labeled = _read_labeled(args.examples)
        provenance = {"source": args.examples, "lifted": True}
    else:
        if not args.target:
            raise UsageError("lift needs --examples or --target")
        target = _read_dfa(args.target)
        n = args.n if args.n is not None else _infer_length(target)
        d = DistributionSpec(args.distribution, n, args.seed, target=target)
        labeled = [LabeledExample(u, int(target.accepts(u))) for u in Sampler(d).draw(args.m)]
        provenance = {"target": dfa_digest(target), "distribution": d.describe(),
                      "seed": args.seed, "m": args.m, "lifted": True}
    sample = NspSample([lift_example(ex) for ex in labeled], provenance)
    return _write_sample(sample), {"examples": len(sample)}, 0


def cmd_learn(args):
    with open(args.dataset) as f:
        sample = read_dataset(f)
    if args.learner == "conjunction":
        out = learners.conjunction_learner(sample)
    elif args.learner == "prefix-tree":
        out = learners.prefix_tree_learn(sample)
    else:
        out = learners.state_merge_learn(sample, args.max_states, args.seed)
    result = {"description": out.description}
    if len(sample):
        result["train_nsp_loss"] = str(empirical_nsp_loss(out.predictor, sample))
    return _dump(out.hypothesis_dfa.to_dict()), result, 0


def cmd_eval(args):
    hyp = _read_dfa(args.hypothesis)
    with open(args.dataset) as f:
        sample = read_dataset(f)
    target = _read_dfa(args.target) if args.target else None
    loss = empirical_nsp_loss(hyp, sample, target)
    record = {"nsp_loss": str(loss), "nsp_loss_float": float(loss), "examples": len(sample)}
    return _dump(record), record, 0


def cmd_reduce(args):
    try:
        with open(args.config) as f:
            config = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: not valid JSON: {exc}") from exc
    try:
        report = run_config(config, base_dir=os.path.dirname(os.path.abspath(args.config)))
    except jsonschema.ValidationError as exc:
        raise UsageError(f"{args.config}: malformed config: {exc.message}") from exc
    record = report.to_dict()
    return _dump(record), {"domination_holds": report.domination_holds}, 0


def cmd_export_dot(args):
    try:
        with open(args.dfa) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise NspLabError(f"{args.dfa}: parse error: {exc}") from exc
    dfa = _read_dfa(args.dfa)
    text = to_dot(dfa, data.get("padding") if isinstance(data, dict) else None)
    return text, {"states": dfa.state_count}, 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "jsonl", "dot"),
                        help="output format; must match the command's native format")

    parser = argparse.ArgumentParser(prog="nsplab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="random minimal fixed-length DFA")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-states", type=int, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pad", parents=[common], help="one-bit padding plus verification")
    p.add_argument("dfa")
    p.add_argument("--n", type=int)
    p.add_argument("--budget", type=int, default=DEFAULT_VERIFY_BUDGET)
    p.set_defaults(func=cmd_pad)

    p = sub.add_parser("verify", parents=[common], help="re-verify a padded DFA against its source")
    p.add_argument("padded")
    p.add_argument("--source", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_VERIFY_BUDGET)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("label", parents=[common], help="positive NSP dataset for a target DFA")
    p.add_argument("dfa")
    p.add_argument("--strings", help="file of positive strings, one per line")
    p.add_argument("--distribution", default="uniform-positive",
                   choices=("uniform-positive", "path-weighted"))
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("lift", parents=[common], help="lift labelled examples to padded NSP examples")
    p.add_argument("--examples", help="file of 'u y' lines or JSONL {\"u\", \"y\"} records")
    p.add_argument("--target")
    p.add_argument("--distribution", default="uniform",
                   choices=("uniform", "uniform-positive", "path-weighted"))
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("learn", parents=[common], help="fit a baseline learner to an NSP dataset")
    p.add_argument("dataset")
    p.add_argument("--learner", default="state-merge", choices=("conjunction", "prefix-tree", "state-merge"))
    p.add_argument("--max-states", type=int, default=64)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("reduce", parents=[common], help="run a reduction experiment from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("eval", parents=[common], help="empirical NSP loss of a hypothesis DFA")
    p.add_argument("dataset")
    p.add_argument("--hypothesis", required=True)
    p.add_argument("--target", help="recompute truth from this DFA instead of stored labels")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-dot", parents=[common], help="Graphviz rendering of a (padded) DFA")
    p.add_argument("dfa")
    p.set_defaults(func=cmd_export_dot)
    return parser


def _inputs(args) -> dict:
    digests = {}
    for key in ("dfa", "padded", "source", "dataset", "hypothesis", "target", "config",
                "strings", "examples"):
        path = getattr(args, key, None)
        if path and os.path.isfile(path):
            digests[path] = _file_digest(path)
    return digests


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format and args.format != DEFAULT_FORMAT[args.command]:
        parser.error(f"{args.command} writes {DEFAULT_FORMAT[args.command]}, not {args.format}")

    started = time.perf_counter()
    try:
        text, result, status = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (NspLabError, ValueError, OSError, KeyError) as exc:
        print(f"nsplab {args.command}: error: {exc}", file=sys.stderr)
        return 1

    data = text.encode()
    if args.out:
        with open(args.out, "wb") as f:
            f.write(data)
    else:
        sys.stdout.write(text)

    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    manifest = {
        "command": args.command,
        "params": params,
        "seed": args.seed,
        "inputs": _inputs(args),
        "outputs": {args.out or "<stdout>": _sha256(data)},
        "result": result,
        "exit_status": status,
        "runtime_seconds": round(time.perf_counter() - started, 6),
    }
    if args.out:
        with open(args.out + ".manifest.json", "w") as f:
            f.write(_dump(manifest))
    else:
        sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
