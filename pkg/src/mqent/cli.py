"""Command-line entry point: ``mqent {state,tensor,classify,measure,verify,werner}``.

Exit status is 0 on success, 2 on invalid input and 1 on internal errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classify, correlation, measure, mixed, oracle, qstate

log = logging.getLogger("mqent")

COMMANDS = ("state", "tensor", "classify", "measure", "verify", "werner")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    name: str | None = None
    subset: tuple[int, ...] | None = None
    epsilon: float = classify.DEFAULT_EPS
    prime: bool = False
    normalize: bool = False
    seed: int = 0
    renormalize: bool = False
    random: int = 100
    max_qubits: int = 6
    fidelity_grid: str = "0:1:21"
    workers: int | None = None
    label: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise qstate.StateError(f"unknown command {self.command!r}")
        if not self.epsilon > 0:
            raise qstate.StateError("epsilon must be positive")


def parse_state_file(path, renormalize: bool = False) -> qstate.PureState:
    return qstate.load_state(path, renormalize=renormalize)


def _parse_subset(text: str | None):
    if not text:
        return None
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise qstate.StateError(f"bad subset {text!r}; expected e.g. 1,2,3") from exc


def _parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(float(start), float(stop), int(count))]
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise qstate.StateError(f"bad fidelity grid {text!r}") from exc


def _state_from_name(text: str) -> qstate.PureState:
    parts = [qstate.named_state(p) for p in text.split("*")]
    state = qstate.product(*parts)
    return qstate.PureState(state.n_qubits, state.amplitudes, text)


def _load(config: RunConfig) -> qstate.PureState:
    if config.name:
        return _state_from_name(config.name)
    if config.input is None:
        raise qstate.StateError("an --input file or a --name is required")
    return parse_state_file(config.input, config.renormalize)


def _verify(config: RunConfig) -> dict:
    rng = np.random.default_rng(config.seed)
    matches, mismatches = 0, []
    for trial in range(config.random):
        n = int(rng.integers(1, config.max_qubits + 1))
        state, planted = qstate.planted_state(rng, n)
        found = classify.finest_partition(state, config.epsilon)
        truth = oracle.oracle_partition(state, config.epsilon)
        if found.blocks == truth.blocks:
            matches += 1
        else:
            mismatches.append({"trial": trial, "planted": planted,
                               "classifier": [list(b) for b in found.blocks],
                               "oracle": [list(b) for b in truth.blocks]})
    return {"trials": config.random, "matches": matches,
            "agreement": f"{matches}/{config.random}", "max_qubits": config.max_qubits,
            "seed": config.seed, "epsilon": config.epsilon, "mismatches": mismatches}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns ``(exit_status, report_text)``."""
    if config.command == "werner":
        rows = mixed.werner_scan(_parse_grid(config.fidelity_grid))
        print(mixed.WERNER_CAVEAT, file=sys.stderr)
        return 0, mixed.scan_csv(rows)
    if config.command == "verify":
        report = _verify(config)
        print(f"agreement: {report['agreement']}", file=sys.stderr)
        return 0, json.dumps(report, indent=2) + "\n"

    state = _load(config)
    if config.command == "state":
        doc = qstate.state_to_json(state, config.label)
        return 0, json.dumps(doc, indent=1) + "\n"
    if config.command == "tensor":
        kind = "MPrime" if config.prime else "M"
        doc = correlation.tensor_scan(state, config.subset, kind, config.epsilon).to_json()
    elif config.command == "classify":
        doc = classify.classification_report(state, config.epsilon, config.workers)
    else:
        rep = measure.measure_report(state, config.subset)
        doc = rep.to_json() if config.normalize else {"subset": list(rep.subset), "raw": rep.raw}
    return 0, json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state_input=True):
        p.add_argument("--output", type=Path, help="report file (default: stdout)")
        if state_input:
            p.add_argument("--input", type=Path, help="state JSON file")
            p.add_argument("--name", help="named state, e.g. ghz:4 or ghz:3*basis:0")
            p.add_argument("--renormalize", action="store_true")
        return p

    p = common(sub.add_parser("state", help="write a state file"))
    p.add_argument("--label")
    p = common(sub.add_parser("tensor", help="dump the M or M' tensor"))
    p.add_argument("--subset")
    p.add_argument("--prime", action="store_true", help="M' instead of M")
    p.add_argument("--eps", type=float, default=classify.DEFAULT_EPS)
    p = common(sub.add_parser("classify", help="finest entangled-block partition"))
    p.add_argument("--eps", type=float, default=classify.DEFAULT_EPS)
    p.add_argument("--workers", type=int)
    p = common(sub.add_parser("measure", help="entanglement magnitude B"))
    p.add_argument("--subset")
    p.add_argument("--normalize", action="store_true", help="also divide by the GHZ value")
    p = common(sub.add_parser("verify", help="classifier vs oracle on random planted states"), False)
    p.add_argument("--random", type=int, default=100)
    p.add_argument("--max-qubits", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-7)
    p = common(sub.add_parser("werner", help="Werner-state correlation scan (CSV)"), False)
    p.add_argument("--fidelity-grid", default="0:1:21")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input=getattr(args, "input", None),
            output=args.output,
            name=getattr(args, "name", None),
            subset=_parse_subset(getattr(args, "subset", None)),
            epsilon=getattr(args, "eps", classify.DEFAULT_EPS),
            prime=getattr(args, "prime", False),
            normalize=getattr(args, "normalize", False),
            seed=getattr(args, "seed", 0),
            renormalize=getattr(args, "renormalize", False),
            random=getattr(args, "random", 100),
            max_qubits=getattr(args, "max_qubits", 6),
            fidelity_grid=getattr(args, "fidelity_grid", "0:1:21"),
            workers=getattr(args, "workers", None),
            label=getattr(args, "label", None),
        )
        status, text = run(config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error: %s", exc)
        return 1
    if config.output:
        config.output.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
