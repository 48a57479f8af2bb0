"""Command-line front end: scenario files, verification runs, resource
tables, and branch traces.

Scenario files are JSON (version 1) with complex numbers as [re, im]
pairs. A scenario either spells out the register explicitly::

    {"version": 1, "name": "...", "nodes": ["A", "B"],
     "qubits": [["A1", "A"], ["B1", "B"], ["B2", "B"]],
     "controls": ["A1", "B1"], "target": "B2", "u": "X",
     "input": null, "seed": 7, "mode": "exhaustive", "shots": 1024}

or, for the three-node chain family, gives only "n" (qubits per node).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

import numpy as np

from .compiler import Program, compile_plan
from .errors import (
    ImpossibleBranchError,
    ScenarioError,
    SpecValidationError,
    TelegateError,
)
from .executor import execute_branch, extract_data_state, run_sampled
from .gates import named_unitary
from .model import DistributedGateSpec, Ownership, plan_groups, validate_spec
from .presets import three_node_chain
from .resources import render_table1, render_table2, table1_data, table2_data
from .statevector import StateVector, from_amplitudes
from .verifier import (
    BranchCheck,
    VerificationReport,
    apply_ideal,
    describe_gate,
    random_state,
    verify_gate,
)
from .resources import account

BUNDLED = ("bipartite_case1", "bipartite_case2", "tripartite", "fig2_parametric")


@dataclass
class Scenario:
    name: str
    ownership: Ownership
    spec: DistributedGateSpec
    input_state: StateVector | None
    seed: int
    mode: str
    shots: int


def _complex_pairs(raw, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(f"{what} must be numeric [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ScenarioError(f"{what} must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _parse_unitary(raw) -> tuple[np.ndarray, str | None]:
    if isinstance(raw, str):
        try:
            return named_unitary(raw), raw
        except ValueError as e:
            raise ScenarioError(str(e)) from None
    mat = _complex_pairs(raw, '"u"')
    if mat.shape != (2, 2):
        raise ScenarioError(f'"u" matrix must be 2x2, got shape {mat.shape}')
    return mat, None


def parse_scenario(payload: dict, name_hint: str = "scenario",
                   n_override: int | None = None) -> Scenario:
    """Build a Scenario from decoded JSON; raises ScenarioError on any
    malformation, naming the offending field or label."""
    if not isinstance(payload, dict):
        raise ScenarioError("scenario must be a JSON object")
    if payload.get("version") != 1:
        raise ScenarioError(f'scenario "version" must be 1, got {payload.get("version")!r}')
    name = payload.get("name", name_hint)
    seed = payload.get("seed", 7)
    if not isinstance(seed, int):
        raise ScenarioError(f'"seed" must be an integer, got {seed!r}')
    mode = payload.get("mode", "exhaustive")
    if mode not in ("exhaustive", "sampled"):
        raise ScenarioError(f'"mode" must be "exhaustive" or "sampled", got {mode!r}')
    shots = payload.get("shots", 1024)
    if not isinstance(shots, int) or shots < 1:
        raise ScenarioError(f'"shots" must be a positive integer, got {shots!r}')

    if "qubits" not in payload and "n" in payload:
        n = n_override if n_override is not None else payload["n"]
        if not isinstance(n, int) or n < 1:
            raise ScenarioError(f'"n" must be a positive integer, got {n!r}')
        own, spec = three_node_chain(n)
    else:
        for key in ("nodes", "qubits", "controls", "target", "u"):
            if key not in payload:
                raise ScenarioError(f'scenario is missing required field "{key}"')
        nodes = payload["nodes"]
        if (not isinstance(nodes, list) or not nodes
                or any(not isinstance(x, str) for x in nodes)):
            raise ScenarioError('"nodes" must be a non-empty list of strings')
        if len(set(nodes)) != len(nodes):
            raise ScenarioError('"nodes" contains duplicates')
        pairs = []
        for entry in payload["qubits"]:
            if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                    or not all(isinstance(x, str) for x in entry)):
                raise ScenarioError(f'"qubits" entries must be [label, node] pairs, got {entry!r}')
            label, node = entry
            if node not in nodes:
                raise ScenarioError(f"qubit {label!r} assigned to unknown node {node!r}")
            pairs.append((label, node))
        try:
            own = Ownership(pairs)
        except ValueError as e:
            raise ScenarioError(str(e)) from None
        u, u_label = _parse_unitary(payload["u"])
        controls = payload["controls"]
        if not isinstance(controls, list) or any(not isinstance(c, str) for c in controls):
            raise ScenarioError('"controls" must be a list of qubit labels')
        if not isinstance(payload["target"], str):
            raise ScenarioError('"target" must be a qubit label')
        spec = DistributedGateSpec(controls, payload["target"], u, u_label)
    problems = validate_spec(spec, own)
    if problems:
        raise ScenarioError("; ".join(problems))

    input_state = None
    if payload.get("input") is not None:
        amps = _complex_pairs(payload["input"], '"input"')
        if amps.ndim != 1 or amps.shape[0] != 1 << len(own):
            raise ScenarioError(
                f'"input" must have {1 << len(own)} amplitudes for {len(own)} qubits'
            )
        try:
            input_state = from_amplitudes(amps)
        except ValueError as e:
            raise ScenarioError(f'bad "input": {e}') from None
    return Scenario(name, own, spec, input_state, seed, mode, shots)


def load_scenario(source: str, n_override: int | None = None) -> Scenario:
    """Load a bundled scenario by name or any scenario file by path."""
    if source in BUNDLED:
        ref = importlib_resources.files("telegate.scenarios").joinpath(f"{source}.json")
        text = ref.read_text(encoding="utf-8")
    else:
        path = Path(source)
        if not path.is_file():
            raise ScenarioError(
                f"{source!r} is neither a bundled scenario {list(BUNDLED)} nor a file"
            )
        text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON in {source!r}: {e}") from None
    return parse_scenario(payload, name_hint=source, n_override=n_override)


# ------------------------------------------------------------------ verify

def _verify_sampled(scenario: Scenario, program: Program,
                    inputs: list[StateVector], tol: float) -> VerificationReport:
    """Sampled-mode verification: draw `shots` seeded runs per input and
    compare every sampled final data state against the ideal gate."""
    checks: list[BranchCheck] = []
    seen_bits: dict[tuple[int, str], float] = {}
    for k, state in enumerate(inputs):
        ideal = apply_ideal(scenario.spec, scenario.ownership, state)
        for shot in range(scenario.shots):
            res = run_sampled(program, state, seed=scenario.seed + shot,
                              own=scenario.ownership)
            data = extract_data_state(program, res)
            dev = float(np.max(np.abs(data.amps - ideal.amps)))
            bits = res.outcome_bits(program.measurement_tags)
            key = (k, bits)
            seen_bits[key] = max(dev, seen_bits.get(key, 0.0))
    for (k, bits), dev in sorted(seen_bits.items()):
        checks.append(BranchCheck(k, bits, dev, 1.0, dev <= tol))
    max_dev = max((c.deviation for c in checks), default=0.0)
    return VerificationReport(
        gate=describe_gate(scenario.spec, scenario.ownership),
        tolerance=tol,
        num_inputs=len(inputs),
        branches_per_input=len({b for _, b in seen_bits}),
        max_deviation=max_dev,
        min_fidelity=1.0,
        passed=all(c.passed for c in checks),
        resources=account(program),
        checks=checks,
    )


def cmd_verify(args) -> int:
    scenario = load_scenario(args.scenario, n_override=args.n)
    program = compile_plan(
        plan_groups(scenario.spec, scenario.ownership), scenario.spec.u
    )
    rng = np.random.default_rng(scenario.seed)
    inputs: list[StateVector] = []
    if scenario.input_state is not None:
        inputs.append(scenario.input_state)
    inputs.extend(random_state(len(scenario.ownership), rng)
                  for _ in range(args.inputs))
    if scenario.mode == "sampled":
        report = _verify_sampled(scenario, program, inputs, args.tol)
    else:
        report = verify_gate(scenario.spec, scenario.ownership, inputs,
                             tol=args.tol, program=program)
    if args.json:
        print(report.to_json())
    else:
        print(f"scenario:    {scenario.name}")
        print(report.to_text(), end="")
    return 0 if report.passed else 1


# ------------------------------------------------------------------ report

def cmd_report(args) -> int:
    n_values = list(range(1, args.n_max + 1))
    if args.json:
        data = {"table1": table1_data()} if args.table == 1 else \
            {"table2": table2_data(n_values)}
        print(json.dumps(data, indent=2))
    else:
        print(render_table1() if args.table == 1 else render_table2(n_values), end="")
    return 0


# ------------------------------------------------------------------ trace

def cmd_trace(args) -> int:
    scenario = load_scenario(args.scenario, n_override=args.n)
    program = compile_plan(
        plan_groups(scenario.spec, scenario.ownership), scenario.spec.u
    )
    tags = program.measurement_tags
    bits = args.branch
    if len(bits) != len(tags) or any(b not in "01" for b in bits):
        raise ScenarioError(
            f"branch {bits!r} must be {len(tags)} bits (one per measurement "
            f"{list(tags)})"
        )
    forced = {tag: int(b) for tag, b in zip(tags, bits)}
    if scenario.input_state is not None:
        state = scenario.input_state
    else:
        state = random_state(len(scenario.ownership), np.random.default_rng(scenario.seed))
    result = execute_branch(program, state, forced, own=scenario.ownership)
    if args.json:
        text = json.dumps({
            "scenario": scenario.name,
            "branch": bits,
            "probability": result.probability,
            "trace": list(result.trace),
        }, indent=2) + "\n"
    else:
        text = "\n".join(result.trace) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        print(text, end="")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telegate",
        description="Verify remote controlled-U protocols on distributed "
                    "quantum registers and reproduce their resource accounting.",
        epilog="Environment: TELEGATE_MAX_QUBITS caps the register size "
               "(default 26); TELEGATE_BACKEND selects the amplitude-kernel "
               "backend (auto | numba | numpy).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_arg(p):
        p.add_argument("scenario",
                       help=f"bundled name ({', '.join(BUNDLED)}) or JSON file path")
        p.add_argument("--n", type=int, default=None,
                       help="qubits per node for the parametric scenario")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p_verify = sub.add_parser("verify", help="check protocol vs ideal gate branch by branch")
    add_scenario_arg(p_verify)
    p_verify.add_argument("--inputs", type=int, default=20, metavar="N",
                          help="number of random input states (default 20)")
    p_verify.add_argument("--tol", type=float, default=1e-12,
                          help="amplitude tolerance (default 1e-12)")
    p_verify.set_defaults(fn=cmd_verify)

    p_report = sub.add_parser("report", help="render resource-comparison tables")
    p_report.add_argument("--table", type=int, choices=(1, 2), required=True)
    p_report.add_argument("--n-max", type=int, default=5, metavar="K",
                          help="largest n for the parametric table (default 5)")
    p_report.add_argument("--json", action="store_true", help="machine-readable output")
    p_report.set_defaults(fn=cmd_report)

    p_trace = sub.add_parser("trace", help="write the executed-instruction trace of one branch")
    add_scenario_arg(p_trace)
    p_trace.add_argument("--branch", required=True, metavar="BITS",
                         help="forced outcome bits, one per measurement in program order")
    p_trace.add_argument("--out", default=None, metavar="PATH",
                         help="output file (default: stdout)")
    p_trace.set_defaults(fn=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_max", 1) < 1:
        parser.error("--n-max must be >= 1")
    if getattr(args, "inputs", 0) < 0:
        parser.error("--inputs must be >= 0")
    try:
        return args.fn(args)
    except (ScenarioError, SpecValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ImpossibleBranchError as e:
        print(f"error: impossible branch: {e}", file=sys.stderr)
        return 1
    except TelegateError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
