"""Batch front end: one JSON document in, one deterministic report out.

Input is a single JSON object on stdin or via --input FILE, with kind
"pencil", "operator_heisenberg" or "operator_two_step"; matrices are
row-major arrays whose entries may be decimal strings or numbers.  Reports
echo the canonicalized input and the fully resolved configuration, serialize
every float as its shortest round-trip decimal string, and are byte-identical
across runs with the same seed except for the wall_ms field.

Exit codes: 0 for a positive finding (not locally solvable / witness found /
non-dissipative), 3 for inconclusive or not found, 2 for input errors.
QW_LOG=debug|info|warning controls diagnostic verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .config import CheckConfig, OracleConfig, SearchConfig, ToleranceConfig
from .dissipativity import DissipativityDecision, is_non_dissipative
from .errors import InputError
from .forms import (
    Pencil,
    PoissonStructure,
    SymmetricForm,
    canonical_skew,
    heisenberg_bracket_matrix,
    pencil_minmax_rank,
    poisson_bracket_forms,
)
from .groups import (
    MAXRANK_I,
    MAXRANK_II,
    MINRANK_I,
    MINRANK_II,
    ConditionReport,
    OperatorSpec,
    TwoStepGroup,
    Verdict,
    check_heisenberg,
    check_operator,
    check_two_step,
)
from .oracles import dissipativity_sweep_oracle, generate_passing_instance, witness_grid_oracle
from .witness import SearchOutcome, WitnessPoint, hoermander_witness, transversal_point

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NEGATIVE = 3

_KINDS = ("pencil", "operator_heisenberg", "operator_two_step")

_CONFIG_DEFAULTS: dict[str, float | int] = {
    "seed": 0,
    "rank_rel_tol": 1e-10,
    "psd_tol": 1e-9,
    "max_starts": 64,
    "max_newton_iters": 100,
    "residual_tol": 1e-10,
    "transversality_floor": 1e-8,
    "qc_floor": 1e-8,
    "mu_attempts": 32,
    "grid_points": 10_000,
    "sphere_samples": 1_000_000,
}


def _configure_logging() -> None:
    name = os.environ.get("QW_LOG", "warning").upper()
    level = getattr(logging, name, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _fmt(x):
    """Convert to JSON-serializable types; floats become repr strings."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return repr(float(x))
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _fmt(v) for k, v in x.items()}
    raise TypeError(f"cannot serialize {type(x)!r}")


def _parse_number(cell, where: str) -> float:
    if isinstance(cell, bool):
        raise InputError(f"{where} must be a number or decimal string")
    if isinstance(cell, (int, float)):
        v = float(cell)
    elif isinstance(cell, str):
        try:
            v = float(cell)
        except ValueError:
            raise InputError(f"{where} is not a decimal number: {cell!r}") from None
    else:
        raise InputError(f"{where} must be a number or decimal string")
    if not math.isfinite(v):
        raise InputError(f"{where} does not parse to a finite double")
    return v


def _parse_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where} must be an integer")
    return value


def _parse_matrix(obj, name: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError(f"{name} must be a non-empty array of row arrays")
    ncols = len(obj[0])
    M = np.empty((len(obj), ncols))
    for i, row in enumerate(obj):
        if len(row) != ncols:
            raise InputError(f"{name} row {i} has {len(row)} entries, expected {ncols}")
        for j, cell in enumerate(row):
            M[i, j] = _parse_number(cell, f"{name}[{i}][{j}]")
    return M


def _require_square(M: np.ndarray, name: str) -> None:
    if M.shape[0] != M.shape[1]:
        raise InputError(f"{name} must be square, got shape {M.shape[0]}x{M.shape[1]}")


def _require_symmetric(M: np.ndarray, name: str) -> None:
    _require_square(M, name)
    bad = np.argwhere(M != M.T)
    if bad.size:
        i, j = map(int, bad[0])
        raise InputError(
            f"{name} is not symmetric: {name}[{i}][{j}]={float(M[i, j])!r} != {name}[{j}][{i}]={float(M[j, i])!r}"
        )


def _require_skew(M: np.ndarray, name: str) -> None:
    _require_square(M, name)
    bad = np.argwhere(M != -M.T)
    if bad.size:
        i, j = map(int, bad[0])
        raise InputError(
            f"{name} is not skew-symmetric: {name}[{i}][{j}]={float(M[i, j])!r} != "
            f"-{name}[{j}][{i}]={float(-M[j, i])!r}"
        )


class Document:
    """Parsed, validated input document."""

    def __init__(self, data: dict):
        if not isinstance(data, dict):
            raise InputError("input document must be a JSON object")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise InputError(f"unsupported schema_version {version!r}")
        self.kind = data.get("kind")
        if self.kind not in _KINDS:
            raise InputError(f"kind must be one of {list(_KINDS)}, got {self.kind!r}")

        known = {"schema_version", "kind", "A", "B", "J", "C", "d", "m", "ell", "J_list", "config"}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown document fields: {sorted(unknown)}")

        for key in ("A", "B"):
            if key not in data:
                raise InputError(f"document is missing the matrix {key!r}")
        self.A = _parse_matrix(data["A"], "A")
        self.B = _parse_matrix(data["B"], "B")
        _require_symmetric(self.A, "A")
        _require_symmetric(self.B, "B")
        if self.A.shape != self.B.shape:
            raise InputError(f"A and B have different shapes {self.A.shape} != {self.B.shape}")

        self.J = None
        self.C = None
        self.d = None
        self.m = None
        self.ell = None
        self.J_list: list[np.ndarray] = []

        if self.kind == "pencil":
            if "J" in data:
                self.J = _parse_matrix(data["J"], "J")
                _require_skew(self.J, "J")
                if self.J.shape != self.A.shape:
                    raise InputError("J must match the dimension of A and B")
            if "C" in data:
                self.C = _parse_matrix(data["C"], "C")
                _require_symmetric(self.C, "C")
                if self.C.shape != self.A.shape:
                    raise InputError("C must match the dimension of A and B")
        elif self.kind == "operator_heisenberg":
            if "d" not in data:
                raise InputError("operator_heisenberg documents need the integer field d")
            self.d = _parse_int(data["d"], "d")
            if self.d < 1:
                raise InputError("d must be positive")
            if self.A.shape[0] != 2 * self.d:
                raise InputError(f"A has dimension {self.A.shape[0]}, expected 2d = {2 * self.d}")
        else:
            for key in ("m", "ell", "J_list"):
                if key not in data:
                    raise InputError(f"operator_two_step documents need the field {key!r}")
            self.m = _parse_int(data["m"], "m")
            self.ell = _parse_int(data["ell"], "ell")
            if not isinstance(data["J_list"], list) or len(data["J_list"]) != self.ell:
                raise InputError(f"J_list must hold exactly ell = {self.ell} matrices")
            for i, Jraw in enumerate(data["J_list"]):
                J = _parse_matrix(Jraw, f"J_list[{i}]")
                _require_skew(J, f"J_list[{i}]")
                if J.shape != (self.m, self.m):
                    raise InputError(f"J_list[{i}] must be {self.m}x{self.m}")
                self.J_list.append(J)
            if self.A.shape[0] != self.m:
                raise InputError(f"A has dimension {self.A.shape[0]}, expected m = {self.m}")

        cfg = data.get("config", {})
        if not isinstance(cfg, dict):
            raise InputError("config must be an object")
        self.raw_config = cfg

    def echo(self, resolved_config: dict) -> dict:
        out: dict = {"schema_version": SCHEMA_VERSION, "kind": self.kind, "A": self.A, "B": self.B}
        if self.J is not None:
            out["J"] = self.J
        if self.C is not None:
            out["C"] = self.C
        if self.d is not None:
            out["d"] = self.d
        if self.m is not None:
            out["m"] = self.m
            out["ell"] = self.ell
            out["J_list"] = list(self.J_list)
        out["config"] = dict(resolved_config)
        return out


def _resolve_config(doc_cfg: dict, args) -> dict:
    merged: dict = dict(_CONFIG_DEFAULTS)
    for key, value in doc_cfg.items():
        if key not in merged:
            raise InputError(f"unknown config key {key!r}")
        if isinstance(merged[key], int):
            if isinstance(value, str):
                value = _parse_number(value, f"config.{key}")
            if isinstance(value, float) and not value.is_integer():
                raise InputError(f"config.{key} must be an integer")
            merged[key] = int(value)
        else:
            merged[key] = _parse_number(value, f"config.{key}")
    for attr, key in (
        ("seed", "seed"),
        ("tol_rank", "rank_rel_tol"),
        ("tol_psd", "psd_tol"),
        ("max_starts", "max_starts"),
        ("mu_attempts", "mu_attempts"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    return merged


def _check_config(merged: dict) -> CheckConfig:
    tol = ToleranceConfig(rank_rel_tol=merged["rank_rel_tol"], psd_tol=merged["psd_tol"])
    search = SearchConfig(
        seed=merged["seed"],
        max_starts=merged["max_starts"],
        max_newton_iters=merged["max_newton_iters"],
        residual_tol=merged["residual_tol"],
        transversality_floor=merged["transversality_floor"],
        qc_floor=merged["qc_floor"],
    )
    return CheckConfig(tol=tol, search=search, mu_attempts=merged["mu_attempts"])


def _load_document(args) -> Document:
    if args.input:
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = sys.stdin.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON: {e}") from None
    return Document(data)


def _decision_dict(dec: DissipativityDecision) -> dict:
    return {
        "verdict": dec.verdict,
        "margin": dec.margin,
        "margin_rel": dec.margin_rel,
        "witness_theta": dec.witness_theta,
        "certificate_P": dec.certificate_P,
        "certificate_unavailable": dec.certificate_unavailable,
        "trace_residuals": list(dec.trace_residuals) if dec.trace_residuals else None,
    }


def _witness_dict(w: WitnessPoint | None) -> dict | None:
    if w is None:
        return None
    return {
        "x": w.x,
        "residual_A": w.residual_A,
        "residual_B": w.residual_B,
        "transversality": w.transversality,
        "qc_value": w.qc_value,
    }


def _frontier_note(report: ConditionReport) -> list[str]:
    c = report.cond_c
    if c is None:
        return ["pencil degenerate: rank conditions not evaluated"]
    notes = [
        f"minrank={c.minrank} (regime I needs >={MINRANK_I}, regime II needs =={MINRANK_II})",
        f"maxrank={c.maxrank} (regime I needs >={MAXRANK_I}, regime II needs >={MAXRANK_II})",
        f"joint_kernel_dim={c.joint_kernel_dim}, kernel_symplectic={c.kernel_symplectic}",
    ]
    if c.branch == "fail" and c.maxrank < MAXRANK_II:
        notes.append(
            f"binding threshold: maxrank {c.maxrank} < {MAXRANK_II}; the checker makes no claim in this low-rank zone"
        )
    elif c.branch == "fail" and c.maxrank < MAXRANK_I and c.minrank >= MINRANK_I:
        notes.append(f"binding threshold: maxrank {c.maxrank} < {MAXRANK_I} with minrank >= {MINRANK_I}")
    return notes


def _report_dict(report: ConditionReport, frontier: bool) -> dict:
    b = report.cond_b
    out: dict = {
        "a": None if report.cond_a is None else _decision_dict(report.cond_a),
        "b": {
            "mu0": b.mu0,
            "jmu_sigma_min": b.jmu_sigma_min,
            "independent": b.independent,
            "sigma_ratio": b.sigma_ratio,
        },
        "c": None,
    }
    if report.cond_c is not None:
        c = report.cond_c
        out["c"] = {
            "branch": c.branch,
            "minrank": c.minrank,
            "maxrank": c.maxrank,
            "argmin_direction": list(c.argmin_direction),
            "joint_kernel_dim": c.joint_kernel_dim,
            "kernel_symplectic": c.kernel_symplectic,
            "rank_heuristic": c.rank_heuristic,
        }
    if frontier:
        out["frontier"] = _frontier_note(report)
    return out


def _verdict_dict(v: Verdict, frontier: bool) -> dict:
    out = {
        "verdict": v.kind,
        "scope": v.scope,
        "reasons": list(v.reasons),
        "conditions": _report_dict(v.report, frontier),
        "mu0": v.mu0,
        "bracket_form_C": None if v.bracket_form is None else v.bracket_form.entries,
        "witness": _witness_dict(v.witness),
        "evidence": None,
    }
    if v.evidence is not None:
        out["evidence"] = {
            "v_prime": v.evidence.v_prime,
            "qc_leading_coefficient": v.evidence.qc_leading_coefficient,
            "scaling_power": v.evidence.scaling_power,
            "mu0": v.evidence.mu0,
            "zeta0": v.evidence.zeta0,
        }
    return out


def _emit(args, command: str, echo: dict, merged: dict, result: dict, t0: float) -> None:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "quadwitness",
        "version": __version__,
        "command": command,
        "seed": merged["seed"],
        "input": echo,
        "result": result,
        "wall_ms": (time.perf_counter() - t0) * 1000.0,
    }
    if args.output == "pretty":
        _print_pretty(command, result)
    else:
        print(json.dumps(_fmt(report), sort_keys=True, indent=2))


def _print_pretty(command: str, result: dict) -> None:
    print(f"quadwitness {command}")
    for key, value in result.items():
        if isinstance(value, np.ndarray):
            print(f"  {key}:")
            for row in np.atleast_2d(value):
                print("    " + "  ".join(f"{v: .12g}" for v in row))
        elif isinstance(value, dict):
            print(f"  {key}: " + json.dumps(_fmt(value), sort_keys=True))
        else:
            print(f"  {key}: {value}")


def _structure_for(doc: Document, n: int) -> np.ndarray:
    if doc.J is not None:
        return doc.J
    if doc.kind == "operator_heisenberg":
        return canonical_skew(doc.d)
    if n % 2 != 0:
        raise InputError("no structure matrix J given and the dimension is odd")
    return canonical_skew(n // 2)


def cmd_bracket(args) -> int:
    t0 = time.perf_counter()
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    A, B = SymmetricForm(doc.A), SymmetricForm(doc.B)
    if args.heisenberg_normalization:
        C = heisenberg_bracket_matrix(A, B)
        normalization = "half_commutator"
    else:
        C = poisson_bracket_forms(A, B, _structure_for(doc, A.n))
        normalization = "gradient_pairing"
    result = {"C": C.entries, "normalization": normalization}
    _emit(args, "bracket", doc.echo(merged), merged, result, t0)
    return EXIT_OK


def cmd_nondissipative(args) -> int:
    t0 = time.perf_counter()
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    cfg = _check_config(merged)
    decision = is_non_dissipative(Pencil(SymmetricForm(doc.A), SymmetricForm(doc.B), cfg.tol), cfg.tol)
    _emit(args, "nondissipative", doc.echo(merged), merged, _decision_dict(decision), t0)
    return EXIT_OK if decision.non_dissipative else EXIT_NEGATIVE


def cmd_ranks(args) -> int:
    t0 = time.perf_counter()
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    cfg = _check_config(merged)
    summary = pencil_minmax_rank(
        Pencil(SymmetricForm(doc.A), SymmetricForm(doc.B), cfg.tol), cfg.tol, seed=merged["seed"]
    )
    result = {
        "minrank": summary.minrank,
        "maxrank": summary.maxrank,
        "argmin_direction": list(summary.argmin_direction),
        "heuristic": summary.heuristic,
    }
    _emit(args, "ranks", doc.echo(merged), merged, result, t0)
    return EXIT_OK


def _outcome_dict(outcome: SearchOutcome) -> dict:
    return {
        "found": outcome.found,
        "witness": _witness_dict(outcome.witness),
        "starts_used": outcome.starts_used,
        "converged": outcome.converged,
        "max_abs_qc": outcome.max_abs_qc,
    }


def cmd_witness(args) -> int:
    t0 = time.perf_counter()
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    cfg = _check_config(merged)
    A, B = SymmetricForm(doc.A), SymmetricForm(doc.B)
    if doc.C is not None:
        mode = "bracket_witness"
        outcome = hoermander_witness(A, B, SymmetricForm(doc.C), cfg.search)
    elif doc.J is not None or doc.kind == "operator_heisenberg":
        mode = "bracket_witness"
        C = poisson_bracket_forms(A, B, _structure_for(doc, A.n))
        outcome = hoermander_witness(A, B, C, cfg.search)
    else:
        mode = "transversal_point"
        outcome = transversal_point(Pencil(A, B, cfg.tol), cfg.search)
    result = {"mode": mode, **_outcome_dict(outcome)}
    _emit(args, "witness", doc.echo(merged), merged, result, t0)
    return EXIT_OK if outcome.found else EXIT_NEGATIVE


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    cfg = _check_config(merged)
    op = OperatorSpec(A=SymmetricForm(doc.A), B=SymmetricForm(doc.B))
    if doc.kind == "pencil":
        if doc.J is None:
            raise InputError("check on a pencil document needs an explicit structure matrix J")
        verdict = check_operator(op, doc.J, cfg)
    elif doc.kind == "operator_heisenberg":
        verdict = check_heisenberg(doc.d, op, cfg)
    else:
        group = TwoStepGroup(m=doc.m, ell=doc.ell, J_list=tuple(doc.J_list))
        verdict = check_two_step(group, op, cfg)
    _emit(args, "check", doc.echo(merged), merged, _verdict_dict(verdict, args.frontier), t0)
    return EXIT_OK if verdict.not_locally_solvable else EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    if args.kind == "generate":
        if args.m is None:
            raise InputError("oracle --kind generate needs --m")
        merged = _resolve_config({}, args)
        cfg = _check_config(merged)
        instance = generate_passing_instance(args.m, seed=merged["seed"], cfg=cfg)
        result = {
            "A": instance.A.entries,
            "B": instance.B.entries,
            "rejections": instance.rejections,
            "conditions": _report_dict(instance.report, frontier=False),
        }
        _emit(args, "oracle", {"generated": True, "m": args.m, "config": merged}, merged, result, t0)
        return EXIT_OK
    doc = _load_document(args)
    merged = _resolve_config(doc.raw_config, args)
    ocfg = OracleConfig(
        grid_points=merged["grid_points"], sphere_samples=merged["sphere_samples"], seed=merged["seed"]
    )
    if args.kind == "sweep":
        verdict = dissipativity_sweep_oracle(doc.A, doc.B, ocfg)
        result = {"oracle": "sweep", "verdict": verdict}
    else:
        if doc.C is None:
            raise InputError("oracle --kind grid needs a C matrix in the document")
        grid = witness_grid_oracle(doc.A, doc.B, doc.C, ocfg)
        result = {
            "oracle": "grid",
            "x": grid.x,
            "abs_qa": grid.abs_qa,
            "abs_qb": grid.abs_qb,
            "abs_qc": grid.abs_qc,
            "n_feasible": grid.n_feasible,
            "max_abs_qc": grid.max_abs_qc,
        }
    _emit(args, "oracle", doc.echo(merged), merged, result, t0)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="FILE", help="read the JSON document from FILE instead of stdin")
    common.add_argument("--seed", type=int, default=None, help="seed of record for every randomized stage")
    common.add_argument("--tol-rank", type=float, default=None, dest="tol_rank", help="relative rank tolerance")
    common.add_argument("--tol-psd", type=float, default=None, dest="tol_psd", help="relative semidefiniteness tolerance")
    common.add_argument("--max-starts", type=int, default=None, dest="max_starts", help="witness search start budget")
    common.add_argument("--mu-attempts", type=int, default=None, dest="mu_attempts", help="mu sampling budget")
    common.add_argument("--output", choices=("json", "pretty"), default="json", help="report format")

    parser = argparse.ArgumentParser(prog="qw", description="solvability obstruction checker for quadratic form pencils")
    parser.add_argument("--version", action="version", version=f"quadwitness {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{bracket,nondissipative,ranks,witness,check}")

    p = sub.add_parser("bracket", parents=[common], help="compute the bracket form C of A and B")
    p.add_argument("--heisenberg-normalization", action="store_true", help="use C = (AJB - BJA)/2 with the canonical J")
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("nondissipative", parents=[common], help="decide whether (A, B) is a non-dissipative pair")
    p.set_defaults(func=cmd_nondissipative)

    p = sub.add_parser("ranks", parents=[common], help="minimum and maximum rank over the pencil")
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("witness", parents=[common], help="search the quadric intersection for a witness point")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("check", parents=[common], help="run the full nonsolvability condition pipeline")
    p.add_argument("--frontier", action="store_true", help="annotate which rank threshold was binding")
    p.set_defaults(func=cmd_check)

    # intentionally undocumented: reproduce any oracle run from a seed
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("--kind", choices=("sweep", "grid", "generate"), required=True)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "frontier"):
        args.frontier = False
    if not hasattr(args, "heisenberg_normalization"):
        args.heisenberg_normalization = False
    try:
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": {"kind": "input", "message": str(exc)}}, sort_keys=True, indent=2))
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
