"""Command-line interface and report serialization.

Subcommands: ``check-cp``, ``witness``, ``convert``, ``evolve``, ``scan``.
Configuration and reports are JSON; complex entries are two-element
``[re, im]`` arrays and matrices are lists of rows, so reports are
diff-able and round-trip binary64 exactly.

Exit codes: 0 = CP / success, 2 = non-CP (or positivity violation)
certified, 1 = usage or configuration error.  Identical config and seed
produce byte-identical reports.

The positivity tolerance resolves as: ``--tol`` flag, then the config
``tolerances.positivity`` field, then the ``CPLAB_TOL`` environment
variable, then the built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .basis import OperatorBasis, standard_basis
from .dynamics import (
    DensityMatrix,
    evolution_map,
    is_completely_positive,
    tensor_extension,
)
from .errors import (
    ConfigError,
    CplabError,
    DimensionMismatch,
    NegativeTime,
    NotCompletelyPositive,
)
from .generator import (
    GKSGenerator,
    LindbladGenerator,
    Superoperator,
    gks_to_lindblad,
    lindblad_to_gks,
)
from .linalg import POSITIVITY_TOL, fro_norm, hermiticity_deviation, matrix_exp
from .witness import (
    NegativityScan,
    NoNegativeDirection,
    WitnessCandidate,
    bell_phi_matrix,
    construct_witness,
    negativity_scan,
)

_ENV_TOL = "CPLAB_TOL"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CP = 2


# --------------------------------------------------------------------------
# JSON <-> numpy
# --------------------------------------------------------------------------


def _complex_to_json(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _vector_to_json(v) -> list:
    return [_complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def _matrix_to_json(m) -> list:
    return [[_complex_to_json(z) for z in row] for row in np.asarray(m)]


def _entry_from_json(value, field: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{field}: entry {value!r} is not a number or [re, im] pair")


def _vector_from_json(obj, field: str, length: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{field}: expected a nonempty list of entries")
    vec_ = np.array([_entry_from_json(v, f"{field}[{i}]") for i, v in enumerate(obj)])
    if length is not None and vec_.size != length:
        raise ConfigError(f"{field}: expected {length} entries, got {vec_.size}")
    return vec_


def _matrix_from_json(obj, field: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ConfigError(f"{field}: expected a list of rows")
    width = cols if cols is not None else len(obj[0])
    data = []
    for i, row in enumerate(obj):
        if len(row) != width:
            raise ConfigError(f"{field} row {i} has {len(row)} entries, expected {width}")
        data.append([_entry_from_json(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)])
    mat = np.array(data, dtype=complex)
    if rows is not None and mat.shape[0] != rows:
        raise ConfigError(f"{field} has {mat.shape[0]} rows, expected {rows}")
    return mat


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemConfig:
    """Parsed problem statement: generator, tolerances, seed, grid."""

    dim: int
    form: str
    gks: GKSGenerator
    lindblad: LindbladGenerator | None
    tolerance: float
    seed: int
    grid: tuple | None
    initial_state: DensityMatrix | None
    echo: dict


def _parse_grid_spec(spec: str) -> tuple:
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--grid expects 'start:stop:points:log|lin', got {spec!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"--grid: {exc}") from None
    if points < 1 or start < 0 or stop <= start:
        raise ConfigError(f"--grid: need 0 <= start < stop and points >= 1, got {spec!r}")
    if parts[3] == "log":
        if start <= 0:
            raise ConfigError("--grid: log spacing needs start > 0")
        return tuple(np.geomspace(start, stop, points))
    if parts[3] in ("lin", "linear"):
        return tuple(np.linspace(start, stop, points))
    raise ConfigError(f"--grid: spacing must be 'log' or 'lin', got {parts[3]!r}")


def _bell_singlet_state() -> DensityMatrix:
    v = bell_phi_matrix().reshape(-1)
    return DensityMatrix.from_pure(v)


def _resolve_tolerance(cli_tol, config_tol) -> float:
    if cli_tol is not None:
        return float(cli_tol)
    if config_tol is not None:
        return float(config_tol)
    env = os.environ.get(_ENV_TOL)
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise ConfigError(f"{_ENV_TOL}={env!r} is not a number") from None
    return POSITIVITY_TOL


def load_config(args) -> ProblemConfig:
    """Read, validate and normalize the problem configuration."""
    raw: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")

    preset_state = None
    if args.preset is not None:
        if args.preset != "meson-d2":
            raise ConfigError(f"unknown preset {args.preset!r}")
        raw.setdefault("dim", 2)
        if raw["dim"] != 2:
            raise ConfigError("preset meson-d2 requires dim = 2")
        gen = raw.setdefault("generator", {})
        if not isinstance(gen, dict):
            raise ConfigError("generator: expected a JSON object")
        gen.setdefault("hamiltonian", [[0.0, 0.0], [0.0, 0.0]])
        if "coeff" not in gen:
            raise ConfigError("preset meson-d2 needs the user-supplied generator.coeff matrix")
        preset_state = _bell_singlet_state()
    elif args.config is None:
        raise ConfigError("--config is required (or use --preset)")

    if "dim" not in raw:
        raise ConfigError("config: missing field 'dim'")
    dim = raw["dim"]
    if not isinstance(dim, int) or dim < 2:
        raise ConfigError(f"dim: expected an integer >= 2, got {dim!r}")

    gen = raw.get("generator")
    if not isinstance(gen, dict):
        raise ConfigError("config: missing object field 'generator'")
    has_coeff = "coeff" in gen
    has_jumps = "jump_ops" in gen
    if has_coeff == has_jumps:
        raise ConfigError("generator: exactly one of 'coeff' (GKS) or 'jump_ops' (Lindblad) required")
    form = gen.get("form", "gks" if has_coeff else "lindblad")
    if form not in ("gks", "lindblad") or (form == "gks") != has_coeff:
        raise ConfigError(f"generator.form {form!r} does not match the supplied fields")

    if gen.get("hamiltonian") is None:
        hamiltonian = np.zeros((dim, dim), dtype=complex)
    else:
        hamiltonian = _matrix_from_json(gen["hamiltonian"], "generator.hamiltonian", dim, dim)

    if gen.get("basis") is None:
        basis = standard_basis(dim)
    else:
        raw_basis = gen["basis"]
        if not isinstance(raw_basis, list):
            raise ConfigError("generator.basis: expected a list of matrices")
        elems = [
            _matrix_from_json(m, f"generator.basis[{i}]", dim, dim) for i, m in enumerate(raw_basis)
        ]
        try:
            basis = OperatorBasis(dim=dim, elements=np.stack(elems))
        except CplabError as exc:
            raise ConfigError(f"generator.basis: {exc}") from None

    try:
        if form == "gks":
            n = dim * dim - 1
            coeff = _matrix_from_json(gen["coeff"], "generator.coeff", n, n)
            gks = GKSGenerator(dim=dim, hamiltonian=hamiltonian, coeff=coeff, basis=basis)
            lindblad = None
        else:
            raw_jumps = gen["jump_ops"]
            if not isinstance(raw_jumps, list):
                raise ConfigError("generator.jump_ops: expected a list of matrices")
            jumps = tuple(
                _matrix_from_json(m, f"generator.jump_ops[{i}]", dim, dim)
                for i, m in enumerate(raw_jumps)
            )
            lindblad = LindbladGenerator(dim=dim, hamiltonian=hamiltonian, jump_ops=jumps)
            gks = lindblad_to_gks(lindblad, basis)
    except ConfigError:
        raise
    except CplabError as exc:
        raise ConfigError(f"generator: {exc}") from None

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances: expected a JSON object")
    tolerance = _resolve_tolerance(args.tol, tolerances.get("positivity"))

    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed: expected an integer, got {seed!r}")

    grid = None
    if getattr(args, "grid", None) is not None:
        grid = _parse_grid_spec(args.grid)
    elif raw.get("grid") is not None:
        if not isinstance(raw["grid"], list):
            raise ConfigError("grid: expected a list of times")
        grid = tuple(float(t) for t in raw["grid"])

    return ProblemConfig(
        dim=dim,
        form=form,
        gks=gks,
        lindblad=lindblad,
        tolerance=tolerance,
        seed=seed,
        grid=grid,
        initial_state=preset_state,
        echo=raw,
    )


# --------------------------------------------------------------------------
# Report assembly
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisReport:
    """Serializable outcome of a CLI command.

    A witness entry is present exactly when the verdict is non-CP.
    """

    command: str
    verdict: dict | None
    witness: dict | None
    no_negative_direction: dict | None
    scan: dict | None
    extra: dict
    provenance: dict

    def __post_init__(self):
        if self.verdict is not None:
            if self.verdict["is_cp"] == (self.witness is not None):
                raise CplabError("report invariant violated: witness presence must match verdict")

    def to_dict(self) -> dict:
        out = {"command": self.command, "provenance": self.provenance}
        if self.verdict is not None:
            out["verdict"] = self.verdict
        if self.witness is not None:
            out["witness"] = self.witness
        if self.no_negative_direction is not None:
            out["no_negative_direction"] = self.no_negative_direction
        if self.scan is not None:
            out["scan"] = self.scan
        out.update(self.extra)
        return out


def _provenance(config: ProblemConfig) -> dict:
    return {
        "tool": "cplab",
        "version": __version__,
        "seed": config.seed,
        "tolerance": config.tolerance,
        "config": config.echo,
    }


def _verdict_dict(verdict) -> dict:
    return {
        "is_cp": verdict.is_cp,
        "min_coeff_eigenvalue": verdict.min_coeff_eigenvalue,
        "min_choi_eigenvalue": verdict.min_choi_eigenvalue,
        "tolerance": verdict.tolerance,
    }


def _witness_dict(candidate: WitnessCandidate) -> dict:
    return {
        "direction": _vector_to_json(candidate.direction),
        "direction_operator": _matrix_to_json(candidate.direction_operator),
        "phi_matrix": _matrix_to_json(candidate.phi_matrix),
        "psi_matrix_dagger": _matrix_to_json(candidate.psi_matrix.conj().T),
        "phi": _vector_to_json(candidate.phi),
        "psi": _vector_to_json(candidate.psi),
        "value": candidate.value,
        "quadratic_form": candidate.quadratic_form,
        "transpose_sign": candidate.transpose_sign,
    }


def _scan_dict(scan: NegativityScan) -> dict:
    return {
        "times": [float(t) for t in scan.times],
        "min_eigenvalues": [float(x) for x in scan.min_eigenvalues],
        "overlap_values": [float(x) for x in scan.overlap_values],
        "first_negative_time": scan.first_negative_time,
    }


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _witness_pieces(config: ProblemConfig, with_scan: bool, bell_fixture: bool):
    rng = np.random.default_rng(config.seed)
    phi_matrix = None
    if bell_fixture:
        if config.dim != 2:
            raise ConfigError("--bell-fixture is only defined for dim = 2")
        phi_matrix = bell_phi_matrix()
    result = construct_witness(config.gks, rng=rng, tol=config.tolerance, phi_matrix=phi_matrix)
    if isinstance(result, NoNegativeDirection):
        return None, {"min_coeff_eigenvalue": result.min_coeff_eigenvalue}, None
    scan = None
    if with_scan:
        scan = negativity_scan(
            config.gks, result.psi, result.phi, t_grid=config.grid, tol=config.tolerance
        )
    return result, None, scan


def cmd_check_cp(config: ProblemConfig) -> tuple[AnalysisReport, int]:
    verdict = is_completely_positive(config.gks, tol=config.tolerance)
    witness, no_dir, _ = (None, None, None) if verdict.is_cp else _witness_pieces(config, False, False)
    report = AnalysisReport(
        command="check-cp",
        verdict=_verdict_dict(verdict),
        witness=None if witness is None else _witness_dict(witness),
        no_negative_direction=no_dir,
        scan=None,
        extra={},
        provenance=_provenance(config),
    )
    return report, EXIT_OK if verdict.is_cp else EXIT_NOT_CP


def cmd_witness(config: ProblemConfig, bell_fixture: bool = False) -> tuple[AnalysisReport, int]:
    verdict = is_completely_positive(config.gks, tol=config.tolerance)
    witness, no_dir, scan = _witness_pieces(config, True, bell_fixture)
    report = AnalysisReport(
        command="witness",
        verdict=_verdict_dict(verdict),
        witness=None if witness is None else _witness_dict(witness),
        no_negative_direction=no_dir,
        scan=None if scan is None else _scan_dict(scan),
        extra={},
        provenance=_provenance(config),
    )
    return report, EXIT_OK if verdict.is_cp else EXIT_NOT_CP


def cmd_convert(config: ProblemConfig) -> tuple[AnalysisReport, int]:
    if config.form == "gks":
        cutoff = config.tolerance * max(1.0, fro_norm(config.gks.coeff))
        converted = gks_to_lindblad(config.gks, tol=cutoff)
        payload = {
            "form": "lindblad",
            "dim": config.dim,
            "hamiltonian": _matrix_to_json(converted.hamiltonian),
            "jump_ops": [_matrix_to_json(v) for v in converted.jump_ops],
        }
    else:
        payload = {
            "form": "gks",
            "dim": config.dim,
            "hamiltonian": _matrix_to_json(config.gks.hamiltonian),
            "coeff": _matrix_to_json(config.gks.coeff),
        }
    report = AnalysisReport(
        command="convert",
        verdict=None,
        witness=None,
        no_negative_direction=None,
        scan=None,
        extra={"generator": payload},
        provenance=_provenance(config),
    )
    return report, EXIT_OK


def _load_state(path: str | None, config: ProblemConfig, field: str) -> DensityMatrix:
    if path is None:
        if config.initial_state is not None:
            return config.initial_state
        raise ConfigError(f"{field}: no state supplied and the preset provides none")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read state: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"state is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{field}: expected a JSON object")
    try:
        if "matrix" in raw:
            mat = _matrix_from_json(raw["matrix"], f"{field}.matrix")
            return DensityMatrix(dim=mat.shape[0], matrix=mat)
        if "vector" in raw:
            return DensityMatrix.from_pure(_vector_from_json(raw["vector"], f"{field}.vector"))
    except ConfigError:
        raise
    except CplabError as exc:
        raise ConfigError(f"{field}: {exc}") from None
    raise ConfigError(f"{field}: needs a 'matrix' or 'vector' field")


def cmd_evolve(config: ProblemConfig, state: DensityMatrix, t: float) -> tuple[AnalysisReport, int]:
    d = config.dim
    if state.dim == d:
        propagator = evolution_map(config.gks, t)
        mode = "single"
    elif state.dim == d * d:
        if t < 0:
            raise NegativeTime(f"evolution time must be nonnegative, got {t}")
        ext = tensor_extension(config.gks)
        propagator = Superoperator(dim=d * d, matrix=matrix_exp(t * ext.matrix))
        mode = "extended"
    else:
        raise DimensionMismatch(
            f"state dimension {state.dim} is neither d={d} nor d^2={d * d}"
        )
    evolved = propagator.apply(state.matrix)
    herm = (evolved + evolved.conj().T) / 2.0
    low = float(np.linalg.eigvalsh(herm)[0])
    violated = low < -config.tolerance * max(1.0, fro_norm(herm))
    report = AnalysisReport(
        command="evolve",
        verdict=None,
        witness=None,
        no_negative_direction=None,
        scan=None,
        extra={
            "time": t,
            "mode": mode,
            "state": _matrix_to_json(evolved),
            "trace": _complex_to_json(complex(np.trace(evolved))),
            "hermiticity_deviation": hermiticity_deviation(evolved),
            "min_eigenvalue": low,
            "positivity_violated": bool(violated),
        },
        provenance=_provenance(config),
    )
    return report, EXIT_NOT_CP if violated else EXIT_OK


def _load_pair(path: str, dim_sq: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read state: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"state is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or "psi" not in raw or "phi" not in raw:
        raise ConfigError("scan state: expected a JSON object with 'psi' and 'phi' vectors")
    psi = _vector_from_json(raw["psi"], "state.psi", dim_sq)
    phi = _vector_from_json(raw["phi"], "state.phi", dim_sq)
    return psi, phi


def cmd_scan(config: ProblemConfig, state_path: str | None) -> tuple[AnalysisReport, int]:
    witness = None
    no_dir = None
    if state_path is not None:
        psi, phi = _load_pair(state_path, config.dim * config.dim)
    else:
        witness, no_dir, _ = _witness_pieces(config, False, False)
        if witness is None:
            report = AnalysisReport(
                command="scan",
                verdict=None,
                witness=None,
                no_negative_direction=no_dir,
                scan=None,
                extra={},
                provenance=_provenance(config),
            )
            return report, EXIT_OK
        psi, phi = witness.psi, witness.phi
    scan = negativity_scan(config.gks, psi, phi, t_grid=config.grid, tol=config.tolerance)
    report = AnalysisReport(
        command="scan",
        verdict=None,
        witness=None if witness is None else _witness_dict(witness),
        no_negative_direction=None,
        scan=_scan_dict(scan),
        extra={},
        provenance=_provenance(config),
    )
    return report, EXIT_NOT_CP if scan.first_negative_time is not None else EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # The exit-code contract reserves 2 for certified non-CP verdicts, so
    # usage errors must not use argparse's default exit code.
    def error(self, message):
        raise ConfigError(message)


def _add_common(sub: argparse.ArgumentParser, grid: bool = False):
    sub.add_argument("--config", help="path to the JSON problem configuration")
    sub.add_argument("--tol", type=float, help="positivity tolerance override")
    sub.add_argument("--seed", type=int, help="RNG seed override")
    sub.add_argument("--output", help="report destination (default stdout)")
    sub.add_argument("--preset", choices=["meson-d2"], help="built-in demo configuration")
    if grid:
        sub.add_argument("--grid", help="time grid as 'start:stop:points:log|lin'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cplab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cplab {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    _add_common(subs.add_parser("check-cp", help="decide complete positivity"))
    wit = subs.add_parser("witness", help="construct a witness and scan for negativity")
    _add_common(wit, grid=True)
    wit.add_argument(
        "--bell-fixture",
        action="store_true",
        help="use the fixed d=2 singlet coefficient matrix instead of the similarity solver",
    )
    _add_common(subs.add_parser("convert", help="convert between generator forms"))
    evo = subs.add_parser("evolve", help="evolve a state (single or doubled system)")
    _add_common(evo)
    evo.add_argument("--time", type=float, required=True, help="evolution time (nonnegative)")
    evo.add_argument("--state", help="JSON state file with a 'matrix' or 'vector' field")
    sca = subs.add_parser("scan", help="negativity scan over a time grid")
    _add_common(sca, grid=True)
    sca.add_argument("--state", help="JSON file with explicit 'psi' and 'phi' vectors")

    return parser


def _emit(report: AnalysisReport, output: str | None):
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args)
        if args.subcommand == "check-cp":
            report, code = cmd_check_cp(config)
        elif args.subcommand == "witness":
            report, code = cmd_witness(config, bell_fixture=args.bell_fixture)
        elif args.subcommand == "convert":
            report, code = cmd_convert(config)
        elif args.subcommand == "evolve":
            state = _load_state(args.state, config, "state")
            report, code = cmd_evolve(config, state, args.time)
        else:
            report, code = cmd_scan(config, args.state)
    except NotCompletelyPositive as exc:
        sys.stderr.write(f"cplab: conversion refused: {exc}\n")
        return EXIT_NOT_CP
    except ConfigError as exc:
        sys.stderr.write(f"cplab: config error: {exc}\n")
        return EXIT_ERROR
    except CplabError as exc:
        sys.stderr.write(f"cplab: error: {exc}\n")
        return EXIT_ERROR
    _emit(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
