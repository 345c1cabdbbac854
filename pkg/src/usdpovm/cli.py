"""Command-line front end.

Subcommands: gen | optimize | povm | neumark | simulate | verify. All
commands read and write the JSON document formats of :mod:`usdpovm.fileio`.

Exit codes: 0 ok, 1 parse/domain error, 2 not converged or budget exceeded,
3 singular or linearly dependent states, 4 dimension/mode mismatch,
5 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, fileio
from . import families, geometry, linalg, neumark, optimizer, povm, simulator
from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    DiscriminationError,
    DomainError,
    RankDeficientError,
    SingularMatrixError,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NOT_CONVERGED = 2
EXIT_SINGULAR = 3
EXIT_DIMENSION = 4
EXIT_VERIFY_FAILED = 5


def _parse_priors(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise DomainError(f"cannot parse priors {text!r}: {exc}") from exc


def _parse_param(text: str):
    if "=" not in text:
        raise DomainError(f"parameters take the form key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, list):
        value = fileio._decode_param(value)
    return key.strip(), value


def _optimizer_config(args, n: int) -> optimizer.OptimizerConfig:
    return optimizer.OptimizerConfig(
        grid_density=args.grid,
        restarts=args.restarts,
        tol_t=args.tol,
        tol_f=args.tol,
        seed=args.seed,
        max_iter=args.max_iter,
        threads=args.threads,
        use_analytic=not args.no_analytic,
    )


def _config_payload(cfg: optimizer.OptimizerConfig) -> dict:
    return {
        "grid_density": cfg.grid_density,
        "restarts": cfg.restarts,
        "tol_t": cfg.tol_t,
        "tol_f": cfg.tol_f,
        "seed": cfg.seed,
        "max_iter": cfg.max_iter,
        "threads": cfg.threads,
        "use_analytic": cfg.use_analytic,
    }


def _optimize_payload(res: optimizer.OptimizationResult) -> dict:
    return {
        "p_m": res.p_m,
        "t_m": fileio.encode_real_vector(res.t_m),
        "weights": fileio.encode_real_vector(res.weights),
        "mu_sq": res.mu_sq,
        "method": res.method,
        "rule": res.rule,
        "iterations": res.iterations,
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "zero_weights": list(res.zero_weights),
        "residuals": {
            "chefles": res.chefles_residual,
            "duan_guo_min_eig": res.duan_guo_min_eig,
        },
    }


def _load_inputs(args):
    doc = fileio.load_json(args.input)
    states, priors, fam = fileio.parse_states(doc)
    if getattr(args, "priors", None):
        priors = _parse_priors(args.priors)
    if priors is None:
        priors = geometry.uniform_priors(states.n)
    priors = geometry.check_priors(priors, states.n)
    doc_effective = fileio.states_document(states, priors, fam)
    return states, priors, doc_effective


def _run_optimize_stage(args):
    states, priors, input_doc = _load_inputs(args)
    cfg = _optimizer_config(args, states.n)
    res = optimizer.optimize(states, priors, cfg)
    return states, priors, input_doc, cfg, res


def cmd_optimize(args) -> int:
    states, priors, input_doc, cfg, res = _run_optimize_stage(args)
    if args.dump_grid:
        density = cfg.density_for(states.n)
        tgrid, samples = optimizer.efficiency_grid(states, priors, density, cfg.threads)
        fileio.dump_json(
            {
                "schema": fileio.SCHEMA,
                "n": states.n,
                "density": density,
                "angles": [fileio.encode_real_vector(t) for t in tgrid],
                "efficiency": fileio.encode_real_vector(samples),
            },
            args.dump_grid,
        )
    doc = fileio.result_document("optimize", input_doc, _config_payload(cfg),
                                 _optimize_payload(res))
    out = fileio.dump_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _povm_payload(pset: povm.PovmSet, weights: np.ndarray) -> dict:
    return {
        "weights": fileio.encode_real_vector(weights),
        "detectors": [fileio.encode_matrix(d) for d in pset.detectors],
        "complement": fileio.encode_matrix(pset.complement),
        "ancilla_dim": pset.ancilla_dim,
        "ancilla_vectors": fileio.encode_matrix(pset.ancilla_vectors),
    }


def _weights_stage(args):
    states, priors, input_doc, cfg, res = _run_optimize_stage(args)
    weights = res.weights
    if args.shrink is not None:
        weights = povm.shrink_weights(weights, args.shrink)
    return states, priors, input_doc, cfg, res, weights


def cmd_povm(args) -> int:
    states, priors, input_doc, cfg, res, weights = _weights_stage(args)
    pset = povm.complement(states, weights)
    payload = _optimize_payload(res)
    payload["shrink"] = args.shrink
    payload["povm"] = _povm_payload(pset, weights)
    doc = fileio.result_document("povm", input_doc, _config_payload(cfg), payload)
    out = fileio.dump_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_neumark(args) -> int:
    states, priors, input_doc, cfg, res, weights = _weights_stage(args)
    pset = povm.complement(states, weights)
    xi_x = povm.scaled_reciprocals(states, weights)
    if args.tensor:
        if pset.ancilla_dim != states.n:
            sys.stderr.write(
                f"error: tensor form needs ancilla dimension {states.n}, got "
                f"{pset.ancilla_dim}; shrink the weights (--shrink) to lift the rank\n"
            )
            return EXIT_DIMENSION
        ext = neumark.extend_tensor(xi_x, pset.ancilla_vectors)
    else:
        ext = neumark.extend(xi_x, pset.ancilla_vectors)
    payload = _optimize_payload(res)
    payload["shrink"] = args.shrink
    payload["povm"] = _povm_payload(pset, weights)
    payload["neumark"] = {
        "n": ext.n,
        "n_a": ext.n_a,
        "tensor_form": ext.tensor_form,
        "u": fileio.encode_matrix(ext.u),
        "xi": fileio.encode_matrix(ext.xi),
        "xi_tilde": fileio.encode_matrix(ext.xi_tilde),
        "z": fileio.encode_matrix(ext.z),
        "y": fileio.encode_matrix(ext.y),
        "block_residuals": neumark.block_residuals(ext),
    }
    doc = fileio.result_document("neumark", input_doc, _config_payload(cfg), payload)
    out = fileio.dump_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_simulate(args) -> int:
    states, priors, input_doc, cfg, res, weights = _weights_stage(args)
    pset = povm.complement(states, weights)
    report = simulator.simulate(states, priors, pset, args.trials, args.seed, args.workers)
    payload = _optimize_payload(res)
    payload["simulation"] = {
        "trials": report.trials,
        "seed": report.seed,
        "workers": report.workers,
        "generator": report.generator,
        "success_rate": report.success_rate,
        "inconclusive_rate": report.inconclusive_rate,
        "error_rate": report.error_rate,
        "theoretical_pm": report.theoretical_pm,
        "z_score": report.z_score,
        "per_state": [[int(c) for c in row] for row in report.per_state],
    }
    doc = fileio.result_document("simulate", input_doc, _config_payload(cfg), payload)
    out = fileio.dump_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_gen(args) -> int:
    params = dict(_parse_param(p) for p in args.param or [])
    spec = families.FamilySpec(family=args.family, n=args.n, params=params)
    inst = families.gen(spec)
    priors = geometry.uniform_priors(spec.n) if args.uniform_priors else None
    doc = fileio.states_document(inst.states, priors, spec, inst.known_pm)
    out = fileio.dump_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(out)
    return EXIT_OK


def _verify_states_doc(doc: dict, failures: list[str]) -> None:
    try:
        states, priors, fam = fileio.parse_states(doc)
    except DiscriminationError as exc:
        failures.append(f"states: {exc}")
        return
    if priors is not None:
        try:
            geometry.check_priors(priors, states.n)
        except DiscriminationError as exc:
            failures.append(f"priors: {exc}")
    if fam is not None and doc.get("family", {}).get("known_pm") is not None:
        known = float(doc["family"]["known_pm"])
        regen = families.gen(fam)
        if regen.known_pm is None or abs(regen.known_pm - known) > 1e-9:
            failures.append(
                f"known_pm: stored {known} does not match regenerated {regen.known_pm}"
            )


def _verify_result_doc(doc: dict, failures: list[str]) -> None:
    for key in ("input", "input_digest", "result", "command"):
        if key not in doc:
            failures.append(f"document: missing field {key!r}")
            return
    if fileio.digest(doc["input"]) != doc["input_digest"]:
        failures.append("input_digest: stored digest does not match the embedded input")
    try:
        states, priors, _ = fileio.parse_states(doc["input"])
    except DiscriminationError as exc:
        failures.append(f"input states: {exc}")
        return
    if priors is None:
        priors = geometry.uniform_priors(states.n)
    result = doc["result"]
    command = doc["command"]

    weights = np.asarray(result.get("weights", []), dtype=float)
    t_m = np.asarray(result.get("t_m", []), dtype=float)
    p_m = float(result.get("p_m", np.nan))
    if weights.size and t_m.size and np.isfinite(p_m):
        expected = np.sqrt(p_m) * geometry.ellipsoid_point(t_m, priors)
        if np.abs(weights - expected).max() > 1e-8:
            failures.append("weights: stored weights differ from sqrt(p_m) y(t_m)")
        rep = optimizer.feasibility_check(states, weights)
        if rep.duan_guo_min_eig < -1e-8:
            failures.append(
                f"duan-guo: min-eig(Psi^dag Psi - X^2) = {rep.duan_guo_min_eig:.3e}"
            )
        if result.get("shrink") is None:
            xi = optimizer.reciprocal_states(states)
            from ._kernels import top_eigenvalue

            chefles = abs(top_eigenvalue(np.ascontiguousarray(xi), weights**2) - 1.0)
            if chefles > 1e-7:
                failures.append(f"chefles: |max-eig(Xi X^2 Xi^dag) - 1| = {chefles:.3e}")
        if not (0.0 < p_m <= 1.0 + 1e-12):
            failures.append(f"p_m: {p_m} outside (0, 1]")
        if "mu_sq" in result and abs(p_m * float(result["mu_sq"]) - 1.0) > 1e-9:
            failures.append("mu_sq: p_m * mu_sq differs from 1")

    if command in ("povm", "neumark", "simulate") and "povm" in result:
        stored = result["povm"]
        dets = [fileio.decode_matrix(d, "detector") for d in stored["detectors"]]
        comp = fileio.decode_matrix(stored["complement"], "complement")
        vectors = fileio.decode_matrix(stored["ancilla_vectors"], "ancilla_vectors")
        n = states.n
        total = sum(dets) + comp
        if np.abs(total - np.eye(n)).max() > 1e-10:
            failures.append(
                f"completeness: sum of detectors + complement off identity by "
                f"{np.abs(total - np.eye(n)).max():.3e}"
            )
        min_eig = linalg.herm_eig(comp).eigenvalues[0]
        if min_eig < -1e-10:
            failures.append(f"complement-psd: min eigenvalue {min_eig:.3e}")
        if np.abs(vectors @ vectors.conj().T - comp).max() > 1e-9:
            failures.append("ancilla-factorization: Xi~ Xi~^dag differs from complement")
        if int(stored["ancilla_dim"]) != vectors.shape[1]:
            failures.append("ancilla-dim: stored dimension != ancilla column count")
        born = np.empty((n, n))
        for k, op in enumerate(dets):
            born[:, k] = np.einsum("ij,ik,kj->j", states.matrix.conj(), op, states.matrix).real
        off = born - np.diag(np.diag(born))
        if np.abs(off).max() > 1e-9:
            failures.append(f"unambiguity: cross click probability {np.abs(off).max():.3e}")

    if command == "neumark" and "neumark" in result:
        stored = result["neumark"]
        u = fileio.decode_matrix(stored["u"], "u")
        n, n_a = int(stored["n"]), int(stored["n_a"])
        resid = np.abs(u.conj().T @ u - np.eye(n + n_a)).max()
        if resid > 1e-10:
            failures.append(f"unitarity: |U^dag U - I| = {resid:.3e}")
        ext = neumark.NeumarkUnitary(
            u, n, n_a,
            fileio.decode_matrix(stored["xi"], "xi"),
            fileio.decode_matrix(stored["xi_tilde"], "xi_tilde"),
            fileio.decode_matrix(stored["z"], "z"),
            fileio.decode_matrix(stored["y"], "y"),
            bool(stored["tensor_form"]),
        )
        blocks = neumark.block_residuals(ext)
        for name in ("columns_first", "columns_last", "cross"):
            if blocks[name] > 1e-9:
                failures.append(f"block-{name}: residual {blocks[name]:.3e}")
        table = neumark.project_statistics(ext, states)
        direct = np.abs(ext.xi.conj().T @ states.matrix) ** 2
        if np.abs(table[:, :n].T - direct).max() > 1e-9:
            failures.append("projection: extended statistics differ from the Born table")

    if command == "simulate" and "simulation" in result:
        sim = result["simulation"]
        total = sim["success_rate"] + sim["inconclusive_rate"] + sim["error_rate"]
        if abs(total - 1.0) > 1e-12:
            failures.append(f"rates-sum: {total}")
        if sim["error_rate"] > 0.0:
            failures.append(f"unambiguity: simulated error rate {sim['error_rate']}")
        if abs(sim["z_score"]) > 5.0:
            failures.append(f"statistics: |z| = {abs(sim['z_score']):.2f} > 5")


def cmd_verify(args) -> int:
    doc = fileio.load_json(args.input)
    failures: list[str] = []
    if "command" in doc:
        _verify_result_doc(doc, failures)
    else:
        _verify_states_doc(doc, failures)
    if failures:
        for f in failures:
            sys.stderr.write(f"FAIL {f}\n")
        return EXIT_VERIFY_FAILED
    sys.stdout.write("ok\n")
    return EXIT_OK


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--priors", help="comma-separated priors, overrides the input file")
    p.add_argument("--grid", type=int, default=None, help="grid density per angle")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="angle and value tolerance of the refinement")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for grid evaluation (default: all cores)")
    p.add_argument("--no-analytic", action="store_true",
                   help="skip closed-form shortcuts, force the numerical path")
    p.add_argument("-o", "--output", help="write the result document here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usdpovm",
        description="Optimal unambiguous-discrimination measurements for "
                    "linearly independent quantum states.",
    )
    parser.add_argument("--version", action="version", version=f"usdpovm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="maximize the mean discrimination efficiency")
    p.add_argument("input", help="states JSON file")
    _add_optimizer_flags(p)
    p.add_argument("--dump-grid", help="write efficiency samples over the angle grid here")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("povm", help="optimize and construct the detection operators")
    p.add_argument("input")
    _add_optimizer_flags(p)
    p.add_argument("--shrink", type=float, default=None,
                   help="scale optimal weights by this factor in (0,1) to force "
                        "a full-rank complement")
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("neumark", help="optimize, build the POVM and its unitary extension")
    p.add_argument("input")
    _add_optimizer_flags(p)
    p.add_argument("--shrink", type=float, default=None)
    p.add_argument("--tensor", action="store_true",
                   help="use the two-level-ancilla square form (requires N_a = N)")
    p.set_defaults(func=cmd_neumark)

    p = sub.add_parser("simulate", help="Monte-Carlo check of the optimal measurement")
    p.add_argument("input")
    _add_optimizer_flags(p)
    p.add_argument("--shrink", type=float, default=None)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="generate a state family fixture file")
    p.add_argument("--family", required=True, choices=families.FAMILIES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--param", action="append",
                   help="family parameter key=value (value parsed as JSON; "
                        "[re,im] pairs become complex)", default=None)
    p.add_argument("--uniform-priors", action="store_true",
                   help="embed uniform priors in the output")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="re-check all invariants of a stored document")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        import os

        args.threads = max(1, os.cpu_count() or 1)
    try:
        return args.func(args)
    except (json.JSONDecodeError, OSError) as exc:
        sys.stderr.write(f"error: cannot read input: {exc}\n")
        return EXIT_PARSE
    except (SingularMatrixError, RankDeficientError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SINGULAR
    except DimensionMismatchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DIMENSION
    except BudgetExceededError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_CONVERGED
    except DiscriminationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
