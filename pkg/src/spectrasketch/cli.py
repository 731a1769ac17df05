"""Command-line front end: ``spectrasketch {sketch,lift,psdapprox,verify}``.

Every command writes a JSON artifact (``--out``) that embeds its inputs and a
run report, prints the report to stdout and exits 0 when the certificate
passes, 2 when a well-formed run fails its certificate and 1 on input or
usage errors.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import io, kernels
from .errors import (
    DegenerateSpan,
    DegreeCapExceeded,
    EntryOutOfRange,
    EnumerationTooLarge,
    InconsistentInputs,
    NegativeEntry,
    SpectraSketchError,
)
from .lift import (
    ENUMERATION_CAP,
    build_lift,
    certify_exactness,
    enumerate_directions,
    maximize_over_lift,
)
from .mvee import verify_john
from .psdrank import (
    Polynomial,
    approx_low_psd_rank,
    sqrt_grid,
    sqrt_uniform_approx,
    verify_psd_factorization,
)
from .sketch import (
    PointSet,
    Sketch,
    build_sketch,
    cardinality_bound,
    factor_bound,
    lifted_coordinates,
    verify_sketch,
)
from .tensor import binomial, lift_dim, sym_lift_matrix

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 1, 2
INPUT_ERRORS = (
    io.InputError,
    ValueError,
    OverflowError,
    OSError,
    DegenerateSpan,
    DegreeCapExceeded,
    EntryOutOfRange,
    EnumerationTooLarge,
    InconsistentInputs,
    NegativeEntry,
)


def _report(command, digest, parameters, outputs, residuals, passed):
    return {
        "command": command,
        "input_digest": digest,
        "parameters": parameters,
        "outputs": outputs,
        "residuals": residuals,
        "passed": bool(passed),
    }


def generate_points(kind, n, dim, seed):
    if n < 1 or dim < 1:
        raise ValueError("--n and --dim must be positive")
    rng = np.random.default_rng(seed)
    if kind == "sphere":
        Y = rng.standard_normal((n, dim))
        return Y / np.linalg.norm(Y, axis=1)[:, None]
    if kind == "cube":
        return rng.uniform(-1.0, 1.0, size=(n, dim))
    raise ValueError(f"unknown generator {kind!r}")


# --- sketch -------------------------------------------------------------------


def run_sketch(args):
    if args.k < 1:
        raise ValueError("k must be positive")
    if args.generate:
        if args.input:
            raise ValueError("use either --input or --generate, not both")
        P = generate_points(args.generate, args.n, args.dim, args.seed)
        source = f"generate:{args.generate}:n={args.n}:dim={args.dim}:seed={args.seed}"
        digest = io.digest_bytes(source.encode())
    elif args.input:
        P, _, digest = io.load_points(args.input)
    else:
        raise ValueError("one of --input or --generate is required")
    B = PointSet(P)
    sk = build_sketch(B, args.k, gap_tol=args.gap_tol, max_iter=args.max_iter)
    params = {"k": args.k, "gap_tol": args.gap_tol, "seed": args.seed, "verify_dirs": args.verify_dirs}
    if args.generate:
        params.update(generate=args.generate, n=args.n, dim=args.dim)
    artifact = {
        "kind": "sketch",
        "input": io.points_to_obj(B.points),
        "k": args.k,
        "gap_tol": args.gap_tol,
        "indices": sk.indices,
        "factor_bound": sk.factor_bound,
        "cardinality_bound": sk.cardinality_bound,
        "john_residual": sk.john_residual,
        "effective_dim": sk.effective_dim,
        "john": io.john_to_obj(sk.john),
        "basis": io.matrix_to_obj(sk.basis),
        "verify": {"n_dirs": args.verify_dirs, "seed": args.seed},
    }
    result = check_sketch(artifact)
    return artifact, _report("sketch", digest, params, result["outputs"], result["residuals"], result["passed"])


def check_sketch(obj, n_dirs=None):
    P, _ = io.points_from_obj(obj["input"])
    B = PointSet(P)
    k = int(obj["k"])
    gap_tol = float(obj["gap_tol"])
    indices = np.array(obj["indices"], dtype=np.int64)
    basis = io.basis_from_obj(obj["basis"])
    john = io.john_from_obj(obj["john"])
    problems = []
    d = B.dim
    if len(indices) == 0 or indices.min() < 0 or indices.max() >= len(B):
        raise io.InputError("sketch indices out of range")
    if not np.array_equal(np.sort(john.indices), np.sort(indices)):
        problems.append("John decomposition is not supported on the sketch")
    if len(indices) > cardinality_bound(d, k):
        problems.append(f"|X| = {len(indices)} exceeds {cardinality_bound(d, k)}")
    if obj["factor_bound"] != factor_bound(d, k):
        problems.append("stored factor bound disagrees with C(d+k-1,k)^(1/(2k))")
    # the stored basis must be orthonormal and capture every lifted point
    L = sym_lift_matrix(B.points, k)
    Z, _, _ = lifted_coordinates(B.points, k, basis)
    scale = max(1.0, float(np.max(np.abs(L), initial=0.0)))
    basis_err = float(np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1])), initial=0.0))
    span_err = float(np.max(np.abs(L - Z @ basis.T), initial=0.0)) / scale
    if basis_err > 1e-9 or span_err > 1e-8:
        problems.append("stored basis does not span the lifted points")
    tol = max(gap_tol, 1e-9)
    jr = verify_john(john, Z, tol=tol)
    if not jr.passed:
        problems.append("John decomposition fails its residual checks")
    # every lifted point must lie in the unit ball of the John frame
    slack = float(np.max(np.sum((Z @ john.frame) ** 2, axis=1)) - 1.0)
    if slack > 10 * tol:
        problems.append(f"containment slack {slack:.3e} exceeds {10 * tol:.1e}")
    verify = obj.get("verify") or {}
    nd = int(verify.get("n_dirs", 0)) if n_dirs is None else n_dirs
    seed = int(verify.get("seed", 0))
    sk = Sketch(B, k, indices, factor_bound(d, k), cardinality_bound(d, k), john.residual,
                basis.shape[1], gap_tol)
    vr = verify_sketch(B, sk, n_dirs=nd, seed=seed)
    if not vr.passed:
        problems.append(f"worst ratio {vr.worst_ratio:.6g} exceeds {vr.threshold:.6g}")
    outputs = {
        "n_points": len(B),
        "sketch_size": len(indices),
        "indices": indices,
        "factor_bound": factor_bound(d, k),
        "cardinality_bound": cardinality_bound(d, k),
        "effective_dim": basis.shape[1],
        "lift_dim": lift_dim(d, k),
        "verification": {
            "n_dirs": nd,
            "seed": seed,
            "worst_ratio": vr.worst_ratio,
            "threshold": vr.threshold,
            "passed": vr.passed,
        },
        "problems": problems,
    }
    residuals = {
        "john_sum": jr.sum_error,
        "john_identity": jr.frobenius_error,
        "contact_slack": jr.max_contact_slack,
        "containment_slack": slack,
        "basis_orthonormality": basis_err,
        "basis_span": span_err,
    }
    return {"outputs": outputs, "residuals": residuals, "passed": not problems}


# --- lift ---------------------------------------------------------------------


def run_lift(args):
    if args.k < 1:
        raise ValueError("k must be positive")
    P, integer, digest = io.load_points(args.input)
    if not integer:
        raise io.InputError("lift needs integer coordinates")
    dirs = enumerate_directions(P, args.k, args.radius, cap=args.cap)
    lift = build_lift(P, dirs, args.k)
    artifact = {
        "kind": "lift",
        "input": io.points_to_obj(P),
        "k": args.k,
        "radius": args.radius,
        "tol": args.tol,
        "directions": io.directions_to_obj(dirs),
        "lift": io.lift_to_obj(lift),
    }
    result = check_lift(artifact, solve=args.solve)
    params = {"k": args.k, "radius": args.radius, "tol": args.tol, "cap": args.cap, "solve": args.solve}
    return artifact, _report("lift", digest, params, result["outputs"], result["residuals"], result["passed"])


def check_lift(obj, solve=False):
    P, integer = io.points_from_obj(obj["input"])
    if not integer:
        raise io.InputError("lift input must be integer")
    k, radius, tol = int(obj["k"]), int(obj["radius"]), float(obj["tol"])
    lift = io.lift_from_obj(obj["lift"])
    stored = io.directions_from_obj(obj["directions"])
    dirs = enumerate_directions(P, k, radius)
    problems = []
    same = (
        stored.v.shape == dirs.v.shape
        and np.array_equal(stored.v, dirs.v)
        and np.array_equal(stored.m, dirs.m)
        and np.array_equal(stored.width, dirs.width)
    )
    if not same:
        problems.append("stored directions disagree with enumeration over the points")
    bound = binomial(lift.d + k + 2, k)
    if lift.r > bound:
        problems.append(f"r = {lift.r} exceeds C(d+k+2, k) = {bound}")
    rep = certify_exactness(lift, P, dirs, tol)
    problems.extend(rep.problems)
    outputs = {
        "d": lift.d,
        "k": k,
        "r": lift.r,
        "r_bound": bound,
        "n_points": len(P),
        "n_directions": len(dirs),
        "free_dim": lift.perp_basis.shape[1],
        "directions": [
            {"v": ch.v, "m": ch.m, "attained_by": ch.attained_by, "dual_valid": ch.dual_valid}
            for ch in rep.directions
        ],
        "problems": problems,
    }
    residuals = {"identity": rep.identity_residual, "min_eig_floor": rep.min_eig_floor}
    if solve and rep.passed:
        worst = 0.0
        for v, m in zip(dirs.v, dirs.m):
            opt = maximize_over_lift(lift, v.astype(np.float64), tol=min(tol, 1e-7))
            err = abs(opt.value - m) if opt.status == "optimal" else np.inf
            worst = max(worst, err)
        residuals["max_direction_error"] = worst
        if worst > 1e-5:
            problems.append(f"maximum over the lift misses m_j by {worst:.3e}")
    return {"outputs": outputs, "residuals": residuals, "passed": not problems}


# --- psdapprox ------------------------------------------------------------------


def run_psdapprox(args):
    A, digest = io.load_matrix(args.input)
    if not 0.0 < args.eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    p, sup_err = sqrt_uniform_approx(args.eps)
    A_prime, F, rank_bound = approx_low_psd_rank(A, args.eps, p=p)
    artifact = {
        "kind": "psdapprox",
        "input": io.matrix_to_obj(A),
        "eps": args.eps,
        "polynomial": {"degree": p.degree, "coefficients": p.coefficients, "sup_error": sup_err},
        "rank_bound": rank_bound,
        "A_prime": io.matrix_to_obj(A_prime),
        "factorization": io.factorization_to_obj(F),
    }
    result = check_psdapprox(artifact)
    params = {"eps": args.eps}
    return artifact, _report("psdapprox", digest, params, result["outputs"], result["residuals"], result["passed"])


def check_psdapprox(obj):
    A = io.matrix_from_obj(obj["input"])
    A_prime = io.matrix_from_obj(obj["A_prime"])
    eps = float(obj["eps"])
    F = io.factorization_from_obj(obj["factorization"])
    p = Polynomial(np.array(obj["polynomial"]["coefficients"], dtype=np.float64))
    problems = []
    if A_prime.shape != A.shape:
        raise io.InputError("A_prime has the wrong shape")
    deviation = float(np.max(np.abs(A - A_prime)))
    if deviation > eps:
        problems.append(f"deviation {deviation:.3e} exceeds eps {eps:g}")
    grid = sqrt_grid()
    sup_err = float(np.max(np.abs(np.sqrt(grid) - p(grid))))
    if sup_err > eps / 3:
        problems.append(f"polynomial misses sqrt by {sup_err:.3e} > eps/3")
    poly_err = float(np.max(np.abs(A_prime - p(np.clip(A, 0.0, 1.0)) ** 2)))
    if poly_err > 1e-8:
        problems.append(f"A_prime differs from p(A)^2 by {poly_err:.3e}")
    if F.r != int(obj["rank_bound"]):
        problems.append("psd size differs from the stored rank bound")
    rep = verify_psd_factorization(A_prime, F, tol=1e-8)
    if not rep.passed:
        problems.append("psd factorization fails verification")
    outputs = {
        "shape": list(A.shape),
        "degree": p.degree,
        "rank_bound": int(obj["rank_bound"]),
        "r": F.r,
        "deviation": deviation,
        "eps": eps,
        "problems": problems,
    }
    residuals = {
        "factorization": rep.max_residual,
        "min_eigenvalue_left": rep.min_eigenvalue_left,
        "min_eigenvalue_right": rep.min_eigenvalue_right,
        "sqrt_sup_error": sup_err,
        "poly_consistency": poly_err,
    }
    return {"outputs": outputs, "residuals": residuals, "passed": not problems}


# --- verify ---------------------------------------------------------------------


def run_verify(args):
    with open(args.artifact, "rb") as fh:
        raw = fh.read()
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise io.InputError(f"not valid JSON: {exc}") from None
    kind = obj.get("kind") if isinstance(obj, dict) else None
    try:
        if kind == "sketch":
            result = check_sketch(obj, n_dirs=args.verify_dirs)
        elif kind == "lift":
            result = check_lift(obj, solve=args.solve)
        elif kind == "psdapprox":
            result = check_psdapprox(obj)
        else:
            raise io.InputError(f"unknown artifact kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise io.InputError(f"malformed {kind} artifact: {exc!r}") from None
    params = {"kind": kind}
    return None, _report("verify", io.digest_bytes(raw), params, result["outputs"], result["residuals"], result["passed"])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["cython", "python"], help="kernel backend (default: best available)")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")
    ap = argparse.ArgumentParser(prog="spectrasketch", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sketch", parents=[common], help="small subset certifying every linear functional")
    s.add_argument("--input", help="points as JSON or CSV")
    s.add_argument("--generate", choices=["sphere", "cube"], help="sample the input instead of reading it")
    s.add_argument("--n", type=int, default=500, help="sample size for --generate")
    s.add_argument("--dim", type=int, default=3, help="dimension for --generate")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--gap-tol", type=float, default=1e-7)
    s.add_argument("--max-iter", type=int, default=200_000)
    s.add_argument("--verify-dirs", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(run=run_sketch)

    li = sub.add_parser("lift", parents=[common], help="spectrahedral lift exact in bounded-width directions")
    li.add_argument("--input", required=True, help="integer points as JSON or CSV")
    li.add_argument("--k", type=int, required=True)
    li.add_argument("--radius", type=int, default=1)
    li.add_argument("--tol", type=float, default=1e-8)
    li.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="largest candidate direction count")
    li.add_argument("--solve", action="store_true", help="also maximize over the lift in every direction")
    li.add_argument("--out")
    li.set_defaults(run=run_lift)

    pa = sub.add_parser("psdapprox", parents=[common], help="entrywise approximation with low psd rank")
    pa.add_argument("--input", required=True, help='matrix JSON {"rows", "cols", "data"}')
    pa.add_argument("--eps", type=float, required=True)
    pa.add_argument("--out")
    pa.set_defaults(run=run_psdapprox)

    ve = sub.add_parser("verify", parents=[common], help="re-check an emitted artifact from scratch")
    ve.add_argument("artifact")
    ve.add_argument("--verify-dirs", type=int, default=None, help="override the stored direction count")
    ve.add_argument("--solve", action="store_true")
    ve.set_defaults(run=run_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.backend:
        try:
            kernels.use_backend(args.backend)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    start = time.perf_counter()
    try:
        artifact, report = args.run(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectraSketchError as exc:
        print(f"certificate failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERT
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    if artifact is not None:
        artifact["report"] = report
        if getattr(args, "out", None):
            io.write_json(artifact, args.out)
    sys.stdout.write(io.dumps(report))
    return EXIT_OK if report["passed"] else EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
