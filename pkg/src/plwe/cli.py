"""Command-line front end: ``plwe <command> [options]``.

Exit codes: 0 success, 2 input error, 3 capacity (or exhausted search
budget), 4 numeric failure.  Every JSON document written carries
``"schema": 1``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import attacks, geometry, paramgen, sampling
from .errors import CapacityError, NumericError, PlweError, SearchExhausted
from .modarith import IntPolynomial, RingSpec, element_order, parse_polynomial

SCHEMA = 1
log = logging.getLogger("plwe")


class InputError(PlweError, ValueError):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc)) from exc


def _poly_from_json(data) -> IntPolynomial:
    if isinstance(data, dict):
        if "ring" in data:
            data = data["ring"]
        data = data.get("f", data)
    if isinstance(data, str):
        return parse_polynomial(data)
    if not isinstance(data, list):
        raise InputError("expected a coefficient list or a polynomial string")
    return IntPolynomial.from_json(data)


def load_polynomial(args) -> IntPolynomial:
    if getattr(args, "lehmer", False):
        return geometry.LEHMER
    if getattr(args, "f", None):
        return parse_polynomial(args.f)
    if getattr(args, "f_file", None):
        return _poly_from_json(_read_json(args.f_file))
    raise InputError("give a polynomial with --f, --f-file or --lehmer")


def load_ring(args) -> RingSpec:
    """Ring from --f-file (ring, PARAMS or batch JSON) or from --f with --q."""
    if getattr(args, "f_file", None):
        data = _read_json(args.f_file)
        if isinstance(data, dict) and "ring" in data:
            data = data["ring"]
        if isinstance(data, dict) and "roots" in data:
            if data.get("fallback"):
                raise InputError("the fallback instance (x-a)^n + q does not split mod q")
            return RingSpec.from_json(data)
        f = _poly_from_json(data)
        q = data.get("q") if isinstance(data, dict) else None
        q = int(q if q is not None else _need(args, "q"))
        return RingSpec.from_polynomial(f, q)
    return RingSpec.from_polynomial(load_polynomial(args), int(_need(args, "q")))


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise InputError("--%s is required here" % name.replace("_", "-"))
    return v


# ---------------------------------------------------------------------------
# output helpers


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = prefix + str(k)
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            yield key, " ".join(str(x) for x in v) if len(v) <= 16 else "[%d entries]" % len(v)
        else:
            yield key, v


def render(doc: dict, fmt: str, csv_text: str | None = None) -> str:
    doc = {"schema": SCHEMA, **doc}
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        if csv_text is not None:
            return csv_text
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["key", "value"])
        for k, v in _flatten(doc):
            w.writerow([k, v])
        return buf.getvalue()
    rows = list(_flatten(doc))
    width = max((len(k) for k, _ in rows), default=0)
    return "".join("%-*s  %s\n" % (width, k, v) for k, v in rows)


def emit(args, doc: dict, csv_text: str | None = None) -> None:
    text = render(doc, args.format, csv_text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(args) -> sampling.GaussianSpec:
    return sampling.GaussianSpec(float(_need(args, "sigma")), float(args.trunc))


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> None:
    ring = load_ring(args)
    seed = args.seed
    if args.uniform:
        batch = sampling.gen_uniform_batch(ring, args.count, seed)
    else:
        secret = sampling.random_secret(ring, seed)
        if args.scheme == "plwe":
            batch = sampling.gen_plwe_batch(ring, secret, _spec(args), args.count, seed)
        else:
            emb = geometry.spectral_distortion(ring.f, max_degree=args.max_degree)
            batch = sampling.gen_rlwe_batch_monogenic(ring, emb, secret, float(_need(args, "sigma")), args.count, seed)
        if args.secret_out:
            with open(args.secret_out, "w") as fh:
                json.dump({"schema": SCHEMA, "secret": [str(c) for c in secret.coefficients]}, fh)
    emit(args, batch.to_json(), batch.to_csv() if args.format == "csv" else None)


def _load_batch(path: str) -> sampling.SampleBatch:
    data = _read_json(path)
    try:
        return sampling.SampleBatch.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError("%s is not a sample batch: missing %s" % (path, exc)) from exc


def cmd_attack(args) -> None:
    batch = _load_batch(args.batch)
    ring = batch.ring
    if args.alpha_one:
        spec = _spec(args) if args.threshold is None else None
        alpha = 1 if args.alpha is None else args.alpha
        res = attacks.attack_alpha_one(batch, alpha, args.threshold, spec)
        emit(args, res.to_json())
        return
    if args.small_order:
        alpha = int(_need(args, "alpha"))
        r = args.r or element_order(alpha % ring.q, ring.q)
        spec = _spec(args) if args.bound is None else None
        vset = attacks.build_value_set(alpha, r, ring.n, spec, ring.q, bound=args.bound)
        res = attacks.attack_small_order(batch, vset)
        doc = res.to_json()
        doc["value_set_size"] = len(vset)
        emit(args, doc)
        return
    alpha = int(_need(args, "alpha"))
    if args.epsilon is not None:
        plan = attacks.ResidueAttackPlan(alpha % ring.q, 0, ring.n, ring.q, "given", 0.0, None,
                                         float(args.epsilon), float(args.epsilon), 0.0, alpha, "given")
    else:
        plan = attacks.residue_advantage(ring.n, ring.q, _spec(args), alpha, r_max=args.r_max)
    run = attacks.residue_distinguisher(batch, alpha, plan, mode=args.mode, workers=args.workers)
    emit(args, run.to_json())


def cmd_geometry(args) -> None:
    f = load_polynomial(args)
    rep = geometry.spectral_distortion(f, max_degree=args.max_degree)
    doc = rep.to_json()
    if args.change_of_basis:
        cob = geometry.change_of_basis_monogenic(f)
        doc["change_of_basis_normalized_norm"] = cob.normalized_spectral_norm
    emit(args, doc)


def cmd_mahler(args) -> None:
    f = load_polynomial(args)
    emit(args, {"f": f.to_json(), "mahler": geometry.mahler_measure(f)})


def cmd_search(args) -> None:
    inst = paramgen.find_vulnerable_params(args.r, args.n, args.q0, fallback=args.fallback, i_budget=args.i_budget)
    emit(args, inst.to_json())


def cmd_audit(args) -> None:
    ring = load_ring(args)
    rep = paramgen.audit_conditions(ring, _spec(args), r_max=args.r_max, max_geometry_degree=args.max_degree)
    emit(args, rep.to_json())


def cmd_epsilon(args) -> None:
    plan = attacks.residue_advantage(
        args.n, args.q, _spec(args), args.alpha, args.r, r_max=args.r_max, representative=args.representative
    )
    doc = plan.to_json()
    if args.empirical:
        doc["empirical"] = attacks.empirical_advantage(args.n, args.q, _spec(args), args.alpha, args.empirical, args.seed)
    emit(args, doc)


def cmd_success_prob(args) -> None:
    emit(args, attacks.success_probability(args.ell, args.q, args.epsilon))


# ---------------------------------------------------------------------------
# parser


def _add_poly_source(p, ring: bool = False):
    p.add_argument("--f", help='inline polynomial, e.g. "x^4+1"')
    p.add_argument("--f-file", help="JSON file: coefficient list, ring, PARAMS or batch")
    p.add_argument("--lehmer", action="store_true", help="use Lehmer's degree-10 polynomial")
    if ring:
        p.add_argument("--q", type=int, help="prime modulus (when the source has none)")


def _add_spec(p, required=False):
    p.add_argument("--sigma", type=float, required=required, help="Gaussian standard deviation")
    p.add_argument("--trunc", type=float, default=2.0, help="truncation multiplier (default 2)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="plwe", description="PLWE/RLWE evaluation-attack toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a sample batch")
    _add_poly_source(p, ring=True)
    _add_spec(p)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--uniform", action="store_true", help="uniform samples instead of valid ones")
    p.add_argument("--scheme", choices=("plwe", "rlwe"), default="plwe")
    p.add_argument("--max-degree", type=int, default=geometry.DEFAULT_MAX_DEGREE)
    p.add_argument("--secret-out", help="write the hidden secret to this file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", parents=[common], help="run an attack on a batch")
    p.add_argument("--batch", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha-one", action="store_true")
    g.add_argument("--small-order", action="store_true")
    g.add_argument("--residue", action="store_true")
    p.add_argument("--alpha", type=int)
    p.add_argument("--r", type=int, help="order of alpha (computed when omitted)")
    p.add_argument("--threshold", type=int, help="elimination threshold t (default n*B)")
    p.add_argument("--bound", type=int, help="per-class value bound (default from sigma)")
    p.add_argument("--epsilon", type=float, help="precomputed advantage for --residue")
    p.add_argument("--mode", choices=("literal", "per_guess"), default="literal")
    p.add_argument("--r-max", type=int, default=64)
    _add_spec(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("geometry", parents=[common], help="embedding report for a polynomial")
    _add_poly_source(p)
    p.add_argument("--max-degree", type=int, default=geometry.DEFAULT_MAX_DEGREE)
    p.add_argument("--change-of-basis", action="store_true")
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("mahler", parents=[common], help="Mahler measure")
    _add_poly_source(p)
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("search", parents=[common], help="search vulnerable parameters")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--fallback", action="store_true", help="allow (x-a)^n + q when splitting fails")
    p.add_argument("--i-budget", type=int, default=10_000)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("audit", parents=[common], help="check vulnerability conditions of a ring")
    _add_poly_source(p, ring=True)
    _add_spec(p, required=True)
    p.add_argument("--r-max", type=int, default=64)
    p.add_argument("--max-degree", type=int, default=128)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("epsilon", parents=[common], help="advantage of the statistical attack")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--r-max", type=int, default=64)
    p.add_argument("--representative", choices=("given", "minimal"), default="given")
    p.add_argument("--empirical", type=int, default=0, help="also estimate by simulation with this many trials")
    _add_spec(p, required=True)
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("success-prob", parents=[common], help="success probabilities of the threshold test")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_success_prob)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except CapacityError as exc:
        msg = str(exc)
        if exc.suggestion:
            msg += " (suggestion: %s)" % exc.suggestion
        print("capacity error: %s" % msg, file=sys.stderr)
        return 3
    except SearchExhausted as exc:
        print("search exhausted: %s" % exc, file=sys.stderr)
        return 3
    except NumericError as exc:
        print("numeric error: %s" % exc, file=sys.stderr)
        return 4
    except (ValueError, PlweError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
