"""Command-line front end: ``simpspec <subcommand> ...``.

Exit codes: 0 success, 2 validation or usage error, 3 resource guardrail.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import sqrt

import numpy as np

from . import bounds, fk, moments, spectra, words
from .cells import dumps_sample, sample_complex
from .errors import DomainError, ResourceError
from .operators import adjacency, centered_H, dump_matrix_csv

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE = 0, 2, 3


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _probability(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dump_json(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    _write(text, out)


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _complex_args(p, seed=True):
    p.add_argument("--n", type=_positive_int, required=True, help="number of vertices")
    p.add_argument("--d", type=_positive_int, required=True, help="dimension of the complex")
    p.add_argument("--p", type=_probability, required=True, help="d-cell probability")
    if seed:
        p.add_argument("--seed", type=_nonneg_int, default=0)


def _check_complex(args):
    if args.n < args.d + 1:
        raise DomainError(f"need n >= d + 1, got n={args.n}, d={args.d}")


def cmd_sample(args):
    _check_complex(args)
    X = sample_complex(args.n, args.d, args.p, args.seed)
    _write(dumps_sample(X), args.out)
    if args.matrix:
        dump_matrix_csv(adjacency(X), args.matrix)


def _operator(args):
    X = sample_complex(args.n, args.d, args.p, args.seed)
    A = adjacency(X)
    return A if args.kind == "A" else centered_H(X, A)


def cmd_spectrum(args):
    _check_complex(args)
    M = _operator(args)
    report = spectra.spectrum_report(M, k_max=args.k_max)
    spectra.write_eigenvalues_csv(report, f"{args.prefix}_eigenvalues.csv")
    spectra.write_histogram_csv(report, f"{args.prefix}_histogram.csv", bins=args.bins)
    _dump_json(report.to_dict(), f"{args.prefix}_report.json")


def cmd_confine(args):
    _check_complex(args)
    X = sample_complex(args.n, args.d, args.p, args.seed)
    report = spectra.spectrum_report(adjacency(X))
    verdict = spectra.gap_and_confinement(report, args.xi, variant=args.variant)
    _dump_json(verdict.to_dict(), args.out)


def _map(fn, items, threads):
    workers = moments.resolve_threads(threads)
    if workers == 1 or len(items) == 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_gap(args):
    _check_complex(args)
    predicted = args.n * args.p - 2 * sqrt(args.d * args.n * args.p * (1 - args.p))

    def one(seed):
        X = sample_complex(args.n, args.d, args.p, seed)
        r = spectra.spectrum_report(adjacency(X))
        return {"seed": seed, "gap": r.gap, "relative_deviation": (r.gap - predicted) / predicted}

    rows = _map(one, list(range(args.seed, args.seed + args.trials)), args.threads)
    gaps = [r["gap"] for r in rows]
    out = {
        "n": args.n,
        "d": args.d,
        "p": args.p,
        "gap_predicted": predicted,
        "trials": rows,
        "gap_mean": float(np.mean(gaps)),
        "gap_median": float(np.median(gaps)),
    }
    _dump_json(out, args.out)


def cmd_semicircle(args):
    if any(n < args.d + 1 for n in args.ns):
        raise DomainError("every n must satisfy n >= d + 1")
    if not 0 < args.p < 1:
        raise DomainError("need 0 < p < 1")
    jobs = [(n, s) for n in args.ns for s in range(args.seed, args.seed + args.trials)]

    def one(job):
        n, s = job
        X = sample_complex(n, args.d, args.p, s)
        return spectra.spectrum_report(adjacency(X)).ks_distance

    ks = _map(one, jobs, args.threads)
    lines = ["n,seed,ks"] + [f"{n},{s},{v!r}" for (n, s), v in zip(jobs, ks)]
    _write("\n".join(lines) + "\n", args.out)


def cmd_moments(args):
    _check_complex(args)
    wordsum = args.wordsum or not (args.exact or args.mc)
    reports = moments.moment_reports(
        args.n,
        args.d,
        args.p,
        args.k,
        wordsum=wordsum,
        exact=args.exact,
        mc_trials=args.trials if args.mc else 0,
        seed=args.seed,
        threads=args.threads,
    )
    if args.format == "json":
        _dump_json([r.to_dict() for r in reports], args.out)
        return
    import io

    buf = io.StringIO()
    moments.write_moments_csv(reports, buf)
    _write(buf.getvalue(), args.out)


def _word_from(text, d, two_word=False):
    w = words.validate_two_word(text) if two_word else words.validate_word(text)
    if d is not None and w.d != d:
        raise DomainError(f"letters have {w.d} vertices but --d {d} was given")
    return w


def cmd_words_enumerate(args):
    found = words.enumerate_word_classes(
        args.k, args.s, args.d, closed_only=not args.open, odd_constraint=args.two_word
    )
    _write("".join(f"{w}\n" for w in found), args.out)


def cmd_words_stats(args):
    w = _word_from(args.word, args.d, args.two_word)
    st = words.word_statistics(w)

    def key(e):
        return f"{words.format_letters(e)}"

    out = {
        "word": str(w),
        "d": w.d,
        "k": w.k,
        "closed": w.closed,
        "supp0": list(st.supp0),
        "suppd": [list(t) for t in st.suppd],
        "edge_counts": {key(e): c for e, c in st.edge_counts.items()},
        "cell_counts": {",".join(map(str, t)): c for t, c in st.cell_counts.items()},
        "nonneighbor_edges": {
            ",".join(map(str, t)): [key(e) for e in es] for t, es in st.nonneighbor_edges.items()
        },
        "signs": {",".join(map(str, t)): s for t, s in st.signs.items()},
        "edge_crossing_times": {key(e): ts for e, ts in st.edge_times.items()},
        "cell_crossing_times": {",".join(map(str, t)): ts for t, ts in st.cell_times.items()},
    }
    if args.two_word:
        out["odd_cell_counts"] = {",".join(map(str, t)): c for t, c in st.odd_cell_counts.items()}
        out["suppd_odd"] = [list(t) for t in st.suppd_odd]
    _dump_json(out, args.out)


def cmd_words_canon(args):
    w = _word_from(args.word, args.d, args.two_word)
    _write(f"{words.canonicalize(w)}\n", args.out)


def cmd_fk_parse(args):
    w = _word_from(args.word, args.d, args.two_word)
    a = fk.fk_parse_two_word(w) if args.two_word else fk.fk_parse(w)
    ok, reason = fk.is_fk_sentence(a)
    out = {
        "sentence": str(a),
        "parse_points": list(a.parse_points),
        "m": a.m,
        "is_fk_sentence": ok,
        "reason": reason,
    }
    _dump_json(out, args.out)


def cmd_fk_check(args):
    sentence = fk.parse_sentence(args.sentence)
    ok, reason = fk.is_fk_sentence(sentence)
    _dump_json({"sentence": fk.format_sentence(sentence), "is_fk_sentence": ok, "reason": reason}, args.out)


def cmd_tree_encode(args):
    w = _word_from(args.word, args.d)
    _write(f"{words.format_tree(words.tree_encode(w))}\n", args.out)


def cmd_tree_decode(args):
    _write(f"{words.tree_decode(args.tree, args.d)}\n", args.out)


def cmd_bounds_eval(args):
    _check_complex(args)
    if not 0 < args.p < 1:
        raise DomainError("need 0 < p < 1")
    q = args.p * (1 - args.p)
    iv = bounds.theorem_intervals(args.n, args.d, args.p, args.xi, args.D)
    out = {
        "intervals": iv.to_dict(),
        "error_E": bounds.eval_error_E(args.xi, args.n, q, args.d),
        "error_script": bounds.eval_error_script(args.xi, args.n, args.d) if args.n >= 3 else None,
        "gamma": iv.gamma,
        "kappa": sqrt(args.n * q) / (1 - args.p),
        "complete_spectrum": bounds.complete_spectrum(args.n, args.d),
    }
    if args.k is not None:
        s = args.s if args.s is not None else args.k // 2 + args.d
        out["combinatorial"] = bounds.combinatorial_bounds(args.k, s, args.d)
    _dump_json(out, args.out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="simpspec",
        description="Spectra and moment-method combinatorics of Linial-Meshulam complexes.",
    )
    parser.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads for trial loops (SIMPSPEC_THREADS overrides)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def out_arg(p):
        p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("sample", help="draw X(d,n,p) and write it as a sample file")
    _complex_args(p)
    out_arg(p)
    p.add_argument("--matrix", default=None, help="also write A as a nonzero CSV")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="eigenvalue CSV, histogram CSV and report JSON")
    _complex_args(p)
    p.add_argument("--kind", choices=["A", "H"], default="A")
    p.add_argument("--bins", type=_positive_int, default=80)
    p.add_argument("--k-max", type=_nonneg_int, default=4)
    p.add_argument("--prefix", default="spectrum", help="output file prefix")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("confine", help="two-interval confinement verdict as JSON")
    _complex_args(p)
    p.add_argument("--xi", type=_positive_float, required=True)
    p.add_argument("--variant", choices=["basic", "refined"], default="basic")
    out_arg(p)
    p.set_defaults(func=cmd_confine)

    p = sub.add_parser("gap", help="spectral gap over consecutive seeds")
    _complex_args(p)
    p.add_argument("--trials", type=_positive_int, default=5)
    out_arg(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("semicircle", help="Kolmogorov distance to the semicircle over an n-grid")
    p.add_argument("--ns", type=_int_list, required=True, help="comma-separated n values")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--seed", type=_nonneg_int, default=1)
    p.add_argument("--trials", type=_positive_int, default=1)
    out_arg(p)
    p.set_defaults(func=cmd_semicircle)

    p = sub.add_parser("moments", help="expected moments of H as CSV")
    _complex_args(p)
    p.add_argument("--k", type=_positive_int, required=True, help="largest moment order")
    p.add_argument("--wordsum", action="store_true")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--mc", action="store_true")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    out_arg(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("words", help="word utilities")
    wsub = p.add_subparsers(dest="words_command", required=True)
    q = wsub.add_parser("enumerate", help="canonical closed word classes")
    q.add_argument("--k", type=_nonneg_int, required=True)
    q.add_argument("--s", type=_positive_int, default=None)
    q.add_argument("--d", type=_positive_int, required=True)
    q.add_argument("--two-word", action="store_true")
    q.add_argument("--open", action="store_true", help="drop the closedness requirement")
    out_arg(q)
    q.set_defaults(func=cmd_words_enumerate)
    for name, fn, helptext in (
        ("stats", cmd_words_stats, "crossing statistics as JSON"),
        ("canon", cmd_words_canon, "canonical representative"),
    ):
        q = wsub.add_parser(name, help=helptext)
        q.add_argument("word")
        q.add_argument("--d", type=_positive_int, default=None)
        q.add_argument("--two-word", action="store_true")
        out_arg(q)
        q.set_defaults(func=fn)

    p = sub.add_parser("fk", help="FK parsing")
    fsub = p.add_subparsers(dest="fk_command", required=True)
    q = fsub.add_parser("parse", help="FK parsing of a closed word")
    q.add_argument("word")
    q.add_argument("--d", type=_positive_int, default=None)
    q.add_argument("--two-word", action="store_true")
    out_arg(q)
    q.set_defaults(func=cmd_fk_parse)
    q = fsub.add_parser("check", help="validate an FK sentence (words joined by |)")
    q.add_argument("sentence")
    out_arg(q)
    q.set_defaults(func=cmd_fk_check)

    p = sub.add_parser("tree", help="Wigner word and labelled tree conversion")
    tsub = p.add_subparsers(dest="tree_command", required=True)
    q = tsub.add_parser("encode", help="Wigner word to tree literal")
    q.add_argument("word")
    q.add_argument("--d", type=_positive_int, default=None)
    out_arg(q)
    q.set_defaults(func=cmd_tree_encode)
    q = tsub.add_parser("decode", help="tree literal to Wigner word")
    q.add_argument("tree")
    q.add_argument("--d", type=_positive_int, required=True)
    out_arg(q)
    q.set_defaults(func=cmd_tree_decode)

    p = sub.add_parser("bounds", help="closed-form bounds")
    bsub = p.add_subparsers(dest="bounds_command", required=True)
    q = bsub.add_parser("eval", help="evaluate every bound at one parameter point")
    _complex_args(q, seed=False)
    q.add_argument("--xi", type=_positive_float, required=True)
    q.add_argument("--D", type=float, default=0.0)
    q.add_argument("--k", type=_nonneg_int, default=None)
    q.add_argument("--s", type=_positive_int, default=None)
    out_arg(q)
    q.set_defaults(func=cmd_bounds_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except ResourceError as exc:
        print(f"simpspec: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, ValueError) as exc:
        print(f"simpspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def run(argv=None):
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
