"""Command-line driver: blur, deblur, sweep, selftest, phantom.

Every command prints one JSON record per line on stdout.  Exit codes:
0 success, 1 validation, 2 I/O, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import phantoms
from .blur import Order, add_noise, exact_blur_se2, monte_carlo_blur
from .fileio import ImageFormatError, load_image, save_image
from .imaging import rmse
from .kernels import MotionParams
from .pipelines import METHODS, DeblurOptions, deblur, sweep

SCHEMA_VERSION = 1

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def emit(record, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps({"schema": SCHEMA_VERSION, **record}) + "\n")
    stream.flush()


def _float_list(text):
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("need at least one value")
    return vals


def _params(args):
    return MotionParams(args.t1, args.t2, args.series_cutoff)


def _add_params(p):
    p.add_argument("--t1", type=float, default=0.0, help="translational diffusion time (length^2)")
    p.add_argument("--t2", type=float, default=0.0, help="rotational diffusion time (rad^2)")
    p.add_argument("--series-cutoff", type=int, default=None,
                   help="wrapped-normal series cutoff K (default from t2)")


def _add_method_options(p):
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--order", type=int, default=30, help="expansion order N (hermite, laguerre-*)")
    p.add_argument("--band-limit", type=int, default=None, help="SE(2) band limit B")
    p.add_argument("--n-radial", type=int, default=None, help="SE(2) radial frequency count M")
    p.add_argument("--p-max", type=float, default=None, help="SE(2) largest radial frequency")
    p.add_argument("--pad", type=int, default=0, help="zero padding for wiener (pixels per side)")


def _options(args):
    return DeblurOptions(order=args.order, band_limit=args.band_limit, n_radial=args.n_radial,
                         p_max=args.p_max, pad=args.pad)


def cmd_blur(args):
    img = load_image(args.input)
    params = _params(args)
    if args.mode == "mc":
        out = monte_carlo_blur(img, params, args.samples, args.seed)
    else:
        out = exact_blur_se2(img, params, Order(args.compose))
    if args.noise > 0:
        out = add_noise(out, args.noise, args.seed)
    save_image(out, args.output)
    if args.figure:
        from .plotting import image_panels
        image_panels([("input", img), ("blurred", out)], args.figure,
                     f"t1={params.t1:g}, t2={params.t2:g}, {args.mode}")
    emit({"command": "blur", "mode": args.mode, "t1": params.t1, "t2": params.t2,
          "n_samples": args.samples if args.mode == "mc" else None, "seed": args.seed,
          "rmse_vs_input": rmse(out, img), "output": str(args.output)})
    return EXIT_OK


def cmd_deblur(args):
    img = load_image(args.input)
    ref = load_image(args.reference) if args.reference else None
    if ref is not None and ref.shape != img.shape:
        raise ValueError(f"reference shape {ref.shape} does not match input {img.shape}")
    params = _params(args)
    out = deblur(img, args.method, params, args.epsilon, _options(args))
    save_image(out, args.output)
    rec = {"command": "deblur", "method": args.method, "epsilon": args.epsilon,
           "t1": params.t1, "t2": params.t2, "output": str(args.output)}
    if args.method in ("hermite", "laguerre-rot", "laguerre-se2"):
        rec["order"] = args.order
    if ref is not None:
        rec["rmse_vs_reference"] = rmse(out, ref)
        rec["rmse_blurred_vs_reference"] = rmse(img, ref)
    if args.figure:
        from .plotting import image_panels
        panels = [("blurred", img), (f"{args.method}, eps={args.epsilon:g}", out)]
        if ref is not None:
            panels.append(("reference", ref))
        image_panels(panels, args.figure)
    emit(rec)
    return EXIT_OK


def cmd_sweep(args):
    img = load_image(args.input)
    ref = load_image(args.reference)
    if ref.shape != img.shape:
        raise ValueError(f"reference shape {ref.shape} does not match input {img.shape}")
    params = _params(args)
    rows = []
    try:
        for eps in args.epsilons:
            rows += sweep(img, args.method, params, [eps], ref, _options(args))
    finally:
        if rows:
            best = min(range(len(rows)), key=lambda k: rows[k]["rmse"])
            for k, r in enumerate(rows):
                r["best"] = k == best
        with open(args.report, "w") as fh:
            json.dump({"schema": SCHEMA_VERSION, "method": args.method, "t1": params.t1,
                       "t2": params.t2, "complete": len(rows) == len(args.epsilons), "rows": rows},
                      fh, indent=1)
    if args.figure:
        from .plotting import sweep_curve
        sweep_curve(rows, args.figure, f"{args.method}: t1={params.t1:g}, t2={params.t2:g}",
                    baseline=rmse(img, ref))
    best = next(r for r in rows if r["best"])
    emit({"command": "sweep", "method": args.method, "n": len(rows), "best_epsilon": best["epsilon"],
          "best_rmse": best["rmse"], "rmse_blurred_vs_reference": rmse(img, ref),
          "report": str(args.report)})
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run
    checks = run(corrupt_bessel_table=args.corrupt_bessel_table)
    for c in checks:
        emit({"command": "selftest", **c.record()})
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


def cmd_phantom(args):
    img = phantoms.make(args.name, args.size, args.pitch)
    save_image(img, args.output)
    emit({"command": "phantom", "name": args.name, "size": args.size, "pitch": args.pitch,
          "output": str(args.output)})
    return EXIT_OK


def build_parser():
    ap = _Parser(prog="motiondeblur", description="Rigid-motion blur simulation and deconvolution.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("blur", help="synthesize a motion-blurred image")
    p.add_argument("input")
    p.add_argument("output")
    _add_params(p)
    p.add_argument("--mode", choices=("mc", "exact"), default="mc")
    p.add_argument("--samples", type=int, default=100, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compose", choices=[o.value for o in Order], default=Order.TRANSLATE_THEN_ROTATE.value,
                   help="factor order for --mode exact")
    p.add_argument("--noise", type=float, default=0.0, help="additive Gaussian noise sigma")
    p.add_argument("--figure", help="write a PNG comparison figure here")
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("deblur", help="deconvolve with one of the six methods")
    p.add_argument("input")
    p.add_argument("output")
    _add_params(p)
    _add_method_options(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--reference", help="ground-truth image for the rmse report")
    p.add_argument("--figure", help="write a PNG comparison figure here")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("sweep", help="deblur over a list of epsilon values")
    p.add_argument("input")
    _add_params(p)
    _add_method_options(p)
    p.add_argument("--epsilons", type=_float_list, required=True, help="comma separated list")
    p.add_argument("--reference", required=True)
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--figure", help="write a PNG rmse-vs-epsilon plot here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run the analytic invariant checks")
    p.add_argument("--corrupt-bessel-table", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("phantom", help="write a synthetic test image")
    p.add_argument("name", choices=sorted(phantoms.PHANTOMS))
    p.add_argument("output")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--pitch", type=float, default=1.0)
    p.set_defaults(func=cmd_phantom)
    return ap


def _fail(code, kind, err):
    emit({"error": kind, "message": str(err)}, sys.stderr)
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_VALIDATION, "usage", e)
    try:
        return args.func(args)
    except ImageFormatError as e:
        return _fail(EXIT_IO, "format", e)
    except ArithmeticError as e:
        return _fail(EXIT_NUMERICAL, "numerical", e)
    except ValueError as e:
        return _fail(EXIT_VALIDATION, "validation", e)
    except OSError as e:
        return _fail(EXIT_IO, "io", e)


if __name__ == "__main__":
    sys.exit(main())
