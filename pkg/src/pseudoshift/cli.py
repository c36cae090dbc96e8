"""Command line entry point: run a check on a problem file or a gallery entry."""

from __future__ import annotations

import argparse
import sys

from . import gallery
from .criteria import ScheduleNotFound
from .errors import ParseError, PseudoShiftError
from .report import FAIL, INCONCLUSIVE, PASS, REPORT_VERSION, dumps
from .specfile import CHECK_KINDS, parse_spec, run_spec, spec_from_dict

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_USAGE, EXIT_PARSE, EXIT_IO = 3, 4, 5
DSC_MODES = ("general", "same-map", "escaping")


class _Parser(argparse.ArgumentParser):
    # argparse's own usage status (2) would read as INCONCLUSIVE
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pseudoshift", description=__doc__)
    p.add_argument("--spec", metavar="PATH", help="problem file (YAML)")
    p.add_argument("--check", nargs="+", metavar="KIND",
                   help="'gallery NAME', or a check overriding the file's: " + ", ".join(CHECK_KINDS))
    p.add_argument("--mode", help="gallery check (hyper, super, ows, ows-powers) "
                                  "or super-check mode (general, same-map, escaping)")
    p.add_argument("--K", type=int, help="number of schedule terms")
    p.add_argument("--n-max", type=int, help="largest n tried by the schedule search")
    p.add_argument("--window", type=int, help="fixed window: the first N enumerated indices")
    p.add_argument("--horizon", type=int, help="orbit horizon for precondition searches")
    p.add_argument("--report", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    return p


def _not_found_report(result: ScheduleNotFound) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "checker": "search_schedule",
        "verdict": INCONCLUSIVE,
        "search": result.to_dict(),
    }


def _run(args):
    if args.check and args.check[0] == "gallery":
        if len(args.check) != 2:
            raise PseudoShiftError("usage: --check gallery NAME")
        if any(v is not None for v in (args.K, args.n_max, args.window, args.horizon)):
            raise PseudoShiftError("gallery entries run with their own parameters")
        return gallery.get(args.check[1]).run(args.mode)
    if args.check and (len(args.check) != 1 or args.check[0] not in CHECK_KINDS):
        raise PseudoShiftError(f"unknown check {' '.join(args.check)!r}")
    if args.spec is None:
        raise PseudoShiftError("give --spec PATH or --check gallery NAME")
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read {args.spec}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError(f"{args.spec} is not UTF-8 text") from None
    spec = parse_spec(text)
    if args.check and args.check[0] != spec.data["check"]["kind"]:
        data = dict(spec.data)
        data["check"] = {k: v for k, v in data["check"].items() if k not in ("kind", "mode")}
        data["check"]["kind"] = args.check[0]
        spec = spec_from_dict(data)
    if args.mode is not None and args.mode not in DSC_MODES:
        raise PseudoShiftError(f"--mode for problem files is one of {', '.join(DSC_MODES)}")
    return run_spec(spec, K=args.K, n_max=args.n_max, window=args.window,
                    horizon=args.horizon, mode=args.mode)


class _IOFailure(Exception):
    pass


def _render(result, fmt: str) -> tuple[str, str]:
    if isinstance(result, ScheduleNotFound):
        data = _not_found_report(result)
        if fmt == "json":
            return dumps(data) + "\n", INCONCLUSIVE
        s = data["search"]
        return (f"search_schedule: NOT-FOUND (blocking k={s.get('blocking_k')}, "
                f"margin={s.get('best_margin')})\n", INCONCLUSIVE)
    if fmt == "json":
        return result.to_json() + "\n", result.verdict
    return result.to_text().rstrip("\n") + "\n", result.verdict


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, verdict = _render(_run(args), args.format)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PseudoShiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.report}: {exc.strerror}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT[verdict]


if __name__ == "__main__":
    raise SystemExit(main())
