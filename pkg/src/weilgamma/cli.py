"""Command line front end: verify one instance or run the check suites.

Exit status is 0 when every requested check passes, 1 when a comparison
fails, and 2 when the computation cannot be carried out at all (an
obstructed cocycle, an unsupported field or frame, or exhausted precision).
"""

import argparse
import json
import sys

from .errors import Obstructed, WeilGammaError
from .harness import SUITES, InstanceSpec, run_suite, verify_main_theorem


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _cmd_verify(args):
    with open(args.instance) as fh:
        data = json.load(fh)
    if args.precision is not None:
        data["precision"] = args.precision
    if args.psi_level is not None:
        data["psi_level"] = args.psi_level
    if args.intermediates:
        data["intermediates"] = True
    spec = InstanceSpec.from_dict(data)
    report = verify_main_theorem(spec)
    print(f"{spec.label()} psi={spec.psi_level}: {report.verdict}  "
          f"lhs={report.lhs} rhs={report.rhs}")
    for name in sorted(report.intermediates):
        state = "ok" if report.intermediates[name] else "FAIL"
        print(f"  intermediate {name}: {state}")
    for name in sorted(report.oracle):
        entry = report.oracle[name]
        state = "ok" if entry["ok"] else "FAIL"
        print(f"  oracle {name}: {state} (residual {entry['residual']:.2e})")
    if report.retried:
        print(f"  precision doubled to {report.precision} after a loss")
    if args.json:
        _write_json(args.json, report.to_dict())
    bad_extra = (any(not v for v in report.intermediates.values())
                 or any(not v["ok"] for v in report.oracle.values()))
    return 0 if report.verdict == "PASS" and not bad_extra else 1


def _cmd_suite(args):
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    report = run_suite(config)
    for suite in report["suites"]:
        for check in suite["checks"]:
            mark = "PASS" if check["ok"] else "FAIL"
            print(f"[{mark}] {suite['suite']} :: {check['name']} :: "
                  f"{check['detail']}")
        print(f"-- {suite['suite']}: {suite['passed']} passed, "
              f"{suite['failed']} failed")
    print(f"== total: {report['passed']} passed, {report['failed']} failed: "
          f"{report['verdict']}")
    if args.json:
        _write_json(args.json, report)
    return 0 if report["verdict"] == "PASS" else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weilgamma",
        description="verify Weil-index identities for descended torus forms")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="verify one instance file")
    verify.add_argument("instance", help="path to an instance JSON file")
    verify.add_argument("--precision", type=int, default=None,
                        help="override the working precision")
    verify.add_argument("--psi-level", type=int, default=None,
                        help="override the additive character level")
    verify.add_argument("--intermediates", action="store_true",
                        help="also run the named intermediate identities")
    verify.add_argument("--json", metavar="OUT", default=None,
                        help="write the full report to this file")

    suite = sub.add_parser("suite", help="run the named check suites")
    suite.add_argument("config", nargs="?", default=None,
                       help="optional JSON config with a 'suites' list; "
                            f"known suites: {', '.join(SUITES)}")
    suite.add_argument("--json", metavar="OUT", default=None,
                       help="write the aggregate report to this file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_suite(args)
    except Obstructed as exc:
        print(f"obstructed: {exc}", file=sys.stderr)
        return 2
    except (WeilGammaError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
