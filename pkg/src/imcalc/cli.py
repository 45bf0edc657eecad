"""File-driven checker with machine-readable reports and CI exit codes.

The input is a single JSON document describing an algebroid in the expression
grammar plus one candidate structure; the output is a deterministic report
(no timestamps, stable ordering) on stdout.  Exit codes: 0 all selected
checks pass, 1 a mathematical condition failed, 2 the input could not be
parsed or validated, 3 the two sides of a theorem oracle disagreed (which
certifies a library defect, not bad input).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebroid import (
    CheckReport,
    LieAlgebroid,
    check_axioms,
    check_morphism_to_line,
    cotangent_prolongation,
    tangent_prolongation,
)
from .errors import AlgebroidError, CrossCheckError, OracleDisagreement
from .forms import DifferentialForm
from .imforms import (
    IMForm,
    check_im_form,
    check_lagrangian,
    dirac_candidate,
)
from .linforms import (
    BundleForms,
    NotLinearError,
    decompose,
    form_frame_functional,
    linear_form,
    total_chart_of,
)
from .multivec import (
    LinearMultivector,
    check_gerstenhaber_derivation,
    derivation_from_linear,
    multivector_frame_functional,
)
from .poly import Chart, ChartError, ParseError, Polynomial, base_chart, parse
from .weil import cochain_from_bundle_forms, horizontal_vanishing_report

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_DEFECT = 3

MODES = ("im-form", "multivector", "weil", "axioms")


class InputError(ValueError):
    """Document rejected before any mathematics ran (exit code 2)."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InputError(message)


def _parse_expr(text, chart: Chart) -> Polynomial:
    _require(isinstance(text, str), f"expected an expression string, got {text!r}")
    try:
        return parse(text, chart)
    except ParseError as exc:
        raise InputError(f"bad expression {text!r}: {exc}") from exc


def load_algebroid(doc: dict) -> LieAlgebroid:
    _require(isinstance(doc.get("base"), list), "document needs a 'base' coordinate list")
    _require(isinstance(doc.get("rank"), int), "document needs an integer 'rank'")
    _require(isinstance(doc.get("frame"), list), "document needs a 'frame' name list")
    rank = doc["rank"]
    frame = doc["frame"]
    _require(len(frame) == rank, "'frame' must list rank-many names")
    try:
        chart = base_chart("M", doc["base"])
    except ChartError as exc:
        raise InputError(str(exc)) from exc
    anchor_rows = doc.get("anchor", [])
    _require(len(anchor_rows) == rank, "'anchor' must have one row per frame section")
    anchor = []
    for row in anchor_rows:
        _require(isinstance(row, list) and len(row) == chart.dim,
                 "each anchor row needs one expression per base coordinate")
        anchor.append([_parse_expr(e, chart) for e in row])
    structure: dict = {}
    for entry in doc.get("structure", []):
        _require(isinstance(entry, list) and len(entry) == 4,
                 "'structure' entries are [a, b, c, expression] with 1-based indices")
        a, b, c, expr = entry
        _require(all(isinstance(i, int) for i in (a, b, c)),
                 "structure indices must be integers")
        _require(1 <= a < b <= rank and 1 <= c <= rank,
                 f"structure indices {entry[:3]} out of range (need 1 <= a < b <= rank)")
        structure.setdefault((a - 1, b - 1), {})
        cur = structure[(a - 1, b - 1)].get(c - 1)
        poly = _parse_expr(expr, chart)
        structure[(a - 1, b - 1)][c - 1] = poly if cur is None else cur + poly
    try:
        return LieAlgebroid(chart, rank, frame, anchor, structure, unchecked=True)
    except (AlgebroidError, ChartError) as exc:
        raise InputError(str(exc)) from exc


def load_form(doc, chart: Chart, degree: int) -> DifferentialForm:
    _require(isinstance(doc, dict) and "terms" in doc,
             "forms are {'degree': d, 'terms': [[[i, ...], 'expr'], ...]}")
    _require(doc.get("degree") == degree, f"expected a degree-{degree} form")
    items = []
    for entry in doc["terms"]:
        _require(isinstance(entry, list) and len(entry) == 2, "form terms are [indices, expr]")
        idx, expr = entry
        _require(isinstance(idx, list) and all(isinstance(i, int) for i in idx),
                 "form term indices must be integer lists")
        _require(len(idx) == degree, f"form term {idx} must have {degree} indices")
        _require(all(1 <= i <= chart.dim for i in idx),
                 f"form term indices {idx} out of range")
        items.append((tuple(i - 1 for i in idx), _parse_expr(expr, chart)))
    return DifferentialForm.from_terms(chart, degree, items)


def load_candidate(doc: dict, algebroid: LieAlgebroid):
    candidate = doc.get("candidate")
    if candidate is None:
        return None
    _require(isinstance(candidate, dict) and "type" in candidate,
             "'candidate' must be an object with a 'type'")
    kind = candidate["type"]
    k = candidate.get("k")
    _require(isinstance(k, int) and k >= 1, "candidate needs an integer k >= 1")
    chart = algebroid.base_chart
    if kind == "im-form":
        mu_docs = candidate.get("mu")
        nu_docs = candidate.get("nu")
        _require(isinstance(mu_docs, list) and len(mu_docs) == algebroid.rank,
                 "'mu' needs one form per frame section")
        _require(isinstance(nu_docs, list) and len(nu_docs) == algebroid.rank,
                 "'nu' needs one form per frame section")
        mu = tuple(load_form(d, chart, k - 1) for d in mu_docs)
        nu = tuple(load_form(d, chart, k) for d in nu_docs)
        return IMForm(algebroid, BundleForms(k, mu, nu))
    if kind == "multivector":
        fiber = {}
        for entry in candidate.get("fiber", []):
            _require(isinstance(entry, list) and len(entry) == 3,
                     "'fiber' entries are [[b, ...], d, expr] with 1-based indices")
            b_list, d, expr = entry
            _require(all(isinstance(i, int) for i in b_list) and isinstance(d, int),
                     "fiber indices must be integers")
            _require(all(1 <= b <= algebroid.rank for b in b_list) and 1 <= d <= algebroid.rank,
                     f"fiber entry {entry[:2]} out of range")
            fiber[(tuple(b - 1 for b in b_list), d - 1)] = _parse_expr(expr, chart)
        mixed = {}
        for entry in candidate.get("mixed", []):
            _require(isinstance(entry, list) and len(entry) == 3,
                     "'mixed' entries are [[b, ...], j, expr] with 1-based indices")
            b_list, j, expr = entry
            _require(all(isinstance(i, int) for i in b_list) and isinstance(j, int),
                     "mixed indices must be integers")
            _require(all(1 <= b <= algebroid.rank for b in b_list) and 1 <= j <= chart.dim,
                     f"mixed entry {entry[:2]} out of range")
            mixed[(tuple(b - 1 for b in b_list), j - 1)] = _parse_expr(expr, chart)
        try:
            return LinearMultivector(algebroid, k, fiber, mixed)
        except (AlgebroidError, ChartError) as exc:
            raise InputError(str(exc)) from exc
    if kind == "weil":
        tc = total_chart_of(algebroid)
        form_doc = {"degree": k, "terms": candidate.get("form", [])}
        return ("weil", load_form(form_doc, tc.chart, k), tc)
    raise InputError(f"unknown candidate type {kind!r}")


def _merge_report(bag: dict, report: CheckReport) -> None:
    for v in report.violations:
        key = (v.condition, tuple(str(w) for w in v.witness))
        bag.setdefault(key, str(v.residual))


def _load_samples(doc: dict, args, chart: Chart):
    raw = None
    if args.samples:
        with open(args.samples, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    elif isinstance(doc.get("options"), dict) and "samples" in doc["options"]:
        raw = doc["options"]["samples"]
    if raw is None:
        return None
    points = []
    for row in raw:
        _require(isinstance(row, list) and len(row) == chart.dim,
                 "sample points need one rational per base coordinate")
        try:
            values = [Fraction(str(v)) for v in row]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad sample point {row}: {exc}") from exc
        points.append(dict(zip(chart.names, values)))
    return points


def run_document(doc: dict, args) -> tuple:
    """Returns (report_dict, exit_code)."""
    _require(isinstance(doc, dict), "input must be a JSON object")
    options = doc.get("options") or {}
    _require(isinstance(options, dict), "'options' must be an object")
    mode = args.mode or options.get("mode") or "axioms"
    _require(mode in MODES, f"unknown mode {mode!r}")
    oracle_raw = args.oracle or options.get("oracle", "on")
    _require(oracle_raw in ("on", "off"), "--oracle takes 'on' or 'off'")
    run_oracle = oracle_raw == "on"

    algebroid = load_algebroid(doc)
    candidate = load_candidate(doc, algebroid)
    k = args.k or options.get("k")
    if k is None and candidate is not None and mode != "axioms":
        k = candidate.k if isinstance(candidate, (IMForm, LinearMultivector)) \
            else candidate[1].degree

    verdict_tags = ["AXIOM_ANCHOR", "AXIOM_JACOBI"]
    bag: dict = {}
    axiom_report = check_axioms(algebroid)
    _merge_report(bag, axiom_report)
    oracle_block = None
    defect = False

    if mode == "im-form":
        _require(isinstance(candidate, IMForm), "mode im-form needs an im-form candidate")
        _require(candidate.k == k, f"candidate k={candidate.k} but k={k} selected")
        verdict_tags += ["IM1", "IM2", "IM3"]
        im_report = check_im_form(candidate)
        _merge_report(bag, im_report)
        if run_oracle:
            verdict_tags.append("MORPHISM")
            form = linear_form(candidate.forms, total_chart_of(algebroid))
            prol = tangent_prolongation(algebroid, k)
            functional = form_frame_functional(form, algebroid, k, prol)
            morph_report = check_morphism_to_line(prol, functional)
            _merge_report(bag, morph_report)
            route1 = im_report.passed
            route2 = axiom_report.passed and morph_report.passed
            oracle_block = {"im_conditions": route1, "morphism": route2,
                            "agree": route1 == route2}
            defect = route1 != route2
        samples = _load_samples(doc, args, algebroid.base_chart)
        if samples is not None and k == 2:
            verdict_tags += ["ISOTROPY", "LAGRANGIAN"]
            _merge_report(bag, check_lagrangian(dirac_candidate(candidate), samples))
    elif mode == "multivector":
        _require(isinstance(candidate, LinearMultivector),
                 "mode multivector needs a multivector candidate")
        _require(candidate.k == k, f"candidate k={candidate.k} but k={k} selected")
        verdict_tags += ["R1", "R2", "R3"]
        deriv_report = check_gerstenhaber_derivation(
            algebroid, derivation_from_linear(candidate))
        _merge_report(bag, deriv_report)
        if run_oracle:
            verdict_tags.append("MORPHISM")
            prol = cotangent_prolongation(algebroid, k)
            functional = multivector_frame_functional(candidate, algebroid, k, prol)
            morph_report = check_morphism_to_line(prol, functional)
            _merge_report(bag, morph_report)
            route1 = deriv_report.passed
            route2 = axiom_report.passed and morph_report.passed
            oracle_block = {"derivation": route1, "morphism": route2,
                            "agree": route1 == route2}
            defect = route1 != route2
    elif mode == "weil":
        _require(isinstance(candidate, tuple) and candidate[0] == "weil",
                 "mode weil needs a weil candidate")
        _, form, tc = candidate
        _require(form.degree == k, f"candidate k={form.degree} but k={k} selected")
        try:
            bundle_forms = decompose(form, tc)
        except NotLinearError as exc:
            raise InputError(str(exc)) from exc
        verdict_tags += ["DH0", "DH1", "DH2"]
        dh_report = horizontal_vanishing_report(
            cochain_from_bundle_forms(algebroid, bundle_forms))
        _merge_report(bag, dh_report)
        if run_oracle:
            verdict_tags += ["IM1", "IM2", "IM3", "MORPHISM"]
            im_report = check_im_form(IMForm(algebroid, bundle_forms))
            _merge_report(bag, im_report)
            prol = tangent_prolongation(algebroid, k)
            functional = form_frame_functional(form, algebroid, k, prol)
            morph_report = check_morphism_to_line(prol, functional)
            _merge_report(bag, morph_report)
            routes = {"dh_vanishing": dh_report.passed,
                      "im_conditions": im_report.passed,
                      "morphism": axiom_report.passed and morph_report.passed}
            oracle_block = dict(routes)
            oracle_block["agree"] = len(set(routes.values())) == 1
            defect = not oracle_block["agree"]
    # mode "axioms" runs no candidate suite; a present candidate is ignored

    witnesses = [
        {"condition": cond, "witness": list(w), "residual": res}
        for (cond, w), res in sorted(bag.items())
    ]
    failed_tags = {w["condition"] for w in witnesses}
    verdicts = {tag: ("fail" if tag in failed_tags else "pass") for tag in verdict_tags}
    if oracle_block is not None and "MORPHISM" in verdicts:
        # "morphism" means morphism of Lie algebroids: on data that fails the
        # axioms the verdict is fail even when every frame residual vanishes
        # (the axiom witnesses then carry the explanation)
        verdicts["MORPHISM"] = "pass" if oracle_block["morphism"] else "fail"
    passed = all(v == "pass" for v in verdicts.values()) and not defect
    report = {
        "mode": mode,
        "k": k,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "passed": passed,
    }
    if oracle_block is not None:
        report["oracle"] = oracle_block
    if defect:
        return report, EXIT_DEFECT
    return report, EXIT_PASS if passed else EXIT_FAIL


def render_text(report: dict) -> str:
    lines = [f"mode: {report['mode']}  k: {report['k']}"]
    for tag, verdict in sorted(report["verdicts"].items()):
        lines.append(f"{tag}: {verdict.upper()}")
    for w in report["witnesses"]:
        lines.append(f"  {w['condition']} at ({', '.join(w['witness'])}): {w['residual']}")
    if "oracle" in report:
        pieces = ", ".join(f"{k}={v}" for k, v in sorted(report["oracle"].items()))
        lines.append(f"oracle: {pieces}")
    lines.append(f"result: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="verify",
        description="Verify algebroid axioms, IM-form / multivector / Weil-cochain "
                    "conditions, and the theorem oracles on a JSON problem document.")
    parser.add_argument("--input", required=True, help="problem document (JSON)")
    parser.add_argument("--k", type=int, default=None, help="degree override")
    parser.add_argument("--mode", choices=MODES, default=None, help="suite selection")
    parser.add_argument("--oracle", choices=("on", "off"), default=None,
                        help="also run the independent morphism oracle (default on)")
    parser.add_argument("--samples", default=None,
                        help="JSON file of rational sample points for the k=2 rank checks")
    parser.add_argument("--report", choices=("json", "text"), default="json")
    args = parser.parse_args(argv)

    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        report, code = run_document(doc, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, NotLinearError, AlgebroidError, ChartError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OracleDisagreement, CrossCheckError) as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT

    if args.report == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
